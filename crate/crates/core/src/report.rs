//! Named pass/fail checks and their text and JSON renderings.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub expected: String,
    pub actual: String,
    #[serde(rename = "ref")]
    pub anchor: String,
    /// Where the expected value comes from, when the fixture says so.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        expected: impl ToString,
        actual: impl ToString,
        anchor: impl Into<String>,
    ) -> Self {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        Check {
            name: name.into(),
            pass: expected == actual,
            expected,
            actual,
            anchor: anchor.into(),
            origin: None,
        }
    }

    /// A check whose actual value could not be computed.
    pub fn error(
        name: impl Into<String>,
        expected: impl ToString,
        err: impl fmt::Display,
        anchor: impl Into<String>,
    ) -> Self {
        Check {
            name: name.into(),
            pass: false,
            expected: expected.to_string(),
            actual: format!("error: {err}"),
            anchor: anchor.into(),
            origin: None,
        }
    }

    pub fn with_origin(mut self, origin: impl Into<String>) -> Self {
        self.origin = Some(origin.into());
        self
    }

    pub fn flag(
        name: impl Into<String>,
        pass: bool,
        detail: impl ToString,
        anchor: impl Into<String>,
    ) -> Self {
        Check {
            name: name.into(),
            pass,
            expected: "true".into(),
            actual: if pass { "true".into() } else { format!("false ({})", detail.to_string()) },
            anchor: anchor.into(),
            origin: None,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {}: {} expected={} actual={} ref=\"{}\"",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.expected,
            self.actual,
            self.anchor
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(scenario: impl Into<String>) -> Self {
        Report { scenario: scenario.into(), checks: vec![] }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        self.checks.extend(cs);
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.checks.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary(&self) -> String {
        format!("SUMMARY {}: {}/{} passed", self.scenario, self.passed(), self.checks.len())
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            report: &'a Report,
            passed: usize,
            total: usize,
        }
        serde_json::to_string_pretty(&Out { report: self, passed: self.passed(), total: self.checks.len() })
            .expect("serializable")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        writeln!(f, "{}", self.summary())
    }
}
