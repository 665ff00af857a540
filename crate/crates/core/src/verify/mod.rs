//! Fixture-driven verification: the boundary case table and the two scenario replays.
//!
//! Expected values live in the fixture files. Each is written as
//!
//! ```text
//! expect <key> = <value> origin=<published|derived|direct> ref="<anchor>"
//! ```
//!
//! where `origin` records whether the value is printed in the source, derived from
//! printed values by a short computation, or immediate from the definitions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::report::{Check, Report};

mod cases;
mod scenario;

pub use cases::{run_case_table, run_case_table_text, CaseEntry, CaseTable};
pub use scenario::{run_scenario, Scenario};

pub const CASES_TABLE: &str = include_str!("../../fixtures/cases.table");
pub const Y244_EXPECT: &str = include_str!("../../fixtures/y244.expect");
pub const Y333_EXPECT: &str = include_str!("../../fixtures/y333.expect");
pub const Y244_ARR: &str = include_str!("../../fixtures/y244.arr");
pub const Y333_ARR: &str = include_str!("../../fixtures/y333.arr");
pub const Y244_COORDS: &str = include_str!("../../fixtures/y244.coords");
pub const Y333_COORDS: &str = include_str!("../../fixtures/y333.coords");

/// Bundled fixture text by file name.
pub fn bundled(file: &str) -> Result<&'static str> {
    Ok(match file {
        "cases.table" => CASES_TABLE,
        "y244.expect" => Y244_EXPECT,
        "y333.expect" => Y333_EXPECT,
        "y244.arr" => Y244_ARR,
        "y333.arr" => Y333_ARR,
        "y244.coords" => Y244_COORDS,
        "y333.coords" => Y333_COORDS,
        _ => return Err(Error::Io(format!("no bundled fixture `{file}`"))),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    Published,
    Derived,
    Direct,
}

impl FromStr for Origin {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "published" => Ok(Origin::Published),
            "derived" => Ok(Origin::Derived),
            "direct" => Ok(Origin::Direct),
            _ => Err(format!("unknown origin `{s}`")),
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Published => "published",
            Origin::Derived => "derived",
            Origin::Direct => "direct",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub line: usize,
    pub key: String,
    pub value: String,
    pub origin: Origin,
    pub anchor: String,
}

impl Expectation {
    /// Parses the part after the `expect` keyword.
    pub fn parse(line: usize, rest: &str) -> Result<Self> {
        let err = |m: &str| Error::parse(line, m);
        let (key, rest) = rest.split_once(" = ").ok_or_else(|| err("expected `<key> = <value>`"))?;
        let (value, rest) = rest.split_once(" origin=").ok_or_else(|| err("missing origin="))?;
        let (origin, rest) = rest.split_once(' ').unwrap_or((rest, ""));
        let origin: Origin = origin.parse().map_err(|e: String| err(&e))?;
        let anchor = rest
            .trim()
            .strip_prefix("ref=\"")
            .and_then(|r| r.strip_suffix('"'))
            .ok_or_else(|| err("missing ref=\"...\" anchor"))?;
        if anchor.is_empty() {
            return Err(err("empty anchor"));
        }
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(err("empty key or value"));
        }
        Ok(Expectation {
            line,
            key: key.to_string(),
            value: value.to_string(),
            origin,
            anchor: anchor.to_string(),
        })
    }

    /// Compares against a computed value; `Err` carries an evaluation failure.
    pub fn check(&self, name: impl Into<String>, actual: std::result::Result<String, String>) -> Check {
        let c = match actual {
            Ok(a) => {
                let mut c = Check::new(name, &self.value, &a, &self.anchor);
                c.pass = same_value(&self.value, &a);
                c
            }
            Err(e) => Check::error(name, &self.value, e, &self.anchor),
        };
        c.with_origin(self.origin.to_string())
    }
}

/// Integer combination of names such as `T1+2B+T33`; `0` is the empty sum.
pub fn parse_divisor(s: &str) -> Option<BTreeMap<String, i64>> {
    let mut out = BTreeMap::new();
    if s == "0" {
        return Some(out);
    }
    for term in s.split('+') {
        let split = term.find(|c: char| !c.is_ascii_digit())?;
        let (coef, name) = term.split_at(split);
        let coef: i64 = if coef.is_empty() { 1 } else { coef.parse().ok()? };
        let mut chars = name.chars();
        if !chars.next()?.is_ascii_alphabetic() || !chars.all(|c| c.is_ascii_alphanumeric() || c == '\'') {
            return None;
        }
        *out.entry(name.to_string()).or_insert(0) += coef;
    }
    Some(out)
}

pub fn format_divisor(terms: &[(String, i64)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|(n, c)| if *c == 1 { n.clone() } else { format!("{c}{n}") })
        .collect::<Vec<_>>()
        .join("+")
}

/// String equality, except that two sums of names are compared as sums.
fn same_value(expected: &str, actual: &str) -> bool {
    expected == actual
        || matches!((parse_divisor(expected), parse_divisor(actual)), (Some(a), Some(b)) if a == b)
}

/// The available bundled runs.
pub const RUNS: [&str; 3] = ["cases", "y244", "y333"];

pub fn run_named(name: &str) -> Result<Report> {
    match name {
        "cases" => run_case_table(),
        other => run_scenario(other),
    }
}

pub fn run_all() -> Result<Vec<Report>> {
    RUNS.iter().map(|n| run_named(n)).collect()
}
