//! The boundary case table: forks with three or four admissible twigs.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};

use super::{format_divisor, parse_divisor, Expectation, CASES_TABLE};
use crate::birational::{fiber_multiplicities, RulingBookkeeping};
use crate::divisor::{classify_boundary, discriminant_graph, BoundaryType};
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::report::Report;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseEntry {
    pub id: String,
    pub b_weight: i64,
    /// Twigs in bracket notation, tip first.
    pub twigs: Vec<Vec<i64>>,
    pub graph: DualGraph,
    pub expectations: Vec<Expectation>,
}

/// Vertex names of twig `i` (1-based), tip first.
pub fn twig_names(i: usize, len: usize) -> Vec<String> {
    if len == 1 {
        vec![format!("T{i}")]
    } else {
        (1..=len).map(|j| format!("T{i}{j}")).collect()
    }
}

pub fn build_fork(b_weight: i64, twigs: &[Vec<i64>]) -> Result<DualGraph> {
    let mut g = DualGraph::new();
    g.add_vertex("B", b_weight)?;
    for (i, twig) in twigs.iter().enumerate() {
        let names = twig_names(i + 1, twig.len());
        for (n, &w) in names.iter().zip(twig) {
            g.add_vertex(n, -w)?;
        }
        for w in names.windows(2) {
            g.add_edge(&w[0], &w[1])?;
        }
        if let Some(last) = names.last() {
            g.add_edge(last, "B")?;
        }
    }
    Ok(g)
}

fn parse_twigs(s: &str) -> Option<Vec<Vec<i64>>> {
    s.split(';')
        .map(|t| {
            let inner = t.strip_prefix('[')?.strip_suffix(']')?;
            inner.split(',').map(|x| x.trim().parse().ok()).collect()
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CaseTable {
    pub cases: Vec<CaseEntry>,
}

impl CaseTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cases: Vec<CaseEntry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let (kw, rest) = s.split_once(' ').unwrap_or((s, ""));
            match kw {
                "case" => {
                    let mut it = rest.split_whitespace();
                    let id = it.next().ok_or_else(|| Error::parse(line, "missing case id"))?;
                    let (mut b, mut twigs) = (None, None);
                    for tok in it {
                        match tok.split_once('=') {
                            Some(("B", v)) => b = v.parse::<i64>().ok(),
                            Some(("twigs", v)) => twigs = parse_twigs(v),
                            _ => return Err(Error::parse(line, format!("unexpected `{tok}`"))),
                        }
                    }
                    let b = b.ok_or_else(|| Error::parse(line, "missing or bad B=<weight>"))?;
                    let twigs = twigs.ok_or_else(|| Error::parse(line, "missing or bad twigs=[..];[..]"))?;
                    let graph = build_fork(b, &twigs).map_err(|e| Error::parse(line, e.to_string()))?;
                    cases.push(CaseEntry {
                        id: id.to_string(),
                        b_weight: b,
                        twigs,
                        graph,
                        expectations: vec![],
                    });
                }
                "expect" => {
                    let e = Expectation::parse(line, rest)?;
                    cases
                        .last_mut()
                        .ok_or_else(|| Error::parse(line, "expect before any case"))?
                        .expectations
                        .push(e);
                }
                other => return Err(Error::parse(line, format!("unknown directive `{other}`"))),
            }
        }
        Ok(CaseTable { cases })
    }

    pub fn bundled() -> Result<Self> {
        Self::parse(CASES_TABLE)
    }

    pub fn get(&self, id: &str) -> Option<&CaseEntry> {
        self.cases.iter().find(|c| c.id == id)
    }

    pub fn run(&self) -> Report {
        let mut r = Report::new("cases");
        for c in &self.cases {
            r.extend(c.checks());
        }
        r
    }
}

/// What a ruling with `F_inf` supported on the boundary says about the other components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseRuling {
    /// Multiplicities of the support, in the order written.
    pub fiber: Vec<(String, i64)>,
    /// `F.C` for boundary components `C` outside the support.
    pub degrees: BTreeMap<String, i64>,
}

impl CaseRuling {
    pub fn new(g: &DualGraph, f: &BTreeMap<String, i64>, written: &[String]) -> Result<Self> {
        let fg = fiber_multiplicities(&g.induced(written)?)?;
        let fiber = written
            .iter()
            .map(|n| Ok((n.clone(), fg.mu(n)?.to_i64().expect("small"))))
            .collect::<Result<Vec<_>>>()?;
        let mut degrees = BTreeMap::new();
        for c in g.ids().iter().filter(|c| !f.contains_key(*c)) {
            let d: i64 = g.neighbors(c)?.iter().map(|n| f.get(*n).copied().unwrap_or(0)).sum();
            degrees.insert(c.clone(), d);
        }
        Ok(CaseRuling { fiber, degrees })
    }

    pub fn f_dot_d(&self) -> i64 {
        self.degrees.values().sum()
    }

    pub fn horizontal(&self) -> Vec<&str> {
        self.degrees.iter().filter(|(_, &d)| d > 0).map(|(c, _)| c.as_str()).collect()
    }

    pub fn vertical(&self) -> Vec<(String, i64)> {
        self.degrees.iter().filter(|(_, &d)| d == 0).map(|(c, _)| (c.clone(), 1)).collect()
    }

    /// `Sigma` from Fujita's equation with `nu = 1`, when `b2` of the surface equals
    /// `#D + #E` (the Euler number of the rational completion is `2 + #D + #E`).
    pub fn sigma(&self) -> i64 {
        RulingBookkeeping {
            h: self.horizontal().len() as i64,
            nu: 1,
            sigma_excess: 0,
            b2_surface: 0,
            b2_boundary: 0,
        }
        .fujita_rhs()
    }
}

impl CaseEntry {
    fn ruling(&self) -> std::result::Result<CaseRuling, String> {
        let e = self.expectations.iter().find(|e| e.key == "fiber").ok_or("no fiber listed")?;
        let f = parse_divisor(&e.value).ok_or_else(|| format!("bad divisor `{}`", e.value))?;
        let written: Vec<String> = e
            .value
            .split('+')
            .map(|t| t.trim_start_matches(|c: char| c.is_ascii_digit()).to_string())
            .collect();
        CaseRuling::new(&self.graph, &f, &written).map_err(|e| e.to_string())
    }

    /// The computed value behind a key of the table.
    pub fn evaluate(&self, key: &str) -> std::result::Result<String, String> {
        Ok(match key {
            "d" => if discriminant_graph(&self.graph).is_zero() { "zero" } else { "nonzero" }.to_string(),
            "det" => discriminant_graph(&self.graph).to_string(),
            "type" => match classify_boundary(&self.graph).map_err(|e| e.to_string())? {
                BoundaryType::TypeY(mut ds) => {
                    ds.sort();
                    format!("Y({},{},{})", ds[0], ds[1], ds[2])
                }
                t => t.to_string(),
            },
            "fiber" => format_divisor(&self.ruling()?.fiber),
            "F.D" => self.ruling()?.f_dot_d().to_string(),
            "h" => self.ruling()?.horizontal().len().to_string(),
            "Sigma" => self.ruling()?.sigma().to_string(),
            "Dv" => format_divisor(&self.ruling()?.vertical()),
            other => return Err(format!("unknown key `{other}`")),
        })
    }

    pub fn checks(&self) -> Vec<crate::report::Check> {
        self.expectations
            .iter()
            .map(|e| e.check(format!("{}.{}", self.id, e.key), self.evaluate(&e.key)))
            .collect()
    }
}

pub fn run_case_table() -> Result<Report> {
    Ok(CaseTable::bundled()?.run())
}

pub fn run_case_table_text(text: &str) -> Result<Report> {
    Ok(CaseTable::parse(text)?.run())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fork_naming() {
        let g = build_fork(-1, &[vec![2], vec![2, 2, 2], vec![2, 2, 2]]).unwrap();
        assert_eq!(g.len(), 8);
        assert!(g.adjacent("T23", "B").unwrap() && g.adjacent("T1", "B").unwrap());
        assert!(g.adjacent("T31", "T32").unwrap() && !g.adjacent("T31", "B").unwrap());
        assert_eq!(discriminant_graph(&g), (-32).into());
    }

    #[test]
    fn bundled_table() {
        let t = CaseTable::bundled().unwrap();
        assert_eq!(t.cases.len(), 13);
        let r = t.run();
        if let Some(c) = r.failures().next() {
            panic!("{c}");
        }
        let y2c = t.get("Y2c").unwrap();
        assert_eq!(y2c.evaluate("fiber").unwrap(), "T1+2B+T33");
        assert_eq!(y2c.evaluate("det").unwrap(), "-32");
        let zeros: Vec<&str> =
            t.cases.iter().filter(|c| c.evaluate("d").unwrap() == "zero").map(|c| c.id.as_str()).collect();
        assert_eq!(zeros, ["Y1a", "Y2a", "Y3a"]);
    }

    #[test]
    fn wrong_entries_fail() {
        let text =
            CASES_TABLE.replace("(T1+2B+T33,3,1,T31+T21+T22)\"\nexpect F.D = 3", "(x)\"\nexpect F.D = 4");
        assert_ne!(text, CASES_TABLE);
        let r = run_case_table_text(&text).unwrap();
        let bad: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(bad, ["Y2c.F.D"]);
        let r = run_case_table_text(
            "case Z B=-1 twigs=[2];[2,2];[2,2,2]\nexpect fiber = T1+T22 origin=direct ref=\"x\"\n",
        )
        .unwrap();
        assert!(r.checks[0].actual.starts_with("error: not a fiber"), "{}", r.checks[0]);
        assert!(matches!(
            CaseTable::parse("expect d = zero origin=direct ref=\"x\""),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(CaseTable::parse("case Q B=-1 twigs=[2;[2]"), Err(Error::Parse { line: 1, .. })));
    }
}
