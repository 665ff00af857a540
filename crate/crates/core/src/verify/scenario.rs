//! Replays of the two constructions: arrangement, lattice, boundary and coordinates.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use super::{bundled, format_divisor, Expectation};
use crate::birational::fujita_check;
use crate::coords::CoordData;
use crate::divisor::{
    classify_boundary, discriminant_graph, kobayashi_check, plumbing_homology, BoundaryType,
};
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::lattice::{
    euler_numbers, extract_boundary_graph, h1_order, k_plus_sharp_class, ruling_decompose, run_program,
    solve_curve_class, BlowupProgram, Class, CurveKind, RulingDecomposition, SurfaceLattice,
};
use crate::linalg::{det_exact, Rational};
use crate::report::Report;

/// `class <name> : <expr>=<n> ... sq=<s>`: a class search whose unique answer gets the name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSearch {
    pub name: String,
    pub constraints: Vec<(String, i64)>,
    pub self_sq: i64,
}

/// `ruling <name> = <expr> curves=<list>`; `@D` and `@E` expand to the two divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RulingSpec {
    pub name: String,
    pub fiber: String,
    pub curves: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub program: BlowupProgram,
    pub coords: Option<CoordData>,
    pub boundary: Vec<String>,
    pub exceptional: Vec<String>,
    /// Orders of the local fundamental groups of the singular points.
    pub group_orders: Vec<u64>,
    pub classes: Vec<ClassSearch>,
    pub rulings: Vec<RulingSpec>,
    pub expectations: Vec<Expectation>,
}

fn names(list: &str) -> Vec<String> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

impl Scenario {
    /// Parses a `.expect` file; `load` supplies the referenced arrangement and
    /// coordinate files.
    pub fn parse(name: &str, text: &str, load: impl Fn(&str) -> Result<String>) -> Result<Self> {
        let mut program = None;
        let mut s = Scenario {
            name: name.to_string(),
            program: BlowupProgram { steps: vec![] },
            coords: None,
            boundary: vec![],
            exceptional: vec![],
            group_orders: vec![],
            classes: vec![],
            rulings: vec![],
            expectations: vec![],
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (kw, rest) = t.split_once(' ').unwrap_or((t, ""));
            let rest = rest.trim();
            let wrap = |e: Error| match e {
                Error::Parse { line: l, msg } => Error::parse(line, format!("{rest}:{l}: {msg}")),
                e => Error::parse(line, e.to_string()),
            };
            match kw {
                "arrangement" => program = Some(BlowupProgram::parse(&load(rest)?).map_err(wrap)?),
                "coordinates" => s.coords = Some(CoordData::parse(&load(rest)?).map_err(wrap)?),
                "boundary" => s.boundary = names(rest),
                "exceptional" => s.exceptional = names(rest),
                "group-orders" => {
                    s.group_orders = names(rest)
                        .iter()
                        .map(|x| x.parse().map_err(|_| Error::parse(line, format!("bad order `{x}`"))))
                        .collect::<Result<_>>()?
                }
                "class" => {
                    let (n, cs) = rest
                        .split_once(':')
                        .ok_or_else(|| Error::parse(line, "expected `class <name> : ...`"))?;
                    let mut search =
                        ClassSearch { name: n.trim().to_string(), constraints: vec![], self_sq: -1 };
                    for tok in cs.split_whitespace() {
                        let (e, v) = tok.rsplit_once('=').ok_or_else(|| {
                            Error::parse(line, format!("expected `<expr>=<n>`, got `{tok}`"))
                        })?;
                        let v: i64 =
                            v.parse().map_err(|_| Error::parse(line, format!("bad number in `{tok}`")))?;
                        if e == "sq" {
                            search.self_sq = v;
                        } else {
                            search.constraints.push((e.to_string(), v));
                        }
                    }
                    s.classes.push(search);
                }
                "ruling" => {
                    let (n, r) = rest
                        .split_once('=')
                        .ok_or_else(|| Error::parse(line, "expected `ruling <name> = ...`"))?;
                    let mut it = r.split_whitespace();
                    let fiber =
                        it.next().ok_or_else(|| Error::parse(line, "missing fiber class"))?.to_string();
                    let curves = match it.next().and_then(|c| c.strip_prefix("curves=")) {
                        Some(c) => names(c),
                        None => return Err(Error::parse(line, "missing curves=<list>")),
                    };
                    s.rulings.push(RulingSpec { name: n.trim().to_string(), fiber, curves });
                }
                "expect" => s.expectations.push(Expectation::parse(line, rest)?),
                other => return Err(Error::parse(line, format!("unknown directive `{other}`"))),
            }
        }
        s.program = program.ok_or_else(|| Error::parse(0, "no arrangement given"))?;
        Ok(s)
    }

    /// One of the bundled scenarios, `y244` or `y333`.
    pub fn bundled(name: &str) -> Result<Self> {
        let text = bundled(&format!("{name}.expect"))
            .map_err(|_| Error::Io(format!("unknown scenario `{name}`")))?;
        Scenario::parse(name, text, |f| bundled(f).map(String::from))
    }

    /// The same scenario with one blow-up removed from the arrangement.
    pub fn without_blowup(&self, blowup: &str) -> Self {
        Scenario { program: self.program.without_blowup(blowup), ..self.clone() }
    }

    pub fn run(&self) -> Report {
        let mut r = Report::new(&self.name);
        match Context::new(self) {
            Ok(ctx) => {
                for e in &self.expectations {
                    r.push(e.check(e.key.clone(), ctx.evaluate(&e.key)));
                }
            }
            Err(err) => {
                for e in &self.expectations {
                    r.push(e.check(e.key.clone(), Err(err.to_string())));
                }
            }
        }
        if let Some(cd) = &self.coords {
            for mut c in cd.check_all() {
                c.name = format!("coords:{}", c.name);
                r.push(c);
            }
        }
        r
    }
}

pub fn run_scenario(name: &str) -> Result<Report> {
    Ok(Scenario::bundled(name)?.run())
}

type Value = std::result::Result<String, String>;

struct Context<'a> {
    s: &'a Scenario,
    l: SurfaceLattice,
    searches: BTreeMap<String, std::result::Result<Vec<Class>, String>>,
}

fn shape(g: &DualGraph) -> String {
    let bracket = |b: Vec<i64>| format!("[{}]", b.iter().map(i64::to_string).collect::<Vec<_>>().join(","));
    if g.is_chain() {
        let b: Vec<i64> = g.weights().iter().map(|w| -w).collect();
        let mut r = b.clone();
        r.reverse();
        return bracket(b.min(r));
    }
    match (g.branching_vertices().as_slice(), g.maximal_twigs()) {
        ([c], Ok(twigs)) if g.is_tree() => {
            let mut bs: Vec<Vec<i64>> = twigs.iter().map(|t| t.bracket()).collect();
            bs.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
            let mut parts = vec![format!("{}({})", g.id(*c), g.weight_at(*c))];
            parts.extend(bs.into_iter().map(bracket));
            parts.join(";")
        }
        _ => g.canonical_form(),
    }
}

fn yes(b: bool) -> String {
    b.to_string()
}

fn show_rational_vector(v: &[Rational]) -> String {
    if v.iter().all(Zero::is_zero) {
        "0".into()
    } else {
        format!("({})", v.iter().map(Rational::to_string).collect::<Vec<_>>().join(","))
    }
}

/// Splits `name(a,b,...)` into its head and arguments.
fn call(key: &str) -> Option<(&str, Vec<&str>)> {
    let (head, rest) = key.split_once('(')?;
    let args = rest.strip_suffix(')')?;
    Some((head, args.split(',').map(str::trim).collect()))
}

impl<'a> Context<'a> {
    fn new(s: &'a Scenario) -> Result<Self> {
        let mut l = run_program(&s.program)?;
        let mut searches = BTreeMap::new();
        for c in &s.classes {
            let cons: Vec<(&str, i64)> = c.constraints.iter().map(|(e, v)| (e.as_str(), *v)).collect();
            let found = solve_curve_class(&l, &cons, c.self_sq).map_err(|e| e.to_string());
            if let Ok([one]) = found.as_deref() {
                if l.class(&c.name).is_err() {
                    l = l.with_curve(&c.name, one.clone())?;
                }
            }
            searches.insert(c.name.clone(), found);
        }
        Ok(Context { s, l, searches })
    }

    fn expand(&self, list: &[String]) -> Vec<String> {
        let mut out = Vec::new();
        for n in list {
            match n.as_str() {
                "@D" => out.extend(self.s.boundary.iter().cloned()),
                "@E" => out.extend(self.s.exceptional.iter().cloned()),
                _ => out.push(n.clone()),
            }
        }
        out
    }

    fn d_and_e(&self) -> Vec<String> {
        self.expand(&["@D".into(), "@E".into()])
    }

    fn graph(&self, which: &str) -> std::result::Result<DualGraph, String> {
        let list = match which {
            "D" => self.s.boundary.clone(),
            "E" => self.s.exceptional.clone(),
            "D+E" => self.d_and_e(),
            other => return Err(format!("unknown divisor `{other}`")),
        };
        extract_boundary_graph(&self.l, &list).map_err(|e| e.to_string())
    }

    fn b_weight(&self) -> std::result::Result<i64, String> {
        let g = self.graph("D")?;
        match g.branching_vertices().as_slice() {
            [b] => Ok(g.weight_at(*b)),
            _ => Err("boundary has no unique branching component".into()),
        }
    }

    fn ruling(&self, name: &str, boundary: &str) -> std::result::Result<RulingDecomposition, String> {
        let spec =
            self.s.rulings.iter().find(|r| r.name == name).ok_or_else(|| format!("no ruling `{name}`"))?;
        let f = self.l.class_of(&spec.fiber).map_err(|e| e.to_string())?;
        let curves = self.expand(&spec.curves);
        let bd = match boundary {
            "D" => self.s.boundary.clone(),
            "D+E" => self.d_and_e(),
            other => return Err(format!("unknown boundary reading `{other}`")),
        };
        ruling_decompose(&self.l, &f, &curves, &bd).map_err(|e| e.to_string())
    }

    fn centers(&self) -> Value {
        let cd = self.s.coords.as_ref().ok_or("no coordinates")?;
        let plane: BTreeSet<&str> = self
            .l
            .names()
            .iter()
            .filter(|n| matches!(self.l.kind(n), Ok(CurveKind::Plane { .. })))
            .map(String::as_str)
            .collect();
        let mut bad = Vec::new();
        for (blowup, point) in &cd.centers {
            let Some(center) = self.s.program.center_of(blowup) else {
                bad.push(format!("{blowup}:not in arrangement"));
                continue;
            };
            let p = cd.point(point).map_err(|e| e.to_string())?;
            let through: BTreeSet<String> =
                cd.curves_through(p).into_iter().filter(|c| plane.contains(c.as_str())).collect();
            let listed: BTreeSet<String> =
                center.iter().filter(|c| plane.contains(c.as_str())).cloned().collect();
            if through != listed {
                bad.push(format!("{blowup}:{}", through.into_iter().collect::<Vec<_>>().join("+")));
            }
        }
        Ok(if bad.is_empty() { "consistent".into() } else { bad.join(",") })
    }

    fn evaluate(&self, key: &str) -> Value {
        let l = &self.l;
        let err = |e: Error| e.to_string();
        let nd = self.s.boundary.len() as i64;
        let ne = self.s.exceptional.len() as i64;
        Ok(match key {
            "rank" => l.rank().to_string(),
            "adjunction" => {
                let bad = l.adjunction_failures();
                if bad.is_empty() {
                    "ok".into()
                } else {
                    bad.join(",")
                }
            }
            "D.shape" => shape(&self.graph("D")?),
            "E.shape" => shape(&self.graph("E")?),
            "D.type" => match classify_boundary(&self.graph("D")?).map_err(err)? {
                BoundaryType::TypeY(mut ds) => {
                    ds.sort();
                    format!("Y({},{},{})", ds[0], ds[1], ds[2])
                }
                t => t.to_string(),
            },
            "d(D)" => discriminant_graph(&self.graph("D")?).to_string(),
            "d(D)<0" => yes(discriminant_graph(&self.graph("D")?).is_negative()),
            "d(D+E)" => discriminant_graph(&self.graph("D+E")?).to_string(),
            "det Q(D+E)!=0" => {
                yes(!det_exact(&l.gram_on(&self.d_and_e()).map_err(err)?).map_err(err)?.is_zero())
            }
            "E.D" => {
                let mut hits = Vec::new();
                for e in &self.s.exceptional {
                    for d in &self.s.boundary {
                        let p = l.pair_names(e, d).map_err(err)?;
                        if p != 0 {
                            hits.push(format!("{e}.{d}={p}"));
                        }
                    }
                }
                if hits.is_empty() {
                    "0".into()
                } else {
                    hits.join(",")
                }
            }
            "K+D#" => show_rational_vector(&k_plus_sharp_class(l, &self.s.boundary).map_err(err)?),
            "(K+D#)^2" => self.kd_sharp_sq()?.to_string(),
            "euler" => {
                let e = euler_numbers(l, &self.s.boundary, &self.s.exceptional).map_err(err)?;
                format!("({},{},{},{})", e.surface, e.boundary, e.exceptional, e.open)
            }
            "chi_open" => {
                euler_numbers(l, &self.s.boundary, &self.s.exceptional).map_err(err)?.open.to_string()
            }
            "K^2" => l.pair(&l.k(), &l.k()).to_string(),
            "K^2+2+#D+#E" => (l.pair(&l.k(), &l.k()) + 2 + nd + ne).to_string(),
            "K^2+chi" => (l.pair(&l.k(), &l.k()) + 2 + l.rank() as i64).to_string(),
            "#E" => ne.to_string(),
            "8-B^2-#D" => (8 - self.b_weight()? - nd).to_string(),
            "H1(M_D)" => plumbing_homology(&self.graph("D")?).map_err(err)?.to_string(),
            "H1(M)" => plumbing_homology(&self.graph("E")?).map_err(err)?.to_string(),
            "H1(S')" => h1_order(l, &self.s.boundary).map_err(err)?.to_string(),
            "|H1(S')|" => h1_order(l, &self.s.boundary).map_err(err)?.order().to_string(),
            "kobayashi" | "kobayashi.slack" => {
                let chi = euler_numbers(l, &self.s.boundary, &self.s.exceptional).map_err(err)?.open;
                let k = kobayashi_check(chi, &self.s.group_orders, &self.kd_sharp_sq()?).map_err(err)?;
                if key == "kobayashi" {
                    if k.holds { "holds" } else { "fails" }.into()
                } else {
                    k.slack.to_string()
                }
            }
            "centers" => self.centers()?,
            "coords.mutations" => {
                let cd = self.s.coords.as_ref().ok_or("no coordinates")?;
                let missed: Vec<String> = cd
                    .mutation_sanity()
                    .into_iter()
                    .filter(|(_, _, detected)| !detected)
                    .map(|(p, i, _)| format!("{p}[{i}]"))
                    .collect();
                if missed.is_empty() {
                    "all detected".into()
                } else {
                    format!("missed {}", missed.join(","))
                }
            }
            _ => return self.evaluate_call(key),
        })
    }

    fn kd_sharp_sq(&self) -> std::result::Result<Rational, String> {
        let v = k_plus_sharp_class(&self.l, &self.s.boundary).map_err(|e| e.to_string())?;
        let mut sq = &v[0] * &v[0];
        for x in &v[1..] {
            sq -= x * x;
        }
        Ok(sq)
    }

    /// Keys with arguments: `pair(A,B)`, `class(X)`, `mutation(-X)`, ruling keys.
    fn evaluate_call(&self, key: &str) -> Value {
        let l = &self.l;
        let err = |e: Error| e.to_string();
        if let Some((ruling, rest)) = key.split_once('.') {
            if self.s.rulings.iter().any(|r| r.name == ruling) {
                return self.evaluate_ruling(ruling, rest);
            }
        }
        let (head, args) = call(key).ok_or_else(|| format!("unknown key `{key}`"))?;
        Ok(match (head, args.as_slice()) {
            ("pair", [a, b]) => {
                l.pair(&l.class_of(a).map_err(err)?, &l.class_of(b).map_err(err)?).to_string()
            }
            ("count", [x]) => match self.searches.get(*x) {
                Some(Ok(v)) => v.len().to_string(),
                Some(Err(e)) => return Err(e.clone()),
                None => return Err(format!("no class search `{x}`")),
            },
            ("class", [x]) => {
                let c = l.class(x).map_err(err)?;
                let same: Vec<&String> = l
                    .names()
                    .iter()
                    .filter(|n| *n != x && l.class(n).map(|d| d == c).unwrap_or(false))
                    .collect();
                match same.as_slice() {
                    [] => format!("{c:?}"),
                    _ => same.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(","),
                }
            }
            ("minus-one-disjoint", xs) => {
                let cls: Vec<&Class> = xs.iter().map(|x| l.class(x)).collect::<Result<_>>().map_err(err)?;
                let mut bad = Vec::new();
                for (i, a) in cls.iter().enumerate() {
                    if l.pair(a, a) != -1 {
                        bad.push(format!("{}^2={}", xs[i], l.pair(a, a)));
                    }
                    for (j, b) in cls.iter().enumerate().skip(i + 1) {
                        if l.pair(a, b) != 0 {
                            bad.push(format!("{}.{}={}", xs[i], xs[j], l.pair(a, b)));
                        }
                    }
                }
                if bad.is_empty() {
                    "true".into()
                } else {
                    bad.join(",")
                }
            }
            ("mutation", [x]) => {
                let name = x.strip_prefix('-').ok_or("mutation keys look like mutation(-<blowup>)")?;
                if self.s.program.center_of(name).is_none() {
                    return Err(format!("no blow-up `{name}`"));
                }
                let mutated = run_program(&self.s.program.without_blowup(name))
                    .and_then(|m| k_plus_sharp_class(&m, &self.s.boundary));
                match mutated {
                    Ok(v) if v.iter().all(Zero::is_zero) => "missed".into(),
                    _ => "detected".into(),
                }
            }
            _ => return Err(format!("unknown key `{key}`")),
        })
    }

    fn evaluate_ruling(&self, name: &str, key: &str) -> Value {
        let l = &self.l;
        let spec = self.s.rulings.iter().find(|r| r.name == name).expect("checked by caller");
        let f = l.class_of(&spec.fiber).map_err(|e| e.to_string())?;
        if key == "F^2" {
            return Ok(l.pair(&f, &f).to_string());
        }
        if key == "F.K" {
            return Ok(l.pair(&f, &l.k()).to_string());
        }
        if let Some((reading, what)) = key.split_once(':') {
            let r = self.ruling(name, reading)?;
            let b = r.bookkeeping;
            return Ok(match what {
                "h" => b.h.to_string(),
                "nu" => b.nu.to_string(),
                "Sigma" => b.sigma_excess.to_string(),
                "b2" => b.b2_surface.to_string(),
                "b2(boundary)" => b.b2_boundary.to_string(),
                "fujita" => if fujita_check(&b) { "holds" } else { "fails" }.into(),
                other => return Err(format!("unknown ruling quantity `{other}`")),
            });
        }
        let r = self.ruling(name, "D")?;
        match call(key).as_ref().map(|(h, a)| (*h, a.as_slice())) {
            Some(("fiber", [c])) => {
                let part = r.fiber_containing(c).ok_or_else(|| format!("`{c}` is not vertical"))?;
                match &part.multiplicities {
                    Some(mu) => Ok(format_divisor(
                        &part.components.iter().cloned().zip(mu.iter().copied()).collect::<Vec<_>>(),
                    )),
                    None => Ok(format!("incomplete({})", part.components.join("+"))),
                }
            }
            _ if key == "horizontal" => {
                Ok(format_divisor(&r.horizontal.iter().map(|(c, _)| (c.clone(), 1)).collect::<Vec<_>>()))
            }
            _ if key == "complete-fibers" => {
                Ok(r.fibers.iter().filter(|p| p.is_complete()).count().to_string())
            }
            _ => Err(format!("unknown ruling key `{key}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let g = crate::verify::cases::build_fork(-1, &[vec![2, 2, 2], vec![2], vec![2, 2, 2]]).unwrap();
        assert_eq!(shape(&g), "B(-1);[2];[2,2,2];[2,2,2]");
        assert_eq!(shape(&DualGraph::chain_from_weights("E", &[-3, -2])), "[2,3]");
    }

    #[test]
    fn bundled_scenarios_pass() {
        for name in ["y244", "y333"] {
            let r = run_scenario(name).unwrap();
            let bad: Vec<String> = r.failures().map(|c| c.to_string()).collect();
            assert!(bad.is_empty(), "{}", bad.join("\n"));
            assert!(r.checks.len() > 30, "{name}: {}", r.checks.len());
        }
    }

    #[test]
    fn deleting_a_blowup_breaks_k_plus_sharp() {
        let s = Scenario::bundled("y333").unwrap().without_blowup("L1");
        let r = s.run();
        let c = r.get("K+D#").unwrap();
        assert!(!c.pass, "{c}");
        assert!(r.get("rank").map(|c| !c.pass).unwrap());
    }

    #[test]
    fn parse_errors() {
        let load = |_: &str| Ok("curve A degree=1\n".to_string());
        assert!(Scenario::parse("t", "boundary A\n", load).is_err());
        let e = Scenario::parse("t", "arrangement a.arr\nclass X : A\n", load).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = Scenario::parse("t", "arrangement a.arr\nwhat now\n", load).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let bad_arr = |_: &str| Ok("curve A degree=7\n".to_string());
        let e = Scenario::parse("t", "\narrangement a.arr\n", bad_arr).unwrap_err();
        assert!(e.to_string().contains("line 2") && e.to_string().contains("a.arr:1"), "{e}");
        assert!(Scenario::bundled("y999").is_err());
    }
}
