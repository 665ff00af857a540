//! Exact projective incidence over `Q(eps)`, driven by `.coords` fixtures.
//!
//! A fixture declares named points, curves (by equation, or as the join of two
//! points), one-parameter conic families, 3x3 matrices and point/line
//! configurations, followed by claims. Every claim evaluates to one [`Check`].

pub mod field;
pub mod geometry;
pub mod poly;

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Rational;
use crate::report::Check;
use field::{Field, QuadExt, Ring};
use geometry::{
    apply, collinear, cross, incident, intersection_multiplicity, intersection_sum, proj_eq, restriction,
    Conic, Curve, Point, PointDisplay,
};
use poly::{parse_form, parse_scalar, Form, Poly};

pub type Matrix3 = [[QuadExt; 3]; 3];

#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub param: String,
    pub form: Form,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub points: Vec<String>,
    pub lines: Vec<String>,
    pub point_degree: usize,
    pub line_degree: usize,
}

/// A point operand: a declared name (optionally conjugated with a trailing `*`)
/// or an inline `[a,b,c]` whose entries may mention one free parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum PointRef {
    Named { name: String, conj: bool },
    Inline([String; 3]),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClaimKind {
    On { point: PointRef, curves: Vec<String>, holds: bool },
    Collinear([PointRef; 3]),
    Intersection { a: String, b: String, point: PointRef },
    Meet { a: String, b: String, point: PointRef, mult: u32 },
    Bezout { a: String, b: String, points: Vec<PointRef> },
    Solve { a: String, b: String, point: PointRef, mult: u32, expect: Vec<(String, String)> },
    SolveCollinear { param: String, points: [PointRef; 3], value: String },
    MinPoly { param: String, points: [PointRef; 3], minpoly: String },
    Maps { matrix: String, from: PointRef, to: PointRef },
    Preserves { matrix: String, curves: Vec<String> },
    Permutes { matrix: String, config: String },
    Order { matrix: String, k: u32 },
    Configuration { name: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Claim {
    pub line: usize,
    pub kind: ClaimKind,
    pub anchor: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoordData {
    pub points: BTreeMap<String, Point<QuadExt>>,
    pub curves: BTreeMap<String, Curve<QuadExt>>,
    pub families: BTreeMap<String, Family>,
    pub matrices: BTreeMap<String, Matrix3>,
    pub configs: BTreeMap<String, Configuration>,
    /// Blow-up name to the point it is centered at.
    pub centers: BTreeMap<String, String>,
    pub claims: Vec<Claim>,
}

/// Splits on whitespace, keeping `[...]` groups (with any spaces inside) whole.
fn tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for c in s.chars() {
        match c {
            '[' => {
                depth += 1;
                cur.push(c);
            }
            ']' => {
                depth -= 1;
                cur.push(c);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if c.is_whitespace() => {}
            _ => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn split_top(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '[' | '(' => {
                depth += 1;
                cur.push(c);
            }
            ']' | ')' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => parts.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    parts.push(cur);
    parts
}

fn bracketed(s: &str) -> Option<&str> {
    s.strip_prefix('[')?.strip_suffix(']')
}

fn point_ref(tok: &str) -> Result<PointRef> {
    if let Some(inner) = bracketed(tok) {
        let parts = split_top(inner);
        let arr: [String; 3] =
            parts.try_into().map_err(|_| Error::Geometry(format!("`{tok}` needs three coordinates")))?;
        return Ok(PointRef::Inline(arr));
    }
    Ok(match tok.strip_suffix('*') {
        Some(n) => PointRef::Named { name: n.to_string(), conj: true },
        None => PointRef::Named { name: tok.to_string(), conj: false },
    })
}

fn parse_matrix(s: &str) -> Result<Matrix3> {
    let inner = bracketed(s).ok_or_else(|| Error::Geometry(format!("bad matrix `{s}`")))?;
    let rows = split_top(inner);
    if rows.len() != 3 {
        return Err(Error::Geometry(format!("matrix `{s}` needs three rows")));
    }
    let mut m: Matrix3 = std::array::from_fn(|_| std::array::from_fn(|_| QuadExt::zero()));
    for (i, r) in rows.iter().enumerate() {
        let cells = split_top(bracketed(r.trim()).ok_or_else(|| Error::Geometry(format!("bad row `{r}`")))?);
        if cells.len() != 3 {
            return Err(Error::Geometry(format!("row `{r}` needs three entries")));
        }
        for (j, c) in cells.iter().enumerate() {
            m[i][j] = parse_scalar(c)?;
        }
    }
    Ok(m)
}

/// Strips a trailing `ref="..."`; a claim without one is anchored by its own text.
fn take_anchor(line: &str) -> (&str, String) {
    match line.find("ref=\"") {
        Some(i) => {
            let rest = &line[i + 5..];
            let end = rest.find('"').unwrap_or(rest.len());
            (line[..i].trim_end(), rest[..end].to_string())
        }
        None => (line, line.to_string()),
    }
}

fn name_with_param(s: &str) -> Option<(String, String)> {
    let open = s.find('(')?;
    let inner = s[open + 1..].strip_suffix(')')?;
    Some((s[..open].to_string(), inner.to_string()))
}

fn three(ps: &[String]) -> Result<[PointRef; 3]> {
    if ps.len() != 3 {
        return Err(Error::Geometry("collinearity needs three points".into()));
    }
    Ok([point_ref(&ps[0])?, point_ref(&ps[1])?, point_ref(&ps[2])?])
}

impl CoordData {
    pub fn parse(text: &str) -> Result<Self> {
        let mut d = CoordData::default();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (body, anchor) = take_anchor(body);
            d.parse_line(body, anchor, line_no).map_err(|e| Error::parse(line_no, e.to_string()))?;
        }
        Ok(d)
    }

    fn parse_line(&mut self, body: &str, anchor: String, line: usize) -> Result<()> {
        let (head, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        let claim = |kind| Claim { line, kind, anchor: anchor.clone() };
        match head {
            "point" => {
                let t = tokens(rest);
                let [name, coords] = t.as_slice() else {
                    return Err(Error::Geometry("expected `point <name> [a,b,c]`".into()));
                };
                let PointRef::Inline(c) = point_ref(coords)? else {
                    return Err(Error::Geometry("expected coordinates".into()));
                };
                let p: Point<QuadExt> = [parse_scalar(&c[0])?, parse_scalar(&c[1])?, parse_scalar(&c[2])?];
                if geometry::is_zero_vector(&p) {
                    return Err(Error::Geometry(format!("point `{name}` is the zero vector")));
                }
                self.points.insert(name.clone(), p);
            }
            "line" | "conic" => {
                if let Some((name, eq)) = rest.split_once(':') {
                    let c = Curve::from_form(&parse_form(eq)?)?;
                    let want = if head == "line" { 1 } else { 2 };
                    if c.degree() != want {
                        return Err(Error::Geometry(format!("`{}` has degree {}", name.trim(), c.degree())));
                    }
                    self.curves.insert(name.trim().to_string(), c);
                } else {
                    // line <name> through <p> <q>
                    let t = tokens(rest);
                    let [name, kw, p, q] = t.as_slice() else {
                        return Err(Error::Geometry(
                            "expected `<name>: <equation>` or `<name> through <p> <q>`".into(),
                        ));
                    };
                    if kw != "through" || head != "line" {
                        return Err(Error::Geometry("only lines can be given by two points".into()));
                    }
                    let l = cross(self.point(p)?, self.point(q)?);
                    if geometry::is_zero_vector(&l) {
                        return Err(Error::Geometry(format!("`{p}` and `{q}` coincide")));
                    }
                    self.curves.insert(name.clone(), Curve::Line(l));
                }
            }
            "family" => {
                let (lhs, eq) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Geometry("expected `family <name>(<param>): <equation>`".into()))?;
                let (name, param) = name_with_param(lhs.trim())
                    .ok_or_else(|| Error::Geometry("family name needs a parameter".into()))?;
                let form = parse_form(eq)?;
                if form.homogeneous_degree() != Some(2) || form.parameters() != vec![param.clone()] {
                    return Err(Error::Geometry(format!("family `{name}` must be a conic in `{param}`")));
                }
                self.families.insert(name, Family { param, form });
            }
            "matrix" => {
                let t = tokens(rest);
                let [name, m] = t.as_slice() else {
                    return Err(Error::Geometry("expected `matrix <name> [[..],[..],[..]]`".into()));
                };
                self.matrices.insert(name.clone(), parse_matrix(m)?);
            }
            "center" => {
                let t = tokens(rest);
                let [exc, eq, p] = t.as_slice() else {
                    return Err(Error::Geometry("expected `center <blowup> = <point>`".into()));
                };
                if eq != "=" {
                    return Err(Error::Geometry("expected `=`".into()));
                }
                self.point(p)?;
                self.centers.insert(exc.clone(), p.clone());
            }
            "configuration" => {
                // configuration <name> <p>_<k> <l>_<m> points=a,b,.. lines=c,d,..
                let t = tokens(rest);
                let [name, pk, lm, pts, lns] = t.as_slice() else {
                    return Err(Error::Geometry("malformed configuration".into()));
                };
                let deg = |s: &str| -> Result<(usize, usize)> {
                    let (a, b) = s
                        .split_once('_')
                        .ok_or_else(|| Error::Geometry(format!("expected <count>_<degree>, got `{s}`")))?;
                    let bad = || Error::Geometry(format!("bad number in `{s}`"));
                    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
                };
                let (np, dp) = deg(pk)?;
                let (nl, dl) = deg(lm)?;
                let list = |s: &str, key: &str| -> Result<Vec<String>> {
                    Ok(s.strip_prefix(key)
                        .ok_or_else(|| Error::Geometry(format!("expected `{key}`")))?
                        .split(',')
                        .map(str::to_string)
                        .collect())
                };
                let points = list(pts, "points=")?;
                let lines = list(lns, "lines=")?;
                if points.len() != np || lines.len() != nl {
                    return Err(Error::Geometry(format!(
                        "configuration `{name}` lists the wrong number of elements"
                    )));
                }
                for p in &points {
                    self.point(p)?;
                }
                for l in &lines {
                    if !matches!(self.curve(l)?, Curve::Line(_)) {
                        return Err(Error::Geometry(format!("`{l}` is not a line")));
                    }
                }
                self.configs
                    .insert(name.clone(), Configuration { points, lines, point_degree: dp, line_degree: dl });
                self.claims.push(claim(ClaimKind::Configuration { name: name.clone() }));
            }
            "on" | "off" => {
                let t = tokens(rest);
                let (p, cs) = t.split_first().ok_or_else(|| Error::Geometry("missing point".into()))?;
                if cs.is_empty() {
                    return Err(Error::Geometry("missing curves".into()));
                }
                self.claims.push(claim(ClaimKind::On {
                    point: point_ref(p)?,
                    curves: cs.to_vec(),
                    holds: head == "on",
                }));
            }
            "collinear" => {
                let t = tokens(rest);
                self.claims.push(claim(ClaimKind::Collinear(three(&t)?)));
            }
            "intersection" => {
                let t = tokens(rest);
                let [a, b, eq, p] = t.as_slice() else {
                    return Err(Error::Geometry("expected `intersection <a> <b> = <point>`".into()));
                };
                if eq != "=" {
                    return Err(Error::Geometry("expected `=`".into()));
                }
                self.claims.push(claim(ClaimKind::Intersection {
                    a: a.clone(),
                    b: b.clone(),
                    point: point_ref(p)?,
                }));
            }
            "meet" => {
                let t = tokens(rest);
                let [a, b, at, p, eq, k] = t.as_slice() else {
                    return Err(Error::Geometry("expected `meet <a> <b> at <point> = <k>`".into()));
                };
                if at != "at" || eq != "=" {
                    return Err(Error::Geometry("expected `at` and `=`".into()));
                }
                let mult = k.parse().map_err(|_| Error::Geometry(format!("bad multiplicity `{k}`")))?;
                self.claims.push(claim(ClaimKind::Meet {
                    a: a.clone(),
                    b: b.clone(),
                    point: point_ref(p)?,
                    mult,
                }));
            }
            "bezout" => {
                let t = tokens(rest);
                if t.len() < 4 || t[2] != "at" {
                    return Err(Error::Geometry("expected `bezout <a> <b> at <points..>`".into()));
                }
                let points = t[3..].iter().map(|p| point_ref(p)).collect::<Result<_>>()?;
                self.claims.push(claim(ClaimKind::Bezout { a: t[0].clone(), b: t[1].clone(), points }));
            }
            "solve" => {
                let t = tokens(rest);
                if t.len() >= 2 && t[1] == "collinear" {
                    // solve <param> collinear p q r => <value>
                    if t.len() != 7 || t[5] != "=>" {
                        return Err(Error::Geometry(
                            "expected `solve <u> collinear <p> <q> <r> => <value>`".into(),
                        ));
                    }
                    self.claims.push(claim(ClaimKind::SolveCollinear {
                        param: t[0].clone(),
                        points: three(&t[2..5])?,
                        value: t[6].clone(),
                    }));
                } else {
                    // solve <famA> <famB> at <p> mult <k> => u=.. v=..
                    if t.len() < 8 || t[2] != "at" || t[4] != "mult" || t[6] != "=>" {
                        return Err(Error::Geometry(
                            "expected `solve <a> <b> at <p> mult <k> => <p>=<v>..`".into(),
                        ));
                    }
                    let mult = t[5].parse().map_err(|_| Error::Geometry("bad multiplicity".into()))?;
                    let expect = t[7..]
                        .iter()
                        .map(|kv| {
                            kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())).ok_or_else(|| {
                                Error::Geometry(format!("expected <param>=<value>, got `{kv}`"))
                            })
                        })
                        .collect::<Result<_>>()?;
                    self.claims.push(claim(ClaimKind::Solve {
                        a: t[0].clone(),
                        b: t[1].clone(),
                        point: point_ref(&t[3])?,
                        mult,
                        expect,
                    }));
                }
            }
            "minpoly" => {
                // minpoly <t> collinear p q r => <poly>
                let t = tokens(rest);
                if t.len() != 7 || t[1] != "collinear" || t[5] != "=>" {
                    return Err(Error::Geometry(
                        "expected `minpoly <t> collinear <p> <q> <r> => <poly>`".into(),
                    ));
                }
                self.claims.push(claim(ClaimKind::MinPoly {
                    param: t[0].clone(),
                    points: three(&t[2..5])?,
                    minpoly: t[6].clone(),
                }));
            }
            "maps" => {
                let t = tokens(rest);
                let [m, from, arrow, to] = t.as_slice() else {
                    return Err(Error::Geometry("expected `maps <matrix> <p> -> <q>`".into()));
                };
                if arrow != "->" {
                    return Err(Error::Geometry("expected `->`".into()));
                }
                self.claims.push(claim(ClaimKind::Maps {
                    matrix: m.clone(),
                    from: point_ref(from)?,
                    to: point_ref(to)?,
                }));
            }
            "preserves" => {
                let t = tokens(rest);
                let (m, cs) = t.split_first().ok_or_else(|| Error::Geometry("missing matrix".into()))?;
                self.claims.push(claim(ClaimKind::Preserves { matrix: m.clone(), curves: cs.to_vec() }));
            }
            "permutes" => {
                let t = tokens(rest);
                let [m, c] = t.as_slice() else {
                    return Err(Error::Geometry("expected `permutes <matrix> <configuration>`".into()));
                };
                self.claims.push(claim(ClaimKind::Permutes { matrix: m.clone(), config: c.clone() }));
            }
            "order" => {
                let t = tokens(rest);
                let [m, k] = t.as_slice() else {
                    return Err(Error::Geometry("expected `order <matrix> <k>`".into()));
                };
                let k = k.parse().map_err(|_| Error::Geometry("bad order".into()))?;
                self.claims.push(claim(ClaimKind::Order { matrix: m.clone(), k }));
            }
            other => return Err(Error::Geometry(format!("unknown directive `{other}`"))),
        }
        Ok(())
    }

    pub fn point(&self, name: &str) -> Result<&Point<QuadExt>> {
        self.points.get(name).ok_or_else(|| Error::Geometry(format!("unknown point `{name}`")))
    }

    pub fn curve(&self, name: &str) -> Result<&Curve<QuadExt>> {
        self.curves.get(name).ok_or_else(|| Error::Geometry(format!("unknown curve `{name}`")))
    }

    fn matrix(&self, name: &str) -> Result<&Matrix3> {
        self.matrices.get(name).ok_or_else(|| Error::Geometry(format!("unknown matrix `{name}`")))
    }

    fn family(&self, name: &str) -> Result<&Family> {
        self.families.get(name).ok_or_else(|| Error::Geometry(format!("unknown family `{name}`")))
    }

    /// Resolves a point operand with no free parameter.
    pub fn resolve(&self, p: &PointRef) -> Result<Point<QuadExt>> {
        match p {
            PointRef::Named { name, conj } => {
                let q = self.point(name)?;
                Ok(if *conj { q.clone().map(|c| c.conj()) } else { q.clone() })
            }
            PointRef::Inline(c) => Ok([parse_scalar(&c[0])?, parse_scalar(&c[1])?, parse_scalar(&c[2])?]),
        }
    }

    /// Names of the declared curves through `p`.
    pub fn curves_through(&self, p: &Point<QuadExt>) -> Vec<String> {
        self.curves.iter().filter(|(_, c)| incident(p, c)).map(|(n, _)| n.clone()).collect()
    }

    /// Evaluates every claim.
    pub fn check_all(&self) -> Vec<Check> {
        self.claims.iter().map(|c| self.check(c)).collect()
    }

    pub fn check(&self, c: &Claim) -> Check {
        let name = claim_name(&c.kind);
        match self.evaluate(&c.kind) {
            Ok((expected, actual)) => Check::new(name, expected, actual, c.anchor.clone()),
            Err(e) => Check::error(name, "evaluation", e, c.anchor.clone()),
        }
    }

    fn evaluate(&self, kind: &ClaimKind) -> Result<(String, String)> {
        let yes = |b: bool| if b { "true" } else { "false" }.to_string();
        Ok(match kind {
            ClaimKind::On { point, curves, holds } => {
                let p = self.resolve(point)?;
                let mut wrong = Vec::new();
                for c in curves {
                    if incident(&p, self.curve(c)?) != *holds {
                        wrong.push(c.clone());
                    }
                }
                let actual = if wrong.is_empty() { yes(true) } else { format!("false({})", wrong.join(",")) };
                (yes(true), actual)
            }
            ClaimKind::Collinear(ps) => {
                let [a, b, c] = [self.resolve(&ps[0])?, self.resolve(&ps[1])?, self.resolve(&ps[2])?];
                (yes(true), yes(collinear(&a, &b, &c)))
            }
            ClaimKind::Intersection { a, b, point } => {
                let (Curve::Line(la), Curve::Line(lb)) = (self.curve(a)?, self.curve(b)?) else {
                    return Err(Error::Geometry("intersection claims take two lines".into()));
                };
                let m = cross(la, lb);
                let p = self.resolve(point)?;
                (
                    PointDisplay(&p).to_string(),
                    if proj_eq(&m, &p) { PointDisplay(&p).to_string() } else { PointDisplay(&m).to_string() },
                )
            }
            ClaimKind::Meet { a, b, point, mult } => {
                let p = self.resolve(point)?;
                let k = intersection_multiplicity(self.curve(a)?, self.curve(b)?, &p)?;
                (mult.to_string(), k.to_string())
            }
            ClaimKind::Bezout { a, b, points } => {
                let (ca, cb) = (self.curve(a)?, self.curve(b)?);
                let pts = points.iter().map(|p| self.resolve(p)).collect::<Result<Vec<_>>>()?;
                let total = intersection_sum(ca, cb, &pts)?;
                ((ca.degree() * cb.degree()).to_string(), total.to_string())
            }
            ClaimKind::Solve { a, b, point, mult, expect } => {
                let p = self.resolve(point)?;
                let sols = conic_family_solve(self.family(a)?, self.family(b)?, &p, *mult)?;
                let fa = self.family(a)?;
                let fb = self.family(b)?;
                let render = |u: &Rational, v: &Rational| format!("{}={u},{}={v}", fa.param, fb.param);
                let want: Vec<String> = expect
                    .iter()
                    .map(|(k, v)| Ok(format!("{k}={}", parse_scalar(v)?)))
                    .collect::<Result<_>>()?;
                let actual: Vec<String> = sols.iter().map(|(u, v)| render(u, v)).collect();
                (want.join(","), if actual.is_empty() { "none".into() } else { actual.join(";") })
            }
            ClaimKind::SolveCollinear { param, points, value } => {
                let u = solve_collinear(param, points)?;
                (parse_scalar(value)?.to_string(), u.map_or("none".into(), |u| u.to_string()))
            }
            ClaimKind::MinPoly { param, points, minpoly } => {
                let det = collinearity_polynomial(param, points)?;
                let want = rational_poly_in(&parse_form(minpoly)?, param)?;
                // the determinant must be the minimal polynomial times a monomial
                let (q, r) =
                    det.div_rem(&want).ok_or_else(|| Error::Geometry("zero minimal polynomial".into()))?;
                let forced = r.is_zero() && q.coeffs().iter().filter(|c| !Zero::is_zero(*c)).count() == 1;
                (yes(true), if forced { yes(true) } else { format!("false(det={det})") })
            }
            ClaimKind::Maps { matrix, from, to } => {
                let img = apply(self.matrix(matrix)?, &self.resolve(from)?);
                let want = self.resolve(to)?;
                let shown = if proj_eq(&img, &want) { &want } else { &img };
                (PointDisplay(&want).to_string(), PointDisplay(shown).to_string())
            }
            ClaimKind::Preserves { matrix, curves } => {
                let a = self.matrix(matrix)?;
                let inv = inverse(a).ok_or_else(|| Error::Geometry(format!("`{matrix}` is singular")))?;
                let set: Vec<&Curve<QuadExt>> =
                    curves.iter().map(|c| self.curve(c)).collect::<Result<_>>()?;
                let mut bad = Vec::new();
                for (name, c) in curves.iter().zip(&set) {
                    let img = image(c, &inv);
                    if !set.iter().any(|d| same_curve(&img, d)) {
                        bad.push(name.clone());
                    }
                }
                (yes(true), if bad.is_empty() { yes(true) } else { format!("false({})", bad.join(",")) })
            }
            ClaimKind::Permutes { matrix, config } => {
                let a = self.matrix(matrix)?;
                let inv = inverse(a).ok_or_else(|| Error::Geometry(format!("`{matrix}` is singular")))?;
                let cfg = self
                    .configs
                    .get(config)
                    .ok_or_else(|| Error::Geometry(format!("unknown configuration `{config}`")))?;
                let pts: Vec<&Point<QuadExt>> =
                    cfg.points.iter().map(|p| self.point(p)).collect::<Result<_>>()?;
                let lns: Vec<&Curve<QuadExt>> =
                    cfg.lines.iter().map(|l| self.curve(l)).collect::<Result<_>>()?;
                let mut bad = Vec::new();
                for (n, p) in cfg.points.iter().zip(&pts) {
                    let img = apply(a, p);
                    if !pts.iter().any(|q| proj_eq(&img, q)) {
                        bad.push(n.clone());
                    }
                }
                for (n, l) in cfg.lines.iter().zip(&lns) {
                    let img = image(l, &inv);
                    if !lns.iter().any(|m| same_curve(&img, m)) {
                        bad.push(n.clone());
                    }
                }
                (yes(true), if bad.is_empty() { yes(true) } else { format!("false({})", bad.join(",")) })
            }
            ClaimKind::Order { matrix, k } => {
                let a = self.matrix(matrix)?;
                (k.to_string(), projective_order(a, 12).map_or("none".into(), |o| o.to_string()))
            }
            ClaimKind::Configuration { name } => {
                let cfg = &self.configs[name];
                let r = configuration_check(self, cfg)?;
                let want = format!(
                    "({}_{},{}_{})",
                    cfg.points.len(),
                    cfg.point_degree,
                    cfg.lines.len(),
                    cfg.line_degree
                );
                (want, r.shape())
            }
        })
    }

    fn incidence_claims_hold(&self) -> bool {
        self.claims.iter().filter(|c| is_incidence(&c.kind)).all(|c| self.check(c).pass)
    }

    /// For every point used by an incidence claim and every coordinate, adds 1 to
    /// that coordinate and reports whether some incidence claim then fails.
    /// Perturbations that leave the projective point unchanged are skipped.
    pub fn mutation_sanity(&self) -> Vec<(String, usize, bool)> {
        let mut used: Vec<String> = Vec::new();
        for c in self.claims.iter().filter(|c| is_incidence(&c.kind)) {
            for p in named_points(&c.kind) {
                if !used.contains(&p) {
                    used.push(p);
                }
            }
        }
        let mut out = Vec::new();
        for name in used {
            for k in 0..3 {
                let mut m = self.clone();
                let p = m.points.get_mut(&name).expect("declared");
                p[k] = p[k].clone() + QuadExt::one();
                if proj_eq(p, &self.points[&name]) {
                    continue;
                }
                out.push((name.clone(), k, !m.incidence_claims_hold()));
            }
        }
        out
    }
}

fn is_incidence(k: &ClaimKind) -> bool {
    matches!(
        k,
        ClaimKind::On { .. }
            | ClaimKind::Collinear(_)
            | ClaimKind::Intersection { .. }
            | ClaimKind::Meet { .. }
    )
}

fn named_points(k: &ClaimKind) -> Vec<String> {
    let refs: Vec<&PointRef> = match k {
        ClaimKind::On { point, .. }
        | ClaimKind::Intersection { point, .. }
        | ClaimKind::Meet { point, .. } => {
            vec![point]
        }
        ClaimKind::Collinear(ps) => ps.iter().collect(),
        _ => vec![],
    };
    refs.into_iter()
        .filter_map(|r| match r {
            PointRef::Named { name, .. } => Some(name.clone()),
            PointRef::Inline(_) => None,
        })
        .collect()
}

fn claim_name(k: &ClaimKind) -> String {
    let pr = |p: &PointRef| match p {
        PointRef::Named { name, conj } => format!("{name}{}", if *conj { "*" } else { "" }),
        PointRef::Inline(c) => format!("[{}]", c.join(",")),
    };
    match k {
        ClaimKind::On { point, curves, holds } => {
            format!("{}:{}:{}", if *holds { "on" } else { "off" }, pr(point), curves.join(","))
        }
        ClaimKind::Collinear(ps) => format!("collinear:{}", ps.iter().map(pr).collect::<Vec<_>>().join(",")),
        ClaimKind::Intersection { a, b, .. } => format!("intersection:{a},{b}"),
        ClaimKind::Meet { a, b, point, .. } => format!("mult:{a},{b}@{}", pr(point)),
        ClaimKind::Bezout { a, b, .. } => format!("bezout:{a},{b}"),
        ClaimKind::Solve { a, b, .. } => format!("family-solve:{a},{b}"),
        ClaimKind::SolveCollinear { param, .. } => format!("collinear-forces:{param}"),
        ClaimKind::MinPoly { param, .. } => format!("collinear-minpoly:{param}"),
        ClaimKind::Maps { matrix, from, to } => format!("maps:{matrix}:{}->{}", pr(from), pr(to)),
        ClaimKind::Preserves { matrix, curves } => format!("preserves:{matrix}:{}", curves.join(",")),
        ClaimKind::Permutes { matrix, config } => format!("permutes:{matrix}:{config}"),
        ClaimKind::Order { matrix, .. } => format!("order:{matrix}"),
        ClaimKind::Configuration { name } => format!("configuration:{name}"),
    }
}

pub fn inverse<F: Field>(a: &[[F; 3]; 3]) -> Option<[[F; 3]; 3]> {
    let det = geometry::det3(a);
    let dinv = det.inv()?;
    // columns of the inverse are cross products of rows
    let c0 = cross(&a[1], &a[2]);
    let c1 = cross(&a[2], &a[0]);
    let c2 = cross(&a[0], &a[1]);
    Some(std::array::from_fn(|i| {
        [c0[i].clone() * dinv.clone(), c1[i].clone() * dinv.clone(), c2[i].clone() * dinv.clone()]
    }))
}

/// Image of a curve under `x -> A x`, given `A^-1`.
pub fn image<R: Ring>(c: &Curve<R>, inv: &[[R; 3]; 3]) -> Curve<R> {
    match c {
        // l . (A^-1 x) = ((A^-1)^T l) . x
        Curve::Line(l) => Curve::Line(std::array::from_fn(|j| {
            (0..3).fold(R::zero(), |acc, i| acc + l[i].clone() * inv[i][j].clone())
        })),
        Curve::Conic(q) => Curve::Conic(q.transform_by_inverse(inv)),
    }
}

fn flat<R: Ring>(c: &Curve<R>) -> Vec<R> {
    match c {
        Curve::Line(l) => l.to_vec(),
        Curve::Conic(q) => q.m.iter().flatten().cloned().collect(),
    }
}

/// Equal up to a nonzero scalar.
pub fn same_curve<R: Ring>(a: &Curve<R>, b: &Curve<R>) -> bool {
    if a.degree() != b.degree() {
        return false;
    }
    let (x, y) = (flat(a), flat(b));
    if x.iter().all(Ring::is_zero) || y.iter().all(Ring::is_zero) {
        return false;
    }
    (0..x.len()).all(|i| {
        (i + 1..x.len()).all(|j| (x[i].clone() * y[j].clone() - x[j].clone() * y[i].clone()).is_zero())
    })
}

/// Smallest `k <= max` with `A^k` a scalar matrix.
pub fn projective_order<F: Field>(a: &[[F; 3]; 3], max: u32) -> Option<u32> {
    let mul = |x: &[[F; 3]; 3], y: &[[F; 3]; 3]| -> [[F; 3]; 3] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).fold(F::zero(), |acc, k| acc + x[i][k].clone() * y[k][j].clone()))
        })
    };
    let mut p = a.clone();
    for k in 1..=max {
        let s = p[0][0].clone();
        let scalar = !s.is_zero()
            && (0..3).all(|i| (0..3).all(|j| if i == j { p[i][j] == s } else { p[i][j].is_zero() }));
        if scalar {
            return Some(k);
        }
        p = mul(&p, a);
    }
    None
}

/// Incidence table of a point/line configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigurationReport {
    pub point_degrees: Vec<(String, usize)>,
    pub line_degrees: Vec<(String, usize)>,
    pub incidences: usize,
}

impl ConfigurationReport {
    /// `(a_b,c_d)` when degrees are uniform, else the degree lists.
    pub fn shape(&self) -> String {
        let uniform = |v: &[(String, usize)]| -> Option<usize> {
            let d = v.first()?.1;
            v.iter().all(|x| x.1 == d).then_some(d)
        };
        match (uniform(&self.point_degrees), uniform(&self.line_degrees)) {
            (Some(p), Some(l)) => {
                format!("({}_{p},{}_{l})", self.point_degrees.len(), self.line_degrees.len())
            }
            _ => format!("points{:?} lines{:?}", self.point_degrees, self.line_degrees),
        }
    }
}

pub fn configuration_check(d: &CoordData, cfg: &Configuration) -> Result<ConfigurationReport> {
    let pts: Vec<&Point<QuadExt>> = cfg.points.iter().map(|p| d.point(p)).collect::<Result<_>>()?;
    let lns: Vec<&Curve<QuadExt>> = cfg.lines.iter().map(|l| d.curve(l)).collect::<Result<_>>()?;
    let table: Vec<Vec<bool>> = pts.iter().map(|p| lns.iter().map(|l| incident(p, l)).collect()).collect();
    let point_degrees = cfg
        .points
        .iter()
        .zip(&table)
        .map(|(n, row)| (n.clone(), row.iter().filter(|&&b| b).count()))
        .collect();
    let line_degrees = cfg
        .lines
        .iter()
        .enumerate()
        .map(|(j, n)| (n.clone(), table.iter().filter(|row| row[j]).count()))
        .collect();
    let incidences = table.iter().flatten().filter(|&&b| b).count();
    Ok(ConfigurationReport { point_degrees, line_degrees, incidences })
}

fn rational_poly_in(f: &Form, param: &str) -> Result<Poly<Rational>> {
    let idx = f.param_index(param);
    let p = f.coefficient_in([0, 0, 0], idx);
    if f.parameters().iter().any(|q| q != param) || f.homogeneous_degree().is_some_and(|d| d != 0) {
        return Err(Error::Geometry(format!("expected a polynomial in `{param}` only")));
    }
    p.coeffs()
        .iter()
        .map(|c| geometry::rational(c).ok_or_else(|| Error::Geometry("irrational coefficient".into())))
        .collect::<Result<Vec<_>>>()
        .map(Poly::new)
}

fn point_in(param: &str, p: &PointRef) -> Result<[Poly<QuadExt>; 3]> {
    match p {
        PointRef::Inline(c) => {
            let mut out: [Poly<QuadExt>; 3] = std::array::from_fn(|_| Poly::zero());
            for (o, s) in out.iter_mut().zip(c) {
                let f = parse_form(s)?;
                if f.parameters().iter().any(|q| q != param) {
                    return Err(Error::Geometry(format!("`{s}` mentions an unknown parameter")));
                }
                *o = f.coefficient_in([0, 0, 0], f.param_index(param));
            }
            Ok(out)
        }
        PointRef::Named { .. } => Err(Error::Geometry("parametrized claims take inline points".into())),
    }
}

/// The unique value of `param` making three inline points collinear, if the
/// condition is linear and nondegenerate.
pub fn solve_collinear(param: &str, ps: &[PointRef; 3]) -> Result<Option<QuadExt>> {
    let rows = [point_in(param, &ps[0])?, point_in(param, &ps[1])?, point_in(param, &ps[2])?];
    let det = geometry::det3(&rows);
    Ok(match det.degree() {
        Some(1) => Some((-det.coeff(0)).div(&det.coeff(1)).expect("nonzero leading term")),
        _ => None,
    })
}

/// Collinearity determinant as a polynomial over `Q` in `param`.
pub fn collinearity_polynomial(param: &str, ps: &[PointRef; 3]) -> Result<Poly<Rational>> {
    let rows = [point_in(param, &ps[0])?, point_in(param, &ps[1])?, point_in(param, &ps[2])?];
    let det = geometry::det3(&rows);
    det.coeffs()
        .iter()
        .map(|c| geometry::rational(c).ok_or_else(|| Error::Geometry("coefficient involves eps".into())))
        .collect::<Result<Vec<_>>>()
        .map(Poly::new)
}

fn family_conic(f: &Family, power: Option<usize>) -> Result<Conic<Poly<Rational>>> {
    let idx = f.form.param_index(&f.param);
    let coeff = |e: [u32; 3]| -> Result<Poly<Rational>> {
        let p = f.form.coefficient_in(e, idx);
        let p = match power {
            None => p,
            Some(k) => Poly::constant(p.coeff(k)),
        };
        p.coeffs()
            .iter()
            .map(|c| {
                geometry::rational(c)
                    .ok_or_else(|| Error::Geometry("family has irrational coefficients".into()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Poly::new)
    };
    Ok(Conic::from_coefficients([
        coeff([2, 0, 0])?,
        coeff([0, 2, 0])?,
        coeff([0, 0, 2])?,
        coeff([1, 1, 0])?,
        coeff([1, 0, 1])?,
        coeff([0, 1, 1])?,
    ]))
}

fn family_degree(f: &Family) -> usize {
    let idx = f.form.param_index(&f.param);
    [[2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 0], [1, 0, 1], [0, 1, 1]]
        .iter()
        .filter_map(|&e| f.form.coefficient_in(e, idx).degree())
        .max()
        .unwrap_or(0)
}

fn specialize(c: &Conic<Poly<Rational>>, u: &Rational) -> Curve<QuadExt> {
    Curve::Conic(Conic {
        m: std::array::from_fn(|i| std::array::from_fn(|j| QuadExt::from_rational(c.m[i][j].eval(u)))),
    })
}

/// All parameter pairs `(u, v)` for which the conic `a(u)` is smooth and meets
/// `b(v)` at `p` with multiplicity exactly `mult`. `b` must be linear in `v`.
pub fn conic_family_solve(
    a: &Family,
    b: &Family,
    p: &Point<QuadExt>,
    mult: u32,
) -> Result<Vec<(Rational, Rational)>> {
    if family_degree(b) > 1 {
        return Err(Error::Geometry(format!("family in `{}` must be linear in it", b.param)));
    }
    let pr: Point<Poly<Rational>> = p
        .iter()
        .map(|c| geometry::rational(c).map(Poly::constant))
        .collect::<Option<Vec<_>>>()
        .and_then(|v| v.try_into().ok())
        .ok_or_else(|| Error::Geometry("family base point must be rational".into()))?;
    let ca = family_conic(a, None)?;
    let b0c = family_conic(b, Some(0))?;
    let b1c = family_conic(b, Some(1))?;
    let (b0, b1) = (Curve::Conic(b0c.clone()), Curve::Conic(b1c.clone()));
    let target = Curve::Conic(ca.clone());
    // b(v) restricted to a(u) near p: sum_k (a_k(u) + v b_k(u)) t^k
    let r0 = restriction(&b0, &target, &pr)?;
    let r1 = restriction(&b1, &target, &pr)?;
    let k = mult as usize;
    let (a_k, b_k): (Vec<Poly<Rational>>, Vec<Poly<Rational>>) =
        (0..k).map(|i| (r0.coeff(i), r1.coeff(i))).unzip();
    let mut g = Poly::<Rational>::zero();
    for i in 0..k {
        if b_k[i].is_zero() {
            g = g.gcd(&a_k[i]);
        }
        for j in i + 1..k {
            let e = a_k[i].clone() * b_k[j].clone() - a_k[j].clone() * b_k[i].clone();
            g = g.gcd(&e);
        }
    }
    let det = ca.det();
    let candidates = if g.is_zero() {
        return Err(Error::Geometry("conditions do not constrain the first parameter".into()));
    } else {
        g.rational_roots()?
    };
    let mut out = Vec::new();
    for u in candidates {
        if Zero::is_zero(&det.eval(&u)) {
            continue;
        }
        let Some(i) = (0..k).find(|&i| !Zero::is_zero(&b_k[i].eval(&u))) else {
            continue;
        };
        let v = -a_k[i].eval(&u) / b_k[i].eval(&u);
        if !(0..k).all(|j| Zero::is_zero(&(a_k[j].eval(&u) + &v * b_k[j].eval(&u)))) {
            continue;
        }
        let cu = specialize(&ca, &u);
        let bv = Curve::Conic(Conic {
            m: std::array::from_fn(|r| {
                std::array::from_fn(|c| {
                    QuadExt::from_rational(b0c.m[r][c].coeff(0) + &v * b1c.m[r][c].coeff(0))
                })
            }),
        });
        if intersection_multiplicity(&bv, &cu, p)? == mult {
            out.push((u, v));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    #[test]
    fn tokenizer_keeps_brackets() {
        assert_eq!(
            tokens("collinear [1, eps, eps] [0,1,0] Q1"),
            vec!["collinear", "[1,eps,eps]", "[0,1,0]", "Q1"]
        );
        assert_eq!(split_top("[1,0],[0,1]"), vec!["[1,0]", "[0,1]"]);
    }

    #[test]
    fn y2c_family() {
        let d = CoordData::parse(
            "point P3 [1,1,0]\n\
             family T(u): u yz = y^2 - x^2\n\
             family E(v): v(y^2 - x^2 - 2yz) = z^2 - yz - xz\n",
        )
        .unwrap();
        let sols = conic_family_solve(&d.families["T"], &d.families["E"], &d.points["P3"], 3).unwrap();
        assert_eq!(sols, vec![(rat(-2), ratio(1, 2))]);
    }

    #[test]
    fn inverse_and_order() {
        let m = parse_matrix("[[1,-1,0],[0,-eps,0],[0,-eps,1]]").unwrap();
        let inv = inverse(&m).unwrap();
        let id = projective_order(&inv, 1);
        assert_eq!(id, None);
        assert_eq!(projective_order(&m, 12), Some(3));
        let eye = parse_matrix("[[1,0,0],[0,1,0],[0,0,1]]").unwrap();
        assert_eq!(projective_order(&eye, 12), Some(1));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = CoordData::parse("point A [1,0,0]\npoint B [1,0]\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(CoordData::parse("frobnicate\n").is_err());
        assert!(CoordData::parse("line L: x^2 = y z\n").is_err());
    }

    #[test]
    fn bundled_fixtures() {
        for text in [include_str!("../../fixtures/y244.coords"), include_str!("../../fixtures/y333.coords")] {
            let d = CoordData::parse(text).unwrap();
            for c in d.check_all() {
                assert!(c.pass, "{c}");
            }
            for (p, k, broke) in d.mutation_sanity() {
                assert!(broke, "perturbing {p}[{k}] breaks nothing");
            }
        }
    }
}
