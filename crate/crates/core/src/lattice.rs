//! Iterated blow-ups of the projective plane as integer lattices.
//!
//! Classes live in the basis `(H, e_1, ..., e_n)` with Gram form
//! `diag(1, -1, ..., -1)`; `K = -3H + sum e_i`. Proper transforms are kept
//! incrementally: a blow-up subtracts the new `e` from every curve in its center.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::birational::{is_valid_fiber, RulingBookkeeping};
use crate::divisor::{sharp, BarkKind};
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::linalg::{solve_integer, solve_rational, torsion_of_cokernel, IntMatrix, Rational, TorsionGroup};

pub type Class = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Curve { name: String, degree: u32 },
    Blowup { name: String, center: Vec<String> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlowupProgram {
    pub steps: Vec<Step>,
}

impl BlowupProgram {
    /// Parses `curve <name> degree=<d>` and `blowup <name> at <a>,<b>,...` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut steps = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                ["curve", name, deg] => {
                    let degree: u32 = deg
                        .strip_prefix("degree=")
                        .and_then(|d| d.parse().ok())
                        .ok_or_else(|| Error::parse(line_no, format!("expected degree=<d>, got `{deg}`")))?;
                    if !(1..=2).contains(&degree) {
                        return Err(Error::parse(line_no, "only lines and conics are supported"));
                    }
                    steps.push(Step::Curve { name: name.to_string(), degree });
                }
                ["blowup", name, "at", centers @ ..] if !centers.is_empty() => {
                    let center: Vec<String> =
                        centers.join("").split(',').filter(|s| !s.is_empty()).map(str::to_string).collect();
                    if center.is_empty() {
                        return Err(Error::parse(line_no, "empty center"));
                    }
                    steps.push(Step::Blowup { name: name.to_string(), center });
                }
                _ => return Err(Error::parse(line_no, format!("malformed line `{line}`"))),
            }
        }
        Ok(BlowupProgram { steps })
    }

    pub fn blowup_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Blowup { .. })).count()
    }

    /// Curves listed in the center of the blow-up called `name`.
    pub fn center_of(&self, name: &str) -> Option<&[String]> {
        self.steps.iter().find_map(|s| match s {
            Step::Blowup { name: n, center } if n == name => Some(center.as_slice()),
            _ => None,
        })
    }

    /// Same program without the blow-up called `name`.
    pub fn without_blowup(&self, name: &str) -> Self {
        BlowupProgram {
            steps: self
                .steps
                .iter()
                .filter(|s| !matches!(s, Step::Blowup { name: n, .. } if n == name))
                .cloned()
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    Plane {
        degree: u32,
    },
    Exceptional {
        index: usize,
    },
    /// Attached after the program ran, e.g. a class found by [`solve_curve_class`].
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceLattice {
    rank: usize,
    names: Vec<String>,
    classes: Vec<Class>,
    kinds: Vec<CurveKind>,
    index: HashMap<String, usize>,
}

/// Executes the program; every step is checked against adjunction.
pub fn run_program(p: &BlowupProgram) -> Result<SurfaceLattice> {
    let rank = 1 + p.blowup_count();
    let mut l = SurfaceLattice { rank, names: vec![], classes: vec![], kinds: vec![], index: HashMap::new() };
    let mut next_e = 1;
    for step in &p.steps {
        match step {
            Step::Curve { name, degree } => {
                let mut c = vec![0; rank];
                c[0] = i64::from(*degree);
                l.insert(name, c, CurveKind::Plane { degree: *degree })?;
            }
            Step::Blowup { name, center } => {
                let idx: Vec<usize> = center
                    .iter()
                    .map(|c| l.index.get(c).copied().ok_or_else(|| Error::UnknownCurve(c.clone())))
                    .collect::<Result<_>>()?;
                if idx.iter().collect::<BTreeSet<_>>().len() != idx.len() {
                    return Err(Error::InvalidCenter(format!("repeated curve in center of `{name}`")));
                }
                for (a, &i) in idx.iter().enumerate() {
                    for &j in &idx[a + 1..] {
                        if l.pair(&l.classes[i], &l.classes[j]) <= 0 {
                            return Err(Error::ExcessIntersection(format!(
                                "`{}` and `{}` no longer meet at the center of `{name}`",
                                l.names[i], l.names[j]
                            )));
                        }
                    }
                }
                for &i in &idx {
                    l.classes[i][next_e] -= 1;
                }
                let mut e = vec![0; rank];
                e[next_e] = 1;
                l.insert(name, e, CurveKind::Exceptional { index: next_e })?;
                next_e += 1;
            }
        }
        if let Some(bad) = l.adjunction_failures().first() {
            return Err(Error::Geometry(format!("adjunction fails for `{bad}`")));
        }
    }
    Ok(l)
}

impl SurfaceLattice {
    fn insert(&mut self, name: &str, class: Class, kind: CurveKind) -> Result<()> {
        if self.index.contains_key(name) || self.atom(name).is_some() {
            return Err(Error::Geometry(format!("duplicate or reserved curve name `{name}`")));
        }
        self.index.insert(name.to_string(), self.names.len());
        self.names.push(name.to_string());
        self.classes.push(class);
        self.kinds.push(kind);
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Names an extra curve class; it must be of the right rank and satisfy adjunction.
    pub fn with_curve(&self, name: &str, class: Class) -> Result<Self> {
        if class.len() != self.rank {
            return Err(Error::Dimension(format!(
                "class of `{name}` has length {}, expected {}",
                class.len(),
                self.rank
            )));
        }
        let mut l = self.clone();
        l.insert(name, class, CurveKind::Derived)?;
        if l.adjunction_failures().iter().any(|n| n == name) {
            return Err(Error::Geometry(format!("adjunction fails for `{name}`")));
        }
        Ok(l)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self, name: &str) -> Result<CurveKind> {
        Ok(self.kinds[self.curve_index(name)?])
    }

    fn curve_index(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    pub fn class(&self, name: &str) -> Result<&Class> {
        Ok(&self.classes[self.curve_index(name)?])
    }

    pub fn h(&self) -> Class {
        let mut v = vec![0; self.rank];
        v[0] = 1;
        v
    }

    pub fn k(&self) -> Class {
        let mut v = vec![1; self.rank];
        v[0] = -3;
        v
    }

    /// Gram pairing `a_0 b_0 - sum a_i b_i`.
    pub fn pair(&self, a: &[i64], b: &[i64]) -> i64 {
        a[0] * b[0] - a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<i64>()
    }

    pub fn pair_names(&self, a: &str, b: &str) -> Result<i64> {
        Ok(self.pair(&self.class_of(a)?, &self.class_of(b)?))
    }

    fn atom(&self, token: &str) -> Option<Class> {
        match token {
            "K" => Some(self.k()),
            "H" => Some(self.h()),
            _ => {
                let k: usize = token.strip_prefix('e')?.parse().ok()?;
                (1..self.rank).contains(&k).then(|| {
                    let mut v = vec![0; self.rank];
                    v[k] = 1;
                    v
                })
            }
        }
    }

    /// Evaluates a class expression such as `T1+2B+T33`, `K`, `H-e1-e2` or `3*H`.
    pub fn class_of(&self, expr: &str) -> Result<Class> {
        let expr: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        if expr.is_empty() {
            return Err(Error::UnknownCurve(String::new()));
        }
        let mut out = vec![0; self.rank];
        let mut rest = expr.as_str();
        while !rest.is_empty() {
            let sign = match rest.as_bytes()[0] {
                b'-' => {
                    rest = &rest[1..];
                    -1
                }
                b'+' => {
                    rest = &rest[1..];
                    1
                }
                _ => 1,
            };
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            let digits = term.chars().take_while(char::is_ascii_digit).count();
            let coeff: i64 = if digits == 0 {
                1
            } else {
                term[..digits].parse().map_err(|_| Error::UnknownCurve(term.to_string()))?
            };
            let atom = term[digits..].trim_start_matches('*');
            let v = match self.index.get(atom) {
                Some(&i) => self.classes[i].clone(),
                None => self.atom(atom).ok_or_else(|| Error::UnknownCurve(atom.to_string()))?,
            };
            for (o, x) in out.iter_mut().zip(&v) {
                *o += sign * coeff * x;
            }
        }
        Ok(out)
    }

    /// Names whose class violates `C^2 + C.K = -2`.
    pub fn adjunction_failures(&self) -> Vec<String> {
        let k = self.k();
        self.names
            .iter()
            .zip(&self.classes)
            .filter(|(_, c)| self.pair(c, c) + self.pair(c, &k) != -2)
            .map(|(n, _)| n.clone())
            .collect()
    }

    pub fn gram_on<S: AsRef<str>>(&self, names: &[S]) -> Result<IntMatrix> {
        let cls: Vec<Class> = names.iter().map(|n| self.class_of(n.as_ref())).collect::<Result<_>>()?;
        Ok(IntMatrix::from_fn(cls.len(), cls.len(), |i, j| BigInt::from(self.pair(&cls[i], &cls[j]))))
    }

    /// `rank x #names` matrix whose columns are the class vectors.
    pub fn class_matrix<S: AsRef<str>>(&self, names: &[S]) -> Result<IntMatrix> {
        let cls: Vec<&Class> = names.iter().map(|n| self.class(n.as_ref())).collect::<Result<_>>()?;
        Ok(IntMatrix::from_fn(self.rank, cls.len(), |i, j| BigInt::from(cls[j][i])))
    }

    fn show(v: &[i64]) -> String {
        let parts: Vec<String> = v.iter().map(i64::to_string).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for SurfaceLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {}", self.rank)?;
        for (n, c) in self.names.iter().zip(&self.classes) {
            writeln!(f, "{n} {} sq={}", Self::show(c), self.pair(c, c))?;
        }
        Ok(())
    }
}

/// Weighted dual graph of named curves; products must be 0 or 1 and acyclic.
pub fn extract_boundary_graph<S: AsRef<str>>(l: &SurfaceLattice, names: &[S]) -> Result<DualGraph> {
    let mut g = DualGraph::new();
    let cls: Vec<&Class> = names.iter().map(|n| l.class(n.as_ref())).collect::<Result<_>>()?;
    for (n, c) in names.iter().zip(&cls) {
        g.add_vertex(n.as_ref(), l.pair(c, c))?;
    }
    for i in 0..cls.len() {
        for j in i + 1..cls.len() {
            match l.pair(cls[i], cls[j]) {
                0 => {}
                1 => g.add_edge(names[i].as_ref(), names[j].as_ref())?,
                p => {
                    return Err(Error::NonSnc(format!("{} . {} = {p}", names[i].as_ref(), names[j].as_ref())))
                }
            }
        }
    }
    if !g.is_forest() {
        return Err(Error::NotATree("boundary dual graph has a cycle".into()));
    }
    Ok(g)
}

/// `K + D - Bk D` as a rational class vector.
pub fn k_plus_sharp_class<S: AsRef<str>>(l: &SurfaceLattice, names: &[S]) -> Result<Vec<Rational>> {
    let g = extract_boundary_graph(l, names)?;
    let sh = sharp(&g, BarkKind::Auto)?;
    let mut out: Vec<Rational> = l.k().iter().map(|&x| Rational::from_integer(x.into())).collect();
    for (id, c) in sh.iter() {
        for (o, &x) in out.iter_mut().zip(l.class(id)?) {
            *o += c * Rational::from_integer(x.into());
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EulerNumbers {
    pub surface: i64,
    pub boundary: i64,
    pub exceptional: i64,
    pub open: i64,
}

fn forest_euler(g: &DualGraph) -> i64 {
    2 * g.len() as i64 - g.edge_count() as i64
}

pub fn euler_numbers<S: AsRef<str>>(
    l: &SurfaceLattice,
    boundary: &[S],
    exceptional: &[S],
) -> Result<EulerNumbers> {
    let b: BTreeSet<&str> = boundary.iter().map(AsRef::as_ref).collect();
    if let Some(x) = exceptional.iter().find(|e| b.contains(e.as_ref())) {
        return Err(Error::Geometry(format!("`{}` is in both sets", x.as_ref())));
    }
    let surface = 2 + l.rank as i64;
    let bd = forest_euler(&extract_boundary_graph(l, boundary)?);
    let ex = forest_euler(&extract_boundary_graph(l, exceptional)?);
    let mut all: Vec<&str> = boundary.iter().map(AsRef::as_ref).collect();
    all.extend(exceptional.iter().map(AsRef::as_ref));
    let union = forest_euler(&extract_boundary_graph(l, &all)?);
    if union != bd + ex {
        return Err(Error::Geometry("boundary and exceptional sets meet".into()));
    }
    Ok(EulerNumbers { surface, boundary: bd, exceptional: ex, open: surface - bd - ex })
}

/// Torsion of the cokernel of `Z^names -> H_2`; for a simply connected surface
/// this is `H_1` of the complement.
pub fn h1_order<S: AsRef<str>>(l: &SurfaceLattice, names: &[S]) -> Result<TorsionGroup> {
    Ok(torsion_of_cokernel(&l.class_matrix(names)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberPart {
    pub components: Vec<String>,
    /// Present when the named components add up to the fiber class.
    pub multiplicities: Option<Vec<i64>>,
    /// `F - sum mu_i C_i`, with unit multiplicities for incomplete fibers.
    pub residual: Class,
    pub in_boundary: bool,
    pub sigma: usize,
    pub graph: DualGraph,
}

impl FiberPart {
    pub fn is_complete(&self) -> bool {
        self.multiplicities.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RulingDecomposition {
    pub fiber_class: Class,
    pub horizontal: Vec<(String, i64)>,
    pub fibers: Vec<FiberPart>,
    pub bookkeeping: RulingBookkeeping,
}

impl RulingDecomposition {
    pub fn fiber_containing(&self, name: &str) -> Option<&FiberPart> {
        self.fibers.iter().find(|f| f.components.iter().any(|c| c == name))
    }

    pub fn all_complete(&self) -> bool {
        self.fibers.iter().all(FiberPart::is_complete)
    }
}

/// Splits `curves` into horizontal ones and fibers of the ruling with class `f`.
/// `boundary` decides which curves count towards `h`, `nu` and `sigma`.
pub fn ruling_decompose<S: AsRef<str>>(
    l: &SurfaceLattice,
    f: &[i64],
    curves: &[S],
    boundary: &[S],
) -> Result<RulingDecomposition> {
    let k = l.k();
    if l.pair(f, f) != 0 || l.pair(f, &k) != -2 {
        return Err(Error::NotFiberClass(format!("F^2 = {}, F.K = {}", l.pair(f, f), l.pair(f, &k))));
    }
    let bset: BTreeSet<&str> = boundary.iter().map(AsRef::as_ref).collect();
    let mut horizontal = Vec::new();
    let mut vertical: Vec<&str> = Vec::new();
    for c in curves {
        let c = c.as_ref();
        let deg = l.pair(l.class(c)?, f);
        match deg {
            d if d > 0 => horizontal.push((c.to_string(), d)),
            0 => vertical.push(c),
            d => return Err(Error::NotFiberClass(format!("{c} . F = {d}"))),
        }
    }
    // group by the pairing graph
    let n = vertical.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn root(g: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while g[r] != r {
            r = g[r];
        }
        g[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if l.pair_names(vertical[i], vertical[j])? > 0 {
                let (a, b) = (root(&mut group, i), root(&mut group, j));
                group[a] = b;
            }
        }
    }
    let mut parts: Vec<Vec<&str>> = Vec::new();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for (i, &v) in vertical.iter().enumerate() {
        let r = root(&mut group, i);
        let slot = *seen.entry(r).or_insert_with(|| {
            parts.push(vec![]);
            parts.len() - 1
        });
        parts[slot].push(v);
    }

    let mut fibers = Vec::new();
    for comps in parts {
        let graph = extract_boundary_graph(l, &comps)?;
        let m = l.class_matrix(&comps)?;
        let target: Vec<BigInt> = f.iter().map(|&x| BigInt::from(x)).collect();
        let mu = match solve_integer(&m, &target)? {
            Some((x, ker)) if ker.is_empty() && x.iter().all(|v| v.is_positive()) => {
                Some(x.iter().map(|v| v.to_i64().expect("small")).collect::<Vec<i64>>())
            }
            _ => None,
        };
        let used: Vec<i64> = mu.clone().unwrap_or_else(|| vec![1; comps.len()]);
        let mut residual = f.to_vec();
        for (c, m) in comps.iter().zip(&used) {
            for (r, x) in residual.iter_mut().zip(l.class(c)?) {
                *r -= m * x;
            }
        }
        if mu.is_some() && !is_valid_fiber(&graph).valid {
            return Err(Error::NotAFiber(format!("{comps:?} has the fiber class but is not a fiber")));
        }
        let sigma = comps.iter().filter(|c| !bset.contains(*c)).count();
        fibers.push(FiberPart {
            components: comps.iter().map(|s| s.to_string()).collect(),
            multiplicities: mu,
            residual,
            in_boundary: sigma == 0,
            sigma,
            graph,
        });
    }
    let h = horizontal.iter().filter(|(c, _)| bset.contains(c.as_str())).count() as i64;
    let nu = fibers.iter().filter(|p| p.is_complete() && p.in_boundary).count() as i64;
    let sigma_excess =
        fibers.iter().filter(|p| p.is_complete() && !p.in_boundary).map(|p| p.sigma as i64 - 1).sum();
    Ok(RulingDecomposition {
        fiber_class: f.to_vec(),
        horizontal,
        fibers,
        bookkeeping: RulingBookkeeping {
            h,
            nu,
            sigma_excess,
            b2_surface: l.rank as i64,
            b2_boundary: boundary.len() as i64,
        },
    })
}

pub const SEARCH_CAP: usize = 1_000_000;

/// All classes `v` with `v^2 = self_sq`, `v.K = -2 - self_sq` and `v.t = n` for each
/// constraint `(t, n)`, where `t` is a class expression.
pub fn solve_curve_class(
    l: &SurfaceLattice,
    constraints: &[(&str, i64)],
    self_sq: i64,
) -> Result<Vec<Class>> {
    let r = l.rank;
    let mut rows: Vec<Class> = Vec::new();
    let mut rhs: Vec<BigInt> = Vec::new();
    let gram_row =
        |t: &[i64]| -> Class { t.iter().enumerate().map(|(i, &x)| if i == 0 { x } else { -x }).collect() };
    for (expr, n) in constraints {
        rows.push(gram_row(&l.class_of(expr)?));
        rhs.push((*n).into());
    }
    rows.push(gram_row(&l.k()));
    rhs.push((-2 - self_sq).into());
    let a = IntMatrix::from_fn(rows.len(), r, |i, j| BigInt::from(rows[i][j]));
    let Some((x0, kernel)) = solve_integer(&a, &rhs)? else {
        return Ok(vec![]);
    };
    let f = kernel.len();
    let bpair = |a: &[BigInt], b: &[BigInt]| -> BigInt {
        &a[0] * &b[0] - a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<BigInt>()
    };
    let target = BigInt::from(self_sq);
    let to_class = |v: &[BigInt]| -> Result<Class> {
        v.iter()
            .map(|x| x.to_i64().ok_or_else(|| Error::Dimension("class coordinate overflow".into())))
            .collect()
    };
    if f == 0 {
        return Ok(if bpair(&x0, &x0) == target { vec![to_class(&x0)?] } else { vec![] });
    }
    // P = -(N^T G N) must be positive definite for the solution set to be finite.
    let p: Vec<Vec<Rational>> = (0..f)
        .map(|i| (0..f).map(|j| Rational::from_integer(-bpair(&kernel[i], &kernel[j]))).collect())
        .collect();
    let free = || {
        let parts: Vec<String> = kernel.iter().map(|v| format!("{v:?}")).collect();
        Error::Underconstrained(parts.join(" "))
    };
    let (lower, diag) = ldl(&p).ok_or_else(free)?;
    let b: Vec<Rational> = kernel.iter().map(|k| Rational::from_integer(bpair(k, &x0))).collect();
    let c = Rational::from_integer(bpair(&x0, &x0));
    let pm = crate::linalg::RatMatrix::from_rows(p.clone())?;
    let ystar = solve_rational(&pm, &b)?;
    let radius = c - Rational::from_integer(target.clone())
        + b.iter().zip(&ystar).map(|(x, y)| x * y).sum::<Rational>();
    if radius.is_negative() {
        return Ok(vec![]);
    }
    let mut search = Search {
        lower: &lower,
        diag: &diag,
        ystar: &ystar,
        y: vec![BigInt::zero(); f],
        visited: 0,
        hits: vec![],
    };
    search.descend(f, radius)?;
    let mut out = Vec::new();
    for y in search.hits {
        let mut v = x0.clone();
        for (yi, k) in y.iter().zip(&kernel) {
            for (vj, kj) in v.iter_mut().zip(k) {
                *vj += yi * kj;
            }
        }
        if bpair(&v, &v) == target {
            let cls = to_class(&v)?;
            debug_assert_eq!(l.pair(&cls, &l.k()), -2 - self_sq);
            out.push(cls);
        }
    }
    out.sort();
    Ok(out)
}

/// `P = L D L^T` with `L` unit lower triangular; `None` unless `P` is positive definite.
fn ldl(p: &[Vec<Rational>]) -> Option<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let n = p.len();
    let mut l = vec![vec![Rational::zero(); n]; n];
    let mut d = vec![Rational::zero(); n];
    for j in 0..n {
        let mut dj = p[j][j].clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if !dj.is_positive() {
            return None;
        }
        d[j] = dj;
        l[j][j] = Rational::from_integer(1.into());
        for i in j + 1..n {
            let mut s = p[i][j].clone();
            for k in 0..j {
                s -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = s / &d[j];
        }
    }
    Some((l, d))
}

struct Search<'a> {
    lower: &'a [Vec<Rational>],
    diag: &'a [Rational],
    ystar: &'a [Rational],
    y: Vec<BigInt>,
    visited: usize,
    hits: Vec<Vec<BigInt>>,
}

impl Search<'_> {
    /// Fixes `y[i-1]`, given `y[i..]`, within the remaining budget.
    fn descend(&mut self, i: usize, budget: Rational) -> Result<()> {
        if i == 0 {
            self.hits.push(self.y.clone());
            return Ok(());
        }
        let k = i - 1;
        // (L^T z)_k = z_k + sum_{j>k} L[j][k] z_j, z = y - y*
        let shift: Rational = (k + 1..self.y.len())
            .map(|j| &self.lower[j][k] * (Rational::from_integer(self.y[j].clone()) - &self.ystar[j]))
            .sum();
        let center = &self.ystar[k] - shift;
        let r2 = &budget / &self.diag[k];
        let s: BigInt = r2.ceil().to_integer().sqrt() + 1;
        let lo = center.floor().to_integer() - &s;
        let hi = center.ceil().to_integer() + &s;
        let mut yk = lo;
        while yk <= hi {
            self.visited += 1;
            if self.visited > SEARCH_CAP {
                return Err(Error::SearchLimit(SEARCH_CAP));
            }
            let dz = Rational::from_integer(yk.clone()) - &center;
            let used = &self.diag[k] * &dz * &dz;
            if used <= budget {
                self.y[k] = yk.clone();
                self.descend(k, &budget - used)?;
            }
            yk += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    fn lattice(text: &str) -> SurfaceLattice {
        run_program(&BlowupProgram::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn single_line() {
        let l = lattice("curve L degree=1\n");
        assert_eq!(l.class("L").unwrap(), &vec![1]);
        assert_eq!(l.pair_names("L", "L").unwrap(), 1);
        assert_eq!(l.pair_names("H", "H").unwrap(), 1);
    }

    #[test]
    fn line_blown_up_once() {
        let l = lattice("curve L degree=1\nblowup E at L\n");
        assert_eq!(l.class("L").unwrap(), &vec![1, -1]);
        assert_eq!(l.pair_names("L", "L").unwrap(), 0);
        assert_eq!(l.pair_names("E", "L").unwrap(), 1);
        assert_eq!(l.pair_names("K", "K").unwrap(), 8);
        assert!(l.adjunction_failures().is_empty());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(BlowupProgram::parse("curve C degree=3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            BlowupProgram::parse("curve A degree=1\nblowup X on A\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        let p = BlowupProgram::parse("curve A degree=1\nblowup X at Z\n").unwrap();
        assert_eq!(run_program(&p), Err(Error::UnknownCurve("Z".into())));
    }

    #[test]
    fn exhausted_intersection_is_rejected() {
        let p =
            BlowupProgram::parse("curve A degree=1\ncurve B degree=1\nblowup E1 at A,B\nblowup E2 at A,B\n")
                .unwrap();
        assert!(matches!(run_program(&p), Err(Error::ExcessIntersection(_))));
    }

    #[test]
    fn class_expressions() {
        let l = lattice("curve A degree=1\ncurve B degree=2\nblowup E at A,B\n");
        assert_eq!(l.class_of("A+2B").unwrap(), vec![5, -3]);
        assert_eq!(l.class_of("H-e1").unwrap(), vec![1, -1]);
        assert_eq!(l.class_of("3*H - E").unwrap(), vec![3, -1]);
        assert_eq!(l.class_of("K").unwrap(), vec![-3, 1]);
        assert!(l.class_of("Q").is_err());
        assert!(l.class_of("e2").is_err());
    }

    #[test]
    fn non_snc_extraction() {
        let l = lattice("curve A degree=1\ncurve C degree=2\n");
        assert!(matches!(extract_boundary_graph(&l, &["A", "C"]), Err(Error::NonSnc(_))));
        let l = lattice("curve A degree=1\ncurve B degree=1\ncurve C degree=1\n");
        assert!(matches!(extract_boundary_graph(&l, &["A", "B", "C"]), Err(Error::NotATree(_))));
    }

    #[test]
    fn sharp_class_sanity() {
        // a lone (-2)-curve is its own bark, so D^# = 0
        let l = lattice("curve A degree=1\nblowup E1 at A\nblowup E2 at A\nblowup E3 at A\n");
        let k = k_plus_sharp_class(&l, &["A"]).unwrap();
        assert_eq!(k, l.k().iter().map(|&x| rat(x)).collect::<Vec<_>>());
        // a (-3)-curve keeps a third
        let l = lattice("curve A degree=1\nblowup E1 at A\nblowup E2 at A\nblowup E3 at A\nblowup E4 at A\n");
        let k = k_plus_sharp_class(&l, &["A"]).unwrap();
        let third = ratio(1, 3);
        assert_eq!(k[0], rat(-3) + &third);
        assert_eq!(k[1], rat(1) - &third);
    }

    #[test]
    fn euler_of_bare_plane() {
        let l = lattice("");
        let e = euler_numbers::<&str>(&l, &[], &[]).unwrap();
        assert_eq!((e.surface, e.open), (3, 3));
    }

    #[test]
    fn h1_of_full_basis_is_trivial() {
        let l = lattice("curve A degree=1\nblowup E at A\n");
        // A = H - e1, E = e1 span the lattice
        assert!(h1_order(&l, &["A", "E"]).unwrap().is_trivial());
        let l2 = lattice("curve C degree=2\n");
        assert_eq!(h1_order(&l2, &["C"]).unwrap().to_string(), "Z2");
    }

    #[test]
    fn class_search_edge_cases() {
        let l = lattice("curve A degree=1\nblowup E1 at A\nblowup E2 at A\n");
        let mut cons: Vec<(&str, i64)> = vec![("H", 0), ("e1", 0), ("e2", 0)];
        assert!(solve_curve_class(&l, &cons, -1).unwrap().is_empty());
        cons.clear();
        // (-1)-curves on the plane blown up twice: e1, e2, H - e1 - e2
        let meets = solve_curve_class(&l, &[("E1", 1)], -1).unwrap();
        assert_eq!(meets, vec![vec![1, -1, -1]]);
        let misses = solve_curve_class(&l, &[("E1", 0)], -1).unwrap();
        assert_eq!(misses, vec![vec![0, 0, 1]]);
        // with K^2 = 0 the complement of K is only semidefinite
        let nine: String = (1..=9).map(|i| format!("blowup E{i} at A\n")).collect();
        let l0 = lattice(&format!("curve A degree=1\n{nine}"));
        assert!(matches!(solve_curve_class(&l0, &[], 0), Err(Error::Underconstrained(_))));
    }

    const Y244: &str = include_str!("../fixtures/y244.arr");
    const Y333: &str = include_str!("../fixtures/y333.arr");
    const D244: [&str; 8] = ["T31", "T32", "T33", "T21", "T22", "T23", "T1", "B"];
    const D333: [&str; 7] = ["T11", "T12", "T21", "T22", "T31", "T32", "B"];

    #[test]
    fn fixture_boundaries() {
        use crate::divisor::{classify_boundary, discriminant_graph, BoundaryType};
        for (text, d, det, ex) in
            [(Y244, &D244[..], -32, &["E"][..]), (Y333, &D333[..], -27, &["E1", "E2"][..])]
        {
            let l = lattice(text);
            assert_eq!(l.pair_names("K", "K").unwrap(), 10 - l.rank() as i64);
            let g = extract_boundary_graph(&l, d).unwrap();
            assert_eq!(discriminant_graph(&g), BigInt::from(det), "{g:?}");
            assert!(matches!(classify_boundary(&g).unwrap(), BoundaryType::TypeY(_)));
            assert!(k_plus_sharp_class(&l, d).unwrap().iter().all(Zero::is_zero));
            for e in ex {
                assert_eq!(l.pair_names(e, e).unwrap(), -2);
                for c in d {
                    assert_eq!(l.pair_names(e, c).unwrap(), 0, "{e}.{c}");
                }
            }
            let _ = euler_numbers(&l, d, ex).unwrap();
        }
    }

    #[test]
    fn fixture_h1() {
        let l = lattice(Y244);
        assert_eq!(h1_order(&l, &D244).unwrap().order(), BigInt::from(4));
        let l = lattice(Y333);
        assert_eq!(h1_order(&l, &D333).unwrap().order(), BigInt::from(3));
    }

    #[test]
    fn y244_ruling() {
        let l = lattice(Y244);
        let f = l.class_of("T1+2B+T33").unwrap();
        let l1 = solve_curve_class(&l, &[("T1+2B+T33", 0), ("T22", 1), ("T32", 1)], -1).unwrap();
        let l2 = solve_curve_class(&l, &[("T1+2B+T33", 0), ("T21", 1), ("T23", 1), ("T22", 0)], -1).unwrap();
        assert_eq!((l1.len(), l2.len()), (1, 1), "{l1:?} {l2:?}");
        assert_eq!(l.pair(&l1[0], l.class("E").unwrap()), 0);
        let mut curves: Vec<&str> = D244.to_vec();
        curves.extend(["E", "M"]);
        let r = ruling_decompose(&l, &f, &curves, &D244[..]).unwrap();
        let f0 = r.fiber_containing("E").unwrap();
        assert_eq!(f0.components, vec!["T31", "E", "M"]);
        assert_eq!(f0.multiplicities, Some(vec![1, 1, 2]));
        let f1 = r.fiber_containing("T21").unwrap();
        assert!(!f1.is_complete());
        assert_eq!(r.bookkeeping.h, 2);
        assert_eq!(r.bookkeeping.nu, 1);
    }
}
