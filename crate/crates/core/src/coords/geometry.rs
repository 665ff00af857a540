//! Points, lines and conics in the projective plane over a ring, and their incidences.

use std::fmt;

use super::field::{Field, QuadExt, Ring};
use super::poly::{Form, Poly};
use crate::error::{Error, Result};
use crate::linalg::{ratio, Rational};

pub type Point<R> = [R; 3];

/// `a x + b y + c z = 0`.
pub type Line<R> = [R; 3];

/// `x^T M x = 0` with `M` symmetric.
#[derive(Clone, PartialEq, Debug)]
pub struct Conic<R: Ring> {
    pub m: [[R; 3]; 3],
}

impl<R: Ring> Conic<R> {
    /// From the coefficients of `x^2, y^2, z^2, xy, xz, yz`.
    pub fn from_coefficients(c: [R; 6]) -> Self {
        let half = R::from_rational(ratio(1, 2));
        let [xx, yy, zz, xy, xz, yz] = c;
        let h = |v: R| half.clone() * v;
        let (xy, xz, yz) = (h(xy), h(xz), h(yz));
        Conic { m: [[xx, xy.clone(), xz.clone()], [xy, yy, yz.clone()], [xz, yz, zz]] }
    }

    pub fn bilinear(&self, p: &Point<R>, q: &Point<R>) -> R {
        let mut acc = R::zero();
        for (pi, row) in p.iter().zip(&self.m) {
            for (qj, mij) in q.iter().zip(row) {
                acc = acc + pi.clone() * mij.clone() * qj.clone();
            }
        }
        acc
    }

    pub fn eval(&self, p: &Point<R>) -> R {
        self.bilinear(p, p)
    }

    /// Polar line of `p`; the tangent line when `p` lies on the conic.
    pub fn polar(&self, p: &Point<R>) -> Line<R> {
        std::array::from_fn(|i| (0..3).fold(R::zero(), |acc, j| acc + self.m[i][j].clone() * p[j].clone()))
    }

    pub fn det(&self) -> R {
        det3(&self.m)
    }

    pub fn is_smooth(&self) -> bool {
        !self.det().is_zero()
    }

    /// Image under `x -> A x`, i.e. the conic `(A^-1)^T M A^-1`, given `A^-1`.
    pub fn transform_by_inverse(&self, inv: &[[R; 3]; 3]) -> Self {
        let mut out: [[R; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| R::zero()));
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = R::zero();
                for k in 0..3 {
                    for l in 0..3 {
                        acc = acc + inv[k][i].clone() * self.m[k][l].clone() * inv[l][j].clone();
                    }
                }
                *cell = acc;
            }
        }
        Conic { m: out }
    }

    fn lift(&self) -> Conic<Poly<R>> {
        Conic { m: std::array::from_fn(|i| std::array::from_fn(|j| Poly::constant(self.m[i][j].clone()))) }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Curve<R: Ring> {
    Line(Line<R>),
    Conic(Conic<R>),
}

impl<R: Ring> Curve<R> {
    pub fn eval(&self, p: &Point<R>) -> R {
        match self {
            Curve::Line(l) => dot(l, p),
            Curve::Conic(c) => c.eval(p),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            Curve::Line(_) => 1,
            Curve::Conic(_) => 2,
        }
    }

    fn lift(&self) -> Curve<Poly<R>> {
        match self {
            Curve::Line(l) => Curve::Line(std::array::from_fn(|i| Poly::constant(l[i].clone()))),
            Curve::Conic(c) => Curve::Conic(c.lift()),
        }
    }
}

impl Curve<QuadExt> {
    /// Reads a homogeneous linear or quadratic [`Form`] without parameters.
    pub fn from_form(f: &Form) -> Result<Self> {
        if !f.parameters().is_empty() {
            return Err(Error::Geometry(format!("unexpected parameters {:?}", f.parameters())));
        }
        let c = |e: [u32; 3]| f.coefficient_in(e, None).coeff(0);
        match f.homogeneous_degree() {
            Some(1) => Ok(Curve::Line([c([1, 0, 0]), c([0, 1, 0]), c([0, 0, 1])])),
            Some(2) => Ok(Curve::Conic(Conic::from_coefficients([
                c([2, 0, 0]),
                c([0, 2, 0]),
                c([0, 0, 2]),
                c([1, 1, 0]),
                c([1, 0, 1]),
                c([0, 1, 1]),
            ]))),
            _ => Err(Error::Geometry("expected a homogeneous linear or quadratic equation".into())),
        }
    }
}

pub fn dot<R: Ring>(a: &[R; 3], b: &[R; 3]) -> R {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone() + a[2].clone() * b[2].clone()
}

/// Line through two points, or the meeting point of two lines.
pub fn cross<R: Ring>(a: &[R; 3], b: &[R; 3]) -> [R; 3] {
    let m = |i: usize, j: usize| a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone();
    [m(1, 2), m(2, 0), m(0, 1)]
}

pub fn det3<R: Ring>(m: &[[R; 3]; 3]) -> R {
    dot(&m[0], &cross(&m[1], &m[2]))
}

pub fn is_zero_vector<R: Ring>(v: &[R; 3]) -> bool {
    v.iter().all(Ring::is_zero)
}

/// Equality up to scale: every 2x2 minor vanishes.
pub fn proj_eq<R: Ring>(p: &[R; 3], q: &[R; 3]) -> bool {
    !is_zero_vector(p) && !is_zero_vector(q) && is_zero_vector(&cross(p, q))
}

pub fn incident<R: Ring>(p: &Point<R>, c: &Curve<R>) -> bool {
    c.eval(p).is_zero()
}

pub fn collinear<R: Ring>(p: &Point<R>, q: &Point<R>, r: &Point<R>) -> bool {
    det3(&[p.clone(), q.clone(), r.clone()]).is_zero()
}

pub fn apply<R: Ring>(a: &[[R; 3]; 3], p: &Point<R>) -> Point<R> {
    std::array::from_fn(|i| dot(&a[i], p))
}

fn basis<R: Ring>(i: usize) -> Point<R> {
    std::array::from_fn(|k| if k == i { R::one() } else { R::zero() })
}

/// Parametrization `p(t)` of `c` with `p(0)` proportional to `p0`, with
/// coefficients in `R[t]`. A conic is swept by the lines through `p0`.
pub fn parametrize_through<R: Ring>(c: &Curve<R>, p0: &Point<R>) -> Result<[Poly<R>; 3]> {
    if !incident(p0, c) {
        return Err(Error::Geometry("base point is not on the curve".into()));
    }
    let lift = |p: &Point<R>| -> Point<Poly<R>> { std::array::from_fn(|i| Poly::constant(p[i].clone())) };
    match c {
        Curve::Line(l) => {
            let d = (0..3)
                .map(|i| cross(l, &basis(i)))
                .find(|d| !is_zero_vector(d) && !proj_eq(d, p0))
                .ok_or_else(|| Error::Geometry("degenerate line".into()))?;
            let t = Poly::t();
            Ok(std::array::from_fn(|i| {
                Poly::constant(p0[i].clone()) + t.clone() * Poly::constant(d[i].clone())
            }))
        }
        Curve::Conic(q) => {
            let tangent = q.polar(p0);
            if is_zero_vector(&tangent) {
                return Err(Error::Geometry("conic is singular at the base point".into()));
            }
            // q1 on the tangent line, away from p0; q2 off it
            let q1 = (0..3)
                .map(|i| cross(&tangent, &basis(i)))
                .find(|d| !is_zero_vector(d) && !proj_eq(d, p0))
                .ok_or_else(|| Error::Geometry("degenerate tangent".into()))?;
            let q2: Point<R> =
                (0..3).map(basis).find(|e| !dot(&tangent, e).is_zero()).expect("tangent is nonzero");
            let t = Poly::t();
            let r: Point<Poly<R>> = std::array::from_fn(|i| {
                Poly::constant(q1[i].clone()) + t.clone() * Poly::constant(q2[i].clone())
            });
            let ql = q.lift();
            let p0l = lift(p0);
            let brr = ql.bilinear(&r, &r);
            let two_bpr = Poly::from_int(2) * ql.bilinear(&p0l, &r);
            Ok(std::array::from_fn(|i| brr.clone() * p0l[i].clone() - two_bpr.clone() * r[i].clone()))
        }
    }
}

/// `c1` restricted to the parametrization of `c2` through `p`.
pub fn restriction<R: Ring>(c1: &Curve<R>, c2: &Curve<R>, p: &Point<R>) -> Result<Poly<R>> {
    let param = parametrize_through(c2, p)?;
    Ok(c1.lift().eval(&param))
}

/// Local intersection number of `c1` and `c2` at `p`.
pub fn intersection_multiplicity<F: Field>(c1: &Curve<F>, c2: &Curve<F>, p: &Point<F>) -> Result<u32> {
    if is_zero_vector(p) {
        return Err(Error::Geometry("zero vector is not a point".into()));
    }
    if !incident(p, c1) || !incident(p, c2) {
        return Err(Error::Geometry("point is not on both curves".into()));
    }
    if let Curve::Conic(q) = c2 {
        if !q.is_smooth() {
            return Err(Error::Geometry("parametrized conic is degenerate".into()));
        }
    }
    let f = restriction(c1, c2, p)?;
    f.order_at_zero().map(|k| k as u32).ok_or_else(|| Error::Geometry("curves share a component".into()))
}

/// Sum of local intersection numbers over the given distinct points.
pub fn intersection_sum<F: Field>(c1: &Curve<F>, c2: &Curve<F>, points: &[Point<F>]) -> Result<u32> {
    for (i, p) in points.iter().enumerate() {
        if points[..i].iter().any(|q| proj_eq(p, q)) {
            return Err(Error::Geometry("repeated point".into()));
        }
    }
    points.iter().map(|p| intersection_multiplicity(c1, c2, p)).sum()
}

/// Unique `u` solving the linear equation `f(u) = 0`, where `f(0)` and `f(1)` determine it.
pub fn solve_linear<F: Field>(f: impl Fn(&F) -> F) -> Option<F> {
    let a = f(&F::zero());
    let b = f(&F::one()) - a.clone();
    // f(2) confirms linearity
    let two = F::from_int(2);
    if f(&two) != a.clone() + b.clone() * two {
        return None;
    }
    (-a).div(&b)
}

pub struct PointDisplay<'a>(pub &'a Point<QuadExt>);

impl fmt::Display for PointDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.0[0], self.0[1], self.0[2])
    }
}

pub fn rational_point(v: [i64; 3]) -> Point<QuadExt> {
    v.map(QuadExt::from_int)
}

pub fn rational(r: &QuadExt) -> Option<Rational> {
    r.is_rational().then(|| r.a.clone())
}
