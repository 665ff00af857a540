//! Univariate polynomials over a ring, and the small multivariate forms the
//! coordinate fixtures are written in.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{Field, QuadExt, Ring};
use crate::error::{Error, Result};
use crate::linalg::Rational;

/// Dense coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<R: Ring> {
    coeffs: Vec<R>,
}

impl<R: Ring> Poly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(Ring::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Poly::new(vec![c])
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        Poly::new(vec![R::zero(), R::one()])
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    /// Coefficient of `t^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Order of vanishing at `t = 0`; `None` for the zero polynomial.
    pub fn order_at_zero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &R) -> R {
        self.coeffs.iter().rev().fold(R::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<F: Field> Poly<F> {
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        let dd = d.degree()?;
        let lead_inv = d.coeffs[dd].inv()?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![F::zero(); rem.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = rem[rem.len() - 1].clone() * lead_inv.clone();
            for (i, x) in d.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].clone() - c.clone() * x.clone();
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(Ring::is_zero) {
                rem.pop();
            }
        }
        Some((Poly::new(quot), Poly::new(rem)))
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last().and_then(Field::inv) {
            Some(inv) => Poly::new(self.coeffs.iter().map(|c| c.clone() * inv.clone()).collect()),
            None => self.clone(),
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).is_some_and(|(_, r)| r.is_zero())
    }
}

impl Poly<Rational> {
    /// All rational roots, ascending, by the rational root test on the cleared polynomial.
    pub fn rational_roots(&self) -> Result<Vec<Rational>> {
        if self.is_zero() {
            return Err(Error::Geometry("zero polynomial has every root".into()));
        }
        let denom = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| (c * Rational::from_integer(denom.clone())).to_integer()).collect();
        let mut roots = Vec::new();
        if ints[0].is_zero() {
            roots.push(<Rational as Zero>::zero());
            while ints[0].is_zero() {
                ints.remove(0);
            }
        }
        let divisors = |n: &BigInt| -> Result<Vec<i64>> {
            let n =
                n.abs().to_i64().filter(|&v| v <= 1_000_000_000_000).ok_or_else(|| {
                    Error::Geometry("coefficient too large for the rational root test".into())
                })?;
            let mut out = Vec::new();
            let mut d = 1;
            while d * d <= n {
                if n % d == 0 {
                    out.push(d);
                    out.push(n / d);
                }
                d += 1;
            }
            Ok(out)
        };
        let ps = divisors(&ints[0])?;
        let qs = divisors(ints.last().expect("nonzero"))?;
        let reduced = Poly::new(ints.iter().map(|c| Rational::from_integer(c.clone())).collect());
        for p in &ps {
            for q in &qs {
                for s in [1, -1] {
                    let r = Rational::new((s * p).into(), (*q).into());
                    if Zero::is_zero(&reduced.eval(&r)) && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        Ok(roots)
    }
}

impl<R: Ring> Add for Poly<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<R: Ring> Sub for Poly<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<R: Ring> Neg for Poly<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<R: Ring> Mul for Poly<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Poly::new(vec![]);
        }
        let mut out = vec![R::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn zero() -> Self {
        Poly::new(vec![])
    }
    fn one() -> Self {
        Poly::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn from_rational(r: Rational) -> Self {
        Poly::constant(R::from_rational(r))
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})t"),
                _ => format!("({c})t^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Sparse polynomial over `Q(eps)` in named variables; `x, y, z` are always 0, 1, 2.
#[derive(Clone, PartialEq, Debug)]
pub struct Form {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, QuadExt>,
}

impl Form {
    fn with_vars(vars: Vec<String>) -> Self {
        Form { vars, terms: BTreeMap::new() }
    }

    fn constant(vars: &[String], c: QuadExt) -> Self {
        let mut f = Form::with_vars(vars.to_vec());
        if !c.is_zero() {
            f.terms.insert(vec![0; vars.len()], c);
        }
        f
    }

    fn var(vars: &[String], i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut f = Form::with_vars(vars.to_vec());
        f.terms.insert(e, QuadExt::one());
        f
    }

    fn combine(mut self, o: &Form, sign: bool) -> Form {
        for (e, c) in &o.terms {
            let c = if sign { c.clone() } else { -c.clone() };
            let v = self.terms.remove(e).map_or(c.clone(), |x| x + c);
            if !v.is_zero() {
                self.terms.insert(e.clone(), v);
            }
        }
        self
    }

    fn product(&self, o: &Form) -> Form {
        let mut out = Form::with_vars(self.vars.clone());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let mut single = Form::with_vars(self.vars.clone());
                single.terms.insert(e, c1.clone() * c2.clone());
                out = out.combine(&single, true);
            }
        }
        out
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Names of variables other than `x, y, z` that actually occur.
    pub fn parameters(&self) -> Vec<String> {
        (3..self.vars.len())
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .map(|i| self.vars[i].clone())
            .collect()
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        (3..self.vars.len()).find(|&i| self.vars[i] == name)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn as_constant(&self) -> Option<QuadExt> {
        match self.terms.len() {
            0 => Some(QuadExt::zero()),
            1 => self.terms.iter().next().filter(|(e, _)| e.iter().all(|&k| k == 0)).map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    /// Coefficient of the `x^i y^j z^k` monomial as a polynomial in the parameter at `param`.
    pub fn coefficient_in(&self, xyz: [u32; 3], param: Option<usize>) -> Poly<QuadExt> {
        let mut coeffs: Vec<QuadExt> = Vec::new();
        for (e, c) in &self.terms {
            if e[..3] != xyz {
                continue;
            }
            let k = param.map_or(0, |p| e[p] as usize);
            if coeffs.len() <= k {
                coeffs.resize(k + 1, QuadExt::zero());
            }
            coeffs[k] = coeffs[k].clone() + c.clone();
        }
        Poly::new(coeffs)
    }

    /// Total degree in `x, y, z` if homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let degs: Vec<u32> = self.terms.keys().map(|e| e[..3].iter().sum()).collect();
        let d = *degs.first()?;
        degs.iter().all(|&x| x == d).then_some(d)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: Vec<String>,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<u8> {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Geometry(format!(
            "{msg} at column {} of `{}`",
            self.pos + 1,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn expr(&mut self) -> Result<Form> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Form::constant(&self.vars, QuadExt::zero()).combine(&self.term()?, false)
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.combine(&self.term()?, true);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.combine(&self.term()?, false);
                }
                _ => return Ok(acc),
            }
        }
    }

    /// Factors joined by `*`, `/` (constant divisors only) or juxtaposition.
    fn term(&mut self) -> Result<Form> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.product(&self.power()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    let inv = d
                        .as_constant()
                        .and_then(|c| c.inv())
                        .ok_or_else(|| self.err("division by a non-constant or zero"))?;
                    acc = acc.product(&Form::constant(&self.vars, inv));
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    acc = acc.product(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Form> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let start = self.pos;
            while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                self.pos += 1;
            }
            let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| self.err("expected an exponent"))?;
            let one = Form::constant(&self.vars, QuadExt::one());
            return Ok((0..k).fold(one, |acc, _| acc.product(&base)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Form> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let n: BigInt =
                    std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").parse().expect("digits");
                Ok(Form::constant(&self.vars, QuadExt::from_rational(Rational::from_integer(n))))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                if self.src[self.pos..].starts_with(b"eps") {
                    self.pos += 3;
                    return Ok(Form::constant(&self.vars, QuadExt::eps()));
                }
                self.pos += 1;
                let name = (c as char).to_string();
                let i = match self.vars.iter().position(|v| *v == name) {
                    Some(i) => i,
                    None => {
                        self.vars.push(name);
                        self.vars.len() - 1
                    }
                };
                Ok(Form::var(&self.vars, i))
            }
            _ => Err(self.err("unexpected input")),
        }
    }
}

fn widen(f: Form, vars: &[String]) -> Form {
    let mut out = Form::with_vars(vars.to_vec());
    for (mut e, c) in f.terms {
        e.resize(vars.len(), 0);
        out.terms.insert(e, c);
    }
    out
}

/// Parses `expr` or `lhs = rhs` (as `lhs - rhs`). Single letters other than
/// `x, y, z` become parameters; `eps` is the field generator.
pub fn parse_form(text: &str) -> Result<Form> {
    let parse_side = |s: &str, vars: Vec<String>| -> Result<(Form, Vec<String>)> {
        let mut p = Parser { src: s.as_bytes(), pos: 0, vars };
        let f = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok((f, p.vars))
    };
    // exponent vectors grow as variables appear; parse twice so every term sees the full list
    let base: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let sides: Vec<&str> = text.split('=').collect();
    if sides.len() > 2 {
        return Err(Error::Geometry(format!("more than one `=` in `{text}`")));
    }
    let mut vars = base;
    for s in &sides {
        vars = parse_side(s, vars)?.1;
    }
    let mut total = Form::with_vars(vars.clone());
    for (i, s) in sides.iter().enumerate() {
        let (f, _) = parse_side(s, vars.clone())?;
        total = total.combine(&widen(f, &vars), i == 0);
    }
    Ok(total)
}

/// A constant expression such as `eps-1` or `1/2`.
pub fn parse_scalar(text: &str) -> Result<QuadExt> {
    let f = parse_form(text)?;
    f.as_constant().ok_or_else(|| Error::Geometry(format!("`{text}` is not a constant")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    fn p(c: &[i64]) -> Poly<Rational> {
        Poly::new(c.iter().map(|&x| rat(x)).collect())
    }

    #[test]
    fn arithmetic_and_order() {
        let a = p(&[0, 0, 3, 1]);
        assert_eq!(a.order_at_zero(), Some(2));
        assert_eq!(a.degree(), Some(3));
        assert_eq!(p(&[1, 1]) * p(&[-1, 1]), p(&[-1, 0, 1]));
        assert_eq!(p(&[1, 2, 1]).eval(&rat(2)), rat(9));
        assert_eq!(Poly::<Rational>::zero().order_at_zero(), None);
    }

    #[test]
    fn gcd_and_roots() {
        let f = p(&[-1, 0, 1]) * p(&[2, 1]);
        let g = p(&[-1, 1]) * p(&[3, 1]);
        assert_eq!(f.gcd(&g), p(&[-1, 1]));
        assert!(p(&[-1, 1]).divides(&f));
        assert!(!p(&[3, 1]).divides(&f));
        let h = Poly::new(vec![rat(1), rat(-3), rat(2)]); // (2t - 1)(t - 1)
        assert_eq!(h.rational_roots().unwrap(), vec![ratio(1, 2), rat(1)]);
        assert_eq!(p(&[0, 0, 1, 1]).rational_roots().unwrap(), vec![rat(-1), rat(0)]);
        assert!(p(&[1, 0, 1]).rational_roots().unwrap().is_empty());
    }

    #[test]
    fn forms() {
        let f = parse_form("2yz = y^2 - x^2").unwrap();
        assert_eq!(f.homogeneous_degree(), Some(2));
        assert_eq!(f.coefficient_in([0, 1, 1], None), Poly::constant(QuadExt::from_int(2)));
        assert_eq!(f.coefficient_in([2, 0, 0], None), Poly::constant(QuadExt::one()));
        let fam = parse_form("u yz = y^2 - x^2").unwrap();
        assert_eq!(fam.parameters(), vec!["u".to_string()]);
        let c = fam.coefficient_in([0, 1, 1], Some(3));
        assert_eq!(c, Poly::new(vec![QuadExt::zero(), QuadExt::one()]));
        let e = parse_form("(1-eps)x + eps y = z").unwrap();
        assert_eq!(e.coefficient_in([1, 0, 0], None).coeff(0), QuadExt::new(rat(1), rat(-1)));
        assert_eq!(parse_scalar("eps-1").unwrap(), QuadExt::new(rat(-1), rat(1)));
        assert_eq!(parse_scalar("eps^2").unwrap(), QuadExt::new(rat(-1), rat(1)));
        assert_eq!(parse_scalar("1/2").unwrap(), QuadExt::from_rational(ratio(1, 2)));
        assert!(parse_scalar("x").is_err());
        assert!(parse_form("x + ").is_err());
        assert!(parse_form("1/x").is_err());
    }
}
