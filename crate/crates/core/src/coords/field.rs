//! Scalars: a minimal ring/field interface, `Q` and `Q(eps)` with `eps^2 = eps - 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::linalg::Rational;

pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc * self.clone())
    }
}

pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;

    fn div(&self, other: &Self) -> Option<Self> {
        Some(self.clone() * other.inv()?)
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
}

impl Field for Rational {
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

/// `a + b eps` with `eps^2 = eps - 1`, i.e. `eps = -zeta` for a primitive cube root `zeta`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadExt {
    pub a: Rational,
    pub b: Rational,
}

impl QuadExt {
    pub fn new(a: Rational, b: Rational) -> Self {
        QuadExt { a, b }
    }

    pub fn eps() -> Self {
        QuadExt::new(Zero::zero(), One::one())
    }

    /// Image under `eps -> 1 - eps`, the other root of `t^2 - t + 1`.
    pub fn conj(&self) -> Self {
        QuadExt::new(&self.a + &self.b, -&self.b)
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a + &self.a * &self.b + &self.b * &self.b
    }

    pub fn is_rational(&self) -> bool {
        Zero::is_zero(&self.b)
    }
}

impl Add for QuadExt {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        QuadExt::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for QuadExt {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        QuadExt::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for QuadExt {
    type Output = Self;
    fn neg(self) -> Self {
        QuadExt::new(-self.a, -self.b)
    }
}

impl Mul for QuadExt {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let bd = &self.b * &o.b;
        QuadExt::new(&self.a * &o.a - &bd, &self.a * &o.b + &self.b * &o.a + bd)
    }
}

impl Ring for QuadExt {
    fn zero() -> Self {
        QuadExt::new(Zero::zero(), Zero::zero())
    }
    fn one() -> Self {
        QuadExt::new(One::one(), Zero::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn from_rational(r: Rational) -> Self {
        QuadExt::new(r, Zero::zero())
    }
}

impl Field for QuadExt {
    fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if Zero::is_zero(&n) {
            return None;
        }
        let c = self.conj();
        Some(QuadExt::new(c.a / &n, c.b / n))
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eps_part = |b: &Rational| -> String {
            if b.is_one() {
                "eps".into()
            } else if (-b).is_one() {
                "-eps".into()
            } else {
                format!("{b}eps")
            }
        };
        match (Zero::is_zero(&self.a), Zero::is_zero(&self.b)) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}", eps_part(&self.b)),
            (false, false) => {
                let e = eps_part(&self.b.abs());
                let sign = if self.b.is_negative() { '-' } else { '+' };
                write!(f, "{}{sign}{e}", self.a)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64, b: i64) -> QuadExt {
        QuadExt::new(rat(a), rat(b))
    }

    fn random(rng: &mut ChaCha8Rng) -> QuadExt {
        let mut r = || ratio(rng.random_range(-20..=20), rng.random_range(1..=9));
        QuadExt::new(r(), r())
    }

    #[test]
    fn eps_is_minus_a_cube_root_of_unity() {
        let e = QuadExt::eps();
        // zeta = -eps satisfies zeta^2 + zeta + 1 = 0
        let z = -e.clone();
        assert!((z.clone() * z.clone() + z.clone() + QuadExt::one()).is_zero());
        assert_eq!(e.clone() * e.clone(), e.clone() - QuadExt::one());
        assert_eq!(z.pow(3), QuadExt::one());
        assert_eq!(e.conj(), q(1, -1));
    }

    #[test]
    fn display() {
        assert_eq!(q(0, 1).to_string(), "eps");
        assert_eq!(q(-1, 1).to_string(), "-1+eps");
        assert_eq!(q(2, -3).to_string(), "2-3eps");
        assert_eq!(QuadExt::new(ratio(1, 2), rat(0)).to_string(), "1/2");
    }

    #[test]
    fn field_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51);
        for _ in 0..1000 {
            let (x, y, z) = (random(&mut rng), random(&mut rng), random(&mut rng));
            assert_eq!((x.clone() * y.clone()) * z.clone(), x.clone() * (y.clone() * z.clone()));
            assert_eq!(x.clone() * (y.clone() + z.clone()), x.clone() * y.clone() + x.clone() * z.clone());
            assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
            assert_eq!(x.conj().conj(), x);
            assert_eq!((x.clone() * y.clone()).conj(), x.conj() * y.conj());
            if !x.is_zero() {
                assert_eq!(x.clone() * x.inv().unwrap(), QuadExt::one());
                assert!(x.norm() > rat(0));
            }
        }
        assert_eq!(QuadExt::zero().inv(), None);
    }
}
