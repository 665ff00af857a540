use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;
use crate::error::{Error, Result};

/// Smith normal form `u * m * v = s` with `u`, `v` unimodular.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Diagonal of `s` (all nonnegative).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

struct SnfCalc {
    u: IntMatrix,
    s: IntMatrix,
    v: IntMatrix,
}

impl SnfCalc {
    /// row[dst] += k * row[src], mirrored on `u`.
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for m in [&mut self.s, &mut self.u] {
            for j in 0..m.cols() {
                let v = m.get(dst, j) + k * m.get(src, j);
                m.set(dst, j, v);
            }
        }
    }

    /// col[dst] += k * col[src], mirrored on `v`.
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for m in [&mut self.s, &mut self.v] {
            for i in 0..m.rows() {
                let v = m.get(i, dst) + k * m.get(i, src);
                m.set(i, dst, v);
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.swap_rows(a, b);
        self.u.swap_rows(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.swap_cols(a, b);
        self.v.swap_cols(a, b);
    }

    fn negate_row(&mut self, r: usize) {
        for m in [&mut self.s, &mut self.u] {
            for j in 0..m.cols() {
                let v = -m.get(r, j).clone();
                m.set(r, j, v);
            }
        }
    }

    fn smallest_nonzero_from(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.s.rows() {
            for j in t..self.s.cols() {
                let x = self.s.get(i, j);
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.s.get(bi, bj).abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn process(&mut self) {
        let (rows, cols) = (self.s.rows(), self.s.cols());
        for t in 0..rows.min(cols) {
            loop {
                // Re-picking the smallest entry each pass keeps s, u and v small.
                let Some((pi, pj)) = self.smallest_nonzero_from(t) else {
                    return;
                };
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
                if self.s.get(t, t).is_negative() {
                    self.negate_row(t);
                }
                let pivot = self.s.get(t, t).clone();
                let mut clean = true;
                for i in t + 1..rows {
                    if !self.s.get(i, t).is_zero() {
                        let q = -nearest_quotient(self.s.get(i, t), &pivot);
                        self.add_row(i, t, &q);
                        clean &= self.s.get(i, t).is_zero();
                    }
                }
                for j in t + 1..cols {
                    if !self.s.get(t, j).is_zero() {
                        let q = -nearest_quotient(self.s.get(t, j), &pivot);
                        self.add_col(j, t, &q);
                        clean &= self.s.get(t, j).is_zero();
                    }
                }
                if !clean {
                    continue;
                }
                let offender =
                    (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !self.s.get(i, j).is_multiple_of(&pivot)));
                match offender {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
        }
    }
}

/// `a / p` rounded to the nearest integer, `p > 0`.
fn nearest_quotient(a: &BigInt, p: &BigInt) -> BigInt {
    (a * BigInt::from(2) + p).div_floor(&(p * BigInt::from(2)))
}

/// Smith normal form with transforms. Diagonal entries are nonnegative and each
/// divides the next; the sign is absorbed into `u`.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let mut calc =
        SnfCalc { u: IntMatrix::identity(m.rows()), s: m.clone(), v: IntMatrix::identity(m.cols()) };
    calc.process();
    let out = Snf { u: calc.u, s: calc.s, v: calc.v };
    #[cfg(any(test, debug_assertions))]
    check_snf(m, &out);
    out
}

#[cfg(any(test, debug_assertions))]
fn check_snf(m: &IntMatrix, snf: &Snf) {
    let prod = snf.u.mul(m).and_then(|um| um.mul(&snf.v)).expect("conformable");
    assert_eq!(prod, snf.s, "u*m*v != s");
    for i in 0..snf.s.rows() {
        for j in 0..snf.s.cols() {
            assert!(i == j || snf.s.get(i, j).is_zero(), "s not diagonal");
        }
    }
    let d = snf.diagonal();
    for w in d.windows(2) {
        if w[0].is_zero() {
            assert!(w[1].is_zero(), "zero before nonzero: {d:?}");
        } else {
            assert!(w[1].is_multiple_of(&w[0]), "divisibility chain broken: {d:?}");
        }
    }
    assert!(d.iter().all(|x| !x.is_negative()));
    for t in [&snf.u, &snf.v] {
        let det = super::det_exact(t).expect("square");
        assert!(det.abs().is_one(), "transform not unimodular");
    }
}

/// Finite abelian group given by invariant factors `d_1 | d_2 | ...`, all `> 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorsionGroup {
    factors: Vec<BigInt>,
}

impl TorsionGroup {
    pub fn trivial() -> Self {
        TorsionGroup { factors: vec![] }
    }

    /// Builds the group from arbitrary invariant factors; units are dropped.
    pub fn from_factors(factors: impl IntoIterator<Item = BigInt>) -> Result<Self> {
        let factors: Vec<BigInt> = factors.into_iter().map(|f| f.abs()).filter(|f| !f.is_one()).collect();
        if factors.iter().any(Zero::is_zero) {
            return Err(Error::Dimension("zero invariant factor".into()));
        }
        if factors.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(Error::Dimension(format!("not a divisibility chain: {factors:?}")));
        }
        Ok(TorsionGroup { factors })
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }
}

impl fmt::Display for TorsionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|x| format!("Z{x}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Torsion part of `coker(m : Z^cols -> Z^rows)`.
pub fn torsion_of_cokernel(m: &IntMatrix) -> TorsionGroup {
    let snf = smith_normal_form(m);
    TorsionGroup::from_factors(snf.diagonal().into_iter().filter(|d| !d.is_zero()))
        .expect("Smith diagonal is a divisibility chain")
}

/// Z-basis of `{x in Z^cols : m x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    (r..m.cols()).map(|j| snf.v.column(j)).collect()
}

/// A particular solution and a Z-basis of the kernel.
pub type IntegerSolution = (Vec<BigInt>, Vec<Vec<BigInt>>);

/// An integer solution of `m x = b` (if any) together with a Z-basis of the kernel.
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Result<Option<IntegerSolution>> {
    if b.len() != m.rows() {
        return Err(Error::Dimension(format!("right-hand side of length {} for {} rows", b.len(), m.rows())));
    }
    let snf = smith_normal_form(m);
    let r = snf.rank();
    let c = snf.u.mul_vec(b)?;
    let mut y = vec![BigInt::zero(); m.cols()];
    for i in 0..m.rows() {
        if i < r {
            let (q, rem) = c[i].div_rem(snf.s.get(i, i));
            if !rem.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return Ok(None);
        }
    }
    let x = snf.v.mul_vec(&y)?;
    let kernel = (r..m.cols()).map(|j| snf.v.column(j)).collect();
    Ok(Some((x, kernel)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(m: &IntMatrix) -> Vec<i64> {
        smith_normal_form(m).diagonal().iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    #[test]
    fn snf_examples() {
        assert_eq!(diag(&IntMatrix::from_i64_rows(&[&[-2]])), vec![2]);
        assert_eq!(diag(&IntMatrix::from_i64_rows(&[&[-2, 1], &[1, -2]])), vec![1, 3]);
        assert_eq!(
            diag(&IntMatrix::from_i64_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])),
            vec![2, 6, 12]
        );
    }

    #[test]
    fn snf_rectangular_and_zero() {
        assert_eq!(diag(&IntMatrix::zeros(2, 3)), vec![0, 0]);
        assert_eq!(diag(&IntMatrix::from_i64_rows(&[&[0, 4], &[6, 0], &[0, 0]])), vec![2, 12]);
    }

    #[test]
    fn torsion_examples() {
        let a1 = IntMatrix::from_i64_rows(&[&[-2]]);
        assert_eq!(torsion_of_cokernel(&a1).to_string(), "Z2");
        let a2 = IntMatrix::from_i64_rows(&[&[-2, 1], &[1, -2]]);
        assert_eq!(torsion_of_cokernel(&a2).to_string(), "Z3");
        let uni = IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        assert!(torsion_of_cokernel(&uni).is_trivial());
    }

    #[test]
    fn torsion_group_rejects_broken_chain() {
        let bad = TorsionGroup::from_factors([BigInt::from(4), BigInt::from(6)]);
        assert!(bad.is_err());
        let g = TorsionGroup::from_factors([BigInt::from(1), BigInt::from(2), BigInt::from(16)]).unwrap();
        assert_eq!(g.order(), BigInt::from(32));
        assert_eq!(g.to_string(), "Z2+Z16");
    }

    #[test]
    fn integer_solve_and_kernel() {
        let m = IntMatrix::from_i64_rows(&[&[2, 4, 0]]);
        let b = [BigInt::from(6)];
        let (x, ker) = solve_integer(&m, &b).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), b.to_vec());
        assert_eq!(ker.len(), 2);
        for k in &ker {
            assert!(m.mul_vec(k).unwrap().iter().all(Zero::is_zero));
        }
        assert!(solve_integer(&m, &[BigInt::from(3)]).unwrap().is_none());
        assert_eq!(integer_kernel(&m).len(), 2);
    }
}
