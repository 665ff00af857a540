//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers or rationals;
//! there is no floating point path.

mod snf;

pub use snf::{integer_kernel, smith_normal_form, solve_integer, torsion_of_cokernel, Snf, TorsionGroup};

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d` as a reduced rational. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<Rational>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Principal or general submatrix on the given row and column indices.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: Clone + Zero + PartialEq> Matrix<T> {
    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + for<'a> std::ops::Mul<&'a T, Output = T>,
{
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| acc + self.get(i, k).clone() * other.get(k, j))
        }))
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, k| acc + self.get(i, k).clone() * &v[k]))
            .collect())
    }
}

impl<T: Clone + Zero + std::ops::Neg<Output = T>> std::ops::Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl IntMatrix {
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| Rational::from_integer(x.clone()))
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

fn require_square<T>(m: &Matrix<T>) -> Result<()> {
    if m.rows != m.cols {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    Ok(())
}

/// Determinant by fraction-free (Bareiss) elimination. The empty matrix has determinant 1.
pub fn det_exact(m: &IntMatrix) -> Result<BigInt> {
    require_square(m)?;
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        let pivot = a.get(k, k).clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(i, j) * &pivot - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
            a.set(i, k, BigInt::zero());
        }
        prev = pivot;
    }
    let d = a.get(n - 1, n - 1).clone();
    Ok(if negate { -d } else { d })
}

/// Determinant of a rational matrix by Gaussian elimination.
pub fn det_rational(m: &RatMatrix) -> Result<Rational> {
    require_square(m)?;
    let n = m.rows;
    let mut a = m.clone();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != k {
            a.swap_rows(k, p);
            det = -det;
        }
        let pivot = a.get(k, k).clone();
        det *= &pivot;
        for i in k + 1..n {
            let f = a.get(i, k) / &pivot;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = a.get(i, j) - &f * a.get(k, j);
                a.set(i, j, v);
            }
        }
    }
    Ok(det)
}

/// Unique solution of `m x = b`; `Error::Singular` when `m` is not invertible.
pub fn solve_rational(m: &RatMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    require_square(m)?;
    let n = m.rows;
    if b.len() != n {
        return Err(Error::Dimension(format!("right-hand side of length {} for a {n}x{n} system", b.len())));
    }
    let mut a = m.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let p = (k..n).find(|&i| !a.get(i, k).is_zero()).ok_or(Error::Singular)?;
        a.swap_rows(k, p);
        rhs.swap(k, p);
        let pivot = a.get(k, k).clone();
        for i in 0..n {
            if i == k || a.get(i, k).is_zero() {
                continue;
            }
            let f = a.get(i, k) / &pivot;
            for j in k..n {
                let v = a.get(i, j) - &f * a.get(k, j);
                a.set(i, j, v);
            }
            let v = &rhs[i] - &f * &rhs[k];
            rhs[i] = v;
        }
    }
    let x: Vec<Rational> = (0..n).map(|i| &rhs[i] / a.get(i, i)).collect();
    // Back-substitution check against the untouched system.
    let residual = m.mul_vec(&x)?;
    if residual.as_slice() != b {
        return Err(Error::Singular);
    }
    Ok(x)
}

/// Basis of the right null space of `m` over the rationals, from the reduced row echelon form.
pub fn nullspace(m: &RatMatrix) -> Vec<Vec<Rational>> {
    let (rref, pivots) = row_echelon(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); m.cols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -rref.get(r, f).clone();
            }
            v
        })
        .collect()
}

pub fn rank(m: &RatMatrix) -> usize {
    row_echelon(m).1.len()
}

/// Reduced row echelon form and the pivot columns.
fn row_echelon(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = a.get(r, c).recip();
        for j in 0..a.cols {
            let v = a.get(r, j) * &inv;
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for j in 0..a.cols {
                let v = a.get(i, j) - &f * a.get(r, j);
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Sylvester's criterion: every leading principal minor of `-m` is positive.
///
/// Runs Bareiss elimination without pivoting on `-m`; the k-th pivot is then the
/// k-th leading principal minor, so a non-positive pivot ends the test.
pub fn is_negative_definite(m: &IntMatrix) -> Result<bool> {
    require_square(m)?;
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.rows;
    let mut a = -m;
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = a.get(k, k).clone();
        if !pivot.is_positive() {
            return Ok(false);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(i, j) * &pivot - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
        }
        prev = pivot;
    }
    Ok(true)
}

/// Leading principal minors of `-m`, i.e. `d` of the leading blocks.
pub fn leading_minors_negated(m: &IntMatrix) -> Result<Vec<BigInt>> {
    require_square(m)?;
    let neg = -m;
    (1..=m.rows)
        .map(|k| {
            let idx: Vec<usize> = (0..k).collect();
            det_exact(&neg.submatrix(&idx, &idx))
        })
        .collect()
}

/// Rank of `m` if `m` is negative semidefinite, `None` otherwise.
///
/// Symmetric elimination on `-m`: a zero pivot must come with a zero row, and
/// Schur complements of a positive semidefinite matrix stay positive semidefinite.
pub fn negative_semidefinite_rank(m: &IntMatrix) -> Result<Option<usize>> {
    require_square(m)?;
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.rows;
    let mut a = (-m).to_rational();
    let mut rank = 0;
    for k in 0..n {
        let pivot = a.get(k, k).clone();
        if pivot.is_negative() {
            return Ok(None);
        }
        if pivot.is_zero() {
            if (k + 1..n).any(|j| !a.get(k, j).is_zero()) {
                return Ok(None);
            }
            continue;
        }
        rank += 1;
        for i in k + 1..n {
            let f = a.get(i, k) / &pivot;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = a.get(i, j) - &f * a.get(k, j);
                a.set(i, j, v);
            }
        }
    }
    Ok(Some(rank))
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(det_exact(&q(&[&[-2]])).unwrap(), BigInt::from(-2));
        assert_eq!(det_exact(&IntMatrix::identity(3)).unwrap(), BigInt::one());
        // Q([2,1,2]) is the [2,1,2] fiber, degenerate form.
        let m = q(&[&[-2, 1, 0], &[1, -1, 1], &[0, 1, -2]]);
        assert_eq!(det_exact(&m).unwrap(), BigInt::zero());
        assert_eq!(det_rational(&m.to_rational()).unwrap(), rat(0));
        assert_eq!(det_exact(&IntMatrix::zeros(0, 0)).unwrap(), BigInt::one());
    }

    #[test]
    fn determinant_needs_row_swap() {
        let m = q(&[&[0, 1], &[1, 0]]);
        assert_eq!(det_exact(&m).unwrap(), BigInt::from(-1));
        let m = q(&[&[0, 2, 1], &[3, 0, 0], &[1, 1, 0]]);
        // cofactor: 0*(0) - 2*(0 - 0) + 1*(3 - 0) = 3
        assert_eq!(det_exact(&m).unwrap(), BigInt::from(3));
    }

    #[test]
    fn determinant_rejects_rectangular() {
        assert_eq!(det_exact(&IntMatrix::zeros(2, 3)), Err(Error::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn solve_examples() {
        let x = solve_rational(&q(&[&[-2]]).to_rational(), &[rat(-1)]).unwrap();
        assert_eq!(x, vec![ratio(1, 2)]);

        // Twig [2,2,2] tip first: tip row carries -1, the others 0.
        let m = q(&[&[-2, 1, 0], &[1, -2, 1], &[0, 1, -2]]).to_rational();
        let x = solve_rational(&m, &[rat(-1), rat(0), rat(0)]).unwrap();
        assert_eq!(x, vec![ratio(3, 4), ratio(1, 2), ratio(1, 4)]);

        let b = vec![ratio(7, 3), rat(-5)];
        assert_eq!(solve_rational(&RatMatrix::identity(2), &b).unwrap(), b);
    }

    #[test]
    fn solve_singular_is_an_error() {
        let m = q(&[&[-2, 1, 0], &[1, -1, 1], &[0, 1, -2]]).to_rational();
        assert_eq!(solve_rational(&m, &[rat(0), rat(0), rat(1)]), Err(Error::Singular));
    }

    #[test]
    fn definiteness_examples() {
        assert!(is_negative_definite(&q(&[&[-1]])).unwrap());
        assert!(!is_negative_definite(&q(&[&[0]])).unwrap());
        assert!(is_negative_definite(&q(&[&[-2, 1, 0], &[1, -2, 1], &[0, 1, -2]])).unwrap());
        // [1,2,1] fiber: semidefinite, not definite
        let fiber = q(&[&[-1, 1, 0], &[1, -2, 1], &[0, 1, -1]]);
        assert!(!is_negative_definite(&fiber).unwrap());
        assert_eq!(negative_semidefinite_rank(&fiber).unwrap(), Some(2));
        assert_eq!(is_negative_definite(&q(&[&[-2, 1], &[0, -2]])), Err(Error::NotSymmetric));
    }

    #[test]
    fn semidefinite_detects_indefinite() {
        assert_eq!(negative_semidefinite_rank(&q(&[&[1]])).unwrap(), None);
        assert_eq!(negative_semidefinite_rank(&q(&[&[0, 1], &[1, 0]])).unwrap(), None);
        assert_eq!(negative_semidefinite_rank(&q(&[&[0]])).unwrap(), Some(0));
    }

    #[test]
    fn nullspace_of_fiber_is_multiplicity_vector() {
        let m = q(&[&[-2, 1, 0], &[1, -1, 1], &[0, 1, -2]]).to_rational();
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        let v = primitive_integer_vector(&ns[0]);
        let v: Vec<i64> = v.iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert!(v == vec![1, 2, 1] || v == vec![-1, -2, -1]);
    }

    #[test]
    fn leading_minors() {
        let m = q(&[&[-2, 1, 0], &[1, -2, 1], &[0, 1, -2]]);
        let minors: Vec<i64> =
            leading_minors_negated(&m).unwrap().iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert_eq!(minors, vec![2, 3, 4]);
    }
}
