//! Dense matrices and vectors over the max-times semiring.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, DEFAULT_TOLERANCE};
use crate::spectral;

/// Tolerance attached to a carrier type by default: zero for exact carriers.
pub fn default_tol<S: Scalar>() -> f64 {
    if S::EXACT {
        0.0
    } else {
        DEFAULT_TOLERANCE
    }
}

/// A dense `rows × cols` matrix over the max-times semiring.
///
/// The numeric mode is the carrier type `S` together with the comparison
/// tolerance `tol` (always zero for exact carriers). Binary operations require
/// both operands to share the mode.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
    tol: f64,
}

/// A column vector over the max-times semiring.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxVector<S> {
    data: Vec<S>,
}

impl<S: Scalar> MaxVector<S> {
    pub fn new(data: Vec<S>) -> Self {
        MaxVector { data }
    }

    pub fn ones(n: usize) -> Self {
        MaxVector {
            data: vec![S::one(); n],
        }
    }

    pub fn zeros(n: usize) -> Self {
        MaxVector {
            data: vec![S::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<S> {
        self.data
    }

    pub fn get(&self, i: usize) -> &S {
        &self.data[i]
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|v| !v.is_zero())
    }

    pub fn oplus(&self, other: &Self, tol: f64) -> Self {
        MaxVector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.max_of(b, tol))
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        MaxVector {
            data: self.data.iter().map(|v| v.mul(c)).collect(),
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.cmp_tol(b, tol) == Ordering::Equal)
    }

    /// Whether `self = c · other` for some positive scalar `c`.
    pub fn proportional_to(&self, other: &Self, tol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let Some(k) = (0..self.len()).find(|&i| !other.data[i].is_zero()) else {
            return self.data.iter().all(Scalar::is_zero);
        };
        if self.data[k].is_zero() {
            return false;
        }
        let c = self.data[k].div(&other.data[k]);
        self.approx_eq(&other.scale(&c), tol)
    }
}

impl<S: Scalar> MaxMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MaxMatrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
            tol: default_tol::<S>(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        MaxMatrix {
            rows,
            cols,
            data,
            tol: default_tol::<S>(),
        }
    }

    /// Builds a matrix from rows, validating shape and entries.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            for (j, v) in row.into_iter().enumerate() {
                if !v.is_valid() {
                    return Err(Error::InvalidEntry { row: i, col: j });
                }
                data.push(v);
            }
        }
        Ok(MaxMatrix {
            rows: r,
            cols: c,
            data,
            tol: default_tol::<S>(),
        })
    }

    /// Diagonal matrix with the given diagonal.
    pub fn diagonal(d: &[S]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { S::zero() })
    }

    /// Sets the comparison tolerance. Exact carriers always keep zero.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = if S::EXACT { 0.0 } else { tol };
        self
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Dimension of a square matrix.
    pub fn n(&self) -> usize {
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> MaxVector<S> {
        MaxVector::new((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        let cols = self.cols;
        self.data
            .iter()
            .enumerate()
            .map(move |(k, v)| (k / cols, k % cols, v))
    }

    pub fn map(&self, mut f: impl FnMut(usize, usize, &S) -> S) -> Self {
        let mut out = Self::from_fn(self.rows, self.cols, |i, j| f(i, j, self.get(i, j)));
        out.tol = self.tol;
        out
    }

    /// Compares two scalars under this matrix's mode.
    pub fn cmp(&self, a: &S, b: &S) -> Ordering {
        a.cmp_tol(b, self.tol)
    }

    pub fn eq_scalar(&self, a: &S, b: &S) -> bool {
        self.cmp(a, b) == Ordering::Equal
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    fn require_same_mode(&self, other: &Self) -> Result<()> {
        if self.tol != other.tol {
            return Err(Error::ModeMismatch {
                left: self.tol,
                right: other.tol,
            });
        }
        Ok(())
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        self.require_same_mode(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Entrywise maximum `A ⊕ B`.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        Ok(self.map(|i, j, a| a.max_of(other.get(i, j), self.tol)))
    }

    /// Max-times product `(A ⊗ B)ᵢⱼ = maxₖ aᵢₖ bₖⱼ`.
    pub fn otimes(&self, other: &Self) -> Result<Self> {
        self.require_same_mode(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.otimes_unchecked(other))
    }

    pub(crate) fn otimes_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        out.tol = self.tol;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let p = a.mul(b);
                    let slot = &mut out.data[i * other.cols + j];
                    if p.cmp_tol(slot, self.tol) == Ordering::Greater {
                        *slot = p;
                    }
                }
            }
        }
        out
    }

    /// `A ⊗ x`.
    pub fn apply(&self, x: &MaxVector<S>) -> Result<MaxVector<S>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to a vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(MaxVector::new(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(x.as_slice())
                        .fold(S::zero(), |acc, (a, b)| acc.max_of(&a.mul(b), self.tol))
                })
                .collect(),
        ))
    }

    /// `Aᵗ` for `t ≥ 1`, by binary powering.
    pub fn power(&self, t: usize) -> Result<Self> {
        self.require_square()?;
        if t == 0 {
            return Err(Error::InvalidArgument("matrix power requires t >= 1".into()));
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = t;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.otimes_unchecked(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.otimes_unchecked(&base);
        }
        Ok(result.expect("t >= 1"))
    }

    /// Multiplies every entry by `c`.
    pub fn scale(&self, c: &S) -> Self {
        self.map(|_, _, a| a.mul(c))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone());
        out.tol = self.tol;
        out
    }

    /// Kleene star `A* = I ⊕ A ⊕ A² ⊕ …`.
    ///
    /// Converges iff every cycle of the digraph has weight at most 1; then it
    /// equals `I ⊕ A ⊕ … ⊕ Aⁿ⁻¹`. Otherwise [`Error::Divergent`] carries a
    /// cycle of weight greater than 1.
    pub fn kleene_star(&self) -> Result<Self> {
        self.require_square()?;
        let mean = spectral::max_cycle_gmean(self)?;
        if mean.cmp_unit(self.tol) == Ordering::Greater {
            return Err(Error::Divergent {
                cycle: mean.witness.clone(),
            });
        }
        Ok(self.closure_unchecked())
    }

    /// Floyd–Warshall closure; only meaningful when no cycle exceeds 1.
    pub(crate) fn closure_unchecked(&self) -> Self {
        let n = self.rows;
        let mut k_mat = self.clone();
        for k in 0..n {
            for i in 0..n {
                let ik = k_mat.get(i, k).clone();
                if ik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let kj = k_mat.get(k, j);
                    if kj.is_zero() {
                        continue;
                    }
                    let p = ik.mul(kj);
                    if p.cmp_tol(k_mat.get(i, j), self.tol) == Ordering::Greater {
                        k_mat.set(i, j, p);
                    }
                }
            }
        }
        for i in 0..n {
            let d = k_mat.get(i, i).max_of(&S::one(), self.tol);
            k_mat.set(i, i, d);
        }
        k_mat
    }

    /// Entrywise quotient `B / C` with the convention `0/0 = 0`.
    pub fn entrywise_div(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        for (i, j, b) in self.entries() {
            if !b.is_zero() && other.get(i, j).is_zero() {
                return Err(Error::UndefinedDivision { row: i, col: j });
            }
        }
        Ok(self.map(|i, j, b| {
            let c = other.get(i, j);
            if c.is_zero() {
                S::zero()
            } else {
                b.div(c)
            }
        }))
    }

    /// Greatest `X` with `V ⊗ X ≤ W` (`self` is `V`):
    /// `Xᵢⱼ = minₖ { wₖⱼ / vₖᵢ : vₖᵢ > 0 }`.
    pub fn left_residual(&self, w: &Self) -> Result<Self> {
        self.require_same_mode(w)?;
        if self.rows != w.rows {
            return Err(Error::DimensionMismatch(format!(
                "residual of {}x{} by {}x{}",
                self.rows, self.cols, w.rows, w.cols
            )));
        }
        for i in 0..self.cols {
            if (0..self.rows).all(|k| self.get(k, i).is_zero()) {
                return Err(Error::NoConstraint { column: i });
            }
        }
        let mut out = Self::from_fn(self.cols, w.cols, |i, j| {
            let mut best: Option<S> = None;
            for k in 0..self.rows {
                let v = self.get(k, i);
                if v.is_zero() {
                    continue;
                }
                let q = w.get(k, j).div(v);
                best = Some(match best {
                    Some(b) if b.cmp_tol(&q, self.tol) != Ordering::Greater => b,
                    _ => q,
                });
            }
            best.expect("column checked nonzero")
        });
        out.tol = self.tol;
        Ok(out)
    }

    /// Entrywise `self ≤ other` under the mode.
    pub fn le(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.cmp_tol(b, self.tol) != Ordering::Greater)
    }

    /// Entrywise equality under the mode (exact for exact carriers).
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.cmp_tol(b, self.tol) == Ordering::Equal)
    }

    /// The submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        });
        out.tol = self.tol;
        out
    }

    /// Embeds `self` (indexed by `rows × cols`) into an `n × m` zero matrix.
    pub fn embed(&self, n: usize, m: usize, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(n, m);
        out.tol = self.tol;
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(i, j, self.get(a, b).clone());
            }
        }
        out
    }

    /// Whether every positive entry of `self` is positive in `other`.
    pub fn pattern_within(&self, other: &Self) -> Option<(usize, usize)> {
        self.entries()
            .find(|(i, j, a)| !a.is_zero() && other.get(*i, *j).is_zero())
            .map(|(i, j, _)| (i, j))
    }

    pub fn max_entry(&self) -> S {
        self.data
            .iter()
            .fold(S::zero(), |acc, v| acc.max_of(v, self.tol))
    }
}

impl<S: Scalar> fmt::Display for MaxMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Scalar::to_token).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
