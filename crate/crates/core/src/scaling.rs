//! Diagonal similarity scalings: FP and strong FP scalings, saturation
//! graphs, the row/column-maxima and sandwich problems, and the diagonal
//! dominance test for real matrices.

use std::cmp::Ordering;

use rand::Rng;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::matrix::{MaxMatrix, MaxVector};
use crate::scalar::{Rational, Scalar};
use crate::spectral::max_cycle_gmean;

/// A strictly positive vector `x` defining the similarity `X⁻¹AX`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalScaling<S> {
    x: MaxVector<S>,
}

impl<S: Scalar> DiagonalScaling<S> {
    pub fn new(x: MaxVector<S>) -> Result<Self> {
        if !x.is_positive() {
            return Err(Error::NotPositive);
        }
        Ok(DiagonalScaling { x })
    }

    pub fn identity(n: usize) -> Self {
        DiagonalScaling {
            x: MaxVector::ones(n),
        }
    }

    pub fn vector(&self) -> &MaxVector<S> {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn inverse(&self) -> Self {
        DiagonalScaling {
            x: MaxVector::new(self.x.as_slice().iter().map(Scalar::inv).collect()),
        }
    }

    /// Componentwise product: applying `self` then `other` equals applying
    /// the composition.
    pub fn compose(&self, other: &Self) -> Self {
        DiagonalScaling {
            x: MaxVector::new(
                self.x
                    .as_slice()
                    .iter()
                    .zip(other.x.as_slice())
                    .map(|(a, b)| a.mul(b))
                    .collect(),
            ),
        }
    }

    /// Multiplies all coordinates by one positive constant.
    pub fn rescale(&self, c: &S) -> Self {
        DiagonalScaling { x: self.x.scale(c) }
    }
}

/// `X⁻¹AX`: `bᵢⱼ = xᵢ⁻¹ aᵢⱼ xⱼ`.
pub fn apply_scaling<S: Scalar>(a: &MaxMatrix<S>, x: &DiagonalScaling<S>) -> Result<MaxMatrix<S>> {
    a.require_square()?;
    if x.len() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "scaling of length {} for a {}x{} matrix",
            x.len(),
            a.n(),
            a.n()
        )));
    }
    let v = x.vector().as_slice();
    Ok(a.map(|i, j, e| {
        if e.is_zero() {
            S::zero()
        } else {
            e.mul(&v[j]).div(&v[i])
        }
    }))
}

/// An FP scaling `x = A* ⊗ (1,…,1)`, which exists iff every cycle weight is
/// at most 1.
pub fn fp_scaling<S: Scalar>(a: &MaxMatrix<S>) -> Result<DiagonalScaling<S>> {
    a.require_square()?;
    let mean = max_cycle_gmean(a)?;
    if mean.cmp_unit(a.tol()) == Ordering::Greater {
        return Err(Error::NoScaling {
            cycle: mean.witness,
            reason: "a cycle has weight greater than 1".into(),
        });
    }
    let star = a.closure_unchecked();
    let x = star.apply(&MaxVector::ones(a.n()))?;
    DiagonalScaling::new(x)
}

/// A strong FP scaling (all scaled positive entries `< 1`), which exists iff
/// every cycle weight is below 1.
///
/// Uses the ordinary row sums of `A*`. Carriers without an ordinary sum use
/// `(A/ρ)* ⊗ (1,…,1)` with `ρ = λ(A) < 1` instead, which bounds every
/// scaled entry by `ρ`.
pub fn strong_fp_scaling<S: Scalar>(a: &MaxMatrix<S>) -> Result<DiagonalScaling<S>> {
    a.require_square()?;
    let n = a.n();
    let mean = max_cycle_gmean(a)?;
    if mean.cmp_unit(a.tol()) != Ordering::Less {
        return Err(Error::NoScaling {
            cycle: mean.witness,
            reason: "a cycle has weight at least 1".into(),
        });
    }
    let star = a.closure_unchecked();
    let sums: Option<Vec<S>> = (0..n)
        .map(|i| {
            star.row(i)
                .iter()
                .try_fold(S::zero(), |acc, v| {
                    if acc.is_zero() {
                        Some(v.clone())
                    } else if v.is_zero() {
                        Some(acc)
                    } else {
                        acc.ordinary_add(v)
                    }
                })
        })
        .collect();
    if let Some(x) = sums {
        return DiagonalScaling::new(MaxVector::new(x));
    }
    // With an acyclic digraph any ρ < 1 works.
    let rho = if mean.is_zero() {
        half_of_unit::<S>()
    } else {
        mean.value().ok_or_else(|| {
            Error::ExactnessUnavailable("strong scaling needs a representable cycle mean".into())
        })?
    };
    let shifted = a.scale(&rho.inv()).closure_unchecked();
    DiagonalScaling::new(shifted.apply(&MaxVector::ones(n))?)
}

fn half_of_unit<S: Scalar>() -> S {
    // Any element strictly below 1: parse it in the carrier's own notation.
    match S::DOMAIN {
        crate::scalar::Domain::MaxTimes => S::parse_token("1/2").expect("1/2"),
        crate::scalar::Domain::MaxPlus => S::parse_token("-1").expect("-1"),
    }
}

/// Whether `xᵢ⁻¹ aᵢⱼ xⱼ ≤ 1` everywhere (or `< 1` on positive entries when
/// `strict`).
pub fn is_fp_scaling<S: Scalar>(a: &MaxMatrix<S>, x: &DiagonalScaling<S>, strict: bool) -> bool {
    let Ok(b) = apply_scaling(a, x) else {
        return false;
    };
    let one = S::one();
    let ok = b.entries().all(|(_, _, v)| {
        if v.is_zero() {
            return true;
        }
        match b.cmp(v, &one) {
            Ordering::Less => true,
            Ordering::Equal => !strict,
            Ordering::Greater => false,
        }
    });
    ok
}

/// Edges where an FP scaling attains equality `xᵢ⁻¹ aᵢⱼ xⱼ = 1`.
///
/// In float mode equality is decided with the matrix tolerance, so the
/// graph depends on it.
#[derive(Clone, Debug, PartialEq)]
pub struct SaturationGraph {
    pub graph: Digraph,
}

impl SaturationGraph {
    /// Boolean adjacency matrix.
    pub fn boolean_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.graph.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.graph.has_edge(i, j)).collect())
            .collect()
    }
}

pub fn saturation_graph<S: Scalar>(a: &MaxMatrix<S>, x: &DiagonalScaling<S>) -> Result<SaturationGraph> {
    if !is_fp_scaling(a, x, false) {
        return Err(Error::NotAnFpScaling);
    }
    let b = apply_scaling(a, x)?;
    let one = S::one();
    let mut g = Digraph::new(a.n());
    for (i, j, v) in b.entries() {
        if !v.is_zero() && b.eq_scalar(v, &one) {
            g.add_edge(i, j, ());
        }
    }
    Ok(SaturationGraph { graph: g })
}

/// The solution set `{Q* ⊗ u : u > 0}` of a scaling problem stated as
/// `Q ⊗ x ≤ x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFamily<S> {
    pub q: MaxMatrix<S>,
    pub q_star: MaxMatrix<S>,
}

impl<S: Scalar> ScalingFamily<S> {
    fn from_constraints(q: MaxMatrix<S>) -> Result<Self> {
        let mean = max_cycle_gmean(&q)?;
        if mean.cmp_unit(q.tol()) == Ordering::Greater {
            return Err(Error::NoScaling {
                cycle: mean.witness,
                reason: "the constraint matrix has a cycle of weight greater than 1".into(),
            });
        }
        let q_star = q.closure_unchecked();
        Ok(ScalingFamily { q, q_star })
    }

    /// `Q* ⊗ u` for a positive `u`.
    pub fn sample(&self, u: &MaxVector<S>) -> Result<DiagonalScaling<S>> {
        if !u.is_positive() {
            return Err(Error::NotPositive);
        }
        DiagonalScaling::new(self.q_star.apply(u)?)
    }

    /// The sample with `u = (1,…,1)`.
    pub fn canonical(&self) -> DiagonalScaling<S> {
        self.sample(&MaxVector::ones(self.q.n()))
            .expect("Q* has a unit diagonal")
    }

    pub fn sample_random<R: Rng + ?Sized>(&self, rng: &mut R) -> DiagonalScaling<S> {
        let u = MaxVector::new((0..self.q.n()).map(|_| S::random_positive(rng)).collect());
        self.sample(&u).expect("random vectors are positive")
    }

    /// Whether `x` satisfies `Q ⊗ x ≤ x`.
    pub fn contains(&self, x: &DiagonalScaling<S>) -> bool {
        match self.q.apply(x.vector()) {
            Ok(qx) => qx
                .as_slice()
                .iter()
                .zip(x.vector().as_slice())
                .all(|(l, r)| l.cmp_tol(r, self.q.tol()) != Ordering::Greater),
            Err(_) => false,
        }
    }
}

/// All scalings `B = X⁻¹AX` with `bᵢᵢ = maxⱼ bᵢⱼ = maxⱼ bⱼᵢ`, described by
/// `Q = AD⁻¹ ⊕ D⁻¹A` with `D = diag(a₁₁,…,aₙₙ)`.
pub fn row_col_maxima_scalings<S: Scalar>(a: &MaxMatrix<S>) -> Result<ScalingFamily<S>> {
    a.require_square()?;
    let n = a.n();
    let diag: Vec<S> = (0..n).map(|i| a.get(i, i).clone()).collect();
    if let Some(index) = diag.iter().position(Scalar::is_zero) {
        return Err(Error::ZeroDiagonal { index });
    }
    let q = a.map(|i, j, e| {
        if e.is_zero() {
            S::zero()
        } else {
            e.div(&diag[j]).max_of(&e.div(&diag[i]), a.tol())
        }
    });
    ScalingFamily::from_constraints(q)
}

/// Whether `B = X⁻¹AX` has equal row maxima, column maxima and diagonal.
pub fn has_equal_row_col_maxima<S: Scalar>(b: &MaxMatrix<S>) -> bool {
    let n = b.n();
    (0..n).all(|i| {
        let d = b.get(i, i);
        let row_max = b.row(i).iter().fold(S::zero(), |m, v| m.max_of(v, b.tol()));
        let col_max = (0..n).fold(S::zero(), |m, k| m.max_of(b.get(k, i), b.tol()));
        b.eq_scalar(d, &row_max) && b.eq_scalar(d, &col_max)
    })
}

/// A sandwich constraint `lower ≤ X⁻¹ middle X ≤ upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct SandwichTriple<S> {
    pub lower: MaxMatrix<S>,
    pub middle: MaxMatrix<S>,
    pub upper: MaxMatrix<S>,
}

/// All `X` with `Aᵢ ≤ X⁻¹BᵢX ≤ Cᵢ` for every triple, via
/// `Q = ⊕ Bᵢ/Cᵢ ⊕ ⊕ Aᵢᵀ/Bᵢᵀ`. Requires `𝒢(Aᵢ) ⊆ 𝒢(Bᵢ) ⊆ 𝒢(Cᵢ)`.
pub fn sandwich_scalings<S: Scalar>(triples: &[SandwichTriple<S>]) -> Result<ScalingFamily<S>> {
    let first = triples
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one triple is required".into()))?;
    first.middle.require_square()?;
    let n = first.middle.n();
    let mut q = MaxMatrix::<S>::zeros(n, n).with_tol(first.middle.tol());
    for (t, triple) in triples.iter().enumerate() {
        for m in [&triple.lower, &triple.middle, &triple.upper] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "triple {t} has a {}x{} matrix, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        if let Some((row, col)) = triple.lower.pattern_within(&triple.middle) {
            return Err(Error::PatternViolation {
                triple: t,
                row,
                col,
                detail: "lower bound has an edge outside the middle matrix".into(),
            });
        }
        if let Some((row, col)) = triple.middle.pattern_within(&triple.upper) {
            return Err(Error::PatternViolation {
                triple: t,
                row,
                col,
                detail: "middle matrix has an edge outside the upper bound".into(),
            });
        }
        let upper_part = triple.middle.entrywise_div(&triple.upper)?;
        let lower_part = triple
            .lower
            .transpose()
            .entrywise_div(&triple.middle.transpose())?;
        q = q.oplus(&upper_part)?.oplus(&lower_part)?;
    }
    ScalingFamily::from_constraints(q)
}

/// Whether `Aᵢ ≤ X⁻¹BᵢX ≤ Cᵢ` holds for every triple.
pub fn satisfies_sandwich<S: Scalar>(triples: &[SandwichTriple<S>], x: &DiagonalScaling<S>) -> bool {
    triples.iter().all(|t| match apply_scaling(&t.middle, x) {
        Ok(b) => t.lower.le(&b) && b.le(&t.upper),
        Err(_) => false,
    })
}

/// Result of the diagonal dominance test on a real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HadamardCertificate<S> {
    /// Positive diagonal `D`.
    pub scaling: DiagonalScaling<S>,
    /// `|D⁻¹BD|`, entrywise absolute values.
    pub scaled_abs: MaxMatrix<S>,
}

/// Absolute values of real entries, into a max-times carrier.
pub trait AbsValue<S> {
    fn abs_value(&self) -> S;
}

impl AbsValue<Rational> for Rational {
    fn abs_value(&self) -> Rational {
        num_traits::Signed::abs(self)
    }
}

impl AbsValue<f64> for f64 {
    fn abs_value(&self) -> f64 {
        self.abs()
    }
}

/// Finds a positive diagonal `D` with `0 ≠ |cᵢᵢ| ≥ |cᵢⱼ|` for `C = D⁻¹BD`,
/// which exists iff every cyclic product satisfies
/// `|∏ b_{kᵢkᵢ₊₁}| ≤ |∏ b_{kᵢkᵢ}| ≠ 0`.
///
/// Builds `mᵢⱼ = |bᵢⱼ| / |bᵢᵢ|` off the diagonal and returns its FP
/// scaling. A violating cycle is reported through [`Error::HadamardFails`].
pub fn hadamard_scaling_test<S, T>(b: &[Vec<T>], tol: f64) -> Result<HadamardCertificate<S>>
where
    S: Scalar,
    T: AbsValue<S>,
{
    let n = b.len();
    if n < 2 {
        return Err(Error::InvalidArgument("the test needs n >= 2".into()));
    }
    if let Some(i) = b.iter().position(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("row {i} has the wrong length")));
    }
    let abs = MaxMatrix::from_fn(n, n, |i, j| b[i][j].abs_value()).with_tol(tol);
    if let Some(index) = (0..n).find(|&i| abs.get(i, i).is_zero()) {
        return Err(Error::ZeroDiagonal { index });
    }
    let m = abs.map(|i, j, e| {
        if i == j || e.is_zero() {
            S::zero()
        } else {
            e.div(abs.get(i, i))
        }
    });
    let scaling = match fp_scaling(&m) {
        Ok(d) => d,
        Err(Error::NoScaling { cycle, .. }) => return Err(Error::HadamardFails { cycle }),
        Err(e) => return Err(e),
    };
    let scaled_abs = apply_scaling(&abs, &scaling)?;
    Ok(HadamardCertificate { scaling, scaled_abs })
}

/// Condition 2 on `|D⁻¹BD|`: nonzero diagonal dominating its row.
pub fn is_row_diagonally_dominant<S: Scalar>(c_abs: &MaxMatrix<S>) -> bool {
    (0..c_abs.n()).all(|i| {
        let d = c_abs.get(i, i);
        !d.is_zero()
            && c_abs
                .row(i)
                .iter()
                .all(|v| c_abs.cmp(v, d) != Ordering::Greater)
    })
}
