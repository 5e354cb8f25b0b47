//! Commuting matrices: commutation test, common positive eigenvectors,
//! Boolean saturation pairs and the cycle theorem for commuting digraphs.

use crate::digraph::{find_cycle_within, is_irreducible, scc, Digraph};
use crate::error::{Error, Result};
use crate::matrix::{MaxMatrix, MaxVector};
use crate::scaling::{is_fp_scaling, saturation_graph, DiagonalScaling};
use crate::scalar::Scalar;
use crate::spectral::{critical_basis, critical_graph, is_eigenvector, max_cycle_gmean, normalize_any};

/// Whether `A ⊗ B = B ⊗ A` under the matrices' mode.
pub fn commutes<S: Scalar>(a: &MaxMatrix<S>, b: &MaxMatrix<S>) -> Result<bool> {
    a.require_square()?;
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.otimes(b)?.approx_eq(&b.otimes(a)?))
}

/// A positive common eigenvector with both eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct CommonEigenvector<S> {
    pub x: MaxVector<S>,
    pub lambda_a: S,
    pub lambda_b: S,
}

/// Finds a positive `x` with `A ⊗ x = λ(A) x` and `B ⊗ x = λ(B) x` for
/// commuting `A, B`, at least one of them irreducible.
///
/// With `V` the critical basis of the irreducible matrix `Ã`, the action
/// of `B̃` on its eigenspace is `K = V \ (B̃ ⊗ V)`; an eigenvector `z` of `K`
/// gives `x = V ⊗ z`. When that `x` is not positive and both matrices are
/// irreducible, a periodic sum of `B̃ᵗ ⊗ v` over a period is used instead.
pub fn common_eigenvector<S: Scalar>(a: &MaxMatrix<S>, b: &MaxMatrix<S>) -> Result<CommonEigenvector<S>> {
    if !commutes(a, b)? {
        return Err(Error::NotCommuting);
    }
    let (irr, other, swapped) = if is_irreducible(a) {
        (a, b, false)
    } else if is_irreducible(b) {
        (b, a, true)
    } else {
        return Err(Error::NotIrreducible);
    };
    let (irr_n, _, irr_lambda) = normalize_any(irr)?;
    let other_mean = max_cycle_gmean(other)?;
    let x = if other_mean.is_zero() {
        // A nilpotent partner annihilates positive vectors only when zero.
        principal_of(&irr_n)?
    } else {
        let (other_n, _, _) = normalize_any(other)?;
        match via_residual(&irr_n, &other_n)? {
            Some(x) => x,
            None if is_irreducible(other) => via_periodic_sum(&irr_n, &other_n)?,
            None => {
                return Err(Error::CertificationFailure(
                    "no positive vector in the invariant eigenspace".into(),
                ))
            }
        }
    };
    let other_lambda = other_mean.value().ok_or_else(|| {
        Error::ExactnessUnavailable("eigenvalue of the second matrix is irrational".into())
    })?;
    let (lambda_a, lambda_b) = if swapped {
        (other_lambda, irr_lambda)
    } else {
        (irr_lambda, other_lambda)
    };
    if !x.is_positive() || !is_eigenvector(a, &x, &lambda_a) || !is_eigenvector(b, &x, &lambda_b) {
        return Err(Error::CertificationFailure(
            "common eigenvector failed verification".into(),
        ));
    }
    Ok(CommonEigenvector { x, lambda_a, lambda_b })
}

fn principal_of<S: Scalar>(normalized: &MaxMatrix<S>) -> Result<MaxVector<S>> {
    let crit = critical_graph(normalized)?;
    let basis = critical_basis(normalized, &crit)?;
    Ok(oplus_all(basis, normalized.tol()))
}

fn oplus_all<S: Scalar>(vs: Vec<MaxVector<S>>, tol: f64) -> MaxVector<S> {
    let mut iter = vs.into_iter();
    let first = iter.next().expect("at least one vector");
    iter.fold(first, |acc, v| acc.oplus(&v, tol))
}

fn columns_to_matrix<S: Scalar>(cols: &[MaxVector<S>], tol: f64) -> MaxMatrix<S> {
    let n = cols[0].len();
    MaxMatrix::from_fn(n, cols.len(), |i, j| cols[j].get(i).clone()).with_tol(tol)
}

fn via_residual<S: Scalar>(a_n: &MaxMatrix<S>, b_n: &MaxMatrix<S>) -> Result<Option<MaxVector<S>>> {
    let tol = a_n.tol();
    let crit = critical_graph(a_n)?;
    let v = columns_to_matrix(&critical_basis(a_n, &crit)?, tol);
    let bv = b_n.otimes(&v)?;
    let k = v.left_residual(&bv)?;
    if !v.otimes(&k)?.approx_eq(&bv) {
        return Err(Error::CertificationFailure(
            "eigenspace is not invariant under the second matrix".into(),
        ));
    }
    let Ok((k_n, _, _)) = normalize_any(&k) else {
        return Ok(None);
    };
    let k_crit = critical_graph(&k_n)?;
    let z = oplus_all(critical_basis(&k_n, &k_crit)?, tol);
    let x = v.apply(&z)?;
    Ok(x.is_positive().then_some(x))
}

fn via_periodic_sum<S: Scalar>(a_n: &MaxMatrix<S>, b_n: &MaxMatrix<S>) -> Result<MaxVector<S>> {
    let tol = a_n.tol();
    let start = principal_of(a_n)?;
    let gamma = critical_graph(b_n)?.cyclicity;
    // B̃ᵗ v stays in the eigencone of Ã and is eventually periodic; the sum
    // over one period is then fixed by B̃.
    let mut y = start;
    let limit = 8 * b_n.n() * b_n.n() + 8 * gamma;
    for _ in 0..limit {
        let mut sum = y.clone();
        let mut z = y.clone();
        for _ in 1..gamma {
            z = b_n.apply(&z)?;
            sum = sum.oplus(&z, tol);
        }
        if b_n.apply(&sum)?.approx_eq(&sum, tol) {
            return Ok(sum);
        }
        y = b_n.apply(&y)?;
    }
    Err(Error::IterationBudget { budget: limit })
}

/// Boolean matrices of the saturation graphs of `A/λ(A)` and `B/λ(B)` at a
/// common eigenvector.
#[derive(Clone, Debug, PartialEq)]
pub struct BooleanDigraphPair {
    pub g1: Digraph,
    pub g2: Digraph,
    /// Whether the Boolean products agree.
    pub commuting: bool,
}

impl BooleanDigraphPair {
    pub fn n(&self) -> usize {
        self.g1.n()
    }
}

fn boolean_product(g: &Digraph, h: &Digraph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut out = vec![vec![false; n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for k in g.successors(i) {
            for j in h.successors(k) {
                row[j] = true;
            }
        }
    }
    out
}

/// Whether `G ⊗ H = H ⊗ G` as Boolean matrices.
pub fn boolean_commute(g: &Digraph, h: &Digraph) -> bool {
    g.n() == h.n() && boolean_product(g, h) == boolean_product(h, g)
}

pub fn boolean_saturation_pair<S: Scalar>(
    a: &MaxMatrix<S>,
    b: &MaxMatrix<S>,
    x: &MaxVector<S>,
) -> Result<BooleanDigraphPair> {
    let scaling = DiagonalScaling::new(x.clone())?;
    let mut graphs = Vec::with_capacity(2);
    for m in [a, b] {
        let (m_n, _, _) = normalize_any(m)?;
        if !is_eigenvector(&m_n, x, &S::one()) {
            return Err(Error::InvalidArgument(
                "x is not an eigenvector of both matrices".into(),
            ));
        }
        if !is_fp_scaling(&m_n, &scaling, false) {
            return Err(Error::NotAnFpScaling);
        }
        graphs.push(saturation_graph(&m_n, &scaling)?.graph);
    }
    let g2 = graphs.pop().expect("two graphs");
    let g1 = graphs.pop().expect("two graphs");
    let commuting = boolean_commute(&g1, &g2);
    Ok(BooleanDigraphPair { g1, g2, commuting })
}

/// Cycles guaranteed for commuting digraphs with positive out-degrees: a
/// cycle of `G1` inside the nontrivial components of `G2`, and vice versa.
/// Cycles are closed node lists.
pub fn commuting_cycle_witness(pair: &BooleanDigraphPair) -> Result<(Vec<usize>, Vec<usize>)> {
    if pair.g1.n() != pair.g2.n() {
        return Err(Error::DimensionMismatch("graphs of different sizes".into()));
    }
    for (idx, g) in [&pair.g1, &pair.g2].into_iter().enumerate() {
        if let Some(node) = (0..g.n()).find(|&v| g.out_degree(v) == 0) {
            return Err(Error::OutDegreeZero {
                graph: idx + 1,
                node,
            });
        }
    }
    if !boolean_commute(&pair.g1, &pair.g2) {
        return Err(Error::NotCommuting);
    }
    let find = |g: &Digraph, h: &Digraph, label: &str| {
        let allowed = scc(h).cyclic_nodes();
        find_cycle_within(g, &allowed).ok_or_else(|| {
            Error::WitnessNotFound(format!("no cycle of {label} inside the components of the other graph"))
        })
    };
    let c1 = find(&pair.g1, &pair.g2, "G1")?;
    let c2 = find(&pair.g2, &pair.g1, "G2")?;
    Ok((c1, c2))
}
