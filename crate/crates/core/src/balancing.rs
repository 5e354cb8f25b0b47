//! Max-balancing: a diagonal similarity after which every edge lies on a
//! cycle whose other edges are at least as heavy.

use std::cmp::Ordering;

use crate::digraph::{digraph_of, scc, Digraph};
use crate::error::{Error, Result};
use crate::matrix::{MaxMatrix, MaxVector};
use crate::scaling::{apply_scaling, fp_scaling, DiagonalScaling};
use crate::scalar::Scalar;
use crate::spectral::{critical_graph, normalize_any};

/// Largest size accepted by the exhaustive cut check.
pub const MAX_CUT_NODES: usize = 14;

/// Sizes up to which [`max_balance`] also runs the cut check.
const CERTIFY_CUTS_UP_TO: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceProperty {
    CycleCover,
    Cut,
}

impl BalanceProperty {
    pub fn name(self) -> &'static str {
        match self {
            BalanceProperty::CycleCover => "cycle-cover",
            BalanceProperty::Cut => "cut",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalancingCertificate<S> {
    pub scaling: DiagonalScaling<S>,
    pub balanced: MaxMatrix<S>,
    /// Properties verified on `balanced` before returning.
    pub checked: Vec<BalanceProperty>,
    /// The successive cycle means frozen by the contraction, decreasing.
    pub levels: Vec<S>,
}

/// Computes a max-balancing scaling by repeated contraction of critical
/// components.
///
/// Each round works on the matrix of clusters (largest entry between two
/// clusters, zero inside), scales it with the FP scaling of its normalized
/// form so that the critical edges sit exactly at the current level, and
/// merges every critical component into one cluster. The scaling of a round
/// is applied uniformly inside each cluster, so frozen entries never move.
///
/// Requires every edge to lie on a cycle (irreducible matrices and direct
/// sums of them); otherwise [`Error::NotIrreducible`].
pub fn max_balance<S: Scalar>(a: &MaxMatrix<S>) -> Result<BalancingCertificate<S>> {
    a.require_square()?;
    let n = a.n();
    let g = digraph_of(a);
    let dec = scc(&g);
    if g.edges().any(|(i, j, _)| dec.component_of[i] != dec.component_of[j]) {
        return Err(Error::NotIrreducible);
    }
    let tol = a.tol();
    let mut x = vec![S::one(); n];
    let mut cluster_of: Vec<usize> = (0..n).collect();
    let mut clusters = n;
    let mut levels = Vec::new();
    loop {
        let b = apply_scaling(a, &DiagonalScaling::new(MaxVector::new(x.clone()))?)?;
        let mut c = MaxMatrix::<S>::zeros(clusters, clusters).with_tol(tol);
        let mut has_edge = false;
        for (i, j, v) in b.entries() {
            let (p, q) = (cluster_of[i], cluster_of[j]);
            if p != q && !v.is_zero() {
                has_edge = true;
                if c.cmp(v, c.get(p, q)) == Ordering::Greater {
                    c.set(p, q, v.clone());
                }
            }
        }
        if !has_edge {
            break;
        }
        let (normalized, _, level) = normalize_any(&c)?;
        let y = fp_scaling(&normalized)?;
        for (xi, &p) in x.iter_mut().zip(&cluster_of) {
            *xi = xi.mul(y.vector().get(p));
        }
        let crit = critical_graph(&normalized)?;
        levels.push(level);

        let mut merged = vec![usize::MAX; clusters];
        let mut next = 0;
        for comp in &crit.components {
            for &p in comp {
                merged[p] = next;
            }
            next += 1;
        }
        for m in merged.iter_mut().filter(|m| **m == usize::MAX) {
            *m = next;
            next += 1;
        }
        for p in cluster_of.iter_mut() {
            *p = merged[*p];
        }
        clusters = next;
    }

    let scaling = DiagonalScaling::new(MaxVector::new(x))?;
    let balanced = apply_scaling(a, &scaling)?;
    if !is_max_balanced_cyclecover(&balanced) {
        return Err(Error::CertificationFailure(
            "balanced matrix fails the cycle-cover property".into(),
        ));
    }
    let mut checked = vec![BalanceProperty::CycleCover];
    if n <= CERTIFY_CUTS_UP_TO {
        if !is_max_balanced_cut(&balanced)? {
            return Err(Error::CertificationFailure(
                "balanced matrix fails the cut property".into(),
            ));
        }
        checked.push(BalanceProperty::Cut);
    }
    Ok(BalancingCertificate {
        scaling,
        balanced,
        checked,
        levels,
    })
}

/// Whether every edge `(i,j)` closes a cycle on which it has minimal weight:
/// `i` is reachable from `j` through edges of weight at least `bᵢⱼ`.
pub fn is_max_balanced_cyclecover<S: Scalar>(b: &MaxMatrix<S>) -> bool {
    if !b.is_square() {
        return false;
    }
    let g = digraph_of(b);
    b.entries().all(|(i, j, w)| {
        if w.is_zero() || i == j {
            return true;
        }
        reaches_at_level(&g, b, j, i, w)
    })
}

fn reaches_at_level<S: Scalar>(g: &Digraph<S>, b: &MaxMatrix<S>, from: usize, to: usize, level: &S) -> bool {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        for (u, w) in g.successors(v).map(|u| (u, b.get(v, u))) {
            if !seen[u] && b.cmp(w, level) != Ordering::Less {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    false
}

/// Whether for every nonempty proper node set `M` the heaviest edge leaving
/// `M` weighs the same as the heaviest edge entering it. Exhaustive over all
/// cuts, so limited to [`MAX_CUT_NODES`] nodes.
pub fn is_max_balanced_cut<S: Scalar>(b: &MaxMatrix<S>) -> Result<bool> {
    b.require_square()?;
    let n = b.n();
    if n > MAX_CUT_NODES {
        return Err(Error::SizeLimit {
            n,
            limit: MAX_CUT_NODES,
        });
    }
    let edges: Vec<(usize, usize, &S)> = b
        .entries()
        .filter(|(i, j, v)| i != j && !v.is_zero())
        .collect();
    // Fixing node 0 outside M visits each unordered cut once; the condition
    // is symmetric in M and its complement.
    for mask in 1u32..(1u32 << n.saturating_sub(1)) {
        let inside = |v: usize| v > 0 && mask & (1 << (v - 1)) != 0;
        let mut out = S::zero();
        let mut back = S::zero();
        for &(i, j, v) in &edges {
            match (inside(i), inside(j)) {
                (true, false) => out = out.max_of(v, b.tol()),
                (false, true) => back = back.max_of(v, b.tol()),
                _ => {}
            }
        }
        if !b.eq_scalar(&out, &back) {
            return Ok(false);
        }
    }
    Ok(true)
}
