//! Maximum cycle geometric mean, critical graph and eigenvectors.

use std::cmp::Ordering;

use crate::digraph::{digraph_of, find_cycle_within, graph_cyclicity, scc, Digraph};
use crate::error::{Error, Result};
use crate::matrix::{MaxMatrix, MaxVector};
use crate::scalar::Scalar;

/// The maximum cycle geometric mean `λ(A)`, kept as the (weight, length) pair
/// of a cycle attaining it so that no root has to be taken.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleMean<S> {
    /// Weight of the witness cycle (zero when the digraph is acyclic).
    pub weight: S,
    /// Length of the witness cycle (1 when acyclic).
    pub length: usize,
    /// Closed node list of a cycle attaining the mean; empty when acyclic.
    pub witness: Vec<usize>,
}

impl<S: Scalar> CycleMean<S> {
    pub fn zero() -> Self {
        CycleMean {
            weight: S::zero(),
            length: 1,
            witness: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.weight.is_zero()
    }

    /// `weight^(1/length)` when the carrier can represent it.
    pub fn value(&self) -> Option<S> {
        self.weight.root(self.length as u32)
    }

    pub fn cmp(&self, other: &Self, tol: f64) -> Ordering {
        S::cmp_mean(&self.weight, self.length, &other.weight, other.length, tol)
    }

    /// Compares the mean with the semiring unit.
    pub fn cmp_unit(&self, tol: f64) -> Ordering {
        S::cmp_mean(&self.weight, self.length, &S::one(), 1, tol)
    }

    /// `ln λ`, for reporting and bounds.
    pub fn ln(&self) -> f64 {
        self.weight.ln() / self.length as f64
    }
}

/// λ(A) by Karp's dynamic program in max-times form, with a witness cycle
/// recovered by backtracking. Acyclic digraphs give λ = 0.
pub fn max_cycle_gmean<S: Scalar>(a: &MaxMatrix<S>) -> Result<CycleMean<S>> {
    a.require_square()?;
    let n = a.n();
    let tol = a.tol();
    if n == 0 {
        return Ok(CycleMean::zero());
    }
    // walks[k][v]: greatest weight of a length-k walk ending at v (any start).
    let mut walks: Vec<Vec<S>> = vec![vec![S::one(); n]];
    let mut preds: Vec<Vec<usize>> = vec![vec![usize::MAX; n]];
    for k in 1..=n {
        let prev = &walks[k - 1];
        let mut cur = vec![S::zero(); n];
        let mut pred = vec![usize::MAX; n];
        for u in 0..n {
            if prev[u].is_zero() {
                continue;
            }
            for (v, slot) in cur.iter_mut().enumerate() {
                let e = a.get(u, v);
                if e.is_zero() {
                    continue;
                }
                let w = prev[u].mul(e);
                if w.cmp_tol(slot, tol) == Ordering::Greater {
                    *slot = w;
                    pred[v] = u;
                }
            }
        }
        walks.push(cur);
        preds.push(pred);
    }

    // λ = max_v min_k ((walks[n][v] / walks[k][v])^(1 / (n − k)))
    let mut best: Option<(usize, S, usize)> = None;
    for v in 0..n {
        let top = &walks[n][v];
        if top.is_zero() {
            continue;
        }
        let mut worst: Option<(S, usize)> = None;
        for (k, row) in walks.iter().enumerate().take(n) {
            if row[v].is_zero() {
                continue;
            }
            let cand = (top.div(&row[v]), n - k);
            let replace = match &worst {
                None => true,
                Some((w, l)) => S::cmp_mean(&cand.0, cand.1, w, *l, tol) == Ordering::Less,
            };
            if replace {
                worst = Some(cand);
            }
        }
        let (w, l) = worst.expect("walks[0] is positive");
        let replace = match &best {
            None => true,
            Some((_, bw, bl)) => S::cmp_mean(&w, l, bw, *bl, tol) == Ordering::Greater,
        };
        if replace {
            best = Some((v, w, l));
        }
    }
    let Some((v, w, l)) = best else {
        return Ok(CycleMean::zero());
    };

    // The optimal length-n walk into v contains a cycle of mean λ.
    let mut walk = vec![v];
    let mut cur = v;
    for k in (1..=n).rev() {
        cur = preds[k][cur];
        walk.push(cur);
    }
    walk.reverse();
    let mut found: Option<CycleMean<S>> = None;
    for cycle in cycles_on_walk(&walk) {
        let weight = cycle
            .windows(2)
            .fold(S::one(), |acc, e| acc.mul(a.get(e[0], e[1])));
        let length = cycle.len() - 1;
        if S::cmp_mean(&weight, length, &w, l, tol) != Ordering::Less
            && found
                .as_ref()
                .is_none_or(|f| S::cmp_mean(&weight, length, &f.weight, f.length, tol) == Ordering::Greater)
        {
            found = Some(CycleMean {
                weight,
                length,
                witness: cycle,
            });
        }
    }
    if let Some(mean) = found {
        return Ok(canonical_witness(a, mean));
    }
    // Fall back on the critical subgraph, whose cycles are all critical.
    let edges = critical_edges_by_walks(a, &w, l);
    let keep = vec![true; n];
    let cycle = find_cycle_within(&edges, &keep)
        .ok_or_else(|| Error::CertificationFailure("no critical cycle found".into()))?;
    let weight = cycle
        .windows(2)
        .fold(S::one(), |acc, e| acc.mul(a.get(e[0], e[1])));
    let length = cycle.len() - 1;
    Ok(canonical_witness(
        a,
        CycleMean {
            weight,
            length,
            witness: cycle,
        },
    ))
}

/// Rotates a cycle so it starts at its smallest node.
fn canonical_witness<S: Scalar>(_a: &MaxMatrix<S>, mut mean: CycleMean<S>) -> CycleMean<S> {
    let body = &mean.witness[..mean.witness.len() - 1];
    let start = (0..body.len()).min_by_key(|&i| body[i]).unwrap_or(0);
    let mut rotated: Vec<usize> = body[start..].iter().chain(&body[..start]).copied().collect();
    rotated.push(rotated[0]);
    mean.witness = rotated;
    mean
}

/// Elementary cycles obtained by repeatedly cutting closed sub-walks.
fn cycles_on_walk(walk: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for &v in walk {
        if let Some(pos) = stack.iter().position(|&u| u == v) {
            let mut cycle = stack[pos..].to_vec();
            cycle.push(v);
            out.push(cycle);
            stack.truncate(pos);
        }
        stack.push(v);
    }
    out
}

/// Critical edges without normalizing: `(i, j)` is critical iff
/// `aᵢⱼ (Aᵏ)ⱼᵢ` has geometric mean λ for some `k < n`. Any closed walk of
/// mean λ decomposes into critical elementary cycles, one of which uses
/// `(i, j)`.
pub(crate) fn critical_edges_by_walks<S: Scalar>(
    a: &MaxMatrix<S>,
    weight: &S,
    length: usize,
) -> Digraph<S> {
    let n = a.n();
    let tol = a.tol();
    let mut g = Digraph::new(n);
    let mut power = MaxMatrix::<S>::identity(n).with_tol(tol);
    for k in 0..n {
        for (i, j, e) in a.entries() {
            if e.is_zero() || g.has_edge(i, j) {
                continue;
            }
            let back = power.get(j, i);
            if back.is_zero() {
                continue;
            }
            let closed = e.mul(back);
            if S::cmp_mean(&closed, k + 1, weight, length, tol) == Ordering::Equal {
                g.add_edge(i, j, e.clone());
            }
        }
        power = power.otimes_unchecked(a);
    }
    g
}

/// Critical edges of a matrix with λ = 1: `ãᵢⱼ · ã*ⱼᵢ = 1`.
pub(crate) fn critical_edges_normalized<S: Scalar>(
    normalized: &MaxMatrix<S>,
    star: &MaxMatrix<S>,
) -> Digraph<S> {
    let mut g = Digraph::new(normalized.n());
    for (i, j, e) in normalized.entries() {
        if e.is_zero() {
            continue;
        }
        if normalized.eq_scalar(&e.mul(star.get(j, i)), &S::one()) {
            g.add_edge(i, j, e.clone());
        }
    }
    g
}

/// The critical graph: nodes and edges of all cycles attaining λ(A).
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalGraph<S> {
    pub lambda: CycleMean<S>,
    /// Critical nodes in increasing order.
    pub nodes: Vec<usize>,
    /// Critical edges, weighted by the entries of A.
    pub edges: Digraph<S>,
    /// Strongly connected components of the critical graph, each sorted.
    pub components: Vec<Vec<usize>>,
    pub cyclicity: usize,
}

impl<S: Scalar> CriticalGraph<S> {
    pub fn contains_node(&self, v: usize) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn node_mask(&self) -> Vec<bool> {
        (0..self.edges.n()).map(|v| self.contains_node(v)).collect()
    }
}

/// Computes the critical graph. Errors with [`Error::AcyclicMatrix`] when
/// λ(A) = 0.
pub fn critical_graph<S: Scalar>(a: &MaxMatrix<S>) -> Result<CriticalGraph<S>> {
    let lambda = max_cycle_gmean(a)?;
    if lambda.is_zero() {
        return Err(Error::AcyclicMatrix);
    }
    let edges = match lambda.value() {
        Some(l) => {
            let normalized = a.scale(&l.inv());
            let star = normalized.closure_unchecked();
            // Report the original weights.
            let mut g = Digraph::new(a.n());
            for (i, j, _) in critical_edges_normalized(&normalized, &star).edges() {
                g.add_edge(i, j, a.get(i, j).clone());
            }
            g
        }
        None => critical_edges_by_walks(a, &lambda.weight, lambda.length),
    };
    Ok(assemble_critical_graph(lambda, edges))
}

pub(crate) fn assemble_critical_graph<S: Scalar>(
    lambda: CycleMean<S>,
    edges: Digraph<S>,
) -> CriticalGraph<S> {
    let n = edges.n();
    let mut is_node = vec![false; n];
    for (i, j, _) in edges.edges() {
        is_node[i] = true;
        is_node[j] = true;
    }
    let nodes: Vec<usize> = (0..n).filter(|&v| is_node[v]).collect();
    let dec = scc(&edges);
    let components: Vec<Vec<usize>> = dec.nontrivial_components().cloned().collect();
    // Restricted to its own nodes the critical graph has every node on a cycle.
    let cyclicity = graph_cyclicity(&edges.induced(&is_node).restrict_to(&nodes))
        .expect("critical nodes lie on critical cycles");
    CriticalGraph {
        lambda,
        nodes,
        edges,
        components,
        cyclicity,
    }
}

impl<W: Clone> Digraph<W> {
    /// Relabels the subgraph on `nodes` to `0..nodes.len()`.
    pub fn restrict_to(&self, nodes: &[usize]) -> Digraph<W> {
        let mut index = vec![usize::MAX; self.n()];
        for (k, &v) in nodes.iter().enumerate() {
            index[v] = k;
        }
        let mut g = Digraph::new(nodes.len());
        for (i, j, w) in self.edges() {
            if index[i] != usize::MAX && index[j] != usize::MAX {
                g.add_edge(index[i], index[j], w.clone());
            }
        }
        g
    }
}

/// `(A / λ(A), λ(A))` for any matrix with λ > 0.
pub(crate) fn normalize_any<S: Scalar>(a: &MaxMatrix<S>) -> Result<(MaxMatrix<S>, CycleMean<S>, S)> {
    let lambda = max_cycle_gmean(a)?;
    if lambda.is_zero() {
        return Err(Error::AcyclicMatrix);
    }
    let value = lambda.value().ok_or_else(|| {
        Error::ExactnessUnavailable(format!(
            "maximum cycle geometric mean is the irrational root {}^(1/{})",
            lambda.weight.to_token(),
            lambda.length
        ))
    })?;
    Ok((a.scale(&value.inv()), lambda, value))
}

/// Critical columns of `Ã*` for a normalized matrix, one per critical
/// component (smallest node as representative), with proportionality of the
/// other columns of each component verified.
pub(crate) fn critical_basis<S: Scalar>(
    normalized: &MaxMatrix<S>,
    crit: &CriticalGraph<S>,
) -> Result<Vec<MaxVector<S>>> {
    let star = normalized.closure_unchecked();
    let tol = normalized.tol();
    let mut basis = Vec::with_capacity(crit.components.len());
    for comp in &crit.components {
        let rep = star.column(comp[0]);
        for &other in &comp[1..] {
            if !star.column(other).proportional_to(&rep, tol) {
                return Err(Error::CertificationFailure(format!(
                    "critical columns {} and {} are not proportional",
                    comp[0], other
                )));
            }
        }
        basis.push(rep);
    }
    Ok(basis)
}

/// Generators of the eigenspace for `λ(A)`: the critical columns of
/// `(A/λ)*`, one per critical component. For reducible matrices these span
/// the eigenvectors for `λ(A)` only.
pub fn eigenspace_basis<S: Scalar>(a: &MaxMatrix<S>) -> Result<Vec<MaxVector<S>>> {
    let (normalized, _, _) = normalize_any(a)?;
    let crit = critical_graph(&normalized)?;
    critical_basis(&normalized, &crit)
}

/// A positive eigenvector: the ⊕-sum of the eigenspace generators. Always
/// positive for irreducible matrices; for reducible ones
/// [`Error::NotIrreducible`] is returned when the sum has a zero entry.
pub fn principal_eigenvector<S: Scalar>(a: &MaxMatrix<S>) -> Result<MaxVector<S>> {
    let basis = eigenspace_basis(a)?;
    let tol = a.tol();
    let mut iter = basis.into_iter();
    let first = iter.next().ok_or(Error::AcyclicMatrix)?;
    let x = iter.fold(first, |acc, v| acc.oplus(&v, tol));
    if x.is_positive() {
        Ok(x)
    } else {
        Err(Error::NotIrreducible)
    }
}

/// Whether `A ⊗ x = λ x` under the matrix mode.
pub fn is_eigenvector<S: Scalar>(a: &MaxMatrix<S>, x: &MaxVector<S>, lambda: &S) -> bool {
    match a.apply(x) {
        Ok(ax) => ax.approx_eq(&x.scale(lambda), a.tol()),
        Err(_) => false,
    }
}

/// 𝒢(A) restricted to the critical edges, as an unweighted graph.
pub fn critical_digraph<S: Scalar>(a: &MaxMatrix<S>) -> Result<Digraph> {
    Ok(critical_graph(a)?.edges.unweighted())
}

/// Whether every node of `a`'s digraph has at least one successor.
pub fn has_full_out_degree<S: Scalar>(a: &MaxMatrix<S>) -> bool {
    let g = digraph_of(a);
    (0..g.n()).all(|v| g.out_degree(v) > 0)
}
