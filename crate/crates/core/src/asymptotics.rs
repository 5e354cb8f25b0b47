//! Ultimate periodicity of max-times powers: transients and periods, the
//! CSR decomposition, strong paths, the Nachtigall expansion and a transient
//! bound.

use std::cmp::Ordering;

use crate::digraph::is_irreducible;
use crate::error::{Error, Result};
use crate::matrix::{MaxMatrix, MaxVector};
use crate::scaling::{apply_scaling, fp_scaling, DiagonalScaling};
use crate::scalar::Scalar;
use crate::spectral::{critical_graph, max_cycle_gmean, normalize_any, principal_eigenvector, CycleMean};

/// Default cap on the power index inspected by sequential searches.
pub fn default_budget(n: usize, gamma: usize) -> usize {
    3 * n * n + 2 * gamma
}

/// `A` on its critical edges, zero elsewhere.
pub fn critical_matrix<S: Scalar>(a: &MaxMatrix<S>) -> Result<MaxMatrix<S>> {
    let crit = critical_graph(a)?;
    Ok(a.map(|i, j, v| {
        if crit.edges.has_edge(i, j) {
            v.clone()
        } else {
            S::zero()
        }
    }))
}

/// `(A / λ(A), λ(A))`; errors on acyclic matrices.
pub fn normalize_to_unit<S: Scalar>(a: &MaxMatrix<S>) -> Result<(MaxMatrix<S>, CycleMean<S>)> {
    a.require_square()?;
    let (normalized, lambda, _) = normalize_any(a)?;
    Ok((normalized, lambda))
}

/// Transient and period of the sequence `A, A², …`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicityProfile<S> {
    /// Least `T ≥ 1` with `Aᵗ⁺ᵞ = Aᵗ` for all `t ≥ T`.
    pub transient: usize,
    /// Least period.
    pub period: usize,
    /// Cyclicity of the critical graph, the period the theory predicts.
    pub predicted_period: usize,
    /// `Aᵀ, …, Aᵀ⁺ᵞ`.
    pub witness: Vec<MaxMatrix<S>>,
}

/// Finds the transient and period of a matrix with λ = 1, inspecting powers
/// up to [`default_budget`]. Irreducible matrices are always ultimately
/// periodic; reducible ones may exhaust the budget.
pub fn transient_and_period<S: Scalar>(a: &MaxMatrix<S>) -> Result<PeriodicityProfile<S>> {
    transient_and_period_with(a, None)
}

/// As [`transient_and_period`], with an explicit cap on the transient.
pub fn transient_and_period_with<S: Scalar>(
    a: &MaxMatrix<S>,
    budget: Option<usize>,
) -> Result<PeriodicityProfile<S>> {
    a.require_square()?;
    let crit = critical_graph(a)?;
    if crit.lambda.cmp_unit(a.tol()) != Ordering::Equal {
        return Err(Error::NotNormalized);
    }
    let gamma = crit.cyclicity;
    let budget = budget.unwrap_or_else(|| default_budget(a.n(), gamma));
    // powers[k] = A^(k+1)
    let mut powers = vec![a.clone()];
    let mut found = None;
    loop {
        let s = powers.len();
        // Predicted period: the first s with A^s = A^(s-γ) fixes T = s - γ.
        if s > gamma && powers[s - 1].approx_eq(&powers[s - 1 - gamma]) {
            found = Some((s - gamma, gamma));
            break;
        }
        if s > budget + gamma {
            break;
        }
        let next = powers[s - 1].otimes_unchecked(a);
        powers.push(next);
    }
    if found.is_none() {
        // Any repeat among the stored powers; the first one gives the exact
        // transient.
        found = (1..powers.len()).find_map(|s| {
            (0..s)
                .find(|&k| powers[k].approx_eq(&powers[s]))
                .map(|k| (k + 1, s - k))
        });
    }
    let (transient, multiple) = found.ok_or(Error::IterationBudget { budget })?;
    let base = &powers[transient - 1];
    let period = divisors(multiple)
        .into_iter()
        .find(|&d| powers[transient - 1 + d].approx_eq(base))
        .expect("the period divides itself");
    // Minimality of T also holds for the reduced period: an earlier onset
    // with period d would give one with the multiple.
    let witness = powers[transient - 1..=transient - 1 + period].to_vec();
    Ok(PeriodicityProfile {
        transient,
        period,
        predicted_period: gamma,
        witness,
    })
}

fn divisors(m: usize) -> Vec<usize> {
    (1..=m).filter(|d| m % d == 0).collect()
}

/// One CSR term `λᵗ · X (C ⊗ Sᵗ ⊗ R) X⁻¹` in the coordinates of the full
/// matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrTerm<S> {
    pub lambda: CycleMean<S>,
    pub lambda_value: S,
    /// Visualizing scaling (unit outside the submatrix the term lives on).
    pub scaling: DiagonalScaling<S>,
    /// Critical nodes of the term, in increasing order.
    pub critical_nodes: Vec<usize>,
    /// Cyclicity of the critical graph.
    pub gamma: usize,
    /// Critical columns of `(Ãᵞ)*`, `n × c`.
    pub c: MaxMatrix<S>,
    /// Critical matrix of `Ã` on the critical nodes, `c × c`.
    pub s: MaxMatrix<S>,
    /// Critical rows of `(Ãᵞ)*`, `c × n`.
    pub r: MaxMatrix<S>,
}

impl<S: Scalar> CsrTerm<S> {
    /// `C ⊗ Sᵗ ⊗ R` in visualized coordinates.
    pub fn visualized_power(&self, t: usize) -> Result<MaxMatrix<S>> {
        let st = self.s.power(t)?;
        Ok(self.c.otimes_unchecked(&st).otimes_unchecked(&self.r))
    }

    /// `λᵗ · X (C ⊗ Sᵗ ⊗ R) X⁻¹`.
    pub fn power(&self, t: usize) -> Result<MaxMatrix<S>> {
        let v = self.visualized_power(t)?;
        let back = apply_scaling(&v, &self.scaling.inverse())?;
        Ok(back.scale(&self.lambda_value.pow(t as u32)))
    }
}

/// Builds the CSR term of `a` restricted to `nodes`, or `None` when that
/// submatrix is acyclic. Also returns the visualized submatrix.
fn build_term<S: Scalar>(a: &MaxMatrix<S>, nodes: &[usize]) -> Result<Option<(CsrTerm<S>, MaxMatrix<S>)>> {
    let n = a.n();
    let sub = a.select(nodes, nodes);
    let lambda = max_cycle_gmean(&sub)?;
    if lambda.is_zero() {
        return Ok(None);
    }
    let (normalized, lambda, lambda_value) = normalize_any(&sub)?;
    let x = if is_irreducible(&normalized) {
        DiagonalScaling::new(principal_eigenvector(&normalized)?)?
    } else {
        fp_scaling(&normalized)?
    };
    let vis = apply_scaling(&normalized, &x)?;
    let crit = critical_graph(&vis)?;
    let gamma = crit.cyclicity;
    let star = vis.power(gamma)?.closure_unchecked();
    let all: Vec<usize> = (0..nodes.len()).collect();
    let k: Vec<usize> = (0..crit.nodes.len()).collect();
    let c = star.select(&all, &crit.nodes).embed(n, k.len(), nodes, &k);
    let r = star.select(&crit.nodes, &all).embed(k.len(), n, &k, nodes);
    let s = MaxMatrix::from_fn(k.len(), k.len(), |p, q| {
        let (i, j) = (crit.nodes[p], crit.nodes[q]);
        if crit.edges.has_edge(i, j) {
            vis.get(i, j).clone()
        } else {
            S::zero()
        }
    })
    .with_tol(a.tol());
    let mut full = vec![S::one(); n];
    for (l, &g) in nodes.iter().enumerate() {
        full[g] = x.vector().get(l).clone();
    }
    let term = CsrTerm {
        lambda,
        lambda_value,
        scaling: DiagonalScaling::new(MaxVector::new(full))?,
        critical_nodes: crit.nodes.iter().map(|&l| nodes[l]).collect(),
        gamma,
        c,
        s,
        r,
    };
    Ok(Some((term, vis)))
}

/// The CSR decomposition, certified against direct powers. Meant for
/// irreducible matrices; reducible ones are accepted when the certification
/// succeeds.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrTriple<S> {
    pub term: CsrTerm<S>,
    /// Transient of the visualized matrix `Ã`.
    pub transient: usize,
    /// Least `t` from which `Ãᵗ = C Sᵗ R` holds throughout the certified
    /// range.
    pub csr_onset: usize,
    /// Last power of the certified range `[transient, transient + 3γ]`.
    pub certified_until: usize,
}

impl<S: Scalar> CsrTriple<S> {
    pub fn gamma(&self) -> usize {
        self.term.gamma
    }
}

pub fn csr_decompose<S: Scalar>(a: &MaxMatrix<S>) -> Result<CsrTriple<S>> {
    csr_decompose_with(a, None)
}

/// As [`csr_decompose`], with an explicit cap for the transient search.
pub fn csr_decompose_with<S: Scalar>(a: &MaxMatrix<S>, budget: Option<usize>) -> Result<CsrTriple<S>> {
    a.require_square()?;
    let nodes: Vec<usize> = (0..a.n()).collect();
    let (term, vis) = build_term(a, &nodes)?.ok_or(Error::AcyclicMatrix)?;
    let profile = transient_and_period_with(&vis, budget)?;
    let gamma = term.gamma;
    if gamma % profile.period != 0 {
        return Err(Error::CertificationFailure(format!(
            "period {} does not divide the cyclicity {gamma}",
            profile.period
        )));
    }
    let start = profile.transient;
    let end = start + 3 * gamma;
    let mut st = term.s.power(start)?;
    let mut at = vis.power(start)?;
    for t in start..=end {
        let csr = term.c.otimes_unchecked(&st).otimes_unchecked(&term.r);
        if !csr.approx_eq(&at) {
            return Err(Error::CertificationFailure(format!(
                "C S^t R differs from the power at t = {t}"
            )));
        }
        st = st.otimes_unchecked(&term.s);
        at = at.otimes_unchecked(&vis);
    }
    let mut onset = start;
    while onset > 1 && term.visualized_power(onset - 1)?.approx_eq(&vis.power(onset - 1)?) {
        onset -= 1;
    }
    Ok(CsrTriple {
        term,
        transient: profile.transient,
        csr_onset: onset,
        certified_until: end,
    })
}

/// `Aᵗ` reconstructed from the CSR decomposition.
pub fn csr_power<S: Scalar>(triple: &CsrTriple<S>, t: usize) -> Result<MaxMatrix<S>> {
    triple.term.power(t)
}

/// Largest weight of a length-`t` path from `i` to `j` visiting a critical
/// node, by dynamic programming over (node, visited) states.
pub fn strong_path_weight<S: Scalar>(a: &MaxMatrix<S>, i: usize, j: usize, t: usize) -> Result<S> {
    a.require_square()?;
    let n = a.n();
    if i >= n || j >= n {
        return Err(Error::InvalidArgument(format!("node out of range for n = {n}")));
    }
    if t == 0 {
        return Err(Error::InvalidArgument("path length must be at least 1".into()));
    }
    let critical = match critical_graph(a) {
        Ok(c) => c.node_mask(),
        Err(Error::AcyclicMatrix) => return Ok(S::zero()),
        Err(e) => return Err(e),
    };
    let tol = a.tol();
    // best[v][f]: heaviest walk from i to v, f = visited a critical node.
    let mut best = vec![[S::zero(), S::zero()]; n];
    best[i][usize::from(critical[i])] = S::one();
    for _ in 0..t {
        let mut next = vec![[S::zero(), S::zero()]; n];
        for (v, u, w) in a.entries() {
            if w.is_zero() {
                continue;
            }
            for f in 0..2 {
                if best[v][f].is_zero() {
                    continue;
                }
                let g = usize::from(f == 1 || critical[u]);
                let cand = best[v][f].mul(w);
                next[u][g] = next[u][g].max_of(&cand, tol);
            }
        }
        best = next;
    }
    Ok(best[j][1].clone())
}

/// A Nachtigall expansion `Aᵗ = ⊕ₖ λₖᵗ Cₖ Sₖᵗ Rₖ` for large `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct NachtigallExpansion<S> {
    /// Size of the expanded matrix.
    pub n: usize,
    /// Terms in strictly decreasing order of `λₖ`.
    pub terms: Vec<CsrTerm<S>>,
    /// Least `t` from which the expansion matched `Aᵗ` over `[t, t + 2γ₁]`,
    /// or `None` when no such `t` was found within the budget.
    pub validity_start: Option<usize>,
    /// The budget used for the search.
    pub budget: usize,
}

impl<S: Scalar> NachtigallExpansion<S> {
    /// Supports of the terms, one node set each.
    pub fn supports(&self) -> Vec<Vec<usize>> {
        self.terms.iter().map(|t| t.critical_nodes.clone()).collect()
    }

    /// `γ₁`, or 1 without terms.
    pub fn leading_gamma(&self) -> usize {
        self.terms.first().map_or(1, |t| t.gamma)
    }
}

/// The terms of the expansion only: repeatedly take the CSR term of the
/// remaining submatrix and delete its critical nodes, until the remainder
/// is acyclic.
pub fn nachtigall_terms<S: Scalar>(a: &MaxMatrix<S>) -> Result<Vec<CsrTerm<S>>> {
    a.require_square()?;
    let mut remaining: Vec<usize> = (0..a.n()).collect();
    let mut terms: Vec<CsrTerm<S>> = Vec::new();
    while !remaining.is_empty() {
        let Some((term, _)) = build_term(a, &remaining)? else {
            break;
        };
        if let Some(prev) = terms.last() {
            if term.lambda.cmp(&prev.lambda, a.tol()) != Ordering::Less {
                return Err(Error::CertificationFailure(
                    "expansion coefficients are not strictly decreasing".into(),
                ));
            }
        }
        remaining.retain(|v| term.critical_nodes.binary_search(v).is_err());
        terms.push(term);
    }
    Ok(terms)
}

pub fn nachtigall_expansion<S: Scalar>(a: &MaxMatrix<S>) -> Result<NachtigallExpansion<S>> {
    nachtigall_expansion_with(a, None)
}

/// As [`nachtigall_expansion`], searching `validity_start` up to `budget`.
pub fn nachtigall_expansion_with<S: Scalar>(
    a: &MaxMatrix<S>,
    budget: Option<usize>,
) -> Result<NachtigallExpansion<S>> {
    let terms = nachtigall_terms(a)?;
    let mut e = NachtigallExpansion {
        n: a.n(),
        terms,
        validity_start: None,
        budget: 0,
    };
    let span = 2 * e.leading_gamma();
    let budget = budget.unwrap_or_else(|| default_budget(a.n(), e.leading_gamma()));
    e.budget = budget;
    // matches[k] records whether the expansion equals A^(k+1).
    let mut matches = Vec::with_capacity(budget + span);
    let mut at = a.clone();
    for t in 1..=budget + span {
        if t > 1 {
            at = at.otimes_unchecked(a);
        }
        matches.push(expansion_power(&e, t)?.approx_eq(&at));
        if t > span {
            let start = t - span;
            if matches[start - 1..t].iter().all(|&m| m) {
                e.validity_start = Some(start);
                break;
            }
        }
    }
    Ok(e)
}

/// `⊕ₖ λₖᵗ Cₖ Sₖᵗ Rₖ`.
pub fn expansion_power<S: Scalar>(e: &NachtigallExpansion<S>, t: usize) -> Result<MaxMatrix<S>> {
    if t == 0 {
        return Err(Error::InvalidArgument("power requires t >= 1".into()));
    }
    let Some(first) = e.terms.first() else {
        return Ok(MaxMatrix::zeros(e.n, e.n));
    };
    let mut sum = first.power(t)?;
    for term in &e.terms[1..] {
        sum = sum.oplus(&term.power(t)?)?;
    }
    Ok(sum)
}

/// The transient bound `2n² (max ln aᵢⱼ − min ln aᵢⱼ) / (ln λ₁ − ln λ₂)`
/// over positive entries, with `λ₁, λ₂` the first two expansion
/// coefficients.
pub fn transient_bound<S: Scalar>(a: &MaxMatrix<S>) -> Result<f64> {
    let terms = nachtigall_terms(a)?;
    if terms.len() < 2 {
        return Err(Error::Inapplicable(
            "the expansion has fewer than two terms".into(),
        ));
    }
    let (l1, l2) = (&terms[0].lambda, &terms[1].lambda);
    if l1.cmp(l2, a.tol()) != Ordering::Greater {
        return Err(Error::Inapplicable("λ₁ equals λ₂".into()));
    }
    let logs: Vec<f64> = a
        .entries()
        .filter(|(_, _, v)| !v.is_zero())
        .map(|(_, _, v)| v.ln())
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let n = a.n() as f64;
    Ok(2.0 * n * n * (max - min) / (l1.ln() - l2.ln()))
}
