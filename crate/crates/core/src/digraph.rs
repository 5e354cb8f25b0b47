//! The weighted digraph 𝒢(A) of a matrix and the graph algorithms built on it.

use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::matrix::MaxMatrix;
use crate::scalar::{gcd, lcm, Scalar};

/// Largest node count accepted by the elementary-cycle enumerator.
pub const MAX_ENUMERATION_NODES: usize = 10;

/// A directed graph on nodes `0..n` without parallel edges.
#[derive(Clone, Debug, PartialEq)]
pub struct Digraph<W = ()> {
    n: usize,
    adj: Vec<Vec<(usize, W)>>,
}

impl<W: Clone> Digraph<W> {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            adj: vec![Vec::new(); n],
        }
    }

    /// Inserts or replaces the edge `(i, j)`.
    pub fn add_edge(&mut self, i: usize, j: usize, w: W) {
        let list = &mut self.adj[i];
        match list.binary_search_by_key(&j, |(t, _)| *t) {
            Ok(pos) => list[pos].1 = w,
            Err(pos) => list.insert(pos, (j, w)),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i].iter().map(|(j, _)| *j)
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<&W> {
        self.adj[i]
            .binary_search_by_key(&j, |(t, _)| *t)
            .ok()
            .map(|pos| &self.adj[i][pos].1)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.weight(i, j).is_some()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &W)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().map(move |(j, w)| (i, *j, w)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Edge set as sorted `(i, j)` pairs.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges().map(|(i, j, _)| (i, j)).collect()
    }

    pub fn unweighted(&self) -> Digraph<()> {
        Digraph {
            n: self.n,
            adj: self
                .adj
                .iter()
                .map(|l| l.iter().map(|(j, _)| (*j, ())).collect())
                .collect(),
        }
    }

    /// Keeps only the edges whose endpoints are both in `keep`.
    pub fn induced(&self, keep: &[bool]) -> Self {
        Digraph {
            n: self.n,
            adj: self
                .adj
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    if !keep[i] {
                        return Vec::new();
                    }
                    l.iter().filter(|(j, _)| keep[*j]).cloned().collect()
                })
                .collect(),
        }
    }
}

impl<S: Scalar> Digraph<S> {
    /// Matrix with the edge weights and zeros elsewhere.
    pub fn to_matrix(&self) -> MaxMatrix<S> {
        let mut m = MaxMatrix::zeros(self.n, self.n);
        for (i, j, w) in self.edges() {
            m.set(i, j, w.clone());
        }
        m
    }
}

/// 𝒢(A): an edge `(i, j)` of weight `aᵢⱼ` for every positive entry.
pub fn digraph_of<S: Scalar>(a: &MaxMatrix<S>) -> Digraph<S> {
    let mut g = Digraph::new(a.rows().max(a.cols()));
    for (i, j, v) in a.entries() {
        if !v.is_zero() {
            g.add_edge(i, j, v.clone());
        }
    }
    g
}

/// A path `i₁ → … → iₖ` with weight `w(P)` and length `k − 1`.
///
/// Cycles are closed paths: the first node is repeated at the end.
#[derive(Clone, Debug, PartialEq)]
pub struct Path<S> {
    pub nodes: Vec<usize>,
    pub weight: S,
}

impl<S: Scalar> Path<S> {
    /// Builds a path along the digraph of `a`; `None` if a step is not an edge.
    pub fn along(a: &MaxMatrix<S>, nodes: Vec<usize>) -> Option<Self> {
        let mut weight = S::one();
        for w in nodes.windows(2) {
            let e = a.get(w[0], w[1]);
            if e.is_zero() {
                return None;
            }
            weight = weight.mul(e);
        }
        Some(Path { nodes, weight })
    }

    pub fn length(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_cycle(&self) -> bool {
        self.nodes.len() >= 2 && self.nodes.first() == self.nodes.last()
    }
}

/// Strongly connected components with trivial/nontrivial flags.
///
/// Components are listed in increasing order of their smallest node, each
/// sorted. A component is trivial when it is a single node without a loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    pub components: Vec<Vec<usize>>,
    pub nontrivial: Vec<bool>,
    pub component_of: Vec<usize>,
}

impl SccDecomposition {
    pub fn nontrivial_components(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.components
            .iter()
            .zip(&self.nontrivial)
            .filter(|(_, &nt)| nt)
            .map(|(c, _)| c)
    }

    /// Nodes lying in some nontrivial component.
    pub fn cyclic_nodes(&self) -> Vec<bool> {
        let mut out = vec![false; self.component_of.len()];
        for c in self.nontrivial_components() {
            for &v in c {
                out[v] = true;
            }
        }
        out
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.components.len() == 1
    }
}

/// Tarjan's algorithm, iterative.
pub fn scc<W: Clone>(g: &Digraph<W>) -> SccDecomposition {
    let n = g.n();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut raw: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (node, next successor position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&(w, _)) = g.adj[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                raw.push(comp);
            }
        }
    }

    raw.sort_by_key(|c| c[0]);
    let mut component_of = vec![0; n];
    for (k, c) in raw.iter().enumerate() {
        for &v in c {
            component_of[v] = k;
        }
    }
    let nontrivial = raw
        .iter()
        .map(|c| c.len() > 1 || g.has_edge(c[0], c[0]))
        .collect();
    SccDecomposition {
        components: raw,
        nontrivial,
        component_of,
    }
}

/// All elementary cycles of length at most `max_len`, as closed node lists
/// starting at their smallest node.
pub fn enumerate_cycles<W: Clone>(g: &Digraph<W>, max_len: usize) -> Result<Vec<Vec<usize>>> {
    let n = g.n();
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::SizeLimit {
            n,
            limit: MAX_ENUMERATION_NODES,
        });
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut used = vec![false; n];
    for start in 0..n {
        path.clear();
        path.push(start);
        used[start] = true;
        extend_cycles(g, start, max_len, &mut path, &mut used, &mut out);
        used[start] = false;
    }
    Ok(out)
}

fn extend_cycles<W: Clone>(
    g: &Digraph<W>,
    start: usize,
    max_len: usize,
    path: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let v = *path.last().expect("nonempty path");
    for w in g.successors(v) {
        if w == start {
            if path.len() <= max_len {
                let mut cycle = path.clone();
                cycle.push(start);
                out.push(cycle);
            }
        } else if w > start && !used[w] && path.len() < max_len {
            used[w] = true;
            path.push(w);
            extend_cycles(g, start, max_len, path, used, out);
            path.pop();
            used[w] = false;
        }
    }
}

/// Elementary cycles with their weights.
pub fn enumerate_weighted_cycles<S: Scalar>(
    g: &Digraph<S>,
    max_len: usize,
) -> Result<Vec<Path<S>>> {
    Ok(enumerate_cycles(g, max_len)?
        .into_iter()
        .map(|nodes| {
            let weight = nodes.windows(2).fold(S::one(), |acc, e| {
                acc.mul(g.weight(e[0], e[1]).expect("cycle edge"))
            });
            Path { nodes, weight }
        })
        .collect())
}

/// Per strongly connected component, the gcd of its cycle lengths; the
/// result is the lcm over components. Every node must lie on a cycle.
pub fn graph_cyclicity<W: Clone>(g: &Digraph<W>) -> Result<usize> {
    let dec = scc(g);
    let mut result = 1;
    for (comp, &nt) in dec.components.iter().zip(&dec.nontrivial) {
        if !nt {
            return Err(Error::NodeNotOnCycle { node: comp[0] });
        }
        result = lcm(result, component_cyclicity(g, comp, &dec.component_of));
    }
    Ok(result)
}

/// gcd of cycle lengths in one nontrivial component, via BFS levels:
/// the gcd of `level(u) + 1 − level(v)` over the component's edges.
pub(crate) fn component_cyclicity<W: Clone>(
    g: &Digraph<W>,
    comp: &[usize],
    component_of: &[usize],
) -> usize {
    let id = component_of[comp[0]];
    let mut level = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::from([comp[0]]);
    level[comp[0]] = 0;
    while let Some(v) = queue.pop_front() {
        for w in g.successors(v) {
            if component_of[w] == id && level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut d = 0;
    for &u in comp {
        for v in g.successors(u) {
            if component_of[v] == id {
                let diff = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs() as usize;
                d = gcd(d, diff);
            }
        }
    }
    d
}

/// Edges `(i, j)` with `aᵢⱼ ≥ θ`.
pub fn threshold_digraph<S: Scalar>(a: &MaxMatrix<S>, theta: &S) -> Result<Digraph<S>> {
    if theta.is_zero() {
        return Err(Error::InvalidArgument("threshold must be positive".into()));
    }
    let mut g = Digraph::new(a.n());
    for (i, j, v) in a.entries() {
        if !v.is_zero() && a.cmp(v, theta) != Ordering::Less {
            g.add_edge(i, j, v.clone());
        }
    }
    Ok(g)
}

/// Distinct positive entry values in decreasing order, each with the SCC
/// decomposition of its threshold digraph. Runs of identical decompositions
/// keep only their highest level.
pub fn threshold_spectrum<S: Scalar>(a: &MaxMatrix<S>) -> Vec<(S, SccDecomposition)> {
    let mut levels: Vec<S> = Vec::new();
    for (_, _, v) in a.entries() {
        if v.is_zero() {
            continue;
        }
        if !levels.iter().any(|l| a.eq_scalar(l, v)) {
            levels.push(v.clone());
        }
    }
    levels.sort_by(|x, y| a.cmp(y, x));
    let mut out: Vec<(S, SccDecomposition)> = Vec::new();
    for theta in levels {
        let dec = scc(&threshold_digraph(a, &theta).expect("positive level"));
        if out.last().is_some_and(|(_, prev)| *prev == dec) {
            continue;
        }
        out.push((theta, dec));
    }
    out
}

/// Boolean reachability in at least one step.
pub fn reachability<W: Clone>(g: &Digraph<W>) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut reach = vec![vec![false; n]; n];
    for (s, row) in reach.iter_mut().enumerate() {
        let mut queue: VecDeque<usize> = g.successors(s).collect();
        for &w in &queue {
            row[w] = true;
        }
        while let Some(v) = queue.pop_front() {
            for w in g.successors(v) {
                if !row[w] {
                    row[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    reach
}

/// Whether the digraph of `a` is strongly connected.
pub fn is_irreducible<S: Scalar>(a: &MaxMatrix<S>) -> bool {
    a.is_square() && a.n() > 0 && scc(&digraph_of(a)).is_strongly_connected()
}

/// A cycle inside a nontrivial strongly connected component of `g`
/// restricted to `allowed` nodes, if any.
pub fn find_cycle_within<W: Clone>(g: &Digraph<W>, allowed: &[bool]) -> Option<Vec<usize>> {
    let sub = g.induced(allowed);
    let dec = scc(&sub);
    let comp = dec.nontrivial_components().next()?;
    let id = dec.component_of[comp[0]];
    // Walk inside the component until a node repeats.
    let mut seen = vec![usize::MAX; g.n()];
    let mut walk = vec![comp[0]];
    seen[comp[0]] = 0;
    loop {
        let v = *walk.last().expect("nonempty walk");
        let w = sub
            .successors(v)
            .find(|&w| dec.component_of[w] == id)
            .expect("nontrivial component has internal successors");
        if seen[w] != usize::MAX {
            let mut cycle = walk[seen[w]..].to_vec();
            cycle.push(w);
            return Some(cycle);
        }
        seen[w] = walk.len();
        walk.push(w);
    }
}
