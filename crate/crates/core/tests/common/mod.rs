//! Generators and brute-force oracles shared by the integration tests.
//! Nothing here calls into the algorithms under test.

#![allow(dead_code)]

pub mod golden;

use std::cmp::Ordering;

use maxtimes::scalar::{ratio, MaxPlus};
use maxtimes::{MaxMatrix, Rational};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn r(p: i64, q: i64) -> Rational {
    ratio(p, q)
}

pub fn rpow(x: &Rational, k: usize) -> Rational {
    num_traits::pow(x.clone(), k)
}

/// Rows of rationals into a matrix.
pub fn mat(rows: Vec<Vec<Rational>>) -> MaxMatrix<Rational> {
    MaxMatrix::from_rows(rows).unwrap()
}

pub fn rows_of(a: &MaxMatrix<Rational>) -> Vec<Vec<Rational>> {
    a.to_rows()
}

pub fn pick<R: Rng>(rng: &mut R, values: &[Rational]) -> Rational {
    values.choose(rng).unwrap().clone()
}

/// Entries drawn from `values` with probability `density`, zero otherwise.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, density: f64, values: &[Rational]) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.gen_bool(density) {
                        pick(rng, values)
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// A random matrix with a Hamiltonian cycle planted, hence irreducible.
pub fn random_irreducible<R: Rng>(rng: &mut R, n: usize, density: f64, values: &[Rational]) -> Vec<Vec<Rational>> {
    let mut a = random_matrix(rng, n, density, values);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    for k in 0..n {
        let (i, j) = (perm[k], perm[(k + 1) % n]);
        if a[i][j].is_zero() {
            a[i][j] = pick(rng, values);
        }
    }
    a
}

/// An irreducible matrix with λ = 1: all entries at most 1, a planted cycle
/// of unit entries, then a random diagonal similarity.
pub fn unit_lambda_matrix<R: Rng>(rng: &mut R, n: usize) -> MaxMatrix<Rational> {
    let light = [r(1, 8), r(1, 4), r(1, 2)];
    let mut a = random_irreducible(rng, n, 0.35, &light);
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            if !v.is_zero() && rng.gen_bool(0.15) {
                *v = Rational::one();
            }
        }
    }
    let k = rng.gen_range(1..=n);
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    for s in 0..k {
        a[nodes[s]][nodes[(s + 1) % k]] = Rational::one();
    }
    similarity(rng, a)
}

/// `X⁻¹AX` with `x` drawn from a small set.
pub fn similarity<R: Rng>(rng: &mut R, a: Vec<Vec<Rational>>) -> MaxMatrix<Rational> {
    let xs = [r(1, 3), r(1, 2), r(1, 1), r(2, 1), r(3, 1)];
    let n = a.len();
    let x: Vec<Rational> = (0..n).map(|_| pick(rng, &xs)).collect();
    mat((0..n)
        .map(|i| (0..n).map(|j| &a[i][j] * &x[j] / &x[i]).collect())
        .collect())
}

/// All simple cycles as closed node lists starting at their smallest node.
pub fn simple_cycles(n: usize, edge: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    fn dfs(
        start: usize,
        v: usize,
        n: usize,
        edge: &dyn Fn(usize, usize) -> bool,
        path: &mut Vec<usize>,
        on: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for w in start..n {
            if !edge(v, w) {
                continue;
            }
            if w == start {
                let mut c = path.clone();
                c.push(start);
                out.push(c);
            } else if !on[w] {
                on[w] = true;
                path.push(w);
                dfs(start, w, n, edge, path, on, out);
                path.pop();
                on[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..n {
        let mut on = vec![false; n];
        on[s] = true;
        let mut path = vec![s];
        dfs(s, s, n, &edge, &mut path, &mut on, &mut out);
    }
    out
}

pub fn rational_cycles(a: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    simple_cycles(a.len(), |i, j| !a[i][j].is_zero())
}

pub fn cycle_weight(a: &[Vec<Rational>], c: &[usize]) -> Rational {
    c.windows(2).fold(Rational::one(), |w, e| w * &a[e[0]][e[1]])
}

/// Compares geometric means `w1^(1/l1)` and `w2^(1/l2)`.
pub fn cmp_mean(w1: &Rational, l1: usize, w2: &Rational, l2: usize) -> Ordering {
    rpow(w1, l2).cmp(&rpow(w2, l1))
}

/// Maximum cycle mean by enumeration, as (weight, length); `None` if acyclic.
pub fn oracle_lambda(a: &[Vec<Rational>]) -> Option<(Rational, usize)> {
    let mut best: Option<(Rational, usize)> = None;
    for c in rational_cycles(a) {
        let w = cycle_weight(a, &c);
        let l = c.len() - 1;
        if best
            .as_ref()
            .is_none_or(|(bw, bl)| cmp_mean(&w, l, bw, *bl) == Ordering::Greater)
        {
            best = Some((w, l));
        }
    }
    best
}

/// Largest simple-cycle weight by enumeration.
pub fn oracle_max_cycle_weight(a: &[Vec<Rational>]) -> Option<Rational> {
    rational_cycles(a).iter().map(|c| cycle_weight(a, c)).max()
}

/// Heaviest walk weights of length exactly `t` by direct dynamic programming.
pub fn walk_dp(a: &[Vec<Rational>], t: usize) -> Vec<Vec<Rational>> {
    let n = a.len();
    let mut best: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for _ in 0..t {
        let mut next = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                if best[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let w = &best[i][k] * &a[k][j];
                    if w > next[i][j] {
                        next[i][j] = w;
                    }
                }
            }
        }
        best = next;
    }
    best
}

/// Critical simple cycles of a λ = 1 matrix.
pub fn unit_cycles(a: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    rational_cycles(a)
        .into_iter()
        .filter(|c| cycle_weight(a, c).is_one())
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Cyclicity of the critical graph of a λ = 1 matrix: cycles sharing nodes
/// are grouped, gcd of lengths per group, lcm over groups.
pub fn oracle_cyclicity(a: &[Vec<Rational>]) -> usize {
    let n = a.len();
    let cycles = unit_cycles(a);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let root = find(p, p[x]);
            p[x] = root;
        }
        p[x]
    }
    for c in &cycles {
        for w in c.windows(2) {
            let (x, y) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[x] = y;
        }
    }
    let mut g = vec![0usize; n];
    for c in &cycles {
        let root = find(&mut parent, c[0]);
        g[root] = gcd(g[root], c.len() - 1);
    }
    g.into_iter()
        .filter(|&v| v > 0)
        .fold(1, |acc, v| acc / gcd(acc, v) * v)
}

/// Max-plus matrix with integer (or half-integer) logarithms and a planted
/// Hamiltonian cycle.
pub fn random_max_plus<R: Rng>(rng: &mut R, n: usize, density: f64) -> MaxMatrix<MaxPlus<Rational>> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut on_cycle = vec![vec![false; n]; n];
    for k in 0..n {
        on_cycle[perm[k]][perm[(k + 1) % n]] = true;
    }
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if on_cycle[i][j] || rng.gen_bool(density) {
                        MaxPlus::finite(r(rng.gen_range(-8..=8), rng.gen_range(1..=2)))
                    } else {
                        MaxPlus::neg_inf()
                    }
                })
                .collect()
        })
        .collect();
    MaxMatrix::from_rows(rows).unwrap()
}

/// Max-times product of rational row matrices.
pub fn mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![Rational::zero(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                let w = &a[i][k] * &bk[j];
                if w > out[i][j] {
                    out[i][j] = w;
                }
            }
        }
    }
    out
}

/// `A¹, …, Aᵐ` (index `t - 1` holds `Aᵗ`).
pub fn power_sequence(a: &[Vec<Rational>], m: usize) -> Vec<Vec<Vec<Rational>>> {
    let mut out = vec![a.to_vec()];
    while out.len() < m {
        let next = mul(out.last().unwrap(), a);
        out.push(next);
    }
    out
}

/// Nodes on some unit-weight simple cycle.
pub fn unit_cycle_nodes(a: &[Vec<Rational>]) -> Vec<bool> {
    let mut on = vec![false; a.len()];
    for c in unit_cycles(a) {
        for &v in &c {
            on[v] = true;
        }
    }
    on
}

/// Edges on some unit-weight simple cycle.
pub fn unit_cycle_edges(a: &[Vec<Rational>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut on = vec![vec![false; n]; n];
    for c in unit_cycles(a) {
        for e in c.windows(2) {
            on[e[0]][e[1]] = true;
        }
    }
    on
}

/// Heaviest length-`t` walk from `i` to `j` through a node of `mark`.
pub fn strong_walk(a: &[Vec<Rational>], mark: &[bool], i: usize, j: usize, t: usize) -> Rational {
    let n = a.len();
    // w[v][f]: heaviest walk i → v; f = a marked node was visited.
    let mut w = vec![[Rational::zero(), Rational::zero()]; n];
    w[i][usize::from(mark[i])] = Rational::one();
    for _ in 0..t {
        let mut next = vec![[Rational::zero(), Rational::zero()]; n];
        for v in 0..n {
            for f in 0..2 {
                if w[v][f].is_zero() {
                    continue;
                }
                for u in 0..n {
                    if a[v][u].is_zero() {
                        continue;
                    }
                    let g = usize::from(f == 1 || mark[u]);
                    let x = &w[v][f] * &a[v][u];
                    if x > next[u][g] {
                        next[u][g] = x;
                    }
                }
            }
        }
        w = next;
    }
    w[j][1].clone()
}

/// Whether `v` reaches `u` in a Boolean graph (walks of length ≥ 1 when
/// `v == u`).
pub fn reaches(adj: &[Vec<bool>], v: usize, u: usize) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&w| adj[v][w]).collect();
    for &w in &stack {
        seen[w] = true;
    }
    while let Some(w) = stack.pop() {
        if w == u {
            return true;
        }
        for x in 0..n {
            if adj[w][x] && !seen[x] {
                seen[x] = true;
                stack.push(x);
            }
        }
    }
    false
}

/// Node sets of the nontrivial strongly connected components, sorted.
pub fn nontrivial_sccs(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut done = vec![false; n];
    for v in 0..n {
        if done[v] || !reaches(adj, v, v) {
            continue;
        }
        let comp: Vec<usize> = (0..n)
            .filter(|&u| u == v || (reaches(adj, v, u) && reaches(adj, u, v)))
            .collect();
        for &u in &comp {
            done[u] = true;
        }
        out.push(comp);
    }
    out.sort();
    out
}

/// Condition 1 of the diagonal dominance theorem, by enumeration: every
/// diagonal entry is nonzero and every cyclic product of off-diagonal
/// entries is at most the product of the diagonal entries it visits, in
/// absolute value.
pub fn cyclic_product_condition(b: &[Vec<Rational>]) -> bool {
    let n = b.len();
    let abs = |x: &Rational| if *x < Rational::zero() { -x.clone() } else { x.clone() };
    if (0..n).any(|i| b[i][i].is_zero()) {
        return false;
    }
    simple_cycles(n, |i, j| i != j && !b[i][j].is_zero())
        .iter()
        .all(|c| {
            let off = c.windows(2).fold(Rational::one(), |p, e| p * abs(&b[e[0]][e[1]]));
            let diag = c[..c.len() - 1].iter().fold(Rational::one(), |p, &k| p * abs(&b[k][k]));
            off <= diag
        })
}

/// Max-plus cycle-cover predicate: every edge is a minimum-weight edge of
/// some cycle through it.
pub fn balanced_cycle_cover(m: &[Vec<Option<Rational>>]) -> bool {
    let n = m.len();
    (0..n).all(|i| {
        (0..n).all(|j| match &m[i][j] {
            None => true,
            Some(w) => {
                if i == j {
                    return true;
                }
                let adj: Vec<Vec<bool>> = (0..n)
                    .map(|p| (0..n).map(|q| m[p][q].as_ref().is_some_and(|v| v >= w)).collect())
                    .collect();
                // j → i inside the threshold graph, or i == j handled above.
                let mut seen = vec![false; n];
                let mut stack = vec![j];
                seen[j] = true;
                while let Some(v) = stack.pop() {
                    if v == i {
                        return true;
                    }
                    for u in 0..n {
                        if adj[v][u] && !seen[u] {
                            seen[u] = true;
                            stack.push(u);
                        }
                    }
                }
                false
            }
        })
    })
}

/// Max-plus cut predicate over every nonempty proper subset.
pub fn balanced_cuts(m: &[Vec<Option<Rational>>]) -> bool {
    let n = m.len();
    (1..(1u32 << n) - 1).all(|mask| {
        let inside = |v: usize| mask >> v & 1 == 1;
        let (mut out, mut back): (Option<Rational>, Option<Rational>) = (None, None);
        for i in 0..n {
            for j in 0..n {
                let Some(w) = &m[i][j] else { continue };
                let slot = match (inside(i), inside(j)) {
                    (true, false) => &mut out,
                    (false, true) => &mut back,
                    _ => continue,
                };
                if slot.as_ref().is_none_or(|s| w > s) {
                    *slot = Some(w.clone());
                }
            }
        }
        out == back
    })
}

pub fn log_rows(m: &MaxMatrix<MaxPlus<Rational>>) -> Vec<Vec<Option<Rational>>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(|v| v.0).collect()).collect()
}
