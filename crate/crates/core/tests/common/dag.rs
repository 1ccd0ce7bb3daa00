//! Brute-force causal combinatorics on small DAGs, independent of the library.

use qchlab::{CausalGraph, Edge, Vertex};

/// Vertex ids are assigned out of topological order on purpose.
pub fn vertex_name(i: usize, n: usize) -> String {
    format!("v{}", (i * 3 + 1) % n.max(1) + 10 * i)
}

/// Every DAG on `n` vertices up to relabelling: edges `i -> j` with `i < j`, one per bit of `mask`.
pub fn all_upper_dags(n: usize) -> impl Iterator<Item = Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let count = 1usize << pairs.len();
    (0..count).map(move |mask| pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect())
}

pub fn build(n: usize, edges: &[(usize, usize)]) -> CausalGraph {
    CausalGraph::new(
        (0..n).rev().map(|i| Vertex { id: vertex_name(i, n), dim: 1 }).collect(),
        edges
            .iter()
            .map(|&(s, t)| Edge { id: format!("e{s}{t}"), source: vertex_name(s, n), target: vertex_name(t, n) })
            .collect(),
    )
    .unwrap()
}

/// All maximal directed paths starting at `x`, listed explicitly.
pub fn maximal_paths(edges: &[(usize, usize)], x: usize) -> Vec<Vec<usize>> {
    let succ: Vec<usize> = edges.iter().filter(|e| e.0 == x).map(|e| e.1).collect();
    if succ.is_empty() {
        return vec![vec![x]];
    }
    let mut out = Vec::new();
    for s in succ {
        for mut tail in maximal_paths(edges, s) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

pub fn reaches(edges: &[(usize, usize)], a: usize, b: usize) -> bool {
    maximal_paths(edges, a).iter().any(|p| p[1..].contains(&b))
}

/// `None` when `set` is not an antichain, else whether every maximal path from `x` meets it after `x`.
pub fn complete_future_oracle(edges: &[(usize, usize)], set: &[usize], x: usize) -> Option<bool> {
    for &a in set {
        for &b in set {
            if a != b && reaches(edges, a, b) {
                return None;
            }
        }
    }
    Some(maximal_paths(edges, x).iter().all(|p| p[1..].iter().any(|v| set.contains(v))))
}

/// Runs the comparison on every DAG with at most `max_n` vertices; returns (queries, disagreements).
pub fn compare_complete_futures(max_n: usize) -> (usize, usize) {
    let mut queries = 0;
    let mut bad = 0;
    for n in 1..=max_n {
        for edges in all_upper_dags(n) {
            let g = build(n, &edges);
            for mask in 1..(1usize << n) {
                let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let names: Vec<String> = set.iter().map(|&i| vertex_name(i, n)).collect();
                for x in 0..n {
                    queries += 1;
                    let expected = complete_future_oracle(&edges, &set, x);
                    let got = match g.is_complete_future(&names, &vertex_name(x, n)) {
                        Ok(b) => Some(b),
                        Err(e) if e.code() == "E_NOT_ACAUSAL" => None,
                        Err(e) => panic!("unexpected error {e}"),
                    };
                    if got != expected {
                        bad += 1;
                    }
                }
            }
        }
    }
    (queries, bad)
}
