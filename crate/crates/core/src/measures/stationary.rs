use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ulam::UlamMatrix;
use crate::error::{Error, Result};
use crate::geometry::Rational;

pub const MAX_ITERATIONS: usize = 1_000_000;

/// One closed communicating class and its stationary vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryComponent {
    pub support: Vec<usize>,
    /// Rational reading of `values`, denominators at most 10^9.
    pub weights: Vec<Rational>,
    #[serde(skip)]
    pub values: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Closed classes of the positivity graph, each with the stationary vector
/// of the restricted chain found by lazy power iteration `v ← (v + vM)/2`.
pub fn stationary_components(m: &UlamMatrix, tol: f64) -> Result<Vec<StationaryComponent>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let n = m.n_bins();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, m.nnz());
    let nodes: Vec<NodeIndex> = (0..n).map(|_| graph.add_node(())).collect();
    for (i, row) in m.rows().iter().enumerate() {
        for (j, _) in row {
            graph.add_edge(nodes[i], nodes[*j], ());
        }
    }
    let mut comp_of = vec![0usize; n];
    let sccs = tarjan_scc(&graph);
    for (c, scc) in sccs.iter().enumerate() {
        for v in scc {
            comp_of[v.index()] = c;
        }
    }
    let mut closed: Vec<Vec<usize>> = sccs
        .iter()
        .enumerate()
        .filter(|(c, scc)| {
            scc.iter()
                .all(|v| m.rows()[v.index()].iter().all(|(j, _)| comp_of[*j] == *c))
        })
        .map(|(_, scc)| {
            let mut s: Vec<usize> = scc.iter().map(|v| v.index()).collect();
            s.sort_unstable();
            s
        })
        .collect();
    closed.sort();
    closed.into_par_iter().map(|support| power_iterate(m, support, tol)).collect()
}

fn power_iterate(m: &UlamMatrix, support: Vec<usize>, tol: f64) -> Result<StationaryComponent> {
    let k = support.len();
    let mut local = vec![usize::MAX; m.n_bins()];
    for (l, &g) in support.iter().enumerate() {
        local[g] = l;
    }
    let rows: Vec<Vec<(usize, f64)>> = support
        .iter()
        .map(|&g| m.rows()[g].iter().map(|(j, v)| (local[*j], v.to_f64())).collect())
        .collect();
    let mut v = vec![1.0 / k as f64; k];
    let mut w = vec![0.0; k];
    for it in 0..MAX_ITERATIONS {
        w.iter_mut().for_each(|x| *x = 0.0);
        for (vi, row) in v.iter().zip(&rows) {
            for &(j, p) in row {
                w[j] += vi * p;
            }
        }
        let residual: f64 = v.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum();
        if residual < tol {
            let total: f64 = w.iter().sum();
            let values: Vec<f64> = w.iter().map(|x| x / total).collect();
            let weights = values.iter().map(|&x| Rational::approximate(x, 1_000_000_000)).collect();
            return Ok(StationaryComponent { support, weights, values, residual, iterations: it });
        }
        for (a, b) in v.iter_mut().zip(&w) {
            *a = 0.5 * (*a + b);
        }
    }
    Err(Error::NonConvergence(MAX_ITERATIONS))
}
