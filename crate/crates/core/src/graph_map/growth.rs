//! Perron-Frobenius growth rate of nonnegative integer matrices.

use num_traits::{Signed, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::GraphError;
use crate::matrix::IntegerMatrix;

/// Spectral radius with a rigorous bracket `[lower, upper]` (up to floating point rounding).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PfEstimate {
    pub lambda: f64,
    pub lower: f64,
    pub upper: f64,
    pub error_bound: f64,
    #[serde(skip)]
    pub iterations: usize,
}

fn check(m: &IntegerMatrix) -> Result<(), GraphError> {
    if !m.is_square() || !m.is_nonnegative() {
        return Err(GraphError::NotNonnegativeSquare);
    }
    if m.is_zero() {
        return Err(GraphError::ZeroMatrix);
    }
    Ok(())
}

fn components(m: &IntegerMatrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if m[(i, j)].is_positive() {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .collect()
}

/// Strong connectivity of the support digraph.
pub fn is_irreducible_matrix(m: &IntegerMatrix) -> Result<bool, GraphError> {
    check(m)?;
    Ok(components(m).len() == 1)
}

/// Collatz-Wielandt bracketing on one strongly connected block, iterating `B + I`
/// so that periodic blocks converge.
fn block_radius(block: &[Vec<f64>]) -> (f64, f64, usize) {
    let n = block.len();
    let mut x = vec![1.0f64; n];
    let mut lo = 0.0;
    let mut hi = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..100_000 {
        iterations = it + 1;
        let y: Vec<f64> = (0..n)
            .map(|i| x[i] + (0..n).map(|j| block[i][j] * x[j]).sum::<f64>())
            .collect();
        let ratios = (0..n).map(|i| y[i] / x[i]);
        lo = ratios.clone().fold(f64::INFINITY, f64::min);
        hi = ratios.fold(0.0, f64::max);
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / norm).collect();
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
    }
    (lo - 1.0, hi - 1.0, iterations)
}

pub fn pf_growth_rate(m: &IntegerMatrix) -> Result<PfEstimate, GraphError> {
    check(m)?;
    let rows = m.to_f64_rows();
    let mut best = (0.0f64, 0.0f64);
    let mut iterations = 0;
    for comp in components(m) {
        let block: Vec<Vec<f64>> = comp
            .iter()
            .map(|&i| comp.iter().map(|&j| rows[i][j]).collect())
            .collect();
        if comp.len() == 1 && block[0][0].is_zero() {
            continue;
        }
        let (lo, hi, it) = block_radius(&block);
        iterations += it;
        best = (best.0.max(lo), best.1.max(hi));
    }
    let (lower, upper) = best;
    Ok(PfEstimate {
        lambda: (lower + upper) / 2.0,
        lower,
        upper,
        error_bound: (upper - lower) / 2.0,
        iterations,
    })
}

/// Row sums as a crude upper bound, used in diagnostics.
pub fn max_row_sum(m: &IntegerMatrix) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().filter_map(|x| x.to_f64()).sum::<f64>())
        .fold(0.0, f64::max)
}
