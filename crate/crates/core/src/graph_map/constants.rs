//! Bounded cancellation and the critical constant.

use serde::Serialize;

use super::gates::gate_structure;
use super::growth::{is_irreducible_matrix, pf_growth_rate, PfEstimate};
use super::{build_standard_map, EdgePath, GraphError, GraphMap, OrientedEdge, Step, Vertex};

/// Longest common prefix (in steps) of the images of two same-gate base directions.
pub fn one_step_prefix_constant(m: &GraphMap, depth: usize) -> usize {
    let gates = gate_structure(m, depth);
    let images: Vec<EdgePath> = gates
        .base_directions
        .iter()
        .map(|&e| {
            m.image_of_step(
                Vertex::Base,
                &Step {
                    decoration: Vec::new(),
                    edge: e,
                },
            )
        })
        .collect();
    let mut best = 0;
    for a in 0..images.len() {
        for b in a + 1..images.len() {
            if gates.gate_of[a] != gates.gate_of[b] {
                continue;
            }
            let common = images[a]
                .steps()
                .iter()
                .zip(images[b].steps())
                .take_while(|(x, y)| x == y)
                .count();
            best = best.max(common);
        }
    }
    best
}

/// Largest distance a vertex is moved by `h . f`, where `h` represents the inverse.
fn inverse_displacement(m: &GraphMap, h: &GraphMap) -> usize {
    let phi = m.automorphism();
    let graph = m.graph();
    (0..graph.presentation().num_factors())
        .map(|i| {
            let k = &phi.inverse().apply(phi.conjugator(i)).expect("same presentation")
                * h.automorphism().conjugator(i);
            let mut path = EdgePath::empty(graph, Vertex::Factor(i));
            path.push(
                graph,
                Step {
                    decoration: vec![0.into(); graph.presentation().factor_rank(i)],
                    edge: OrientedEdge::backward(i),
                },
            );
            path.extend(graph, &EdgePath::from_word(graph, &k));
            path.push(
                graph,
                Step {
                    decoration: Vec::new(),
                    edge: OrientedEdge::forward(i),
                },
            );
            path.len()
        })
        .max()
        .unwrap_or(0)
}

/// Upper bound on the cancellation between `[f(alpha)]` and `[f(beta)]` for any
/// reduced concatenation `alpha beta`, in edges.
///
/// With `L_f`, `L_h` the Lipschitz constants of the map and of the map of the
/// inverse automorphism and `D` the displacement of `h . f`, the bound is
/// `L_f (L_h L_f + 2D) + floor(L_f / 2)`. It is never below the one-step prefix constant.
pub fn bounded_cancellation_constant(m: &GraphMap, depth: usize) -> Result<usize, GraphError> {
    let h = build_standard_map(&m.automorphism().inverse())?;
    let lf = m.combinatorial_lipschitz();
    let lh = h.combinatorial_lipschitz();
    let d = inverse_displacement(m, &h);
    let bound = lf * (lh * lf + 2 * d) + lf / 2;
    Ok(bound.max(one_step_prefix_constant(m, depth)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub growth: PfEstimate,
    pub irreducible: bool,
    /// Cancellation bound used in the critical constant.
    pub c_f: usize,
    /// Common prefix of same-gate direction images under one application.
    pub one_step_prefix: usize,
    /// Transversality constant.
    pub a: f64,
    /// `2 C_f / (lambda / A - 1)`, defined when `lambda > A`.
    pub critical_constant: Option<f64>,
    /// Left Perron eigenvector (normalised to sum 1) when the transition matrix is irreducible.
    pub left_eigenvector: Option<Vec<f64>>,
    pub lipschitz: String,
}

fn left_eigenvector(m: &crate::matrix::IntegerMatrix) -> Vec<f64> {
    let rows = m.to_f64_rows();
    let n = rows.len();
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        let y: Vec<f64> = (0..n).map(|j| x[j] + (0..n).map(|i| x[i] * rows[i][j]).sum::<f64>()).collect();
        let s: f64 = y.iter().sum();
        let y: Vec<f64> = y.into_iter().map(|v| v / s).collect();
        let diff = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if diff < 1e-15 {
            break;
        }
    }
    x
}

pub fn constants_report(m: &GraphMap, depth: usize, a: f64) -> Result<ConstantsReport, GraphError> {
    let t = m.transition_matrix();
    let growth = pf_growth_rate(&t)?;
    let irreducible = is_irreducible_matrix(&t)?;
    let c_f = bounded_cancellation_constant(m, depth)?;
    let ratio = growth.lambda / a;
    let critical_constant = (ratio > 1.0 + growth.error_bound).then(|| 2.0 * c_f as f64 / (ratio - 1.0));
    Ok(ConstantsReport {
        growth,
        irreducible,
        c_f,
        one_step_prefix: one_step_prefix_constant(m, depth),
        a,
        critical_constant,
        left_eigenvector: irreducible.then(|| left_eigenvector(&t)),
        lipschitz: m.lipschitz().to_string(),
    })
}
