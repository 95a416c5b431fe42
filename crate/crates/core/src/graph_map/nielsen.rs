//! Bounded search for Nielsen paths: reduced paths with `[f^n(rho)] = g rho`.
//!
//! Paths starting at a factor vertex are normalised to a zero first decoration
//! (the lexicographically least representative of the `A_i`-orbit). Terminal
//! decorations are irrelevant to the underlying tree path and are dropped.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::{EdgePath, GraphMap, OrientedEdge, StandardGraph, Step, Vertex};
use crate::words::{Syllable, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NielsenWitness {
    pub path: EdgePath,
    pub n: usize,
    pub g: Word,
}

/// Nonzero vectors with entries in `[-bound, bound]`, in a fixed order.
fn decorations(rank: usize, bound: i64) -> Vec<Vec<BigInt>> {
    let width = (2 * bound + 1) as usize;
    let total = width.pow(rank as u32);
    (0..total)
        .map(|mut code| {
            (0..rank)
                .map(|_| {
                    let x = (code % width) as i64 - bound;
                    code /= width;
                    BigInt::from(x)
                })
                .collect::<Vec<_>>()
        })
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect()
}

/// Steps leaving the end of `path` that keep it reduced.
fn continuations(graph: &StandardGraph, path: &EdgePath, bound: i64) -> Vec<Step> {
    let at = path.end(graph);
    match at {
        Vertex::Base => graph
            .base_directions()
            .into_iter()
            .filter(|e| path.steps().last().is_none_or(|s| s.edge.rev() != *e))
            .map(|edge| Step {
                decoration: Vec::new(),
                edge,
            })
            .collect(),
        Vertex::Factor(i) => {
            let edge = OrientedEdge::backward(i);
            if path.is_empty() {
                vec![Step {
                    decoration: vec![BigInt::zero(); graph.vertex_rank(at)],
                    edge,
                }]
            } else {
                decorations(graph.vertex_rank(at), bound)
                    .into_iter()
                    .map(|decoration| Step { decoration, edge })
                    .collect()
            }
        }
    }
}

/// Frame translation `T_n(i)` with `f^n(v_i) = T_n(i) v_i`.
fn frame_translations(m: &GraphMap, n_max: usize) -> Vec<Vec<Word>> {
    let phi = m.automorphism();
    let p = phi.presentation().num_factors();
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(vec![Word::identity(phi.presentation()); p]);
    for n in 1..=n_max {
        let row = (0..p)
            .map(|i| &phi.apply(&out[n - 1][i]).expect("same presentation") * phi.conjugator(i))
            .collect();
        out.push(row);
    }
    out
}

/// Compares `image` with `path` up to a shift of the first decoration.
fn match_shift(path: &EdgePath, image: &EdgePath) -> Option<Vec<BigInt>> {
    if path.start() != image.start() || path.len() != image.len() || path.is_empty() {
        return None;
    }
    let (p0, i0) = (&path.steps()[0], &image.steps()[0]);
    if p0.edge != i0.edge || path.steps()[1..] != image.steps()[1..] {
        return None;
    }
    Some(i0.decoration.iter().zip(&p0.decoration).map(|(a, b)| a - b).collect())
}

fn witness_for(m: &GraphMap, frames: &[Vec<Word>], path: &EdgePath, n_max: usize) -> Option<NielsenWitness> {
    let pres = m.automorphism().presentation();
    let mut image = path.clone();
    for (n, frame) in frames.iter().enumerate().take(n_max + 1).skip(1) {
        image = m.apply_path(&image).without_terminal();
        if let Some(shift) = match_shift(path, &image) {
            let g = match path.start() {
                Vertex::Base => Word::identity(pres),
                Vertex::Factor(i) => {
                    let a = Word::reduce(pres, [Syllable::Factor { factor: i, exponents: shift }]).expect("valid");
                    &frame[i] * &a
                }
            };
            return Some(NielsenWitness {
                path: path.clone(),
                n,
                g,
            });
        }
    }
    None
}

/// All reduced paths with at most `len_bound` edges and decoration entries in
/// `[-len_bound, len_bound]` that are Nielsen for some `n <= exp_bound`.
/// Witnesses are sorted by path.
pub fn nielsen_search(m: &GraphMap, len_bound: usize, exp_bound: usize) -> Vec<NielsenWitness> {
    let graph = m.graph();
    let bound = len_bound as i64;
    let frames = frame_translations(m, exp_bound);
    let mut roots = vec![EdgePath::empty(graph, Vertex::Base)];
    roots.extend((0..graph.presentation().num_factors()).map(|i| EdgePath::empty(graph, Vertex::Factor(i))));
    let firsts: Vec<EdgePath> = roots
        .iter()
        .flat_map(|r| {
            continuations(graph, r, bound).into_iter().map(move |s| {
                let mut p = r.clone();
                p.steps.push(s);
                p.terminal = vec![BigInt::zero(); graph.vertex_rank(p.end(graph))];
                p
            })
        })
        .collect();
    let mut found: Vec<NielsenWitness> = firsts
        .par_iter()
        .flat_map_iter(|first| {
            let mut out = Vec::new();
            let mut stack = vec![first.clone()];
            while let Some(path) = stack.pop() {
                if let Some(w) = witness_for(m, &frames, &path, exp_bound) {
                    out.push(w);
                }
                if path.len() < len_bound {
                    for s in continuations(graph, &path, bound) {
                        let mut next = path.clone();
                        next.steps.push(s);
                        next.terminal = vec![BigInt::zero(); graph.vertex_rank(next.end(graph))];
                        stack.push(next);
                    }
                }
            }
            out
        })
        .collect();
    found.sort_by(|a, b| a.path.cmp(&b.path).then(a.n.cmp(&b.n)));
    found
}

/// Independent check through group elements: the endpoints of `g * rho` are the
/// images of the endpoints of `rho` under `f^n`.
pub fn verify_nielsen(m: &GraphMap, w: &NielsenWitness) -> bool {
    let graph = m.graph();
    let phi = m.automorphism();
    let frames = frame_translations(m, w.n);
    let elem = w.path.end_element(graph);
    let phin = phi.apply_power(w.n as i64, &elem).expect("same presentation");
    let start_ok = match w.path.start() {
        Vertex::Base => w.g.is_identity(),
        Vertex::Factor(i) => (&frames[w.n][i].inverse() * &w.g)
            .double_coset_rep(i, i)
            .map(|r| r.is_identity())
            .unwrap_or(false),
    };
    let gw = &w.g * &elem;
    let end_ok = match w.path.end(graph) {
        Vertex::Base => gw == phin,
        Vertex::Factor(j) => {
            let target = &phin * &frames[w.n][j];
            let (rest, _) = (&target.inverse() * &gw).split_trailing(crate::words::Slot::Factor(j));
            rest.split_leading(crate::words::Slot::Factor(j)).1.is_identity()
        }
    };
    start_ok && end_ok
}

impl EdgePath {
    /// Element `w` with `end = w * (end vertex)` for a path starting at the base vertex
    /// or at a factor vertex in its own frame (terminal decoration ignored).
    pub fn end_element(&self, graph: &StandardGraph) -> Word {
        self.without_terminal().element(graph)
    }
}
