#![allow(dead_code)]

use fpaut_core::graph_map::{OrientedEdge, Step};
use fpaut_core::{parse_word, Automorphism, EdgePath, Presentation, StandardGraph, Syllable, Vertex, Word};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

pub fn aut(ranks: Vec<usize>, k: usize, fwd: &[&str], bwd: &[&str]) -> Automorphism {
    let p = Presentation::new(ranks, k).unwrap();
    let words = |ws: &[&str]| ws.iter().map(|w| parse_word(w, &p).unwrap()).collect::<Vec<_>>();
    Automorphism::new(&p, words(fwd), words(bwd)).unwrap()
}

/// `x1 -> x1 x2, x2 -> x1` on F_2.
pub fn fibonacci() -> Automorphism {
    aut(vec![], 2, &["x1 x2", "x1"], &["x2", "x2^-1 x1"])
}

/// Identity on A_1, conjugation by `a1.1` on A_2, in Z^2 * Z^2.
pub fn toral_twist() -> Automorphism {
    aut(
        vec![2, 2],
        0,
        &["a1.1", "a1.2", "a1.1 a2.1 a1.1^-1", "a1.1 a2.2 a1.1^-1"],
        &["a1.1", "a1.2", "a1.1^-1 a2.1 a1.1", "a1.1^-1 a2.2 a1.1"],
    )
}

/// Z^2 * Z^3 with hyperbolic matrices on both factors.
pub fn intro_z2z3() -> Automorphism {
    aut(
        vec![2, 3],
        0,
        &["a1.1^2 a1.2", "a1.1 a1.2", "a2.2", "a2.3", "a2.1 a2.2"],
        &["a1.1 a1.2^-1", "a1.1^-1 a1.2^2", "a2.1^-1 a2.3", "a2.1", "a2.2"],
    )
}

/// Z * Z * F_2: A_1 fixed, A_2 conjugated by x1, free letters mixed.
pub fn mixing() -> Automorphism {
    aut(
        vec![1, 1],
        2,
        &["a1.1", "x1 a2.1 x1^-1", "x1 x2 a1.1", "x1"],
        &["a1.1", "x2^-1 a2.1 x2", "x2", "x2^-1 x1 a1.1^-1"],
    )
}

/// `x1 -> x2, x2 -> x3, x3 -> x1 x2` on F_3.
pub fn free_rank_three() -> Automorphism {
    aut(vec![], 3, &["x2", "x3", "x1 x2"], &["x3 x1^-1", "x1", "x2"])
}

/// Z^2 * F_1 with a hyperbolic factor matrix and `x1 -> a1.1 x1`.
pub fn anosov_letter() -> Automorphism {
    aut(
        vec![2],
        1,
        &["a1.1^2 a1.2", "a1.1 a1.2", "a1.1 x1"],
        &["a1.1 a1.2^-1", "a1.1^-1 a1.2^2", "a1.1^-1 a1.2 x1"],
    )
}

pub fn all_fixtures() -> Vec<(&'static str, Automorphism)> {
    vec![
        ("fibonacci", fibonacci()),
        ("toral_twist", toral_twist()),
        ("intro_z2z3", intro_z2z3()),
        ("mixing", mixing()),
        ("free_rank_three", free_rank_three()),
        ("anosov_letter", anosov_letter()),
    ]
}

/// A random raw (unreduced) sequence of syllables with small exponents.
pub fn random_raw<R: Rng>(rng: &mut R, pres: &Presentation, len: usize, max_exp: i64) -> Vec<Syllable> {
    let p = pres.num_factors();
    let k = pres.free_rank();
    (0..len)
        .map(|_| {
            let slot = rng.gen_range(0..p + k);
            if slot < p {
                let exps: Vec<i64> = (0..pres.factor_rank(slot))
                    .map(|_| rng.gen_range(-max_exp..=max_exp))
                    .collect();
                Syllable::factor(slot, exps)
            } else {
                let mut e = rng.gen_range(-max_exp..=max_exp);
                if e == 0 {
                    e = 1;
                }
                Syllable::free(slot - p, e)
            }
        })
        .collect()
}

pub fn random_word<R: Rng>(rng: &mut R, pres: &Presentation, max_len: usize, max_exp: i64) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::reduce(pres, random_raw(rng, pres, len, max_exp)).unwrap()
}

/// Random reduced paths `alpha` from the base vertex and `beta` continuing it so
/// that `alpha beta` is reduced. Terminal decorations are zero.
pub fn random_concatenation<R: Rng>(
    rng: &mut R,
    graph: &StandardGraph,
    max_len: usize,
) -> (EdgePath, EdgePath) {
    let total = rng.gen_range(2..=2 * max_len);
    let split = rng.gen_range(1..total);
    let mut steps: Vec<Step> = Vec::new();
    let mut at = Vertex::Base;
    while steps.len() < total {
        let step = match at {
            Vertex::Base => {
                let dirs = graph.base_directions();
                Step {
                    decoration: Vec::new(),
                    edge: dirs[rng.gen_range(0..dirs.len())],
                }
            }
            Vertex::Factor(i) => {
                let rank = graph.vertex_rank(at);
                Step {
                    decoration: (0..rank).map(|_| BigInt::from(rng.gen_range(-2i64..=2))).collect(),
                    edge: OrientedEdge::backward(i),
                }
            }
        };
        let backtracks = steps
            .last()
            .is_some_and(|s| s.edge == step.edge.rev() && step.decoration.iter().all(Zero::is_zero));
        if backtracks {
            continue;
        }
        at = graph.terminus(step.edge);
        steps.push(step);
    }
    let start_of = |k: usize| if k == 0 { Vertex::Base } else { graph.terminus(steps[k - 1].edge) };
    let zero = |v: Vertex| vec![BigInt::zero(); graph.vertex_rank(v)];
    let alpha = EdgePath::from_steps(graph, Vertex::Base, steps[..split].to_vec(), zero(start_of(split))).unwrap();
    let beta = EdgePath::from_steps(graph, start_of(split), steps[split..].to_vec(), zero(at)).unwrap();
    (alpha, beta)
}
