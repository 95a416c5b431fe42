//! Gates, legality, train-track verification and angles.
//!
//! At a factor vertex the direction map multiplies decorations by the invertible
//! matrix `M_i`, so distinct directions never merge and every gate there is a
//! singleton. Only the `p + 2k` base directions need an actual partition, which
//! is computed from the direction map iterated `depth` times.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{EdgePath, GraphError, GraphMap, OrientedEdge, StandardGraph, Vertex};

/// A direction at a vertex: the decoration applied there, then the edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub vertex: Vertex,
    pub decoration: Vec<BigInt>,
    pub edge: OrientedEdge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GateStructure {
    pub depth: usize,
    /// Base directions, indexed as in [`StandardGraph::base_directions`].
    pub base_directions: Vec<OrientedEdge>,
    /// Direction map on base directions (indices).
    pub direction_map: Vec<usize>,
    /// Gate label of each base direction.
    pub gate_of: Vec<usize>,
    pub num_base_gates: usize,
    /// Whether the partition can no longer change at larger depth.
    pub stable: bool,
}

impl GateStructure {
    pub fn base_gates(&self) -> Vec<Vec<OrientedEdge>> {
        let mut gates = vec![Vec::new(); self.num_base_gates];
        for (d, &g) in self.gate_of.iter().enumerate() {
            gates[g].push(self.base_directions[d]);
        }
        gates
    }

    fn same_base_gate(&self, graph: &StandardGraph, a: OrientedEdge, b: OrientedEdge) -> Result<bool, GraphError> {
        let ia = graph
            .base_direction_index(a)
            .ok_or_else(|| GraphError::UnknownDirection(format!("{a:?}")))?;
        let ib = graph
            .base_direction_index(b)
            .ok_or_else(|| GraphError::UnknownDirection(format!("{b:?}")))?;
        Ok(self.gate_of[ia] == self.gate_of[ib])
    }
}

/// First step of the image of a base direction, as a base direction index.
fn direction_map(m: &GraphMap) -> Vec<usize> {
    let graph = m.graph();
    graph
        .base_directions()
        .into_iter()
        .map(|e| {
            let img = m.image_of_step(
                Vertex::Base,
                &super::Step {
                    decoration: Vec::new(),
                    edge: e,
                },
            );
            let first = img.steps().first().expect("edge images are nonempty").edge;
            graph.base_direction_index(first).expect("images start at the base")
        })
        .collect()
}

/// Default horizon for the base partition: `2 (p + k) + 4`.
pub fn default_gate_depth(pres: &crate::words::Presentation) -> usize {
    2 * (pres.num_factors() + pres.free_rank()) + 4
}

pub fn gate_structure(m: &GraphMap, depth: usize) -> GateStructure {
    let graph = m.graph();
    let dirs = graph.base_directions();
    let df = direction_map(m);
    let iterate = |d: usize, n: usize| (0..n).fold(d, |x, _| df[x]);
    let keys: Vec<usize> = (0..dirs.len()).map(|d| iterate(d, depth)).collect();
    let mut labels: Vec<usize> = Vec::new();
    let gate_of: Vec<usize> = keys
        .iter()
        .map(|k| match labels.iter().position(|x| x == k) {
            Some(i) => i,
            None => {
                labels.push(*k);
                labels.len() - 1
            }
        })
        .collect();
    let image_size = |n: usize| {
        let mut s: Vec<usize> = (0..dirs.len()).map(|d| iterate(d, n)).collect();
        s.sort_unstable();
        s.dedup();
        s.len()
    };
    let stable = dirs.is_empty() || image_size(depth) == image_size(depth + 1);
    GateStructure {
        depth,
        base_directions: dirs,
        direction_map: df,
        num_base_gates: labels.len(),
        gate_of,
        stable,
    }
}

/// One turn of a path: the vertex, the direction back along the arriving edge and the leaving direction.
struct Turn {
    vertex: Vertex,
    back: OrientedEdge,
    out: OrientedEdge,
    decoration: Vec<BigInt>,
}

fn turns(graph: &StandardGraph, path: &EdgePath) -> Result<Vec<Turn>, GraphError> {
    let steps = path.steps();
    let mut out = Vec::with_capacity(steps.len().saturating_sub(1));
    for s in steps {
        if s.edge.edge >= graph.num_edges() {
            return Err(GraphError::UnknownDirection(format!("edge {}", s.edge.edge)));
        }
    }
    for w in steps.windows(2) {
        out.push(Turn {
            vertex: graph.terminus(w[0].edge),
            back: w[0].edge.rev(),
            out: w[1].edge,
            decoration: w[1].decoration.clone(),
        });
    }
    Ok(out)
}

fn turn_is_legal(graph: &StandardGraph, gates: &GateStructure, t: &Turn) -> Result<bool, GraphError> {
    match t.vertex {
        Vertex::Base => Ok(!gates.same_base_gate(graph, t.back, t.out)?),
        Vertex::Factor(i) => {
            if t.decoration.len() != graph.vertex_rank(Vertex::Factor(i)) {
                return Err(GraphError::UnknownDirection(format!("decoration at v{}", i + 1)));
            }
            Ok(t.back != t.out || t.decoration.iter().any(|x| !x.is_zero()))
        }
    }
}

fn legality_flags(graph: &StandardGraph, path: &EdgePath, gates: &GateStructure) -> Result<Vec<bool>, GraphError> {
    turns(graph, path)?
        .iter()
        .map(|t| turn_is_legal(graph, gates, t))
        .collect()
}

pub fn count_illegal_turns(graph: &StandardGraph, path: &EdgePath, gates: &GateStructure) -> Result<usize, GraphError> {
    Ok(legality_flags(graph, path, gates)?.iter().filter(|&&ok| !ok).count())
}

pub fn is_legal_path(graph: &StandardGraph, path: &EdgePath, gates: &GateStructure) -> Result<bool, GraphError> {
    Ok(count_illegal_turns(graph, path, gates)? == 0)
}

/// Share of the length of `path` lying in maximal legal segments longer than `c`.
pub fn legality_ratio(
    graph: &StandardGraph,
    path: &EdgePath,
    c: &BigRational,
    gates: &GateStructure,
) -> Result<BigRational, GraphError> {
    let flags = legality_flags(graph, path, gates)?;
    let total = path.metric_length(graph);
    if total.is_zero() {
        return Ok(BigRational::zero());
    }
    let mut legal = BigRational::zero();
    let mut segment = BigRational::zero();
    for (k, s) in path.steps().iter().enumerate() {
        segment += graph.length(s.edge.edge);
        let ends_here = k + 1 == path.len() || !flags[k];
        if ends_here {
            if &segment > c {
                legal += &segment;
            }
            segment = BigRational::zero();
        }
    }
    Ok(legal / total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TrainTrackVerdict {
    Holds,
    /// An edge whose image crosses an illegal turn at position `turn`.
    Violated { edge: usize, image: String, turn: usize },
    Undecided { reason: String },
}

/// Checks that every edge image is legal. Illegality is certain at any depth; legality
/// is only certain once the base partition is stable.
pub fn check_train_track(m: &GraphMap, depth: usize) -> TrainTrackVerdict {
    let gates = gate_structure(m, depth);
    let graph = m.graph();
    for (e, img) in m.edge_images().iter().enumerate() {
        let flags = match legality_flags(graph, img, &gates) {
            Ok(f) => f,
            Err(err) => {
                return TrainTrackVerdict::Undecided {
                    reason: err.to_string(),
                }
            }
        };
        if let Some(turn) = flags.iter().position(|ok| !ok) {
            return TrainTrackVerdict::Violated {
                edge: e,
                image: img.render(graph),
                turn,
            };
        }
    }
    if gates.stable {
        TrainTrackVerdict::Holds
    } else {
        TrainTrackVerdict::Undecided {
            reason: format!("base gate partition not stable at depth {depth}"),
        }
    }
}

/// L1 distance between the decorations of two directions at the same vertex.
pub fn angle(v: Vertex, d1: &Direction, d2: &Direction) -> Result<BigInt, GraphError> {
    if d1.vertex != v || d2.vertex != v {
        return Err(GraphError::DifferentVertices);
    }
    if d1.decoration.len() != d2.decoration.len() {
        return Err(GraphError::UnknownDirection("decoration lengths differ".into()));
    }
    Ok(d1
        .decoration
        .iter()
        .zip(&d2.decoration)
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// Every interior angle at a factor vertex is at most `theta`.
pub fn is_theta_straight(graph: &StandardGraph, path: &EdgePath, theta: &BigInt) -> Result<bool, GraphError> {
    for t in turns(graph, path)? {
        if let Vertex::Factor(_) = t.vertex {
            let back = Direction {
                vertex: t.vertex,
                decoration: vec![BigInt::zero(); t.decoration.len()],
                edge: t.back,
            };
            let out = Direction {
                vertex: t.vertex,
                decoration: t.decoration.clone(),
                edge: t.out,
            };
            if &angle(t.vertex, &back, &out)? > theta {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
