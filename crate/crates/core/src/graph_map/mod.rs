//! Topological representatives on the standard graph of groups.
//!
//! The graph has a base vertex with trivial group, one vertex `v_i` carrying
//! `A_i` per factor, an edge `E_i` from the base to `v_i`, and a loop `L_l` at
//! the base per free letter. Paths in the Bass-Serre tree are recorded up to
//! translation: each step carries the vertex-group element applied at its origin
//! before crossing the edge. Edge indices are `0..p` for the `E_i` and `p..p+k`
//! for the loops.

pub mod constants;
pub mod gates;
pub mod growth;
pub mod nielsen;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::automorphism::{AutError, Automorphism};
use crate::matrix::IntegerMatrix;
use crate::text::render_syllable;
use crate::words::{Presentation, Syllable, Word};

pub use constants::{bounded_cancellation_constant, constants_report, one_step_prefix_constant, ConstantsReport};
pub use gates::{
    angle, check_train_track, count_illegal_turns, default_gate_depth, gate_structure, is_legal_path, is_theta_straight,
    legality_ratio, Direction, GateStructure, TrainTrackVerdict,
};
pub use growth::{is_irreducible_matrix, pf_growth_rate, PfEstimate};
pub use nielsen::{nielsen_search, verify_nielsen, NielsenWitness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error("unknown direction: {0}")]
    UnknownDirection(String),
    #[error("directions lie at different vertices")]
    DifferentVertices,
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("matrix must be square and nonnegative")]
    NotNonnegativeSquare,
    #[error("edge lengths must be positive, one per edge")]
    BadLengths,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Vertex {
    Base,
    Factor(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrientedEdge {
    pub edge: usize,
    pub reversed: bool,
}

impl OrientedEdge {
    pub fn forward(edge: usize) -> Self {
        OrientedEdge { edge, reversed: false }
    }

    pub fn backward(edge: usize) -> Self {
        OrientedEdge { edge, reversed: true }
    }

    pub fn rev(self) -> Self {
        OrientedEdge {
            edge: self.edge,
            reversed: !self.reversed,
        }
    }
}

/// Vertex-group element applied at the origin, then the edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub decoration: Vec<BigInt>,
    pub edge: OrientedEdge,
}

/// The quotient graph of groups of the standard tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardGraph {
    pres: Presentation,
    lengths: Vec<BigRational>,
}

impl StandardGraph {
    pub fn new(pres: &Presentation) -> Self {
        let n = pres.num_factors() + pres.free_rank();
        StandardGraph {
            pres: pres.clone(),
            lengths: vec![BigRational::one(); n],
        }
    }

    pub fn with_lengths(pres: &Presentation, lengths: Vec<BigRational>) -> Result<Self, GraphError> {
        if lengths.len() != pres.num_factors() + pres.free_rank() || lengths.iter().any(|l| !l.is_positive()) {
            return Err(GraphError::BadLengths);
        }
        Ok(StandardGraph {
            pres: pres.clone(),
            lengths,
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn num_edges(&self) -> usize {
        self.lengths.len()
    }

    pub fn length(&self, edge: usize) -> &BigRational {
        &self.lengths[edge]
    }

    pub fn is_loop(&self, edge: usize) -> bool {
        edge >= self.pres.num_factors()
    }

    pub fn origin(&self, e: OrientedEdge) -> Vertex {
        if e.reversed && !self.is_loop(e.edge) {
            Vertex::Factor(e.edge)
        } else {
            Vertex::Base
        }
    }

    pub fn terminus(&self, e: OrientedEdge) -> Vertex {
        self.origin(e.rev())
    }

    /// Rank of the vertex group (0 at the base).
    pub fn vertex_rank(&self, v: Vertex) -> usize {
        match v {
            Vertex::Base => 0,
            Vertex::Factor(i) => self.pres.factor_rank(i),
        }
    }

    /// Directions at the base vertex, in the order `E_1..E_p, L_1, L_1^-1, ...`.
    pub fn base_directions(&self) -> Vec<OrientedEdge> {
        let p = self.pres.num_factors();
        let mut out: Vec<OrientedEdge> = (0..p).map(OrientedEdge::forward).collect();
        for l in 0..self.pres.free_rank() {
            out.push(OrientedEdge::forward(p + l));
            out.push(OrientedEdge::backward(p + l));
        }
        out
    }

    pub fn base_direction_index(&self, e: OrientedEdge) -> Option<usize> {
        let p = self.pres.num_factors();
        if e.edge >= self.num_edges() {
            return None;
        }
        if e.edge < p {
            (!e.reversed).then_some(e.edge)
        } else {
            Some(p + 2 * (e.edge - p) + usize::from(e.reversed))
        }
    }

    fn edge_label(&self, e: OrientedEdge) -> String {
        let p = self.pres.num_factors();
        let base = if e.edge < p {
            format!("E{}", e.edge + 1)
        } else {
            format!("L{}", e.edge - p + 1)
        };
        if e.reversed {
            format!("{base}^-1")
        } else {
            base
        }
    }
}

/// A reduced path in the Bass-Serre tree, up to translation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePath {
    start: Vertex,
    steps: Vec<Step>,
    /// Vertex-group element carried at the end vertex.
    terminal: Vec<BigInt>,
}

fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn add_into(dst: &mut [BigInt], src: &[BigInt]) {
    for (a, b) in dst.iter_mut().zip(src) {
        *a += b;
    }
}

impl EdgePath {
    pub fn empty(graph: &StandardGraph, start: Vertex) -> Self {
        EdgePath {
            start,
            steps: Vec::new(),
            terminal: vec![BigInt::zero(); graph.vertex_rank(start)],
        }
    }

    /// Builds a path from raw steps without tightening. Decoration lengths are checked.
    pub fn from_steps(
        graph: &StandardGraph,
        start: Vertex,
        steps: Vec<Step>,
        terminal: Vec<BigInt>,
    ) -> Result<Self, GraphError> {
        let mut at = start;
        for s in &steps {
            if s.edge.edge >= graph.num_edges() || graph.origin(s.edge) != at {
                return Err(GraphError::UnknownDirection(format!("{:?} at {at:?}", s.edge)));
            }
            if s.decoration.len() != graph.vertex_rank(at) {
                return Err(GraphError::UnknownDirection(format!("decoration length at {at:?}")));
            }
            at = graph.terminus(s.edge);
        }
        if terminal.len() != graph.vertex_rank(at) {
            return Err(GraphError::UnknownDirection("terminal decoration length".into()));
        }
        Ok(EdgePath { start, steps, terminal })
    }

    /// The path from the base vertex to `w` times the base vertex.
    pub fn from_word(graph: &StandardGraph, w: &Word) -> Self {
        let p = graph.pres.num_factors();
        let mut path = EdgePath::empty(graph, Vertex::Base);
        for s in w.syllables() {
            match s {
                Syllable::Factor { factor, exponents } => {
                    path.push(
                        graph,
                        Step {
                            decoration: Vec::new(),
                            edge: OrientedEdge::forward(*factor),
                        },
                    );
                    path.push(
                        graph,
                        Step {
                            decoration: exponents.clone(),
                            edge: OrientedEdge::backward(*factor),
                        },
                    );
                }
                Syllable::Free { letter, exponent } => {
                    let e = if exponent.is_negative() {
                        OrientedEdge::backward(p + letter)
                    } else {
                        OrientedEdge::forward(p + letter)
                    };
                    let count = exponent.abs();
                    let mut i = BigInt::zero();
                    while i < count {
                        path.push(
                            graph,
                            Step {
                                decoration: Vec::new(),
                                edge: e,
                            },
                        );
                        i += 1;
                    }
                }
            }
        }
        path
    }

    pub fn start(&self) -> Vertex {
        self.start
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn terminal(&self) -> &[BigInt] {
        &self.terminal
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self, graph: &StandardGraph) -> Vertex {
        self.steps.last().map_or(self.start, |s| graph.terminus(s.edge))
    }

    /// Metric length (sum of edge lengths).
    pub fn metric_length(&self, graph: &StandardGraph) -> BigRational {
        self.steps
            .iter()
            .map(|s| graph.length(s.edge.edge).clone())
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Appends one step and cancels a backtrack if one appears.
    pub fn push(&mut self, graph: &StandardGraph, mut step: Step) {
        add_into(&mut step.decoration, &self.terminal);
        let backtrack = is_zero_vec(&step.decoration);
        if let Some(top) = self.steps.pop_if(|top| backtrack && top.edge == step.edge.rev()) {
            self.terminal = top.decoration;
            return;
        }
        self.terminal = vec![BigInt::zero(); graph.vertex_rank(graph.terminus(step.edge))];
        self.steps.push(step);
    }

    /// Appends `other`, which must start where `self` ends, and tightens.
    pub fn extend(&mut self, graph: &StandardGraph, other: &EdgePath) {
        for s in &other.steps {
            self.push(graph, s.clone());
        }
        add_into(&mut self.terminal, &other.terminal);
    }

    pub fn reverse(&self, graph: &StandardGraph) -> EdgePath {
        let n = self.steps.len();
        let neg = |v: &[BigInt]| v.iter().map(|x| -x).collect::<Vec<_>>();
        let mut steps = Vec::with_capacity(n);
        for k in (0..n).rev() {
            let decoration = if k + 1 == n {
                neg(&self.terminal)
            } else {
                neg(&self.steps[k + 1].decoration)
            };
            steps.push(Step {
                decoration,
                edge: self.steps[k].edge.rev(),
            });
        }
        let terminal = match self.steps.first() {
            Some(s) => neg(&s.decoration),
            None => neg(&self.terminal),
        };
        EdgePath {
            start: self.end(graph),
            steps,
            terminal,
        }
    }

    /// Same path with the terminal decoration cleared.
    pub fn without_terminal(&self) -> EdgePath {
        EdgePath {
            start: self.start,
            steps: self.steps.clone(),
            terminal: vec![BigInt::zero(); self.terminal.len()],
        }
    }

    /// Whether no step immediately undoes the previous one.
    pub fn is_reduced(&self) -> bool {
        self.steps
            .windows(2)
            .all(|w| !(w[1].edge == w[0].edge.rev() && is_zero_vec(&w[1].decoration)))
    }

    /// Group element `w` with `end = w * (end vertex)` when the path starts at its own frame.
    pub fn element(&self, graph: &StandardGraph) -> Word {
        let pres = &graph.pres;
        let p = pres.num_factors();
        let mut raw = Vec::new();
        let mut at = self.start;
        let factor_syllable = |v: Vertex, d: &[BigInt]| match v {
            Vertex::Factor(i) if !is_zero_vec(d) => Some(Syllable::Factor {
                factor: i,
                exponents: d.to_vec(),
            }),
            _ => None,
        };
        for s in &self.steps {
            raw.extend(factor_syllable(at, &s.decoration));
            if graph.is_loop(s.edge.edge) {
                raw.push(Syllable::free(s.edge.edge - p, if s.edge.reversed { -1 } else { 1 }));
            }
            at = graph.terminus(s.edge);
        }
        raw.extend(factor_syllable(at, &self.terminal));
        Word::reduce(pres, raw).expect("path data matches presentation")
    }

    pub fn render(&self, graph: &StandardGraph) -> String {
        let mut parts = Vec::new();
        let mut at = self.start;
        let deco = |v: Vertex, d: &[BigInt]| match v {
            Vertex::Factor(i) if !is_zero_vec(d) => Some(format!(
                "({})",
                render_syllable(&Syllable::Factor {
                    factor: i,
                    exponents: d.to_vec()
                })
            )),
            _ => None,
        };
        for s in &self.steps {
            parts.extend(deco(at, &s.decoration));
            parts.push(graph.edge_label(s.edge));
            at = graph.terminus(s.edge);
        }
        parts.extend(deco(at, &self.terminal));
        let start = match self.start {
            Vertex::Base => "*".to_string(),
            Vertex::Factor(i) => format!("v{}", i + 1),
        };
        if parts.is_empty() {
            start
        } else {
            format!("{start}: {}", parts.join(" "))
        }
    }
}

/// The standard topological representative of an automorphism with `sigma = id`.
#[derive(Clone, Debug)]
pub struct GraphMap {
    graph: StandardGraph,
    phi: Automorphism,
    /// Image of each forward edge.
    edge_images: Vec<EdgePath>,
    /// Paths spelled by `g_i^-1`.
    return_paths: Vec<EdgePath>,
}

/// Builds the standard map: `L_l -> phi(x_l)` and `E_i -> g_i E_i`.
pub fn build_standard_map(phi: &Automorphism) -> Result<GraphMap, GraphError> {
    GraphMap::new(StandardGraph::new(phi.presentation()), phi)
}

impl GraphMap {
    pub fn new(graph: StandardGraph, phi: &Automorphism) -> Result<Self, GraphError> {
        phi.require_factor_preserving()?;
        let pres = phi.presentation();
        let p = pres.num_factors();
        let free_base = pres.abelianization_rank() - pres.free_rank();
        let mut edge_images = Vec::with_capacity(graph.num_edges());
        for i in 0..p {
            let mut path = EdgePath::from_word(&graph, phi.conjugator(i));
            path.push(
                &graph,
                Step {
                    decoration: Vec::new(),
                    edge: OrientedEdge::forward(i),
                },
            );
            edge_images.push(path);
        }
        for l in 0..pres.free_rank() {
            edge_images.push(EdgePath::from_word(&graph, &phi.images()[free_base + l]));
        }
        let return_paths = (0..p)
            .map(|i| EdgePath::from_word(&graph, &phi.conjugator(i).inverse()))
            .collect();
        Ok(GraphMap {
            graph,
            phi: phi.clone(),
            edge_images,
            return_paths,
        })
    }

    /// A map with arbitrary (possibly untightened) forward edge images, for
    /// analysing maps that do not come from the standard construction.
    pub fn with_edge_images(phi: &Automorphism, edge_images: Vec<EdgePath>) -> Result<Self, GraphError> {
        let mut m = build_standard_map(phi)?;
        if edge_images.len() != m.graph.num_edges() {
            return Err(GraphError::UnknownDirection("one image per edge is required".into()));
        }
        m.edge_images = edge_images;
        Ok(m)
    }

    pub fn graph(&self) -> &StandardGraph {
        &self.graph
    }

    pub fn automorphism(&self) -> &Automorphism {
        &self.phi
    }

    pub fn edge_image(&self, edge: usize) -> &EdgePath {
        &self.edge_images[edge]
    }

    pub fn edge_images(&self) -> &[EdgePath] {
        &self.edge_images
    }

    /// Image of a single step (with its decoration), starting at the image of its origin.
    pub fn image_of_step(&self, at: Vertex, step: &Step) -> EdgePath {
        let e = step.edge;
        match at {
            Vertex::Factor(i) => {
                let mut path = EdgePath::empty(&self.graph, at);
                path.push(
                    &self.graph,
                    Step {
                        decoration: self.phi.factor_matrix(i).mul_vec(&step.decoration),
                        edge: e,
                    },
                );
                path.extend(&self.graph, &self.return_paths[i]);
                path
            }
            Vertex::Base if e.reversed => self.edge_images[e.edge].reverse(&self.graph),
            Vertex::Base => self.edge_images[e.edge].clone(),
        }
    }

    /// `[f(path)]`.
    pub fn apply_path(&self, path: &EdgePath) -> EdgePath {
        let mut out = EdgePath::empty(&self.graph, path.start);
        let mut at = path.start;
        for s in &path.steps {
            out.extend(&self.graph, &self.image_of_step(at, s));
            at = self.graph.terminus(s.edge);
        }
        if let Vertex::Factor(i) = at {
            let t = self.phi.factor_matrix(i).mul_vec(&path.terminal);
            add_into(&mut out.terminal, &t);
        }
        out
    }

    pub fn apply_path_power(&self, n: usize, path: &EdgePath) -> EdgePath {
        let mut cur = path.clone();
        for _ in 0..n {
            cur = self.apply_path(&cur);
        }
        cur
    }

    /// Entry `(e, e')` counts occurrences of edge `e'` in the image of `e`.
    pub fn transition_matrix(&self) -> IntegerMatrix {
        let n = self.graph.num_edges();
        let mut m = IntegerMatrix::zeros(n, n);
        for (e, img) in self.edge_images.iter().enumerate() {
            for s in &img.steps {
                m[(e, s.edge.edge)] += 1;
            }
        }
        m
    }

    /// Maximum over edges of `length(f(e)) / length(e)`.
    pub fn lipschitz(&self) -> BigRational {
        self.edge_images
            .iter()
            .enumerate()
            .map(|(e, img)| img.metric_length(&self.graph) / self.graph.length(e))
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Largest number of edges in an edge image.
    pub(crate) fn combinatorial_lipschitz(&self) -> usize {
        self.edge_images.iter().map(EdgePath::len).max().unwrap_or(0)
    }
}

impl fmt::Display for GraphMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, img) in self.edge_images.iter().enumerate() {
            writeln!(
                f,
                "{} -> {}",
                self.graph.edge_label(OrientedEdge::forward(e)),
                img.render(&self.graph)
            )?;
        }
        Ok(())
    }
}
