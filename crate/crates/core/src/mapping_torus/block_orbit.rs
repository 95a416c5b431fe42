//! Orbit problems for block-triangular integer matrices
//! `rho = [[I_n, B], [0, U]]` with `U` unimodular.
//!
//! Exact-vector constraints are solved completely. Constraints whose target is a
//! coset `base + span(lattice)` fall back to a bounded search over `U`; the
//! translation block `B` is always solved exactly for a fixed `U`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use super::snf::smith_normal_form;
use crate::matrix::{content, IntegerMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Exact(Vec<BigInt>),
    /// `base + span(generators)`.
    Coset { base: Vec<BigInt>, generators: Vec<Vec<BigInt>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub input: Vec<BigInt>,
    pub target: Target,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockOrbitInstance {
    pub n: usize,
    pub m: usize,
    pub constraints: Vec<Constraint>,
    /// Entry bound for the unimodular search in the coset case.
    pub entry_bound: i64,
    /// Maximum number of candidate `U` examined in the coset case.
    pub max_candidates: usize,
}

impl BlockOrbitInstance {
    pub fn new(n: usize, m: usize, constraints: Vec<Constraint>) -> Self {
        BlockOrbitInstance {
            n,
            m,
            constraints,
            entry_bound: 4,
            max_candidates: 200_000,
        }
    }

    pub fn exact(n: usize, m: usize, input: Vec<BigInt>, target: Vec<BigInt>) -> Self {
        Self::new(
            n,
            m,
            vec![Constraint {
                input,
                target: Target::Exact(target),
            }],
        )
    }

    fn validate(&self) -> Result<(), OrbitError> {
        let d = self.n + self.m;
        for (k, c) in self.constraints.iter().enumerate() {
            let bad = |what: &str| OrbitError::DimensionMismatch(format!("constraint {k}: {what} must have length {d}"));
            if c.input.len() != d {
                return Err(bad("input"));
            }
            match &c.target {
                Target::Exact(w) if w.len() != d => return Err(bad("target")),
                Target::Coset { base, generators }
                    if (base.len() != d || generators.iter().any(|g| g.len() != d)) => {
                        return Err(bad("coset data"));
                    }
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OrbitOutcome {
    Witness { matrix: IntegerMatrix },
    NoSolution { reason: String },
    Undecided { reason: String },
}

/// Assembles `[[I_n, B], [0, U]]`.
pub fn block_matrix(b: &IntegerMatrix, u: &IntegerMatrix) -> IntegerMatrix {
    let (n, m) = (b.rows(), u.rows());
    let mut r = IntegerMatrix::zeros(n + m, n + m);
    for i in 0..n {
        r[(i, i)] = BigInt::one();
        for j in 0..m {
            r[(i, n + j)] = b[(i, j)].clone();
        }
    }
    for i in 0..m {
        for j in 0..m {
            r[(n + i, n + j)] = u[(i, j)].clone();
        }
    }
    r
}

/// Whether `rho` has the block shape and satisfies every constraint.
pub fn verify_witness(inst: &BlockOrbitInstance, rho: &IntegerMatrix) -> bool {
    let (n, m) = (inst.n, inst.m);
    if rho.rows() != n + m || rho.cols() != n + m {
        return false;
    }
    for i in 0..n + m {
        for j in 0..n {
            let want = if i == j { BigInt::one() } else { BigInt::zero() };
            if rho[(i, j)] != want {
                return false;
            }
        }
    }
    let mut u = IntegerMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            u[(i, j)] = rho[(n + i, n + j)].clone();
        }
    }
    if !u.determinant().abs().is_one() {
        return false;
    }
    inst.constraints.iter().all(|c| {
        let image = rho.mul_vec(&c.input);
        match &c.target {
            Target::Exact(w) => &image == w,
            Target::Coset { base, generators } => {
                let diff: Vec<BigInt> = image.iter().zip(base).map(|(a, b)| a - b).collect();
                in_span(generators, &diff, n + m)
            }
        }
    })
}

fn in_span(generators: &[Vec<BigInt>], v: &[BigInt], dim: usize) -> bool {
    if generators.is_empty() {
        return v.iter().all(Zero::is_zero);
    }
    smith_normal_form(&IntegerMatrix::from_columns(dim, generators))
        .solve(v)
        .is_some()
}

fn split(v: &[BigInt], n: usize) -> (Vec<BigInt>, Vec<BigInt>) {
    (v[..n].to_vec(), v[n..].to_vec())
}

/// Unimodular `U` with `U * V2 = W2` (columns are the constraint blocks), if any.
fn solve_bottom(m: usize, v2: &[Vec<BigInt>], w2: &[Vec<BigInt>]) -> Result<IntegerMatrix, String> {
    if v2.is_empty() || m == 0 {
        return Ok(IntegerMatrix::identity(m));
    }
    let vm = IntegerMatrix::from_columns(m, v2);
    let wm = IntegerMatrix::from_columns(m, w2);
    // P V2 Q = D  =>  (U P^-1) D = W2 Q
    let s = smith_normal_form(&vm);
    let wq = &wm * &s.v;
    let diag = s.diagonal();
    let rank = s.rank();
    let mut y_cols = Vec::with_capacity(rank);
    if (rank..wq.cols()).any(|j| wq.column(j).iter().any(|x| !x.is_zero())) {
        return Err("bottom blocks satisfy different linear relations".into());
    }
    for (j, d) in diag.iter().enumerate().take(rank) {
        let mut y = Vec::with_capacity(m);
        for x in &wq.column(j) {
            let (q, r) = x.div_rem(d);
            if !r.is_zero() {
                return Err("bottom block contents differ".into());
            }
            y.push(q);
        }
        y_cols.push(y);
    }
    // Extend Y (m x rank) to a unimodular X; possible iff Y is primitive.
    let y = IntegerMatrix::from_columns(m, &y_cols);
    let sy = smith_normal_form(&y);
    if sy.diagonal().iter().any(|d| !d.is_one()) {
        return Err("bottom block images do not extend to a unimodular matrix".into());
    }
    let mut ext = IntegerMatrix::identity(m);
    for i in 0..rank {
        for j in 0..rank {
            ext[(i, j)] = sy.v_inv[(i, j)].clone();
        }
    }
    let x = &sy.u_inv * &ext;
    Ok(&x * &s.u)
}

/// Solves the whole instance for a fixed `U`: unknowns are the entries of `B`
/// and the coset coefficients.
fn solve_translation(inst: &BlockOrbitInstance, u: &IntegerMatrix) -> Option<IntegerMatrix> {
    let (n, m) = (inst.n, inst.m);
    let d = n + m;
    let coset_vars: usize = inst
        .constraints
        .iter()
        .map(|c| match &c.target {
            Target::Exact(_) => 0,
            Target::Coset { generators, .. } => generators.len(),
        })
        .sum();
    let unknowns = n * m + coset_vars;
    let rows = d * inst.constraints.len();
    let mut a = IntegerMatrix::zeros(rows, unknowns);
    let mut rhs = vec![BigInt::zero(); rows];
    let mut next_var = n * m;
    for (k, c) in inst.constraints.iter().enumerate() {
        let (v1, v2) = split(&c.input, n);
        let uv2 = u.mul_vec(&v2);
        let (base, gens): (&[BigInt], &[Vec<BigInt>]) = match &c.target {
            Target::Exact(w) => (w, &[]),
            Target::Coset { base, generators } => (base, generators),
        };
        for r in 0..d {
            let row = k * d + r;
            // image - base = sum c_g g
            if r < n {
                for b in 0..m {
                    a[(row, r * m + b)] = v2[b].clone();
                }
                rhs[row] = &base[r] - &v1[r];
            } else {
                rhs[row] = &base[r] - &uv2[r - n];
            }
            for (g, gen) in gens.iter().enumerate() {
                a[(row, next_var + g)] = -gen[r].clone();
            }
        }
        next_var += gens.len();
    }
    let x = if unknowns == 0 {
        rhs.iter().all(Zero::is_zero).then(Vec::new)?
    } else {
        smith_normal_form(&a).solve(&rhs)?
    };
    let mut b = IntegerMatrix::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            b[(i, j)] = x[i * m + j].clone();
        }
    }
    Some(block_matrix(&b, u))
}

/// Unimodular matrices with entries in `[-bound, bound]`, in a fixed order.
fn unimodular_candidates(m: usize, bound: i64) -> impl Iterator<Item = IntegerMatrix> {
    let width = (2 * bound + 1) as u64;
    let total = width.checked_pow((m * m) as u32).unwrap_or(u64::MAX);
    (0..total).filter_map(move |mut code| {
        let mut u = IntegerMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                u[(i, j)] = BigInt::from((code % width) as i64 - bound);
                code /= width;
            }
        }
        u.determinant().abs().is_one().then_some(u)
    })
}

/// Decides `exists rho: rho(input) = target` for every constraint.
pub fn block_orbit_solve(inst: &BlockOrbitInstance) -> Result<OrbitOutcome, OrbitError> {
    inst.validate()?;
    let (n, m) = (inst.n, inst.m);
    let mut ex_v2 = Vec::new();
    let mut ex_w2 = Vec::new();
    for c in &inst.constraints {
        if let Target::Exact(w) = &c.target {
            let (v1, v2) = split(&c.input, n);
            let (w1, w2) = split(w, n);
            if content(&v2) != content(&w2) {
                return Ok(OrbitOutcome::NoSolution {
                    reason: format!(
                        "content of the bottom block differs ({} vs {})",
                        content(&v2),
                        content(&w2)
                    ),
                });
            }
            let c2 = content(&v2);
            let top_ok = if c2.is_zero() {
                v1 == w1
            } else {
                v1.iter().zip(&w1).all(|(a, b)| (b - a).is_multiple_of(&c2))
            };
            if !top_ok {
                return Ok(OrbitOutcome::NoSolution {
                    reason: "top block difference is not a multiple of the bottom content".into(),
                });
            }
            ex_v2.push(v2);
            ex_w2.push(w2);
        }
    }
    let u = match solve_bottom(m, &ex_v2, &ex_w2) {
        Ok(u) => u,
        Err(reason) => return Ok(OrbitOutcome::NoSolution { reason }),
    };
    let has_coset = inst
        .constraints
        .iter()
        .any(|c| matches!(c.target, Target::Coset { .. }));
    if !has_coset {
        return Ok(match solve_translation(inst, &u) {
            Some(rho) => OrbitOutcome::Witness { matrix: rho },
            None => OrbitOutcome::NoSolution {
                reason: "no translation block satisfies the constraints".into(),
            },
        });
    }
    // Coset targets: U is only pinned on the span of the exact inputs.
    for (examined, cand) in unimodular_candidates(m, inst.entry_bound).enumerate() {
        if examined >= inst.max_candidates {
            break;
        }
        let fits = ex_v2
            .iter()
            .zip(&ex_w2)
            .all(|(v2, w2)| &cand.mul_vec(v2) == w2);
        if !fits {
            continue;
        }
        if let Some(rho) = solve_translation(inst, &cand) {
            return Ok(OrbitOutcome::Witness { matrix: rho });
        }
    }
    Ok(OrbitOutcome::Undecided {
        reason: format!(
            "no unimodular block with entries bounded by {} (at most {} candidates)",
            inst.entry_bound, inst.max_candidates
        ),
    })
}
