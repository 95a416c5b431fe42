//! Acceptance suite: one line per criterion, each against a wall-clock limit.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use fpaut_core::dynamics::enumerate::EnumerationBounds;
use fpaut_core::dynamics::{atoroidal_search, flare_certify, twin_search, FlareVerdict, SearchVerdict, TwinWitness};
use fpaut_core::graph_map::{
    build_standard_map, check_train_track, constants_report, gate_structure, nielsen_search, pf_growth_rate,
    verify_nielsen, TrainTrackVerdict, Vertex,
};
use fpaut_core::mapping_torus::{
    block_orbit::verify_witness, block_orbit_solve, conjugacy_pipeline, mapping_torus_abelianization,
    smith_normal_form, BlockOrbitInstance, ConjugacyOutcome, OrbitOutcome, PipelineOptions,
};
use fpaut_core::{parse_word, render_word, Automorphism, IntegerMatrix, Presentation, Slot, Syllable, Word};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("word algebra", 10, word_algebra),
        ("fibonacci battery", 5, fibonacci_battery),
        ("anosov factors obstruction", 5, anosov_obstruction),
        ("toral twist", 2, toral_twist_battery),
        ("smith normal form", 30, snf_suite),
        ("block orbit brute force", 10, block_orbit_brute_force),
        ("bounded cancellation", 10, bounded_cancellation),
        ("conjugacy pipeline soundness", 60, pipeline_soundness),
        ("cross-oracle tiny bounds", 60, cross_oracle),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = started.elapsed();
        let limit = Duration::from_secs(*limit);
        let status = match (&result, elapsed <= limit) {
            (Ok(()), true) => "PASS",
            _ => "FAIL",
        };
        print!("criterion {}: {status} {name} ({:.2}s / {}s)", k + 1, elapsed.as_secs_f64(), limit.as_secs());
        match result {
            Err(e) => println!(" - {e}"),
            Ok(()) if elapsed > limit => println!(" - over time limit"),
            Ok(()) => println!(),
        }
        if status == "FAIL" {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn w(text: &str, p: &Presentation) -> Word {
    parse_word(text, p).unwrap()
}

// 1

fn word_algebra() -> Outcome {
    const CASES: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let presentations = [
        Presentation::new(vec![2, 1], 2).unwrap(),
        Presentation::new(vec![2, 3], 0).unwrap(),
        Presentation::new(vec![1], 3).unwrap(),
    ];
    let pick = |rng: &mut ChaCha8Rng| presentations[rng.gen_range(0..presentations.len())].clone();
    for _ in 0..CASES {
        let p = pick(&mut rng);
        let len = rng.gen_range(0..10);
        let raw = random_raw(&mut rng, &p, len, 2);
        let once = Word::reduce(&p, raw).unwrap();
        let twice = Word::reduce(&p, once.syllables().to_vec()).unwrap();
        ensure!(once == twice, "reduce not idempotent on {once}");
    }
    for _ in 0..CASES {
        let p = pick(&mut rng);
        let (a, b, c) = (
            random_word(&mut rng, &p, 6, 2),
            random_word(&mut rng, &p, 6, 2),
            random_word(&mut rng, &p, 6, 2),
        );
        ensure!(&(&a * &b) * &c == &a * &(&b * &c), "associativity fails on {a} | {b} | {c}");
    }
    for _ in 0..CASES {
        let p = pick(&mut rng);
        let a = random_word(&mut rng, &p, 8, 3);
        ensure!((&a * &a.inverse()).is_identity() && (&a.inverse() * &a).is_identity(), "inverse fails on {a}");
    }
    for _ in 0..CASES {
        let p = pick(&mut rng);
        let (g, x) = (random_word(&mut rng, &p, 5, 2), random_word(&mut rng, &p, 6, 2));
        let c = &(&g * &x) * &g.inverse();
        ensure!(
            c.cyclic_syllable_length() == x.cyclic_syllable_length(),
            "cyclic length changes under conjugation of {x} by {g}"
        );
    }
    for _ in 0..CASES {
        let p = pick(&mut rng);
        let x = random_word(&mut rng, &p, 6, 2);
        let (i, j) = (rng.gen_range(0..p.num_factors()), rng.gen_range(0..p.num_factors()));
        let factor = |rng: &mut ChaCha8Rng, f: usize| {
            let e: Vec<i64> = (0..p.factor_rank(f)).map(|_| rng.gen_range(-3..=3)).collect();
            Word::reduce(&p, [Syllable::factor(f, e)]).unwrap()
        };
        let (a, b) = (factor(&mut rng, i), factor(&mut rng, j));
        let moved = &(&a * &x) * &b;
        ensure!(
            moved.double_coset_rep(i, j).unwrap() == x.double_coset_rep(i, j).unwrap(),
            "double coset rep differs for {x} and {moved}"
        );
    }
    Ok(())
}

// 2

fn fibonacci_battery() -> Outcome {
    let phi = fibonacci();
    let p = phi.presentation().clone();
    let m = build_standard_map(&phi).map_err(|e| e.to_string())?;

    // transition matrix by counting letters in the images
    let mut counts = vec![vec![0i64; 2]; 2];
    for (i, img) in phi.images().iter().enumerate() {
        for token in render_word(img).split_whitespace() {
            let letter: usize = token[1..2].parse().unwrap();
            counts[i][letter - 1] += 1;
        }
    }
    ensure!(counts == vec![vec![1, 1], vec![1, 0]], "letter counts {counts:?}");
    let t = m.transition_matrix();
    ensure!(t == IntegerMatrix::from_rows(counts.clone()), "transition matrix {t:?}");

    // root of x^2 - x - 1
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let pf = pf_growth_rate(&t).map_err(|e| e.to_string())?;
    ensure!((pf.lambda - golden).abs() < 1e-9, "lambda {} vs {golden}", pf.lambda);
    // direct iteration: |phi^n(x1)| grows like golden^n
    let len = |n| phi.apply_power(n, &w("x1", &p)).unwrap().letter_length().to_string().parse::<f64>().unwrap();
    let ratio = len(21) / len(20);
    ensure!((ratio - golden).abs() < 1e-6, "iteration ratio {ratio}");

    ensure!(check_train_track(&m, 4) == TrainTrackVerdict::Holds, "not a train track at depth 4");
    let gates = gate_structure(&m, 4);
    ensure!(gates.num_base_gates == 3, "{} base gates", gates.num_base_gates);

    let report = atoroidal_search(&phi, &EnumerationBounds::new(6, 6), 4).map_err(|e| e.to_string())?;
    let wit = report.witness().ok_or("no periodic class at L = 6, N = 4")?;
    let comm = w("x1 x2 x1^-1 x2^-1", &p);
    ensure!(wit.n == 2, "period {}", wit.n);
    ensure!(
        wit.g.is_conjugate(&comm).unwrap() || wit.g.is_conjugate(&comm.inverse()).unwrap(),
        "witness {} is not the commutator class",
        wit.g
    );
    ensure!(wit.verify(&phi), "witness does not verify");

    // det(Phi_ab - I) = -1, so the torsion part vanishes
    let shifted = [[0i64, 1], [1, -1]];
    let det = shifted[0][0] * shifted[1][1] - shifted[0][1] * shifted[1][0];
    ensure!(det.abs() == 1, "oracle determinant {det}");
    let ab = mapping_torus_abelianization(&phi);
    ensure!(ab.torsion.is_empty() && ab.free_rank == 1, "abelianization {:?} + Z^{}", ab.torsion, ab.free_rank);
    Ok(())
}

// 3

fn anosov_obstruction() -> Outcome {
    let phi = intro_z2z3();
    let report = twin_search(&phi, 2, &EnumerationBounds::new(2, 1)).map_err(|e| e.to_string())?;
    let wit = report.witness().ok_or("no twins at M = 2, L = 2")?;
    ensure!(
        wit.h.factor == 0 && wit.k.factor == 1 && wit.h.u.is_identity() && wit.k.u.is_identity(),
        "pair {:?}",
        (&wit.h, &wit.k)
    );
    ensure!(wit.g.is_identity() && wit.m == 1, "g = {}, m = {}", wit.g, wit.m);
    ensure!(wit.verify(&phi), "twin witness does not verify");

    let lambda = BigRational::new(11.into(), 10.into());
    let flare = flare_certify(&phi, 2, &EnumerationBounds::new(2, 1), 4, &lambda).map_err(|e| e.to_string())?;
    let FlareVerdict::Counterexamples { examples, .. } = &flare.verdict else {
        return Err(format!("expected counterexamples, got {:?}", flare.verdict));
    };
    ensure!(!examples.is_empty(), "no counterexamples listed");
    let inv = phi.inverse();
    for c in examples {
        ensure!(c.length == 2 && c.forward == 2 && c.backward == 2, "{c:?}");
        let mut f = c.g.clone();
        let mut b = c.g.clone();
        for n in 1..=8 {
            f = phi.apply(&f).unwrap();
            b = inv.apply(&b).unwrap();
            ensure!(
                f.cyclic_syllable_length() == 2 && b.cyclic_syllable_length() == 2,
                "length of {} changes at step {n}",
                c.g
            );
        }
    }
    Ok(())
}

// 4

fn toral_twist_battery() -> Outcome {
    let phi = toral_twist();
    let p = phi.presentation().clone();
    let (toral, _) = phi.is_toral().map_err(|e| e.to_string())?;
    ensure!(toral, "not toral");
    let central = phi.check_central_condition().map_err(|e| e.to_string())?;
    ensure!(central.iter().all(|&c| c), "central {central:?}");

    let report = atoroidal_search(&phi, &EnumerationBounds::new(2, 1), 3).map_err(|e| e.to_string())?;
    let wit = report.witness().ok_or("no periodic class")?;
    ensure!(wit.n == 1, "period {}", wit.n);
    let slots: BTreeSet<Slot> = wit.g.syllables().iter().map(Syllable::slot).collect();
    ensure!(
        wit.g.syllable_length() == 2 && slots == BTreeSet::from([Slot::Factor(0), Slot::Factor(1)]),
        "witness {}",
        wit.g
    );
    ensure!(wit.verify(&phi), "witness does not verify");
    let ab = w("a1.1 a2.1", &p);
    ensure!(phi.apply(&ab).unwrap().is_conjugate(&ab).unwrap(), "[a1.1 a2.1] not fixed");

    let m = build_standard_map(&phi).map_err(|e| e.to_string())?;
    let g = m.graph();
    let found = nielsen_search(&m, 2, 1);
    let hit = found
        .iter()
        .find(|x| x.path.len() == 2 && x.path.start() == Vertex::Factor(0) && x.path.end(g) == Vertex::Factor(1))
        .ok_or("no inter-vertex Nielsen path")?;
    ensure!(hit.g == w("a1.1", &p), "g = {}", hit.g);
    ensure!(found.iter().all(|x| verify_nielsen(&m, x)), "a Nielsen witness fails to verify");
    Ok(())
}

// 5

fn int(x: &BigInt) -> i128 {
    x.to_string().parse().unwrap()
}

/// Determinant by cofactor expansion.
fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    (r - 1..n)
        .flat_map(|last| {
            subsets(last, r - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

fn snf_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..1000 {
        let square3 = case % 4 == 0;
        let (r, c) = if square3 { (3, 3) } else { (rng.gen_range(1..=6), rng.gen_range(1..=6)) };
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let m = IntegerMatrix::from_rows(rows.clone());
        let s = smith_normal_form(&m);
        ensure!(&(&s.u * &m) * &s.v == s.d, "U M V != D for {rows:?}");
        ensure!(s.u.determinant().abs().is_one() && s.v.determinant().abs().is_one(), "not unimodular: {rows:?}");
        ensure!((&s.u * &s.u_inv).is_identity() && (&s.v * &s.v_inv).is_identity(), "tracked inverses wrong");
        for i in 0..r {
            for j in 0..c {
                ensure!(i == j || s.d[(i, j)].is_zero(), "off-diagonal entry in D for {rows:?}");
            }
        }
        let d = s.diagonal();
        ensure!(d.iter().all(|x| !x.is_negative()), "negative diagonal {d:?}");
        for pair in d.windows(2) {
            ensure!(pair[1].is_zero() || (&pair[1] % &pair[0]).is_zero(), "divisibility chain {d:?}");
        }
        let gcd1 = rows.iter().flatten().fold(0i64, |g, &x| g.gcd(&x));
        ensure!(int(&d[0]) == gcd1 as i128, "d1 {} vs gcd {gcd1}", d[0]);
        if square3 {
            let mi: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
            for k in 1..=3 {
                let mut g = 0i128;
                for rs in subsets(3, k) {
                    for cs in subsets(3, k) {
                        let sub: Vec<Vec<i128>> = rs.iter().map(|&i| cs.iter().map(|&j| mi[i][j]).collect()).collect();
                        g = g.gcd(&det(&sub));
                    }
                }
                let prod: i128 = d[..k].iter().map(int).product();
                ensure!(prod == g, "product of first {k} invariants {prod} vs minor gcd {g} for {rows:?}");
            }
        }
    }
    Ok(())
}

// 6

fn block_orbit_brute_force() -> Outcome {
    let big = |v: [i64; 2]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    let range = -3i64..=3;
    for x0 in range.clone() {
        for x1 in range.clone() {
            for y0 in range.clone() {
                for y1 in range.clone() {
                    let brute = [1i64, -1].iter().any(|&u| (-20i64..=20).any(|b| x0 + b * x1 == y0 && u * x1 == y1));
                    let inst = BlockOrbitInstance::exact(1, 1, big([x0, x1]), big([y0, y1]));
                    match block_orbit_solve(&inst).map_err(|e| e.to_string())? {
                        OrbitOutcome::Witness { matrix } => {
                            ensure!(brute, "witness for ({x0},{x1}) -> ({y0},{y1}) but brute force finds none");
                            ensure!(verify_witness(&inst, &matrix), "witness does not verify");
                            ensure!(
                                matrix.mul_vec(&big([x0, x1])) == big([y0, y1])
                                    && matrix[(0, 0)].is_one()
                                    && matrix[(1, 0)].is_zero()
                                    && matrix[(1, 1)].abs().is_one(),
                                "witness {matrix:?} has the wrong shape or image"
                            );
                        }
                        OrbitOutcome::NoSolution { reason } => {
                            ensure!(!brute, "no_solution ({reason}) for ({x0},{x1}) -> ({y0},{y1}) contradicted");
                        }
                        OrbitOutcome::Undecided { reason } => {
                            return Err(format!("undecided ({reason}) for ({x0},{x1}) -> ({y0},{y1})"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

// 7

fn bounded_cancellation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, phi) in all_fixtures() {
        let m = build_standard_map(&phi).map_err(|e| e.to_string())?;
        let c_f = constants_report(&m, 8, 1.0).map_err(|e| e.to_string())?.c_f;
        for _ in 0..1000 {
            let (alpha, beta) = random_concatenation(&mut rng, m.graph(), 6);
            let mut joined = alpha.clone();
            joined.extend(m.graph(), &beta);
            ensure!(joined.len() == alpha.len() + beta.len(), "{name}: concatenation is not reduced");
            let (fa, fb, fab) = (
                m.apply_path(&alpha).len(),
                m.apply_path(&beta).len(),
                m.apply_path(&joined).len(),
            );
            ensure!(
                fab + 2 * c_f >= fa + fb,
                "{name}: |f(ab)| = {fab} < {fa} + {fb} - 2*{c_f} for {} . {}",
                alpha.render(m.graph()),
                beta.render(m.graph())
            );
        }
    }
    Ok(())
}

// 8

fn pipeline_soundness() -> Outcome {
    let opts = PipelineOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pool = all_fixtures();
    for case in 0..50 {
        let (name, phi) = &pool[case % pool.len()];
        let g = random_word(&mut rng, phi.presentation(), 3, 2);
        let twisted = Automorphism::inner(&g).compose(phi).unwrap();
        match conjugacy_pipeline(phi, &twisted, &opts).map_err(|e| e.to_string())? {
            ConjugacyOutcome::Conjugate { witness, .. } => {
                ensure!(witness.verify(phi, &twisted), "{name}, g = {g}: non-verifying witness");
            }
            other => return Err(format!("{name}, g = {g}: {other:?}")),
        }
    }
    let fib = fibonacci();
    let swap = aut(vec![], 2, &["x2", "x1"], &["x2", "x1"]);
    let intro = intro_z2z3();
    let f3 = free_rank_three();
    let z = Presentation::new(vec![1], 0).unwrap();
    let negate = aut(vec![1], 0, &["a1.1^-1"], &["a1.1^-1"]);
    let id = Automorphism::identity;
    let pairs = [
        ("fib vs id", fib.clone(), id(fib.presentation())),
        ("fib vs fib^2", fib.clone(), fib.power(2)),
        ("fib vs fib^-1", fib.clone(), fib.inverse()),
        ("fib vs swap", fib.clone(), swap),
        ("intro vs id", intro.clone(), id(intro.presentation())),
        ("intro vs intro^2", intro.clone(), intro.power(2)),
        ("intro vs intro^-1", intro.clone(), intro.inverse()),
        ("F3 vs id", f3.clone(), id(f3.presentation())),
        ("F3 vs F3^2", f3.clone(), f3.power(2)),
        ("negation vs id", negate, id(&z)),
    ];
    for (label, a, b) in pairs {
        match conjugacy_pipeline(&a, &b, &opts).map_err(|e| e.to_string())? {
            ConjugacyOutcome::Distinguished { .. } => {}
            ConjugacyOutcome::Conjugate { witness, .. } => {
                ensure!(witness.verify(&a, &b), "{label}: non-verifying witness");
                return Err(format!("{label}: reported conjugate"));
            }
            other => return Err(format!("{label}: {other:?}")),
        }
    }
    Ok(())
}

// 9: an independent model of the group built from raw letters

/// Syllable as `(slot, exponents)`; free letters use slots `p..p+k` with one exponent.
type RawSyl = (usize, Vec<i64>);
type RawWord = Vec<RawSyl>;

struct Model {
    ranks: Vec<usize>,
    free: usize,
    /// Images of the generators, in generator order.
    images: Vec<RawWord>,
}

fn push(w: &mut RawWord, (slot, e): RawSyl) {
    if e.iter().all(|&x| x == 0) {
        return;
    }
    match w.last_mut() {
        Some((s, f)) if *s == slot => {
            for (a, b) in f.iter_mut().zip(&e) {
                *a += b;
            }
            if f.iter().all(|&x| x == 0) {
                w.pop();
            }
        }
        _ => w.push((slot, e)),
    }
}

fn concat(a: &RawWord, b: &RawWord) -> RawWord {
    let mut out = a.clone();
    for s in b {
        push(&mut out, s.clone());
    }
    out
}

fn inv(a: &RawWord) -> RawWord {
    a.iter().rev().map(|(s, e)| (*s, e.iter().map(|x| -x).collect())).collect()
}

/// Cyclic reduction, merging wrap-around syllables of the same slot.
fn cyclic(a: &RawWord) -> RawWord {
    let mut w = a.clone();
    loop {
        if w.len() >= 2 && w[0].0 == w[w.len() - 1].0 {
            let last = w.pop().unwrap();
            let first = w.remove(0);
            let mut merged = RawWord::new();
            push(&mut merged, last);
            push(&mut merged, first);
            let rest = std::mem::take(&mut w);
            w = merged;
            for s in rest {
                push(&mut w, s);
            }
            continue;
        }
        return w;
    }
}

fn same_class(a: &RawWord, b: &RawWord) -> bool {
    let (a, b) = (cyclic(a), cyclic(b));
    a.len() == b.len() && (a.is_empty() || (0..a.len()).any(|r| a[r..].iter().chain(&a[..r]).eq(b.iter())))
}

impl Model {
    fn new(phi: &Automorphism) -> Self {
        let p = phi.presentation();
        let mut m = Model {
            ranks: p.abelian_ranks().to_vec(),
            free: p.free_rank(),
            images: Vec::new(),
        };
        m.images = phi.images().iter().map(|x| m.parse(&render_word(x))).collect();
        m
    }

    fn p(&self) -> usize {
        self.ranks.len()
    }

    /// Generator index, slot and coordinate of a token such as `a2.1` or `x3`.
    fn letter(&self, name: &str) -> (usize, usize, usize) {
        if let Some(rest) = name.strip_prefix('x') {
            let l: usize = rest.parse::<usize>().unwrap() - 1;
            (self.ranks.iter().sum::<usize>() + l, self.p() + l, 0)
        } else {
            let (f, c) = name[1..].split_once('.').unwrap();
            let (f, c) = (f.parse::<usize>().unwrap() - 1, c.parse::<usize>().unwrap() - 1);
            (self.ranks[..f].iter().sum::<usize>() + c, f, c)
        }
    }

    fn unit(&self, slot: usize, coord: usize, e: i64) -> RawSyl {
        let rank = if slot < self.p() { self.ranks[slot] } else { 1 };
        let mut v = vec![0; rank];
        v[coord] = e;
        (slot, v)
    }

    fn parse(&self, text: &str) -> RawWord {
        let mut out = RawWord::new();
        for tok in text.split_whitespace().filter(|t| *t != "1") {
            let (name, e) = match tok.split_once('^') {
                Some((n, e)) => (n, e.parse().unwrap()),
                None => (tok, 1),
            };
            let (_, slot, coord) = self.letter(name);
            push(&mut out, self.unit(slot, coord, e));
        }
        out
    }

    /// All signed generator letters.
    fn letters(&self) -> Vec<RawSyl> {
        let mut out = Vec::new();
        for (f, &r) in self.ranks.iter().enumerate() {
            for c in 0..r {
                out.push(self.unit(f, c, 1));
                out.push(self.unit(f, c, -1));
            }
        }
        for l in 0..self.free {
            out.push(self.unit(self.p() + l, 0, 1));
            out.push(self.unit(self.p() + l, 0, -1));
        }
        out
    }

    /// Reduced words spelled by raw letter strings of length at most `len`, deduplicated.
    fn raw_words(&self, len: usize) -> Vec<RawWord> {
        let letters = self.letters();
        let mut seen = BTreeSet::new();
        let mut layer = vec![Vec::<RawSyl>::new()];
        let mut out = Vec::new();
        for _ in 0..=len {
            let mut next = Vec::new();
            for raw in &layer {
                let mut red = RawWord::new();
                for s in raw {
                    push(&mut red, s.clone());
                }
                if seen.insert(red.clone()) {
                    out.push(red);
                }
                for l in &letters {
                    let mut r = raw.clone();
                    r.push(l.clone());
                    next.push(r);
                }
            }
            layer = next;
        }
        out
    }

    fn apply(&self, w: &RawWord) -> RawWord {
        let mut out = RawWord::new();
        for (slot, e) in w {
            for (c, &x) in e.iter().enumerate() {
                let (g, _, _) = if *slot < self.p() {
                    self.letter(&format!("a{}.{}", slot + 1, c + 1))
                } else {
                    self.letter(&format!("x{}", slot - self.p() + 1))
                };
                let img = if x > 0 { self.images[g].clone() } else { inv(&self.images[g]) };
                for _ in 0..x.abs() {
                    out = concat(&out, &img);
                }
            }
        }
        out
    }

    fn apply_n(&self, n: usize, w: &RawWord) -> RawWord {
        (0..n).fold(w.clone(), |acc, _| self.apply(&acc))
    }

    fn mass_one(w: &RawWord) -> bool {
        w.iter().all(|(_, e)| e.iter().map(|x| x.abs()).sum::<i64>() <= 1)
    }

    fn hyperbolic(&self, w: &RawWord) -> bool {
        let c = cyclic(w);
        c.len() >= 2 || (c.len() == 1 && c[0].0 >= self.p())
    }

    /// `U` with `phi^n(A_i) = U A_i U^-1`, read off the image of the first generator.
    fn factor_conjugator(&self, n: usize, i: usize) -> RawWord {
        let img = self.apply_n(n, &vec![self.unit(i, 0, 1)]);
        assert!(img.len() % 2 == 1 && img[img.len() / 2].0 == i, "factor {i} not preserved");
        img[..img.len() / 2].to_vec()
    }

    fn in_factor(w: &RawWord, i: usize) -> bool {
        w.is_empty() || (w.len() == 1 && w[0].0 == i)
    }

    /// `g` conjugates `phi^n(u A_i u^-1)` back to `u A_i u^-1` iff `(phi^n(u) G)^-1 g u` lies in `A_i`.
    fn carries(&self, n: usize, g: &RawWord, u: &RawWord, i: usize) -> bool {
        let big_u = concat(&self.apply_n(n, u), &self.factor_conjugator(n, i));
        Self::in_factor(&concat(&concat(&inv(&big_u), g), u), i)
    }

    /// Factor elements with entries in `[-b, b]`.
    fn ball(&self, i: usize, b: i64) -> Vec<RawWord> {
        let mut vectors = vec![Vec::new()];
        for _ in 0..self.ranks[i] {
            vectors = vectors
                .into_iter()
                .flat_map(|v: Vec<i64>| {
                    (-b..=b).map(move |x| {
                        let mut v = v.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        vectors
            .into_iter()
            .map(|v| {
                let mut w = RawWord::new();
                push(&mut w, (i, v));
                w
            })
            .collect()
    }
}

fn to_raw(m: &Model, w: &Word) -> RawWord {
    m.parse(&render_word(w))
}

/// Least period of a periodic hyperbolic class among the raw words, if any.
fn oracle_atoroidal(m: &Model, classes: &[RawWord], n_max: usize) -> Vec<(RawWord, usize)> {
    classes
        .iter()
        .filter_map(|g| (1..=n_max).find(|&n| same_class(&m.apply_n(n, g), g)).map(|n| (g.clone(), n)))
        .collect()
}

/// Least power with a twinned pair among subgroups `u A_i u^-1`, searching
/// conjugators of the form `U a u^-1` with `a` in a box.
fn oracle_twins(m: &Model, conj: &[RawWord], m_max: usize, box_bound: i64) -> Option<usize> {
    let subgroups: Vec<(RawWord, usize)> = conj
        .iter()
        .flat_map(|u| (0..m.p()).filter(move |&i| u.last().is_none_or(|s| s.0 != i)).map(move |i| (u.clone(), i)))
        .collect();
    for n in 1..=m_max {
        let bigs: Vec<RawWord> = subgroups
            .iter()
            .map(|(u, i)| concat(&m.apply_n(n, u), &m.factor_conjugator(n, *i)))
            .collect();
        let balls: HashMap<usize, Vec<RawWord>> = (0..m.p()).map(|i| (i, m.ball(i, box_bound))).collect();
        for a in 0..subgroups.len() {
            let (u, i) = &subgroups[a];
            for b in a + 1..subgroups.len() {
                let (v, j) = &subgroups[b];
                if i == j && Model::in_factor(&concat(&inv(u), v), *i) {
                    continue;
                }
                // g = U x u^-1 with x in A_i; need (V^-1 g v) in A_j
                let left = concat(&inv(&bigs[b]), &bigs[a]);
                let right = concat(&inv(u), v);
                if balls[i].iter().any(|x| Model::in_factor(&concat(&concat(&left, x), &right), *j)) {
                    return Some(n);
                }
            }
        }
    }
    None
}

fn cross_oracle() -> Outcome {
    let fixtures = [
        ("fibonacci", fibonacci()),
        ("toral_twist", toral_twist()),
        ("intro_z2z3", intro_z2z3()),
        ("mixing", mixing()),
        ("anosov_letter", anosov_letter()),
    ];
    for (name, phi) in fixtures {
        let model = Model::new(&phi);
        let words = model.raw_words(3);
        for l in 1..=3 {
            let bounds = EnumerationBounds::new(l, 1);
            let classes: Vec<RawWord> = words
                .iter()
                .filter(|w| model.hyperbolic(w) && Model::mass_one(&cyclic(w)) && cyclic(w).len() <= l)
                .cloned()
                .collect();
            for n_max in 1..=3 {
                let periodic = oracle_atoroidal(&model, &classes, n_max);
                let report = atoroidal_search(&phi, &bounds, n_max).map_err(|e| e.to_string())?;
                match &report.verdict {
                    SearchVerdict::Witness { witness } => {
                        let g = to_raw(&model, &witness.g);
                        ensure!(
                            model.hyperbolic(&g) && same_class(&model.apply_n(witness.n, &g), &g),
                            "{name} L={l} N={n_max}: witness {} fails the oracle check",
                            witness.g
                        );
                        ensure!(
                            periodic.iter().any(|(c, _)| same_class(c, &g)),
                            "{name} L={l} N={n_max}: witness {} outside the oracle's periodic set",
                            witness.g
                        );
                    }
                    SearchVerdict::Exhausted => ensure!(
                        periodic.is_empty(),
                        "{name} L={l} N={n_max}: exhausted but the oracle finds {:?}",
                        periodic[0]
                    ),
                    SearchVerdict::Undecided { reason } => return Err(format!("{name}: undecided ({reason})")),
                }
            }

            let conj: Vec<RawWord> = words
                .iter()
                .filter(|w| Model::mass_one(w) && w.len() <= l)
                .cloned()
                .collect();
            let least = oracle_twins(&model, &conj, 3, 2);
            for m_max in 1..=3 {
                let oracle = least.filter(|&n| n <= m_max);
                let report = twin_search(&phi, m_max, &bounds).map_err(|e| e.to_string())?;
                match (&report.verdict, oracle) {
                    (SearchVerdict::Witness { witness }, Some(n)) => {
                        ensure!(witness.m == n, "{name} L={l} M={m_max}: least power {} vs oracle {n}", witness.m);
                        check_twin(&model, witness).map_err(|e| format!("{name} L={l} M={m_max}: {e}"))?;
                    }
                    (SearchVerdict::Exhausted, None) => {}
                    (v, o) => return Err(format!("{name} L={l} M={m_max}: search {v:?} vs oracle {o:?}")),
                }
            }
        }
    }
    Ok(())
}

fn check_twin(model: &Model, t: &TwinWitness) -> Outcome {
    let g = to_raw(model, &t.g);
    let (u, v) = (to_raw(model, &t.h.u), to_raw(model, &t.k.u));
    ensure!(
        !(t.h.factor == t.k.factor && Model::in_factor(&concat(&inv(&u), &v), t.h.factor)),
        "witness pair is a single subgroup"
    );
    ensure!(
        model.carries(t.m, &g, &u, t.h.factor) && model.carries(t.m, &g, &v, t.k.factor),
        "witness g = {} fails the oracle check",
        t.g
    );
    Ok(())
}
