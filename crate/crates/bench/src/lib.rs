//! Fixtures shared by the benchmarks in `benches/`.

use fpaut_core::{parse_word, Automorphism, Presentation, Word};

pub fn aut(ranks: Vec<usize>, k: usize, fwd: &[&str], bwd: &[&str]) -> Automorphism {
    let p = Presentation::new(ranks, k).expect("valid presentation");
    let words = |ws: &[&str]| ws.iter().map(|w| parse_word(w, &p).expect("valid word")).collect();
    Automorphism::new(&p, words(fwd), words(bwd)).expect("valid automorphism")
}

pub fn fibonacci() -> Automorphism {
    aut(vec![], 2, &["x1 x2", "x1"], &["x2", "x2^-1 x1"])
}

pub fn intro_z2z3() -> Automorphism {
    aut(
        vec![2, 3],
        0,
        &["a1.1^2 a1.2", "a1.1 a1.2", "a2.2", "a2.3", "a2.1 a2.2"],
        &["a1.1 a1.2^-1", "a1.1^-1 a1.2^2", "a2.1^-1 a2.3", "a2.1", "a2.2"],
    )
}

pub fn mixing() -> Automorphism {
    aut(
        vec![1, 1],
        2,
        &["a1.1", "x1 a2.1 x1^-1", "x1 x2 a1.1", "x1"],
        &["a1.1", "x2^-1 a2.1 x2", "x2", "x2^-1 x1 a1.1^-1"],
    )
}

/// A deterministic word of `n` syllables cycling through every slot.
pub fn long_word(pres: &Presentation, n: usize) -> Word {
    let names: Vec<String> = pres.generators().iter().map(ToString::to_string).collect();
    let text: Vec<String> = (0..n).map(|i| format!("{}^{}", names[i % names.len()], 1 + (i % 3) as i64)).collect();
    parse_word(&text.join(" "), pres).expect("valid word")
}
