//! Shared fixtures for the criterion benchmarks: small grammars, a worked
//! Π₂ sentence, and semilinear sets sized so one iteration of every kernel
//! stays in the millisecond range.

use comgram::format::parse_grammar;
use comgram::grammar::Grammar;
use comgram::semilinear::{LinearSet, SemiLinearSet, Vector};

/// `a*` as a left-linear grammar.
pub const ASTAR: &str = "terminals a\nnonterminals S\naxiom S\nS -> S a | eps\n";

/// `(aa)*` as a left-linear grammar.
pub const AASTAR: &str = "terminals a\nnonterminals S\naxiom S\nS -> S a a | eps\n";

/// A two-letter regular grammar with interlocking cycles, so its Parikh
/// image needs several linear components.
pub const TWO_LETTER: &str = "terminals a b\n\
     nonterminals R0 R1 R2\n\
     axiom R0\n\
     R0 -> R1 a a | R2 b | eps\n\
     R1 -> R0 b b b | a\n\
     R2 -> R2 a b | eps\n";

/// The worked even-or-odd sentence: ∀x.∃y. (x = 2y) ∨ (x + 1 = 2y).
pub const EVEN_OR_ODD: &str = "(forall (x) (exists (y) \
     (or (and (>= x (* 2 y)) (>= (* -1 x) (* -2 y))) \
         (and (>= (+ x 1) (* 2 y)) (>= (+ (* -1 x) -1) (* -2 y))))))";

pub fn grammar(text: &str) -> Grammar {
    parse_grammar(text).expect("fixture grammar parses")
}

/// A rank-deficient dimension-4 linear set: three periods spanning a
/// two-dimensional lattice, so decomposition has real work to do.
pub fn rank_deficient_linear() -> LinearSet {
    LinearSet::new(
        Vector::from_i64s(&[1, 0, 2, 0]),
        vec![
            Vector::from_i64s(&[1, 1, 0, 0]),
            Vector::from_i64s(&[2, 2, 0, 0]),
            Vector::from_i64s(&[0, 0, 1, 2]),
        ],
    )
    .expect("fixture linear set is well formed")
}

/// Even/odd lattice pair in dimension 2: `coarse ⊆ fine` holds, and the
/// inclusion check has to sweep every witness up to the bit bound.
pub fn lattice_pair() -> (SemiLinearSet, SemiLinearSet) {
    let coarse = SemiLinearSet::new(
        2,
        vec![LinearSet::new(
            Vector::from_i64s(&[0, 0]),
            vec![Vector::from_i64s(&[2, 0]), Vector::from_i64s(&[0, 3])],
        )
        .unwrap()],
    )
    .unwrap();
    let fine = SemiLinearSet::new(
        2,
        vec![LinearSet::new(
            Vector::from_i64s(&[0, 0]),
            vec![Vector::from_i64s(&[1, 0]), Vector::from_i64s(&[0, 1])],
        )
        .unwrap()],
    )
    .unwrap();
    (coarse, fine)
}
