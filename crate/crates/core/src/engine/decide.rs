//! Inclusion deciders: brute-force enumeration for arbitrary grammars and
//! the Parikh/semilinear route for regular ones.
//!
//! Both deciders answer `L(g) ⊆ L(h)` for grammars over the same terminal
//! alphabet.  Counterexamples are always certified — the word comes with a
//! derivation in `g` and a definitive rejection by `h` — while positive
//! answers carry a `certified` flag: the brute-force decider can certify
//! inclusion only when its enumeration of `L(g)` was exhaustive, and the
//! semilinear decider checks all witnesses up to a representation-size
//! bound, which is conclusive for `no` answers but bounded for `yes`.

use std::collections::BTreeSet;

use crate::budget::Budget;
use crate::grammar::Grammar;
use crate::semilinear::{semilinear_inclusion, SlInclusion};
use crate::word::CommutativeWord;

use super::parikh::{parikh_regular_over, vector_to_word};
use super::{
    language_bounded, word_problem, EngineError, EnumerationBudget, SententialForm,
    WordProblemOptions,
};

/// Outcome of the word problem `w ∈ L(g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordVerdict {
    /// The word is derivable; the trace replays the derivation.
    In { trace: Vec<(usize, SententialForm)> },
    /// No derivation was found; `exhaustive` says whether the pruned
    /// search space was covered completely, making the `no` definitive.
    NotIn { exhaustive: bool },
}

/// Outcome of an inclusion check `L(g) ⊆ L(h)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InclusionVerdict {
    /// No counterexample exists (`certified`), or at least none within the
    /// search bounds described by `detail`.
    Included { certified: bool, detail: String },
    /// A word in `L(g) ∖ L(h)`, with its derivation in `g`.
    Counterexample {
        word: CommutativeWord,
        trace: Vec<(usize, SententialForm)>,
    },
}

fn check_same_alphabet(g: &Grammar, h: &Grammar) -> Result<(), EngineError> {
    let a: BTreeSet<_> = g.terminals().iter().copied().collect();
    let b: BTreeSet<_> = h.terminals().iter().copied().collect();
    if a == b {
        Ok(())
    } else {
        Err(EngineError::AlphabetMismatch)
    }
}

/// Decides `L(g) ⊆ L(h)` by enumerating `L(g)` under `bud` and testing
/// each word against `h`.  The counterexample, if any, is the smallest by
/// `(|w|, canonical order)`; a positive verdict is certified only when the
/// enumeration was exhaustive and every membership test was definitive.
pub fn decide_inclusion_bruteforce(
    g: &Grammar,
    h: &Grammar,
    bud: &EnumerationBudget,
    meter: &Budget,
) -> Result<InclusionVerdict, EngineError> {
    check_same_alphabet(g, h)?;
    let lang = language_bounded(g, &g.start_form(), bud, meter)?;
    let mut words: Vec<&CommutativeWord> = lang.words().iter().collect();
    words.sort_by(|a, b| g.cmp_canonical(a, b));

    let mut indefinite = 0usize;
    for w in words {
        match word_problem(h, w, &WordProblemOptions::default(), meter)? {
            WordVerdict::In { .. } => {}
            WordVerdict::NotIn { exhaustive: true } => {
                return Ok(InclusionVerdict::Counterexample {
                    word: w.clone(),
                    trace: lang.trace(w).expect("enumerated words have traces"),
                });
            }
            WordVerdict::NotIn { exhaustive: false } => indefinite += 1,
        }
    }

    let certified = lang.exhaustive() && indefinite == 0;
    let detail = if certified {
        format!("all {} derivable words are included", lang.words().len())
    } else if indefinite > 0 {
        format!(
            "no counterexample among {} enumerated words, but {} membership {} inconclusive",
            lang.words().len(),
            indefinite,
            if indefinite == 1 { "test was" } else { "tests were" }
        )
    } else {
        format!(
            "no counterexample among the {} words with at most {} terminals",
            lang.words().len(),
            bud.max_terminals
        )
    };
    Ok(InclusionVerdict::Included { certified, detail })
}

/// Decides `L(g) ⊆ L(h)` for regular grammars by comparing Parikh images:
/// commutative regular languages *are* their Parikh images, so inclusion
/// reduces to semilinear-set inclusion, checked for all witnesses of
/// representation size at most `witness_bits`.  A counterexample is
/// re-certified against both grammars before it is returned.
pub fn decide_inclusion_semilinear(
    g: &Grammar,
    h: &Grammar,
    witness_bits: u64,
    meter: &Budget,
) -> Result<InclusionVerdict, EngineError> {
    check_same_alphabet(g, h)?;
    let order = g.terminals();
    let p_g = parikh_regular_over(g, order, meter)?;
    let p_h = parikh_regular_over(h, order, meter)?;
    match semilinear_inclusion(&p_g, &p_h, witness_bits, meter)? {
        SlInclusion::Included { bit_bound } => Ok(InclusionVerdict::Included {
            certified: false,
            detail: format!(
                "Parikh inclusion holds for every witness of representation size \
                 at most {bit_bound}"
            ),
        }),
        SlInclusion::Counterexample(v) => {
            let word = vector_to_word(&v, order).expect("witnesses are nonnegative");
            let trace = match word_problem(g, &word, &WordProblemOptions::default(), meter)? {
                WordVerdict::In { trace } => trace,
                WordVerdict::NotIn { .. } => {
                    return Err(EngineError::Verification {
                        context: format!(
                            "witness {v} lies in the Parikh image of the left grammar but \
                             could not be derived from it"
                        ),
                    });
                }
            };
            match word_problem(h, &word, &WordProblemOptions::default(), meter)? {
                WordVerdict::NotIn { exhaustive: true } => {}
                _ => {
                    return Err(EngineError::Verification {
                        context: format!(
                            "witness {v} lies outside the Parikh image of the right grammar \
                             but its rejection could not be confirmed"
                        ),
                    });
                }
            }
            Ok(InclusionVerdict::Counterexample { word, trace })
        }
    }
}
