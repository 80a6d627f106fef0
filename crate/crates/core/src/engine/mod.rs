//! The bounded derivation engine: stepping, reachability, language
//! enumeration, the word problem, Parikh images of regular grammars, and
//! inclusion deciders.
//!
//! Derivations of a commutative grammar only ever add terminals — left-hand
//! sides are multisets of nonterminals — so the terminal count of a
//! sentential form is monotone along every derivation.  All bounded
//! searches exploit exactly this: capping the terminal count of forms, or
//! pruning forms whose terminal part is not dominated by a target word,
//! never loses a derivation that the cap itself admits.  Every result
//! carries an explicit exhaustiveness flag; a verdict is only reported as
//! exhaustive if no cap was hit anywhere in the search.

pub mod decide;
pub mod parikh;

use std::collections::BTreeMap;

use num::bigint::BigUint;

use crate::budget::{Budget, BudgetExhausted};
use crate::grammar::{Grammar, GrammarError};
use crate::semilinear::SlError;
use crate::word::CommutativeWord;

pub use decide::{
    decide_inclusion_bruteforce, decide_inclusion_semilinear, InclusionVerdict, WordVerdict,
};
pub use parikh::{parikh_regular, parikh_regular_over};

/// A sentential form is just a commutative word over `N ∪ Σ`.
pub type SententialForm = CommutativeWord;

/// Errors of the derivation engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("grammar is not regular: {detail}")]
    NotRegular { detail: String },
    #[error("`{sym}` is not a terminal of the grammar")]
    NotTerminalWord { sym: String },
    #[error("the grammars have different terminal alphabets")]
    AlphabetMismatch,
    #[error("verification failed: {context}")]
    Verification { context: String },
    #[error(transparent)]
    Semilinear(#[from] SlError),
    #[error(transparent)]
    Budget(#[from] BudgetExhausted),
}

/// Caps for bounded enumeration.  `max_terminals` bounds the *terminal*
/// count `|π_Σ(w)|` of recorded forms — the measure that is monotone along
/// derivations, hence the only sound frontier prune; `max_forms` bounds how
/// many forms are recorded, `max_depth` the derivation length explored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_terminals: u64,
    pub max_forms: usize,
    pub max_depth: u64,
}

impl EnumerationBudget {
    /// Caps the terminal count, with generous form/depth allowances.
    pub fn terminals(max_terminals: u64) -> EnumerationBudget {
        EnumerationBudget {
            max_terminals,
            ..EnumerationBudget::default()
        }
    }
}

impl Default for EnumerationBudget {
    fn default() -> EnumerationBudget {
        EnumerationBudget {
            max_terminals: 12,
            max_forms: 1 << 20,
            max_depth: 4096,
        }
    }
}

#[derive(Debug, Clone)]
struct TraceStep {
    parent: Option<(SententialForm, usize)>,
}

/// The set of forms reachable from a start form under an
/// [`EnumerationBudget`], with enough bookkeeping to replay derivations.
#[derive(Debug, Clone)]
pub struct ReachResult {
    start: SententialForm,
    forms: BTreeMap<SententialForm, TraceStep>,
    /// No successor was dropped for exceeding `max_terminals`.
    pub within_terminal_cap: bool,
    /// Neither `max_forms` nor `max_depth` cut the search.
    pub within_search_caps: bool,
}

impl ReachResult {
    /// The form the search began from.
    pub fn start(&self) -> &SententialForm {
        &self.start
    }

    /// All reached forms (including the start).
    pub fn forms(&self) -> impl Iterator<Item = &SententialForm> + '_ {
        self.forms.keys()
    }

    pub fn contains(&self, w: &SententialForm) -> bool {
        self.forms.contains_key(w)
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// True iff the search saw the whole reachable set.
    pub fn exhaustive(&self) -> bool {
        self.within_terminal_cap && self.within_search_caps
    }

    /// The derivation of `w` as `(production index, resulting form)` steps
    /// starting from the start form; empty for the start form itself.
    pub fn trace(&self, w: &SententialForm) -> Option<Vec<(usize, SententialForm)>> {
        let mut steps = Vec::new();
        let mut cur = w.clone();
        loop {
            let entry = self.forms.get(&cur)?;
            match &entry.parent {
                None => break,
                Some((parent, idx)) => {
                    steps.push((*idx, cur.clone()));
                    cur = parent.clone();
                }
            }
        }
        steps.reverse();
        Some(steps)
    }
}

/// Replays a trace against a grammar, checking every step is a valid
/// application; returns the final form.
pub fn replay_trace(
    g: &Grammar,
    start: &SententialForm,
    trace: &[(usize, SententialForm)],
) -> Result<SententialForm, EngineError> {
    let mut cur = start.clone();
    for (idx, expect) in trace {
        let p = g
            .productions()
            .get(*idx)
            .ok_or_else(|| EngineError::Verification {
                context: format!("trace refers to production {idx} which does not exist"),
            })?;
        let Some(rest) = cur.checked_sub(&p.lhs) else {
            return Err(EngineError::Verification {
                context: format!("production {idx} is not applicable during replay"),
            });
        };
        cur = rest.add(&p.rhs);
        if &cur != expect {
            return Err(EngineError::Verification {
                context: format!("trace step {idx} does not produce the recorded form"),
            });
        }
    }
    Ok(cur)
}

/// One derivation step: all forms reachable from `form` by one production.
pub fn step(
    g: &Grammar,
    form: &SententialForm,
) -> Result<std::collections::BTreeSet<SententialForm>, EngineError> {
    g.check_form(form)?;
    let mut out = std::collections::BTreeSet::new();
    for p in g.productions() {
        if let Some(rest) = form.checked_sub(&p.lhs) {
            out.insert(rest.add(&p.rhs));
        }
    }
    Ok(out)
}

/// Breadth-first reachability from `start` under the budget caps.  Layers
/// are processed in `(|w|, canonical vector)` order, so discovery order —
/// and with it every trace — is deterministic.
pub fn reach_bounded(
    g: &Grammar,
    start: &SententialForm,
    bud: &EnumerationBudget,
    meter: &Budget,
) -> Result<ReachResult, EngineError> {
    g.check_form(start)?;
    let term_cap = BigUint::from(bud.max_terminals);
    let mut forms: BTreeMap<SententialForm, TraceStep> = BTreeMap::new();
    let mut within_terminal_cap = true;
    let mut within_search_caps = true;

    forms.insert(start.clone(), TraceStep { parent: None });
    let mut layer: Vec<SententialForm> = vec![start.clone()];
    let mut depth = 0u64;

    // The start form participates even if it already exceeds the terminal
    // cap; its successors are then all pruned below.
    'outer: while !layer.is_empty() && depth < bud.max_depth {
        let mut next: Vec<SententialForm> = Vec::new();
        for form in &layer {
            meter.tick(1, "bounded reachability")?;
            for (idx, p) in g.productions().iter().enumerate() {
                let Some(rest) = form.checked_sub(&p.lhs) else {
                    continue;
                };
                let succ = rest.add(&p.rhs);
                if forms.contains_key(&succ) {
                    continue;
                }
                if g.terminal_part(&succ).len() > term_cap {
                    within_terminal_cap = false;
                    continue;
                }
                if forms.len() >= bud.max_forms {
                    within_search_caps = false;
                    break 'outer;
                }
                forms.insert(
                    succ.clone(),
                    TraceStep {
                        parent: Some((form.clone(), idx)),
                    },
                );
                next.push(succ);
            }
        }
        next.sort_by(|a, b| g.cmp_canonical(a, b));
        layer = next;
        depth += 1;
    }

    // Running out of depth only truncates if a leftover form could move.
    if !layer.is_empty() && depth >= bud.max_depth {
        for form in &layer {
            if g.productions()
                .iter()
                .any(|p| form.checked_sub(&p.lhs).is_some())
            {
                within_search_caps = false;
                break;
            }
        }
    }

    Ok(ReachResult {
        start: start.clone(),
        forms,
        within_terminal_cap,
        within_search_caps,
    })
}

/// The bounded language: terminal words among the reachable forms.
#[derive(Debug, Clone)]
pub struct LanguageResult {
    reach: ReachResult,
    words: std::collections::BTreeSet<CommutativeWord>,
}

impl LanguageResult {
    pub fn words(&self) -> &std::collections::BTreeSet<CommutativeWord> {
        &self.words
    }

    /// True iff `words` is the entire language (the reach was exhaustive).
    pub fn exhaustive(&self) -> bool {
        self.reach.exhaustive()
    }

    /// True iff every language word with terminal count within the cap was
    /// found: terminal counts are monotone along derivations, so only the
    /// form/depth caps can lose such words, never the terminal cap.
    pub fn complete_up_to_terminal_cap(&self) -> bool {
        self.reach.within_search_caps
    }

    pub fn trace(&self, w: &CommutativeWord) -> Option<Vec<(usize, SententialForm)>> {
        self.reach.trace(w)
    }

    pub fn reach(&self) -> &ReachResult {
        &self.reach
    }
}

/// Enumerates language words derivable from `start` under the caps.
pub fn language_bounded(
    g: &Grammar,
    start: &SententialForm,
    bud: &EnumerationBudget,
    meter: &Budget,
) -> Result<LanguageResult, EngineError> {
    let reach = reach_bounded(g, start, bud, meter)?;
    let words = reach
        .forms()
        .filter(|w| g.is_terminal_word(w))
        .cloned()
        .collect();
    Ok(LanguageResult { reach, words })
}

/// Options for [`word_problem`].
#[derive(Debug, Clone, Default)]
pub struct WordProblemOptions {
    /// Cap on the nonterminal count of explored forms; `None` selects
    /// `|w| + ‖g‖`.  Hitting the cap downgrades a negative answer to
    /// non-exhaustive.
    pub nonterminal_cap: Option<BigUint>,
    /// Cap on explored forms; `None` selects 2²⁰.
    pub max_forms: Option<usize>,
}

/// Decides `w ∈ L(g)` by forward search with sound pruning: a form whose
/// terminal part is not a subword of `w` can never derive `w`.
pub fn word_problem(
    g: &Grammar,
    w: &CommutativeWord,
    opts: &WordProblemOptions,
    meter: &Budget,
) -> Result<WordVerdict, EngineError> {
    for (s, _) in w.iter() {
        if !g.is_terminal(s) {
            return Err(EngineError::NotTerminalWord {
                sym: s.name().to_owned(),
            });
        }
    }
    let nt_cap = opts
        .nonterminal_cap
        .clone()
        .unwrap_or_else(|| w.len() + g.size());
    let max_forms = opts.max_forms.unwrap_or(1 << 20);

    let start = g.start_form();
    if &start == w {
        return Ok(WordVerdict::In { trace: Vec::new() });
    }
    let mut forms: BTreeMap<SententialForm, TraceStep> = BTreeMap::new();
    forms.insert(start.clone(), TraceStep { parent: None });
    let mut layer = vec![start.clone()];
    let mut exhaustive = true;

    while !layer.is_empty() {
        let mut next = Vec::new();
        for form in &layer {
            meter.tick(1, "word problem search")?;
            for (idx, p) in g.productions().iter().enumerate() {
                let Some(rest) = form.checked_sub(&p.lhs) else {
                    continue;
                };
                let succ = rest.add(&p.rhs);
                if forms.contains_key(&succ) {
                    continue;
                }
                // Sound prune: terminals never disappear.
                if !g.terminal_part(&succ).is_subword_of(w) {
                    continue;
                }
                if g.nonterminal_part(&succ).len() > nt_cap {
                    exhaustive = false;
                    continue;
                }
                if forms.len() >= max_forms {
                    exhaustive = false;
                    continue;
                }
                forms.insert(
                    succ.clone(),
                    TraceStep {
                        parent: Some((form.clone(), idx)),
                    },
                );
                if &succ == w {
                    let result = ReachResult {
                        start,
                        forms,
                        within_terminal_cap: true,
                        within_search_caps: true,
                    };
                    return Ok(WordVerdict::In {
                        trace: result.trace(w).expect("witness recorded"),
                    });
                }
                next.push(succ);
            }
        }
        next.sort_by(|a, b| g.cmp_canonical(a, b));
        layer = next;
    }

    Ok(WordVerdict::NotIn { exhaustive })
}

/// Enumerates the language words derivable from `start` whose terminal
/// counts fit pointwise under `cap` (symbols absent from `cap` are capped
/// at zero).  Pruning any form whose terminal part exceeds the box is sound
/// because terminal counts are monotone along derivations, so the returned
/// set is exactly `L(g, start) ∩ box` whenever the boolean is `true`; a
/// `false` flag means the form cap truncated the search.
pub fn language_in_box(
    g: &Grammar,
    start: &SententialForm,
    cap: &CommutativeWord,
    max_forms: usize,
    meter: &Budget,
) -> Result<(std::collections::BTreeSet<CommutativeWord>, bool), EngineError> {
    g.check_form(start)?;
    for (s, _) in cap.iter() {
        if !g.is_terminal(s) {
            return Err(EngineError::NotTerminalWord {
                sym: s.name().to_owned(),
            });
        }
    }
    if !g.terminal_part(start).is_subword_of(cap) {
        // Terminal counts only grow, so nothing derivable fits the box.
        return Ok((std::collections::BTreeSet::new(), true));
    }
    let mut exhaustive = true;
    let mut visited: std::collections::BTreeSet<SententialForm> = std::collections::BTreeSet::new();
    let mut layer: Vec<SententialForm> = Vec::new();
    visited.insert(start.clone());
    layer.push(start.clone());
    while !layer.is_empty() {
        let mut next = Vec::new();
        'forms: for form in &layer {
            meter.tick(1, "box-bounded enumeration")?;
            for p in g.productions() {
                let Some(rest) = form.checked_sub(&p.lhs) else {
                    continue;
                };
                let succ = rest.add(&p.rhs);
                if visited.contains(&succ) {
                    continue;
                }
                if !g.terminal_part(&succ).is_subword_of(cap) {
                    continue;
                }
                if visited.len() >= max_forms {
                    exhaustive = false;
                    break 'forms;
                }
                visited.insert(succ.clone());
                next.push(succ);
            }
        }
        layer = next;
    }
    let words = visited
        .into_iter()
        .filter(|w| g.is_terminal_word(w))
        .collect();
    Ok((words, exhaustive))
}
