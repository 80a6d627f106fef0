//! The commutative grammar data model: productions, validation,
//! classification, sizing, and binary expansion of large multiplicities.

use std::collections::BTreeSet;
use std::fmt;

use num::bigint::BigUint;
use num::traits::One;

use crate::budget::{Budget, BudgetExhausted};
use crate::symbol::Sym;
use crate::word::CommutativeWord;

/// Errors raised while constructing or transforming grammars.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("symbol `{name}` is declared more than once")]
    DuplicateSymbol { name: String },
    #[error("axiom `{name}` is not a declared nonterminal")]
    AxiomNotNonterminal { name: String },
    #[error("production {index}: left-hand side is empty")]
    EmptyLhs { index: usize },
    #[error("production {index}: `{sym}` on the left-hand side is not a nonterminal")]
    LhsNotNonterminal { index: usize, sym: String },
    #[error("production {index}: symbol `{sym}` is not declared")]
    UndeclaredSymbol { index: usize, sym: String },
    #[error("word uses `{sym}`, which this grammar does not declare")]
    ForeignSymbol { sym: String },
    #[error(transparent)]
    Budget(#[from] BudgetExhausted),
}

/// A rewriting rule `lhs -> rhs`; `lhs` is a nonempty multiset of
/// nonterminals, `rhs` an arbitrary multiset over all declared symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Production {
    pub lhs: CommutativeWord,
    pub rhs: CommutativeWord,
}

impl Production {
    pub fn new(lhs: CommutativeWord, rhs: CommutativeWord) -> Production {
        Production { lhs, rhs }
    }

    /// Unary size contribution `|lhs| + |rhs|`.
    pub fn size(&self) -> BigUint {
        self.lhs.len() + self.rhs.len()
    }
}

/// The classical grammar hierarchy, restricted to commutative grammars.
/// Variants are ordered from most to least restrictive; on grammars that
/// are both exponent-sensitive and context-sensitive the more structured
/// exponent-sensitive class is considered primary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GrammarClass {
    /// `lhs` a single nonterminal, `rhs` has at most one nonterminal occurrence.
    Regular,
    /// `lhs` a single nonterminal.
    ContextFree,
    /// `lhs` a positive power of a single nonterminal.
    ExponentSensitive,
    /// `|lhs| >= |rhs|` for every production.
    ContextSensitive,
    /// No restriction.
    Type0,
}

impl fmt::Display for GrammarClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GrammarClass::Regular => "regular",
            GrammarClass::ContextFree => "context-free",
            GrammarClass::ExponentSensitive => "exponent-sensitive",
            GrammarClass::ContextSensitive => "context-sensitive",
            GrammarClass::Type0 => "type-0",
        };
        f.write_str(s)
    }
}

/// All classes a grammar belongs to; always contains [`GrammarClass::Type0`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSet {
    set: BTreeSet<GrammarClass>,
}

impl ClassSet {
    pub fn contains(&self, class: GrammarClass) -> bool {
        self.set.contains(&class)
    }

    /// The most restrictive class in the set.
    pub fn primary(&self) -> GrammarClass {
        *self.set.first().expect("class set always contains Type0")
    }

    pub fn iter(&self) -> impl Iterator<Item = GrammarClass> + '_ {
        self.set.iter().copied()
    }
}

/// A commutative grammar `(N, Σ, S, P)`.  Declaration order of terminals
/// and nonterminals is preserved; it defines the canonical coordinate
/// order used for vectors, rendering, and deterministic tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    terminals: Vec<Sym>,
    nonterminals: Vec<Sym>,
    axiom: Sym,
    productions: Vec<Production>,
    terminal_set: BTreeSet<Sym>,
    nonterminal_set: BTreeSet<Sym>,
}

impl Grammar {
    /// Validates and builds a grammar.
    pub fn new(
        terminals: Vec<Sym>,
        nonterminals: Vec<Sym>,
        axiom: Sym,
        productions: Vec<Production>,
    ) -> Result<Grammar, GrammarError> {
        let mut seen: BTreeSet<Sym> = BTreeSet::new();
        for &s in terminals.iter().chain(nonterminals.iter()) {
            if !seen.insert(s) {
                return Err(GrammarError::DuplicateSymbol {
                    name: s.name().to_owned(),
                });
            }
        }
        let terminal_set: BTreeSet<Sym> = terminals.iter().copied().collect();
        let nonterminal_set: BTreeSet<Sym> = nonterminals.iter().copied().collect();
        if !nonterminal_set.contains(&axiom) {
            return Err(GrammarError::AxiomNotNonterminal {
                name: axiom.name().to_owned(),
            });
        }
        for (index, p) in productions.iter().enumerate() {
            if p.lhs.is_empty() {
                return Err(GrammarError::EmptyLhs { index });
            }
            for (s, _) in p.lhs.iter() {
                if !nonterminal_set.contains(&s) {
                    if terminal_set.contains(&s) {
                        return Err(GrammarError::LhsNotNonterminal {
                            index,
                            sym: s.name().to_owned(),
                        });
                    }
                    return Err(GrammarError::UndeclaredSymbol {
                        index,
                        sym: s.name().to_owned(),
                    });
                }
            }
            for (s, _) in p.rhs.iter() {
                if !nonterminal_set.contains(&s) && !terminal_set.contains(&s) {
                    return Err(GrammarError::UndeclaredSymbol {
                        index,
                        sym: s.name().to_owned(),
                    });
                }
            }
        }
        Ok(Grammar {
            terminals,
            nonterminals,
            axiom,
            productions,
            terminal_set,
            nonterminal_set,
        })
    }

    pub fn terminals(&self) -> &[Sym] {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &[Sym] {
        &self.nonterminals
    }

    pub fn axiom(&self) -> Sym {
        self.axiom
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn terminal_set(&self) -> &BTreeSet<Sym> {
        &self.terminal_set
    }

    pub fn nonterminal_set(&self) -> &BTreeSet<Sym> {
        &self.nonterminal_set
    }

    pub fn is_terminal(&self, s: Sym) -> bool {
        self.terminal_set.contains(&s)
    }

    pub fn is_nonterminal(&self, s: Sym) -> bool {
        self.nonterminal_set.contains(&s)
    }

    /// The sentential form the grammar starts from: one axiom occurrence.
    pub fn start_form(&self) -> CommutativeWord {
        CommutativeWord::singleton(self.axiom)
    }

    /// Terminals followed by nonterminals, each in declaration order.
    pub fn symbol_order(&self) -> Vec<Sym> {
        let mut order = self.terminals.clone();
        order.extend_from_slice(&self.nonterminals);
        order
    }

    /// `π_Σ(w)`: the terminal part of a sentential form.
    pub fn terminal_part(&self, w: &CommutativeWord) -> CommutativeWord {
        w.project(&self.terminal_set)
    }

    /// `π_N(w)`: the nonterminal part of a sentential form.
    pub fn nonterminal_part(&self, w: &CommutativeWord) -> CommutativeWord {
        w.project(&self.nonterminal_set)
    }

    /// True iff `w` uses only terminals (a word of the language if derivable).
    pub fn is_terminal_word(&self, w: &CommutativeWord) -> bool {
        w.iter().all(|(s, _)| self.terminal_set.contains(&s))
    }

    /// Checks that every symbol of `w` is declared in this grammar.
    pub fn check_form(&self, w: &CommutativeWord) -> Result<(), GrammarError> {
        for (s, _) in w.iter() {
            if !self.terminal_set.contains(&s) && !self.nonterminal_set.contains(&s) {
                return Err(GrammarError::ForeignSymbol {
                    sym: s.name().to_owned(),
                });
            }
        }
        Ok(())
    }

    /// Deterministic ordering of forms: by unary length, then by the
    /// canonical coordinate vector in declaration order.
    pub fn cmp_canonical(&self, a: &CommutativeWord, b: &CommutativeWord) -> std::cmp::Ordering {
        a.len().cmp(&b.len()).then_with(|| {
            let order = self.symbol_order();
            a.counts_in_order(&order).cmp(&b.counts_in_order(&order))
        })
    }

    /// Unary size `‖G‖ = |N| + |Σ| + Σ_P (|lhs| + |rhs|)`.
    pub fn size(&self) -> BigUint {
        let mut total = BigUint::from(self.nonterminals.len() + self.terminals.len());
        for p in &self.productions {
            total += p.size();
        }
        total
    }

    /// Every class the grammar belongs to.
    pub fn classify(&self) -> ClassSet {
        let one = BigUint::one();
        let mut regular = true;
        let mut context_free = true;
        let mut exponent_sensitive = true;
        let mut context_sensitive = true;
        for p in &self.productions {
            let lhs_len = p.lhs.len();
            let single_nt = lhs_len == one;
            let single_power = p.lhs.support_len() == 1;
            let rhs_nts = self.nonterminal_part(&p.rhs).len();
            regular &= single_nt && rhs_nts <= one;
            context_free &= single_nt;
            exponent_sensitive &= single_power;
            context_sensitive &= lhs_len >= p.rhs.len();
        }
        let mut set = BTreeSet::new();
        set.insert(GrammarClass::Type0);
        if regular {
            set.insert(GrammarClass::Regular);
        }
        if context_free {
            set.insert(GrammarClass::ContextFree);
        }
        if exponent_sensitive {
            set.insert(GrammarClass::ExponentSensitive);
        }
        if context_sensitive {
            set.insert(GrammarClass::ContextSensitive);
        }
        ClassSet { set }
    }

    /// Rewrites every terminal multiplicity above 1 on a right-hand side
    /// through a chain of doubling nonterminals, so the result's unary size
    /// is logarithmic in the original multiplicities.  The generated
    /// language is unchanged.  `budget` bounds the number of fresh symbols.
    pub fn binary_expand(&self, budget: &Budget) -> Result<Grammar, GrammarError> {
        // Highest chain level needed per terminal.
        let mut level_needed: std::collections::BTreeMap<Sym, u64> = Default::default();
        for p in &self.productions {
            for (s, c) in p.rhs.iter() {
                if self.is_terminal(s) && c > &BigUint::one() {
                    let top = c.bits() - 1; // highest set bit index
                    let e = level_needed.entry(s).or_insert(0);
                    *e = (*e).max(top);
                }
            }
        }

        let mut taken: BTreeSet<&'static str> = self
            .terminals
            .iter()
            .chain(self.nonterminals.iter())
            .map(|s| s.name())
            .collect();
        let mut fresh = |base: String| -> Sym {
            let mut name = base.clone();
            let mut n = 0u64;
            while taken.contains(name.as_str()) {
                n += 1;
                name = format!("{base}.{n}");
            }
            let sym = Sym::new(&name);
            taken.insert(sym.name());
            sym
        };

        // dbl[a][e] derives exactly a^(2^e), for 1 <= e <= level_needed[a].
        let mut chain: std::collections::BTreeMap<Sym, Vec<Sym>> = Default::default();
        let mut new_nonterminals = self.nonterminals.clone();
        let mut new_productions = self.productions.clone();
        for &term in &self.terminals {
            let Some(&top) = level_needed.get(&term) else {
                continue;
            };
            budget.tick(top, "binary expansion chain symbols")?;
            let mut levels = Vec::new();
            for e in 1..=top {
                let sym = fresh(format!("dbl.{}.{}", term.name(), e));
                levels.push(sym);
                new_nonterminals.push(sym);
                let rhs = if e == 1 {
                    CommutativeWord::with_count(term, BigUint::from(2u32))
                } else {
                    CommutativeWord::with_count(levels[(e - 2) as usize], BigUint::from(2u32))
                };
                new_productions.push(Production::new(CommutativeWord::singleton(sym), rhs));
            }
            chain.insert(term, levels);
        }

        for p in new_productions.iter_mut().take(self.productions.len()) {
            let mut rhs = CommutativeWord::empty();
            for (s, c) in p.rhs.iter() {
                if !self.terminal_set.contains(&s) || c <= &BigUint::one() {
                    rhs.add_count(s, c.clone());
                    continue;
                }
                if c.bit(0) {
                    rhs.add_count(s, BigUint::one());
                }
                for e in 1..c.bits() {
                    if c.bit(e) {
                        rhs.add_count(chain[&s][(e - 1) as usize], BigUint::one());
                    }
                }
            }
            p.rhs = rhs;
        }

        Grammar::new(
            self.terminals.clone(),
            new_nonterminals,
            self.axiom,
            new_productions,
        )
    }
}

/// Projects every word of a set onto the symbols in `keep`.
pub fn project_words(
    words: &BTreeSet<CommutativeWord>,
    keep: &BTreeSet<Sym>,
) -> BTreeSet<CommutativeWord> {
    words.iter().map(|w| w.project(keep)).collect()
}
