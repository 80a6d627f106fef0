//! Commutative grammars over multisets, semilinear-set algebra, and a
//! compiler from Π₂ Presburger sentences to language-inclusion instances.
//!
//! A commutative grammar rewrites multisets instead of strings: a production
//! `V -> W` applies to a sentential form `D` whenever the multiset `V` is
//! contained in `D`, and replaces that occurrence by `W`.  Words are Parikh
//! vectors, so the generated language is a set of vectors over the terminal
//! alphabet.  The crate provides
//!
//! * the grammar data model with classification, sizing, binary expansion,
//!   projection, and a translation to communication-free Petri nets
//!   ([`grammar`], [`petri`], [`format`]);
//! * exact semilinear-set algebra — membership, minimal solutions of linear
//!   Diophantine inequality systems, decomposition into full-rank components,
//!   and witness-bounded inclusion ([`semilinear`]);
//! * a bounded derivation engine — reachability, language enumeration, the
//!   word problem, Parikh images of regular grammars, and two inclusion
//!   deciders ([`engine`]);
//! * the lower-bound compiler that turns a Π₂ sentence into grammar pairs
//!   whose inclusion/equivalence encodes validity, in context-free and in
//!   regular form ([`reduction`]).
//!
//! All counts are arbitrary-precision; the semilinear layer is exact and
//! never touches floating point.  Enumeration entry points take explicit
//! budgets and report whether they were exhaustive, so callers can tell a
//! certified verdict from a truncated search.

pub mod budget;
pub mod engine;
pub mod format;
pub mod grammar;
pub mod linalg;
pub mod petri;
pub mod reduction;
pub mod semilinear;
pub mod symbol;
pub mod word;

pub use budget::{Budget, BudgetExhausted};
pub use grammar::{Grammar, GrammarClass, GrammarError, Production};
pub use symbol::{Sym, SymbolKind};
pub use word::CommutativeWord;
