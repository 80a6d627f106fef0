//! Commutative words: finite multisets of symbols with arbitrary-precision
//! multiplicities.
//!
//! A commutative word stores only its nonzero counts, so equality, hashing
//! and ordering are well defined regardless of which alphabet the word is
//! read against.  Concatenation is multiset sum and is commutative.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::bigint::BigUint;
use num::traits::{One, Zero};

use crate::symbol::Sym;

/// `ceil(log2(n))` for `n >= 1`; used by the binary representation size.
pub fn ceil_log2(n: &BigUint) -> u64 {
    if n <= &BigUint::one() {
        0
    } else {
        (n - BigUint::one()).bits()
    }
}

/// A multiset of symbols.  The zero-count invariant is maintained by every
/// constructor and operation: absent symbols have count zero.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CommutativeWord {
    counts: BTreeMap<Sym, BigUint>,
}

impl CommutativeWord {
    /// The empty word ε.
    pub fn empty() -> CommutativeWord {
        CommutativeWord::default()
    }

    /// A single occurrence of `sym`.
    pub fn singleton(sym: Sym) -> CommutativeWord {
        CommutativeWord::with_count(sym, BigUint::one())
    }

    /// `sym` with multiplicity `count` (the empty word when `count` is 0).
    pub fn with_count(sym: Sym, count: BigUint) -> CommutativeWord {
        let mut w = CommutativeWord::empty();
        w.add_count(sym, count);
        w
    }

    /// Builds a word from `(symbol, count)` pairs, summing repeats.
    pub fn from_counts<I>(pairs: I) -> CommutativeWord
    where
        I: IntoIterator<Item = (Sym, BigUint)>,
    {
        let mut w = CommutativeWord::empty();
        for (s, c) in pairs {
            w.add_count(s, c);
        }
        w
    }

    /// Convenience constructor from `(name, count)` pairs with `u64` counts.
    pub fn parse_counts<'a, I>(pairs: I) -> CommutativeWord
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        CommutativeWord::from_counts(
            pairs
                .into_iter()
                .map(|(n, c)| (Sym::new(n), BigUint::from(c))),
        )
    }

    /// True iff this is ε.
    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// The multiplicity of `sym` (zero when absent).
    pub fn count(&self, sym: Sym) -> BigUint {
        self.counts.get(&sym).cloned().unwrap_or_default()
    }

    /// Borrowed multiplicity, `None` when absent.
    pub fn get(&self, sym: Sym) -> Option<&BigUint> {
        self.counts.get(&sym)
    }

    /// Adds `count` occurrences of `sym` in place.
    pub fn add_count(&mut self, sym: Sym, count: BigUint) {
        if count.is_zero() {
            return;
        }
        *self.counts.entry(sym).or_default() += count;
    }

    /// Iterates over `(symbol, count)` pairs with positive counts.
    pub fn iter(&self) -> impl Iterator<Item = (Sym, &BigUint)> + '_ {
        self.counts.iter().map(|(s, c)| (*s, c))
    }

    /// The set of symbols with positive count.
    pub fn support(&self) -> BTreeSet<Sym> {
        self.counts.keys().copied().collect()
    }

    /// Number of distinct symbols occurring.
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    /// Unary length `|w|`: the sum of all multiplicities.
    pub fn len(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// `|w|` as `u64` when it fits.
    pub fn len_u64(&self) -> Option<u64> {
        use num::ToPrimitive;
        self.len().to_u64()
    }

    /// Binary representation size `#w = Σ ceil(log2(count))` over occurring
    /// symbols; a multiplicity of 1 contributes 0.
    pub fn rep_size(&self) -> u64 {
        self.counts.values().map(ceil_log2).sum()
    }

    /// Multiset sum (commutative concatenation).
    pub fn add(&self, other: &CommutativeWord) -> CommutativeWord {
        let mut out = self.clone();
        for (s, c) in other.iter() {
            out.add_count(s, c.clone());
        }
        out
    }

    /// Multiset difference; `None` unless `other` is a subword of `self`.
    pub fn checked_sub(&self, other: &CommutativeWord) -> Option<CommutativeWord> {
        let mut out = self.clone();
        for (s, c) in other.iter() {
            let have = out.counts.get_mut(&s)?;
            if &*have < c {
                return None;
            }
            *have -= c;
            if have.is_zero() {
                out.counts.remove(&s);
            }
        }
        Some(out)
    }

    /// Pointwise scaling by `k`.
    pub fn scale(&self, k: &BigUint) -> CommutativeWord {
        if k.is_zero() {
            return CommutativeWord::empty();
        }
        CommutativeWord::from_counts(self.iter().map(|(s, c)| (s, c * k)))
    }

    /// Pointwise comparison: true iff `self(s) <= other(s)` for all `s`.
    pub fn is_subword_of(&self, other: &CommutativeWord) -> bool {
        self.counts
            .iter()
            .all(|(s, c)| other.counts.get(s).is_some_and(|d| c <= d))
    }

    /// Projection `π_Γ(w)`: keeps exactly the symbols in `keep`.
    pub fn project(&self, keep: &BTreeSet<Sym>) -> CommutativeWord {
        CommutativeWord {
            counts: self
                .counts
                .iter()
                .filter(|(s, _)| keep.contains(s))
                .map(|(s, c)| (*s, c.clone()))
                .collect(),
        }
    }

    /// Projection keeping symbols *not* in `drop`.
    pub fn project_away(&self, drop: &BTreeSet<Sym>) -> CommutativeWord {
        CommutativeWord {
            counts: self
                .counts
                .iter()
                .filter(|(s, _)| !drop.contains(s))
                .map(|(s, c)| (*s, c.clone()))
                .collect(),
        }
    }

    /// Counts laid out along `order` (symbols outside `order` are ignored).
    pub fn counts_in_order(&self, order: &[Sym]) -> Vec<BigUint> {
        order.iter().map(|s| self.count(*s)).collect()
    }

    /// Renders as space-separated `sym^count` factors following `order`,
    /// then any remaining symbols by name; ε for the empty word.
    pub fn render(&self, order: &[Sym]) -> String {
        if self.is_empty() {
            return "eps".to_owned();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut seen: BTreeSet<Sym> = BTreeSet::new();
        let mut push = |sym: Sym, count: &BigUint| {
            if count.is_one() {
                parts.push(sym.name().to_owned());
            } else {
                parts.push(format!("{}^{}", sym.name(), count));
            }
        };
        for &s in order {
            if let Some(c) = self.counts.get(&s) {
                if seen.insert(s) {
                    push(s, c);
                }
            }
        }
        let mut rest: Vec<(Sym, &BigUint)> = self
            .counts
            .iter()
            .filter(|(s, _)| !seen.contains(s))
            .map(|(s, c)| (*s, c))
            .collect();
        rest.sort_by_key(|(s, _)| s.name());
        for (s, c) in rest {
            push(s, c);
        }
        parts.join(" ")
    }
}

impl fmt::Debug for CommutativeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}⟩", self.render(&[]))
    }
}

impl FromIterator<(Sym, BigUint)> for CommutativeWord {
    fn from_iter<I: IntoIterator<Item = (Sym, BigUint)>>(iter: I) -> Self {
        CommutativeWord::from_counts(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(pairs: &[(&str, u64)]) -> CommutativeWord {
        CommutativeWord::parse_counts(pairs.iter().copied())
    }

    #[test]
    fn zero_counts_are_never_stored() {
        let a = w(&[("wa", 0), ("wb", 2)]);
        assert_eq!(a.support_len(), 1);
        assert!(a.get(Sym::new("wa")).is_none());
        let b = a.checked_sub(&w(&[("wb", 2)])).unwrap();
        assert!(b.is_empty());
    }

    #[test]
    fn length_and_rep_size() {
        // |a^3 b| = 4; #w = ceil(log2 3) + ceil(log2 1) = 2 + 0 = 2.
        let v = w(&[("wa", 3), ("wb", 1)]);
        assert_eq!(v.len(), BigUint::from(4u32));
        assert_eq!(v.rep_size(), 2);
        assert_eq!(CommutativeWord::empty().rep_size(), 0);
        // Powers of two: #(a^8) = 3.
        assert_eq!(w(&[("wa", 8)]).rep_size(), 3);
        assert_eq!(w(&[("wa", 9)]).rep_size(), 4);
    }

    #[test]
    fn ceil_log2_small_values() {
        let vals: Vec<u64> = vec![0, 1, 2, 2, 3, 3, 3, 3, 4];
        for (n, want) in (1u32..=9).zip(vals.iter()) {
            assert_eq!(ceil_log2(&BigUint::from(n)), *want, "n={n}");
        }
    }

    #[test]
    fn subword_and_difference() {
        let big = w(&[("wa", 3), ("wb", 1)]);
        let small = w(&[("wa", 2)]);
        assert!(small.is_subword_of(&big));
        assert!(!big.is_subword_of(&small));
        assert_eq!(big.checked_sub(&small).unwrap(), w(&[("wa", 1), ("wb", 1)]));
        assert!(small.checked_sub(&big).is_none());
    }

    #[test]
    fn render_follows_order() {
        let v = w(&[("wa", 2), ("wb", 1)]);
        let order = [Sym::new("wb"), Sym::new("wa")];
        assert_eq!(v.render(&order), "wb wa^2");
        assert_eq!(CommutativeWord::empty().render(&order), "eps");
    }
}
