//! Witness-bounded inclusion between semilinear sets.
//!
//! Candidate witnesses `v ∈ ℕ^dim` are enumerated in order of binary
//! representation size `#v`, so a returned counterexample is minimal in
//! that measure (ties broken by `|v|₁`, then lexicographically).  A
//! positive answer is always relative to the bit-size bound; callers pick
//! the bound, e.g. from the representation sizes of the inputs.

use num::bigint::{BigInt, BigUint};
use num::traits::{One, Zero};

use crate::budget::Budget;
use crate::semilinear::{member_semilinear, SemiLinearSet, SlError, Vector};

/// Outcome of the bounded inclusion check `M ⊆ N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlInclusion {
    /// No witness of `M ∖ N` exists with `#v` up to the bound.
    Included { bit_bound: u64 },
    /// A vector in `M` but not in `N`, minimal in `(#v, |v|₁, lex)` order.
    Counterexample(Vector),
}

/// All values a single coordinate may take at a given bit cost:
/// cost 0 admits {0, 1}, cost c ≥ 1 admits (2^(c-1), 2^c].
fn values_of_cost(cost: u64) -> impl Iterator<Item = BigUint> {
    let (lo, hi): (BigUint, BigUint) = if cost == 0 {
        (BigUint::zero(), BigUint::one())
    } else {
        (
            (BigUint::one() << (cost - 1)) + BigUint::one(),
            BigUint::one() << cost,
        )
    };
    let mut cur = lo;
    let mut done = false;
    std::iter::from_fn(move || {
        if done || cur > hi {
            return None;
        }
        let out = cur.clone();
        if cur == hi {
            done = true;
        } else {
            cur += BigUint::one();
        }
        Some(out)
    })
}

fn vectors_of_bit_size(dim: usize, total: u64, budget: &Budget) -> Result<Vec<Vector>, SlError> {
    // Distribute `total` bits over the coordinates; every coordinate also
    // admits the cost-0 values {0, 1}.
    let mut out: Vec<Vec<BigUint>> = Vec::new();
    fn rec(
        dim: usize,
        left: u64,
        prefix: &mut Vec<BigUint>,
        out: &mut Vec<Vec<BigUint>>,
        budget: &Budget,
    ) -> Result<(), SlError> {
        if dim == 0 {
            if left == 0 {
                budget.tick(1, "witness enumeration")?;
                out.push(prefix.clone());
            }
            return Ok(());
        }
        for cost in 0..=left {
            // The final coordinate must consume the remaining budget.
            if dim == 1 && cost != left {
                continue;
            }
            for v in values_of_cost(cost) {
                prefix.push(v);
                rec(dim - 1, left - cost, prefix, out, budget)?;
                prefix.pop();
            }
        }
        Ok(())
    }
    let mut prefix = Vec::new();
    rec(dim, total, &mut prefix, &mut out, budget)?;
    let mut vectors: Vec<Vector> = out
        .into_iter()
        .map(|es| Vector::new(es.into_iter().map(BigInt::from).collect()))
        .collect();
    debug_assert!(vectors.iter().all(|v| v.rep_size() == total));
    vectors.sort_by(|a, b| a.norm_1().cmp(&b.norm_1()).then_with(|| a.cmp(b)));
    Ok(vectors)
}

/// Checks `m ⊆ n` for witnesses of representation size up to `bit_bound`.
pub fn semilinear_inclusion(
    m: &SemiLinearSet,
    n: &SemiLinearSet,
    bit_bound: u64,
    budget: &Budget,
) -> Result<SlInclusion, SlError> {
    if m.dim() != n.dim() {
        return Err(SlError::DimensionMismatch {
            expected: m.dim(),
            got: n.dim(),
        });
    }
    for total in 0..=bit_bound {
        for v in vectors_of_bit_size(m.dim(), total, budget)? {
            if member_semilinear(&v, m, budget)? && !member_semilinear(&v, n, budget)? {
                return Ok(SlInclusion::Counterexample(v));
            }
        }
    }
    Ok(SlInclusion::Included { bit_bound })
}
