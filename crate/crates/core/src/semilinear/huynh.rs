//! Decomposition of a linear set into components with linearly independent
//! periods.
//!
//! Every linear set `L(b, P)` equals a finite union of linear sets
//! `L(b_i, Q_i)` where each `Q_i ⊆ P` is a full-column-rank subset of size
//! `rank(P)` and each `b_i ∈ L(b, P)`.  The bases are found by a widening
//! sweep over small period combinations; candidate bases already covered by
//! an emitted component are skipped.  The result is certified by comparing
//! membership against the input on a verification box before it is
//! returned, so an insufficient widening bound surfaces as an error, never
//! as a wrong set.

use num::bigint::{BigInt, BigUint};

use crate::budget::Budget;
use crate::linalg;
use crate::semilinear::{
    box_points, member_linear, member_semilinear, LinearSet, SemiLinearSet, SlError, Vector,
};

/// Tuning knobs for [`huynh_decompose`].
#[derive(Debug, Clone)]
pub struct HuynhOptions {
    /// Maximum period multiplicity explored when searching for bases.
    pub widening_max: u64,
    /// Verification box, per coordinate; `None` selects
    /// `base + 2·(max period) + 2` in every coordinate.
    pub verify_box: Option<Vec<BigUint>>,
}

impl Default for HuynhOptions {
    fn default() -> HuynhOptions {
        HuynhOptions {
            widening_max: 8,
            verify_box: None,
        }
    }
}

fn default_box(l: &LinearSet) -> Vec<BigUint> {
    let two = BigUint::from(2u32);
    (0..l.dim())
        .map(|i| {
            let base = l.base().get(i).magnitude().clone();
            let pmax = l
                .periods()
                .iter()
                .map(|p| p.get(i).magnitude().clone())
                .max()
                .unwrap_or_default();
            base + two.clone() * pmax + &two
        })
        .collect()
}

/// Splits `l` into full-rank components covering exactly the same set.
pub fn huynh_decompose(
    l: &LinearSet,
    opts: &HuynhOptions,
    budget: &Budget,
) -> Result<SemiLinearSet, SlError> {
    // Distinct nonzero periods, in first-occurrence order.
    let mut periods: Vec<Vector> = Vec::new();
    for p in l.periods() {
        if !p.is_zero() && !periods.contains(p) {
            periods.push(p.clone());
        }
    }
    let cols: Vec<Vec<BigInt>> = periods.iter().map(|p| p.entries().to_vec()).collect();
    let rank = linalg::column_rank(&cols, l.dim());

    // All size-`rank` subsets with independent columns.
    let mut subsets: Vec<Vec<Vector>> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn pick(
        start: usize,
        rank: usize,
        periods: &[Vector],
        dim: usize,
        chosen: &mut Vec<usize>,
        subsets: &mut Vec<Vec<Vector>>,
    ) {
        if chosen.len() == rank {
            let cols: Vec<Vec<BigInt>> = chosen
                .iter()
                .map(|&i| periods[i].entries().to_vec())
                .collect();
            if linalg::columns_independent(&cols, dim) {
                subsets.push(chosen.iter().map(|&i| periods[i].clone()).collect());
            }
            return;
        }
        for i in start..periods.len() {
            chosen.push(i);
            pick(i + 1, rank, periods, dim, chosen, subsets);
            chosen.pop();
        }
    }
    pick(0, rank, &periods, l.dim(), &mut chosen, &mut subsets);
    assert!(
        !subsets.is_empty(),
        "a rank-sized independent subset exists"
    );

    let verify_box = opts.verify_box.clone().unwrap_or_else(|| default_box(l));
    let points = box_points(&verify_box, budget)?;

    let mut components: Vec<LinearSet> = Vec::new();
    for w in 0..=opts.widening_max {
        // Candidate bases using multiplicities ≤ w, at least one equal to w
        // (so each widening round visits only new candidates).
        let mut lambda = vec![0u64; periods.len()];
        loop {
            budget.tick(1, "base widening")?;
            let fresh = w == 0 || lambda.contains(&w);
            if fresh {
                let mut cand = l.base().clone();
                for (p, &x) in periods.iter().zip(&lambda) {
                    cand = cand.add(&p.scale(&BigInt::from(x)));
                }
                let mut covered = false;
                for c in &components {
                    if member_linear(&cand, c, budget)? {
                        covered = true;
                        break;
                    }
                }
                if !covered {
                    for q in &subsets {
                        components.push(LinearSet::new(cand.clone(), q.clone())?);
                    }
                }
            }
            // Next multiplicity vector over [0, w]^k.
            let mut i = 0;
            loop {
                if i == lambda.len() {
                    break;
                }
                if lambda[i] < w {
                    lambda[i] += 1;
                    for l2 in lambda.iter_mut().take(i) {
                        *l2 = 0;
                    }
                    break;
                }
                i += 1;
            }
            if i == lambda.len() {
                break;
            }
        }

        let union = SemiLinearSet::new(l.dim(), components.clone())?;
        let mut exact = true;
        for p in &points {
            let in_l = member_linear(p, l, budget)?;
            let in_union = member_semilinear(p, &union, budget)?;
            if in_l != in_union {
                exact = false;
                break;
            }
        }
        if exact {
            return Ok(union);
        }
    }

    Err(SlError::VerificationFailed {
        context: format!(
            "widening up to {} did not reproduce the input on the box {:?}",
            opts.widening_max,
            verify_box
                .iter()
                .map(BigUint::to_string)
                .collect::<Vec<_>>(),
        ),
    })
}

/// Asserts a decomposition's structural invariants: every component has
/// exactly `rank` independent periods drawn from the input and a base that
/// belongs to the input set.
pub fn check_decomposition(
    l: &LinearSet,
    decomposed: &SemiLinearSet,
    budget: &Budget,
) -> Result<(), SlError> {
    let cols: Vec<Vec<BigInt>> = l
        .periods()
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| p.entries().to_vec())
        .collect();
    let rank = linalg::column_rank(&cols, l.dim());
    for c in decomposed.components() {
        if c.periods().len() != rank {
            return Err(SlError::VerificationFailed {
                context: format!(
                    "component has {} periods, expected rank {rank}",
                    c.periods().len()
                ),
            });
        }
        let ccols: Vec<Vec<BigInt>> = c.periods().iter().map(|p| p.entries().to_vec()).collect();
        if !linalg::columns_independent(&ccols, l.dim()) {
            return Err(SlError::VerificationFailed {
                context: "component periods are dependent".to_owned(),
            });
        }
        for p in c.periods() {
            if !l.periods().contains(p) {
                return Err(SlError::VerificationFailed {
                    context: format!("component period {p} is not an input period"),
                });
            }
        }
        if !member_linear(c.base(), l, budget)? {
            return Err(SlError::VerificationFailed {
                context: format!("component base {} is outside the input set", c.base()),
            });
        }
    }
    Ok(())
}
