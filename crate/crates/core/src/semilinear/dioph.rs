//! Minimal-solution representations of `A·x ≥ c` over ℕ.
//!
//! The solution set of a linear Diophantine inequality system is
//! `L(B, P)` where `B` are the minimal solutions and `P` the minimal
//! nonzero solutions of the homogeneous system.  Both live inside the box
//! `(‖A‖₁,∞ + ‖c‖∞ + 2)^{m+n}` per coordinate.
//!
//! Rather than sweep that box — it is astronomically large already for
//! five unknowns with single-digit entries — we compute the Hilbert basis
//! of the slacked, homogenized equality system `A·x − s − c·x₀ = 0` by
//! completion: grow candidates from the unit vectors, following only
//! coordinates whose column makes the defect `E·z` smaller in the inner
//! product sense, and prune anything that dominates a known minimal
//! solution.  If `z` lies strictly below a minimal solution `m`, then
//! `⟨E·z, E·(m−z)⟩ = −‖E·z‖² < 0`, so some coordinate with `(m−z)_i > 0`
//! satisfies the descent condition; by induction every minimal solution is
//! reached by a pointwise-monotone path, which also shows that capping
//! candidates at the guaranteed box never cuts off a witness.

use std::collections::BTreeMap;

use num::bigint::{BigInt, BigUint};
use num::traits::{One, Pow, Signed, Zero};

use crate::budget::{Budget, BudgetExhausted};
use crate::semilinear::{LinearSet, SemiLinearSet, SlError, Vector};

/// A system `A·x ≥ c` of `m` inequalities over `n` natural unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophantineSystem {
    rows: Vec<Vector>,
    rhs: Vector,
}

impl DiophantineSystem {
    pub fn new(rows: Vec<Vector>, rhs: Vector) -> Result<DiophantineSystem, SlError> {
        if rhs.dim() != rows.len() {
            return Err(SlError::DimensionMismatch {
                expected: rows.len(),
                got: rhs.dim(),
            });
        }
        if let Some(first) = rows.first() {
            for r in &rows {
                if r.dim() != first.dim() {
                    return Err(SlError::DimensionMismatch {
                        expected: first.dim(),
                        got: r.dim(),
                    });
                }
            }
        }
        Ok(DiophantineSystem { rows, rhs })
    }

    /// Number of inequalities.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Number of unknowns.
    pub fn n(&self) -> usize {
        self.rows.first().map_or(0, Vector::dim)
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn rhs(&self) -> &Vector {
        &self.rhs
    }

    /// `‖A‖₁,∞`: the maximum row sum of absolute values.
    pub fn norm_1_inf(&self) -> BigUint {
        self.rows
            .iter()
            .map(Vector::norm_1)
            .max()
            .unwrap_or_default()
    }

    /// The per-coordinate bound `(‖A‖₁,∞ + ‖c‖∞ + 2)^{m+n}` within which a
    /// minimal-solution representation is guaranteed to exist.
    pub fn pottier_bound(&self) -> BigUint {
        let exp = u32::try_from(self.m() + self.n()).expect("system size fits u32");
        (self.norm_1_inf() + self.rhs.norm_inf() + BigUint::from(2u32)).pow(exp)
    }

    /// `A·x` for a nonnegative `x`.
    pub fn eval(&self, x: &Vector) -> Vec<BigInt> {
        self.rows
            .iter()
            .map(|row| {
                row.entries()
                    .iter()
                    .zip(x.entries())
                    .map(|(a, v)| a * v)
                    .sum()
            })
            .collect()
    }

    /// Does `x` satisfy `A·x ≥ c`?
    pub fn satisfies(&self, x: &Vector) -> bool {
        self.eval(x)
            .iter()
            .zip(self.rhs.entries())
            .all(|(lhs, c)| lhs >= c)
    }

    /// Does `x` satisfy the homogeneous system `A·x ≥ 0`?
    pub fn satisfies_homogeneous(&self, x: &Vector) -> bool {
        self.eval(x).iter().all(|lhs| !lhs.is_negative())
    }
}

/// The computed representation `⟦A·x ≥ c⟧ = B + cone(P)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophSolution {
    /// Minimal solutions of the system (empty iff the system is infeasible).
    pub bases: Vec<Vector>,
    /// Minimal nonzero solutions of the homogeneous system.
    pub periods: Vec<Vector>,
    /// The guaranteed per-coordinate norm bound for `bases` and `periods`.
    pub bound: BigUint,
}

impl DiophSolution {
    /// The solution set as a semilinear set: one component per base, all
    /// sharing the period list.  Infeasible systems give the empty union.
    pub fn to_semilinear(&self, dim: usize) -> Result<SemiLinearSet, SlError> {
        let mut components = Vec::new();
        for b in &self.bases {
            components.push(LinearSet::new(b.clone(), self.periods.clone())?);
        }
        SemiLinearSet::new(dim, components)
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dominated(z: &[BigUint], minimal: &[Vec<BigUint>]) -> bool {
    minimal
        .iter()
        .any(|m| m.iter().zip(z).all(|(mi, zi)| mi <= zi))
}

/// Computes the minimal-solution representation of `A·x ≥ c`.
///
/// The output satisfies `‖B‖∞, ‖P‖∞ ≤ (‖A‖₁,∞ + ‖c‖∞ + 2)^{m+n}`; a result
/// outside that box, or a base/period failing its defining inequality, is
/// reported as an internal-consistency error rather than returned.
pub fn solve_diophantine(d: &DiophantineSystem, budget: &Budget) -> Result<DiophSolution, SlError> {
    let n = d.n();
    let m = d.m();
    let dim = n + m + 1;
    let bound = d.pottier_bound();
    let slack_cap = d.norm_1_inf() * &bound + d.rhs().norm_inf();

    // Columns of E = [A | -I | -c], each of height m.
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
    for j in 0..n {
        cols.push(d.rows().iter().map(|r| r.get(j).clone()).collect());
    }
    for j in 0..m {
        cols.push(
            (0..m)
                .map(|i| {
                    if i == j {
                        -BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect(),
        );
    }
    cols.push(d.rhs().entries().iter().map(|c| -c).collect());

    let cap_of = |j: usize| -> BigUint {
        if j < n {
            bound.clone()
        } else if j < n + m {
            slack_cap.clone()
        } else {
            BigUint::one()
        }
    };

    let mut minimal: Vec<Vec<BigUint>> = Vec::new();
    let mut frontier: BTreeMap<Vec<BigUint>, Vec<BigInt>> = BTreeMap::new();
    for j in 0..dim {
        if cap_of(j).is_zero() {
            continue;
        }
        let mut unit = vec![BigUint::zero(); dim];
        unit[j] = BigUint::one();
        frontier.insert(unit, cols[j].clone());
    }

    while !frontier.is_empty() {
        let mut next: BTreeMap<Vec<BigUint>, Vec<BigInt>> = BTreeMap::new();
        for (z, defect) in frontier {
            budget
                .tick(1, "Diophantine completion")
                .map_err(|e| budget_with_box(e, &bound, n))?;
            if dominated(&z, &minimal) {
                continue;
            }
            if defect.iter().all(BigInt::is_zero) {
                minimal.push(z);
                continue;
            }
            for (j, col) in cols.iter().enumerate() {
                if dot(&defect, col).is_negative() {
                    if z[j] >= cap_of(j) {
                        continue;
                    }
                    let mut z2 = z.clone();
                    z2[j] += BigUint::one();
                    if dominated(&z2, &minimal) || next.contains_key(&z2) {
                        continue;
                    }
                    let new_defect: Vec<BigInt> =
                        defect.iter().zip(col).map(|(a, b)| a + b).collect();
                    next.insert(z2, new_defect);
                }
            }
        }
        frontier = next;
    }

    let mut bases = Vec::new();
    let mut periods = Vec::new();
    for z in &minimal {
        let x = Vector::new(z[..n].iter().map(|v| BigInt::from(v.clone())).collect());
        if z[n + m].is_one() {
            bases.push(x);
        } else {
            periods.push(x);
        }
    }
    bases.sort();
    periods.sort();
    // Degenerate homogeneous minimal solutions project to the zero vector
    // only when x₀ = 0 forces s = 0 and x = 0, which cannot be nonzero;
    // nevertheless guard against emitting a zero period.
    periods.retain(|p| !p.is_zero());

    for b in &bases {
        if b.norm_inf() > bound {
            return Err(SlError::BoundViolation {
                what: format!("base {b}"),
                bound: bound.to_string(),
            });
        }
        if !d.satisfies(b) {
            return Err(SlError::VerificationFailed {
                context: format!("computed base {b} does not satisfy the system"),
            });
        }
    }
    for p in &periods {
        if p.norm_inf() > bound {
            return Err(SlError::BoundViolation {
                what: format!("period {p}"),
                bound: bound.to_string(),
            });
        }
        if !d.satisfies_homogeneous(p) {
            return Err(SlError::VerificationFailed {
                context: format!("computed period {p} does not satisfy the homogeneous system"),
            });
        }
    }

    Ok(DiophSolution {
        bases,
        periods,
        bound,
    })
}

fn budget_with_box(e: BudgetExhausted, bound: &BigUint, n: usize) -> SlError {
    let points = (bound + BigUint::one()).pow(u32::try_from(n.max(1)).unwrap_or(u32::MAX));
    SlError::Budget(BudgetExhausted {
        context: format!(
            "{}; a full box sweep would need {} points (bound {} per coordinate)",
            e.context, points, bound
        ),
    })
}
