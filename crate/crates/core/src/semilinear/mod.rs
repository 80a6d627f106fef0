//! Semilinear sets over ℕ^m and linear Diophantine inequality systems.
//!
//! A linear set `L(b, P)` is `b + cone(P)` for a base `b ∈ ℕ^m` and finitely
//! many period vectors `P ⊂ ℕ^m`; a semilinear set is a finite union of
//! linear sets.  All arithmetic is arbitrary-precision and exact: membership
//! uses rational elimination on the full-column-rank fast path and a pruned
//! integer search otherwise.  Submodules provide minimal solutions of
//! `A·x ≥ c` ([`dioph`]), decomposition into full-rank components
//! ([`huynh`]), and witness-bounded inclusion ([`inclusion`]).

pub mod dioph;
pub mod huynh;
pub mod inclusion;
pub mod json;

use std::fmt;

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};

use crate::budget::{Budget, BudgetExhausted};
use crate::linalg;
use crate::word::ceil_log2;

pub use dioph::{solve_diophantine, DiophSolution, DiophantineSystem};
pub use huynh::{huynh_decompose, HuynhOptions};
pub use inclusion::{semilinear_inclusion, SlInclusion};

/// Errors of the semilinear layer.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SlError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{what} must be nonnegative, found entry {entry}")]
    NegativeEntry { what: &'static str, entry: String },
    #[error("internal consistency violation: {what} exceeds the guaranteed bound {bound}")]
    BoundViolation { what: String, bound: String },
    #[error("verification failed: {context}")]
    VerificationFailed { context: String },
    #[error("malformed input: {msg}")]
    Json { msg: String },
    #[error(transparent)]
    Budget(#[from] BudgetExhausted),
}

/// An integer vector of fixed dimension.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Vector {
    entries: Vec<BigInt>,
}

impl Vector {
    pub fn new(entries: Vec<BigInt>) -> Vector {
        Vector { entries }
    }

    pub fn zeros(dim: usize) -> Vector {
        Vector {
            entries: vec![BigInt::zero(); dim],
        }
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64s(entries: &[i64]) -> Vector {
        Vector {
            entries: entries.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &BigInt {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn is_nonneg(&self) -> bool {
        self.entries.iter().all(|x| !x.is_negative())
    }

    /// `‖v‖_∞ = max |v_i|` (zero for the empty vector).
    pub fn norm_inf(&self) -> BigUint {
        self.entries
            .iter()
            .map(|x| x.magnitude().clone())
            .max()
            .unwrap_or_default()
    }

    /// `|v|_1 = Σ |v_i|`.
    pub fn norm_1(&self) -> BigUint {
        self.entries.iter().map(|x| x.magnitude().clone()).sum()
    }

    /// Binary representation size `#v = Σ ceil(log2 |v_i|)`; entries 0 and
    /// ±1 contribute nothing.
    pub fn rep_size(&self) -> u64 {
        self.entries.iter().map(|x| ceil_log2(x.magnitude())).sum()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Vector {
        Vector {
            entries: self.entries.iter().map(|a| a * k).collect(),
        }
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &Vector) -> bool {
        self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// `L(b, P) = b + cone(P)` with `b` and all periods in ℕ^m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSet {
    base: Vector,
    periods: Vec<Vector>,
}

impl LinearSet {
    /// Validates nonnegativity and consistent dimensions.
    pub fn new(base: Vector, periods: Vec<Vector>) -> Result<LinearSet, SlError> {
        if !base.is_nonneg() {
            return Err(SlError::NegativeEntry {
                what: "linear-set base",
                entry: base.to_string(),
            });
        }
        for p in &periods {
            if p.dim() != base.dim() {
                return Err(SlError::DimensionMismatch {
                    expected: base.dim(),
                    got: p.dim(),
                });
            }
            if !p.is_nonneg() {
                return Err(SlError::NegativeEntry {
                    what: "linear-set period",
                    entry: p.to_string(),
                });
            }
        }
        Ok(LinearSet { base, periods })
    }

    pub fn base(&self) -> &Vector {
        &self.base
    }

    pub fn periods(&self) -> &[Vector] {
        &self.periods
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `#L = #b + Σ_p #p` (singleton base set).
    pub fn rep_size(&self) -> u64 {
        self.base.rep_size() + self.periods.iter().map(Vector::rep_size).sum::<u64>()
    }
}

/// A finite union of linear sets of common dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiLinearSet {
    dim: usize,
    components: Vec<LinearSet>,
}

impl SemiLinearSet {
    pub fn new(dim: usize, components: Vec<LinearSet>) -> Result<SemiLinearSet, SlError> {
        for c in &components {
            if c.dim() != dim {
                return Err(SlError::DimensionMismatch {
                    expected: dim,
                    got: c.dim(),
                });
            }
        }
        Ok(SemiLinearSet { dim, components })
    }

    /// The empty subset of ℕ^dim.
    pub fn empty(dim: usize) -> SemiLinearSet {
        SemiLinearSet {
            dim,
            components: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[LinearSet] {
        &self.components
    }

    /// `#M = Σ_i (#B_i + |B_i| · #P_i)`.
    pub fn rep_size(&self) -> u64 {
        self.components.iter().map(LinearSet::rep_size).sum()
    }
}

/// Is `v ∈ L(b, P)`?  Uses exact rational elimination when the periods are
/// linearly independent, otherwise a pruned bounded search (every period is
/// nonzero in some coordinate, so multiplicities are bounded by the target).
pub fn member_linear(v: &Vector, l: &LinearSet, budget: &Budget) -> Result<bool, SlError> {
    if v.dim() != l.dim() {
        return Err(SlError::DimensionMismatch {
            expected: l.dim(),
            got: v.dim(),
        });
    }
    let diff = v.sub(l.base());
    if !diff.is_nonneg() {
        return Ok(false);
    }
    // Zero periods generate nothing; drop them up front.
    let periods: Vec<&Vector> = l.periods().iter().filter(|p| !p.is_zero()).collect();
    if periods.is_empty() {
        return Ok(diff.is_zero());
    }
    let cols: Vec<Vec<BigInt>> = periods.iter().map(|p| p.entries().to_vec()).collect();
    if linalg::columns_independent(&cols, l.dim()) {
        let Some(lambda) = linalg::solve_independent(&cols, diff.entries(), l.dim()) else {
            return Ok(false);
        };
        return Ok(lambda.iter().all(is_natural));
    }
    // General path: depth-first over period multiplicities.  For each suffix
    // of the period list, precompute which coordinates it can still move.
    let dim = l.dim();
    let mut suffix_support: Vec<Vec<bool>> = vec![vec![false; dim]; periods.len() + 1];
    for i in (0..periods.len()).rev() {
        let mut row = suffix_support[i + 1].clone();
        for (j, e) in periods[i].entries().iter().enumerate() {
            if !e.is_zero() {
                row[j] = true;
            }
        }
        suffix_support[i] = row;
    }
    fn search(
        residual: &Vector,
        idx: usize,
        periods: &[&Vector],
        suffix_support: &[Vec<bool>],
        budget: &Budget,
    ) -> Result<bool, SlError> {
        budget.tick(1, "linear-set membership search")?;
        if residual.is_zero() {
            return Ok(true);
        }
        if idx == periods.len() {
            return Ok(false);
        }
        // Dead end: some positive residual coordinate unreachable by the
        // remaining periods.
        for (j, r) in residual.entries().iter().enumerate() {
            if r.is_positive() && !suffix_support[idx][j] {
                return Ok(false);
            }
        }
        let p = periods[idx];
        // Max multiplicity of p within residual.
        let mut max: Option<BigInt> = None;
        for (r, e) in residual.entries().iter().zip(p.entries()) {
            if e.is_positive() {
                let q = r / e;
                max = Some(match max {
                    None => q,
                    Some(m) => m.min(q),
                });
            }
        }
        let max = max.expect("nonzero nonnegative period has a positive entry");
        let mut lambda = BigInt::zero();
        while lambda <= max {
            let rest = residual.sub(&p.scale(&lambda));
            if search(&rest, idx + 1, periods, suffix_support, budget)? {
                return Ok(true);
            }
            lambda += 1;
        }
        Ok(false)
    }
    search(&diff, 0, &periods, &suffix_support, budget)
}

/// Is `v` in the union?
pub fn member_semilinear(v: &Vector, m: &SemiLinearSet, budget: &Budget) -> Result<bool, SlError> {
    if v.dim() != m.dim() {
        return Err(SlError::DimensionMismatch {
            expected: m.dim(),
            got: v.dim(),
        });
    }
    for l in m.components() {
        if member_linear(v, l, budget)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn is_natural(x: &BigRational) -> bool {
    x.is_integer() && !x.is_negative()
}

/// Enumerates every point of ℕ^dim inside the pointwise box `bound`
/// (inclusive), ticking `budget` per point.
pub fn box_points(bound: &[BigUint], budget: &Budget) -> Result<Vec<Vector>, SlError> {
    let mut out = vec![Vector::zeros(0)];
    for b in bound {
        let Some(b64) = b.to_u64() else {
            return Err(SlError::VerificationFailed {
                context: format!("verification box coordinate {b} is too large to enumerate"),
            });
        };
        let mut next = Vec::new();
        for prefix in &out {
            for v in 0..=b64 {
                budget.tick(1, "box enumeration")?;
                let mut entries = prefix.entries().to_vec();
                entries.push(BigInt::from(v));
                next.push(Vector::new(entries));
            }
        }
        out = next;
    }
    Ok(out)
}
