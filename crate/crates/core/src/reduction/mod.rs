//! Compiler from Π₂ sentences `∀x⃗.∃y⃗.ψ(x⃗,y⃗)` over linear
//! inequalities to commutative-grammar inclusion and equivalence
//! instances.
//!
//! For a sentence with `k` atoms the compiler emits six grammars over
//! the alphabet `Σ = {t₁⁺, t₁⁻, …, t_k⁺, t_k⁻}`:
//!
//! * `G`, `H` — context-free, with `L(G) ⊆ L(H)` iff the sentence is
//!   valid (at the certified constant `c`);
//! * `G^e`, `H^e` — the same question phrased as language equivalence;
//! * `G^r`, `H^r` — regular grammars over `Σ ∪ Γ_j`, `j = log₂ c`,
//!   where the unary `ĉ`-padding is realized by a doubling gadget.
//!
//! The constant `c` is the smallest power of two at least
//! `|φ|^(3|φ|+2)·2^(|φ|)`.  Because the certified `c` makes bounded
//! enumeration infeasible, `c` can be overridden for testing; the
//! artifact records that it is then not certified (`valid ⇒ inclusion`
//! is only guaranteed at the true constant, while
//! `inclusion ⇒ valid` is structural and holds for every `c ≥ 1`).

mod build;
mod formula;

use std::collections::BTreeMap;

use num::BigUint;

use crate::budget::BudgetExhausted;
use crate::grammar::{Grammar, GrammarError};
use crate::symbol::Sym;

pub use build::{
    build_c_gadgets, build_equiv_pair, build_g, build_h, build_regular_pair, regularize_f,
    sigma_alphabet, CGadgets, RegularFragment,
};
pub use formula::{
    compute_c, eval_matrix, parse_formula, subst_bool, validity_bounded, Atom, BoundedValidity,
    Matrix, Pi2Sentence,
};

/// Errors raised while parsing sentences or building the reduction.
#[derive(Debug, thiserror::Error)]
pub enum ReductionError {
    #[error("parse error: {msg}")]
    Parse { msg: String },
    #[error("negation is not part of the positive fragment")]
    Negation,
    #[error("not a Π₂ sentence: {msg}")]
    NotPi2 { msg: String },
    #[error("free variable: {name}")]
    FreeVariable { name: String },
    #[error("duplicate variable: {name}")]
    DuplicateVariable { name: String },
    #[error("symbol namespace collision: {name}")]
    NamespaceCollision { name: String },
    #[error("constant must be a power of two at least 2, got {value}")]
    NotPowerOfTwo { value: String },
    #[error("doubling gadget index must be at least 1")]
    IndexZero,
    #[error("construction failed: {detail}")]
    Construction { detail: String },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Budget(#[from] BudgetExhausted),
}

/// Options for [`compile`].
#[derive(Debug, Clone, Default)]
pub struct CompileOptions {
    /// Replaces the certified constant by a small test-grade value.
    pub c_override: Option<BigUint>,
}

/// Everything [`compile`] produces for one sentence.
#[derive(Debug, Clone)]
pub struct ReductionArtifacts {
    /// `Σ = {t₁⁺, t₁⁻, …, t_k⁺, t_k⁻}` in declaration order.
    pub sigma: Vec<Sym>,
    /// `Γ_j = {p₀, p̄₁, p₁, …, p̄_j, p_j}` in declaration order.
    pub gamma: Vec<Sym>,
    /// The padding constant in effect.
    pub c: BigUint,
    /// `log₂ c`.
    pub log2_c: u64,
    /// True iff `c` is the certified constant (no override).
    pub certified: bool,
    /// The sentence size `|φ|` used to derive the certified constant.
    pub size: BigUint,
    pub g: Grammar,
    pub h: Grammar,
    pub g_equiv: Grammar,
    pub h_equiv: Grammar,
    pub g_regular: Grammar,
    pub h_regular: Grammar,
    /// Start symbols of the embedded gadgets, keyed by gadget name:
    /// `Y`, `F`, `I`, `F_regular` (the serialized automaton's entry),
    /// `C_l`, `C_r`, and `H_regular` (the fresh `H^r` axiom).
    pub gadget_axioms: BTreeMap<String, Sym>,
}

fn check_namespaces(artifacts: &ReductionArtifacts) -> Result<(), ReductionError> {
    let grammars = [
        &artifacts.g,
        &artifacts.h,
        &artifacts.g_equiv,
        &artifacts.h_equiv,
        &artifacts.g_regular,
        &artifacts.h_regular,
    ];
    for grammar in grammars {
        for &nt in grammar.nonterminals() {
            let name = nt.name();
            let prefixed = ["g.", "h.", "c.", "pad."]
                .iter()
                .any(|p| name.starts_with(p));
            if !prefixed && name != "S" {
                return Err(ReductionError::NamespaceCollision {
                    name: name.to_owned(),
                });
            }
        }
        for &t in grammar.terminals() {
            if grammar.nonterminal_set().contains(&t) {
                return Err(ReductionError::NamespaceCollision {
                    name: t.name().to_owned(),
                });
            }
        }
    }
    for s in &artifacts.sigma {
        if artifacts.gamma.contains(s) {
            return Err(ReductionError::NamespaceCollision {
                name: s.name().to_owned(),
            });
        }
    }
    Ok(())
}

/// Compiles a sentence into the six-grammar instance.
pub fn compile(
    phi: &Pi2Sentence,
    options: &CompileOptions,
) -> Result<ReductionArtifacts, ReductionError> {
    let size = phi.size();
    let (c, certified) = match &options.c_override {
        Some(c) => (c.clone(), false),
        None => (compute_c(&size), true),
    };
    if c < BigUint::from(2u32) || c.count_ones() != 1 {
        return Err(ReductionError::NotPowerOfTwo {
            value: c.to_string(),
        });
    }
    let log2_c = c.trailing_zeros().expect("power of two has a set bit");

    let sigma = sigma_alphabet(phi.k());
    let g = build_g(phi, &c)?;
    let h = build_h(phi)?;
    let (g_equiv, h_equiv) = build_equiv_pair(phi, &c)?;
    let (g_regular, h_regular) = build_regular_pair(phi, &c)?;
    let fragment = regularize_f(phi)?;
    let gamma: Vec<Sym> = g_regular.terminals()[sigma.len()..].to_vec();

    let gadget_axioms = BTreeMap::from([
        ("Y".to_owned(), Sym::new("h.Y")),
        ("F".to_owned(), Sym::new("h.F@r")),
        ("I".to_owned(), Sym::new("h.I")),
        ("F_regular".to_owned(), fragment.entry()),
        ("C_l".to_owned(), Sym::new("c.l.S")),
        ("C_r".to_owned(), Sym::new("c.r.S")),
        ("H_regular".to_owned(), h_regular.axiom()),
    ]);

    let artifacts = ReductionArtifacts {
        sigma,
        gamma,
        c,
        log2_c,
        certified,
        size,
        g,
        h,
        g_equiv,
        h_equiv,
        g_regular,
        h_regular,
        gadget_axioms,
    };
    check_namespaces(&artifacts)?;
    Ok(artifacts)
}

#[cfg(test)]
pub(crate) mod test_support {
    /// `∀x.∃y. (x ≥ 2y ∧ −x ≥ −2y) ∨ (x+1 ≥ 2y ∧ −x−1 ≥ −2y)`:
    /// "every x is even or odd", with atoms t₁..t₄ in leaf order.
    pub(crate) const RUNNING_EXAMPLE: &str = "(forall (x) (exists (y) \
         (or (and (>= x (* 2 y)) (>= (* -1 x) (* -2 y))) \
             (and (>= (+ x 1) (* 2 y)) (>= (+ (* -1 x) -1) (* -2 y))))))";
}

#[cfg(test)]
mod tests {
    use super::test_support::RUNNING_EXAMPLE;
    use super::*;
    use crate::grammar::GrammarClass;
    use num::traits::One;

    #[test]
    fn compile_with_override_produces_consistent_artifacts() {
        let phi = parse_formula(RUNNING_EXAMPLE).unwrap();
        let artifacts = compile(
            &phi,
            &CompileOptions {
                c_override: Some(BigUint::from(4u32)),
            },
        )
        .unwrap();
        assert!(!artifacts.certified);
        assert_eq!(artifacts.c, BigUint::from(4u32));
        assert_eq!(artifacts.log2_c, 2);
        assert_eq!(artifacts.sigma.len(), 8);
        assert_eq!(artifacts.gamma.len(), 5);

        // All six grammars share Σ; the regular pair appends Γ.
        for grammar in [
            &artifacts.g,
            &artifacts.h,
            &artifacts.g_equiv,
            &artifacts.h_equiv,
        ] {
            assert_eq!(grammar.terminals(), &artifacts.sigma[..]);
        }
        let full: Vec<Sym> = artifacts
            .sigma
            .iter()
            .chain(artifacts.gamma.iter())
            .copied()
            .collect();
        assert_eq!(artifacts.g_regular.terminals(), &full[..]);
        assert_eq!(artifacts.h_regular.terminals(), &full[..]);

        assert_eq!(
            artifacts.g_regular.classify().primary(),
            GrammarClass::Regular
        );
        assert_eq!(
            artifacts.h_regular.classify().primary(),
            GrammarClass::Regular
        );
        assert!(artifacts.g.classify().contains(GrammarClass::ContextFree));
        assert!(artifacts.h.classify().contains(GrammarClass::ContextFree));

        assert_eq!(artifacts.gadget_axioms["Y"].name(), "h.Y");
        assert_eq!(artifacts.gadget_axioms["F"].name(), "h.F@r");
        assert_eq!(artifacts.gadget_axioms["I"].name(), "h.I");
        assert_eq!(artifacts.gadget_axioms["C_l"].name(), "c.l.S");
        assert_eq!(artifacts.gadget_axioms["C_r"].name(), "c.r.S");
        assert_eq!(artifacts.gadget_axioms["H_regular"].name(), "pad.S");
    }

    #[test]
    fn compile_rejects_non_power_overrides() {
        let phi = parse_formula(RUNNING_EXAMPLE).unwrap();
        for bad in [0u32, 1, 3, 6] {
            assert!(matches!(
                compile(
                    &phi,
                    &CompileOptions {
                        c_override: Some(BigUint::from(bad)),
                    }
                ),
                Err(ReductionError::NotPowerOfTwo { .. })
            ));
        }
    }

    #[test]
    fn compile_at_the_certified_constant() {
        let phi = parse_formula(RUNNING_EXAMPLE).unwrap();
        let artifacts = compile(&phi, &CompileOptions::default()).unwrap();
        assert!(artifacts.certified);
        assert_eq!(artifacts.size, BigUint::from(29u32));
        // c = min 2^t ≥ 29^89·2^29, recomputed independently.
        let target = BigUint::from(29u32).pow(89) * (BigUint::one() << 29u32);
        assert!(artifacts.c >= target);
        assert!(artifacts.c.clone() >> 1u32 < target);
        assert_eq!(artifacts.log2_c, 462);
        assert_eq!(artifacts.sigma.len(), 8);
        assert_eq!(artifacts.gamma.len(), 2 * 462 + 1);
        // ĉ really carries c at every Σ-coordinate of G's first production.
        let rhs = &artifacts.g.productions()[0].rhs;
        for &t in &artifacts.sigma {
            assert!(rhs.count(t) >= artifacts.c);
        }
    }
}
