//! Parikh images of regular commutative grammars as semilinear sets.
//!
//! A regular grammar is a finite automaton in disguise: each nonterminal is
//! a state, each production an edge from its left-hand nonterminal to the
//! right-hand one (or to a virtual accepting state when the right-hand side
//! is purely terminal), labelled with the terminal part it emits.  A word
//! is in the language iff it is the total emission of a run from the axiom
//! to the accepting state.
//!
//! Run multisets are characterised by flows.  For a fixed edge support `S`,
//! the usage vectors of runs covering `S` are exactly the integral flows
//! `f ≥ 1` on `S` with unit excess at the axiom and the accepting state
//! (the Euler-path argument gives realizability whenever the support is
//! connected, which coverage of a realizable `S` guarantees).  Every such
//! flow decomposes as `m + c₁ + … + cₖ` where `m` is a pointwise-minimal
//! covering flow and each `cᵢ` a simple cycle inside `S`: the difference
//! `f − m` of two flows with equal boundary is a circulation, and
//! circulations split into simple cycles.  Hence the Parikh image of the
//! runs covering `S` is the union, over all minimal covering flows `m`, of
//! the linear sets with base `emission(m)` and the simple-cycle emissions
//! of `S` as periods — and the full Parikh image is the union over all
//! supports.
//!
//! Minimal covering flows need not be unique, so the search keeps the whole
//! Pareto antichain: a worklist dynamic program over (state, coverage)
//! pairs whose values are antichains of usage vectors.  Dickson's lemma
//! bounds the antichains, so the program terminates.
//!
//! Every constructed image is certified before it is returned: membership
//! over a finite box is compared point by point against a direct bounded
//! enumeration of the language.  A mismatch is reported as an error, never
//! as a warning.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num::bigint::{BigInt, BigUint};
use num::traits::{One, Zero};

use crate::budget::Budget;
use crate::engine::EngineError;
use crate::grammar::{Grammar, GrammarClass};
use crate::semilinear::{box_points, member_semilinear, LinearSet, SemiLinearSet, Vector};
use crate::symbol::Sym;
use crate::word::CommutativeWord;

/// Reads a word as a nonnegative vector over `order`; `None` if the word
/// uses a symbol outside `order`.
pub fn word_to_vector(w: &CommutativeWord, order: &[Sym]) -> Option<Vector> {
    let index: HashMap<Sym, usize> = order.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut entries = vec![BigInt::zero(); order.len()];
    for (s, c) in w.iter() {
        let i = *index.get(&s)?;
        entries[i] = BigInt::from(c.clone());
    }
    Some(Vector::new(entries))
}

/// Reads a nonnegative vector back as a word over `order`; `None` on a
/// dimension mismatch or a negative entry.
pub fn vector_to_word(v: &Vector, order: &[Sym]) -> Option<CommutativeWord> {
    if v.dim() != order.len() || !v.is_nonneg() {
        return None;
    }
    let mut w = CommutativeWord::empty();
    for (s, e) in order.iter().zip(v.entries()) {
        w.add_count(*s, e.to_biguint().expect("checked nonnegative"));
    }
    Some(w)
}

struct Edge {
    from: usize,
    to: usize,
    effect: Vector,
}

/// The Parikh image of `L(g)` as vectors over `g`'s terminals in
/// declaration order.
pub fn parikh_regular(g: &Grammar, meter: &Budget) -> Result<SemiLinearSet, EngineError> {
    parikh_regular_over(g, g.terminals(), meter)
}

/// As [`parikh_regular`], but over an explicit coordinate order, which must
/// cover the grammar's terminals and contain no nonterminal of the grammar.
/// Extra symbols become all-zero coordinates, so images of grammars over a
/// shared alphabet can be compared directly.
pub fn parikh_regular_over(
    g: &Grammar,
    order: &[Sym],
    meter: &Budget,
) -> Result<SemiLinearSet, EngineError> {
    if !g.classify().contains(GrammarClass::Regular) {
        return Err(EngineError::NotRegular {
            detail: "every production must rewrite a single nonterminal and produce at most \
                     one nonterminal occurrence"
                .to_owned(),
        });
    }
    let order_set: BTreeSet<Sym> = order.iter().copied().collect();
    if order_set.len() != order.len() {
        return Err(EngineError::Verification {
            context: "coordinate order contains a repeated symbol".to_owned(),
        });
    }
    for t in g.terminals() {
        if !order_set.contains(t) {
            return Err(EngineError::Verification {
                context: format!("coordinate order is missing terminal `{t}`"),
            });
        }
    }
    for n in g.nonterminals() {
        if order_set.contains(n) {
            return Err(EngineError::Verification {
                context: format!("coordinate order contains nonterminal `{n}`"),
            });
        }
    }

    let nt_index: HashMap<Sym, usize> = g
        .nonterminals()
        .iter()
        .enumerate()
        .map(|(i, s)| (*s, i))
        .collect();
    let accept = g.nonterminals().len();
    let axiom = nt_index[&g.axiom()];

    let mut edges = Vec::new();
    for p in g.productions() {
        let (from_sym, count) = p.lhs.iter().next().expect("regular lhs is nonempty");
        debug_assert!(count.is_one());
        let nt_part = g.nonterminal_part(&p.rhs);
        let to = match nt_part.iter().next() {
            None => accept,
            Some((s, _)) => nt_index[&s],
        };
        let effect = word_to_vector(&g.terminal_part(&p.rhs), order)
            .expect("terminals are covered by the order");
        edges.push(Edge {
            from: nt_index[&from_sym],
            to,
            effect,
        });
    }
    if edges.len() > 62 {
        return Err(EngineError::Verification {
            context: format!(
                "support enumeration over {} productions is out of reach",
                edges.len()
            ),
        });
    }

    let mut components: Vec<LinearSet> = Vec::new();
    for mask in 1u64..(1u64 << edges.len()) {
        meter.tick(1, "Parikh support enumeration")?;
        let support: Vec<usize> = (0..edges.len()).filter(|e| mask & (1 << e) != 0).collect();
        if !support_is_plausible(&edges, &support, axiom, accept) {
            continue;
        }
        let flows = minimal_covering_flows(&edges, &support, axiom, accept, meter)?;
        if flows.is_empty() {
            continue;
        }
        let mut periods = simple_cycle_effects(&edges, &support, accept);
        periods.retain(|p| !p.is_zero());
        periods.sort();
        periods.dedup();
        for usage in flows {
            let mut base = Vector::zeros(order.len());
            for (slot, &e) in support.iter().enumerate() {
                base = base.add(&edges[e].effect.scale(&BigInt::from(usage[slot])));
            }
            components
                .push(LinearSet::new(base, periods.clone()).expect("emissions are nonnegative"));
        }
    }
    components.sort_by_key(|l| (l.base().clone(), l.periods().to_vec()));
    components.dedup_by(|a, b| a == b);
    let image = SemiLinearSet::new(order.len(), components)?;
    verify_parikh(g, order, &image, meter)?;
    Ok(image)
}

/// Cheap necessary conditions for a support to carry a covering run:
/// exactly one edge into the accepting state, every edge's source reachable
/// from the axiom inside the support, and the accepting state reachable
/// from every edge's target.
fn support_is_plausible(edges: &[Edge], support: &[usize], axiom: usize, accept: usize) -> bool {
    if support.iter().filter(|&&e| edges[e].to == accept).count() != 1 {
        return false;
    }
    let n_states = accept + 1;
    let mut fwd = vec![false; n_states];
    fwd[axiom] = true;
    loop {
        let mut changed = false;
        for &e in support {
            if fwd[edges[e].from] && !fwd[edges[e].to] {
                fwd[edges[e].to] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut bwd = vec![false; n_states];
    bwd[accept] = true;
    loop {
        let mut changed = false;
        for &e in support {
            if bwd[edges[e].to] && !bwd[edges[e].from] {
                bwd[edges[e].from] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    support
        .iter()
        .all(|&e| fwd[edges[e].from] && bwd[edges[e].to])
}

/// All Pareto-minimal usage vectors (indexed by position in `support`) of
/// runs from `axiom` to `accept` that use every support edge at least once.
fn minimal_covering_flows(
    edges: &[Edge],
    support: &[usize],
    axiom: usize,
    accept: usize,
    meter: &Budget,
) -> Result<Vec<Vec<u64>>, EngineError> {
    let k = support.len();
    let full: u64 = if k == 64 { u64::MAX } else { (1 << k) - 1 };
    let mut values: HashMap<(usize, u64), Vec<Vec<u64>>> = HashMap::new();
    let mut worklist: BTreeSet<(usize, u64, Vec<u64>)> = BTreeSet::new();

    let zero = vec![0u64; k];
    values.insert((axiom, 0), vec![zero.clone()]);
    worklist.insert((axiom, 0, zero));

    while let Some((state, cover, usage)) = worklist.pop_first() {
        meter.tick(1, "minimal covering flows")?;
        // Lazily skip entries whose value was dominated after queueing.
        if !values
            .get(&(state, cover))
            .is_some_and(|anti| anti.contains(&usage))
        {
            continue;
        }
        if state == accept {
            continue; // no outgoing edges
        }
        for (slot, &e) in support.iter().enumerate() {
            if edges[e].from != state {
                continue;
            }
            let mut next = usage.clone();
            next[slot] += 1;
            let node = (edges[e].to, cover | (1 << slot));
            let anti = values.entry(node).or_default();
            if anti.iter().any(|a| pointwise_le(a, &next)) {
                continue;
            }
            anti.retain(|a| {
                if pointwise_le(&next, a) {
                    worklist.remove(&(node.0, node.1, a.clone()));
                    false
                } else {
                    true
                }
            });
            anti.push(next.clone());
            worklist.insert((node.0, node.1, next));
        }
    }

    let mut flows = values.remove(&(accept, full)).unwrap_or_default();
    flows.sort();
    Ok(flows)
}

fn pointwise_le(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Emission vectors of all simple cycles whose edges lie in the support.
/// Cycles are rooted at their smallest state so each is produced once.
fn simple_cycle_effects(edges: &[Edge], support: &[usize], accept: usize) -> Vec<Vector> {
    let mut out = Vec::new();
    let states: BTreeSet<usize> = support
        .iter()
        .flat_map(|&e| [edges[e].from, edges[e].to])
        .filter(|&s| s != accept)
        .collect();
    for &root in &states {
        let mut on_path = vec![false; accept + 1];
        dfs_cycles(
            edges,
            support,
            root,
            root,
            &mut on_path,
            &mut Vector::zeros(edges.first().map_or(0, |e| e.effect.dim())),
            &mut out,
        );
    }
    out
}

fn dfs_cycles(
    edges: &[Edge],
    support: &[usize],
    root: usize,
    at: usize,
    on_path: &mut Vec<bool>,
    effect: &mut Vector,
    out: &mut Vec<Vector>,
) {
    on_path[at] = true;
    for &e in support {
        if edges[e].from != at {
            continue;
        }
        let to = edges[e].to;
        if to == root {
            out.push(effect.add(&edges[e].effect));
        } else if to > root && !on_path[to] {
            let saved = effect.clone();
            *effect = effect.add(&edges[e].effect);
            dfs_cycles(edges, support, root, to, on_path, effect, out);
            *effect = saved;
        }
    }
    on_path[at] = false;
}

/// Certifies the image against a direct enumeration on a finite box.
fn verify_parikh(
    g: &Grammar,
    order: &[Sym],
    image: &SemiLinearSet,
    meter: &Budget,
) -> Result<(), EngineError> {
    let bound = verification_box(image);
    let words = words_within_box(g, order, &bound, meter)?;
    for v in box_points(&bound, meter)? {
        let claimed = member_semilinear(&v, image, meter)?;
        let actual = words.contains(&v);
        if claimed != actual {
            return Err(EngineError::Verification {
                context: format!(
                    "Parikh image disagrees with enumeration at {v}: image says {claimed}, \
                     grammar says {actual}"
                ),
            });
        }
    }
    Ok(())
}

/// Per coordinate: the largest base entry plus twice the largest period
/// entry plus two — far enough to see each base and two steps of every
/// period, so drifts in either direction show up.
fn verification_box(image: &SemiLinearSet) -> Vec<BigUint> {
    let mut bound = vec![BigUint::from(2u32); image.dim()];
    for l in image.components() {
        for (i, slot) in bound.iter_mut().enumerate() {
            let mut want = l.base().get(i).to_biguint().expect("bases are nonnegative");
            let max_period = l
                .periods()
                .iter()
                .map(|p| p.get(i).to_biguint().expect("periods are nonnegative"))
                .max()
                .unwrap_or_default();
            want += BigUint::from(2u32) * max_period + BigUint::from(2u32);
            if want > *slot {
                *slot = want;
            }
        }
    }
    bound
}

/// All language words whose vector lies inside the box, by breadth-first
/// search pruning forms whose terminal part already exceeds the box —
/// sound because terminal counts only grow along derivations.
fn words_within_box(
    g: &Grammar,
    order: &[Sym],
    bound: &[BigUint],
    meter: &Budget,
) -> Result<BTreeSet<Vector>, EngineError> {
    let limit: BTreeMap<Sym, BigUint> = order.iter().copied().zip(bound.iter().cloned()).collect();
    let within = |w: &CommutativeWord| -> bool {
        w.iter().all(|(s, c)| limit.get(&s).is_some_and(|b| c <= b))
    };
    let mut seen: BTreeSet<CommutativeWord> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let start = g.start_form();
    seen.insert(start.clone());
    queue.push_back(start);
    const MAX_FORMS: usize = 4_000_000;
    while let Some(form) = queue.pop_front() {
        meter.tick(1, "Parikh verification sweep")?;
        for p in g.productions() {
            let Some(rest) = form.checked_sub(&p.lhs) else {
                continue;
            };
            let succ = rest.add(&p.rhs);
            if seen.contains(&succ) || !within(&g.terminal_part(&succ)) {
                continue;
            }
            if seen.len() >= MAX_FORMS {
                return Err(EngineError::Verification {
                    context: "verification sweep exceeded its form limit".to_owned(),
                });
            }
            seen.insert(succ.clone());
            queue.push_back(succ);
        }
    }
    Ok(seen
        .iter()
        .filter(|w| g.is_terminal_word(w))
        .map(|w| word_to_vector(w, order).expect("terminal words are covered by the order"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_grammar;

    fn g(text: &str) -> Grammar {
        parse_grammar(text).expect("test grammar parses")
    }

    fn member(image: &SemiLinearSet, entries: &[i64]) -> bool {
        member_semilinear(&Vector::from_i64s(entries), image, &Budget::unlimited()).unwrap()
    }

    #[test]
    fn star_language_is_all_naturals() {
        let g = g("terminals a\nnonterminals S\naxiom S\nS -> S a | eps\n");
        let image = parikh_regular(&g, &Budget::unlimited()).unwrap();
        for n in 0..8 {
            assert!(member(&image, &[n]), "a^{n} should be in the image");
        }
    }

    #[test]
    fn parity_language_is_even_naturals() {
        let g = g("terminals a\nnonterminals S\naxiom S\nS -> S a a | eps\n");
        let image = parikh_regular(&g, &Budget::unlimited()).unwrap();
        for n in 0..10 {
            assert_eq!(member(&image, &[n]), n % 2 == 0, "at a^{n}");
        }
    }

    #[test]
    fn two_letter_chain() {
        // L = a bⁿ for n ≥ 0.
        let g = g("terminals a b\nnonterminals S T\naxiom S\nS -> a T\nT -> b T | eps\n");
        let image = parikh_regular(&g, &Budget::unlimited()).unwrap();
        for n in 0..6 {
            assert!(member(&image, &[1, n]));
            assert!(!member(&image, &[0, n]));
            assert!(!member(&image, &[2, n]));
        }
    }

    #[test]
    fn finite_union_of_points() {
        // L = {a², b}.
        let g = g("terminals a b\nnonterminals S T\naxiom S\nS -> a a T | b T\nT -> eps\n");
        let image = parikh_regular(&g, &Budget::unlimited()).unwrap();
        assert!(member(&image, &[2, 0]));
        assert!(member(&image, &[0, 1]));
        assert!(!member(&image, &[1, 0]));
        assert!(!member(&image, &[0, 0]));
        assert!(!member(&image, &[2, 1]));
    }

    #[test]
    fn empty_language_yields_empty_image() {
        // No terminating production: L = ∅.
        let g = g("terminals a\nnonterminals S\naxiom S\nS -> a S\n");
        let image = parikh_regular(&g, &Budget::unlimited()).unwrap();
        assert!(image.components().is_empty());
        assert!(!member(&image, &[0]));
        assert!(!member(&image, &[3]));
    }

    #[test]
    fn shared_alphabet_order_adds_zero_columns() {
        let g1 = g("terminals a\nnonterminals S\naxiom S\nS -> S a | eps\n");
        let order = [Sym::new("a"), Sym::new("b")];
        let image = parikh_regular_over(&g1, &order, &Budget::unlimited()).unwrap();
        assert!(member(&image, &[3, 0]));
        assert!(!member(&image, &[3, 1]));
    }

    #[test]
    fn rejects_non_regular_grammars() {
        let g = g("terminals a\nnonterminals S\naxiom S\nS -> S S | a\n");
        assert!(matches!(
            parikh_regular(&g, &Budget::unlimited()),
            Err(EngineError::NotRegular { .. })
        ));
    }

    #[test]
    fn cycle_through_two_states() {
        // L = (ab)ⁿ with the loop split across two nonterminals.
        let g = g("terminals a b\nnonterminals S T\naxiom S\nS -> a T | eps\nT -> b S\n");
        let image = parikh_regular(&g, &Budget::unlimited()).unwrap();
        for n in 0..5 {
            assert!(member(&image, &[n, n]));
            assert!(!member(&image, &[n + 1, n]));
            assert!(!member(&image, &[n, n + 1]));
        }
    }

    #[test]
    fn word_vector_round_trip() {
        let order = [Sym::new("a"), Sym::new("b")];
        let w = CommutativeWord::parse_counts([("a", 2), ("b", 5)]);
        let v = word_to_vector(&w, &order).unwrap();
        assert_eq!(v, Vector::from_i64s(&[2, 5]));
        assert_eq!(vector_to_word(&v, &order).unwrap(), w);
        let foreign = CommutativeWord::parse_counts([("zz", 1)]);
        assert!(word_to_vector(&foreign, &order).is_none());
        assert!(vector_to_word(&Vector::from_i64s(&[-1, 0]), &order).is_none());
    }
}
