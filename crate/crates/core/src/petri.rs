//! The Petri-net view of a commutative grammar.
//!
//! A commutative grammar *is* a place/transition net: every symbol is a
//! place, a sentential form is a marking (the multiplicity of a symbol is
//! the token count of its place), every production `V → W` is a transition
//! consuming `V` and producing `W`, and the start form puts a single token
//! on the axiom place.  Derivation steps and transition firings coincide,
//! so the reachable markings are exactly the reachable sentential forms.

use std::collections::BTreeSet;

use num::bigint::BigUint;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::engine::{EngineError, EnumerationBudget};
use crate::grammar::Grammar;
use crate::symbol::{Sym, SymbolKind};
use crate::word::CommutativeWord;

/// A transition consumes its `consume` multiset of tokens and produces
/// `produce`; `name` renders the originating production.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub consume: CommutativeWord,
    pub produce: CommutativeWord,
}

/// A place/transition net with symbol-labelled places.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<(Sym, SymbolKind)>,
    transitions: Vec<Transition>,
    initial: CommutativeWord,
}

impl Grammar {
    /// The net whose reachable markings are this grammar's reachable
    /// sentential forms.
    pub fn to_petri_net(&self) -> PetriNet {
        let places = self
            .symbol_order()
            .iter()
            .map(|s| {
                let kind = if self.is_terminal(*s) {
                    SymbolKind::Terminal
                } else {
                    SymbolKind::Nonterminal
                };
                (*s, kind)
            })
            .collect();
        let order = self.symbol_order();
        let transitions = self
            .productions()
            .iter()
            .map(|p| Transition {
                name: format!("{} -> {}", p.lhs.render(&order), p.rhs.render(&order)),
                consume: p.lhs.clone(),
                produce: p.rhs.clone(),
            })
            .collect();
        PetriNet {
            places,
            transitions,
            initial: self.start_form(),
        }
    }
}

impl PetriNet {
    pub fn places(&self) -> &[(Sym, SymbolKind)] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial_marking(&self) -> &CommutativeWord {
        &self.initial
    }

    /// Indices of the transitions enabled at `marking`.
    pub fn enabled(&self, marking: &CommutativeWord) -> Vec<usize> {
        self.transitions
            .iter()
            .enumerate()
            .filter(|(_, t)| t.consume.is_subword_of(marking))
            .map(|(i, _)| i)
            .collect()
    }

    /// Fires transition `idx` at `marking`; `None` if it is not enabled.
    pub fn fire(&self, marking: &CommutativeWord, idx: usize) -> Option<CommutativeWord> {
        let t = self.transitions.get(idx)?;
        Some(marking.checked_sub(&t.consume)?.add(&t.produce))
    }

    fn terminal_tokens(&self, marking: &CommutativeWord) -> BigUint {
        self.places
            .iter()
            .filter(|(_, kind)| *kind == SymbolKind::Terminal)
            .map(|(s, _)| marking.count(*s))
            .sum()
    }

    /// Breadth-first marking reachability under the same caps as the
    /// grammar-side search: `max_terminals` bounds tokens on terminal
    /// places, `max_forms` the number of markings, `max_depth` the firing
    /// sequence length.  Returns the markings and whether the set is
    /// exhaustive.
    pub fn reachable_markings(
        &self,
        bud: &EnumerationBudget,
        meter: &Budget,
    ) -> Result<(BTreeSet<CommutativeWord>, bool), EngineError> {
        let cap = BigUint::from(bud.max_terminals);
        let mut seen: BTreeSet<CommutativeWord> = BTreeSet::new();
        seen.insert(self.initial.clone());
        let mut layer: Vec<CommutativeWord> = vec![self.initial.clone()];
        let mut exhaustive = true;
        let mut depth = 0u64;
        'outer: while !layer.is_empty() && depth < bud.max_depth {
            let mut next = Vec::new();
            for marking in &layer {
                meter.tick(1, "marking reachability")?;
                for idx in 0..self.transitions.len() {
                    let Some(succ) = self.fire(marking, idx) else {
                        continue;
                    };
                    if seen.contains(&succ) {
                        continue;
                    }
                    if self.terminal_tokens(&succ) > cap {
                        exhaustive = false;
                        continue;
                    }
                    if seen.len() >= bud.max_forms {
                        exhaustive = false;
                        break 'outer;
                    }
                    seen.insert(succ.clone());
                    next.push(succ);
                }
            }
            layer = next;
            depth += 1;
        }
        if !layer.is_empty()
            && depth >= bud.max_depth
            && layer.iter().any(|m| !self.enabled(m).is_empty())
        {
            exhaustive = false;
        }
        Ok((seen, exhaustive))
    }

    /// Serializes the net as PNML (place/transition type).
    pub fn to_pnml(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<pnml xmlns=\"http://www.pnml.org/version-2009/grammar/pnml\">\n");
        out.push_str(
            "  <net id=\"net0\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n",
        );
        out.push_str("    <page id=\"page0\">\n");
        for (i, (sym, _)) in self.places.iter().enumerate() {
            out.push_str(&format!(
                "      <place id=\"p{i}\">\n        <name><text>{}</text></name>\n",
                xml_escape(sym.name())
            ));
            let tokens = self.initial.count(*sym);
            if tokens != BigUint::default() {
                out.push_str(&format!(
                    "        <initialMarking><text>{tokens}</text></initialMarking>\n"
                ));
            }
            out.push_str("      </place>\n");
        }
        let place_index: std::collections::HashMap<Sym, usize> = self
            .places
            .iter()
            .enumerate()
            .map(|(i, (s, _))| (*s, i))
            .collect();
        let mut arc = 0usize;
        for (i, t) in self.transitions.iter().enumerate() {
            out.push_str(&format!(
                "      <transition id=\"t{i}\">\n        <name><text>{}</text></name>\n      </transition>\n",
                xml_escape(&t.name)
            ));
            for (sym, count) in t.consume.iter() {
                out.push_str(&format!(
                    "      <arc id=\"a{arc}\" source=\"p{}\" target=\"t{i}\">\n        \
                     <inscription><text>{count}</text></inscription>\n      </arc>\n",
                    place_index[&sym]
                ));
                arc += 1;
            }
            for (sym, count) in t.produce.iter() {
                out.push_str(&format!(
                    "      <arc id=\"a{arc}\" source=\"t{i}\" target=\"p{}\">\n        \
                     <inscription><text>{count}</text></inscription>\n      </arc>\n",
                    place_index[&sym]
                ));
                arc += 1;
            }
        }
        out.push_str("    </page>\n  </net>\n</pnml>\n");
        out
    }

    /// Serializes the net as JSON, with token counts as decimal strings.
    pub fn to_json(&self) -> Value {
        let places: Vec<Value> = self
            .places
            .iter()
            .map(|(s, kind)| {
                json!({
                    "name": s.name(),
                    "kind": match kind {
                        SymbolKind::Terminal => "terminal",
                        SymbolKind::Nonterminal => "nonterminal",
                    },
                    "initial": self.initial.count(*s).to_string(),
                })
            })
            .collect();
        let word_obj = |w: &CommutativeWord| -> Value {
            Value::Object(
                w.iter()
                    .map(|(s, c)| (s.name().to_owned(), Value::String(c.to_string())))
                    .collect(),
            )
        };
        let transitions: Vec<Value> = self
            .transitions
            .iter()
            .map(|t| {
                json!({
                    "name": t.name,
                    "consume": word_obj(&t.consume),
                    "produce": word_obj(&t.produce),
                })
            })
            .collect();
        json!({ "places": places, "transitions": transitions })
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::reach_bounded;
    use crate::format::parse_grammar;

    fn loopy() -> Grammar {
        parse_grammar("terminals a\nnonterminals S\naxiom S\nS -> S a | eps\n").unwrap()
    }

    #[test]
    fn net_structure_mirrors_grammar() {
        let g = loopy();
        let net = g.to_petri_net();
        assert_eq!(net.places().len(), 2);
        assert_eq!(net.transitions().len(), 2);
        assert_eq!(net.initial_marking(), &g.start_form());
    }

    #[test]
    fn firing_matches_derivation_steps() {
        let g = loopy();
        let net = g.to_petri_net();
        let m0 = net.initial_marking().clone();
        assert_eq!(net.enabled(&m0), vec![0, 1]);
        let m1 = net.fire(&m0, 0).unwrap();
        assert_eq!(m1, CommutativeWord::parse_counts([("S", 1), ("a", 1)]));
        let m2 = net.fire(&m1, 1).unwrap();
        assert_eq!(m2, CommutativeWord::parse_counts([("a", 1)]));
        // ε has no tokens on S, so nothing is enabled.
        assert!(net.enabled(&m2).is_empty());
        assert_eq!(net.fire(&m2, 0), None);
    }

    #[test]
    fn reachable_markings_equal_reachable_forms() {
        let g = loopy();
        let net = g.to_petri_net();
        let bud = EnumerationBudget::terminals(4);
        let (markings, exhaustive) = net.reachable_markings(&bud, &Budget::unlimited()).unwrap();
        let reach = reach_bounded(&g, &g.start_form(), &bud, &Budget::unlimited()).unwrap();
        let forms: BTreeSet<_> = reach.forms().cloned().collect();
        assert_eq!(markings, forms);
        assert_eq!(exhaustive, reach.exhaustive());
    }

    #[test]
    fn pnml_contains_places_arcs_and_escapes() {
        let g = parse_grammar("terminals x<y\nnonterminals S\naxiom S\nS -> x<y | eps\n").unwrap();
        let pnml = g.to_petri_net().to_pnml();
        assert!(pnml.contains("<place id=\"p0\">"));
        assert!(pnml.contains("x&lt;y"));
        assert!(pnml.contains("<initialMarking><text>1</text></initialMarking>"));
        assert!(pnml.contains("source=\"p1\" target=\"t0\""));
        assert!(!pnml.contains("x<y"));
    }

    #[test]
    fn json_uses_decimal_strings() {
        let g = loopy();
        let v = g.to_petri_net().to_json();
        assert_eq!(v["places"][1]["name"], "S");
        assert_eq!(v["places"][1]["initial"], "1");
        assert_eq!(v["transitions"][0]["consume"]["S"], "1");
        assert_eq!(v["transitions"][0]["produce"]["a"], "1");
    }
}
