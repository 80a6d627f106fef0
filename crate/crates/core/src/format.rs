//! Plain-text grammar format.
//!
//! ```text
//! # both gadget halves share the terminal alphabet
//! terminals a b
//! nonterminals S X
//! axiom S
//! S -> S a | eps
//! S X -> b^3
//! ```
//!
//! Header lines declare symbols in canonical order (`terminals` and
//! `nonterminals` may repeat and append; `axiom` must appear exactly once).
//! Every other nonempty line is a production; the right-hand side may list
//! alternatives separated by `|`.  A factor is `name` or `name^count` with
//! an arbitrary-precision decimal count; `eps` denotes the empty multiset.
//! `#` starts a comment.  Names may not contain whitespace, `^` or `#`, and
//! the tokens `->`, `|`, `eps`, `terminals`, `nonterminals`, `axiom` are
//! reserved.

use num::bigint::BigUint;
use num::traits::One;

use crate::grammar::{Grammar, GrammarError, Production};
use crate::symbol::Sym;
use crate::word::CommutativeWord;

/// Errors from text parsing and the subsequent grammar validation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TextError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

const RESERVED: &[&str] = &["->", "|", "eps", "terminals", "nonterminals", "axiom"];

fn check_name(line: usize, tok: &str) -> Result<(), TextError> {
    if RESERVED.contains(&tok) || tok.contains('^') || tok.contains('#') || tok.is_empty() {
        return Err(TextError::Syntax {
            line,
            msg: format!("`{tok}` is not a valid symbol name"),
        });
    }
    Ok(())
}

fn parse_factor(line: usize, tok: &str, into: &mut CommutativeWord) -> Result<(), TextError> {
    if tok == "eps" {
        return Ok(());
    }
    let (name, count) = match tok.split_once('^') {
        None => (tok, BigUint::one()),
        Some((name, count)) => {
            let count = count.parse::<BigUint>().map_err(|_| TextError::Syntax {
                line,
                msg: format!("`{count}` is not a decimal count"),
            })?;
            (name, count)
        }
    };
    check_name(line, name)?;
    into.add_count(Sym::new(name), count);
    Ok(())
}

fn parse_side(line: usize, toks: &[&str]) -> Result<CommutativeWord, TextError> {
    let mut w = CommutativeWord::empty();
    for tok in toks {
        parse_factor(line, tok, &mut w)?;
    }
    Ok(w)
}

/// Parses a single word (e.g. a CLI `--word` argument) in factor syntax.
pub fn parse_word(text: &str) -> Result<CommutativeWord, TextError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.is_empty() {
        return Err(TextError::Syntax {
            line: 1,
            msg: "empty word; write `eps` for the empty multiset".to_owned(),
        });
    }
    parse_side(1, &toks)
}

/// Parses the text format into a validated [`Grammar`].
pub fn parse_grammar(text: &str) -> Result<Grammar, TextError> {
    let mut terminals: Vec<Sym> = Vec::new();
    let mut nonterminals: Vec<Sym> = Vec::new();
    let mut axiom: Option<Sym> = None;
    let mut productions: Vec<Production> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let toks: Vec<&str> = stripped.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "terminals" | "nonterminals" => {
                for tok in &toks[1..] {
                    check_name(line, tok)?;
                    let sym = Sym::new(tok);
                    if toks[0] == "terminals" {
                        terminals.push(sym);
                    } else {
                        nonterminals.push(sym);
                    }
                }
            }
            "axiom" => {
                if toks.len() != 2 {
                    return Err(TextError::Syntax {
                        line,
                        msg: "expected `axiom NAME`".to_owned(),
                    });
                }
                check_name(line, toks[1])?;
                if axiom.replace(Sym::new(toks[1])).is_some() {
                    return Err(TextError::Syntax {
                        line,
                        msg: "axiom declared twice".to_owned(),
                    });
                }
            }
            _ => {
                let arrow = toks.iter().position(|t| *t == "->");
                let Some(arrow) = arrow else {
                    return Err(TextError::Syntax {
                        line,
                        msg: "expected a header or a production containing `->`".to_owned(),
                    });
                };
                let lhs = parse_side(line, &toks[..arrow])?;
                for alt in toks[arrow + 1..].split(|t| *t == "|") {
                    let rhs = parse_side(line, alt)?;
                    productions.push(Production::new(lhs.clone(), rhs));
                }
            }
        }
    }

    let Some(axiom) = axiom else {
        return Err(TextError::Syntax {
            line: text.lines().count() + 1,
            msg: "missing `axiom` declaration".to_owned(),
        });
    };
    Ok(Grammar::new(terminals, nonterminals, axiom, productions)?)
}

/// Renders a grammar in the text format; `parse_grammar` inverts this.
pub fn render_grammar(g: &Grammar) -> String {
    let order = g.symbol_order();
    let mut out = String::new();
    if !g.terminals().is_empty() {
        out.push_str("terminals");
        for t in g.terminals() {
            out.push(' ');
            out.push_str(t.name());
        }
        out.push('\n');
    }
    out.push_str("nonterminals");
    for n in g.nonterminals() {
        out.push(' ');
        out.push_str(n.name());
    }
    out.push('\n');
    out.push_str(&format!("axiom {}\n", g.axiom().name()));

    let mut i = 0;
    let prods = g.productions();
    while i < prods.len() {
        let lhs = &prods[i].lhs;
        let mut alts = vec![prods[i].rhs.render(&order)];
        let mut j = i + 1;
        while j < prods.len() && &prods[j].lhs == lhs {
            alts.push(prods[j].rhs.render(&order));
            j += 1;
        }
        out.push_str(&format!("{} -> {}\n", lhs.render(&order), alts.join(" | ")));
        i = j;
    }
    out
}
