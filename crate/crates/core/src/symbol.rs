//! Interned grammar symbols.
//!
//! Symbols are process-wide interned names: cheap to copy, compare and hash.
//! Canonical orderings presented to users (serialized vectors, rendered
//! words, reports) always go through a grammar's declaration order, never
//! through the intern order, which depends on processing history.

use std::fmt;
use std::sync::{OnceLock, RwLock};

/// Whether a symbol is rewritten (nonterminal) or inert (terminal) in a
/// given grammar.  The same name may play different roles in different
/// grammars; the role is stored by the grammar, not by the symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Terminal,
    Nonterminal,
}

/// An interned symbol name.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(u32);

struct Interner {
    names: Vec<&'static str>,
    index: std::collections::HashMap<&'static str, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        RwLock::new(Interner {
            names: Vec::new(),
            index: std::collections::HashMap::new(),
        })
    })
}

impl Sym {
    /// Interns `name` and returns its symbol.
    pub fn new(name: &str) -> Sym {
        {
            let guard = interner().read().unwrap();
            if let Some(&id) = guard.index.get(name) {
                return Sym(id);
            }
        }
        let mut guard = interner().write().unwrap();
        if let Some(&id) = guard.index.get(name) {
            return Sym(id);
        }
        let id = u32::try_from(guard.names.len()).expect("interner overflow");
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        guard.names.push(leaked);
        guard.index.insert(leaked, id);
        Sym(id)
    }

    /// The interned name.
    pub fn name(&self) -> &'static str {
        interner().read().unwrap().names[self.0 as usize]
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sym({})", self.name())
    }
}

impl From<&str> for Sym {
    fn from(name: &str) -> Sym {
        Sym::new(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        let a = Sym::new("interntest.a");
        let b = Sym::new("interntest.b");
        let a2 = Sym::new("interntest.a");
        assert_eq!(a, a2);
        assert_ne!(a, b);
        assert_eq!(a.name(), "interntest.a");
        assert_eq!(b.name(), "interntest.b");
    }
}
