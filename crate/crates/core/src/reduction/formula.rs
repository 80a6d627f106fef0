//! Π₂ sentences `∀x⃗.∃y⃗.ψ(x⃗,y⃗)` with a positive Boolean matrix over
//! linear inequalities, read from an s-expression surface syntax:
//!
//! ```text
//! SENT  ::= (forall (x ...) (exists (y ...) MATRIX))
//! MATRIX::= (and MATRIX MATRIX) | (or MATRIX MATRIX) | (>= LIN LIN)
//! LIN   ::= TERM | (+ TERM TERM ...)
//! TERM  ::= integer | variable | (* integer variable)
//! ```
//!
//! Every atom `L ≥ R` is normalized into the canonical shape
//!
//! ```text
//! Σⱼ (aⱼ⁺ − aⱼ⁻)·xⱼ + z⁺ − z⁻  ≥  Σⱼ (bⱼ⁺ − bⱼ⁻)·yⱼ
//! ```
//!
//! by moving universal variables and the constant to the left and
//! existential variables to the right, then splitting each signed
//! quantity into a non-negative ⁺/⁻ pair of which at most one is
//! nonzero.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::{BigInt, Sign};
use num::traits::{One, ToPrimitive, Zero};
use num::BigUint;

use crate::budget::Budget;
use crate::word::ceil_log2;

use super::ReductionError;

/// A normalized inequality `Σ aⱼxⱼ + z ≥ Σ bⱼyⱼ` with every signed
/// quantity split into a non-negative ⁺/⁻ pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub a_plus: Vec<BigUint>,
    pub a_minus: Vec<BigUint>,
    pub b_plus: Vec<BigUint>,
    pub b_minus: Vec<BigUint>,
    pub z_plus: BigUint,
    pub z_minus: BigUint,
}

fn split(v: &BigInt) -> (BigUint, BigUint) {
    match v.sign() {
        Sign::NoSign => (BigUint::zero(), BigUint::zero()),
        Sign::Plus => (v.magnitude().clone(), BigUint::zero()),
        Sign::Minus => (BigUint::zero(), v.magnitude().clone()),
    }
}

fn unsplit(plus: &BigUint, minus: &BigUint) -> BigInt {
    BigInt::from(plus.clone()) - BigInt::from(minus.clone())
}

impl Atom {
    /// Signed coefficient of the universal variable `xⱼ`.
    pub fn a(&self, j: usize) -> BigInt {
        unsplit(&self.a_plus[j], &self.a_minus[j])
    }

    /// Signed coefficient of the existential variable `yⱼ`.
    pub fn b(&self, j: usize) -> BigInt {
        unsplit(&self.b_plus[j], &self.b_minus[j])
    }

    /// Signed constant.
    pub fn z(&self) -> BigInt {
        unsplit(&self.z_plus, &self.z_minus)
    }

    /// Evaluates `Σ aⱼxⱼ + z ≥ Σ bⱼyⱼ`.
    pub fn eval(&self, x: &[BigUint], y: &[BigUint]) -> bool {
        assert_eq!(x.len(), self.a_plus.len(), "universal arity mismatch");
        assert_eq!(y.len(), self.b_plus.len(), "existential arity mismatch");
        let mut lhs = self.z();
        for (j, xj) in x.iter().enumerate() {
            lhs += self.a(j) * BigInt::from(xj.clone());
        }
        let mut rhs = BigInt::zero();
        for (j, yj) in y.iter().enumerate() {
            rhs += self.b(j) * BigInt::from(yj.clone());
        }
        lhs >= rhs
    }

    /// `Σⱼ|aⱼ| + Σⱼ|bⱼ| + |z|`: this atom's contribution to the (1,∞)-norm.
    fn one_norm(&self) -> BigUint {
        let mut total = self.z_plus.clone() + &self.z_minus;
        for (p, m) in self.a_plus.iter().zip(&self.a_minus) {
            total += p + m;
        }
        for (p, m) in self.b_plus.iter().zip(&self.b_minus) {
            total += p + m;
        }
        total
    }
}

/// The positive Boolean matrix; leaves index into [`Pi2Sentence::atoms`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Matrix {
    Leaf(usize),
    And(Box<Matrix>, Box<Matrix>),
    Or(Box<Matrix>, Box<Matrix>),
}

impl Matrix {
    fn node_count(&self) -> u64 {
        match self {
            Matrix::Leaf(_) => 1,
            Matrix::And(l, r) | Matrix::Or(l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    /// Preorder traversal paired with syntax-tree paths: the root is `r`,
    /// children append `0`/`1`.
    pub fn paths(&self) -> Vec<(String, &Matrix)> {
        fn walk<'m>(node: &'m Matrix, path: String, out: &mut Vec<(String, &'m Matrix)>) {
            out.push((path.clone(), node));
            if let Matrix::And(l, r) | Matrix::Or(l, r) = node {
                walk(l, format!("{path}0"), out);
                walk(r, format!("{path}1"), out);
            }
        }
        let mut out = Vec::new();
        walk(self, "r".to_owned(), &mut out);
        out
    }

    /// The set of atom indices occurring in this subtree, in increasing order.
    pub fn atom_indices(&self) -> Vec<usize> {
        fn walk(node: &Matrix, out: &mut Vec<usize>) {
            match node {
                Matrix::Leaf(i) => out.push(*i),
                Matrix::And(l, r) | Matrix::Or(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A parsed and normalized Π₂ sentence `∀x⃗.∃y⃗.ψ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pi2Sentence {
    pub x_vars: Vec<String>,
    pub y_vars: Vec<String>,
    pub atoms: Vec<Atom>,
    pub matrix: Matrix,
}

impl Pi2Sentence {
    /// Number of universal variables.
    pub fn m(&self) -> usize {
        self.x_vars.len()
    }

    /// Number of existential variables.
    pub fn n(&self) -> usize {
        self.y_vars.len()
    }

    /// Number of atoms.
    pub fn k(&self) -> usize {
        self.atoms.len()
    }

    /// Unpadded size: syntax-tree nodes of the matrix, one unit per
    /// variable occurrence (nonzero coefficient), and the unary length of
    /// every coefficient and constant.
    pub fn raw_size(&self) -> BigUint {
        let mut total = BigUint::from(self.matrix.node_count());
        for atom in &self.atoms {
            for (p, m) in atom.a_plus.iter().zip(&atom.a_minus) {
                let mag = p + m;
                if !mag.is_zero() {
                    total += BigUint::one() + mag;
                }
            }
            for (p, m) in atom.b_plus.iter().zip(&atom.b_minus) {
                let mag = p + m;
                if !mag.is_zero() {
                    total += BigUint::one() + mag;
                }
            }
            total += atom.z_plus.clone() + &atom.z_minus;
        }
        total
    }

    /// The size `|φ|`: the raw size padded up to `max(raw, 2+m+n+k, ‖φ‖∞)`
    /// so that the constructions may assume those lower bounds.
    pub fn size(&self) -> BigUint {
        let floor = BigUint::from((2 + self.m() + self.n() + self.k()) as u64);
        self.raw_size().max(floor).max(self.norm_inf())
    }

    /// True iff [`Pi2Sentence::size`] exceeds the raw size.
    pub fn size_is_padded(&self) -> bool {
        self.size() > self.raw_size()
    }

    /// `‖φ‖∞`: the largest absolute value among coefficients and constants.
    pub fn norm_inf(&self) -> BigUint {
        let mut best = BigUint::zero();
        for atom in &self.atoms {
            for v in atom
                .a_plus
                .iter()
                .chain(&atom.a_minus)
                .chain(&atom.b_plus)
                .chain(&atom.b_minus)
                .chain([&atom.z_plus, &atom.z_minus])
            {
                best = best.max(v.clone());
            }
        }
        best
    }

    /// `‖φ‖₁,∞`: the largest row sum `Σ|a| + Σ|b| + |z|` over atoms.
    pub fn norm_one_inf(&self) -> BigUint {
        self.atoms
            .iter()
            .map(Atom::one_norm)
            .max()
            .unwrap_or_else(BigUint::zero)
    }
}

/// Evaluates the matrix under concrete natural assignments.
pub fn eval_matrix(phi: &Pi2Sentence, x: &[BigUint], y: &[BigUint]) -> bool {
    fn walk(node: &Matrix, phi: &Pi2Sentence, x: &[BigUint], y: &[BigUint]) -> bool {
        match node {
            Matrix::Leaf(i) => phi.atoms[*i].eval(x, y),
            Matrix::And(l, r) => walk(l, phi, x, y) && walk(r, phi, x, y),
            Matrix::Or(l, r) => walk(l, phi, x, y) || walk(r, phi, x, y),
        }
    }
    walk(&phi.matrix, phi, x, y)
}

/// Evaluates the matrix with atom `i` replaced by the bit `xi[i]`.
pub fn subst_bool(phi: &Pi2Sentence, xi: &[bool]) -> bool {
    assert_eq!(xi.len(), phi.k(), "one bit per atom");
    fn walk(node: &Matrix, xi: &[bool]) -> bool {
        match node {
            Matrix::Leaf(i) => xi[*i],
            Matrix::And(l, r) => walk(l, xi) && walk(r, xi),
            Matrix::Or(l, r) => walk(l, xi) || walk(r, xi),
        }
    }
    walk(&phi.matrix, xi)
}

/// Outcome of the box-bounded validity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedValidity {
    /// Every `x⃗` in the box has a witness `y⃗` in the box.
    ValidOnBox,
    /// `x⃗` has no witness in the `y` box.  `sound` is true when the box
    /// already exhausts the witness-size bound for this instance, making
    /// the refutation absolute rather than box-relative.
    Refuted { x: Vec<BigUint>, sound: bool },
}

/// If `∃y⃗.ψ(x⃗,y⃗)` holds at all, it holds for some `‖y⃗‖∞` below this
/// bound on minimal solutions of linear Diophantine inequality systems.
fn witness_bound(phi: &Pi2Sentence, x: &[BigUint]) -> Option<BigUint> {
    let size = phi.size().to_u64()?;
    let x_inf = x.iter().cloned().max().unwrap_or_else(BigUint::zero);
    let scale = BigUint::one() + x_inf * (BigUint::one() << size);
    let base = phi.norm_one_inf() + phi.norm_inf() + BigUint::from(2u32);
    let exp = (phi.k() + phi.m() + phi.n()) as u32;
    Some(scale * base.pow(exp))
}

/// Advances a box odometer in lexicographic order (last coordinate
/// fastest); returns false after the maximal assignment.
fn bump(v: &mut [BigUint], cap: &BigUint) -> bool {
    for slot in v.iter_mut().rev() {
        if &*slot < cap {
            *slot += BigUint::one();
            return true;
        }
        slot.set_zero();
    }
    false
}

/// Checks `∀x⃗ ≤ x_box. ∃y⃗ ≤ y_box. ψ(x⃗,y⃗)` by exhaustive search,
/// reporting the lexicographically first refuted `x⃗` if any.
pub fn validity_bounded(
    phi: &Pi2Sentence,
    x_box: &BigUint,
    y_box: &BigUint,
    meter: &Budget,
) -> Result<BoundedValidity, ReductionError> {
    let mut x = vec![BigUint::zero(); phi.m()];
    loop {
        let mut witnessed = false;
        let mut y = vec![BigUint::zero(); phi.n()];
        loop {
            meter.tick(1, "bounded validity search")?;
            if eval_matrix(phi, &x, &y) {
                witnessed = true;
                break;
            }
            if !bump(&mut y, y_box) {
                break;
            }
        }
        if !witnessed {
            let sound = match witness_bound(phi, &x) {
                Some(bound) => *y_box >= bound,
                None => false,
            };
            return Ok(BoundedValidity::Refuted { x, sound });
        }
        if !bump(&mut x, x_box) {
            return Ok(BoundedValidity::ValidOnBox);
        }
    }
}

/// The smallest power of two `c` with `c ≥ |φ|^(3|φ|+2) · 2^(|φ|)`.
pub fn compute_c(size: &BigUint) -> BigUint {
    let s = size.to_u64().expect("sentence size fits in a machine word");
    let exponent = u32::try_from(3 * s + 2).expect("exponent fits in u32");
    let target = size.pow(exponent) * (BigUint::one() << s);
    BigUint::one() << ceil_log2(&target)
}

// ---------------------------------------------------------------------
// S-expression surface syntax.
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(s) => write!(f, "{s}"),
            SExpr::List(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<String>, ReductionError> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    if tokens.is_empty() {
        return Err(ReductionError::Parse {
            msg: "empty input".to_owned(),
        });
    }
    Ok(tokens)
}

fn parse_sexpr(tokens: &[String], pos: &mut usize) -> Result<SExpr, ReductionError> {
    let err = |msg: &str| ReductionError::Parse {
        msg: msg.to_owned(),
    };
    match tokens.get(*pos) {
        None => Err(err("unexpected end of input")),
        Some(t) if t == "(" => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => return Err(err("unbalanced parentheses")),
                    Some(t) if t == ")" => {
                        *pos += 1;
                        return Ok(SExpr::List(items));
                    }
                    Some(_) => items.push(parse_sexpr(tokens, pos)?),
                }
            }
        }
        Some(t) if t == ")" => Err(err("unexpected ')'")),
        Some(t) => {
            *pos += 1;
            Ok(SExpr::Atom(t.clone()))
        }
    }
}

/// A linear combination over the declared variables plus a constant.
struct LinComb {
    coeffs: BTreeMap<String, BigInt>,
    constant: BigInt,
}

fn parse_int(text: &str) -> Option<BigInt> {
    let body = text.strip_prefix('-').unwrap_or(text);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

struct FormulaReader<'a> {
    x_vars: &'a [String],
    y_vars: &'a [String],
    atoms: Vec<Atom>,
}

impl FormulaReader<'_> {
    fn is_declared(&self, name: &str) -> bool {
        self.x_vars.iter().any(|v| v == name) || self.y_vars.iter().any(|v| v == name)
    }

    fn read_term(&self, term: &SExpr, into: &mut LinComb) -> Result<(), ReductionError> {
        match term {
            SExpr::Atom(tok) => {
                if let Some(value) = parse_int(tok) {
                    into.constant += value;
                } else if self.is_declared(tok) {
                    *into.coeffs.entry(tok.clone()).or_default() += BigInt::one();
                } else {
                    return Err(ReductionError::FreeVariable { name: tok.clone() });
                }
                Ok(())
            }
            SExpr::List(items) => match items.split_first() {
                Some((SExpr::Atom(op), rest)) if op == "*" => {
                    let [coeff, var] = rest else {
                        return Err(ReductionError::Parse {
                            msg: format!("(* ...) expects an integer and a variable: {term}"),
                        });
                    };
                    let (SExpr::Atom(c), SExpr::Atom(v)) = (coeff, var) else {
                        return Err(ReductionError::Parse {
                            msg: format!("(* ...) expects an integer and a variable: {term}"),
                        });
                    };
                    let Some(value) = parse_int(c) else {
                        return Err(ReductionError::Parse {
                            msg: format!("not an integer coefficient: {c}"),
                        });
                    };
                    if !self.is_declared(v) {
                        if parse_int(v).is_some() {
                            return Err(ReductionError::Parse {
                                msg: format!("(* ...) expects a variable, got integer: {v}"),
                            });
                        }
                        return Err(ReductionError::FreeVariable { name: v.clone() });
                    }
                    *into.coeffs.entry(v.clone()).or_default() += value;
                    Ok(())
                }
                _ => Err(ReductionError::Parse {
                    msg: format!("unrecognized term: {term}"),
                }),
            },
        }
    }

    fn read_lin(&self, expr: &SExpr) -> Result<LinComb, ReductionError> {
        let mut lin = LinComb {
            coeffs: BTreeMap::new(),
            constant: BigInt::zero(),
        };
        match expr {
            SExpr::List(items) if matches!(items.first(), Some(SExpr::Atom(op)) if op == "+") => {
                if items.len() < 2 {
                    return Err(ReductionError::Parse {
                        msg: "(+ ...) expects at least one term".to_owned(),
                    });
                }
                for term in &items[1..] {
                    self.read_term(term, &mut lin)?;
                }
            }
            other => self.read_term(other, &mut lin)?,
        }
        Ok(lin)
    }

    fn read_matrix(&mut self, expr: &SExpr) -> Result<Matrix, ReductionError> {
        let SExpr::List(items) = expr else {
            return Err(ReductionError::Parse {
                msg: format!("expected a connective or atom, got: {expr}"),
            });
        };
        let Some(SExpr::Atom(head)) = items.first() else {
            return Err(ReductionError::Parse {
                msg: format!("expected a connective or atom, got: {expr}"),
            });
        };
        match head.as_str() {
            "and" | "or" => {
                let [_, lhs, rhs] = items.as_slice() else {
                    return Err(ReductionError::Parse {
                        msg: format!("({head} ...) expects exactly two arguments"),
                    });
                };
                let l = Box::new(self.read_matrix(lhs)?);
                let r = Box::new(self.read_matrix(rhs)?);
                Ok(match head.as_str() {
                    "and" => Matrix::And(l, r),
                    _ => Matrix::Or(l, r),
                })
            }
            "not" => Err(ReductionError::Negation),
            "forall" | "exists" => Err(ReductionError::NotPi2 {
                msg: "quantifier inside the matrix".to_owned(),
            }),
            ">=" => {
                let [_, lhs, rhs] = items.as_slice() else {
                    return Err(ReductionError::Parse {
                        msg: "(>= ...) expects exactly two arguments".to_owned(),
                    });
                };
                let left = self.read_lin(lhs)?;
                let right = self.read_lin(rhs)?;
                // Normalize L ≥ R by moving universal variables and the
                // constant left and existential variables right.
                let mut a = vec![BigInt::zero(); self.x_vars.len()];
                let mut b = vec![BigInt::zero(); self.y_vars.len()];
                let z = left.constant - right.constant;
                let mut merged = left.coeffs;
                for (v, c) in right.coeffs {
                    *merged.entry(v).or_default() -= c;
                }
                for (v, c) in merged {
                    if let Some(j) = self.x_vars.iter().position(|x| *x == v) {
                        a[j] = c;
                    } else if let Some(j) = self.y_vars.iter().position(|y| *y == v) {
                        b[j] = -c;
                    }
                }
                let (a_plus, a_minus) = a.iter().map(split).unzip();
                let (b_plus, b_minus) = b.iter().map(split).unzip();
                let (z_plus, z_minus) = split(&z);
                let index = self.atoms.len();
                self.atoms.push(Atom {
                    a_plus,
                    a_minus,
                    b_plus,
                    b_minus,
                    z_plus,
                    z_minus,
                });
                Ok(Matrix::Leaf(index))
            }
            other => Err(ReductionError::Parse {
                msg: format!("unrecognized operator: {other}"),
            }),
        }
    }
}

fn read_var_list(expr: &SExpr) -> Result<Vec<String>, ReductionError> {
    let SExpr::List(items) = expr else {
        return Err(ReductionError::NotPi2 {
            msg: format!("expected a variable list, got: {expr}"),
        });
    };
    let mut vars = Vec::new();
    for item in items {
        let SExpr::Atom(name) = item else {
            return Err(ReductionError::NotPi2 {
                msg: format!("expected a variable name, got: {item}"),
            });
        };
        if parse_int(name).is_some() {
            return Err(ReductionError::NotPi2 {
                msg: format!("integers cannot be bound: {name}"),
            });
        }
        vars.push(name.clone());
    }
    Ok(vars)
}

/// Parses and normalizes a Π₂ sentence from its s-expression text.
pub fn parse_formula(text: &str) -> Result<Pi2Sentence, ReductionError> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let expr = parse_sexpr(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(ReductionError::Parse {
            msg: format!("trailing input after the sentence: {}", tokens[pos]),
        });
    }

    let SExpr::List(items) = &expr else {
        return Err(ReductionError::NotPi2 {
            msg: "a sentence must start with (forall ...)".to_owned(),
        });
    };
    let [SExpr::Atom(forall), x_list, inner] = items.as_slice() else {
        return Err(ReductionError::NotPi2 {
            msg: "expected (forall (vars) (exists (vars) matrix))".to_owned(),
        });
    };
    if forall != "forall" {
        return Err(ReductionError::NotPi2 {
            msg: format!("outermost quantifier must be forall, got: {forall}"),
        });
    }
    let x_vars = read_var_list(x_list)?;

    let SExpr::List(inner_items) = inner else {
        return Err(ReductionError::NotPi2 {
            msg: "forall body must be (exists (vars) matrix)".to_owned(),
        });
    };
    let [SExpr::Atom(exists), y_list, matrix_expr] = inner_items.as_slice() else {
        return Err(ReductionError::NotPi2 {
            msg: "expected (exists (vars) matrix) under forall".to_owned(),
        });
    };
    if exists != "exists" {
        return Err(ReductionError::NotPi2 {
            msg: format!("inner quantifier must be exists, got: {exists}"),
        });
    }
    let y_vars = read_var_list(y_list)?;

    let mut seen = std::collections::BTreeSet::new();
    for v in x_vars.iter().chain(&y_vars) {
        if !seen.insert(v.clone()) {
            return Err(ReductionError::DuplicateVariable { name: v.clone() });
        }
    }

    let mut reader = FormulaReader {
        x_vars: &x_vars,
        y_vars: &y_vars,
        atoms: Vec::new(),
    };
    let matrix = reader.read_matrix(matrix_expr)?;
    let atoms = reader.atoms;
    Ok(Pi2Sentence {
        x_vars,
        y_vars,
        atoms,
        matrix,
    })
}
