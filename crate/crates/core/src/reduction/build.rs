//! Grammar builders for the lower-bound construction.
//!
//! From a sentence `φ = ∀x⃗.∃y⃗.ψ` over atoms `t₁,…,t_k` the builders
//! produce, over the alphabet `Σ = {t₁⁺,t₁⁻,…,t_k⁺,t_k⁻}`:
//!
//! * `G` — one word per universal assignment `x⃗`, padded by `ĉ` per
//!   derivation step (`build_g`);
//! * `H` — the context-free gadget grammar `S_H → Y F_ψ I` (`build_h`);
//! * the equivalence pair `G^e`, `H^e` sharing a fresh axiom `S`
//!   (`build_equiv_pair`);
//! * a regular grammar fragment for `F_ψ` obtained by serializing the
//!   gadget into an NFA and eliminating ε-edges (`regularize_f`);
//! * the doubling gadgets `C_ℓ`, `C_r` and their `Σ`-padded variants
//!   over `Γ_i = {p₀, p̄₁, p₁, …, p̄_i, p_i}` (`build_c_gadgets`);
//! * the regular pair `G^r`, `H^r` over `Σ ∪ Γ_j`, `j = log₂ c`, which
//!   replaces the unary `ĉ`-padding by the doubling chain
//!   (`build_regular_pair`).

use num::BigUint;

use crate::grammar::{Grammar, Production};
use crate::symbol::Sym;
use crate::word::CommutativeWord;

use super::formula::{Matrix, Pi2Sentence};
use super::ReductionError;

fn sym(name: &str) -> Sym {
    Sym::new(name)
}

/// The terminal alphabet `Σ = {t₁⁺, t₁⁻, …, t_k⁺, t_k⁻}` in that order.
pub fn sigma_alphabet(k: usize) -> Vec<Sym> {
    (1..=k)
        .flat_map(|i| [sym(&format!("t{i}+")), sym(&format!("t{i}-"))])
        .collect()
}

/// `u = (z₁⁺, z₁⁻, …, z_k⁺, z_k⁻)`: the constants of every atom.
fn u_word(phi: &Pi2Sentence, sigma: &[Sym]) -> CommutativeWord {
    CommutativeWord::from_counts(phi.atoms.iter().enumerate().flat_map(|(q, atom)| {
        [
            (sigma[2 * q], atom.z_plus.clone()),
            (sigma[2 * q + 1], atom.z_minus.clone()),
        ]
    }))
}

/// `v_i = (a₁,ᵢ⁺, a₁,ᵢ⁻, …, a_k,ᵢ⁺, a_k,ᵢ⁻)`: the coefficients of the
/// universal variable `x_i` (0-based here) in every atom.
fn v_word(phi: &Pi2Sentence, sigma: &[Sym], i: usize) -> CommutativeWord {
    CommutativeWord::from_counts(phi.atoms.iter().enumerate().flat_map(|(q, atom)| {
        [
            (sigma[2 * q], atom.a_plus[i].clone()),
            (sigma[2 * q + 1], atom.a_minus[i].clone()),
        ]
    }))
}

/// `w_i = (b₁,ᵢ⁺, b₁,ᵢ⁻, …, b_k,ᵢ⁺, b_k,ᵢ⁻)`: the coefficients of the
/// existential variable `y_i` (0-based here) in every atom.
fn w_word(phi: &Pi2Sentence, sigma: &[Sym], i: usize) -> CommutativeWord {
    CommutativeWord::from_counts(phi.atoms.iter().enumerate().flat_map(|(q, atom)| {
        [
            (sigma[2 * q], atom.b_plus[i].clone()),
            (sigma[2 * q + 1], atom.b_minus[i].clone()),
        ]
    }))
}

/// `ĉ`: the word carrying `c` at every `Σ`-coordinate.
fn c_hat(sigma: &[Sym], c: &BigUint) -> CommutativeWord {
    CommutativeWord::from_counts(sigma.iter().map(|&s| (s, c.clone())))
}

fn prod(lhs: CommutativeWord, rhs: CommutativeWord) -> Production {
    Production::new(lhs, rhs)
}

fn unit(s: Sym) -> CommutativeWord {
    CommutativeWord::singleton(s)
}

/// Builds `G`: `S_G → X ĉ u`, `X → X ĉ v_i` for `1 ≤ i ≤ m`, `X → ε`.
/// Multiplicities are stored directly as big naturals; a unary-size-bounded
/// variant is available separately through binary expansion.
pub fn build_g(phi: &Pi2Sentence, c: &BigUint) -> Result<Grammar, ReductionError> {
    let sigma = sigma_alphabet(phi.k());
    let s = sym("g.S");
    let x = sym("g.X");
    let chat = c_hat(&sigma, c);
    let mut prods = vec![prod(unit(s), unit(x).add(&chat).add(&u_word(phi, &sigma)))];
    for i in 0..phi.m() {
        prods.push(prod(
            unit(x),
            unit(x).add(&chat).add(&v_word(phi, &sigma, i)),
        ));
    }
    prods.push(prod(unit(x), CommutativeWord::empty()));
    Ok(Grammar::new(sigma, vec![s, x], s, prods)?)
}

fn f_name(path: &str) -> Sym {
    sym(&format!("h.F@{path}"))
}

fn r_name(path: &str) -> Sym {
    sym(&format!("h.R@{path}"))
}

/// Builds the context-free `H` with `S_H → Y F_ψ I` and the gadget
/// production tables for `Y`, the `F`/`R` families (one pair per syntax
/// node of `ψ`), and `I`.
pub fn build_h(phi: &Pi2Sentence) -> Result<Grammar, ReductionError> {
    let sigma = sigma_alphabet(phi.k());
    let s = sym("h.S");
    let y = sym("h.Y");
    let i_nt = sym("h.I");
    let paths = phi.matrix.paths();

    let mut nts = vec![s, y];
    nts.extend(paths.iter().map(|(p, _)| f_name(p)));
    nts.extend(paths.iter().map(|(p, _)| r_name(p)));
    nts.push(i_nt);

    let mut prods = vec![prod(
        unit(s),
        unit(y).add(&unit(f_name("r"))).add(&unit(i_nt)),
    )];
    for i in 0..phi.n() {
        prods.push(prod(unit(y), unit(y).add(&w_word(phi, &sigma, i))));
    }
    prods.push(prod(unit(y), CommutativeWord::empty()));

    // F rules: F_{t} → ε; F_{α∧β} → F_α F_β;
    // F_{α∨β} → F_α R_β | R_α F_β | F_α F_β.
    for (p, node) in &paths {
        let f = unit(f_name(p));
        match node {
            Matrix::Leaf(_) => prods.push(prod(f, CommutativeWord::empty())),
            Matrix::And(_, _) => prods.push(prod(
                f,
                unit(f_name(&format!("{p}0"))).add(&unit(f_name(&format!("{p}1")))),
            )),
            Matrix::Or(_, _) => {
                let f0 = unit(f_name(&format!("{p}0")));
                let f1 = unit(f_name(&format!("{p}1")));
                let r0 = unit(r_name(&format!("{p}0")));
                let r1 = unit(r_name(&format!("{p}1")));
                prods.push(prod(f.clone(), f0.add(&r1)));
                prods.push(prod(f.clone(), r0.add(&f1)));
                prods.push(prod(f, f0.add(&f1)));
            }
        }
    }

    // R rules: R_{t_i} → ε | R_{t_i} t_i⁺ | R_{t_i} t_i⁻; composite nodes
    // chain their children: R_{α∧β} → R_α R_β and R_{α∨β} → R_α R_β.
    for (p, node) in &paths {
        let r = unit(r_name(p));
        match node {
            Matrix::Leaf(q) => {
                prods.push(prod(r.clone(), CommutativeWord::empty()));
                prods.push(prod(r.clone(), r.add(&unit(sigma[2 * q]))));
                prods.push(prod(r.clone(), r.add(&unit(sigma[2 * q + 1]))));
            }
            Matrix::And(_, _) | Matrix::Or(_, _) => prods.push(prod(
                r,
                unit(r_name(&format!("{p}0"))).add(&unit(r_name(&format!("{p}1")))),
            )),
        }
    }

    // I rules: I → ε, I → I t_i⁺ t_i⁻, I → I t_i⁺.
    prods.push(prod(unit(i_nt), CommutativeWord::empty()));
    for q in 0..phi.k() {
        prods.push(prod(
            unit(i_nt),
            unit(i_nt)
                .add(&unit(sigma[2 * q]))
                .add(&unit(sigma[2 * q + 1])),
        ));
    }
    for q in 0..phi.k() {
        prods.push(prod(unit(i_nt), unit(i_nt).add(&unit(sigma[2 * q]))));
    }

    Ok(Grammar::new(sigma, nts, s, prods)?)
}

/// Builds the equivalence pair: `G^e` unions the two start branches over
/// `P_G ∪ P_H`, while `H^e` keeps the same nonterminal set but leaves
/// `S_G` dead and gives `X` only `X → ε`, so `L(H^e) = L(H)` and
/// `L(G^e) = L(G) ∪ L(H)`.
pub fn build_equiv_pair(
    phi: &Pi2Sentence,
    c: &BigUint,
) -> Result<(Grammar, Grammar), ReductionError> {
    let g = build_g(phi, c)?;
    let h = build_h(phi)?;
    if let Some(shared) = g.nonterminal_set().intersection(h.nonterminal_set()).next() {
        return Err(ReductionError::NamespaceCollision {
            name: shared.name().to_owned(),
        });
    }
    let s = sym("S");
    if g.nonterminal_set().contains(&s) || h.nonterminal_set().contains(&s) {
        return Err(ReductionError::NamespaceCollision {
            name: s.name().to_owned(),
        });
    }
    let g_s = g.axiom();
    let g_x = sym("g.X");
    let h_s = h.axiom();
    let sigma = g.terminals().to_vec();

    let nts: Vec<Sym> = std::iter::once(s)
        .chain(g.nonterminals().iter().copied())
        .chain(h.nonterminals().iter().copied())
        .collect();

    let mut ge_prods = vec![prod(unit(s), unit(g_s)), prod(unit(s), unit(h_s))];
    ge_prods.extend(g.productions().iter().cloned());
    ge_prods.extend(h.productions().iter().cloned());
    let g_equiv = Grammar::new(sigma.clone(), nts.clone(), s, ge_prods)?;

    let mut he_prods = vec![
        prod(unit(s), unit(g_s)),
        prod(unit(s), unit(g_x).add(&unit(h_s))),
        prod(unit(g_x), CommutativeWord::empty()),
    ];
    he_prods.extend(h.productions().iter().cloned());
    let h_equiv = Grammar::new(sigma, nts, s, he_prods)?;

    Ok((g_equiv, h_equiv))
}

/// A regular fragment for `F_ψ`: an ε-free NFA presented as grammar
/// material, with `entry` the start state, one production per labeled
/// edge, and `accepting` the states from which the empty word completes.
#[derive(Debug, Clone)]
pub struct RegularFragment {
    entry: Sym,
    states: Vec<Sym>,
    transitions: Vec<(Sym, Sym, Sym)>,
    accepting: Vec<Sym>,
}

impl RegularFragment {
    pub fn entry(&self) -> Sym {
        self.entry
    }

    pub fn states(&self) -> &[Sym] {
        &self.states
    }

    /// Labeled edges `(source, terminal, target)`.
    pub fn transitions(&self) -> &[(Sym, Sym, Sym)] {
        &self.transitions
    }

    pub fn accepting(&self) -> &[Sym] {
        &self.accepting
    }

    /// Views the fragment as a standalone regular grammar over `sigma`.
    pub fn to_grammar(&self, sigma: &[Sym]) -> Result<Grammar, ReductionError> {
        let mut prods: Vec<Production> = self
            .transitions
            .iter()
            .map(|&(from, t, to)| prod(unit(from), unit(to).add(&unit(t))))
            .collect();
        prods.extend(
            self.accepting
                .iter()
                .map(|&q| prod(unit(q), CommutativeWord::empty())),
        );
        Ok(Grammar::new(
            sigma.to_vec(),
            self.states.clone(),
            self.entry,
            prods,
        )?)
    }
}

struct NfaBuilder {
    states: Vec<Sym>,
    eps: Vec<(usize, usize)>,
    labeled: Vec<(usize, Sym, usize)>,
}

impl NfaBuilder {
    fn add(&mut self, name: String) -> usize {
        self.states.push(sym(&name));
        self.states.len() - 1
    }

    fn eps(&mut self, from: usize, to: usize) {
        self.eps.push((from, to));
    }

    fn loop_edge(&mut self, at: usize, label: Sym) {
        self.labeled.push((at, label, at));
    }
}

/// Serializes the `F_ψ` gadget into an NFA with unique entry and exit
/// states, then eliminates ε-edges by closure.
///
/// Conjunctions become sequential composition of the two children.
/// A disjunction `α ∨ β` realizes the three gadget alternatives as three
/// paths through two interior states `q1`, `q3`:
///
/// ```text
/// in ─[F_α]→ q1 ─[R_β]→ out        (F_α R_β)
/// in ─[R_α]→ q3 ─[F_β]→ out        (R_α F_β)
/// in ─[F_α]→ q1 ─ε→ q3 ─[F_β]→ out (F_α F_β)
/// ```
///
/// `R_γ` is the three-state automaton `in ─ε→ mid ─ε→ out` with a loop
/// `mid ─t→ mid` for every `t ∈ T_γ = {t_i⁺, t_i⁻ : t_i occurs in γ}`,
/// whose language is `T_γ^⊙`.
pub fn regularize_f(phi: &Pi2Sentence) -> Result<RegularFragment, ReductionError> {
    let sigma = sigma_alphabet(phi.k());
    let mut nfa = NfaBuilder {
        states: Vec::new(),
        eps: Vec::new(),
        labeled: Vec::new(),
    };

    fn wire_r(nfa: &mut NfaBuilder, node: &Matrix, path: &str, sigma: &[Sym]) -> (usize, usize) {
        let inn = nfa.add(format!("h.R@{path}.in"));
        let mid = nfa.add(format!("h.R@{path}.mid"));
        let out = nfa.add(format!("h.R@{path}.out"));
        nfa.eps(inn, mid);
        for q in node.atom_indices() {
            nfa.loop_edge(mid, sigma[2 * q]);
            nfa.loop_edge(mid, sigma[2 * q + 1]);
        }
        nfa.eps(mid, out);
        (inn, out)
    }

    fn wire_f(nfa: &mut NfaBuilder, node: &Matrix, path: &str, sigma: &[Sym]) -> (usize, usize) {
        let inn = nfa.add(format!("h.F@{path}.in"));
        let out = nfa.add(format!("h.F@{path}.out"));
        match node {
            Matrix::Leaf(_) => nfa.eps(inn, out),
            Matrix::And(l, r) => {
                let (li, lo) = wire_f(nfa, l, &format!("{path}0"), sigma);
                let (ri, ro) = wire_f(nfa, r, &format!("{path}1"), sigma);
                nfa.eps(inn, li);
                nfa.eps(lo, ri);
                nfa.eps(ro, out);
            }
            Matrix::Or(l, r) => {
                let q1 = nfa.add(format!("h.F@{path}.q1"));
                let q3 = nfa.add(format!("h.F@{path}.q3"));
                let (fl_i, fl_o) = wire_f(nfa, l, &format!("{path}0"), sigma);
                let (fr_i, fr_o) = wire_f(nfa, r, &format!("{path}1"), sigma);
                let (rl_i, rl_o) = wire_r(nfa, l, &format!("{path}0"), sigma);
                let (rr_i, rr_o) = wire_r(nfa, r, &format!("{path}1"), sigma);
                nfa.eps(inn, fl_i);
                nfa.eps(fl_o, q1);
                nfa.eps(q1, rr_i);
                nfa.eps(rr_o, out);
                nfa.eps(q1, q3);
                nfa.eps(inn, rl_i);
                nfa.eps(rl_o, q3);
                nfa.eps(q3, fr_i);
                nfa.eps(fr_o, out);
            }
        }
        (inn, out)
    }

    let (entry, exit) = wire_f(&mut nfa, &phi.matrix, "r", &sigma);

    // ε-closures by fixpoint.
    let n = nfa.states.len();
    let mut closure: Vec<Vec<bool>> = (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            seen[s] = true;
            seen
        })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &(from, to) in &nfa.eps {
            for row in &mut closure {
                if row[from] && !row[to] {
                    row[to] = true;
                    changed = true;
                }
            }
        }
    }

    // Lift labeled edges over closures and drop ε-edges.
    let mut lifted: Vec<(usize, Sym, usize)> = Vec::new();
    for (s, row) in closure.iter().enumerate() {
        for &(from, label, to) in &nfa.labeled {
            if row[from] && !lifted.contains(&(s, label, to)) {
                lifted.push((s, label, to));
            }
        }
    }
    let accepting_idx: Vec<usize> = (0..n).filter(|&s| closure[s][exit]).collect();

    // Keep only states reachable from the entry in the ε-free automaton.
    let mut kept = vec![false; n];
    kept[entry] = true;
    let mut stack = vec![entry];
    while let Some(s) = stack.pop() {
        for &(from, _, to) in &lifted {
            if from == s && !kept[to] {
                kept[to] = true;
                stack.push(to);
            }
        }
    }

    Ok(RegularFragment {
        entry: nfa.states[entry],
        states: (0..n).filter(|&s| kept[s]).map(|s| nfa.states[s]).collect(),
        transitions: lifted
            .into_iter()
            .filter(|&(from, _, _)| kept[from])
            .map(|(from, label, to)| (nfa.states[from], label, nfa.states[to]))
            .collect(),
        accepting: accepting_idx
            .into_iter()
            .filter(|&s| kept[s])
            .map(|s| nfa.states[s])
            .collect(),
    })
}

/// The doubling gadgets over `Γ_i = {p₀, p̄₁, p₁, …, p̄_i, p_i}`.
pub struct CGadgets {
    pub gamma: Vec<Sym>,
    pub c_l: Grammar,
    pub c_r: Grammar,
    pub c_l_sigma: Grammar,
    pub c_r_sigma: Grammar,
}

/// Builds `C_ℓ`, `C_r` and their `Σ`-padded variants.
///
/// `L(C_ℓ) = {w : w(p_j) = 2·w(p̄_j) for all 1 ≤ j ≤ i}` via
/// `S_ℓ → ε | S_ℓ p₀ | S_ℓ p̄_j p_j p_j`.  The doubling production is
/// emitted for `1 ≤ j ≤ i`: `p̄₀ ∉ Γ_i`, so the index range starts at 1.
///
/// `L(C_r) = {w : w(p_j) ≠ w(p̄_{j+1}) for some 0 ≤ j < i}`: after
/// pumping `p_i` from `S_r`, a branch chooses `j` and either `N_j`
/// (strict excess of `p_j`) or `N̄_{j+1}` (strict excess of `p̄_{j+1}`);
/// both then produce balanced `p_j p̄_{j+1}` pairs and every other
/// `Γ`-symbol freely.
///
/// `C_ℓ^Σ` additionally emits one copy of each `t ∈ Σ` with every `p_i`,
/// making `w(t) = w(p_i)` by construction; `C_r^Σ` adds a loop
/// `A → A s` for every `s ∈ Σ` at every nonterminal, realizing
/// `L(C_r)·Σ^⊙`.
pub fn build_c_gadgets(i: u64, sigma: &[Sym]) -> Result<CGadgets, ReductionError> {
    if i == 0 {
        return Err(ReductionError::IndexZero);
    }
    let mut gamma = vec![sym("p0")];
    for g in 1..=i {
        gamma.push(sym(&format!("pb{g}")));
        gamma.push(sym(&format!("p{g}")));
    }
    let p = |g: u64| -> Sym {
        if g == 0 {
            gamma[0]
        } else {
            gamma[(2 * g) as usize]
        }
    };
    let pb = |g: u64| -> Sym { gamma[(2 * g - 1) as usize] };

    // C_ℓ.
    let s_l = sym("c.l.S");
    let doubling = |with_sigma: bool| -> Vec<Production> {
        let mut prods = vec![
            prod(unit(s_l), CommutativeWord::empty()),
            prod(unit(s_l), unit(s_l).add(&unit(p(0)))),
        ];
        for g in 1..=i {
            let mut rhs = unit(s_l).add(&unit(pb(g)));
            rhs.add_count(p(g), BigUint::from(2u32));
            if with_sigma && g == i {
                // Two p_i are emitted here, hence two copies of each t.
                for &t in sigma {
                    rhs.add_count(t, BigUint::from(2u32));
                }
            }
            prods.push(prod(unit(s_l), rhs));
        }
        prods
    };
    let c_l = Grammar::new(gamma.clone(), vec![s_l], s_l, doubling(false))?;
    let sigma_gamma: Vec<Sym> = sigma.iter().chain(gamma.iter()).copied().collect();
    let c_l_sigma = Grammar::new(sigma_gamma.clone(), vec![s_l], s_l, doubling(true))?;

    // C_r.
    let s_r = sym("c.r.S");
    let n_j = |j: u64| sym(&format!("c.r.N{j}"));
    let nb_j = |j: u64| sym(&format!("c.r.Nb{j}"));
    let mut nts_r = vec![s_r];
    nts_r.extend((0..i).map(n_j));
    nts_r.extend((0..i).map(|j| nb_j(j + 1)));

    let mut prods_r = vec![prod(unit(s_r), unit(s_r).add(&unit(p(i))))];
    for j in 0..i {
        prods_r.push(prod(unit(s_r), unit(n_j(j)).add(&unit(p(j)))));
        prods_r.push(prod(unit(s_r), unit(nb_j(j + 1)).add(&unit(pb(j + 1)))));
    }
    for j in 0..i {
        prods_r.push(prod(unit(n_j(j)), unit(n_j(j)).add(&unit(p(j)))));
        prods_r.push(prod(
            unit(nb_j(j + 1)),
            unit(nb_j(j + 1)).add(&unit(pb(j + 1))),
        ));
    }
    for j in 0..i {
        prods_r.push(prod(
            unit(n_j(j)),
            unit(n_j(j)).add(&unit(p(j))).add(&unit(pb(j + 1))),
        ));
        prods_r.push(prod(
            unit(nb_j(j + 1)),
            unit(nb_j(j + 1)).add(&unit(p(j))).add(&unit(pb(j + 1))),
        ));
    }
    for j in 0..i {
        for g in 0..i {
            if g == j {
                continue;
            }
            prods_r.push(prod(unit(n_j(j)), unit(n_j(j)).add(&unit(p(g)))));
            prods_r.push(prod(unit(nb_j(j + 1)), unit(nb_j(j + 1)).add(&unit(p(g)))));
        }
    }
    for j in 0..i {
        for g in 0..i {
            if g == j {
                continue;
            }
            prods_r.push(prod(unit(n_j(j)), unit(n_j(j)).add(&unit(pb(g + 1)))));
            prods_r.push(prod(
                unit(nb_j(j + 1)),
                unit(nb_j(j + 1)).add(&unit(pb(g + 1))),
            ));
        }
    }
    for j in 0..i {
        prods_r.push(prod(unit(n_j(j)), CommutativeWord::empty()));
        prods_r.push(prod(unit(nb_j(j + 1)), CommutativeWord::empty()));
    }
    let c_r = Grammar::new(gamma.clone(), nts_r.clone(), s_r, prods_r.clone())?;

    let mut prods_r_sigma = prods_r;
    for &nt in &nts_r {
        for &t in sigma {
            prods_r_sigma.push(prod(unit(nt), unit(nt).add(&unit(t))));
        }
    }
    let c_r_sigma = Grammar::new(sigma_gamma, nts_r, s_r, prods_r_sigma)?;

    Ok(CGadgets {
        gamma,
        c_l,
        c_r,
        c_l_sigma,
        c_r_sigma,
    })
}

/// Builds the regular pair `(G^r, H^r)` over `Σ ∪ Γ_j` with `j = log₂ c`.
///
/// `G^r` replaces each `ĉ` of `G` by a single `p₀` and chains into
/// `C_ℓ^Σ`, whose doubling cascade recovers the padding; `H^r` branches
/// from a fresh axiom into `C_r^Σ` and into the regularized `H`, whose
/// axiom carries a padding loop `A → A g` for every `g ∈ Γ_j`.
pub fn build_regular_pair(
    phi: &Pi2Sentence,
    c: &BigUint,
) -> Result<(Grammar, Grammar), ReductionError> {
    if c < &BigUint::from(2u32) || c.count_ones() != 1 {
        return Err(ReductionError::NotPowerOfTwo {
            value: c.to_string(),
        });
    }
    let j = c.trailing_zeros().expect("c ≥ 2 has a set bit");
    let sigma = sigma_alphabet(phi.k());
    let gadgets = build_c_gadgets(j, &sigma)?;
    let full: Vec<Sym> = sigma.iter().chain(gadgets.gamma.iter()).copied().collect();
    let p0 = gadgets.gamma[0];

    // G^r.
    let g_s = sym("g.S");
    let g_x = sym("g.X");
    let c_l_axiom = gadgets.c_l_sigma.axiom();
    let mut g_prods = vec![prod(
        unit(g_s),
        unit(g_x).add(&unit(p0)).add(&u_word(phi, &sigma)),
    )];
    for i in 0..phi.m() {
        g_prods.push(prod(
            unit(g_x),
            unit(g_x).add(&unit(p0)).add(&v_word(phi, &sigma, i)),
        ));
    }
    g_prods.push(prod(unit(g_x), unit(c_l_axiom)));
    g_prods.extend(gadgets.c_l_sigma.productions().iter().cloned());
    let mut g_nts = vec![g_s, g_x];
    g_nts.extend(gadgets.c_l_sigma.nonterminals().iter().copied());
    let g_regular = Grammar::new(full.clone(), g_nts, g_s, g_prods)?;

    // Regularized H: S_H → Y, Y → F_ψ entry, accepting states → I.
    let frag = regularize_f(phi)?;
    let pad_s = sym("pad.S");
    let h_s = sym("h.S");
    let h_y = sym("h.Y");
    let h_i = sym("h.I");
    let c_r_axiom = gadgets.c_r_sigma.axiom();

    let mut h_nts = vec![pad_s, h_s, h_y];
    h_nts.extend(frag.states().iter().copied());
    h_nts.push(h_i);
    h_nts.extend(gadgets.c_r_sigma.nonterminals().iter().copied());

    let mut h_prods = vec![
        prod(unit(pad_s), unit(c_r_axiom)),
        prod(unit(pad_s), unit(h_s)),
        prod(unit(h_s), unit(h_y)),
    ];
    for i in 0..phi.n() {
        h_prods.push(prod(unit(h_y), unit(h_y).add(&w_word(phi, &sigma, i))));
    }
    h_prods.push(prod(unit(h_y), CommutativeWord::empty()));
    h_prods.push(prod(unit(h_y), unit(frag.entry())));
    for &(from, t, to) in frag.transitions() {
        h_prods.push(prod(unit(from), unit(to).add(&unit(t))));
    }
    for &q in frag.accepting() {
        h_prods.push(prod(unit(q), unit(h_i)));
    }
    h_prods.push(prod(unit(h_i), CommutativeWord::empty()));
    for q in 0..phi.k() {
        h_prods.push(prod(
            unit(h_i),
            unit(h_i)
                .add(&unit(sigma[2 * q]))
                .add(&unit(sigma[2 * q + 1])),
        ));
    }
    for q in 0..phi.k() {
        h_prods.push(prod(unit(h_i), unit(h_i).add(&unit(sigma[2 * q]))));
    }
    // Padding loops at the regularized H's axiom.
    for &g in &gadgets.gamma {
        h_prods.push(prod(unit(h_s), unit(h_s).add(&unit(g))));
    }
    h_prods.extend(gadgets.c_r_sigma.productions().iter().cloned());
    let h_regular = Grammar::new(full, h_nts, pad_s, h_prods)?;

    for (grammar, name) in [(&g_regular, "G^r"), (&h_regular, "H^r")] {
        if grammar.classify().primary() != crate::grammar::GrammarClass::Regular {
            return Err(ReductionError::Construction {
                detail: format!("{name} fails the regularity check"),
            });
        }
    }
    Ok((g_regular, h_regular))
}
