//! `comgram`: command-line front end for the commutative-grammar toolkit.
//!
//! One command per process.  Human-readable results go to stdout and a
//! timing line goes to stderr; `--report FILE` additionally writes a JSON
//! run report that embeds the tool version, input hashes, resolved
//! parameters, and the verdict — and deliberately no wall-clock times, so
//! identical configuration and inputs produce byte-identical reports.
//!
//! Exit codes: `0` the property holds (possibly box-relative; the report
//! carries the exhaustiveness flags), `1` a counterexample or definitive
//! negative, `2` the budget ran out before any verdict, `3` malformed
//! input or configuration.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use num::bigint::{BigInt, BigUint};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use comgram::budget::Budget;
use comgram::engine::{
    decide_inclusion_bruteforce, decide_inclusion_semilinear, language_bounded, parikh_regular,
    word_problem, EngineError, EnumerationBudget, InclusionVerdict, SententialForm,
    WordProblemOptions, WordVerdict,
};
use comgram::format::{parse_grammar, parse_word, render_grammar};
use comgram::grammar::Grammar;
use comgram::reduction::{compile, parse_formula, CompileOptions, ReductionError};
use comgram::semilinear::json::{dioph_from_json, semilinear_from_json, semilinear_to_json};
use comgram::semilinear::{
    huynh_decompose, member_semilinear, semilinear_inclusion, solve_diophantine, HuynhOptions,
    SemiLinearSet, SlError, SlInclusion, Vector,
};

#[derive(Parser)]
#[command(
    name = "comgram",
    version,
    about = "Commutative grammars: derivation engines, semilinear algebra, \
             and lower-bound instance compilation"
)]
struct Cli {
    /// Cap on internal work steps; unlimited when absent.  The env var
    /// COMGRAM_BUDGET_MS additionally caps wall-clock time.
    #[arg(long, global = true)]
    max_steps: Option<u64>,

    /// Seed recorded in the report (for reproducing randomized callers).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the JSON run report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Enumerate the left language and test each word against the right.
    Brute,
    /// Compare Parikh images as semilinear sets (regular grammars only).
    Semilinear,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    /// The context-free inclusion pair G, H.
    Cf,
    /// The regular inclusion pair G^r, H^r.
    Regular,
    /// The equivalence pair G^e, H^e.
    Equiv,
    /// All six grammars.
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Report the grammar's class memberships.
    Classify { grammar: PathBuf },

    /// Decide whether a word is derivable (factor syntax, e.g. "a^2 b").
    Member {
        grammar: PathBuf,
        word: String,
        /// Cap on the total nonterminal count of explored forms; the
        /// default is |w| plus the grammar size.
        #[arg(long)]
        nonterminal_cap: Option<u64>,
        /// Cap on the number of explored forms.
        #[arg(long)]
        max_forms: Option<usize>,
    },

    /// Enumerate the language up to a terminal-count cap.
    Enumerate {
        grammar: PathBuf,
        #[arg(long, default_value_t = 12)]
        max_terminals: u64,
        #[arg(long, default_value_t = 1 << 20)]
        max_forms: usize,
        #[arg(long, default_value_t = 4096)]
        max_depth: u64,
    },

    /// Decide language inclusion L(left) ⊆ L(right).
    Inclusion {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Brute)]
        method: Method,
        /// Terminal cap for the brute-force enumeration of the left language.
        #[arg(long, default_value_t = 12)]
        max_terminals: u64,
        #[arg(long, default_value_t = 1 << 20)]
        max_forms: usize,
        #[arg(long, default_value_t = 4096)]
        max_depth: u64,
        /// Witness representation-size bound for the semilinear method.
        #[arg(long, default_value_t = 12)]
        witness_bits: u64,
    },

    /// Decide language equivalence via two inclusions.
    Equivalence {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Brute)]
        method: Method,
        #[arg(long, default_value_t = 12)]
        max_terminals: u64,
        #[arg(long, default_value_t = 1 << 20)]
        max_forms: usize,
        #[arg(long, default_value_t = 4096)]
        max_depth: u64,
        #[arg(long, default_value_t = 12)]
        witness_bits: u64,
    },

    /// Parikh image of a regular grammar as a semilinear set.
    Parikh { grammar: PathBuf },

    /// Decompose every component of a semilinear set into full-rank form.
    Huynh {
        set: PathBuf,
        /// Maximum period multiplicity explored when searching for bases.
        #[arg(long, default_value_t = 8)]
        widening_max: u64,
    },

    /// Minimal-solution representation of a system A·x ≥ c over ℕ.
    SolveDioph { system: PathBuf },

    /// Membership of a vector (comma-separated coordinates) in a semilinear set.
    SlMember { set: PathBuf, vector: String },

    /// Witness-bounded inclusion of semilinear sets.
    SlIncl {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 12)]
        witness_bits: u64,
    },

    /// Compile a Π₂ sentence into inclusion/equivalence grammar instances.
    CompileLowerBound {
        /// Sentence file: (forall (x…) (exists (y…) MATRIX)).
        #[arg(long)]
        formula: PathBuf,
        /// Output directory for grammar files and manifest.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Replace the certified padding constant by this power of two.
        #[arg(long)]
        c_override: Option<String>,
        #[arg(long, value_enum, default_value_t = Emit::All)]
        emit: Emit,
    },

    /// Export the grammar as a communication-free Petri net (PNML).
    ToPnml {
        grammar: PathBuf,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed run: `exit` is 2 for budget exhaustion, 3 otherwise.
struct CliError {
    exit: u8,
    msg: String,
}

impl CliError {
    fn input(msg: impl Display) -> CliError {
        CliError {
            exit: 3,
            msg: msg.to_string(),
        }
    }
}

fn engine_err(e: EngineError) -> CliError {
    let exit = match e {
        EngineError::Budget(_) => 2,
        _ => 3,
    };
    CliError {
        exit,
        msg: e.to_string(),
    }
}

fn sl_err(e: SlError) -> CliError {
    let exit = match e {
        // Both mean "the configured bounds were too small for a verdict".
        SlError::Budget(_) | SlError::VerificationFailed { .. } => 2,
        _ => 3,
    };
    CliError {
        exit,
        msg: e.to_string(),
    }
}

fn reduction_err(e: ReductionError) -> CliError {
    let exit = match e {
        ReductionError::Budget(_) => 2,
        _ => 3,
    };
    CliError {
        exit,
        msg: e.to_string(),
    }
}

/// A completed run: exit code, a one-line verdict for the report, the
/// verb-specific report payload, and the human-readable stdout lines.
struct Run {
    exit: u8,
    verdict: String,
    data: Value,
    human: Vec<String>,
}

/// Reads a file, recording its path and SHA-256 for the report.
fn read_input(path: &Path, inputs: &mut Vec<(String, String)>) -> Result<String, CliError> {
    let bytes =
        fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    inputs.push((path.display().to_string(), hex));
    String::from_utf8(bytes)
        .map_err(|_| CliError::input(format!("{}: not valid UTF-8", path.display())))
}

fn load_grammar(path: &Path, inputs: &mut Vec<(String, String)>) -> Result<Grammar, CliError> {
    let text = read_input(path, inputs)?;
    parse_grammar(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_semilinear(
    path: &Path,
    inputs: &mut Vec<(String, String)>,
) -> Result<SemiLinearSet, CliError> {
    let text = read_input(path, inputs)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    semilinear_from_json(&value).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn vector_json(v: &Vector) -> Value {
    Value::Array(
        v.entries()
            .iter()
            .map(|x| Value::String(x.to_string()))
            .collect(),
    )
}

/// Renders a derivation trace both for the report and for stdout.
fn trace_output(
    g: &Grammar,
    start: &SententialForm,
    trace: &[(usize, SententialForm)],
) -> (Value, Vec<String>) {
    let order = g.symbol_order();
    let mut lines = vec![format!("  {}", start.render(&order))];
    let mut steps = Vec::new();
    for (idx, form) in trace {
        let rendered = form.render(&order);
        lines.push(format!("  =[p{idx}]=> {rendered}"));
        steps.push(json!({"production": idx, "form": rendered}));
    }
    let value = json!({"start": start.render(&order), "steps": steps});
    (value, lines)
}

fn inclusion_run(
    g: &Grammar,
    h: &Grammar,
    method: Method,
    bud: &EnumerationBudget,
    witness_bits: u64,
    meter: &Budget,
) -> Result<InclusionVerdict, CliError> {
    match method {
        Method::Brute => decide_inclusion_bruteforce(g, h, bud, meter).map_err(engine_err),
        Method::Semilinear => {
            decide_inclusion_semilinear(g, h, witness_bits, meter).map_err(engine_err)
        }
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::Brute => "brute",
        Method::Semilinear => "semilinear",
    }
}

fn dispatch(
    command: &Command,
    meter: &Budget,
    inputs: &mut Vec<(String, String)>,
) -> Result<Run, CliError> {
    match command {
        Command::Classify { grammar } => {
            let g = load_grammar(grammar, inputs)?;
            let classes = g.classify();
            let primary = classes.primary();
            let all: Vec<String> = classes.iter().map(|c| c.to_string()).collect();
            Ok(Run {
                exit: 0,
                verdict: primary.to_string(),
                data: json!({"classes": all, "primary": primary.to_string(), "size": g.size().to_string()}),
                human: vec![format!(
                    "primary class: {primary} (all classes: {})",
                    all.join(", ")
                )],
            })
        }

        Command::Member {
            grammar,
            word,
            nonterminal_cap,
            max_forms,
        } => {
            let g = load_grammar(grammar, inputs)?;
            let w = parse_word(word).map_err(CliError::input)?;
            let opts = WordProblemOptions {
                nonterminal_cap: nonterminal_cap.map(BigUint::from),
                max_forms: *max_forms,
            };
            match word_problem(&g, &w, &opts, meter).map_err(engine_err)? {
                WordVerdict::In { trace } => {
                    let (trace_json, mut lines) = trace_output(&g, &g.start_form(), &trace);
                    lines.insert(0, format!("in language; derivation of {} steps:", trace.len()));
                    Ok(Run {
                        exit: 0,
                        verdict: "in-language".to_owned(),
                        data: json!({"trace": trace_json}),
                        human: lines,
                    })
                }
                WordVerdict::NotIn { exhaustive: true } => Ok(Run {
                    exit: 1,
                    verdict: "not-in-language".to_owned(),
                    data: json!({"exhaustive": true}),
                    human: vec!["not in language (search exhaustive)".to_owned()],
                }),
                WordVerdict::NotIn { exhaustive: false } => Ok(Run {
                    exit: 2,
                    verdict: "inconclusive".to_owned(),
                    data: json!({"exhaustive": false}),
                    human: vec![
                        "no derivation found, but the search was cut off; raise --max-forms \
                         or --nonterminal-cap"
                            .to_owned(),
                    ],
                }),
            }
        }

        Command::Enumerate {
            grammar,
            max_terminals,
            max_forms,
            max_depth,
        } => {
            let g = load_grammar(grammar, inputs)?;
            let bud = EnumerationBudget {
                max_terminals: *max_terminals,
                max_forms: *max_forms,
                max_depth: *max_depth,
            };
            let lang = language_bounded(&g, &g.start_form(), &bud, meter).map_err(engine_err)?;
            let order = g.symbol_order();
            let words: Vec<String> = lang.words().iter().map(|w| w.render(&order)).collect();
            let mut human = words.clone();
            human.push(format!(
                "{} words with at most {} terminals ({})",
                words.len(),
                max_terminals,
                if lang.exhaustive() {
                    "the whole language"
                } else if lang.complete_up_to_terminal_cap() {
                    "complete up to the terminal cap"
                } else {
                    "search caps hit; possibly incomplete"
                }
            ));
            Ok(Run {
                exit: 0,
                verdict: format!("{} words", words.len()),
                data: json!({
                    "complete_up_to_terminal_cap": lang.complete_up_to_terminal_cap(),
                    "exhaustive": lang.exhaustive(),
                    "words": words,
                }),
                human,
            })
        }

        Command::Inclusion {
            left,
            right,
            method,
            max_terminals,
            max_forms,
            max_depth,
            witness_bits,
        } => {
            let g = load_grammar(left, inputs)?;
            let h = load_grammar(right, inputs)?;
            let bud = EnumerationBudget {
                max_terminals: *max_terminals,
                max_forms: *max_forms,
                max_depth: *max_depth,
            };
            match inclusion_run(&g, &h, *method, &bud, *witness_bits, meter)? {
                InclusionVerdict::Included { certified, detail } => Ok(Run {
                    exit: 0,
                    verdict: if certified {
                        "included".to_owned()
                    } else {
                        "included-on-box".to_owned()
                    },
                    data: json!({"certified": certified, "detail": detail}),
                    human: vec![format!("inclusion holds: {detail}")],
                }),
                InclusionVerdict::Counterexample { word, trace } => {
                    let order = g.symbol_order();
                    let rendered = word.render(&order);
                    let (trace_json, trace_lines) = trace_output(&g, &g.start_form(), &trace);
                    let mut human = vec![format!("counterexample: {rendered}")];
                    human.push("derivation in the left grammar:".to_owned());
                    human.extend(trace_lines);
                    Ok(Run {
                        exit: 1,
                        verdict: "counterexample".to_owned(),
                        data: json!({"counterexample": {"word": rendered, "trace": trace_json}}),
                        human,
                    })
                }
            }
        }

        Command::Equivalence {
            left,
            right,
            method,
            max_terminals,
            max_forms,
            max_depth,
            witness_bits,
        } => {
            let g = load_grammar(left, inputs)?;
            let h = load_grammar(right, inputs)?;
            let bud = EnumerationBudget {
                max_terminals: *max_terminals,
                max_forms: *max_forms,
                max_depth: *max_depth,
            };
            let mut directions = serde_json::Map::new();
            for (name, a, b) in [("left-in-right", &g, &h), ("right-in-left", &h, &g)] {
                match inclusion_run(a, b, *method, &bud, *witness_bits, meter)? {
                    InclusionVerdict::Included { certified, detail } => {
                        directions.insert(
                            name.to_owned(),
                            json!({"certified": certified, "detail": detail}),
                        );
                    }
                    InclusionVerdict::Counterexample { word, trace } => {
                        let order = a.symbol_order();
                        let rendered = word.render(&order);
                        let (trace_json, trace_lines) = trace_output(a, &a.start_form(), &trace);
                        let mut human =
                            vec![format!("not equivalent ({name}): counterexample {rendered}")];
                        human.extend(trace_lines);
                        return Ok(Run {
                            exit: 1,
                            verdict: "counterexample".to_owned(),
                            data: json!({
                                "counterexample": {
                                    "direction": name,
                                    "trace": trace_json,
                                    "word": rendered,
                                },
                                "directions": Value::Object(directions),
                            }),
                            human,
                        });
                    }
                }
            }
            let certified = directions
                .values()
                .all(|d| d["certified"] == Value::Bool(true));
            Ok(Run {
                exit: 0,
                verdict: if certified {
                    "equivalent".to_owned()
                } else {
                    "equivalent-on-box".to_owned()
                },
                data: json!({"certified": certified, "directions": Value::Object(directions)}),
                human: vec![format!(
                    "equivalent ({})",
                    if certified { "certified" } else { "on the searched box" }
                )],
            })
        }

        Command::Parikh { grammar } => {
            let g = load_grammar(grammar, inputs)?;
            let image = parikh_regular(&g, meter).map_err(engine_err)?;
            let order: Vec<String> = g.terminals().iter().map(|s| s.name().to_owned()).collect();
            let set_json = semilinear_to_json(&image);
            Ok(Run {
                exit: 0,
                verdict: format!("{} components", image.components().len()),
                data: json!({"order": order, "semilinear": set_json.clone()}),
                human: vec![
                    format!("coordinate order: {}", order.join(" ")),
                    set_json.to_string(),
                ],
            })
        }

        Command::Huynh { set, widening_max } => {
            let m = load_semilinear(set, inputs)?;
            let opts = HuynhOptions {
                widening_max: *widening_max,
                verify_box: None,
            };
            let mut components = Vec::new();
            for l in m.components() {
                let part = huynh_decompose(l, &opts, meter).map_err(sl_err)?;
                components.extend(part.components().iter().cloned());
            }
            let decomposed = SemiLinearSet::new(m.dim(), components).map_err(sl_err)?;
            let set_json = semilinear_to_json(&decomposed);
            Ok(Run {
                exit: 0,
                verdict: format!(
                    "{} components into {} full-rank components",
                    m.components().len(),
                    decomposed.components().len()
                ),
                data: json!({"semilinear": set_json.clone()}),
                human: vec![set_json.to_string()],
            })
        }

        Command::SolveDioph { system } => {
            let text = read_input(system, inputs)?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::input(format!("{}: {e}", system.display())))?;
            let d = dioph_from_json(&value)
                .map_err(|e| CliError::input(format!("{}: {e}", system.display())))?;
            let sol = solve_diophantine(&d, meter).map_err(sl_err)?;
            let set = sol.to_semilinear(d.n()).map_err(sl_err)?;
            Ok(Run {
                exit: 0,
                verdict: format!("{} bases, {} periods", sol.bases.len(), sol.periods.len()),
                data: json!({
                    "bases": sol.bases.iter().map(vector_json).collect::<Vec<_>>(),
                    "periods": sol.periods.iter().map(vector_json).collect::<Vec<_>>(),
                    "pottier_bound": sol.bound.to_string(),
                    "semilinear": semilinear_to_json(&set),
                }),
                human: vec![
                    semilinear_to_json(&set).to_string(),
                    format!(
                        "{} minimal solutions and {} homogeneous generators; norms within \
                         the Pottier bound {}",
                        sol.bases.len(),
                        sol.periods.len(),
                        sol.bound
                    ),
                ],
            })
        }

        Command::SlMember { set, vector } => {
            let m = load_semilinear(set, inputs)?;
            let entries: Vec<BigInt> = vector
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<BigInt>()
                        .map_err(|_| CliError::input(format!("`{t}` is not an integer")))
                })
                .collect::<Result<_, _>>()?;
            if entries.len() != m.dim() {
                return Err(CliError::input(format!(
                    "vector has {} coordinates, the set has dimension {}",
                    entries.len(),
                    m.dim()
                )));
            }
            let v = Vector::new(entries);
            let is_member = member_semilinear(&v, &m, meter).map_err(sl_err)?;
            Ok(Run {
                exit: u8::from(!is_member),
                verdict: if is_member { "member" } else { "not-member" }.to_owned(),
                data: json!({"member": is_member, "vector": vector_json(&v)}),
                human: vec![format!(
                    "{v} is {}a member",
                    if is_member { "" } else { "not " }
                )],
            })
        }

        Command::SlIncl {
            left,
            right,
            witness_bits,
        } => {
            let a = load_semilinear(left, inputs)?;
            let b = load_semilinear(right, inputs)?;
            match semilinear_inclusion(&a, &b, *witness_bits, meter).map_err(sl_err)? {
                SlInclusion::Included { bit_bound } => Ok(Run {
                    exit: 0,
                    verdict: "included".to_owned(),
                    data: json!({"included": true, "witness_bit_bound": bit_bound}),
                    human: vec![format!(
                        "inclusion holds for every witness of representation size \
                         at most {bit_bound} bits"
                    )],
                }),
                SlInclusion::Counterexample(v) => Ok(Run {
                    exit: 1,
                    verdict: "counterexample".to_owned(),
                    data: json!({"counterexample": vector_json(&v), "included": false}),
                    human: vec![format!("counterexample: {v}")],
                }),
            }
        }

        Command::CompileLowerBound {
            formula,
            out,
            c_override,
            emit,
        } => {
            let text = read_input(formula, inputs)?;
            let phi = parse_formula(&text).map_err(reduction_err)?;
            let c_override = c_override
                .as_ref()
                .map(|s| {
                    s.parse::<BigUint>()
                        .map_err(|_| CliError::input(format!("`{s}` is not a natural number")))
                })
                .transpose()?;
            let arts = compile(&phi, &CompileOptions { c_override }).map_err(reduction_err)?;

            fs::create_dir_all(out).map_err(|e| CliError::input(format!("{}: {e}", out.display())))?;
            let mut files: Vec<(&str, &Grammar)> = Vec::new();
            if matches!(emit, Emit::Cf | Emit::All) {
                files.push(("G.gram", &arts.g));
                files.push(("H.gram", &arts.h));
            }
            if matches!(emit, Emit::Regular | Emit::All) {
                files.push(("G_regular.gram", &arts.g_regular));
                files.push(("H_regular.gram", &arts.h_regular));
            }
            if matches!(emit, Emit::Equiv | Emit::All) {
                files.push(("G_equiv.gram", &arts.g_equiv));
                files.push(("H_equiv.gram", &arts.h_equiv));
            }

            let mut grammars = serde_json::Map::new();
            let mut human = Vec::new();
            for (name, grammar) in &files {
                let path = out.join(name);
                fs::write(&path, render_grammar(grammar))
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                grammars.insert(
                    (*name).to_owned(),
                    json!({
                        "class": grammar.classify().primary().to_string(),
                        "size": grammar.size().to_string(),
                    }),
                );
                human.push(format!("wrote {}", path.display()));
            }

            let axioms: BTreeMap<&str, &str> = arts
                .gadget_axioms
                .iter()
                .map(|(k, v)| (k.as_str(), v.name()))
                .collect();
            let manifest = json!({
                "c": arts.c.to_string(),
                "certified": arts.certified,
                "formula_size": arts.size.to_string(),
                "gadget_axioms": axioms,
                "gamma": arts.gamma.iter().map(|s| s.name()).collect::<Vec<_>>(),
                "grammars": Value::Object(grammars),
                "log2_c": arts.log2_c,
                "sigma": arts.sigma.iter().map(|s| s.name()).collect::<Vec<_>>(),
            });
            let manifest_path = out.join("manifest.json");
            let mut rendered = serde_json::to_string_pretty(&manifest)
                .expect("manifest serializes");
            rendered.push('\n');
            fs::write(&manifest_path, rendered)
                .map_err(|e| CliError::input(format!("{}: {e}", manifest_path.display())))?;
            human.push(format!("wrote {}", manifest_path.display()));
            human.push(format!(
                "c = {}{}",
                arts.c,
                if arts.certified {
                    " (certified)"
                } else {
                    " (override; instance is test-grade)"
                }
            ));

            Ok(Run {
                exit: 0,
                verdict: format!("compiled with c = 2^{}", arts.log2_c),
                data: manifest,
                human,
            })
        }

        Command::ToPnml { grammar, out } => {
            let g = load_grammar(grammar, inputs)?;
            let net = g.to_petri_net();
            let pnml = net.to_pnml();
            let (human, detail) = match out {
                Some(path) => {
                    fs::write(path, &pnml)
                        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                    (vec![format!("wrote {}", path.display())], path.display().to_string())
                }
                None => (vec![pnml.clone()], "stdout".to_owned()),
            };
            Ok(Run {
                exit: 0,
                verdict: format!(
                    "{} places, {} transitions",
                    net.places().len(),
                    net.transitions().len()
                ),
                data: json!({
                    "places": net.places().len(),
                    "transitions": net.transitions().len(),
                    "written_to": detail,
                }),
                human,
            })
        }
    }
}

/// The verb name as spelled on the command line.
fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Classify { .. } => "classify",
        Command::Member { .. } => "member",
        Command::Enumerate { .. } => "enumerate",
        Command::Inclusion { .. } => "inclusion",
        Command::Equivalence { .. } => "equivalence",
        Command::Parikh { .. } => "parikh",
        Command::Huynh { .. } => "huynh",
        Command::SolveDioph { .. } => "solve-dioph",
        Command::SlMember { .. } => "sl-member",
        Command::SlIncl { .. } => "sl-incl",
        Command::CompileLowerBound { .. } => "compile-lower-bound",
        Command::ToPnml { .. } => "to-pnml",
    }
}

/// The resolved parameters of the run, echoed into the report.
fn command_params(command: &Command) -> Value {
    match command {
        Command::Classify { .. } | Command::Parikh { .. } => json!({}),
        Command::Member {
            word,
            nonterminal_cap,
            max_forms,
            ..
        } => json!({
            "max_forms": max_forms,
            "nonterminal_cap": nonterminal_cap,
            "word": word,
        }),
        Command::Enumerate {
            max_terminals,
            max_forms,
            max_depth,
            ..
        } => json!({
            "max_depth": max_depth,
            "max_forms": max_forms,
            "max_terminals": max_terminals,
        }),
        Command::Inclusion {
            method,
            max_terminals,
            max_forms,
            max_depth,
            witness_bits,
            ..
        }
        | Command::Equivalence {
            method,
            max_terminals,
            max_forms,
            max_depth,
            witness_bits,
            ..
        } => json!({
            "max_depth": max_depth,
            "max_forms": max_forms,
            "max_terminals": max_terminals,
            "method": method_name(*method),
            "witness_bits": witness_bits,
        }),
        Command::Huynh { widening_max, .. } => json!({"widening_max": widening_max}),
        Command::SolveDioph { .. } => json!({}),
        Command::SlMember { vector, .. } => json!({"vector": vector}),
        Command::SlIncl { witness_bits, .. } => json!({"witness_bits": witness_bits}),
        Command::CompileLowerBound {
            c_override, emit, ..
        } => json!({
            "c_override": c_override,
            "emit": match emit {
                Emit::Cf => "cf",
                Emit::Regular => "regular",
                Emit::Equiv => "equiv",
                Emit::All => "all",
            },
        }),
        Command::ToPnml { .. } => json!({}),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let deadline_ms = std::env::var("COMGRAM_BUDGET_MS")
        .ok()
        .and_then(|v| v.parse::<u64>().ok());
    let mut meter = match cli.max_steps {
        Some(n) => Budget::with_max_steps(n),
        None => Budget::unlimited(),
    };
    if let Some(ms) = deadline_ms {
        meter = meter.with_deadline(Instant::now() + Duration::from_millis(ms));
    }

    let started = Instant::now();
    let mut inputs = Vec::new();
    let run = match dispatch(&cli.command, &meter, &mut inputs) {
        Ok(run) => run,
        Err(e) if e.exit == 2 => Run {
            exit: 2,
            verdict: "budget-exhausted".to_owned(),
            data: json!({"error": e.msg.clone()}),
            human: vec![format!("inconclusive: {}", e.msg)],
        },
        Err(e) => {
            eprintln!("error: {}", e.msg);
            return ExitCode::from(e.exit);
        }
    };

    let mut out = io::stdout().lock();
    for line in &run.human {
        // A closed pipe (`comgram to-pnml g.gram | head`) is not an error:
        // stop writing and let the verdict exit code stand.
        if writeln!(out, "{line}").is_err() {
            break;
        }
    }
    let _ = out.flush();
    drop(out);
    eprintln!(
        "completed in {:.3}s using {} budget steps",
        started.elapsed().as_secs_f64(),
        meter.used()
    );

    if let Some(path) = &cli.report {
        let report = json!({
            "budget": {
                "deadline_ms": deadline_ms,
                "max_steps": cli.max_steps,
                "steps_used": meter.used(),
            },
            "command": command_name(&cli.command),
            "data": run.data,
            "inputs": inputs
                .iter()
                .map(|(p, h)| json!({"path": p, "sha256": h}))
                .collect::<Vec<_>>(),
            "params": command_params(&cli.command),
            "seed": cli.seed,
            "verdict": run.verdict,
            "version": env!("CARGO_PKG_VERSION"),
        });
        let mut rendered = serde_json::to_string_pretty(&report).expect("report serializes");
        rendered.push('\n');
        if let Err(e) = fs::write(path, rendered) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(3);
        }
    }

    ExitCode::from(run.exit)
}
