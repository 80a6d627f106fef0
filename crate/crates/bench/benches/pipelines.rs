//! Benchmarks for the three kernels: semilinear algebra, the bounded
//! derivation engine, and the lower-bound compiler.

use criterion::{criterion_group, criterion_main, Criterion};
use num::bigint::BigUint;

use comgram::budget::Budget;
use comgram::engine::{
    decide_inclusion_bruteforce, decide_inclusion_semilinear, language_bounded, parikh_regular,
    word_problem, EnumerationBudget, WordProblemOptions,
};
use comgram::reduction::{compile, parse_formula, CompileOptions};
use comgram::semilinear::{
    huynh_decompose, member_semilinear, semilinear_inclusion, solve_diophantine,
    DiophantineSystem, HuynhOptions, Vector,
};

use comgram_bench::{grammar, lattice_pair, rank_deficient_linear, AASTAR, ASTAR, EVEN_OR_ODD, TWO_LETTER};

fn bench_semilinear(c: &mut Criterion) {
    let mut group = c.benchmark_group("semilinear");
    let meter = Budget::unlimited();

    let system = DiophantineSystem::new(
        vec![
            Vector::from_i64s(&[1, 2, -1, 0, 1]),
            Vector::from_i64s(&[0, -1, 3, -2, 0]),
            Vector::from_i64s(&[2, 0, 0, 1, -3]),
        ],
        Vector::from_i64s(&[3, 1, 2]),
    )
    .unwrap();
    group.bench_function("solve_diophantine_3x5", |b| {
        b.iter(|| solve_diophantine(&system, &meter).unwrap())
    });

    let linear = rank_deficient_linear();
    let opts = HuynhOptions::default();
    group.bench_function("huynh_decompose_dim4", |b| {
        b.iter(|| huynh_decompose(&linear, &opts, &meter).unwrap())
    });

    let (coarse, fine) = lattice_pair();
    group.bench_function("inclusion_witness_sweep_10bit", |b| {
        b.iter(|| semilinear_inclusion(&coarse, &fine, 10, &meter).unwrap())
    });

    let sl = huynh_decompose(&linear, &opts, &meter).unwrap();
    let probe = Vector::from_i64s(&[7, 6, 5, 6]);
    group.bench_function("member_dim4", |b| {
        b.iter(|| member_semilinear(&probe, &sl, &meter).unwrap())
    });

    group.finish();
}

fn bench_engine(c: &mut Criterion) {
    let mut group = c.benchmark_group("engine");
    let meter = Budget::unlimited();

    let phi = parse_formula(EVEN_OR_ODD).unwrap();
    let arts = compile(
        &phi,
        &CompileOptions {
            c_override: Some(BigUint::from(2u32)),
        },
    )
    .unwrap();

    let bud = EnumerationBudget {
        max_terminals: 38,
        max_forms: 1 << 18,
        max_depth: 4096,
    };
    group.bench_function("enumerate_compiled_g", |b| {
        b.iter(|| language_bounded(&arts.g, &arts.g.start_form(), &bud, &meter).unwrap())
    });

    let lang = language_bounded(&arts.g, &arts.g.start_form(), &bud, &meter).unwrap();
    let base = lang.words().iter().next().expect("base word exists").clone();
    group.bench_function("word_problem_compiled_h", |b| {
        b.iter(|| word_problem(&arts.h, &base, &WordProblemOptions::default(), &meter).unwrap())
    });

    let astar = grammar(ASTAR);
    let aastar = grammar(AASTAR);
    let small = EnumerationBudget {
        max_terminals: 10,
        max_forms: 1 << 12,
        max_depth: 256,
    };
    group.bench_function("inclusion_bruteforce", |b| {
        b.iter(|| decide_inclusion_bruteforce(&aastar, &astar, &small, &meter).unwrap())
    });
    group.bench_function("inclusion_semilinear", |b| {
        b.iter(|| decide_inclusion_semilinear(&aastar, &astar, 10, &meter).unwrap())
    });

    let two = grammar(TWO_LETTER);
    group.bench_function("parikh_regular", |b| {
        b.iter(|| parikh_regular(&two, &meter).unwrap())
    });

    group.finish();
}

fn bench_reduction(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduction");

    let phi = parse_formula(EVEN_OR_ODD).unwrap();
    group.bench_function("parse_formula", |b| {
        b.iter(|| parse_formula(EVEN_OR_ODD).unwrap())
    });
    group.bench_function("compile_certified", |b| {
        b.iter(|| compile(&phi, &CompileOptions::default()).unwrap())
    });
    group.bench_function("compile_c4", |b| {
        b.iter(|| {
            compile(
                &phi,
                &CompileOptions {
                    c_override: Some(BigUint::from(4u32)),
                },
            )
            .unwrap()
        })
    });

    group.finish();
}

fn bench_petri(c: &mut Criterion) {
    let mut group = c.benchmark_group("petri");
    let meter = Budget::unlimited();

    let two = grammar(TWO_LETTER);
    let net = two.to_petri_net();
    let bud = EnumerationBudget {
        max_terminals: 10,
        max_forms: 1 << 14,
        max_depth: 256,
    };
    group.bench_function("reachable_markings", |b| {
        b.iter(|| net.reachable_markings(&bud, &meter).unwrap())
    });

    group.finish();
}

criterion_group!(benches, bench_semilinear, bench_engine, bench_reduction, bench_petri);
criterion_main!(benches);
