//! Randomized property suites shared by the `properties` and `acceptance`
//! targets. Runs use a fixed seed, printed before each suite and
//! overridable with `REVHASH_PROPTEST_SEED`.
#![allow(dead_code)]

use proptest::prelude::*;
pub use proptest::test_runner::Config;
use proptest::test_runner::RngSeed;
use revhash_core::analyze::collision_scan;
use revhash_core::esop::{self, Effort};
use revhash_core::invert::{self, FunctionRef};
use revhash_core::pla::{self, expand_to_minterms, parse_pla, write_pla};
use revhash_core::sim::{Compiled, State};
use revhash_core::synth::{self, expand_negative_controls, remove_superfluous_nots, reverse};
use revhash_core::{Bits, Circuit, Cube, EsopCover, Gate, Limits, Literal, PlaFunction, Semantics};

const DEFAULT_SEED: u64 = 0x5eed_2024;

pub const DEFAULT_CASES: u32 = 10_000;

pub fn seed() -> u64 {
    std::env::var("REVHASH_PROPTEST_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn config(suite: &str, cases: u32) -> Config {
    let seed = seed();
    println!("property {suite}: {cases} cases, seed {seed}");
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn gate(width: usize) -> impl Strategy<Value = Gate> {
    (0..width, prop::collection::vec(0u8..3, width)).prop_map(|(target, roles)| {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (line, r) in roles.into_iter().enumerate() {
            match r {
                1 if line != target => pos.push(line),
                2 if line != target => neg.push(line),
                _ => {}
            }
        }
        Gate::mixed(pos, neg, target)
    })
}

/// Any gate list over `inputs + outputs` lines.
fn circuit() -> impl Strategy<Value = Circuit> {
    (1usize..5, 1usize..5).prop_flat_map(|(n, m)| {
        prop::collection::vec(gate(n + m), 0..16)
            .prop_map(move |gates| Circuit::new(n, m, gates).expect("generated gates are valid"))
    })
}

fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        Just(Literal::Zero),
        Just(Literal::One),
        Just(Literal::DontCare)
    ]
}

fn cube(n: usize, m: usize) -> impl Strategy<Value = Cube> {
    (
        prop::collection::vec(literal(), n),
        prop::collection::vec(any::<bool>(), m),
    )
        .prop_map(|(i, o)| Cube::new(i, o))
}

fn cubes() -> impl Strategy<Value = (usize, usize, Vec<Cube>)> {
    (1usize..7, 1usize..4).prop_flat_map(|(n, m)| {
        prop::collection::vec(cube(n, m), 0..12).prop_map(move |c| (n, m, c))
    })
}

fn pla_function() -> impl Strategy<Value = PlaFunction> {
    cubes().prop_map(|(n, m, c)| PlaFunction::new(n, m, c).unwrap())
}

fn esop_cover() -> impl Strategy<Value = EsopCover> {
    cubes().prop_map(|(n, m, c)| EsopCover::new(n, m, c).unwrap())
}

fn xor_table(c: &EsopCover) -> Vec<u64> {
    c.to_pla()
        .truth_table(Semantics::ExclusiveOr, &Limits::default())
        .unwrap()
}

fn mask(width: usize) -> u64 {
    (1u64 << width) - 1
}

pub fn gate_involution(config: Config) {
    proptest!(config, |(
        (w, g, s) in (1usize..12).prop_flat_map(|w| (Just(w), gate(w), any::<u64>()))
    )| {
        let start = State(Bits::from_index(s & mask(w), w));
        let mut state = start.clone();
        state.apply(&g);
        state.apply(&g);
        prop_assert_eq!(state, start);
    });
}

pub fn reversal_undoes_forward(config: Config) {
    proptest!(config, |(c in circuit(), s in any::<u64>())| {
        let s = s & mask(c.width());
        let f = Compiled::new(&c).unwrap();
        let r = Compiled::new(&reverse(&c)).unwrap();
        prop_assert_eq!(r.run(f.run(s)), s);
        prop_assert_eq!(f.run_reversed(f.run(s)), s);
        prop_assert_eq!(reverse(&reverse(&c)), c);
    });
}

pub fn not_rewrites_preserve_semantics(config: Config) {
    proptest!(config, |(c in circuit())| {
        let expanded = expand_negative_controls(&c);
        let cleaned = remove_superfluous_nots(&expanded);
        prop_assert!(expanded.gates.iter().all(|g| g.negative_controls.is_empty()));
        prop_assert!(cleaned.gates.len() <= expanded.gates.len());
        let a = Compiled::new(&c).unwrap();
        let b = Compiled::new(&expanded).unwrap();
        let d = Compiled::new(&cleaned).unwrap();
        for s in 0..1u64 << c.width() {
            prop_assert_eq!(a.run(s), b.run(s));
            prop_assert_eq!(a.run(s), d.run(s));
        }
    });
}

pub fn minterm_expansion_is_sound(config: Config) {
    proptest!(config, |(f in pla_function())| {
        let limits = Limits::default();
        let e = expand_to_minterms(&f, &limits).unwrap();
        prop_assert!(e.cubes.iter().all(|c| c.dont_cares() == 0));
        prop_assert_eq!(
            e.truth_table(Semantics::InclusiveOr, &limits).unwrap(),
            f.truth_table(Semantics::InclusiveOr, &limits).unwrap()
        );
    });
}

pub fn esop_conversion_is_sound(config: Config) {
    proptest!(config, |(f in pla_function())| {
        let limits = Limits::default();
        let cover = esop::from_pla(&f, &limits).unwrap();
        prop_assert_eq!(xor_table(&cover), f.truth_table(Semantics::InclusiveOr, &limits).unwrap());
        for (i, a) in cover.cubes.iter().enumerate() {
            for b in &cover.cubes[i + 1..] {
                prop_assert!(!a.intersects(b), "{} overlaps {}", a, b);
            }
        }
    });
}

pub fn minimizer_preserves_function_and_never_grows(config: Config) {
    proptest!(config, |(c in esop_cover())| {
        let small = esop::minimize(&c, Effort::default());
        prop_assert_eq!(xor_table(&small), xor_table(&c));
        prop_assert!(small.cubes.len() <= c.cubes.len());
        prop_assert_eq!(esop::minimize(&small, Effort::default()), small);
    });
}

pub fn collision_groups_partition_inputs(config: Config) {
    proptest!(config, |(f in pla_function())| {
        let r = collision_scan(&f, &Limits::default()).unwrap();
        prop_assert_eq!(r.total_inputs(), 1usize << f.inputs);
        prop_assert_eq!(r.injective, r.distinct_outputs == 1usize << f.inputs);
    });
}

pub fn pla_text_round_trip(config: Config) {
    proptest!(config, |(f in pla_function())| {
        let back = parse_pla(&write_pla(&f)).unwrap();
        prop_assert!(back.warnings.is_empty());
        prop_assert_eq!(back.function, f);
    });
}

pub fn synthesis_matches_cover(config: Config) {
    proptest!(config, |(c in esop_cover())| {
        let circuit = synth::synthesize(&c);
        let k = Compiled::new(&circuit).unwrap();
        let table = xor_table(&c);
        for (x, &y) in table.iter().enumerate() {
            prop_assert_eq!(k.run((x as u64) << c.outputs), (x as u64) << c.outputs | y);
        }
    });
}

pub fn deduction_agrees_with_brute_force(config: Config) {
    proptest!(config, |(c in esop_cover(), y in any::<u64>())| {
        let circuit = synth::synthesize(&c);
        let flat = remove_superfluous_nots(&expand_negative_controls(&circuit));
        let target = Bits::from_index(y & mask(c.outputs), c.outputs);
        let brute = invert::preimages_bruteforce(FunctionRef::Esop(&c), &target, &Limits::default()).unwrap();
        prop_assert_eq!(&invert::preimages_deduce(&circuit, &target).unwrap().preimages, &brute.preimages);
        prop_assert_eq!(&invert::preimages_deduce(&flat, &target).unwrap().preimages, &brute.preimages);
        prop_assert_eq!(
            invert::preimage_one(&circuit, &target).unwrap(),
            brute.preimages.first().cloned()
        );
    });
}

pub fn pla_evaluation_agrees_with_table(config: Config) {
    proptest!(config, |(f in pla_function(), x in any::<u64>())| {
        let limits = Limits::default();
        let x = x & mask(f.inputs);
        let table = f.truth_table(Semantics::InclusiveOr, &limits).unwrap();
        let y = pla::evaluate_pla(&f, &Bits::from_index(x, f.inputs), Semantics::InclusiveOr).unwrap();
        prop_assert_eq!(y.to_index(), table[x as usize]);
    });
}

/// A property runner.
pub type Suite = fn(Config);

/// Every suite with its display name.
pub const SUITES: &[(&str, Suite)] = &[
    ("gate involution", gate_involution),
    ("reversal double application", reversal_undoes_forward),
    (
        "rewrite semantic preservation",
        not_rewrites_preserve_semantics,
    ),
    ("expansion soundness", minterm_expansion_is_sound),
    ("from_pla soundness", esop_conversion_is_sound),
    (
        "minimizer equivalence and cube monotonicity",
        minimizer_preserves_function_and_never_grows,
    ),
    ("collision group sizes", collision_groups_partition_inputs),
    ("pla round trip", pla_text_round_trip),
    ("synthesis equivalence", synthesis_matches_cover),
    (
        "deduction oracle agreement",
        deduction_agrees_with_brute_force,
    ),
    ("pla evaluation", pla_evaluation_agrees_with_table),
];
