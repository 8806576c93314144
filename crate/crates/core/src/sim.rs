//! Basis-state simulation and verification of reversible circuits.
//!
//! [`State`] and [`apply_gate`] define the semantics. Exhaustive sweeps run on
//! a compiled form that packs a state of up to 64 lines into one word, with
//! line `i` stored at bit `width - 1 - i` so that the packed value of
//! `(x, y)` is `x << m | y` for the integer indices of `x` and `y`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::pla::{PlaFunction, Semantics};
use crate::synth::{Circuit, Gate};
use crate::Limits;

/// Values of every line of a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State(pub Bits);

impl State {
    pub fn zeros(width: usize) -> State {
        State(Bits::zeros(width))
    }

    /// Inputs followed by zeroed output lines.
    pub fn with_inputs(x: &Bits, outputs: usize) -> State {
        State(x.concat(&Bits::zeros(outputs)))
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&mut self, g: &Gate) {
        let fire = g.controls.iter().all(|&c| self.0.get(c))
            && g.negative_controls.iter().all(|&c| !self.0.get(c));
        if fire {
            let t = g.target;
            self.0.set(t, !self.0.get(t));
        }
    }

    /// Bits of the lines in `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Bits {
        Bits::from_bools(self.0.as_slice()[range].to_vec())
    }
}

pub fn apply_gate(s: &State, g: &Gate) -> State {
    let mut next = s.clone();
    next.apply(g);
    next
}

pub fn run(c: &Circuit, s: &State) -> Result<State> {
    if s.width() != c.width() {
        return Err(Error::Arity {
            expected: c.width(),
            found: s.width(),
        });
    }
    let mut s = s.clone();
    for g in &c.gates {
        s.apply(g);
    }
    Ok(s)
}

/// Output lines after running `c` on `x` with outputs starting at zero.
pub fn evaluate(c: &Circuit, x: &Bits) -> Result<Bits> {
    if x.len() != c.inputs {
        return Err(Error::Arity {
            expected: c.inputs,
            found: x.len(),
        });
    }
    let s = run(c, &State::with_inputs(x, c.outputs))?;
    Ok(s.slice(c.output_lines()))
}

/// A circuit of at most 64 lines lowered to word masks.
#[derive(Debug, Clone)]
pub struct Compiled {
    width: usize,
    gates: Vec<(u64, u64, u64)>,
}

impl Compiled {
    pub fn new(c: &Circuit) -> Result<Compiled> {
        let width = c.width();
        if width > 64 {
            return Err(Error::Resource(format!(
                "width {width} exceeds the 64-line packed simulator"
            )));
        }
        let bit = |line: usize| 1u64 << (width - 1 - line);
        let gates = c
            .gates
            .iter()
            .map(|g| {
                let pos = g.controls.iter().fold(0, |m, &l| m | bit(l));
                let neg = g.negative_controls.iter().fold(0, |m, &l| m | bit(l));
                (pos | neg, pos, bit(g.target))
            })
            .collect();
        Ok(Compiled { width, gates })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn run(&self, mut s: u64) -> u64 {
        for &(mask, want, target) in &self.gates {
            if s & mask == want {
                s ^= target;
            }
        }
        s
    }

    #[inline]
    pub fn run_reversed(&self, mut s: u64) -> u64 {
        for &(mask, want, target) in self.gates.iter().rev() {
            if s & mask == want {
                s ^= target;
            }
        }
        s
    }
}

/// Outputs for every input, indexed by the input's integer value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub inputs: usize,
    pub outputs: usize,
    pub rows: Vec<u64>,
}

impl TruthTable {
    pub fn get(&self, x: &Bits) -> Bits {
        Bits::from_index(self.rows[x.to_index() as usize], self.outputs)
    }
}

pub fn truth_table(c: &Circuit, limits: &Limits) -> Result<TruthTable> {
    limits.check_inputs(c.inputs)?;
    let compiled = Compiled::new(c)?;
    let m = c.outputs;
    let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let rows = (0..1u64 << c.inputs)
        .into_par_iter()
        .map(|x| compiled.run(x << m) & mask)
        .collect();
    Ok(TruthTable {
        inputs: c.inputs,
        outputs: m,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

/// Outcome of a forward-then-reversed identity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: String,
    pub states_checked: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Bits>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Check that running `forward` and then `reversed` returns every state to
/// itself.
pub fn verify_identity(
    forward: &Circuit,
    reversed: &Circuit,
    mode: VerifyMode,
    limits: &Limits,
) -> Result<VerifyReport> {
    if forward.width() != reversed.width() {
        return Err(Error::Arity {
            expected: forward.width(),
            found: reversed.width(),
        });
    }
    let width = forward.width();
    match mode {
        VerifyMode::Exhaustive => {
            limits.check_width(width)?;
            let f = Compiled::new(forward)?;
            let r = Compiled::new(reversed)?;
            let total = 1u64 << width;
            let bad = (0..total)
                .into_par_iter()
                .find_first(|&s| r.run(f.run(s)) != s);
            Ok(VerifyReport {
                mode: "exhaustive".into(),
                states_checked: bad.map_or(total, |s| s + 1),
                pass: bad.is_none(),
                counterexample: bad.map(|s| Bits::from_index(s, width)),
                seed: None,
            })
        }
        VerifyMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut checked = 0;
            let mut counterexample = None;
            let packed = Compiled::new(forward)
                .ok()
                .zip(Compiled::new(reversed).ok());
            for _ in 0..count {
                checked += 1;
                let failed = match &packed {
                    Some((f, r)) => {
                        let s = if width == 64 {
                            rng.gen::<u64>()
                        } else {
                            rng.gen::<u64>() & ((1u64 << width) - 1)
                        };
                        (r.run(f.run(s)) != s).then(|| Bits::from_index(s, width))
                    }
                    None => {
                        let s = State(Bits::from_bools((0..width).map(|_| rng.gen()).collect()));
                        let back = run(reversed, &run(forward, &s)?)?;
                        (back != s).then_some(s.0)
                    }
                };
                if failed.is_some() {
                    counterexample = failed;
                    break;
                }
            }
            Ok(VerifyReport {
                mode: "sampled".into(),
                states_checked: checked,
                pass: counterexample.is_none(),
                counterexample,
                seed: Some(seed),
            })
        }
    }
}

/// One input where a circuit disagrees with its specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub input: Bits,
    pub expected: Bits,
    pub actual: Bits,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecReport {
    pub states_checked: u64,
    pub pass: bool,
    pub mismatch_count: u64,
    /// The first few mismatches in input order.
    pub mismatches: Vec<Mismatch>,
}

const LISTED_MISMATCHES: usize = 16;

/// Compare the circuit's truth table against the OR reading of `f` on every
/// input.
pub fn verify_against_spec(c: &Circuit, f: &PlaFunction, limits: &Limits) -> Result<SpecReport> {
    if c.inputs != f.inputs || c.outputs != f.outputs {
        return Err(Error::Structure(format!(
            "circuit is {}x{}, function is {}x{}",
            c.inputs, c.outputs, f.inputs, f.outputs
        )));
    }
    let actual = truth_table(c, limits)?;
    let expected = f.truth_table(Semantics::InclusiveOr, limits)?;
    let bad: Vec<usize> = (0..expected.len())
        .filter(|&x| expected[x] != actual.rows[x])
        .collect();
    let mismatches = bad
        .iter()
        .take(LISTED_MISMATCHES)
        .map(|&x| Mismatch {
            input: Bits::from_index(x as u64, c.inputs),
            expected: Bits::from_index(expected[x], c.outputs),
            actual: Bits::from_index(actual.rows[x], c.outputs),
        })
        .collect();
    Ok(SpecReport {
        states_checked: expected.len() as u64,
        pass: bad.is_empty(),
        mismatch_count: bad.len() as u64,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::reverse;

    fn state(s: &str) -> State {
        State(s.parse().unwrap())
    }

    fn and_circuit() -> Circuit {
        Circuit::new(2, 1, vec![Gate::toffoli(vec![0, 1], 2)]).unwrap()
    }

    #[test]
    fn gate_semantics() {
        let tof = Gate::toffoli(vec![0, 1], 2);
        assert_eq!(apply_gate(&state("111"), &tof), state("110"));
        assert_eq!(apply_gate(&state("101"), &tof), state("101"));
        assert_eq!(apply_gate(&state("10"), &Gate::cnot(0, 1)), state("11"));
        assert_eq!(apply_gate(&state("0"), &Gate::not(0)), state("1"));
        let neg = Gate::mixed(vec![1], vec![0], 2);
        assert_eq!(apply_gate(&state("010"), &neg), state("011"));
        assert_eq!(apply_gate(&state("110"), &neg), state("110"));
    }

    #[test]
    fn run_examples() {
        let empty = Circuit::new(2, 2, vec![]).unwrap();
        assert_eq!(run(&empty, &state("1011")).unwrap(), state("1011"));
        assert!(run(&empty, &state("101")).is_err());
    }

    #[test]
    fn compiled_matches_state_semantics() {
        let c = Circuit::new(
            3,
            2,
            vec![
                Gate::mixed(vec![0], vec![2], 3),
                Gate::not(4),
                Gate::mixed(vec![], vec![0, 1], 4),
                Gate::toffoli(vec![0, 1, 2], 3),
            ],
        )
        .unwrap();
        let k = Compiled::new(&c).unwrap();
        for s in 0..32u64 {
            let expect = run(&c, &State(Bits::from_index(s, 5))).unwrap();
            assert_eq!(Bits::from_index(k.run(s), 5), expect.0);
        }
    }

    #[test]
    fn and_truth_table() {
        let t = truth_table(&and_circuit(), &Limits::default()).unwrap();
        assert_eq!(t.rows, vec![0, 0, 0, 1]);
        assert_eq!(t.get(&"11".parse().unwrap()).to_string(), "1");
        let idle = truth_table(&Circuit::new(2, 3, vec![]).unwrap(), &Limits::default()).unwrap();
        assert!(idle.rows.iter().all(|&r| r == 0));
    }

    #[test]
    fn truth_table_limit() {
        let limits = Limits {
            max_inputs: 1,
            ..Limits::default()
        };
        assert!(truth_table(&and_circuit(), &limits)
            .unwrap_err()
            .is_resource());
    }

    #[test]
    fn identity_checks() {
        let c = and_circuit();
        let report =
            verify_identity(&c, &reverse(&c), VerifyMode::Exhaustive, &Limits::default()).unwrap();
        assert!(report.pass);
        assert_eq!(report.states_checked, 8);

        // dropping a gate from the reversed side leaves states that it used to toggle
        let c2 = Circuit::new(2, 1, vec![Gate::toffoli(vec![0, 1], 2), Gate::cnot(0, 2)]).unwrap();
        let broken = reverse(&c2.without_gate(1).unwrap());
        let report =
            verify_identity(&c2, &broken, VerifyMode::Exhaustive, &Limits::default()).unwrap();
        assert!(!report.pass);
        assert_eq!(report.counterexample.unwrap().to_string(), "100");

        let sampled = verify_identity(
            &c2,
            &broken,
            VerifyMode::Sampled {
                count: 200,
                seed: 7,
            },
            &Limits::default(),
        )
        .unwrap();
        assert!(!sampled.pass);
        assert_eq!(sampled.seed, Some(7));
    }

    #[test]
    fn identity_width_limit() {
        let c = Circuit::new(12, 12, vec![]).unwrap();
        let err = verify_identity(&c, &c, VerifyMode::Exhaustive, &Limits::default()).unwrap_err();
        assert!(err.is_resource());
        let ok = verify_identity(
            &c,
            &c,
            VerifyMode::Sampled { count: 50, seed: 1 },
            &Limits::default(),
        )
        .unwrap();
        assert!(ok.pass);
        assert_eq!(ok.states_checked, 50);
    }

    #[test]
    fn report_json_shape() {
        let c = and_circuit();
        let r =
            verify_identity(&c, &reverse(&c), VerifyMode::Exhaustive, &Limits::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["mode"], "exhaustive");
        assert_eq!(v["pass"], true);
        assert!(v.get("counterexample").is_none());
    }
}
