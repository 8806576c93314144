//! Preimage recovery.
//!
//! [`preimages_bruteforce`] evaluates the function on every input and keeps
//! the matches. [`preimages_deduce`] works backwards from the target instead:
//! in a synthesized circuit each output line ends at its initial value XOR
//! the control predicates of the gates targeting it, and each predicate is a
//! conjunction of input literals. Fixing the final value of every output line
//! gives one parity constraint per line, which is solved by unit propagation
//! over a [`PartialAssignment`] with backtracking when propagation stalls.
//!
//! Propagation rules for a line with required parity `p` after removing
//! decided predicates:
//! - no undecided predicate left: `p` must be 0, otherwise the branch fails;
//! - one undecided predicate and `p = 1`: every literal of it is forced true;
//! - one undecided predicate with a single open literal and `p = 0`: that
//!   literal is forced false.
//!
//! When nothing propagates the lowest-index unknown input is branched on,
//! trying 0 before 1.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::esop::EsopCover;
use crate::pla::{PackedCube, PlaFunction};
use crate::sim::Compiled;
use crate::synth::Circuit;
use crate::Limits;

/// Tri-state assignment of the input variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    len: usize,
    known: u64,
    value: u64,
}

impl PartialAssignment {
    pub fn unknown(len: usize) -> Self {
        assert!(len <= 64);
        PartialAssignment {
            len,
            known: 0,
            value: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn bit(&self, var: usize) -> u64 {
        1u64 << (self.len - 1 - var)
    }

    pub fn get(&self, var: usize) -> Option<bool> {
        let b = self.bit(var);
        (self.known & b != 0).then_some(self.value & b != 0)
    }

    /// Fix an unknown variable. Fixed variables cannot be reassigned.
    pub fn assign(&mut self, var: usize, v: bool) {
        let b = self.bit(var);
        debug_assert!(self.known & b == 0, "variable {var} reassigned");
        self.known |= b;
        if v {
            self.value |= b;
        }
    }

    pub fn first_unknown(&self) -> Option<usize> {
        (0..self.len).find(|&v| self.get(v).is_none())
    }

    pub fn is_complete(&self) -> bool {
        self.first_unknown().is_none()
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in 0..self.len {
            f.write_str(match self.get(v) {
                Some(true) => "1",
                Some(false) => "0",
                None => "?",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialAssignment({self})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BruteForce,
    Deduction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchStats {
    /// Decisions taken when propagation stalled.
    pub branches: u64,
    /// Variables fixed by propagation.
    pub propagations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageResult {
    pub target: Bits,
    pub preimages: Vec<Bits>,
    pub method: Method,
    pub branches: u64,
    pub propagations: u64,
    /// Seconds spent in the search.
    pub elapsed: f64,
}

impl PreimageResult {
    pub fn stats(&self) -> SearchStats {
        SearchStats {
            branches: self.branches,
            propagations: self.propagations,
        }
    }
}

/// Anything that can be evaluated forward on a bit vector.
#[derive(Debug, Clone, Copy)]
pub enum FunctionRef<'a> {
    Pla(&'a PlaFunction),
    Esop(&'a EsopCover),
    Circuit(&'a Circuit),
}

impl FunctionRef<'_> {
    pub fn arity(&self) -> (usize, usize) {
        match self {
            FunctionRef::Pla(f) => (f.inputs, f.outputs),
            FunctionRef::Esop(c) => (c.inputs, c.outputs),
            FunctionRef::Circuit(c) => (c.inputs, c.outputs),
        }
    }
}

fn check_target(expected: usize, y: &Bits) -> Result<()> {
    if y.len() != expected {
        return Err(Error::Arity {
            expected,
            found: y.len(),
        });
    }
    if expected > 64 {
        return Err(Error::Resource(format!(
            "{expected} outputs exceed 64 bits"
        )));
    }
    Ok(())
}

/// Every `x` with `f(x) = y`, by forward evaluation of all inputs.
pub fn preimages_bruteforce(
    f: FunctionRef<'_>,
    y: &Bits,
    limits: &Limits,
) -> Result<PreimageResult> {
    let start = Instant::now();
    let (n, m) = f.arity();
    check_target(m, y)?;
    limits.check_inputs(n)?;
    let want = y.to_index();

    let hits: Vec<u64> = match f {
        FunctionRef::Pla(p) => {
            let cubes: Vec<PackedCube> = p.cubes.iter().map(PackedCube::from_cube).collect();
            scan(n, |x| or_eval(&cubes, x) == want)
        }
        FunctionRef::Esop(c) => {
            let cubes: Vec<PackedCube> = c.cubes.iter().map(PackedCube::from_cube).collect();
            scan(n, |x| xor_eval(&cubes, x) == want)
        }
        FunctionRef::Circuit(c) => {
            let k = Compiled::new(c)?;
            let mask = low_mask(m);
            scan(n, |x| k.run(x << m) & mask == want)
        }
    };

    Ok(PreimageResult {
        target: y.clone(),
        preimages: hits.into_iter().map(|x| Bits::from_index(x, n)).collect(),
        method: Method::BruteForce,
        branches: 0,
        propagations: 0,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

fn scan(n: usize, pred: impl Fn(u64) -> bool + Sync) -> Vec<u64> {
    (0..1u64 << n)
        .into_par_iter()
        .filter(|&x| pred(x))
        .collect()
}

fn or_eval(cubes: &[PackedCube], x: u64) -> u64 {
    cubes
        .iter()
        .filter(|c| c.matches(x))
        .fold(0, |a, c| a | c.out)
}

fn xor_eval(cubes: &[PackedCube], x: u64) -> u64 {
    cubes
        .iter()
        .filter(|c| c.matches(x))
        .fold(0, |a, c| a ^ c.out)
}

fn low_mask(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// Options for [`preimages_deduce`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeduceOptions {
    /// Known starting values of the output lines; zero when absent.
    pub initial_outputs: Option<Bits>,
    /// Stop after the first preimage.
    pub first_only: bool,
}

/// Conjunction `x & care == value` over the inputs (packed like indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Predicate {
    care: u64,
    value: u64,
}

/// The XOR-of-predicates view of a synthesized circuit.
#[derive(Debug, Clone)]
struct ParitySystem {
    inputs: usize,
    /// Per output line: the predicates XORed onto it.
    lines: Vec<Vec<Predicate>>,
}

impl ParitySystem {
    /// Recover per-line predicates. NOT gates on input lines (the expanded
    /// form of negative controls) are folded into literal polarities.
    fn from_circuit(c: &Circuit) -> Result<ParitySystem> {
        let n = c.inputs;
        if n > 64 {
            return Err(Error::Resource(format!("{n} inputs exceed 64 variables")));
        }
        let bit = |line: usize| 1u64 << (n - 1 - line);
        let mut flipped = 0u64;
        let mut lines = vec![Vec::new(); c.outputs];
        for g in &c.gates {
            if g.target < n {
                if !g.is_not() {
                    return Err(Error::Unsupported(format!(
                        "gate {g} writes to input line {}",
                        g.target
                    )));
                }
                flipped ^= bit(g.target);
                continue;
            }
            let mut care = 0u64;
            let mut value = 0u64;
            for (&l, positive) in g
                .controls
                .iter()
                .map(|l| (l, true))
                .chain(g.negative_controls.iter().map(|l| (l, false)))
            {
                if l >= n {
                    return Err(Error::Unsupported(format!(
                        "gate {g} is controlled by output line {l}"
                    )));
                }
                care |= bit(l);
                // the line currently holds x_l ^ flipped_l
                if positive ^ (flipped & bit(l) != 0) {
                    value |= bit(l);
                }
            }
            lines[g.target - n].push(Predicate { care, value });
        }
        Ok(ParitySystem { inputs: n, lines })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    False,
    True,
    Open,
}

fn status(p: &Predicate, a: &PartialAssignment) -> Status {
    if p.care & a.known & (p.value ^ a.value) != 0 {
        Status::False
    } else if p.care & !a.known == 0 {
        Status::True
    } else {
        Status::Open
    }
}

struct Solver<'a> {
    system: &'a ParitySystem,
    rhs: Vec<bool>,
    stats: SearchStats,
    solutions: Vec<u64>,
    first_only: bool,
}

enum Propagation {
    Conflict,
    /// Every predicate is decided and every line satisfied.
    Settled,
    Stuck,
}

impl Solver<'_> {
    fn propagate(&mut self, a: &mut PartialAssignment) -> Propagation {
        let n = self.system.inputs;
        loop {
            let mut changed = false;
            let mut all_decided = true;
            for (line, preds) in self.system.lines.iter().enumerate() {
                let mut parity = self.rhs[line];
                let mut open: Option<&Predicate> = None;
                let mut open_count = 0;
                for p in preds {
                    match status(p, a) {
                        Status::False => {}
                        Status::True => parity ^= true,
                        Status::Open => {
                            open_count += 1;
                            open = Some(p);
                        }
                    }
                }
                match (open_count, open) {
                    (0, _) => {
                        if parity {
                            return Propagation::Conflict;
                        }
                    }
                    (1, Some(p)) => {
                        all_decided = false;
                        let free = p.care & !a.known;
                        if parity {
                            for v in 0..n {
                                if free & a.bit(v) != 0 {
                                    a.assign(v, p.value & a.bit(v) != 0);
                                    self.stats.propagations += 1;
                                }
                            }
                            changed = true;
                        } else if free.count_ones() == 1 {
                            let v = n - 1 - free.trailing_zeros() as usize;
                            a.assign(v, p.value & free == 0);
                            self.stats.propagations += 1;
                            changed = true;
                        }
                    }
                    _ => all_decided = false,
                }
            }
            if !changed {
                return if all_decided {
                    Propagation::Settled
                } else {
                    Propagation::Stuck
                };
            }
        }
    }

    /// Returns true once the search should stop.
    fn search(&mut self, mut a: PartialAssignment) -> bool {
        match self.propagate(&mut a) {
            Propagation::Conflict => false,
            Propagation::Settled => {
                // remaining unknowns are unconstrained; enumerate them in order
                let free: Vec<usize> = (0..a.len()).filter(|&v| a.get(v).is_none()).collect();
                for combo in 0..1u64 << free.len() {
                    let mut x = a.value & a.known;
                    for (k, &v) in free.iter().enumerate() {
                        if combo >> (free.len() - 1 - k) & 1 == 1 {
                            x |= a.bit(v);
                        }
                    }
                    self.solutions.push(x);
                    if self.first_only {
                        return true;
                    }
                }
                false
            }
            Propagation::Stuck => {
                let v = a.first_unknown().expect("stuck with every variable known");
                self.stats.branches += 1;
                for value in [false, true] {
                    let mut next = a.clone();
                    next.assign(v, value);
                    if self.search(next) {
                        return true;
                    }
                }
                false
            }
        }
    }
}

/// Every `x` whose forward run of `c` ends with `y` on the output lines.
pub fn preimages_deduce(c: &Circuit, y: &Bits) -> Result<PreimageResult> {
    preimages_deduce_with(c, y, &DeduceOptions::default())
}

pub fn preimages_deduce_with(
    c: &Circuit,
    y: &Bits,
    opts: &DeduceOptions,
) -> Result<PreimageResult> {
    let start = Instant::now();
    check_target(c.outputs, y)?;
    let init = match &opts.initial_outputs {
        Some(init) => {
            check_target(c.outputs, init)?;
            init.clone()
        }
        None => Bits::zeros(c.outputs),
    };
    let system = ParitySystem::from_circuit(c)?;
    let mut solver = Solver {
        system: &system,
        rhs: y.iter().zip(init.iter()).map(|(a, b)| a ^ b).collect(),
        stats: SearchStats::default(),
        solutions: Vec::new(),
        first_only: opts.first_only,
    };
    solver.search(PartialAssignment::unknown(c.inputs));

    let mut found = solver.solutions;
    found.sort_unstable();
    found.dedup();

    // every answer is replayed forward before it is reported
    let k = Compiled::new(c)?;
    let m = c.outputs;
    let start_state = init.to_index();
    let want = y.to_index();
    if let Some(bad) = found
        .iter()
        .find(|&&x| k.run(x << m | start_state) & low_mask(m) != want)
    {
        return Err(Error::Internal(format!(
            "deduced input {} does not reproduce {y}",
            Bits::from_index(*bad, c.inputs)
        )));
    }

    Ok(PreimageResult {
        target: y.clone(),
        preimages: found
            .into_iter()
            .map(|x| Bits::from_index(x, c.inputs))
            .collect(),
        method: Method::Deduction,
        branches: solver.stats.branches,
        propagations: solver.stats.propagations,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// The first preimage under the 0-before-1 branching order.
pub fn preimage_one(c: &Circuit, y: &Bits) -> Result<Option<Bits>> {
    let opts = DeduceOptions {
        first_only: true,
        ..DeduceOptions::default()
    };
    Ok(preimages_deduce_with(c, y, &opts)?
        .preimages
        .into_iter()
        .next())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{expand_negative_controls, remove_superfluous_nots, Gate};

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    fn and_circuit() -> Circuit {
        Circuit::new(2, 1, vec![Gate::toffoli(vec![0, 1], 2)]).unwrap()
    }

    fn strings(r: &PreimageResult) -> Vec<String> {
        r.preimages.iter().map(|b| b.to_string()).collect()
    }

    #[test]
    fn and_deduction_needs_no_branching() {
        let r = preimages_deduce(&and_circuit(), &bits("1")).unwrap();
        assert_eq!(strings(&r), vec!["11"]);
        assert_eq!(r.branches, 0);
        assert_eq!(r.propagations, 2);
    }

    #[test]
    fn and_zero_has_three_preimages() {
        let r = preimages_deduce(&and_circuit(), &bits("0")).unwrap();
        assert_eq!(strings(&r), vec!["00", "01", "10"]);
        assert_eq!(
            preimage_one(&and_circuit(), &bits("0")).unwrap(),
            Some(bits("00"))
        );
    }

    #[test]
    fn unsatisfiable_target() {
        let zero = Circuit::new(1, 1, vec![]).unwrap();
        assert!(preimages_deduce(&zero, &bits("1"))
            .unwrap()
            .preimages
            .is_empty());
        assert_eq!(preimage_one(&zero, &bits("1")).unwrap(), None);
        assert_eq!(
            strings(&preimages_deduce(&zero, &bits("0")).unwrap()),
            vec!["0", "1"]
        );
    }

    #[test]
    fn expanded_nots_are_folded() {
        let c = Circuit::new(
            2,
            2,
            vec![
                Gate::mixed(vec![1], vec![0], 2),
                Gate::mixed(vec![], vec![0], 3),
                Gate::toffoli(vec![0, 1], 3),
            ],
        )
        .unwrap();
        let flat = remove_superfluous_nots(&expand_negative_controls(&c));
        for y in 0..4 {
            let y = Bits::from_index(y, 2);
            let a = preimages_deduce(&c, &y).unwrap();
            let b = preimages_deduce(&flat, &y).unwrap();
            let brute =
                preimages_bruteforce(FunctionRef::Circuit(&c), &y, &Limits::default()).unwrap();
            assert_eq!(a.preimages, brute.preimages);
            assert_eq!(b.preimages, brute.preimages);
        }
    }

    #[test]
    fn nonzero_initial_outputs() {
        let opts = DeduceOptions {
            initial_outputs: Some(bits("1")),
            first_only: false,
        };
        // starting from 1, AND leaves 0 only for input 11
        let r = preimages_deduce_with(&and_circuit(), &bits("0"), &opts).unwrap();
        assert_eq!(strings(&r), vec!["11"]);
    }

    #[test]
    fn rejects_non_synth_circuits() {
        let writes_input = Circuit::new(2, 1, vec![Gate::cnot(1, 0)]).unwrap();
        assert!(matches!(
            preimages_deduce(&writes_input, &bits("0")),
            Err(Error::Unsupported(_))
        ));
        let output_control = Circuit::new(1, 2, vec![Gate::cnot(1, 2)]).unwrap();
        assert!(matches!(
            preimages_deduce(&output_control, &bits("00")),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            preimages_deduce(&and_circuit(), &bits("01")),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn brute_force_over_each_representation() {
        let f = PlaFunction::new(2, 1, vec![crate::Cube::parse("11", "1")]).unwrap();
        let cover = EsopCover::new(2, 1, f.cubes.clone()).unwrap();
        let limits = Limits::default();
        for y in ["0", "1"] {
            let y = bits(y);
            let a = preimages_bruteforce(FunctionRef::Pla(&f), &y, &limits).unwrap();
            let b = preimages_bruteforce(FunctionRef::Esop(&cover), &y, &limits).unwrap();
            let c =
                preimages_bruteforce(FunctionRef::Circuit(&and_circuit()), &y, &limits).unwrap();
            assert_eq!(a.preimages, b.preimages);
            assert_eq!(a.preimages, c.preimages);
        }
        let r = preimages_bruteforce(FunctionRef::Pla(&f), &bits("0"), &limits).unwrap();
        assert_eq!(strings(&r), vec!["00", "01", "10"]);
        assert_eq!(r.method, Method::BruteForce);
    }

    #[test]
    fn partial_assignment_display() {
        let mut a = PartialAssignment::unknown(4);
        a.assign(1, true);
        a.assign(3, false);
        assert_eq!(a.to_string(), "?1?0");
        assert_eq!(a.first_unknown(), Some(0));
        assert!(!a.is_complete());
    }

    #[test]
    fn result_json_fields() {
        let r = preimages_deduce(&and_circuit(), &bits("1")).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["target"], "1");
        assert_eq!(v["preimages"][0], "11");
        assert_eq!(v["method"], "deduction");
        assert!(v["elapsed"].is_number());
        assert_eq!(v["branches"], 0);
    }
}
