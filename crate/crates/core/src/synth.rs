//! Reversible circuits over NOT, CNOT and (generalized) Toffoli gates.
//!
//! Lines `0..n` carry the inputs and lines `n..n+m` the outputs, which start
//! at zero. [`synthesize`] emits one gate per one-bit of every cube's output
//! row: positive literals become controls, negative literals become negative
//! controls, and the target is the output line.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esop::EsopCover;
use crate::pla::Literal;

/// Flips `target` when every positive control is 1 and every negative
/// control is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub target: usize,
    #[serde(default)]
    pub controls: Vec<usize>,
    #[serde(default)]
    pub negative_controls: Vec<usize>,
}

impl Gate {
    pub fn not(target: usize) -> Gate {
        Gate {
            target,
            controls: Vec::new(),
            negative_controls: Vec::new(),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::toffoli(vec![control], target)
    }

    pub fn toffoli(mut controls: Vec<usize>, target: usize) -> Gate {
        controls.sort_unstable();
        Gate {
            target,
            controls,
            negative_controls: Vec::new(),
        }
    }

    pub fn mixed(mut controls: Vec<usize>, mut negative: Vec<usize>, target: usize) -> Gate {
        controls.sort_unstable();
        negative.sort_unstable();
        Gate {
            target,
            controls,
            negative_controls: negative,
        }
    }

    pub fn control_count(&self) -> usize {
        self.controls.len() + self.negative_controls.len()
    }

    pub fn is_not(&self) -> bool {
        self.control_count() == 0
    }

    pub fn touches(&self, line: usize) -> bool {
        self.target == line
            || self.controls.contains(&line)
            || self.negative_controls.contains(&line)
    }

    pub fn lines(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.target)
            .chain(self.controls.iter().copied())
            .chain(self.negative_controls.iter().copied())
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        if let Some(line) = self.lines().find(|&l| l >= width) {
            return Err(Error::Structure(format!(
                "gate {self} uses line {line} outside width {width}"
            )));
        }
        let mut seen: Vec<usize> = self.lines().collect();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Structure(format!("gate {self} repeats a line")));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.control_count() {
            0 => "NOT",
            1 => "CNOT",
            _ => "TOF",
        };
        write!(f, "{name}(")?;
        for c in &self.controls {
            write!(f, "{c},")?;
        }
        for c in &self.negative_controls {
            write!(f, "!{c},")?;
        }
        write!(f, "->{})", self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub inputs: usize,
    pub outputs: usize,
    pub gates: Vec<Gate>,
    #[serde(default)]
    pub name: Option<String>,
}

impl Circuit {
    pub fn new(inputs: usize, outputs: usize, gates: Vec<Gate>) -> Result<Circuit> {
        let c = Circuit {
            inputs,
            outputs,
            gates,
            name: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.inputs + self.outputs
    }

    pub fn input_lines(&self) -> std::ops::Range<usize> {
        0..self.inputs
    }

    pub fn output_lines(&self) -> std::ops::Range<usize> {
        self.inputs..self.width()
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.width()))
    }

    /// True when no gate targets an input line and every control sits on an
    /// input line: the shape produced by [`synthesize`].
    pub fn is_synth_form(&self) -> bool {
        self.gates.iter().all(|g| {
            g.target >= self.inputs
                && g.controls
                    .iter()
                    .chain(&g.negative_controls)
                    .all(|&c| c < self.inputs)
        })
    }

    /// Copy of the circuit without gate `index`.
    pub fn without_gate(&self, index: usize) -> Result<Circuit> {
        if index >= self.gates.len() {
            return Err(Error::Structure(format!(
                "gate index {index} out of range for {} gates",
                self.gates.len()
            )));
        }
        let mut c = self.clone();
        c.gates.remove(index);
        Ok(c)
    }
}

/// Map every (cube, one-bit output) pair onto a gate, in cube order and then
/// ascending output order.
pub fn synthesize(c: &EsopCover) -> Circuit {
    let n = c.inputs;
    let mut gates = Vec::new();
    for cube in &c.cubes {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (line, lit) in cube.inputs.iter().enumerate() {
            match lit {
                Literal::One => pos.push(line),
                Literal::Zero => neg.push(line),
                Literal::DontCare => {}
            }
        }
        for (j, _) in cube.outputs.iter().enumerate().filter(|(_, &b)| b) {
            gates.push(Gate {
                target: n + j,
                controls: pos.clone(),
                negative_controls: neg.clone(),
            });
        }
    }
    Circuit {
        inputs: n,
        outputs: c.outputs,
        gates,
        name: None,
    }
}

/// Rewrite negative controls as NOT gates on both sides of the gate.
pub fn expand_negative_controls(c: &Circuit) -> Circuit {
    let mut gates = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        if g.negative_controls.is_empty() {
            gates.push(g.clone());
            continue;
        }
        gates.extend(g.negative_controls.iter().map(|&l| Gate::not(l)));
        let mut controls: Vec<usize> = g
            .controls
            .iter()
            .chain(&g.negative_controls)
            .copied()
            .collect();
        controls.sort_unstable();
        gates.push(Gate {
            target: g.target,
            controls,
            negative_controls: Vec::new(),
        });
        gates.extend(g.negative_controls.iter().map(|&l| Gate::not(l)));
    }
    Circuit { gates, ..c.clone() }
}

/// Cancel pairs of NOT gates on the same line that have no gate touching
/// that line between them.
pub fn remove_superfluous_nots(c: &Circuit) -> Circuit {
    let mut keep = vec![true; c.gates.len()];
    let mut pending: Vec<Option<usize>> = vec![None; c.width()];
    for (k, g) in c.gates.iter().enumerate() {
        if g.is_not() {
            match pending[g.target].take() {
                Some(p) => {
                    keep[p] = false;
                    keep[k] = false;
                }
                None => pending[g.target] = Some(k),
            }
        } else {
            for line in g.lines() {
                pending[line] = None;
            }
        }
    }
    let gates = c
        .gates
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(g, _)| g.clone())
        .collect();
    Circuit { gates, ..c.clone() }
}

/// The same gates in the opposite order.
pub fn reverse(c: &Circuit) -> Circuit {
    let mut r = c.clone();
    r.gates.reverse();
    r
}

/// Gate counts of a circuit in positive-control form.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateStats {
    pub total: usize,
    pub not: usize,
    pub cnot: usize,
    pub toffoli: usize,
    /// Gates with three or more controls.
    pub generalized: usize,
    /// Gate count keyed by number of controls.
    pub by_controls: BTreeMap<usize, usize>,
}

/// Count gates after negative controls are expanded and redundant NOT pairs
/// are removed.
pub fn stats(c: &Circuit) -> GateStats {
    let expanded = remove_superfluous_nots(&expand_negative_controls(c));
    let mut s = GateStats {
        total: expanded.gates.len(),
        ..GateStats::default()
    };
    for g in &expanded.gates {
        let k = g.control_count();
        *s.by_controls.entry(k).or_insert(0) += 1;
        match k {
            0 => s.not += 1,
            1 => s.cnot += 1,
            2 => s.toffoli += 1,
            _ => s.generalized += 1,
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pla::Cube;

    fn cover(n: usize, m: usize, rows: &[(&str, &str)]) -> EsopCover {
        EsopCover::new(n, m, rows.iter().map(|(i, o)| Cube::parse(i, o)).collect()).unwrap()
    }

    #[test]
    fn and_is_one_toffoli() {
        let c = synthesize(&cover(2, 1, &[("11", "1")]));
        assert_eq!(c.gates, vec![Gate::toffoli(vec![0, 1], 2)]);
        assert_eq!(stats(&c).total, 1);
        assert_eq!(stats(&c).toffoli, 1);
    }

    #[test]
    fn dash_and_zero_literals() {
        let c = synthesize(&cover(2, 1, &[("0-", "1")]));
        assert_eq!(c.gates, vec![Gate::mixed(vec![], vec![0], 2)]);
        assert_eq!(c.gates[0].control_count(), 1);

        let not = synthesize(&cover(2, 2, &[("--", "01")]));
        assert_eq!(not.gates, vec![Gate::not(3)]);
    }

    #[test]
    fn gate_order_follows_cubes_then_outputs() {
        let c = synthesize(&cover(2, 3, &[("1-", "101"), ("01", "010")]));
        let targets: Vec<usize> = c.gates.iter().map(|g| g.target).collect();
        assert_eq!(targets, vec![2, 4, 3]);
        assert!(c.is_synth_form());
    }

    #[test]
    fn negative_control_expansion() {
        let c = Circuit::new(1, 1, vec![Gate::mixed(vec![], vec![0], 1)]).unwrap();
        let e = expand_negative_controls(&c);
        assert_eq!(e.gates, vec![Gate::not(0), Gate::cnot(0, 1), Gate::not(0)]);

        let plain = Circuit::new(2, 1, vec![Gate::toffoli(vec![0, 1], 2)]).unwrap();
        assert_eq!(expand_negative_controls(&plain), plain);
    }

    #[test]
    fn not_removal_examples() {
        let pair = Circuit::new(1, 1, vec![Gate::not(0), Gate::not(0)]).unwrap();
        assert!(remove_superfluous_nots(&pair).gates.is_empty());

        let c = Circuit::new(
            1,
            3,
            vec![
                Gate::not(0),
                Gate::cnot(0, 2),
                Gate::not(0),
                Gate::not(0),
                Gate::cnot(0, 3),
                Gate::not(0),
            ],
        )
        .unwrap();
        assert_eq!(
            remove_superfluous_nots(&c).gates,
            vec![
                Gate::not(0),
                Gate::cnot(0, 2),
                Gate::cnot(0, 3),
                Gate::not(0)
            ]
        );

        let straddle =
            Circuit::new(2, 1, vec![Gate::not(0), Gate::cnot(1, 2), Gate::not(0)]).unwrap();
        assert_eq!(
            remove_superfluous_nots(&straddle).gates,
            vec![Gate::cnot(1, 2)]
        );

        let blocked =
            Circuit::new(1, 1, vec![Gate::not(0), Gate::cnot(0, 1), Gate::not(0)]).unwrap();
        assert_eq!(remove_superfluous_nots(&blocked), blocked);
    }

    #[test]
    fn consecutive_negative_controls_share_nots() {
        let c = Circuit::new(
            1,
            2,
            vec![
                Gate::mixed(vec![], vec![0], 1),
                Gate::mixed(vec![], vec![0], 2),
            ],
        )
        .unwrap();
        let e = expand_negative_controls(&c);
        assert_eq!(e.gates.iter().filter(|g| g.is_not()).count(), 4);
        let r = remove_superfluous_nots(&e);
        assert_eq!(r.gates.iter().filter(|g| g.is_not()).count(), 2);
        assert_eq!(stats(&c).total, 4);
    }

    #[test]
    fn reverse_examples() {
        let gates = vec![Gate::not(2), Gate::cnot(0, 2), Gate::toffoli(vec![0, 1], 2)];
        let c = Circuit::new(2, 1, gates.clone()).unwrap();
        let r = reverse(&c);
        assert_eq!(
            r.gates,
            vec![gates[2].clone(), gates[1].clone(), gates[0].clone()]
        );
        assert_eq!(reverse(&r), c);
        let single = Circuit::new(2, 1, vec![Gate::not(2)]).unwrap();
        assert_eq!(reverse(&single), single);
    }

    #[test]
    fn stats_of_empty_circuit() {
        let c = Circuit::new(3, 3, vec![]).unwrap();
        assert_eq!(stats(&c), GateStats::default());
    }

    #[test]
    fn gate_validation() {
        assert!(Circuit::new(1, 1, vec![Gate::cnot(0, 2)]).is_err());
        assert!(Circuit::new(2, 1, vec![Gate::mixed(vec![0], vec![0], 2)]).is_err());
        assert!(Circuit::new(2, 1, vec![Gate::cnot(2, 2)]).is_err());
    }
}
