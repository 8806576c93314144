//! Reading, writing and evaluating `.pla` two-level function descriptions.
//!
//! ```text
//! .i 2
//! .o 1
//! 0- 0
//! -0 0
//! 11 1
//! .e
//! ```
//!
//! Input fields use `0`, `1` and `-`; output fields additionally accept `~`.
//! Output don't-cares are resolved to `0` at parse time and reported as
//! warnings, so every [`Cube`] carries a fully specified output row.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::Limits;

/// One input position of a cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Literal {
    Zero,
    One,
    DontCare,
}

impl Literal {
    pub fn from_char(c: char) -> Option<Literal> {
        match c {
            '0' => Some(Literal::Zero),
            '1' => Some(Literal::One),
            '-' => Some(Literal::DontCare),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Literal::Zero => '0',
            Literal::One => '1',
            Literal::DontCare => '-',
        }
    }

    pub fn accepts(self, bit: bool) -> bool {
        match self {
            Literal::Zero => !bit,
            Literal::One => bit,
            Literal::DontCare => true,
        }
    }

    pub fn is_care(self) -> bool {
        self != Literal::DontCare
    }

    /// The literal whose indicator function is the XOR of the indicators of
    /// two distinct literals: `0 ^ 1 = -`, `0 ^ - = 1`, `1 ^ - = 0`.
    pub fn xor(self, other: Literal) -> Option<Literal> {
        use Literal::*;
        match (self, other) {
            (Zero, One) | (One, Zero) => Some(DontCare),
            (Zero, DontCare) | (DontCare, Zero) => Some(One),
            (One, DontCare) | (DontCare, One) => Some(Zero),
            _ => None,
        }
    }
}

/// A product term with its output row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cube {
    pub inputs: Vec<Literal>,
    pub outputs: Vec<bool>,
}

impl Cube {
    pub fn new(inputs: Vec<Literal>, outputs: Vec<bool>) -> Self {
        Cube { inputs, outputs }
    }

    /// Build a cube from its textual fields, e.g. `Cube::parse("1-0", "01")`.
    /// Panics on malformed text; meant for literals in code and tests.
    pub fn parse(inputs: &str, outputs: &str) -> Cube {
        let inputs = inputs
            .chars()
            .map(|c| Literal::from_char(c).expect("bad input literal"))
            .collect();
        let outputs = outputs
            .chars()
            .map(|c| match c {
                '0' => false,
                '1' => true,
                _ => panic!("bad output bit {c:?}"),
            })
            .collect();
        Cube { inputs, outputs }
    }

    pub fn matches(&self, x: &[bool]) -> bool {
        self.inputs.iter().zip(x).all(|(l, &b)| l.accepts(b))
    }

    pub fn literal_count(&self) -> usize {
        self.inputs.iter().filter(|l| l.is_care()).count()
    }

    pub fn output_ones(&self) -> usize {
        self.outputs.iter().filter(|&&b| b).count()
    }

    pub fn has_output(&self) -> bool {
        self.outputs.iter().any(|&b| b)
    }

    pub fn dont_cares(&self) -> usize {
        self.inputs.len() - self.literal_count()
    }

    /// True when some input vector matches both cubes.
    pub fn intersects(&self, other: &Cube) -> bool {
        self.inputs.iter().zip(&other.inputs).all(|(a, b)| {
            !matches!(
                (a, b),
                (Literal::Zero, Literal::One) | (Literal::One, Literal::Zero)
            )
        })
    }

    pub fn input_string(&self) -> String {
        self.inputs.iter().map(|l| l.to_char()).collect()
    }

    pub fn output_string(&self) -> String {
        self.outputs
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.input_string(), self.output_string())
    }
}

/// How overlapping cubes combine when a function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Semantics {
    InclusiveOr,
    ExclusiveOr,
}

/// A function `B^n -> B^m` given as a list of cubes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaFunction {
    pub inputs: usize,
    pub outputs: usize,
    pub cubes: Vec<Cube>,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub input_labels: Vec<String>,
    #[serde(default)]
    pub output_labels: Vec<String>,
}

impl PlaFunction {
    pub fn new(inputs: usize, outputs: usize, cubes: Vec<Cube>) -> Result<Self> {
        let f = PlaFunction {
            inputs,
            outputs,
            cubes,
            name: None,
            input_labels: Vec::new(),
            output_labels: Vec::new(),
        };
        f.validate()?;
        Ok(f)
    }

    /// Build the full minterm table of `table[x]` (output packed most
    /// significant first), omitting rows whose output is zero.
    pub fn from_table(inputs: usize, outputs: usize, table: &[u64]) -> Result<Self> {
        if table.len() != 1usize << inputs {
            return Err(Error::Structure(format!(
                "table has {} rows, expected {}",
                table.len(),
                1usize << inputs
            )));
        }
        let cubes = table
            .iter()
            .enumerate()
            .filter(|(_, &y)| y != 0)
            .map(|(x, &y)| {
                let ins = Bits::from_index(x as u64, inputs)
                    .iter()
                    .map(|b| if b { Literal::One } else { Literal::Zero })
                    .collect();
                Cube::new(ins, Bits::from_index(y, outputs).as_slice().to_vec())
            })
            .collect();
        PlaFunction::new(inputs, outputs, cubes)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs == 0 || self.outputs == 0 {
            return Err(Error::Structure(
                "input and output arity must both be at least 1".into(),
            ));
        }
        for (i, c) in self.cubes.iter().enumerate() {
            if c.inputs.len() != self.inputs || c.outputs.len() != self.outputs {
                return Err(Error::Structure(format!(
                    "cube {i} has shape {}x{}, function is {}x{}",
                    c.inputs.len(),
                    c.outputs.len(),
                    self.inputs,
                    self.outputs
                )));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &Bits, semantics: Semantics) -> Result<Bits> {
        evaluate_pla(self, x, semantics)
    }

    /// Exhaustive table of the function, indexed like [`Bits::to_index`].
    pub fn truth_table(&self, semantics: Semantics, limits: &Limits) -> Result<Vec<u64>> {
        limits.check_inputs(self.inputs)?;
        if self.outputs > 64 {
            return Err(Error::Resource(format!(
                "{} outputs exceed the 64-bit table word",
                self.outputs
            )));
        }
        let packed: Vec<PackedCube> = self.cubes.iter().map(PackedCube::from_cube).collect();
        Ok((0..1u64 << self.inputs)
            .map(|x| {
                packed
                    .iter()
                    .filter(|c| c.matches(x))
                    .fold(0u64, |acc, c| match semantics {
                        Semantics::InclusiveOr => acc | c.out,
                        Semantics::ExclusiveOr => acc ^ c.out,
                    })
            })
            .collect())
    }
}

/// Cube packed into machine words for `n, m <= 64`. Bit positions follow
/// [`Bits::to_index`]: input 0 is the most significant of `n` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct PackedCube {
    pub care: u64,
    pub value: u64,
    pub out: u64,
}

impl PackedCube {
    pub fn from_cube(c: &Cube) -> Self {
        let n = c.inputs.len();
        let m = c.outputs.len();
        let mut p = PackedCube {
            care: 0,
            value: 0,
            out: 0,
        };
        for (i, l) in c.inputs.iter().enumerate() {
            let bit = 1u64 << (n - 1 - i);
            match l {
                Literal::Zero => p.care |= bit,
                Literal::One => {
                    p.care |= bit;
                    p.value |= bit;
                }
                Literal::DontCare => {}
            }
        }
        for (j, &o) in c.outputs.iter().enumerate() {
            if o {
                p.out |= 1u64 << (m - 1 - j);
            }
        }
        p
    }

    pub fn matches(&self, x: u64) -> bool {
        x & self.care == self.value
    }
}

/// A non-fatal observation made while parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Result of parsing a `.pla` document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaDocument {
    pub function: PlaFunction,
    pub warnings: Vec<Warning>,
    /// The document carried a `#esop` line: rows are meant XOR-wise.
    pub esop_marked: bool,
}

pub const ESOP_MARKER: &str = "#esop";

/// Parse `.pla` text. See the module docs for the accepted subset.
pub fn parse_pla(text: &str) -> Result<PlaDocument> {
    let mut inputs: Option<usize> = None;
    let mut outputs: Option<usize> = None;
    let mut declared_rows: Option<(usize, usize)> = None;
    let mut input_labels = Vec::new();
    let mut output_labels = Vec::new();
    let mut cubes = Vec::new();
    let mut warnings = Vec::new();
    let mut esop_marked = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.trim() == ESOP_MARKER {
            esop_marked = true;
            continue;
        }
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }

        if let Some(directive) = line.strip_prefix('.') {
            let mut parts = directive.split_whitespace();
            let key = parts.next().unwrap_or("");
            let args: Vec<&str> = parts.collect();
            match key {
                "i" | "o" => {
                    let value = single_count(&args, line_no, key)?;
                    if value == 0 {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!(".{key} must be at least 1"),
                        });
                    }
                    if !cubes.is_empty() {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!(".{key} after cube rows"),
                        });
                    }
                    if key == "i" {
                        inputs = Some(value);
                    } else {
                        outputs = Some(value);
                    }
                }
                "p" => declared_rows = Some((single_count(&args, line_no, key)?, line_no)),
                "ilb" => input_labels = args.iter().map(|s| s.to_string()).collect(),
                "ob" => output_labels = args.iter().map(|s| s.to_string()).collect(),
                "type" => {
                    if !matches!(args.first(), Some(&"f") | Some(&"fd")) {
                        warnings.push(Warning {
                            line: line_no,
                            message: format!(
                                "type {:?} read as fd",
                                args.first().copied().unwrap_or("")
                            ),
                        });
                    }
                }
                "e" | "end" => break,
                other => warnings.push(Warning {
                    line: line_no,
                    message: format!("skipped unsupported directive .{other}"),
                }),
            }
            continue;
        }

        let (n, m) = match (inputs, outputs) {
            (Some(n), Some(m)) => (n, m),
            _ => {
                return Err(Error::Structure(format!(
                    "cube row at line {line_no} before .i and .o"
                )))
            }
        };
        let symbols: Vec<char> = line.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(&ch) = symbols.iter().find(|c| !matches!(c, '0' | '1' | '-' | '~')) {
            return Err(Error::Lexical { line: line_no, ch });
        }
        if symbols.len() != n + m {
            return Err(Error::RowLength {
                line: line_no,
                found: symbols.len(),
                expected: n + m,
            });
        }
        let mut ins = Vec::with_capacity(n);
        for &c in &symbols[..n] {
            ins.push(Literal::from_char(c).ok_or(Error::Lexical {
                line: line_no,
                ch: c,
            })?);
        }
        let mut outs = Vec::with_capacity(m);
        let mut resolved = false;
        for &c in &symbols[n..] {
            match c {
                '1' => outs.push(true),
                '0' => outs.push(false),
                _ => {
                    resolved = true;
                    outs.push(false);
                }
            }
        }
        if resolved {
            warnings.push(Warning {
                line: line_no,
                message: "output don't-care resolved to 0".into(),
            });
        }
        cubes.push(Cube::new(ins, outs));
    }

    let n = inputs.ok_or_else(|| Error::Structure("missing .i directive".into()))?;
    let m = outputs.ok_or_else(|| Error::Structure("missing .o directive".into()))?;
    if let Some((p, line)) = declared_rows {
        if p != cubes.len() {
            return Err(Error::Parse {
                line,
                message: format!(".p declares {p} rows but {} were given", cubes.len()),
            });
        }
    }
    for (labels, arity, what) in [(&input_labels, n, "ilb"), (&output_labels, m, "ob")] {
        if !labels.is_empty() && labels.len() != arity {
            return Err(Error::Structure(format!(
                ".{what} lists {} names for {arity} signals",
                labels.len()
            )));
        }
    }

    let mut function = PlaFunction::new(n, m, cubes)?;
    function.input_labels = input_labels;
    function.output_labels = output_labels;
    Ok(PlaDocument {
        function,
        warnings,
        esop_marked,
    })
}

fn single_count(args: &[&str], line: usize, key: &str) -> Result<usize> {
    match args {
        [v] => v.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad count {v:?} for .{key}"),
        }),
        _ => Err(Error::Parse {
            line,
            message: format!(".{key} takes exactly one argument"),
        }),
    }
}

pub fn write_pla(f: &PlaFunction) -> String {
    write_pla_with_header(f, &[])
}

/// Like [`write_pla`], with extra comment lines emitted verbatim after the
/// arity directives.
pub(crate) fn write_pla_with_header(f: &PlaFunction, extra: &[&str]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, ".i {}", f.inputs);
    let _ = writeln!(out, ".o {}", f.outputs);
    for line in extra {
        let _ = writeln!(out, "{line}");
    }
    if !f.input_labels.is_empty() {
        let _ = writeln!(out, ".ilb {}", f.input_labels.join(" "));
    }
    if !f.output_labels.is_empty() {
        let _ = writeln!(out, ".ob {}", f.output_labels.join(" "));
    }
    let _ = writeln!(out, ".p {}", f.cubes.len());
    for c in &f.cubes {
        let _ = writeln!(out, "{c}");
    }
    out.push_str(".e\n");
    out
}

/// Replace every cube by the minterms it covers. Repeated minterms with the
/// same output row are kept once.
pub fn expand_to_minterms(f: &PlaFunction, limits: &Limits) -> Result<PlaFunction> {
    let mut total: u128 = 0;
    for c in &f.cubes {
        total += 1u128 << c.dont_cares().min(127);
        if total > limits.max_cubes as u128 {
            return Err(Error::Resource(format!(
                "minterm expansion needs more than {} cubes",
                limits.max_cubes
            )));
        }
    }

    let mut seen = HashSet::new();
    let mut cubes = Vec::with_capacity(total as usize);
    for c in &f.cubes {
        let free: Vec<usize> = (0..f.inputs)
            .filter(|&i| c.inputs[i] == Literal::DontCare)
            .collect();
        for assignment in 0u64..(1u64 << free.len()) {
            let mut inputs = c.inputs.clone();
            for (k, &pos) in free.iter().enumerate() {
                // first dash is the most significant, so rows come out sorted
                let bit = (assignment >> (free.len() - 1 - k)) & 1 == 1;
                inputs[pos] = if bit { Literal::One } else { Literal::Zero };
            }
            let minterm = Cube::new(inputs, c.outputs.clone());
            if seen.insert(minterm.clone()) {
                cubes.push(minterm);
            }
        }
    }

    Ok(PlaFunction { cubes, ..f.clone() })
}

pub fn evaluate_pla(f: &PlaFunction, x: &Bits, semantics: Semantics) -> Result<Bits> {
    if x.len() != f.inputs {
        return Err(Error::Arity {
            expected: f.inputs,
            found: x.len(),
        });
    }
    let mut out = vec![false; f.outputs];
    for c in f.cubes.iter().filter(|c| c.matches(x.as_slice())) {
        for (o, &b) in out.iter_mut().zip(&c.outputs) {
            match semantics {
                Semantics::InclusiveOr => *o |= b,
                Semantics::ExclusiveOr => *o ^= b,
            }
        }
    }
    Ok(Bits::from_bools(out))
}
