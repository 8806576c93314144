//! Hash-quality checks and the benchmark harness.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::Result;
use crate::esop::{self, Effort};
use crate::pla::{parse_pla, PlaFunction, Semantics};
use crate::synth::{stats, synthesize};
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvalancheReport {
    /// Part 1 compares `x` with `f(x)` and needs equal input and output widths.
    pub applicable: bool,
    pub part1_pass: bool,
    pub part1_violations: Vec<Bits>,
    pub part2_pass: bool,
    pub part2_violations: Vec<(Bits, Bits)>,
    pub threshold: usize,
}

impl AvalancheReport {
    pub fn passes(&self) -> bool {
        self.part1_pass && self.part2_pass
    }
}

/// Both avalanche conditions with threshold `ceil(m / 2)`:
/// every `f(x)` is at least that far from `x` (only when `n = m`), and every
/// pair of inputs at distance one maps to outputs at least that far apart.
pub fn avalanche_check(f: &PlaFunction, limits: &Limits) -> Result<AvalancheReport> {
    let (n, m) = (f.inputs, f.outputs);
    limits.check_inputs(n)?;
    let table = f.truth_table(Semantics::InclusiveOr, limits)?;
    let threshold = m.div_ceil(2);
    let far = |a: u64, b: u64| (a ^ b).count_ones() as usize >= threshold;

    let applicable = n == m;
    let part1_violations: Vec<Bits> = if applicable {
        (0..table.len() as u64)
            .filter(|&x| !far(x, table[x as usize]))
            .map(|x| Bits::from_index(x, n))
            .collect()
    } else {
        Vec::new()
    };

    let mut part2_violations = Vec::new();
    for x in 0..table.len() as u64 {
        for i in 0..n {
            let x2 = x ^ (1u64 << i);
            if x < x2 && !far(table[x as usize], table[x2 as usize]) {
                part2_violations.push((Bits::from_index(x, n), Bits::from_index(x2, n)));
            }
        }
    }

    Ok(AvalancheReport {
        applicable,
        part1_pass: part1_violations.is_empty(),
        part1_violations,
        part2_pass: part2_violations.is_empty(),
        part2_violations,
        threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionGroup {
    pub output: Bits,
    pub inputs: Vec<Bits>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub injective: bool,
    pub distinct_outputs: usize,
    /// Outputs reached by two or more inputs.
    pub colliding: Vec<CollisionGroup>,
    /// Every bucket, keyed by output, including singletons.
    #[serde(skip)]
    pub group_sizes: BTreeMap<u64, usize>,
}

impl CollisionReport {
    pub fn total_inputs(&self) -> usize {
        self.group_sizes.values().sum()
    }
}

pub fn collision_scan(f: &PlaFunction, limits: &Limits) -> Result<CollisionReport> {
    limits.check_inputs(f.inputs)?;
    let table = f.truth_table(Semantics::InclusiveOr, limits)?;
    let mut buckets: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for (x, &y) in table.iter().enumerate() {
        buckets.entry(y).or_default().push(x as u64);
    }
    let colliding: Vec<CollisionGroup> = buckets
        .iter()
        .filter(|(_, xs)| xs.len() > 1)
        .map(|(&y, xs)| CollisionGroup {
            output: Bits::from_index(y, f.outputs),
            inputs: xs.iter().map(|&x| Bits::from_index(x, f.inputs)).collect(),
        })
        .collect();
    Ok(CollisionReport {
        injective: colliding.is_empty(),
        distinct_outputs: buckets.len(),
        colliding,
        group_sizes: buckets.iter().map(|(&y, xs)| (y, xs.len())).collect(),
    })
}

/// One row of the benchmark table. Times are seconds on a monotonic clock
/// and exclude file reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub cube_count_before: usize,
    pub cube_count_after: usize,
    pub minimization_time: f64,
    pub synthesis_time_min: f64,
    pub synthesis_time_nomin: f64,
    pub gate_count_min: usize,
    pub gate_count_nomin: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl BenchRecord {
    fn failed(name: String, error: String) -> Self {
        BenchRecord {
            name,
            n: 0,
            m: 0,
            cube_count_before: 0,
            cube_count_after: 0,
            minimization_time: 0.0,
            synthesis_time_min: 0.0,
            synthesis_time_nomin: 0.0,
            gate_count_min: 0,
            gate_count_nomin: 0,
            error: Some(error),
        }
    }

    /// Fields that do not depend on timing.
    pub fn counts(&self) -> (usize, usize, usize, usize, usize, usize, Option<&str>) {
        (
            self.n,
            self.m,
            self.cube_count_before,
            self.cube_count_after,
            self.gate_count_min,
            self.gate_count_nomin,
            self.error.as_deref(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
}

impl BenchReport {
    pub fn all_failed(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.error.is_some())
    }

    pub fn render(&self) -> String {
        render_table(&self.records)
    }

    pub fn json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
            .collect()
    }
}

/// Run both pipeline branches on an in-memory function.
pub fn bench_function(
    name: &str,
    f: &PlaFunction,
    effort: Effort,
    limits: &Limits,
) -> Result<BenchRecord> {
    // without minimization: disjoint conversion plus synthesis
    let t = Instant::now();
    let raw = esop::from_pla(f, limits)?;
    let plain = stats(&synthesize(&raw));
    let synthesis_time_nomin = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let raw_again = esop::from_pla(f, limits)?;
    let small = esop::minimize(&raw_again, effort);
    let minimization_time = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let reduced = stats(&synthesize(&small));
    let synthesis_time_min = t.elapsed().as_secs_f64();

    Ok(BenchRecord {
        name: name.to_string(),
        n: f.inputs,
        m: f.outputs,
        cube_count_before: raw.cubes.len(),
        cube_count_after: small.cubes.len(),
        minimization_time,
        synthesis_time_min,
        synthesis_time_nomin,
        gate_count_min: reduced.total,
        gate_count_nomin: plain.total,
        error: None,
    })
}

fn bench_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Benchmark each file independently; failures become error rows.
pub fn bench_run(paths: &[PathBuf], effort: Effort, limits: &Limits) -> BenchReport {
    let records = paths
        .par_iter()
        .map(|path| {
            let name = bench_name(path);
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return BenchRecord::failed(name, e.to_string()),
            };
            match parse_pla(&text)
                .and_then(|doc| bench_function(&name, &doc.function, effort, limits))
            {
                Ok(r) => r,
                Err(e) => BenchRecord::failed(name, e.to_string()),
            }
        })
        .collect();
    BenchReport { records }
}

pub fn render_table(records: &[BenchRecord]) -> String {
    let header = [
        "function", "n", "m", "cubes", "min", "t_min", "t_syn", "gates", "t_syn0", "gates0",
    ];
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| match &r.error {
            Some(e) => vec![r.name.clone(), format!("error: {e}")],
            None => vec![
                r.name.clone(),
                r.n.to_string(),
                r.m.to_string(),
                r.cube_count_before.to_string(),
                r.cube_count_after.to_string(),
                format!("{:.3}", r.minimization_time),
                format!("{:.3}", r.synthesis_time_min),
                r.gate_count_min.to_string(),
                format!("{:.3}", r.synthesis_time_nomin),
                r.gate_count_nomin.to_string(),
            ],
        })
        .collect();

    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows.iter().filter(|r| r.len() == header.len()) {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    for row in rows.iter().filter(|r| r.len() != header.len()) {
        widths[0] = widths[0].max(row[0].len());
    }

    let mut out = String::new();
    let line = |cells: &[String], out: &mut String| {
        let mut s = String::new();
        for (k, cell) in cells.iter().enumerate() {
            if k == 0 {
                let _ = write!(s, "{cell:<w$}", w = widths[0]);
            } else if cells.len() == header.len() {
                let _ = write!(s, "  {cell:>w$}", w = widths[k]);
            } else {
                let _ = write!(s, "  {cell}");
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&header.map(String::from), &mut out);
    for row in &rows {
        line(row, &mut out);
    }
    out
}
