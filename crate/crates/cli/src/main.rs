use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use revhash_core::analyze::{self, BenchReport};
use revhash_core::esop::{self, Effort, EsopCover};
use revhash_core::invert::{self, FunctionRef, PreimageResult};
use revhash_core::pla::{self, PlaDocument, PlaFunction, Semantics};
use revhash_core::sim::{self, VerifyMode};
use revhash_core::synth::{self, Circuit};
use revhash_core::{circuit_io, corpus, Bits, Error, Limits};
use serde_json::json;

/// Reversible circuit synthesis, inversion and analysis for small hash functions.
#[derive(Parser, Debug)]
#[command(name = "revhash", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output format for the main report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest input count (and circuit width) enumerated exhaustively.
    #[arg(long, global = true, env = "REVHASH_EXHAUSTIVE_LIMIT",
          value_parser = clap::value_parser!(u32).range(1..=63))]
    exhaustive_limit: Option<u32>,
    /// Skip ESOP minimization before synthesis.
    #[arg(long, global = true)]
    no_minimize: bool,
    /// Maximum minimization rounds.
    #[arg(long, global = true, default_value_t = 64)]
    effort: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a circuit from a .pla file; writes .real and .json files.
    Synth {
        input: PathBuf,
        /// Output path stem; defaults to the input path without extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reverse the gate order of a circuit (.real, .json, or .pla to synthesize).
    Reverse {
        input: PathBuf,
        /// Output path stem; the reversed circuit is printed when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a circuit forward on input bit strings.
    Simulate {
        input: PathBuf,
        /// Input values such as 0110; every input when omitted.
        #[arg(long = "input", short = 'x')]
        inputs: Vec<Bits>,
    },
    /// Find every input that maps to a target output.
    Invert {
        input: PathBuf,
        #[arg(long)]
        target: Bits,
        /// Enumerate all inputs instead of deducing backwards.
        #[arg(long)]
        brute: bool,
        /// Skip the brute-force comparison run for small functions.
        #[arg(long)]
        no_crosscheck: bool,
    },
    /// Check forward-then-reversed identity and agreement with the table.
    Verify {
        input: PathBuf,
        /// Seed for sampled identity checks on wide circuits.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// States sampled when the circuit is too wide to sweep.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Drop gate k (0-based) from the forward circuit before checking.
        #[arg(long, value_name = "K")]
        mutate_drop_gate: Option<usize>,
    },
    /// Avalanche and collision report for a .pla function.
    Analyze { input: PathBuf },
    /// Benchmark table over .pla files or directories of them.
    Bench {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Directory for bench.txt and bench.jsonl.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the built-in benchmark functions and examples as .pla files.
    Corpus {
        dir: PathBuf,
        /// Also write the small example functions.
        #[arg(long)]
        samples: bool,
    },
}

/// A verification check that ran and failed.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<VerificationFailed>().is_some() {
        3
    } else if e.downcast_ref::<Error>().is_some_and(Error::is_resource) {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

impl Common {
    fn limits(&self) -> Limits {
        let mut l = Limits::default();
        if let Some(k) = self.exhaustive_limit {
            l.max_inputs = k as usize;
            l.max_width = k as usize;
        }
        l
    }

    fn effort(&self) -> Effort {
        Effort {
            max_rounds: self.effort,
        }
    }

    /// JSON goes to stdout; text goes to stdout in text mode and to stderr
    /// alongside JSON.
    fn emit(&self, text: &str, value: serde_json::Value) {
        match self.format {
            Format::Text => print!("{text}"),
            Format::Json => {
                eprint!("{text}");
                println!("{value}");
            }
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let common = &cli.common;
    match &cli.command {
        Command::Synth { input, output } => cmd_synth(common, input, output.as_deref()),
        Command::Reverse { input, output } => cmd_reverse(common, input, output.as_deref()),
        Command::Simulate { input, inputs } => cmd_simulate(common, input, inputs),
        Command::Invert {
            input,
            target,
            brute,
            no_crosscheck,
        } => cmd_invert(common, input, target, *brute, !*no_crosscheck),
        Command::Verify {
            input,
            seed,
            samples,
            mutate_drop_gate,
        } => cmd_verify(common, input, *seed, *samples, *mutate_drop_gate),
        Command::Analyze { input } => cmd_analyze(common, input),
        Command::Bench { inputs, output } => cmd_bench(common, inputs, output.as_deref()),
        Command::Corpus { dir, samples } => cmd_corpus(common, dir, *samples),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_pla(path: &Path) -> anyhow::Result<PlaDocument> {
    let doc = pla::parse_pla(&read(path)?).with_context(|| path.display().to_string())?;
    for w in &doc.warnings {
        eprintln!("warning: {}:{}: {}", path.display(), w.line, w.message);
    }
    Ok(doc)
}

/// A loaded `.pla` with its cover as read and as used for synthesis.
struct Loaded {
    doc: PlaDocument,
    raw: EsopCover,
    cover: EsopCover,
}

impl Loaded {
    /// The function as written in the file, for brute-force checks.
    fn function_ref(&self) -> FunctionRef<'_> {
        if self.doc.esop_marked {
            FunctionRef::Esop(&self.raw)
        } else {
            FunctionRef::Pla(&self.doc.function)
        }
    }
}

/// The function a document denotes, in OR-readable form.
fn spec_of(doc: &PlaDocument, limits: &Limits) -> anyhow::Result<PlaFunction> {
    let f = &doc.function;
    if !doc.esop_marked {
        return Ok(f.clone());
    }
    let table = f.truth_table(Semantics::ExclusiveOr, limits)?;
    Ok(PlaFunction::from_table(f.inputs, f.outputs, &table)?)
}

fn load_cover(common: &Common, path: &Path) -> anyhow::Result<Loaded> {
    let doc = load_pla(path)?;
    let limits = common.limits();
    let raw = if doc.esop_marked {
        EsopCover::from_document(&doc)?.0
    } else {
        esop::from_pla(&doc.function, &limits)?
    };
    let cover = if common.no_minimize {
        raw.clone()
    } else {
        esop::minimize(&raw, common.effort())
    };
    Ok(Loaded { doc, raw, cover })
}

/// Load a circuit file, or synthesize one from a `.pla`.
fn load_circuit(common: &Common, path: &Path) -> anyhow::Result<(Circuit, Option<Loaded>)> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("real") => Ok((
            circuit_io::read_real(&read(path)?).with_context(|| path.display().to_string())?,
            None,
        )),
        Some("json") => Ok((
            circuit_io::from_json(&read(path)?).with_context(|| path.display().to_string())?,
            None,
        )),
        _ => {
            let loaded = load_cover(common, path)?;
            Ok((synth::synthesize(&loaded.cover), Some(loaded)))
        }
    }
}

fn stem(input: &Path, output: Option<&Path>) -> PathBuf {
    output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| input.with_extension(""))
}

fn write_circuit(c: &Circuit, stem: &Path) -> anyhow::Result<(PathBuf, PathBuf)> {
    let real = stem.with_extension("real");
    let json = stem.with_extension("json");
    std::fs::write(&real, circuit_io::write_real(c)).with_context(|| real.display().to_string())?;
    std::fs::write(&json, circuit_io::to_json(c)).with_context(|| json.display().to_string())?;
    Ok((real, json))
}

fn cmd_synth(common: &Common, input: &Path, output: Option<&Path>) -> anyhow::Result<()> {
    let t = Instant::now();
    let loaded = load_cover(common, input)?;
    let mut circuit = synth::synthesize(&loaded.cover);
    circuit.name = input.file_stem().map(|s| s.to_string_lossy().into_owned());
    let elapsed = t.elapsed().as_secs_f64();
    let stats = synth::stats(&circuit);
    let cost = loaded.cover.cost();
    let (real, json_path) = write_circuit(&circuit, &stem(input, output))?;

    let mut text = String::new();
    let _ = writeln!(
        text,
        "inputs {}  outputs {}",
        circuit.inputs, circuit.outputs
    );
    let _ = writeln!(
        text,
        "cover: {} cubes, {} literals, {} output ones{}",
        cost.cube_count,
        cost.literal_count,
        cost.output_ones,
        if common.no_minimize {
            " (not minimized)"
        } else {
            ""
        }
    );
    let _ = writeln!(
        text,
        "gates: {} total ({} NOT, {} CNOT, {} Toffoli, {} larger)",
        stats.total, stats.not, stats.cnot, stats.toffoli, stats.generalized
    );
    let _ = writeln!(text, "wrote {} and {}", real.display(), json_path.display());
    common.emit(
        &text,
        json!({
            "inputs": circuit.inputs,
            "outputs": circuit.outputs,
            "minimized": !common.no_minimize,
            "cost": cost,
            "gates": stats,
            "real": real,
            "json": json_path,
            "elapsed": elapsed,
        }),
    );
    Ok(())
}

fn cmd_reverse(common: &Common, input: &Path, output: Option<&Path>) -> anyhow::Result<()> {
    let (c, _) = load_circuit(common, input)?;
    let r = synth::reverse(&c);
    match output {
        Some(stem) => {
            let (real, json_path) = write_circuit(&r, stem)?;
            common.emit(
                &format!("wrote {} and {}\n", real.display(), json_path.display()),
                json!({"gates": r.gates.len(), "real": real, "json": json_path}),
            );
        }
        None => common.emit(
            &circuit_io::write_real(&r),
            serde_json::to_value(circuit_io::CircuitDocument::from(&r))?,
        ),
    }
    Ok(())
}

fn cmd_simulate(common: &Common, input: &Path, xs: &[Bits]) -> anyhow::Result<()> {
    let (c, _) = load_circuit(common, input)?;
    let xs: Vec<Bits> = if xs.is_empty() {
        common.limits().check_inputs(c.inputs)?;
        (0..1u64 << c.inputs)
            .map(|x| Bits::from_index(x, c.inputs))
            .collect()
    } else {
        xs.to_vec()
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    for x in &xs {
        let y = sim::evaluate(&c, x)?;
        let _ = writeln!(text, "{x} -> {y}");
        rows.push(json!({"input": x, "output": y}));
    }
    common.emit(&text, json!(rows));
    Ok(())
}

fn render_preimages(r: &PreimageResult) -> String {
    let mut text = String::new();
    let method = match r.method {
        invert::Method::BruteForce => "brute force",
        invert::Method::Deduction => "deduction",
    };
    let _ = writeln!(
        text,
        "target {}: {} preimage(s) by {method} ({} branches, {} propagations, {:.6} s)",
        r.target,
        r.preimages.len(),
        r.branches,
        r.propagations,
        r.elapsed
    );
    for x in &r.preimages {
        let _ = writeln!(text, "{x}");
    }
    text
}

fn cmd_invert(
    common: &Common,
    input: &Path,
    target: &Bits,
    brute: bool,
    crosscheck: bool,
) -> anyhow::Result<()> {
    let limits = common.limits();
    let (c, loaded) = load_circuit(common, input)?;
    let oracle = |limits: &Limits| -> anyhow::Result<PreimageResult> {
        let f = loaded
            .as_ref()
            .map(Loaded::function_ref)
            .unwrap_or(FunctionRef::Circuit(&c));
        Ok(invert::preimages_bruteforce(f, target, limits)?)
    };
    let result = if brute {
        oracle(&limits)?
    } else {
        invert::preimages_deduce(&c, target)?
    };
    let mut text = render_preimages(&result);
    if !brute && crosscheck && c.inputs <= 16 {
        let check = oracle(&limits)?;
        if check.preimages != result.preimages {
            eprint!("{text}");
            return Err(VerificationFailed(format!(
                "deduction found {} preimage(s), brute force found {}",
                result.preimages.len(),
                check.preimages.len()
            ))
            .into());
        }
        text.push_str("cross-check against brute force: agree\n");
    }
    common.emit(&text, serde_json::to_value(&result)?);
    Ok(())
}

fn cmd_verify(
    common: &Common,
    input: &Path,
    seed: u64,
    samples: u64,
    drop: Option<usize>,
) -> anyhow::Result<()> {
    let limits = common.limits();
    let (c, loaded) = load_circuit(common, input)?;
    let forward = match drop {
        Some(k) => c.without_gate(k)?,
        None => c.clone(),
    };
    // the reversal of the intact circuit, so a dropped gate shows up
    let reversed = synth::reverse(&c);
    let mode = if c.width() <= limits.max_width.min(63) {
        VerifyMode::Exhaustive
    } else {
        VerifyMode::Sampled {
            count: samples,
            seed,
        }
    };
    let identity = sim::verify_identity(&forward, &reversed, mode, &limits)?;
    let spec = match &loaded {
        Some(l) => Some(sim::verify_against_spec(
            &forward,
            &spec_of(&l.doc, &limits)?,
            &limits,
        )?),
        None => None,
    };

    let mut text = String::new();
    let _ = write!(
        text,
        "identity ({}, {} states): {}",
        identity.mode,
        identity.states_checked,
        if identity.pass { "pass" } else { "FAIL" }
    );
    if let Some(s) = &identity.counterexample {
        let _ = write!(text, ", counterexample {s}");
    }
    text.push('\n');
    if let Some(s) = &spec {
        let _ = writeln!(
            text,
            "specification ({} inputs): {}",
            s.states_checked,
            if s.pass { "pass" } else { "FAIL" }
        );
        for m in &s.mismatches {
            let _ = writeln!(
                text,
                "  {} expected {} got {}",
                m.input, m.expected, m.actual
            );
        }
    }
    common.emit(&text, json!({"identity": identity, "specification": spec}));
    if !identity.pass || spec.as_ref().is_some_and(|s| !s.pass) {
        bail!(VerificationFailed("verification failed".into()));
    }
    Ok(())
}

fn cmd_analyze(common: &Common, input: &Path) -> anyhow::Result<()> {
    let limits = common.limits();
    let f = spec_of(&load_pla(input)?, &limits)?;
    let av = analyze::avalanche_check(&f, &limits)?;
    let col = analyze::collision_scan(&f, &limits)?;
    let verdict = |b: bool| if b { "pass" } else { "fail" };

    let mut text = String::new();
    let _ = writeln!(text, "avalanche threshold {}", av.threshold);
    if av.applicable {
        let _ = writeln!(
            text,
            "  part 1: {} ({} violations)",
            verdict(av.part1_pass),
            av.part1_violations.len()
        );
    } else {
        let _ = writeln!(
            text,
            "  part 1: not applicable (input and output widths differ)"
        );
    }
    let _ = writeln!(
        text,
        "  part 2: {} ({} violating pairs)",
        verdict(av.part2_pass),
        av.part2_violations.len()
    );
    let _ = writeln!(
        text,
        "collisions: {} distinct outputs, {} colliding groups, {}",
        col.distinct_outputs,
        col.colliding.len(),
        if col.injective {
            "injective"
        } else {
            "not injective"
        }
    );
    common.emit(&text, json!({"avalanche": av, "collisions": col}));
    Ok(())
}

fn collect_pla_files(inputs: &[PathBuf]) -> anyhow::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| p.display().to_string())?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|e| e == "pla"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn cmd_bench(common: &Common, inputs: &[PathBuf], output: Option<&Path>) -> anyhow::Result<()> {
    let files = collect_pla_files(inputs)?;
    let effort = if common.no_minimize {
        Effort { max_rounds: 0 }
    } else {
        common.effort()
    };
    let report: BenchReport = analyze::bench_run(&files, effort, &common.limits());
    let table = report.render();
    if let Some(dir) = output {
        std::fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
        std::fs::write(dir.join("bench.txt"), &table)?;
        std::fs::write(dir.join("bench.jsonl"), report.json_lines())?;
    }
    match common.format {
        Format::Text => print!("{table}"),
        Format::Json => {
            eprint!("{table}");
            print!("{}", report.json_lines());
        }
    }
    if report.all_failed() {
        return Err(anyhow!("every benchmark file failed"));
    }
    Ok(())
}

fn cmd_corpus(common: &Common, dir: &Path, samples: bool) -> anyhow::Result<()> {
    let mut written = corpus::write_corpus(dir)?;
    if samples {
        written.extend(corpus::write_samples(dir)?);
    }
    let text: String = written
        .iter()
        .map(|p| format!("{}\n", p.display()))
        .collect();
    common.emit(&text, json!(written));
    Ok(())
}
