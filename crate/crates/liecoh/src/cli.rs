//! Command-line front end: compute single cells, grids, self-tests, and
//! split-vs-straightforward benchmarks.

use crate::algebra::parse_structure_constants;
use crate::engine::{
    self, compute, compute_split, compute_straightforward, grid_report, AlgebraSource, Mode,
};
use crate::field::{Field, FieldKind, PrimeField, Rationals};
use crate::report::{
    now_ms, render_check_text, render_grid_csv, render_grid_text, render_result_csv,
    render_result_text, render_timing_text, result_doc, CheckDocument, ComputeDocument,
    GridDocument, PhaseDoc, ResultDoc, TimingDoc,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "liecoh",
    version,
    about = "Exact graded cohomology of finite-window Lie algebras and superalgebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute H^k_g for one cell
    Compute(ComputeArgs),
    /// Tabulate cells over ranges of degree and grade
    Grid(GridArgs),
    /// Run the self-test suites
    Check(CheckArgs),
    /// Time split against straightforward on one cell
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Algebra: H:<even>|<odd>, Po:<even>|<odd>, or a structure-constant file
    #[arg(long)]
    pub algebra: String,
    /// Coefficient field: Q, Fp, or Fp:<prime> (LIECOH_PRIME overrides the
    /// default prime)
    #[arg(long, default_value = "Q")]
    pub field: String,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output file (default: stdout)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Cochain degree
    #[arg(long)]
    pub k: usize,
    /// Cochain grade
    #[arg(long, allow_negative_numbers = true)]
    pub g: i64,
    /// split, straight, or both
    #[arg(long, default_value = "split")]
    pub mode: String,
    /// text, json, or csv
    #[arg(long, default_value = "text")]
    pub format: String,
    /// Skip representative extraction
    #[arg(long)]
    pub no_reps: bool,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Degree range, inclusive: a..b or a single value
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    /// Grade range, inclusive: a..b or a single value
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
    /// split or straight
    #[arg(long, default_value = "split")]
    pub mode: String,
    /// text, json, or csv
    #[arg(long, default_value = "text")]
    pub format: String,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest cochain degree exercised
    #[arg(long, default_value_t = 4)]
    pub k_max: usize,
    /// Grade range, inclusive
    #[arg(long, default_value = "-2..2", allow_hyphen_values = true)]
    pub g: String,
    /// text or json
    #[arg(long, default_value = "text")]
    pub format: String,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub g: i64,
}

fn parse_range_i64(s: &str) -> Result<std::ops::RangeInclusive<i64>> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b),
        None => (s, s),
    };
    let lo: i64 = a.trim().parse().with_context(|| format!("bad range `{s}`"))?;
    let hi: i64 = b.trim().parse().with_context(|| format!("bad range `{s}`"))?;
    if lo > hi {
        bail!("empty range `{s}`");
    }
    Ok(lo..=hi)
}

fn parse_range_usize(s: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let r = parse_range_i64(s)?;
    if *r.start() < 0 {
        bail!("degree range `{s}` must be non-negative");
    }
    Ok(*r.start() as usize..=*r.end() as usize)
}

fn load_source(descriptor: &str) -> Result<AlgebraSource> {
    match AlgebraSource::parse_family(descriptor) {
        Ok(src) => Ok(src),
        Err(_) => {
            let path = std::path::Path::new(descriptor);
            if !path.exists() {
                bail!(
                    "`{descriptor}` is neither a family descriptor (H:<even>|<odd>, \
                     Po:<even>|<odd>) nor a readable file"
                );
            }
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {descriptor}"))?;
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "explicit".into());
            Ok(AlgebraSource::Explicit(parse_structure_constants(
                &text, &label,
            )?))
        }
    }
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<()> {
    match output {
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
        }
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
    }
    Ok(())
}

fn modes_of(s: &str) -> Result<Vec<Mode>> {
    match s {
        "split" => Ok(vec![Mode::Split]),
        "straight" => Ok(vec![Mode::Straightforward]),
        "both" => Ok(vec![Mode::Split, Mode::Straightforward]),
        other => bail!("unknown mode `{other}` (expected split, straight, or both)"),
    }
}

/// Run an invocation; the returned code is the process exit status.
pub fn run(cli: Cli) -> Result<i32> {
    let jobs = match &cli.command {
        Command::Compute(a) => a.common.jobs,
        Command::Grid(a) => a.common.jobs,
        Command::Check(a) => a.common.jobs,
        Command::Bench(a) => a.common.jobs,
    };
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .ok();
    }
    match cli.command {
        Command::Compute(args) => {
            let field = FieldKind::parse(&args.common.field)?;
            match field {
                FieldKind::Rational => run_compute(&Rationals, args),
                FieldKind::Prime(p) => run_compute(&PrimeField::new(p)?, args),
            }
        }
        Command::Grid(args) => {
            let field = FieldKind::parse(&args.common.field)?;
            match field {
                FieldKind::Rational => run_grid(&Rationals, args),
                FieldKind::Prime(p) => run_grid(&PrimeField::new(p)?, args),
            }
        }
        Command::Check(args) => {
            let field = FieldKind::parse(&args.common.field)?;
            match field {
                FieldKind::Rational => run_check(&Rationals, args),
                FieldKind::Prime(p) => run_check(&PrimeField::new(p)?, args),
            }
        }
        Command::Bench(args) => {
            let field = FieldKind::parse(&args.common.field)?;
            match field {
                FieldKind::Rational => run_bench(&Rationals, args),
                FieldKind::Prime(p) => run_bench(&PrimeField::new(p)?, args),
            }
        }
    }
}

fn field_name(args: &CommonArgs) -> String {
    FieldKind::parse(&args.field).map(|k| k.to_string()).unwrap_or_default()
}

fn run_compute<F: Field>(f: &F, args: ComputeArgs) -> Result<i32> {
    let src = load_source(&args.common.algebra)?;
    let alg = src.materialize(args.k, args.g)?;
    let modes = modes_of(&args.mode)?;
    let mut docs: Vec<ResultDoc> = Vec::new();
    let mut phases: Vec<PhaseDoc> = Vec::new();
    let mut outcomes = Vec::new();
    for mode in &modes {
        let out = compute(f, &alg, args.k, args.g, *mode, !args.no_reps)?;
        docs.push(result_doc(f, &alg, &out));
        phases.push(PhaseDoc::new(&mode.to_string(), &out.timings));
        outcomes.push(out);
    }
    let field = field_name(&args.common);
    let content = match args.format.as_str() {
        "json" => {
            let doc = ComputeDocument {
                version: env!("CARGO_PKG_VERSION").to_string(),
                algebra: src.label(),
                field,
                results: docs,
                timing: TimingDoc {
                    timestamp_ms: now_ms(),
                    phases,
                },
            };
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        "csv" => render_result_csv(&docs),
        "text" => {
            let mut s = String::new();
            for (doc, out) in docs.iter().zip(&outcomes) {
                s.push_str(&render_result_text(doc, &src.label(), &field));
                s.push_str(&render_timing_text(&out.timings));
                s.push('\n');
            }
            if docs.len() == 2 {
                let agree = docs[0].dim_z == docs[1].dim_z
                    && docs[0].dim_b == docs[1].dim_b
                    && docs[0].dim_h == docs[1].dim_h;
                s.push_str(if agree {
                    "modes agree on (dim Z, dim B, dim H)\n"
                } else {
                    "MODES DISAGREE\n"
                });
            }
            s
        }
        other => bail!("unknown format `{other}`"),
    };
    emit(&args.common.output, &content)?;
    Ok(0)
}

fn run_grid<F: Field>(f: &F, args: GridArgs) -> Result<i32> {
    let src = load_source(&args.common.algebra)?;
    let ks = parse_range_usize(&args.k)?;
    let gs = parse_range_i64(&args.g)?;
    let mode = match modes_of(&args.mode)?.as_slice() {
        [m] => *m,
        _ => bail!("grid runs one mode at a time"),
    };
    let corners: Vec<(usize, i64)> = vec![(*ks.end(), *gs.end()), (*ks.end(), *gs.start())];
    let alg = src.materialize_many(&corners)?;
    let cells = grid_report(f, &alg, ks.clone(), gs.clone(), mode)?;
    let field = field_name(&args.common);
    let content = match args.format.as_str() {
        "json" => {
            let doc = GridDocument {
                version: env!("CARGO_PKG_VERSION").to_string(),
                algebra: src.label(),
                field,
                mode: mode.to_string(),
                cells,
                timing: TimingDoc {
                    timestamp_ms: now_ms(),
                    phases: Vec::new(),
                },
            };
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        "csv" => render_grid_csv(&cells),
        "text" => {
            let mut s = format!(
                "{}  field {}  mode {}  cells dimC/nSub/maxDim, * marks dim H > 0\n",
                src.label(),
                field,
                mode
            );
            s.push_str(&render_grid_text(&cells, ks, gs));
            s
        }
        other => bail!("unknown format `{other}`"),
    };
    emit(&args.common.output, &content)?;
    Ok(0)
}

fn run_check<F: Field>(f: &F, args: CheckArgs) -> Result<i32> {
    let src = load_source(&args.common.algebra)?;
    let gs = parse_range_i64(&args.g)?;
    // the d-squared suite reaches degree k_max + 2
    let alg = src.materialize_many(&[(args.k_max + 2, *gs.end())])?;
    let report = engine::self_test(f, &alg, args.k_max, gs);
    let passed = report.all_passed();
    let field = field_name(&args.common);
    let content = match args.format.as_str() {
        "json" => {
            let doc = CheckDocument {
                version: env!("CARGO_PKG_VERSION").to_string(),
                algebra: src.label(),
                field,
                passed,
                entries: report.entries.clone(),
                timing: TimingDoc {
                    timestamp_ms: now_ms(),
                    phases: Vec::new(),
                },
            };
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        "text" => format!(
            "{}  field {}  self-test\n{}",
            src.label(),
            field,
            render_check_text(&report)
        ),
        other => bail!("unknown format `{other}`"),
    };
    emit(&args.common.output, &content)?;
    Ok(if passed { 0 } else { 1 })
}

fn run_bench<F: Field>(f: &F, args: BenchArgs) -> Result<i32> {
    let src = load_source(&args.common.algebra)?;
    let alg = src.materialize(args.k, args.g)?;
    let split = compute_split(f, &alg, args.k, args.g, false)?;
    let straight = compute_straightforward(f, &alg, args.k, args.g, false)?;
    if (split.dim_z, split.dim_b, split.dim_h)
        != (straight.dim_z, straight.dim_b, straight.dim_h)
    {
        bail!("modes disagree; bench aborted");
    }
    let mut s = format!(
        "bench {}  field {}  (k, g) = ({}, {})\n",
        src.label(),
        field_name(&args.common),
        args.k,
        args.g
    );
    s.push_str(&format!(
        "dim C = {} / {} / {}   dim H = {}\n",
        split.dim_c[0], split.dim_c[1], split.dim_c[2], split.dim_h
    ));
    s.push_str(&format!(
        "split:           {:>8} ms  ({}), subcomplexes {}, largest block {}\n",
        split.timings.total_ms,
        render_timing_text(&split.timings),
        split.n_subcomplexes,
        split.max_block
    ));
    s.push_str(&format!(
        "straightforward: {:>8} ms  ({}), block {}\n",
        straight.timings.total_ms,
        render_timing_text(&straight.timings),
        straight.max_block
    ));
    if split.timings.total_ms > 0 {
        s.push_str(&format!(
            "speedup: {:.2}x\n",
            straight.timings.total_ms as f64 / split.timings.total_ms as f64
        ));
    }
    emit(&args.common.output, &s)?;
    Ok(0)
}
