use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use jwg::gf::FieldSpec;
use jwg::graph::{EdgeFormat, GraphSpec};
use jwg::harness::{self, GridLimits, GridSpec, HarnessError, ReportRecord};
use jwg::metrics::{distance_between, Distance};
use jwg::symfun::{search_sigma_nonzero, search_sigma_pair_nonzero, sigma, sigma_pair};
use jwg::witness::{self, Walk, WalkRecord};

#[derive(Parser)]
#[command(name = "jwg", version, about = "Jumped Wenger graphs J_m(q,i,j) over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export the edge list of one graph.
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compute the invariants of one graph.
    Invariants {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Run a parameter grid and compare with the stated results.
    Verify {
        /// Grid expression, e.g. "q=3,4,5;m=1..2;ij=all".
        #[arg(long, conflicts_with_all = ["q", "m", "i", "j", "all_ij"])]
        grid: Option<String>,
        /// Field order(s), e.g. 9, 3^2 or 3^2/[2,2,1]; commas allowed.
        #[arg(long)]
        q: Option<String>,
        /// m value or range, e.g. 2 or 1..3.
        #[arg(long)]
        m: Option<String>,
        #[arg(long, requires = "j")]
        i: Option<usize>,
        #[arg(long, requires = "i")]
        j: Option<usize>,
        /// Every 1 <= i < j <= m+2 (the default without --i/--j).
        #[arg(long, conflicts_with_all = ["i", "j"])]
        all_ij: bool,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Build an explicit path or short cycle.
    Witness {
        #[command(subcommand)]
        kind: WitnessKind,
    },
    /// Search for tuples with nonvanishing symmetric functions.
    Search {
        #[command(subcommand)]
        kind: SearchKind,
    },
}

#[derive(Subcommand)]
enum WitnessKind {
    /// Constructive path between two vertices (P:rank, L:rank or P=c1,c2,...).
    Path {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// First 4-cycle from equal columns.
    Cycle4 {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// First 6-cycle from a rank-deficient triple.
    Cycle6 {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// The 8-cycle present in every graph of the family.
    Cycle8 {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand)]
enum SearchKind {
    /// Distinct x_1..x_n with sigma_k(x) != 0.
    Sigma {
        #[arg(long)]
        q: FieldSpec,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Distinct x_1..x_n with sigma_{n-i,n-j}(x) != 0.
    SigmaPair {
        #[arg(long)]
        q: FieldSpec,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        /// Rank of a prescribed x_1.
        #[arg(long)]
        fixed_first: Option<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Field: 7, 9, 3^2 or 3^2/[2,2,1] (modulus coefficients, constant first).
    #[arg(long)]
    q: FieldSpec,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    i: usize,
    #[arg(long)]
    j: usize,
}

impl GraphArgs {
    fn spec(&self) -> Result<GraphSpec, HarnessError> {
        Ok(GraphSpec::jumped(&self.q, self.m, self.i, self.j)?)
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    max_vertices: Option<u64>,
    /// Lower-bound the diameter of cells above --max-vertices by sampling.
    #[arg(long)]
    sample_diameter: bool,
    /// Random vertex pairs per cell for the path check.
    #[arg(long)]
    path_samples: Option<usize>,
}

impl LimitArgs {
    fn limits(&self) -> GridLimits {
        let d = GridLimits::default();
        GridLimits {
            max_vertices: self.max_vertices.unwrap_or(d.max_vertices),
            threads: self.threads,
            sample_diameter: self.sample_diameter,
            path_samples: self.path_samples.unwrap_or(d.path_samples),
            ..d
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Edgelist,
    Dimacs,
}

fn sink(out: &OutArgs) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match &out.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn usage(msg: String) -> HarnessError {
    HarnessError::InvalidGrid(msg)
}

fn write_json<T: Serialize>(out: &OutArgs, value: &T) -> Result<(), HarnessError> {
    if !matches!(out.format, None | Some(Format::Json)) {
        return Err(usage("this command only writes json".into()));
    }
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_records(out: &OutArgs, records: &[ReportRecord]) -> Result<(), HarnessError> {
    let mut w = sink(out)?;
    match out.format {
        None | Some(Format::Json) => harness::emit_json(records, &mut w)?,
        Some(Format::Csv) => harness::emit_csv(records, &mut w)?,
        Some(_) => return Err(usage("reports are json or csv".into())),
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PathReport {
    walk: WalkRecord,
    bfs_distance: Distance,
    bound: usize,
}

#[derive(Serialize)]
struct SearchReport {
    tuple: Vec<u32>,
    value: u32,
}

fn walk_json(spec: &GraphSpec, out: &OutArgs, walk: Option<Walk>, what: &str) -> Result<bool, HarnessError> {
    match walk {
        Some(w) => {
            write_json(out, &WalkRecord::new(spec, &w))?;
            Ok(true)
        }
        None => {
            eprintln!("no {what} in J_{}({},{},{})", spec.m(), spec.q(), spec.jump().unwrap().0, spec.jump().unwrap().1);
            write_json(out, &serde_json::Value::Null)?;
            Ok(true)
        }
    }
}

fn witness_error(e: witness::WitnessError) -> HarnessError {
    usage(e.to_string())
}

/// Ok(false) signals a hard invariant failure.
fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Gen { graph, out } => {
            let spec = graph.spec()?;
            let format = match out.format {
                None | Some(Format::Edgelist) => EdgeFormat::EdgeList,
                Some(Format::Dimacs) => EdgeFormat::Dimacs,
                Some(_) => return Err(usage("gen writes edgelist or dimacs".into())),
            };
            let mut w = sink(&out)?;
            spec.export_edgelist(&mut w, format)?;
            w.flush()?;
            Ok(true)
        }
        Command::Invariants { graph, out, limits } => {
            let spec = graph.spec()?;
            let record = harness::run_cell(&spec, &limits.limits());
            let ok = !record.has_hard_failure();
            match out.format {
                Some(Format::Csv) => write_records(&out, std::slice::from_ref(&record))?,
                _ => write_json(&out, &record)?,
            }
            Ok(ok)
        }
        Command::Verify { grid, q, m, i, j, all_ij: _, out, limits } => {
            let expr = match grid {
                Some(g) => g,
                None => {
                    let q = q.ok_or_else(|| usage("verify needs --grid or --q and --m".into()))?;
                    let m = m.ok_or_else(|| usage("verify needs --m".into()))?;
                    let ij = match (i, j) {
                        (Some(i), Some(j)) => format!("{i}:{j}"),
                        _ => "all".to_string(),
                    };
                    format!("q={q};m={m};ij={ij}")
                }
            };
            let grid = GridSpec::parse(&expr, limits.limits())?;
            let records = harness::run_grid(&grid)?;
            write_records(&out, &records)?;
            let failures: Vec<_> = records.iter().filter(|r| r.has_hard_failure()).collect();
            for r in &failures {
                eprintln!("J_{}({},{},{}): {}", r.m, r.q, r.i, r.j, r.hard_failures.join("; "));
            }
            let findings: usize = records.iter().map(|r| r.findings.len()).sum();
            eprintln!("{} cells, {} findings, {} hard failures", records.len(), findings, failures.len());
            Ok(failures.is_empty())
        }
        Command::Witness { kind } => match kind {
            WitnessKind::Path { graph, from, to, out } => {
                let spec = graph.spec()?;
                let a = harness::parse_vertex(&spec, &from)?;
                let b = harness::parse_vertex(&spec, &to)?;
                let walk = witness::path_between(&spec, a, b).map_err(witness_error)?;
                let bound = 2 * (spec.m() + 1) + (a.side != b.side) as usize;
                let report = PathReport {
                    walk: WalkRecord::new(&spec, &walk),
                    bfs_distance: distance_between(&spec, a, b),
                    bound,
                };
                write_json(&out, &report)?;
                Ok(true)
            }
            WitnessKind::Cycle4 { graph, out } => {
                let spec = graph.spec()?;
                walk_json(&spec, &out, witness::four_cycle_search(&spec), "4-cycle")
            }
            WitnessKind::Cycle6 { graph, out } => {
                let spec = graph.spec()?;
                walk_json(&spec, &out, witness::six_cycle_search(&spec), "6-cycle")
            }
            WitnessKind::Cycle8 { graph, out } => {
                let spec = graph.spec()?;
                let w = witness::eight_cycle(&spec).map_err(witness_error)?;
                walk_json(&spec, &out, Some(w), "8-cycle")
            }
        },
        Command::Search { kind } => match kind {
            SearchKind::Sigma { q, n, k, out } => {
                let xs = search_sigma_nonzero(&q, n, k).map_err(|e| usage(e.to_string()))?;
                let value = sigma(&q, k as i64, &xs);
                write_json(&out, &SearchReport { tuple: xs.iter().map(|x| x.rank()).collect(), value: value.rank() })?;
                Ok(true)
            }
            SearchKind::SigmaPair { q, n, i, j, fixed_first, out } => {
                let fixed = fixed_first.map(|r| q.element(r)).transpose()?;
                let xs = search_sigma_pair_nonzero(&q, n, i, j, fixed).map_err(|e| usage(e.to_string()))?;
                let value = sigma_pair(&q, (n - i) as i64, (n - j) as i64, &xs);
                write_json(&out, &SearchReport { tuple: xs.iter().map(|x| x.rank()).collect(), value: value.rank() })?;
                Ok(true)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
