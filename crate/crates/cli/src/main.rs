use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use hypermatch::format::{to_json, AuctionFile, DecompositionFile, InstanceFile};
use hypermatch::local_ratio::{hdm, TraceLevel};
use hypermatch::oracle::{
    gen_projective_plane, gen_truncated_plane, integrality_gap, BruteForce, DEFAULT_BUDGET,
};
use hypermatch::packing::decompose_with;
use hypermatch::rational::{self, int, Rational};
use hypermatch::reductions::{auction_to_bipartite, sample_allocation, solve_bounded_color};
use hypermatch::report::{ReportView, SolveReport};
use hypermatch::{lp, BMatchInstance, Error, ErrorKind, Result};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hypermatch", version, about = "Exact LP-relative hypergraph matching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args, Clone)]
struct Opts {
    /// Instance file; repeat to process several.
    #[arg(long, global = true)]
    instance: Vec<PathBuf>,
    /// Require and use the embedded bipartite witness.
    #[arg(long, global = true, conflicts_with = "general")]
    bipartite: bool,
    /// Ignore any embedded bipartite witness.
    #[arg(long, global = true)]
    general: bool,
    /// Also compute the integral optimum by brute force.
    #[arg(long, global = true)]
    oracle: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    trace: bool,
    /// Omit wall-clock times so output is reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Node budget for the brute-force oracle.
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Worker threads across instance files.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Solve the LP relaxation to an exact vertex.
    SolveLp,
    /// Decompose the LP optimum into feasible integral b-matchings.
    Decompose {
        /// Save the decomposition for `verify`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reduce the term count with Carathéodory pruning.
        #[arg(long)]
        prune: bool,
    },
    /// Local-ratio demand matching.
    DemandMatch,
    /// Bounded-color matching through the bipartite reduction.
    BoundedColor,
    /// Sample an allocation for a combinatorial auction file.
    Auction,
    /// LP, ILP and decomposition ratio of an instance.
    Gap,
    /// Write a tight-gap instance.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a saved decomposition against its instance.
    Verify {
        #[arg(long)]
        decomposition: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum Family {
    /// Projective plane PG(2,q).
    Pg,
    /// Dual of the affine plane AG(2,q), with a bipartite witness.
    Truncated,
}

struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn json<T: Serialize>(value: &T) -> Self {
        Output { text: to_json(value), ok: true }
    }
}

fn fmt_all(values: &[Rational]) -> Vec<String> {
    values.iter().map(rational::format).collect()
}

struct Run<'a> {
    opts: &'a Opts,
    start: Instant,
}

impl Run<'_> {
    fn elapsed(&self) -> Option<u128> {
        (!self.opts.no_timing).then(|| self.start.elapsed().as_micros())
    }

    fn oracle(&self) -> BruteForce {
        BruteForce::with_budget(self.opts.budget.unwrap_or(DEFAULT_BUDGET))
    }

    fn bmatch(&self, path: &Path) -> Result<BMatchInstance> {
        let inst = InstanceFile::read(path)?.to_bmatch()?;
        if self.opts.bipartite && inst.bipartite_witness.is_none() {
            return Err(Error::InvalidWitness(format!(
                "{} has no bipartite_u, but --bipartite was given",
                path.display()
            )));
        }
        Ok(inst)
    }
}

#[derive(Serialize)]
struct LpOutput {
    lp_value: String,
    x: Vec<String>,
    tight_constraints: usize,
    tight_rank: usize,
    is_vertex: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_us: Option<u128>,
}

#[derive(Serialize)]
struct DecomposeOutput {
    #[serde(flatten)]
    report: ReportView,
    bipartite: bool,
    expected_value: String,
    sampled_term: usize,
    sampled_value: String,
}

#[derive(Serialize)]
struct LevelView {
    edge: usize,
    scale: String,
    live: Vec<usize>,
    what: Vec<String>,
    residual: Vec<String>,
}

impl From<&TraceLevel> for LevelView {
    fn from(l: &TraceLevel) -> Self {
        LevelView {
            edge: l.edge,
            scale: rational::format(&l.scale),
            live: l.live.clone(),
            what: l.live.iter().map(|&f| rational::format(&l.what[f])).collect(),
            residual: l.live.iter().map(|&f| rational::format(&l.residual[f])).collect(),
        }
    }
}

#[derive(Serialize)]
struct DemandOutput {
    #[serde(flatten)]
    report: ReportView,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<LevelView>>,
}

#[derive(Serialize)]
struct AuctionOutput {
    assignment: Vec<Option<usize>>,
    sampled_term: usize,
    sampled_welfare: String,
    expected_welfare: String,
    lp_value: String,
    best_welfare: String,
    rho: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_welfare: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_us: Option<u128>,
}

#[derive(Serialize)]
struct GapOutput {
    lp_value: String,
    ilp_value: String,
    gap: String,
    best_term_value: String,
    decomposition_ratio: String,
    rho: String,
    bipartite: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_us: Option<u128>,
}

fn run_one(command: &Command, opts: &Opts, path: &Path) -> Result<Output> {
    let run = Run { opts, start: Instant::now() };
    match command {
        Command::SolveLp => {
            let file = InstanceFile::read(path)?;
            let program = if file.d.is_some() {
                lp::build_demand_lp(&file.to_demand()?.validate()?)
            } else {
                lp::build_bmatch_lp(&run.bmatch(path)?.validate()?)
            };
            let result = lp::solve_to_vertex(&program)?;
            let tight_rank = program.tight_rank(&result.tight);
            Ok(Output::json(&LpOutput {
                lp_value: rational::format(&result.value),
                x: fmt_all(&result.solution.values),
                tight_constraints: result.tight.len(),
                tight_rank,
                is_vertex: tight_rank == program.num_vars(),
                wall_time_us: run.elapsed(),
            }))
        }
        Command::Decompose { out, prune } => {
            let inst = run.bmatch(path)?;
            let mut dec = decompose_with(&inst, !opts.general)?;
            if *prune {
                dec.combination.caratheodory_prune();
            }
            let mut report = SolveReport::from_decomposition("decompose", &inst, &dec)?;
            if opts.oracle {
                report.oracle_ilp = Some(run.oracle().bmatch(&inst)?.0);
            }
            let sampled_term = dec.combination.sample_term(opts.seed)?;
            let sampled_value = dec.combination.terms()[sampled_term].solution.weight(&inst.w);
            let expected_value = dec.combination.expected_value(&inst.w)?;
            if let Some(out) = out {
                let file = DecompositionFile::from_combination(&dec.combination, &dec.lp.solution);
                std::fs::write(out, to_json(&file) + "\n")
                    .map_err(|e| Error::Parse(format!("{}: {e}", out.display())))?;
            }
            report.wall_time_us = run.elapsed();
            Ok(Output::json(&DecomposeOutput {
                report: report.view()?,
                bipartite: dec.bipartite,
                expected_value: rational::format(&expected_value),
                sampled_term,
                sampled_value: rational::format(&sampled_value),
            }))
        }
        Command::DemandMatch => {
            let inst = InstanceFile::read(path)?.to_demand()?.validate()?;
            let out = hdm(&inst)?;
            let lp_value = lp::solve_to_vertex(&lp::build_demand_lp(&inst))?.value;
            let k = inst.hypergraph.k().max(1) as i64;
            let oracle_ilp = if opts.oracle { Some(run.oracle().demand(&inst)?.0) } else { None };
            let report = SolveReport {
                algorithm: "demand-match".into(),
                lp_value,
                alpha: None,
                term_count: None,
                best_value: out.value,
                best_solution: out.solution,
                bound: int(2 * k),
                oracle_ilp,
                wall_time_us: run.elapsed(),
            };
            let trace = opts.trace.then(|| out.trace.levels.iter().map(LevelView::from).collect());
            Ok(Output::json(&DemandOutput { report: report.view()?, trace }))
        }
        Command::BoundedColor => {
            let ci = InstanceFile::read(path)?.to_colored()?;
            let mut sol = solve_bounded_color(&ci)?;
            if opts.oracle {
                sol.report.oracle_ilp = Some(run.oracle().bmatch(&sol.reduced)?.0);
            }
            sol.report.wall_time_us = run.elapsed();
            Ok(Output::json(&sol.report.view()?))
        }
        Command::Auction => {
            let a = AuctionFile::read(path)?.to_input();
            let outcome = sample_allocation(&a, opts.seed)?;
            let oracle_welfare = if opts.oracle {
                let (reduced, _) = auction_to_bipartite(&a)?;
                Some(rational::format(&run.oracle().bmatch(&reduced)?.0))
            } else {
                None
            };
            Ok(Output::json(&AuctionOutput {
                assignment: outcome.assignment,
                sampled_term: outcome.sampled_term,
                sampled_welfare: rational::format(&outcome.sampled_welfare),
                expected_welfare: rational::format(&outcome.expected_welfare),
                lp_value: rational::format(&outcome.lp_value),
                best_welfare: rational::format(&outcome.best_welfare),
                rho: rational::format(&outcome.rho),
                oracle_welfare,
                wall_time_us: run.elapsed(),
            }))
        }
        Command::Gap => {
            let mut inst = run.bmatch(path)?;
            if opts.general {
                inst.bipartite_witness = None;
            }
            let g = integrality_gap(&inst, &run.oracle())?;
            Ok(Output::json(&GapOutput {
                lp_value: rational::format(&g.lp_value),
                ilp_value: rational::format(&g.ilp_value),
                gap: rational::format(&g.gap),
                best_term_value: rational::format(&g.best_term_value),
                decomposition_ratio: rational::format(&g.decomposition_ratio),
                rho: rational::format(&g.rho),
                bipartite: g.bipartite,
                wall_time_us: run.elapsed(),
            }))
        }
        Command::Verify { decomposition } => {
            let inst = run.bmatch(path)?;
            let report = DecompositionFile::read(decomposition)?.verify(&inst)?;
            Ok(Output { ok: report.ok, ..Output::json(&report) })
        }
        Command::Gen { .. } => unreachable!("handled without instances"),
    }
}

fn generate(family: Family, q: u64, out: Option<&Path>) -> Result<Output> {
    let inst = match family {
        Family::Pg => gen_projective_plane(q)?,
        Family::Truncated => gen_truncated_plane(q)?,
    };
    let text = to_json(&InstanceFile::from_bmatch(&inst));
    match out {
        Some(path) => {
            std::fs::write(path, text + "\n")
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            Ok(Output { text: String::new(), ok: true })
        }
        None => Ok(Output { text, ok: true }),
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Internal => 1,
        ErrorKind::Parse => 2,
        ErrorKind::Validation => 3,
        ErrorKind::Budget => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = &cli.opts;
    let results: Vec<Result<Output>> = match &cli.command {
        Command::Gen { family, q, out } => vec![generate(*family, *q, out.as_deref())],
        command => {
            if opts.instance.is_empty() {
                eprintln!("error: --instance is required for this subcommand");
                return ExitCode::from(2);
            }
            let many_outputs = matches!(command, Command::Decompose { out: Some(_), .. });
            if many_outputs && opts.instance.len() > 1 {
                eprintln!("error: --out takes a single --instance");
                return ExitCode::from(2);
            }
            let each = |path: &PathBuf| run_one(command, opts, path);
            match opts.jobs {
                Some(jobs) if opts.instance.len() > 1 => {
                    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                        Ok(pool) => pool,
                        Err(e) => {
                            eprintln!("error: {e}");
                            return ExitCode::from(1);
                        }
                    };
                    pool.install(|| opts.instance.par_iter().map(each).collect())
                }
                _ => opts.instance.iter().map(each).collect(),
            }
        }
    };

    let mut stdout = std::io::stdout().lock();
    let mut status = 0u8;
    for (i, result) in results.into_iter().enumerate() {
        match result {
            Ok(out) => {
                // A closed pipe only means nobody reads the rest.
                if !out.text.is_empty() && writeln!(stdout, "{}", out.text).is_err() {
                    return ExitCode::from(status);
                }
                if !out.ok && status == 0 {
                    status = 1;
                }
            }
            Err(e) => {
                match opts.instance.get(i) {
                    Some(path) => eprintln!("error: {}: {e}", path.display()),
                    None => eprintln!("error: {e}"),
                }
                return ExitCode::from(exit_code(e.kind()));
            }
        }
    }
    ExitCode::from(status)
}
