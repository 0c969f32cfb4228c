use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use multirat::harness::{self, ExperimentSpec, GroupKey, Instance, SolverKind, SolverRun};
use multirat::scenario::{self, ScenarioConfig};
use multirat::{ChannelParams, Execution};

#[derive(Parser)]
#[command(
    name = "multirat",
    version,
    about = "Multi-RAT user association and bandwidth allocation under jamming"
)]
struct Cli {
    /// Run single-threaded even when built with parallel support.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a scenario and write it as JSON.
    Generate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one instance with one solver and print the report as JSON.
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Load the scenario from a file instead of drawing it.
        #[arg(long)]
        scenario_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SolverArg::Heuristic)]
        solver: SolverArg,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        zeta: u8,
        #[arg(long, default_value_t = 1.0)]
        lm: f64,
        /// Refinement stopping threshold, Mbit/s.
        #[arg(long, default_value_t = 0.001)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        /// Include the association and bandwidth matrices in the output.
        #[arg(long)]
        assignment: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a paired sweep and write one CSV row per solver run.
    Sweep {
        #[arg(long, value_enum, default_value_t = Preset::Desk)]
        preset: Preset,
        #[arg(long)]
        seed: Option<u64>,
        /// UE counts to sweep (comma separated).
        #[arg(long, value_delimiter = ',')]
        users: Vec<usize>,
        #[arg(long)]
        bs: Option<usize>,
        #[arg(long)]
        ap: Option<usize>,
        #[arg(long)]
        jammers: Option<usize>,
        /// Per-UE connection limits to sweep (comma separated).
        #[arg(long, value_delimiter = ',')]
        multi_conn: Vec<usize>,
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(0..=1))]
        zeta: Vec<u8>,
        #[arg(long, value_delimiter = ',')]
        lm: Vec<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, value_delimiter = ',')]
        solver: Vec<SolverArg>,
        #[arg(long)]
        reps: Option<usize>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-U mean and standard deviation per solver series.
        #[arg(long)]
        plot_out: Option<PathBuf>,
        /// Record wall times as 0 so the CSV is byte-stable.
        #[arg(long)]
        deterministic: bool,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long, value_enum, default_value_t = Preset::Desk)]
    preset: Preset,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    bs: Option<usize>,
    #[arg(long)]
    ap: Option<usize>,
    #[arg(long)]
    jammers: Option<usize>,
    #[arg(long)]
    multi_conn: Option<usize>,
}

impl ScenarioArgs {
    fn config(&self) -> ScenarioConfig {
        let mut cfg = self.preset.config();
        cfg.rng_seed = self.seed;
        override_counts(&mut cfg, self.bs, self.ap, self.jammers);
        if let Some(u) = self.users {
            cfg.num_ue = u;
        }
        if let Some(j) = self.multi_conn {
            cfg.multi_conn = j;
        }
        cfg
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Desk,
    Paper,
}

impl Preset {
    fn config(self) -> ScenarioConfig {
        match self {
            Preset::Desk => ScenarioConfig::desk(),
            Preset::Paper => ScenarioConfig::paper(),
        }
    }

    fn spec(self) -> ExperimentSpec {
        match self {
            Preset::Desk => ExperimentSpec::desk(),
            Preset::Paper => ExperimentSpec::paper(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Heuristic,
    Baseline,
    Oracle,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Heuristic => SolverKind::Heuristic,
            SolverArg::Baseline => SolverKind::Baseline,
            SolverArg::Oracle => SolverKind::Oracle,
        }
    }
}

fn override_counts(
    cfg: &mut ScenarioConfig,
    bs: Option<usize>,
    ap: Option<usize>,
    jammers: Option<usize>,
) {
    if let Some(n) = bs {
        cfg.num_bs = n;
    }
    if let Some(n) = ap {
        cfg.num_ap = n;
    }
    if let Some(n) = jammers {
        cfg.num_jammers = n;
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };

    match cli.command {
        Command::Generate {
            scenario: args,
            out,
        } => {
            let s = scenario::generate_scenario(&args.config())?;
            let mut w = sink(out.as_deref())?;
            scenario::save_scenario(&s, &mut w)?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Solve {
            scenario: args,
            scenario_file,
            solver,
            zeta,
            lm,
            epsilon,
            max_iters,
            assignment,
            out,
        } => {
            let s = match scenario_file {
                Some(p) => {
                    let f = File::open(&p).with_context(|| format!("opening {}", p.display()))?;
                    scenario::load_scenario(BufReader::new(f))?
                }
                None => scenario::generate_scenario(&args.config())?,
            };
            let seed = s.config.rng_seed;
            let inst = Instance::build(
                s,
                &ChannelParams::default(),
                harness::channel_seed(seed),
                exec,
            )?;
            let kind = SolverKind::from(solver);
            let run = SolverRun {
                kind,
                zeta: (kind != SolverKind::Baseline).then_some(zeta == 1),
                lm: (kind == SolverKind::Heuristic).then_some(lm),
            };
            let (a, report) = harness::run_solver(&run, &inst, epsilon, max_iters, exec)?;
            let violations = multirat::radio::validate_assignment(&a, &inst.scenario);
            if !violations.is_empty() {
                bail!("solver produced an infeasible assignment: {violations:?}");
            }
            let mut doc = serde_json::json!({
                "solver": run.label(),
                "seed": seed,
                "report": report,
            });
            if assignment {
                doc["assignment"] = serde_json::to_value(&a)?;
            }
            let mut w = sink(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Sweep {
            preset,
            seed,
            users,
            bs,
            ap,
            jammers,
            multi_conn,
            zeta,
            lm,
            epsilon,
            solver,
            reps,
            out,
            plot_out,
            deterministic,
        } => {
            let mut spec = preset.spec();
            override_counts(&mut spec.base, bs, ap, jammers);
            if let Some(s) = seed {
                spec.master_seed = s;
            }
            if !users.is_empty() {
                spec.users = users;
            }
            if !multi_conn.is_empty() {
                spec.multi_conn = multi_conn;
            }
            if !zeta.is_empty() {
                spec.zetas = zeta.into_iter().map(|z| z == 1).collect();
            }
            if !lm.is_empty() {
                spec.lms = lm;
            }
            if let Some(e) = epsilon {
                spec.epsilon_mbps = e;
            }
            if !solver.is_empty() {
                spec.solvers = solver.into_iter().map(SolverKind::from).collect();
            }
            if let Some(r) = reps {
                spec.replications = r;
            }
            spec.record_timing = !deterministic;

            let result = harness::run_experiment(&spec, exec)?;
            for s in &result.skipped {
                eprintln!(
                    "skipped: point {} rep {} seed {} {}: {}",
                    s.point, s.replication, s.seed, s.solver, s.reason
                );
            }
            let mut w = sink(out.as_deref())?;
            harness::emit_csv(&result.rows, &mut w)?;
            w.flush()?;
            if let Some(p) = plot_out {
                harness::emit_plot_data(
                    &result.rows,
                    &[GroupKey::Users, GroupKey::MultiConn],
                    sink(Some(&p))?,
                )?;
            }
        }
    }
    Ok(())
}
