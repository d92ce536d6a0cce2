use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cover_core::harness::check::{run_checks, CheckSettings};
use cover_core::harness::{
    emit_coverage_comparison, emit_plots, emit_summary_plot, Experiment, Method, Scenario,
};

#[derive(Parser)]
#[command(
    name = "cover",
    version,
    about = "Weighted-D² seeding and Lloyd descent for sensor coverage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw an initial sensor configuration.
    Sample(ScenarioArgs),
    /// Draw an initial configuration and run the descent.
    Descend(ScenarioArgs),
    /// Run every trial of a scenario and write trials.csv / summary.csv.
    Experiment {
        #[command(flatten)]
        args: ScenarioArgs,
        /// Run the three reference scenarios (k, ε) = (10, 0.1), (10, 0.05), (20, 0.05).
        #[arg(long, conflicts_with_all = ["scenario", "k", "epsilon"])]
        reference: bool,
    },
    /// Run the verification suite; exits non-zero if any check fails.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random instances per oracle check.
        #[arg(long, default_value_t = 100)]
        instances: usize,
        /// Monte-Carlo trials per instance.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Descent runs for the end-to-end bound (0 skips it).
        #[arg(long, default_value_t = 10)]
        runs: usize,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in scenario: `paper` or `paper-printed`.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Restrict to one method (`weighted_d2` or `uniform`).
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    runs: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG figures (with CSV duals) into the output directory.
    #[arg(long, requires = "out")]
    plots: bool,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario> {
        let base = match (&self.scenario, &self.preset) {
            (Some(path), _) => {
                Scenario::load(path).with_context(|| format!("loading {}", path.display()))?
            }
            (None, Some(name)) => Scenario::named(name)?,
            (None, None) => Scenario::named("paper")?,
        };
        self.apply(base)
    }

    fn apply(&self, mut s: Scenario) -> Result<Scenario> {
        if let Some(k) = self.k {
            s.k = k;
        }
        if let Some(eps) = self.epsilon {
            s.epsilon = eps;
        }
        if let Some(m) = self.method {
            s.methods = vec![m];
        }
        if let Some(runs) = self.runs {
            s.runs = runs;
        }
        if let Some(seed) = self.seed {
            s.master_seed = seed;
        }
        s.validate()?;
        Ok(s)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sample(args) => sample(&args)?,
        Command::Descend(args) => descend(&args)?,
        Command::Experiment { args, reference } => {
            if reference {
                if args.preset.is_some() {
                    bail!("--reference uses the built-in setup; drop --preset");
                }
                for (i, s) in Scenario::paper_scenarios().into_iter().enumerate() {
                    let s = args.apply(s)?;
                    let out = args
                        .out
                        .as_ref()
                        .map(|d| d.join(format!("scenario{}", i + 1)));
                    experiment(&s, out.as_deref(), args.plots)?;
                }
            } else {
                experiment(&args.load()?, args.out.as_deref(), args.plots)?;
            }
        }
        Command::Check {
            seed,
            instances,
            trials,
            runs,
        } => {
            let settings = CheckSettings {
                seed,
                instances,
                trials,
                descent_runs: runs,
                ..CheckSettings::default()
            };
            let outcomes = run_checks(&settings)?;
            for o in &outcomes {
                println!("{o}");
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} checks, {failed} failed", outcomes.len());
            return Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sample(args: &ScenarioArgs) -> Result<()> {
    let s = args.load()?;
    let exp = Experiment::new(&s)?;
    let run_id = 0;
    for &m in &s.methods {
        let p = exp.initial_configuration(m, run_id)?;
        let h = exp.initial_cost(m, run_id)?;
        println!("# {m}: k = {}, H = {h:.6}", s.k);
        println!("x,y");
        for q in &p.positions {
            println!("{},{}", q.x, q.y);
        }
        if let Some(dir) = &args.out {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{m}_initial.json"));
            std::fs::write(&path, serde_json::to_string_pretty(&p)?)?;
        }
    }
    Ok(())
}

fn descend(args: &ScenarioArgs) -> Result<()> {
    let s = args.load()?;
    let exp = Experiment::new(&s)?;
    let mut curves = Vec::new();
    for &m in &s.methods {
        let (rec, trace) = exp.trace(m, 0)?;
        println!(
            "{m}: H {:.6} -> {:.6}, {} iterations ({}), mean distance {:.4}",
            rec.initial_h,
            rec.final_h,
            rec.iterations,
            if rec.converged {
                "converged"
            } else {
                "budget exhausted"
            },
            rec.mean_distance
        );
        if let Some(dir) = &args.out {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{m}_final.json"));
            std::fs::write(&path, serde_json::to_string_pretty(trace.last())?)?;
            if args.plots {
                for f in emit_plots(&trace, &s.density, &s.domain, dir, m.as_str())? {
                    println!("wrote {}", f.display());
                }
            }
        }
        curves.push((m.as_str(), trace.coverage_history));
    }
    if let (Some(dir), true) = (&args.out, args.plots) {
        let refs: Vec<(&str, &[f64])> = curves.iter().map(|(l, c)| (*l, c.as_slice())).collect();
        for f in emit_coverage_comparison(&refs, dir, "coverage")? {
            println!("wrote {}", f.display());
        }
    }
    Ok(())
}

fn experiment(s: &Scenario, out: Option<&Path>, plots: bool) -> Result<()> {
    let exp = Experiment::new(s)?;
    let result = exp.run();
    print!("{}", result.summary);
    for f in &result.failures {
        eprintln!("run {} ({}) failed: {}", f.run_id, f.method, f.error);
    }
    if let Some(dir) = out {
        result.write(dir)?;
        s.save(dir.join("scenario.json"))?;
        println!("wrote {}", dir.display());
        if plots {
            emit_summary_plot(&result.summary, dir, "summary_plot")?;
            let mut curves = Vec::new();
            for &m in &s.methods {
                let (_, trace) = exp.trace(m, 0)?;
                emit_plots(&trace, &s.density, &s.domain, dir, &format!("run0_{m}"))?;
                curves.push((m.as_str(), trace.coverage_history));
            }
            let refs: Vec<(&str, &[f64])> =
                curves.iter().map(|(l, c)| (*l, c.as_slice())).collect();
            emit_coverage_comparison(&refs, dir, "run0_coverage")?;
        }
    }
    if result.records.is_empty() {
        bail!("every trial failed");
    }
    Ok(())
}
