use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use renormlab::{run_scenario, verify_all, ScenarioConfig, ScenarioError, CATALOG};

#[derive(Parser)]
#[command(name = "renormlab", version, about = "Certified checks of invariant renormings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a single scenario and print its JSON report.
    Run {
        scenario: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// List scenarios with the result each one exercises.
    List,
    /// Run every scenario and print a combined report.
    VerifyAll {
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    /// Starting enclosure radius, as a rational `p/q`.
    #[arg(long, default_value = "1/18446744073709551616")]
    precision: String,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    window: Option<i64>,
    #[arg(long)]
    depth: Option<u32>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Opts {
    fn config(&self) -> Result<ScenarioConfig, ScenarioError> {
        let cfg = ScenarioConfig {
            seed: self.seed,
            trials: self.trials,
            precision: ScenarioConfig::parse_precision(&self.precision)?,
            dim: self.dim,
            window: self.window,
            depth: self.depth,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn emit(&self, json: &str) -> Result<(), ScenarioError> {
        match &self.out {
            Some(p) => std::fs::write(p, format!("{json}\n")).map_err(ScenarioError::from),
            None => {
                println!("{json}");
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::List => {
            for s in CATALOG {
                println!("{} — {}", s.name, s.result);
            }
            Ok(0)
        }
        Cmd::Run { scenario, opts } => opts
            .config()
            .and_then(|cfg| run_scenario(&scenario, &cfg))
            .and_then(|r| opts.emit(&r.to_json()).map(|_| r.exit_code())),
        Cmd::VerifyAll { opts } => opts
            .config()
            .and_then(|cfg| verify_all(&cfg))
            .and_then(|r| opts.emit(&r.to_json()).map(|_| r.exit_code())),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
