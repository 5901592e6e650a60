use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stableflow::commands::{self, Generate, OracleMode, OracleOptions, Outcome};
use stableflow::{schema, Code, Error};
use stableflow_core::generate::{InstanceParams, MatchingParams};
use stableflow_core::{EnumerationBudget, Objective};

/// Stable flows with forced, forbidden and free edges.
///
/// Exit codes: 0 ok, 2 negative verdict, 1 error.
#[derive(Parser)]
#[command(version, arg_required_else_help = true)]
struct Cli {
    /// Print the JSON schema NAME, or all schemas, and exit
    #[arg(long, value_name = "NAME", num_args = 0..=1, default_missing_value = "all")]
    schema: Option<String>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file for structural problems
    Validate {
        file: PathBuf,
        /// The file is a matching instance
        #[arg(long)]
        matching: bool,
    },
    /// Compute a stable flow
    Solve {
        file: PathBuf,
        /// Honour forced and forbidden edges
        #[arg(long)]
        restricted: bool,
        /// Write the result here instead of standard output
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check a flow for feasibility and stability
    Check {
        instance: PathBuf,
        flow: PathBuf,
        /// Free edges never take part in blocking walks
        #[arg(long)]
        free_aware: bool,
        /// Also enforce forced and forbidden bounds
        #[arg(long)]
        bounds: bool,
    },
    /// Exhaustive search on small instances
    Oracle {
        #[arg(value_enum)]
        mode: Mode,
        file: PathBuf,
        #[arg(long, value_enum, default_value = "max")]
        objective: Goal,
        /// Honour the instance's free edges
        #[arg(long)]
        free: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Replace ties of a matching instance by the gadget
    Gadget {
        file: PathBuf,
        /// Emit the result as a flow instance
        #[arg(long)]
        flow: bool,
    },
    /// Generate an instance
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// All stable flows
    Enumerate,
    /// Best stable flow value
    Optimal,
    /// Whether all stable flows share one terminal profile
    Invariance,
    /// A stable flow meeting all restrictions
    Restricted,
}

#[derive(Clone, Copy, ValueEnum)]
enum Goal {
    Max,
    Min,
}

#[derive(Args)]
struct BudgetArgs {
    /// Largest number of edges searched
    #[arg(long, default_value_t = EnumerationBudget::default().max_edges)]
    max_edges: usize,
    /// Largest edge capacity searched
    #[arg(long, default_value_t = EnumerationBudget::default().max_capacity)]
    max_capacity: u64,
    /// Search states before giving up
    #[arg(long, default_value_t = EnumerationBudget::default().max_states)]
    budget: u64,
    /// Wall-clock limit in seconds
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    /// The unit-capacity network with one free edge
    FreeEdge,
    /// The matching instance with one tie
    Tie,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit a matching instance
    #[arg(long, conflicts_with = "example")]
    matching: bool,
    /// Emit a fixed example instead of a random one
    #[arg(long, value_enum)]
    example: Option<Example>,
    #[arg(long, default_value_t = 6)]
    vertices: usize,
    #[arg(long, default_value_t = 8)]
    edges: usize,
    #[arg(long, default_value_t = 1)]
    min_capacity: u64,
    #[arg(long, default_value_t = 2)]
    max_capacity: u64,
    #[arg(long, default_value_t = 0.35)]
    terminal_fraction: f64,
    #[arg(long)]
    loops: bool,
    #[arg(long, default_value_t = 0.0)]
    forced_density: f64,
    #[arg(long, default_value_t = 0)]
    max_forced: usize,
    #[arg(long, default_value_t = 0.0)]
    forbidden_density: f64,
    #[arg(long, default_value_t = 0)]
    max_forbidden: usize,
    /// Restriction bounds strictly inside the capacity range
    #[arg(long)]
    partial_bounds: bool,
    #[arg(long, default_value_t = 0.0)]
    free_density: f64,
    #[arg(long, default_value_t = 4)]
    men: usize,
    #[arg(long, default_value_t = 4)]
    women: usize,
    /// Chance that a man-woman pair is acceptable
    #[arg(long, default_value_t = 0.6)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    ties: usize,
}

impl GenArgs {
    fn target(&self) -> Generate {
        match self.example {
            Some(Example::FreeEdge) => return Generate::FreeEdge,
            Some(Example::Tie) => return Generate::TieFigure,
            None => {}
        }
        if self.matching {
            return Generate::Matching(MatchingParams {
                men: self.men,
                women: self.women,
                density: self.density,
                max_ties: self.ties,
                free_density: self.free_density,
            });
        }
        Generate::Flow(InstanceParams {
            vertices: self.vertices,
            edges: self.edges,
            min_capacity: self.min_capacity,
            max_capacity: self.max_capacity,
            terminal_fraction: self.terminal_fraction,
            allow_loops: self.loops,
            forced_density: self.forced_density,
            max_forced: self.max_forced,
            forbidden_density: self.forbidden_density,
            max_forbidden: self.max_forbidden,
            partial_bounds: self.partial_bounds,
            free_density: self.free_density,
        })
    }
}

fn check_probabilities(args: &GenArgs) -> Result<(), String> {
    let named = [
        ("terminal-fraction", args.terminal_fraction),
        ("forced-density", args.forced_density),
        ("forbidden-density", args.forbidden_density),
        ("free-density", args.free_density),
        ("density", args.density),
    ];
    for (name, p) in named {
        if !(0.0..=1.0).contains(&p) {
            return Err(format!("--{name} must lie in [0, 1], got {p}"));
        }
    }
    Ok(())
}

fn run(command: Command) -> Result<(Outcome, Option<PathBuf>), Error> {
    Ok(match command {
        Command::Validate { file, matching } => (commands::validate_file(&file, matching)?, None),
        Command::Solve {
            file,
            restricted,
            output,
        } => (commands::solve(&file, restricted)?, output),
        Command::Check {
            instance,
            flow,
            free_aware,
            bounds,
        } => (commands::check(&instance, &flow, free_aware, bounds)?, None),
        Command::Oracle {
            mode,
            file,
            objective,
            free,
            budget,
        } => {
            let mode = match mode {
                Mode::Enumerate => OracleMode::Enumerate,
                Mode::Optimal => OracleMode::Optimal,
                Mode::Invariance => OracleMode::Invariance,
                Mode::Restricted => OracleMode::Restricted,
            };
            let opts = OracleOptions {
                objective: match objective {
                    Goal::Max => Objective::Max,
                    Goal::Min => Objective::Min,
                },
                free,
                budget: EnumerationBudget {
                    max_edges: budget.max_edges,
                    max_capacity: budget.max_capacity,
                    max_states: budget.budget,
                    time_limit: budget.time_limit.map(Duration::from_secs_f64),
                },
            };
            (commands::oracle(&file, mode, opts)?, None)
        }
        Command::Gadget { file, flow } => (commands::gadget(&file, flow)?, None),
        Command::Gen(args) => (commands::generate(args.target(), args.seed), None),
    })
}

fn print(value: &serde_json::Value) {
    let text = serde_json::to_string_pretty(value).expect("payload serializes");
    // a closed reader (`| head`) is not an error
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(name) = cli.schema {
        return match name.as_str() {
            "all" => {
                print(&schema::all());
                ExitCode::SUCCESS
            }
            _ => match schema::schema(&name) {
                Ok(s) => {
                    print(&s);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(Code::Error as u8)
                }
            },
        };
    }
    let Some(command) = cli.command else {
        eprintln!("error: no subcommand given");
        return ExitCode::from(Code::Error as u8);
    };
    if let Command::Gen(args) = &command {
        if let Err(msg) = check_probabilities(args) {
            eprintln!("error: {msg}");
            return ExitCode::from(Code::Error as u8);
        }
    }
    match run(command) {
        Ok((outcome, output)) => {
            if let Some(path) = output {
                if let Err(e) = commands::write_payload(&path, &outcome.payload) {
                    eprintln!("error: {e}");
                    return ExitCode::from(Code::Error as u8);
                }
            } else {
                print(&outcome.payload);
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Code::Error as u8)
        }
    }
}
