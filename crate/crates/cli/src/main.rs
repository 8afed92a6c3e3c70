use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use knotforge::applications::Shading;
use knotforge_cli::*;

#[derive(Parser)]
#[command(name = "knotforge", version, about = "Knot diagram moves, robots and unknotting traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct InputArgs {
    /// Input file, or `-` for stdin.
    input: Option<PathBuf>,
    /// Input format; detected from the text when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write artifacts (traces, graphs) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run on N generated knots instead of an input file.
    #[arg(long)]
    fuzz: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ShadingArg {
    Black,
    White,
}

#[derive(Subcommand)]
enum Command {
    /// Make a diagram ascending from its basepoint.
    Robot {
        #[command(flatten)]
        io: InputArgs,
        /// Basepoint as an edge label and a direction, e.g. `3 fwd`.
        #[arg(long, num_args = 2, value_names = ["EDGE", "DIR"])]
        basepoint: Option<Vec<String>>,
        /// Also tabulate the writhe after the robot at every basepoint.
        #[arg(long)]
        all_basepoints: bool,
    },
    /// Unknot an ascending diagram by loop detours.
    Unknot {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, value_enum, default_value = "detours")]
        via: Via,
        /// Apply the robot first when the input is not ascending.
        #[arg(long)]
        robot_first: bool,
    },
    /// Unknot an ascending diagram without increasing the crossing count.
    Simplify {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long)]
        robot_first: bool,
    },
    /// Face census, Euler residual and optional loop-tangle discharge.
    Census {
        #[command(flatten)]
        io: InputArgs,
        /// Gauss label of the loop crossing.
        #[arg(long)]
        loop_tangle: Option<u32>,
    },
    /// Replay a trace and check it.
    VerifyTrace {
        trace: PathBuf,
        #[arg(long, value_enum, default_value = "any")]
        mode: TraceMode,
    },
    /// Signed checkerboard graph of a diagram.
    Graphify {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, value_enum, default_value = "black")]
        shading: ShadingArg,
    },
    /// Reduce an unlink-signed plane graph to points.
    GraphReduce {
        graph: PathBuf,
        /// Replace the signs by those the robot gives.
        #[arg(long)]
        assign_signs: bool,
    },
    /// Draw a diagram, or every step of a trace, as SVG.
    Render {
        input: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value = "render")]
        out: PathBuf,
    },
}

fn diagram(io: &InputArgs) -> Result<knotforge::codes::PlanarDiagram> {
    let Some(path) = &io.input else { bail!("no input given") };
    expect_diagram(parse_input(&read_text(path)?, io.format, None)?)
}

fn run(cli: Cli) -> Result<PipelineReport> {
    match cli.command {
        Command::Robot { io, basepoint, all_basepoints } => {
            if let Some(n) = io.fuzz {
                return cmd_fuzz("robot", n, io.seed);
            }
            let base = match basepoint {
                Some(v) => Some((v[0].parse::<u64>()?, v[1].clone())),
                None => None,
            };
            let Some(path) = &io.input else { bail!("no input given") };
            cmd_robot(&read_text(path)?, io.format, base.as_ref(), all_basepoints)
        }
        Command::Unknot { io, via: Via::Detours, robot_first } => match io.fuzz {
            Some(n) => cmd_fuzz("unknot", n, io.seed),
            None => cmd_unknot(diagram(&io)?, robot_first, io.out.as_deref()),
        },
        Command::Simplify { io, robot_first } => match io.fuzz {
            Some(n) => cmd_fuzz("simplify", n, io.seed),
            None => cmd_simplify(diagram(&io)?, robot_first, io.out.as_deref()),
        },
        Command::Census { io, loop_tangle } => match io.fuzz {
            Some(n) => cmd_fuzz("census", n, io.seed),
            None => cmd_census(diagram(&io)?, loop_tangle),
        },
        Command::VerifyTrace { trace, mode } => cmd_verify_trace(&read_text(&trace)?, mode),
        Command::Graphify { io, shading } => {
            let s = match shading {
                ShadingArg::Black => Shading::Black,
                ShadingArg::White => Shading::White,
            };
            cmd_graphify(diagram(&io)?, s, io.out.as_deref())
        }
        Command::GraphReduce { graph, assign_signs } => cmd_graph_reduce(&read_text(&graph)?, assign_signs),
        Command::Render { input, format, trace, out } => {
            let d = match &input {
                Some(p) => Some(expect_diagram(parse_input(&read_text(p)?, format, None)?)?),
                None => None,
            };
            let t = match &trace {
                Some(p) => Some(read_text(p)?),
                None => None,
            };
            cmd_render(d, t.as_deref(), &out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("KNOTFORGE_LOG")).init();
    let cli = Cli::parse();
    let name = std::env::args().nth(1).unwrap_or_default();
    match run(cli) {
        Ok(report) => {
            print!("{}", report.to_json());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let check = Check::with_detail("input accepted", false, format!("{e:#}"));
            print!("{}", PipelineReport::new(&name, None, serde_json::Value::Null, vec![check]).to_json());
            ExitCode::from(2)
        }
    }
}
