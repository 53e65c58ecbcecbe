//! Command-line surface for the immunization model.
//!
//! Reports are plain text, one fact per line. Exit codes: 0 success, 1 for
//! usage errors and malformed files, 2 for semantic validation failures,
//! 3 when a work budget is exhausted.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use immunize_core::constructions::{
    build_subdivided_grid_example, tree_subdivision_protocol, ConstructionError,
    DEFAULT_CONSTRUCTION_VERTEX_LIMIT,
};
use immunize_core::engine::{clears, protocol_width, run, ModelParams, Protocol};
use immunize_core::graph::{isoperimetric_value, FamilySpec, Graph, SubsetBudget};
use immunize_core::pathdecomp::{pathwidth, validate, width};
use immunize_core::protocols::{
    decomposition_from_cautious, is_cautious, is_minimal, is_monotone,
    protocol_from_decomposition, ProtocolsError,
};
use immunize_core::solver::{
    immunization_number, refute_width, refute_width_one, upper_bound_pathwidth, Budget,
    Certificate, LowerEvidence, SolverError,
};
use immunize_core::{graph, io};

#[derive(Parser)]
#[command(name = "immunize", version, about = "Discrete-time immunization model on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    /// Graph file.
    #[arg(short = 'g', long = "graph")]
    graph: PathBuf,
    /// Accept disconnected graphs.
    #[arg(long)]
    allow_disconnected: bool,
}

#[derive(Args)]
struct ParamArgs {
    /// Protective period (steps a fresh immunization lasts).
    #[arg(long = "r")]
    r: usize,
    /// Latency period (steps from infection to contagious).
    #[arg(long = "s")]
    s: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a named family graph.
    Gen {
        /// Family: path N | cycle N | star M | spider-k13 | caterpillar C1,C2,... |
        /// grid N | petersen | mary-tree M D | hatted-mary-tree M D
        family: Vec<String>,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Run a protocol and report whether it clears.
    Simulate {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(short = 'p', long = "protocol")]
        protocol: PathBuf,
        /// Dump the full color-class history.
        #[arg(long)]
        trace: bool,
    },
    /// Evaluate one protocol property.
    Check {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(short = 'p', long = "protocol")]
        protocol: PathBuf,
        #[arg(long, value_parser = ["clears", "minimal", "monotone", "cautious"])]
        property: String,
    },
    /// Strip frivolous immunizations from a clearing protocol.
    Minimize {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(short = 'p', long = "protocol")]
        protocol: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Compute the exact immunization number with certificates.
    Solve {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        params: ParamArgs,
        /// Stop after this width even if unresolved.
        #[arg(long)]
        max_width: Option<usize>,
        /// State budget for the reachability search.
        #[arg(long)]
        budget: Option<usize>,
        /// Write the upper certificate (witness protocol) here.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        /// Write the lower certificate here.
        #[arg(long = "out-lower")]
        out_lower: Option<PathBuf>,
    },
    /// Report a provable lower or upper bound with a certificate.
    Bound {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_parser = ["lower", "upper"])]
        kind: String,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Exact pathwidth with a witness decomposition.
    Pathwidth {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Build a cautious clearing protocol from a path decomposition.
    Pd2proto {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(short = 'd', long = "decomposition")]
        decomposition: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Recover a path decomposition from a cautious protocol.
    Proto2pd {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(short = 'p', long = "protocol")]
        protocol: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Subdivide a tree so that two immunizers suffice, with the protocol.
    ConstructTree {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long = "out-graph")]
        out_graph: PathBuf,
        #[arg(long = "out-proto")]
        out_proto: PathBuf,
    },
    /// Emit the 46-vertex subdivided grid example and its width-2 protocol.
    ConstructGridExample {
        #[arg(long = "out-graph")]
        out_graph: PathBuf,
        #[arg(long = "out-proto")]
        out_proto: PathBuf,
    },
    /// Exact minimum boundary size over all k-subsets.
    Isoperimetric {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(short = 'k')]
        k: usize,
    },
}

enum CliError {
    /// Malformed files, unknown parameters, out-of-range ids.
    Input(String),
    /// Semantically invalid data (bad decomposition, non-cautious protocol).
    Validation(String),
    /// A work budget was exhausted.
    Exhausted(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Exhausted(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Validation(m) | CliError::Exhausted(m) => m,
        }
    }
}

fn input_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn from_solver(e: SolverError) -> CliError {
    match e {
        SolverError::StatesExhausted(_)
        | SolverError::SubsetsExhausted
        | SolverError::PathwidthExhausted(_) => CliError::Exhausted(e.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

fn from_construction(e: ConstructionError) -> CliError {
    match e {
        ConstructionError::Budget { .. } => CliError::Exhausted(e.to_string()),
        ConstructionError::NotATree | ConstructionError::BadParameter(_) => {
            CliError::Input(e.to_string())
        }
        other => CliError::Validation(other.to_string()),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_graph(arg: &GraphArg) -> Result<Graph, CliError> {
    let text = read_file(&arg.graph)?;
    io::parse_graph(&text, arg.allow_disconnected).map_err(input_err)
}

fn load_protocol(path: &Path, g: &Graph) -> Result<Protocol, CliError> {
    let text = read_file(path)?;
    io::parse_protocol(&text, g.vertex_count()).map_err(input_err)
}

fn model_params(args: &ParamArgs) -> Result<ModelParams, CliError> {
    ModelParams::new(args.r, args.s).map_err(input_err)
}

fn env_budget() -> Budget {
    let mut budget = Budget::default();
    if let Some(v) = env_usize("IMMUNIZE_MAX_STATES") {
        budget.max_states = v;
    }
    if let Some(v) = env_usize("IMMUNIZE_MAX_SUBSETS") {
        budget.max_subsets = v as u64;
    }
    if let Some(v) = env_usize("IMMUNIZE_PW_LIMIT") {
        budget.max_pathwidth_vertices = v;
    }
    budget
}

fn env_usize(name: &str) -> Option<usize> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

fn parse_family(tokens: &[String]) -> Result<FamilySpec, CliError> {
    let need = |n: usize| -> Result<(), CliError> {
        if tokens.len() != n + 1 {
            return Err(CliError::Input(format!(
                "family {:?} takes {n} parameter(s)",
                tokens[0]
            )));
        }
        Ok(())
    };
    let int = |s: &String| -> Result<usize, CliError> {
        s.parse()
            .map_err(|_| CliError::Input(format!("invalid number {s:?}")))
    };
    if tokens.is_empty() {
        return Err(CliError::Input("missing family name".to_string()));
    }
    match tokens[0].as_str() {
        "path" => {
            need(1)?;
            Ok(FamilySpec::Path(int(&tokens[1])?))
        }
        "cycle" => {
            need(1)?;
            Ok(FamilySpec::Cycle(int(&tokens[1])?))
        }
        "star" => {
            need(1)?;
            Ok(FamilySpec::Star(int(&tokens[1])?))
        }
        "spider-k13" => {
            need(0)?;
            Ok(FamilySpec::SpiderK13Subdiv)
        }
        "caterpillar" => {
            need(1)?;
            let counts: Result<Vec<usize>, _> =
                tokens[1].split(',').map(|t| t.parse::<usize>()).collect();
            match counts {
                Ok(c) => Ok(FamilySpec::Caterpillar(c)),
                Err(_) => Err(CliError::Input(format!(
                    "invalid caterpillar leaf counts {:?}",
                    tokens[1]
                ))),
            }
        }
        "grid" => {
            need(1)?;
            Ok(FamilySpec::Grid(int(&tokens[1])?))
        }
        "petersen" => {
            need(0)?;
            Ok(FamilySpec::Petersen)
        }
        "mary-tree" => {
            need(2)?;
            Ok(FamilySpec::MaryTree(int(&tokens[1])?, int(&tokens[2])?))
        }
        "hatted-mary-tree" => {
            need(2)?;
            Ok(FamilySpec::HattedMaryTree(int(&tokens[1])?, int(&tokens[2])?))
        }
        other => Err(CliError::Input(format!("unknown family {other:?}"))),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { family, out } => {
            let spec = parse_family(&family)?;
            let g = graph::generate(&spec).map_err(input_err)?;
            write_file(&out, &io::format_graph(&g))?;
            println!("vertices = {}", g.vertex_count());
            println!("edges = {}", g.edge_count());
            if let FamilySpec::HattedMaryTree(_, _) = spec {
                println!("stem = {}", g.vertex_count() - 1);
            }
            Ok(())
        }
        Command::Simulate {
            graph,
            protocol,
            trace,
        } => {
            let g = load_graph(&graph)?;
            let j = load_protocol(&protocol, &g)?;
            let t = run(&g, &j).map_err(input_err)?;
            println!("clears = {}", clears(&t));
            println!("steps = {}", j.len());
            if !j.is_empty() {
                println!("width = {}", protocol_width(&j).map_err(input_err)?);
            }
            if trace {
                print!("{}", io::format_trace(&t));
            }
            Ok(())
        }
        Command::Check {
            graph,
            protocol,
            property,
        } => {
            let g = load_graph(&graph)?;
            let j = load_protocol(&protocol, &g)?;
            let value = match property.as_str() {
                "clears" => clears(&run(&g, &j).map_err(input_err)?),
                "minimal" => is_minimal(&g, &j).map_err(input_err)?,
                "monotone" => is_monotone(&g, &j).map_err(input_err)?,
                "cautious" => is_cautious(&g, &j).map_err(input_err)?,
                _ => unreachable!("clap restricts the property values"),
            };
            println!("{property} = {value}");
            Ok(())
        }
        Command::Minimize {
            graph,
            protocol,
            out,
        } => {
            let g = load_graph(&graph)?;
            let j = load_protocol(&protocol, &g)?;
            let minimized = match immunize_core::protocols::minimize(&g, &j) {
                Ok(m) => m,
                Err(ProtocolsError::DoesNotClear) => {
                    return Err(CliError::Validation(
                        "protocol does not clear the graph".to_string(),
                    ))
                }
                Err(e) => return Err(CliError::Validation(e.to_string())),
            };
            write_file(&out, &io::format_protocol(&minimized))?;
            println!("width = {}", protocol_width(&minimized).map_err(input_err)?);
            println!("minimal = true");
            Ok(())
        }
        Command::Solve {
            graph,
            params,
            max_width,
            budget,
            out,
            out_lower,
        } => {
            let g = load_graph(&graph)?;
            let params = model_params(&params)?;
            let mut b = env_budget();
            if let Some(states) = budget {
                b.max_states = states;
            }
            if let Some(cap) = max_width {
                // Search only up to the cap; "impossible everywhere below
                // the cap" is a definite verdict, a budget hit is not.
                for k in 1..=cap {
                    match immunize_core::solver::clearable_with_width(&g, params, k, &b) {
                        immunize_core::solver::WidthDecision::Cleared(w) => {
                            println!("i = {k}");
                            if let Some(path) = &out {
                                let cert = Certificate::Upper {
                                    params,
                                    width: k,
                                    evidence: immunize_core::solver::UpperEvidence::Protocol(w),
                                };
                                write_file(path, &io::format_certificate(&cert))?;
                            }
                            return Ok(());
                        }
                        immunize_core::solver::WidthDecision::Impossible => continue,
                        immunize_core::solver::WidthDecision::Exhausted { states_visited } => {
                            return Err(CliError::Exhausted(format!(
                                "state budget exhausted after {states_visited} states"
                            )))
                        }
                    }
                }
                println!("i_greater_than = {cap}");
                return Ok(());
            }
            let result = immunization_number(&g, params, &b).map_err(from_solver)?;
            println!("i = {}", result.value);
            if let Some(path) = out {
                write_file(&path, &io::format_certificate(&result.upper))?;
            }
            if let Some(path) = out_lower {
                write_file(&path, &io::format_certificate(&result.lower))?;
            }
            Ok(())
        }
        Command::Bound {
            graph,
            params,
            kind,
            out,
        } => {
            let g = load_graph(&graph)?;
            let params = model_params(&params)?;
            let budget = env_budget();
            match kind.as_str() {
                "upper" => {
                    let (bound, cert) =
                        upper_bound_pathwidth(&g, params, &budget).map_err(from_solver)?;
                    println!("upper_bound = {bound}");
                    if let Some(path) = out {
                        write_file(&path, &io::format_certificate(&cert))?;
                    }
                }
                "lower" => {
                    let mut best = 1usize;
                    let mut cert = Certificate::Lower {
                        params,
                        width: 0,
                        evidence: LowerEvidence::TrivialNonempty,
                    };
                    if params.r == 1 && params.s == 1 {
                        if let Some(p) = refute_width_one(&g, &budget).map_err(from_solver)? {
                            let exact = isoperimetric_value(&g, p, &SubsetBudget::default())
                                .map_err(|e| CliError::Exhausted(e.to_string()))?;
                            best = 2;
                            cert = Certificate::Lower {
                                params,
                                width: 1,
                                evidence: LowerEvidence::Isoperimetric {
                                    p,
                                    size_min_boundary: vec![(p, exact)],
                                },
                            };
                            let mut w = 2;
                            while let Some((p, witness)) =
                                refute_width(&g, w, &budget).map_err(from_solver)?
                            {
                                best = w + 1;
                                cert = Certificate::Lower {
                                    params,
                                    width: w,
                                    evidence: LowerEvidence::Isoperimetric {
                                        p,
                                        size_min_boundary: witness,
                                    },
                                };
                                w += 1;
                            }
                        } else if g.edge_count() >= 1 && !graph::is_caterpillar(&g) {
                            best = 2;
                            cert = Certificate::Lower {
                                params,
                                width: 1,
                                evidence: LowerEvidence::NonCaterpillar,
                            };
                        }
                    }
                    println!("lower_bound = {best}");
                    if let Some(path) = out {
                        write_file(&path, &io::format_certificate(&cert))?;
                    }
                }
                _ => unreachable!("clap restricts the kind values"),
            }
            Ok(())
        }
        Command::Pathwidth { graph, out } => {
            let g = load_graph(&graph)?;
            let budget = env_budget();
            let (pw, pd) = pathwidth(&g, budget.max_pathwidth_vertices)
                .map_err(|e| CliError::Exhausted(e.to_string()))?;
            println!("pathwidth = {pw}");
            if let Some(path) = out {
                write_file(&path, &io::format_decomposition(&pd))?;
            }
            Ok(())
        }
        Command::Pd2proto {
            graph,
            decomposition,
            params,
            out,
        } => {
            let g = load_graph(&graph)?;
            let params = model_params(&params)?;
            let text = read_file(&decomposition)?;
            let pd = io::parse_decomposition(&text, g.vertex_count()).map_err(input_err)?;
            let report = validate(&g, &pd);
            if !report.is_valid() {
                return Err(CliError::Validation(format!(
                    "invalid decomposition: {report}"
                )));
            }
            let j = protocol_from_decomposition(&g, &pd, params)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            write_file(&out, &io::format_protocol(&j))?;
            println!("steps = {}", j.len());
            println!("width = {}", protocol_width(&j).map_err(input_err)?);
            Ok(())
        }
        Command::Proto2pd {
            graph,
            protocol,
            out,
        } => {
            let g = load_graph(&graph)?;
            let j = load_protocol(&protocol, &g)?;
            let pd = match decomposition_from_cautious(&g, &j) {
                Ok(pd) => pd,
                Err(ProtocolsError::NotCautious) => {
                    return Err(CliError::Validation(
                        "protocol is not cautious".to_string(),
                    ))
                }
                Err(e) => return Err(CliError::Validation(e.to_string())),
            };
            write_file(&out, &io::format_decomposition(&pd))?;
            println!("bags = {}", pd.len());
            println!("width = {}", width(&pd).map_err(input_err)?);
            Ok(())
        }
        Command::ConstructTree {
            graph,
            out_graph,
            out_proto,
        } => {
            let g = load_graph(&graph)?;
            let result = tree_subdivision_protocol(&g, DEFAULT_CONSTRUCTION_VERTEX_LIMIT)
                .map_err(from_construction)?;
            write_file(&out_graph, &io::format_graph(&result.subdivided))?;
            write_file(&out_proto, &io::format_protocol(&result.protocol))?;
            println!("vertices = {}", result.subdivided.vertex_count());
            println!("steps = {}", result.protocol.len());
            println!(
                "width = {}",
                protocol_width(&result.protocol).map_err(input_err)?
            );
            Ok(())
        }
        Command::ConstructGridExample {
            out_graph,
            out_proto,
        } => {
            let (g, j) = build_subdivided_grid_example().map_err(from_construction)?;
            write_file(&out_graph, &io::format_graph(&g))?;
            write_file(&out_proto, &io::format_protocol(&j))?;
            println!("vertices = {}", g.vertex_count());
            println!("steps = {}", j.len());
            println!("width = {}", protocol_width(&j).map_err(input_err)?);
            Ok(())
        }
        Command::Isoperimetric { graph, k } => {
            let g = load_graph(&graph)?;
            if k < 1 || k > g.vertex_count() {
                return Err(CliError::Input(format!(
                    "k must be between 1 and {}",
                    g.vertex_count()
                )));
            }
            let budget = SubsetBudget {
                max_subsets: env_usize("IMMUNIZE_MAX_SUBSETS")
                    .map(|v| v as u64)
                    .unwrap_or(SubsetBudget::default().max_subsets),
            };
            let phi = isoperimetric_value(&g, k, &budget)
                .map_err(|e| CliError::Exhausted(e.to_string()))?;
            println!("phi = {phi}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
