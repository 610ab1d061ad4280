use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gogkit::bstree::to_dot;
use gogkit::classify::{classify, classify_ray, Classification};
use gogkit::dynamics::Truth;
use gogkit::gfamily::{
    build_eg, default_point, parse_point, verify_ck_symbolic, verify_relations, TruncatedRep,
};
use gogkit::gog::{parse_document, Built, GogError};
use gogkit::par::{with_threads, Exec};
use gogkit::render::{self, Report};
use gogkit::words::parse_word;
use gogkit::GraphOfGroups;

const EXIT_FALSE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_PARSE: u8 = 64;
const EXIT_INVALID: u8 = 65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
    Dot,
}

#[derive(Debug, Parser)]
#[command(
    name = "gogkit",
    version,
    about = "Graphs of groups: trees, boundary actions and their C*-algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Tree depth, cylinder depth or truncation depth, depending on the command.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Word length bound for orbit simulations.
    #[arg(long, global = true)]
    wordlen: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a document.
    Validate { file: PathBuf },
    /// Level sizes and valences of the Bass-Serre tree.
    Tree {
        file: PathBuf,
        /// Root vertex (defaults to the base).
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Image of a cylinder under a group element.
    Act {
        file: PathBuf,
        #[arg(long)]
        element: String,
        #[arg(long)]
        cylinder: String,
    },
    /// Dynamics verdicts with an orbit simulation.
    Analyze { file: PathBuf },
    /// Classification of the boundary crossed product.
    Classify { file: PathBuf },
    /// Checks the G-family relations on a truncated regular representation.
    GfamilyVerify {
        file: PathBuf,
        /// Boundary point as `prefix | cycle`.
        #[arg(long)]
        xi: Option<String>,
        /// Directory for generator matrices in triplet format.
        #[arg(long)]
        matrices: Option<PathBuf>,
    },
    /// The Bass-Serre tree in DOT format.
    ExportDot {
        file: PathBuf,
        /// Export the directed graph E_G instead of the tree.
        #[arg(long)]
        eg: bool,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl ToString) -> Failure {
    Failure {
        code,
        msg: msg.to_string(),
    }
}

fn load(path: &Path) -> Result<Built, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let doc = parse_document(&text).map_err(|e| fail(EXIT_PARSE, e))?;
    doc.build().map_err(|e| match e {
        GogError::Invalid(r) => fail(EXIT_INVALID, render::invalid_report(&r).text().trim_end()),
        e @ (GogError::Parse { .. } | GogError::UnknownVertex(_) | GogError::UnknownEdge(_)) => {
            fail(EXIT_PARSE, e)
        }
        other => fail(EXIT_INVALID, other),
    })
}

fn graph(built: Built) -> Result<GraphOfGroups, Failure> {
    match built {
        Built::Graph(g) => Ok(g),
        Built::Ray(_) => Err(fail(EXIT_PARSE, GogError::NotAGraph)),
    }
}

fn truth_code(t: Truth) -> u8 {
    match t {
        Truth::True => 0,
        Truth::False => EXIT_FALSE,
        Truth::Unknown => EXIT_UNKNOWN,
    }
}

fn emit(report: &Report, format: Format) -> Result<String, Failure> {
    match format {
        Format::Text => Ok(report.text()),
        Format::Machine => Ok(report.machine()),
        Format::Dot => Err(fail(
            EXIT_PARSE,
            format!("{} has no DOT output", report.command),
        )),
    }
}

fn file_name(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn run(cli: Cli, exec: Exec) -> Result<(String, u8), Failure> {
    match cli.command {
        Command::Validate { file } => {
            let report = match load(&file)? {
                Built::Graph(g) => render::validation_report(&g),
                Built::Ray(r) => render::ray_validation_report(&r),
            };
            Ok((emit(&report, cli.format)?, 0))
        }
        Command::Tree { file, vertex } => {
            let g = graph(load(&file)?)?;
            let x = match vertex {
                Some(v) => g.vertex_id(&v).map_err(|e| fail(EXIT_PARSE, e))?,
                None => g.base(),
            };
            let depth = cli.depth.unwrap_or(3);
            if cli.format == Format::Dot {
                return Ok((to_dot(&g, x, depth), 0));
            }
            Ok((emit(&render::tree_report(&g, x, depth), cli.format)?, 0))
        }
        Command::Act {
            file,
            element,
            cylinder,
        } => {
            let g = graph(load(&file)?)?;
            let gamma = parse_word(&g, &element, g.base()).map_err(|e| fail(EXIT_PARSE, e))?;
            let mu =
                parse_word(&g, &cylinder, gamma.source(&g)).map_err(|e| fail(EXIT_PARSE, e))?;
            if mu.tail.is_some() {
                return Err(fail(EXIT_PARSE, format!("`{cylinder}` is not a path")));
            }
            let report = render::act_report(&g, &gamma, &mu).map_err(|e| fail(EXIT_PARSE, e))?;
            Ok((emit(&report, cli.format)?, 0))
        }
        Command::Analyze { file } => {
            let depth = cli.depth.unwrap_or(2);
            let wordlen = cli.wordlen.unwrap_or(4);
            let (report, c): (Report, Classification) = match load(&file)? {
                Built::Graph(g) => {
                    let c = classify(&g);
                    (render::analyze_report(&g, &c, depth, wordlen, exec), c)
                }
                Built::Ray(r) => {
                    let c = classify_ray(&r);
                    (render::analyze_ray_report(&r, &c, depth, wordlen), c)
                }
            };
            Ok((emit(&report, cli.format)?, truth_code(c.minimal.value)))
        }
        Command::Classify { file } => {
            let c = match load(&file)? {
                Built::Graph(g) => classify(&g),
                Built::Ray(r) => classify_ray(&r),
            };
            Ok((
                emit(&render::classify_report(&c), cli.format)?,
                truth_code(c.simple.value),
            ))
        }
        Command::GfamilyVerify { file, xi, matrices } => {
            let g = graph(load(&file)?)?;
            let depth = cli.depth.unwrap_or(3);
            let eg = build_eg(&g);
            if cli.format == Format::Dot {
                return Ok((eg.to_dot(&g), 0));
            }
            let point = match &xi {
                Some(s) => parse_point(&g, s, g.base()).map_err(|e| fail(EXIT_PARSE, e))?,
                None => default_point(&g),
            };
            let shown = point.show(&g);
            let ck =
                verify_ck_symbolic(&g, depth.max(4), exec).map_err(|e| fail(EXIT_INVALID, e))?;
            let rep =
                TruncatedRep::build(&g, point, depth, exec).map_err(|e| fail(EXIT_PARSE, e))?;
            let rel = verify_relations(&rep, exec);
            if let Some(dir) = matrices {
                fs::create_dir_all(&dir)
                    .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", dir.display())))?;
                for s in &rep.gens {
                    let path = dir.join(format!("{}.mtx", file_name(&s.name(&g))));
                    fs::write(&path, rep.op(s).triplets())
                        .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
                }
            }
            let ok = rel.all_hold() && ck.holds();
            let report = render::gfamily_report(&shown, depth, &eg, &ck, &rel);
            Ok((emit(&report, cli.format)?, if ok { 0 } else { EXIT_FALSE }))
        }
        Command::ExportDot { file, eg } => {
            let g = graph(load(&file)?)?;
            if eg {
                return Ok((build_eg(&g).to_dot(&g), 0));
            }
            Ok((to_dot(&g, g.base(), cli.depth.unwrap_or(3)), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = std::env::var("GOGKIT_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok());
    let exec = with_threads(threads.filter(|&n| n > 0));
    match run(cli, exec) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
