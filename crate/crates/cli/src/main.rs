//! Command-line front end.
//!
//! Exit status: 0 success, 1 invalid input, 2 a verified property failed,
//! 3 usage error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use chainmail::category::k_chainmail;
use chainmail::enumeration::{count_chainmails, emit_catalog};
use chainmail::interchange::{parse_poset, poset_to_json, render_dot};
use chainmail::sources::{
    chainmail_from_connectivity_space, chainmail_from_graph, chainmail_from_hypergraph, chainmail_from_topology,
    search_connectivity_representation, ConnectivitySpace, FiniteTopology, Graph, Hypergraph,
};
use chainmail::verify::{run_suite, Suite, VerifyOptions};
use chainmail::{
    as_chainmail, as_complete_lattice, d_lattice, Budget, ElementSet, EnumerationTask, Error, Filter, Poset,
};

/// Largest enumeration size accepted without `--stretch`.
const DEFAULT_MAX_ENUMERATION: usize = 8;

#[derive(Parser)]
#[command(name = "chainmail", version, about = "Chainmails, connectivity in complete lattices, and their census")]
struct Cli {
    /// Largest poset accepted from input (overrides CHAINMAIL_BUDGET).
    #[arg(long, global = true)]
    budget: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a poset as lattice and chainmail, with witnesses.
    Check { input: PathBuf },
    /// Lattice of totally disconnected sets of a chainmail.
    Dlattice {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Chainmail of connected elements of a complete lattice.
    Klattice {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Chainmail of connected sets of a concrete structure.
    Build {
        kind: SourceKind,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run an exhaustive verification suite.
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long, hide = true)]
        seeded_fault: bool,
    },
    /// Count structures up to isomorphism for sizes 1..=n.
    Enumerate {
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, value_parser = parse_filter, default_value = "mail-connected-chainmails")]
        filter: Filter,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write one DOT file per structure and a manifest into this directory.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Allow sizes above the default cap, up to the enumeration budget.
        #[arg(long)]
        stretch: bool,
        /// Visit extensions in a seeded random order.
        #[arg(long)]
        shuffle_seed: Option<u64>,
    },
    /// Search for a connectivity space realizing a chainmail.
    Represent {
        input: PathBuf,
        #[arg(long)]
        max_points: usize,
    },
    /// Hasse diagram as DOT.
    Render {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceKind {
    Graph,
    Hypergraph,
    Topology,
    Connspace,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_filter(s: &str) -> Result<Filter, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Filter::ALL.iter().map(|f| f.as_str()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return 3;
    }
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_theorem_violation() => 2,
        _ => 1,
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_poset(path: &Path) -> anyhow::Result<Poset> {
    Ok(parse_poset(&read(path)?)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    Ok(serde_json::from_str(&read(path)?).map_err(Error::from)?)
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = io::stdout().lock();
            let res = out.write_all(text.as_bytes()).and_then(|_| {
                if text.ends_with('\n') {
                    Ok(())
                } else {
                    out.write_all(b"\n")
                }
            });
            match res {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn pair_set(p: &Poset, (a, b): (usize, usize)) -> String {
    p.format_set(&ElementSet::from_iter([a, b]))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let mut budget = Budget::from_env()?;
    if let Some(b) = cli.budget {
        budget.max_poset = b;
    }
    budget.install();

    match cli.command {
        Command::Check { input } => {
            let p = match read_poset(&input) {
                Ok(p) => p,
                Err(e) if e.downcast_ref::<Error>().is_some() => {
                    println!("poset: no ({e})");
                    return Ok(1);
                }
                Err(e) => return Err(e),
            };
            let lattice = match as_complete_lattice(&p) {
                Ok(_) => "yes".to_string(),
                Err(Error::NotALattice { pair, .. }) => format!("no (witness {})", pair_set(&p, pair)),
                Err(e) => format!("no ({e})"),
            };
            let chainmail = match as_chainmail(&p) {
                Ok(_) => "yes".to_string(),
                Err(Error::NotAChainmail { pair }) => format!("no (witness {})", pair_set(&p, pair)),
                Err(e) => format!("no ({e})"),
            };
            println!("poset: yes; lattice: {lattice}; chainmail: {chainmail}");
            Ok(0)
        }
        Command::Dlattice { input, output } => {
            let g = as_chainmail(&read_poset(&input)?)?;
            let d = d_lattice(&g)?;
            eprintln!("lattice with {} elements", d.size());
            emit(output.as_deref(), &poset_to_json(d.lattice().poset()))?;
            Ok(0)
        }
        Command::Klattice { input, output } => {
            let l = as_complete_lattice(&read_poset(&input)?)?;
            let k = k_chainmail(&l)?;
            eprintln!("chainmail with {} elements", k.chainmail().size());
            emit(output.as_deref(), &poset_to_json(k.chainmail().poset()))?;
            Ok(0)
        }
        Command::Build { kind, input, output } => {
            let g = match kind {
                SourceKind::Graph => chainmail_from_graph(&read_json::<Graph>(&input)?)?,
                SourceKind::Hypergraph => chainmail_from_hypergraph(&read_json::<Hypergraph>(&input)?)?,
                SourceKind::Topology => chainmail_from_topology(&read_json::<FiniteTopology>(&input)?)?,
                SourceKind::Connspace => chainmail_from_connectivity_space(&read_json::<ConnectivitySpace>(&input)?)?,
            };
            eprintln!("chainmail with {} elements", g.size());
            emit(output.as_deref(), &poset_to_json(g.poset()))?;
            Ok(0)
        }
        Command::Verify { suite, max_size, seeded_fault } => {
            let report = run_suite(suite, VerifyOptions { max_size, seeded_fault })?;
            let verdict = if report.passed() { "PASS" } else { "FAIL" };
            println!(
                "suite {}: {verdict} (max size {}, {} structures, {} checks, {} violations)",
                report.suite,
                report.max_size,
                report.structures,
                report.checks,
                report.violations.len()
            );
            for v in report.violations.iter().take(20) {
                println!("  violation: {v}");
            }
            Ok(if report.passed() { 0 } else { 2 })
        }
        Command::Enumerate { n, filter, jobs, catalog, stretch, shuffle_seed } => {
            if n > DEFAULT_MAX_ENUMERATION && !stretch {
                bail!(UsageError(format!("-n {n} exceeds {DEFAULT_MAX_ENUMERATION}; pass --stretch to allow it")));
            }
            if jobs == 0 {
                bail!(UsageError("--jobs must be at least 1".into()));
            }
            let mut task = EnumerationTask::new(n, filter).jobs(jobs);
            task.shuffle_seed = shuffle_seed;
            let counts = match &catalog {
                Some(dir) => {
                    let summary = emit_catalog(&task, dir)?;
                    eprintln!("wrote {} diagrams to {}", summary.files, dir.display());
                    summary.counts
                }
                None => count_chainmails(&task)?,
            };
            let header: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
            let row: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
            println!("n\t{}", header.join("\t"));
            println!("{}\t{}", filter.as_str(), row.join("\t"));
            Ok(0)
        }
        Command::Represent { input, max_points } => {
            let g = as_chainmail(&read_poset(&input)?)?;
            match search_connectivity_representation(&g, max_points)? {
                Some(space) => println!("{}", serde_json::to_string(&space)?),
                None => println!("absent: no connectivity space on at most {max_points} points"),
            }
            Ok(0)
        }
        Command::Render { input, output } => {
            let p = read_poset(&input)?;
            emit(output.as_deref(), &render_dot(&p))?;
            Ok(0)
        }
    }
}
