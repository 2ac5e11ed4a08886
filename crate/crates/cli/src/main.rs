use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use poset_realizer::aut::{automorphism_group, AutConfig, DEFAULT_CAP};
use poset_realizer::beta::{alpha_formula, beta, beta_bounds_formula, KnownBounds};
use poset_realizer::constructions::{
    abelian_join_poset, crown_realization, cyclic_prime_power_with, graph_realizer_lattice,
    main_theorem_poset, subdivided_crown, ConstructedRealization, CyclicRoute,
};
use poset_realizer::verify::{
    check_action, verify_realization, ActionFile, RealizationCertificate,
};
use poset_realizer::{Error, FiniteGroup, GeneratingSequence, Graph, Poset};

/// Environment variable overriding the automorphism engine's point cap.
const CAP_ENV: &str = "POSET_REALIZER_CAP";

#[derive(Parser, Debug)]
#[command(
    name = "poset-realizer",
    version,
    about = "Build and check finite posets with a prescribed automorphism group"
)]
struct Cli {
    /// Worker threads for the automorphism engine and the search.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Time limit in seconds for each automorphism computation.
    #[arg(long, global = true)]
    timeout: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a realization, verify it and write its artifacts.
    Construct(ConstructArgs),
    /// Automorphism group of a poset file.
    Aut {
        #[arg(long)]
        poset: PathBuf,
    },
    /// Re-check an action of a group on a poset.
    Verify {
        #[arg(long)]
        group: String,
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        action: PathBuf,
        /// Previously written certificate that must agree with the new one.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Smallest poset realizing a small group, by exhaustive search.
    Beta {
        #[arg(long)]
        group: String,
        #[arg(long)]
        max_points: usize,
    },
    /// Face poset of a graph file.
    FacePoset {
        #[arg(long)]
        graph: PathBuf,
        /// Add a least and a greatest point.
        #[arg(long)]
        bounded: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Known bounds for cyclic groups of prime-power order.
    Bounds,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodTag {
    Main,
    Crown,
    SubdividedCrown,
    CyclicPk,
    AbelianJoin,
    GraphLattice,
}

impl std::fmt::Display for MethodTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let value = self.to_possible_value().expect("no skipped variants");
        f.write_str(value.get_name())
    }
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    method: MethodTag,
    /// Group spec such as `C2^3`, `S4`, `D5xC3` or `file:table.json` (method `main`).
    #[arg(long)]
    group: Option<String>,
    /// Comma-separated irredundant generators, by name or `e1`, `e2`, ... (method `main`).
    #[arg(long)]
    gens: Option<String>,
    /// Size of the crown (methods `crown`, `subdivided-crown`).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    /// Comma-separated cyclic factor orders (method `abelian-join`).
    #[arg(long, value_delimiter = ',')]
    parts: Option<Vec<usize>>,
    /// Graph JSON file (method `graph-lattice`).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Use the subdivided-crown gadget for any odd prime (method `cyclic-pk`).
    #[arg(long)]
    unverified: bool,
    /// Skip the automorphism engine; the certificate is marked unverified.
    #[arg(long)]
    no_verify: bool,
    /// Directory for `poset.json`, `action.json` and `certificate.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Graphviz output file.
    #[arg(long)]
    dot: Option<PathBuf>,
}

/// Failure surfaced as a JSON error report.
struct Failure {
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        kind: "usage",
        message: message.into(),
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_failure(usage(e.render().to_string().trim_end())),
    };
    match run(&cli) {
        Ok((value, ok)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("reports serialize")
            );
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => report_failure(f),
    }
}

fn report_failure(f: Failure) -> ExitCode {
    eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
    ExitCode::from(2)
}

fn aut_config(cli: &Cli) -> Result<AutConfig, Failure> {
    let cap = match std::env::var(CAP_ENV) {
        Ok(v) => v
            .parse()
            .map_err(|_| usage(format!("{CAP_ENV} must be a positive integer, got `{v}`")))?,
        Err(_) => DEFAULT_CAP,
    };
    if cli.workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    let timeout = match cli.timeout {
        Some(t) if !(t.is_finite() && t > 0.0) => return Err(usage("--timeout must be positive")),
        Some(t) => Some(Duration::from_secs_f64(t)),
        None => None,
    };
    Ok(AutConfig {
        cap,
        timeout,
        workers: cli.workers,
    })
}

fn run(cli: &Cli) -> Outcome {
    let config = aut_config(cli)?;
    match &cli.command {
        Command::Construct(args) => construct(args, &config),
        Command::Aut { poset } => {
            let p = read_poset(poset)?;
            let group = automorphism_group(&p, &config)?;
            Ok((json!({ "points": p.len(), "automorphisms": group }), true))
        }
        Command::Verify {
            group,
            poset,
            action,
            certificate,
        } => verify(group, poset, action, certificate.as_deref(), &config),
        Command::Beta { group, max_points } => {
            let g = FiniteGroup::from_spec(group)?;
            let report = beta(&g, *max_points, cli.workers)?;
            let mut value = to_value(&report);
            value["verdict"] = json!(report.verdict());
            Ok((value, true))
        }
        Command::FacePoset {
            graph,
            bounded,
            out,
            dot,
        } => {
            let g = read_graph(graph)?;
            let p = if *bounded {
                g.face_poset().bounded()
            } else {
                g.face_poset()
            };
            write_optional(out.as_deref(), &p.to_json())?;
            write_optional(dot.as_deref(), &p.to_dot("face_poset"))?;
            let mut value = to_value(&p.to_file());
            if *bounded {
                value["lattice"] = json!(p.is_lattice());
            }
            Ok((value, true))
        }
        Command::Bounds => {
            let table = KnownBounds::load()?;
            let rows: Vec<Value> = table
                .entries
                .iter()
                .map(|e| {
                    let mut row = to_value(e);
                    row["beta_upper_minus_alpha"] =
                        json!(e.alpha.map(|a| e.beta_upper as i64 - a as i64));
                    row["formulas_agree"] = json!(
                        e.alpha == Some(alpha_formula(e.p, e.k))
                            && (e.beta_lower, e.beta_upper) == beta_bounds_formula(e.p, e.k)
                    );
                    row
                })
                .collect();
            Ok((json!({ "entries": rows }), true))
        }
    }
}

fn construct(args: &ConstructArgs, config: &AutConfig) -> Outcome {
    check_flags(args)?;
    if args.method == MethodTag::GraphLattice {
        return construct_graph_lattice(args, config);
    }
    let built = build(args)?;
    let cert = if args.no_verify {
        check_action(&built.group, &built.poset, &built.action)?
    } else {
        verify_realization(&built.group, &built.poset, &built.action, config)?
    };
    let ok = match cert.verdict {
        Some(v) => v,
        None => cert.order_preserving && cert.homomorphism && cert.injective,
    };
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        let action = ActionFile {
            group: built.group.display_name(),
            degree: built.poset.len(),
            action: built.action.clone(),
        };
        write_file(&dir.join("poset.json"), &built.poset.to_json())?;
        write_file(&dir.join("action.json"), &pretty(&action))?;
        write_file(&dir.join("certificate.json"), &pretty(&cert))?;
    }
    write_optional(args.dot.as_deref(), &built.poset.to_dot(built.method.tag()))?;
    let value = json!({
        "method": built.method,
        "group": built.group.display_name(),
        "points": built.poset.len(),
        "certificate": cert,
    });
    Ok((value, ok))
}

fn construct_graph_lattice(args: &ConstructArgs, config: &AutConfig) -> Outcome {
    let path = args
        .graph
        .as_ref()
        .ok_or_else(|| usage("method graph-lattice needs --graph"))?;
    let g = read_graph(path)?;
    let lattice = graph_realizer_lattice(&g);
    let is_lattice = lattice.is_lattice();
    let aut = if args.no_verify {
        None
    } else {
        Some(automorphism_group(&lattice, config)?)
    };
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        write_file(&dir.join("poset.json"), &lattice.to_json())?;
    }
    write_optional(args.dot.as_deref(), &lattice.to_dot("graph_lattice"))?;
    let value = json!({
        "method": { "method": "graph-lattice", "vertices": g.vertex_count(), "edges": g.edges().len() },
        "points": lattice.len(),
        "lattice": is_lattice,
        "automorphisms": aut,
    });
    Ok((value, is_lattice))
}

/// Rejects flags that the chosen method would ignore.
fn check_flags(args: &ConstructArgs) -> Result<(), Failure> {
    use MethodTag::*;
    let given = [
        ("--group", args.group.is_some(), &[Main][..]),
        ("--gens", args.gens.is_some(), &[Main][..]),
        ("--n", args.n.is_some(), &[Crown, SubdividedCrown][..]),
        ("--p", args.p.is_some(), &[CyclicPk][..]),
        ("--k", args.k.is_some(), &[CyclicPk][..]),
        ("--parts", args.parts.is_some(), &[AbelianJoin][..]),
        ("--graph", args.graph.is_some(), &[GraphLattice][..]),
        ("--unverified", args.unverified, &[CyclicPk][..]),
    ];
    for (flag, present, methods) in given {
        if present && !methods.contains(&args.method) {
            return Err(usage(format!(
                "{flag} does not apply to method {}",
                args.method
            )));
        }
    }
    Ok(())
}

fn build(args: &ConstructArgs) -> Result<ConstructedRealization, Failure> {
    let need = |flag: &str| usage(format!("method {} needs {flag}", args.method));
    Ok(match args.method {
        MethodTag::Main => {
            let g = FiniteGroup::from_spec(args.group.as_deref().ok_or_else(|| need("--group"))?)?;
            let elems = g.parse_elements(args.gens.as_deref().ok_or_else(|| need("--gens"))?)?;
            let gens = GeneratingSequence::new(&g, elems)?;
            main_theorem_poset(&g, &gens)?
        }
        MethodTag::Crown => crown_realization(args.n.ok_or_else(|| need("--n"))?)?,
        MethodTag::SubdividedCrown => subdivided_crown(args.n.ok_or_else(|| need("--n"))?)?,
        MethodTag::CyclicPk => {
            let p = args.p.ok_or_else(|| need("--p"))?;
            let k = args.k.ok_or_else(|| need("--k"))?;
            let route = (args.unverified && p % 2 == 1).then_some(CyclicRoute::SubdividedCrown);
            cyclic_prime_power_with(p, k, route, args.unverified)?
        }
        MethodTag::AbelianJoin => {
            abelian_join_poset(args.parts.as_deref().ok_or_else(|| need("--parts"))?)?
        }
        MethodTag::GraphLattice => unreachable!("handled separately"),
    })
}

fn verify(
    group: &str,
    poset: &Path,
    action: &Path,
    previous: Option<&Path>,
    config: &AutConfig,
) -> Outcome {
    let g = FiniteGroup::from_spec(group)?;
    let p = read_poset(poset)?;
    let file: ActionFile = read_json(action)?;
    if file.degree != p.len() {
        return Err(Error::MalformedAction(format!(
            "action declares degree {}, poset has {} points",
            file.degree,
            p.len()
        ))
        .into());
    }
    let cert = verify_realization(&g, &p, &file.action, config)?;
    let mut ok = cert.verdict == Some(true);
    let mut value = json!({ "certificate": cert });
    if let Some(path) = previous {
        let old: RealizationCertificate = read_json(path)?;
        let agrees = old.poset_hash == cert.poset_hash
            && (!old.verified || (old.verdict == cert.verdict && old.aut_order == cert.aut_order));
        value["matches_previous"] = json!(agrees);
        ok &= agrees;
    }
    Ok((value, ok))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|source| {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| {
        Error::Json {
            context: path.display().to_string(),
            source,
        }
        .into()
    })
}

fn read_poset(path: &Path) -> Result<Poset, Failure> {
    Ok(Poset::from_json(&read_text(path)?)?)
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    Ok(Graph::from_json(&read_text(path)?)?)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|source| {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn write_optional(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    path.map_or(Ok(()), |p| write_file(p, text))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_construct_flags() {
        let cli = Cli::try_parse_from([
            "poset-realizer",
            "construct",
            "--method",
            "abelian-join",
            "--parts",
            "2,2,3",
            "--workers",
            "3",
        ])
        .unwrap();
        assert_eq!(cli.workers, 3);
        let Command::Construct(args) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(args.parts, Some(vec![2, 2, 3]));
        assert!(check_flags(&args).is_ok());
    }

    #[test]
    fn rejects_flags_of_other_methods() {
        let cli = Cli::try_parse_from([
            "poset-realizer",
            "construct",
            "--method",
            "crown",
            "--n",
            "4",
            "--p",
            "3",
        ])
        .unwrap();
        let Command::Construct(args) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(check_flags(&args).unwrap_err().kind, "usage");
    }
}
