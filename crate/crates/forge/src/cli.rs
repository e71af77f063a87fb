//! Command-line surface: corpus enumeration, construction builders, pairwise
//! decision procedures with certificates, and the verification suites.
//!
//! Exit codes: decisions exit 0 when the relation holds, 1 when it does not,
//! 2 on usage or instance errors; suite runs exit 0 only with zero
//! violations. `FORGE_BUDGET` caps search nodes.

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::graph::{Graph, SearchBudget};
use crate::metric::FiniteMetric;
use crate::norm::GraphNorm;
use crate::suites::{self, SuiteParams};
use crate::trees::NormalTree;
use crate::{colored, epi, gadget, graph, metric, norm, trees};
use clap::{Parser, Subcommand};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "forge",
    version,
    about = "Finite gadget constructions and exhaustive verification for embeddability-type relations"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate all truncated normal trees at the given parameters into a
    /// JSONL corpus with a manifest line.
    EnumerateTrees {
        #[arg(long)]
        depth: u8,
        #[arg(long)]
        branch: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate graphs on up to a given vertex count.
    EnumerateGraphs {
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        up_to_iso: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite, or `all`.
    Verify {
        suite: String,
        #[arg(long)]
        depth: Option<u8>,
        #[arg(long)]
        branch: Option<u8>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decide a binary relation between two instance files and emit a
    /// certificate.
    Decide {
        relation: String,
        a: PathBuf,
        b: PathBuf,
        /// Table file for `colored-embed` (defaults to equality).
        #[arg(long)]
        relation_table: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a construction from an instance file.
    Build {
        construction: String,
        input: PathBuf,
        #[arg(long)]
        depth: Option<u8>,
        #[arg(long)]
        branch: Option<u8>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norm utilities.
    Norm {
        #[command(subcommand)]
        command: NormCommand,
    },
}

#[derive(Subcommand, Debug)]
enum NormCommand {
    /// Evaluate the graph norm of a vector of `num/den` strings.
    Eval { graph: PathBuf, vector: PathBuf },
}

fn env_budget() -> SearchBudget {
    let mut b = SearchBudget::for_suites();
    if let Ok(v) = std::env::var("FORGE_BUDGET") {
        if let Ok(nodes) = v.parse::<u64>() {
            b.max_nodes = nodes;
        }
    }
    b
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInstance(format!("{}: {e}", path.display())))
}

fn write_output(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Runs the parsed command; the binary turns the outcome into an exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::EnumerateTrees { depth, branch, out } => {
            let corpus = trees::enumerate_trees(depth, branch, 200_000)?;
            let mut file = std::fs::File::create(&out)?;
            let manifest = json!({
                "kind": "trees",
                "count": corpus.len(),
                "params": { "depth": depth, "branch": branch },
                "conventions": gadget::CONVENTIONS,
            });
            writeln!(file, "{manifest}")?;
            for tree in &corpus {
                writeln!(file, "{}", serde_json::to_string(tree)?)?;
            }
            println!("wrote {} trees to {}", corpus.len(), out.display());
            Ok(0)
        }
        Command::EnumerateGraphs {
            max_n,
            up_to_iso,
            out,
        } => {
            let mut corpus = vec![];
            for n in 0..=max_n {
                corpus.extend(graph::enumerate_graphs(n, up_to_iso)?);
            }
            let mut file = std::fs::File::create(&out)?;
            let manifest = json!({
                "kind": "graphs",
                "count": corpus.len(),
                "params": { "max_n": max_n, "up_to_iso": up_to_iso },
                "conventions": gadget::CONVENTIONS,
            });
            writeln!(file, "{manifest}")?;
            for g in &corpus {
                writeln!(file, "{}", serde_json::to_string(g)?)?;
            }
            println!("wrote {} graphs to {}", corpus.len(), out.display());
            Ok(0)
        }
        Command::Verify {
            suite,
            depth,
            branch,
            seed,
            samples,
            report,
        } => {
            let params = SuiteParams {
                depth,
                branch,
                seed,
                samples,
                max_nodes: std::env::var("FORGE_BUDGET")
                    .ok()
                    .and_then(|v| v.parse().ok()),
            };
            let reports = if suite == "all" {
                suites::run_all(&params)?
            } else {
                vec![suites::run_suite(&suite, &params)?]
            };
            let mut all_ok = true;
            for r in &reports {
                println!(
                    "{} {}: {} checks, {} failures ({} ms)",
                    if r.ok() { "PASS" } else { "FAIL" },
                    r.suite,
                    r.instances,
                    r.failures,
                    r.wall_ms
                );
                for d in &r.diagnostics {
                    println!("  note: {d}");
                }
                all_ok &= r.ok();
            }
            if let Some(path) = report {
                let value = if reports.len() == 1 {
                    serde_json::to_value(&reports[0])?
                } else {
                    serde_json::to_value(&reports)?
                };
                std::fs::write(&path, serde_json::to_string_pretty(&value)? + "\n")?;
            }
            Ok(if all_ok { 0 } else { 1 })
        }
        Command::Decide {
            relation,
            a,
            b,
            relation_table,
            out,
        } => {
            let (holds, cert) = decide(&relation, &a, &b, relation_table.as_deref())?;
            write_output(&out, &serde_json::to_value(&cert)?)?;
            Ok(if holds { 0 } else { 1 })
        }
        Command::Build {
            construction,
            input,
            depth,
            branch,
            out,
        } => {
            let value = build(&construction, &input, depth, branch)?;
            write_output(&out, &value)?;
            Ok(0)
        }
        Command::Norm { command } => match command {
            NormCommand::Eval { graph, vector } => {
                let g: Graph = read_json(&graph)?;
                let strings: Vec<String> = read_json(&vector)?;
                let v = norm::parse_vector(&strings)?;
                let n = GraphNorm::new(g)?;
                println!("{}", norm::q_to_string(&n.norm(&v)?));
                Ok(0)
            }
        },
    }
}

/// Decides a relation between two instance files; every emitted certificate
/// has its witness re-validated first.
pub fn decide(
    relation: &str,
    a: &Path,
    b: &Path,
    table: Option<&str>,
) -> Result<(bool, Certificate)> {
    let budget = env_budget();
    match relation {
        "le-max" => {
            let s: NormalTree = read_json(a)?;
            let t: NormalTree = read_json(b)?;
            let w = trees::le_max(&s, &t)?;
            if let Some(w) = &w {
                if !trees::is_le_max_witness(&s, &t, w) {
                    return Err(Error::InvalidInstance(
                        "witness failed re-validation".into(),
                    ));
                }
            }
            let witness = w
                .as_ref()
                .map(|w| {
                    json!(w
                        .map
                        .iter()
                        .map(|(k, v)| (trees::word_to_string(k), v.clone()))
                        .collect::<Vec<_>>())
                })
                .unwrap_or(serde_json::Value::Null);
            Ok((
                w.is_some(),
                Certificate::new(relation, &s, &t, w.is_some(), witness),
            ))
        }
        "embed" => {
            let g: Graph = read_json(a)?;
            let h: Graph = read_json(b)?;
            let w = graph::find_embedding_with(&g, &h, budget)?;
            if let Some(w) = &w {
                if !graph::is_embedding(&g, &h, w)? {
                    return Err(Error::InvalidInstance(
                        "witness failed re-validation".into(),
                    ));
                }
            }
            let witness = serde_json::to_value(&w)?;
            Ok((
                w.is_some(),
                Certificate::new(relation, &g, &h, w.is_some(), witness),
            ))
        }
        "iso" => {
            let g: Graph = read_json(a)?;
            let h: Graph = read_json(b)?;
            let w = graph::find_isomorphism_with(&g, &h, budget)?;
            if let Some(w) = &w {
                if !graph::is_embedding(&g, &h, w)? {
                    return Err(Error::InvalidInstance(
                        "witness failed re-validation".into(),
                    ));
                }
            }
            let witness = serde_json::to_value(&w)?;
            Ok((
                w.is_some(),
                Certificate::new(relation, &g, &h, w.is_some(), witness),
            ))
        }
        "epi" => {
            let h: Graph = read_json(a)?;
            let hp: Graph = read_json(b)?;
            let w = graph::find_epimorphism_with(&h, &hp, budget)?;
            if let Some(w) = &w {
                if !graph::is_epimorphism(&h, &hp, w)? {
                    return Err(Error::InvalidInstance(
                        "witness failed re-validation".into(),
                    ));
                }
            }
            let witness = serde_json::to_value(&w)?;
            Ok((
                w.is_some(),
                Certificate::new(relation, &h, &hp, w.is_some(), witness),
            ))
        }
        "colored-embed" => {
            let x: colored::ColoredSum = read_json(a)?;
            let y: colored::ColoredSum = read_json(b)?;
            let rel = match table {
                None | Some("eq") => colored::ColorRelation::Equality,
                Some("geq") => colored::ColorRelation::Geq,
                Some(path) => read_json(Path::new(path))?,
            };
            let w = colored::embeds(&x, &y, &rel);
            if let Some(phi) = &w {
                if !colored::assignment_valid(&x, &y, &rel, phi) {
                    return Err(Error::InvalidInstance(
                        "witness failed re-validation".into(),
                    ));
                }
            }
            let witness = serde_json::to_value(&w)?;
            Ok((
                w.is_some(),
                Certificate::new(relation, &x, &y, w.is_some(), witness),
            ))
        }
        "colored-iso" => {
            let x: colored::ColoredSum = read_json(a)?;
            let y: colored::ColoredSum = read_json(b)?;
            let holds = colored::iso_colored(&x, &y);
            Ok((
                holds,
                Certificate::new(relation, &x, &y, holds, serde_json::Value::Null),
            ))
        }
        "iso-embed-metric" => {
            let x: FiniteMetric = read_json(a)?;
            let y: FiniteMetric = read_json(b)?;
            let w = metric::iso_embed_metric(&x, &y);
            if let Some(map) = &w {
                if !metric::is_isometric_map(&x, &y, map) {
                    return Err(Error::InvalidInstance(
                        "witness failed re-validation".into(),
                    ));
                }
            }
            let witness = serde_json::to_value(&w)?;
            Ok((
                w.is_some(),
                Certificate::new(relation, &x, &y, w.is_some(), witness),
            ))
        }
        "signed-li" => {
            let g: Graph = read_json(a)?;
            let h: Graph = read_json(b)?;
            let ng = GraphNorm::new(g.clone())?;
            let nh = GraphNorm::new(h.clone())?;
            let w = norm::signed_isometric_embedding(&ng, &nh)?;
            if let Some(w) = &w {
                if !norm::validate_signed_map(&ng, &nh, w)? {
                    return Err(Error::InvalidInstance(
                        "witness failed re-validation".into(),
                    ));
                }
            }
            let witness = serde_json::to_value(&w)?;
            Ok((
                w.is_some(),
                Certificate::new(relation, &g, &h, w.is_some(), witness),
            ))
        }
        _ => Err(Error::Unknown {
            kind: "relation".into(),
            name: relation.into(),
        }),
    }
}

/// Builds a construction from an input instance and returns its JSON value.
pub fn build(
    construction: &str,
    input: &Path,
    depth: Option<u8>,
    branch: Option<u8>,
) -> Result<serde_json::Value> {
    let budget = env_budget();
    match construction {
        "g-t" => {
            let tree: NormalTree = read_json(input)?;
            let g = gadget::build_gadget(&tree, budget)?;
            Ok(serde_json::to_value(&g)?)
        }
        "g-star" => {
            let g: Graph = read_json(input)?;
            let d = depth.unwrap_or(1);
            let b = branch.unwrap_or(g.n().max(1) as u8);
            let e = epi::build_epi_gadget(&g, d, b, budget)?;
            Ok(serde_json::to_value(&e)?)
        }
        "l-g" => {
            let g: Graph = read_json(input)?;
            let sum = colored::build_lg(&g, depth.unwrap_or(2), branch.unwrap_or(2))?;
            Ok(serde_json::to_value(&sum)?)
        }
        "d-g" => {
            let g: Graph = read_json(input)?;
            let m = metric::build_discrete(&g)?;
            Ok(serde_json::to_value(&m)?)
        }
        "u-g" => {
            let g: gadget::GadgetGraph = read_json(input)?;
            let bs = metric::build_branch_space(&g)?;
            Ok(serde_json::to_value(&bs)?)
        }
        "ball" => {
            let m: FiniteMetric = read_json(input)?;
            let s = metric::build_ball_structure(&m)?;
            let radii: Vec<String> = s
                .radii
                .iter()
                .map(|r| format!("{}/{}", r.numer(), r.denom()))
                .collect();
            let balls: Vec<serde_json::Value> = (0..s.universe_len())
                .map(|e| {
                    let members: Vec<usize> = (0..s.n_points)
                        .filter(|&x| s.balls[e] >> x & 1 == 1)
                        .collect();
                    json!({
                        "slot": s.slot_of(e),
                        "radius": radii[e % s.radii.len()],
                        "members": members,
                    })
                })
                .collect();
            Ok(json!({ "radii": radii, "slots": s.slots, "balls": balls }))
        }
        _ => Err(Error::Unknown {
            kind: "construction".into(),
            name: construction.into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn decide_le_max_identity_holds() {
        let dir = tempfile::tempdir().unwrap();
        let tree = r#"{"d":1,"b":2,"nodes":[["",[]],["0",[0]],["0",[1]]]}"#;
        let a = write_tmp(&dir, "a.json", tree);
        let b = write_tmp(&dir, "b.json", tree);
        let (holds, cert) = decide("le-max", &a, &b, None).unwrap();
        assert!(holds);
        assert_eq!(cert.relation, "le-max");
        assert_eq!(cert.lhs_hash, cert.rhs_hash);
    }

    #[test]
    fn decide_documented_negative_pair() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_tmp(
            &dir,
            "a.json",
            r#"{"d":1,"b":2,"nodes":[["",[]],["1",[0]],["1",[1]]]}"#,
        );
        let b = write_tmp(
            &dir,
            "b.json",
            r#"{"d":1,"b":2,"nodes":[["",[]],["0",[0]],["0",[1]]]}"#,
        );
        let (holds, cert) = decide("le-max", &a, &b, None).unwrap();
        assert!(!holds);
        assert!(cert.witness.is_null());
    }

    #[test]
    fn decide_rejects_malformed_instances() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_tmp(&dir, "a.json", r#"{"n":2,"edges":[[0,5]]}"#);
        let b = write_tmp(&dir, "b.json", r#"{"n":2,"edges":[]}"#);
        assert!(decide("embed", &a, &b, None).is_err());
    }

    #[test]
    fn unknown_relation_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_tmp(&dir, "a.json", "{}");
        assert!(matches!(
            decide("no-such-relation", &a, &a, None),
            Err(Error::Unknown { .. })
        ));
    }

    #[test]
    fn certificates_revalidate_on_reload() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_tmp(&dir, "a.json", r#"{"n":2,"edges":[[0,1]]}"#);
        let b = write_tmp(&dir, "b.json", r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        let (holds, cert) = decide("embed", &a, &b, None).unwrap();
        assert!(holds);
        let text = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&text).unwrap();
        let w: crate::graph::VertexMap = serde_json::from_value(back.witness).unwrap();
        let g: Graph = read_json(&a).unwrap();
        let h: Graph = read_json(&b).unwrap();
        assert!(graph::is_embedding(&g, &h, &w).unwrap());
    }

    #[test]
    fn build_gadget_from_tree_file() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_tmp(&dir, "t.json", r#"{"d":0,"b":1,"nodes":[["",[]]]}"#);
        let v = build("g-t", &a, None, None).unwrap();
        let g: gadget::GadgetGraph = serde_json::from_value(v).unwrap();
        assert_eq!(g.graph.n(), 15);
    }
}
