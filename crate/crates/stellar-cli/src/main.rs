//! `stellar`: subdivision, weld-division maps, amalgamation and limit stages from the command line.

mod error;
mod io;
mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use stellar::gen::DEFAULT_SEED;
use stellar::limit::{MeshFormat, Tower};
use stellar::seqcalc::{entry_is_face, equiv_fingerprint, faces_of_seq, rewrite_equiv, vr};
use stellar::{AdditiveFamily, DivSeq, MapExpr};

use crate::error::{classify, CliError};
use crate::io::*;

#[derive(Parser)]
#[command(name = "stellar", version, about = "Stellar subdivision over hereditarily finite sets")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the result here instead of stdout; for `amalgamate`, a directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Off,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Divide a complex by one face, or by a sequence (rightmost first).
    Subdivide {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, conflicts_with = "seq")]
        by: Option<String>,
        #[arg(long)]
        seq: Option<String>,
    },
    /// Faces of a division sequence applied to the full simplex.
    Faces {
        #[arg(long)]
        seq: String,
        /// Comma-separated urelements; defaults to the support of the sequence.
        #[arg(long)]
        ur: Option<String>,
    },
    /// Bounded rewrite search between two sequences.
    Equiv {
        #[arg(long)]
        seq1: String,
        #[arg(long)]
        seq2: String,
        #[arg(long)]
        ur: Option<String>,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Load a map and report its vertex table, classes and groundedness.
    CheckMap {
        #[arg(long)]
        map: PathBuf,
    },
    /// The weld `π_{p,t}` over a complex.
    Weld {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        t: String,
    },
    /// Divide a map by a face or an additive family of its codomain.
    Divide {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, conflicts_with = "family")]
        by: Option<String>,
        #[arg(long)]
        family: Option<String>,
    },
    /// `left ∘ right`.
    Compose {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Amalgamate two maps with a common codomain.
    Amalgamate {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Certificate that `S·π_{p,T}` is a pure weld-division map.
    CertifyPure {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long = "S")]
        s: String,
        #[arg(long = "T")]
        t: String,
        #[arg(long)]
        p: String,
    },
    /// A map `f` with `h ∘ f` a composition of welds.
    Coinit {
        #[arg(long)]
        map: PathBuf,
    },
    /// Build a tower of barycentric blocks and report on it.
    Limit {
        #[arg(long)]
        ground: PathBuf,
        #[arg(long)]
        blocks: usize,
        /// JSON `{"before_block": [[{"p": .., "t": ..}], ...]}`.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        /// OFF mesh of the final stage.
        #[arg(long)]
        mesh: Option<PathBuf>,
    },
    /// Mesh of one stage of a tower.
    ExportMesh {
        #[arg(long)]
        ground: PathBuf,
        #[arg(long)]
        blocks: usize,
        /// Defaults to the final stage.
        #[arg(long)]
        stage: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Off)]
        format: Format,
    },
    /// Property checks over small random corpora.
    Selftest {
        #[arg(long, default_value_t = 64)]
        cases: usize,
    },
}

fn emit(out: Option<&Path>, v: &Value) -> Result<()> {
    let text = pretty(v);
    match out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn tower(ground: &Path, blocks: usize, schedule: Option<&Path>) -> Result<Tower> {
    let g = load_complex(ground)?;
    let sched = match schedule {
        Some(p) => parse_json(&read(p)?, &p.display().to_string())?,
        None => Default::default(),
    };
    Ok(stellar::build_tower(&g, blocks, &sched)?)
}

fn run(cli: Cli) -> Result<bool> {
    let out = cli.out.as_deref();
    match cli.cmd {
        Cmd::Subdivide { complex, by, seq } => {
            let c = load_complex(&complex)?;
            let seq = match (by, seq) {
                (Some(b), _) => vec![parse_set(c.ur(), &b)?],
                (None, Some(s)) => checked_list(c.ur(), &s)?,
                (None, None) => return Err(CliError::Parse("give --by or --seq".into()).into()),
            };
            let r = c.subdivide_seq(&seq);
            r.check_guardrails(&stellar::Guardrails::from_env())?;
            emit(out, &complex_json(&r))?;
        }
        Cmd::Faces { seq, ur } => {
            let entries = parse_list(&seq)?;
            let u = ur_from(ur.as_deref(), &[&entries])?;
            for s in &entries {
                u.check(s)?;
            }
            let ds = DivSeq::new(entries);
            let c = faces_of_seq(&ds, &u);
            emit(
                out,
                &json!({
                    "seq": ds,
                    "count": c.len(),
                    "faces": c.faces(),
                    "vertices": vr(&ds, &u),
                    "entry_is_face": entry_is_face(&ds, &u),
                }),
            )?;
        }
        Cmd::Equiv { seq1, seq2, ur, depth } => {
            let (a, b) = (parse_list(&seq1)?, parse_list(&seq2)?);
            let u = ur_from(ur.as_deref(), &[&a, &b])?;
            for s in a.iter().chain(&b) {
                u.check(s)?;
            }
            let (a, b) = (DivSeq::new(a), DivSeq::new(b));
            let result = rewrite_equiv(&a, &b, &u, depth);
            let same = equiv_fingerprint(&a, &u) == equiv_fingerprint(&b, &u);
            let mut v = serde_json::to_value(&result)?;
            v["same_faces"] = json!(same);
            emit(out, &v)?;
        }
        Cmd::CheckMap { map } => {
            let m = load_map(&map)?;
            let grounded = m.map().check_grounded();
            let mut v = map_json(&m);
            v["grounded"] = json!(grounded.is_ok());
            v["unique_cover"] = json!(m.map().unique_cover());
            v["domain_faces"] = json!(m.dom().len());
            v["codomain_faces"] = json!(m.cod().len());
            emit(out, &v)?;
            if !grounded.is_ok() {
                return Err(CliError::Validation {
                    invariant: "grounded (S1)+(S2)".into(),
                    message: format!("{grounded:?}"),
                }
                .into());
            }
        }
        Cmd::Weld { complex, p, t } => {
            let c = load_complex(&complex)?;
            let m = MapExpr::weld(&c, &parse_set(c.ur(), &p)?, &parse_set(c.ur(), &t)?)?;
            emit(out, &map_json(&m))?;
        }
        Cmd::Divide { map, by, family } => {
            let m = load_map(&map)?;
            let ur = m.cod().ur().clone();
            let d = match (by, family) {
                (Some(s), _) => m.divide(&parse_set(&ur, &s)?),
                (None, Some(f)) => m.divide_family(&AdditiveFamily::new(checked_list(&ur, &f)?, m.cod())?)?,
                (None, None) => return Err(CliError::Parse("give --by or --family".into()).into()),
            };
            emit(out, &map_json(&d))?;
        }
        Cmd::Compose { left, right } => {
            let m = load_map(&left)?.compose(&load_map(&right)?)?;
            emit(out, &map_json(&m))?;
        }
        Cmd::Amalgamate { f, g } => {
            let (fp, gp) = (load_map(&f)?, load_map(&g)?);
            let res = stellar::amalgamate(&fp, &gp)?;
            let verified = res.verify(&fp, &gp).is_ok();
            let neat = res.neat_factors.iter().all(|m| m.classes().neat);
            let report = json!({
                "verified": verified,
                "g_neat": neat,
                "neat_factors": res.neat_factors.len(),
                "amalgam_faces": res.f.dom().len(),
                "invariant": "f'∘f = g'∘g",
            });
            if let Some(d) = out {
                std::fs::create_dir_all(d)?;
                write(&d.join("f.json"), &pretty(&map_json(&res.f)))?;
                write(&d.join("g.json"), &pretty(&map_json(&res.g)))?;
                write(&d.join("amalgam.json"), &pretty(&complex_json(res.f.dom())))?;
                write(&d.join("report.json"), &pretty(&report))?;
            }
            emit(
                None,
                &json!({
                    "report": report,
                    "f": map_json(&res.f),
                    "g": map_json(&res.g),
                    "amalgam": complex_json(res.f.dom()),
                }),
            )?;
        }
        Cmd::CertifyPure { complex, s, t, p } => {
            let c = load_complex(&complex)?;
            let sf = AdditiveFamily::new(checked_list(c.ur(), &s)?, &c)?;
            let tf = AdditiveFamily::new(checked_list(c.ur(), &t)?, &c)?;
            let cert = stellar::main_lemma_certificate(&sf, &tf, &parse_set(c.ur(), &p)?, &c)?;
            emit(out, &serde_json::to_value(cert.to_json())?)?;
        }
        Cmd::Coinit { map } => {
            let h = load_map(&map)?;
            let w = stellar::coinitiality(&h)?;
            let verified = w.verify(&h).is_ok();
            emit(
                out,
                &json!({
                    "verified": verified,
                    "f": map_json(&w.f),
                    "welds": w.chain.welds.iter().map(map_json).collect::<Vec<_>>(),
                }),
            )?;
        }
        Cmd::Limit {
            ground,
            blocks,
            schedule,
            samples,
            report,
            mesh,
        } => {
            let t = tower(&ground, blocks, schedule.as_deref())?;
            let rep = stellar::quotient_report(&t, samples, cli.seed)?;
            let v = serde_json::to_value(&rep)?;
            if let Some(m) = mesh {
                let (_, text) = stellar::export_mesh(&t, t.top_index(), MeshFormat::Off)?;
                write(&m, &text)?;
            }
            match report {
                Some(r) => {
                    write(&r, &pretty(&v))?;
                    let summary: Vec<Value> = rep
                        .checks
                        .iter()
                        .map(|c| json!({"invariant": c.invariant, "passed": c.passed}))
                        .collect();
                    emit(out, &json!({ "epsilons": rep.epsilons, "checks": summary }))?;
                }
                None => emit(out, &v)?,
            }
        }
        Cmd::ExportMesh {
            ground,
            blocks,
            stage,
            format,
        } => {
            let t = tower(&ground, blocks, None)?;
            let n = stage.unwrap_or(t.top_index());
            let fmt = match format {
                Format::Off => MeshFormat::Off,
                Format::Json => MeshFormat::Json,
            };
            let (_, text) = stellar::export_mesh(&t, n, fmt)?;
            match out {
                Some(p) => write(p, &text)?,
                None => print!("{text}"),
            }
        }
        Cmd::Selftest { cases } => {
            let rep = selftest::run(cli.seed, cases);
            emit(out, &serde_json::to_value(&rep)?)?;
            return Ok(rep.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprint!("{}", pretty(&classify(&e)));
            ExitCode::FAILURE
        }
    }
}
