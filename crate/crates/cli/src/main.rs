mod input;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tsw_core::diagram::{builtin, builtin_links};
use tsw_core::linkdata::{conway_table_validate, validate_charge, CheckResult};
use tsw_core::surgery::{surgered_homology, SurgeryPresentation, TauMethod};
use tsw_core::sw::{self, split_relative_sign};
use tsw_core::Error;

use report::*;

#[derive(Parser)]
#[command(name = "tsw", version, about = "Torsion, Alexander function and Seiberg-Witten function of surgered 3-manifolds")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Orientation {
    Link,
    Canonical,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    General,
    Split,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the Conway table (and the charge, if any).
    Validate {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        charge: Option<String>,
    },
    /// H_1 of the surgered manifold.
    Homology { file: PathBuf },
    /// Euler classes with canonical charges and Chern classes.
    Euler {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        window: i64,
    },
    /// Refined torsion.
    Tau {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        charge: Option<String>,
        #[arg(long, value_enum, default_value = "link")]
        orientation: Orientation,
        #[arg(long, value_enum, default_value = "general")]
        method: Method,
    },
    /// Refined Alexander function (b1 >= 1).
    Delta {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        charge: Option<String>,
        #[arg(long, value_enum, default_value = "link")]
        orientation: Orientation,
    },
    /// Seiberg-Witten function up to a global sign (b1 >= 1).
    Sw {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        charge: Option<String>,
        /// Every Euler class in the window.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 3)]
        window: i64,
        /// b1 = 1 direction as a word in the meridians, e.g. 1,0.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        /// Use the closed form for algebraically split links.
        #[arg(long)]
        split: bool,
    },
    /// Identity checks (duality, Torres, cross-check, fast path, ...) on each input.
    Selftest {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print a builtin link as an input document (or list the builtin names).
    Library {
        name: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        framings: Option<String>,
        /// Emit the diagram as a PD code instead of the Conway table.
        #[arg(long)]
        pd: bool,
    },
}

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<i64>().map_err(|_| Error::InvalidInput(format!("not an integer: {x:?}")).into()))
        .collect()
}

fn emit<T: Serialize + std::fmt::Display>(json: bool, x: &T) {
    if json {
        println!("{}", serde_json::to_string_pretty(x).expect("serializable"));
    } else {
        print!("{x}");
    }
}

/// Exit status for an error: 3 for a failed internal identity, 2 for everything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Assertion(_) | Error::NotDivisible | Error::NonRationalReassembly) => 3,
        _ => 2,
    }
}

fn error_kind(e: &anyhow::Error) -> String {
    match e.downcast_ref::<Error>() {
        Some(x) => {
            let d = format!("{x:?}");
            d.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
        }
        None => "InputError".into(),
    }
}

fn charge_for(arg: &Option<String>, loaded: &input::Loaded, p: &SurgeryPresentation) -> Result<Vec<i64>> {
    let k = match (arg, &loaded.charge) {
        (Some(s), _) => parse_ints(s)?,
        (None, Some(k)) => k.clone(),
        (None, None) => p.link.parity_charge(),
    };
    validate_charge(&p.link, &k)?;
    Ok(k)
}

fn run(cli: &Cli) -> Result<u8> {
    let json = cli.json;
    match &cli.cmd {
        Cmd::Validate { file, charge } => {
            let l = input::load(file)?;
            let mut rep = conway_table_validate(&l.link, &l.table).checks;
            let k = charge.as_ref().map(|s| parse_ints(s)).transpose()?.or(l.charge.clone());
            if let Some(k) = k {
                rep.push(match validate_charge(&l.link, &k) {
                    Ok(_) => CheckResult { name: "charge".into(), ok: true, detail: String::new() },
                    Err(e) => CheckResult { name: "charge".into(), ok: false, detail: e.to_string() },
                });
            }
            let ok = rep.iter().all(|c| c.ok);
            emit(json, &ValidateReport { ok, checks: rep, ambiguous_signs: l.ambiguous });
            Ok(if ok { 0 } else { 2 })
        }
        Cmd::Homology { file } => {
            let l = input::load(file)?;
            let p = surgered_homology(&l.link);
            emit(
                json,
                &HomologyReport {
                    group: p.h.to_string(),
                    b1: p.b1,
                    invariant_factors: p.h.invariant_factors(),
                    torsion_order: p.h.torsion_order(),
                    meridians: p.meridians.iter().map(|g| p.h.fmt_element(g)).collect(),
                    finite_order: p.i0.iter().map(|i| i + 1).collect(),
                },
            );
            Ok(0)
        }
        Cmd::Euler { file, window } => {
            let l = input::load(file)?;
            let p = surgered_homology(&l.link);
            let w = if p.b1 == 0 { None } else { Some(*window) };
            let classes = p
                .enumerate(w)?
                .into_iter()
                .map(|k| {
                    let g = p.class_element(&k.0)?;
                    let c = p.chern(&k.0)?;
                    Ok(EulerClass { class: p.h.fmt_element(&g), charge: k.0, chern: p.h.fmt_element(&c) })
                })
                .collect::<tsw_core::Result<Vec<_>>>()?;
            emit(json, &EulerReport { b1: p.b1, window: w, classes });
            Ok(0)
        }
        Cmd::Tau { file, charge, orientation, method } => {
            let l = input::load(file)?;
            let p = surgered_homology(&l.link);
            let k = charge_for(charge, &l, &p)?;
            let m = match method {
                Method::General => TauMethod::General,
                Method::Split => TauMethod::Split,
            };
            let t = p.tau_with(&k, &l.table, m)?;
            let (name, s) = oriented(&p, *orientation);
            let t = t.scale(&tsw_core::exactnum::int(s));
            emit(json, &ElementReport::new("tau", k, name, s, &t));
            Ok(0)
        }
        Cmd::Delta { file, charge, orientation } => {
            let l = input::load(file)?;
            let p = surgered_homology(&l.link);
            let k = charge_for(charge, &l, &p)?;
            let d = p.delta(&k, &l.table)?;
            let (name, s) = oriented(&p, *orientation);
            let d = d.scale(&tsw_core::exactnum::int(s));
            emit(json, &ElementReport::new("Delta", k, name, s, &d));
            Ok(0)
        }
        Cmd::Sw { file, charge, all, window, direction, split } => {
            let l = input::load(file)?;
            let p = surgered_homology(&l.link);
            let dir = direction.as_ref().map(|s| -> Result<_> {
                let w = parse_ints(s)?;
                if w.len() != p.m() {
                    bail!(Error::InvalidInput("direction needs one entry per component".into()));
                }
                Ok(p.h.from_word(&w))
            });
            let dir = dir.transpose()?;
            if *all {
                let rep = if *split {
                    if dir.is_some() {
                        bail!(Error::InvalidInput("the split closed form uses the default direction".into()));
                    }
                    SwReport {
                        method: "split closed form".into(),
                        table: sw::sw_split_table(&p, &l.table, *window)?,
                        relative_sign: split_relative_sign(&p),
                    }
                } else {
                    SwReport {
                        method: "neutral coefficient".into(),
                        table: sw::sw_table(&p, &l.table, *window, dir.as_ref())?,
                        relative_sign: 1,
                    }
                };
                emit(json, &rep);
            } else {
                let k = charge_for(charge, &l, &p)?;
                let (value, d) = if *split {
                    (sw::sw_split_value(&p, &k, &l.table)?, None)
                } else {
                    let d = if p.b1 == 1 { Some(sw::resolve_direction(&p, dir.as_ref())?) } else { None };
                    (sw::sw_value(&p, &k, &l.table, d.as_ref())?, d)
                };
                let g = p.class_element(&k)?;
                emit(
                    json,
                    &SwSingle {
                        charge: k,
                        class: p.h.fmt_element(&g),
                        value,
                        direction: d.map(|d| p.h.fmt_element(&d)),
                        global_sign: "undetermined".into(),
                    },
                );
            }
            Ok(0)
        }
        Cmd::Selftest { files } => {
            let mut out = Vec::new();
            let mut bad_input = false;
            for f in files {
                let l = input::load(f)?;
                let (fc, valid) = selftest(f, &l);
                bad_input |= !valid;
                out.push(fc);
            }
            let ok = out.iter().all(|f| f.checks.iter().all(|c| c.ok));
            emit(json, &SelftestReport { ok, files: out });
            Ok(if ok { 0 } else if bad_input { 2 } else { 3 })
        }
        Cmd::Library { name, framings, pd } => {
            let Some(name) = name else {
                for b in builtin_links() {
                    println!("{}", b.name);
                }
                return Ok(0);
            };
            let Some(b) = builtin(name) else {
                bail!(Error::InvalidInput(format!("no builtin link named {name:?}")));
            };
            let mut link = b.link.clone();
            if let Some(f) = framings {
                let f = parse_ints(f)?;
                if f.len() != link.m() {
                    bail!(Error::InvalidInput(format!("{name} has {} components", link.m())));
                }
                link = link.with_framings(&f);
            }
            let mut doc = input::document(&link, &b.table, None);
            if *pd {
                doc.conway = None;
                doc.pd = Some(b.diagram.pd_text());
            }
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(0)
        }
    }
}

fn oriented(p: &SurgeryPresentation, o: Orientation) -> (&'static str, i64) {
    match o {
        Orientation::Link => ("link", 1),
        Orientation::Canonical => ("canonical", p.orientation_sign()),
    }
}

/// Table checks, then the torsion identities at a few charges. The flag is false when the
/// table itself is invalid.
fn selftest(file: &Path, l: &input::Loaded) -> (FileChecks, bool) {
    let mut checks = conway_table_validate(&l.link, &l.table).checks;
    let valid = checks.iter().all(|c| c.ok);
    let p = surgered_homology(&l.link);
    if valid {
        let w = if p.b1 == 0 { None } else { Some(1) };
        let charges: Vec<Vec<i64>> = match p.enumerate(w) {
            Ok(c) => c.into_iter().map(|c| c.0).take(4).collect(),
            Err(e) => {
                checks.push(CheckResult { name: "enumerate".into(), ok: false, detail: e.to_string() });
                Vec::new()
            }
        };
        let mut v = vec![0; p.m()];
        v[0] = 1;
        for k in charges {
            let tag = |mut c: CheckResult| {
                c.name = format!("{} k={}", c.name, fmt_vec(&k));
                c
            };
            checks.push(tag(p.duality_check(&k, &l.table)));
            checks.push(tag(p.cross_check(&k, &l.table)));
            checks.push(tag(p.equivariance_check(&k, &v, &l.table)));
            if p.b1 >= 1 {
                checks.push(tag(p.projection_check(&k, &l.table)));
            }
            if l.link.is_algebraically_split() {
                checks.push(tag(p.fast_path_check(&k, &l.table)));
            }
            if p.b1 != 1 || sw::default_direction(&p).is_ok() {
                checks.push(tag(sw::torsion_duality_check(&p, &k, &l.table, None)));
            }
        }
    }
    (FileChecks { file: file.display().to_string(), b1: p.b1, checks }, valid)
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("TSW_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // an already initialized pool is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let rep = ErrorReport { error: error_kind(&e), message: format!("{e:#}") };
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&rep).expect("serializable"));
            }
            eprintln!("error: {}: {}", rep.error, rep.message);
            ExitCode::from(exit_code(&e))
        }
    }
}
