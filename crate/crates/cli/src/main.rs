//! Batch front end: parse instance files, dispatch to the library, emit
//! verdicts with certificates.
//!
//! Exit codes: 0 for feasible/value verdicts, 1 for negative verdicts
//! (infeasible, a failed verification, a non-integrable quantity — the
//! certificate is still emitted), 2 for malformed input, with a diagnostic
//! naming the file and location. A directory input processes every `*.json`
//! inside it (verdict files excluded) in name order, writing
//! `<stem>.verdict.json` next to each instance atomically; the batch exit
//! code is the worst per-file code.

mod schema;
mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use charges::conglomerate::{
    check_conglomerability, disintegrate, probability_representation, solve_companion,
    solve_companion_with_nulls,
};
use charges::convex::{decompose, decompose_sampled, normalize_at_min, reconstruct, stieltjes_lambda};
use charges::integrate::integral;
use charges::lp::FeasibilityOutcome;
use charges::rational::{format_rational, parse_rational, Rational};
use charges::skorohod::{pushforward_measure, sample_companion, verify_pushforward, Enumeration, IntervalMeasure};
use charges::{carried_value, inner_measure, outer_measure, Error as CoreError, ExtendedRational};
use serde_json::json;

use schema::{
    rational_json, ConvexInput, InstanceFile, Kind, MeasureDto, Meta, Outcome, VerdictFile,
};

fn abs(r: &Rational) -> Rational {
    if r < &Rational::from_integer(0.into()) {
        -r.clone()
    } else {
        r.clone()
    }
}

#[derive(Parser)]
#[command(
    name = "charges",
    about = "Representation of linear functionals by finitely additive measures, in exact arithmetic",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide conglomerability: representing measure or violating combination
    Check { path: PathBuf },
    /// Probability representation: convex-hull membership with certificates
    Represent { path: PathBuf },
    /// Solve companion instances, with or without a null ideal
    Companion {
        path: PathBuf,
        /// Include the minimal-ring restriction of the representing measure
        #[arg(long)]
        emit_minimal_ring: bool,
    },
    /// Disintegrate a marginal into a prior mixture of kernels
    Disintegrate { path: PathBuf },
    /// Integrate a quantity, or report outer/inner measures of queried sets
    Integrate { path: PathBuf },
    /// Decompose a convex function into its kink measure
    Decompose {
        path: PathBuf,
        /// Bound the sampled reconstruction error at the evaluation points
        #[arg(long, value_parser = parse_tolerance)]
        tolerance: Option<Rational>,
    },
    /// Realize a finitely supported law through the universal dyadic map
    Skorohod {
        path: PathBuf,
        /// Seed for the sampling stream
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the built-in invariant suites
    Selftest,
}

fn parse_tolerance(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a rational (want p/q)"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Selftest => selftest::run(),
        Command::Check { path } => drive(&path, &|inst| execute_check(inst, false)),
        Command::Represent { path } => drive(&path, &|inst| execute_check(inst, true)),
        Command::Companion {
            path,
            emit_minimal_ring,
        } => drive(&path, &move |inst| execute_companion(inst, emit_minimal_ring)),
        Command::Disintegrate { path } => drive(&path, &execute_disintegrate),
        Command::Integrate { path } => drive(&path, &execute_integrate),
        Command::Decompose { path, tolerance } => {
            drive(&path, &move |inst| execute_decompose(inst, tolerance.as_ref()))
        }
        Command::Skorohod { path, seed } => {
            drive(&path, &move |inst| execute_skorohod(inst, seed))
        }
    }
}

/// Runs one executor over a file or over every instance file of a directory.
fn drive(path: &Path, exec: &dyn Fn(&InstanceFile) -> Result<Verdict>) -> Result<u8> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .with_context(|| format!("reading directory {}", path.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension().is_some_and(|x| x == "json")
                    && !p
                        .file_name()
                        .is_some_and(|n| n.to_string_lossy().ends_with(".verdict.json"))
            })
            .collect();
        files.sort();
        if files.is_empty() {
            bail!("no instance files in {}", path.display());
        }
        let mut worst = 0u8;
        for file in files {
            match process_file(&file, exec, false) {
                Ok(code) => worst = worst.max(code),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    worst = 2;
                }
            }
        }
        Ok(worst)
    } else {
        process_file(path, exec, true)
    }
}

/// The body of a verdict before it is stamped with id and metadata.
struct Verdict {
    outcome: Outcome,
    witness: Option<serde_json::Value>,
    error: Option<String>,
    pivots: u64,
    command: &'static str,
}

fn process_file(
    path: &Path,
    exec: &dyn Fn(&InstanceFile) -> Result<Verdict>,
    print: bool,
) -> Result<u8> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let instance: InstanceFile = serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))?;
    let verdict = exec(&instance).with_context(|| format!("{}", path.display()))?;
    let id = instance.id.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "instance".into())
    });
    let file = VerdictFile {
        id,
        outcome: verdict.outcome,
        witness: verdict.witness,
        error: verdict.error,
        meta: Meta {
            command: verdict.command.to_string(),
            pivots: verdict.pivots,
        },
    };
    let rendered = serde_json::to_string_pretty(&file)? + "\n";
    let out_path = verdict_path(path);
    write_atomically(&out_path, &rendered)?;
    if print {
        print!("{rendered}");
    }
    Ok(match verdict.outcome {
        Outcome::Feasible | Outcome::Value => 0,
        Outcome::Infeasible | Outcome::Error => 1,
    })
}

fn verdict_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());
    path.with_file_name(format!("{stem}.verdict.json"))
}

fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, contents)
        .with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn expect_kind(instance: &InstanceFile, allowed: &[Kind]) -> Result<()> {
    if allowed.contains(&instance.kind) {
        Ok(())
    } else {
        bail!(
            "kind `{}` does not fit this command (expected one of: {})",
            instance.kind,
            allowed
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

fn measure_json(labels: &[(String, Rational)]) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = labels
        .iter()
        .map(|(l, v)| (l.clone(), rational_json(v)))
        .collect();
    serde_json::Value::Object(map)
}

fn execute_check(instance: &InstanceFile, normalized: bool) -> Result<Verdict> {
    expect_kind(instance, &[Kind::Conglomerability])?;
    let inst = instance.conglomerability()?;
    let report = if normalized {
        probability_representation(&inst)
    } else {
        check_conglomerability(&inst)
    };
    let command = if normalized { "represent" } else { "check" };
    Ok(match report.outcome {
        FeasibilityOutcome::Feasible(mu) => {
            let labels: Vec<(String, Rational)> = inst
                .omega()
                .atoms()
                .iter()
                .cloned()
                .zip(mu.iter().cloned())
                .collect();
            Verdict {
                outcome: Outcome::Feasible,
                witness: Some(json!({ "measure": measure_json(&labels) })),
                error: None,
                pivots: report.pivots,
                command,
            }
        }
        FeasibilityOutcome::Infeasible(y) => {
            let basis_part: Vec<(String, Rational)> = inst
                .basis_labels()
                .iter()
                .cloned()
                .zip(y.iter().cloned())
                .collect();
            let mut witness = json!({ "certificate": measure_json(&basis_part) });
            if normalized {
                witness["normalization_multiplier"] = rational_json(&y[inst.dim()]);
            }
            Verdict {
                outcome: Outcome::Infeasible,
                witness: Some(witness),
                error: None,
                pivots: report.pivots,
                command,
            }
        }
    })
}

fn execute_companion(instance: &InstanceFile, emit_minimal: bool) -> Result<Verdict> {
    expect_kind(instance, &[Kind::Companion, Kind::CompanionNulls])?;
    let (m, x, family, x_prime, neg) = instance.companion_parts()?;
    if instance.kind == Kind::CompanionNulls && neg.is_none() {
        bail!("kind `companion_nulls` requires the `neg` field");
    }
    let sol = match (&instance.kind, neg) {
        (Kind::CompanionNulls, Some(neg)) => {
            solve_companion_with_nulls(&m, &x, &family, &x_prime, &neg)?
        }
        _ => solve_companion(&m, &x, &family, &x_prime)?,
    };
    Ok(match &sol.report.outcome {
        FeasibilityOutcome::Feasible(mu) => {
            let labels: Vec<(String, Rational)> = x_prime
                .domain()
                .atoms()
                .iter()
                .cloned()
                .zip(mu.iter().cloned())
                .collect();
            let mut witness = json!({ "measure": measure_json(&labels) });
            if emit_minimal {
                let minimal = sol.minimal.as_ref().expect("feasible branch");
                witness["minimal_ring"] =
                    serde_json::to_value(MeasureDto::from_structure(minimal))?;
            }
            Verdict {
                outcome: Outcome::Feasible,
                witness: Some(witness),
                error: None,
                pivots: sol.report.pivots,
                command: "companion",
            }
        }
        FeasibilityOutcome::Infeasible(y) => {
            let basis_part: Vec<(String, Rational)> = sol
                .instance
                .basis_labels()
                .iter()
                .cloned()
                .zip(y.iter().cloned())
                .collect();
            Verdict {
                outcome: Outcome::Infeasible,
                witness: Some(json!({ "certificate": measure_json(&basis_part) })),
                error: None,
                pivots: sol.report.pivots,
                command: "companion",
            }
        }
    })
}

fn execute_disintegrate(instance: &InstanceFile) -> Result<Verdict> {
    expect_kind(instance, &[Kind::Disintegration])?;
    let inst = instance.disintegration()?;
    let report = disintegrate(&inst);
    Ok(match &report.outcome {
        FeasibilityOutcome::Feasible(lambda) => {
            let labels: Vec<(String, Rational)> = inst
                .thetas()
                .iter()
                .cloned()
                .zip(lambda.iter().cloned())
                .collect();
            Verdict {
                outcome: Outcome::Feasible,
                witness: Some(json!({ "prior": measure_json(&labels) })),
                error: None,
                pivots: report.pivots,
                command: "disintegrate",
            }
        }
        FeasibilityOutcome::Infeasible(y) => {
            // one multiplier per algebra member, plus the normalization row
            let members: Vec<(String, Rational)> = inst
                .algebra()
                .sets()
                .iter()
                .map(|s| s.to_string())
                .zip(y.iter().cloned())
                .collect();
            Verdict {
                outcome: Outcome::Infeasible,
                witness: Some(json!({
                    "certificate": measure_json(&members),
                    "normalization_multiplier": rational_json(&y[inst.algebra().len()]),
                })),
                error: None,
                pivots: report.pivots,
                command: "disintegrate",
            }
        }
    })
}

fn execute_integrate(instance: &InstanceFile) -> Result<Verdict> {
    expect_kind(instance, &[Kind::Integral, Kind::Measure])?;
    let ms = instance.measure_structure()?;
    if instance.kind == Kind::Measure {
        let ground = ms.ground().clone();
        let queries = instance.queries.clone().unwrap_or_default();
        let mut rows = Vec::new();
        for labels in &queries {
            let e = ground.subset(labels.iter())?;
            let outer = outer_measure(&ms, &e)?;
            let inner = inner_measure(&ms, &e)?;
            let carried = carried_value(&ms, &e)?;
            rows.push(json!({
                "set": labels,
                "outer": match &outer {
                    ExtendedRational::Finite(v) => rational_json(v),
                    ExtendedRational::Infinite => json!("inf"),
                },
                "inner": rational_json(&inner),
                "carried": carried.is_some(),
            }));
        }
        let mut witness = json!({ "queries": rows });
        if instance.emit_carrier.unwrap_or(false) {
            let carrier = charges::carrier_ring(&ms)?;
            witness["carrier"] = serde_json::to_value(MeasureDto::from_structure(&carrier))?;
        }
        return Ok(Verdict {
            outcome: Outcome::Value,
            witness: Some(witness),
            error: None,
            pivots: 0,
            command: "integrate",
        });
    }
    let x = instance.quantity_on(ms.ground())?;
    match integral(&x, &ms) {
        Ok(value) => Ok(Verdict {
            outcome: Outcome::Value,
            witness: Some(json!({ "value": rational_json(&value) })),
            error: None,
            pivots: 0,
            command: "integrate",
        }),
        Err(CoreError::NotIntegrable(gap)) => Ok(Verdict {
            outcome: Outcome::Error,
            witness: Some(json!({
                "not_integrable": {
                    "lower": rational_json(&gap.lower),
                    "upper": gap.upper.as_ref().map(rational_json).unwrap_or(json!("inf")),
                }
            })),
            error: Some("not integrable: lower and upper layer integrals differ".into()),
            pivots: 0,
            command: "integrate",
        }),
        Err(other) => Err(other.into()),
    }
}

fn execute_decompose(instance: &InstanceFile, tolerance: Option<&Rational>) -> Result<Verdict> {
    expect_kind(instance, &[Kind::Convex])?;
    let function = instance
        .function
        .as_ref()
        .ok_or_else(|| anyhow!("kind `convex` requires the `function` field"))?
        .to_input()?;
    let eval_points: Vec<Rational> = instance
        .evaluate
        .as_ref()
        .map(|pts| pts.iter().map(|r| r.to_rational()).collect::<Result<_>>())
        .transpose()?
        .unwrap_or_default();

    match function {
        ConvexInput::PiecewiseLinear(phi) => {
            let d = decompose(&phi)?;
            let (_, hat) = normalize_at_min(&phi)?;
            let atoms: Vec<serde_json::Value> = d
                .nu
                .atoms()
                .iter()
                .map(|(x, m)| json!([format_rational(x), format_rational(m)]))
                .collect();
            let mut witness = json!({
                "x0": rational_json(&d.x0),
                "atoms": atoms,
            });
            if !eval_points.is_empty() {
                let recon: Vec<serde_json::Value> = eval_points
                    .iter()
                    .map(|v| {
                        let value =
                            reconstruct(&d.x0, &d.nu, &d.x0, &hat.eval(&d.x0), v);
                        json!({ "at": format_rational(v), "value": format_rational(&value) })
                    })
                    .collect();
                witness["reconstruction"] = json!(recon);
            }
            if let Some(ts) = &instance.thresholds {
                let grid = ts
                    .iter()
                    .map(|r| r.to_rational())
                    .collect::<Result<Vec<_>>>()?;
                let sm = stieltjes_lambda(&phi, &grid)?;
                let cells: Vec<serde_json::Value> = sm
                    .cells
                    .iter()
                    .map(|c| {
                        let cell = sm
                            .structure
                            .ground()
                            .subset_of_indices([sm.cells.iter().position(|d| d == c).unwrap()]);
                        json!({
                            "lo": format_rational(&c.lo),
                            "hi": format_rational(&c.hi),
                            "mass": rational_json(sm.structure.value(&cell).unwrap()),
                        })
                    })
                    .collect();
                witness["stieltjes"] = json!({ "cells": cells });
            }
            Ok(Verdict {
                outcome: Outcome::Value,
                witness: Some(witness),
                error: None,
                pivots: 0,
                command: "decompose",
            })
        }
        ConvexInput::Sampled(phi) => {
            let d = decompose_sampled(&phi)?;
            let cells = d.nu.density().expect("sampled decomposition is gridded");
            let mut witness = json!({
                "x0": rational_json(&d.x0),
                "density": {
                    "start": rational_json(&cells.start),
                    "step": rational_json(&cells.step),
                    "masses": cells.masses.iter().map(format_rational).collect::<Vec<_>>(),
                },
            });
            let mut max_err: Option<Rational> = None;
            if !eval_points.is_empty() {
                let (x0n, hat) = charges::convex::normalize_sampled_at_min(&phi)?;
                let origin_index = hat
                    .values()
                    .iter()
                    .enumerate()
                    .find(|(j, _)| hat.grid_point(*j) == x0n)
                    .map(|(j, _)| j)
                    .expect("minimizer on the grid");
                let phi_x0 = hat.values()[origin_index].clone();
                let mut recon = Vec::new();
                for v in &eval_points {
                    let value = reconstruct(&d.x0, &d.nu, &x0n, &phi_x0, v);
                    // compare against the normalized sample when v is on grid
                    let grid_idx = hat
                        .values()
                        .iter()
                        .enumerate()
                        .find(|(j, _)| hat.grid_point(*j) == *v)
                        .map(|(j, _)| j);
                    if let Some(j) = grid_idx {
                        let err = abs(&(&value - &hat.values()[j]));
                        if max_err.as_ref().is_none_or(|m| &err > m) {
                            max_err = Some(err);
                        }
                    }
                    recon.push(json!({
                        "at": format_rational(v),
                        "value": format_rational(&value),
                    }));
                }
                witness["reconstruction"] = json!(recon);
                if let Some(err) = &max_err {
                    witness["max_grid_error"] = rational_json(err);
                }
            }
            if let (Some(tol), Some(err)) = (tolerance, &max_err) {
                if err > tol {
                    return Ok(Verdict {
                        outcome: Outcome::Error,
                        witness: Some(witness),
                        error: Some(format!(
                            "reconstruction error {} exceeds tolerance {}",
                            format_rational(err),
                            format_rational(tol)
                        )),
                        pivots: 0,
                        command: "decompose",
                    });
                }
            }
            Ok(Verdict {
                outcome: Outcome::Value,
                witness: Some(witness),
                error: None,
                pivots: 0,
                command: "decompose",
            })
        }
    }
}

fn execute_skorohod(instance: &InstanceFile, seed: u64) -> Result<Verdict> {
    expect_kind(instance, &[Kind::Skorohod])?;
    let law_dto = instance
        .law
        .as_ref()
        .ok_or_else(|| anyhow!("kind `skorohod` requires the `law` field"))?;
    let mut law = std::collections::BTreeMap::new();
    for (k, v) in law_dto {
        law.insert(k.clone(), v.to_rational()?);
    }
    let enumeration = Enumeration::new(
        instance
            .enumeration
            .clone()
            .ok_or_else(|| anyhow!("kind `skorohod` requires the `enumeration` field"))?,
    )?;
    let tests: Vec<std::collections::BTreeMap<String, Rational>> = instance
        .tests
        .as_ref()
        .map(|ts| {
            ts.iter()
                .map(|t| {
                    t.iter()
                        .map(|(k, v)| Ok((k.clone(), v.to_rational()?)))
                        .collect::<Result<_>>()
                })
                .collect::<Result<_>>()
        })
        .transpose()?
        .unwrap_or_default();

    let (im, constructed) = match &instance.interval_measure {
        Some(cells) => {
            let mut masses = std::collections::BTreeMap::new();
            for (k, v) in cells {
                let n: u32 = k
                    .parse()
                    .map_err(|_| anyhow!("interval_measure key `{k}` is not a cell index"))?;
                masses.insert(n, v.to_rational()?);
            }
            (IntervalMeasure::new(masses)?, false)
        }
        None => (pushforward_measure(&law, &enumeration)?, true),
    };
    let verified = verify_pushforward(&law, &enumeration, &im, &tests)?;
    let cells_json: serde_json::Map<String, serde_json::Value> = im
        .masses()
        .iter()
        .map(|(n, m)| (n.to_string(), rational_json(m)))
        .collect();
    let mut witness = json!({
        "cells": serde_json::Value::Object(cells_json),
        "verified": verified,
        "constructed": constructed,
    });
    if let Some(n) = instance.sample {
        let report = sample_companion(&law, &enumeration, n, seed)?;
        witness["sample"] = json!({
            "seed": seed,
            "draws": n,
            "counts": report.counts,
            "empirical": report
                .empirical
                .iter()
                .map(|(k, v)| (k.clone(), format_rational(v)))
                .collect::<std::collections::BTreeMap<_, _>>(),
            "tv_distance": format_rational(&report.tv_distance),
        });
    }
    Ok(Verdict {
        outcome: if verified {
            Outcome::Feasible
        } else {
            Outcome::Infeasible
        },
        witness: Some(witness),
        error: None,
        pivots: 0,
        command: "skorohod",
    })
}
