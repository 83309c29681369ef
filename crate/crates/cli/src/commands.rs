use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use paraself::bell::{
    classical_bound, quantum_value_fixed_measurements, BellExpression, CorrelationTable, SchemeKind,
};
use paraself::certify::{sweep_noise, ProtocolKind, ProtocolSpec, Verdict};
use paraself::io::{self, Provenance};
use paraself::numfmt;
use paraself::strategies::{
    adversary_copy_from, adversary_shared_randomness_from, apply_isotropic_noise, compose,
    qubit_seesaw, SeeSawOptions, StrategyPreset,
};
use paraself::{tol, Error, SingleCopyStrategy};

use crate::args::{BoundsArgs, CertifyArgs, Common, SimulateArgs, SweepArgs};
use crate::Failure;

fn seesaw_options(common: &Common) -> SeeSawOptions {
    let mut options = SeeSawOptions::default();
    if let Some(seed) = common.seed {
        options.seed = seed;
    }
    options
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::config(format!("--out {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::compute(format!("stdout: {e}")))
        }
    }
}

fn read_file(flag: &str, path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{flag} {}: {e}", path.display())))
}

fn format_failure(flag: &str, path: &Path, e: Error) -> Failure {
    match e {
        Error::Format { pointer, message } => {
            let pointer = if pointer.is_empty() {
                "/".to_string()
            } else {
                pointer
            };
            Failure::input(format!(
                "{flag} {}: at {pointer}: {message}",
                path.display()
            ))
        }
        other => Failure::input(format!("{flag} {}: {other}", path.display())),
    }
}

fn parse_preset(flag: &str, text: &str) -> Result<StrategyPreset, Failure> {
    text.parse()
        .map_err(|e: Error| Failure::config(format!("{flag}: {e}")))
}

fn build_single(
    flag: &str,
    preset: &StrategyPreset,
    options: &SeeSawOptions,
) -> Result<SingleCopyStrategy, Failure> {
    preset.single_copy_with(options).map_err(|e| match e {
        Error::SeeSawDidNotConverge { .. } | Error::OracleDisagreement { .. } => {
            Failure::compute(format!("{flag} {preset}: {e}"))
        }
        other => Failure::config(format!("{flag} {preset}: {other}")),
    })
}

/// Built-in name or path to an expression JSON file.
fn load_expression(text: &str) -> Result<BellExpression, Failure> {
    if let Some(builtin) = BellExpression::builtin(text) {
        return builtin.map_err(|e| Failure::config(format!("--bell {text}: {e}")));
    }
    let path = PathBuf::from(text);
    if !path.exists() {
        return Err(Failure::config(format!(
            "--bell {text:?}: neither a built-in (chsh, chsh-game, tilted-chsh(ALPHA)) nor a file"
        )));
    }
    let json = read_file("--bell", &path)?;
    io::expression_from_json(&json).map_err(|e| format_failure("--bell", &path, e))
}

/// One value for every copy, or exactly one per copy.
fn per_copy<T: Clone>(flag: &str, items: Vec<T>, n: usize) -> Result<Vec<T>, Failure> {
    match items.len() {
        1 => Ok(vec![items[0].clone(); n]),
        k if k == n => Ok(items),
        k => Err(Failure::config(format!(
            "{flag}: got {k} values for {n} copies; give 1 or {n}"
        ))),
    }
}

fn noise_spec(nu: f64, flag: &str) -> Result<paraself::NoiseSpec, Failure> {
    paraself::NoiseSpec::new(nu).map_err(|e| Failure::config(format!("{flag}: {e}")))
}

pub fn simulate(a: &SimulateArgs) -> Result<u8, Failure> {
    let presets = a
        .strategy
        .iter()
        .map(|s| parse_preset("--strategy", s))
        .collect::<Result<Vec<_>, _>>()?;
    let scheme: SchemeKind = a
        .scheme
        .parse()
        .map_err(|_| Failure::config(format!("--scheme: unknown scheme {:?}", a.scheme)))?;
    let noise = a.noise.map(|nu| noise_spec(nu, "--noise")).transpose()?;
    let options = seesaw_options(&a.common);

    let (table, provenance) = if let Some(adversary) = presets.iter().find(|p| p.is_adversary()) {
        if presets.len() != 1 {
            return Err(Failure::config(
                "--strategy: an adversary preset must be the only strategy",
            ));
        }
        if scheme != SchemeKind::Broadcast {
            return Err(Failure::config(
                "--scheme: adversary tables use the broadcast scheme",
            ));
        }
        let preset_n = match adversary {
            StrategyPreset::AdversaryCopy { n }
            | StrategyPreset::AdversarySharedRandomness { n } => *n,
            _ => None,
        };
        let n = match (preset_n, a.copies) {
            (Some(p), Some(c)) if p != c => {
                return Err(Failure::config(format!(
                    "--copies {c} contradicts --strategy {adversary}"
                )))
            }
            (Some(n), _) | (None, Some(n)) => n,
            (None, None) => {
                return Err(Failure::config("--copies: required for adversary presets"))
            }
        };
        check_copies(n)?;
        let mut single = build_single("--strategy", adversary, &options)?;
        if let Some(noise) = noise {
            single = apply_isotropic_noise(&single, noise)
                .map_err(|e| Failure::compute(format!("--noise: {e}")))?;
        }
        let single = single
            .table()
            .map_err(|e| Failure::compute(e.to_string()))?;
        let (table, construction) = match adversary {
            StrategyPreset::AdversaryCopy { .. } => {
                (adversary_copy_from(&single, n), "adversary-copy")
            }
            _ => (
                adversary_shared_randomness_from(&single, n),
                "adversary-shared-randomness",
            ),
        };
        let table = table.map_err(|e| Failure::compute(format!("composition: {e}")))?;
        let provenance = Provenance {
            strategies: vec![adversary.to_string()],
            construction: construction.into(),
            nu: a.noise,
        };
        (table, provenance)
    } else {
        let n = a.copies.unwrap_or(presets.len());
        check_copies(n)?;
        let presets = per_copy("--strategy", presets, n)?;
        let mut singles = Vec::with_capacity(n);
        for p in &presets {
            let mut s = build_single("--strategy", p, &options)?;
            if let Some(noise) = noise {
                s = apply_isotropic_noise(&s, noise)
                    .map_err(|e| Failure::compute(format!("--noise {p}: {e}")))?;
            }
            singles.push(s);
        }
        let table =
            compose(&singles, scheme).map_err(|e| Failure::compute(format!("composition: {e}")))?;
        let provenance = Provenance {
            strategies: presets.iter().map(ToString::to_string).collect(),
            construction: "tensor".into(),
            nu: a.noise,
        };
        (table, provenance)
    };
    write_output(
        a.common.out.as_deref(),
        &io::table_to_json(&table, &provenance),
    )?;
    Ok(0)
}

fn check_copies(n: usize) -> Result<(), Failure> {
    if (1..=tol::MAX_COPIES).contains(&n) {
        Ok(())
    } else {
        Err(Failure::config(format!(
            "--copies: {n} outside 1..={}",
            tol::MAX_COPIES
        )))
    }
}

fn load_table(flag: &str, path: &Path) -> Result<(CorrelationTable, Provenance), Failure> {
    let text = read_file(flag, path)?;
    io::table_from_json(&text).map_err(|e| format_failure(flag, path, e))
}

#[derive(Clone, Copy)]
enum Target {
    Value(f64),
    Oracle,
}

fn parse_target(text: &str) -> Result<Target, Failure> {
    if text == "oracle" {
        return Ok(Target::Oracle);
    }
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Target::Value(v)),
        _ => Err(Failure::config(format!(
            "--beta: expected a number or \"oracle\", got {text:?}"
        ))),
    }
}

pub fn certify(a: &CertifyArgs) -> Result<u8, Failure> {
    let (table, provenance) = load_table("--table", &a.table)?;
    let kind: ProtocolKind = a
        .protocol
        .parse()
        .map_err(|e: Error| Failure::config(format!("--protocol: {e}")))?;
    if a.common.tol.is_nan() || a.common.tol <= 0.0 {
        return Err(Failure::config(format!(
            "--tol: {} must be > 0",
            a.common.tol
        )));
    }
    let n = table.n_copies();
    let options = seesaw_options(&a.common);

    let spec = match kind {
        ProtocolKind::Theorem2 => {
            let reference = match (&a.reference, &a.reference_strategy) {
                (Some(path), _) => load_table("--reference", path)?.0,
                (None, Some(text)) => {
                    let preset = parse_preset("--reference-strategy", text)?;
                    build_single("--reference-strategy", &preset, &options)?
                        .table()
                        .map_err(|e| Failure::compute(e.to_string()))?
                }
                (None, None) => {
                    return Err(Failure::config(
                        "--reference: theorem2 needs --reference or --reference-strategy",
                    ))
                }
            };
            ProtocolSpec {
                kind,
                expressions: vec![],
                targets: vec![],
                reference: Some(reference),
                tol: a.common.tol,
            }
        }
        _ => {
            if a.bell.is_empty() {
                return Err(Failure::config("--bell: required for this protocol"));
            }
            if a.beta.is_empty() {
                return Err(Failure::config("--beta: required for this protocol"));
            }
            let exprs = a
                .bell
                .iter()
                .map(|b| load_expression(b))
                .collect::<Result<Vec<_>, _>>()?;
            let targets = a
                .beta
                .iter()
                .map(|b| parse_target(b))
                .collect::<Result<Vec<_>, _>>()?;
            if kind == ProtocolKind::Theorem1 && (exprs.len() != 1 || targets.len() != 1) {
                return Err(Failure::config(
                    "theorem1 takes exactly one --bell and one --beta",
                ));
            }
            let exprs = per_copy("--bell", exprs, n)?;
            let targets = per_copy("--beta", targets, n)?;
            let betas = resolve_targets(a, &provenance, &exprs, targets, &options)?;
            let (expressions, targets) = if kind == ProtocolKind::Theorem1 {
                (vec![exprs[0].clone()], vec![betas[0]])
            } else {
                (exprs, betas)
            };
            ProtocolSpec {
                kind,
                expressions,
                targets,
                reference: None,
                tol: a.common.tol,
            }
        }
    };
    let report = spec
        .run(&table)
        .map_err(|e| Failure::config(e.to_string()))?;
    write_output(a.common.out.as_deref(), &io::report_to_json(&report))?;
    Ok(match report.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::PreconditionViolated => 4,
    })
}

/// Replaces every `oracle` target by the top eigenvalue of the copy's Bell
/// operator under its strategy's measurements.
fn resolve_targets(
    a: &CertifyArgs,
    provenance: &Provenance,
    exprs: &[BellExpression],
    targets: Vec<Target>,
    options: &SeeSawOptions,
) -> Result<Vec<f64>, Failure> {
    let n = exprs.len();
    let needs_oracle = targets.iter().any(|t| matches!(t, Target::Oracle));
    let presets = if !needs_oracle {
        Vec::new()
    } else if !a.strategy.is_empty() {
        let p = a
            .strategy
            .iter()
            .map(|s| parse_preset("--strategy", s))
            .collect::<Result<Vec<_>, _>>()?;
        per_copy("--strategy", p, n)?
    } else if !provenance.strategies.is_empty() {
        let p = provenance
            .strategies
            .iter()
            .map(|s| parse_preset("table provenance strategy", s))
            .collect::<Result<Vec<_>, _>>()?;
        per_copy("table provenance strategies", p, n)?
    } else {
        return Err(Failure::config(
            "--beta oracle: pass --strategy or use a table with strategy provenance",
        ));
    };
    targets
        .into_iter()
        .enumerate()
        .map(|(k, t)| match t {
            Target::Value(v) => Ok(v),
            Target::Oracle => {
                let s = build_single("--strategy", &presets[k], options)?;
                quantum_value_fixed_measurements(&exprs[k], &s)
                    .map(|b| b.value)
                    .map_err(|e| Failure::config(format!("--beta oracle for copy {}: {e}", k + 1)))
            }
        })
        .collect()
}

pub fn bounds(a: &BoundsArgs) -> Result<u8, Failure> {
    let expr = load_expression(&a.bell)?;
    let options = seesaw_options(&a.common);
    let classical =
        classical_bound(&expr).map_err(|e| Failure::compute(format!("classical bound: {e}")))?;

    let strategy = match &a.strategy {
        Some(text) => {
            let preset = parse_preset("--strategy", text)?;
            Some(build_single("--strategy", &preset, &options)?)
        }
        None if expr.m() == 2 && expr.o() == 2 => Some(
            qubit_seesaw(&expr, expr.label(), &options)
                .map_err(|e| Failure::compute(format!("see-saw: {e}")))?,
        ),
        None => None,
    };
    let quantum = strategy
        .as_ref()
        .map(|s| {
            quantum_value_fixed_measurements(&expr, s).map_err(|e| match e {
                Error::ShapeMismatch(_) => Failure::config(format!("--strategy: {e}")),
                other => Failure::compute(format!("quantum value: {other}")),
            })
        })
        .transpose()?;

    let mut text = format!("classical: {}\n", numfmt::sig(classical.value, 10));
    match &quantum {
        Some(q) => text.push_str(&format!("quantum: {}\n", numfmt::sig(q.value, 10))),
        None => text.push_str("quantum: unavailable (pass --strategy)\n"),
    }
    print!("{text}");

    if a.witness {
        let json = serde_json::json!({
            "classical": io::witness_to_json(&classical),
            "quantum": quantum.as_ref().map(io::witness_to_json),
        });
        let mut out = serde_json::to_string_pretty(&json).expect("witness serializes");
        out.push('\n');
        write_output(a.common.out.as_deref(), &out)?;
    }
    Ok(0)
}

/// `START:STOP:STEP` (inclusive) or a comma-separated list; returned sorted
/// ascending without duplicates.
fn parse_nus(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = |why: &str| Failure::config(format!("--nus {text:?}: {why}"));
    let number = |s: &str| -> Result<f64, Failure> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad("not a number"))
    };
    let mut nus = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(bad("range needs START:STOP:STEP"));
        };
        let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(bad("range needs STEP > 0 and STOP >= START"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(bad("too many points"));
        }
        (0..count)
            .map(|k| (start + k as f64 * step).min(stop))
            .collect::<Vec<_>>()
    } else {
        text.split(',').map(number).collect::<Result<Vec<_>, _>>()?
    };
    if nus.is_empty() {
        return Err(bad("empty"));
    }
    if let Some(v) = nus.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(bad(&format!("visibility {v} outside [0, 1]")));
    }
    nus.sort_by(f64::total_cmp);
    nus.dedup();
    Ok(nus)
}

pub fn sweep(a: &SweepArgs) -> Result<u8, Failure> {
    let preset = parse_preset("--strategy", &a.strategy)?;
    if preset.is_adversary() {
        return Err(Failure::config(
            "--strategy: sweeps compose honest copies; adversary presets are not allowed",
        ));
    }
    check_copies(a.copies)?;
    let nus = parse_nus(&a.nus)?;
    let expr = match &a.bell {
        Some(text) => load_expression(text)?,
        None => preset
            .natural_expression()
            .ok_or_else(|| Failure::config(format!("--bell: required for --strategy {preset}")))?,
    };
    let single = build_single("--strategy", &preset, &seesaw_options(&a.common))?;
    let rows = sweep_noise(&single, a.copies, &expr, &nus).map_err(|e| match e {
        Error::ShapeMismatch(_) => Failure::config(format!("--bell: {e}")),
        other => Failure::compute(format!("sweep: {other}")),
    })?;
    write_output(a.common.out.as_deref(), &io::sweep_to_csv(&rows))?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_ranges() {
        assert_eq!(
            parse_nus("0:1:0.25").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(parse_nus("1.0").unwrap(), vec![1.0]);
        assert_eq!(parse_nus("0.5, 0.1,0.5").unwrap(), vec![0.1, 0.5]);
        assert_eq!(parse_nus("0:1:0.05").unwrap().len(), 21);
        for bad in ["", "0:1", "1:0:0.1", "0:1:0", "a", "1.5", "0:1:-1"] {
            assert!(parse_nus(bad).is_err(), "{bad}");
        }
    }
}
