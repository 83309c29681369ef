//! Certification verdicts for the four parallel self-testing protocols and
//! the isotropic-noise sweep.
//!
//! Certification is exact-statistics: `tol` is numerical slack, not a
//! noise-robustness margin. Every copy is always evaluated so diagnostics are
//! complete.

use std::fmt;

use crate::bell::{
    averaged_j_percopy, averaged_setting_values, classical_bound, conditional_slice,
    conditional_values, correlator, BellExpression, CorrelationTable, SchemeKind,
};
use crate::error::{Error, Result};
use crate::par;
use crate::radix;
use crate::strategies::{apply_isotropic_noise, compose, NoiseSpec, SingleCopyStrategy};
use crate::tol;

/// Zero-probability prefixes listed individually per copy before summarizing.
const MAX_LISTED_PREFIXES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    PreconditionViolated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::PreconditionViolated => "precondition-violated",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome for one copy. `value` is `None` when it could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct CopyResult {
    pub i: usize,
    pub value: Option<f64>,
    pub target: f64,
    /// `|value - target|`.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub verdict: Verdict,
    pub copies: Vec<CopyResult>,
    pub diagnostics: Vec<String>,
}

impl CertificationReport {
    /// A copy whose value is known and misses its target fails the table
    /// outright. Otherwise any copy that could not be evaluated makes the
    /// verdict a precondition violation.
    fn assemble(
        copies: Vec<CopyResult>,
        mut diagnostics: Vec<String>,
        precondition: bool,
        tol: f64,
    ) -> Self {
        let mut failed = false;
        for c in &copies {
            if let (Some(v), Some(m)) = (c.value, c.margin) {
                if m.is_nan() || m > tol {
                    failed = true;
                    diagnostics.push(format!(
                        "copy {}: value {v} misses target {} by {m:e} (tol {tol:e})",
                        c.i, c.target
                    ));
                }
            }
        }
        let undefined = copies.iter().any(|c| c.value.is_none());
        let verdict = if failed {
            Verdict::Fail
        } else if precondition || undefined {
            Verdict::PreconditionViolated
        } else {
            Verdict::Pass
        };
        Self {
            verdict,
            copies,
            diagnostics,
        }
    }

    fn precondition(message: String, copies: Vec<CopyResult>) -> Self {
        Self {
            verdict: Verdict::PreconditionViolated,
            copies,
            diagnostics: vec![message],
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Largest margin over copies with a computed value.
    pub fn max_margin(&self) -> Option<f64> {
        self.copies.iter().filter_map(|c| c.margin).reduce(f64::max)
    }
}

fn copy_result(i: usize, value: Option<f64>, target: f64) -> CopyResult {
    CopyResult {
        i,
        value,
        target,
        margin: value.map(|v| (v - target).abs()),
    }
}

/// Which protocol a [`ProtocolSpec`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    /// Equal copies, one Bell expression, broadcast inputs.
    Theorem1,
    /// Full-statistics reproduction of a reference table, broadcast inputs.
    Theorem2,
    /// Per-copy Bell expressions sharing the input count, broadcast inputs.
    Theorem3,
    /// Per-copy inputs, expressions averaged over the other copies' inputs.
    Theorem4,
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem1" => Ok(Self::Theorem1),
            "theorem2" => Ok(Self::Theorem2),
            "theorem3" => Ok(Self::Theorem3),
            "theorem4" => Ok(Self::Theorem4),
            other => Err(Error::InvalidParameter(format!(
                "unknown protocol {other:?}"
            ))),
        }
    }
}

/// Everything a certifier needs besides the observed table.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    /// One expression (Theorem 1) or one per copy (Theorems 3, 4); unused
    /// by Theorem 2.
    pub expressions: Vec<BellExpression>,
    /// One target (Theorem 1) or one per copy.
    pub targets: Vec<f64>,
    /// Theorem 2 only.
    pub reference: Option<CorrelationTable>,
    pub tol: f64,
}

impl ProtocolSpec {
    pub fn run(&self, table: &CorrelationTable) -> Result<CertificationReport> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tol = {} must be > 0",
                self.tol
            )));
        }
        let one = |what: &str, v: usize| {
            if v == 1 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{what}: expected exactly one, got {v}"
                )))
            }
        };
        match self.kind {
            ProtocolKind::Theorem1 => {
                one("expressions", self.expressions.len())?;
                one("targets", self.targets.len())?;
                Ok(certify_theorem1(
                    table,
                    &self.expressions[0],
                    self.targets[0],
                    self.tol,
                ))
            }
            ProtocolKind::Theorem2 => {
                let reference = self.reference.as_ref().ok_or_else(|| {
                    Error::InvalidParameter("theorem2 needs a reference table".into())
                })?;
                Ok(certify_theorem2(table, reference, self.tol))
            }
            ProtocolKind::Theorem3 => Ok(certify_theorem3(
                table,
                &self.expressions,
                &self.targets,
                self.tol,
            )),
            ProtocolKind::Theorem4 => Ok(certify_theorem4(
                table,
                &self.expressions,
                &self.targets,
                self.tol,
            )),
        }
    }
}

/// `J^i = beta` for every copy of a broadcast table with equal copies.
pub fn certify_theorem1(
    table: &CorrelationTable,
    expr: &BellExpression,
    beta: f64,
    tol: f64,
) -> CertificationReport {
    let n = table.n_copies();
    certify_conditional(table, &vec![expr.clone(); n], &vec![beta; n], tol)
}

/// Copy-specific expressions and targets on a broadcast table whose copies
/// share the input count.
pub fn certify_theorem3(
    table: &CorrelationTable,
    exprs: &[BellExpression],
    betas: &[f64],
    tol: f64,
) -> CertificationReport {
    certify_conditional(table, exprs, betas, tol)
}

fn certify_conditional(
    table: &CorrelationTable,
    exprs: &[BellExpression],
    betas: &[f64],
    tol: f64,
) -> CertificationReport {
    let n = table.n_copies();
    if table.scheme() != SchemeKind::Broadcast {
        return CertificationReport::precondition("table is not broadcast-scheme".into(), vec![]);
    }
    if exprs.len() != n || betas.len() != n {
        return CertificationReport::precondition(
            format!(
                "{n} copies but {} expressions and {} targets",
                exprs.len(),
                betas.len()
            ),
            vec![],
        );
    }
    for (k, e) in exprs.iter().enumerate() {
        if e.m() != table.num_inputs() || e.o() != table.output_arities()[k] {
            return CertificationReport::precondition(
                format!(
                    "copy {}: expression {:?} is ({}, {}), table slot is ({}, {})",
                    k + 1,
                    e.label(),
                    e.m(),
                    e.o(),
                    table.num_inputs(),
                    table.output_arities()[k]
                ),
                vec![],
            );
        }
    }

    let per_copy: Vec<(Option<f64>, Vec<String>)> = par::map_range(n, |k| {
        let i = k + 1;
        let values = match conditional_values(table, &exprs[k], i) {
            Ok(v) => v,
            Err(e) => return (None, vec![format!("copy {i}: {e}")]),
        };
        let total = values.len();
        let mut failures = Vec::new();
        let (mut sum, mut defined) = (0.0, 0usize);
        for v in values {
            match v {
                Ok(v) => {
                    sum += v;
                    defined += 1;
                }
                Err(e) => failures.push(e),
            }
        }
        if failures.is_empty() {
            return (Some(sum / total as f64), Vec::new());
        }
        let mut notes: Vec<String> = failures
            .iter()
            .take(MAX_LISTED_PREFIXES)
            .map(|e| format!("copy {i}: {e}"))
            .collect();
        if failures.len() > MAX_LISTED_PREFIXES {
            notes.push(format!(
                "copy {i}: {} more prefixes with vanishing probability",
                failures.len() - MAX_LISTED_PREFIXES
            ));
        }
        if defined > 0 {
            notes.push(format!(
                "copy {i}: J undefined; mean over the {defined} of {total} prefixes that occur is {}",
                sum / defined as f64
            ));
        }
        (None, notes)
    });

    let mut copies = Vec::with_capacity(n);
    let mut diagnostics = Vec::new();
    for (k, (value, notes)) in per_copy.into_iter().enumerate() {
        diagnostics.extend(notes);
        copies.push(copy_result(k + 1, value, betas[k]));
    }
    CertificationReport::assemble(copies, diagnostics, false, tol)
}

/// Reproduction of a strictly positive single-copy reference: copy 1
/// matches it, and for every later copy and every prefix the conditional
/// distribution matches it. The per-copy value is the largest entrywise
/// deviation (target 0). Binary-outcome correlators are listed as
/// diagnostics.
pub fn certify_theorem2(
    table: &CorrelationTable,
    reference: &CorrelationTable,
    tol: f64,
) -> CertificationReport {
    if !reference.is_single() {
        return CertificationReport::precondition("reference is not single-copy".into(), vec![]);
    }
    if let Some(pos) = reference.probs().iter().position(|&p| p <= 0.0) {
        return CertificationReport::precondition(
            format!("reference entry {pos} is not strictly positive"),
            vec![],
        );
    }
    let (m, o) = (reference.num_inputs(), reference.num_outputs());
    if table.scheme() != SchemeKind::Broadcast
        || table.num_inputs() != m
        || table.output_arities().iter().any(|&oi| oi != o)
    {
        return CertificationReport::precondition(
            format!("table is not a broadcast table of ({m}, {o}) copies"),
            vec![],
        );
    }

    let n = table.n_copies();
    let binary = o == 2;
    let per_copy: Vec<(f64, Vec<String>)> = par::map_range(n, |k| {
        let i = k + 1;
        let npref = radix::size(&table.output_arities()[..k]);
        let mut worst = 0.0f64;
        let mut notes = Vec::new();
        for pa in 0..npref {
            for pb in 0..npref {
                let slice = conditional_slice(table, i, pa, pb).expect("shape checked");
                let prefix = if i == 1 {
                    String::new()
                } else {
                    format!(" | prefix (a={pa}, b={pb})")
                };
                for x in 0..m {
                    for y in 0..m {
                        if !slice.is_defined(x, y) {
                            worst = f64::INFINITY;
                            notes.push(format!(
                                "copy {i}{prefix}: prefix probability {:e} at (x={x}, y={y})",
                                slice.prefix_prob(x, y)
                            ));
                            continue;
                        }
                        for a in 0..o {
                            for b in 0..o {
                                let d = (slice.get(x, y, a, b) - reference.get(x, y, a, b)).abs();
                                worst = worst.max(d);
                            }
                        }
                    }
                }
                if binary {
                    if let Some(t) = slice.to_table() {
                        let e: Vec<String> = [(0, 0), (0, 1), (1, 0), (1, 1)]
                            .iter()
                            .filter(|&&(x, y)| x < m && y < m)
                            .map(|&(x, y)| {
                                format!(
                                    "<A{x}B{y}> = {:.10}",
                                    correlator(&t, x, y).unwrap_or(f64::NAN)
                                )
                            })
                            .collect();
                        notes.push(format!("copy {i}{prefix}: {}", e.join(", ")));
                    }
                }
            }
        }
        (worst, notes)
    });

    let mut copies = Vec::with_capacity(n);
    let mut diagnostics = Vec::new();
    for (k, (worst, notes)) in per_copy.into_iter().enumerate() {
        diagnostics.extend(notes);
        let value = if worst.is_finite() { Some(worst) } else { None };
        if value.is_none() {
            diagnostics.push(format!(
                "copy {}: conditional distribution undefined for some prefix",
                k + 1
            ));
        }
        copies.push(copy_result(k + 1, value, 0.0));
    }
    if let Some(m) = copies.iter().filter_map(|c| c.value).reduce(f64::max) {
        diagnostics.push(format!("max deviation {m:e}"));
    }
    CertificationReport::assemble(copies, diagnostics, false, tol)
}

/// Averaged per-copy values of a per-copy table against per-copy targets.
pub fn certify_theorem4(
    table: &CorrelationTable,
    exprs: &[BellExpression],
    betas: &[f64],
    tol: f64,
) -> CertificationReport {
    let n = table.n_copies();
    if table.scheme() != SchemeKind::PerCopy {
        return CertificationReport::precondition("table is not per-copy-scheme".into(), vec![]);
    }
    if exprs.len() != n || betas.len() != n {
        return CertificationReport::precondition(
            format!(
                "{n} copies but {} expressions and {} targets",
                exprs.len(),
                betas.len()
            ),
            vec![],
        );
    }
    let mut copies = Vec::with_capacity(n);
    let mut diagnostics = Vec::new();
    let mut precondition = false;
    for i in 1..=n {
        match averaged_j_percopy(table, exprs, i) {
            Ok(v) => {
                if let (Ok(settings), Ok(local)) = (
                    averaged_setting_values(table, &exprs[i - 1], i),
                    classical_bound(&exprs[i - 1]),
                ) {
                    let lo = settings.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = settings.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    diagnostics.push(format!(
                        "copy {i}: settings range [{lo}, {hi}], local bound {}",
                        local.value
                    ));
                }
                copies.push(copy_result(i, Some(v), betas[i - 1]));
            }
            Err(e) => {
                precondition = true;
                diagnostics.push(format!("copy {i}: {e}"));
                copies.push(copy_result(i, None, betas[i - 1]));
            }
        }
    }
    CertificationReport::assemble(copies, diagnostics, precondition, tol)
}

/// One row of a noise sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub nu: f64,
    /// `J^1 .. J^n`.
    pub j: Vec<f64>,
}

/// For each visibility, composes `n` noisy broadcast copies and reports every
/// `J^i`. Rows keep the order of `nus`.
pub fn sweep_noise(
    strategy: &SingleCopyStrategy,
    n: usize,
    expr: &BellExpression,
    nus: &[f64],
) -> Result<Vec<SweepRow>> {
    if n == 0 || n > tol::MAX_COPIES {
        return Err(Error::TooManyCopies {
            requested: n,
            max: tol::MAX_COPIES,
        });
    }
    par::map_slice(nus, |&nu| {
        let noisy = apply_isotropic_noise(strategy, NoiseSpec::new(nu)?)?;
        let table = compose(&vec![noisy; n], SchemeKind::Broadcast)?;
        let j = (1..=n)
            .map(|i| crate::bell::j_value(&table, expr, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(SweepRow { nu, j })
    })
    .into_iter()
    .collect()
}
