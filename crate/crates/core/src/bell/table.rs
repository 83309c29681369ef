use std::fmt;

use crate::error::{Error, Result};
use crate::radix;
use crate::tol;

/// How inputs reach the copies of a composed experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// One input per party, applied to every copy.
    Broadcast,
    /// One input per copy per party; joint inputs are mixed-radix.
    PerCopy,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Broadcast => "broadcast",
            Self::PerCopy => "per-copy",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "broadcast" => Ok(Self::Broadcast),
            "per-copy" | "percopy" => Ok(Self::PerCopy),
            other => Err(Error::InvalidParameter(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Joint distribution `p(a, b | x, y)` of an `n`-copy experiment.
///
/// Joint outputs (and, under [`SchemeKind::PerCopy`], joint inputs) are
/// mixed-radix with copy 1 least significant. Storage is flat in
/// `(x, y, a, b)` order. Single-copy tables have `n_copies() == 1` and either
/// scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    scheme: SchemeKind,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    probs: Vec<f64>,
}

impl CorrelationTable {
    /// Validates shape, entry range and per-input-pair normalization.
    pub fn new(
        scheme: SchemeKind,
        inputs: Vec<usize>,
        outputs: Vec<usize>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        let table = Self::new_unchecked(scheme, inputs, outputs, probs)?;
        table.check_entries()?;
        Ok(table)
    }

    /// Shape checks only; entries are not range- or normalization-checked.
    pub(crate) fn new_unchecked(
        scheme: SchemeKind,
        inputs: Vec<usize>,
        outputs: Vec<usize>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        if inputs.is_empty() || inputs.len() != outputs.len() {
            return Err(Error::InvalidTable(format!(
                "{} input arities and {} output arities",
                inputs.len(),
                outputs.len()
            )));
        }
        if inputs.iter().chain(&outputs).any(|&k| k == 0) {
            return Err(Error::InvalidTable("arities must be >= 1".into()));
        }
        if scheme == SchemeKind::Broadcast && inputs.iter().any(|&m| m != inputs[0]) {
            return Err(Error::SchemeInputMismatch(format!(
                "broadcast copies need equal input arities, got {inputs:?}"
            )));
        }
        let table = Self {
            scheme,
            inputs,
            outputs,
            probs,
        };
        let expected = table.num_inputs().pow(2) * table.num_outputs().pow(2);
        if table.probs.len() != expected {
            return Err(Error::InvalidTable(format!(
                "{} entries, expected {expected}",
                table.probs.len()
            )));
        }
        Ok(table)
    }

    fn check_entries(&self) -> Result<()> {
        if let Some(i) = self
            .probs
            .iter()
            .position(|p| !p.is_finite() || *p < -tol::ENTRY || *p > 1.0 + tol::ENTRY)
        {
            return Err(Error::InvalidTable(format!(
                "entry {i} = {} outside [0, 1]",
                self.probs[i]
            )));
        }
        let nx = self.num_inputs();
        for x in 0..nx {
            for y in 0..nx {
                let s: f64 = self.row(x, y).iter().sum();
                if (s - 1.0).abs() > tol::STRUCTURAL {
                    return Err(Error::InvalidTable(format!(
                        "p(.,.|x={x},y={y}) sums to {s}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Single-copy table with `m` inputs and `o` outputs per party.
    pub fn single(m: usize, o: usize, probs: Vec<f64>) -> Result<Self> {
        Self::new(SchemeKind::Broadcast, vec![m], vec![o], probs)
    }

    /// Local deterministic table: Alice outputs `alice[x]`, Bob `bob[y]`.
    pub fn deterministic(m: usize, o: usize, alice: &[usize], bob: &[usize]) -> Result<Self> {
        if alice.len() != m || bob.len() != m || alice.iter().chain(bob).any(|&v| v >= o) {
            return Err(Error::InvalidParameter(format!(
                "deterministic assignment {alice:?}/{bob:?} for m = {m}, o = {o}"
            )));
        }
        let mut probs = vec![0.0; m * m * o * o];
        for x in 0..m {
            for y in 0..m {
                probs[((x * m + y) * o + alice[x]) * o + bob[y]] = 1.0;
            }
        }
        Self::single(m, o, probs)
    }

    /// Uniform outputs for every input pair.
    pub fn uniform(m: usize, o: usize) -> Self {
        let p = 1.0 / (o * o) as f64;
        Self::single(m, o, vec![p; m * m * o * o]).expect("uniform table is valid")
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn n_copies(&self) -> usize {
        self.inputs.len()
    }

    pub fn input_arities(&self) -> &[usize] {
        &self.inputs
    }

    pub fn output_arities(&self) -> &[usize] {
        &self.outputs
    }

    /// Number of (joint) inputs per party.
    pub fn num_inputs(&self) -> usize {
        match self.scheme {
            SchemeKind::Broadcast => self.inputs[0],
            SchemeKind::PerCopy => radix::size(&self.inputs),
        }
    }

    /// Number of joint outputs per party.
    pub fn num_outputs(&self) -> usize {
        radix::size(&self.outputs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        let nx = self.num_inputs();
        let na = self.num_outputs();
        ((x * nx + y) * na + a) * na + b
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.probs[self.index(x, y, a, b)]
    }

    /// All `p(a, b | x, y)` for one input pair, `a`-major.
    pub fn row(&self, x: usize, y: usize) -> &[f64] {
        let block = self.num_outputs().pow(2);
        let start = (x * self.num_inputs() + y) * block;
        &self.probs[start..start + block]
    }

    pub fn is_single(&self) -> bool {
        self.n_copies() == 1
    }

    /// Copy index check (1-based).
    pub(crate) fn check_copy(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n_copies() {
            return Err(Error::InvalidCopy {
                index: i,
                copies: self.n_copies(),
            });
        }
        Ok(())
    }

    /// Broadcast marginal on copies `1..=k`.
    pub fn marginal_leading(&self, k: usize) -> Result<Self> {
        self.require_broadcast("leading marginal")?;
        self.check_copy(k)?;
        if k == self.n_copies() {
            return Ok(self.clone());
        }
        let na = self.num_outputs();
        let keep = radix::size(&self.outputs[..k]);
        let nx = self.num_inputs();
        let mut probs = vec![0.0; nx * nx * keep * keep];
        for x in 0..nx {
            for y in 0..nx {
                let row = self.row(x, y);
                let out = &mut probs[(x * nx + y) * keep * keep..][..keep * keep];
                for a in 0..na {
                    for b in 0..na {
                        out[(a % keep) * keep + b % keep] += row[a * na + b];
                    }
                }
            }
        }
        Self::new_unchecked(
            SchemeKind::Broadcast,
            self.inputs[..k].to_vec(),
            self.outputs[..k].to_vec(),
            probs,
        )
    }

    /// Single-copy marginal of copy `i` (1-based) of a broadcast table.
    pub fn copy_marginal(&self, i: usize) -> Result<Self> {
        self.require_broadcast("copy marginal")?;
        self.check_copy(i)?;
        let na = self.num_outputs();
        let o = self.outputs[i - 1];
        let m = self.inputs[0];
        let mut probs = vec![0.0; m * m * o * o];
        let digit_a: Vec<usize> = (0..na)
            .map(|a| radix::digit(a, &self.outputs, i - 1))
            .collect();
        for x in 0..m {
            for y in 0..m {
                let row = self.row(x, y);
                let out = &mut probs[(x * m + y) * o * o..][..o * o];
                for a in 0..na {
                    for b in 0..na {
                        out[digit_a[a] * o + digit_a[b]] += row[a * na + b];
                    }
                }
            }
        }
        Self::new_unchecked(SchemeKind::Broadcast, vec![m], vec![o], probs)
    }

    pub(crate) fn require_broadcast(&self, what: &str) -> Result<()> {
        if self.scheme != SchemeKind::Broadcast {
            return Err(Error::ShapeMismatch(format!(
                "{what} needs a broadcast table"
            )));
        }
        Ok(())
    }

    /// Largest `|sum_{a,b} p(a,b|x,y) - 1|`.
    pub fn normalization_defect(&self) -> f64 {
        let nx = self.num_inputs();
        let mut worst = 0.0f64;
        for x in 0..nx {
            for y in 0..nx {
                let s: f64 = self.row(x, y).iter().sum();
                worst = worst.max((s - 1.0).abs());
            }
        }
        worst
    }

    /// Largest dependence of either party's marginal on the other's input.
    pub fn signaling_defect(&self) -> f64 {
        let nx = self.num_inputs();
        let na = self.num_outputs();
        let alice =
            |x: usize, y: usize, a: usize| -> f64 { (0..na).map(|b| self.get(x, y, a, b)).sum() };
        let bob =
            |x: usize, y: usize, b: usize| -> f64 { (0..na).map(|a| self.get(x, y, a, b)).sum() };
        let mut worst = 0.0f64;
        for x in 0..nx {
            for a in 0..na {
                let base = alice(x, 0, a);
                for y in 1..nx {
                    worst = worst.max((alice(x, y, a) - base).abs());
                }
            }
        }
        for y in 0..nx {
            for b in 0..na {
                let base = bob(0, y, b);
                for x in 1..nx {
                    worst = worst.max((bob(x, y, b) - base).abs());
                }
            }
        }
        worst
    }

    /// Alice's marginal `p(a | x)` (read at `y = 0`).
    pub fn alice_marginal(&self, x: usize, a: usize) -> f64 {
        (0..self.num_outputs()).map(|b| self.get(x, 0, a, b)).sum()
    }

    /// Largest entrywise difference to a table of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.inputs != other.inputs
            || self.outputs != other.outputs
            || self.scheme != other.scheme
        {
            return Err(Error::ShapeMismatch("tables have different shapes".into()));
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}
