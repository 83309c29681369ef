use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::{
    chsh_reference, fullstats_reference, tilted_chsh_reference_with, SeeSawOptions,
    SingleCopyStrategy,
};
use crate::bell::BellExpression;
use crate::error::{Error, Result};

/// Parses a real parameter: a plain number, or a multiple/fraction of `pi`
/// such as `pi`, `pi/4`, `3pi/4`, `0.5*pi`.
pub fn parse_param(text: &str) -> Result<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidParameter(format!("cannot parse parameter {text:?}"));
    let number = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let value = if let Some(pos) = s.find("pi") {
        let (head, tail) = (&s[..pos], &s[pos + 2..]);
        let factor = match head.trim_end_matches('*') {
            "" => 1.0,
            "-" => -1.0,
            h => number(h)?,
        };
        let divisor = match tail {
            "" => 1.0,
            t => number(t.strip_prefix('/').ok_or_else(bad)?)?,
        };
        factor * PI / divisor
    } else {
        number(&s)?
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// Named strategy constructors addressable from configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategyPreset {
    Chsh,
    TiltedChsh {
        alpha: f64,
    },
    FullStats {
        gamma: f64,
        delta: f64,
    },
    /// Copy count taken from the preset or from the caller.
    AdversaryCopy {
        n: Option<usize>,
    },
    AdversarySharedRandomness {
        n: Option<usize>,
    },
}

impl StrategyPreset {
    pub fn is_adversary(&self) -> bool {
        matches!(
            self,
            Self::AdversaryCopy { .. } | Self::AdversarySharedRandomness { .. }
        )
    }

    /// The single-copy strategy behind the preset. Adversaries are built on
    /// the CHSH reference.
    pub fn single_copy(&self) -> Result<SingleCopyStrategy> {
        self.single_copy_with(&SeeSawOptions::default())
    }

    /// As [`Self::single_copy`], with explicit see-saw options for presets
    /// that need one.
    pub fn single_copy_with(&self, options: &SeeSawOptions) -> Result<SingleCopyStrategy> {
        match *self {
            Self::Chsh | Self::AdversaryCopy { .. } | Self::AdversarySharedRandomness { .. } => {
                Ok(chsh_reference())
            }
            Self::TiltedChsh { alpha } => {
                tilted_chsh_reference_with(alpha, &BellExpression::tilted_chsh(alpha)?, options)
            }
            Self::FullStats { gamma, delta } => fullstats_reference(gamma, delta),
        }
    }

    /// The expression the preset's strategy is built to maximize, if any.
    pub fn natural_expression(&self) -> Option<BellExpression> {
        match *self {
            Self::TiltedChsh { alpha } => BellExpression::tilted_chsh(alpha).ok(),
            Self::FullStats { .. } => None,
            _ => Some(BellExpression::chsh()),
        }
    }
}

fn args<'a>(s: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let inner = s.strip_prefix(name)?;
    if inner.is_empty() {
        return Some(Vec::new());
    }
    let inner = inner.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(str::trim).collect())
}

impl FromStr for StrategyPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::InvalidParameter(format!("unknown strategy preset {s:?}"));
        let arity = |got: usize, want: &str| {
            Error::InvalidParameter(format!("{s:?}: expected {want}, got {got} argument(s)"))
        };
        let count = |v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("{s:?}: bad copy count {v:?}")))
        };
        // longest names first so prefixes don't shadow each other
        if let Some(a) = args(s, "adversary-shared-randomness") {
            return match a.as_slice() {
                [] => Ok(Self::AdversarySharedRandomness { n: None }),
                [n] => Ok(Self::AdversarySharedRandomness { n: Some(count(n)?) }),
                _ => Err(arity(a.len(), "at most one")),
            };
        }
        if let Some(a) = args(s, "adversary-copy") {
            return match a.as_slice() {
                [] => Ok(Self::AdversaryCopy { n: None }),
                [n] => Ok(Self::AdversaryCopy { n: Some(count(n)?) }),
                _ => Err(arity(a.len(), "at most one")),
            };
        }
        if let Some(a) = args(s, "tilted-chsh") {
            return match a.as_slice() {
                [alpha] => Ok(Self::TiltedChsh {
                    alpha: parse_param(alpha)?,
                }),
                _ => Err(arity(a.len(), "one (alpha)")),
            };
        }
        if let Some(a) = args(s, "fullstats") {
            return match a.as_slice() {
                [g, d] => Ok(Self::FullStats {
                    gamma: parse_param(g)?,
                    delta: parse_param(d)?,
                }),
                _ => Err(arity(a.len(), "two (gamma, delta)")),
            };
        }
        if s == "chsh" {
            return Ok(Self::Chsh);
        }
        Err(unknown())
    }
}

impl fmt::Display for StrategyPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Chsh => write!(f, "chsh"),
            Self::TiltedChsh { alpha } => write!(f, "tilted-chsh({alpha})"),
            Self::FullStats { gamma, delta } => write!(f, "fullstats({gamma},{delta})"),
            Self::AdversaryCopy { n: None } => write!(f, "adversary-copy"),
            Self::AdversaryCopy { n: Some(n) } => write!(f, "adversary-copy({n})"),
            Self::AdversarySharedRandomness { n: None } => write!(f, "adversary-shared-randomness"),
            Self::AdversarySharedRandomness { n: Some(n) } => {
                write!(f, "adversary-shared-randomness({n})")
            }
        }
    }
}
