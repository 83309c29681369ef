use std::fmt;

use super::eigen::hermitian_eigen;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Ordered list of measurement effects, one per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

/// One way in which an effect list fails to be a measurement.
#[derive(Debug, Clone, PartialEq)]
pub enum PovmViolation {
    Empty,
    DimensionMismatch {
        outcome: usize,
        dim: usize,
        expected: usize,
    },
    NotHermitian {
        outcome: usize,
        defect: f64,
    },
    NotPositive {
        outcome: usize,
        min_eigenvalue: f64,
    },
    AboveIdentity {
        outcome: usize,
        max_eigenvalue: f64,
    },
    Incomplete {
        max_deviation: f64,
    },
}

impl fmt::Display for PovmViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "no effects"),
            Self::DimensionMismatch {
                outcome,
                dim,
                expected,
            } => {
                write!(
                    f,
                    "effect {outcome} has dimension {dim}, expected {expected}"
                )
            }
            Self::NotHermitian { outcome, defect } => {
                write!(f, "effect {outcome} not Hermitian (defect {defect:e})")
            }
            Self::NotPositive {
                outcome,
                min_eigenvalue,
            } => {
                write!(f, "effect {outcome} has eigenvalue {min_eigenvalue}")
            }
            Self::AboveIdentity {
                outcome,
                max_eigenvalue,
            } => {
                write!(f, "effect {outcome} has eigenvalue {max_eigenvalue} > 1")
            }
            Self::Incomplete { max_deviation } => {
                write!(
                    f,
                    "effects do not sum to identity (max deviation {max_deviation:e})"
                )
            }
        }
    }
}

impl Povm {
    /// Unchecked construction; see [`validate_povm`] and [`Povm::new`].
    pub fn from_effects(effects: Vec<ComplexMatrix>) -> Self {
        Self { effects }
    }

    /// Checked construction at the given tolerance.
    pub fn new(effects: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let povm = Self { effects };
        validate_povm(&povm, tol).map_err(|v| {
            Error::InvalidPovm(
                v.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })?;
        Ok(povm)
    }

    /// Projective measurement of a `+-1` observable; outcome 0 is eigenvalue +1.
    pub fn from_observable(observable: &ComplexMatrix) -> Self {
        let id = ComplexMatrix::identity(observable.dim());
        Self {
            effects: vec![id.add(observable).scale(0.5), id.sub(observable).scale(0.5)],
        }
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    /// Dimension of the first effect (0 if empty).
    pub fn dim(&self) -> usize {
        self.effects.first().map_or(0, ComplexMatrix::dim)
    }

    /// `M_0 - M_1` for a binary measurement.
    pub fn observable(&self) -> Option<ComplexMatrix> {
        match self.effects.as_slice() {
            [m0, m1] => Some(m0.sub(m1)),
            _ => None,
        }
    }
}

/// Checks Hermiticity, `0 <= E <= I` and completeness within `tol`,
/// collecting every violation.
pub fn validate_povm(p: &Povm, tol: f64) -> std::result::Result<(), Vec<PovmViolation>> {
    let mut violations = Vec::new();
    let Some(first) = p.effects.first() else {
        return Err(vec![PovmViolation::Empty]);
    };
    let dim = first.dim();
    let mut sum = ComplexMatrix::zeros(dim);
    for (outcome, e) in p.effects.iter().enumerate() {
        if e.dim() != dim {
            violations.push(PovmViolation::DimensionMismatch {
                outcome,
                dim: e.dim(),
                expected: dim,
            });
            continue;
        }
        let defect = e.hermiticity_defect();
        if defect > tol {
            violations.push(PovmViolation::NotHermitian { outcome, defect });
        } else {
            let (values, _) = hermitian_eigen(e);
            if values[0] < -tol {
                violations.push(PovmViolation::NotPositive {
                    outcome,
                    min_eigenvalue: values[0],
                });
            }
            let top = values[values.len() - 1];
            if top > 1.0 + tol {
                violations.push(PovmViolation::AboveIdentity {
                    outcome,
                    max_eigenvalue: top,
                });
            }
        }
        sum = sum.add(e);
    }
    let max_deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if max_deviation > tol {
        violations.push(PovmViolation::Incomplete { max_deviation });
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::pauli;
    use crate::tol;

    #[test]
    fn z_measurement_is_valid() {
        let p = Povm::from_observable(&pauli::z());
        assert_eq!(validate_povm(&p, tol::STRUCTURAL), Ok(()));
        assert!(p.observable().unwrap().max_abs_diff(&pauli::z()) < 1e-15);
    }

    #[test]
    fn double_identity_is_incomplete() {
        let id = ComplexMatrix::identity(2);
        let errs =
            validate_povm(&Povm::from_effects(vec![id.clone(), id]), tol::STRUCTURAL).unwrap_err();
        assert_eq!(errs.len(), 1);
        match errs[0] {
            PovmViolation::Incomplete { max_deviation } => {
                assert!((max_deviation - 1.0).abs() < 1e-15)
            }
            ref other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_projector_is_incomplete() {
        let half = Povm::from_observable(&pauli::z()).effects()[0].clone();
        let errs = validate_povm(&Povm::from_effects(vec![half]), tol::STRUCTURAL).unwrap_err();
        assert!(matches!(errs[..], [PovmViolation::Incomplete { .. }]));
    }

    #[test]
    fn negative_and_non_hermitian_effects() {
        let neg = ComplexMatrix::diagonal(&[1.5, 1.0]);
        let rest = ComplexMatrix::diagonal(&[-0.5, 0.0]);
        let errs =
            validate_povm(&Povm::from_effects(vec![neg, rest]), tol::STRUCTURAL).unwrap_err();
        assert!(errs
            .iter()
            .any(|v| matches!(v, PovmViolation::NotPositive { outcome: 1, .. })));
        assert!(errs
            .iter()
            .any(|v| matches!(v, PovmViolation::AboveIdentity { outcome: 0, .. })));

        let skew = ComplexMatrix::from_real(2, &[0.5, 0.5, 0.0, 0.5]);
        let comp = ComplexMatrix::identity(2).sub(&skew);
        let errs =
            validate_povm(&Povm::from_effects(vec![skew, comp]), tol::STRUCTURAL).unwrap_err();
        assert!(errs
            .iter()
            .any(|v| matches!(v, PovmViolation::NotHermitian { .. })));
        assert!(Povm::new(vec![ComplexMatrix::identity(2)], tol::STRUCTURAL).is_ok());
    }
}
