use super::expression::BellExpression;
use super::functionals::evaluate;
use super::table::CorrelationTable;
use crate::error::{Error, Result};
use crate::par;
use crate::qcore::{kron, top_eigenpair, ComplexMatrix, C64};
use crate::strategies::SingleCopyStrategy;
use crate::tol;

/// Optimizer that attains a [`BoundResult`].
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Local deterministic strategy: Alice outputs `alice[x]`, Bob `bob[y]`.
    Deterministic { alice: Vec<usize>, bob: Vec<usize> },
    /// Top eigenvector of the Bell operator and its residual
    /// `||W v - value v||`.
    Eigenvector { amplitudes: Vec<C64>, residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    pub witness: Witness,
}

impl BoundResult {
    /// Recomputes the value from the witness alone. Eigenvector witnesses
    /// need the strategy whose measurements define the Bell operator.
    pub fn reevaluate(
        &self,
        expr: &BellExpression,
        strategy: Option<&SingleCopyStrategy>,
    ) -> Result<f64> {
        match &self.witness {
            Witness::Deterministic { alice, bob } => {
                let t = CorrelationTable::deterministic(expr.m(), expr.o(), alice, bob)?;
                evaluate(expr, &t)
            }
            Witness::Eigenvector { amplitudes, .. } => {
                let s = strategy.ok_or_else(|| {
                    Error::InvalidParameter("eigenvector witness needs the strategy".into())
                })?;
                let w = bell_operator(expr, s)?;
                let wv = w.mul_vec(amplitudes);
                Ok(amplitudes
                    .iter()
                    .zip(&wv)
                    .map(|(v, u)| (v.conj() * u).re)
                    .sum())
            }
        }
    }
}

fn assignment(mut index: usize, m: usize, o: usize) -> Vec<usize> {
    (0..m)
        .map(|_| {
            let d = index % o;
            index /= o;
            d
        })
        .collect()
}

/// Exact local (classical) bound: the best value over all deterministic
/// assignments `a(x), b(y)`.
///
/// Alice's `o^m` assignments are enumerated with Bob best-responding per
/// input. Among values within a relative `1e-12` of each other the first
/// assignment in enumeration order wins, so the witness is stable under
/// positive rescaling. The reported value is the witness re-summed in
/// `(x, y)` order.
pub fn classical_bound(expr: &BellExpression) -> Result<BoundResult> {
    let (m, o) = (expr.m(), expr.o());
    let pairs = (o as u128).checked_pow(2 * m as u32).unwrap_or(u128::MAX);
    if pairs > tol::ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge(pairs));
    }
    let scale = expr.coeffs().iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    let eps = 1e-12 * (1.0 + scale * (m * m) as f64);
    let n_alice = o.pow(m as u32);

    let candidates: Vec<(f64, Vec<usize>)> = par::map_range(n_alice, |k| {
        let alice = assignment(k, m, o);
        let mut total = 0.0;
        let bob: Vec<usize> = (0..m)
            .map(|y| {
                let mut best_b = 0;
                let mut best = f64::NEG_INFINITY;
                for b in 0..o {
                    let v: f64 = (0..m).map(|x| expr.coeff(x, y, alice[x], b)).sum();
                    if v > best + eps {
                        best = v;
                        best_b = b;
                    }
                }
                total += best;
                best_b
            })
            .collect();
        (total, bob)
    });

    let mut best_k = 0;
    for (k, (v, _)) in candidates.iter().enumerate().skip(1) {
        if *v > candidates[best_k].0 + eps {
            best_k = k;
        }
    }
    let alice = assignment(best_k, m, o);
    let bob = candidates[best_k].1.clone();
    let mut value = 0.0;
    for (x, &a) in alice.iter().enumerate() {
        for (y, &b) in bob.iter().enumerate() {
            value += expr.coeff(x, y, a, b);
        }
    }
    Ok(BoundResult {
        value,
        witness: Witness::Deterministic { alice, bob },
    })
}

/// `sum b^{xy}_{ab} M_{a|x} (x) N_{b|y}` for the strategy's measurements.
pub fn bell_operator(expr: &BellExpression, s: &SingleCopyStrategy) -> Result<ComplexMatrix> {
    if expr.m() != s.m() || expr.o() != s.o() {
        return Err(Error::ShapeMismatch(format!(
            "expression ({}, {}) vs strategy ({}, {})",
            expr.m(),
            expr.o(),
            s.m(),
            s.o()
        )));
    }
    Ok(operator_from_povms(expr, s.alice(), s.bob()))
}

pub(crate) fn operator_from_povms(
    expr: &BellExpression,
    alice: &[crate::qcore::Povm],
    bob: &[crate::qcore::Povm],
) -> ComplexMatrix {
    let d = alice[0].dim() * bob[0].dim();
    let mut w = ComplexMatrix::zeros(d);
    for (x, ax) in alice.iter().enumerate() {
        for (y, by) in bob.iter().enumerate() {
            for (a, ea) in ax.effects().iter().enumerate() {
                for (b, eb) in by.effects().iter().enumerate() {
                    let c = expr.coeff(x, y, a, b);
                    if c != 0.0 {
                        w.add_scaled(c, &kron(ea, eb));
                    }
                }
            }
        }
    }
    w.hermitian_part()
}

/// Best value reachable with the strategy's measurements over all states:
/// the top eigenvalue of the Bell operator.
pub fn quantum_value_fixed_measurements(
    expr: &BellExpression,
    s: &SingleCopyStrategy,
) -> Result<BoundResult> {
    let w = bell_operator(expr, s)?;
    let (value, amplitudes) = top_eigenpair(&w)?;
    let wv = w.mul_vec(&amplitudes);
    let residual = wv
        .iter()
        .zip(&amplitudes)
        .map(|(u, v)| (u - v * value).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(BoundResult {
        value,
        witness: Witness::Eigenvector {
            amplitudes,
            residual,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies;

    #[test]
    fn chsh_bounds() {
        let chsh = BellExpression::chsh();
        let c = classical_bound(&chsh).unwrap();
        assert_eq!(c.value, 2.0);
        assert_eq!(c.reevaluate(&chsh, None).unwrap(), 2.0);
        let s = strategies::chsh_reference();
        let q = quantum_value_fixed_measurements(&chsh, &s).unwrap();
        assert!((q.value - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((q.reevaluate(&chsh, Some(&s)).unwrap() - q.value).abs() < 1e-12);
        assert_eq!(
            classical_bound(&BellExpression::chsh_game()).unwrap().value,
            0.75
        );
    }

    #[test]
    fn enumeration_limit() {
        let big = BellExpression::zero(14, 4); // 4^28 pairs
        assert!(matches!(
            classical_bound(&big),
            Err(Error::EnumerationTooLarge(_))
        ));
    }

    #[test]
    fn zero_expression() {
        let z = BellExpression::zero(2, 2);
        assert_eq!(classical_bound(&z).unwrap().value, 0.0);
        let q = quantum_value_fixed_measurements(&z, &strategies::chsh_reference()).unwrap();
        assert_eq!(q.value, 0.0);
    }
}
