use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SingleCopyStrategy;
use crate::bell::bounds::operator_from_povms;
use crate::bell::{evaluate, BellExpression};
use crate::error::{Error, Result};
use crate::qcore::{
    hermitian_eigen, max_eigenvalue, pauli, top_eigenpair, ComplexMatrix, Ket, Povm, C64,
};
use crate::tol;

/// Controls for the see-saw search.
#[derive(Debug, Clone, PartialEq)]
pub struct SeeSawOptions {
    /// Seed for the random restarts.
    pub seed: u64,
    /// Random starting points tried after the CHSH-measurement start.
    pub restarts: usize,
    pub max_iterations: usize,
    pub improvement: f64,
}

impl Default for SeeSawOptions {
    fn default() -> Self {
        Self {
            seed: 0x5eed_5a57,
            restarts: 4,
            max_iterations: tol::SEESAW_MAX_ITERATIONS,
            improvement: tol::SEESAW_IMPROVEMENT,
        }
    }
}

/// Two-qubit strategy maximizing the supplied tilted-CHSH-family expression,
/// with default see-saw options.
pub fn tilted_chsh_reference(
    alpha: f64,
    coefficients: &BellExpression,
) -> Result<SingleCopyStrategy> {
    tilted_chsh_reference_with(alpha, coefficients, &SeeSawOptions::default())
}

/// [`tilted_chsh_reference`] with explicit see-saw options.
pub fn tilted_chsh_reference_with(
    alpha: f64,
    coefficients: &BellExpression,
    options: &SeeSawOptions,
) -> Result<SingleCopyStrategy> {
    if !(0.0..2.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside [0, 2)"
        )));
    }
    qubit_seesaw(coefficients, format!("tilted-chsh({alpha})"), options)
}

/// See-saw over two-qubit pure states and projective binary measurements,
/// for any expression with two inputs and two outputs per party.
///
/// Alternates the state (top eigenvector of the Bell operator) with each
/// party's best response until the value stops improving. The final value
/// is checked against the top eigenvalue of the final Bell operator.
pub fn qubit_seesaw(
    coefficients: &BellExpression,
    label: impl Into<String>,
    options: &SeeSawOptions,
) -> Result<SingleCopyStrategy> {
    if coefficients.m() != 2 || coefficients.o() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "tilted CHSH family needs (m, o) = (2, 2), got ({}, {})",
            coefficients.m(),
            coefficients.o()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut starts = vec![(
        vec![
            Povm::from_observable(&pauli::z()),
            Povm::from_observable(&pauli::x()),
        ],
        vec![
            Povm::from_observable(&pauli::plus()),
            Povm::from_observable(&pauli::minus()),
        ],
    )];
    for _ in 0..options.restarts {
        let alice = (0..2)
            .map(|_| Povm::from_observable(&random_qubit_observable(&mut rng)))
            .collect();
        let bob = (0..2)
            .map(|_| Povm::from_observable(&random_qubit_observable(&mut rng)))
            .collect();
        starts.push((alice, bob));
    }

    let mut best: Option<(f64, Vec<Povm>, Vec<Povm>)> = None;
    for (alice, bob) in starts {
        let (value, alice, bob) = run(coefficients, alice, bob, options)?;
        // earlier starts win near-ties
        if best.as_ref().is_none_or(|(v, _, _)| value > v + tol::VALUE) {
            best = Some((value, alice, bob));
        }
    }
    let (_, alice, bob) = best.expect("at least one start");

    let w = operator_from_povms(coefficients, &alice, &bob);
    let (_, vector) = top_eigenpair(&w)?;
    let label = label.into();
    let strategy =
        SingleCopyStrategy::new(Ket::normalized(vector)?.projector(), alice, bob, label)?;
    let seesaw = evaluate(coefficients, &strategy.table()?)?;
    let oracle = max_eigenvalue(&w)?;
    if (seesaw - oracle).abs() > tol::SEESAW_ORACLE_AGREEMENT {
        return Err(Error::OracleDisagreement { seesaw, oracle });
    }
    Ok(strategy)
}

fn run(
    expr: &BellExpression,
    mut alice: Vec<Povm>,
    mut bob: Vec<Povm>,
    options: &SeeSawOptions,
) -> Result<(f64, Vec<Povm>, Vec<Povm>)> {
    let mut previous = f64::NEG_INFINITY;
    for _ in 0..options.max_iterations {
        let w = operator_from_povms(expr, &alice, &bob);
        let (value, vector) = top_eigenpair(&w)?;
        if value - previous < options.improvement {
            return Ok((value, alice, bob));
        }
        previous = value;
        let rho = ComplexMatrix::outer(&vector, &vector);
        alice = best_response(expr, &rho, &bob, Party::Alice);
        bob = best_response(expr, &rho, &alice, Party::Bob);
    }
    Err(Error::SeeSawDidNotConverge {
        iterations: options.max_iterations,
    })
}

#[derive(Clone, Copy)]
enum Party {
    Alice,
    Bob,
}

/// Optimal binary projective measurements for one party with the state and
/// the other party's measurements fixed: for each input, project onto the
/// positive part of `X_0 - X_1`, where `X_k` is the operator multiplying
/// outcome `k` in the Bell value.
fn best_response(
    expr: &BellExpression,
    rho: &ComplexMatrix,
    other: &[Povm],
    party: Party,
) -> Vec<Povm> {
    let m = expr.m();
    (0..m)
        .map(|own| {
            let mut diff = ComplexMatrix::zeros(2);
            for (other_in, other_povm) in other.iter().enumerate() {
                for own_out in 0..2 {
                    for other_out in 0..2 {
                        let (x, y, a, b) = match party {
                            Party::Alice => (own, other_in, own_out, other_out),
                            Party::Bob => (other_in, own, other_out, own_out),
                        };
                        let c = expr.coeff(x, y, a, b);
                        if c == 0.0 {
                            continue;
                        }
                        let sign = if own_out == 0 { 1.0 } else { -1.0 };
                        let reduced = reduce(rho, &other_povm.effects()[other_out], party);
                        diff.add_scaled(sign * c, &reduced);
                    }
                }
            }
            let (values, vectors) = hermitian_eigen(&diff);
            let mut p = ComplexMatrix::zeros(2);
            for (v, vec) in values.iter().zip(&vectors) {
                if *v > 0.0 {
                    p = p.add(&ComplexMatrix::outer(vec, vec));
                }
            }
            let id = ComplexMatrix::identity(2);
            Povm::from_effects(vec![p.clone(), id.sub(&p)])
        })
        .collect()
}

/// Partial trace of `(I (x) E) rho` over Bob (for Alice's response) or of
/// `(E (x) I) rho` over Alice (for Bob's), on two qubits.
fn reduce(rho: &ComplexMatrix, effect: &ComplexMatrix, party: Party) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for k in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..2 {
                for l in 0..2 {
                    acc += match party {
                        // tr_B[(I (x) N) rho]_{ik} = sum N[j,l] rho[(i,l),(k,j)]
                        Party::Alice => effect[(j, l)] * rho[(i * 2 + l, k * 2 + j)],
                        // tr_A[(M (x) I) rho]_{ik} = sum M[j,l] rho[(l,i),(j,k)]
                        Party::Bob => effect[(j, l)] * rho[(l * 2 + i, j * 2 + k)],
                    };
                }
            }
            out[(i, k)] = acc;
        }
    }
    out
}

fn random_qubit_observable(rng: &mut impl Rng) -> ComplexMatrix {
    loop {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 {
            return pauli::x()
                .scale(v[0] / n)
                .add(&pauli::y().scale(v[1] / n))
                .add(&pauli::z().scale(v[2] / n));
        }
    }
}
