//! Reference strategies, isotropic noise, parallel composition and the two
//! adversarial constructions that defeat per-copy score checks.

mod compose;
mod preset;
mod seesaw;

use std::f64::consts::FRAC_PI_4;

pub use crate::bell::SchemeKind;
pub use compose::{
    adversary_copy, adversary_copy_from, adversary_shared_randomness,
    adversary_shared_randomness_from, compose, compose_tables,
};
pub use preset::{parse_param, StrategyPreset};
pub use seesaw::{qubit_seesaw, tilted_chsh_reference, tilted_chsh_reference_with, SeeSawOptions};

use crate::bell::CorrelationTable;
use crate::error::{Error, Result};
use crate::qcore::{born_probability, pauli, validate_povm, DensityMatrix, Ket, Povm};
use crate::tol;

/// Shared state plus one POVM per input for each party.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleCopyStrategy {
    state: DensityMatrix,
    alice: Vec<Povm>,
    bob: Vec<Povm>,
    dim_a: usize,
    dim_b: usize,
    label: String,
}

impl SingleCopyStrategy {
    /// Validates every POVM, the input/output counts and local dimensions
    /// against the joint state dimension.
    pub fn new(
        state: DensityMatrix,
        alice: Vec<Povm>,
        bob: Vec<Povm>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let label = label.into();
        if alice.is_empty() || alice.len() != bob.len() {
            return Err(Error::InvalidStrategy(format!(
                "{label}: Alice has {} inputs, Bob {}",
                alice.len(),
                bob.len()
            )));
        }
        let o = alice[0].outcomes();
        let dim_a = alice[0].dim();
        let dim_b = bob[0].dim();
        for (party, povms, dim) in [("Alice", &alice, dim_a), ("Bob", &bob, dim_b)] {
            for (x, p) in povms.iter().enumerate() {
                if p.outcomes() != o {
                    return Err(Error::InvalidStrategy(format!(
                        "{label}: {party} input {x} has {} outcomes, expected {o}",
                        p.outcomes()
                    )));
                }
                if p.dim() != dim {
                    return Err(Error::InvalidStrategy(format!(
                        "{label}: {party} input {x} acts on dimension {}, expected {dim}",
                        p.dim()
                    )));
                }
                if let Err(v) = validate_povm(p, tol::STRUCTURAL) {
                    let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
                    return Err(Error::InvalidStrategy(format!(
                        "{label}: {party} input {x}: {}",
                        msg.join("; ")
                    )));
                }
            }
        }
        if dim_a * dim_b != state.dim() {
            return Err(Error::InvalidStrategy(format!(
                "{label}: local dimensions {dim_a}x{dim_b} do not match state dimension {}",
                state.dim()
            )));
        }
        Ok(Self {
            state,
            alice,
            bob,
            dim_a,
            dim_b,
            label,
        })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn alice(&self) -> &[Povm] {
        &self.alice
    }

    pub fn bob(&self) -> &[Povm] {
        &self.bob
    }

    /// Inputs per party.
    pub fn m(&self) -> usize {
        self.alice.len()
    }

    /// Outputs per party.
    pub fn o(&self) -> usize {
        self.alice[0].outcomes()
    }

    pub fn local_dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Born-rule table `p(a,b|x,y) = tr[(M_{a|x} (x) N_{b|y}) rho]`.
    pub fn table(&self) -> Result<CorrelationTable> {
        let (m, o) = (self.m(), self.o());
        let mut probs = Vec::with_capacity(m * m * o * o);
        for x in 0..m {
            for y in 0..m {
                for a in 0..o {
                    for b in 0..o {
                        probs.push(born_probability(
                            &self.state,
                            &self.alice[x].effects()[a],
                            &self.bob[y].effects()[b],
                        )?);
                    }
                }
            }
        }
        CorrelationTable::single(m, o, probs)
    }
}

/// Maximally entangled pair with Alice measuring `Z`, `X` and Bob
/// `(Z + X)/sqrt 2`, `(Z - X)/sqrt 2`. Outcome 0 is eigenvalue +1.
pub fn chsh_reference() -> SingleCopyStrategy {
    SingleCopyStrategy::new(
        Ket::phi_plus().projector(),
        vec![
            Povm::from_observable(&pauli::z()),
            Povm::from_observable(&pauli::x()),
        ],
        vec![
            Povm::from_observable(&pauli::plus()),
            Povm::from_observable(&pauli::minus()),
        ],
        "chsh",
    )
    .expect("CHSH reference is valid")
}

/// Reference experiment for the full-statistics self-test on `|phi+>`:
/// `A0 = Z`, `A1 = X`, `B0 = cos(g) Z + sin(g) X`, `B1 = -cos(d) Z + sin(d) X`,
/// giving correlators `(cos g, -cos d, sin g, sin d)`.
pub fn fullstats_reference(gamma: f64, delta: f64) -> Result<SingleCopyStrategy> {
    let in_range = |t: f64| t > 0.0 && t <= FRAC_PI_4 + 1e-15;
    if !gamma.is_finite() || !delta.is_finite() || !in_range(gamma) || !in_range(delta) {
        return Err(Error::InvalidAngles(format!(
            "gamma = {gamma}, delta = {delta}: both must lie in (0, pi/4]"
        )));
    }
    if gamma == delta {
        return Err(Error::InvalidAngles(format!("gamma = delta = {gamma}")));
    }
    let b1 = pauli::z()
        .scale(-delta.cos())
        .add(&pauli::x().scale(delta.sin()));
    SingleCopyStrategy::new(
        Ket::phi_plus().projector(),
        vec![
            Povm::from_observable(&pauli::z()),
            Povm::from_observable(&pauli::x()),
        ],
        vec![
            Povm::from_observable(&pauli::xz_plane(gamma)),
            Povm::from_observable(&b1),
        ],
        format!("fullstats({gamma},{delta})"),
    )
}

/// Visibility of the isotropic noise `nu rho + (1 - nu) I/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    nu: f64,
}

impl NoiseSpec {
    pub fn new(nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::InvalidParameter(format!(
                "visibility {nu} outside [0, 1]"
            )));
        }
        Ok(Self { nu })
    }

    pub fn nu(self) -> f64 {
        self.nu
    }
}

/// Replaces the two-qubit state by `nu rho + (1 - nu) I/4`.
pub fn apply_isotropic_noise(
    s: &SingleCopyStrategy,
    noise: NoiseSpec,
) -> Result<SingleCopyStrategy> {
    let d = s.state.dim();
    if s.local_dims() != (2, 2) {
        return Err(Error::UnsupportedDimension(d));
    }
    if noise.nu == 1.0 {
        return Ok(s.clone());
    }
    let state = s.state.mix(noise.nu, &DensityMatrix::maximally_mixed(d));
    Ok(SingleCopyStrategy { state, ..s.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{correlator, evaluate, BellExpression};
    use std::f64::consts::PI;

    const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

    #[test]
    fn chsh_reference_values() {
        let t = chsh_reference().table().unwrap();
        assert!((evaluate(&BellExpression::chsh(), &t).unwrap() - TSIRELSON).abs() < 1e-12);
        let score = evaluate(&BellExpression::chsh_game(), &t).unwrap();
        assert!((score - 0.8535533905932737).abs() < 1e-12);
        let hi = (PI / 8.0).cos().powi(2) / 2.0;
        let lo = (PI / 8.0).sin().powi(2) / 2.0;
        for &p in t.probs() {
            assert!(p > 0.0);
            assert!((p - hi).abs() < 1e-12 || (p - lo).abs() < 1e-12);
        }
        assert!((correlator(&t, 0, 0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((correlator(&t, 1, 1).unwrap() + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn fullstats_correlators() {
        let (g, d) = (PI / 4.0, PI / 6.0);
        let t = fullstats_reference(g, d).unwrap().table().unwrap();
        let e = |x, y| correlator(&t, x, y).unwrap();
        assert!((e(0, 0) - g.cos()).abs() < 1e-12);
        assert!((e(0, 1) + d.cos()).abs() < 1e-12);
        assert!((e(1, 0) - g.sin()).abs() < 1e-12);
        assert!((e(1, 1) - d.sin()).abs() < 1e-12);
    }

    #[test]
    fn fullstats_angle_checks() {
        assert!(matches!(
            fullstats_reference(0.3, 0.3),
            Err(Error::InvalidAngles(_))
        ));
        assert!(matches!(
            fullstats_reference(0.0, 0.3),
            Err(Error::InvalidAngles(_))
        ));
        assert!(matches!(
            fullstats_reference(1.0, 0.3),
            Err(Error::InvalidAngles(_))
        ));
        assert!(fullstats_reference(FRAC_PI_4, 0.1).is_ok());
    }

    #[test]
    fn noise_endpoints() {
        let s = chsh_reference();
        assert_eq!(
            apply_isotropic_noise(&s, NoiseSpec::new(1.0).unwrap()).unwrap(),
            s
        );
        let mixed = apply_isotropic_noise(&s, NoiseSpec::new(0.0).unwrap()).unwrap();
        let v = evaluate(&BellExpression::chsh(), &mixed.table().unwrap()).unwrap();
        assert!(v.abs() < 1e-12);
        let noisy = apply_isotropic_noise(&s, NoiseSpec::new(0.9).unwrap()).unwrap();
        let v = evaluate(&BellExpression::chsh(), &noisy.table().unwrap()).unwrap();
        assert!((v - 0.9 * TSIRELSON).abs() < 1e-12);
        assert!(NoiseSpec::new(1.5).is_err());
    }

    #[test]
    fn noise_rejects_non_qubit_pairs() {
        let id3 = crate::qcore::ComplexMatrix::identity(3);
        let trivial = Povm::from_effects(vec![id3.clone(), crate::qcore::ComplexMatrix::zeros(3)]);
        let s = SingleCopyStrategy::new(
            DensityMatrix::maximally_mixed(9),
            vec![trivial.clone()],
            vec![trivial],
            "qutrits",
        )
        .unwrap();
        assert!(matches!(
            apply_isotropic_noise(&s, NoiseSpec::new(0.5).unwrap()),
            Err(Error::UnsupportedDimension(9))
        ));
    }

    #[test]
    fn strategy_validation() {
        let z = Povm::from_observable(&pauli::z());
        let bad = Povm::from_effects(vec![crate::qcore::ComplexMatrix::identity(2); 2]);
        assert!(SingleCopyStrategy::new(
            Ket::phi_plus().projector(),
            vec![z.clone()],
            vec![bad],
            "x"
        )
        .is_err());
        assert!(
            SingleCopyStrategy::new(Ket::phi_plus().projector(), vec![z.clone()], vec![], "x")
                .is_err()
        );
        assert!(SingleCopyStrategy::new(
            DensityMatrix::maximally_mixed(8),
            vec![z.clone()],
            vec![z],
            "x"
        )
        .is_err());
    }
}
