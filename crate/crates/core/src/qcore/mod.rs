//! Dense complex linear algebra and Born-rule evaluation.

mod born;
mod eigen;
mod matrix;
mod povm;
mod state;

pub use born::born_probability;
pub use eigen::max_eigenvalue;
pub(crate) use eigen::{hermitian_eigen, top_eigenpair};
pub use matrix::{kron, ComplexMatrix, C64};
pub use povm::{validate_povm, Povm, PovmViolation};
pub use state::{DensityMatrix, Ket};

/// Pauli matrices and the rotated CHSH observables.
pub mod pauli {
    use super::{ComplexMatrix, C64};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn y() -> ComplexMatrix {
        let i = C64::new(0.0, 1.0);
        ComplexMatrix::from_entries(2, vec![C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)])
            .expect("2x2")
    }

    /// `cos(t) Z + sin(t) X`.
    pub fn xz_plane(theta: f64) -> ComplexMatrix {
        z().scale(theta.cos()).add(&x().scale(theta.sin()))
    }

    /// `(Z + X)/sqrt 2`.
    pub fn plus() -> ComplexMatrix {
        z().add(&x()).scale(std::f64::consts::FRAC_1_SQRT_2)
    }

    /// `(Z - X)/sqrt 2`.
    pub fn minus() -> ComplexMatrix {
        z().sub(&x()).scale(std::f64::consts::FRAC_1_SQRT_2)
    }
}
