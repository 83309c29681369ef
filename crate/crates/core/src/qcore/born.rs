use super::matrix::{ComplexMatrix, C64};
use super::state::DensityMatrix;
use crate::error::{Error, Result};
use crate::tol;

/// `tr[(effect_a (x) effect_b) state]`, real part after checking the
/// imaginary residue.
pub fn born_probability(
    state: &DensityMatrix,
    effect_a: &ComplexMatrix,
    effect_b: &ComplexMatrix,
) -> Result<f64> {
    let (da, db) = (effect_a.dim(), effect_b.dim());
    let d = state.dim();
    if da * db != d {
        return Err(Error::DimensionMismatch(format!(
            "effects {da}x{db} on a state of dimension {d}"
        )));
    }
    let rho = state.matrix();
    // tr[(A (x) B) rho] = sum A[i,k] B[j,l] rho[(k,l),(i,j)]
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..da {
        for k in 0..da {
            let a = effect_a[(i, k)];
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..db {
                for l in 0..db {
                    acc += a * effect_b[(j, l)] * rho[(k * db + l, i * db + j)];
                }
            }
        }
    }
    if acc.im.abs() > tol::NONREAL {
        return Err(Error::NonrealResult(acc.im));
    }
    Ok(acc.re)
}
