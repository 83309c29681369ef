use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::tol;

const MAX_SWEEPS: usize = 100;

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    check_hermitian(h)?;
    let (values, _) = hermitian_eigen(h);
    Ok(values[values.len() - 1])
}

/// Largest eigenvalue and a unit eigenvector.
pub(crate) fn top_eigenpair(h: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    check_hermitian(h)?;
    let (values, mut vectors) = hermitian_eigen(h);
    let n = values.len();
    Ok((values[n - 1], vectors.swap_remove(n - 1)))
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    let scale = h.entries().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = h.hermiticity_defect();
    if defect > tol::ENTRY * scale {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Cyclic complex Jacobi. Eigenvalues ascending; `vectors[k]` belongs to
/// `values[k]`. The input is symmetrized first; callers check Hermiticity.
pub(crate) fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<C64>>) {
    let n = h.dim();
    let herm = h.hermitian_part();
    let mut a: Vec<C64> = herm.entries().to_vec();
    let mut q: Vec<C64> = ComplexMatrix::identity(n).entries().to_vec();
    let zero = C64::new(0.0, 0.0);

    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for r in (p + 1)..n {
                off += a[p * n + r].norm_sqr();
            }
        }
        if off.sqrt() <= f64::EPSILON * 1e-3 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let beta = a[p * n + r];
                let mag = beta.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = beta / mag; // e^{i phi}
                let app = a[p * n + p].re;
                let arr = a[r * n + r].re;
                let theta = (arr - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let ph_conj = phase.conj();

                // A <- A V with V = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akr = a[k * n + r];
                    a[k * n + p] = akp * c - akr * ph_conj * s;
                    a[k * n + r] = akp * s + akr * ph_conj * c;
                }
                // A <- V^dagger A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let ark = a[r * n + k];
                    a[p * n + k] = apk * c - ark * phase * s;
                    a[r * n + k] = apk * s + ark * phase * c;
                }
                a[p * n + r] = zero;
                a[r * n + p] = zero;
                a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                a[r * n + r] = C64::new(a[r * n + r].re, 0.0);
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkr = q[k * n + r];
                    q[k * n + p] = qkp * c - qkr * ph_conj * s;
                    q[k * n + r] = qkp * s + qkr * ph_conj * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| q[row * n + col]).collect())
        .collect();
    (values, vectors)
}
