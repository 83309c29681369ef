//! Random strategies and independent oracles shared by the integration tests.
#![allow(dead_code)]

use paraself::bell::{BellExpression, CorrelationTable};
use paraself::qcore::{kron, ComplexMatrix, DensityMatrix, Povm, C64};
use paraself::SingleCopyStrategy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SQRT8: f64 = 2.828_427_124_746_190_1;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    (0..d)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Orthonormal basis of C^d by Gram–Schmidt on random vectors.
pub fn random_basis(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v = gaussian_vec(rng, d);
        for u in &basis {
            let overlap: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= overlap * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    basis
}

/// Projective measurement with `o <= d` outcomes: basis vector `k` goes to
/// outcome `k % o`.
pub fn random_projective(rng: &mut ChaCha8Rng, d: usize, o: usize) -> Povm {
    let basis = random_basis(rng, d);
    let mut effects = vec![ComplexMatrix::zeros(d); o];
    for (k, v) in basis.iter().enumerate() {
        effects[k % o] = effects[k % o].add(&ComplexMatrix::outer(v, v));
    }
    Povm::from_effects(effects)
}

/// Full-rank random density matrix `G G^dagger / tr`.
pub fn random_state(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_entries(d, gaussian_vec(rng, d * d)).unwrap();
    let mut rho = g
        .matmul(&g.dagger())
        .add(&ComplexMatrix::identity(d).scale(0.05));
    let tr = rho.trace().re;
    rho = rho.scale(1.0 / tr).hermitian_part();
    DensityMatrix::new(rho).unwrap()
}

/// Random strategy with local dimension `d`, `m` inputs, `o` outputs.
pub fn random_strategy(rng: &mut ChaCha8Rng, d: usize, m: usize, o: usize) -> SingleCopyStrategy {
    let state = random_state(rng, d * d);
    let alice = (0..m).map(|_| random_projective(rng, d, o)).collect();
    let bob = (0..m).map(|_| random_projective(rng, d, o)).collect();
    SingleCopyStrategy::new(state, alice, bob, "random").unwrap()
}

/// Expression whose coefficients are small multiples of 1/4, so every sum
/// is exact regardless of order.
pub fn dyadic_expression(rng: &mut ChaCha8Rng, m: usize, o: usize) -> BellExpression {
    let coeffs = (0..m * m * o * o)
        .map(|_| rng.gen_range(-16i32..=16) as f64 / 4.0)
        .collect();
    BellExpression::new(m, o, coeffs, "dyadic").unwrap()
}

pub fn real_expression(rng: &mut ChaCha8Rng, m: usize, o: usize) -> BellExpression {
    let coeffs = (0..m * m * o * o)
        .map(|_| rng.gen_range(-3.0..3.0))
        .collect();
    BellExpression::new(m, o, coeffs, "real").unwrap()
}

/// Exhaustive classical value: every pair of deterministic assignments.
pub fn brute_classical(expr: &BellExpression) -> f64 {
    let (m, o) = (expr.m(), expr.o());
    let count = o.pow(m as u32);
    let digits = |mut k: usize| {
        (0..m)
            .map(|_| {
                let d = k % o;
                k /= o;
                d
            })
            .collect::<Vec<_>>()
    };
    let mut best = f64::NEG_INFINITY;
    for ka in 0..count {
        let a = digits(ka);
        for kb in 0..count {
            let b = digits(kb);
            let mut v = 0.0;
            for (x, &ax) in a.iter().enumerate() {
                for (y, &by) in b.iter().enumerate() {
                    v += expr.coeff(x, y, ax, by);
                }
            }
            best = best.max(v);
        }
    }
    best
}

/// Direct `sum c p` over a single-copy table, iterating in input order.
pub fn direct_value(expr: &BellExpression, table: &CorrelationTable) -> f64 {
    let (m, o) = (expr.m(), expr.o());
    let mut v = 0.0;
    for x in 0..m {
        for y in 0..m {
            for a in 0..o {
                for b in 0..o {
                    v += expr.coeff(x, y, a, b) * table.get(x, y, a, b);
                }
            }
        }
    }
    v
}

/// Broadcast-scheme two-copy table from the full tensor-product state:
/// global register order A1 B1 A2 B2, probabilities as `Re tr[(E ⊗ F) rho]`
/// summed entrywise.
pub fn tensor_oracle_two_copies(s1: &SingleCopyStrategy, s2: &SingleCopyStrategy) -> Vec<f64> {
    let rho = kron(s1.state().matrix(), s2.state().matrix());
    let (m, o1, o2) = (s1.m(), s1.o(), s2.o());
    let na = o1 * o2;
    let mut out = vec![0.0; m * m * na * na];
    for x in 0..m {
        for y in 0..m {
            for a in 0..na {
                for b in 0..na {
                    let (a1, a2) = (a % o1, a / o1);
                    let (b1, b2) = (b % o1, b / o1);
                    let e1 = kron(&s1.alice()[x].effects()[a1], &s1.bob()[y].effects()[b1]);
                    let e2 = kron(&s2.alice()[x].effects()[a2], &s2.bob()[y].effects()[b2]);
                    let op = kron(&e1, &e2);
                    out[((x * m + y) * na + a) * na + b] = trace_of_product(&op, &rho);
                }
            }
        }
    }
    out
}

/// `Re tr[A B]` as `sum_ij A_ij B_ji`.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut t = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t.re
}

/// Hand-rolled per-copy two-copy product: `p(a1,b1|x1,y1) p(a2,b2|x2,y2)`
/// with joint inputs `x = x1 + m1 x2`.
pub fn percopy_product_two(t1: &CorrelationTable, t2: &CorrelationTable) -> Vec<f64> {
    let (m1, o1, m2, o2) = (
        t1.num_inputs(),
        t1.num_outputs(),
        t2.num_inputs(),
        t2.num_outputs(),
    );
    let (nx, na) = (m1 * m2, o1 * o2);
    let mut out = vec![0.0; nx * nx * na * na];
    for x in 0..nx {
        for y in 0..nx {
            for a in 0..na {
                for b in 0..na {
                    out[((x * nx + y) * na + a) * na + b] = t1.get(x % m1, y % m1, a % o1, b % o1)
                        * t2.get(x / m1, y / m1, a / o1, b / o1);
                }
            }
        }
    }
    out
}

/// CHSH-game winning probability averaged over the four input pairs.
pub fn game_score(table: &CorrelationTable) -> f64 {
    let mut s = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    if (a ^ b) == (x & y) {
                        s += table.get(x, y, a, b);
                    }
                }
            }
        }
    }
    s / 4.0
}
