use super::{chsh_reference, SingleCopyStrategy};
use crate::bell::{CorrelationTable, SchemeKind};
use crate::error::{Error, Result};
use crate::par;
use crate::radix;
use crate::tol;

/// Runs the strategies in parallel under `scheme` and returns the joint table.
pub fn compose(strategies: &[SingleCopyStrategy], scheme: SchemeKind) -> Result<CorrelationTable> {
    let tables = par::map_slice(strategies, SingleCopyStrategy::table)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    compose_tables(&tables, scheme)
}

fn check_copies(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "composition needs at least one copy".into(),
        ));
    }
    if n > tol::MAX_COPIES {
        return Err(Error::TooManyCopies {
            requested: n,
            max: tol::MAX_COPIES,
        });
    }
    Ok(())
}

/// Product of single-copy tables. Under [`SchemeKind::Broadcast`] every copy
/// sees the same `(x, y)`; under [`SchemeKind::PerCopy`] the joint inputs are
/// mixed-radix like the outputs.
pub fn compose_tables(tables: &[CorrelationTable], scheme: SchemeKind) -> Result<CorrelationTable> {
    check_copies(tables.len())?;
    if let Some(k) = tables.iter().position(|t| !t.is_single()) {
        return Err(Error::ShapeMismatch(format!(
            "table {k} is not single-copy"
        )));
    }
    let inputs: Vec<usize> = tables.iter().map(CorrelationTable::num_inputs).collect();
    let outputs: Vec<usize> = tables.iter().map(CorrelationTable::num_outputs).collect();
    if scheme == SchemeKind::Broadcast && inputs.iter().any(|&m| m != inputs[0]) {
        return Err(Error::SchemeInputMismatch(format!(
            "broadcast composition needs the same number of inputs for every copy, got {inputs:?}"
        )));
    }

    let n = tables.len();
    let na = radix::size(&outputs);
    let nx = match scheme {
        SchemeKind::Broadcast => inputs[0],
        SchemeKind::PerCopy => radix::size(&inputs),
    };
    let out_digits: Vec<Vec<usize>> = (0..na).map(|a| radix::decode(a, &outputs)).collect();
    let in_digits: Vec<Vec<usize>> = (0..nx)
        .map(|x| match scheme {
            SchemeKind::Broadcast => vec![x; n],
            SchemeKind::PerCopy => radix::decode(x, &inputs),
        })
        .collect();

    let mut probs = vec![0.0; nx * nx * na * na];
    par::fill_chunks(&mut probs, na * na, |row, out| {
        let (x, y) = (row / nx, row % nx);
        let (xs, ys) = (&in_digits[x], &in_digits[y]);
        for a in 0..na {
            for b in 0..na {
                let mut p = 1.0;
                for k in 0..n {
                    p *= tables[k].get(xs[k], ys[k], out_digits[a][k], out_digits[b][k]);
                }
                out[a * na + b] = p;
            }
        }
    });
    CorrelationTable::new(scheme, inputs, outputs, probs)
}

fn single_for_adversary(single: &CorrelationTable, n: usize) -> Result<()> {
    if !single.is_single() {
        return Err(Error::ShapeMismatch(
            "adversary needs a single-copy table".into(),
        ));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "adversary needs n >= 2, got {n}"
        )));
    }
    check_copies(n)
}

/// One copy measured, its outputs written into every slot:
/// `a_i = a`, `b_i = b` for all `i`.
pub fn adversary_copy_from(single: &CorrelationTable, n: usize) -> Result<CorrelationTable> {
    single_for_adversary(single, n)?;
    let (m, o) = (single.num_inputs(), single.num_outputs());
    let outputs = vec![o; n];
    let na = radix::size(&outputs);
    let repeat = |v: usize| radix::encode(&vec![v; n], &outputs);
    let mut probs = vec![0.0; m * m * na * na];
    for x in 0..m {
        for y in 0..m {
            for a in 0..o {
                for b in 0..o {
                    probs[((x * m + y) * na + repeat(a)) * na + repeat(b)] = single.get(x, y, a, b);
                }
            }
        }
    }
    CorrelationTable::new(SchemeKind::Broadcast, vec![m; n], outputs, probs)
}

/// [`adversary_copy_from`] on the CHSH reference.
pub fn adversary_copy(n: usize) -> Result<CorrelationTable> {
    adversary_copy_from(&chsh_reference().table()?, n)
}

/// One copy measured, each slot shifted by a shared uniform `lambda_i`:
/// `a_i = a + lambda_i`, `b_i = b + lambda_i` (mod `o`). Local marginals
/// become uniform while every `a_i - b_i` equals `a - b`.
pub fn adversary_shared_randomness_from(
    single: &CorrelationTable,
    n: usize,
) -> Result<CorrelationTable> {
    single_for_adversary(single, n)?;
    let (m, o) = (single.num_inputs(), single.num_outputs());
    let outputs = vec![o; n];
    let na = radix::size(&outputs);
    let weight = (o as f64).powi(-(n as i32));
    // joint (a, b) pairs grouped by the common difference a_i - b_i = d
    let mut by_diff: Vec<Vec<(usize, usize)>> = vec![Vec::new(); o];
    for a in 0..na {
        let da = radix::decode(a, &outputs);
        for b in 0..na {
            let db = radix::decode(b, &outputs);
            let d = (da[0] + o - db[0]) % o;
            if da.iter().zip(&db).all(|(&ai, &bi)| (ai + o - bi) % o == d) {
                by_diff[d].push((a, b));
            }
        }
    }
    let mut probs = vec![0.0; m * m * na * na];
    for x in 0..m {
        for y in 0..m {
            for (d, pairs) in by_diff.iter().enumerate() {
                let mass: f64 = (0..o)
                    .map(|a0| single.get(x, y, a0, (a0 + o - d) % o))
                    .sum();
                for &(a, b) in pairs {
                    probs[((x * m + y) * na + a) * na + b] = weight * mass;
                }
            }
        }
    }
    CorrelationTable::new(SchemeKind::Broadcast, vec![m; n], outputs, probs)
}

/// [`adversary_shared_randomness_from`] on the CHSH reference.
pub fn adversary_shared_randomness(n: usize) -> Result<CorrelationTable> {
    adversary_shared_randomness_from(&chsh_reference().table()?, n)
}
