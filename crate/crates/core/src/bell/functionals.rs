use super::expression::BellExpression;
use super::table::{CorrelationTable, SchemeKind};
use crate::error::{Error, Result};
use crate::par;
use crate::radix;
use crate::tol;

fn check_single_shape(expr: &BellExpression, m: usize, o: usize, what: &str) -> Result<()> {
    if expr.m() != m || expr.o() != o {
        return Err(Error::ShapeMismatch(format!(
            "{what}: expression {:?} is ({}, {}), table slot is ({m}, {o})",
            expr.label(),
            expr.m(),
            expr.o()
        )));
    }
    Ok(())
}

/// `sum b^{xy}_{ab} p(a,b|x,y)` on a single-copy table.
pub fn evaluate(expr: &BellExpression, table: &CorrelationTable) -> Result<f64> {
    if !table.is_single() {
        return Err(Error::ShapeMismatch(format!(
            "evaluate needs a single-copy table, got {} copies",
            table.n_copies()
        )));
    }
    check_single_shape(expr, table.num_inputs(), table.num_outputs(), "evaluate")?;
    Ok(expr
        .coeffs()
        .iter()
        .zip(table.probs())
        .map(|(c, p)| c * p)
        .sum())
}

/// `<A_x B_y> = sum (-1)^(a+b) p(a,b|x,y)` on a single-copy binary table.
pub fn correlator(table: &CorrelationTable, x: usize, y: usize) -> Result<f64> {
    if !table.is_single() || table.num_outputs() != 2 {
        return Err(Error::ShapeMismatch(
            "correlator needs a single-copy binary-outcome table".into(),
        ));
    }
    let m = table.num_inputs();
    if x >= m || y >= m {
        return Err(Error::ShapeMismatch(format!(
            "input ({x}, {y}) out of range {m}"
        )));
    }
    let r = table.row(x, y);
    Ok(r[0] - r[1] - r[2] + r[3])
}

/// Distribution of copy `i` conditioned on the outputs of copies `1..i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalSlice {
    pub copy: usize,
    pub prefix_a: usize,
    pub prefix_b: usize,
    pub m: usize,
    pub o: usize,
    /// `p(a_i, b_i | x, y, prefix)`, flat `(x, y, a_i, b_i)`; zero where the
    /// prefix has no weight.
    pub probs: Vec<f64>,
    /// `p(prefix | x, y)`, flat `(x, y)`.
    pub prefix_prob: Vec<f64>,
}

impl ConditionalSlice {
    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.probs[((x * self.m + y) * self.o + a) * self.o + b]
    }

    pub fn prefix_prob(&self, x: usize, y: usize) -> f64 {
        self.prefix_prob[x * self.m + y]
    }

    pub fn is_defined(&self, x: usize, y: usize) -> bool {
        self.prefix_prob(x, y) > tol::PREFIX_POSITIVITY
    }

    /// Conditional distribution as a single-copy table, if defined for every
    /// input pair.
    pub fn to_table(&self) -> Option<CorrelationTable> {
        let all = (0..self.m).all(|x| (0..self.m).all(|y| self.is_defined(x, y)));
        if !all {
            return None;
        }
        CorrelationTable::single(self.m, self.o, self.probs.clone()).ok()
    }

    fn zero_error(&self, x: usize, y: usize) -> Error {
        Error::ZeroPrefixProbability {
            copy: self.copy,
            prefix_a: self.prefix_a,
            prefix_b: self.prefix_b,
            x,
            y,
            prob: self.prefix_prob(x, y),
        }
    }

    /// Bell value of the conditional distribution. Only input pairs the
    /// expression involves need a positive prefix probability.
    pub fn value(&self, expr: &BellExpression) -> Result<f64> {
        check_single_shape(expr, self.m, self.o, "conditional value")?;
        let mut acc = 0.0;
        for x in 0..self.m {
            for y in 0..self.m {
                if !expr.involves(x, y) {
                    continue;
                }
                if !self.is_defined(x, y) {
                    return Err(self.zero_error(x, y));
                }
                for a in 0..self.o {
                    for b in 0..self.o {
                        acc += expr.coeff(x, y, a, b) * self.get(x, y, a, b);
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// Slice from a table already marginalized to its first `i` copies.
fn slice_from_leading(lead: &CorrelationTable, i: usize, pa: usize, pb: usize) -> ConditionalSlice {
    let m = lead.num_inputs();
    let o = lead.output_arities()[i - 1];
    let stride = radix::size(&lead.output_arities()[..i - 1]);
    let mut probs = vec![0.0; m * m * o * o];
    let mut prefix_prob = vec![0.0; m * m];
    for x in 0..m {
        for y in 0..m {
            let mut block = vec![0.0; o * o];
            for a in 0..o {
                for b in 0..o {
                    block[a * o + b] = lead.get(x, y, pa + a * stride, pb + b * stride);
                }
            }
            let total: f64 = block.iter().sum();
            prefix_prob[x * m + y] = total;
            if i == 1 {
                // copy-1 marginal, no conditioning
                probs[(x * m + y) * o * o..][..o * o].copy_from_slice(&block);
            } else if total > tol::PREFIX_POSITIVITY {
                let out = &mut probs[(x * m + y) * o * o..][..o * o];
                for (dst, src) in out.iter_mut().zip(&block) {
                    *dst = src / total;
                }
            }
        }
    }
    ConditionalSlice {
        copy: i,
        prefix_a: pa,
        prefix_b: pb,
        m,
        o,
        probs,
        prefix_prob,
    }
}

fn check_prefix(table: &CorrelationTable, i: usize, pa: usize, pb: usize) -> Result<usize> {
    table.require_broadcast("conditional value")?;
    table.check_copy(i)?;
    let npref = radix::size(&table.output_arities()[..i - 1]);
    if pa >= npref || pb >= npref {
        return Err(Error::ShapeMismatch(format!(
            "prefix ({pa}, {pb}) out of range for copy {i} ({npref} joint prefixes per party)"
        )));
    }
    Ok(npref)
}

/// Conditional distribution of copy `i` (1-based) given the joint prefix
/// outputs of copies `1..i`. Outputs of later copies are summed out first.
/// For `i = 1` the only prefix is `(0, 0)` and the slice is the copy-1
/// marginal.
pub fn conditional_slice(
    table: &CorrelationTable,
    i: usize,
    prefix_a: usize,
    prefix_b: usize,
) -> Result<ConditionalSlice> {
    check_prefix(table, i, prefix_a, prefix_b)?;
    let lead = table.marginal_leading(i)?;
    Ok(slice_from_leading(&lead, i, prefix_a, prefix_b))
}

/// Bell value of copy `i` conditioned on the prefix outputs.
///
/// Fails with [`Error::ZeroPrefixProbability`] when the prefix has
/// probability at or below the positivity threshold for an input pair the
/// expression uses.
pub fn conditional_value(
    table: &CorrelationTable,
    expr: &BellExpression,
    i: usize,
    prefix_a: usize,
    prefix_b: usize,
) -> Result<f64> {
    conditional_slice(table, i, prefix_a, prefix_b)?.value(expr)
}

/// Conditional values of copy `i` for every prefix pair, ordered
/// `prefix_a`-major. Failing prefixes are kept as errors.
pub fn conditional_values(
    table: &CorrelationTable,
    expr: &BellExpression,
    i: usize,
) -> Result<Vec<Result<f64>>> {
    let npref = check_prefix(table, i, 0, 0)?;
    check_single_shape(
        expr,
        table.num_inputs(),
        table.output_arities()[i - 1],
        "conditional value",
    )?;
    let lead = table.marginal_leading(i)?;
    Ok(par::map_range(npref * npref, |k| {
        slice_from_leading(&lead, i, k / npref, k % npref).value(expr)
    }))
}

/// Uniform average of the conditional values of copy `i` over all
/// `o^(2(i-1))` prefixes; `J^1` is the copy-1 marginal value. Any failing
/// prefix fails the whole value.
pub fn j_value(table: &CorrelationTable, expr: &BellExpression, i: usize) -> Result<f64> {
    if i == 1 {
        table.require_broadcast("J value")?;
        return evaluate(expr, &table.marginal_leading(1)?);
    }
    let values = conditional_values(table, expr, i)?;
    let count = values.len() as f64;
    let mut sum = 0.0;
    for v in values {
        sum += v?;
    }
    Ok(sum / count)
}

/// Mean of the conditional values of copy `i` over the prefixes that occur.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportedJ {
    pub value: f64,
    /// Prefix pairs whose conditional value is defined.
    pub defined: usize,
    /// All prefix pairs, `o^(2(i-1))`.
    pub total: usize,
}

/// Like [`j_value`], but prefixes whose probability vanishes are skipped
/// instead of failing the value. Errors only when no prefix is defined.
pub fn j_value_on_support(
    table: &CorrelationTable,
    expr: &BellExpression,
    i: usize,
) -> Result<SupportedJ> {
    if i == 1 {
        let value = j_value(table, expr, 1)?;
        return Ok(SupportedJ {
            value,
            defined: 1,
            total: 1,
        });
    }
    let values = conditional_values(table, expr, i)?;
    let total = values.len();
    let mut first_err = None;
    let (mut sum, mut defined) = (0.0, 0);
    for v in values {
        match v {
            Ok(v) => {
                sum += v;
                defined += 1;
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match (defined, first_err) {
        (0, Some(e)) => Err(e),
        _ => Ok(SupportedJ {
            value: sum / defined as f64,
            defined,
            total,
        }),
    }
}

/// How the generalized conditional sum is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixNormalization {
    /// Divide by the number of prefix pairs, `(prod_{j<i} o_j)^2`: the mean.
    OutputArity,
    /// Divide by `(prod_{j<i} m_j)^2`. Agrees with the mean only when every
    /// prefix copy has `o_j = m`.
    InputArity,
}

fn check_generalized(table: &CorrelationTable, exprs: &[BellExpression], i: usize) -> Result<()> {
    table.require_broadcast("generalized conditional value")?;
    table.check_copy(i)?;
    if exprs.len() != table.n_copies() {
        return Err(Error::ShapeMismatch(format!(
            "{} expressions for {} copies",
            exprs.len(),
            table.n_copies()
        )));
    }
    let m = table.num_inputs();
    for (k, e) in exprs.iter().enumerate() {
        check_single_shape(e, m, table.output_arities()[k], &format!("copy {}", k + 1))?;
    }
    Ok(())
}

/// Conditional value of copy `i` under its own expression `exprs[i-1]`, for
/// broadcast tables whose copies share the input arity but may differ in
/// output arity.
pub fn generalized_conditional_value(
    table: &CorrelationTable,
    exprs: &[BellExpression],
    i: usize,
    prefix_a: usize,
    prefix_b: usize,
) -> Result<f64> {
    check_generalized(table, exprs, i)?;
    conditional_value(table, &exprs[i - 1], i, prefix_a, prefix_b)
}

/// Normalized sum of generalized conditional values of copy `i`.
pub fn generalized_j_value(
    table: &CorrelationTable,
    exprs: &[BellExpression],
    i: usize,
    normalization: PrefixNormalization,
) -> Result<f64> {
    check_generalized(table, exprs, i)?;
    let values = conditional_values(table, &exprs[i - 1], i)?;
    let mut sum = 0.0;
    for v in values {
        sum += v?;
    }
    let denom = match normalization {
        PrefixNormalization::OutputArity => radix::size(&table.output_arities()[..i - 1]).pow(2),
        PrefixNormalization::InputArity => radix::size(&table.input_arities()[..i - 1]).pow(2),
    };
    Ok(sum / denom as f64)
}

/// `I^i` for each setting of the other copies' inputs on a per-copy table:
/// the copy-`i` expression on the copy-`i` marginal with `x_(i), y_(i)`
/// fixed. Ordered by the joint other-input index, Alice-major.
pub fn averaged_setting_values(
    table: &CorrelationTable,
    expr: &BellExpression,
    i: usize,
) -> Result<Vec<f64>> {
    if table.scheme() != SchemeKind::PerCopy {
        return Err(Error::ShapeMismatch(
            "averaged value needs a per-copy table".into(),
        ));
    }
    table.check_copy(i)?;
    let k = i - 1;
    let inputs = table.input_arities();
    let outputs = table.output_arities();
    check_single_shape(expr, inputs[k], outputs[k], &format!("copy {i}"))?;

    let others: Vec<usize> = inputs
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, &m)| m)
        .collect();
    let n_other = radix::size(&others);
    let nx = table.num_inputs();
    let na = table.num_outputs();
    let digit_a: Vec<usize> = (0..na).map(|a| radix::digit(a, outputs, k)).collect();
    let split = |x: usize| -> (usize, usize) {
        let mut digits = radix::decode(x, inputs);
        let own = digits.remove(k);
        (own, radix::encode(&digits, &others))
    };
    let splits: Vec<(usize, usize)> = (0..nx).map(split).collect();

    // per joint x: contribution to each (other_x, other_y) slot
    let partial: Vec<Vec<(usize, f64)>> = par::map_range(nx, |x| {
        let (xi, ox) = splits[x];
        (0..nx)
            .map(|y| {
                let (yi, oy) = splits[y];
                let row = table.row(x, y);
                let mut acc = 0.0;
                for a in 0..na {
                    for b in 0..na {
                        let p = row[a * na + b];
                        if p != 0.0 {
                            acc += expr.coeff(xi, yi, digit_a[a], digit_a[b]) * p;
                        }
                    }
                }
                (ox * n_other + oy, acc)
            })
            .collect()
    });
    let mut values = vec![0.0; n_other * n_other];
    for row in partial {
        for (slot, v) in row {
            values[slot] += v;
        }
    }
    Ok(values)
}

/// `J^i` of a per-copy table: copy `i`'s expression averaged uniformly over
/// all `prod_{j != i} m_j^2` settings of the other inputs.
pub fn averaged_j_percopy(
    table: &CorrelationTable,
    exprs: &[BellExpression],
    i: usize,
) -> Result<f64> {
    if exprs.len() != table.n_copies() {
        return Err(Error::ShapeMismatch(format!(
            "{} expressions for {} copies",
            exprs.len(),
            table.n_copies()
        )));
    }
    table.check_copy(i)?;
    let values = averaged_setting_values(table, &exprs[i - 1], i)?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}
