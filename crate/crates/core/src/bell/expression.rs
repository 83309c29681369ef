use crate::error::{Error, Result};

/// Coefficient tensor `b[x][y][a][b]` of a linear Bell expression
/// `sum b^{xy}_{ab} p(a,b|x,y)` over `m` inputs and `o` outputs per party.
#[derive(Debug, Clone, PartialEq)]
pub struct BellExpression {
    m: usize,
    o: usize,
    coeffs: Vec<f64>,
    label: String,
}

impl BellExpression {
    /// `coeffs` is flat in `(x, y, a, b)` order.
    pub fn new(m: usize, o: usize, coeffs: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if m == 0 || o == 0 {
            return Err(Error::ShapeMismatch(format!(
                "m = {m}, o = {o}: both must be >= 1"
            )));
        }
        if coeffs.len() != m * m * o * o {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for m = {m}, o = {o} (expected {})",
                coeffs.len(),
                m * m * o * o
            )));
        }
        if let Some(bad) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "coefficient {bad} is not finite"
            )));
        }
        Ok(Self {
            m,
            o,
            coeffs,
            label: label.into(),
        })
    }

    pub fn from_fn(
        m: usize,
        o: usize,
        label: impl Into<String>,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(m * m * o * o);
        for x in 0..m {
            for y in 0..m {
                for a in 0..o {
                    for b in 0..o {
                        coeffs.push(f(x, y, a, b));
                    }
                }
            }
        }
        Self::new(m, o, coeffs, label)
    }

    pub fn zero(m: usize, o: usize) -> Self {
        Self::from_fn(m, o, "zero", |_, _, _, _| 0.0).expect("valid shape")
    }

    /// `<A0B0> + <A0B1> + <A1B0> - <A1B1>`, coefficients `(-1)^(a+b) (-1)^(xy)`.
    pub fn chsh() -> Self {
        Self::from_fn(2, 2, "chsh", |x, y, a, b| {
            if (a + b + x * y) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .expect("valid shape")
    }

    /// CHSH game score: probability of `a xor b = x y` under uniform inputs.
    pub fn chsh_game() -> Self {
        Self::from_fn(2, 2, "chsh-game", |x, y, a, b| {
            if (a ^ b) == (x & y) {
                0.25
            } else {
                0.0
            }
        })
        .expect("valid shape")
    }

    /// `alpha <A0> + CHSH`, with the marginal term spread evenly over
    /// Bob's two inputs. Local bound `2 + alpha`, quantum maximum
    /// `sqrt(8 + 2 alpha^2)`.
    pub fn tilted_chsh(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha = {alpha}")));
        }
        Self::from_fn(2, 2, format!("tilted-chsh({alpha})"), |x, y, a, b| {
            let chsh = if (a + b + x * y) % 2 == 0 { 1.0 } else { -1.0 };
            let marginal = if x == 0 {
                0.5 * alpha * if a == 0 { 1.0 } else { -1.0 }
            } else {
                0.0
            };
            chsh + marginal
        })
    }

    /// Looks up a built-in expression: `chsh`, `chsh-game`, `tilted-chsh(alpha)`.
    pub fn builtin(name: &str) -> Option<Result<Self>> {
        let name = name.trim();
        match name {
            "chsh" => Some(Ok(Self::chsh())),
            "chsh-game" => Some(Ok(Self::chsh_game())),
            _ => {
                let inner = name.strip_prefix("tilted-chsh(")?.strip_suffix(')')?;
                Some(crate::strategies::parse_param(inner).and_then(Self::tilted_chsh))
            }
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn o(&self) -> usize {
        self.o
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeff(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.coeffs[((x * self.m + y) * self.o + a) * self.o + b]
    }

    /// Whether input pair `(x, y)` carries any nonzero coefficient.
    pub fn involves(&self, x: usize, y: usize) -> bool {
        let block = self.o * self.o;
        let start = (x * self.m + y) * block;
        self.coeffs[start..start + block].iter().any(|&c| c != 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            m: self.m,
            o: self.o,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
            label: format!("{}*{}", c, self.label),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chsh_coefficients() {
        let e = BellExpression::chsh();
        assert_eq!(e.coeff(0, 0, 0, 0), 1.0);
        assert_eq!(e.coeff(0, 0, 0, 1), -1.0);
        assert_eq!(e.coeff(1, 1, 0, 0), -1.0);
        assert_eq!(e.coeff(1, 1, 1, 0), 1.0);
        assert!(e.involves(1, 1));
    }

    #[test]
    fn tilted_reduces_to_chsh() {
        let t = BellExpression::tilted_chsh(0.0).unwrap();
        assert_eq!(t.coeffs(), BellExpression::chsh().coeffs());
    }

    #[test]
    fn shape_checks() {
        assert!(BellExpression::new(2, 2, vec![0.0; 15], "x").is_err());
        assert!(BellExpression::new(0, 2, vec![], "x").is_err());
        assert!(BellExpression::new(1, 1, vec![f64::INFINITY], "x").is_err());
    }

    #[test]
    fn builtin_names() {
        assert_eq!(
            BellExpression::builtin("chsh").unwrap().unwrap(),
            BellExpression::chsh()
        );
        let t = BellExpression::builtin("tilted-chsh(0.5)")
            .unwrap()
            .unwrap();
        assert_eq!(t.coeff(0, 1, 0, 0), 1.25);
        assert!(BellExpression::builtin("nope").is_none());
        assert!(BellExpression::builtin("tilted-chsh(abc)")
            .unwrap()
            .is_err());
    }
}
