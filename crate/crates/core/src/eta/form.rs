use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// `a0 + a2·ε` where `ε = i·vol_{S²}`.
///
/// Since `vol ∧ vol = 0` on the two-sphere, `ε² = 0` and the arithmetic is that
/// of real dual numbers. A degree-two part `c·vol` of a form is stored as
/// `a2 = c / i`; the η̂-form's `vol` coefficient is purely imaginary, so `a2` is real.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FormScalar {
    pub a0: f64,
    pub a2: f64,
}

impl FormScalar {
    pub const ZERO: Self = Self { a0: 0.0, a2: 0.0 };
    pub const ONE: Self = Self { a0: 1.0, a2: 0.0 };

    pub fn new(a0: f64, a2: f64) -> Self {
        Self { a0, a2 }
    }

    pub fn scalar(a0: f64) -> Self {
        Self { a0, a2: 0.0 }
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.a0, k * self.a2)
    }

    /// `e^{a0}(1 + a2 ε)`.
    pub fn exp(self) -> Self {
        let e = self.a0.exp();
        Self::new(e, e * self.a2)
    }

    /// Componentwise maximum of absolute differences.
    pub fn max_diff(self, o: Self) -> f64 {
        (self.a0 - o.a0).abs().max((self.a2 - o.a2).abs())
    }
}

impl Add for FormScalar {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a0 + o.a0, self.a2 + o.a2)
    }
}

impl Sub for FormScalar {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a0 - o.a0, self.a2 - o.a2)
    }
}

impl Mul for FormScalar {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.a0 * o.a0, self.a0 * o.a2 + self.a2 * o.a0)
    }
}

impl Neg for FormScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a0, -self.a2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fs() -> impl Strategy<Value = FormScalar> {
        (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b)| FormScalar::new(a, b))
    }

    proptest! {
        #[test]
        fn ring_axioms(x in fs(), y in fs(), z in fs()) {
            let close = |a: FormScalar, b: FormScalar| a.max_diff(b) < 1e-10;
            prop_assert!(close((x * y) * z, x * (y * z)));
            prop_assert!(close(x * (y + z), x * y + x * z));
            prop_assert_eq!(x * y, y * x);
            prop_assert_eq!(x * FormScalar::ONE, x);
            prop_assert_eq!(x + (-x), FormScalar::ZERO);
        }

        #[test]
        fn epsilon_is_nilpotent(b in -5.0..5.0f64) {
            let e = FormScalar::new(0.0, b);
            prop_assert_eq!(e * e, FormScalar::ZERO);
        }

        #[test]
        fn exponential_is_multiplicative(x in fs(), y in fs()) {
            let lhs = (x + y).exp();
            let rhs = x.exp() * y.exp();
            prop_assert!(lhs.max_diff(rhs) < 1e-9 * (1.0 + lhs.a0.abs() + lhs.a2.abs()));
        }
    }

    #[test]
    fn exponential_of_pure_two_form() {
        let x = FormScalar::new(0.3, 2.0);
        let e = x.exp();
        assert_eq!(e.a0, 0.3f64.exp());
        assert_eq!(e.a2, 2.0 * 0.3f64.exp());
    }
}
