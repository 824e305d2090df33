//! The rescaled theta bracket `[z; p] = ϑ_1(αz/2; p) / ((α/2) ϑ_1′(0; p))`.
//!
//! Evaluated through the canceled product
//!
//! ```text
//! [z; p] = sin(αz/2)/(α/2) · Π_{l≥1} (1 − 2p^{2l} cos(αz) + p^{4l}) / (1 − p^{2l})²
//! ```
//!
//! which contains only even powers of the nome, so it is real and well defined
//! for every real `z` and every `p ∈ (−1, 1)`.

use crate::{Error, Result};

/// Largest admissible `|p|`.
pub const NOME_CAP: f64 = 0.99;

/// Product terms are kept while `|p|^{2l}` is at least this large.
const PRODUCT_CUTOFF: f64 = 1e-18;
const MAX_PRODUCT_TERMS: usize = 600;

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaEvaluator {
    alpha: f64,
    nome: f64,
    /// `p^{2l}` for `l = 1..=depth`.
    even_powers: Vec<f64>,
    /// `1 / (1 − p^{2l})²` folded into one constant.
    normalization: f64,
}

impl ThetaEvaluator {
    pub fn new(alpha: f64, nome: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        if !nome.is_finite() || nome.abs() > NOME_CAP {
            return Err(Error::InvalidParameter(format!(
                "|p| must not exceed {NOME_CAP}, got {nome}"
            )));
        }
        let p2 = nome * nome;
        let mut even_powers = Vec::new();
        let mut pw = p2;
        while pw >= PRODUCT_CUTOFF && even_powers.len() < MAX_PRODUCT_TERMS {
            even_powers.push(pw);
            pw *= p2;
        }
        let normalization = even_powers
            .iter()
            .map(|&x| 1.0 / ((1.0 - x) * (1.0 - x)))
            .product();
        Ok(ThetaEvaluator { alpha, nome, even_powers, normalization })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nome(&self) -> f64 {
        self.nome
    }

    /// Number of product factors retained.
    pub fn truncation_depth(&self) -> usize {
        self.even_powers.len()
    }

    /// Real period `2π/α`; the bracket changes sign under `z ↦ z + 2π/α`.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.alpha
    }

    pub fn bracket(&self, z: f64) -> f64 {
        let c = (self.alpha * z).cos();
        let prod: f64 = self
            .even_powers
            .iter()
            .map(|&x| 1.0 - 2.0 * x * c + x * x)
            .product();
        bracket_trig(z, self.alpha) * prod * self.normalization
    }

    /// Elliptic factorial `[z]_k = [z][z+1]⋯[z+k−1]`.
    pub fn bracket_factorial(&self, z: f64, k: i64) -> Result<f64> {
        if k < 0 {
            return Err(Error::InvalidArgument(format!("factorial length {k} < 0")));
        }
        Ok((0..k).map(|l| self.bracket(z + l as f64)).product())
    }

    /// Whether `z` lies within `tol` of a zero of the bracket, i.e. of an
    /// integer multiple of the period `2π/α`.
    pub fn is_zero_of_bracket(&self, z: f64, tol: f64) -> bool {
        let period = self.period();
        let k = (z / period).round();
        (z - k * period).abs() <= tol
    }
}

/// The `p = 0` bracket `sin(αz/2)/(α/2)`.
pub fn bracket_trig(z: f64, alpha: f64) -> f64 {
    (0.5 * alpha * z).sin() / (0.5 * alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Ratio `ϑ_1(αz/2)/((α/2)ϑ_1′(0))` from the sine series, after
    /// canceling the common `p^{1/4}`.
    fn bracket_from_series(z: f64, alpha: f64, p: f64) -> f64 {
        let x = 0.5 * alpha * z;
        let (mut num, mut den) = (0.0, 0.0);
        for l in 0..400 {
            let lf = l as f64;
            let w = (-1f64).powi(l) * p.powf(lf * lf + lf);
            if w.abs() < 1e-30 && l > 2 {
                break;
            }
            num += w * ((2.0 * lf + 1.0) * x).sin();
            den += w * (2.0 * lf + 1.0);
        }
        num / den / (0.5 * alpha)
    }

    /// The same ratio through the imaginary transformation `τ ↦ −1/τ`. With
    /// `p = e^{−πs}` the dual nome is `e^{−π/s}` and
    /// `[z] = s e^{−x²/(πs)} Σ (−1)^l p̃^{l²+l} sinh((2l+1)x/s) / Σ (−1)^l p̃^{l²+l}(2l+1) / (α/2)`.
    /// Well conditioned for `p` close to 1, where the direct series cancels badly.
    fn bracket_from_dual_series(z: f64, alpha: f64, p: f64) -> f64 {
        let x = 0.5 * alpha * z;
        let s = -p.ln() / PI;
        let dual = (-PI / s).exp();
        let gauss = -x * x / (PI * s);
        let (mut num, mut den) = (0.0, 0.0);
        for l in 0..60 {
            let lf = l as f64;
            let w = (-1f64).powi(l) * dual.powf(lf * lf + lf);
            if w == 0.0 {
                break;
            }
            let y = (2.0 * lf + 1.0) * x / s;
            // e^{gauss} sinh(y) without overflow
            num += w * 0.5 * ((gauss + y).exp() - (gauss - y).exp());
            den += w * (2.0 * lf + 1.0);
        }
        s * num / den / (0.5 * alpha)
    }

    #[test]
    fn bracket_examples() {
        let alpha = 2.0 * PI / 3.0;
        let th = ThetaEvaluator::new(alpha, 0.0).unwrap();
        assert_eq!(th.bracket(0.0), 0.0);
        assert!((th.bracket(1.0) - 0.826_993_343_132_688_1).abs() < 1e-15);
        let th = ThetaEvaluator::new(1.0, 0.4).unwrap();
        let z = 0.37;
        assert!((th.bracket(z + 2.0 * PI) + th.bracket(z)).abs() < 1e-14);
    }

    #[test]
    fn factorial_examples() {
        let th = ThetaEvaluator::new(2.0 * PI / 3.0, 0.0).unwrap();
        assert_eq!(th.bracket_factorial(0.3, 0).unwrap(), 1.0);
        assert_eq!(th.bracket_factorial(0.3, 1).unwrap(), th.bracket(0.3));
        let v = th.bracket_factorial(1.0, 2).unwrap();
        assert!((v - 0.826_993_343_132_688_1f64.powi(2)).abs() < 1e-15);
        assert!(th.bracket_factorial(1.0, -1).is_err());
    }

    #[test]
    fn trig_examples() {
        let alpha = 2.0 * PI / 3.0;
        assert_eq!(bracket_trig(0.0, alpha), 0.0);
        assert!((bracket_trig(2.0, alpha) - 0.826_993_343_132_688_1).abs() < 1e-15);
        let th = ThetaEvaluator::new(alpha, 0.0).unwrap();
        for i in -50..=50 {
            let z = i as f64 * 0.1;
            assert_eq!(th.bracket(z), bracket_trig(z, alpha));
        }
    }

    #[test]
    fn nome_cap_enforced() {
        assert!(ThetaEvaluator::new(1.0, 0.995).is_err());
        assert!(ThetaEvaluator::new(1.0, -0.995).is_err());
        assert!(ThetaEvaluator::new(0.0, 0.1).is_err());
        assert!(ThetaEvaluator::new(1.0, 0.99).is_ok());
    }

    #[test]
    fn truncation_depth_follows_cutoff() {
        assert_eq!(ThetaEvaluator::new(1.0, 0.0).unwrap().truncation_depth(), 0);
        let th = ThetaEvaluator::new(1.0, 0.5).unwrap();
        assert!(0.25f64.powi(th.truncation_depth() as i32 + 1) < 1e-18);
        assert!(ThetaEvaluator::new(1.0, 0.99).unwrap().truncation_depth() <= 600);
    }

    #[test]
    fn product_matches_series() {
        for &p in &[0.05, 0.3, 0.5, 0.7, 0.8] {
            for &alpha in &[0.7, 1.3, 2.0 * PI / 5.0] {
                let th = ThetaEvaluator::new(alpha, p).unwrap();
                for i in 1..40 {
                    let z = -3.9 + 0.2 * i as f64;
                    let a = th.bracket(z);
                    let b = bracket_from_series(z, alpha, p);
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "p={p} z={z} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn product_matches_dual_series() {
        for &p in &[0.5, 0.7, 0.8, 0.9] {
            for &alpha in &[0.7, 1.3, 2.0 * PI / 5.0] {
                let th = ThetaEvaluator::new(alpha, p).unwrap();
                for i in 1..40 {
                    let z = -3.9 + 0.2 * i as f64;
                    let a = th.bracket(z);
                    let b = bracket_from_dual_series(z, alpha, p);
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "p={p} z={z} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn small_nome_limit_is_quadratic() {
        let alpha = 0.9;
        for &z in &[0.4, 1.7, 3.1] {
            let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&p| {
                    let th = ThetaEvaluator::new(alpha, p).unwrap();
                    (th.bracket(z) - bracket_trig(z, alpha)).abs() / (p * p)
                })
                .collect();
            for r in &ratios {
                assert!(*r < 10.0, "{ratios:?}");
            }
            assert!((ratios[1] - ratios[2]).abs() < 1e-2 * ratios[2].max(1e-3) + 1e-6);
        }
    }

    #[test]
    fn zero_detection() {
        let th = ThetaEvaluator::new(2.0 * PI / 3.0, 0.5).unwrap();
        assert!(th.is_zero_of_bracket(3.0, 1e-12));
        assert!(th.is_zero_of_bracket(0.0, 1e-12));
        assert!(th.is_zero_of_bracket(-6.0 + 1e-13, 1e-12));
        assert!(!th.is_zero_of_bracket(2.0, 1e-12));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn odd(z in -10.0f64..10.0, pi in 0usize..4, alpha in 0.2f64..3.0) {
                let p = [-0.5, 0.0, 0.5, 0.9][pi];
                let th = ThetaEvaluator::new(alpha, p).unwrap();
                let (a, b) = (th.bracket(z), th.bracket(-z));
                prop_assert!((a + b).abs() < 1e-14 * a.abs().max(1.0));
            }

            #[test]
            fn quasi_periodic(z in -10.0f64..10.0, p in -0.9f64..0.9, alpha in 0.2f64..3.0) {
                let th = ThetaEvaluator::new(alpha, p).unwrap();
                let a = th.bracket(z);
                let b = th.bracket(z + th.period());
                prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }
    }
}
