//! Hopping coefficients on the shifted dominant-weight lattice.
//!
//! With `x = ρ_g + λ`, `x_j = λ_j + g(n/2 + 1 − j)`, the partition-form
//! coefficient `B_{λ+θ/λ}` equals
//!
//! ```text
//! V_J(x) = Π_{j∈J, k∉J} [x_j − x_k + g] / [x_j − x_k]
//! ```
//!
//! for `J = {j : θ_j = 1}`. The bracket is passed in explicitly so that the
//! same formula can be evaluated away from the truncation lock.

use crate::coeffs::{coeff_b, ModelParams};
use crate::elliptic::ThetaEvaluator;
use crate::partitions::{enumerate_lattice, Partition, StripMask};
use crate::{Error, Result};

/// Smallest `|[x_j − x_k]|` accepted in [`coeff_v_free`].
pub const GENERICITY_FLOOR: f64 = 1e-10;

/// Numerator arguments this close to a period multiple are exact zeros.
const ZERO_SNAP: f64 = 1e-12;

/// `ρ_g + λ` in `n + 1` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightPoint {
    pub coords: Vec<f64>,
}

impl WeightPoint {
    pub fn translated(&self, shift: f64) -> WeightPoint {
        WeightPoint { coords: self.coords.iter().map(|x| x + shift).collect() }
    }
}

pub fn rho_shift(lambda: &Partition, n: usize, g: f64) -> Result<WeightPoint> {
    if lambda.len() > n + 1 {
        return Err(Error::InvalidArgument(format!("{lambda} has more than {} parts", n + 1)));
    }
    let coords = lambda
        .padded(n + 1)
        .iter()
        .enumerate()
        .map(|(i, &l)| l as f64 + g * (n as f64 / 2.0 + 1.0 - (i + 1) as f64))
        .collect();
    Ok(WeightPoint { coords })
}

/// `V_J(x)` for `J` given as 1-based indices, with any bracket.
///
/// `floor` guards the denominators; a smaller `|[x_j − x_k]|` is a
/// genericity violation.
pub fn coeff_v_with(x: &WeightPoint, subset: &[usize], g: f64, theta: &ThetaEvaluator, floor: f64) -> Result<f64> {
    let len = x.coords.len();
    let mut inside = vec![false; len];
    for &j in subset {
        if j < 1 || j > len {
            return Err(Error::InvalidArgument(format!("index {j} outside 1..={len}")));
        }
        inside[j - 1] = true;
    }
    let mut value = 1.0;
    let inside = &inside;
    let members = move |want: bool| x.coords.iter().enumerate().filter(move |&(i, _)| inside[i] == want);
    for (j, xj) in members(true) {
        for (k, xk) in members(false) {
            let d = xj - xk;
            let den = theta.bracket(d);
            if den.abs() < floor {
                return Err(Error::GenericityViolation(format!(
                    "[x_{} − x_{}] = {den:e} at x = {:?}",
                    j + 1,
                    k + 1,
                    x.coords
                )));
            }
            if theta.is_zero_of_bracket(d + g, ZERO_SNAP) {
                return Ok(0.0);
            }
            value *= theta.bracket(d + g) / den;
        }
    }
    Ok(value)
}

/// `V_J(x)` with the model's own bracket.
pub fn coeff_v(x: &WeightPoint, subset: &[usize], params: &ModelParams) -> Result<f64> {
    coeff_v_with(x, subset, params.g(), params.theta(), GENERICITY_FLOOR)
}

/// `V_J(x)` for free `(α, p, g)`, not necessarily on the truncation lock.
pub fn coeff_v_free(x: &WeightPoint, subset: &[usize], g: f64, alpha: f64, p: f64) -> Result<f64> {
    coeff_v_with(x, subset, g, &ThetaEvaluator::new(alpha, p)?, GENERICITY_FLOOR)
}

/// Nonempty subsets of `{1, …, len}`.
fn all_subsets(len: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << len).map(move |bits| (1..=len).filter(|j| bits >> (j - 1) & 1 == 1).collect())
}

/// `max |V_J(ρ_g + λ) − B_{λ+θ/λ}|` over `λ ∈ Λ^{(n,m)}` and all nonempty `J`.
pub fn crosscheck_b(params: &ModelParams) -> Result<f64> {
    let n = params.n();
    let basis = enumerate_lattice(n, params.m())?;
    let mut worst: f64 = 0.0;
    for lambda in basis.partitions() {
        let x = rho_shift(lambda, n, params.g())?;
        for subset in all_subsets(n + 1) {
            let v = coeff_v(&x, &subset, params)?;
            let b = coeff_b(lambda, &StripMask::from_subset(&subset, n + 1)?, params)?;
            worst = worst.max((v - b).abs());
        }
    }
    Ok(worst)
}
