//! Model parameters and the scalar data of the lattice model.
//!
//! Every coefficient is a product of bracket ratios over pairs
//! `1 ≤ j < k ≤ n+1`, with partitions zero-padded to length `n + 1`:
//!
//! * `B_{λ+θ/λ}`: hopping amplitude of `D_r` along the strip `θ`;
//! * `ψ′_{ν/λ}`: Pieri coefficient, `ψ′ = B · c_{reduce(ν)} / c_λ`;
//! * `Δ_λ`: weight of the lattice inner product;
//! * `c_μ`: normalization of `p_μ = c_μ P_μ`.
//!
//! Under the truncation lock `α = 2π/((n+1)g + m)` all denominators stay
//! inside `(0, 2π/α)` and are therefore positive; the functions below report a
//! [`Error::TruncationViolation`] rather than return a value when that fails.

use std::f64::consts::PI;

use crate::elliptic::ThetaEvaluator;
use crate::partitions::{enumerate_lattice, reduce, strips, LatticeBasis, Partition, StripMask};
use crate::{Error, Result};

/// Denominators below this magnitude are rejected.
const DENOMINATOR_FLOOR: f64 = 1e-13;

/// Numerator arguments this close to `0` or `2π/α` are exact zeros.
const ZERO_SNAP: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ModelParams {
    n: usize,
    m: usize,
    g: f64,
    p: f64,
    detuned_alpha: Option<f64>,
    theta: ThetaEvaluator,
}

impl ModelParams {
    /// Parameters on the truncation lock `α = 2π/((n+1)g + m)`.
    pub fn new(n: usize, m: usize, g: f64, p: f64) -> Result<Self> {
        Self::validate(n, m, g, p)?;
        let alpha = locked_alpha(n, m, g);
        let theta = ThetaEvaluator::new(alpha, p)?;
        Ok(ModelParams { n, m, g, p, detuned_alpha: None, theta })
    }

    /// Parameters with an explicit `α` that need not satisfy the lock.
    ///
    /// Only useful for demonstrating that the structural checks fail off the
    /// truncation regime.
    pub fn detuned(n: usize, m: usize, g: f64, p: f64, alpha: f64) -> Result<Self> {
        Self::validate(n, m, g, p)?;
        let theta = ThetaEvaluator::new(alpha, p)?;
        Ok(ModelParams { n, m, g, p, detuned_alpha: Some(alpha), theta })
    }

    fn validate(n: usize, m: usize, g: f64, p: f64) -> Result<()> {
        if n < 1 || m < 1 {
            return Err(Error::InvalidParameter(format!(
                "n and m must be >= 1, got n = {n}, m = {m}"
            )));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidParameter(format!("g must be > 0, got {g}")));
        }
        if !(p.is_finite() && p.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (-1, 1), got {p}")));
        }
        Ok(())
    }

    /// Same `(n, m, g)` at a different nome.
    pub fn with_nome(&self, p: f64) -> Result<Self> {
        match self.detuned_alpha {
            None => Self::new(self.n, self.m, self.g, p),
            Some(a) => Self::detuned(self.n, self.m, self.g, p, a),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.theta.alpha()
    }

    pub fn is_locked(&self) -> bool {
        self.detuned_alpha.is_none()
    }

    /// Positivity of the weights is established for `0 ≤ p < 1`; negative
    /// nomes are computed but flagged.
    pub fn in_proven_regime(&self) -> bool {
        self.is_locked() && self.p >= 0.0
    }

    pub fn theta(&self) -> &ThetaEvaluator {
        &self.theta
    }

    pub fn bracket(&self, z: f64) -> f64 {
        self.theta.bracket(z)
    }

    /// `q = e^{iα}`.
    pub fn q(&self) -> num_complex::Complex64 {
        num_complex::Complex64::from_polar(1.0, self.alpha())
    }

    /// `t = q^g`.
    pub fn t(&self) -> num_complex::Complex64 {
        num_complex::Complex64::from_polar(1.0, self.alpha() * self.g)
    }

    fn numerator(&self, z: f64) -> f64 {
        if self.theta.is_zero_of_bracket(z, ZERO_SNAP) {
            0.0
        } else {
            self.theta.bracket(z)
        }
    }

    fn denominator(&self, z: f64, what: &str) -> Result<f64> {
        let d = self.theta.bracket(z);
        if d.abs() < DENOMINATOR_FLOOR {
            return Err(Error::TruncationViolation(format!(
                "{what}: vanishing denominator [{z}] = {d:e}"
            )));
        }
        Ok(d)
    }
}

pub fn locked_alpha(n: usize, m: usize, g: f64) -> f64 {
    2.0 * PI / ((n + 1) as f64 * g + m as f64)
}

fn padded_i64(lambda: &Partition, len: usize) -> Result<Vec<i64>> {
    if lambda.len() > len {
        return Err(Error::InvalidArgument(format!(
            "{lambda} has more than {len} parts"
        )));
    }
    Ok(lambda.padded(len).into_iter().map(|x| x as i64).collect())
}

fn check_mask(theta: &StripMask, params: &ModelParams) -> Result<()> {
    if theta.len() != params.n + 1 {
        return Err(Error::InvalidArgument(format!(
            "strip {theta} has length {} but n + 1 = {}",
            theta.len(),
            params.n + 1
        )));
    }
    Ok(())
}

/// Hopping coefficient `B_{λ+θ/λ}`.
///
/// Defined for every mask; it vanishes when `λ + θ` is not a partition or
/// when `reduce(λ + θ)` leaves the box.
pub fn coeff_b(lambda: &Partition, theta: &StripMask, params: &ModelParams) -> Result<f64> {
    check_mask(theta, params)?;
    let np1 = params.n + 1;
    let lam = padded_i64(lambda, np1)?;
    let g = params.g;
    let mut value = 1.0;
    for j in 1..=np1 {
        for k in j + 1..=np1 {
            let dl = (lam[j - 1] - lam[k - 1]) as f64;
            let gap = (k - j) as f64;
            let dt = (theta.get(j) - theta.get(k)) as f64;
            if dt == 0.0 {
                continue;
            }
            value *= params.numerator(dl + g * (gap + dt));
            value /= params.denominator(dl + g * gap, "B")?;
        }
    }
    Ok(value)
}

/// Pieri coefficient `ψ′_{ν/λ}` with `ν = λ + θ`.
pub fn coeff_psi(lambda: &Partition, theta: &StripMask, params: &ModelParams) -> Result<f64> {
    check_mask(theta, params)?;
    let np1 = params.n + 1;
    let lam = padded_i64(lambda, np1)?;
    let nu: Vec<i64> = lam.iter().zip(theta.bits()).map(|(&l, &t)| l + t as i64).collect();
    let g = params.g;
    let mut value = 1.0;
    for j in 1..=np1 {
        for k in j + 1..=np1 {
            if theta.get(j) - theta.get(k) != -1 {
                continue;
            }
            let gap = (k - j) as f64;
            let dn = (nu[j - 1] - nu[k - 1]) as f64;
            let dl = (lam[j - 1] - lam[k - 1]) as f64;
            value *= params.numerator(dn + g * (gap + 1.0));
            value /= params.denominator(dn + g * gap, "psi")?;
            value *= params.numerator(dl + g * (gap - 1.0));
            value /= params.denominator(dl + g * gap, "psi")?;
        }
    }
    Ok(value)
}

/// Elliptic weight `Δ_λ`; strictly positive on the truncation lock.
pub fn weight_delta(lambda: &Partition, params: &ModelParams) -> Result<f64> {
    let np1 = params.n + 1;
    let lam = padded_i64(lambda, np1)?;
    let g = params.g;
    let th = params.theta();
    let mut value = 1.0;
    for j in 1..=np1 {
        for k in j + 1..=np1 {
            let d = lam[j - 1] - lam[k - 1];
            let gap = (k - j) as f64;
            value *= th.bracket(d as f64 + gap * g);
            value /= params.denominator(gap * g, "Delta")?;
            value *= th.bracket_factorial((gap + 1.0) * g, d)?;
            let den = th.bracket_factorial(1.0 + (gap - 1.0) * g, d)?;
            if den.abs() < DENOMINATOR_FLOOR {
                return Err(Error::TruncationViolation(format!(
                    "Delta: vanishing factorial denominator for {lambda}"
                )));
            }
            value /= den;
        }
    }
    if !(value > 0.0) {
        return Err(Error::TruncationViolation(format!(
            "Delta_{lambda} = {value:e} is not positive"
        )));
    }
    Ok(value)
}

/// Normalization `c_μ = Π [(k−j)g]_{μ_j−μ_k} / [(k−j+1)g]_{μ_j−μ_k}`.
pub fn norm_c(mu: &Partition, params: &ModelParams) -> Result<f64> {
    let np1 = params.n + 1;
    let lam = padded_i64(mu, np1)?;
    let g = params.g;
    let th = params.theta();
    let mut value = 1.0;
    for j in 1..=np1 {
        for k in j + 1..=np1 {
            let d = lam[j - 1] - lam[k - 1];
            let gap = (k - j) as f64;
            value *= th.bracket_factorial(gap * g, d)?;
            let den = th.bracket_factorial((gap + 1.0) * g, d)?;
            if den.abs() < DENOMINATOR_FLOOR {
                return Err(Error::TruncationViolation(format!(
                    "c: vanishing factorial denominator for {mu}"
                )));
            }
            value /= den;
        }
    }
    if !(value > 0.0) {
        return Err(Error::TruncationViolation(format!("c_{mu} = {value:e} is not positive")));
    }
    Ok(value)
}

/// `Δ_λ` for every basis element, in basis order.
pub fn weights(basis: &LatticeBasis, params: &ModelParams) -> Result<Vec<f64>> {
    basis.partitions().iter().map(|l| weight_delta(l, params)).collect()
}

/// `c_μ` for every basis element, in basis order.
pub fn norms(basis: &LatticeBasis, params: &ModelParams) -> Result<Vec<f64>> {
    basis.partitions().iter().map(|l| norm_c(l, params)).collect()
}

/// `reduce(λ + θ)` when `λ + θ` is a partition whose reduction lies in the box.
pub fn admissible_target(lambda: &Partition, theta: &StripMask, params: &ModelParams) -> Option<Partition> {
    let sum = crate::partitions::add_strip(lambda, theta).ok()?;
    let mu = sum.partition()?;
    let red = reduce(&mu, params.n).ok()?;
    red.fits_in_box(params.n, params.m).then_some(red)
}

/// Outcome of the exhaustive truncation scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dichotomy {
    /// Smallest `B` over moves whose reduced target stays in the box.
    pub min_inside: f64,
    /// Largest `|B|` over moves that leave the box.
    pub max_outside: f64,
}

/// Scans every `λ ∈ Λ^{(n,m)}` and every strip of size `1..=n+1`.
pub fn truncation_dichotomy(params: &ModelParams) -> Result<Dichotomy> {
    let n = params.n;
    let basis = enumerate_lattice(n, params.m)?;
    let mut out = Dichotomy { min_inside: f64::INFINITY, max_outside: 0.0 };
    for lam in basis.partitions() {
        for r in 1..=n + 1 {
            for theta in strips(r, n)? {
                let b = coeff_b(lam, &theta, params)?;
                if admissible_target(lam, &theta, params).is_some() {
                    out.min_inside = out.min_inside.min(b);
                } else {
                    out.max_outside = out.max_outside.max(b.abs());
                }
            }
        }
    }
    Ok(out)
}

/// Largest relative defect of `B_{ν/λ} Δ_λ = B_{λ'/ν̲} Δ_{ν̲}`, where the
/// reverse move uses the complementary strip.
pub fn recurrence_residual(params: &ModelParams) -> Result<f64> {
    let n = params.n;
    let basis = enumerate_lattice(n, params.m)?;
    let mut worst: f64 = 0.0;
    for lam in basis.partitions() {
        let w = weight_delta(lam, params)?;
        for r in 1..=n {
            for theta in strips(r, n)? {
                let Some(red) = admissible_target(lam, &theta, params) else { continue };
                let comp = theta.complement().expect("strips of size ≤ n have complements");
                let lhs = coeff_b(lam, &theta, params)? * w;
                let rhs = coeff_b(&red, &comp, params)? * weight_delta(&red, params)?;
                let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
                worst = worst.max((lhs - rhs).abs() / scale);
            }
        }
    }
    Ok(worst)
}

/// Largest defect of `ψ′_{ν/λ} = B_{ν/λ} c_{ν̲} / c_λ`, relative to `max(|ψ′|, 1)`.
pub fn psi_consistency_residual(params: &ModelParams) -> Result<f64> {
    let n = params.n;
    let basis = enumerate_lattice(n, params.m)?;
    let mut worst: f64 = 0.0;
    for lam in basis.partitions() {
        let c_lam = norm_c(lam, params)?;
        for r in 1..=n {
            for theta in strips(r, n)? {
                let Some(red) = admissible_target(lam, &theta, params) else { continue };
                let psi = coeff_psi(lam, &theta, params)?;
                let via_c = coeff_b(lam, &theta, params)? * norm_c(&red, params)? / c_lam;
                worst = worst.max((psi - via_c).abs() / psi.abs().max(1.0));
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::add_strip;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn mask(v: &[u8]) -> StripMask {
        StripMask::new(v.to_vec()).unwrap()
    }

    #[test]
    fn alpha_lock() {
        let params = ModelParams::new(3, 2, 0.6, 0.5).unwrap();
        assert!((params.alpha() * (4.0 * 0.6 + 2.0) - 2.0 * PI).abs() < 1e-15);
        assert!(ModelParams::new(0, 2, 1.0, 0.0).is_err());
        assert!(ModelParams::new(2, 2, 0.0, 0.0).is_err());
        assert!(ModelParams::new(2, 2, 1.0, 1.0).is_err());
        assert!(ModelParams::new(2, 2, 1.0, 0.995).is_err());
    }

    #[test]
    fn b_examples() {
        let params = ModelParams::new(2, 2, 0.7, 0.4).unwrap();
        assert!((coeff_b(&p(&[]), &mask(&[1, 1, 1]), &params).unwrap() - 1.0).abs() < 1e-15);

        let params = ModelParams::new(1, 1, 1.0, 0.0).unwrap();
        let b = coeff_b(&p(&[]), &mask(&[1, 0]), &params).unwrap();
        assert!((b - 1.0).abs() < 1e-14);
        for &pp in &[0.0, 0.3, 0.9, -0.5] {
            let params = ModelParams::new(1, 1, 1.0, pp).unwrap();
            assert_eq!(coeff_b(&p(&[1]), &mask(&[1, 0]), &params).unwrap(), 0.0);
        }
    }

    #[test]
    fn psi_examples() {
        let params = ModelParams::new(3, 2, 0.8, 0.6).unwrap();
        for lam in enumerate_lattice(3, 2).unwrap().partitions() {
            assert!((coeff_psi(lam, &mask(&[1, 1, 1, 1]), &params).unwrap() - 1.0).abs() < 1e-14);
        }
        // prefix masks 1^r on a partition whose first r parts are equal
        let lam = p(&[1, 1]);
        let v = coeff_psi(&lam, &mask(&[1, 1, 0, 0]), &params).unwrap();
        assert!((v - 1.0).abs() < 1e-13, "{v}");
        for &pp in &[0.0, 0.6] {
            let params = ModelParams::new(1, 1, 1.0, pp).unwrap();
            let v = coeff_psi(&p(&[1]), &mask(&[0, 1]), &params).unwrap();
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn delta_examples() {
        let params = ModelParams::new(2, 2, 0.7, 0.5).unwrap();
        assert!((weight_delta(&p(&[]), &params).unwrap() - 1.0).abs() < 1e-15);
        for lam in enumerate_lattice(2, 2).unwrap().partitions() {
            assert!(weight_delta(lam, &params).unwrap() > 0.0);
        }
        let params = ModelParams::new(1, 1, 1.0, 0.0).unwrap();
        assert!((weight_delta(&p(&[1]), &params).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn c_examples() {
        let params = ModelParams::new(2, 2, 0.7, 0.5).unwrap();
        assert!((norm_c(&p(&[]), &params).unwrap() - 1.0).abs() < 1e-15);
        let params = ModelParams::new(1, 1, 1.0, 0.0).unwrap();
        assert!((norm_c(&p(&[1]), &params).unwrap() - 1.0).abs() < 1e-14);
        // At alpha = 2π/3 the bracket is symmetric under z ↦ 3 − z for every
        // nome, so [1;p] = [2;p] and c_(1) stays 1.
        let params = ModelParams::new(1, 1, 1.0, 0.5).unwrap();
        let th = params.theta();
        let expected = th.bracket(1.0) / th.bracket(2.0);
        let c = norm_c(&p(&[1]), &params).unwrap();
        assert!((c - expected).abs() < 1e-14);
        assert!((c - 1.0).abs() < 1e-13);
        // Away from that symmetry c genuinely depends on p.
        let a = norm_c(&p(&[1]), &ModelParams::new(2, 2, 0.7, 0.0).unwrap()).unwrap();
        let b = norm_c(&p(&[1]), &ModelParams::new(2, 2, 0.7, 0.5).unwrap()).unwrap();
        assert!((a - b).abs() > 1e-6);
    }

    fn grid() -> Vec<ModelParams> {
        let mut out = Vec::new();
        for &(n, m) in &[(2, 2), (3, 2), (2, 3)] {
            for &g in &[0.5, 1.0, 1.7] {
                for &pp in &[0.0, 0.3, 0.7] {
                    out.push(ModelParams::new(n, m, g, pp).unwrap());
                }
            }
        }
        out.push(ModelParams::new(3, 2, 0.6, 0.5).unwrap());
        out
    }

    #[test]
    fn truncation_dichotomy_exhaustive() {
        for params in grid() {
            let (n, m) = (params.n(), params.m());
            let basis = enumerate_lattice(n, m).unwrap();
            for lam in basis.partitions() {
                for r in 1..=n + 1 {
                    for theta in strips(r, n).unwrap() {
                        let b = coeff_b(lam, &theta, &params).unwrap();
                        let sum = add_strip(lam, &theta).unwrap();
                        match sum.reduced() {
                            Some(red) if red.fits_in_box(n, m) => assert!(b > 1e-10, "{lam} {theta} {b}"),
                            _ => assert!(b.abs() < 1e-12, "{lam} {theta} {b}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weight_recurrence_and_psi_consistency() {
        for params in grid() {
            let n = params.n();
            let basis = enumerate_lattice(n, params.m()).unwrap();
            for lam in basis.partitions() {
                for r in 1..=n {
                    for theta in strips(r, n).unwrap() {
                        let Some(red) = admissible_target(lam, &theta, &params) else { continue };
                        let lhs = coeff_b(lam, &theta, &params).unwrap() * weight_delta(lam, &params).unwrap();
                        let comp = theta.complement().unwrap();
                        let rhs = coeff_b(&red, &comp, &params).unwrap() * weight_delta(&red, &params).unwrap();
                        assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(rhs.abs()), "{lam} {theta}");

                        let psi = coeff_psi(lam, &theta, &params).unwrap();
                        let via_c = coeff_b(lam, &theta, &params).unwrap() * norm_c(&red, &params).unwrap()
                            / norm_c(lam, &params).unwrap();
                        assert!((psi - via_c).abs() <= 1e-12 * psi.abs().max(1.0), "{lam} {theta}");
                    }
                }
            }
        }
    }

    #[test]
    fn scan_functions_agree_with_exhaustive_loops() {
        for params in grid() {
            let d = truncation_dichotomy(&params).unwrap();
            assert!(d.min_inside > 1e-10 && d.max_outside < 1e-12, "{d:?}");
            assert!(recurrence_residual(&params).unwrap() < 1e-11);
            assert!(psi_consistency_residual(&params).unwrap() < 1e-12);
        }
    }

    #[test]
    fn detuned_alpha_breaks_truncation() {
        let params = ModelParams::detuned(1, 1, 1.0, 0.3, 2.0 * PI / 3.2).unwrap();
        let b = coeff_b(&p(&[1]), &mask(&[1, 0]), &params).unwrap();
        assert!(b.abs() > 1e-6);
        assert!(!params.in_proven_regime());
    }

    #[test]
    fn bad_mask_length() {
        let params = ModelParams::new(2, 2, 1.0, 0.0).unwrap();
        assert!(coeff_b(&p(&[]), &mask(&[1, 0]), &params).is_err());
    }
}
