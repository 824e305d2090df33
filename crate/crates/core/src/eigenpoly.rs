//! Spectral polynomials `P_μ(e)` in the joint eigenvalues.
//!
//! `P_μ` is built by the recurrence
//!
//! ```text
//! P_μ = e_r P_λ − Σ ψ′_{ν/λ} P_{reduce(ν)},   λ = μ − 1^r,  r = r_μ,
//! ```
//!
//! processed in increasing `(μ_1, r_μ)`. Monomials `e_1^{k_1}⋯e_n^{k_n}` are
//! keyed by their exponent vector `k`, which is the difference vector
//! `(ν_1 − ν_2, …, ν_n)` of the partition `ν` they stand for.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::coeffs::{admissible_target, coeff_psi, norms, ModelParams};
use crate::partitions::{dominance_leq, enumerate_lattice, min_column, strips, LatticeBasis, Partition};
use crate::spectral::Spectrum;
use crate::{Error, Result};

/// Transient coefficients must cancel to this fraction of the largest one.
pub const CANCELLATION_TOL: f64 = 1e-10;

pub type MonomialKey = Vec<usize>;

/// `(ν_1 − ν_2, …, ν_{n−1} − ν_n, ν_n)`.
pub fn partition_key(nu: &Partition, n: usize) -> MonomialKey {
    let v = nu.padded(n + 1);
    (0..n).map(|j| v[j] - v[j + 1]).collect()
}

pub fn key_partition(key: &[usize]) -> Partition {
    let mut parts = vec![0; key.len()];
    let mut acc = 0;
    for j in (0..key.len()).rev() {
        acc += key[j];
        parts[j] = acc;
    }
    Partition::new(parts).expect("suffix sums are decreasing")
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPolynomial {
    pub mu: Partition,
    pub coeffs: BTreeMap<MonomialKey, f64>,
}

impl SpectralPolynomial {
    /// `u_{μ,ν}`, zero off the support.
    pub fn coefficient(&self, nu: &Partition, n: usize) -> f64 {
        self.coeffs.get(&partition_key(nu, n)).copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Support as partitions, in key order.
    pub fn support(&self) -> Vec<(Partition, f64)> {
        self.coeffs.iter().map(|(k, &u)| (key_partition(k), u)).collect()
    }
}

/// `Σ_ν u_{μ,ν} Π_j e_j^{ν_j − ν_{j+1}}`.
pub fn evaluate(poly: &SpectralPolynomial, e: &[Complex64]) -> Complex64 {
    poly.coeffs
        .iter()
        .map(|(k, &u)| {
            assert_eq!(k.len(), e.len(), "eigenvalue vector has wrong length");
            let mono: Complex64 = k.iter().zip(e).map(|(&x, ej)| ej.powu(x as u32)).product();
            mono * u
        })
        .sum()
}

/// All `P_μ`, indexed like the lattice basis.
#[derive(Clone, Debug)]
pub struct PolynomialTable {
    pub params: ModelParams,
    pub basis: LatticeBasis,
    pub polys: Vec<SpectralPolynomial>,
}

impl PolynomialTable {
    pub fn get(&self, mu: &Partition) -> Option<&SpectralPolynomial> {
        self.basis.index_of(mu).map(|i| &self.polys[i])
    }

    /// `P_μ(e)` for every `μ`, in basis order.
    pub fn evaluate_all(&self, e: &[Complex64]) -> Vec<Complex64> {
        self.polys.iter().map(|p| evaluate(p, e)).collect()
    }
}

fn axpy(target: &mut BTreeMap<MonomialKey, f64>, a: f64, src: &BTreeMap<MonomialKey, f64>) {
    for (k, &v) in src {
        *target.entry(k.clone()).or_insert(0.0) += a * v;
    }
}

/// Runs the recurrence over the whole basis.
pub fn build_polynomials(params: &ModelParams) -> Result<PolynomialTable> {
    let n = params.n();
    let m = params.m();
    let basis = enumerate_lattice(n, m)?;
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by_key(|&i| {
        let mu = basis.get(i);
        (mu.part(1), min_column(mu, n), i)
    });
    let strip_sets = (1..=n).map(|r| strips(r, n)).collect::<Result<Vec<_>>>()?;
    let mut built: Vec<Option<BTreeMap<MonomialKey, f64>>> = vec![None; basis.len()];
    for &idx in &order {
        let mu = basis.get(idx);
        if mu.is_empty() {
            built[idx] = Some(BTreeMap::from([(vec![0; n], 1.0)]));
            continue;
        }
        let r = min_column(mu, n);
        let lambda = Partition::new(mu.parts().iter().enumerate().map(|(j, &x)| if j < r { x - 1 } else { x }).collect::<Vec<_>>())?;
        let lambda_idx = basis.index_of(&lambda).expect("μ − 1^r stays in the box");
        let p_lambda = built[lambda_idx]
            .as_ref()
            .ok_or_else(|| Error::Consistency(format!("P_{lambda} needed before it was built")))?;
        let mut acc: BTreeMap<MonomialKey, f64> = p_lambda
            .iter()
            .map(|(k, &v)| {
                let mut k = k.clone();
                k[r - 1] += 1;
                (k, v)
            })
            .collect();
        for theta in &strip_sets[r - 1] {
            let Some(target) = admissible_target(&lambda, theta, params) else { continue };
            if &target == mu {
                continue;
            }
            let t_idx = basis.index_of(&target).expect("admissible targets lie in the basis");
            let p_t = built[t_idx].as_ref().ok_or_else(|| {
                Error::Consistency(format!("P_{target} needed for P_{mu} before it was built"))
            })?;
            let psi = coeff_psi(&lambda, theta, params)?;
            axpy(&mut acc, -psi, p_t);
        }
        let scale = acc.values().map(|x| x.abs()).fold(0.0, f64::max);
        let mut clean = BTreeMap::new();
        for (k, v) in acc {
            let nu = key_partition(&k);
            let inside = nu.fits_in_box(n, m) && (k.as_slice() == partition_key(mu, n).as_slice() || dominance_leq(&nu, mu, n)?);
            if inside {
                if v != 0.0 {
                    clean.insert(k, v);
                }
            } else if v.abs() > CANCELLATION_TOL * scale {
                return Err(Error::Consistency(format!(
                    "P_{mu}: coefficient {v:e} left on {nu}, outside the admissible support"
                )));
            }
        }
        built[idx] = Some(clean);
    }
    let polys = basis
        .iter()
        .map(|(i, mu)| SpectralPolynomial { mu: mu.clone(), coeffs: built[i].take().expect("every μ processed") })
        .collect();
    Ok(PolynomialTable { params: params.clone(), basis, polys })
}

/// Whether every `P_μ` is monic with strictly dominated lower terms.
pub fn triangularity_defect(table: &PolynomialTable) -> Result<Option<String>> {
    let n = table.params.n();
    for p in &table.polys {
        let lead = p.coefficient(&p.mu, n);
        if lead != 1.0 {
            return Ok(Some(format!("P_{} has leading coefficient {lead}", p.mu)));
        }
        for (nu, _) in p.support() {
            if nu != p.mu && !dominance_leq(&nu, &p.mu, n)? {
                return Ok(Some(format!("P_{} has support on {nu}, not below it", p.mu)));
            }
        }
    }
    Ok(None)
}

fn require_labels(spectrum: &Spectrum) -> Result<()> {
    if !spectrum.is_labeled() {
        return Err(Error::InvalidArgument("spectrum must be labeled".into()));
    }
    Ok(())
}

/// Values `P_μ(e_ν)`, row `ν` in spectrum order, column `μ` in basis order.
fn value_table(table: &PolynomialTable, spectrum: &Spectrum) -> Vec<Vec<Complex64>> {
    spectrum.data.iter().map(|d| table.evaluate_all(&d.eigenvalues)).collect()
}

/// `max |e_r P_λ(e_ν) − Σ ψ′_{μ/λ} P_{reduce(μ)}(e_ν)| / max |P|`.
pub fn pieri_residual(table: &PolynomialTable, spectrum: &Spectrum) -> Result<f64> {
    require_labels(spectrum)?;
    let params = &table.params;
    let n = params.n();
    let values = value_table(table, spectrum);
    let scale = values.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for r in 1..=n {
        let col_r = table.basis.index_of(&Partition::column(r)).expect("1^r lies in the box");
        let masks = strips(r, n)?;
        for (l_idx, lambda) in table.basis.iter() {
            let mut terms = Vec::new();
            for theta in &masks {
                if let Some(target) = admissible_target(lambda, theta, params) {
                    terms.push((coeff_psi(lambda, theta, params)?, table.basis.index_of(&target).unwrap()));
                }
            }
            for row in &values {
                let lhs = row[col_r] * row[l_idx];
                let rhs: Complex64 = terms.iter().map(|&(psi, t)| row[t] * psi).sum();
                worst = worst.max((lhs - rhs).norm() / scale);
            }
        }
    }
    Ok(worst)
}

/// `max_{λ,μ} |Σ_ν P_λ(e_ν) conj P_μ(e_ν) Δ̂_ν − δ_{λμ}/(c_λ²Δ_λ)| · c_λ²Δ_λ`.
pub fn dual_orthogonality_residual(table: &PolynomialTable, spectrum: &Spectrum) -> Result<f64> {
    require_labels(spectrum)?;
    let c = norms(&table.basis, &table.params)?;
    let values = value_table(table, spectrum);
    let dim = table.basis.len();
    let mut worst: f64 = 0.0;
    for l in 0..dim {
        let target = 1.0 / (c[l] * c[l] * spectrum.weights[l]);
        for mu in 0..dim {
            let gram: Complex64 = values
                .iter()
                .zip(&spectrum.data)
                .map(|(row, d)| row[l] * row[mu].conj() * d.norm_hat)
                .sum();
            let expected = if l == mu { target } else { 0.0 };
            worst = worst.max((gram - expected).norm() / target);
        }
    }
    Ok(worst)
}

/// Largest `Δ`-norm distance between `μ ↦ c_μ P_μ(e_ν)` and the computed
/// eigenvector normalized to `1` at the empty partition.
pub fn reconstruct_and_compare(table: &PolynomialTable, spectrum: &Spectrum) -> Result<f64> {
    require_labels(spectrum)?;
    let c = norms(&table.basis, &table.params)?;
    let mut worst: f64 = 0.0;
    for d in &spectrum.data {
        let p = d.normalized_eigenfunction()?;
        let vals = table.evaluate_all(&d.eigenvalues);
        let dist: f64 = vals
            .iter()
            .zip(&p)
            .zip(c.iter().zip(&spectrum.weights))
            .map(|((v, x), (ci, w))| (v * *ci - x).norm_sqr() * w)
            .sum::<f64>()
            .sqrt();
        worst = worst.max(dist);
    }
    Ok(worst)
}
