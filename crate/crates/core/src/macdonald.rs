//! Macdonald polynomials in `n + 1` variables and the closed-form `p = 0`
//! spectrum.
//!
//! This module is an oracle for the trigonometric point: it works on the
//! symmetric-polynomial side and never touches the lattice operator
//! matrices. `P_μ(z; q, t)` is obtained as the monic eigenvector of a
//! Macdonald q-difference operator in the monomial basis `m_λ`, solved
//! top-down along the dominance order. The operator action is computed
//! exactly as polynomial arithmetic through
//!
//! ```text
//! D_r f = a_δ^{-1} Σ_{|I| = r} (T_{t,I} a_δ)(T_{q,I} f),
//! ```
//!
//! with `a_δ` the Vandermonde product and `T_{u,I}` scaling the variables in `I`
//! by `u`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::coeffs::{norm_c, ModelParams};
use crate::partitions::{classical_dominance_leq, Partition};
use crate::spectral::Spectrum;
use crate::{Error, Result};

/// Eigenvalue denominators below this magnitude are treated as collisions.
pub const COLLISION_FLOOR: f64 = 1e-10;

type Exponent = Vec<u32>;

/// Sparse polynomial in a fixed number of variables.
#[derive(Clone, Debug, Default, PartialEq)]
struct Poly {
    vars: usize,
    terms: BTreeMap<Exponent, Complex64>,
}

impl Poly {
    fn zero(vars: usize) -> Self {
        Poly { vars, terms: BTreeMap::new() }
    }

    fn add_term(&mut self, e: Exponent, c: Complex64) {
        let slot = self.terms.entry(e).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.vars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e: Exponent = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out.terms.retain(|_, c| c.norm() != 0.0);
        out
    }

    fn add_assign(&mut self, other: &Poly) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), *c);
        }
    }

    /// `f(z) ↦ f(z')` with `z'_i = u z_i` for `i ∈ subset`.
    fn scale_vars(&self, subset: &[usize], u: Complex64) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let k: u32 = subset.iter().map(|&i| e[i]).sum();
                (e.clone(), c * u.powu(k))
            })
            .collect();
        Poly { vars: self.vars, terms }
    }

    fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Exact quotient by `z_i − z_j`; the remainder must vanish.
    fn divide_by_difference(&self, i: usize, j: usize) -> Result<Poly> {
        let mut by_power: BTreeMap<u32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let k = rest[i];
            rest[i] = 0;
            by_power.entry(k).or_insert_with(|| Poly::zero(self.vars)).add_term(rest, *c);
        }
        let top = by_power.keys().next_back().copied().unwrap_or(0);
        let shift_j = |p: &Poly| {
            let terms = p
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e[j] += 1;
                    (e, *c)
                })
                .collect();
            Poly { vars: p.vars, terms }
        };
        // Q_{k-1} = f_k + z_j Q_k, remainder f_0 + z_j Q_0.
        let mut quotient = Poly::zero(self.vars);
        let mut carry = Poly::zero(self.vars);
        for k in (1..=top).rev() {
            let mut next = shift_j(&carry);
            if let Some(fk) = by_power.get(&k) {
                next.add_assign(fk);
            }
            for (e, c) in &next.terms {
                let mut e = e.clone();
                e[i] += k - 1;
                quotient.add_term(e, *c);
            }
            carry = next;
        }
        let mut rem = shift_j(&carry);
        if let Some(f0) = by_power.get(&0) {
            rem.add_assign(f0);
        }
        let scale = self.max_abs().max(1.0);
        if rem.max_abs() > 1e-9 * scale {
            return Err(Error::Consistency(format!(
                "polynomial not divisible by z_{} - z_{} (remainder {:e})",
                i + 1,
                j + 1,
                rem.max_abs()
            )));
        }
        Ok(quotient)
    }

    fn coefficient(&self, e: &[u32]) -> Complex64 {
        self.terms.get(e).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }
}

fn vandermonde(vars: usize) -> Poly {
    let mut out = Poly::zero(vars);
    out.add_term(vec![0; vars], Complex64::new(1.0, 0.0));
    for i in 0..vars {
        for j in i + 1..vars {
            let mut f = Poly::zero(vars);
            let mut ei = vec![0; vars];
            ei[i] = 1;
            let mut ej = vec![0; vars];
            ej[j] = 1;
            f.add_term(ei, Complex64::new(1.0, 0.0));
            f.add_term(ej, Complex64::new(-1.0, 0.0));
            out = out.mul(&f);
        }
    }
    out
}

/// Distinct rearrangements of `parts` (padded to `vars`).
fn distinct_permutations(parts: &[usize], vars: usize) -> Vec<Exponent> {
    let mut v: Vec<u32> = parts.iter().map(|&x| x as u32).collect();
    v.resize(vars, 0);
    v.sort_unstable();
    let mut out = vec![v.clone()];
    // lexicographic next-permutation over the sorted multiset
    while let Some(i) = (0..v.len().saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) {
        let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
        v.swap(i, j);
        v[i + 1..].reverse();
        out.push(v.clone());
    }
    out
}

fn monomial(lambda: &Partition, vars: usize) -> Poly {
    let mut out = Poly::zero(vars);
    for e in distinct_permutations(lambda.parts(), vars) {
        out.add_term(e, Complex64::new(1.0, 0.0));
    }
    out
}

fn subsets(vars: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, vars: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..vars {
            cur.push(i);
            rec(i + 1, vars, r, cur, out);
            cur.pop();
        }
    }
    rec(0, vars, r, &mut cur, &mut out);
    out
}

/// All partitions of `d` with at most `len` parts, lexicographically decreasing.
fn partitions_of(d: usize, len: usize) -> Vec<Partition> {
    fn rec(left: usize, max: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if left == 0 {
            out.push(Partition::new(cur.clone()).unwrap());
            return;
        }
        if slots == 0 {
            return;
        }
        for x in (1..=max.min(left)).rev() {
            cur.push(x);
            rec(left - x, x, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, len, &mut Vec::new(), &mut out);
    out
}

/// Symmetric polynomial in the monomial basis of `vars` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricPoly {
    pub vars: usize,
    pub coeffs: BTreeMap<Partition, Complex64>,
}

impl SymmetricPoly {
    /// Evaluation at an arbitrary point.
    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.vars);
        self.coeffs
            .iter()
            .map(|(lam, c)| {
                let m: Complex64 = distinct_permutations(lam.parts(), self.vars)
                    .iter()
                    .map(|e| e.iter().zip(z).map(|(&k, x)| x.powu(k)).product::<Complex64>())
                    .sum();
                c * m
            })
            .sum()
    }

    /// Evaluation at `z_i = e^{iα s_i}`, computing the phase of each monomial
    /// from its exponent so that no powers of unimodular numbers accumulate.
    pub fn evaluate_on_circle(&self, alpha: f64, s: &[f64]) -> Complex64 {
        assert_eq!(s.len(), self.vars);
        self.coeffs
            .iter()
            .map(|(lam, c)| {
                let m: Complex64 = distinct_permutations(lam.parts(), self.vars)
                    .iter()
                    .map(|e| {
                        let phase: f64 = e.iter().zip(s).map(|(&k, x)| k as f64 * x).sum();
                        Complex64::from_polar(1.0, alpha * phase)
                    })
                    .sum();
                c * m
            })
            .sum()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|l| l.weight()).max().unwrap_or(0)
    }
}

/// Matrix of `D_r` restricted to degree-`d` symmetric polynomials, as
/// `row κ ↦ (column ρ ↦ coefficient of m_ρ in D_r m_κ)`.
struct OperatorTable {
    basis: Vec<Partition>,
    rows: Vec<Vec<Complex64>>,
}

fn operator_table(d: usize, vars: usize, r: usize, q: Complex64, t: Complex64) -> Result<OperatorTable> {
    let basis = partitions_of(d, vars);
    let a_delta = vandermonde(vars);
    let subsets = subsets(vars, r);
    let shifted_vandermonde: Vec<Poly> = subsets.iter().map(|s| a_delta.scale_vars(s, t)).collect();
    let mut rows = Vec::with_capacity(basis.len());
    for kappa in &basis {
        let m = monomial(kappa, vars);
        let mut numer = Poly::zero(vars);
        for (s, tv) in subsets.iter().zip(&shifted_vandermonde) {
            numer.add_assign(&tv.mul(&m.scale_vars(s, q)));
        }
        let mut quotient = numer;
        for i in 0..vars {
            for j in i + 1..vars {
                quotient = quotient.divide_by_difference(i, j)?;
            }
        }
        let row = basis
            .iter()
            .map(|rho| {
                let mut e: Exponent = rho.parts().iter().map(|&x| x as u32).collect();
                e.resize(vars, 0);
                quotient.coefficient(&e)
            })
            .collect();
        rows.push(row);
    }
    Ok(OperatorTable { basis, rows })
}

fn elementary(x: &[Complex64], r: usize) -> Complex64 {
    // e_0..e_r by the standard recurrence
    let mut e = vec![Complex64::new(0.0, 0.0); r + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for xi in x {
        for k in (1..=r).rev() {
            e[k] = e[k] + e[k - 1] * xi;
        }
    }
    e[r]
}

/// `q^{ρ_i} t^{N−i}` for `i = 1..N`.
fn spectral_point(rho: &Partition, vars: usize, q: Complex64, t: Complex64) -> Vec<Complex64> {
    (1..=vars)
        .map(|i| q.powu(rho.part(i) as u32) * t.powu((vars - i) as u32))
        .collect()
}

/// Fixed weights of the fallback operator `Σ_r w_r D_r` for when the
/// eigenvalues of `D_1` collide.
const FALLBACK_WEIGHTS: [(f64, f64); 3] = [(1.0, 0.0), (0.618_033_988_7, 0.271_828_182_8), (0.141_421_356_2, -0.314_159_265_3)];

/// Monic (in `m_μ`) Macdonald polynomial `P_μ(z; q, t)` in `vars` variables.
pub fn macdonald_coeffs(mu: &Partition, q: Complex64, t: Complex64, vars: usize) -> Result<SymmetricPoly> {
    if mu.len() > vars {
        return Err(Error::InvalidArgument(format!("{mu} has more than {vars} parts")));
    }
    match solve_triangular(mu, q, t, vars, 1) {
        Err(Error::DegenerateSpecialization(first)) => {
            let ops = FALLBACK_WEIGHTS.len().min(vars);
            solve_triangular(mu, q, t, vars, ops).map_err(|e| match e {
                Error::DegenerateSpecialization(second) => {
                    Error::DegenerateSpecialization(format!("{first}; with combined operator: {second}"))
                }
                other => other,
            })
        }
        other => other,
    }
}

fn solve_triangular(mu: &Partition, q: Complex64, t: Complex64, vars: usize, ops: usize) -> Result<SymmetricPoly> {
    let d = mu.weight();
    let tables = (1..=ops)
        .map(|r| operator_table(d, vars, r, q, t))
        .collect::<Result<Vec<_>>>()?;
    let basis = &tables[0].basis;
    let size = basis.len();
    let weight = |r: usize| {
        let (re, im) = FALLBACK_WEIGHTS[r];
        Complex64::new(re, im)
    };
    let entry = |row: usize, col: usize| -> Complex64 {
        tables.iter().enumerate().map(|(r, tb)| weight(r) * tb.rows[row][col]).sum()
    };
    let eigen = |rho: &Partition| -> Complex64 {
        let x = spectral_point(rho, vars, q, t);
        (0..ops).map(|r| weight(r) * elementary(&x, r + 1)).sum()
    };
    let top = basis.iter().position(|b| b == mu).expect("mu is a partition of its weight");
    let e_mu = eigen(mu);
    let mut c = vec![Complex64::new(0.0, 0.0); size];
    c[top] = Complex64::new(1.0, 0.0);
    // basis is lexicographically decreasing, a linear extension of dominance
    for idx in top + 1..size {
        let rho = &basis[idx];
        if !classical_dominance_leq(rho, mu) {
            continue;
        }
        let rhs: Complex64 = (top..idx).map(|k| c[k] * entry(k, idx)).sum();
        let denom = e_mu - eigen(rho);
        if denom.norm() < COLLISION_FLOOR {
            if rhs.norm() < COLLISION_FLOOR {
                continue;
            }
            return Err(Error::DegenerateSpecialization(format!(
                "eigenvalues of {mu} and {rho} collide (|ΔE| = {:e})",
                denom.norm()
            )));
        }
        c[idx] = rhs / denom;
    }
    let coeffs = basis
        .iter()
        .zip(c)
        .filter(|(_, v)| v.norm() != 0.0)
        .map(|(b, v)| (b.clone(), v))
        .collect();
    Ok(SymmetricPoly { vars, coeffs })
}

/// Exponents `(ν_1 + ng, ν_2 + (n−1)g, …, ν_n + g, 0)` of the staircase point.
pub fn staircase(nu: &Partition, n: usize, g: f64) -> Vec<f64> {
    (1..=n + 1)
        .map(|i| nu.part(i) as f64 + (n + 1 - i) as f64 * g)
        .collect()
}

fn centering(nu: &Partition, n: usize, g: f64) -> f64 {
    nu.weight() as f64 / (n + 1) as f64 + n as f64 * g / 2.0
}

/// Closed-form joint eigenvalue `e_{r,ν}` at `p = 0`.
pub fn trig_joint_eigenvalue(nu: &Partition, r: usize, params: &ModelParams) -> Result<Complex64> {
    let n = params.n();
    if r < 1 || r > n {
        return Err(Error::InvalidArgument(format!("eigenvalue index {r} outside 1..={n}")));
    }
    if !nu.fits_in_box(n, params.m()) {
        return Err(Error::InvalidArgument(format!("{nu} is not in the lattice")));
    }
    let alpha = params.alpha();
    let s = staircase(nu, n, params.g());
    let x: Vec<Complex64> = s.iter().map(|&y| Complex64::from_polar(1.0, alpha * y)).collect();
    let prefactor = Complex64::from_polar(1.0, -alpha * r as f64 * centering(nu, n, params.g()));
    Ok(prefactor * elementary(&x, r))
}

pub fn trig_joint_eigenvalues(nu: &Partition, params: &ModelParams) -> Result<Vec<Complex64>> {
    (1..=params.n()).map(|r| trig_joint_eigenvalue(nu, r, params)).collect()
}

/// `P_μ(·; q, q^g)` in `n + 1` variables for the truncation-locked `q`.
pub fn lattice_macdonald(mu: &Partition, params: &ModelParams) -> Result<SymmetricPoly> {
    macdonald_coeffs(mu, params.q(), params.t(), params.n() + 1)
}

/// `c_μ q^{−|μ|(|ν|/(n+1) + ng/2)} P_μ(q^{ν_1+ng}, …, q^{ν_n+g}, 1; q, q^g)`.
pub fn principal_eigenfunction_value(mu: &Partition, nu: &Partition, params: &ModelParams) -> Result<Complex64> {
    let poly = lattice_macdonald(mu, params)?;
    principal_value_with(&poly, mu, nu, params)
}

fn principal_value_with(poly: &SymmetricPoly, mu: &Partition, nu: &Partition, params: &ModelParams) -> Result<Complex64> {
    let n = params.n();
    let trig = params.with_nome(0.0)?;
    let c = norm_c(mu, &trig)?;
    let alpha = params.alpha();
    let s = staircase(nu, n, params.g());
    let prefactor = Complex64::from_polar(1.0, -alpha * mu.weight() as f64 * centering(nu, n, params.g()));
    Ok(prefactor * poly.evaluate_on_circle(alpha, &s) * c)
}

/// Residuals of the `p = 0` comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigComparison {
    pub eigenvalue_residual: f64,
    pub eigenvector_residual: f64,
}

/// Compares a labeled lattice spectrum at `p = 0` with the closed form
/// eigenvalues and the principally specialized Macdonald polynomials.
pub fn compare_trig(spectrum: &Spectrum) -> Result<TrigComparison> {
    let params = &spectrum.params;
    if params.p() != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "trigonometric comparison needs p = 0, got {}",
            params.p()
        )));
    }
    let basis = &spectrum.basis;
    let mut seen = vec![false; basis.len()];
    for d in &spectrum.data {
        let label = d
            .label
            .as_ref()
            .ok_or_else(|| Error::Comparison("spectrum is not labeled".into()))?;
        let idx = basis
            .index_of(label)
            .ok_or_else(|| Error::Comparison(format!("label {label} outside the lattice")))?;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::Comparison(format!(
                "label {label} used twice; labels: {:?}",
                spectrum.data.iter().map(|d| d.label.as_ref().map(|l| l.to_string())).collect::<Vec<_>>()
            )));
        }
    }
    let polys = basis
        .partitions()
        .iter()
        .map(|mu| lattice_macdonald(mu, params))
        .collect::<Result<Vec<_>>>()?;
    let mut ev_res: f64 = 0.0;
    let mut vec_res: f64 = 0.0;
    for d in &spectrum.data {
        let nu = d.label.as_ref().expect("checked above");
        let closed = trig_joint_eigenvalues(nu, params)?;
        for (a, b) in d.eigenvalues.iter().zip(&closed) {
            ev_res = ev_res.max((a - b).norm());
        }
        let p = d.normalized_eigenfunction()?;
        for (mu_idx, mu) in basis.iter() {
            let oracle = principal_value_with(&polys[mu_idx], mu, nu, params)?;
            vec_res = vec_res.max((p[mu_idx] - oracle).norm());
        }
    }
    Ok(TrigComparison { eigenvalue_residual: ev_res, eigenvector_residual: vec_res })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// `D_1 f(z) = Σ_i Π_{j≠i} (t z_i − z_j)/(z_i − z_j) f(…, q z_i, …)`
    /// evaluated pointwise.
    fn apply_d1_pointwise(f: &SymmetricPoly, z: &[Complex64], q: Complex64, t: Complex64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..z.len() {
            let mut coef = c(1.0);
            for j in 0..z.len() {
                if j != i {
                    coef *= (t * z[i] - z[j]) / (z[i] - z[j]);
                }
            }
            let mut zs = z.to_vec();
            zs[i] *= q;
            total += coef * f.evaluate(&zs);
        }
        total
    }

    #[test]
    fn vandermonde_division_roundtrip() {
        let a = vandermonde(3);
        assert_eq!(a.terms.len(), 6);
        let q = a.divide_by_difference(0, 1).unwrap().divide_by_difference(0, 2).unwrap();
        let q = q.divide_by_difference(1, 2).unwrap();
        assert_eq!(q.terms.len(), 1);
        assert!((q.coefficient(&[0, 0, 0]) - c(1.0)).norm() < 1e-15);
        assert!(monomial(&p(&[2]), 2).divide_by_difference(0, 1).is_err());
    }

    #[test]
    fn permutations_and_partitions() {
        assert_eq!(distinct_permutations(&[2, 1], 3).len(), 6);
        assert_eq!(distinct_permutations(&[1, 1], 3).len(), 3);
        assert_eq!(partitions_of(4, 4).len(), 5);
        assert_eq!(partitions_of(4, 2).len(), 3);
        assert_eq!(partitions_of(6, 4).len(), 9);
    }

    #[test]
    fn first_degree_and_columns() {
        let (q, t) = (c(0.3), c(0.5));
        let p1 = macdonald_coeffs(&p(&[1]), q, t, 3).unwrap();
        assert_eq!(p1.coeffs.len(), 1);
        assert_eq!(p1.coeffs[&p(&[1])], c(1.0));
        for k in 1..=3 {
            let pk = macdonald_coeffs(&Partition::column(k), q, t, 3).unwrap();
            assert_eq!(pk.coeffs.len(), 1, "1^{k}");
        }
    }

    /// Coefficient of `m_11` in `P_(2)` from orthogonality to `e_2` under
    /// `⟨p_λ, p_μ⟩ = δ_{λμ} z_λ Π (1 − q^{λ_i})/(1 − t^{λ_i})`.
    fn gram_coefficient(q: f64, t: f64) -> f64 {
        // P_(2) = (1 − c/2) p_2 + (c/2) p_1², e_2 = (p_1² − p_2)/2
        let a = (1.0 - q) / (1.0 - t);
        let b = (1.0 - q * q) / (1.0 - t * t);
        2.0 * b / (a * a + b)
    }

    #[test]
    fn two_variable_degree_two() {
        let (q, t) = (0.3, 0.5);
        let poly = macdonald_coeffs(&p(&[2]), c(q), c(t), 2).unwrap();
        let closed = (1.0 + q) * (1.0 - t) / (1.0 - q * t);
        assert!((poly.coeffs[&p(&[2])] - c(1.0)).norm() < 1e-14);
        assert!((poly.coeffs[&p(&[1, 1])] - c(closed)).norm() < 1e-13);
        assert!((poly.coeffs[&p(&[1, 1])] - c(gram_coefficient(q, t))).norm() < 1e-13);
        // t = 1 gives monomials
        let mono = macdonald_coeffs(&p(&[2]), c(q), c(1.0), 2).unwrap();
        assert!(mono.coeffs.get(&p(&[1, 1])).is_none_or(|x| x.norm() < 1e-14));
    }

    #[test]
    fn eigen_equation_holds_pointwise() {
        let (q, t) = (Complex64::new(0.3, 0.1), Complex64::new(0.55, -0.2));
        let z = [Complex64::new(0.7, 0.2), Complex64::new(-0.4, 0.9), Complex64::new(1.1, -0.3), Complex64::new(0.2, 0.5)];
        for mu in [p(&[2, 1]), p(&[3, 1]), p(&[2, 2]), p(&[2, 1, 1]), p(&[3, 2, 1])] {
            let poly = macdonald_coeffs(&mu, q, t, 4).unwrap();
            let lhs = apply_d1_pointwise(&poly, &z, q, t);
            let e: Complex64 = spectral_point(&mu, 4, q, t).iter().sum();
            let rhs = e * poly.evaluate(&z);
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0), "{mu}: {lhs} vs {rhs}");
            for lam in poly.coeffs.keys() {
                assert!(classical_dominance_leq(lam, &mu));
            }
            assert_eq!(poly.degree(), mu.weight());
        }
    }

    #[test]
    fn schur_point() {
        // t = q gives Schur functions: s_(2,1) = m_21 + 2 m_111 in 3 variables.
        let q = c(0.37);
        let poly = macdonald_coeffs(&p(&[2, 1]), q, q, 3).unwrap();
        assert!((poly.coeffs[&p(&[1, 1, 1])] - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn closed_form_eigenvalues_n1() {
        let params = ModelParams::new(1, 1, 1.0, 0.0).unwrap();
        let e0 = trig_joint_eigenvalue(&p(&[]), 1, &params).unwrap();
        let e1 = trig_joint_eigenvalue(&p(&[1]), 1, &params).unwrap();
        assert!((e0 - c(1.0)).norm() < 1e-15);
        assert!((e1 - c(-1.0)).norm() < 1e-15);
        assert!(trig_joint_eigenvalue(&p(&[]), 2, &params).is_err());
    }

    #[test]
    fn closed_form_pairing() {
        let params = ModelParams::new(2, 2, 0.7, 0.0).unwrap();
        for nu in crate::partitions::enumerate_lattice(2, 2).unwrap().partitions() {
            let e = trig_joint_eigenvalues(nu, &params).unwrap();
            assert!((e[0] - e[1].conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn principal_values_at_zero() {
        let params = ModelParams::new(2, 2, 0.7, 0.0).unwrap();
        for nu in crate::partitions::enumerate_lattice(2, 2).unwrap().partitions() {
            let v = principal_eigenfunction_value(&p(&[]), nu, &params).unwrap();
            assert!((v - c(1.0)).norm() < 1e-15);
        }
        let params = ModelParams::new(1, 1, 1.0, 0.0).unwrap();
        // eigenvectors of [[0,1],[1,0]] normalized at the first entry: (1,1) and (1,-1)
        let a = principal_eigenfunction_value(&p(&[1]), &p(&[]), &params).unwrap();
        let b = principal_eigenfunction_value(&p(&[1]), &p(&[1]), &params).unwrap();
        assert!((a - c(1.0)).norm() < 1e-14);
        assert!((b - c(-1.0)).norm() < 1e-14);
    }

    #[test]
    fn principal_values_match_direct_evaluation() {
        let params = ModelParams::new(2, 2, 0.7, 0.0).unwrap();
        let mu = p(&[2, 1]);
        let poly = lattice_macdonald(&mu, &params).unwrap();
        let nu = p(&[1]);
        let s = staircase(&nu, 2, 0.7);
        let z: Vec<Complex64> = s.iter().map(|&y| Complex64::from_polar(1.0, params.alpha() * y)).collect();
        let direct = poly.evaluate(&z);
        let circle = poly.evaluate_on_circle(params.alpha(), &s);
        assert!((direct - circle).norm() < 1e-13);
    }

    #[test]
    fn root_of_unity_specializations_exist_on_small_lattices() {
        for &(n, m) in &[(1, 1), (2, 1), (2, 2), (3, 2)] {
            for &g in &[0.5, 1.0, 1.3] {
                let params = ModelParams::new(n, m, g, 0.0).unwrap();
                for mu in crate::partitions::enumerate_lattice(n, m).unwrap().partitions() {
                    lattice_macdonald(mu, &params).unwrap_or_else(|e| panic!("({n},{m},{g}) {mu}: {e}"));
                }
            }
        }
    }

    #[test]
    fn lattice_spectrum_matches_oracle() {
        for &(n, m) in &[(1, 1), (2, 1), (2, 2), (3, 2)] {
            for &g in &[0.5, 1.0, 1.3] {
                let params = ModelParams::new(n, m, g, 0.0).unwrap();
                let s = crate::spectral::label_spectrum(&params).unwrap();
                let cmp = compare_trig(&s).unwrap();
                assert!(cmp.eigenvalue_residual < 1e-8, "({n},{m},{g}) {cmp:?}");
                assert!(cmp.eigenvector_residual < 1e-8, "({n},{m},{g}) {cmp:?}");
            }
        }
    }
}
