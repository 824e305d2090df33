//! Joint spectrum of `D_1, …, D_n` and its labeling by bounded partitions.
//!
//! The symmetrized operators `M_r` are real, commute and satisfy
//! `M_rᵀ = M_{n+1−r}`, so they share a unitary eigenbasis. That basis is
//! found from one random Hermitian combination, with clusters of nearly equal
//! eigenvalues split by the remaining Hermitian generators. Labels are fixed
//! at `p = 0` against the closed-form spectrum and carried to `p ≠ 0` by
//! eigenvector overlap.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffs::ModelParams;
use crate::macdonald::trig_joint_eigenvalues;
use crate::operators::OperatorFamily;
use crate::partitions::{LatticeBasis, Partition};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x00c0_ffee;

/// Relative gap below which eigenvalues of a Hermitian generator are grouped.
const CLUSTER_GAP: f64 = 1e-8;
/// `‖M_r v − e_r v‖ / ‖M_r‖_F` allowed after refinement.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Distance within which a closed-form eigenvalue vector counts as a match.
pub const LABEL_TOL: f64 = 1e-6;
/// Smallest admissible `|u(0)|` before normalization is refused.
pub const ZERO_COMPONENT_FLOOR: f64 = 1e-10;
pub const MAX_STEP: f64 = 0.05;
pub const OVERLAP_THRESHOLD: f64 = 0.9;
pub const MAX_HALVINGS: usize = 6;

/// One joint eigenpair.
#[derive(Clone, Debug)]
pub struct SpectralDatum {
    pub label: Option<Partition>,
    /// `(e_1, …, e_n)`.
    pub eigenvalues: Vec<Complex64>,
    /// Lattice eigenvector with `⟨u, u⟩_Δ = 1` and `u(0) > 0`.
    pub eigenvector: DVector<Complex64>,
    /// `Δ̂ = 1/⟨p, p⟩_Δ` for `p = u/u(0)`, i.e. `u(0)²`.
    pub norm_hat: f64,
    /// `max_r ‖D_r u − e_r u‖_Δ`.
    pub residual: f64,
}

impl SpectralDatum {
    /// `p(λ) = u(λ)/u(0)`, the eigenfunction normalized to `1` at the empty partition.
    pub fn normalized_eigenfunction(&self) -> Result<Vec<Complex64>> {
        let u0 = self.eigenvector[0];
        if u0.norm() < ZERO_COMPONENT_FLOOR {
            return Err(Error::Normalization(format!(
                "component at the empty partition is {:e}",
                u0.norm()
            )));
        }
        Ok(self.eigenvector.iter().map(|x| x / u0).collect())
    }
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub params: ModelParams,
    pub basis: LatticeBasis,
    pub weights: Vec<f64>,
    pub data: Vec<SpectralDatum>,
}

impl Spectrum {
    pub fn is_labeled(&self) -> bool {
        self.data.iter().all(|d| d.label.is_some())
    }

    /// Positivity of the weights is only established for `0 ≤ p < 1`.
    pub fn outside_proven_regime(&self) -> bool {
        !self.params.in_proven_regime()
    }

    pub fn datum(&self, label: &Partition) -> Option<&SpectralDatum> {
        self.data.iter().find(|d| d.label.as_ref() == Some(label))
    }

    fn sort_by_label(&mut self) {
        let basis = &self.basis;
        self.data.sort_by_key(|d| d.label.as_ref().and_then(|l| basis.index_of(l)).unwrap_or(usize::MAX));
    }
}

fn hermitian_generators(m: &[DMatrix<f64>]) -> Vec<DMatrix<Complex64>> {
    let mut out = Vec::with_capacity(2 * m.len());
    for a in m {
        let at = a.transpose();
        out.push((a + &at).map(|x| Complex64::new(0.5 * x, 0.0)));
        out.push((a - &at).map(|x| Complex64::new(0.0, -0.5 * x)));
    }
    out
}

/// Splits sorted eigenvalues into runs whose consecutive gaps are small.
fn clusters(values: &[f64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        if k > 0 && values[i] - values[order[k - 1]] < CLUSTER_GAP * scale {
            out.last_mut().unwrap().push(i);
        } else {
            out.push(vec![i]);
        }
    }
    out
}

/// Orthonormal columns spanning a subspace; diagonalizes generator `next`
/// restricted to it and recurses on multi-dimensional eigenspaces.
fn refine(v: DMatrix<Complex64>, gens: &[DMatrix<Complex64>], next: usize, out: &mut Vec<(DVector<Complex64>, usize)>, cluster_id: &mut usize) {
    if v.ncols() == 1 || next == gens.len() {
        for c in v.column_iter() {
            out.push((c.into_owned(), *cluster_id));
        }
        *cluster_id += 1;
        return;
    }
    let restricted = v.adjoint() * &gens[next] * &v;
    let restricted = (&restricted + restricted.adjoint()).map(|x| x * 0.5);
    let eig = restricted.symmetric_eigen();
    let rotated = &v * &eig.eigenvectors;
    for group in clusters(eig.eigenvalues.as_slice()) {
        let cols = DMatrix::from_columns(&group.iter().map(|&i| rotated.column(i).into_owned()).collect::<Vec<_>>());
        refine(cols, gens, next + 1, out, cluster_id);
    }
}

/// Unlabeled joint eigenpairs with the default seed.
pub fn joint_diagonalize(params: &ModelParams) -> Result<Spectrum> {
    joint_diagonalize_seeded(&OperatorFamily::new(params)?, DEFAULT_SEED)
}

pub fn joint_diagonalize_seeded(family: &OperatorFamily, seed: u64) -> Result<Spectrum> {
    let n = family.n();
    let dim = family.dim();
    let m = family.all_m();
    let gens = hermitian_generators(&m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for g in &gens {
        let a: f64 = rng.random_range(-1.0..1.0);
        h += g.map(|x| x * a);
    }
    let eig = h.symmetric_eigen();
    let mut vectors = Vec::with_capacity(dim);
    let mut cluster_id = 0;
    for group in clusters(eig.eigenvalues.as_slice()) {
        let cols = DMatrix::from_columns(&group.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
        refine(cols, &gens, 0, &mut vectors, &mut cluster_id);
    }

    let mc: Vec<DMatrix<Complex64>> = m.iter().map(|a| a.map(|x| Complex64::new(x, 0.0))).collect();
    let scales: Vec<f64> = m.iter().map(|a| a.norm().max(f64::MIN_POSITIVE)).collect();
    let inv_sqrt: Vec<f64> = family.weights.iter().map(|w| 1.0 / w.sqrt()).collect();
    let mut data = Vec::with_capacity(dim);
    for (k, (v, cid)) in vectors.iter().enumerate() {
        let mut eigenvalues = Vec::with_capacity(n);
        let mut residual: f64 = 0.0;
        let mut worst_rel: f64 = 0.0;
        for (a, &s) in mc.iter().zip(&scales) {
            let av = a * v;
            let e = v.dotc(&av);
            let r = (av - v * e).norm();
            residual = residual.max(r);
            worst_rel = worst_rel.max(r / s);
            eigenvalues.push(e);
        }
        if worst_rel > RESIDUAL_TOL {
            let cluster = vectors.iter().enumerate().filter(|(_, (_, c))| c == cid).map(|(i, _)| i).collect();
            return Err(Error::DegenerateSpectrum { cluster, residual: worst_rel });
        }
        let mut u = DVector::from_fn(dim, |i, _| v[i] * inv_sqrt[i]);
        let u0 = u[0];
        if u0.norm() < ZERO_COMPONENT_FLOOR {
            return Err(Error::Normalization(format!(
                "eigenvector {k} vanishes at the empty partition (|u(0)| = {:e})",
                u0.norm()
            )));
        }
        let phase = u0.conj() / u0.norm();
        u *= phase;
        u[0] = Complex64::new(u[0].re, 0.0);
        data.push(SpectralDatum { label: None, eigenvalues, eigenvector: u, norm_hat: u0.norm_sqr(), residual });
    }
    Ok(Spectrum {
        params: family.params.clone(),
        basis: family.basis.clone(),
        weights: family.weights.clone(),
        data,
    })
}

fn max_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Labels a `p = 0` spectrum by nearest closed-form eigenvalue vector.
pub fn label_at_zero(spectrum: &mut Spectrum) -> Result<()> {
    if spectrum.params.p() != 0.0 {
        return Err(Error::InvalidArgument("closed-form labeling needs p = 0".into()));
    }
    let closed = spectrum
        .basis
        .partitions()
        .iter()
        .map(|nu| trig_joint_eigenvalues(nu, &spectrum.params))
        .collect::<Result<Vec<_>>>()?;
    let mut used = vec![false; closed.len()];
    for (k, d) in spectrum.data.iter_mut().enumerate() {
        let mut dist: Vec<(f64, usize)> = closed.iter().enumerate().map(|(i, c)| (max_distance(&d.eigenvalues, c), i)).collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (best, idx) = dist[0];
        if best > LABEL_TOL {
            return Err(Error::Labeling(format!(
                "eigenpair {k} is {best:e} away from the nearest closed form {}",
                spectrum.basis.get(idx)
            )));
        }
        if let Some(&(second, j)) = dist.get(1) {
            if second <= LABEL_TOL {
                return Err(Error::Labeling(format!(
                    "eigenpair {k} matches both {} ({best:e}) and {} ({second:e})",
                    spectrum.basis.get(idx),
                    spectrum.basis.get(j)
                )));
            }
        }
        if std::mem::replace(&mut used[idx], true) {
            return Err(Error::Labeling(format!("label {} assigned twice", spectrum.basis.get(idx))));
        }
        d.label = Some(spectrum.basis.get(idx).clone());
    }
    spectrum.sort_by_label();
    Ok(())
}

fn delta_overlap(a: &DVector<Complex64>, b: &DVector<Complex64>, w: &[f64]) -> Complex64 {
    a.iter().zip(b.iter()).zip(w).map(|((x, y), &wi)| x.conj() * y * wi).sum()
}

fn delta_norm(a: &DVector<Complex64>, w: &[f64]) -> f64 {
    delta_overlap(a, a, w).re.sqrt()
}

/// Transfers labels from `prev` to `next` by largest `Δ`-overlap, measured in
/// the weights of `next`.
fn transfer_labels(prev: &Spectrum, next: &mut Spectrum) -> std::result::Result<(), String> {
    let w = &next.weights;
    let mut taken = vec![false; next.data.len()];
    let mut assignment = vec![usize::MAX; next.data.len()];
    for (i, old) in prev.data.iter().enumerate() {
        let norm = delta_norm(&old.eigenvector, w);
        let (best, score) = next
            .data
            .iter()
            .enumerate()
            .map(|(j, new)| (j, delta_overlap(&old.eigenvector, &new.eigenvector, w).norm() / norm))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty spectrum");
        if score <= OVERLAP_THRESHOLD {
            return Err(format!("best overlap for {} is {score:.4}", old.label.as_ref().unwrap()));
        }
        if std::mem::replace(&mut taken[best], true) {
            return Err(format!("two labels map to eigenpair {best}"));
        }
        assignment[best] = i;
    }
    for (j, d) in next.data.iter_mut().enumerate() {
        d.label = prev.data[assignment[j]].label.clone();
    }
    next.sort_by_label();
    Ok(())
}

/// Carries a labeled spectrum to nome `target`, in steps of at most
/// [`MAX_STEP`] with adaptive halving.
pub fn continue_to(start: &Spectrum, target: f64, seed: u64) -> Result<Spectrum> {
    let mut current = start.clone();
    let mut p = current.params.p();
    let mut step = MAX_STEP;
    let mut halvings = 0;
    while p != target {
        let remaining = target - p;
        let next_p = if remaining.abs() <= step { target } else { p + step * remaining.signum() };
        let params = current.params.with_nome(next_p)?;
        let mut next = joint_diagonalize_seeded(&OperatorFamily::new(&params)?, seed)?;
        match transfer_labels(&current, &mut next) {
            Ok(()) => {
                current = next;
                p = next_p;
                if halvings > 0 {
                    halvings -= 1;
                    step = (step * 2.0).min(MAX_STEP);
                }
            }
            Err(reason) => {
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(Error::Continuation { p: next_p, reason });
                }
                step *= 0.5;
            }
        }
    }
    Ok(current)
}

/// Diagonalizes and labels at `params.p()`, continuing from `p = 0`.
pub fn label_spectrum(params: &ModelParams) -> Result<Spectrum> {
    label_spectrum_seeded(params, DEFAULT_SEED)
}

pub fn label_spectrum_seeded(params: &ModelParams, seed: u64) -> Result<Spectrum> {
    let mut zero = joint_diagonalize_seeded(&OperatorFamily::new(&params.with_nome(0.0)?)?, seed)?;
    label_at_zero(&mut zero)?;
    continue_to(&zero, params.p(), seed)
}

/// Labeled spectra at each nome of `ps`, continued in the given order from `p = 0`.
pub fn label_sweep(params: &ModelParams, ps: &[f64], seed: u64) -> Result<Vec<Spectrum>> {
    let mut current = joint_diagonalize_seeded(&OperatorFamily::new(&params.with_nome(0.0)?)?, seed)?;
    label_at_zero(&mut current)?;
    let mut out = Vec::with_capacity(ps.len());
    for &p in ps {
        current = continue_to(&current, p, seed)?;
        out.push(current.clone());
    }
    Ok(out)
}

/// Largest off-diagonal `|⟨u_ν, u_μ⟩_Δ|`.
pub fn orthogonality_residual(spectrum: &Spectrum) -> f64 {
    let w = &spectrum.weights;
    let mut worst: f64 = 0.0;
    for (i, a) in spectrum.data.iter().enumerate() {
        for b in &spectrum.data[i + 1..] {
            worst = worst.max(delta_overlap(&a.eigenvector, &b.eigenvector, w).norm());
        }
    }
    worst
}

/// `max |Uᴴ U − I|` for `U_{μν} = Δ_μ^{1/2} Δ̂_ν^{1/2} p_ν(μ)`.
pub fn unitarity_residual(spectrum: &Spectrum) -> Result<f64> {
    let dim = spectrum.data.len();
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    for (col, d) in spectrum.data.iter().enumerate() {
        let p = d.normalized_eigenfunction()?;
        for (row, x) in p.iter().enumerate() {
            u[(row, col)] = x * (spectrum.weights[row] * d.norm_hat).sqrt();
        }
    }
    let defect = u.adjoint() * &u - DMatrix::<Complex64>::identity(dim, dim);
    Ok(defect.iter().map(|x| x.norm()).fold(0.0, f64::max))
}

/// `max |e_{n+1−r} − conj(e_r)|`.
pub fn pairing_residual(spectrum: &Spectrum) -> f64 {
    let mut worst: f64 = 0.0;
    for d in &spectrum.data {
        let n = d.eigenvalues.len();
        for r in 0..n {
            worst = worst.max((d.eigenvalues[n - 1 - r] - d.eigenvalues[r].conj()).norm());
        }
    }
    worst
}

/// Smallest max-norm distance between two eigenvalue vectors.
pub fn min_eigenvalue_distance(spectrum: &Spectrum) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in spectrum.data.iter().enumerate() {
        for b in &spectrum.data[i + 1..] {
            best = best.min(max_distance(&a.eigenvalues, &b.eigenvalues));
        }
    }
    best
}

/// Largest `|e(p_{k+1}) − 2e(p_k) + e(p_{k−1})| / h²` along a uniform sweep.
pub fn max_second_difference(sweep: &[Spectrum]) -> Result<f64> {
    if sweep.len() < 3 {
        return Ok(0.0);
    }
    let h = sweep[1].params.p() - sweep[0].params.p();
    for w in sweep.windows(2) {
        let hk = w[1].params.p() - w[0].params.p();
        if (hk - h).abs() > 1e-12 {
            return Err(Error::InvalidArgument("sweep is not uniformly spaced".into()));
        }
    }
    let mut worst: f64 = 0.0;
    for w in sweep.windows(3) {
        for (a, (b, c)) in w[0].data.iter().zip(w[1].data.iter().zip(&w[2].data)) {
            if a.label != b.label || b.label != c.label {
                return Err(Error::Labeling("sweep spectra are not aligned by label".into()));
            }
            for r in 0..a.eigenvalues.len() {
                let dd = (c.eigenvalues[r] - b.eigenvalues[r] * 2.0 + a.eigenvalues[r]).norm() / (h * h);
                worst = worst.max(dd);
            }
        }
    }
    Ok(worst)
}
