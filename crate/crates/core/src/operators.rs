//! Dense matrices of the truncated difference operators.
//!
//! Rows and columns follow the order of [`LatticeBasis`]. Row `λ` of `D_r`
//! carries `B_{λ+θ/λ}` in column `reduce(λ+θ)` for every `r`-strip `θ`;
//! strips that leave the lattice contribute zero.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffs::{admissible_target, coeff_b, weights, ModelParams};
use crate::partitions::{enumerate_lattice, strips, LatticeBasis};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// `D_r`.
    Difference,
    /// `C_r = (D_r + D_{n+1−r})/2`.
    Cosine,
    /// `S_r = (D_r − D_{n+1−r})/(2i)`.
    Sine,
}

impl OperatorKind {
    pub fn symbol(&self) -> &'static str {
        match self {
            OperatorKind::Difference => "D",
            OperatorKind::Cosine => "C",
            OperatorKind::Sine => "S",
        }
    }
}

#[derive(Clone, Debug)]
pub enum OperatorMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl OperatorMatrix {
    pub fn size(&self) -> usize {
        match self {
            OperatorMatrix::Real(a) => a.nrows(),
            OperatorMatrix::Complex(a) => a.nrows(),
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match self {
            OperatorMatrix::Real(a) => a.map(|x| Complex64::new(x, 0.0)),
            OperatorMatrix::Complex(a) => a.clone(),
        }
    }

    pub fn as_real(&self) -> Option<&DMatrix<f64>> {
        match self {
            OperatorMatrix::Real(a) => Some(a),
            OperatorMatrix::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&DMatrix<Complex64>> {
        match self {
            OperatorMatrix::Complex(a) => Some(a),
            OperatorMatrix::Real(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LatticeOperator {
    pub kind: OperatorKind,
    pub index: usize,
    /// Whether the matrix has been conjugated by `Δ^{1/2}`.
    pub symmetrized: bool,
    pub matrix: OperatorMatrix,
}

impl LatticeOperator {
    pub fn label(&self) -> String {
        let s = if self.symmetrized { "~" } else { "" };
        format!("{}{}{}", self.kind.symbol(), s, self.index)
    }
}

/// Basis, weights and all `D_1..D_n` for one parameter point.
#[derive(Clone, Debug)]
pub struct OperatorFamily {
    pub params: ModelParams,
    pub basis: LatticeBasis,
    pub weights: Vec<f64>,
    d: Vec<DMatrix<f64>>,
}

impl OperatorFamily {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let basis = enumerate_lattice(params.n(), params.m())?;
        let weights = weights(&basis, params)?;
        let d = (1..=params.n())
            .map(|r| assemble_d(r, &basis, params))
            .collect::<Result<Vec<_>>>()?;
        Ok(OperatorFamily { params: params.clone(), basis, weights, d })
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `D_r`, `1 ≤ r ≤ n`.
    pub fn d(&self, r: usize) -> &DMatrix<f64> {
        &self.d[r - 1]
    }

    /// `M_r = Δ^{1/2} D_r Δ^{−1/2}`.
    pub fn m(&self, r: usize) -> DMatrix<f64> {
        conjugate_by_weights(self.d(r), &self.weights)
    }

    pub fn all_m(&self) -> Vec<DMatrix<f64>> {
        (1..=self.n()).map(|r| self.m(r)).collect()
    }
}

fn check_index(r: usize, max: usize, what: &str) -> Result<()> {
    if r < 1 || r > max {
        return Err(Error::InvalidArgument(format!("{what} index {r} outside 1..={max}")));
    }
    Ok(())
}

fn assemble_d(r: usize, basis: &LatticeBasis, params: &ModelParams) -> Result<DMatrix<f64>> {
    let n = params.n();
    check_index(r, n, "D")?;
    let dim = basis.len();
    let mut a = DMatrix::zeros(dim, dim);
    let masks = strips(r, n)?;
    for (row, lam) in basis.iter() {
        for theta in &masks {
            let Some(target) = admissible_target(lam, theta, params) else { continue };
            let col = basis.index_of(&target).expect("admissible targets lie in the basis");
            a[(row, col)] += coeff_b(lam, theta, params)?;
        }
    }
    Ok(a)
}

/// `D_r` on `Λ^{(n,m)}`.
pub fn build_d(r: usize, params: &ModelParams) -> Result<LatticeOperator> {
    let basis = enumerate_lattice(params.n(), params.m())?;
    Ok(LatticeOperator {
        kind: OperatorKind::Difference,
        index: r,
        symmetrized: false,
        matrix: OperatorMatrix::Real(assemble_d(r, &basis, params)?),
    })
}

/// `C_r`, `1 ≤ r ≤ ⌊(n+1)/2⌋`.
pub fn build_c(r: usize, params: &ModelParams) -> Result<LatticeOperator> {
    let n = params.n();
    check_index(r, n.div_ceil(2), "C")?;
    let basis = enumerate_lattice(n, params.m())?;
    let a = assemble_d(r, &basis, params)?;
    let b = assemble_d(n + 1 - r, &basis, params)?;
    Ok(LatticeOperator {
        kind: OperatorKind::Cosine,
        index: r,
        symmetrized: false,
        matrix: OperatorMatrix::Real((a + b) * 0.5),
    })
}

/// `S_r`, `1 ≤ r ≤ ⌊n/2⌋`.
pub fn build_s(r: usize, params: &ModelParams) -> Result<LatticeOperator> {
    let n = params.n();
    check_index(r, n / 2, "S")?;
    let basis = enumerate_lattice(n, params.m())?;
    let a = assemble_d(r, &basis, params)?;
    let b = assemble_d(n + 1 - r, &basis, params)?;
    // (a − b)/(2i) = −i (a − b)/2
    let diff = (a - b) * 0.5;
    Ok(LatticeOperator {
        kind: OperatorKind::Sine,
        index: r,
        symmetrized: false,
        matrix: OperatorMatrix::Complex(diff.map(|x| Complex64::new(0.0, -x))),
    })
}

pub fn build(kind: OperatorKind, r: usize, params: &ModelParams) -> Result<LatticeOperator> {
    match kind {
        OperatorKind::Difference => build_d(r, params),
        OperatorKind::Cosine => build_c(r, params),
        OperatorKind::Sine => build_s(r, params),
    }
}

fn conjugate_by_weights(a: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let s: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| s[i] * a[(i, j)] / s[j])
}

/// `diag(Δ)^{1/2} · A · diag(Δ)^{−1/2}`.
pub fn symmetrize(op: &LatticeOperator, params: &ModelParams) -> Result<LatticeOperator> {
    if op.symmetrized {
        return Ok(op.clone());
    }
    let basis = enumerate_lattice(params.n(), params.m())?;
    let w = weights(&basis, params)?;
    if w.len() != op.matrix.size() {
        return Err(Error::InvalidArgument(format!(
            "operator of size {} does not match basis of size {}",
            op.matrix.size(),
            w.len()
        )));
    }
    let matrix = match &op.matrix {
        OperatorMatrix::Real(a) => OperatorMatrix::Real(conjugate_by_weights(a, &w)),
        OperatorMatrix::Complex(a) => {
            let s: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
            OperatorMatrix::Complex(DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (s[i] / s[j])))
        }
    };
    Ok(LatticeOperator { symmetrized: true, matrix, ..op.clone() })
}

/// `‖D_r D_s − D_s D_r‖_F / (‖D_r‖_F ‖D_s‖_F)` for a prepared family.
pub fn family_commutator_residual(family: &OperatorFamily, r: usize, s: usize) -> Result<f64> {
    let n = family.n();
    check_index(r, n, "D")?;
    check_index(s, n, "D")?;
    if r == s {
        return Ok(0.0);
    }
    let (a, b) = (family.d(r), family.d(s));
    Ok(relative_commutator(a, b))
}

pub fn relative_commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let c = a * b - b * a;
    let scale = a.norm() * b.norm();
    if scale == 0.0 {
        return c.norm();
    }
    c.norm() / scale
}

pub fn commutator_residual(r: usize, s: usize, params: &ModelParams) -> Result<f64> {
    family_commutator_residual(&OperatorFamily::new(params)?, r, s)
}

/// Number of random vector pairs used by [`adjoint_residual`].
pub const ADJOINT_SAMPLES: usize = 8;
pub const ADJOINT_SEED: u64 = 0x5eed_ad70;

fn delta_inner(f: &DVector<Complex64>, g: &DVector<Complex64>, w: &[f64]) -> Complex64 {
    f.iter().zip(g.iter()).zip(w).map(|((a, b), &x)| a * b.conj() * x).sum()
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> DVector<Complex64> {
    DVector::from_fn(dim, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Largest normalized defect of `⟨D_r f, g⟩_Δ = ⟨f, D_{n+1−r} g⟩_Δ` over a
/// fixed batch of pseudo-random complex vectors.
pub fn family_adjoint_residual(family: &OperatorFamily, r: usize, seed: u64) -> Result<f64> {
    let n = family.n();
    check_index(r, n, "D")?;
    let dim = family.dim();
    let a = family.d(r).map(|x| Complex64::new(x, 0.0));
    let b = family.d(n + 1 - r).map(|x| Complex64::new(x, 0.0));
    let scale = family.d(r).norm().max(f64::MIN_POSITIVE);
    let w = &family.weights;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..ADJOINT_SAMPLES {
        let f = random_vector(&mut rng, dim);
        let g = random_vector(&mut rng, dim);
        worst = worst.max(bilinear_defect(&a, &b, &f, &g, w) / scale);
    }
    Ok(worst)
}

fn bilinear_defect(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    f: &DVector<Complex64>,
    g: &DVector<Complex64>,
    w: &[f64],
) -> f64 {
    let lhs = delta_inner(&(a * f), g, w);
    let rhs = delta_inner(f, &(b * g), w);
    let nf = delta_inner(f, f, w).re.sqrt();
    let ng = delta_inner(g, g, w).re.sqrt();
    (lhs - rhs).norm() / (nf * ng)
}

pub fn adjoint_residual(r: usize, params: &ModelParams) -> Result<f64> {
    family_adjoint_residual(&OperatorFamily::new(params)?, r, ADJOINT_SEED)
}

/// `max |M_r^T − M_{n+1−r}|` relative to `‖M_r‖_F`.
pub fn transpose_residual(family: &OperatorFamily, r: usize) -> Result<f64> {
    let n = family.n();
    check_index(r, n, "D")?;
    let a = family.m(r);
    let b = family.m(n + 1 - r);
    Ok((a.transpose() - b).norm() / a.norm().max(f64::MIN_POSITIVE))
}
