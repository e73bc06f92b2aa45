//! Random matrix ensembles, randomized Fourier series `f_U` and the decomposition of a
//! contraction into an average of four unitaries.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dual::DualDescriptor;
use crate::error::{Error, Result};
use crate::fourier::{ell2_norm, ell_infty_norm_family, same_dual, FourierCoeffs};
use crate::linalg::{
    ensure_square, identity, op_norm, real_op_norm, sqrt_one_minus_square, unitarity_defect,
    CMatrix, I, NORM_SLACK,
};
use crate::rng::RngSeed;

/// Tolerance for flagging a family as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// A finitely supported family `α ↦ M_α` of square matrices: randomizers `U` and multipliers `B`.
#[derive(Debug, Clone)]
pub struct MatrixFamily {
    dual: Arc<DualDescriptor>,
    entries: BTreeMap<usize, CMatrix>,
}

impl MatrixFamily {
    pub fn new(dual: Arc<DualDescriptor>) -> Self {
        Self {
            dual,
            entries: BTreeMap::new(),
        }
    }

    pub fn dual(&self) -> &Arc<DualDescriptor> {
        &self.dual
    }

    pub fn set(&mut self, idx: usize, m: CMatrix) -> Result<()> {
        let irrep = self
            .dual
            .irreps()
            .get(idx)
            .ok_or_else(|| Error::UnknownLabel(idx.to_string()))?;
        ensure_square(&m, irrep.n())?;
        self.entries.insert(idx, m);
        Ok(())
    }

    pub fn get(&self, idx: usize) -> Option<&CMatrix> {
        self.entries.get(&idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &CMatrix)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    /// Builds a family on every irrep from `make(index, n)`.
    pub fn from_fn(dual: Arc<DualDescriptor>, mut make: impl FnMut(usize, usize) -> CMatrix) -> Self {
        let entries = dual
            .irreps()
            .iter()
            .enumerate()
            .map(|(k, a)| (k, make(k, a.n())))
            .collect();
        Self { dual, entries }
    }

    pub fn identity(dual: Arc<DualDescriptor>) -> Self {
        Self::from_fn(dual, |_, n| identity(n))
    }

    pub fn haar<R: Rng + ?Sized>(dual: Arc<DualDescriptor>, rng: &mut R) -> Self {
        Self::from_fn(dual, |_, n| haar_unitary(n, rng))
    }

    /// Pointwise product `self_α · other_α` on the common support.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        same_dual(&self.dual, &other.dual)?;
        let entries = self
            .entries
            .iter()
            .filter_map(|(&k, a)| other.entries.get(&k).map(|b| (k, a * b)))
            .collect();
        Ok(Self {
            dual: self.dual.clone(),
            entries,
        })
    }

    /// Largest unitarity defect over the family.
    pub fn unitarity_defect(&self) -> f64 {
        self.entries
            .values()
            .map(unitarity_defect)
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= UNITARY_TOL
    }

    /// `sup_α ‖M_α‖`.
    pub fn sup_norm(&self) -> f64 {
        ell_infty_norm_family(self.entries.values())
    }
}

/// `n × n` matrix with i.i.d. `N(0, 1) / √n` entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::Domain("gaussian_matrix needs n >= 1".into()));
    }
    let scale = 1.0 / (n as f64).sqrt();
    Ok(DMatrix::from_fn(n, n, |_, _| {
        let g: f64 = rng.sample(StandardNormal);
        g * scale
    }))
}

/// Haar-distributed unitary: complex Ginibre matrix, QR, then the columns of `Q` rotated by the
/// phases of `R`'s diagonal so that the factorization is the unique one with positive `diag R`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    });
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let rjj = r[(j, j)];
        let norm = rjj.norm();
        let phase = if norm > 0.0 {
            rjj / norm
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Monte Carlo mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
}

impl MonteCarloEstimate {
    /// Mean and standard error of the mean; reduction runs in sample order.
    pub fn from_samples(samples: &[f64]) -> Self {
        let m = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / m;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            stderr: (var / m).sqrt(),
        }
    }

    pub fn within_sigmas(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

/// `E‖G_n‖` by Monte Carlo over `trials` draws of [`gaussian_matrix`].
pub fn expected_operator_norm(n: usize, trials: usize, seed: RngSeed) -> Result<MonteCarloEstimate> {
    if trials < 2 {
        return Err(Error::Domain("expected_operator_norm needs at least 2 trials".into()));
    }
    if n == 0 {
        return Err(Error::Domain("expected_operator_norm needs n >= 1".into()));
    }
    let mut rng = seed.rng();
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let g = gaussian_matrix(n, &mut rng)?;
        samples.push(real_op_norm(&g));
    }
    Ok(MonteCarloEstimate::from_samples(&samples))
}

/// `f_U`: the coefficient at `α` becomes `U_α f̂(α)`.
pub fn randomize(f: &FourierCoeffs, family: &MatrixFamily) -> Result<FourierCoeffs> {
    same_dual(f.dual(), &family.dual)?;
    let mut out = FourierCoeffs::zero(f.dual().clone());
    for (k, m) in f.iter() {
        let u = family
            .get(k)
            .ok_or_else(|| Error::MissingEntry(f.dual().irrep(k).label().to_string()))?;
        out.set(k, u * m)?;
    }
    Ok(out)
}

/// `|‖f_U‖₂ − ‖f‖₂|` for a unitary family `U`.
pub fn l2_invariance_check(f: &FourierCoeffs, family: &MatrixFamily) -> Result<f64> {
    let defect = family.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let randomized = randomize(f, family)?;
    Ok((ell2_norm(&randomized) - ell2_norm(f)).abs())
}

/// Writes a contraction `X` as `(v₁ + v₂ + v₃ + v₄) / 2` with unitary `v_j`.
///
/// With `h₁ = (X + X*)/2` and `h₂ = (X − X*)/(2i)`, the unitaries are
/// `v₁,₂ = h₁ ± i√(I − h₁²)` and `v₃,₄ = i(h₂ ± i√(I − h₂²))`.
pub fn four_unitary_decomposition(x: &CMatrix) -> Result<[CMatrix; 4]> {
    let n = x.nrows();
    ensure_square(x, n)?;
    let norm = op_norm(x);
    if norm > 1.0 + NORM_SLACK {
        return Err(Error::NotContraction(norm));
    }
    let xs = x.adjoint();
    let h1 = (x + &xs).scale(0.5);
    let h2 = (x - &xs) * Complex64::new(0.0, -0.5);
    let r1 = sqrt_one_minus_square(&h1) * I;
    let r2 = sqrt_one_minus_square(&h2) * I;
    Ok([
        &h1 + &r1,
        &h1 - &r1,
        (&h2 + &r2) * I,
        (&h2 - &r2) * I,
    ])
}

/// `f_B` for a multiplier family in the unit ball together with the four unitary families `V_j`
/// realizing `f_B = (Σ_j f_{V_j}) / 2`.
#[derive(Debug, Clone)]
pub struct BallDecomposition {
    pub randomized: FourierCoeffs,
    pub unitaries: [MatrixFamily; 4],
}

impl BallDecomposition {
    /// `(Σ_j f_{V_j}) / 2`, recomputed from the unitary families.
    pub fn recombined(&self, f: &FourierCoeffs) -> Result<FourierCoeffs> {
        let mut acc = FourierCoeffs::zero(f.dual().clone());
        for v in &self.unitaries {
            acc = acc.add(&randomize(f, v)?)?;
        }
        Ok(acc.scale(Complex64::new(0.5, 0.0)))
    }
}

pub fn randomize_ball(f: &FourierCoeffs, family: &MatrixFamily) -> Result<BallDecomposition> {
    same_dual(f.dual(), &family.dual)?;
    let sup = family.sup_norm();
    if sup > 1.0 + NORM_SLACK {
        return Err(Error::NotContraction(sup));
    }
    let randomized = randomize(f, family)?;
    let dual = f.dual().clone();
    let mut unitaries: [MatrixFamily; 4] = std::array::from_fn(|_| MatrixFamily::new(dual.clone()));
    for (k, b) in family.iter() {
        let parts = four_unitary_decomposition(b)?;
        for (slot, v) in unitaries.iter_mut().zip(parts) {
            slot.set(k, v)?;
        }
    }
    Ok(BallDecomposition {
        randomized,
        unitaries,
    })
}

/// Random contraction: a complex Gaussian matrix rescaled to operator norm `radius`.
pub fn random_contraction<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> CMatrix {
    let m = crate::fourier::random_complex_matrix(n, rng);
    let norm = op_norm(&m);
    if norm == 0.0 {
        return m;
    }
    m * Complex64::new(radius / norm, 0.0)
}
