//! Function-side evaluation on classical compact groups.
//!
//! On a classical group `Q = I` and `d = n`, so `f(g) = Σ n_π tr(f̂(π) π(g))` and
//! `f̂(π) = ∫ f(g) π(g)* dg`. Finite groups integrate exactly by averaging; `SU(2)` goes
//! through [`Su2Quadrature`].

mod finite_group;
mod su2;

pub use finite_group::{cyclic_group, s3_elements, symmetric_group_s3, FiniteGroupTable, GroupIrrep, TABLE_TOL};
pub use su2::{
    character_l1, character_l1_on, gauss_legendre, make_su2_quadrature, random_su2, rotation, su2_character_at,
    su2_element, su2_from_ab, su2_irrep_matrix, Su2Quadrature, DEFAULT_RESOLUTION, QUADRATURE_TOL, SU2_INPUT_TOL,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dual::{DualDescriptor, DualFamily};
use crate::error::{Error, Result};
use crate::fourier::{ell2_norm, FourierCoeffs};
use crate::linalg::{trace, CMatrix, ZERO};
use crate::random_series::{randomize, MatrixFamily, MonteCarloEstimate};

/// Inequality margins computed by quadrature may dip this far below zero.
pub const MARGIN_ALLOWANCE: f64 = -1e-6;

/// A compact group with concrete irreps and a rule for its Haar integral.
pub trait ClassicalGroup {
    type Element;

    /// Errors unless `dual` is this group's (Kac) dual with matching irreps.
    fn check_dual(&self, dual: &DualDescriptor) -> Result<()>;

    /// Matrix of the irrep at position `idx` of the dual.
    fn irrep_of(&self, idx: usize, g: &Self::Element) -> Result<CMatrix>;

    fn node_count(&self) -> usize;

    fn weight(&self, node: usize) -> f64;

    fn irrep_at_node(&self, idx: usize, node: usize) -> CMatrix;
}

impl ClassicalGroup for FiniteGroupTable {
    type Element = usize;

    fn check_dual(&self, dual: &DualDescriptor) -> Result<()> {
        let own = self.dual();
        let same = dual.family() == DualFamily::FiniteGroup
            && dual.name() == own.name()
            && dual.len() == own.len()
            && dual.irreps().iter().zip(own.irreps()).all(|(a, b)| a.label() == b.label() && a.n() == b.n());
        if same {
            Ok(())
        } else {
            Err(Error::NonClassical(dual.name().to_string()))
        }
    }

    fn irrep_of(&self, idx: usize, g: &usize) -> Result<CMatrix> {
        let irrep = self.irreps().get(idx).ok_or_else(|| Error::UnknownLabel(format!("irrep #{idx}")))?;
        irrep.matrices.get(*g).cloned().ok_or_else(|| Error::Domain(format!("element {g} out of range")))
    }

    fn node_count(&self) -> usize {
        self.order()
    }

    fn weight(&self, _node: usize) -> f64 {
        1.0 / self.order() as f64
    }

    fn irrep_at_node(&self, idx: usize, node: usize) -> CMatrix {
        self.irreps()[idx].matrices[node].clone()
    }
}

impl ClassicalGroup for Su2Quadrature {
    type Element = CMatrix;

    fn check_dual(&self, dual: &DualDescriptor) -> Result<()> {
        if dual.family() != DualFamily::Su2 || !dual.kac() {
            return Err(Error::NonClassical(dual.name().to_string()));
        }
        Ok(())
    }

    fn irrep_of(&self, idx: usize, g: &CMatrix) -> Result<CMatrix> {
        su2_irrep_matrix(idx, g)
    }

    fn node_count(&self) -> usize {
        self.nodes().len()
    }

    fn weight(&self, node: usize) -> f64 {
        self.weights()[node]
    }

    fn irrep_at_node(&self, idx: usize, node: usize) -> CMatrix {
        su2::irrep_unchecked(idx, &self.nodes()[node])
    }
}

/// `f(g) = Σ n_π tr(f̂(π) π(g))`.
pub fn evaluate<G: ClassicalGroup>(f: &FourierCoeffs, group: &G, g: &G::Element) -> Result<Complex64> {
    group.check_dual(f.dual())?;
    let mut acc = ZERO;
    for (idx, m) in f.iter() {
        let p = group.irrep_of(idx, g)?;
        acc += trace(&(m * p)) * m.nrows() as f64;
    }
    Ok(acc)
}

/// Values of `f` at every node of the group's Haar rule.
pub fn values_on_nodes<G: ClassicalGroup>(f: &FourierCoeffs, group: &G) -> Result<Vec<Complex64>> {
    group.check_dual(f.dual())?;
    Ok((0..group.node_count())
        .map(|w| {
            f.iter()
                .map(|(idx, m)| {
                    let p = group.irrep_at_node(idx, w);
                    // tr(m p) without forming the product
                    let mut t = ZERO;
                    for i in 0..m.nrows() {
                        for j in 0..m.ncols() {
                            t += m[(i, j)] * p[(j, i)];
                        }
                    }
                    t * m.nrows() as f64
                })
                .sum()
        })
        .collect())
}

/// `f̂(π) = Σ_w weight_w f(g_w) π(g_w)*` for every irrep of `dual`.
pub fn extract_coefficients<G: ClassicalGroup>(
    values: &[Complex64],
    group: &G,
    dual: std::sync::Arc<DualDescriptor>,
) -> Result<FourierCoeffs> {
    group.check_dual(&dual)?;
    if values.len() != group.node_count() {
        return Err(Error::Domain(format!("{} values for {} nodes", values.len(), group.node_count())));
    }
    let mut out = FourierCoeffs::zero(dual.clone());
    for idx in 0..dual.len() {
        let n = dual.irrep(idx).n();
        let mut acc = CMatrix::zeros(n, n);
        for (w, &v) in values.iter().enumerate() {
            let p = group.irrep_at_node(idx, w);
            acc += p.adjoint() * (v * group.weight(w));
        }
        out.set(idx, acc)?;
    }
    Ok(out)
}

/// `∫ |f|` on the group's Haar rule.
pub fn l1_norm_classical<G: ClassicalGroup>(f: &FourierCoeffs, group: &G) -> Result<f64> {
    let vals = values_on_nodes(f, group)?;
    Ok(vals.iter().enumerate().map(|(w, v)| group.weight(w) * v.norm()).sum())
}

/// `(∫ |f|²)^{1/2}` on the group's Haar rule.
pub fn l2_norm_classical<G: ClassicalGroup>(f: &FourierCoeffs, group: &G) -> Result<f64> {
    let vals = values_on_nodes(f, group)?;
    Ok(vals.iter().enumerate().map(|(w, v)| group.weight(w) * v.norm_sqr()).sum::<f64>().sqrt())
}

/// `max |f|` over the nodes.
pub fn linfty_norm_classical<G: ClassicalGroup>(f: &FourierCoeffs, group: &G) -> Result<f64> {
    Ok(values_on_nodes(f, group)?.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

/// Complete elliptic integral of the second kind `E(m) = ∫₀^{π/2} (1 − m sin²t)^{1/2} dt`.
pub fn elliptic_e(m: f64) -> f64 {
    if m >= 1.0 {
        return 1.0;
    }
    let (mut a, mut g) = (1.0, (1.0 - m).sqrt());
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - g);
        if c <= f64::EPSILON * a {
            break;
        }
        pow *= 2.0;
        sum += pow * c * c;
        let next = (a * g).sqrt();
        a = 0.5 * (a + g);
        g = next;
    }
    PI / (2.0 * a) * (1.0 - sum)
}

/// `E|Z|` for a centred complex Gaussian `Z = Σ g_c a_c` with real standard `g_c`.
pub fn complex_gaussian_abs_mean(a: &[Complex64]) -> f64 {
    let sxx: f64 = a.iter().map(|z| z.re * z.re).sum();
    let syy: f64 = a.iter().map(|z| z.im * z.im).sum();
    let sxy: f64 = a.iter().map(|z| z.re * z.im).sum();
    let half_tr = 0.5 * (sxx + syy);
    let disc = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let l1 = half_tr + disc;
    let l2 = (half_tr - disc).max(0.0);
    if l1 <= 0.0 {
        return 0.0;
    }
    (2.0 * l1 / PI).sqrt() * elliptic_e(1.0 - l2 / l1)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HelgasonGaussian {
    pub mean: f64,
    pub stderr: f64,
    /// `√(2/π)·ℓ²(f)`; exact when every `Z_x` is a real multiple of a fixed phase.
    pub predicted: f64,
    /// `∫ E|Z_x| dx` from the exact law of each `Z_x`.
    pub predicted_exact: f64,
}

/// Monte Carlo estimate of `∫_G E|Σ √n_π g^π_{i,j} (f̂(π)π(x))_{j,i}| dx`.
pub fn helgason_gaussian_mean<G: ClassicalGroup, R: Rng + ?Sized>(
    f: &FourierCoeffs,
    group: &G,
    trials: usize,
    rng: &mut R,
) -> Result<HelgasonGaussian> {
    group.check_dual(f.dual())?;
    if trials == 0 {
        return Err(Error::Domain("trials must be positive".into()));
    }
    let nodes = group.node_count();
    let coords: usize = f.iter().map(|(_, m)| m.nrows() * m.nrows()).sum();
    // row w holds the coefficient vector of Z_{x_w}
    let mut a = vec![ZERO; nodes * coords];
    for w in 0..nodes {
        let mut c = 0;
        for (idx, m) in f.iter() {
            let n = m.nrows();
            let fp = m * group.irrep_at_node(idx, w);
            let s = (n as f64).sqrt();
            for i in 0..n {
                for j in 0..n {
                    a[w * coords + c] = fp[(j, i)] * s;
                    c += 1;
                }
            }
        }
    }
    let weights: Vec<f64> = (0..nodes).map(|w| group.weight(w)).collect();
    let predicted_exact =
        (0..nodes).map(|w| weights[w] * complex_gaussian_abs_mean(&a[w * coords..(w + 1) * coords])).sum();
    let predicted = (2.0 / PI).sqrt() * ell2_norm(f);

    let mut samples = Vec::with_capacity(trials);
    let mut g = vec![0.0; coords];
    for _ in 0..trials {
        for x in g.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let mut integral = 0.0;
        for w in 0..nodes {
            let row = &a[w * coords..(w + 1) * coords];
            let z: Complex64 = row.iter().zip(&g).map(|(c, &x)| c * x).sum();
            integral += weights[w] * z.norm();
        }
        samples.push(integral);
    }
    let est = MonteCarloEstimate::from_samples(&samples);
    Ok(HelgasonGaussian { mean: est.mean, stderr: est.stderr, predicted, predicted_exact })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Lemma35 {
    pub bound: f64,
    pub actual: f64,
    /// Positive when the inequality holds.
    pub margin: f64,
}

/// Coefficient bounds for `π^k` on `SU(2)`:
/// upper `‖Σ_l A_{i,l} conj(u_{l,j})‖_∞ ≤ (Σ_l |A_{i,l}|²)^{1/2}`,
/// lower `‖Σ_l B_{i,l} u_{l,j}‖_1 ≥ (Σ_l |B_{i,l}|²)^{1/2} / n`.
pub fn lemma35_check(
    matrix: &CMatrix,
    k: usize,
    i: usize,
    j: usize,
    quad: &Su2Quadrature,
    side: Side,
) -> Result<Lemma35> {
    let n = k + 1;
    crate::linalg::ensure_square(matrix, n)?;
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange(i, j, n));
    }
    let row_norm = (0..n).map(|l| matrix[(i, l)].norm_sqr()).sum::<f64>().sqrt();
    let value_at = |w: usize| -> Complex64 {
        let u = quad.irrep_at_node(k, w);
        (0..n)
            .map(|l| match side {
                Side::Upper => matrix[(i, l)] * u[(l, j)].conj(),
                Side::Lower => matrix[(i, l)] * u[(l, j)],
            })
            .sum()
    };
    let out = match side {
        Side::Upper => {
            let actual = (0..quad.node_count()).map(|w| value_at(w).norm()).fold(0.0, f64::max);
            Lemma35 { bound: row_norm, actual, margin: row_norm - actual }
        }
        Side::Lower => {
            let actual: f64 = (0..quad.node_count()).map(|w| quad.weight(w) * value_at(w).norm()).sum();
            let bound = row_norm / n as f64;
            Lemma35 { bound, actual, margin: actual - bound }
        }
    };
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cotype2 {
    pub ratio: f64,
    pub stderr: f64,
}

/// `E‖Σ g_j x_j‖_{L¹} / (Σ ‖x_j‖²_{L¹})^{1/2}` with independent standard Gaussians `g_j`.
pub fn cotype2_ratio<G: ClassicalGroup, R: Rng + ?Sized>(
    xs: &[FourierCoeffs],
    group: &G,
    trials: usize,
    rng: &mut R,
) -> Result<Cotype2> {
    if xs.is_empty() {
        return Err(Error::Empty("cotype family"));
    }
    if trials == 0 {
        return Err(Error::Domain("trials must be positive".into()));
    }
    let nodes = group.node_count();
    let weights: Vec<f64> = (0..nodes).map(|w| group.weight(w)).collect();
    let values = xs.iter().map(|x| values_on_nodes(x, group)).collect::<Result<Vec<_>>>()?;
    let denom = values
        .iter()
        .map(|v| v.iter().zip(&weights).map(|(z, w)| w * z.norm()).sum::<f64>().powi(2))
        .sum::<f64>()
        .sqrt();
    if denom == 0.0 {
        return Err(Error::Domain("every function in the cotype family is zero".into()));
    }
    let mut samples = Vec::with_capacity(trials);
    let mut g = vec![0.0; xs.len()];
    for _ in 0..trials {
        for x in g.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let l1: f64 = (0..nodes)
            .map(|w| {
                let z: Complex64 = values.iter().zip(&g).map(|(v, &gj)| v[w] * gj).sum();
                weights[w] * z.norm()
            })
            .sum();
        samples.push(l1 / denom);
    }
    let est = MonteCarloEstimate::from_samples(&samples);
    Ok(Cotype2 { ratio: est.mean, stderr: est.stderr })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HelgasonInstance {
    pub sup_l1_over_u: f64,
    pub ell2: f64,
    /// `sup_l1_over_u / ell2`, or 0 for `f = 0`.
    pub ratio: f64,
}

/// Largest `‖f_U‖_{L¹}` over `num_unitaries` Haar families `U`, against `ℓ²(f)`.
pub fn helgason_instance_report<R: Rng + ?Sized>(
    f: &FourierCoeffs,
    group: &FiniteGroupTable,
    num_unitaries: usize,
    rng: &mut R,
) -> Result<HelgasonInstance> {
    group.check_dual(f.dual())?;
    let mut sup: f64 = 0.0;
    for _ in 0..num_unitaries {
        let u = MatrixFamily::haar(f.dual().clone(), rng);
        let fu = randomize(f, &u)?;
        sup = sup.max(l1_norm_classical(&fu, group)?);
    }
    let ell2 = ell2_norm(f);
    let ratio = if ell2 > 0.0 { sup / ell2 } else { 0.0 };
    Ok(HelgasonInstance { sup_l1_over_u: sup, ell2, ratio })
}
