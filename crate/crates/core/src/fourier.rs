//! Finitely supported Fourier-coefficient families `α ↦ f̂(α)` and the `ℓ^p` calculus on the dual.
//!
//! The polynomial attached to a family is `f = Σ_α d_α tr(f̂(α) Q_α u^α)`, i.e. the
//! coefficient of the matrix entry `u^α_{j,i}` is `d_α (f̂(α) Q_α)_{i,j}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dual::DualDescriptor;
use crate::error::{Error, Result};
use crate::linalg::{ensure_square, op_norm, trace, trace_norm, CMatrix, ZERO};

#[derive(Debug, Clone)]
pub struct FourierCoeffs {
    dual: Arc<DualDescriptor>,
    entries: BTreeMap<usize, CMatrix>,
}

impl FourierCoeffs {
    /// The zero family.
    pub fn zero(dual: Arc<DualDescriptor>) -> Self {
        Self {
            dual,
            entries: BTreeMap::new(),
        }
    }

    pub fn dual(&self) -> &Arc<DualDescriptor> {
        &self.dual
    }

    /// Sets the coefficient at irrep index `idx`.
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

    pub fn set_label(&mut self, label: &str, m: CMatrix) -> Result<()> {
        let idx = self.dual.index_of(label)?;
        self.set(idx, m)
    }

    pub fn with(mut self, idx: usize, m: CMatrix) -> Result<Self> {
        self.set(idx, m)?;
        Ok(self)
    }

    pub fn get(&self, idx: usize) -> Option<&CMatrix> {
        self.entries.get(&idx)
    }

    /// Iterates `(irrep index, coefficient)` in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &CMatrix)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn map(&self, mut f: impl FnMut(usize, &CMatrix) -> CMatrix) -> Self {
        Self {
            dual: self.dual.clone(),
            entries: self.entries.iter().map(|(&k, v)| (k, f(k, v))).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, m| m * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dual(&self.dual, &other.dual)?;
        let mut out = self.clone();
        for (&k, m) in &other.entries {
            out.entries
                .entry(k)
                .and_modify(|x| *x += m)
                .or_insert_with(|| m.clone());
        }
        Ok(out)
    }

    /// Largest entrywise deviation between two families on the union of their supports.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        same_dual(&self.dual, &other.dual)?;
        let mut worst: f64 = 0.0;
        let keys: std::collections::BTreeSet<usize> =
            self.entries.keys().chain(other.entries.keys()).copied().collect();
        for k in keys {
            let n = self.dual.irrep(k).n();
            let zero = CMatrix::zeros(n, n);
            let a = self.entries.get(&k).unwrap_or(&zero);
            let b = other.entries.get(&k).unwrap_or(&zero);
            worst = worst.max(crate::linalg::max_abs_diff(a, b));
        }
        Ok(worst)
    }

    /// Standard complex Gaussian entries on every irrep of the dual.
    pub fn random<R: Rng + ?Sized>(dual: Arc<DualDescriptor>, rng: &mut R) -> Self {
        let entries = dual
            .irreps()
            .iter()
            .enumerate()
            .map(|(k, a)| (k, random_complex_matrix(a.n(), rng)))
            .collect();
        Self { dual, entries }
    }

    /// Gaussian entries on a random nonempty subset of the irreps.
    pub fn random_sparse<R: Rng + ?Sized>(dual: Arc<DualDescriptor>, rng: &mut R) -> Self {
        let len = dual.len();
        let forced = rng.random_range(0..len);
        let mut entries = BTreeMap::new();
        for (k, a) in dual.irreps().iter().enumerate() {
            if k == forced || rng.random_bool(0.5) {
                entries.insert(k, random_complex_matrix(a.n(), rng));
            }
        }
        Self { dual, entries }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = CoeffsDoc {
            dual: self.dual.name().to_string(),
            entries: self
                .entries
                .iter()
                .map(|(&k, m)| EntryDoc {
                    label: self.dual.irrep(k).label().to_string(),
                    re: rows(m, |z| z.re),
                    im: rows(m, |z| z.im),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    /// Parses a serialized family against the dual it names.
    pub fn from_json(s: &str, dual: Arc<DualDescriptor>) -> Result<Self> {
        let doc: CoeffsDoc = serde_json::from_str(s)?;
        if doc.dual != dual.name() {
            return Err(Error::DualMismatch {
                left: doc.dual,
                right: dual.name().to_string(),
            });
        }
        let mut out = Self::zero(dual);
        for e in doc.entries {
            let n = e.re.len();
            let shape_ok = e.im.len() == n
                && e.re.iter().all(|r| r.len() == n)
                && e.im.iter().all(|r| r.len() == n);
            if !shape_ok {
                return Err(Error::InvalidDual(format!(
                    "entry `{}` is not a square re/im pair",
                    e.label
                )));
            }
            let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(e.re[i][j], e.im[i][j]));
            out.set_label(&e.label, m)?;
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffsDoc {
    dual: String,
    entries: Vec<EntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    label: String,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

fn rows(m: &CMatrix, part: impl Fn(&Complex64) -> f64) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| part(&m[(i, j)])).collect())
        .collect()
}

pub fn random_complex_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

pub fn random_real_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))
}

pub(crate) fn same_dual(a: &Arc<DualDescriptor>, b: &Arc<DualDescriptor>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::DualMismatch {
            left: a.name().to_string(),
            right: b.name().to_string(),
        })
    }
}

/// `sup_α ‖X_α‖`.
pub fn ell_infty_norm(x: &FourierCoeffs) -> f64 {
    ell_infty_norm_family(x.iter().map(|(_, m)| m))
}

pub(crate) fn ell_infty_norm_family<'a>(ms: impl Iterator<Item = &'a CMatrix>) -> f64 {
    ms.map(op_norm).fold(0.0, f64::max)
}

/// `(Σ_α d_α tr(Q_α X_α* X_α))^{1/2}`.
pub fn ell2_norm(x: &FourierCoeffs) -> f64 {
    ell2_norm_sq(x).sqrt()
}

pub fn ell2_norm_sq(x: &FourierCoeffs) -> f64 {
    x.iter()
        .map(|(k, m)| {
            let a = x.dual.irrep(k);
            let t = trace(&(a.q_matrix() * m.adjoint() * m)).re;
            a.quantum_dimension() * t
        })
        .sum()
}

/// `Σ_α d_α tr|X_α Q_α|`, trace norms from singular values.
pub fn ell1_norm(x: &FourierCoeffs) -> f64 {
    x.iter()
        .map(|(k, m)| {
            let a = x.dual.irrep(k);
            a.quantum_dimension() * trace_norm(&(m * a.q_matrix()))
        })
        .sum()
}

/// `Σ_α d_α tr(μ̂(α) Q_α f̂(α)*)`: linear in `mu`, conjugate-linear in `f`.
pub fn pairing(mu: &FourierCoeffs, f: &FourierCoeffs) -> Result<Complex64> {
    same_dual(&mu.dual, &f.dual)?;
    let mut acc = ZERO;
    for (k, m) in mu.iter() {
        if let Some(fm) = f.get(k) {
            let a = mu.dual.irrep(k);
            acc += trace(&(m * a.q_matrix() * fm.adjoint())) * a.quantum_dimension();
        }
    }
    Ok(acc)
}

/// Convolution on the dual side: `(f1 ∗ f2)^(α) = f̂2(α) f̂1(α)`.
///
/// The order follows from `f̂(α)_{i,j} = f((u_{j,i})*)` and `Δ(u_{i,j}) = Σ_k u_{i,k} ⊗ u_{k,j}`;
/// it is pinned against a brute-force group convolution in the tests.
pub fn convolve(f1: &FourierCoeffs, f2: &FourierCoeffs) -> Result<FourierCoeffs> {
    same_dual(&f1.dual, &f2.dual)?;
    let mut out = FourierCoeffs::zero(f1.dual.clone());
    for (k, a) in f1.iter() {
        if let Some(b) = f2.get(k) {
            out.entries.insert(k, b * a);
        }
    }
    Ok(out)
}

/// The family `Id_{n_α}` on every irrep of the dual: the convolution unit.
pub fn convolution_unit(dual: Arc<DualDescriptor>) -> FourierCoeffs {
    let entries = dual
        .irreps()
        .iter()
        .enumerate()
        .map(|(k, a)| (k, CMatrix::identity(a.n(), a.n())))
        .collect();
    FourierCoeffs { dual, entries }
}

/// Expansion of `f` in the matrix-coefficient basis: `(α, i, j) ↦` coefficient of `u^α_{i,j}`.
pub fn matrix_coefficients(f: &FourierCoeffs) -> Vec<(usize, CMatrix)> {
    f.iter()
        .map(|(k, m)| {
            let a = f.dual.irrep(k);
            // coefficient of u_{i,j} is d (f̂ Q)_{j,i}
            let fq = m * a.q_matrix();
            (k, fq.transpose() * Complex64::new(a.quantum_dimension(), 0.0))
        })
        .collect()
}

/// `‖f‖_{L²}` computed as `(Σ c̄_{s,t} c_{i,j} h((u_{s,t})* u_{i,j}))^{1/2}` from the Schur relations,
/// independently of the weighted Hilbert–Schmidt formula.
pub fn plancherel_gram_norm(f: &FourierCoeffs) -> f64 {
    let mut total = 0.0;
    for (k, c) in matrix_coefficients(f) {
        let a = f.dual.irrep(k);
        let n = a.n();
        let d = a.quantum_dimension();
        let q_inv = a.q_inv_matrix();
        // h((u_{s,t})* u_{i,j}) = δ_{j,t} (Q⁻¹)_{i,s} / d
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                for s in 0..n {
                    let g = q_inv[(i, s)];
                    if g == ZERO {
                        continue;
                    }
                    acc += c[(s, j)].conj() * c[(i, j)] * g / d;
                }
            }
        }
        total += acc.re;
    }
    total.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{make_su2_dual, make_suq2_dual, make_trivial_dual, IrrepData, DualFamily};
    use crate::linalg::{diag, identity};
    use crate::rng::RngSeed;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar(v: Complex64) -> CMatrix {
        CMatrix::from_element(1, 1, v)
    }

    fn kac2() -> Arc<DualDescriptor> {
        Arc::new(
            DualDescriptor::new(
                "kac2",
                DualFamily::Custom,
                vec![IrrepData::kac("0", 1).unwrap(), IrrepData::kac("1", 2).unwrap()],
            )
            .unwrap(),
        )
    }

    #[test]
    fn infinity_norm_examples() {
        let t = Arc::new(make_trivial_dual());
        assert_eq!(ell_infty_norm(&FourierCoeffs::zero(t.clone())), 0.0);
        let x = FourierCoeffs::zero(t).with(0, scalar(c(3.0, 4.0))).unwrap();
        assert!((ell_infty_norm(&x) - 5.0).abs() < 1e-15);
        let y = FourierCoeffs::zero(kac2()).with(1, diag(&[1.0, 2.0])).unwrap();
        assert!((ell_infty_norm(&y) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ell2_examples() {
        let t = Arc::new(make_trivial_dual());
        let x = FourierCoeffs::zero(t).with(0, scalar(c(3.0, -4.0))).unwrap();
        assert!((ell2_norm(&x) - 5.0).abs() < 1e-15);
        let dq = Arc::new(make_suq2_dual(0.5, 1).unwrap());
        let y = FourierCoeffs::zero(dq).with(1, identity(2)).unwrap();
        assert!((ell2_norm(&y) - 2.5).abs() < 1e-14);
        let z = FourierCoeffs::zero(kac2()).with(1, identity(2)).unwrap();
        assert!((ell2_norm(&z) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ell1_examples() {
        let t = Arc::new(make_trivial_dual());
        let x = FourierCoeffs::zero(t).with(0, scalar(c(0.0, -2.0))).unwrap();
        assert!((ell1_norm(&x) - 2.0).abs() < 1e-15);
        let y = FourierCoeffs::zero(kac2()).with(1, diag(&[1.0, -1.0])).unwrap();
        assert!((ell1_norm(&y) - 4.0).abs() < 1e-14);
        let dq = Arc::new(make_suq2_dual(0.5, 1).unwrap());
        let z = FourierCoeffs::zero(dq).with(1, identity(2)).unwrap();
        assert!((ell1_norm(&z) - 6.25).abs() < 1e-13);
    }

    #[test]
    fn trivial_dual_norms_coincide() {
        let t = Arc::new(make_trivial_dual());
        let x = FourierCoeffs::zero(t).with(0, scalar(c(-1.5, 0.25))).unwrap();
        let (a, b, e) = (ell_infty_norm(&x), ell2_norm(&x), ell1_norm(&x));
        assert!((a - b).abs() < 1e-15 && (b - e).abs() < 1e-15);
    }

    #[test]
    fn pairing_examples() {
        let t = Arc::new(make_trivial_dual());
        let mu = FourierCoeffs::zero(t.clone()).with(0, scalar(c(1.0, 2.0))).unwrap();
        let f = FourierCoeffs::zero(t).with(0, scalar(c(3.0, -1.0))).unwrap();
        let p = pairing(&mu, &f).unwrap();
        assert!((p - c(1.0, 2.0) * c(3.0, 1.0)).norm() < 1e-15);

        let dq = Arc::new(make_suq2_dual(0.5, 3).unwrap());
        let mut rng = RngSeed::new(1).rng();
        let g = FourierCoeffs::random(dq.clone(), &mut rng);
        let pp = pairing(&g, &g).unwrap();
        assert!((pp.re - ell2_norm_sq(&g)).abs() < 1e-12 * ell2_norm_sq(&g));
        assert!(pp.im.abs() < 1e-12 * ell2_norm_sq(&g));

        let a = FourierCoeffs::zero(dq.clone()).with(1, identity(2)).unwrap();
        let b = FourierCoeffs::zero(dq).with(2, identity(3)).unwrap();
        assert_eq!(pairing(&a, &b).unwrap(), ZERO);
    }

    #[test]
    fn pairing_rejects_other_dual() {
        let a = FourierCoeffs::zero(Arc::new(make_su2_dual(2).unwrap()));
        let b = FourierCoeffs::zero(Arc::new(make_suq2_dual(0.5, 2).unwrap()));
        assert!(matches!(pairing(&a, &b), Err(Error::DualMismatch { .. })));
        assert!(convolve(&a, &b).is_err());
    }

    #[test]
    fn convolve_scalars() {
        let t = Arc::new(make_trivial_dual());
        let a = FourierCoeffs::zero(t.clone()).with(0, scalar(c(2.0, 1.0))).unwrap();
        let b = FourierCoeffs::zero(t).with(0, scalar(c(0.0, 3.0))).unwrap();
        let r = convolve(&a, &b).unwrap();
        assert!((r.get(0).unwrap()[(0, 0)] - c(2.0, 1.0) * c(0.0, 3.0)).norm() < 1e-15);
    }

    #[test]
    fn plancherel_examples() {
        let t = Arc::new(make_trivial_dual());
        let x = FourierCoeffs::zero(t).with(0, scalar(c(0.6, 0.8))).unwrap();
        assert!((plancherel_gram_norm(&x) - 1.0).abs() < 1e-15);

        let dq = Arc::new(make_suq2_dual(0.5, 4).unwrap());
        let mut rng = RngSeed::new(3).rng();
        let f = FourierCoeffs::random(dq.clone(), &mut rng);
        let (a, b) = (plancherel_gram_norm(&f), ell2_norm(&f));
        assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn single_matrix_coefficient_norm() {
        // f = u_{r,s}: d (f̂ Q)_{s,r} = 1, so f̂ = E_{s,r} / (d Q_rr); h(u_{r,s}* u_{r,s}) = (Q⁻¹)_rr / d.
        let dq = Arc::new(make_suq2_dual(0.5, 2).unwrap());
        let a = dq.irrep(2);
        let d = a.quantum_dimension();
        for r in 0..3 {
            for s in 0..3 {
                let mut m = CMatrix::zeros(3, 3);
                m[(s, r)] = c(1.0 / (d * a.q_diag()[r]), 0.0);
                let f = FourierCoeffs::zero(dq.clone()).with(2, m).unwrap();
                let coeffs = matrix_coefficients(&f);
                assert!((coeffs[0].1[(r, s)] - c(1.0, 0.0)).norm() < 1e-14);
                let expected = (1.0 / a.q_diag()[r] / d).sqrt();
                assert!((plancherel_gram_norm(&f) - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let dq = Arc::new(make_suq2_dual(0.5, 3).unwrap());
        let mut rng = RngSeed::new(5).rng();
        let f = FourierCoeffs::random_sparse(dq.clone(), &mut rng);
        let s = f.to_json().unwrap();
        let back = FourierCoeffs::from_json(&s, dq).unwrap();
        assert_eq!(back.max_abs_diff(&f).unwrap(), 0.0);
        assert_eq!(back.to_json().unwrap(), s);
        let other = Arc::new(make_su2_dual(3).unwrap());
        assert!(FourierCoeffs::from_json(&s, other).is_err());
    }

    #[test]
    fn shape_checked() {
        let dq = Arc::new(make_suq2_dual(0.5, 3).unwrap());
        let mut f = FourierCoeffs::zero(dq);
        assert!(matches!(f.set(2, identity(2)), Err(Error::Shape { .. })));
        assert!(f.set(9, identity(1)).is_err());
        assert!(f.set_label("nope", identity(1)).is_err());
    }
}
