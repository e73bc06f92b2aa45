//! Exact Schur-orthogonality data and the operators built from it: the block norm of the
//! multiplier operator `T_B`, the pairing identity for `h(x)`, trace-norm duality and central
//! coefficient families.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::dual::{DualDescriptor, IrrepData};
use crate::error::{Error, Result};
use crate::fourier::{ell2_norm_sq, same_dual, FourierCoeffs};
use crate::linalg::{ensure_square, trace, trace_norm, CMatrix, ZERO};
use crate::random_series::{haar_unitary, MatrixFamily};

/// Diagonal Haar Gram weights of one irrep block.
///
/// `gram_u[(i, j)] = h((u_{i,j})* u_{i,j}) = (Q⁻¹)_{i,i} / d` and
/// `gram_ustar[(i, j)] = h(u_{i,j} (u_{i,j})*) = Q_{j,j} / d`.
#[derive(Debug, Clone)]
pub struct BlockGram {
    pub gram_u: DMatrix<f64>,
    pub gram_ustar: DMatrix<f64>,
}

impl BlockGram {
    pub fn new(irrep: &IrrepData) -> Self {
        let n = irrep.n();
        let d = irrep.quantum_dimension();
        let q = irrep.q_diag();
        Self {
            gram_u: DMatrix::from_fn(n, n, |i, _| 1.0 / q[i] / d),
            gram_ustar: DMatrix::from_fn(n, n, |_, j| q[j] / d),
        }
    }
}

fn check_index(irrep: &IrrepData, (i, j): (usize, usize)) -> Result<()> {
    let n = irrep.n();
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange(i, j, n));
    }
    Ok(())
}

/// `h((u_{s,t})* u_{i,j}) = δ_{j,t} (Q⁻¹)_{i,s} / tr Q`.
pub fn schur_inner(irrep: &IrrepData, ij: (usize, usize), st: (usize, usize)) -> Result<Complex64> {
    check_index(irrep, ij)?;
    check_index(irrep, st)?;
    let ((i, j), (s, t)) = (ij, st);
    if j != t {
        return Ok(ZERO);
    }
    let q_inv = irrep.q_inv_matrix();
    Ok(q_inv[(i, s)] / irrep.quantum_dimension())
}

/// `h(u_{s,t} (u_{i,j})*) = δ_{i,s} Q_{j,t} / tr Q`.
pub fn schur_inner_conjugate(
    irrep: &IrrepData,
    ij: (usize, usize),
    st: (usize, usize),
) -> Result<Complex64> {
    check_index(irrep, ij)?;
    check_index(irrep, st)?;
    let ((i, j), (s, t)) = (ij, st);
    if i != s {
        return Ok(ZERO);
    }
    let q = irrep.q_matrix();
    Ok(q[(j, t)] / irrep.quantum_dimension())
}

/// Operator norm of `T_B: u_{j,i} ↦ Σ_p (Q⁻¹)_{j,j} (u_{p,j})* B_{p,i}` on the `L²` span of
/// one irrep block.
///
/// The domain coordinate `c_{i,j}` multiplies `u_{j,i}`, the codomain coordinate `e_{p,j}`
/// multiplies `(u_{p,j})*`, and the norm is the top singular value of
/// `D₂^{1/2} M D₁^{-1/2}` with the diagonal Gram weights `D₁`, `D₂`.
pub fn tb_block_norm(b: &CMatrix, irrep: &IrrepData) -> Result<f64> {
    let n = irrep.n();
    ensure_square(b, n)?;
    let gram = BlockGram::new(irrep);
    let q_inv = irrep.q_inv_diag();
    let dim = n * n;
    let dom = |i: usize, j: usize| i * n + j;
    let cod = |p: usize, j: usize| p * n + j;
    let mut m = CMatrix::zeros(dim, dim);
    // e_{p,j} = Σ_i c_{i,j} (Q⁻¹)_{j,j} B_{p,i}
    for p in 0..n {
        for j in 0..n {
            for i in 0..n {
                let w_dom = gram.gram_u[(j, i)];
                let w_cod = gram.gram_ustar[(p, j)];
                let scale = (w_cod / w_dom).sqrt() * q_inv[j];
                m[(cod(p, j), dom(i, j))] = b[(p, i)] * scale;
            }
        }
    }
    Ok(crate::linalg::op_norm(&m))
}

/// Both sides of `h(x) = Σ_α n_α tr(f̂(α) Q_α B_α)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HxIdentity {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub deviation: f64,
}

/// `lhs` expands `x = Σ d (f̂Q)_{i,j} (Q⁻¹)_{k,k} B_{p,i} u_{j,k} (u_{p,k})*` and applies the Haar
/// state term by term through [`schur_inner_conjugate`]; `rhs` is the trace formula.
pub fn hx_pairing_identity(f: &FourierCoeffs, b: &MatrixFamily) -> Result<HxIdentity> {
    same_dual(f.dual(), b.dual())?;
    let mut lhs = ZERO;
    let mut rhs = ZERO;
    for (k, fhat) in f.iter() {
        let Some(bm) = b.get(k) else { continue };
        let a = f.dual().irrep(k);
        let n = a.n();
        let d = a.quantum_dimension();
        let fq = fhat * a.q_matrix();
        let q_inv = a.q_inv_diag();
        for i in 0..n {
            for j in 0..n {
                for kk in 0..n {
                    for p in 0..n {
                        let coeff = fq[(i, j)] * d * q_inv[kk] * bm[(p, i)];
                        if coeff == ZERO {
                            continue;
                        }
                        // h(u_{j,k} (u_{p,k})*)
                        lhs += coeff * schur_inner_conjugate(a, (p, kk), (j, kk))?;
                    }
                }
            }
        }
        rhs += trace(&(&fq * bm)) * n as f64;
    }
    Ok(HxIdentity {
        lhs,
        rhs,
        deviation: (lhs - rhs).norm(),
    })
}

/// `tr|A|` three ways.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceDuality {
    /// Sum of singular values.
    pub exact: f64,
    /// `Re tr(U₀ A)` for the unitary `U₀ = V W*` built from `A = W Σ V*`.
    pub aligned: f64,
    /// Running maximum of `Re tr(U A)` over Haar-random `U`.
    pub random_sup: f64,
}

/// The unitary `V W*` attaining `tr(U A) = tr|A|`.
pub fn aligned_unitary(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let svd = a.clone().svd(true, true);
    let w = svd.u.expect("left singular vectors");
    let v_t = svd.v_t.expect("right singular vectors");
    // Square A gives square, unitary W and V even when A is rank deficient.
    v_t.adjoint() * w.adjoint()
}

pub fn trace_norm_duality<R: Rng + ?Sized>(a: &CMatrix, trials: usize, rng: &mut R) -> Result<TraceDuality> {
    let n = a.nrows();
    ensure_square(a, n)?;
    let exact = trace_norm(a);
    let aligned = if n == 0 {
        0.0
    } else {
        trace(&(aligned_unitary(a) * a)).re
    };
    let mut random_sup = f64::NEG_INFINITY;
    for _ in 0..trials {
        let u = haar_unitary(n, rng);
        random_sup = random_sup.max(trace(&(u * a)).re);
    }
    if trials == 0 {
        random_sup = 0.0;
    }
    Ok(TraceDuality {
        exact,
        aligned,
        random_sup,
    })
}

/// Central family `f̂(α) = (c_α / d_α) Q_α⁻¹` on the first `c.len()` irreps.
pub fn central_coeffs(c: &[Complex64], dual: Arc<DualDescriptor>) -> Result<FourierCoeffs> {
    if c.len() > dual.len() {
        return Err(Error::Domain(format!(
            "{} central coefficients for a dual with {} irreps",
            c.len(),
            dual.len()
        )));
    }
    let mut f = FourierCoeffs::zero(dual.clone());
    for (k, &ck) in c.iter().enumerate() {
        let a = dual.irrep(k);
        f.set(k, a.q_inv_matrix() * (ck / a.quantum_dimension()))?;
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CentralSum {
    pub ell2_sq: f64,
    pub sum_c_sq: f64,
    pub deviation: f64,
}

/// `‖central_coeffs(c)‖₂² = Σ |c_α|²`.
pub fn central_sum_check(c: &[Complex64], dual: Arc<DualDescriptor>) -> Result<CentralSum> {
    let f = central_coeffs(c, dual)?;
    let ell2_sq = ell2_norm_sq(&f);
    let sum_c_sq: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    Ok(CentralSum {
        ell2_sq,
        sum_c_sq,
        deviation: (ell2_sq - sum_c_sq).abs(),
    })
}

/// Multiplier with `‖B‖ ≤ 1`: a complex Gaussian matrix rescaled to a uniform radius in `(0, 1]`.
pub fn random_ball_multiplier<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let radius: f64 = 1.0 - rng.random::<f64>();
    crate::random_series::random_contraction(n, radius, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{make_su2_dual, make_suq2_dual, make_trivial_dual, IrrepData};
    use crate::fourier::ell2_norm;
    use crate::linalg::{diag, identity, op_norm};
    use crate::rng::RngSeed;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn schur_examples() {
        let t = IrrepData::kac("0", 1).unwrap();
        assert_eq!(schur_inner(&t, (0, 0), (0, 0)).unwrap(), c(1.0, 0.0));
        let k2 = IrrepData::kac("1", 2).unwrap();
        assert_eq!(schur_inner(&k2, (0, 1), (0, 1)).unwrap(), c(0.5, 0.0));
        let dq = make_suq2_dual(0.5, 1).unwrap();
        let a = dq.irrep(1);
        for ij in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            for st in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let v = schur_inner(a, ij, st).unwrap();
                if ij != st {
                    assert_eq!(v, ZERO);
                }
            }
        }
        assert!(schur_inner(a, (2, 0), (0, 0)).is_err());
    }

    #[test]
    fn block_gram_weights() {
        let k3 = IrrepData::kac("k", 3).unwrap();
        let g = BlockGram::new(&k3);
        assert!(g.gram_u.iter().chain(g.gram_ustar.iter()).all(|&w| (w - 1.0 / 3.0).abs() < 1e-15));
        let dq = make_suq2_dual(0.5, 2).unwrap();
        let a = dq.irrep(2);
        let g = BlockGram::new(a);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c(g.gram_u[(i, j)], 0.0), schur_inner(a, (i, j), (i, j)).unwrap());
                assert_eq!(c(g.gram_ustar[(i, j)], 0.0), schur_inner_conjugate(a, (i, j), (i, j)).unwrap());
            }
        }
    }

    #[test]
    fn tb_zero_and_identity() {
        let su2 = make_su2_dual(3).unwrap();
        for a in su2.irreps() {
            assert_eq!(tb_block_norm(&CMatrix::zeros(a.n(), a.n()), a).unwrap(), 0.0);
            assert!((tb_block_norm(&identity(a.n()), a).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(tb_block_norm(&identity(2), su2.irrep(2)).is_err());
    }

    #[test]
    fn tb_identity_is_isometry_on_kac_block() {
        // Direct Gram computation at n = 2: every basis vector u_{j,i} has squared norm 1/2 and
        // T_I sends it to (u_{i,j})* (up to the Q⁻¹ = I factor) which also has squared norm 1/2.
        let a = IrrepData::kac("1", 2).unwrap();
        let g = BlockGram::new(&a);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g.gram_u[(j, i)], g.gram_ustar[(i, j)]);
            }
        }
        assert!((tb_block_norm(&identity(2), &a).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tb_contraction_suq2() {
        let dq = make_suq2_dual(0.5, 2).unwrap();
        let a = dq.irrep(2);
        let mut rng = RngSeed::new(21).rng();
        for _ in 0..100 {
            let b = random_ball_multiplier(3, &mut rng);
            assert!(op_norm(&b) <= 1.0 + 1e-12);
            assert!(tb_block_norm(&b, a).unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn tb_is_homogeneous() {
        let dq = make_suq2_dual(0.3, 3).unwrap();
        let a = dq.irrep(3);
        let mut rng = RngSeed::new(5).rng();
        let b = crate::fourier::random_complex_matrix(4, &mut rng);
        let base = tb_block_norm(&b, a).unwrap();
        let scaled = tb_block_norm(&(&b * c(0.0, -2.5)), a).unwrap();
        assert!((scaled - 2.5 * base).abs() <= 1e-12 * scaled);
    }

    #[test]
    fn tb_norm_matches_proof_quadratic_form() {
        // ‖T_B v‖² = tr(Q⁻¹ C* B* B C)/d and ‖v‖² = tr(Q⁻¹ C* C)/d; check the ratio on random C.
        let dq = make_suq2_dual(0.5, 2).unwrap();
        let a = dq.irrep(2);
        let d = a.quantum_dimension();
        let mut rng = RngSeed::new(44).rng();
        let b = random_ball_multiplier(3, &mut rng);
        let bound = tb_block_norm(&b, a).unwrap();
        for _ in 0..50 {
            let cm = crate::fourier::random_complex_matrix(3, &mut rng);
            let num = trace(&(a.q_inv_matrix() * cm.adjoint() * b.adjoint() * &b * &cm)).re / d;
            let den = trace(&(a.q_inv_matrix() * cm.adjoint() * &cm)).re / d;
            assert!(num <= den * bound * bound * (1.0 + 1e-12));
            assert!(num <= den * (1.0 + 1e-12));
        }
    }

    #[test]
    fn hx_cases() {
        let t = Arc::new(make_trivial_dual());
        let f = FourierCoeffs::zero(t.clone())
            .with(0, CMatrix::from_element(1, 1, c(2.0, 1.0)))
            .unwrap();
        let mut b = MatrixFamily::new(t);
        b.set(0, CMatrix::from_element(1, 1, c(0.5, -1.0))).unwrap();
        let r = hx_pairing_identity(&f, &b).unwrap();
        assert!((r.rhs - c(2.0, 1.0) * c(0.5, -1.0)).norm() < 1e-15);
        assert!(r.deviation < 1e-15);

        let dq = Arc::new(make_suq2_dual(0.5, 4).unwrap());
        let mut rng = RngSeed::new(9).rng();
        let f = FourierCoeffs::random(dq.clone(), &mut rng);
        let b = MatrixFamily::from_fn(dq.clone(), |_, n| random_ball_multiplier(n, &mut rng));
        let r = hx_pairing_identity(&f, &b).unwrap();
        assert!(r.deviation <= 1e-12 * (1.0 + r.rhs.norm()));

        let zero = MatrixFamily::from_fn(dq, |_, n| CMatrix::zeros(n, n));
        let r = hx_pairing_identity(&f, &zero).unwrap();
        assert_eq!(r.lhs, ZERO);
        assert_eq!(r.rhs, ZERO);
    }

    #[test]
    fn trace_duality_cases() {
        let mut rng = RngSeed::new(3).rng();
        let r = trace_norm_duality(&diag(&[1.0, -2.0]), 100, &mut rng).unwrap();
        assert!((r.exact - 3.0).abs() < 1e-14);
        assert!((r.aligned - 3.0).abs() < 1e-10);
        assert!(r.random_sup <= r.exact + 1e-12);

        let r = trace_norm_duality(&CMatrix::zeros(3, 3), 10, &mut rng).unwrap();
        assert_eq!(r.exact, 0.0);
        assert!(r.aligned.abs() < 1e-15);
        assert!(r.random_sup.abs() < 1e-15);
    }

    #[test]
    fn aligned_unitary_rank_deficient() {
        let mut rng = RngSeed::new(31).rng();
        let v = crate::fourier::random_complex_matrix(4, &mut rng);
        let mut a = CMatrix::zeros(4, 4);
        a.set_column(0, &v.column(0));
        a.set_column(2, &(v.column(0) * c(0.0, 2.0)));
        let u = aligned_unitary(&a);
        assert!(crate::linalg::unitarity_defect(&u) < 1e-12);
        assert!((trace(&(u * &a)).re - trace_norm(&a)).abs() < 1e-10);
    }

    #[test]
    fn random_sup_is_prefix_monotone() {
        let a = crate::fourier::random_complex_matrix(3, &mut RngSeed::new(2).rng());
        let mut prev = f64::NEG_INFINITY;
        for trials in [1, 10, 100, 1000] {
            let r = trace_norm_duality(&a, trials, &mut RngSeed::new(77).rng()).unwrap();
            assert!(r.random_sup >= prev);
            prev = r.random_sup;
        }
    }

    #[test]
    fn central_examples() {
        let t = Arc::new(make_trivial_dual());
        let f = central_coeffs(&[c(5.0, 0.0)], t).unwrap();
        assert_eq!(f.get(0).unwrap()[(0, 0)], c(5.0, 0.0));

        let k = Arc::new(make_su2_dual(1).unwrap());
        let f = central_coeffs(&[ZERO, c(1.0, 0.0)], k).unwrap();
        assert!(crate::linalg::max_abs_diff(f.get(1).unwrap(), &(identity(2) * c(0.5, 0.0))) < 1e-15);

        let dq = Arc::new(make_suq2_dual(0.5, 1).unwrap());
        let f = central_coeffs(&[ZERO, c(1.0, 0.0)], dq.clone()).unwrap();
        let expected = dq.irrep(1).q_inv_matrix() * c(1.0 / 2.5, 0.0);
        assert!(crate::linalg::max_abs_diff(f.get(1).unwrap(), &expected) < 1e-15);
        // f̂ Q = (c/d) Id
        let fq = f.get(1).unwrap() * dq.irrep(1).q_matrix();
        assert!(crate::linalg::max_abs_diff(&fq, &(identity(2) * c(0.4, 0.0))) < 1e-15);

        assert!(central_coeffs(&[ZERO; 3], dq).is_err());
    }

    #[test]
    fn central_sum_cases() {
        let dq = Arc::new(make_suq2_dual(0.5, 2).unwrap());
        let r = central_sum_check(&[ZERO; 3], dq.clone()).unwrap();
        assert_eq!((r.ell2_sq, r.sum_c_sq), (0.0, 0.0));
        let r = central_sum_check(&[c(1.0, 0.0); 3], dq.clone()).unwrap();
        assert!((r.sum_c_sq - 3.0).abs() < 1e-15);
        assert!((r.ell2_sq - 3.0).abs() < 1e-12 * 3.0);
        let mut rng = RngSeed::new(8).rng();
        let cs: Vec<Complex64> = (0..3).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>())).collect();
        let r = central_sum_check(&cs, dq.clone()).unwrap();
        assert!(r.deviation <= 1e-12 * r.sum_c_sq);
        let f = central_coeffs(&cs, dq).unwrap();
        assert!((ell2_norm(&f).powi(2) - r.sum_c_sq).abs() <= 1e-12 * r.sum_c_sq);
    }
}
