//! `SU_q(2)` arithmetic: the geometric-series chain behind `Σ d^{1−ε} tr(Q f̂* f̂) < ∞`,
//! and quantum-dimension growth tables.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dual::{DualDescriptor, DualFamily, POWER_GUARD};
use crate::error::{Error, Result};
use crate::fourier::FourierCoeffs;
use crate::linalg::CMatrix;

/// Relative slack for `lhs ≤ rhs`.
pub const CHAIN_REL_TOL: f64 = 1e-12;

/// `tr(Q X* X)` for diagonal `Q`.
fn weighted_gram_trace(q_diag: &[f64], x: &CMatrix) -> f64 {
    (0..x.ncols()).map(|j| q_diag[j] * (0..x.nrows()).map(|i| x[(i, j)].norm_sqr()).sum::<f64>()).sum()
}

/// `Σ (d_α/n_α) tr(Q_α f̂(α)* f̂(α))`.
pub fn nonkac_quantity(f: &FourierCoeffs) -> f64 {
    let dual = f.dual();
    f.iter()
        .map(|(idx, m)| {
            let irrep = dual.irrep(idx);
            irrep.quantum_dimension() / irrep.n() as f64 * weighted_gram_trace(irrep.q_diag(), m)
        })
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainTerm {
    pub k: usize,
    pub d: f64,
    pub trace: f64,
    /// `d_k ≥ q^{−k}`.
    pub dimension_ok: bool,
    /// `d_k^{1−ε} ≤ (k+1) q^{εk} d_k/n_k`.
    pub power_ok: bool,
    /// `(k+1) q^{εk} ≤ 1/(1−q^ε)²`.
    pub series_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryChain {
    pub lhs: f64,
    pub rhs: f64,
    pub termwise_ok: bool,
    pub terms: Vec<ChainTerm>,
}

impl CorollaryChain {
    pub fn holds(&self) -> bool {
        self.termwise_ok && self.lhs <= self.rhs * (1.0 + CHAIN_REL_TOL)
    }
}

/// `lhs = Σ d_k^{1−ε} tr(Q f̂* f̂)` against `rhs = nonkac_quantity(f) / (1−q^ε)²`, with each
/// inequality of the chain checked term by term (in log form).
pub fn corollary_chain_check(q: f64, eps: f64, f: &FourierCoeffs, kmax: usize) -> Result<CorollaryChain> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} must lie in (0, 1)")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    let dual = f.dual();
    match dual.family() {
        DualFamily::Suq2 { q: dq } if (dq - q).abs() <= 1e-15 * q.max(dq) => {}
        _ => return Err(Error::Domain(format!("dual {} is not SU_q(2) at q = {q}", dual.name()))),
    }
    if let Some(&top) = f.support().last() {
        if top > kmax {
            return Err(Error::Domain(format!("coefficient at k = {top} beyond kmax = {kmax}")));
        }
    }
    let ln_q = q.ln();
    let series = 1.0 / (1.0 - q.powf(eps)).powi(2);
    let ln_series = series.ln();
    let slack = CHAIN_REL_TOL.ln_1p();

    let mut lhs = 0.0;
    let mut nonkac = 0.0;
    let mut terms = Vec::new();
    for (k, m) in f.iter() {
        let irrep = dual.irrep(k);
        let n = irrep.n() as f64;
        let d = irrep.quantum_dimension();
        let tr = weighted_gram_trace(irrep.q_diag(), m);
        let ln_d = d.ln();
        let kf = k as f64;
        let dimension_ok = ln_d >= -kf * ln_q || d >= (-kf * ln_q).exp();
        let ln_power_lhs = (1.0 - eps) * ln_d;
        let ln_power_rhs = n.ln() + eps * kf * ln_q + ln_d - n.ln();
        let power_ok = ln_power_lhs <= ln_power_rhs + slack;
        let series_ok = n.ln() + eps * kf * ln_q <= ln_series + slack;
        if ln_power_lhs > POWER_GUARD.ln() {
            return Err(Error::Domain(format!("d_k^(1-eps) overflows at k = {k}")));
        }
        lhs += ln_power_lhs.exp() * tr;
        nonkac += d / n * tr;
        terms.push(ChainTerm { k, d, trace: tr, dimension_ok, power_ok, series_ok });
    }
    let rhs = nonkac * series;
    if !lhs.is_finite() || !rhs.is_finite() {
        return Err(Error::Domain("chain sums overflow".into()));
    }
    let termwise_ok = terms.iter().all(|t| t.dimension_ok && t.power_ok && t.series_ok);
    Ok(CorollaryChain { lhs, rhs, termwise_ok, terms })
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub k: usize,
    pub n: usize,
    pub d: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub dual: String,
    pub rows: Vec<GrowthRow>,
    /// For `SU_q(2)`, whether `d_k ≥ q^{−k}` on every row; `None` for other duals.
    pub suq2_bound_ok: Option<bool>,
}

impl GrowthReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,n,d,ratio\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{:e},{:e}", r.k, r.n, r.d, r.ratio);
        }
        out
    }
}

/// `(k, n_k, d_k, d_k/n_k)` for the first `kmax + 1` irreps.
pub fn growth_report(dual: &DualDescriptor, kmax: usize) -> GrowthReport {
    let rows: Vec<GrowthRow> = dual
        .irreps()
        .iter()
        .take(kmax + 1)
        .enumerate()
        .map(|(k, irrep)| {
            let d = irrep.quantum_dimension();
            GrowthRow { k, n: irrep.n(), d, ratio: d / irrep.n() as f64 }
        })
        .collect();
    let suq2_bound_ok = match dual.family() {
        DualFamily::Suq2 { q } => Some(rows.iter().all(|r| r.d >= q.powi(-(r.k as i32)))),
        _ => None,
    };
    GrowthReport { dual: dual.name().to_string(), rows, suq2_bound_ok }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{make_onplus_dual, make_su2_dual, make_suq2_dual, make_trivial_dual};
    use crate::fourier::ell2_norm_sq;
    use crate::linalg::identity;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn nonkac_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // Kac: d/n = 1 leaves the unweighted Σ tr(f̂* f̂)
        let su2 = Arc::new(make_su2_dual(5).unwrap());
        let f = FourierCoeffs::random(su2, &mut rng);
        let plain: f64 = f.iter().map(|(_, m)| crate::linalg::frobenius_sq(m)).sum();
        assert!((nonkac_quantity(&f) - plain).abs() < 1e-12 * plain);
        // all n = 1: this is ℓ²(f)²
        let z5 = crate::classical::cyclic_group(5).unwrap();
        let f = FourierCoeffs::random(z5.dual().clone(), &mut rng);
        assert!((nonkac_quantity(&f) - ell2_norm_sq(&f)).abs() < 1e-12 * ell2_norm_sq(&f));

        let triv = Arc::new(make_trivial_dual());
        let c = Complex64::new(1.0, -2.0);
        let f = FourierCoeffs::zero(triv).with(0, CMatrix::from_element(1, 1, c)).unwrap();
        assert!((nonkac_quantity(&f) - 5.0).abs() < 1e-15);

        let suq = Arc::new(make_suq2_dual(0.5, 3).unwrap());
        let f = FourierCoeffs::zero(suq).with(1, identity(2)).unwrap();
        assert!((nonkac_quantity(&f) - 3.125).abs() < 1e-14);
    }

    #[test]
    fn chain_trivial_support() {
        let q = 0.5;
        let suq = Arc::new(make_suq2_dual(q, 4).unwrap());
        let f = FourierCoeffs::zero(suq).with(0, identity(1)).unwrap();
        let r = corollary_chain_check(q, 0.5, &f, 4).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15);
        assert!((r.rhs - 1.0 / (1.0 - q.sqrt()).powi(2)).abs() < 1e-12);
        assert!(r.holds());
    }

    #[test]
    fn chain_random_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &q in &[0.3, 0.5, 0.9] {
            let dual = Arc::new(make_suq2_dual(q, 60).unwrap());
            for &eps in &[0.1, 0.5, 1.0] {
                for _ in 0..3 {
                    let f = FourierCoeffs::random_sparse(dual.clone(), &mut rng);
                    let r = corollary_chain_check(q, eps, &f, 60).unwrap();
                    assert!(r.holds(), "q={q} eps={eps}: {} vs {}", r.lhs, r.rhs);
                }
            }
        }
    }

    #[test]
    fn chain_rejects_bad_input() {
        let dual = Arc::new(make_suq2_dual(0.5, 4).unwrap());
        let f = FourierCoeffs::zero(dual).with(4, identity(5)).unwrap();
        assert!(corollary_chain_check(1.0, 0.5, &f, 4).is_err());
        assert!(corollary_chain_check(0.5, 0.0, &f, 4).is_err());
        assert!(corollary_chain_check(0.3, 0.5, &f, 4).is_err());
        assert!(corollary_chain_check(0.5, 0.5, &f, 3).is_err());
    }

    #[test]
    fn growth_tables() {
        let su2 = make_su2_dual(10).unwrap();
        let r = growth_report(&su2, 10);
        assert!(r.rows.iter().all(|row| row.ratio == 1.0));
        assert_eq!(r.suq2_bound_ok, None);

        let suq = make_suq2_dual(0.5, 40).unwrap();
        let r = growth_report(&suq, 40);
        assert_eq!(r.suq2_bound_ok, Some(true));
        assert!(r.rows.iter().all(|row| row.d >= 2f64.powi(row.k as i32)));

        let o3 = make_onplus_dual(3, 8).unwrap();
        let r = growth_report(&o3, 8);
        assert!(r.rows.windows(2).all(|w| w[1].n > w[0].n));
        let csv = r.to_csv();
        assert!(csv.starts_with("k,n,d,ratio\n"));
        assert_eq!(csv.lines().count(), 10);
    }
}
