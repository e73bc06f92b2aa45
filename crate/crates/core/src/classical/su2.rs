//! `SU(2)`: spin-`k/2` irreps and a product quadrature for the Haar integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ONE, ZERO};

/// Input tolerance for special unitarity.
pub const SU2_INPUT_TOL: f64 = 1e-10;
/// Tolerance of the quadrature exactness test.
pub const QUADRATURE_TOL: f64 = 1e-8;
pub const DEFAULT_RESOLUTION: usize = 8;

/// `[[a, -conj(b)], [b, conj(a)]]`.
pub fn su2_from_ab(a: Complex64, b: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()])
}

/// Hopf coordinates: `a = cos η·e^{iξ₁}`, `b = sin η·e^{iξ₂}`.
pub fn su2_element(eta: f64, xi1: f64, xi2: f64) -> CMatrix {
    su2_from_ab(Complex64::from_polar(eta.cos(), xi1), Complex64::from_polar(eta.sin(), xi2))
}

/// `diag(e^{iθ}, e^{−iθ})`.
pub fn rotation(theta: f64) -> CMatrix {
    su2_from_ab(Complex64::from_polar(1.0, theta), ZERO)
}

/// Haar-distributed element (normalized Gaussian point on the 3-sphere).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    su2_from_ab(Complex64::new(v[0] / r, v[1] / r), Complex64::new(v[2] / r, v[3] / r))
}

fn check_special_unitary(g: &CMatrix) -> Result<()> {
    if g.nrows() != 2 || g.ncols() != 2 {
        return Err(Error::Shape { expected: 2, rows: g.nrows(), cols: g.ncols() });
    }
    let defect = crate::linalg::unitarity_defect(g);
    if defect > SU2_INPUT_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    if (det - ONE).norm() > SU2_INPUT_TOL {
        return Err(Error::Domain(format!("determinant {det} is not 1")));
    }
    Ok(())
}

/// Spin-`k/2` irrep of `g`: the action `x ↦ ax + cy`, `y ↦ bx + dy` on degree-`k` polynomials
/// in the orthonormal basis `√C(k,m)·x^{k−m}y^m`.
pub fn su2_irrep_matrix(k: usize, g: &CMatrix) -> Result<CMatrix> {
    check_special_unitary(g)?;
    Ok(irrep_unchecked(k, g))
}

pub(crate) fn irrep_unchecked(k: usize, g: &CMatrix) -> CMatrix {
    let (a, b, c, d) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let binom = binomial_row(k);
    let mut out = CMatrix::zeros(k + 1, k + 1);
    // powers[r] = (p, q)^r expanded in y-degree
    let expand = |p: Complex64, q: Complex64, r: usize| -> Vec<Complex64> {
        let row = binomial_row(r);
        let mut pp = vec![ONE; r + 1];
        let mut qq = vec![ONE; r + 1];
        for s in 1..=r {
            pp[s] = pp[s - 1] * p;
            qq[s] = qq[s - 1] * q;
        }
        (0..=r).map(|s| pp[r - s] * qq[s] * row[s]).collect()
    };
    for m in 0..=k {
        let left = expand(a, c, k - m);
        let right = expand(b, d, m);
        let scale_m = binom[m].sqrt();
        for (s, &ls) in left.iter().enumerate() {
            if ls == ZERO {
                continue;
            }
            for (t, &rt) in right.iter().enumerate() {
                out[(s + t, m)] += ls * rt;
            }
        }
        for l in 0..=k {
            out[(l, m)] *= scale_m / binom[l].sqrt();
        }
    }
    out
}

fn binomial_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0; k + 1];
    for m in 1..=k {
        row[m] = row[m - 1] * (k + 1 - m) as f64 / m as f64;
    }
    row
}

/// Character `χ_k` at `diag(e^{iθ}, e^{−iθ})`.
pub fn su2_character_at(k: usize, theta: f64) -> f64 {
    let s = theta.sin();
    if s.abs() < 1e-12 {
        let sign: f64 = if (theta / PI).round() as i64 % 2 == 0 { 1.0 } else { -1.0 };
        return (k + 1) as f64 * sign.powi(k as i32);
    }
    ((k + 1) as f64 * theta).sin() / s
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Product rule for the Haar integral on `SU(2)`.
///
/// With `t = cos 2η` uniform on `[−1, 1]` and both phases uniform, Haar measure is the
/// product measure; `t` uses Gauss–Legendre and the phases equispaced grids.
#[derive(Debug, Clone)]
pub struct Su2Quadrature {
    nodes: Vec<CMatrix>,
    weights: Vec<f64>,
    resolution: usize,
    kmax_valid: usize,
}

impl Su2Quadrature {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 4 {
            return Err(Error::Domain(format!("quadrature resolution {resolution} < 4")));
        }
        let (ts, tw) = gauss_legendre(resolution);
        let m = 2 * resolution;
        let phase_w = 1.0 / (m * m) as f64;
        let mut nodes = Vec::with_capacity(resolution * m * m);
        let mut weights = Vec::with_capacity(resolution * m * m);
        for (&t, &w) in ts.iter().zip(&tw) {
            let eta = 0.5 * t.clamp(-1.0, 1.0).acos();
            for p in 0..m {
                let xi1 = 2.0 * PI * p as f64 / m as f64;
                for r in 0..m {
                    let xi2 = 2.0 * PI * r as f64 / m as f64;
                    nodes.push(su2_element(eta, xi1, xi2));
                    weights.push(0.5 * w * phase_w);
                }
            }
        }
        let mut quad = Self { nodes, weights, resolution, kmax_valid: 0 };
        quad.kmax_valid = quad.measure_kmax_valid();
        Ok(quad)
    }

    pub fn nodes(&self) -> &[CMatrix] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Largest `k` for which Schur orthogonality among irreps `0..=k` holds to 1e-8.
    pub fn kmax_valid(&self) -> usize {
        self.kmax_valid
    }

    /// `∫ π^k(g) dg` by the rule.
    pub fn integrate_irrep(&self, k: usize) -> CMatrix {
        let mut acc = CMatrix::zeros(k + 1, k + 1);
        for (g, &w) in self.nodes.iter().zip(&self.weights) {
            acc += irrep_unchecked(k, g) * Complex64::new(w, 0.0);
        }
        acc
    }

    /// Max deviation of the rule's Gram `∫ conj(π^l_{st}) π^k_{ij}` from `δ/(k+1)`.
    pub fn schur_defect(&self, k: usize, l: usize) -> f64 {
        let (nk, nl) = (k + 1, l + 1);
        let mut gram = CMatrix::zeros(nk * nk, nl * nl);
        for (g, &w) in self.nodes.iter().zip(&self.weights) {
            let pk = irrep_unchecked(k, g);
            let pl = if k == l { pk.clone() } else { irrep_unchecked(l, g) };
            for a in 0..nk * nk {
                let x = pk[(a / nk, a % nk)] * w;
                for b in 0..nl * nl {
                    gram[(a, b)] += x * pl[(b / nl, b % nl)].conj();
                }
            }
        }
        let mut err: f64 = 0.0;
        for a in 0..nk * nk {
            for b in 0..nl * nl {
                let want = if k == l && a == b { 1.0 / nk as f64 } else { 0.0 };
                err = err.max((gram[(a, b)] - want).norm());
            }
        }
        err
    }

    /// Products of coefficients of `π^k` and `conj(π^l)` decompose into coefficients of
    /// `π^j`, `|k−l| ≤ j ≤ k+l`, so Schur orthogonality up to `K` is equivalent to exact
    /// integration of every coefficient of `π^j` for `j ≤ 2K`.
    fn measure_kmax_valid(&self) -> usize {
        let mut j = 1;
        loop {
            let m = self.integrate_irrep(j);
            let err = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if err > QUADRATURE_TOL || j > 8 * self.resolution {
                return (j - 1) / 2;
            }
            j += 1;
        }
    }
}

impl Default for Su2Quadrature {
    fn default() -> Self {
        Self::new(DEFAULT_RESOLUTION).expect("default resolution is valid")
    }
}

pub fn make_su2_quadrature(resolution: usize) -> Result<Su2Quadrature> {
    Su2Quadrature::new(resolution)
}

/// `h(|χ_k|) = (2/π)∫₀^π |sin((k+1)θ) sin θ| dθ` by Weyl's integration formula.
///
/// The integrand is analytic between consecutive zeros `jπ/(k+1)`, so each lobe gets its
/// own Gauss–Legendre rule.
pub fn character_l1(k: usize) -> f64 {
    let m = (k + 1) as f64;
    let (xs, ws) = gauss_legendre(24);
    let mut total = 0.0;
    for lobe in 0..=k {
        let lo = lobe as f64 * PI / m;
        let hi = (lobe + 1) as f64 * PI / m;
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let part: f64 = xs
            .iter()
            .zip(&ws)
            .map(|(&x, &w)| {
                let th = mid + half * x;
                w * ((m * th).sin() * th.sin()).abs()
            })
            .sum();
        total += part * half;
    }
    total * 2.0 / PI
}

/// `∫ |χ_k|` directly on the three-dimensional rule; only accurate for small `k`.
pub fn character_l1_on(k: usize, quad: &Su2Quadrature) -> f64 {
    quad.nodes
        .iter()
        .zip(&quad.weights)
        .map(|(g, &w)| {
            let theta = g[(0, 0)].re.clamp(-1.0, 1.0).acos();
            w * su2_character_at(k, theta).abs()
        })
        .sum()
}
