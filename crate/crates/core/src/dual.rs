//! Discrete-dual descriptors: irreducible representations with their classical dimensions,
//! diagonal deformation matrices `Q` and quantum dimensions `d = tr Q = tr Q⁻¹`.
//!
//! Every dual is a finite truncation `0..=kmax` of the full index set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{diag, CMatrix};

/// Relative tolerance for `tr Q == tr Q⁻¹`.
pub const TRACE_TOL: f64 = 1e-12;
/// Absolute tolerance on `|Q_ii - 1|` for the Kac flag.
pub const KAC_TOL: f64 = 1e-12;
/// Largest classical dimension materialized in a descriptor.
pub const MAX_IRREP_DIM: usize = 4096;
/// Powers beyond this magnitude are rejected instead of risking overflow downstream.
pub const POWER_GUARD: f64 = 1e280;

#[derive(Debug, Clone, PartialEq)]
pub struct IrrepData {
    label: String,
    q_diag: Vec<f64>,
    d: f64,
}

impl IrrepData {
    pub fn new(label: impl Into<String>, q_diag: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if q_diag.is_empty() {
            return Err(Error::InvalidDual(format!("irrep `{label}` has dimension 0")));
        }
        if let Some(bad) = q_diag.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidDual(format!(
                "irrep `{label}` has non-positive Q entry {bad}"
            )));
        }
        let d: f64 = q_diag.iter().sum();
        let d_inv: f64 = q_diag.iter().map(|x| 1.0 / x).sum();
        if (d - d_inv).abs() > TRACE_TOL * d {
            return Err(Error::InvalidDual(format!(
                "irrep `{label}`: tr Q = {d} but tr Q^-1 = {d_inv}"
            )));
        }
        Ok(Self { label, q_diag, d })
    }

    /// Kac-type irrep of dimension `n` (`Q = I`).
    pub fn kac(label: impl Into<String>, n: usize) -> Result<Self> {
        Self::new(label, vec![1.0; n])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Classical dimension `n`.
    pub fn n(&self) -> usize {
        self.q_diag.len()
    }

    pub fn q_diag(&self) -> &[f64] {
        &self.q_diag
    }

    pub fn quantum_dimension(&self) -> f64 {
        self.d
    }

    pub fn is_kac(&self) -> bool {
        self.q_diag.iter().all(|q| (q - 1.0).abs() <= KAC_TOL)
    }

    pub fn q_matrix(&self) -> CMatrix {
        diag(&self.q_diag)
    }

    pub fn q_inv_matrix(&self) -> CMatrix {
        diag(&self.q_inv_diag())
    }

    pub fn q_inv_diag(&self) -> Vec<f64> {
        self.q_diag.iter().map(|q| 1.0 / q).collect()
    }

    pub fn q_sqrt_matrix(&self) -> CMatrix {
        diag(&self.q_diag.iter().map(|q| q.sqrt()).collect::<Vec<_>>())
    }

    pub fn q_inv_sqrt_matrix(&self) -> CMatrix {
        diag(&self.q_diag.iter().map(|q| 1.0 / q.sqrt()).collect::<Vec<_>>())
    }
}

/// `d` of an irrep. Kept as a free function to mirror the other dual-level queries.
pub fn quantum_dimension(irrep: &IrrepData) -> f64 {
    irrep.quantum_dimension()
}

/// Which built-in family a descriptor came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DualFamily {
    Trivial,
    Su2,
    Suq2 { q: f64 },
    OnPlus { n: usize },
    FiniteGroup,
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualDescriptor {
    name: String,
    family: DualFamily,
    irreps: Vec<IrrepData>,
}

impl DualDescriptor {
    /// Validates label uniqueness and that the first irrep is the trivial one.
    pub fn new(name: impl Into<String>, family: DualFamily, irreps: Vec<IrrepData>) -> Result<Self> {
        let name = name.into();
        let first = irreps
            .first()
            .ok_or_else(|| Error::InvalidDual(format!("dual `{name}` has no irreps")))?;
        if first.n() != 1 || first.q_diag[0] != 1.0 {
            return Err(Error::InvalidDual(format!(
                "dual `{name}`: first irrep must be trivial"
            )));
        }
        for (k, a) in irreps.iter().enumerate() {
            if irreps[..k].iter().any(|b| b.label == a.label) {
                return Err(Error::InvalidDual(format!(
                    "dual `{name}`: duplicate label `{}`",
                    a.label
                )));
            }
        }
        Ok(Self {
            name,
            family,
            irreps,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> DualFamily {
        self.family
    }

    pub fn irreps(&self) -> &[IrrepData] {
        &self.irreps
    }

    pub fn irrep(&self, idx: usize) -> &IrrepData {
        &self.irreps[idx]
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn kac(&self) -> bool {
        self.irreps.iter().all(IrrepData::is_kac)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.irreps
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = DualDoc {
            name: self.name.clone(),
            irreps: self
                .irreps
                .iter()
                .map(|a| IrrepDoc {
                    label: a.label.clone(),
                    n: a.n(),
                    q_diag: a.q_diag.clone(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    /// Parses and re-validates a serialized descriptor.
    pub fn from_json(s: &str) -> Result<Self> {
        let doc: DualDoc = serde_json::from_str(s)?;
        let mut irreps = Vec::with_capacity(doc.irreps.len());
        for a in doc.irreps {
            if a.n != a.q_diag.len() {
                return Err(Error::InvalidDual(format!(
                    "irrep `{}`: n = {} but q_diag has {} entries",
                    a.label,
                    a.n,
                    a.q_diag.len()
                )));
            }
            irreps.push(IrrepData::new(a.label, a.q_diag)?);
        }
        let family = family_from_name(&doc.name);
        Self::new(doc.name, family, irreps)
    }
}

#[derive(Serialize, Deserialize)]
struct DualDoc {
    name: String,
    irreps: Vec<IrrepDoc>,
}

#[derive(Serialize, Deserialize)]
struct IrrepDoc {
    label: String,
    n: usize,
    q_diag: Vec<f64>,
}

fn family_from_name(name: &str) -> DualFamily {
    if name == "trivial" {
        DualFamily::Trivial
    } else if name == "su2" {
        DualFamily::Su2
    } else if let Some(q) = name.strip_prefix("suq2:").and_then(|s| s.parse().ok()) {
        DualFamily::Suq2 { q }
    } else if let Some(n) = name.strip_prefix("onplus:").and_then(|s| s.parse().ok()) {
        DualFamily::OnPlus { n }
    } else {
        DualFamily::Custom
    }
}

pub fn make_trivial_dual() -> DualDescriptor {
    DualDescriptor::new(
        "trivial",
        DualFamily::Trivial,
        vec![IrrepData::kac("0", 1).expect("trivial irrep")],
    )
    .expect("trivial dual")
}

/// Classical `SU(2)`: irrep `k` has dimension `k + 1` and `Q = I`.
pub fn make_su2_dual(kmax: usize) -> Result<DualDescriptor> {
    if kmax + 1 > MAX_IRREP_DIM {
        return Err(Error::Domain(format!("kmax {kmax} exceeds the dimension cap")));
    }
    let irreps = (0..=kmax)
        .map(|k| IrrepData::kac(k.to_string(), k + 1))
        .collect::<Result<Vec<_>>>()?;
    DualDescriptor::new("su2", DualFamily::Su2, irreps)
}

/// `SU_q(2)` with `Q_k = diag(q^k, q^(k-2), …, q^(-k))`.
pub fn make_suq2_dual(q: f64, kmax: usize) -> Result<DualDescriptor> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} is outside (0, 1)")));
    }
    if kmax + 1 > MAX_IRREP_DIM {
        return Err(Error::Domain(format!("kmax {kmax} exceeds the dimension cap")));
    }
    if (kmax as f64) * (-q.ln()) > POWER_GUARD.ln() {
        return Err(Error::Domain(format!(
            "q^-{kmax} overflows the representable range"
        )));
    }
    let irreps = (0..=kmax)
        .map(|k| {
            let q_diag = (0..=k)
                .map(|i| q.powi(k as i32 - 2 * i as i32))
                .collect();
            IrrepData::new(k.to_string(), q_diag)
        })
        .collect::<Result<Vec<_>>>()?;
    DualDescriptor::new(format!("suq2:{q}"), DualFamily::Suq2 { q }, irreps)
}

/// Dimensions of the first `kmax + 1` irreps of the free orthogonal quantum group `O_N^+`,
/// via `n_0 = 1`, `n_1 = N`, `n_{k+1} = N n_k - n_{k-1}`. `None` on `u128` overflow.
pub fn onplus_dimensions(n: usize, kmax: usize) -> Option<Vec<u128>> {
    let big_n = n as u128;
    let mut dims = vec![1u128];
    if kmax >= 1 {
        dims.push(big_n);
    }
    for k in 1..kmax {
        let next = big_n.checked_mul(dims[k])?.checked_sub(dims[k - 1])?;
        dims.push(next);
    }
    Some(dims)
}

/// Kac dual of `O_N^+` truncated at `kmax`.
pub fn make_onplus_dual(n: usize, kmax: usize) -> Result<DualDescriptor> {
    if n < 2 {
        return Err(Error::Domain(format!("O_N^+ needs N >= 2, got {n}")));
    }
    let dims = onplus_dimensions(n, kmax)
        .ok_or_else(|| Error::Domain("O_N^+ dimensions overflow".into()))?;
    if let Some(&too_big) = dims.iter().find(|&&m| m > MAX_IRREP_DIM as u128) {
        return Err(Error::Domain(format!(
            "irrep dimension {too_big} exceeds the cap {MAX_IRREP_DIM}"
        )));
    }
    let irreps = dims
        .iter()
        .enumerate()
        .map(|(k, &m)| IrrepData::kac(k.to_string(), m as usize))
        .collect::<Result<Vec<_>>>()?;
    DualDescriptor::new(format!("onplus:{n}"), DualFamily::OnPlus { n }, irreps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(d: &DualDescriptor) -> Vec<usize> {
        d.irreps().iter().map(IrrepData::n).collect()
    }

    #[test]
    fn trivial_dual() {
        let d = make_trivial_dual();
        assert_eq!(d.len(), 1);
        assert_eq!(d.irrep(0).quantum_dimension(), 1.0);
        assert!(d.kac());
    }

    #[test]
    fn su2_dims() {
        assert_eq!(make_su2_dual(0).unwrap().irreps(), make_trivial_dual().irreps());
        let d = make_su2_dual(3).unwrap();
        assert_eq!(dims(&d), vec![1, 2, 3, 4]);
        for a in d.irreps() {
            assert_eq!(a.quantum_dimension(), a.n() as f64);
        }
        assert!(make_su2_dual(2).unwrap().kac());
    }

    #[test]
    fn suq2_values() {
        let d = make_suq2_dual(0.5, 2).unwrap();
        assert_eq!(d.irrep(1).q_diag(), &[0.5, 2.0]);
        assert!((d.irrep(1).quantum_dimension() - 2.5).abs() < 1e-15);
        assert!((d.irrep(2).quantum_dimension() - 5.25).abs() < 1e-15);
        assert_eq!(d.irrep(2).q_diag(), &[0.25, 1.0, 4.0]);
        assert!(!d.kac());
        assert!(make_suq2_dual(1.0, 2).is_err());
        assert!(make_suq2_dual(0.0, 2).is_err());
        assert!(make_suq2_dual(-0.5, 2).is_err());
    }

    #[test]
    fn suq2_near_one_approaches_su2() {
        let dq = make_suq2_dual(1.0 - 1e-8, 10).unwrap();
        let d1 = make_su2_dual(10).unwrap();
        for (a, b) in dq.irreps().iter().zip(d1.irreps()) {
            assert_eq!(a.n(), b.n());
            let rel = (a.quantum_dimension() - b.quantum_dimension()).abs() / b.quantum_dimension();
            assert!(rel <= 1e-6);
            for q in a.q_diag() {
                assert!((q - 1.0).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn onplus_dims() {
        assert_eq!(dims(&make_onplus_dual(2, 3).unwrap()), dims(&make_su2_dual(3).unwrap()));
        assert_eq!(dims(&make_onplus_dual(3, 2).unwrap()), vec![1, 3, 8]);
        assert!(make_onplus_dual(3, 1).unwrap().kac());
        assert!(make_onplus_dual(1, 3).is_err());
    }

    #[test]
    fn onplus_recursion_exact() {
        for n in 2..=10usize {
            let dims = onplus_dimensions(n, 20).expect("fits in u128");
            assert_eq!(dims.len(), 21);
            assert_eq!(dims[0], 1);
            assert_eq!(dims[1], n as u128);
            for k in 1..20 {
                assert_eq!(dims[k + 1] + dims[k - 1], n as u128 * dims[k]);
            }
        }
    }

    #[test]
    fn quantum_dimension_examples() {
        let t = make_trivial_dual();
        assert_eq!(quantum_dimension(t.irrep(0)), 1.0);
        let d = make_suq2_dual(0.5, 1).unwrap();
        assert!((quantum_dimension(d.irrep(1)) - 2.5).abs() < 1e-15);
        let o = make_onplus_dual(4, 2).unwrap();
        for a in o.irreps() {
            assert_eq!(quantum_dimension(a), a.n() as f64);
        }
    }

    #[test]
    fn invalid_irreps_rejected() {
        assert!(IrrepData::new("x", vec![]).is_err());
        assert!(IrrepData::new("x", vec![1.0, -1.0]).is_err());
        assert!(IrrepData::new("x", vec![0.5, 1.0]).is_err());
        let a = IrrepData::kac("a", 2).unwrap();
        assert!(DualDescriptor::new("bad", DualFamily::Custom, vec![a.clone()]).is_err());
        let t = IrrepData::kac("a", 1).unwrap();
        assert!(DualDescriptor::new("dup", DualFamily::Custom, vec![t, a]).is_err());
    }

    #[test]
    fn json_round_trip() {
        for d in [
            make_trivial_dual(),
            make_su2_dual(3).unwrap(),
            make_suq2_dual(0.3, 7).unwrap(),
            make_onplus_dual(3, 3).unwrap(),
        ] {
            let s = d.to_json().unwrap();
            let back = DualDescriptor::from_json(&s).unwrap();
            assert_eq!(back, d);
            assert_eq!(back.to_json().unwrap(), s);
        }
    }

    #[test]
    fn json_rejects_inconsistent_n() {
        let s = r#"{"name":"x","irreps":[{"label":"0","n":2,"q_diag":[1.0]}]}"#;
        assert!(DualDescriptor::from_json(s).is_err());
    }
}
