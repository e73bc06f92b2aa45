//! Finite groups given by multiplication tables and explicit unitary irreps.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dual::{DualDescriptor, DualFamily, IrrepData};
use crate::error::{Error, Result};
use crate::linalg::{identity, max_abs_diff, unitarity_defect, CMatrix, ONE, ZERO};

/// Tolerance for the exhaustive construction checks.
pub const TABLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct GroupIrrep {
    pub label: String,
    /// One matrix per group element, indexed like the multiplication table.
    pub matrices: Vec<CMatrix>,
}

impl GroupIrrep {
    pub fn n(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }
}

#[derive(Debug, Clone)]
pub struct FiniteGroupTable {
    name: String,
    mult: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
    irreps: Vec<GroupIrrep>,
    dual: Arc<DualDescriptor>,
}

impl FiniteGroupTable {
    /// Validates the group law, every irrep, Peter–Weyl and the Schur relations.
    ///
    /// The trivial irrep must come first.
    pub fn new(name: impl Into<String>, mult: Vec<Vec<usize>>, irreps: Vec<GroupIrrep>) -> Result<Self> {
        let name = name.into();
        let order = mult.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty multiplication table".into()));
        }
        for row in &mult {
            if row.len() != order || row.iter().any(|&x| x >= order) {
                return Err(Error::InvalidGroup("multiplication table is not order × order".into()));
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mult[e][g] == g && mult[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverse = Vec::with_capacity(order);
        for g in 0..order {
            let inv = (0..order)
                .find(|&h| mult[g][h] == identity && mult[h][g] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))?;
            inverse.push(inv);
        }
        for a in 0..order {
            for b in 0..order {
                let ab = mult[a][b];
                for c in 0..order {
                    if mult[ab][c] != mult[a][mult[b][c]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }

        let mut dual_irreps = Vec::with_capacity(irreps.len());
        for (idx, irrep) in irreps.iter().enumerate() {
            if irrep.matrices.len() != order {
                return Err(Error::InvalidGroup(format!("irrep {} has {} matrices", irrep.label, irrep.matrices.len())));
            }
            let n = irrep.n();
            if n == 0 {
                return Err(Error::InvalidGroup(format!("irrep {} has dimension 0", irrep.label)));
            }
            for m in &irrep.matrices {
                if m.nrows() != n || m.ncols() != n {
                    return Err(Error::InvalidGroup(format!("irrep {} has ragged matrices", irrep.label)));
                }
                let defect = unitarity_defect(m);
                if defect > TABLE_TOL {
                    return Err(Error::InvalidGroup(format!("irrep {} is not unitary ({defect:.3e})", irrep.label)));
                }
            }
            for a in 0..order {
                for b in 0..order {
                    let prod = &irrep.matrices[a] * &irrep.matrices[b];
                    let err = max_abs_diff(&prod, &irrep.matrices[mult[a][b]]);
                    if err > TABLE_TOL {
                        return Err(Error::InvalidGroup(format!(
                            "irrep {} is not a homomorphism at ({a}, {b}): {err:.3e}",
                            irrep.label
                        )));
                    }
                }
            }
            if idx == 0 && (n != 1 || irrep.matrices.iter().any(|m| (m[(0, 0)] - ONE).norm() > TABLE_TOL)) {
                return Err(Error::InvalidGroup("the first irrep must be trivial".into()));
            }
            dual_irreps.push(IrrepData::kac(irrep.label.clone(), n)?);
        }
        let pw: usize = irreps.iter().map(|r| r.n() * r.n()).sum();
        if pw != order {
            return Err(Error::InvalidGroup(format!("Peter–Weyl count {pw} ≠ order {order}")));
        }
        schur_check(order, &irreps)?;

        let dual = Arc::new(DualDescriptor::new(name.clone(), DualFamily::FiniteGroup, dual_irreps)?);
        let table = Self { name, mult, inverse, identity, irreps, dual };
        table.extraction_self_test()?;
        Ok(table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn irreps(&self) -> &[GroupIrrep] {
        &self.irreps
    }

    pub fn dual(&self) -> &Arc<DualDescriptor> {
        &self.dual
    }

    /// `(a∗b)(g) = (1/|G|) Σ_h a(h) b(h⁻¹g)` for functions indexed by element.
    pub fn convolve_functions(&self, a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
        let order = self.order();
        if a.len() != order || b.len() != order {
            return Err(Error::Domain(format!("function lengths {} and {} for order {order}", a.len(), b.len())));
        }
        Ok((0..order)
            .map(|g| {
                let s: Complex64 = (0..order).map(|h| a[h] * b[self.mult[self.inverse[h]][g]]).sum();
                s / order as f64
            })
            .collect())
    }

    /// Checks, on every matrix unit, that evaluating and re-extracting returns the input.
    fn extraction_self_test(&self) -> Result<()> {
        let order = self.order() as f64;
        for (idx, irrep) in self.irreps.iter().enumerate() {
            let n = irrep.n();
            for r in 0..n {
                for s in 0..n {
                    // f̂ = E_{r,s} gives f(g) = n·π(g)_{s,r}
                    for (ti, other) in self.irreps.iter().enumerate() {
                        let m = other.n();
                        for i in 0..m {
                            for j in 0..m {
                                let mut acc = ZERO;
                                for (g, pg) in irrep.matrices.iter().enumerate() {
                                    acc += pg[(s, r)] * other.matrices[g][(j, i)].conj();
                                }
                                let got = acc * (n as f64) / order;
                                let want = if ti == idx && i == r && j == s { ONE } else { ZERO };
                                if (got - want).norm() > TABLE_TOL {
                                    return Err(Error::InvalidGroup(format!(
                                        "coefficient extraction self-test failed on irrep {}",
                                        irrep.label
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Loads `{order, mult, irreps: [{label, matrices: [{re, im}]}]}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let doc: TableDoc = serde_json::from_str(s)?;
        if doc.mult.len() != doc.order {
            return Err(Error::InvalidGroup(format!("order {} but {} table rows", doc.order, doc.mult.len())));
        }
        let mut irreps = Vec::with_capacity(doc.irreps.len());
        for r in doc.irreps {
            let mut matrices = Vec::with_capacity(r.matrices.len());
            for m in r.matrices {
                matrices.push(matrix_from_parts(&m.re, &m.im)?);
            }
            irreps.push(GroupIrrep { label: r.label, matrices });
        }
        Self::new(doc.name.unwrap_or_else(|| "group".into()), doc.mult, irreps)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = TableDoc {
            name: Some(self.name.clone()),
            order: self.order(),
            mult: self.mult.clone(),
            irreps: self
                .irreps
                .iter()
                .map(|r| IrrepDoc {
                    label: r.label.clone(),
                    matrices: r
                        .matrices
                        .iter()
                        .map(|m| MatrixDoc {
                            re: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect(),
                            im: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect(),
                        })
                        .collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }
}

fn schur_check(order: usize, irreps: &[GroupIrrep]) -> Result<()> {
    let inv_order = 1.0 / order as f64;
    for (a, ra) in irreps.iter().enumerate() {
        for (b, rb) in irreps.iter().enumerate().skip(a) {
            let (na, nb) = (ra.n(), rb.n());
            for i in 0..na {
                for j in 0..na {
                    for s in 0..nb {
                        for t in 0..nb {
                            let mut acc = ZERO;
                            for g in 0..order {
                                acc += rb.matrices[g][(s, t)].conj() * ra.matrices[g][(i, j)];
                            }
                            acc *= inv_order;
                            let want = if a == b && i == s && j == t { 1.0 / na as f64 } else { 0.0 };
                            if (acc - Complex64::new(want, 0.0)).norm() > TABLE_TOL {
                                return Err(Error::InvalidGroup(format!(
                                    "Schur relation fails between {} and {}",
                                    ra.label, rb.label
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn matrix_from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<CMatrix> {
    let n = re.len();
    if im.len() != n || re.iter().chain(im.iter()).any(|row| row.len() != n) {
        return Err(Error::InvalidGroup("irrep matrix is not square".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(re[i][j], im[i][j])))
}

#[derive(Serialize, Deserialize)]
struct TableDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    order: usize,
    mult: Vec<Vec<usize>>,
    irreps: Vec<IrrepDoc>,
}

#[derive(Serialize, Deserialize)]
struct IrrepDoc {
    label: String,
    matrices: Vec<MatrixDoc>,
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// `Z_n` with characters `χ_k(x) = e^{2πikx/n}`.
pub fn cyclic_group(n: usize) -> Result<FiniteGroupTable> {
    if n == 0 {
        return Err(Error::Domain("cyclic group order must be at least 1".into()));
    }
    let mult = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let irreps = (0..n)
        .map(|k| GroupIrrep {
            label: format!("chi{k}"),
            matrices: (0..n)
                .map(|x| {
                    let theta = 2.0 * std::f64::consts::PI * ((k * x) % n) as f64 / n as f64;
                    CMatrix::from_element(1, 1, Complex64::from_polar(1.0, theta))
                })
                .collect(),
        })
        .collect();
    FiniteGroupTable::new(format!("z{n}"), mult, irreps)
}

/// Permutations of `{0, 1, 2}` in lexicographic order; element 0 is the identity.
pub fn s3_elements() -> [[usize; 3]; 6] {
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

/// `S_3` with its trivial, sign and two-dimensional standard irreps, all real orthogonal.
///
/// The product is composition, `(σ·τ)(i) = σ(τ(i))`.
pub fn symmetric_group_s3() -> FiniteGroupTable {
    let elems = s3_elements();
    let index = |p: [usize; 3]| elems.iter().position(|&e| e == p).unwrap();
    let mult: Vec<Vec<usize>> = elems
        .iter()
        .map(|s| elems.iter().map(|t| index([s[t[0]], s[t[1]], s[t[2]]])).collect())
        .collect();

    let sign = |p: &[usize; 3]| {
        let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        if inversions % 2 == 0 { 1.0 } else { -1.0 }
    };
    // orthonormal basis of the complement of (1, 1, 1)
    let basis = nalgebra::DMatrix::from_row_slice(
        3,
        2,
        &[
            1.0 / 2f64.sqrt(),
            1.0 / 6f64.sqrt(),
            -1.0 / 2f64.sqrt(),
            1.0 / 6f64.sqrt(),
            0.0,
            -2.0 / 6f64.sqrt(),
        ],
    );
    let standard = |p: &[usize; 3]| {
        let mut perm = nalgebra::DMatrix::<f64>::zeros(3, 3);
        for (i, &pi) in p.iter().enumerate() {
            perm[(pi, i)] = 1.0;
        }
        let m = basis.transpose() * perm * &basis;
        m.map(|x| Complex64::new(x, 0.0))
    };

    let irreps = vec![
        GroupIrrep { label: "trivial".into(), matrices: elems.iter().map(|_| identity(1)).collect() },
        GroupIrrep {
            label: "sign".into(),
            matrices: elems.iter().map(|p| CMatrix::from_element(1, 1, Complex64::new(sign(p), 0.0))).collect(),
        },
        GroupIrrep { label: "standard".into(), matrices: elems.iter().map(standard).collect() },
    ];
    FiniteGroupTable::new("s3", mult, irreps).expect("built-in S_3 table is valid")
}
