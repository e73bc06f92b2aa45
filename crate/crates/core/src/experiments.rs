//! Seeded verification experiments and their JSON/CSV reports.
//!
//! Every experiment appends records `{subcommand, check, ..., pass}`. A report bundles the
//! records with the resolved configuration and a verdict. Wall-clock time lives in a
//! `sidecar` that the content hash skips, so equal seeds give equal hashes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::classical::{
    self, character_l1, cyclic_group, symmetric_group_s3, FiniteGroupTable, Side, Su2Quadrature,
    MARGIN_ALLOWANCE,
};
use crate::dual::{make_onplus_dual, make_su2_dual, make_suq2_dual, make_trivial_dual, DualDescriptor};
use crate::error::{Error, Result};
use crate::fourier::{
    convolution_unit, convolve, ell2_norm, ell2_norm_sq, pairing, plancherel_gram_norm, random_complex_matrix,
    random_real_matrix, FourierCoeffs,
};
use crate::l2_operators::{central_sum_check, hx_pairing_identity, random_ball_multiplier, tb_block_norm, trace_norm_duality};
use crate::linalg::{from_real, identity, max_abs_diff, unitarity_defect, CMatrix, ONE, ZERO};
use crate::quantum_examples::{corollary_chain_check, growth_report};
use crate::random_series::{
    expected_operator_norm, four_unitary_decomposition, l2_invariance_check, random_contraction, randomize_ball,
    MatrixFamily,
};
use crate::rng::RngSeed;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const PLANCHEREL_TOL: f64 = 1e-12;
pub const L2_INVARIANCE_TOL: f64 = 1e-10;
pub const DECOMPOSITION_TOL: f64 = 1e-9;
pub const GAUSSIAN_NORM_RANGE: (f64, f64) = (1.2, 2.6);
pub const SIGMAS: f64 = 3.0;
pub const TB_TOL: f64 = 1e-9;
pub const HX_TOL: f64 = 1e-12;
pub const ALIGNED_TOL: f64 = 1e-10;
pub const RANDOM_SUP_SLACK: f64 = 1e-12;
pub const RANDOM_SUP_FLOOR: f64 = 0.9;
pub const CENTRAL_TOL: f64 = 1e-12;
pub const CONVOLUTION_TOL: f64 = 1e-12;
pub const CHARACTER_FLOOR: f64 = 0.5;
pub const CHARACTER_LIMIT_TOL: f64 = 0.01;
pub const COTYPE_FLOOR: f64 = 0.2;
pub const STABILITY_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subcommand {
    Plancherel,
    Pairing,
    ConvolveCheck,
    RandomizeL2,
    FourUnitary,
    BallDecomposition,
    GaussianNorms,
    HelgasonGaussian,
    HelgasonInstance,
    Lemma35,
    TbContraction,
    HxIdentity,
    TraceDuality,
    CentralSum,
    CorollarySuq2,
    Growth,
    Characters,
    Cotype2,
    All,
}

impl Subcommand {
    /// Every experiment, in the order `all` runs them.
    pub const EXPERIMENTS: [Subcommand; 18] = [
        Subcommand::Plancherel,
        Subcommand::Pairing,
        Subcommand::ConvolveCheck,
        Subcommand::RandomizeL2,
        Subcommand::FourUnitary,
        Subcommand::BallDecomposition,
        Subcommand::GaussianNorms,
        Subcommand::HelgasonGaussian,
        Subcommand::HelgasonInstance,
        Subcommand::Lemma35,
        Subcommand::TbContraction,
        Subcommand::HxIdentity,
        Subcommand::TraceDuality,
        Subcommand::CentralSum,
        Subcommand::CorollarySuq2,
        Subcommand::Growth,
        Subcommand::Characters,
        Subcommand::Cotype2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Plancherel => "plancherel",
            Subcommand::Pairing => "pairing",
            Subcommand::ConvolveCheck => "convolve-check",
            Subcommand::RandomizeL2 => "randomize-l2",
            Subcommand::FourUnitary => "four-unitary",
            Subcommand::BallDecomposition => "ball-decomposition",
            Subcommand::GaussianNorms => "gaussian-norms",
            Subcommand::HelgasonGaussian => "helgason-gaussian",
            Subcommand::HelgasonInstance => "helgason-instance",
            Subcommand::Lemma35 => "lemma35",
            Subcommand::TbContraction => "tb-contraction",
            Subcommand::HxIdentity => "hx-identity",
            Subcommand::TraceDuality => "trace-duality",
            Subcommand::CentralSum => "central-sum",
            Subcommand::CorollarySuq2 => "corollary-suq2",
            Subcommand::Growth => "growth",
            Subcommand::Characters => "characters",
            Subcommand::Cotype2 => "cotype2",
            Subcommand::All => "all",
        }
    }

    /// Whether the experiment draws random numbers and so needs `--seed`.
    pub fn is_stochastic(self) -> bool {
        !matches!(self, Subcommand::Growth | Subcommand::Characters)
    }

    fn tag(self) -> u64 {
        Self::EXPERIMENTS.iter().position(|&s| s == self).map_or(u64::MAX, |i| i as u64 + 1)
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::EXPERIMENTS
            .iter()
            .chain(std::iter::once(&Subcommand::All))
            .find(|c| c.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown subcommand `{s}`")))
    }
}

/// Built-in duals selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualSpec {
    Trivial,
    Cyclic(usize),
    S3,
    Su2,
    Suq2,
    OnPlus(usize),
}

impl fmt::Display for DualSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualSpec::Trivial => write!(f, "trivial"),
            DualSpec::Cyclic(n) => write!(f, "z{n}"),
            DualSpec::S3 => write!(f, "s3"),
            DualSpec::Su2 => write!(f, "su2"),
            DualSpec::Suq2 => write!(f, "suq2"),
            DualSpec::OnPlus(n) => write!(f, "o{n}plus"),
        }
    }
}

impl FromStr for DualSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown dual `{s}` (expected trivial, zN, s3, su2, suq2 or oNplus)"));
        match s {
            "trivial" => Ok(DualSpec::Trivial),
            "s3" => Ok(DualSpec::S3),
            "su2" => Ok(DualSpec::Su2),
            "suq2" => Ok(DualSpec::Suq2),
            _ => {
                if let Some(n) = s.strip_prefix('z') {
                    let n: usize = n.parse().map_err(|_| bad())?;
                    if n == 0 {
                        return Err(bad());
                    }
                    Ok(DualSpec::Cyclic(n))
                } else if let Some(n) = s.strip_prefix('o').and_then(|r| r.strip_suffix("plus")) {
                    let n: usize = n.parse().map_err(|_| bad())?;
                    if n < 2 {
                        return Err(bad());
                    }
                    Ok(DualSpec::OnPlus(n))
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl Serialize for DualSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A built dual, with its group when it has one.
enum BuiltDual {
    Quantum(Arc<DualDescriptor>),
    Finite(FiniteGroupTable),
}

impl BuiltDual {
    fn dual(&self) -> Arc<DualDescriptor> {
        match self {
            BuiltDual::Quantum(d) => d.clone(),
            BuiltDual::Finite(g) => g.dual().clone(),
        }
    }
}

fn build_dual(spec: DualSpec, q: f64, kmax: usize) -> Result<BuiltDual> {
    Ok(match spec {
        DualSpec::Trivial => BuiltDual::Quantum(Arc::new(make_trivial_dual())),
        DualSpec::Cyclic(n) => BuiltDual::Finite(cyclic_group(n)?),
        DualSpec::S3 => BuiltDual::Finite(symmetric_group_s3()),
        DualSpec::Su2 => BuiltDual::Quantum(Arc::new(make_su2_dual(kmax)?)),
        DualSpec::Suq2 => BuiltDual::Quantum(Arc::new(make_suq2_dual(q, kmax)?)),
        DualSpec::OnPlus(n) => BuiltDual::Quantum(Arc::new(make_onplus_dual(n, kmax)?)),
    })
}

/// Options shared by every experiment; `None` means the experiment's own default.
#[derive(Debug, Clone, Serialize)]
pub struct Config {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub q: f64,
    pub kmax: Option<usize>,
    pub dual: Option<DualSpec>,
    pub nmax: usize,
    pub resolution: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self { seed: None, trials: None, q: 0.5, kmax: None, dual: None, nmax: 256, resolution: 8 }
    }
}

impl Config {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed: Some(seed), ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::Config(format!("--q {} must lie in (0, 1)", self.q)));
        }
        if self.nmax == 0 {
            return Err(Error::Config("--nmax must be at least 1".into()));
        }
        if self.trials == Some(0) {
            return Err(Error::Config("--trials must be positive".into()));
        }
        if self.resolution < 4 {
            return Err(Error::Config("--resolution must be at least 4".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub toolkit_version: &'static str,
    pub subcommand: &'static str,
    pub config: Config,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub elapsed_ms: u128,
    pub content_hash: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub records: Vec<Value>,
    pub verdict: Verdict,
    pub sidecar: Sidecar,
}

#[derive(Serialize)]
struct HashedPart<'a> {
    meta: &'a Meta,
    records: &'a [Value],
    verdict: &'a Verdict,
}

impl Report {
    /// SHA-256 of the report without its sidecar.
    pub fn content_hash(&self) -> String {
        let part = HashedPart { meta: &self.meta, records: &self.records, verdict: &self.verdict };
        let bytes = serde_json::to_vec(&part).expect("reports serialize");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per record; columns are the sorted union of record keys.
    pub fn to_csv(&self) -> String {
        let mut columns: Vec<String> = Vec::new();
        for r in &self.records {
            if let Value::Object(map) = r {
                for k in map.keys() {
                    if !columns.contains(k) {
                        columns.push(k.clone());
                    }
                }
            }
        }
        columns.sort();
        let mut out = columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
        out.push('\n');
        for r in &self.records {
            let row: Vec<String> = columns
                .iter()
                .map(|c| match r.get(c) {
                    None | Some(Value::Null) => String::new(),
                    Some(Value::String(s)) => csv_field(s),
                    Some(v @ (Value::Number(_) | Value::Bool(_))) => v.to_string(),
                    Some(v) => csv_field(&v.to_string()),
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Failing records, for error output.
    pub fn failing_records(&self) -> Vec<&Value> {
        self.records.iter().filter(|r| r.get("pass") == Some(&Value::Bool(false))).collect()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

struct Recorder {
    subcommand: &'static str,
    records: Vec<Value>,
}

impl Recorder {
    fn push(&mut self, check: &str, pass: bool, fields: Value) {
        let mut map = match fields {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        map.insert("subcommand".into(), Value::from(self.subcommand));
        map.insert("check".into(), Value::from(check));
        map.insert("pass".into(), Value::from(pass));
        self.records.push(Value::Object(map));
    }
}

/// Runs one experiment (or all of them) and assembles the report.
pub fn run(subcommand: Subcommand, config: &Config) -> Result<Report> {
    config.validate()?;
    let stochastic = match subcommand {
        Subcommand::All => true,
        s => s.is_stochastic(),
    };
    if stochastic && config.seed.is_none() {
        return Err(Error::Config(format!("`{subcommand}` needs --seed")));
    }
    let start = Instant::now();
    let mut records = Vec::new();
    let list: Vec<Subcommand> = match subcommand {
        Subcommand::All => Subcommand::EXPERIMENTS.to_vec(),
        s => vec![s],
    };
    for s in list {
        let mut rec = Recorder { subcommand: s.name(), records: Vec::new() };
        let seed = RngSeed::new(config.seed.unwrap_or(0)).derive(s.tag());
        run_one(s, config, seed, &mut rec)?;
        records.extend(rec.records);
    }
    let failures: Vec<String> = records
        .iter()
        .filter(|r| r.get("pass") == Some(&Value::Bool(false)))
        .map(|r| format!("{}/{}", r["subcommand"].as_str().unwrap_or("?"), r["check"].as_str().unwrap_or("?")))
        .collect();
    let verdict = Verdict { pass: failures.is_empty(), checks: records.len(), failures };
    let meta = Meta { toolkit_version: TOOLKIT_VERSION, subcommand: subcommand.name(), config: config.clone(), seed: config.seed };
    let mut report = Report {
        meta,
        records,
        verdict,
        sidecar: Sidecar { elapsed_ms: 0, content_hash: String::new() },
    };
    report.sidecar.elapsed_ms = start.elapsed().as_millis();
    report.sidecar.content_hash = report.content_hash();
    Ok(report)
}

fn run_one(s: Subcommand, c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    match s {
        Subcommand::Plancherel => plancherel(c, seed, rec),
        Subcommand::Pairing => pairing_check(c, seed, rec),
        Subcommand::ConvolveCheck => convolve_check(c, seed, rec),
        Subcommand::RandomizeL2 => randomize_l2(c, seed, rec),
        Subcommand::FourUnitary => four_unitary(c, seed, rec),
        Subcommand::BallDecomposition => ball_decomposition(c, seed, rec),
        Subcommand::GaussianNorms => gaussian_norms(c, seed, rec),
        Subcommand::HelgasonGaussian => helgason_gaussian(c, seed, rec),
        Subcommand::HelgasonInstance => helgason_instance(c, seed, rec),
        Subcommand::Lemma35 => lemma35(c, seed, rec),
        Subcommand::TbContraction => tb_contraction(c, seed, rec),
        Subcommand::HxIdentity => hx_identity(c, seed, rec),
        Subcommand::TraceDuality => trace_duality(c, seed, rec),
        Subcommand::CentralSum => central_sum(c, seed, rec),
        Subcommand::CorollarySuq2 => corollary_suq2(c, seed, rec),
        Subcommand::Growth => growth(c, rec),
        Subcommand::Characters => characters(c, rec),
        Subcommand::Cotype2 => cotype2(c, seed, rec),
        Subcommand::All => unreachable!("expanded by run"),
    }
}

fn rel(dev: f64, scale: f64) -> f64 {
    if scale > 0.0 { dev / scale } else { dev }
}

fn plancherel(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let spec = c.dual.unwrap_or(DualSpec::Suq2);
    let kmax = c.kmax.unwrap_or(4);
    let trials = c.trials.unwrap_or(200);
    let dual = build_dual(spec, c.q, kmax)?.dual();
    let mut rng = seed.rng();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f = FourierCoeffs::random_sparse(dual.clone(), &mut rng);
        let l2 = ell2_norm(&f);
        worst = worst.max(rel((plancherel_gram_norm(&f) - l2).abs(), l2));
    }
    rec.push(
        "gram_vs_ell2",
        worst <= PLANCHEREL_TOL,
        json!({"dual": dual.name(), "kmax": kmax, "trials": trials, "max_rel_deviation": worst, "tol": PLANCHEREL_TOL}),
    );

    // f = u_{r,s} has ‖f‖² = (Q⁻¹)_{r,r}/d
    let mut worst: f64 = 0.0;
    for (idx, irrep) in dual.irreps().iter().enumerate().filter(|(_, a)| a.n() <= 12) {
        let d = irrep.quantum_dimension();
        let q_inv = irrep.q_inv_diag();
        for r in 0..irrep.n() {
            for s in 0..irrep.n() {
                let mut m = CMatrix::zeros(irrep.n(), irrep.n());
                m[(s, r)] = Complex64::new(q_inv[r] / d, 0.0);
                let f = FourierCoeffs::zero(dual.clone()).with(idx, m)?;
                let want = q_inv[r] / d;
                worst = worst.max(rel((ell2_norm_sq(&f) - want).abs(), want));
                worst = worst.max(rel((plancherel_gram_norm(&f).powi(2) - want).abs(), want));
            }
        }
    }
    rec.push(
        "single_coefficient",
        worst <= PLANCHEREL_TOL,
        json!({"dual": dual.name(), "max_rel_deviation": worst, "tol": PLANCHEREL_TOL}),
    );
    Ok(())
}

/// `h(f* μ)` through the Schur Gram path, by polarization.
fn gram_inner(mu: &FourierCoeffs, f: &FourierCoeffs) -> Result<Complex64> {
    let mut acc = ZERO;
    let mut phase = ONE;
    for _ in 0..4 {
        let s = mu.add(&f.scale(phase))?;
        acc += phase * plancherel_gram_norm(&s).powi(2);
        phase *= Complex64::new(0.0, 1.0);
    }
    Ok(acc * 0.25)
}

fn pairing_check(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let spec = c.dual.unwrap_or(DualSpec::Suq2);
    let kmax = c.kmax.unwrap_or(4);
    let trials = c.trials.unwrap_or(100);
    let dual = build_dual(spec, c.q, kmax)?.dual();
    let mut rng = seed.rng();
    let (mut worst_gram, mut worst_self): (f64, f64) = (0.0, 0.0);
    for _ in 0..trials {
        let mu = FourierCoeffs::random_sparse(dual.clone(), &mut rng);
        let f = FourierCoeffs::random_sparse(dual.clone(), &mut rng);
        let p = pairing(&mu, &f)?;
        let g = gram_inner(&mu, &f)?;
        worst_gram = worst_gram.max(rel((p - g).norm(), ell2_norm(&mu) * ell2_norm(&f)));
        let pf = pairing(&f, &f)?;
        let l2 = ell2_norm_sq(&f);
        worst_self = worst_self.max(rel((pf - l2).norm(), l2));
    }
    rec.push(
        "pairing_vs_gram",
        worst_gram <= PLANCHEREL_TOL,
        json!({"dual": dual.name(), "trials": trials, "max_rel_deviation": worst_gram, "tol": PLANCHEREL_TOL}),
    );
    rec.push(
        "pairing_self",
        worst_self <= PLANCHEREL_TOL,
        json!({"dual": dual.name(), "trials": trials, "max_rel_deviation": worst_self, "tol": PLANCHEREL_TOL}),
    );
    if dual.len() >= 2 {
        let a = FourierCoeffs::zero(dual.clone()).with(0, identity(1))?;
        let n1 = dual.irrep(1).n();
        let b = FourierCoeffs::zero(dual.clone()).with(1, random_complex_matrix(n1, &mut rng))?;
        let p = pairing(&a, &b)?.norm();
        rec.push("disjoint_supports", p == 0.0, json!({"dual": dual.name(), "value": p}));
    }
    Ok(())
}

fn convolve_check(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let spec = c.dual.unwrap_or(DualSpec::S3);
    let kmax = c.kmax.unwrap_or(4);
    let trials = c.trials.unwrap_or(50);
    let built = build_dual(spec, c.q, kmax)?;
    let dual = built.dual();
    let mut rng = seed.rng();
    let (mut worst_oracle, mut worst_assoc, mut worst_unit): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let unit = convolution_unit(dual.clone());
    for _ in 0..trials {
        let f1 = FourierCoeffs::random(dual.clone(), &mut rng);
        let f2 = FourierCoeffs::random(dual.clone(), &mut rng);
        let f3 = FourierCoeffs::random(dual.clone(), &mut rng);
        let f12 = convolve(&f1, &f2)?;
        if let BuiltDual::Finite(g) = &built {
            let v1 = classical::values_on_nodes(&f1, g)?;
            let v2 = classical::values_on_nodes(&f2, g)?;
            let brute = g.convolve_functions(&v1, &v2)?;
            let oracle = classical::extract_coefficients(&brute, g, dual.clone())?;
            worst_oracle = worst_oracle.max(oracle.max_abs_diff(&f12)?);
        }
        let left = convolve(&f12, &f3)?;
        let right = convolve(&f1, &convolve(&f2, &f3)?)?;
        worst_assoc = worst_assoc.max(left.max_abs_diff(&right)?);
        worst_unit = worst_unit.max(convolve(&f1, &unit)?.max_abs_diff(&f1)?);
        worst_unit = worst_unit.max(convolve(&unit, &f1)?.max_abs_diff(&f1)?);
    }
    if let BuiltDual::Finite(g) = &built {
        // δ_e as a function: |G| at the identity
        let mut delta = vec![ZERO; g.order()];
        delta[g.identity()] = Complex64::new(g.order() as f64, 0.0);
        let delta_hat = classical::extract_coefficients(&delta, g, dual.clone())?;
        let unit_dev = delta_hat.max_abs_diff(&unit)?;
        rec.push(
            "brute_force_oracle",
            worst_oracle <= CONVOLUTION_TOL,
            json!({"dual": dual.name(), "trials": trials, "max_abs_deviation": worst_oracle, "tol": CONVOLUTION_TOL}),
        );
        rec.push(
            "delta_e_is_identity_family",
            unit_dev <= CONVOLUTION_TOL,
            json!({"dual": dual.name(), "max_abs_deviation": unit_dev, "tol": CONVOLUTION_TOL}),
        );
    }
    rec.push(
        "associativity",
        worst_assoc <= CONVOLUTION_TOL,
        json!({"dual": dual.name(), "trials": trials, "max_abs_deviation": worst_assoc, "tol": CONVOLUTION_TOL}),
    );
    rec.push(
        "unit",
        worst_unit <= CONVOLUTION_TOL,
        json!({"dual": dual.name(), "trials": trials, "max_abs_deviation": worst_unit, "tol": CONVOLUTION_TOL}),
    );
    Ok(())
}

fn randomize_l2(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let spec = c.dual.unwrap_or(DualSpec::Suq2);
    let kmax = c.kmax.unwrap_or(4);
    let trials = c.trials.unwrap_or(100);
    let dual = build_dual(spec, c.q, kmax)?.dual();
    let mut rng = seed.rng();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f = FourierCoeffs::random_sparse(dual.clone(), &mut rng);
        let u = MatrixFamily::haar(dual.clone(), &mut rng);
        worst = worst.max(rel(l2_invariance_check(&f, &u)?, ell2_norm(&f)));
    }
    rec.push(
        "l2_invariance",
        worst <= L2_INVARIANCE_TOL,
        json!({"dual": dual.name(), "trials": trials, "max_rel_deviation": worst, "tol": L2_INVARIANCE_TOL}),
    );
    Ok(())
}

fn four_unitary(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let trials = c.trials.unwrap_or(1000);
    let n_max = 16;
    let mut rng = seed.rng();
    let (mut worst_rec, mut worst_unit): (f64, f64) = (0.0, 0.0);
    for _ in 0..trials {
        let n = rng.random_range(1..=n_max);
        let radius: f64 = rng.random_range(0.0..=1.0);
        let x = random_contraction(n, radius, &mut rng);
        let v = four_unitary_decomposition(&x)?;
        let sum = v.iter().fold(CMatrix::zeros(n, n), |acc, m| acc + m) * Complex64::new(0.5, 0.0);
        worst_rec = worst_rec.max(max_abs_diff(&sum, &x));
        for m in &v {
            worst_unit = worst_unit.max(unitarity_defect(m));
        }
    }
    rec.push(
        "reconstruction",
        worst_rec <= DECOMPOSITION_TOL,
        json!({"trials": trials, "n_max": n_max, "max_abs_deviation": worst_rec, "tol": DECOMPOSITION_TOL}),
    );
    rec.push(
        "unitarity",
        worst_unit <= DECOMPOSITION_TOL,
        json!({"trials": trials, "n_max": n_max, "max_defect": worst_unit, "tol": DECOMPOSITION_TOL}),
    );
    let v = four_unitary_decomposition(&identity(2))?;
    let expected = [identity(2), identity(2), -identity(2), identity(2)];
    let dev = v.iter().zip(&expected).map(|(a, b)| max_abs_diff(a, b)).fold(0.0, f64::max);
    rec.push("identity_example", dev <= DECOMPOSITION_TOL, json!({"max_abs_deviation": dev}));
    Ok(())
}

fn ball_decomposition(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let spec = c.dual.unwrap_or(DualSpec::Suq2);
    let kmax = c.kmax.unwrap_or(4);
    let trials = c.trials.unwrap_or(100);
    let dual = build_dual(spec, c.q, kmax)?.dual();
    let mut rng = seed.rng();
    let (mut worst_rec, mut worst_unit): (f64, f64) = (0.0, 0.0);
    for _ in 0..trials {
        let f = FourierCoeffs::random_sparse(dual.clone(), &mut rng);
        let b = MatrixFamily::from_fn(dual.clone(), |_, n| random_ball_multiplier(n, &mut rng));
        let dec = randomize_ball(&f, &b)?;
        worst_rec = worst_rec.max(dec.recombined(&f)?.max_abs_diff(&dec.randomized)?);
        for v in &dec.unitaries {
            worst_unit = worst_unit.max(v.unitarity_defect());
        }
    }
    rec.push(
        "ball_identity",
        worst_rec <= DECOMPOSITION_TOL,
        json!({"dual": dual.name(), "trials": trials, "max_abs_deviation": worst_rec, "tol": DECOMPOSITION_TOL}),
    );
    rec.push(
        "unitarity",
        worst_unit <= DECOMPOSITION_TOL,
        json!({"dual": dual.name(), "trials": trials, "max_defect": worst_unit, "tol": DECOMPOSITION_TOL}),
    );
    Ok(())
}

/// `1, 2, 4, …` up to `nmax`.
pub fn doubling_grid(nmax: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |&n| n.checked_mul(2)).take_while(|&n| n <= nmax).collect()
}

fn gaussian_norms(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let trials = c.trials.unwrap_or(1000).max(2);
    let half_normal = (2.0 / PI).sqrt();
    for n in doubling_grid(c.nmax) {
        let s = seed.derive(n as u64);
        let est = expected_operator_norm(n, trials, s)?;
        let pass = if n == 1 {
            est.within_sigmas(half_normal, SIGMAS)
        } else {
            (GAUSSIAN_NORM_RANGE.0..=GAUSSIAN_NORM_RANGE.1).contains(&est.mean)
        };
        rec.push(
            "operator_norm",
            pass,
            json!({"op": "gaussian_operator_norm", "n": n, "trials": trials, "seed": s.seed, "stream": s.stream,
                   "mean": est.mean, "stderr": est.stderr}),
        );
    }
    Ok(())
}

/// Real `f̂` on random supports of `S_3` and real coefficients on the real characters of `Z_8`:
/// the integrand is real for every `x`.
pub fn helgason_real_corpus<R: Rng + ?Sized>(rng: &mut R) -> Vec<(FiniteGroupTable, FourierCoeffs)> {
    let s3 = symmetric_group_s3();
    let z8 = cyclic_group(8).expect("Z_8");
    let mut out = Vec::new();
    for _ in 0..12 {
        let mut f = FourierCoeffs::zero(s3.dual().clone());
        while f.is_empty() {
            for (idx, irrep) in s3.dual().irreps().iter().enumerate() {
                if rng.random_bool(0.6) {
                    f.set(idx, from_real(&random_real_matrix(irrep.n(), rng))).expect("shape");
                }
            }
        }
        out.push((s3.clone(), f));
    }
    for _ in 0..8 {
        let mut f = FourierCoeffs::zero(z8.dual().clone());
        while f.is_empty() {
            for idx in [0, 4] {
                if rng.random_bool(0.7) {
                    f.set(idx, from_real(&random_real_matrix(1, rng))).expect("shape");
                }
            }
        }
        out.push((z8.clone(), f));
    }
    out
}

/// Random complex families on `S_3` and `Z_8`.
pub fn helgason_complex_corpus<R: Rng + ?Sized>(rng: &mut R) -> Vec<(FiniteGroupTable, FourierCoeffs)> {
    let s3 = symmetric_group_s3();
    let z8 = cyclic_group(8).expect("Z_8");
    let mut out = Vec::new();
    for _ in 0..5 {
        out.push((s3.clone(), FourierCoeffs::random_sparse(s3.dual().clone(), rng)));
        out.push((z8.clone(), FourierCoeffs::random_sparse(z8.dual().clone(), rng)));
    }
    out
}

fn helgason_gaussian(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let trials = c.trials.unwrap_or(10_000);
    let mut rng = seed.rng();
    let real = helgason_real_corpus(&mut rng);
    for (case, (g, f)) in real.iter().enumerate() {
        let h = classical::helgason_gaussian_mean(f, g, trials, &mut rng)?;
        let pass = (h.mean - h.predicted).abs() <= SIGMAS * h.stderr;
        rec.push(
            "real_integrand",
            pass,
            json!({"group": g.name(), "case": case, "trials": trials, "mean": h.mean, "stderr": h.stderr,
                   "predicted": h.predicted, "predicted_exact": h.predicted_exact}),
        );
    }
    let complex = helgason_complex_corpus(&mut rng);
    for (case, (g, f)) in complex.iter().enumerate() {
        let h = classical::helgason_gaussian_mean(f, g, trials, &mut rng)?;
        let pass = (h.mean - h.predicted_exact).abs() <= SIGMAS * h.stderr
            && h.predicted <= h.predicted_exact * (1.0 + 1e-12);
        rec.push(
            "complex_integrand",
            pass,
            json!({"group": g.name(), "case": case, "trials": trials, "mean": h.mean, "stderr": h.stderr,
                   "predicted": h.predicted, "predicted_exact": h.predicted_exact}),
        );
    }
    Ok(())
}

fn helgason_instance(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let unitaries = c.trials.unwrap_or(1000);
    let mut rng = seed.rng();
    let s3 = symmetric_group_s3();
    let f = FourierCoeffs::random(s3.dual().clone(), &mut rng);
    let small = classical::helgason_instance_report(&f, &s3, unitaries, &mut rng)?;
    let large = classical::helgason_instance_report(&f, &s3, 10 * unitaries, &mut rng)?;
    let stable = (large.ratio - small.ratio).abs() <= STABILITY_TOL * small.ratio;
    rec.push(
        "stability",
        stable,
        json!({"group": "s3", "unitaries": [unitaries, 10 * unitaries],
               "sup_l1_over_u": [small.sup_l1_over_u, large.sup_l1_over_u],
               "ell2": small.ell2, "ratio": [small.ratio, large.ratio], "tol": STABILITY_TOL}),
    );

    let z2 = cyclic_group(2)?;
    let sign = FourierCoeffs::zero(z2.dual().clone()).with(1, identity(1))?;
    let r = classical::helgason_instance_report(&sign, &z2, 100, &mut rng)?;
    let pass = (r.sup_l1_over_u - 1.0).abs() <= 1e-12 && (r.ell2 - 1.0).abs() <= 1e-12;
    rec.push("sign_character", pass, json!({"group": "z2", "sup_l1_over_u": r.sup_l1_over_u, "ell2": r.ell2}));
    Ok(())
}

fn lemma35(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let trials = c.trials.unwrap_or(100);
    let kmax = c.kmax.unwrap_or(4);
    let quad = Su2Quadrature::new(c.resolution)?;
    let mut rng = seed.rng();
    for side in [Side::Upper, Side::Lower] {
        let mut worst = f64::INFINITY;
        for _ in 0..trials {
            let k = rng.random_range(0..=kmax);
            let a = random_complex_matrix(k + 1, &mut rng);
            let i = rng.random_range(0..=k);
            let j = rng.random_range(0..=k);
            let r = classical::lemma35_check(&a, k, i, j, &quad, side)?;
            worst = worst.min(r.margin);
        }
        let name = match side {
            Side::Upper => "upper",
            Side::Lower => "lower",
        };
        rec.push(
            name,
            worst >= MARGIN_ALLOWANCE,
            json!({"trials": trials, "kmax": kmax, "resolution": c.resolution, "min_margin": worst,
                   "allowance": MARGIN_ALLOWANCE}),
        );
    }
    Ok(())
}

fn tb_contraction(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let trials = c.trials.unwrap_or(100);
    let cases: Vec<(DualSpec, usize)> = match c.dual {
        Some(spec) => vec![(spec, c.kmax.unwrap_or(6))],
        None => vec![(DualSpec::Su2, c.kmax.unwrap_or(6)), (DualSpec::Suq2, c.kmax.unwrap_or(8))],
    };
    let mut rng = seed.rng();
    for (spec, kmax) in cases {
        let dual = build_dual(spec, c.q, kmax)?.dual();
        let mut worst: f64 = 0.0;
        for irrep in dual.irreps() {
            for _ in 0..trials {
                let b = random_ball_multiplier(irrep.n(), &mut rng);
                worst = worst.max(tb_block_norm(&b, irrep)?);
            }
        }
        rec.push(
            "block_norm",
            worst <= 1.0 + TB_TOL,
            json!({"dual": dual.name(), "kmax": kmax, "trials_per_irrep": trials, "max_norm": worst, "tol": TB_TOL}),
        );
    }
    Ok(())
}

fn hx_identity(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let spec = c.dual.unwrap_or(DualSpec::Suq2);
    let kmax = c.kmax.unwrap_or(4);
    let trials = c.trials.unwrap_or(100);
    let dual = build_dual(spec, c.q, kmax)?.dual();
    let mut rng = seed.rng();
    let (mut worst, mut worst_rel): (f64, f64) = (0.0, 0.0);
    for _ in 0..trials {
        let f = FourierCoeffs::random_sparse(dual.clone(), &mut rng);
        let b = MatrixFamily::from_fn(dual.clone(), |_, n| random_ball_multiplier(n, &mut rng));
        let h = hx_pairing_identity(&f, &b)?;
        worst = worst.max(h.deviation);
        worst_rel = worst_rel.max(rel(h.deviation, h.rhs.norm().max(1.0)));
    }
    rec.push(
        "hx_pairing",
        worst <= HX_TOL,
        json!({"dual": dual.name(), "kmax": kmax, "trials": trials, "max_abs_deviation": worst,
               "max_rel_deviation": worst_rel, "tol": HX_TOL}),
    );
    Ok(())
}

fn trace_duality(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let trials = c.trials.unwrap_or(100_000);
    let mut rng = seed.rng();
    let (mut worst_aligned, mut worst_excess): (f64, f64) = (0.0, f64::NEG_INFINITY);
    for n in 1..=8 {
        for _ in 0..10 {
            let a = random_complex_matrix(n, &mut rng);
            let t = trace_norm_duality(&a, 200, &mut rng)?;
            worst_aligned = worst_aligned.max((t.aligned - t.exact).abs());
            worst_excess = worst_excess.max(t.random_sup - t.exact);
        }
    }
    rec.push(
        "aligned_unitary",
        worst_aligned <= ALIGNED_TOL,
        json!({"sizes": "1..=8", "max_abs_deviation": worst_aligned, "tol": ALIGNED_TOL}),
    );
    rec.push(
        "random_sup_bounded",
        worst_excess <= RANDOM_SUP_SLACK,
        json!({"sizes": "1..=8", "max_excess": worst_excess, "tol": RANDOM_SUP_SLACK}),
    );
    let a = random_complex_matrix(2, &mut rng);
    let t = trace_norm_duality(&a, trials, &mut rng)?;
    rec.push(
        "random_sup_2x2",
        t.random_sup >= RANDOM_SUP_FLOOR * t.exact && t.random_sup <= t.exact + RANDOM_SUP_SLACK,
        json!({"trials": trials, "exact": t.exact, "aligned": t.aligned, "random_sup": t.random_sup,
               "floor": RANDOM_SUP_FLOOR}),
    );
    Ok(())
}

fn central_sum(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let trials = c.trials.unwrap_or(100);
    let kmax = c.kmax.unwrap_or(6);
    let specs = match c.dual {
        Some(spec) => vec![spec],
        None => vec![DualSpec::Suq2, DualSpec::Su2],
    };
    let mut rng = seed.rng();
    for spec in specs {
        let dual = build_dual(spec, c.q, kmax)?.dual();
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let len = rng.random_range(1..=dual.len());
            let coeffs: Vec<Complex64> = (0..len)
                .map(|_| Complex64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal)))
                .collect();
            let r = central_sum_check(&coeffs, dual.clone())?;
            worst = worst.max(rel(r.deviation, r.sum_c_sq));
        }
        rec.push(
            "central_identity",
            worst <= CENTRAL_TOL,
            json!({"dual": dual.name(), "trials": trials, "max_rel_deviation": worst, "tol": CENTRAL_TOL}),
        );
    }
    Ok(())
}

pub const COROLLARY_QS: [f64; 3] = [0.3, 0.5, 0.9];
pub const COROLLARY_EPS: [f64; 3] = [0.1, 0.5, 1.0];

fn corollary_suq2(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let trials = c.trials.unwrap_or(50);
    let kmax = c.kmax.unwrap_or(60);
    let mut rng = seed.rng();
    for q in COROLLARY_QS {
        let dual = Arc::new(make_suq2_dual(q, kmax)?);
        let dims_ok = growth_report(&dual, kmax).suq2_bound_ok == Some(true);
        for eps in COROLLARY_EPS {
            let (mut all_hold, mut all_termwise) = (true, true);
            let mut worst_ratio: f64 = 0.0;
            for _ in 0..trials {
                let f = FourierCoeffs::random_sparse(dual.clone(), &mut rng);
                let r = corollary_chain_check(q, eps, &f, kmax)?;
                all_hold &= r.holds();
                all_termwise &= r.termwise_ok;
                worst_ratio = worst_ratio.max(rel(r.lhs, r.rhs));
            }
            rec.push(
                "chain",
                all_hold && all_termwise && dims_ok,
                json!({"q": q, "eps": eps, "kmax": kmax, "trials": trials, "max_lhs_over_rhs": worst_ratio,
                       "termwise_ok": all_termwise, "dimension_bound_ok": dims_ok}),
            );
        }
    }
    Ok(())
}

fn growth(c: &Config, rec: &mut Recorder) -> Result<()> {
    let spec = c.dual.unwrap_or(DualSpec::Suq2);
    let kmax = c.kmax.unwrap_or(40);
    let dual = build_dual(spec, c.q, kmax)?.dual();
    let report = growth_report(&dual, kmax);
    for row in &report.rows {
        let ok = match dual.family() {
            crate::dual::DualFamily::Suq2 { q } => row.d >= q.powi(-(row.k as i32)),
            _ => true,
        };
        rec.push("row", ok, json!({"dual": dual.name(), "k": row.k, "n": row.n, "d": row.d, "ratio": row.ratio}));
    }
    Ok(())
}

fn characters(c: &Config, rec: &mut Recorder) -> Result<()> {
    let kmax = c.kmax.unwrap_or(200);
    let values: Vec<f64> = (0..=kmax).map(character_l1).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let last = *values.last().expect("k = 0 is always present");
    let limit = 8.0 / (PI * PI);
    let tail_start = kmax / 2;
    let tail_monotone = values[tail_start..].windows(2).all(|w| w[1] <= w[0] + 1e-15);
    rec.push(
        "summary",
        min >= CHARACTER_FLOOR,
        json!({"kmax": kmax, "min": min, "value_at_kmax": last, "limit": limit,
               "distance_to_limit": (last - limit).abs(), "tail_monotone": tail_monotone, "floor": CHARACTER_FLOOR}),
    );
    if kmax >= 200 {
        rec.push(
            "limit",
            (values[200] - limit).abs() <= CHARACTER_LIMIT_TOL,
            json!({"k": 200, "value": values[200], "limit": limit, "tol": CHARACTER_LIMIT_TOL}),
        );
    }
    Ok(())
}

fn cotype2(c: &Config, seed: RngSeed, rec: &mut Recorder) -> Result<()> {
    let trials = c.trials.unwrap_or(10_000);
    let mut rng = seed.rng();
    let z8 = cyclic_group(8)?;
    let s3 = symmetric_group_s3();
    let half_normal = (2.0 / PI).sqrt();

    let single = FourierCoeffs::random_sparse(s3.dual().clone(), &mut rng);
    let r = classical::cotype2_ratio(std::slice::from_ref(&single), &s3, trials, &mut rng)?;
    rec.push(
        "singleton",
        (r.ratio - half_normal).abs() <= SIGMAS * r.stderr && r.ratio >= COTYPE_FLOOR,
        json!({"group": "s3", "trials": trials, "ratio": r.ratio, "stderr": r.stderr, "target": half_normal}),
    );

    let characters: Vec<FourierCoeffs> = (0..8)
        .map(|k| FourierCoeffs::zero(z8.dual().clone()).with(k, identity(1)))
        .collect::<Result<_>>()?;
    let r = classical::cotype2_ratio(&characters, &z8, trials, &mut rng)?;
    rec.push(
        "z8_characters",
        r.ratio >= COTYPE_FLOOR,
        json!({"group": "z8", "trials": trials, "ratio": r.ratio, "stderr": r.stderr, "floor": COTYPE_FLOOR}),
    );

    for (name, group_len) in [("s3", 5usize), ("z8", 6)] {
        let xs: Vec<FourierCoeffs> = (0..group_len)
            .map(|_| match name {
                "s3" => FourierCoeffs::random_sparse(s3.dual().clone(), &mut rng),
                _ => FourierCoeffs::random_sparse(z8.dual().clone(), &mut rng),
            })
            .collect();
        let r = match name {
            "s3" => classical::cotype2_ratio(&xs, &s3, trials, &mut rng)?,
            _ => classical::cotype2_ratio(&xs, &z8, trials, &mut rng)?,
        };
        rec.push(
            "random_family",
            r.ratio >= COTYPE_FLOOR,
            json!({"group": name, "size": group_len, "trials": trials, "ratio": r.ratio, "stderr": r.stderr,
                   "floor": COTYPE_FLOOR}),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        for s in Subcommand::EXPERIMENTS {
            assert_eq!(s.name().parse::<Subcommand>().unwrap(), s);
        }
        assert_eq!("all".parse::<Subcommand>().unwrap(), Subcommand::All);
        assert!("nope".parse::<Subcommand>().is_err());
        assert_eq!("z8".parse::<DualSpec>().unwrap(), DualSpec::Cyclic(8));
        assert_eq!("o3plus".parse::<DualSpec>().unwrap(), DualSpec::OnPlus(3));
        assert!("z0".parse::<DualSpec>().is_err());
        assert!("o1plus".parse::<DualSpec>().is_err());
        for s in ["trivial", "z5", "s3", "su2", "suq2", "o4plus"] {
            assert_eq!(s.parse::<DualSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn doubling() {
        assert_eq!(doubling_grid(256), vec![1, 2, 4, 8, 16, 32, 64, 128, 256]);
        assert_eq!(doubling_grid(1), vec![1]);
        assert_eq!(doubling_grid(100).last(), Some(&64));
    }

    #[test]
    fn seed_required_for_stochastic() {
        assert!(matches!(run(Subcommand::Plancherel, &Config::default()), Err(Error::Config(_))));
        assert!(run(Subcommand::Characters, &Config { kmax: Some(10), ..Config::default() }).is_ok());
    }

    #[test]
    fn plancherel_report_and_hash() {
        let cfg = Config { trials: Some(20), kmax: Some(3), ..Config::with_seed(7) };
        let a = run(Subcommand::Plancherel, &cfg).unwrap();
        let b = run(Subcommand::Plancherel, &cfg).unwrap();
        assert!(a.verdict.pass, "{:?}", a.verdict);
        assert_eq!(a.content_hash(), b.content_hash());
        assert_eq!(a.sidecar.content_hash, a.content_hash());
        let other = run(Subcommand::Plancherel, &Config { seed: Some(8), ..cfg }).unwrap();
        assert_ne!(a.content_hash(), other.content_hash());
        let csv = a.to_csv();
        assert!(csv.lines().next().unwrap().contains("max_rel_deviation"));
        assert_eq!(csv.lines().count(), 1 + a.records.len());
    }

    #[test]
    fn growth_csv_rows() {
        let cfg = Config { kmax: Some(5), ..Config::default() };
        let r = run(Subcommand::Growth, &cfg).unwrap();
        assert_eq!(r.records.len(), 6);
        assert!(r.verdict.pass);
    }

    #[test]
    fn bad_config_rejected() {
        let cfg = Config { q: 1.5, ..Config::with_seed(1) };
        assert!(matches!(run(Subcommand::Growth, &cfg), Err(Error::Config(_))));
    }
}
