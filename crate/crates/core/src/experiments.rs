//! Seeded experiment harness: ensembles of realizations, parameter sweeps,
//! excited-state repair with `W^(s)`, and the semiclassical and homogenized
//! limits.
//!
//! Every experiment expands its configuration into independent work units,
//! runs them on the rayon pool and merges the results in seed order, so the
//! output is a pure function of the configuration.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::continuum::{continuum_eigenvalues, fluctuation_norm, homogenized, invert_ratio};
use crate::discretize::assemble;
use crate::landscape::{generalized_minima, landscape, local_minima, LandscapeResult, MinimaSet};
use crate::linalg::{lowest_eigenvalues, DEFAULT_TOL};
use crate::potential::{decompose_wells, generate, Distribution, RealizedPotential, WellDecomposition};
use crate::{Error, Result, PI2_OVER_8, VOGT_UPPER};

/// Default cap on `L·M` for a single solve.
pub const DEFAULT_MAX_NODES: usize = 4_000_000;

/// Relative band around `π²/8` counted as a good prediction.
pub const RATIO_BAND: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Ensemble,
    SweepVmax,
    #[serde(rename = "sweep_L")]
    SweepL,
    SweepK,
    Excited,
    Semiclassical,
    Homogenized,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Ensemble,
        ExperimentKind::SweepVmax,
        ExperimentKind::SweepL,
        ExperimentKind::SweepK,
        ExperimentKind::Excited,
        ExperimentKind::Semiclassical,
        ExperimentKind::Homogenized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Ensemble => "ensemble",
            ExperimentKind::SweepVmax => "sweep_vmax",
            ExperimentKind::SweepL => "sweep_L",
            ExperimentKind::SweepK => "sweep_k",
            ExperimentKind::Excited => "excited",
            ExperimentKind::Semiclassical => "semiclassical",
            ExperimentKind::Homogenized => "homogenized",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!(
                    "unknown experiment kind `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

fn display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Fully resolved experiment parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(serialize_with = "display")]
    pub dist: Distribution,
    /// Domain lengths `L`.
    pub lengths: Vec<usize>,
    /// Couplings `k`.
    pub couplings: Vec<f64>,
    /// Largest potential heights for `sweep_vmax`; `k = vmax / dist.max_height()`.
    pub vmax: Vec<f64>,
    /// Subdivisions per unit cell `M`.
    pub per_cell: usize,
    pub n_eigs: usize,
    /// Generalized-minima order.
    pub s: usize,
    pub seeds: Vec<u64>,
    /// Relative eigenvalue tolerance.
    pub tol: f64,
    /// Refuse solves with `L·M` above this.
    pub max_nodes: usize,
    /// Homogenization parameters `γ_c` to pin.
    pub gamma_c: Vec<f64>,
    /// Target ratios `r`, each mapped to `γ_c` by inverting `R`.
    pub target_ratio: Vec<f64>,
    /// Also compute continuum eigenvalues.
    pub oracle: bool,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, dist: Distribution) -> Self {
        Self {
            kind,
            dist,
            lengths: vec![100],
            couplings: vec![1.0],
            vmax: Vec::new(),
            per_cell: crate::discretize::DEFAULT_SUBDIVISIONS,
            n_eigs: 1,
            s: 1,
            seeds: Vec::new(),
            tol: DEFAULT_TOL,
            max_nodes: DEFAULT_MAX_NODES,
            gamma_c: Vec::new(),
            target_ratio: Vec::new(),
            oracle: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.dist.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.seeds.is_empty() {
            return bad("seed list is empty".into());
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return bad(format!("seed {} listed twice", w[0]));
        }
        if self.lengths.is_empty() || self.lengths.contains(&0) {
            return bad("lengths must be a nonempty list of positive integers".into());
        }
        if self.per_cell < 2 {
            return bad(format!("M = {} must be at least 2", self.per_cell));
        }
        if self.n_eigs == 0 || self.s == 0 {
            return bad("n_eigs and s must be at least 1".into());
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tolerance {} must lie in (0, 1)", self.tol));
        }
        let positive = |name: &str, xs: &[f64]| {
            if xs.iter().all(|x| x.is_finite() && *x > 0.0) {
                Ok(())
            } else {
                bad(format!("{name} entries must be finite and positive"))
            }
        };
        positive("couplings", &self.couplings)?;
        positive("vmax", &self.vmax)?;
        positive("gamma_c", &self.gamma_c)?;
        if let Some(r) = self
            .target_ratio
            .iter()
            .find(|r| !(**r > 1.0 && **r < PI2_OVER_8))
        {
            return bad(format!("target ratio {r} outside (1, π²/8)"));
        }
        let need = |name: &str, empty: bool| {
            if empty {
                bad(format!("{} needs a nonempty {name} list", self.kind))
            } else {
                Ok(())
            }
        };
        match self.kind {
            ExperimentKind::SweepVmax => {
                need("vmax", self.vmax.is_empty())?;
                if self.dist.max_height() <= 0.0 {
                    return bad("sweep_vmax needs a distribution with a positive height".into());
                }
            }
            ExperimentKind::Homogenized => {
                need(
                    "gamma_c or target_ratio",
                    self.gamma_c.is_empty() && self.target_ratio.is_empty(),
                )?;
                if self.dist.mean() <= 0.0 {
                    return bad("homogenized needs a distribution with positive mean".into());
                }
            }
            _ => need("couplings", self.couplings.is_empty())?,
        }
        for &len in &self.lengths {
            let nodes = len.saturating_mul(self.per_cell);
            if nodes > self.max_nodes {
                return Err(Error::TooLarge {
                    nodes,
                    cap: self.max_nodes,
                });
            }
        }
        Ok(())
    }
}

/// One eigenvalue paired with one (generalized) minimum of `W`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRecord {
    pub seed: u64,
    #[serde(rename = "L")]
    pub len: usize,
    pub k: f64,
    /// `k·L²·E(ω)`.
    pub gamma_c: f64,
    #[serde(rename = "L_max")]
    pub l_max: usize,
    pub n: usize,
    pub s: usize,
    pub lambda_n: f64,
    #[serde(rename = "W_n")]
    pub w_n: f64,
    pub ratio: f64,
    /// Continuum eigenvalue with the same index, when requested.
    pub oracle_lambda: Option<f64>,
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl RatioRecord {
    pub fn reference() -> f64 {
        PI2_OVER_8
    }

    /// `|ratio / (π²/8) − 1|`.
    pub fn deviation(&self) -> f64 {
        (self.ratio / PI2_OVER_8 - 1.0).abs()
    }
}

/// Whether `λ₁·max u` lies strictly inside the universal bound.
pub fn vogt_holds(ratio: f64) -> bool {
    ratio > 1.0 && ratio < VOGT_UPPER
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub seed: u64,
    pub message: String,
}

/// Fewer generalized minima than eigenvalues at order `s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Shortfall {
    pub seed: u64,
    #[serde(rename = "L")]
    pub len: usize,
    pub s: usize,
    pub requested: usize,
    pub available: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemiclassicalPoint {
    pub seed: u64,
    pub k: f64,
    pub has_zero_well: bool,
    #[serde(rename = "L_max")]
    pub l_max: usize,
    /// Smallest positive cell height.
    pub a_min: f64,
    pub lambda_1: f64,
    pub u_max: f64,
    pub ratio: f64,
    /// `k·a ≤ λ₁ ≤ k·a + π²`; only meaningful without a zero well.
    pub sandwich: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomogenizedPoint {
    pub seed: u64,
    #[serde(rename = "L")]
    pub len: usize,
    pub k: f64,
    pub gamma_c: f64,
    pub target_ratio: Option<f64>,
    /// `λ₁·L² / (π² + γ_c)`.
    pub lambda_scaled: f64,
    /// `(u_max / L²) / u_c_max(γ_c)`.
    pub u_scaled: f64,
    pub ratio: f64,
    pub predicted_ratio: f64,
    pub f_norm: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// Share of ratios within `RATIO_BAND` of `π²/8`.
    pub within_band: f64,
}

pub fn summarize(records: &[RatioRecord]) -> Summary {
    if records.is_empty() {
        return Summary::default();
    }
    let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
    let n = ratios.len() as f64;
    Summary {
        count: ratios.len(),
        mean: ratios.iter().sum::<f64>() / n,
        median: median(&ratios),
        min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        within_band: records.iter().filter(|r| r.deviation() <= RATIO_BAND).count() as f64 / n,
    }
}

/// Median of a nonempty slice (mean of the middle pair for even length).
pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of an empty slice");
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExperimentRun {
    pub records: Vec<RatioRecord>,
    pub failures: Vec<Failure>,
    pub shortfalls: Vec<Shortfall>,
    pub semiclassical: Vec<SemiclassicalPoint>,
    pub homogenized: Vec<HomogenizedPoint>,
    pub summary: Summary,
}

/// Everything the pipeline derives from one realization.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub eigenvalues: Vec<f64>,
    pub landscape: LandscapeResult,
    pub minima: MinimaSet,
    pub wells: WellDecomposition,
}

/// Discretizes, solves for the lowest `n` eigenvalues and the landscape.
pub fn analyze(pot: &RealizedPotential, per_cell: usize, n: usize, tol: f64) -> Result<Analysis> {
    let t = assemble(pot, per_cell)?;
    let spec = lowest_eigenvalues(&t, n, tol)?;
    let land = landscape(&t)?;
    let minima = local_minima(&land);
    Ok(Analysis {
        eigenvalues: spec.eigenvalues,
        minima,
        landscape: land,
        wells: decompose_wells(pot),
    })
}

fn check_nodes(len: usize, cfg: &ExperimentConfig) -> Result<()> {
    let nodes = len.saturating_mul(cfg.per_cell);
    if nodes > cfg.max_nodes {
        return Err(Error::TooLarge {
            nodes,
            cap: cfg.max_nodes,
        });
    }
    Ok(())
}

fn gamma_of(pot: &RealizedPotential) -> f64 {
    let len = pot.len() as f64;
    pot.coupling * len * len * pot.mean_height()
}

/// Pairs the eigenvalues in `a` with `W^(s)` rank by rank.
///
/// # Panics
///
/// If the ground ratio violates the universal bound.
pub fn ratio_records(
    pot: &RealizedPotential,
    a: &Analysis,
    s: usize,
    oracle: Option<&[f64]>,
    runtime_ms: f64,
) -> (Vec<RatioRecord>, Option<Shortfall>) {
    let n = a.eigenvalues.len();
    let minima = generalized_minima(&a.minima, s, n);
    let gamma_c = gamma_of(pot);
    let out: Vec<RatioRecord> = a
        .eigenvalues
        .iter()
        .zip(&minima.values)
        .enumerate()
        .map(|(i, (&lambda_n, &w_n))| RatioRecord {
            seed: pot.seed,
            len: pot.len(),
            k: pot.coupling,
            gamma_c,
            l_max: a.wells.l_max,
            n: i + 1,
            s,
            lambda_n,
            w_n,
            ratio: lambda_n / w_n,
            oracle_lambda: oracle.and_then(|o| o.get(i).copied()),
            runtime_ms,
        })
        .collect();
    if let Some(first) = out.first() {
        assert!(
            vogt_holds(first.ratio),
            "ground ratio {} outside (1, {VOGT_UPPER}) for seed {} (L = {}, k = {})",
            first.ratio,
            pot.seed,
            pot.len(),
            pot.coupling
        );
    }
    let short = (out.len() < n).then(|| Shortfall {
        seed: pot.seed,
        len: pot.len(),
        s,
        requested: n,
        available: out.len(),
    });
    (out, short)
}

struct UnitOutput {
    records: Vec<RatioRecord>,
    shortfalls: Vec<Shortfall>,
    semiclassical: Option<SemiclassicalPoint>,
    homogenized: Option<HomogenizedPoint>,
}

impl UnitOutput {
    fn plain(records: Vec<RatioRecord>) -> Self {
        Self {
            records,
            shortfalls: Vec::new(),
            semiclassical: None,
            homogenized: None,
        }
    }
}

/// A realization at a given coupling, plus the pinned homogenization target.
#[derive(Clone, Copy, Debug)]
struct Unit {
    seed: u64,
    len: usize,
    coupling: Coupling,
}

#[derive(Clone, Copy, Debug)]
enum Coupling {
    K(f64),
    Vmax(f64),
    Gamma(f64, Option<f64>),
}

fn units(cfg: &ExperimentConfig) -> Result<Vec<Unit>> {
    let mut out = Vec::new();
    let coords: Vec<Coupling> = match cfg.kind {
        ExperimentKind::SweepVmax => cfg.vmax.iter().map(|&v| Coupling::Vmax(v)).collect(),
        ExperimentKind::Homogenized => {
            let mut c: Vec<Coupling> = cfg.gamma_c.iter().map(|&g| Coupling::Gamma(g, None)).collect();
            for &r in &cfg.target_ratio {
                c.push(Coupling::Gamma(invert_ratio(r)?, Some(r)));
            }
            c
        }
        _ => cfg.couplings.iter().map(|&k| Coupling::K(k)).collect(),
    };
    let mut seeds = cfg.seeds.clone();
    seeds.sort_unstable();
    // sweep_vmax reuses one realization throughout
    if cfg.kind == ExperimentKind::SweepVmax {
        seeds.truncate(1);
    }
    for seed in seeds {
        for &len in &cfg.lengths {
            for &coupling in &coords {
                out.push(Unit { seed, len, coupling });
            }
        }
    }
    Ok(out)
}

fn run_unit(cfg: &ExperimentConfig, unit: Unit) -> Result<UnitOutput> {
    let start = Instant::now();
    check_nodes(unit.len, cfg)?;
    let base = generate(cfg.dist, unit.len, 1.0, unit.seed)?;
    let len2 = (unit.len * unit.len) as f64;
    let (k, gamma) = match unit.coupling {
        Coupling::K(k) => (k, None),
        Coupling::Vmax(v) => (v / cfg.dist.max_height(), None),
        Coupling::Gamma(g, r) => (g / (len2 * base.mean_height()), Some((g, r))),
    };
    let pot = base.with_coupling(k);
    let n = if cfg.kind == ExperimentKind::Semiclassical || gamma.is_some() {
        1
    } else {
        cfg.n_eigs
    };
    let a = analyze(&pot, cfg.per_cell, n, cfg.tol)?;
    let oracle = if cfg.oracle {
        Some(continuum_eigenvalues(&pot, n)?)
    } else {
        None
    };
    let elapsed = || start.elapsed().as_secs_f64() * 1e3;

    match cfg.kind {
        ExperimentKind::Excited => {
            let mut records = Vec::new();
            let mut shortfalls = Vec::new();
            for s in 1..=cfg.s {
                let (r, short) = ratio_records(&pot, &a, s, oracle.as_deref(), 0.0);
                records.extend(r);
                shortfalls.extend(short);
            }
            let ms = elapsed();
            records.iter_mut().for_each(|r| r.runtime_ms = ms);
            Ok(UnitOutput {
                records,
                shortfalls,
                semiclassical: None,
                homogenized: None,
            })
        }
        ExperimentKind::Semiclassical => {
            let (records, _) = ratio_records(&pot, &a, 1, oracle.as_deref(), elapsed());
            let lambda_1 = a.eigenvalues[0];
            let has_zero_well = pot.min_height() == 0.0;
            let a_min = pot.min_height();
            let sandwich = (!has_zero_well).then(|| {
                let ka = k * a_min;
                ka <= lambda_1 && lambda_1 <= ka + std::f64::consts::PI.powi(2)
            });
            let point = SemiclassicalPoint {
                seed: unit.seed,
                k,
                has_zero_well,
                l_max: a.wells.l_max,
                a_min,
                lambda_1,
                u_max: a.landscape.u_max,
                ratio: records[0].ratio,
                sandwich,
            };
            Ok(UnitOutput {
                semiclassical: Some(point),
                ..UnitOutput::plain(records)
            })
        }
        ExperimentKind::Homogenized => {
            let (gamma_c, target) = gamma.expect("homogenized units carry γ_c");
            let (records, _) = ratio_records(&pot, &a, 1, oracle.as_deref(), 0.0);
            let c = homogenized(gamma_c);
            let f_norm = fluctuation_norm(&pot, gamma_c);
            let point = HomogenizedPoint {
                seed: unit.seed,
                len: unit.len,
                k,
                gamma_c,
                target_ratio: target,
                lambda_scaled: a.eigenvalues[0] * len2 / c.lambda_c,
                u_scaled: a.landscape.u_max / len2 / c.u_c_max,
                ratio: records[0].ratio,
                predicted_ratio: c.ratio,
                f_norm,
            };
            let ms = elapsed();
            let records = records
                .into_iter()
                .map(|r| RatioRecord { runtime_ms: ms, ..r })
                .collect();
            Ok(UnitOutput {
                homogenized: Some(point),
                ..UnitOutput::plain(records)
            })
        }
        _ => {
            let (records, _) = ratio_records(&pot, &a, 1, oracle.as_deref(), elapsed());
            Ok(UnitOutput::plain(records))
        }
    }
}

/// Runs any experiment kind. Solver failures are recorded per seed and the
/// remaining units still run; configuration errors abort.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    cfg.validate()?;
    if cfg.kind == ExperimentKind::Homogenized && !cfg.target_ratio.is_empty() {
        assert!(
            crate::continuum::ratio_is_monotone(),
            "R(γ) is not monotone on the inversion range"
        );
    }
    let work = units(cfg)?;
    let results: Vec<(Unit, Result<UnitOutput>)> = work
        .par_iter()
        .map(|&u| (u, run_unit(cfg, u)))
        .collect();

    let mut run = ExperimentRun::default();
    for (unit, res) in results {
        match res {
            Ok(out) => {
                run.records.extend(out.records);
                run.shortfalls.extend(out.shortfalls);
                run.semiclassical.extend(out.semiclassical);
                run.homogenized.extend(out.homogenized);
            }
            Err(e) if e.is_solver_failure() => {
                log::warn!("seed {} failed: {e}", unit.seed);
                run.failures.push(Failure {
                    seed: unit.seed,
                    message: e.to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    run.summary = summarize(&run.records);
    Ok(run)
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.kind != kind {
        return Err(Error::Config(format!(
            "expected a {kind} configuration, got {}",
            cfg.kind
        )));
    }
    Ok(())
}

/// One record per seed (and per `n ≤ n_eigs`), paired with the raw minima.
pub fn run_ensemble(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    expect_kind(cfg, ExperimentKind::Ensemble)?;
    run(cfg)
}

/// One realization (the smallest seed) rescaled to each configured `vmax`.
pub fn sweep_vmax(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    expect_kind(cfg, ExperimentKind::SweepVmax)?;
    run(cfg)
}

pub fn sweep_l(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    expect_kind(cfg, ExperimentKind::SweepL)?;
    run(cfg)
}

pub fn sweep_k(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    expect_kind(cfg, ExperimentKind::SweepK)?;
    run(cfg)
}

/// Pairs the lowest `n_eigs` eigenvalues with `W^(s)` for every `s ≤ cfg.s`.
pub fn excited_states(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    expect_kind(cfg, ExperimentKind::Excited)?;
    run(cfg)
}

pub fn semiclassical(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    expect_kind(cfg, ExperimentKind::Semiclassical)?;
    run(cfg)
}

/// Pins `γ_c` (directly or through a target ratio) and sets `k = γ_c/(L²E)`.
pub fn homogenized_regime(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    expect_kind(cfg, ExperimentKind::Homogenized)?;
    run(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: ExperimentKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind, Distribution::bernoulli(0.5, 10.0).unwrap());
        c.lengths = vec![40];
        c.per_cell = 8;
        c.seeds = vec![3, 1, 2];
        c
    }

    #[test]
    fn ensemble_one_record_per_seed_in_order() {
        let run = run_ensemble(&cfg(ExperimentKind::Ensemble)).unwrap();
        let seeds: Vec<u64> = run.records.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![1, 2, 3]);
        for r in &run.records {
            assert_eq!(r.ratio, r.lambda_n / r.w_n);
            assert_eq!(r.gamma_c, r.k * 1600.0 * 5.0);
            assert!(vogt_holds(r.ratio));
        }
        assert_eq!(run.summary.count, 3);
    }

    #[test]
    fn free_ensemble_ratio() {
        let mut c = cfg(ExperimentKind::Ensemble);
        c.dist = Distribution::bernoulli(1.0, 10.0).unwrap();
        c.seeds = vec![9];
        c.per_cell = 32;
        let run = run(&c).unwrap();
        assert!(run.records[0].deviation() < 1e-3);
    }

    #[test]
    fn empty_seeds_rejected() {
        let mut c = cfg(ExperimentKind::Ensemble);
        c.seeds.clear();
        assert!(matches!(run(&c), Err(Error::Config(_))));
    }

    #[test]
    fn duplicate_seeds_rejected() {
        let mut c = cfg(ExperimentKind::Ensemble);
        c.seeds = vec![4, 2, 4];
        assert!(matches!(run(&c), Err(Error::Config(_))));
    }

    #[test]
    fn node_cap() {
        let mut c = cfg(ExperimentKind::SweepL);
        c.max_nodes = 100;
        assert!(matches!(run(&c), Err(Error::TooLarge { nodes: 320, cap: 100 })));
    }

    #[test]
    fn wrong_kind_rejected() {
        assert!(sweep_k(&cfg(ExperimentKind::Ensemble)).is_err());
    }

    #[test]
    fn sweep_vmax_reuses_first_seed() {
        let mut c = cfg(ExperimentKind::SweepVmax);
        c.vmax = vec![0.5, 5.0, 50.0];
        let run = sweep_vmax(&c).unwrap();
        assert_eq!(run.records.len(), 3);
        assert!(run.records.iter().all(|r| r.seed == 1));
        let ks: Vec<f64> = run.records.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![0.05, 0.5, 5.0]);
        assert!(run.records.iter().all(|r| r.l_max == run.records[0].l_max));
    }

    #[test]
    fn excited_emits_every_order() {
        let mut c = cfg(ExperimentKind::Excited);
        c.n_eigs = 6;
        c.s = 3;
        c.seeds = vec![5];
        let run = excited_states(&c).unwrap();
        for s in 1..=3 {
            let n = run.records.iter().filter(|r| r.s == s).count();
            let short = run.shortfalls.iter().find(|x| x.s == s).map_or(0, |x| x.requested - x.available);
            assert_eq!(n + short, 6);
        }
    }

    #[test]
    fn homogenized_pins_gamma() {
        let mut c = cfg(ExperimentKind::Homogenized);
        c.lengths = vec![64];
        c.per_cell = 4;
        c.gamma_c = vec![5.0];
        c.target_ratio = vec![1.1];
        let run = homogenized_regime(&c).unwrap();
        assert_eq!(run.homogenized.len(), 6);
        for (p, r) in run.homogenized.iter().zip(&run.records) {
            assert!((r.gamma_c / p.gamma_c - 1.0).abs() < 1e-14);
            assert_eq!(p.ratio, r.ratio);
        }
        let targeted: Vec<_> = run.homogenized.iter().filter(|p| p.target_ratio.is_some()).collect();
        assert_eq!(targeted.len(), 3);
        assert!((targeted[0].predicted_ratio - 1.1).abs() < 1e-9);
    }

    #[test]
    fn semiclassical_flags() {
        let mut c = cfg(ExperimentKind::Semiclassical);
        c.dist = Distribution::bernoulli(0.0, 1.0).unwrap();
        c.lengths = vec![10];
        c.seeds = vec![1];
        c.couplings = vec![1.0, 100.0, 1e4];
        let run = semiclassical(&c).unwrap();
        assert!(run.semiclassical.iter().all(|p| !p.has_zero_well && p.sandwich == Some(true)));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("bogus".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
