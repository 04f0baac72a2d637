//! Cross-validation corpus: discrete pipeline against the continuum oracle,
//! the two-sided `{0, b}` bounds, the universal ratio bound and the
//! comparison principles, over a fixed family of Bernoulli realizations.

use std::f64::consts::PI;

use crate::continuum::{
    bernoulli_bounds, continuum_eigenvalues, continuum_landscape, sup_solution_sigma,
};
use crate::discretize::assemble;
use crate::experiments::vogt_holds;
use crate::landscape::landscape;
use crate::linalg::{lowest_eigenvalues, DEFAULT_TOL};
use crate::potential::{decompose_wells, generate, Distribution, RealizedPotential};
use crate::Result;

pub const DEFAULT_CORPUS_SIZE: usize = 24;

/// Meshes compared against the oracle; the second halves `h`.
pub const MESHES: [usize; 2] = [64, 128];

/// Relative agreement required on the coarser mesh.
pub const ORACLE_TOL: f64 = 5e-4;

/// Smallest accepted error reduction when `h` is halved.
pub const MIN_ORDER_GAIN: f64 = 3.0;

/// `(ν, γ)` exponents for which the eigenvalue lower bound is evaluated.
pub const LAMBDA_EXPONENTS: [(f64, f64); 2] = [(0.0, 0.5), (0.0, 0.9)];

const WALLS: [f64; 3] = [1.0, 10.0, 100.0];
const ZERO_PROBS: [f64; 3] = [0.5, 0.7, 0.9];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorpusEntry {
    pub seed: u64,
    pub p_zero: f64,
    /// Wall height `b`.
    pub b: f64,
    pub len: usize,
}

impl CorpusEntry {
    pub fn potential(&self) -> Result<RealizedPotential> {
        generate(Distribution::bernoulli(self.p_zero, self.b)?, self.len, 1.0, self.seed)
    }
}

/// `size` realizations cycling through the wall heights and zero
/// probabilities, with `20 ≤ L ≤ 200`.
pub fn corpus(size: usize) -> Vec<CorpusEntry> {
    (0..size)
        .map(|i| CorpusEntry {
            seed: i as u64 + 1,
            b: WALLS[i % 3],
            p_zero: ZERO_PROBS[(i / 3) % 3],
            len: 20 + (37 * i) % 181,
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct OracleComparison {
    pub entry: CorpusEntry,
    pub l_max: usize,
    pub lambda_c: f64,
    pub u_c: f64,
    /// Discrete `λ₁` on each of `MESHES`.
    pub lambda_h: Vec<f64>,
    /// Discrete `max u` on each of `MESHES`.
    pub u_h: Vec<f64>,
    /// Smallest `ũ − u` over the sample points (nonnegative when dominated).
    pub sup_margin: f64,
    /// `max (u_{2k} − u_k)` on the finer mesh (nonpositive when ordered).
    pub comparison_gap: f64,
    /// `λ₁(k) − λ₁(2k)` on the finer mesh (nonpositive when ordered).
    pub monotone_gap: f64,
}

impl OracleComparison {
    pub fn lambda_errors(&self) -> Vec<f64> {
        self.lambda_h.iter().map(|l| (l - self.lambda_c).abs() / self.lambda_c).collect()
    }

    pub fn u_errors(&self) -> Vec<f64> {
        self.u_h.iter().map(|u| (u - self.u_c).abs() / self.u_c).collect()
    }
}

fn ground(pot: &RealizedPotential, m: usize) -> Result<(f64, Vec<f64>)> {
    let t = assemble(pot, m)?;
    let lambda = lowest_eigenvalues(&t, 1, DEFAULT_TOL)?.eigenvalues[0];
    Ok((lambda, landscape(&t)?.u))
}

pub fn compare(entry: &CorpusEntry) -> Result<OracleComparison> {
    let pot = entry.potential()?;
    let wells = decompose_wells(&pot);
    let lambda_c = continuum_eigenvalues(&pot, 1)?[0];
    let exact = continuum_landscape(&pot);
    let (_, u_c) = exact.max();

    let mut lambda_h = Vec::new();
    let mut u_h = Vec::new();
    let mut fine_u = Vec::new();
    for &m in &MESHES {
        let (l, u) = ground(&pot, m)?;
        lambda_h.push(l);
        u_h.push(u.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        fine_u = u;
    }
    let fine = *MESHES.last().unwrap();
    let (lambda_2k, u_2k) = ground(&pot.with_coupling(2.0 * pot.coupling), fine)?;
    let comparison_gap = u_2k
        .iter()
        .zip(&fine_u)
        .map(|(a, b)| a - b)
        .fold(f64::NEG_INFINITY, f64::max);

    let sup = sup_solution_sigma(&wells, entry.b)?;
    let samples = 8 * pot.len();
    let sup_margin = (0..=samples)
        .map(|i| {
            let x = i as f64 * pot.len() as f64 / samples as f64;
            sup.eval(x) - exact.eval(x)
        })
        .fold(f64::INFINITY, f64::min);

    Ok(OracleComparison {
        entry: *entry,
        l_max: wells.l_max,
        lambda_c,
        u_c,
        monotone_gap: lambda_h[MESHES.len() - 1] - lambda_2k,
        lambda_h,
        u_h,
        sup_margin,
        comparison_gap,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub seed: u64,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, seed: u64, value: f64, limit: f64, passed: bool) -> Self {
        Self {
            name: name.into(),
            seed,
            value,
            limit,
            passed,
        }
    }
}

/// All property checks for one realization. `inject_fault` reverses the
/// landscape lower bound so that it must fail.
pub fn checks(c: &OracleComparison, inject_fault: bool) -> Vec<Check> {
    let seed = c.entry.seed;
    let mut out = Vec::new();
    let le = c.lambda_errors();
    let ue = c.u_errors();
    out.push(Check::new("fd-lambda", seed, le[0], ORACLE_TOL, le[0] <= ORACLE_TOL));
    out.push(Check::new("fd-u_max", seed, ue[0], ORACLE_TOL, ue[0] <= ORACLE_TOL));
    let gl = le[0] / le[1];
    let gu = ue[0] / ue[1];
    out.push(Check::new("order-lambda", seed, gl, MIN_ORDER_GAIN, gl >= MIN_ORDER_GAIN));
    out.push(Check::new("order-u_max", seed, gu, MIN_ORDER_GAIN, gu >= MIN_ORDER_GAIN));

    for (name, r) in [
        ("vogt-continuum", c.lambda_c * c.u_c),
        ("vogt-discrete", c.lambda_h[0] * c.u_h[0]),
    ] {
        out.push(Check::new(name, seed, r, crate::VOGT_UPPER, vogt_holds(r)));
    }

    if c.l_max > 0 {
        let ell = c.l_max as f64;
        let b0 = bernoulli_bounds(c.entry.b, ell, 0.0, 0.5);
        let lower_ok = if inject_fault {
            c.u_c < b0.u_lower
        } else {
            c.u_c >= b0.u_lower
        };
        out.push(Check::new("u-lower", seed, c.u_c, b0.u_lower, lower_ok));
        out.push(Check::new("u-upper", seed, c.u_c, b0.u_upper, c.u_c <= b0.u_upper));
        out.push(Check::new(
            "lambda-upper",
            seed,
            c.lambda_c,
            b0.lambda_upper,
            c.lambda_c <= b0.lambda_upper,
        ));
        for (nu, gamma) in LAMBDA_EXPONENTS {
            let bb = bernoulli_bounds(c.entry.b, ell, nu, gamma);
            if bb.lambda_applicable() {
                out.push(Check::new(
                    format!("lambda-lower(ν={nu},γ={gamma})"),
                    seed,
                    c.lambda_c,
                    bb.lambda_lower,
                    c.lambda_c >= bb.lambda_lower,
                ));
            }
        }
        out.push(Check::new("sup-solution", seed, c.sup_margin, 0.0, c.sup_margin >= -1e-9 * c.u_c));
    }
    out.push(Check::new(
        "comparison-u",
        seed,
        c.comparison_gap,
        0.0,
        c.comparison_gap <= 1e-12 * c.u_c,
    ));
    out.push(Check::new(
        "comparison-lambda",
        seed,
        c.monotone_gap,
        0.0,
        c.monotone_gap <= 0.0,
    ));
    out.push(Check::new(
        "free-bound",
        seed,
        c.lambda_c,
        PI * PI / (c.entry.len as f64).powi(2),
        c.lambda_c >= PI * PI / (c.entry.len as f64).powi(2),
    ));
    out
}

/// Runs the corpus and returns every check in corpus order.
pub fn run_corpus(size: usize, inject_fault: bool) -> Result<Vec<Check>> {
    use rayon::prelude::*;
    let comparisons: Result<Vec<OracleComparison>> = corpus(size).par_iter().map(compare).collect();
    Ok(comparisons?
        .iter()
        .flat_map(|c| checks(c, inject_fault))
        .collect())
}

pub fn format_table(checks: &[Check]) -> String {
    let mut out = format!(
        "{:<28} {:>6} {:>24} {:>24}  {}\n",
        "check", "seed", "value", "limit", "status"
    );
    for c in checks {
        out.push_str(&format!(
            "{:<28} {:>6} {:>24.16e} {:>24.16e}  {}\n",
            c.name,
            c.seed,
            c.value,
            c.limit,
            if c.passed { "pass" } else { "FAIL" }
        ));
    }
    out
}
