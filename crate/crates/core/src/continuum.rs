//! Exact continuum solutions for piecewise-constant potentials.
//!
//! On each unit cell `−ψ'' + qψ = λψ` has closed-form solutions, so the
//! Dirichlet problem on `[0, L]` can be solved without discretization: the
//! eigenvalues by shooting across cells, the landscape function by matching
//! cellwise particular-plus-homogeneous solutions. These are the oracles the
//! finite-difference pipeline is checked against, together with the closed
//! forms for the free, infinitely walled and homogenized problems.

use std::f64::consts::PI;

use crate::potential::{RealizedPotential, WellDecomposition};
use crate::{Error, Result};

const PI2: f64 = PI * PI;

/// Boundary data `(ψ, ψ')` scaled by `exp(log_scale)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellState {
    pub psi: f64,
    pub dpsi: f64,
    pub log_scale: f64,
}

impl CellState {
    /// Unscaled `ψ`; overflows to ±∞ for very large `log_scale`.
    pub fn value(&self) -> f64 {
        self.psi * self.log_scale.exp()
    }

    fn renormalize(&mut self) {
        let r = self.psi.hypot(self.dpsi);
        if r > 0.0 && r.is_finite() {
            self.psi /= r;
            self.dpsi /= r;
            self.log_scale += r.ln();
        }
    }
}

/// Advances the state across one unit cell where `ψ'' = (v − λ)ψ`; returns
/// the number of zeros of `ψ` in the half-open cell `(x₀, x₀ + 1]`.
fn step_cell(state: &mut CellState, v: f64, lambda: f64) -> usize {
    let q = v - lambda;
    let (p0, d0) = (state.psi, state.dpsi);
    let zeros;
    if q < 0.0 {
        let k = (-q).sqrt();
        let (s, c) = k.sin_cos();
        // Prüfer angle: ψ = r sin θ, ψ'/k = r cos θ, θ advances by k.
        let theta0 = p0.atan2(d0 / k);
        zeros = ((theta0 + k) / PI).floor() as i64 - (theta0 / PI).floor() as i64;
        state.psi = c * p0 + s / k * d0;
        state.dpsi = -k * s * p0 + c * d0;
    } else if q > 0.0 {
        let k = q.sqrt();
        // cosh k and sinh k with e^k factored into the log scale
        let em = (-2.0 * k).exp();
        let ch = 1.0 + em;
        let sh = -(-2.0 * k).exp_m1();
        let p1 = p0 * ch + d0 / k * sh;
        let d1 = p0 * k * sh + d0 * ch;
        zeros = usize::from(p0 != 0.0 && p0 * p1 <= 0.0) as i64;
        state.psi = p1;
        state.dpsi = d1;
        state.log_scale += k - std::f64::consts::LN_2;
    } else {
        let p1 = p0 + d0;
        zeros = usize::from(p0 != 0.0 && p0 * p1 <= 0.0) as i64;
        state.psi = p1;
    }
    state.renormalize();
    zeros.max(0) as usize
}

fn propagate(pot: &RealizedPotential, lambda: f64) -> (CellState, usize) {
    let mut state = CellState {
        psi: 0.0,
        dpsi: 1.0,
        log_scale: 0.0,
    };
    let mut zeros = 0;
    for j in 0..pot.len() {
        zeros += step_cell(&mut state, pot.cell_value(j), lambda);
    }
    (state, zeros)
}

/// Integrates `ψ(0) = 0, ψ'(0) = 1` across every cell with the exact 2×2
/// propagators and returns the state at `x = L`.
pub fn shoot(pot: &RealizedPotential, lambda: f64) -> CellState {
    propagate(pot, lambda).0
}

/// Number of Dirichlet eigenvalues below `lambda`, read off as the number of
/// zeros of the shooting solution in `(0, L]` (Sturm oscillation).
pub fn continuum_count(pot: &RealizedPotential, lambda: f64) -> usize {
    propagate(pot, lambda).1
}

/// The `n` smallest Dirichlet eigenvalues of `−d²/dx² + kV` on `[0, L]`.
///
/// Brackets come from zero counting, so near-degenerate pairs never hide in
/// one scan interval; each root is bisected to relative width `1e-13`.
pub fn continuum_eigenvalues(pot: &RealizedPotential, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Parameter("need at least one eigenvalue".into()));
    }
    let len = pot.len() as f64;
    let lower = pot.coupling * pot.min_height();
    // comparison with the constant potential k·max ω
    let mut upper = pot.coupling * pot.max_height() + (n * n) as f64 * PI2 / (len * len);
    upper = upper * (1.0 + 1e-9) + 1e-12;
    let mut found = continuum_count(pot, upper);
    let mut widen = 0;
    while found < n {
        if widen == 8 {
            return Err(Error::Window {
                found,
                requested: n,
                upper,
            });
        }
        upper *= 2.0;
        found = continuum_count(pot, upper);
        widen += 1;
    }
    let mut lo = vec![lower; n];
    let mut hi = vec![upper; n];
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let (mut a, mut b) = (lo[j], hi[j]);
        loop {
            let mid = 0.5 * (a + b);
            if b - a <= 1e-13 * b.abs() || mid <= a || mid >= b {
                break;
            }
            let c = continuum_count(pot, mid);
            for i in j..n {
                if i < c {
                    hi[i] = hi[i].min(mid);
                } else {
                    lo[i] = lo[i].max(mid);
                }
            }
            if c > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Cellwise solution `u = a·φ₀ + b·φ₁ + particular` on local `t ∈ [0, 1]`.
#[derive(Clone, Copy, Debug)]
enum CellForm {
    /// `q ≤ 1`: `a·cosh(κt) + b·sinh(κt)/κ − 2 sinh²(κt/2)/κ²`
    /// (the free parabola `a + bt − t²/2` at `κ = 0`).
    Soft { kappa: f64 },
    /// `q > 1`: `1/q + a·e^{−κt} + b·e^{−κ(1−t)}`.
    Stiff { kappa: f64, q: f64 },
}

impl CellForm {
    fn new(q: f64) -> Self {
        let kappa = q.sqrt();
        if kappa <= 1.0 {
            CellForm::Soft { kappa }
        } else {
            CellForm::Stiff { kappa, q }
        }
    }

    /// `(φ₀, φ₁, particular)` and their derivatives at `t`.
    fn basis(&self, t: f64) -> ([f64; 3], [f64; 3]) {
        match *self {
            CellForm::Soft { kappa } => {
                if kappa == 0.0 {
                    ([1.0, t, -0.5 * t * t], [0.0, 1.0, -t])
                } else {
                    let c = (kappa * t).cosh();
                    let s = (kappa * t).sinh() / kappa;
                    let half = (0.5 * kappa * t).sinh() / kappa;
                    ([c, s, -2.0 * half * half], [kappa * kappa * s, c, -s])
                }
            }
            CellForm::Stiff { kappa, q } => {
                let e0 = (-kappa * t).exp();
                let e1 = (-kappa * (1.0 - t)).exp();
                ([e0, e1, 1.0 / q], [-kappa * e0, kappa * e1, 0.0])
            }
        }
    }

    fn deriv_scale(&self) -> f64 {
        match *self {
            CellForm::Soft { .. } => 1.0,
            CellForm::Stiff { kappa, .. } => kappa,
        }
    }

    /// Interior critical point of `u` in `(0, 1)`, if any.
    fn critical_point(&self, a: f64, b: f64) -> Option<f64> {
        let t = match *self {
            CellForm::Soft { kappa } => {
                // u' = (aκ² − 1)·sinh(κt)/κ + b·cosh(κt)
                let p = a * kappa * kappa - 1.0;
                if p == 0.0 {
                    return None;
                }
                let rho = -b / p;
                if kappa == 0.0 {
                    rho
                } else {
                    let arg = kappa * rho;
                    if arg.abs() >= 1.0 {
                        return None;
                    }
                    arg.atanh() / kappa
                }
            }
            CellForm::Stiff { kappa, .. } => {
                // a·e^{−κt} = b·e^{−κ(1−t)}
                if a == 0.0 || b == 0.0 || (a > 0.0) != (b > 0.0) {
                    return None;
                }
                0.5 * ((a / b).ln() / kappa + 1.0)
            }
        };
        (t > 0.0 && t < 1.0).then_some(t)
    }
}

/// Exact landscape function of a piecewise-constant potential.
#[derive(Clone, Debug)]
pub struct ContinuumLandscape {
    forms: Vec<CellForm>,
    coeffs: Vec<[f64; 2]>,
    /// Ratio of largest to smallest pivot magnitude in the matching solve.
    pub condition: f64,
}

/// Pivot ratio above which the matching solve is reported as ill-conditioned.
pub const CONDITION_WARNING: f64 = 1e12;

impl ContinuumLandscape {
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn ill_conditioned(&self) -> bool {
        self.condition > CONDITION_WARNING
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let j = (x.floor().max(0.0) as usize).min(self.len() - 1);
        (j, x - j as f64)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (j, t) = self.locate(x);
        let (v, _) = self.forms[j].basis(t);
        let [a, b] = self.coeffs[j];
        a * v[0] + b * v[1] + v[2]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (j, t) = self.locate(x);
        let (_, d) = self.forms[j].basis(t);
        let [a, b] = self.coeffs[j];
        a * d[0] + b * d[1] + d[2]
    }

    /// `(x, u(x))` at the global maximum.
    pub fn max(&self) -> (f64, f64) {
        let mut best = (0.0, 0.0);
        for (j, (form, &[a, b])) in self.forms.iter().zip(&self.coeffs).enumerate() {
            let mut cands = vec![1.0];
            if let Some(t) = form.critical_point(a, b) {
                cands.push(t);
            }
            for t in cands {
                let x = j as f64 + t;
                let (v, _) = form.basis(t);
                let u = a * v[0] + b * v[1] + v[2];
                if u > best.1 {
                    best = (x, u);
                }
            }
        }
        best
    }
}

/// Solves `−u'' + kVu = 1`, `u(0) = u(L) = 0` exactly.
///
/// Unknowns are two coefficients per cell; rows are the two boundary
/// conditions and `C¹` matching at each interior cell boundary, giving a
/// pentadiagonal system solved by banded elimination with partial pivoting.
pub fn continuum_landscape(pot: &RealizedPotential) -> ContinuumLandscape {
    let cells = pot.len();
    let forms: Vec<CellForm> = (0..cells).map(|j| CellForm::new(pot.cell_value(j))).collect();
    let n = 2 * cells;
    let mut sys = Banded::new(n, 2, 2);
    let mut rhs = vec![0.0; n];

    let (v0, _) = forms[0].basis(0.0);
    sys.set(0, 0, v0[0]);
    sys.set(0, 1, v0[1]);
    rhs[0] = -v0[2];
    for j in 0..cells - 1 {
        let (vl, dl) = forms[j].basis(1.0);
        let (vr, dr) = forms[j + 1].basis(0.0);
        let row = 2 * j + 1;
        let c = 2 * j;
        sys.set(row, c, vl[0]);
        sys.set(row, c + 1, vl[1]);
        sys.set(row, c + 2, -vr[0]);
        sys.set(row, c + 3, -vr[1]);
        rhs[row] = vr[2] - vl[2];
        let s = 1.0 / forms[j].deriv_scale().max(forms[j + 1].deriv_scale());
        sys.set(row + 1, c, s * dl[0]);
        sys.set(row + 1, c + 1, s * dl[1]);
        sys.set(row + 1, c + 2, -s * dr[0]);
        sys.set(row + 1, c + 3, -s * dr[1]);
        rhs[row + 1] = s * (dr[2] - dl[2]);
    }
    let (v1, _) = forms[cells - 1].basis(1.0);
    sys.set(n - 1, n - 2, v1[0]);
    sys.set(n - 1, n - 1, v1[1]);
    rhs[n - 1] = -v1[2];

    let condition = sys.solve(&mut rhs);
    if condition > CONDITION_WARNING {
        log::warn!("landscape matching system ill-conditioned (pivot ratio {condition:e})");
    }
    let coeffs = rhs.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    ContinuumLandscape {
        forms,
        coeffs,
        condition,
    }
}

/// `max u` of the exact landscape function.
pub fn continuum_landscape_max(pot: &RealizedPotential) -> f64 {
    continuum_landscape(pot).max().1
}

/// Square band matrix with room for pivoting fill-in.
struct Banded {
    n: usize,
    kl: usize,
    width: usize,
    data: Vec<f64>,
}

impl Banded {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            width,
            data: vec![0.0; n * width],
        }
    }

    fn slot(&self, r: usize, c: usize) -> Option<usize> {
        let first = r as isize - self.kl as isize;
        let off = c as isize - first;
        (off >= 0 && (off as usize) < self.width).then(|| r * self.width + off as usize)
    }

    fn get(&self, r: usize, c: usize) -> f64 {
        self.slot(r, c).map_or(0.0, |i| self.data[i])
    }

    fn set(&mut self, r: usize, c: usize, v: f64) {
        let i = self.slot(r, c).expect("entry outside band");
        self.data[i] = v;
    }

    /// In-place solve; returns the pivot magnitude ratio.
    fn solve(&mut self, b: &mut [f64]) -> f64 {
        let n = self.n;
        let reach = self.width - 1 - self.kl;
        let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
        for k in 0..n {
            let last = (k + self.kl).min(n - 1);
            let p = (k..=last)
                .max_by(|&i, &j| self.get(i, k).abs().total_cmp(&self.get(j, k).abs()))
                .unwrap();
            let hi = (k + reach).min(n - 1);
            if p != k {
                for c in k..=hi {
                    let (x, y) = (self.get(k, c), self.get(p, c));
                    self.set(k, c, y);
                    self.set(p, c, x);
                }
                b.swap(k, p);
            }
            let piv = self.get(k, k);
            pmax = pmax.max(piv.abs());
            pmin = pmin.min(piv.abs());
            if piv == 0.0 {
                continue;
            }
            for i in k + 1..=last {
                let f = self.get(i, k) / piv;
                if f == 0.0 {
                    continue;
                }
                self.set(i, k, 0.0);
                for c in k + 1..=hi {
                    let v = self.get(i, c) - f * self.get(k, c);
                    self.set(i, c, v);
                }
                b[i] -= f * b[k];
            }
        }
        for k in (0..n).rev() {
            let hi = (k + reach).min(n - 1);
            let mut s = b[k];
            for c in k + 1..=hi {
                s -= self.get(k, c) * b[c];
            }
            b[k] = s / self.get(k, k);
        }
        if pmin == 0.0 {
            f64::INFINITY
        } else {
            pmax / pmin
        }
    }
}

/// Two-sided bounds on `max u` and `λ₁` for a `{0, b}` potential whose longest
/// zero well has length `ℓ_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BernoulliBounds {
    pub u_lower: f64,
    pub u_upper: f64,
    pub lambda_upper: f64,
    pub lambda_lower: f64,
    /// `b·ℓ_max² > π²`
    pub depth_ok: bool,
    /// `b^{1−ν}·ℓ_max^γ > 8π²(1 + √b)`
    pub width_ok: bool,
}

impl BernoulliBounds {
    /// Whether `lambda_lower` is guaranteed.
    pub fn lambda_applicable(&self) -> bool {
        self.depth_ok && self.width_ok
    }
}

/// Evaluates the `{0, b}` bounds with `S = max(√b, 1)`:
/// `ℓ²/8 ≤ max u ≤ 3Sℓ/b + ℓ²/8` and
/// `(π²/ℓ²)(1 − b^{−ν/2} ℓ^{−(1−γ)/2})² ≤ λ₁ ≤ π²/ℓ²`.
pub fn bernoulli_bounds(b: f64, ell_max: f64, nu: f64, gamma: f64) -> BernoulliBounds {
    let s = b.sqrt().max(1.0);
    let ell2 = ell_max * ell_max;
    let lambda_upper = PI2 / ell2;
    let shrink = 1.0 - 1.0 / (b.powf(0.5 * nu) * ell_max.powf(0.5 * (1.0 - gamma)));
    BernoulliBounds {
        u_lower: ell2 / 8.0,
        u_upper: 3.0 * s * ell_max / b + ell2 / 8.0,
        lambda_upper,
        lambda_lower: lambda_upper * shrink * shrink,
        depth_ok: b * ell2 > PI2,
        width_ok: b.powf(1.0 - nu) * ell_max.powf(gamma) > 8.0 * PI2 * (1.0 + b.sqrt()),
    }
}

#[derive(Clone, Copy, Debug)]
struct SigmaWell {
    left: f64,
    right: f64,
    center: f64,
    len: f64,
}

/// The `C¹` sup-solution `ũ = (1 + Sℓ_max)/b + Σ σ_i` dominating the landscape
/// function of a `{0, b}` potential.
#[derive(Clone, Debug)]
pub struct SupSolution {
    pub base: f64,
    pub s: f64,
    wells: Vec<SigmaWell>,
    /// Some pair of consecutive wells is closer than `2/S`, so their collars
    /// overlap.
    pub overlapping: bool,
}

impl SupSolution {
    fn sigma(&self, w: &SigmaWell, x: f64) -> f64 {
        let inv_s = 1.0 / self.s;
        if x >= w.left && x <= w.right {
            -0.5 * (x - w.center).powi(2) + w.len * w.len / 8.0 + w.len / (4.0 * self.s)
        } else if x > w.right && x < w.right + inv_s {
            0.25 * self.s * w.len * (x - w.right - inv_s).powi(2)
        } else if x < w.left && x > w.left - inv_s {
            0.25 * self.s * w.len * (x - w.left + inv_s).powi(2)
        } else {
            0.0
        }
    }

    fn sigma_derivative(&self, w: &SigmaWell, x: f64, from_left: bool) -> f64 {
        let inv_s = 1.0 / self.s;
        let inside = if from_left {
            x > w.left && x <= w.right
        } else {
            x >= w.left && x < w.right
        };
        let right_collar = if from_left {
            x > w.right && x <= w.right + inv_s
        } else {
            x >= w.right && x < w.right + inv_s
        };
        let left_collar = if from_left {
            x > w.left - inv_s && x <= w.left
        } else {
            x >= w.left - inv_s && x < w.left
        };
        if inside {
            -(x - w.center)
        } else if right_collar {
            0.5 * self.s * w.len * (x - w.right - inv_s)
        } else if left_collar {
            0.5 * self.s * w.len * (x - w.left + inv_s)
        } else {
            0.0
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.base + self.wells.iter().map(|w| self.sigma(w, x)).sum::<f64>()
    }

    /// One-sided derivatives `(ũ'(x⁻), ũ'(x⁺))`.
    pub fn derivatives(&self, x: f64) -> (f64, f64) {
        let l = self.wells.iter().map(|w| self.sigma_derivative(w, x, true)).sum();
        let r = self.wells.iter().map(|w| self.sigma_derivative(w, x, false)).sum();
        (l, r)
    }
}

pub fn sup_solution_sigma(wells: &WellDecomposition, b: f64) -> Result<SupSolution> {
    if !(b > 0.0) {
        return Err(Error::Parameter(format!("wall height b = {b} must be positive")));
    }
    let s = b.sqrt().max(1.0);
    let ws: Vec<SigmaWell> = wells
        .wells
        .iter()
        .map(|w| SigmaWell {
            left: w.left as f64,
            right: w.right as f64,
            center: w.center(),
            len: w.len() as f64,
        })
        .collect();
    let overlapping = ws.windows(2).any(|p| p[1].left - p[0].right < 2.0 / s);
    if overlapping {
        log::debug!("σ collars overlap: consecutive wells closer than 2/S = {}", 2.0 / s);
    }
    Ok(SupSolution {
        base: (1.0 + s * wells.l_max as f64) / b,
        s,
        wells: ws,
        overlapping,
    })
}

/// Ground state and landscape maximum of `−d²/dx² + γ` on `[0, 1]`, and the
/// limiting ratio `R(γ) = λ_c·max u_c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Homogenized {
    pub lambda_c: f64,
    pub u_c_max: f64,
    pub ratio: f64,
}

/// Below this `γ` the series of `max u_c` replaces the closed form.
const SERIES_CUTOFF: f64 = 1e-6;

fn u_c_max(gamma: f64) -> f64 {
    if gamma < SERIES_CUTOFF {
        return 0.125 - 5.0 * gamma / 384.0 + 61.0 * gamma * gamma / 46080.0;
    }
    let y = 0.5 * gamma.sqrt();
    let one_minus_sech = if y <= 1.0 {
        let s = (0.5 * y).sinh();
        2.0 * s * s / y.cosh()
    } else {
        1.0 - 1.0 / y.cosh()
    };
    one_minus_sech / gamma
}

pub fn homogenized(gamma_c: f64) -> Homogenized {
    let u = u_c_max(gamma_c);
    Homogenized {
        lambda_c: PI2 + gamma_c,
        u_c_max: u,
        ratio: (PI2 + gamma_c) * u,
    }
}

/// Bracket used when inverting `R`.
pub const GAMMA_RANGE: (f64, f64) = (1e-8, 1e4);

/// Solves `R(γ) = r` for `γ` by bisection on [`GAMMA_RANGE`].
pub fn invert_ratio(r: f64) -> Result<f64> {
    let (mut lo, mut hi) = GAMMA_RANGE;
    let (r_lo, r_hi) = (homogenized(lo).ratio, homogenized(hi).ratio);
    if !(r < r_lo && r > r_hi) {
        return Err(Error::Parameter(format!(
            "target ratio {r} outside the attainable range ({r_hi}, {r_lo})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if homogenized(mid).ratio > r {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Checks that `R` decreases along a log-spaced grid of [`GAMMA_RANGE`].
pub fn ratio_is_monotone() -> bool {
    let (lo, hi) = GAMMA_RANGE;
    let steps = 400;
    let mut prev = f64::INFINITY;
    for i in 0..=steps {
        let g = lo * (hi / lo).powf(i as f64 / steps as f64);
        let r = homogenized(g).ratio;
        if r >= prev {
            return false;
        }
        prev = r;
    }
    true
}

/// `‖F‖₂` on the rescaled domain `[0, 1]`, where `F` is the antiderivative of
/// the centred rescaled potential with coupling fixed by `γ_c = kL²E(ω)`.
///
/// At grid points `F(n/L) = (γ_c / (L·E(ω)))·(S_n − n·E(ω))` with `S_n` the
/// partial sums of cell heights; `F` is linear in between, so the integral of
/// `F²` is exact.
pub fn fluctuation_norm(pot: &RealizedPotential, gamma_c: f64) -> f64 {
    let mean = pot.mean_height();
    if gamma_c == 0.0 || mean == 0.0 {
        return 0.0;
    }
    let len = pot.len() as f64;
    let scale = gamma_c / (len * mean);
    let mut partial = 0.0;
    let mut prev = 0.0;
    let mut integral = 0.0;
    for (i, &c) in pot.cells.iter().enumerate() {
        partial += c;
        let f = scale * (partial - (i + 1) as f64 * mean);
        integral += (prev * prev + prev * f + f * f) / 3.0;
        prev = f;
    }
    (integral / len).sqrt()
}
