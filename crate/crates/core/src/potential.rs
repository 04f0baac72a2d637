//! Piecewise-constant random potentials on unit cells.
//!
//! A realization stores the raw cell heights `ω_j` and the coupling `k`
//! separately, so a sweep over `k` reuses one draw. The potential at
//! `x ∈ [j, j+1)` is `k·ω_j`.

use std::fmt;
use std::str::FromStr;

use crate::rng::SeededRng;
use crate::{Error, Result};

/// Law of a single cell height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distribution {
    /// Height 0 with probability `p_zero`, `vmax` otherwise.
    Bernoulli { p_zero: f64, vmax: f64 },
    /// Height `a` with probability `p`, `b` otherwise.
    TwoPoint { p: f64, a: f64, b: f64 },
    /// Uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
}

impl Distribution {
    pub fn bernoulli(p_zero: f64, vmax: f64) -> Result<Self> {
        let d = Distribution::Bernoulli { p_zero, vmax };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Parameter(format!("probability {p} outside [0, 1]")))
            }
        };
        let height = |v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Parameter(format!(
                    "height {v} must be finite and nonnegative"
                )))
            }
        };
        match *self {
            Distribution::Bernoulli { p_zero, vmax } => {
                prob(p_zero)?;
                height(vmax)
            }
            Distribution::TwoPoint { p, a, b } => {
                prob(p)?;
                height(a)?;
                height(b)
            }
            Distribution::Uniform { lo, hi } => {
                height(lo)?;
                height(hi)?;
                if lo > hi {
                    return Err(Error::Parameter(format!("uniform bounds {lo} > {hi}")));
                }
                Ok(())
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Bernoulli { p_zero, vmax } => (1.0 - p_zero) * vmax,
            Distribution::TwoPoint { p, a, b } => p * a + (1.0 - p) * b,
            Distribution::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    /// Largest height the law can produce.
    pub fn max_height(&self) -> f64 {
        match *self {
            Distribution::Bernoulli { vmax, .. } => vmax,
            Distribution::TwoPoint { a, b, .. } => a.max(b),
            Distribution::Uniform { hi, .. } => hi,
        }
    }

    /// Probability that a cell height is exactly zero.
    pub fn prob_zero(&self) -> f64 {
        match *self {
            Distribution::Bernoulli { p_zero, vmax } => {
                if vmax == 0.0 {
                    1.0
                } else {
                    p_zero
                }
            }
            Distribution::TwoPoint { p, a, b } => {
                (if a == 0.0 { p } else { 0.0 }) + (if b == 0.0 { 1.0 - p } else { 0.0 })
            }
            Distribution::Uniform { lo, hi } => {
                if lo == 0.0 && hi == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn sample(&self, rng: &mut SeededRng) -> f64 {
        let x = rng.next_f64();
        match *self {
            Distribution::Bernoulli { p_zero, vmax } => {
                if x < p_zero {
                    0.0
                } else {
                    vmax
                }
            }
            Distribution::TwoPoint { p, a, b } => {
                if x < p {
                    a
                } else {
                    b
                }
            }
            Distribution::Uniform { lo, hi } => lo + (hi - lo) * x,
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Bernoulli { p_zero, vmax } => write!(f, "bernoulli:{p_zero}:{vmax}"),
            Distribution::TwoPoint { p, a, b } => write!(f, "two-point:{p}:{a}:{b}"),
            Distribution::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    /// `bernoulli:P:VMAX`, `two-point:P:A:B` or `uniform:LO:HI`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let kind = parts.next().unwrap_or_default();
        let nums = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {p:?} in distribution {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let arity = |n: usize| {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "distribution {kind:?} takes {n} parameters, got {}",
                    nums.len()
                )))
            }
        };
        let d = match kind {
            "bernoulli" => {
                arity(2)?;
                Distribution::Bernoulli {
                    p_zero: nums[0],
                    vmax: nums[1],
                }
            }
            "two-point" | "two_point" => {
                arity(3)?;
                Distribution::TwoPoint {
                    p: nums[0],
                    a: nums[1],
                    b: nums[2],
                }
            }
            "uniform" => {
                arity(2)?;
                Distribution::Uniform {
                    lo: nums[0],
                    hi: nums[1],
                }
            }
            other => return Err(Error::Parse(format!("unknown distribution kind {other:?}"))),
        };
        d.validate()?;
        Ok(d)
    }
}

/// A concrete potential: `L` cell heights plus the coupling `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizedPotential {
    /// Law the cells were drawn from; `None` for hand-built potentials.
    pub dist: Option<Distribution>,
    pub cells: Vec<f64>,
    pub coupling: f64,
    pub seed: u64,
}

impl RealizedPotential {
    /// Wraps explicit cell heights.
    pub fn from_cells(cells: Vec<f64>, coupling: f64) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Parameter("potential needs at least one cell".into()));
        }
        if let Some(bad) = cells.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(Error::Parameter(format!(
                "cell height {bad} must be finite and nonnegative"
            )));
        }
        check_coupling(coupling)?;
        Ok(Self {
            dist: None,
            cells,
            coupling,
            seed: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Same cells, different coupling.
    pub fn with_coupling(&self, coupling: f64) -> Self {
        Self {
            coupling,
            ..self.clone()
        }
    }

    /// Coupled height `k·ω_j` of cell `j`.
    #[inline]
    pub fn cell_value(&self, j: usize) -> f64 {
        self.coupling * self.cells[j]
    }

    /// `k·ω_⌊x⌋`; `x = L` maps to the last cell.
    pub fn value_at(&self, x: f64) -> f64 {
        let j = (x.floor().max(0.0) as usize).min(self.len() - 1);
        self.cell_value(j)
    }

    /// Mean cell height: the law's expectation when known, else the sample mean.
    pub fn mean_height(&self) -> f64 {
        match self.dist {
            Some(d) => d.mean(),
            None => self.cells.iter().sum::<f64>() / self.len() as f64,
        }
    }

    pub fn max_height(&self) -> f64 {
        self.cells.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_height(&self) -> f64 {
        self.cells.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Serializes as a metadata line `L,k,seed,dist` followed by one line of
    /// `L` comma-separated heights. Numbers use shortest round-trip decimals.
    pub fn to_text(&self) -> String {
        let dist = self
            .dist
            .map(|d| d.to_string())
            .unwrap_or_else(|| "custom".to_string());
        let cells = self
            .cells
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "{},{},{},{}\n{}\n",
            self.len(),
            self.coupling,
            self.seed,
            dist,
            cells
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty potential file".into()))?;
        let fields: Vec<&str> = header.splitn(4, ',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "potential header must be L,k,seed,dist; got {header:?}"
            )));
        }
        let len: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad L {:?}", fields[0])))?;
        let coupling: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad k {:?}", fields[1])))?;
        let seed: u64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad seed {:?}", fields[2])))?;
        let dist = match fields[3].trim() {
            "custom" => None,
            s => Some(s.parse::<Distribution>()?),
        };
        let body = lines
            .next()
            .ok_or_else(|| Error::Parse("missing cell heights line".into()))?;
        let cells = body
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad cell height {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if cells.len() != len {
            return Err(Error::Parse(format!(
                "header says L = {len} but {} heights follow",
                cells.len()
            )));
        }
        let mut pot = Self::from_cells(cells, coupling)?;
        pot.dist = dist;
        pot.seed = seed;
        Ok(pot)
    }
}

fn check_coupling(k: f64) -> Result<()> {
    if k.is_finite() && k >= 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "coupling {k} must be finite and nonnegative"
        )))
    }
}

/// Draws `len` i.i.d. cells from `dist`. Deterministic in `(dist, len, k, seed)`.
pub fn generate(dist: Distribution, len: usize, coupling: f64, seed: u64) -> Result<RealizedPotential> {
    dist.validate()?;
    check_coupling(coupling)?;
    if len == 0 {
        return Err(Error::Parameter("L must be at least 1".into()));
    }
    let mut rng = SeededRng::new(seed);
    let cells = (0..len).map(|_| dist.sample(&mut rng)).collect();
    Ok(RealizedPotential {
        dist: Some(dist),
        cells,
        coupling,
        seed,
    })
}

/// Half-open run of cells `[left, right)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub left: usize,
    pub right: usize,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.right - self.left
    }

    pub fn is_empty(&self) -> bool {
        self.right == self.left
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.left + self.right) as f64
    }
}

/// Zero wells (maximal runs with `k·ω = 0`) and the walls between them.
#[derive(Clone, Debug, PartialEq)]
pub struct WellDecomposition {
    pub wells: Vec<Interval>,
    pub walls: Vec<Interval>,
    pub l_max: usize,
    /// Well lengths, longest first.
    pub sorted_lengths: Vec<usize>,
}

pub fn decompose_wells(pot: &RealizedPotential) -> WellDecomposition {
    let mut wells = Vec::new();
    let mut walls = Vec::new();
    let mut start = 0;
    for j in 1..=pot.len() {
        let boundary =
            j == pot.len() || (pot.cell_value(j) == 0.0) != (pot.cell_value(start) == 0.0);
        if boundary {
            let run = Interval {
                left: start,
                right: j,
            };
            if pot.cell_value(start) == 0.0 {
                wells.push(run);
            } else {
                walls.push(run);
            }
            start = j;
        }
    }
    let mut sorted_lengths: Vec<usize> = wells.iter().map(Interval::len).collect();
    sorted_lengths.sort_unstable_by(|a, b| b.cmp(a));
    WellDecomposition {
        l_max: sorted_lengths.first().copied().unwrap_or(0),
        wells,
        walls,
        sorted_lengths,
    }
}

/// Longest run of cells with raw height `ω_j ≤ eps`, in whole cells.
pub fn epsilon_well_length(pot: &RealizedPotential, eps: f64) -> usize {
    let mut best = 0;
    let mut run = 0;
    for &c in &pot.cells {
        if c <= eps {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}
