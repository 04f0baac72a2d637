//! Second-order finite differences for `-d²/dx² + kV` on `[0, L]` with
//! Dirichlet boundary conditions.
//!
//! Each unit cell is split into `M` subintervals, so `h = 1/M` and there are
//! `N = L·M − 1` interior nodes `x_i = i·h`. The matrix is symmetric
//! tridiagonal with `d_i = 2/h² + kV(x_i)` and `e_i = −1/h²`.

use crate::potential::RealizedPotential;
use crate::{Error, Result};

/// Default subdivisions per unit cell.
pub const DEFAULT_SUBDIVISIONS: usize = 32;

/// How a node sitting exactly on a cell boundary samples the potential.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NodeRule {
    /// Average of the two adjacent cells. Every node then carries the mean of
    /// the potential over its dual cell `[x_i − h/2, x_i + h/2]`, which keeps
    /// the scheme second order across jumps.
    #[default]
    Midpoint,
    /// Value of the cell to the right (`⌊x⌋`), like the indicator of `[0, 1)`.
    /// Shifts every jump by `h/2` and degrades convergence to first order.
    RightCell,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    /// Domain length `L` in cells.
    pub len: usize,
    /// Subdivisions per cell `M`.
    pub per_cell: usize,
    /// Mesh width `1/M`.
    pub h: f64,
    /// Interior node count `L·M − 1`.
    pub nodes: usize,
}

impl Grid {
    pub fn new(len: usize, per_cell: usize) -> Result<Self> {
        if per_cell < 2 {
            return Err(Error::Grid(format!(
                "need at least 2 subdivisions per cell, got {per_cell}"
            )));
        }
        let total = len
            .checked_mul(per_cell)
            .ok_or_else(|| Error::Grid("L·M overflows".into()))?;
        if total <= 1 {
            return Err(Error::Grid(format!(
                "L·M = {total} leaves no interior nodes"
            )));
        }
        Ok(Self {
            len,
            per_cell,
            h: 1.0 / per_cell as f64,
            nodes: total - 1,
        })
    }

    /// Position of interior node `i` (0-based, so `x = (i + 1)·h`).
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i + 1) as f64 / self.per_cell as f64
    }
}

/// Symmetric tridiagonal matrix with optional grid metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalOperator {
    pub diag: Vec<f64>,
    /// Sub/super-diagonal, length `N − 1`.
    pub off: Vec<f64>,
    pub grid: Option<Grid>,
}

impl TridiagonalOperator {
    /// Bare matrix without a grid; mesh width is taken as 1.
    pub fn from_parts(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Grid(format!(
                "diagonal of length {} needs {} off-diagonal entries, got {}",
                diag.len(),
                diag.len().saturating_sub(1),
                off.len()
            )));
        }
        Ok(Self {
            diag,
            off,
            grid: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mesh_width(&self) -> f64 {
        self.grid.map_or(1.0, |g| g.h)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector length must match operator dimension");
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out.push(s);
        }
        out
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn diag_inf_norm(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// `T + c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d + c).collect(),
            ..self.clone()
        }
    }
}

pub fn assemble(pot: &RealizedPotential, per_cell: usize) -> Result<TridiagonalOperator> {
    assemble_with(pot, per_cell, NodeRule::default())
}

pub fn assemble_with(
    pot: &RealizedPotential,
    per_cell: usize,
    rule: NodeRule,
) -> Result<TridiagonalOperator> {
    let grid = Grid::new(pot.len(), per_cell)?;
    let inv_h2 = (per_cell * per_cell) as f64;
    let diag = (0..grid.nodes)
        .map(|i| {
            let node = i + 1;
            let cell = node / per_cell;
            let v = if node % per_cell == 0 {
                // on the boundary between cells `cell - 1` and `cell`
                match rule {
                    NodeRule::RightCell => pot.cell_value(cell),
                    NodeRule::Midpoint => 0.5 * (pot.cell_value(cell - 1) + pot.cell_value(cell)),
                }
            } else {
                pot.cell_value(cell)
            };
            2.0 * inv_h2 + v
        })
        .collect();
    Ok(TridiagonalOperator {
        diag,
        off: vec![-inv_h2; grid.nodes - 1],
        grid: Some(grid),
    })
}
