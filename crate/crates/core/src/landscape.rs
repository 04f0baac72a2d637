//! Landscape function `u` (`Hu = 1`), effective potential `W = 1/u`, and the
//! ordered local minima of `W` used to predict eigenvalues.

use std::f64::consts::PI;

use crate::discretize::TridiagonalOperator;
use crate::linalg::solve_tridiagonal;
use crate::potential::WellDecomposition;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LandscapeResult {
    /// `u` at the interior nodes; the boundary values are zero.
    pub u: Vec<f64>,
    /// `1/u` at the interior nodes.
    pub w: Vec<f64>,
    pub u_max: f64,
    /// `1/u_max`.
    pub w_min: f64,
    /// Node positions matching `u`.
    pub x: Vec<f64>,
}

impl LandscapeResult {
    /// Builds a result from raw interior samples on a uniform mesh of width `h`.
    pub fn from_samples(u: Vec<f64>, h: f64) -> Self {
        let w = u.iter().map(|v| 1.0 / v).collect();
        let u_max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let x = (1..=u.len()).map(|i| i as f64 * h).collect();
        Self {
            w,
            u_max,
            w_min: 1.0 / u_max,
            x,
            u,
        }
    }
}

/// Solves `T u = 1`.
///
/// # Panics
///
/// If the solution is not strictly positive, which the discrete maximum
/// principle rules out for any operator built by `discretize`.
pub fn landscape(t: &TridiagonalOperator) -> Result<LandscapeResult> {
    let u = solve_tridiagonal(t, &vec![1.0; t.dim()])?;
    if let Some(i) = u.iter().position(|&v| !(v > 0.0)) {
        panic!("landscape function not positive at node {i}: {}", u[i]);
    }
    let res = LandscapeResult::from_samples(u, t.mesh_width());
    debug_assert_eq!(res.w_min, 1.0 / res.u_max);
    Ok(res)
}

/// Ascending minima of `W`, either raw (`order == 1`) or generalized.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimaSet {
    pub values: Vec<f64>,
    /// Location of the matching local maximum of `u`.
    pub positions: Vec<f64>,
    /// Harmonic multiplier `j` behind each entry (`value = j²·W_base`).
    pub harmonics: Vec<usize>,
    pub order: usize,
}

impl MinimaSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn sorted(mut entries: Vec<(f64, f64, usize)>, order: usize) -> Self {
        entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        Self {
            values: entries.iter().map(|e| e.0).collect(),
            positions: entries.iter().map(|e| e.1).collect(),
            harmonics: entries.iter().map(|e| e.2).collect(),
            order,
        }
    }
}

/// Local minima of `W`, i.e. interior local maxima of `u`, sorted by value.
///
/// A maximal run of equal `u` values whose neighbours (with the zero boundary
/// values) are both strictly smaller counts once, at the run's midpoint.
pub fn local_minima(res: &LandscapeResult) -> MinimaSet {
    let u = &res.u;
    let n = u.len();
    let at = |i: isize| -> f64 {
        if i < 0 || i as usize >= n {
            0.0
        } else {
            u[i as usize]
        }
    };
    let pos = |i: f64| -> f64 {
        // interpolate between stored node positions
        let lo = i.floor() as usize;
        if lo + 1 >= n {
            res.x[lo]
        } else {
            res.x[lo] + (i - lo as f64) * (res.x[lo + 1] - res.x[lo])
        }
    };
    let mut entries = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && u[j + 1] == u[i] {
            j += 1;
        }
        if at(i as isize - 1) < u[i] && at(j as isize + 1) < u[i] {
            entries.push((1.0 / u[i], pos(0.5 * (i + j) as f64), 1));
        }
        i = j + 1;
    }
    MinimaSet::sorted(entries, 1)
}

/// `W^(s)`: the multiset union of `j²·W^(1)` for `j = 1..=s`, sorted and
/// truncated to `n_keep` entries.
pub fn generalized_minima(base: &MinimaSet, s: usize, n_keep: usize) -> MinimaSet {
    assert!(s >= 1, "generalization order must be at least 1");
    if s == 1 {
        return base.clone();
    }
    let mut entries = Vec::with_capacity(base.len() * s);
    for j in 1..=s {
        let f = (j * j) as f64;
        for ((v, p), hm) in base.values.iter().zip(&base.positions).zip(&base.harmonics) {
            entries.push((f * v, *p, j * hm));
        }
    }
    let mut out = MinimaSet::sorted(entries, s * base.order);
    out.values.truncate(n_keep);
    out.positions.truncate(n_keep);
    out.harmonics.truncate(n_keep);
    out
}

/// Decoupled-well eigenvalue predictions `s'²π²/L_i²` for every well and
/// `s' = 1..=s`, ascending and truncated to `n_keep`.
pub fn harmonic_predictions(wells: &WellDecomposition, s: usize, n_keep: usize) -> Result<Vec<f64>> {
    if wells.wells.is_empty() {
        return Err(Error::EmptyPrediction);
    }
    let mut out: Vec<f64> = wells
        .sorted_lengths
        .iter()
        .flat_map(|&len| (1..=s).map(move |j| (j * j) as f64 * PI * PI / (len * len) as f64))
        .collect();
    out.sort_by(f64::total_cmp);
    out.truncate(n_keep);
    Ok(out)
}

/// Pairs eigenvalues with minima by rank. Returns `(λ_n, W_n, λ_n/W_n)` up to
/// the shorter of the two lists.
pub fn pair_ratios(eigenvalues: &[f64], minima: &MinimaSet) -> Vec<(f64, f64, f64)> {
    eigenvalues
        .iter()
        .zip(&minima.values)
        .map(|(&l, &w)| (l, w, l / w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::assemble;
    use crate::potential::{decompose_wells, generate, Distribution, RealizedPotential};
    use proptest::prelude::*;

    fn raw(u: &[f64]) -> LandscapeResult {
        LandscapeResult::from_samples(u.to_vec(), 1.0)
    }

    #[test]
    fn minima_read_off() {
        let m = local_minima(&raw(&[1.0, 2.0, 1.0, 3.0, 1.0]));
        assert_eq!(m.values, vec![1.0 / 3.0, 0.5]);
        assert_eq!(m.positions, vec![4.0, 2.0]);
    }

    #[test]
    fn plateau_collapses_to_midpoint() {
        let m = local_minima(&raw(&[1.0, 2.0, 2.0, 2.0, 1.0]));
        assert_eq!(m.values, vec![0.5]);
        assert_eq!(m.positions, vec![3.0]);
        let m = local_minima(&raw(&[1.0, 2.0, 2.0, 1.0]));
        assert_eq!(m.positions, vec![2.5]);
    }

    #[test]
    fn shelves_are_not_minima() {
        let m = local_minima(&raw(&[1.0, 2.0, 2.0, 3.0, 1.0]));
        assert_eq!(m.values, vec![1.0 / 3.0]);
    }

    #[test]
    fn monotone_edges_count() {
        // maximum adjacent to the boundary
        let m = local_minima(&raw(&[3.0, 2.0, 1.0]));
        assert_eq!(m.values, vec![1.0 / 3.0]);
        assert_eq!(m.positions, vec![1.0]);
    }

    #[test]
    fn free_landscape_is_parabola() {
        let pot = RealizedPotential::from_cells(vec![0.0; 3], 1.0).unwrap();
        let t = assemble(&pot, 16).unwrap();
        let res = landscape(&t).unwrap();
        // the three-point stencil is exact on quadratics
        for (x, u) in res.x.iter().zip(&res.u) {
            assert!((u - 0.5 * x * (3.0 - x)).abs() < 1e-12);
        }
        let m = local_minima(&res);
        assert_eq!(m.len(), 1);
        assert!((m.values[0] - 8.0 / 9.0).abs() < 1e-12);
        assert_eq!(res.w_min, 1.0 / res.u_max);
    }

    #[test]
    fn generalized_examples() {
        let base = MinimaSet {
            values: vec![1.0, 2.0],
            positions: vec![0.5, 1.5],
            harmonics: vec![1, 1],
            order: 1,
        };
        let g = generalized_minima(&base, 2, 10);
        assert_eq!(g.values, vec![1.0, 2.0, 4.0, 8.0]);
        assert_eq!(g.harmonics, vec![1, 1, 2, 2]);
        assert_eq!(generalized_minima(&base, 1, 10), base);

        let one = MinimaSet {
            values: vec![1.0],
            positions: vec![0.0],
            harmonics: vec![1],
            order: 1,
        };
        assert_eq!(generalized_minima(&one, 3, 10).values, vec![1.0, 4.0, 9.0]);
        assert_eq!(generalized_minima(&base, 3, 3).values, vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn harmonic_examples() {
        let pi2 = PI * PI;
        let single = decompose_wells(
            &RealizedPotential::from_cells(vec![1.0, 0.0, 0.0, 0.0, 0.0, 1.0], 1.0).unwrap(),
        );
        let h = harmonic_predictions(&single, 2, 10).unwrap();
        assert_eq!(h, vec![pi2 / 16.0, 4.0 * pi2 / 16.0]);

        let two = decompose_wells(
            &RealizedPotential::from_cells(vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0], 1.0).unwrap(),
        );
        let h = harmonic_predictions(&two, 1, 10).unwrap();
        assert_eq!(h, vec![pi2 / 9.0, pi2 / 4.0]);
        assert_eq!(h[0], pi2 / (two.l_max * two.l_max) as f64);

        let none = decompose_wells(&RealizedPotential::from_cells(vec![1.0; 3], 1.0).unwrap());
        assert!(matches!(
            harmonic_predictions(&none, 1, 3),
            Err(Error::EmptyPrediction)
        ));
    }

    proptest! {
        #[test]
        fn generalized_sorted_and_sized(
            vals in proptest::collection::vec(0.01f64..100.0, 0..30),
            s in 1usize..5,
            keep in 1usize..80,
        ) {
            let n = vals.len();
            let base = MinimaSet::sorted(vals.into_iter().enumerate().map(|(i, v)| (v, i as f64, 1)).collect(), 1);
            let g = generalized_minima(&base, s, keep);
            prop_assert!(g.values.windows(2).all(|w| w[0] <= w[1]));
            if s > 1 {
                prop_assert_eq!(g.len(), keep.min(s * n));
            } else {
                prop_assert_eq!(&g, &base);
            }
        }

        #[test]
        fn landscape_positive_and_ordered(seed in any::<u64>(), bump in 0.0f64..10.0) {
            let d = Distribution::bernoulli(0.5, 5.0).unwrap();
            let low = generate(d, 15, 1.0, seed).unwrap();
            let high = RealizedPotential::from_cells(
                low.cells.iter().enumerate().map(|(j, c)| if j % 2 == 1 { c + bump } else { *c }).collect(),
                1.0,
            ).unwrap();
            let ul = landscape(&assemble(&low, 8).unwrap()).unwrap();
            let uh = landscape(&assemble(&high, 8).unwrap()).unwrap();
            prop_assert!(ul.u.iter().all(|&v| v > 0.0));
            for (a, b) in uh.u.iter().zip(&ul.u) {
                prop_assert!(*a <= *b * (1.0 + 1e-12));
            }
        }
    }
}
