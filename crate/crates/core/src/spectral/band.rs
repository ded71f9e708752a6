//! Band sets and gaps of a unitary family sampled over the torus.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::defect::midpoint_grid;
use crate::error::Result;
use crate::linalg::{circ_dist, eigenphases, wrap_phase};
use crate::symbol::UnitaryFamily;

/// Counter-clockwise arc of the unit circle from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
}

impl Arc {
    pub fn width(&self) -> f64 {
        let w = (self.end - self.start).rem_euclid(TAU);
        if w == 0.0 && self.start != self.end {
            TAU
        } else {
            w
        }
    }

    pub fn contains(&self, phase: f64) -> bool {
        let off = (phase - self.start).rem_euclid(TAU);
        off > 0.0 && off < self.width()
    }

    pub fn midpoint(&self) -> f64 {
        wrap_phase(self.start + self.width() / 2.0)
    }
}

/// Sorted eigenphases of a family over a grid, with the distance within which
/// every true band value lies of some sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSample {
    pub phases: Vec<f64>,
    pub resolution: f64,
}

impl BandSample {
    /// Circular distance from `phase` to the nearest sampled band value.
    pub fn distance(&self, phase: f64) -> f64 {
        let p = &self.phases;
        if p.is_empty() {
            return PI;
        }
        let x = wrap_phase(phase);
        let i = p.partition_point(|&v| v < x);
        let a = p[i % p.len()];
        let b = p[(i + p.len() - 1) % p.len()];
        circ_dist(x, a).min(circ_dist(x, b))
    }
}

/// Eigenphases on the `grid_points^s` midpoint grid.
///
/// Between grid points the family moves by at most `L·π/N` in operator norm
/// (`L` its Lipschitz bound), and eigenvalues of unitaries move by no more in
/// chord length; the arc length is at most `π/2` times the chord.
pub fn band_sample(family: &dyn UnitaryFamily, grid_points: usize) -> Result<BandSample> {
    let s = family.lattice_dim();
    let axis = midpoint_grid(grid_points);
    let total = grid_points.pow(s as u32);
    let chunks: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut k = vec![0.0; s];
            for slot in k.iter_mut().rev() {
                *slot = axis[idx % grid_points];
                idx /= grid_points;
            }
            eigenphases(&family.eval(&k))
        })
        .collect::<Result<_>>()?;
    let mut phases: Vec<f64> = chunks.into_iter().flatten().collect();
    phases.sort_by(f64::total_cmp);
    let resolution = FRAC_PI_2 * family.lipschitz_bound() * PI / grid_points as f64;
    Ok(BandSample { phases, resolution })
}

/// Open arcs free of spectrum: gaps between consecutive sampled band values
/// wider than twice the resolution, each shrunk by the resolution at both ends.
/// The answer is only as good as the grid; narrow gaps below `2·resolution`
/// are not reported.
pub fn band_gap(family: &dyn UnitaryFamily, grid_points: usize) -> Result<Vec<Arc>> {
    let sample = band_sample(family, grid_points)?;
    Ok(gaps_of(&sample))
}

pub fn gaps_of(sample: &BandSample) -> Vec<Arc> {
    let p = &sample.phases;
    let res = sample.resolution;
    let mut arcs = Vec::new();
    if p.is_empty() {
        return arcs;
    }
    for i in 0..p.len() {
        let a = p[i];
        let b = if i + 1 < p.len() { p[i + 1] } else { p[0] + TAU };
        if b - a > 2.0 * res {
            arcs.push(Arc { start: wrap_phase(a + res), end: wrap_phase(b - res) });
        }
    }
    arcs
}
