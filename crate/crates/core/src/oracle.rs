//! Brute-force ε-equilibrium search on an angle-uniform grid of the torus.
//!
//! Nothing here goes through the analytic pipeline: the payoff is evaluated
//! from the raw `A`, `u`, `v` of a [`ReducedGame`] with its own formula, and
//! best responses are found by exhaustive scan. Player 1 maximizes `g`,
//! player 2 minimizes it.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra2::Vec2;
use crate::equilibrium::EquilibriumCertificate;
use crate::error::GameError;
use crate::reduction::{ReducedGame, TorusPoint};

pub const MIN_RESOLUTION: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: usize,
    pub epsilon: f64,
}

impl GridSpec {
    pub fn new(resolution: usize, epsilon: f64) -> Result<Self, GameError> {
        if resolution < MIN_RESOLUTION {
            return Err(GameError::ResolutionTooSmall(resolution));
        }
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(GameError::InvalidEpsilon(epsilon));
        }
        Ok(Self { resolution, epsilon })
    }

    /// `ε = 10 · Σc · (2π / N)`: ten times the first-order payoff change
    /// over one grid step.
    pub fn with_default_epsilon(resolution: usize, coefficient_total: f64) -> Result<Self, GameError> {
        Self::new(resolution, default_epsilon(resolution, coefficient_total))
    }

    pub fn step(&self) -> f64 {
        TAU / self.resolution as f64
    }
}

pub fn default_epsilon(resolution: usize, coefficient_total: f64) -> f64 {
    10.0 * coefficient_total * TAU / resolution as f64
}

/// Angle of grid point `k`.
pub fn grid_angle(k: usize, resolution: usize) -> f64 {
    TAU * k as f64 / resolution as f64
}

fn grid_points(resolution: usize) -> Vec<Vec2> {
    (0..resolution).map(|k| Vec2::from_angle(grid_angle(k, resolution))).collect()
}

/// Distance between two angles along the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Larger of the two per-player circular distances.
pub fn torus_distance(x1: &TorusPoint, y1: &TorusPoint, x2: &TorusPoint, y2: &TorusPoint) -> f64 {
    circular_distance(x1.angle(), x2.angle()).max(circular_distance(y1.angle(), y2.angle()))
}

/// The payoff as a function of `x` for fixed `y`: `g(x, y) = ⟨x, w⟩ − c`
/// with `w = u − A y` and `c = ⟨v, y⟩`.
#[derive(Debug, Clone, Copy)]
struct Column {
    w: Vec2,
    c: f64,
}

impl Column {
    fn new(rg: &ReducedGame, y: Vec2) -> Self {
        let a = rg.a.m;
        let ay = Vec2 { x1: a[0][0] * y.x1 + a[0][1] * y.x2, x2: a[1][0] * y.x1 + a[1][1] * y.x2 };
        Self { w: rg.u - ay, c: rg.v.x1 * y.x1 + rg.v.x2 * y.x2 }
    }

    fn eval(&self, x: Vec2) -> f64 {
        x.x1 * self.w.x1 + x.x2 * self.w.x2 - self.c
    }
}

/// Off-grid deviation gaps at `(x, y)`. For fixed `y`, `g` is affine in `x`
/// with slope `w`, so the best deviation on the circle gains `|w| − ⟨x, w⟩`;
/// likewise for player 2 with slope `−(Aᵀx + v)`.
fn continuum_gap(rg: &ReducedGame, x: Vec2, y: Vec2) -> f64 {
    let w = Column::new(rg, y).w;
    let a = rg.a.m;
    let r = Vec2 {
        x1: a[0][0] * x.x1 + a[1][0] * x.x2 + rg.v.x1,
        x2: a[0][1] * x.x1 + a[1][1] * x.x2 + rg.v.x2,
    };
    (w.norm() - x.dot(w)) + (r.norm() - r.dot(y))
}

fn argmax_by<F: Fn(usize) -> f64>(n: usize, f: F) -> (usize, f64) {
    let mut best = (0, f(0));
    for k in 1..n {
        let v = f(k);
        if v > best.1 {
            best = (k, v);
        }
    }
    best
}

/// Grid maximizer of `g(·, y)`; ties go to the smallest index.
pub fn best_response_x(rg: &ReducedGame, y: &TorusPoint, resolution: usize) -> (usize, TorusPoint) {
    let col = Column::new(rg, y.vec());
    let pts = grid_points(resolution);
    let (k, _) = argmax_by(resolution, |k| col.eval(pts[k]));
    (k, TorusPoint::from_angle(grid_angle(k, resolution)))
}

/// Grid minimizer of `g(x, ·)`; ties go to the smallest index.
pub fn best_response_y(rg: &ReducedGame, x: &TorusPoint, resolution: usize) -> (usize, TorusPoint) {
    let pts = grid_points(resolution);
    let xv = x.vec();
    let (k, _) = argmax_by(resolution, |k| -Column::new(rg, pts[k]).eval(xv));
    (k, TorusPoint::from_angle(grid_angle(k, resolution)))
}

/// A grid pair where each strategy is an ε-best response to the other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEquilibrium {
    pub i: usize,
    pub j: usize,
    pub x: TorusPoint,
    pub y: TorusPoint,
    pub g_value: f64,
    /// `max_x' g(x', y) − g(x, y)`
    pub deviation_gap_x: f64,
    /// `g(x, y) − min_y' g(x, y')`
    pub deviation_gap_y: f64,
    /// Sum of both players' gaps against deviations anywhere on the circle.
    pub continuum_gap: f64,
}

/// Connected run of hits under 8-neighbour adjacency with wraparound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub size: usize,
    /// Lowest `(i, j)` in the cluster.
    pub first: OracleEquilibrium,
    /// Smallest [`OracleEquilibrium::continuum_gap`], ties to the lowest index.
    pub best: OracleEquilibrium,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridNash {
    pub spec: GridSpec,
    /// Every hit, sorted by `(i, j)`.
    pub hits: Vec<OracleEquilibrium>,
    /// Sorted by their `first` member.
    pub clusters: Vec<Cluster>,
}

/// Exhaustive ε-equilibrium scan of the `N × N` grid.
///
/// Rows are processed in parallel, but each cell is computed by the same
/// sequential arithmetic and results are assembled in index order, so the
/// output does not depend on the thread count.
pub fn grid_nash(rg: &ReducedGame, spec: &GridSpec) -> GridNash {
    let n = spec.resolution;
    let pts = grid_points(n);
    let cols: Vec<Column> = pts.iter().map(|&y| Column::new(rg, y)).collect();

    let max_over_x: Vec<f64> = cols
        .par_iter()
        .map(|col| pts.iter().map(|&x| col.eval(x)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let min_over_y: Vec<f64> = pts
        .par_iter()
        .map(|&x| cols.iter().map(|col| col.eval(x)).fold(f64::INFINITY, f64::min))
        .collect();

    let rows: Vec<Vec<OracleEquilibrium>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = pts[i];
            let mut row = Vec::new();
            for (j, col) in cols.iter().enumerate() {
                let g = col.eval(x);
                let gap_x = max_over_x[j] - g;
                if gap_x > spec.epsilon {
                    continue;
                }
                let gap_y = g - min_over_y[i];
                if gap_y > spec.epsilon {
                    continue;
                }
                row.push(OracleEquilibrium {
                    i,
                    j,
                    x: TorusPoint::from_angle(grid_angle(i, n)),
                    y: TorusPoint::from_angle(grid_angle(j, n)),
                    g_value: g,
                    deviation_gap_x: gap_x,
                    deviation_gap_y: gap_y,
                    continuum_gap: continuum_gap(rg, x, pts[j]),
                });
            }
            row
        })
        .collect();

    let hits: Vec<OracleEquilibrium> = rows.into_iter().flatten().collect();
    let clusters = merge_clusters(&hits, n);
    GridNash { spec: *spec, hits, clusters }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

fn merge_clusters(hits: &[OracleEquilibrium], n: usize) -> Vec<Cluster> {
    if hits.is_empty() {
        return Vec::new();
    }
    // row_start[i]..row_start[i + 1] indexes the hits of row i
    let mut row_start = vec![0usize; n + 1];
    for h in hits {
        row_start[h.i + 1] += 1;
    }
    for i in 0..n {
        row_start[i + 1] += row_start[i];
    }
    let find_hit = |i: usize, j: usize| -> Option<usize> {
        let row = &hits[row_start[i]..row_start[i + 1]];
        row.binary_search_by_key(&j, |h| h.j).ok().map(|k| row_start[i] + k)
    };

    let mut sets = DisjointSets::new(hits.len());
    for (idx, h) in hits.iter().enumerate() {
        for di in [n - 1, 0, 1] {
            for dj in [n - 1, 0, 1] {
                if di == 0 && dj == 0 {
                    continue;
                }
                if let Some(other) = find_hit((h.i + di) % n, (h.j + dj) % n) {
                    sets.union(idx, other);
                }
            }
        }
    }

    // roots are the lowest member index, so iterating hits in order visits
    // each cluster's first member before the rest
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut slot = vec![usize::MAX; hits.len()];
    for (idx, h) in hits.iter().enumerate() {
        let root = sets.find(idx);
        if slot[root] == usize::MAX {
            slot[root] = clusters.len();
            clusters.push(Cluster { size: 0, first: *h, best: *h });
        }
        let c = &mut clusters[slot[root]];
        c.size += 1;
        if h.continuum_gap < c.best.continuum_gap {
            c.best = *h;
        }
    }
    clusters
}

/// `(max_x' g(x', y) − g(x, y), g(x, y) − min_y' g(x, y'))` over the grid.
pub fn deviation_gaps(rg: &ReducedGame, x: &TorusPoint, y: &TorusPoint, resolution: usize) -> (f64, f64) {
    let pts = grid_points(resolution);
    let (xv, yv) = (x.vec(), y.vec());
    let col = Column::new(rg, yv);
    let g = col.eval(xv);
    let best_x = pts.iter().map(|&p| col.eval(p)).fold(f64::NEG_INFINITY, f64::max);
    let best_y = pts.iter().map(|&p| Column::new(rg, p).eval(xv)).fold(f64::INFINITY, f64::min);
    (best_x - g, g - best_y)
}

/// True iff no grid deviation improves either player by more than `ε`.
pub fn verify_certificate(rg: &ReducedGame, cert: &EquilibriumCertificate, spec: &GridSpec) -> bool {
    let (gap_x, gap_y) = deviation_gaps(rg, &cert.x, &cert.y, spec.resolution);
    gap_x <= spec.epsilon && gap_y <= spec.epsilon
}
