//! Property suite run against a scene: the pointwise identities every
//! spacetime must satisfy, plus graph checks on a coarse grid.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::causality::{Direction, Grid, GridOptions};
use crate::error::Result;
use crate::minkowski::is_zero;
use crate::spacetime::{CausalKind, StaticSpacetime, Tangent, CLASS_TOL};
use crate::Vector;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub samples: usize,
    /// Worst observed value of the checked quantity (relative error, gap, …).
    pub worst: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub all_passed: bool,
    pub checks: Vec<Check>,
}

struct Acc {
    name: &'static str,
    samples: usize,
    worst: f64,
    threshold: f64,
    lower_is_bad: bool,
}

impl Acc {
    /// Passing means `worst ≤ threshold`.
    fn upper(name: &'static str, threshold: f64) -> Self {
        Acc { name, samples: 0, worst: 0.0, threshold, lower_is_bad: false }
    }

    /// Passing means `worst ≥ threshold`.
    fn lower(name: &'static str, threshold: f64) -> Self {
        Acc { name, samples: 0, worst: f64::INFINITY, threshold, lower_is_bad: true }
    }

    fn push(&mut self, value: f64) {
        self.samples += 1;
        if self.lower_is_bad {
            self.worst = self.worst.min(value);
        } else if value.is_nan() || value > self.worst {
            self.worst = value;
        }
    }

    fn finish(self) -> Check {
        let passed = if self.lower_is_bad {
            self.worst >= self.threshold
        } else {
            self.worst <= self.threshold
        };
        Check { name: self.name, passed, samples: self.samples, worst: self.worst, threshold: self.threshold }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_fn(n, |_, _| rng.random_range(-2.0..2.0))
}

/// Runs the suite at `points × samples_per_point` random tangents.
/// Grid checks use a `grid_resolution`-cell grid (static mode only).
pub fn run_suite(st: &StaticSpacetime, points_per_axis: usize, samples_per_point: usize, grid_resolution: usize, seed: u64) -> Result<SuiteReport> {
    let n = st.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = st.chart().lattice(points_per_axis.max(2));
    let finsler = st.base.norm.is_finsler();

    let mut euler = Acc::upper("euler_identity", 1e-6);
    let mut homog = Acc::upper("homogeneity", 1e-8);
    let mut contraction = Acc::upper("tensor_contraction", 1e-6);
    let mut posdef = Acc::lower("positive_definite", 0.0);
    let mut st_contraction = Acc::upper("spacetime_tensor_contraction", 1e-8);
    let mut t_inv = Acc::upper("time_translation_invariance", 0.0);
    let mut class = Acc::upper("classification_consistency", 0.0);
    let mut rcs = Acc::lower("reverse_cauchy_schwarz", -1e-9);
    let mut ordering = Acc::upper("conic_ordering", 0.0);

    for x in &points {
        let spec = st.base.norm_at(x);
        for _ in 0..samples_per_point {
            let v = random_vector(n, &mut rng);
            if is_zero(&v) {
                continue;
            }
            let f = spec.eval(&v);
            let f2 = f * f;
            for c in [0.5, 2.0, 10.0] {
                homog.push(rel(spec.eval(&(&v * c)), c * f));
            }
            if finsler {
                let q = spec.momentum(&v)?;
                euler.push(rel(q.dot(&v), 2.0 * f2));
                let g = spec.fundamental_tensor(&v)?;
                contraction.push(rel(g.apply(&v, &v), f2));
                posdef.push(g.min_eigenvalue());
            }

            let tau = rng.random_range(-3.0..3.0);
            let w = Tangent { tau, v: v.clone() };
            let l = st.eval_l(x, &w)?;
            if finsler {
                let gt = st.spacetime_tensor(x, &w)?;
                let mut wv = Vector::zeros(n + 1);
                wv[0] = tau;
                wv.rows_mut(1, n).copy_from(&v);
                let contracted = (wv.transpose() * &gt * &wv)[(0, 0)];
                st_contraction.push((contracted - l).abs() / st.scale(x, &w));
            }
            t_inv.push(if st.eval_l_at(-7.25, x, &w)?.to_bits() == l.to_bits() { 0.0 } else { 1.0 });

            let c = st.classify(x, &w)?;
            let band = CLASS_TOL * st.scale(x, &w);
            let consistent = match c.kind {
                CausalKind::Lightlike => l.abs() <= band,
                CausalKind::Timelike => l < 0.0,
                CausalKind::Spacelike => l > 0.0,
                CausalKind::CausalBoundary => l.abs() <= 10.0 * band,
                CausalKind::Zero => false,
            };
            class.push(if consistent { 0.0 } else { 1.0 });

            if st.is_sstk() {
                if let Ok(m) = st.conic_metrics(x, &v) {
                    if let (Some(lo), Some(hi)) = (m.f_o, m.f_o_l) {
                        ordering.push((lo - hi).max(0.0));
                    }
                }
            } else if finsler {
                // two future causal vectors over random directions
                let u = random_vector(n, &mut rng);
                if is_zero(&u) {
                    continue;
                }
                let a = Tangent { tau: st.cone_point(x, &v)?.tau * rng.random_range(1.0..2.0), v: v.clone() };
                let b = Tangent { tau: st.cone_point(x, &u)?.tau * rng.random_range(1.0..2.0), v: u };
                rcs.push(st.reverse_cs_gap(x, &a, &b)?);
            }
        }
    }

    let mut checks = vec![homog.finish(), t_inv.finish(), class.finish()];
    if finsler {
        checks.extend([euler.finish(), contraction.finish(), posdef.finish(), st_contraction.finish()]);
    }
    if st.is_sstk() {
        checks.push(ordering.finish());
    } else {
        if finsler {
            checks.push(rcs.finish());
        }
        let centre = Vector::from_fn(n, |i, _| 0.5 * (st.chart().lo[i] + st.chart().hi[i]));
        let convex = st.cone_convexity_check(&centre, 1000, seed)?;
        checks.push(Check {
            name: "cone_convexity",
            passed: convex.convex,
            samples: convex.chords_tested,
            worst: convex.witness.map_or(0.0, |w| w.l_at_midpoint),
            threshold: 0.0,
        });
        if finsler {
            checks.extend(grid_checks(st, grid_resolution, &centre)?);
        }
    }
    Ok(SuiteReport { all_passed: checks.iter().all(|c| c.passed), checks })
}

fn grid_checks(st: &StaticSpacetime, resolution: usize, source: &Vector) -> Result<Vec<Check>> {
    let grid = Grid::optical(st, GridOptions { resolution, stencil_radius: 2 })?;
    let d = grid.distance_field(source, Direction::Forward)?;

    let mut tri = Acc::upper("edge_triangle_inequality", 0.0);
    for (a, b, w) in grid.edges() {
        if d.values[a].is_finite() {
            // exact comparison: the label must not exceed the relaxed candidate
            tri.push(if d.values[b] > d.values[a] + w { d.values[b] - (d.values[a] + w) } else { 0.0 });
        }
    }

    let mut bf = Acc::upper("bellman_ford_agreement", 0.0);
    let reference = bellman_ford(&grid, &grid.source_seeds(source, Direction::Forward)?);
    for (x, y) in d.values.iter().zip(&reference) {
        bf.push(if x == y || (x.is_infinite() && y.is_infinite()) { 0.0 } else { (x - y).abs() });
    }

    let mut nest = Acc::upper("ball_nesting", 0.0);
    let radii = [0.25, 0.5, 1.0];
    let balls: Vec<Vec<usize>> = radii
        .iter()
        .map(|r| (0..grid.node_count()).filter(|&i| d.values[i] < *r).collect())
        .collect();
    for pair in balls.windows(2) {
        let outer: std::collections::HashSet<usize> = pair[1].iter().copied().collect();
        nest.push(pair[0].iter().filter(|i| !outer.contains(i)).count() as f64);
    }
    Ok(vec![tri.finish(), bf.finish(), nest.finish()])
}

/// Relaxes every edge until nothing changes.
fn bellman_ford(grid: &Grid, seeds: &[(usize, f64)]) -> Vec<f64> {
    let edges: Vec<(usize, usize, f64)> = grid.edges().collect();
    let mut dist = vec![f64::INFINITY; grid.node_count()];
    for &(node, w) in seeds {
        dist[node] = dist[node].min(w);
    }
    loop {
        let mut changed = false;
        for &(a, b, w) in &edges {
            if dist[a] + w < dist[b] {
                dist[b] = dist[a] + w;
                changed = true;
            }
        }
        if !changed {
            return dist;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{Chart, FinslerField};
    use crate::minkowski::NormSpec;

    #[test]
    fn flat_scene_passes() {
        let st = StaticSpacetime::new(FinslerField::uniform(Chart::square(2, 2.0), NormSpec::euclidean(2), 1.0).unwrap());
        let r = run_suite(&st, 3, 20, 20, 42).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
    }
}
