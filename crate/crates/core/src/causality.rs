//! Discretized Finslerian distance on a regular grid (directed Dijkstra over a
//! fixed stencil), balls, chronology queries and causal-ladder probes.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::{Chart, FinslerField, ScalarField};
use crate::error::{Error, Result};
use crate::geodesics::{self, ShootingProblem};
use crate::sampling;
use crate::spacetime::{Event, StaticSpacetime, Tangent};
use crate::Vector;

/// Relative tolerance granted to grid distances before the stencil bound is considered.
pub const BASE_GRID_REL_TOL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Cells per axis (nodes per axis is one more).
    pub resolution: usize,
    /// Offsets have coordinates in `{−r..r}`; `r = 2` gives the 16-offset planar stencil.
    pub stencil_radius: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { resolution: 100, stencil_radius: 2 }
    }
}

impl GridOptions {
    pub fn with_resolution(resolution: usize) -> Self {
        GridOptions { resolution, ..Default::default() }
    }
}

/// All non-zero integer offsets in `{−r..r}ⁿ` whose coordinates are coprime.
pub fn stencil(n: usize, radius: usize) -> Vec<Vec<i64>> {
    let r = radius as i64;
    let side = (2 * r + 1) as usize;
    let mut out = Vec::new();
    for mut idx in 0..side.pow(n as u32) {
        let o: Vec<i64> = (0..n)
            .map(|_| {
                let c = (idx % side) as i64 - r;
                idx /= side;
                c
            })
            .collect();
        let g = o.iter().fold(0, |g, &c| gcd(g, c.unsigned_abs()));
        if g == 1 {
            out.push(o);
        }
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Worst relative overestimate of Euclidean distance by shortest stencil paths.
///
/// In the plane this is `1/cos(φ/2) − 1` for the widest angular gap `φ`
/// between consecutive offset directions (2.75% for radius 2, 1.30% for
/// radius 3). In higher dimension it is measured on a small lattice.
pub fn stencil_bound(n: usize, radius: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        2 => {
            let mut angles: Vec<f64> =
                stencil(2, radius).iter().map(|o| (o[1] as f64).atan2(o[0] as f64)).collect();
            angles.sort_by(f64::total_cmp);
            let mut gap: f64 = angles[0] + std::f64::consts::TAU - angles[angles.len() - 1];
            for w in angles.windows(2) {
                gap = gap.max(w[1] - w[0]);
            }
            1.0 / (gap / 2.0).cos() - 1.0
        }
        _ => {
            let half = 3 * radius;
            let chart = Chart::new(vec![-(half as f64); n], vec![half as f64; n], 0.5).expect("valid chart");
            let field = FinslerField::uniform(chart, crate::minkowski::NormSpec::euclidean(n), 1.0)
                .expect("euclidean field");
            let grid = Grid::new(&field, GridOptions { resolution: 2 * half, stencil_radius: radius })
                .expect("small grid");
            let d = grid.distance_field(&Vector::zeros(n), Direction::Forward).expect("distance");
            (0..grid.node_count())
                .map(|i| {
                    let r = grid.node_position(i).norm();
                    if r > 0.0 {
                        d.values[i] / r - 1.0
                    } else {
                        0.0
                    }
                })
                .fold(0.0, f64::max)
        }
    }
}

/// Node layout shared by grids and the distance fields they produce.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub lo: Vector,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
}

impl Geometry {
    pub fn node_count(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn index_of(&self, coords: &[usize]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (c, s) in coords.iter().zip(&self.shape) {
            idx += c * stride;
            stride *= s;
        }
        idx
    }

    pub fn coords_of(&self, mut idx: usize) -> Vec<usize> {
        self.shape
            .iter()
            .map(|s| {
                let c = idx % s;
                idx /= s;
                c
            })
            .collect()
    }

    pub fn position(&self, idx: usize) -> Vector {
        let c = self.coords_of(idx);
        Vector::from_fn(self.shape.len(), |i, _| self.lo[i] + c[i] as f64 * self.spacing[i])
    }

    /// Lower corner of the cell containing `x` and the fractional offsets.
    fn cell(&self, x: &Vector) -> (Vec<usize>, Vec<f64>) {
        let mut base = Vec::with_capacity(x.len());
        let mut frac = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            let t = ((x[i] - self.lo[i]) / self.spacing[i]).clamp(0.0, (self.shape[i] - 1) as f64);
            let b = (t.floor() as usize).min(self.shape[i] - 2);
            base.push(b);
            frac.push(t - b as f64);
        }
        (base, frac)
    }

    /// Corner nodes of the cell containing `x` with their multilinear weights.
    pub fn cell_corners(&self, x: &Vector) -> Vec<(usize, f64)> {
        let n = x.len();
        let (base, frac) = self.cell(x);
        (0..(1usize << n))
            .map(|corner| {
                let mut coords = base.clone();
                let mut w = 1.0;
                for i in 0..n {
                    if (corner >> i) & 1 == 1 {
                        coords[i] += 1;
                        w *= frac[i];
                    } else {
                        w *= 1.0 - frac[i];
                    }
                }
                (self.index_of(&coords), w)
            })
            .collect()
    }

    pub fn nearest_node(&self, x: &Vector) -> usize {
        let coords: Vec<usize> = (0..x.len())
            .map(|i| {
                let t = ((x[i] - self.lo[i]) / self.spacing[i]).round();
                t.clamp(0.0, (self.shape[i] - 1) as f64) as usize
            })
            .collect();
        self.index_of(&coords)
    }

    /// Neighbour of `node` by `offset`, if it lies in the grid.
    pub fn shifted(&self, node: usize, offset: &[i64]) -> Option<usize> {
        let coords = self.coords_of(node);
        let mut out = Vec::with_capacity(coords.len());
        for ((c, o), s) in coords.iter().zip(offset).zip(&self.shape) {
            let v = *c as i64 + o;
            if v < 0 || v >= *s as i64 {
                return None;
            }
            out.push(v as usize);
        }
        Some(self.index_of(&out))
    }
}

/// Weighted directed graph on the chart's nodes. Edge `u → u + o` has weight
/// `F_{midpoint}(o·h)`; masked nodes (inside holes) carry no edges.
#[derive(Debug, Clone)]
pub struct Grid {
    pub chart: Chart,
    pub field: FinslerField,
    pub options: GridOptions,
    pub geometry: Geometry,
    pub offsets: Vec<Vec<i64>>,
    pub masked: Vec<bool>,
    weights: Vec<f64>,
}

impl Grid {
    /// Grid for the distance of `field`'s own norm (pass an optical field for `d̃`).
    pub fn new(field: &FinslerField, options: GridOptions) -> Result<Self> {
        if options.resolution < 2 || options.stencil_radius < 1 {
            return Err(Error::InvalidInput("grid needs resolution ≥ 2 and stencil radius ≥ 1".into()));
        }
        if !field.norm.is_finsler() {
            return Err(Error::NotFinslerNorm { operation: "grid distances" });
        }
        let chart = field.chart.clone();
        let n = chart.dimension();
        let shape = vec![options.resolution + 1; n];
        let spacing: Vec<f64> = (0..n).map(|i| (chart.hi[i] - chart.lo[i]) / options.resolution as f64).collect();
        let geometry = Geometry { lo: chart.lo.clone(), spacing, shape };
        let offsets = stencil(n, options.stencil_radius);
        let count = geometry.node_count();
        let masked: Vec<bool> = (0..count).map(|i| chart.in_hole(&geometry.position(i))).collect();
        let k = offsets.len();
        let mut weights = vec![f64::INFINITY; count * k];
        let constant = field.norm.is_translation_invariant();
        let constant_spec = field.norm_at(&chart.lo);
        let physical: Vec<Vector> = offsets
            .iter()
            .map(|o| Vector::from_fn(n, |i, _| o[i] as f64 * geometry.spacing[i]))
            .collect();
        let constant_weights: Vec<f64> = physical.iter().map(|d| constant_spec.eval(d)).collect();
        for node in 0..count {
            if masked[node] {
                continue;
            }
            let p = geometry.position(node);
            for (j, o) in offsets.iter().enumerate() {
                let Some(to) = geometry.shifted(node, o) else { continue };
                if masked[to] {
                    continue;
                }
                let mid = &p + &physical[j] * 0.5;
                if chart.in_hole(&mid) {
                    continue;
                }
                let w = if constant { constant_weights[j] } else { field.eval(&mid, &physical[j]) };
                if !(w > 0.0) {
                    return Err(Error::InvalidInput(format!("non-positive edge weight {w} at {:?}", mid.as_slice())));
                }
                weights[node * k + j] = w;
            }
        }
        Ok(Grid { chart, field: field.clone(), options, geometry, offsets, masked, weights })
    }

    /// Grid for the optical distance `d̃` of a static spacetime.
    pub fn optical(st: &StaticSpacetime, options: GridOptions) -> Result<Self> {
        if st.is_sstk() {
            return Err(Error::WrongMode { required: "static" });
        }
        Grid::new(&st.base.optical(), options)
    }

    pub fn node_count(&self) -> usize {
        self.geometry.node_count()
    }

    pub fn node_position(&self, node: usize) -> Vector {
        self.geometry.position(node)
    }

    pub fn edge_weight(&self, node: usize, offset_index: usize) -> f64 {
        self.weights[node * self.offsets.len() + offset_index]
    }

    /// Edges `(from, to, weight)` with finite weight.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.offsets.iter().enumerate().filter_map(move |(j, o)| {
                let w = self.edge_weight(u, j);
                if w.is_finite() {
                    Some((u, self.geometry.shifted(u, o)?, w))
                } else {
                    None
                }
            })
        })
    }

    /// `max(2%, stencil bound)`.
    pub fn relative_tolerance(&self) -> f64 {
        BASE_GRID_REL_TOL.max(stencil_bound(self.chart.dimension(), self.options.stencil_radius))
    }

    pub fn grid_tol(&self, distance: f64) -> f64 {
        self.relative_tolerance() * distance
    }

    /// Half the largest axis-edge weight at `node`: the "half cell" in distance units.
    pub fn half_cell(&self, node: usize) -> f64 {
        let k = self.offsets.len();
        self.offsets
            .iter()
            .enumerate()
            .filter(|(_, o)| o.iter().filter(|c| **c != 0).count() == 1)
            .map(|(j, _)| self.weights[node * k + j])
            .filter(|w| w.is_finite())
            .fold(0.0, f64::max)
            * 0.5
    }

    /// Initial labels for a source at `x`: the node itself when `x` sits on
    /// one, otherwise the unmasked corners of its cell at the local norm of
    /// the connecting vector.
    pub fn source_seeds(&self, x: &Vector, direction: Direction) -> Result<Vec<(usize, f64)>> {
        if x.len() != self.chart.dimension() {
            return Err(Error::DimensionMismatch { expected: self.chart.dimension(), got: x.len() });
        }
        self.chart.require(x)?;
        let nearest = self.geometry.nearest_node(x);
        if (self.geometry.position(nearest) - x).amax() == 0.0 && !self.masked[nearest] {
            return Ok(vec![(nearest, 0.0)]);
        }
        let spec = self.field.norm_at(x);
        let mut seeds: Vec<(usize, f64)> = Vec::new();
        for (node, _) in self.geometry.cell_corners(x) {
            if self.masked[node] || seeds.iter().any(|(m, _)| *m == node) {
                continue;
            }
            let d = self.geometry.position(node) - x;
            let w = match direction {
                Direction::Forward => spec.eval(&d),
                Direction::Backward => spec.eval(&-d),
            };
            seeds.push((node, w));
        }
        Ok(seeds)
    }

    /// Single-source shortest paths from `x` (forward: `d(x, ·)`; backward:
    /// `d(·, x)` on the transposed graph), seeded by [`Grid::source_seeds`].
    pub fn distance_field(&self, x: &Vector, direction: Direction) -> Result<DistanceField> {
        let seeds = self.source_seeds(x, direction)?;
        let count = self.node_count();
        let k = self.offsets.len();
        let mut dist = vec![f64::INFINITY; count];
        let mut heap = BinaryHeap::new();
        let nearest = self.geometry.nearest_node(x);
        for (node, w) in seeds {
            if w < dist[node] {
                dist[node] = w;
                heap.push(Entry(w, node));
            }
        }
        while let Some(Entry(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for (j, o) in self.offsets.iter().enumerate() {
                let (next, w) = match direction {
                    Direction::Forward => match self.geometry.shifted(u, o) {
                        Some(to) => (to, self.weights[u * k + j]),
                        None => continue,
                    },
                    Direction::Backward => {
                        let back: Vec<i64> = o.iter().map(|c| -c).collect();
                        match self.geometry.shifted(u, &back) {
                            Some(from) => (from, self.weights[from * k + j]),
                            None => continue,
                        }
                    }
                };
                let cand = d + w;
                if cand < dist[next] {
                    dist[next] = cand;
                    heap.push(Entry(cand, next));
                }
            }
        }
        Ok(DistanceField {
            source: x.clone(),
            source_node: nearest,
            direction,
            geometry: self.geometry.clone(),
            values: dist,
        })
    }

    /// Nodes with distance `< r` (open ball).
    pub fn ball(&self, x0: &Vector, r: f64, direction: Direction) -> Result<Vec<usize>> {
        if !(r > 0.0) {
            return Err(Error::InvalidInput("ball radius must be positive".into()));
        }
        let d = self.distance_field(x0, direction)?;
        let mut nodes: Vec<usize> = (0..self.node_count()).filter(|&i| d.values[i] < r).collect();
        if nodes.is_empty() {
            nodes.push(self.geometry.nearest_node(x0));
        }
        Ok(nodes)
    }

    /// Nodes with distance `≤ r + half cell` (grid closure of the ball).
    pub fn closed_ball(&self, x0: &Vector, r: f64, direction: Direction) -> Result<Vec<usize>> {
        let d = self.distance_field(x0, direction)?;
        Ok(closed_from(self, &d, r))
    }

    /// True when `node` lies within the chart margin or next to a masked node.
    pub fn touches_boundary(&self, node: usize) -> bool {
        if self.chart.boundary_distance(&self.node_position(node)) <= self.chart.margin {
            return true;
        }
        self.offsets
            .iter()
            .any(|o| self.geometry.shifted(node, o).is_some_and(|m| self.masked[m]))
    }
}

fn closed_from(grid: &Grid, d: &DistanceField, r: f64) -> Vec<usize> {
    (0..grid.node_count()).filter(|&i| d.values[i] <= r + grid.half_cell(i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    pub source: Vector,
    pub source_node: usize,
    pub direction: Direction,
    pub geometry: Geometry,
    pub values: Vec<f64>,
}

impl DistanceField {
    /// Multilinear interpolation of the node values (`NaN` when a corner is unreachable).
    pub fn value_at(&self, x: &Vector) -> f64 {
        let mut acc = 0.0;
        for (node, w) in self.geometry.cell_corners(x) {
            if w == 0.0 {
                continue;
            }
            let v = self.values[node];
            if !v.is_finite() {
                return f64::NAN;
            }
            acc += w * v;
        }
        acc
    }

    pub fn value_at_nearest(&self, x: &Vector) -> f64 {
        self.values[self.geometry.nearest_node(x)]
    }

    /// CSV with header `x1..xn,distance`; unreachable nodes print `inf`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.geometry.shape.len();
        let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        header.push("distance".into());
        writeln!(out, "{}", header.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let mut row: Vec<f64> = self.geometry.position(i).iter().copied().collect();
            row.push(*v);
            writeln!(out, "{}", crate::io::csv_row(&row))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChronoResult {
    pub chronological: bool,
    pub causal_assuming_simplicity: bool,
    /// `(t_q − t_p) − d̃(x_p, x_q)`.
    pub margin: f64,
    pub distance: f64,
    /// Relative stencil error plus one cell length at `x_q`: off-node
    /// endpoints are seeded and read back through cell corners.
    pub grid_tol: f64,
}

/// `q ∈ I⁺(p)` iff `t_q − t_p > d̃(x_p, x_q)`, with a grid tolerance band.
pub fn chrono_related(grid: &Grid, p: &Event, q: &Event) -> Result<ChronoResult> {
    let d = grid.distance_field(&p.x, Direction::Forward)?;
    chrono_from_field(grid, &d, p, q)
}

fn chrono_from_field(grid: &Grid, d: &DistanceField, p: &Event, q: &Event) -> Result<ChronoResult> {
    grid.chart.require(&q.x)?;
    let distance = d.value_at(&q.x);
    let cell = grid.geometry.cell_corners(&q.x).iter().map(|&(node, _)| 2.0 * grid.half_cell(node)).fold(0.0, f64::max);
    let tol = grid.grid_tol(distance) + cell;
    let margin = (q.t - p.t) - distance;
    Ok(ChronoResult {
        chronological: margin > tol,
        causal_assuming_simplicity: margin >= -tol,
        margin,
        distance,
        grid_tol: tol,
    })
}

/// Chronology queries with forward distance fields cached per source point.
pub struct ChronoCache<'g> {
    grid: &'g Grid,
    fields: HashMap<Vec<u64>, DistanceField>,
}

impl<'g> ChronoCache<'g> {
    pub fn new(grid: &'g Grid) -> Self {
        ChronoCache { grid, fields: HashMap::new() }
    }

    pub fn query(&mut self, p: &Event, q: &Event) -> Result<ChronoResult> {
        let key: Vec<u64> = p.x.iter().map(|c| c.to_bits()).collect();
        if !self.fields.contains_key(&key) {
            let d = self.grid.distance_field(&p.x, Direction::Forward)?;
            self.fields.insert(key.clone(), d);
        }
        chrono_from_field(self.grid, &self.fields[&key], p, q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairOutcome {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub grid_distance: f64,
    pub shot_length: Option<f64>,
    /// `shot_length − grid_distance`.
    pub gap: f64,
    pub tolerance: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplicityReport {
    pub all_minimizers_found: bool,
    pub pairs: Vec<PairOutcome>,
    pub failures: Vec<PairOutcome>,
}

/// Samples `pair_samples` node pairs in the middle two thirds of the chart and
/// compares the shortest shot optical geodesic with the grid distance; a pair
/// passes when the two agree within `max(2%, 2 cells)`. Shots must land
/// within `shooting_tolerance` of the target.
pub fn causal_simplicity_probe(
    st: &StaticSpacetime,
    grid: &Grid,
    pair_samples: usize,
    seed: u64,
    shooting_tolerance: f64,
) -> Result<SimplicityReport> {
    let nodes = interior_nodes(grid);
    if nodes.len() < 2 {
        return Err(Error::InvalidInput("grid has no interior nodes to sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for _ in 0..pair_samples.max(1) {
        let mut pick = nodes.clone();
        pick.shuffle(&mut rng);
        let (a, b) = (pick[0], pick[1]);
        let xa = grid.node_position(a);
        let xb = grid.node_position(b);
        let d = grid.distance_field(&xa, Direction::Forward)?.values[b];
        let tolerance = (BASE_GRID_REL_TOL * d).max(2.0 * 2.0 * grid.half_cell(b));
        let mut problem = ShootingProblem::new(Event { t: 0.0, x: xa.clone() }, xb.clone());
        problem.tolerance = shooting_tolerance;
        let shot = geodesics::shoot_to_target(st, &problem)?;
        let shot_length = shot.map(|s| s.length);
        let gap = shot_length.map_or(f64::INFINITY, |l| l - d);
        pairs.push(PairOutcome {
            from: xa.iter().copied().collect(),
            to: xb.iter().copied().collect(),
            grid_distance: d,
            shot_length,
            gap,
            tolerance,
            ok: gap.abs() <= tolerance,
        });
    }
    let failures: Vec<PairOutcome> = pairs.iter().filter(|p| !p.ok).cloned().collect();
    Ok(SimplicityReport { all_minimizers_found: failures.is_empty(), pairs, failures })
}

fn interior_nodes(grid: &Grid) -> Vec<usize> {
    let chart = &grid.chart;
    (0..grid.node_count())
        .filter(|&i| {
            let x = grid.node_position(i);
            !grid.masked[i]
                && (0..x.len()).all(|k| {
                    let pad = (chart.hi[k] - chart.lo[k]) / 6.0;
                    x[k] >= chart.lo[k] + pad - 1e-12 && x[k] <= chart.hi[k] - pad + 1e-12
                })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicityReport {
    pub compact_proxy: bool,
    pub boundary_contact: bool,
    pub intersection_size: usize,
    /// Intersection nodes within the margin or adjacent to the mask.
    pub contact_nodes: Vec<Vec<f64>>,
}

/// Closed-ball intersection `B̄⁺(x, r) ∩ B̄⁻(y, s)` and whether it stays away
/// from the chart margin and the mask.
pub fn global_hyperbolicity_probe(grid: &Grid, x: &Vector, y: &Vector, r: f64, s: f64) -> Result<HyperbolicityReport> {
    if !(r > 0.0 && s > 0.0) {
        return Err(Error::InvalidInput("radii must be positive".into()));
    }
    let fwd = grid.distance_field(x, Direction::Forward)?;
    let bwd = grid.distance_field(y, Direction::Backward)?;
    let a = closed_from(grid, &fwd, r);
    let b: std::collections::HashSet<usize> = closed_from(grid, &bwd, s).into_iter().collect();
    let inter: Vec<usize> = a.into_iter().filter(|i| b.contains(i)).collect();
    let contact_nodes: Vec<Vec<f64>> = inter
        .iter()
        .filter(|&&i| grid.touches_boundary(i))
        .map(|&i| grid.node_position(i).iter().copied().collect())
        .collect();
    let boundary_contact = !contact_nodes.is_empty();
    Ok(HyperbolicityReport {
        compact_proxy: !boundary_contact,
        boundary_contact,
        intersection_size: inter.len(),
        contact_nodes,
    })
}

/// How chart exits are read by [`completeness_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompletenessModel {
    /// The chart is a window onto `ℝⁿ`: every exit is inconclusive.
    WholePlane,
    /// Holes are deleted points of `M`: reaching one within budget is escape.
    Masked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RayEnd {
    BudgetExhausted,
    LeftChart,
    EnteredHole,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ray {
    pub origin: Vec<f64>,
    pub direction: Vec<f64>,
    pub forward: bool,
    pub length: f64,
    pub end: RayEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub forward_complete_proxy: bool,
    pub backward_complete_proxy: bool,
    pub escaping_rays: Vec<Ray>,
    pub inconclusive_rays: usize,
    pub rays: usize,
}

/// Shoots unit-speed geodesic rays of `field` (forward) and of its reverse
/// (backward) from `origins` in `ray_samples` directions each, up to
/// `length_budget`.
pub fn completeness_probe(
    field: &FinslerField,
    origins: &[Vector],
    ray_samples: usize,
    length_budget: f64,
    step: f64,
    model: CompletenessModel,
) -> Result<CompletenessReport> {
    if !(length_budget > 0.0) {
        return Err(Error::InvalidInput("length budget must be positive".into()));
    }
    let n = field.dimension();
    let reverse = field.reversed();
    let mut escaping = Vec::new();
    let mut inconclusive = 0;
    let mut total = 0;
    for (forward, f) in [(true, field), (false, &reverse)] {
        for x0 in origins {
            for u in sampling::unit_directions(n, ray_samples.max(1)) {
                let v0 = &u / f.eval(x0, &u);
                let traj = geodesics::integrate_base_geodesic(f, x0, &v0, length_budget, step)?;
                total += 1;
                let last = traj.last();
                let end = if !traj.exited_chart {
                    RayEnd::BudgetExhausted
                } else if f.chart.in_hole(&(&last.x + &last.v * (2.0 * step))) {
                    RayEnd::EnteredHole
                } else {
                    RayEnd::LeftChart
                };
                let escapes = match (model, end) {
                    (CompletenessModel::Masked, RayEnd::EnteredHole) => true,
                    (_, RayEnd::BudgetExhausted) => false,
                    _ => {
                        inconclusive += 1;
                        false
                    }
                };
                if escapes {
                    escaping.push(Ray {
                        origin: x0.iter().copied().collect(),
                        direction: u.iter().copied().collect(),
                        forward,
                        length: last.s,
                        end,
                    });
                }
            }
        }
    }
    Ok(CompletenessReport {
        forward_complete_proxy: !escaping.iter().any(|r| r.forward),
        backward_complete_proxy: !escaping.iter().any(|r| !r.forward),
        escaping_rays: escaping,
        inconclusive_rays: inconclusive,
        rays: total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphViolation {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// `F̃(v) − df(v)` or `L((df(v)/α, v))`.
    pub value: f64,
    pub check: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyGraphReport {
    pub future_spacelike: bool,
    pub spacelike: bool,
    pub worst_future: Option<GraphViolation>,
    pub worst_spacelike: Option<GraphViolation>,
    pub points: usize,
    pub directions: usize,
}

/// Direction sweep over `points` of the two graph conditions for `S_f`:
/// `F̃(v) − df(v) > 0` (future side) and `L((df(v)/α, v)) > 0` (spacelike `S_{f/α}`).
pub fn cauchy_graph_check(
    st: &StaticSpacetime,
    f: &ScalarField,
    points: &[Vector],
    alpha: f64,
    directions: usize,
) -> Result<CauchyGraphReport> {
    if !(alpha >= 1.0) {
        return Err(Error::InvalidInput("alpha must be at least 1".into()));
    }
    let optical = st.base.optical();
    let n = st.dimension();
    let dirs = sampling::unit_directions(n, directions.max(8));
    let mut worst_future: Option<GraphViolation> = None;
    let mut worst_spacelike: Option<GraphViolation> = None;
    for x in points {
        st.chart().require(x)?;
        let df = f.gradient(x);
        for v in &dirs {
            let dv = df.dot(v);
            let a = optical.eval(x, v) - dv;
            if a <= 0.0 && worst_future.as_ref().is_none_or(|w| a < w.value) {
                worst_future = Some(GraphViolation {
                    x: x.iter().copied().collect(),
                    v: v.iter().copied().collect(),
                    value: a,
                    check: "future",
                });
            }
            let b = st.l_unchecked(x, &Tangent { tau: dv / alpha, v: v.clone() });
            if b <= 0.0 && worst_spacelike.as_ref().is_none_or(|w| b < w.value) {
                worst_spacelike = Some(GraphViolation {
                    x: x.iter().copied().collect(),
                    v: v.iter().copied().collect(),
                    value: b,
                    check: "spacelike",
                });
            }
        }
    }
    Ok(CauchyGraphReport {
        future_spacelike: worst_future.is_none(),
        spacelike: worst_future.is_none() && worst_spacelike.is_none(),
        worst_future,
        worst_spacelike,
        points: points.len(),
        directions: dirs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Hole;
    use crate::minkowski::NormSpec;
    use crate::Matrix;

    fn v2(x: f64, y: f64) -> Vector {
        Vector::from_vec(vec![x, y])
    }

    fn grid_for(spec: NormSpec, half: f64, resolution: usize) -> Grid {
        let field = FinslerField::uniform(Chart::square(2, half), spec, 1.0).unwrap();
        Grid::new(&field, GridOptions::with_resolution(resolution)).unwrap()
    }

    #[test]
    fn stencil_sizes_and_bounds() {
        assert_eq!(stencil(2, 2).len(), 16);
        assert_eq!(stencil(2, 3).len(), 32);
        assert!((stencil_bound(2, 2) - (1.0 / 13.2825f64.to_radians().cos() - 1.0)).abs() < 1e-5);
        assert!((stencil_bound(2, 3) - 0.0131).abs() < 1e-3);
    }

    #[test]
    fn flat_distances() {
        let g = grid_for(NormSpec::euclidean(2), 2.0, 80);
        let d = g.distance_field(&v2(0.0, 0.0), Direction::Forward).unwrap();
        assert_eq!(d.values[d.source_node], 0.0);
        assert!((d.value_at(&v2(1.0, 0.0)) - 1.0).abs() < 1e-12);
        let r = grid_for(NormSpec::randers(Matrix::identity(2, 2), v2(0.5, 0.0)).unwrap(), 2.0, 80);
        let fwd = r.distance_field(&v2(0.0, 0.0), Direction::Forward).unwrap();
        let bwd = r.distance_field(&v2(0.0, 0.0), Direction::Backward).unwrap();
        assert!((fwd.value_at(&v2(1.0, 0.0)) - 1.5).abs() < 1e-12);
        assert!((bwd.value_at(&v2(1.0, 0.0)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn randers_ball_membership() {
        let r = grid_for(NormSpec::randers(Matrix::identity(2, 2), v2(0.5, 0.0)).unwrap(), 2.0, 80);
        let ball = r.ball(&v2(0.0, 0.0), 1.0, Direction::Forward).unwrap();
        let has = |x: f64| ball.contains(&r.geometry.nearest_node(&v2(x, 0.0)));
        assert!(has(0.6) && !has(0.7));
        let tiny = r.ball(&v2(0.0, 0.0), 1e-3, Direction::Forward).unwrap();
        assert_eq!(tiny, vec![r.geometry.nearest_node(&v2(0.0, 0.0))]);
    }

    #[test]
    fn chrono_examples() {
        let g = grid_for(NormSpec::euclidean(2), 2.0, 80);
        let c = chrono_related(&g, &Event::new(0.0, vec![0.0, 0.0]), &Event::new(2.0, vec![1.0, 0.0])).unwrap();
        assert!(c.chronological && (c.margin - 1.0).abs() < 1e-12);
        let c = chrono_related(&g, &Event::new(0.0, vec![0.0, 0.0]), &Event::new(1.0, vec![1.0, 0.0])).unwrap();
        assert!(!c.chronological && c.causal_assuming_simplicity);
    }

    #[test]
    fn hyperbolicity_examples() {
        let g = grid_for(NormSpec::euclidean(2), 10.0, 100);
        let o = v2(0.0, 0.0);
        assert!(global_hyperbolicity_probe(&g, &o, &o, 1.0, 1.0).unwrap().compact_proxy);
        assert!(global_hyperbolicity_probe(&g, &o, &o, 15.0, 15.0).unwrap().boundary_contact);
        let chart = Chart::square(2, 2.0).with_hole(Hole::Disk { center: vec![0.0, 0.0], radius: 0.06 });
        let field = FinslerField::uniform(chart, NormSpec::euclidean(2), 1.0).unwrap();
        let g = Grid::new(&field, GridOptions::with_resolution(80)).unwrap();
        let r = global_hyperbolicity_probe(&g, &v2(-1.0, 0.0), &v2(1.0, 0.0), 1.2, 1.2).unwrap();
        assert!(r.boundary_contact);
    }

    #[test]
    fn cauchy_graph_examples() {
        let st = StaticSpacetime::new(FinslerField::uniform(Chart::square(2, 2.0), NormSpec::euclidean(2), 1.0).unwrap());
        let pts = vec![v2(0.0, 0.0), v2(1.0, -1.0)];
        let r = cauchy_graph_check(&st, &ScalarField::affine(0.0, &[0.9, 0.0]), &pts, 1.0, 720).unwrap();
        assert!(r.future_spacelike && r.spacelike);
        let r = cauchy_graph_check(&st, &ScalarField::affine(0.0, &[1.1, 0.0]), &pts, 1.0, 720).unwrap();
        assert!(!r.future_spacelike);
        assert_eq!(r.worst_future.unwrap().v, vec![1.0, 0.0]);
    }
}
