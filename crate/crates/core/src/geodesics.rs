//! Spacetime and base geodesics, the Fermat lift, two-point shooting and the
//! timelike-variation construction.
//!
//! Spacetime geodesics are integrated with classical RK4 on `(t, x, τ, q)`,
//! `q = ∂F²/∂v(σ̇)`:
//!
//! ```text
//! ṫ = τ,   ẋ = v(q),   τ̇ = −τ (∇Λ·v)/Λ,   q̇ = ∂ₓF²(v) − ∇Λ τ²
//! ```
//!
//! `k = Λτ` is a first integral; it is monitored rather than imposed, so its
//! drift measures the integration error.

use std::io::Write;

use serde::Serialize;

use crate::base::FinslerField;
use crate::error::{Error, Result};
use crate::minkowski::{self, NormSpec};
use crate::sampling;
use crate::spacetime::{Event, StaticSpacetime, Tangent};
use crate::Vector;

pub const DEFAULT_STEP: f64 = 1e-3;
/// Step used by the shooting method's trial integrations.
pub const SHOOTING_STEP: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub s: f64,
    pub t: f64,
    pub x: Vector,
    pub tau: f64,
    pub v: Vector,
    /// `L(γ̇)` for spacetime curves; `F(σ̇)` for base curves.
    pub l: f64,
    /// `Λ(σ)θ̇` for spacetime curves; zero for base curves.
    pub k: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrajectoryKind {
    Spacetime,
    Base,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub samples: Vec<Sample>,
    pub exited_chart: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn positions(&self) -> Vec<Vector> {
        self.samples.iter().map(|p| p.x.clone()).collect()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has samples")
    }

    /// Parameter span `s_last − s_first`.
    pub fn span(&self) -> f64 {
        self.last().s - self.samples[0].s
    }

    /// `max |L − L₀|`.
    pub fn l_drift(&self) -> f64 {
        let l0 = self.samples[0].l;
        self.samples.iter().map(|p| (p.l - l0).abs()).fold(0.0, f64::max)
    }

    /// `max |k − k₀|`.
    pub fn k_drift(&self) -> f64 {
        let k0 = self.samples[0].k;
        self.samples.iter().map(|p| (p.k - k0).abs()).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.samples.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// Future-pointing causal polyline through `vertices`, sampled at the
    /// midpoints of `per_segment` equal cells of every segment (so no sample
    /// sits on a corner). Segment `j` is parametrized by `s ∈ [j, j+1]`.
    pub fn polyline(st: &StaticSpacetime, vertices: &[Event], per_segment: usize) -> Result<Trajectory> {
        if vertices.len() < 2 || per_segment == 0 {
            return Err(Error::InvalidInput("polyline needs two vertices and one sample per segment".into()));
        }
        let mut samples = Vec::new();
        for (j, pair) in vertices.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            let w = Tangent { tau: b.t - a.t, v: &b.x - &a.x };
            for i in 0..per_segment {
                let f = (i as f64 + 0.5) / per_segment as f64;
                let x = &a.x + &w.v * f;
                st.chart().require(&x)?;
                samples.push(Sample {
                    s: j as f64 + f,
                    t: a.t + w.tau * f,
                    l: st.l_unchecked(&x, &w),
                    k: st.lambda_at(&x) * w.tau,
                    x,
                    tau: w.tau,
                    v: w.v.clone(),
                    residual: 0.0,
                });
            }
        }
        let mut traj = Trajectory { kind: TrajectoryKind::Spacetime, samples, exited_chart: false };
        let res = el_residuals(st, &traj);
        for (p, r) in traj.samples.iter_mut().zip(res) {
            p.residual = r;
        }
        Ok(traj)
    }

    /// CSV with header `s,t,x1..xn,tau,v1..vn,L,k,residual`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.samples.first().map_or(0, |p| p.x.len());
        let mut header = vec!["s".to_string(), "t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.push("tau".into());
        header.extend((1..=n).map(|i| format!("v{i}")));
        header.extend(["L".to_string(), "k".to_string(), "residual".to_string()]);
        writeln!(out, "{}", header.join(","))?;
        for p in &self.samples {
            let mut row = vec![p.s, p.t];
            row.extend(p.x.iter());
            row.push(p.tau);
            row.extend(p.v.iter());
            row.extend([p.l, p.k, p.residual]);
            writeln!(out, "{}", crate::io::csv_row(&row))?;
        }
        Ok(())
    }
}

fn require_finsler(field: &FinslerField) -> Result<()> {
    if field.norm.is_finsler() {
        Ok(())
    } else {
        Err(Error::NotFinslerNorm { operation: "geodesic integration" })
    }
}

fn velocity(spec: &NormSpec, q: &Vector, hint: &Vector) -> Result<Vector> {
    spec.invert_momentum(q, Some(hint))
}

fn rk4_step(
    y: &Vector,
    h: f64,
    hint: &mut Vector,
    rhs: &impl Fn(&Vector, &mut Vector) -> Result<Vector>,
) -> Result<Vector> {
    let k1 = rhs(y, hint)?;
    let k2 = rhs(&(y + &k1 * (h / 2.0)), hint)?;
    let k3 = rhs(&(y + &k2 * (h / 2.0)), hint)?;
    let k4 = rhs(&(y + &k3 * h), hint)?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

fn step_count(s_max: f64, step: f64) -> Result<(usize, f64)> {
    if !(s_max > 0.0 && step > 0.0) {
        return Err(Error::InvalidInput("s_max and step must be positive".into()));
    }
    let n = ((s_max / step).round() as usize).max(1);
    Ok((n, s_max / n as f64))
}

/// Integrates the spacetime geodesic from `start` with initial tangent `w0` (static mode only).
pub fn integrate_spacetime_geodesic(
    st: &StaticSpacetime,
    start: &Event,
    w0: &Tangent,
    s_max: f64,
    step: f64,
) -> Result<Trajectory> {
    if st.is_sstk() {
        return Err(Error::WrongMode { required: "static" });
    }
    require_finsler(&st.base)?;
    let n = st.dimension();
    if start.x.len() != n || w0.v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w0.v.len() });
    }
    st.chart().require(&start.x)?;
    let static_line = minkowski::is_zero(&w0.v);
    if static_line {
        if w0.tau == 0.0 {
            return Err(Error::InvalidInput("initial tangent must be non-zero".into()));
        }
        let grad = st.base.lambda.gradient(&start.x);
        if grad.norm() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "a static line requires dΛ(x₀) = 0, found |dΛ| = {:e}",
                grad.norm()
            )));
        }
    }
    let (steps, h) = step_count(s_max, step)?;
    let v0_norm = w0.v.norm();

    let mut y = Vector::zeros(2 * n + 2);
    y[0] = start.t;
    y.rows_mut(1, n).copy_from(&start.x);
    y[n + 1] = w0.tau;
    y.rows_mut(n + 2, n).copy_from(&st.base.norm_at(&start.x).momentum_or_zero(&w0.v));

    let rhs = |y: &Vector, hint: &mut Vector| -> Result<Vector> {
        let x = y.rows(1, n).into_owned();
        let tau = y[n + 1];
        let q = y.rows(n + 2, n).into_owned();
        let spec = st.base.norm_at(&x);
        let v = velocity(&spec, &q, hint)?;
        let lam = st.lambda_at(&x);
        let grad = st.base.lambda.gradient(&x);
        let mut d = Vector::zeros(2 * n + 2);
        d[0] = tau;
        d.rows_mut(1, n).copy_from(&v);
        d[n + 1] = -tau * grad.dot(&v) / lam;
        let dq = st.base.norm.f2_x_gradient(&x, &v) - grad * (tau * tau);
        d.rows_mut(n + 2, n).copy_from(&dq);
        *hint = v;
        Ok(d)
    };

    let mut hint = w0.v.clone();
    let mut samples = Vec::with_capacity(steps + 1);
    let mut exited = false;
    let sample_of = |s: f64, y: &Vector, v: Vector| -> Sample {
        let x = y.rows(1, n).into_owned();
        let w = Tangent { tau: y[n + 1], v };
        Sample {
            s,
            t: y[0],
            l: st.l_unchecked(&x, &w),
            k: st.lambda_at(&x) * w.tau,
            x,
            tau: w.tau,
            v: w.v,
            residual: 0.0,
        }
    };
    samples.push(sample_of(0.0, &y, w0.v.clone()));
    for i in 1..=steps {
        let next = rk4_step(&y, h, &mut hint, &rhs)?;
        let x = next.rows(1, n).into_owned();
        if !st.chart().contains(&x) {
            exited = true;
            break;
        }
        let q = next.rows(n + 2, n).into_owned();
        let v = velocity(&st.base.norm_at(&x), &q, &hint)?;
        if !static_line && v.norm() <= 1e-12 * v0_norm {
            return Err(Error::ZeroVelocityBreakdown { s: i as f64 * h });
        }
        hint = v.clone();
        y = next;
        samples.push(sample_of(i as f64 * h, &y, v));
    }
    let mut traj = Trajectory { kind: TrajectoryKind::Spacetime, samples, exited_chart: exited };
    let res = el_residuals(st, &traj);
    for (p, r) in traj.samples.iter_mut().zip(res) {
        p.residual = r;
    }
    Ok(traj)
}

/// Integrates the Euler–Lagrange equations of `F²` on the base: `q̇ = ∂ₓF²`, `ẋ = v(q)`.
pub fn integrate_base_geodesic(
    field: &FinslerField,
    start_x: &Vector,
    v0: &Vector,
    s_max: f64,
    step: f64,
) -> Result<Trajectory> {
    require_finsler(field)?;
    let n = field.dimension();
    if start_x.len() != n || v0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v0.len() });
    }
    field.chart.require(start_x)?;
    if minkowski::is_zero(v0) {
        return Err(Error::ZeroVector);
    }
    let (steps, h) = step_count(s_max, step)?;
    let v0_norm = v0.norm();
    let mut y = Vector::zeros(2 * n);
    y.rows_mut(0, n).copy_from(start_x);
    y.rows_mut(n, n).copy_from(&field.norm_at(start_x).momentum(v0)?);

    let rhs = |y: &Vector, hint: &mut Vector| -> Result<Vector> {
        let x = y.rows(0, n).into_owned();
        let q = y.rows(n, n).into_owned();
        let v = velocity(&field.norm_at(&x), &q, hint)?;
        let mut d = Vector::zeros(2 * n);
        d.rows_mut(0, n).copy_from(&v);
        d.rows_mut(n, n).copy_from(&field.norm.f2_x_gradient(&x, &v));
        *hint = v;
        Ok(d)
    };
    let sample_of = |s: f64, x: Vector, v: Vector| Sample {
        s,
        t: 0.0,
        l: field.eval(&x, &v),
        k: 0.0,
        x,
        tau: 0.0,
        v,
        residual: 0.0,
    };
    let mut hint = v0.clone();
    let mut samples = vec![sample_of(0.0, start_x.clone(), v0.clone())];
    let mut exited = false;
    for i in 1..=steps {
        let next = rk4_step(&y, h, &mut hint, &rhs)?;
        let x = next.rows(0, n).into_owned();
        if !field.chart.contains(&x) {
            exited = true;
            break;
        }
        let v = velocity(&field.norm_at(&x), &next.rows(n, n).into_owned(), &hint)?;
        if v.norm() <= 1e-12 * v0_norm {
            return Err(Error::ZeroVelocityBreakdown { s: i as f64 * h });
        }
        hint = v.clone();
        y = next;
        samples.push(sample_of(i as f64 * h, x, v));
    }
    let mut traj = Trajectory { kind: TrajectoryKind::Base, samples, exited_chart: exited };
    let res = base_el_residuals(field, &traj);
    for (p, r) in traj.samples.iter_mut().zip(res) {
        p.residual = r;
    }
    Ok(traj)
}

/// Derivative at node `i` of the quadratic through three neighbouring samples.
fn three_point_derivative(s: &[f64], f: &[Vector], i: usize) -> Vector {
    let m = s.len();
    let j = i.clamp(1, m - 2);
    let (x0, x1, x2) = (s[j - 1], s[j], s[j + 1]);
    let x = s[i];
    let c0 = (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
    let c1 = (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
    let c2 = (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    &f[j - 1] * c0 + &f[j] * c1 + &f[j + 1] * c2
}

/// Per-sample residual of the spacetime geodesic equations along sampled data:
/// `max(|d/ds q − ∂ₓF² + ∇Λ τ²|_∞, |d/ds(Λτ)|)`, derivatives by three-point differences.
pub fn el_residuals(st: &StaticSpacetime, traj: &Trajectory) -> Vec<f64> {
    let m = traj.samples.len();
    if m < 3 {
        return vec![0.0; m];
    }
    let s: Vec<f64> = traj.samples.iter().map(|p| p.s).collect();
    let q: Vec<Vector> =
        traj.samples.iter().map(|p| st.base.norm_at(&p.x).momentum_or_zero(&p.v)).collect();
    let k: Vec<Vector> =
        traj.samples.iter().map(|p| Vector::from_element(1, st.lambda_at(&p.x) * p.tau)).collect();
    (0..m)
        .map(|i| {
            let p = &traj.samples[i];
            let rhs = st.base.norm.f2_x_gradient(&p.x, &p.v) - st.base.lambda.gradient(&p.x) * (p.tau * p.tau);
            let rm = (three_point_derivative(&s, &q, i) - rhs).amax();
            let rt = three_point_derivative(&s, &k, i)[0].abs();
            rm.max(rt)
        })
        .collect()
}

/// Per-sample residual `|d/ds q − ∂ₓF²|_∞` of the base Euler–Lagrange equations.
pub fn base_el_residuals(field: &FinslerField, traj: &Trajectory) -> Vec<f64> {
    let m = traj.samples.len();
    if m < 3 {
        return vec![0.0; m];
    }
    let s: Vec<f64> = traj.samples.iter().map(|p| p.s).collect();
    let q: Vec<Vector> = traj.samples.iter().map(|p| field.norm_at(&p.x).momentum_or_zero(&p.v)).collect();
    (0..m)
        .map(|i| {
            let p = &traj.samples[i];
            (three_point_derivative(&s, &q, i) - field.norm.f2_x_gradient(&p.x, &p.v)).amax()
        })
        .collect()
}

/// Lifts an optical geodesic `σ` to the lightlike curve `(θ, σ)`,
/// `θ = t₀ + ∫ F̃(σ̇)`, reparametrized so that `Λθ̇ ≡ C = √Λ(σ₀)·F(σ̇₀)`
/// (which makes the lift an affinely parametrized spacetime geodesic).
pub fn fermat_lift(st: &StaticSpacetime, base_traj: &Trajectory, t0: f64) -> Result<Trajectory> {
    if st.is_sstk() {
        return Err(Error::WrongMode { required: "static" });
    }
    let samples = &base_traj.samples;
    if samples.len() < 2 {
        return Err(Error::InvalidInput("fermat_lift needs at least two samples".into()));
    }
    let optical = st.base.optical();
    let speed: Vec<f64> = samples.iter().map(|p| optical.eval(&p.x, &p.v)).collect();
    if speed.iter().any(|&f| !(f > 0.0)) {
        return Err(Error::ZeroVelocityBreakdown { s: samples[0].s });
    }
    let lam: Vec<f64> = samples.iter().map(|p| st.lambda_at(&p.x)).collect();
    let c = lam[0].sqrt() * st.base.eval(&samples[0].x, &samples[0].v);
    let mut theta = t0;
    let mut u = 0.0;
    let mut out = Vec::with_capacity(samples.len());
    for i in 0..samples.len() {
        if i > 0 {
            let ds = samples[i].s - samples[i - 1].s;
            theta += 0.5 * ds * (speed[i] + speed[i - 1]);
            u += 0.5 * ds * (lam[i] * speed[i] + lam[i - 1] * speed[i - 1]) / c;
        }
        let p = &samples[i];
        let w = Tangent { tau: c / lam[i], v: &p.v * (c / (lam[i] * speed[i])) };
        out.push(Sample {
            s: u,
            t: theta,
            x: p.x.clone(),
            l: st.l_unchecked(&p.x, &w),
            k: lam[i] * w.tau,
            tau: w.tau,
            v: w.v,
            residual: 0.0,
        });
    }
    let mut traj = Trajectory { kind: TrajectoryKind::Spacetime, samples: out, exited_chart: base_traj.exited_chart };
    let res = el_residuals(st, &traj);
    for (p, r) in traj.samples.iter_mut().zip(res) {
        p.residual = r;
    }
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingProblem {
    pub start: Event,
    pub target_x: Vector,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub step: f64,
}

impl ShootingProblem {
    pub fn new(start: Event, target_x: Vector) -> Self {
        ShootingProblem { start, target_x, tolerance: 1e-6, max_iterations: 100, step: SHOOTING_STEP }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    /// Optical geodesic with unit `F̃` speed ending at the target.
    pub trajectory: Trajectory,
    pub length: f64,
    pub endpoint_error: f64,
}

/// Connects `problem.start.x` to `problem.target_x` by an optical geodesic of `st`.
pub fn shoot_to_target(st: &StaticSpacetime, problem: &ShootingProblem) -> Result<Option<Shot>> {
    if st.is_sstk() {
        return Err(Error::WrongMode { required: "static" });
    }
    shoot_base(&st.base.optical(), problem)
}

struct Trial {
    miss: f64,
    distance: f64,
    s_closest: f64,
}

/// Closest approach of the unit-speed geodesic in direction `u` to the target,
/// located on the cubic Hermite interpolant of the samples (positions and
/// velocities), which is accurate to `O(step⁴)`.
fn trial(field: &FinslerField, x0: &Vector, target: &Vector, u: &Vector, budget: f64, step: f64) -> Option<Trial> {
    let v0 = u / field.eval(x0, u);
    let traj = integrate_base_geodesic(field, x0, &v0, budget, step).ok()?;
    let samples = &traj.samples;
    let (i, _) = samples
        .iter()
        .enumerate()
        .map(|(i, p)| (i, (target - &p.x).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let mut best: Option<(f64, Vector, Vector, f64)> = None;
    for seg in [i.checked_sub(1), (i + 1 < samples.len()).then_some(i)].into_iter().flatten() {
        let (a, b) = (&samples[seg], &samples[seg + 1]);
        let h = b.s - a.s;
        let at = |th: f64| {
            let (t2, t3) = (th * th, th * th * th);
            let p = &a.x * (2.0 * t3 - 3.0 * t2 + 1.0)
                + &a.v * (h * (t3 - 2.0 * t2 + th))
                + &b.x * (-2.0 * t3 + 3.0 * t2)
                + &b.v * (h * (t3 - t2));
            let dp = &a.x * ((6.0 * t2 - 6.0 * th) / h)
                + &a.v * (3.0 * t2 - 4.0 * th + 1.0)
                + &b.x * ((-6.0 * t2 + 6.0 * th) / h)
                + &b.v * (3.0 * t2 - 2.0 * th);
            (p, dp)
        };
        let (th, neg) = sampling::golden_max(|th| -(target - at(th).0).norm(), 0.0, 1.0, 80);
        if best.as_ref().is_none_or(|c| -neg < c.3) {
            let (p, dp) = at(th);
            best = Some((a.s + th * h, p, dp, -neg));
        }
    }
    let (s_closest, p, dp, distance) = match best {
        Some(b) => b,
        None => {
            let p = &samples[i];
            (p.s, p.x.clone(), p.v.clone(), (target - &p.x).norm())
        }
    };
    let d = target - &p;
    let miss = if p.len() == 2 { (dp[0] * d[1] - dp[1] * d[0]) / dp.norm() } else { distance };
    Some(Trial { miss, distance, s_closest })
}

/// Shooting on an arbitrary field: 16 directions and bisection on the signed
/// miss in 2D, Nelder–Mead on the direction otherwise. Keeps the shortest
/// connecting geodesic.
pub fn shoot_base(field: &FinslerField, problem: &ShootingProblem) -> Result<Option<Shot>> {
    let x0 = &problem.start.x;
    let target = &problem.target_x;
    let n = field.dimension();
    field.chart.require(x0)?;
    field.chart.require(target)?;
    require_finsler(field)?;
    if (target - x0).norm() <= problem.tolerance {
        return Ok(None);
    }
    let chord = (0..200)
        .map(|i| {
            let a = x0 + (target - x0) * (i as f64 / 200.0);
            let b = x0 + (target - x0) * ((i + 1) as f64 / 200.0);
            field.eval(&((&a + &b) * 0.5), &(&b - &a))
        })
        .sum::<f64>();
    let budget = 3.0 * chord;
    let step = problem.step;
    let mut candidates: Vec<Vector> = Vec::new();

    if n == 2 {
        let k = 16;
        let angle = |i: f64| {
            let d = target - x0;
            d[1].atan2(d[0]) + std::f64::consts::TAU * i / k as f64
        };
        let trials: Vec<Option<Trial>> =
            (0..k).map(|i| trial(field, x0, target, &sampling::planar(angle(i as f64)), budget, step)).collect();
        for i in 0..k {
            let j = (i + 1) % k;
            let (Some(a), Some(b)) = (&trials[i], &trials[j]) else { continue };
            if a.distance <= problem.tolerance {
                candidates.push(sampling::planar(angle(i as f64)));
            }
            if a.miss.signum() == b.miss.signum() {
                continue;
            }
            let (mut lo, mut hi) = (angle(i as f64), angle(i as f64 + 1.0));
            let mut miss_lo = a.miss;
            for _ in 0..problem.max_iterations {
                let mid = 0.5 * (lo + hi);
                let Some(t) = trial(field, x0, target, &sampling::planar(mid), budget, step) else { break };
                if t.distance <= problem.tolerance * 1e-3 || hi - lo < 1e-15 {
                    lo = mid;
                    break;
                }
                if t.miss.signum() == miss_lo.signum() {
                    lo = mid;
                    miss_lo = t.miss;
                } else {
                    hi = mid;
                }
            }
            candidates.push(sampling::planar(lo));
        }
    } else {
        let dirs = sampling::unit_directions(n, 16 * n);
        let scored: Vec<(f64, &Vector)> = dirs
            .iter()
            .filter_map(|u| trial(field, x0, target, u, budget, step).map(|t| (t.distance, u)))
            .collect();
        if let Some((_, best)) = scored.iter().min_by(|a, b| a.0.total_cmp(&b.0)) {
            let objective = |u: &Vector| -> f64 {
                let norm = u.norm();
                if norm == 0.0 {
                    return f64::INFINITY;
                }
                trial(field, x0, target, &(u / norm), budget, step).map_or(f64::INFINITY, |t| t.distance)
            };
            let u = nelder_mead(objective, (*best).clone(), 0.1, problem.max_iterations * 4, problem.tolerance * 1e-3);
            candidates.push(u.normalize());
        }
    }

    let mut best: Option<Shot> = None;
    for u in candidates {
        let Some(t) = trial(field, x0, target, &u, budget, step) else { continue };
        if t.distance > problem.tolerance || !(t.s_closest > 0.0) {
            continue;
        }
        let v0 = &u / field.eval(x0, &u);
        let steps = (t.s_closest / step).ceil().max(1.0);
        let Ok(traj) = integrate_base_geodesic(field, x0, &v0, t.s_closest, t.s_closest / steps) else { continue };
        if traj.exited_chart {
            continue;
        }
        let endpoint_error = (&traj.last().x - target).norm();
        if endpoint_error > problem.tolerance {
            continue;
        }
        let length = t.s_closest;
        if best.as_ref().is_none_or(|b| length < b.length) {
            best = Some(Shot { trajectory: traj, length, endpoint_error });
        }
    }
    Ok(best)
}

/// Downhill simplex minimization of `f` starting from `x0` with initial edge `scale`.
pub fn nelder_mead(f: impl Fn(&Vector) -> f64, x0: Vector, scale: f64, max_evals: usize, ftol: f64) -> Vector {
    let n = x0.len();
    let mut simplex: Vec<(Vector, f64)> = (0..=n)
        .map(|i| {
            let mut x = x0.clone();
            if i > 0 {
                x[i - 1] += scale;
            }
            let fx = f(&x);
            (x, fx)
        })
        .collect();
    let mut evals = n + 1;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 <= ftol || (simplex[n].1 - simplex[0].1).abs() <= 1e-15 {
            break;
        }
        let centroid = simplex[..n].iter().fold(Vector::zeros(n), |acc, p| acc + &p.0) / n as f64;
        let worst = simplex[n].clone();
        let reflect = &centroid + (&centroid - &worst.0);
        let fr = f(&reflect);
        evals += 1;
        if fr < simplex[0].1 {
            let expand = &centroid + (&reflect - &centroid) * 2.0;
            let fe = f(&expand);
            evals += 1;
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract = &centroid + (&worst.0 - &centroid) * 0.5;
            let fc = f(&contract);
            evals += 1;
            if fc < worst.1 {
                simplex[n] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    p.0 = &best + (&p.0 - &best) * 0.5;
                    p.1 = f(&p.0);
                    evals += 1;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0).0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationReport {
    pub alpha: f64,
    /// Mean over samples of `∂/∂w L(ψ̇_w)` at `w = 0` (central differences in `w`).
    pub first_variation: f64,
    /// `max |∂/∂w L(ψ̇_w) + α|` over the samples.
    pub pointwise_deviation: f64,
    /// `dE/dw` of `E = ½∫L`, which should equal `−α(b − a)/2`.
    pub energy_derivative: f64,
    /// Component and sine mode of the chosen `Z`.
    pub z_component: usize,
    pub z_mode: usize,
    pub y_end: f64,
}

/// Builds the variation `ψ_w = (θ + wY, σ + wZ)` along a future-pointing causal,
/// non-geodesic curve with `∂/∂w L(ψ̇_w)|₀ = −α < 0`.
///
/// The curve is first reparametrized on `[0, 1]` with `Λθ̇ ≡ C`. `Z` is the
/// sine bump `±eᵢ sin(jπu)` with the largest Euler–Lagrange pairing
/// `∫h`, `h = q·Ż + (∂ₓF² − ∇Λθ̇²)·Z`, signed so the pairing is negative;
/// then `α = −∫h` and `Y = (∫₀ᵘ h + αu)/(2C)` vanishes at both ends.
pub fn timelike_variation_probe(st: &StaticSpacetime, curve: &Trajectory) -> Result<VariationReport> {
    if st.is_sstk() {
        return Err(Error::WrongMode { required: "static" });
    }
    let samples = &curve.samples;
    let m = samples.len();
    if m < 3 {
        return Err(Error::InvalidInput("variation probe needs at least three samples".into()));
    }
    let n = st.dimension();
    let mut timelike = false;
    for p in samples {
        let w = Tangent { tau: p.tau, v: p.v.clone() };
        let class = st.classify(&p.x, &w)?;
        if !(w.tau > 0.0 && (class.is_causal() || st.l_unchecked(&p.x, &w) <= 0.0)) {
            return Err(Error::NotCausal { which: "curve" });
        }
        timelike |= class.kind == crate::spacetime::CausalKind::Timelike;
    }

    let lam: Vec<f64> = samples.iter().map(|p| st.lambda_at(&p.x)).collect();
    let mut u = vec![0.0; m];
    for i in 1..m {
        let ds = samples[i].s - samples[i - 1].s;
        u[i] = u[i - 1] + 0.5 * ds * (lam[i] * samples[i].tau + lam[i - 1] * samples[i - 1].tau);
    }
    let total = u[m - 1];
    let c = total;
    for ui in u.iter_mut() {
        *ui /= total;
    }
    let theta_dot: Vec<f64> = lam.iter().map(|l| c / l).collect();
    let sigma_dot: Vec<Vector> =
        samples.iter().zip(&lam).map(|(p, l)| &p.v * (c / (l * p.tau))).collect();
    let q: Vec<Vector> =
        samples.iter().zip(&sigma_dot).map(|(p, v)| st.base.norm_at(&p.x).momentum_or_zero(v)).collect();
    let force: Vec<Vector> = samples
        .iter()
        .zip(&sigma_dot)
        .zip(&theta_dot)
        .map(|((p, v), td)| st.base.norm.f2_x_gradient(&p.x, v) - st.base.lambda.gradient(&p.x) * (td * td))
        .collect();

    let (a, b) = (u[0], u[m - 1]);
    let trapz = |f: &dyn Fn(usize) -> f64| -> f64 { (1..m).map(|i| 0.5 * (u[i] - u[i - 1]) * (f(i) + f(i - 1))).sum() };
    let bump = |j: usize, ui: f64| -> (f64, f64) {
        let k = j as f64 * std::f64::consts::PI / (b - a);
        ((k * (ui - a)).sin(), k * (k * (ui - a)).cos())
    };
    let h_of = |comp: usize, j: usize, sign: f64, i: usize| -> f64 {
        let (z, dz) = bump(j, u[i]);
        sign * (q[i][comp] * dz + force[i][comp] * z)
    };

    let mut best = (0usize, 1usize, 0.0f64);
    for comp in 0..n {
        for j in 1..=8 {
            let pairing = trapz(&|i| h_of(comp, j, 1.0, i));
            if pairing.abs() > best.2.abs() {
                best = (comp, j, pairing);
            }
        }
    }
    let scale = q.iter().map(|qi| qi.norm()).fold(0.0, f64::max) + force.iter().map(|f| f.norm()).fold(0.0, f64::max);
    if best.2.abs() <= 1e-8 * scale.max(1.0) {
        return Err(Error::IsGeodesic { timelike });
    }
    let (comp, j, pairing) = best;
    let sign = -pairing.signum();
    let h: Vec<f64> = (0..m).map(|i| h_of(comp, j, sign, i)).collect();
    let alpha = -trapz(&|i| h[i]) / (b - a);
    let y_dot: Vec<f64> = h.iter().map(|hi| (hi + alpha) / (2.0 * c)).collect();
    let y_end = trapz(&|i| y_dot[i]);

    let l_w = |w: f64, i: usize| -> f64 {
        let (z, dz) = bump(j, u[i]);
        let mut x = samples[i].x.clone();
        x[comp] += w * sign * z;
        let mut v = sigma_dot[i].clone();
        v[comp] += w * sign * dz;
        let tau = theta_dot[i] + w * y_dot[i];
        st.l_unchecked(&x, &Tangent { tau, v })
    };
    let eps = 1e-6;
    let pointwise: Vec<f64> = (0..m).map(|i| (l_w(eps, i) - l_w(-eps, i)) / (2.0 * eps)).collect();
    let first_variation = pointwise.iter().sum::<f64>() / m as f64;
    let pointwise_deviation = pointwise.iter().map(|d| (d + alpha).abs()).fold(0.0, f64::max);
    let energy = |w: f64| 0.5 * trapz(&|i| l_w(w, i));
    let energy_derivative = (energy(eps) - energy(-eps)) / (2.0 * eps);

    Ok(VariationReport {
        alpha,
        first_variation,
        pointwise_deviation,
        energy_derivative,
        z_component: comp,
        z_mode: j,
        y_end,
    })
}
