//! Finsler structures over a rectangular chart: point-dependent norms, the
//! conformal factor `Λ`, the optical metric `F/√Λ`, curve length and the
//! subquadratic-growth probe.

use serde::{Deserialize, Serialize};

use crate::causality::{Direction, Grid, GridOptions};
use crate::error::{Error, Result};
use crate::minkowski::{self, NormSpec};
use crate::numdiff;
use crate::{Matrix, Vector};

/// Samples per axis used when validating fields at construction (2D: 41×41 plus corners).
const VALIDATION_SAMPLES_2D: usize = 41;

/// Relative slack allowed by [`subquadratic_probe`].
pub const SUBQUADRATIC_SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Hole {
    Disk { center: Vec<f64>, radius: f64 },
}

impl Hole {
    pub fn contains(&self, x: &Vector) -> bool {
        match self {
            Hole::Disk { center, radius } => {
                let d2: f64 = center.iter().zip(x.iter()).map(|(c, xi)| (xi - c).powi(2)).sum();
                d2 < radius * radius
            }
        }
    }
}

/// A single rectangular chart `Π[lo_i, hi_i]`, optionally punctured by holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub lo: Vector,
    pub hi: Vector,
    pub margin: f64,
    pub holes: Vec<Hole>,
}

impl Chart {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, margin: f64) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(Error::InvalidInput("chart requires lo_i < hi_i on every axis".into()));
        }
        let min_extent = lo.iter().zip(&hi).map(|(l, h)| h - l).fold(f64::INFINITY, f64::min);
        if !(margin > 0.0 && margin < min_extent / 4.0) {
            return Err(Error::InvalidInput(format!(
                "chart boundary margin {margin} must lie in (0, {})",
                min_extent / 4.0
            )));
        }
        Ok(Chart { lo: Vector::from_vec(lo), hi: Vector::from_vec(hi), margin, holes: Vec::new() })
    }

    /// Square chart `[-half, half]ⁿ` with a margin of 1% of the extent.
    pub fn square(n: usize, half: f64) -> Self {
        Chart::new(vec![-half; n], vec![half; n], half * 0.02).expect("valid square chart")
    }

    pub fn with_hole(mut self, hole: Hole) -> Self {
        self.holes.push(hole);
        self
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn in_box(&self, x: &Vector) -> bool {
        x.len() == self.dimension()
            && x.iter().zip(self.lo.iter().zip(self.hi.iter())).all(|(xi, (l, h))| *xi >= *l && *xi <= *h)
    }

    pub fn in_hole(&self, x: &Vector) -> bool {
        self.holes.iter().any(|h| h.contains(x))
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.in_box(x) && !self.in_hole(x)
    }

    pub fn require(&self, x: &Vector) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideChart { point: x.iter().copied().collect() })
        }
    }

    /// Distance to the outer faces of the box.
    pub fn boundary_distance(&self, x: &Vector) -> f64 {
        x.iter()
            .zip(self.lo.iter().zip(self.hi.iter()))
            .map(|(xi, (l, h))| (xi - l).min(h - xi))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn diameter(&self) -> f64 {
        (&self.hi - &self.lo).norm()
    }

    /// Regular lattice with `per_axis` points on each axis (corners included),
    /// skipping points inside holes.
    pub fn lattice(&self, per_axis: usize) -> Vec<Vector> {
        let n = self.dimension();
        let per_axis = per_axis.max(2);
        let total = per_axis.pow(n as u32);
        (0..total)
            .filter_map(|mut idx| {
                let x = Vector::from_fn(n, |i, _| {
                    let k = idx % per_axis;
                    idx /= per_axis;
                    self.lo[i] + (self.hi[i] - self.lo[i]) * k as f64 / (per_axis - 1) as f64
                });
                (!self.in_hole(&x)).then_some(x)
            })
            .collect()
    }

    pub(crate) fn validation_points(&self) -> Vec<Vector> {
        let per_axis = match self.dimension() {
            1 => 401,
            2 => VALIDATION_SAMPLES_2D,
            3 => 13,
            _ => 5,
        };
        self.lattice(per_axis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    pub powers: Vec<u32>,
}

/// Scalar functions on the chart (used for `Λ`, norm coefficients, `ω` components
/// and candidate time functions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScalarField {
    Constant { value: f64 },
    /// Sum of monomials of total degree at most 4.
    Polynomial { terms: Vec<Monomial> },
    /// `a·exp(k·|x|²)`.
    RadialExp { a: f64, k: f64 },
    /// Multilinear interpolation of `values` on a regular table over `[lo, hi]`;
    /// axis 0 varies fastest. Points outside the table are clamped.
    GridTable { lo: Vec<f64>, hi: Vec<f64>, shape: Vec<usize>, values: Vec<f64> },
}

impl ScalarField {
    pub fn constant(value: f64) -> Self {
        ScalarField::Constant { value }
    }

    /// `c₀ + Σ cᵢ xᵢ` in `n` dimensions.
    pub fn affine(c0: f64, coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        let mut terms = vec![Monomial { coef: c0, powers: vec![0; n] }];
        for (i, &c) in coeffs.iter().enumerate() {
            let mut powers = vec![0; n];
            powers[i] = 1;
            terms.push(Monomial { coef: c, powers });
        }
        ScalarField::Polynomial { terms }
    }

    /// `c₀ + Σ cᵢ xᵢ²` in `n` dimensions.
    pub fn diagonal_quadratic(c0: f64, coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        let mut terms = vec![Monomial { coef: c0, powers: vec![0; n] }];
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                let mut powers = vec![0; n];
                powers[i] = 2;
                terms.push(Monomial { coef: c, powers });
            }
        }
        ScalarField::Polynomial { terms }
    }

    /// Sample `f` on a table of `shape` nodes over `[lo, hi]`.
    pub fn tabulate(lo: Vec<f64>, hi: Vec<f64>, shape: Vec<usize>, f: impl Fn(&Vector) -> f64) -> Self {
        let n = lo.len();
        let total: usize = shape.iter().product();
        let values = (0..total)
            .map(|mut idx| {
                let x = Vector::from_fn(n, |i, _| {
                    let k = idx % shape[i];
                    idx /= shape[i];
                    lo[i] + (hi[i] - lo[i]) * k as f64 / (shape[i] - 1) as f64
                });
                f(&x)
            })
            .collect();
        ScalarField::GridTable { lo, hi, shape, values }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            ScalarField::Constant { value } if !value.is_finite() => {
                Err(Error::InvalidInput("constant field must be finite".into()))
            }
            ScalarField::Polynomial { terms } => {
                for t in terms {
                    if t.powers.len() != n {
                        return Err(Error::DimensionMismatch { expected: n, got: t.powers.len() });
                    }
                    if t.powers.iter().sum::<u32>() > 4 {
                        return Err(Error::InvalidInput("polynomial degree exceeds 4".into()));
                    }
                }
                Ok(())
            }
            ScalarField::GridTable { lo, hi, shape, values } => {
                if lo.len() != n || hi.len() != n || shape.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: shape.len() });
                }
                if shape.iter().any(|&s| s < 2) || values.len() != shape.iter().product::<usize>() {
                    return Err(Error::InvalidInput("grid table shape does not match its values".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ScalarField::Constant { .. })
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        match self {
            ScalarField::Constant { value } => *value,
            ScalarField::Polynomial { terms } => terms
                .iter()
                .map(|t| t.coef * t.powers.iter().zip(x.iter()).map(|(&p, xi)| xi.powi(p as i32)).product::<f64>())
                .sum(),
            ScalarField::RadialExp { a, k } => a * (k * x.norm_squared()).exp(),
            ScalarField::GridTable { .. } => self.table_eval(x, None),
        }
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        let n = x.len();
        match self {
            ScalarField::Constant { .. } => Vector::zeros(n),
            ScalarField::Polynomial { terms } => Vector::from_fn(n, |i, _| {
                terms
                    .iter()
                    .filter(|t| t.powers[i] > 0)
                    .map(|t| {
                        let mut prod = t.coef * t.powers[i] as f64;
                        for (j, (&p, xj)) in t.powers.iter().zip(x.iter()).enumerate() {
                            let p = if j == i { p - 1 } else { p };
                            prod *= xj.powi(p as i32);
                        }
                        prod
                    })
                    .sum()
            }),
            ScalarField::RadialExp { k, .. } => x * (2.0 * k * self.eval(x)),
            ScalarField::GridTable { .. } => Vector::from_fn(n, |i, _| self.table_eval(x, Some(i))),
        }
    }

    /// Multilinear value (`axis = None`) or partial derivative along `axis`.
    fn table_eval(&self, x: &Vector, axis: Option<usize>) -> f64 {
        let ScalarField::GridTable { lo, hi, shape, values } = self else { unreachable!() };
        let n = lo.len();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        let mut width = vec![0.0; n];
        let mut clamped = vec![false; n];
        for i in 0..n {
            width[i] = (hi[i] - lo[i]) / (shape[i] - 1) as f64;
            let t = (x[i] - lo[i]) / width[i];
            let tmax = (shape[i] - 1) as f64;
            if t < 0.0 || t > tmax {
                clamped[i] = true;
            }
            let t = t.clamp(0.0, tmax);
            let b = (t.floor() as usize).min(shape[i] - 2);
            base[i] = b;
            frac[i] = t - b as f64;
        }
        if let Some(a) = axis {
            if clamped[a] {
                return 0.0;
            }
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut weight = 1.0;
            let mut idx = 0;
            let mut stride = 1;
            for i in 0..n {
                let bit = (corner >> i) & 1;
                let w = match axis {
                    Some(a) if a == i => {
                        if bit == 1 {
                            1.0 / width[i]
                        } else {
                            -1.0 / width[i]
                        }
                    }
                    _ => {
                        if bit == 1 {
                            frac[i]
                        } else {
                            1.0 - frac[i]
                        }
                    }
                };
                weight *= w;
                idx += (base[i] + bit) * stride;
                stride *= shape[i];
            }
            acc += weight * values[idx];
        }
        acc
    }
}

/// Point-dependent Minkowski norm `x ↦ F_x`.
#[derive(Debug, Clone, PartialEq)]
pub enum NormField {
    Constant(NormSpec),
    /// `A(x)` (upper triangle used, mirrored) and optional Randers one-form `b(x)`.
    Coefficients { a: Vec<Vec<ScalarField>>, b: Option<Vec<ScalarField>> },
    /// `F_x / √Λ(x)`.
    Conformal { inner: Box<NormField>, lambda: ScalarField },
    /// `F_x(−v)`.
    Reversed(Box<NormField>),
}

impl NormField {
    pub fn dimension(&self) -> usize {
        match self {
            NormField::Constant(s) => s.dimension(),
            NormField::Coefficients { a, .. } => a.len(),
            NormField::Conformal { inner, .. } | NormField::Reversed(inner) => inner.dimension(),
        }
    }

    pub fn is_translation_invariant(&self) -> bool {
        match self {
            NormField::Constant(_) => true,
            NormField::Coefficients { a, b } => {
                a.iter().flatten().all(ScalarField::is_constant)
                    && b.iter().flatten().all(ScalarField::is_constant)
            }
            NormField::Conformal { inner, lambda } => inner.is_translation_invariant() && lambda.is_constant(),
            NormField::Reversed(inner) => inner.is_translation_invariant(),
        }
    }

    pub fn is_finsler(&self) -> bool {
        match self {
            NormField::Constant(s) => s.is_finsler(),
            NormField::Coefficients { .. } => true,
            NormField::Conformal { inner, .. } | NormField::Reversed(inner) => inner.is_finsler(),
        }
    }

    pub fn norm_at(&self, x: &Vector) -> NormSpec {
        match self {
            NormField::Constant(s) => s.clone(),
            NormField::Coefficients { a, b } => {
                let n = a.len();
                let m = Matrix::from_fn(n, n, |i, j| {
                    let (r, c) = if i <= j { (i, j) } else { (j, i) };
                    a[r][c].eval(x)
                });
                match b {
                    None => NormSpec::Quadratic { a: m },
                    Some(b) => NormSpec::Randers { a: m, b: Vector::from_fn(n, |i, _| b[i].eval(x)) },
                }
            }
            NormField::Conformal { inner, lambda } => inner.norm_at(x).scaled(1.0 / lambda.eval(x).sqrt()),
            NormField::Reversed(inner) => inner.norm_at(x).reversed(),
        }
    }

    /// `∂F²/∂x (x, v)`.
    pub fn f2_x_gradient(&self, x: &Vector, v: &Vector) -> Vector {
        match self {
            NormField::Constant(_) => Vector::zeros(x.len()),
            NormField::Coefficients { .. } => {
                numdiff::gradient(|y| self.norm_at(y).f2(v), x, numdiff::gradient_step(x))
            }
            NormField::Conformal { inner, lambda } => {
                let lam = lambda.eval(x);
                let f2 = inner.norm_at(x).f2(v);
                inner.f2_x_gradient(x, v) / lam - lambda.gradient(x) * (f2 / (lam * lam))
            }
            NormField::Reversed(inner) => inner.f2_x_gradient(x, &-v),
        }
    }
}

/// `(M, F)` on a chart together with the conformal factor `Λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinslerField {
    pub chart: Chart,
    pub norm: NormField,
    pub lambda: ScalarField,
}

impl FinslerField {
    /// Validates dimensions, norm admissibility and `Λ > 0` on the validation lattice.
    pub fn new(chart: Chart, norm: NormField, lambda: ScalarField) -> Result<Self> {
        let field = Self::new_any_lambda(chart, norm, lambda)?;
        for x in field.chart.validation_points() {
            let lam = field.lambda.eval(&x);
            if !(lam > 0.0) {
                return Err(Error::NonPositiveLambda { value: lam, at: x.iter().copied().collect() });
            }
        }
        Ok(field)
    }

    /// As [`FinslerField::new`] but without the sign check on `Λ` (SSTK splittings).
    pub(crate) fn new_any_lambda(chart: Chart, norm: NormField, lambda: ScalarField) -> Result<Self> {
        let n = chart.dimension();
        if norm.dimension() != n {
            return Err(Error::DimensionMismatch { expected: n, got: norm.dimension() });
        }
        lambda.validate(n)?;
        if let NormField::Coefficients { a, b } = &norm {
            if a.iter().any(|row| row.len() != n) || b.as_ref().is_some_and(|b| b.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, got: a.len() });
            }
            for f in a.iter().flatten().chain(b.iter().flatten()) {
                f.validate(n)?;
            }
        }
        let field = FinslerField { chart, norm, lambda };
        if !field.norm.is_translation_invariant() || matches!(field.norm, NormField::Constant(_)) {
            let points = if field.norm.is_translation_invariant() {
                vec![field.chart.lo.clone()]
            } else {
                field.chart.validation_points()
            };
            for x in points {
                check_admissible(&field.norm.norm_at(&x), &x)?;
            }
        }
        Ok(field)
    }

    /// Constant norm and constant `Λ` on a chart.
    pub fn uniform(chart: Chart, norm: NormSpec, lambda: f64) -> Result<Self> {
        Self::new(chart, NormField::Constant(norm), ScalarField::constant(lambda))
    }

    pub fn dimension(&self) -> usize {
        self.chart.dimension()
    }

    pub fn norm_at(&self, x: &Vector) -> NormSpec {
        self.norm.norm_at(x)
    }

    pub fn eval(&self, x: &Vector, v: &Vector) -> f64 {
        self.norm.norm_at(x).eval(v)
    }

    pub fn lambda_at(&self, x: &Vector) -> f64 {
        self.lambda.eval(x)
    }

    /// The optical field `F/√Λ` with conformal factor `1`.
    pub fn optical(&self) -> FinslerField {
        let norm = match (&self.norm, &self.lambda) {
            (NormField::Constant(spec), ScalarField::Constant { value }) => {
                NormField::Constant(spec.scaled(1.0 / value.sqrt()))
            }
            _ => NormField::Conformal { inner: Box::new(self.norm.clone()), lambda: self.lambda.clone() },
        };
        FinslerField { chart: self.chart.clone(), norm, lambda: ScalarField::constant(1.0) }
    }

    /// The reverse metric `F⁻(v) = F(−v)` on the same chart.
    pub fn reversed(&self) -> FinslerField {
        let norm = match &self.norm {
            NormField::Constant(spec) => NormField::Constant(spec.reversed()),
            NormField::Reversed(inner) => (**inner).clone(),
            other => NormField::Reversed(Box::new(other.clone())),
        };
        FinslerField { chart: self.chart.clone(), norm, lambda: self.lambda.clone() }
    }
}

fn check_admissible(spec: &NormSpec, x: &Vector) -> Result<()> {
    let at = Some(x.iter().copied().collect::<Vec<_>>());
    match spec {
        NormSpec::Quadratic { a } => {
            if minkowski::min_eigenvalue(a) <= minkowski::EIGEN_TOL {
                return Err(Error::NotPositiveDefinite { at });
            }
        }
        NormSpec::Randers { a, b } => {
            if minkowski::min_eigenvalue(a) <= minkowski::EIGEN_TOL {
                return Err(Error::NotPositiveDefinite { at });
            }
            let dual = minkowski::dual_norm(a, b).map_err(|_| Error::NotPositiveDefinite { at: at.clone() })?;
            if !(dual < 1.0) {
                return Err(Error::InadmissibleRanders { dual_norm: dual, at });
            }
        }
        NormSpec::FigureOneDemo { .. } => {}
    }
    Ok(())
}

/// Length of a polyline: `Σ F_{midpoint}(Δx)` over consecutive samples.
pub fn curve_length(field: &FinslerField, samples: &[Vector]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput("curve_length needs at least two samples".into()));
    }
    for x in samples {
        field.chart.require(x)?;
    }
    Ok(samples
        .windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]) * 0.5;
            field.eval(&mid, &(&w[1] - &w[0]))
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubquadraticFit {
    pub fits: bool,
    pub c1: f64,
    pub c2: f64,
    /// `max |Λ(x)| / (c₁d² + c₂) − 1` over the samples.
    pub worst_violation: f64,
    pub worst_point: Vec<f64>,
    pub samples: usize,
    pub direction: Direction,
}

/// Fits an upper envelope `|Λ(x)| ≤ c₁ d(x̄, x)² + c₂` (forward; backward
/// uses `d(x, x̄)`) on the grid nodes within half the largest sampled
/// distance, then reports whether the envelope, extended to every node,
/// still bounds `|Λ|` up to a factor `1 + 5%`. Distances are grid distances
/// of the field's own norm `F` (not the optical metric).
pub fn subquadratic_probe(
    lambda: &ScalarField,
    field: &FinslerField,
    basepoint: &Vector,
    resolution: usize,
    direction: Direction,
) -> Result<SubquadraticFit> {
    field.chart.require(basepoint)?;
    let grid = Grid::new(field, GridOptions::with_resolution(resolution))?;
    let dist = grid.distance_field(basepoint, direction)?;
    let mut pts = Vec::new();
    for node in 0..grid.node_count() {
        let d = dist.values[node];
        if d.is_finite() {
            let x = grid.node_position(node);
            pts.push((d * d, lambda.eval(&x).abs(), x));
        }
    }
    let reach = pts.iter().map(|p| p.0).fold(0.0, f64::max).sqrt();
    let inner: Vec<(f64, f64)> = pts.iter().filter(|p| p.0 <= 0.25 * reach * reach).map(|p| (p.0, p.1)).collect();
    let (c1, c2) = envelope_fit(&inner);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_point = Vec::new();
    for (d2, y, x) in &pts {
        let bound = c1 * d2 + c2;
        let ratio = if bound > 0.0 { y / bound - 1.0 } else if *y > 0.0 { f64::INFINITY } else { -1.0 };
        if ratio > worst {
            worst = ratio;
            worst_point = x.iter().copied().collect();
        }
    }
    Ok(SubquadraticFit {
        fits: worst <= SUBQUADRATIC_SLACK,
        c1,
        c2,
        worst_violation: worst,
        worst_point,
        samples: pts.len(),
        direction,
    })
}

/// `c₁, c₂ ≥ 0` with `c₁s + c₂ ≥ y` at every point, minimizing the mean of
/// `c₁s + c₂`. For fixed `c₁` the best `c₂` is `max(y − c₁s)⁺`, and the
/// resulting objective is convex in `c₁`.
fn envelope_fit(points: &[(f64, f64)]) -> (f64, f64) {
    if points.is_empty() {
        return (0.0, 0.0);
    }
    let mean_s = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let c2_of = |c1: f64| points.iter().map(|(s, y)| y - c1 * s).fold(0.0, f64::max);
    let objective = |c1: f64| c1 * mean_s + c2_of(c1);
    let y_max = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let s_min = points.iter().map(|p| p.0).filter(|s| *s > 0.0).fold(f64::INFINITY, f64::min);
    if !s_min.is_finite() || y_max == 0.0 {
        return (0.0, y_max);
    }
    // beyond y_max / s_min every positive-s constraint is slack
    let (mut lo, mut hi) = (0.0, y_max / s_min);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if objective(m1) <= objective(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mut c1 = 0.5 * (lo + hi);
    // flat data: prefer the constant envelope when it is as good
    if objective(0.0) <= objective(c1) * (1.0 + 1e-12) {
        c1 = 0.0;
    }
    (c1, c2_of(c1))
}
