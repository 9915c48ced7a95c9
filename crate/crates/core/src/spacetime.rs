//! The product `ℝ × M` with `L(τ, v) = −Λτ² + F²(v)`, and its stationary
//! extension `L = −Λτ² + 2τω(v) + F²(v)` (SSTK mode, `Λ` of any sign).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::base::{Chart, FinslerField, NormField, ScalarField};
use crate::error::{Error, Result};
use crate::minkowski::{Method, NormSpec};
use crate::sampling;
use crate::{numdiff, Matrix, Vector};

/// Relative tolerance of the lightlike band.
pub const CLASS_TOL: f64 = 1e-9;
/// Relative tolerance for chord midpoints in the convexity checks.
pub const CONV_TOL: f64 = 1e-9;
/// `|Λ|` below this counts as the critical region in SSTK mode.
pub const CRITICAL_TOL: f64 = 1e-12;
/// Outer direction count used for `‖ω‖ₓ` when validating SSTK data.
const OMEGA_VALIDATION_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Static,
    Sstk { omega: Vec<ScalarField> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticSpacetime {
    pub base: FinslerField,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    pub x: Vector,
}

impl Event {
    pub fn new(t: f64, x: Vec<f64>) -> Self {
        Event { t, x: Vector::from_vec(x) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub tau: f64,
    pub v: Vector,
}

impl Tangent {
    pub fn new(tau: f64, v: Vec<f64>) -> Self {
        Tangent { tau, v: Vector::from_vec(v) }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Tangent { tau: self.tau * c, v: &self.v * c }
    }

    /// `(1 − s)·self + s·other`.
    pub fn lerp(&self, other: &Tangent, s: f64) -> Self {
        Tangent { tau: (1.0 - s) * self.tau + s * other.tau, v: &self.v * (1.0 - s) + &other.v * s }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CausalKind {
    Timelike,
    Lightlike,
    CausalBoundary,
    Spacelike,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Future,
    Past,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CausalClass {
    pub kind: CausalKind,
    pub orientation: Orientation,
}

impl CausalClass {
    pub fn is_causal(&self) -> bool {
        matches!(self.kind, CausalKind::Timelike | CausalKind::Lightlike)
    }

    pub fn is_future_causal(&self) -> bool {
        self.is_causal() && self.orientation == Orientation::Future
    }
}

/// Future cone boundary above one spatial direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConePoint {
    pub v: Vec<f64>,
    /// Lower future boundary `F°(v)`.
    pub tau: f64,
    /// Upper boundary `F°ₗ(v)` where the cone is bounded above (`Λ < 0`).
    pub tau_upper: Option<f64>,
    /// Set in SSTK mode where `Λ(x) ≈ 0`.
    pub critical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chord {
    pub a: (f64, Vec<f64>),
    pub b: (f64, Vec<f64>),
    pub midpoint: (f64, Vec<f64>),
    /// `L` at the offending convex combination (positive means spacelike).
    pub l_at_midpoint: f64,
    /// Cone boundary height above the midpoint's spatial part.
    pub boundary_at_midpoint: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub convex: bool,
    pub chords_tested: usize,
    pub witness: Option<Chord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JcReport {
    pub strictly_convex: bool,
    pub chord_ok: bool,
    pub min_hessian_eigenvalue: f64,
    /// Largest entrywise gap between the closed-form Hessian of `√(G+α)` and central differences.
    pub formula_deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConicMetrics {
    pub f_o: Option<f64>,
    pub f_o_l: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PuncturedConeReport {
    /// `(half-angle in degrees, passed, max L/(τ²) found)`.
    pub per_angle: Vec<(f64, bool, f64)>,
    pub largest_passing_deg: Option<f64>,
    pub smallest_passing_deg: Option<f64>,
}

impl StaticSpacetime {
    /// Static mode over a validated field (`Λ > 0` is already enforced by [`FinslerField::new`]).
    pub fn new(base: FinslerField) -> Self {
        StaticSpacetime { base, mode: Mode::Static }
    }

    /// SSTK mode; checks `Λ(x) + ‖ω‖ₓ > 0` on the validation lattice.
    pub fn sstk(chart: Chart, norm: NormField, lambda: ScalarField, omega: Vec<ScalarField>) -> Result<Self> {
        let base = FinslerField::new_any_lambda(chart, norm, lambda)?;
        let n = base.dimension();
        if omega.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: omega.len() });
        }
        for w in &omega {
            w.validate(n)?;
        }
        let st = StaticSpacetime { base, mode: Mode::Sstk { omega } };
        for x in st.base.chart.validation_points() {
            let lam = st.base.lambda_at(&x);
            let value = lam + st.omega_norm_unchecked(&x, OMEGA_VALIDATION_SAMPLES);
            if !(value > 0.0) {
                return Err(Error::SstkInadmissible { value, at: x.iter().copied().collect() });
            }
        }
        Ok(st)
    }

    pub fn dimension(&self) -> usize {
        self.base.dimension()
    }

    pub fn chart(&self) -> &Chart {
        &self.base.chart
    }

    pub fn is_sstk(&self) -> bool {
        matches!(self.mode, Mode::Sstk { .. })
    }

    pub fn lambda_at(&self, x: &Vector) -> f64 {
        self.base.lambda_at(x)
    }

    /// `ω_x` as a vector of components (zero in static mode).
    pub fn omega_at(&self, x: &Vector) -> Vector {
        match &self.mode {
            Mode::Static => Vector::zeros(x.len()),
            Mode::Sstk { omega } => Vector::from_fn(x.len(), |i, _| omega[i].eval(x)),
        }
    }

    pub fn is_critical(&self, x: &Vector) -> bool {
        self.is_sstk() && self.lambda_at(x).abs() <= CRITICAL_TOL
    }

    fn check_point(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: x.len() });
        }
        self.base.chart.require(x)
    }

    fn check_tangent(&self, w: &Tangent) -> Result<()> {
        if w.v.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: w.v.len() });
        }
        Ok(())
    }

    /// `L(τ, v)` at `x`. Time-independent: there is no `t` argument to depend on.
    pub fn eval_l(&self, x: &Vector, w: &Tangent) -> Result<f64> {
        self.check_point(x)?;
        self.check_tangent(w)?;
        Ok(self.l_unchecked(x, w))
    }

    /// `L` at an event `(t, x)`; `t` is ignored (`∂_t` is Killing).
    pub fn eval_l_at(&self, _t: f64, x: &Vector, w: &Tangent) -> Result<f64> {
        self.eval_l(x, w)
    }

    pub(crate) fn l_unchecked(&self, x: &Vector, w: &Tangent) -> f64 {
        let lam = self.lambda_at(x);
        let f2 = self.base.norm_at(x).f2(&w.v);
        let cross = match self.mode {
            Mode::Static => 0.0,
            Mode::Sstk { .. } => 2.0 * w.tau * self.omega_at(x).dot(&w.v),
        };
        -lam * w.tau * w.tau + cross + f2
    }

    /// `|Λ|τ² + F² + 2|τω(v)|`, the size against which `L` is compared.
    pub fn scale(&self, x: &Vector, w: &Tangent) -> f64 {
        let lam = self.lambda_at(x);
        let f2 = self.base.norm_at(x).f2(&w.v);
        let cross = match self.mode {
            Mode::Static => 0.0,
            Mode::Sstk { .. } => 2.0 * (w.tau * self.omega_at(x).dot(&w.v)).abs(),
        };
        lam.abs() * w.tau * w.tau + f2 + cross
    }

    /// Block matrix `[[−Λ, ωᵀ], [ω, g_v]]`.
    pub fn spacetime_tensor(&self, x: &Vector, w: &Tangent) -> Result<Matrix> {
        self.check_point(x)?;
        self.check_tangent(w)?;
        if crate::minkowski::is_zero(&w.v) {
            return Err(Error::OnExceptionalBundle);
        }
        let n = self.dimension();
        let g = self.base.norm_at(x).tensor_matrix(&w.v, Method::ClosedForm)?;
        let omega = self.omega_at(x);
        let mut out = Matrix::zeros(n + 1, n + 1);
        out[(0, 0)] = -self.lambda_at(x);
        for i in 0..n {
            out[(0, i + 1)] = omega[i];
            out[(i + 1, 0)] = omega[i];
            for j in 0..n {
                out[(i + 1, j + 1)] = g[(i, j)];
            }
        }
        Ok(out)
    }

    pub fn classify(&self, x: &Vector, w: &Tangent) -> Result<CausalClass> {
        self.check_point(x)?;
        self.check_tangent(w)?;
        Ok(self.classify_unchecked(x, w))
    }

    pub(crate) fn classify_unchecked(&self, x: &Vector, w: &Tangent) -> CausalClass {
        let zero_v = crate::minkowski::is_zero(&w.v);
        let orientation = if w.tau > 0.0 {
            Orientation::Future
        } else if w.tau < 0.0 {
            Orientation::Past
        } else {
            Orientation::None
        };
        if zero_v && w.tau == 0.0 {
            return CausalClass { kind: CausalKind::Zero, orientation: Orientation::None };
        }
        // the time axis 𝒯 is timelike in static mode; in SSTK mode it is timelike iff Λ > 0
        if zero_v && !self.is_sstk() {
            return CausalClass { kind: CausalKind::Timelike, orientation };
        }
        let l = self.l_unchecked(x, w);
        let band = CLASS_TOL * self.scale(x, w);
        let (kind, orientation) = if l.abs() <= band {
            (CausalKind::Lightlike, orientation)
        } else if l.abs() <= 10.0 * band {
            (CausalKind::CausalBoundary, Orientation::None)
        } else if l < 0.0 {
            (CausalKind::Timelike, orientation)
        } else {
            (CausalKind::Spacelike, Orientation::None)
        };
        let orientation = if matches!(kind, CausalKind::Timelike | CausalKind::Lightlike) {
            orientation
        } else {
            Orientation::None
        };
        CausalClass { kind, orientation }
    }

    /// Future pointing and `L ≤ 10·CLASS_TOL·scale` (the boundary band counts as causal here).
    fn is_future_causal_loose(&self, x: &Vector, w: &Tangent) -> bool {
        w.tau > 0.0 && self.l_unchecked(x, w) <= 10.0 * CLASS_TOL * self.scale(x, w)
    }

    /// `−½ ∂L/∂ṽ(ṽ)·w̃ − √(−L(ṽ))√(−L(w̃))` for future-pointing causal `ṽ, w̃`.
    pub fn reverse_cs_gap(&self, x: &Vector, v_t: &Tangent, w_t: &Tangent) -> Result<f64> {
        self.check_point(x)?;
        self.check_tangent(v_t)?;
        self.check_tangent(w_t)?;
        if !self.is_future_causal_loose(x, v_t) {
            return Err(Error::NotCausal { which: "first" });
        }
        if !self.is_future_causal_loose(x, w_t) {
            return Err(Error::NotCausal { which: "second" });
        }
        let lam = self.lambda_at(x);
        let omega = self.omega_at(x);
        let q = self.base.norm_at(x).momentum_or_zero(&v_t.v);
        let lhs = lam * v_t.tau * w_t.tau - omega.dot(&v_t.v) * w_t.tau - v_t.tau * omega.dot(&w_t.v)
            - 0.5 * q.dot(&w_t.v);
        let l1 = (-self.l_unchecked(x, v_t)).max(0.0);
        let l2 = (-self.l_unchecked(x, w_t)).max(0.0);
        Ok(lhs - l1.sqrt() * l2.sqrt())
    }

    /// Future cone boundary above `v`.
    pub fn cone_point(&self, x: &Vector, v: &Vector) -> Result<ConePoint> {
        self.check_point(x)?;
        if v.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: v.len() });
        }
        if crate::minkowski::is_zero(v) {
            return Err(Error::ZeroVector);
        }
        let lam = self.lambda_at(x);
        let f2 = self.base.norm_at(x).f2(v);
        let vv: Vec<f64> = v.iter().copied().collect();
        match self.mode {
            Mode::Static => Ok(ConePoint { v: vv, tau: (f2 / lam).sqrt(), tau_upper: None, critical: false }),
            Mode::Sstk { .. } => {
                let w = self.omega_at(x).dot(v);
                match sstk_roots(lam, w, f2) {
                    Ok((tau, tau_upper)) => {
                        Ok(ConePoint { v: vv, tau, tau_upper, critical: lam.abs() <= CRITICAL_TOL })
                    }
                    Err(radicand) => Err(Error::NoFutureRoot { v: vv, radicand }),
                }
            }
        }
    }

    pub fn cone_boundary(&self, x: &Vector, directions: &[Vector]) -> Result<Vec<ConePoint>> {
        directions.iter().map(|v| self.cone_point(x, v)).collect()
    }

    /// `F°(v)` and `F°ₗ(v)`; members are `None` outside their domains.
    pub fn conic_metrics(&self, x: &Vector, v: &Vector) -> Result<ConicMetrics> {
        self.check_point(x)?;
        if v.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: v.len() });
        }
        if crate::minkowski::is_zero(v) {
            return Ok(ConicMetrics { f_o: None, f_o_l: None });
        }
        match self.cone_point(x, v) {
            Ok(p) => Ok(ConicMetrics { f_o: Some(p.tau), f_o_l: p.tau_upper }),
            Err(Error::NoFutureRoot { .. }) => Ok(ConicMetrics { f_o: None, f_o_l: None }),
            Err(e) => Err(e),
        }
    }

    /// Samples chords between future causal vectors and checks that every
    /// convex combination stays future causal.
    pub fn cone_convexity_check(&self, x: &Vector, chord_samples: usize, seed: u64) -> Result<ConvexityReport> {
        self.check_point(x)?;
        let chord_samples = chord_samples.max(100);
        let n = self.dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tested = 0;
        let mut worst: Option<Chord> = None;
        let mut attempts = 0;
        while tested < chord_samples && attempts < chord_samples * 20 {
            attempts += 1;
            let (Some(a), Some(b)) = (self.random_causal(x, n, &mut rng), self.random_causal(x, n, &mut rng))
            else {
                continue;
            };
            tested += 1;
            for s in [0.25, 0.5, 0.75] {
                if let Some(chord) = self.chord_violation_at(x, &a, &b, s) {
                    if worst.as_ref().is_none_or(|w| chord.l_at_midpoint > w.l_at_midpoint) {
                        worst = Some(chord);
                    }
                }
            }
        }
        Ok(ConvexityReport { convex: worst.is_none(), chords_tested: tested, witness: worst })
    }

    /// Checks the midpoint of the chord `[a, b]`; returns it when it is not future causal.
    pub fn chord_violation(&self, x: &Vector, a: &Tangent, b: &Tangent) -> Result<Option<Chord>> {
        self.check_point(x)?;
        self.check_tangent(a)?;
        self.check_tangent(b)?;
        Ok(self.chord_violation_at(x, a, b, 0.5))
    }

    fn chord_violation_at(&self, x: &Vector, a: &Tangent, b: &Tangent, s: f64) -> Option<Chord> {
        let m = a.lerp(b, s);
        let l = self.l_unchecked(x, &m);
        if m.tau > 0.0 && l <= CONV_TOL * self.scale(x, &m) {
            return None;
        }
        let boundary = self.cone_point(x, &m.v).map(|p| p.tau).unwrap_or(f64::NAN);
        let pack = |t: &Tangent| (t.tau, t.v.iter().copied().collect());
        Some(Chord { a: pack(a), b: pack(b), midpoint: pack(&m), l_at_midpoint: l, boundary_at_midpoint: boundary })
    }

    fn random_causal(&self, x: &Vector, n: usize, rng: &mut ChaCha8Rng) -> Option<Tangent> {
        use rand::RngExt;
        let mut u = Vector::from_fn(n, |_, _| sampling::gaussian(rng));
        let norm = u.norm();
        if norm == 0.0 {
            return None;
        }
        u *= rng.random_range(0.2..2.0) / norm;
        let p = self.cone_point(x, &u).ok()?;
        let tau = match (rng.random_range(0..3), p.tau_upper) {
            (0, _) => p.tau,
            (1, Some(up)) => up,
            (_, Some(up)) => p.tau + (up - p.tau) * rng.random::<f64>(),
            (_, None) => p.tau * (1.0 + rng.random::<f64>()),
        };
        Some(Tangent { tau, v: u })
    }

    /// Strict convexity of `J(c) = {τ ≥ √(G(v) + α)}`, `G = F²/Λ`, `α = c/Λ`,
    /// by chord sampling and by the closed-form Hessian of `√(G + α)`.
    pub fn jc_convexity_check(&self, x: &Vector, c: f64, samples: usize) -> Result<JcReport> {
        self.check_point(x)?;
        if self.is_sstk() {
            return Err(Error::WrongMode { required: "static" });
        }
        if !(c > 0.0) {
            return Err(Error::InvalidInput("J(c) requires c > 0".into()));
        }
        let n = self.dimension();
        let lam = self.lambda_at(x);
        let spec = self.base.norm_at(x);
        let alpha = c / lam;
        let phi = |v: &Vector| (spec.f2(v) / lam + alpha).sqrt();
        let samples = samples.max(8);
        let mut min_eig = f64::INFINITY;
        let mut deviation: f64 = 0.0;
        let dirs = sampling::unit_directions(n, samples);
        for (k, u) in dirs.iter().enumerate() {
            let v = u * (0.3 + 1.7 * (k as f64 + 0.5) / samples as f64);
            let hess = jc_hessian(&spec, lam, alpha, &v)?;
            min_eig = min_eig.min(crate::minkowski::min_eigenvalue(&hess));
            let h = numdiff::hessian(&phi, &v, numdiff::hessian_step(&v));
            deviation = deviation.max((hess - h).abs().max());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(samples as u64);
        let mut chord_ok = true;
        for _ in 0..samples {
            let a = Vector::from_fn(n, |_, _| sampling::gaussian(&mut rng));
            let b = Vector::from_fn(n, |_, _| sampling::gaussian(&mut rng));
            let mid = (&a + &b) * 0.5;
            let gap = 0.5 * (phi(&a) + phi(&b)) - phi(&mid);
            if gap < -CONV_TOL * phi(&mid) {
                chord_ok = false;
            }
        }
        Ok(JcReport {
            strictly_convex: chord_ok && min_eig > 0.0,
            chord_ok,
            min_hessian_eigenvalue: min_eig,
            formula_deviation: deviation,
        })
    }

    /// `‖ω‖ₓ = min_v √(ω g_v⁻¹ ωᵀ)` over sampled unit `v`.
    pub fn omega_norm(&self, x: &Vector, outer_samples: usize) -> Result<f64> {
        self.check_point(x)?;
        if !self.is_sstk() {
            return Err(Error::WrongMode { required: "SSTK" });
        }
        Ok(self.omega_norm_unchecked(x, outer_samples))
    }

    fn omega_norm_unchecked(&self, x: &Vector, outer_samples: usize) -> f64 {
        let omega = self.omega_at(x);
        if omega.iter().all(|&w| w == 0.0) {
            return 0.0;
        }
        let spec = self.base.norm_at(x);
        let n = self.dimension();
        let dual = |u: &Vector| -> f64 {
            match spec.tensor_matrix(u, Method::ClosedForm).ok().and_then(|g| g.cholesky()) {
                Some(ch) => omega.dot(&ch.solve(&omega)).max(0.0).sqrt(),
                None => f64::INFINITY,
            }
        };
        if let NormSpec::Quadratic { .. } = spec {
            return dual(&Vector::from_element(n, 1.0));
        }
        let (_, neg) = sampling::sphere_max(n, outer_samples.max(8), |u| -dual(u));
        -neg
    }

    /// Sign of `g̃_w(w, w)` on punctured cones around the time axis, for the given half-angles.
    pub fn punctured_cone_probe(&self, x: &Vector, angles_deg: &[f64], directions: usize) -> Result<PuncturedConeReport> {
        self.check_point(x)?;
        if self.is_sstk() {
            return Err(Error::WrongMode { required: "static" });
        }
        let n = self.dimension();
        let dirs = sampling::unit_directions(n, directions.max(8));
        let mut per_angle = Vec::new();
        for &deg in angles_deg {
            let t = deg.to_radians().tan();
            let mut worst = f64::NEG_INFINITY;
            for u in &dirs {
                for k in 1..=16 {
                    let w = Tangent { tau: 1.0, v: u * (t * k as f64 / 16.0) };
                    let g = self.spacetime_tensor(x, &w)?;
                    let mut full = Vector::zeros(n + 1);
                    full[0] = w.tau;
                    full.rows_mut(1, n).copy_from(&w.v);
                    worst = worst.max(full.dot(&(&g * &full)));
                }
            }
            per_angle.push((deg, worst < 0.0, worst));
        }
        let passing = per_angle.iter().filter(|p| p.1).map(|p| p.0);
        let largest = passing.clone().fold(None, |a: Option<f64>, d| Some(a.map_or(d, |a| a.max(d))));
        let smallest = passing.fold(None, |a: Option<f64>, d| Some(a.map_or(d, |a| a.min(d))));
        Ok(PuncturedConeReport { per_angle, largest_passing_deg: largest, smallest_passing_deg: smallest })
    }
}

/// Future lightlike roots of `−Λτ² + 2τw + F² = 0` given `Λ`, `w = ω(v)` and
/// `F²(v)`: the lower root `F°` and, when `Λ < 0`, the upper root `F°ₗ`.
/// `Err(radicand)` when no future root exists.
pub fn sstk_roots(lam: f64, w: f64, f2: f64) -> std::result::Result<(f64, Option<f64>), f64> {
    if lam.abs() <= CRITICAL_TOL {
        return if w < 0.0 { Ok((-f2 / (2.0 * w), None)) } else { Err(w * w) };
    }
    let radicand = lam * f2 + w * w;
    if radicand < 0.0 || (lam < 0.0 && w >= 0.0) {
        return Err(radicand);
    }
    let r = radicand.sqrt();
    if lam > 0.0 {
        // rationalized form avoids cancellation in −w + √R when w > 0
        let tau = if w > 0.0 { (w + r) / lam } else { f2 / (r - w) };
        Ok((tau, None))
    } else {
        let hi = (w - r) / lam;
        // the two forms can cross by an ulp when the radicand vanishes
        Ok(((f2 / (r - w)).min(hi), Some(hi)))
    }
}

/// `F°` and `F°ₗ` from pointwise data (`Λ`, `ω(v)`, `F²(v)`), `v ≠ 0`.
pub fn conic_pair(lam: f64, w: f64, f2: f64) -> ConicMetrics {
    match sstk_roots(lam, w, f2) {
        Ok((f_o, f_o_l)) => ConicMetrics { f_o: Some(f_o), f_o_l },
        Err(_) => ConicMetrics { f_o: None, f_o_l: None },
    }
}

/// Closed-form Hessian of `φ = √(G + α)` with `G = F²/Λ`:
/// `∂²φ = (g_v/Λ − p pᵀ/φ²)/φ`, `p = ½∂G = ∂F²/(2Λ)`.
fn jc_hessian(spec: &NormSpec, lam: f64, alpha: f64, v: &Vector) -> Result<Matrix> {
    let g = spec.tensor_matrix(v, Method::ClosedForm)? / lam;
    let p = spec.momentum(v)? / (2.0 * lam);
    let phi = (spec.f2(v) / lam + alpha).sqrt();
    Ok((g - &p * p.transpose() / (phi * phi)) / phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Chart;

    fn v2(x: f64, y: f64) -> Vector {
        Vector::from_vec(vec![x, y])
    }

    fn flat(lam: f64) -> StaticSpacetime {
        StaticSpacetime::new(FinslerField::uniform(Chart::square(2, 2.0), NormSpec::euclidean(2), lam).unwrap())
    }

    fn randers() -> StaticSpacetime {
        let spec = NormSpec::randers(Matrix::identity(2, 2), v2(0.5, 0.0)).unwrap();
        StaticSpacetime::new(FinslerField::uniform(Chart::square(2, 2.0), spec, 1.0).unwrap())
    }

    fn sstk(lam: f64, w1: f64) -> StaticSpacetime {
        StaticSpacetime::sstk(
            Chart::square(2, 2.0),
            NormField::Constant(NormSpec::euclidean(2)),
            ScalarField::constant(lam),
            vec![ScalarField::constant(w1), ScalarField::constant(0.0)],
        )
        .unwrap()
    }

    #[test]
    fn eval_l_examples() {
        let o = v2(0.0, 0.0);
        assert_eq!(flat(1.0).eval_l(&o, &Tangent::new(1.0, vec![1.0, 0.0])).unwrap(), 0.0);
        assert_eq!(flat(1.0).eval_l(&o, &Tangent::new(2.0, vec![1.0, 0.0])).unwrap(), -3.0);
        assert_eq!(sstk(-1.0, -2.0).eval_l(&o, &Tangent::new(1.0, vec![1.0, 0.0])).unwrap(), -2.0);
        assert!(flat(1.0).eval_l(&v2(5.0, 0.0), &Tangent::new(1.0, vec![1.0, 0.0])).is_err());
    }

    #[test]
    fn tensor_blocks() {
        let g = flat(4.0).spacetime_tensor(&v2(0.1, 0.2), &Tangent::new(1.0, vec![0.3, 0.4])).unwrap();
        assert_eq!(g, Matrix::from_diagonal(&Vector::from_vec(vec![-4.0, 1.0, 1.0])));
        let err = flat(1.0).spacetime_tensor(&v2(0.0, 0.0), &Tangent::new(1.0, vec![0.0, 0.0]));
        assert_eq!(err, Err(Error::OnExceptionalBundle));
    }

    #[test]
    fn classification_examples() {
        let o = v2(0.0, 0.0);
        let c = flat(1.0).classify(&o, &Tangent::new(2.0, vec![1.0, 0.0])).unwrap();
        assert_eq!(c, CausalClass { kind: CausalKind::Timelike, orientation: Orientation::Future });
        let c = flat(1.0).classify(&o, &Tangent::new(-1.0, vec![1.0, 0.0])).unwrap();
        assert_eq!(c, CausalClass { kind: CausalKind::Lightlike, orientation: Orientation::Past });
        let c = randers().classify(&o, &Tangent::new(1.5, vec![1.0, 0.0])).unwrap();
        assert_eq!(c, CausalClass { kind: CausalKind::Lightlike, orientation: Orientation::Future });
        let c = flat(1.0).classify(&o, &Tangent::new(0.0, vec![0.0, 0.0])).unwrap();
        assert_eq!(c.kind, CausalKind::Zero);
        let c = flat(1.0).classify(&o, &Tangent::new(-3.0, vec![0.0, 0.0])).unwrap();
        assert_eq!(c, CausalClass { kind: CausalKind::Timelike, orientation: Orientation::Past });
        // L = 5e-9·scale lies in the boundary band
        let c = flat(1.0).classify(&o, &Tangent::new(1.0, vec![(1.0 + 1e-8f64).sqrt(), 0.0])).unwrap();
        assert_eq!(c, CausalClass { kind: CausalKind::CausalBoundary, orientation: Orientation::None });
    }

    #[test]
    fn reverse_cs_examples() {
        let o = v2(0.0, 0.0);
        let st = flat(1.0);
        let a = Tangent::new(1.0, vec![0.5, 0.0]);
        assert!(st.reverse_cs_gap(&o, &a, &a).unwrap().abs() < 1e-15);
        let gap = st.reverse_cs_gap(&o, &Tangent::new(2.0, vec![1.0, 0.0]), &Tangent::new(2.0, vec![0.0, 1.0]));
        assert!((gap.unwrap() - 1.0).abs() < 1e-15);
        let gap = st.reverse_cs_gap(&o, &Tangent::new(1.0, vec![0.0, 0.0]), &Tangent::new(2.0, vec![1.0, 0.0]));
        assert!((gap.unwrap() - (2.0 - 3f64.sqrt())).abs() < 1e-15);
        let err = st.reverse_cs_gap(&o, &Tangent::new(0.1, vec![1.0, 0.0]), &a);
        assert_eq!(err, Err(Error::NotCausal { which: "first" }));
    }

    #[test]
    fn cone_boundary_examples() {
        let o = v2(0.0, 0.0);
        assert_eq!(flat(1.0).cone_point(&o, &v2(1.0, 0.0)).unwrap().tau, 1.0);
        assert_eq!(flat(4.0).cone_point(&o, &v2(0.0, 1.0)).unwrap().tau, 0.5);
        let fig = StaticSpacetime::new(
            FinslerField::uniform(Chart::square(2, 2.0), NormSpec::figure_one(), 1.0).unwrap(),
        );
        assert_eq!(fig.cone_point(&o, &v2(1.0, 0.0)).unwrap().tau, 1.0);
        assert!((fig.cone_point(&o, &v2(0.0, 1.0)).unwrap().tau - (-2f64).exp()).abs() < 1e-15);
        assert!(matches!(sstk(-1.0, 2.0).cone_point(&o, &v2(1.0, 0.0)), Err(Error::NoFutureRoot { .. })));
    }

    #[test]
    fn conic_metric_examples() {
        let o = v2(0.0, 0.0);
        let m = sstk(1.0, 0.0).conic_metrics(&o, &v2(0.6, 0.8)).unwrap();
        assert!((m.f_o.unwrap() - 1.0).abs() < 1e-15 && m.f_o_l.is_none());
        let m = sstk(-1.0, -2.0).conic_metrics(&o, &v2(1.0, 0.0)).unwrap();
        assert!((m.f_o.unwrap() - (2.0 - 3f64.sqrt())).abs() < 1e-14);
        assert!((m.f_o_l.unwrap() - (2.0 + 3f64.sqrt())).abs() < 1e-14);
        // Λ + ‖ω‖ = 0 here, so only the pointwise formula can be evaluated
        let m = conic_pair(-1.0, -1.0, 1.0);
        assert!((m.f_o.unwrap() - 1.0).abs() < 1e-15 && (m.f_o_l.unwrap() - 1.0).abs() < 1e-15);
        // admissible (Λ + ‖ω‖ = 0.25) with a radicand that vanishes exactly at v = (1, 0.75)
        let m = sstk(-1.0, -1.25).conic_metrics(&o, &v2(1.0, 0.75)).unwrap();
        assert_eq!(m.f_o, m.f_o_l);
        let m = sstk(-1.0, -2.0).conic_metrics(&o, &v2(0.0, 1.0)).unwrap();
        assert_eq!(m, ConicMetrics { f_o: None, f_o_l: None });
    }

    #[test]
    fn sstk_admissibility() {
        let err = StaticSpacetime::sstk(
            Chart::square(2, 1.0),
            NormField::Constant(NormSpec::euclidean(2)),
            ScalarField::constant(-1.0),
            vec![ScalarField::constant(0.5), ScalarField::constant(0.0)],
        );
        assert!(matches!(err, Err(Error::SstkInadmissible { .. })));
        assert!((sstk(-0.1, 0.5).omega_norm(&v2(0.0, 0.0), 64).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn critical_region_flag() {
        let st = sstk(0.0, -1.0);
        let p = st.cone_point(&v2(0.0, 0.0), &v2(1.0, 0.0)).unwrap();
        assert!(p.critical);
        assert_eq!(p.tau, 0.5);
    }

    #[test]
    fn jc_hessian_matches_differences() {
        let r = randers().jc_convexity_check(&v2(0.0, 0.0), 0.5, 64).unwrap();
        assert!(r.strictly_convex);
        assert!(r.formula_deviation < 1e-5, "{}", r.formula_deviation);
    }

    #[test]
    fn punctured_cones_pass_for_flat() {
        let r = flat(1.0).punctured_cone_probe(&v2(0.0, 0.0), &[10.0, 1.0, 0.1], 32).unwrap();
        assert_eq!(r.largest_passing_deg, Some(10.0));
        assert_eq!(r.smallest_passing_deg, Some(0.1));
    }
}
