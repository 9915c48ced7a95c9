//! Minkowski norms on a single fiber `ℝⁿ`.
//!
//! A [`NormSpec`] is one of:
//!
//! * `Quadratic(A)`: `F(v) = √(vᵀAv)` with `A` symmetric positive definite;
//! * `Randers(A, b)`: `F(v) = √(vᵀAv) + b·v` with `‖b‖_{A⁻¹} < 1`;
//! * `FigureOneDemo`: the planar direction-dependent conformal structure
//!   `F(v) = |v|·exp(-2v₂²/|v|²)`, whose tensor is the *generalized metric*
//!   `exp(-4v₂²/|v|²)·I`. That tensor is homogeneous of degree zero and
//!   positive definite but is not the vertical Hessian of any function, so
//!   its Cartan tensor fails to be symmetric. It only takes part in cone and
//!   tensor diagnostics, never in geodesic integration.
//!
//! Closed forms are used for the quadratic and Randers variants; the numeric
//! (central difference) path is always available for cross-checks. Numeric
//! derivatives assume `F` is `C²` away from the zero vector.

use nalgebra::{Cholesky, Dyn, SymmetricEigen};

use crate::error::{Error, Result};
use crate::numdiff;
use crate::sampling;
use crate::{Matrix, Vector};

/// Eigenvalue threshold below which a fundamental tensor is reported degenerate.
pub const EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    Quadratic { a: Matrix },
    Randers { a: Matrix, b: Vector },
    FigureOneDemo { scale: f64 },
}

/// How to evaluate derivatives of `F²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalTensor {
    pub g: Matrix,
    pub at_vector: Vector,
}

impl FundamentalTensor {
    pub fn apply(&self, u: &Vector, w: &Vector) -> f64 {
        u.dot(&(&self.g * w))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.g)
    }
}

pub(crate) fn min_eigenvalue(m: &Matrix) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn check_spd(a: &Matrix) -> Result<Cholesky<f64, Dyn>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    let asym = (a - a.transpose()).amax();
    if asym > 1e-12 * a.amax().max(1.0) {
        return Err(Error::NotPositiveDefinite { at: None });
    }
    Cholesky::new(a.clone()).ok_or(Error::NotPositiveDefinite { at: None })
}

/// `√(bᵀA⁻¹b)`, the norm of the covector `b` dual to the inner product `A`.
pub fn dual_norm(a: &Matrix, b: &Vector) -> Result<f64> {
    let chol = check_spd(a)?;
    Ok(b.dot(&chol.solve(b)).max(0.0).sqrt())
}

impl NormSpec {
    pub fn quadratic(a: Matrix) -> Result<Self> {
        check_spd(&a)?;
        Ok(NormSpec::Quadratic { a })
    }

    pub fn euclidean(n: usize) -> Self {
        NormSpec::Quadratic { a: Matrix::identity(n, n) }
    }

    pub fn randers(a: Matrix, b: Vector) -> Result<Self> {
        if b.len() != a.nrows() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.len() });
        }
        let dual = dual_norm(&a, &b)?;
        if !(dual < 1.0) {
            return Err(Error::InadmissibleRanders { dual_norm: dual, at: None });
        }
        Ok(NormSpec::Randers { a, b })
    }

    pub fn figure_one() -> Self {
        NormSpec::FigureOneDemo { scale: 1.0 }
    }

    pub fn dimension(&self) -> usize {
        match self {
            NormSpec::Quadratic { a } | NormSpec::Randers { a, .. } => a.nrows(),
            NormSpec::FigureOneDemo { .. } => 2,
        }
    }

    /// False for the figure-one generalized metric.
    pub fn is_finsler(&self) -> bool {
        !matches!(self, NormSpec::FigureOneDemo { .. })
    }

    pub fn is_reversible(&self) -> bool {
        match self {
            NormSpec::Quadratic { .. } => true,
            NormSpec::Randers { b, .. } => b.iter().all(|&x| x == 0.0),
            NormSpec::FigureOneDemo { .. } => true,
        }
    }

    /// `F(v)`; `F(0) = 0`.
    pub fn eval(&self, v: &Vector) -> f64 {
        match self {
            NormSpec::Quadratic { a } => quad(a, v).sqrt(),
            NormSpec::Randers { a, b } => quad(a, v).sqrt() + b.dot(v),
            NormSpec::FigureOneDemo { scale } => {
                let r2 = v[0] * v[0] + v[1] * v[1];
                if r2 == 0.0 {
                    return 0.0;
                }
                scale * r2.sqrt() * (-2.0 * v[1] * v[1] / r2).exp()
            }
        }
    }

    pub fn f2(&self, v: &Vector) -> f64 {
        match self {
            NormSpec::Quadratic { a } => quad(a, v),
            _ => {
                let f = self.eval(v);
                f * f
            }
        }
    }

    /// The norm `c·F` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            NormSpec::Quadratic { a } => NormSpec::Quadratic { a: a * (c * c) },
            NormSpec::Randers { a, b } => NormSpec::Randers { a: a * (c * c), b: b * c },
            NormSpec::FigureOneDemo { scale } => NormSpec::FigureOneDemo { scale: scale * c },
        }
    }

    /// The reverse norm `F⁻(v) = F(-v)`.
    pub fn reversed(&self) -> Self {
        match self {
            NormSpec::Randers { a, b } => NormSpec::Randers { a: a.clone(), b: -b },
            other => other.clone(),
        }
    }

    /// `∂F²/∂v` at `v ≠ 0`.
    pub fn momentum(&self, v: &Vector) -> Result<Vector> {
        self.momentum_with(v, Method::ClosedForm)
    }

    pub fn momentum_with(&self, v: &Vector, method: Method) -> Result<Vector> {
        if is_zero(v) {
            return Err(Error::ZeroVector);
        }
        Ok(match (self, method) {
            (NormSpec::Quadratic { a }, _) => a * v * 2.0,
            (NormSpec::Randers { a, b }, Method::ClosedForm) => {
                let av = a * v;
                let len = v.dot(&av).sqrt();
                let f = len + b.dot(v);
                (av / len + b) * (2.0 * f)
            }
            _ => numdiff::gradient(|u| self.f2(u), v, numdiff::gradient_step(v)),
        })
    }

    /// `∂F²/∂v`, extended by zero at `v = 0` (where `F²` is `C¹`).
    pub fn momentum_or_zero(&self, v: &Vector) -> Vector {
        self.momentum(v).unwrap_or_else(|_| Vector::zeros(v.len()))
    }

    /// `g_v = ½ ∂²F²/∂v∂v` at `v ≠ 0`, checked for positive definiteness.
    pub fn fundamental_tensor(&self, v: &Vector) -> Result<FundamentalTensor> {
        self.fundamental_tensor_with(v, Method::ClosedForm)
    }

    pub fn fundamental_tensor_with(&self, v: &Vector, method: Method) -> Result<FundamentalTensor> {
        let g = self.tensor_matrix(v, method)?;
        let min = min_eigenvalue(&g);
        if !(min > EIGEN_TOL) {
            return Err(Error::DegenerateTensor { min_eigenvalue: min, tolerance: EIGEN_TOL });
        }
        Ok(FundamentalTensor { g, at_vector: v.clone() })
    }

    /// Tensor matrix without the definiteness check.
    pub(crate) fn tensor_matrix(&self, v: &Vector, method: Method) -> Result<Matrix> {
        if is_zero(v) {
            return Err(Error::ZeroVector);
        }
        Ok(match (self, method) {
            (NormSpec::Quadratic { a }, _) => a.clone(),
            (NormSpec::Randers { a, b }, Method::ClosedForm) => {
                // g = (ℓ+b)(ℓ+b)ᵀ + (F/|v|_A)(A − ℓℓᵀ), ℓ = Av/|v|_A
                let av = a * v;
                let len = v.dot(&av).sqrt();
                let ell = &av / len;
                let f = len + b.dot(v);
                let lb = &ell + b;
                &lb * lb.transpose() + (a - &ell * ell.transpose()) * (f / len)
            }
            (NormSpec::FigureOneDemo { scale }, _) => {
                let r2 = v[0] * v[0] + v[1] * v[1];
                Matrix::identity(2, 2) * (scale * scale * (-4.0 * v[1] * v[1] / r2).exp())
            }
            (_, Method::Numeric) => {
                numdiff::hessian(|u| 0.5 * self.f2(u), v, numdiff::hessian_step(v))
            }
        })
    }

    /// `max_{i,j,k} |∂g_ij/∂vᵏ − ∂g_ik/∂vʲ|` by central differences of the tensor.
    pub fn cartan_symmetry_residual(&self, v: &Vector) -> Result<f64> {
        if is_zero(v) {
            return Err(Error::ZeroVector);
        }
        let n = v.len();
        let h = 1e-4 * v.norm().max(1.0);
        let mut dg = Vec::with_capacity(n);
        let mut vp = v.clone();
        for k in 0..n {
            vp[k] = v[k] + h;
            let gp = self.tensor_matrix(&vp, Method::ClosedForm)?;
            vp[k] = v[k] - h;
            let gm = self.tensor_matrix(&vp, Method::ClosedForm)?;
            vp[k] = v[k];
            dg.push((gp - gm) / (2.0 * h));
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((dg[k][(i, j)] - dg[j][(i, k)]).abs());
                }
            }
        }
        Ok(worst)
    }

    /// `α = sup F(v)/F(−v)` over the unit sphere: uniform sweep plus local refinement.
    pub fn reversibility_constant(&self, samples: usize) -> f64 {
        let samples = samples.max(8);
        let (_, best) = sampling::sphere_max(self.dimension(), samples, |u| {
            let neg = -u;
            self.eval(u) / self.eval(&neg)
        });
        best.max(1.0)
    }

    /// Inverts the momentum map: finds `v` with `∂F²/∂v(v) = q`.
    ///
    /// Quadratic norms are inverted in closed form. Otherwise damped Newton on
    /// `2g_v δ = r` (at most 50 iterations, damping halved whenever the residual
    /// does not decrease), starting from `hint`; on failure the iterate is
    /// rescaled along its ray to match `q·v` and Newton is restarted once.
    pub fn invert_momentum(&self, q: &Vector, hint: Option<&Vector>) -> Result<Vector> {
        if !self.is_finsler() {
            return Err(Error::NotFinslerNorm { operation: "momentum inversion" });
        }
        if is_zero(q) {
            return Ok(Vector::zeros(q.len()));
        }
        let base = match self {
            NormSpec::Quadratic { a } | NormSpec::Randers { a, .. } => a,
            NormSpec::FigureOneDemo { .. } => unreachable!(),
        };
        let chol = Cholesky::new(base.clone()).ok_or(Error::NotPositiveDefinite { at: None })?;
        let quadratic_guess = chol.solve(q) * 0.5;
        if let NormSpec::Quadratic { .. } = self {
            return Ok(quadratic_guess);
        }
        let start = match hint {
            Some(h) if !is_zero(h) && h.iter().all(|x| x.is_finite()) => h.clone(),
            _ => quadratic_guess,
        };
        let tol = 1e-13 * q.norm().max(1e-300);
        match self.newton(q, start.clone(), tol) {
            Ok(v) => Ok(v),
            Err(_) => {
                let f2 = self.f2(&start);
                let lambda = q.dot(&start) / (2.0 * f2);
                let restart = if lambda > 0.0 && lambda.is_finite() { start * lambda } else { -start };
                self.newton(q, restart, tol)
            }
        }
    }

    fn newton(&self, q: &Vector, mut v: Vector, tol: f64) -> Result<Vector> {
        let mut r = self.momentum(&v)? - q;
        let mut res = r.norm();
        let mut damping = 1.0;
        for _ in 0..50 {
            if res <= tol {
                return Ok(v);
            }
            let jac = self.tensor_matrix(&v, Method::ClosedForm)? * 2.0;
            let step = match jac.lu().solve(&r) {
                Some(s) => s,
                None => return Err(Error::NewtonDivergence { residual: res }),
            };
            let mut accepted = false;
            while damping > 1e-10 {
                let cand = &v - &step * damping;
                if !is_zero(&cand) {
                    let rc = self.momentum(&cand)? - q;
                    let rn = rc.norm();
                    if rn < res {
                        v = cand;
                        r = rc;
                        res = rn;
                        damping = (damping * 2.0).min(1.0);
                        accepted = true;
                        break;
                    }
                }
                damping *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if res <= tol * 1e3 {
            Ok(v)
        } else {
            Err(Error::NewtonDivergence { residual: res })
        }
    }
}

fn quad(a: &Matrix, v: &Vector) -> f64 {
    v.dot(&(a * v)).max(0.0)
}

pub(crate) fn is_zero(v: &Vector) -> bool {
    v.iter().all(|&x| x == 0.0)
}
