//! Central finite differences.

use crate::{Matrix, Vector};

/// Gradient step used for first derivatives: `1e-5 · max(1, |x|)`.
pub fn gradient_step(x: &Vector) -> f64 {
    1e-5 * x.norm().max(1.0)
}

/// Hessian step used for second derivatives: `1e-4 · max(1, |x|)`.
pub fn hessian_step(x: &Vector) -> f64 {
    1e-4 * x.norm().max(1.0)
}

pub fn gradient(f: impl Fn(&Vector) -> f64, x: &Vector, h: f64) -> Vector {
    let mut out = Vector::zeros(x.len());
    let mut xp = x.clone();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        out[i] = (fp - fm) / (2.0 * h);
    }
    out
}

pub fn hessian(f: impl Fn(&Vector) -> f64, x: &Vector, h: f64) -> Matrix {
    let n = x.len();
    let f0 = f(x);
    let mut out = Matrix::zeros(n, n);
    let mut xp = x.clone();
    for i in 0..n {
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        out[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let mut eval = |si: f64, sj: f64| {
                xp[i] = x[i] + si * h;
                xp[j] = x[j] + sj * h;
                let v = f(&xp);
                xp[i] = x[i];
                xp[j] = x[j];
                v
            };
            let hij = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0))
                / (4.0 * h * h);
            out[(i, j)] = hij;
            out[(j, i)] = hij;
        }
    }
    out
}
