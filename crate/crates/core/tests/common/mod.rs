#![allow(dead_code)]

use std::time::Duration;

use static_finsler::base::Monomial;
use static_finsler::{Chart, FinslerField, Matrix, NormField, NormSpec, ScalarField, StaticSpacetime, Vector};

pub fn v2(x: f64, y: f64) -> Vector {
    Vector::from_vec(vec![x, y])
}

/// `√(vᵀAv) + b·v`, written out independently of the library.
pub fn randers_norm(a: &Matrix, b: &Vector, v: &Vector) -> f64 {
    let mut q = 0.0;
    for i in 0..v.len() {
        for j in 0..v.len() {
            q += a[(i, j)] * v[i] * v[j];
        }
    }
    q.sqrt() + b.iter().zip(v.iter()).map(|(x, y)| x * y).sum::<f64>()
}

/// Central second differences of `f` at `v` with step `h`.
pub fn fd_hessian(f: impl Fn(&Vector) -> f64, v: &Vector, h: f64) -> Matrix {
    let n = v.len();
    let e = |i: usize| Vector::from_fn(n, |k, _| if k == i { h } else { 0.0 });
    let mut out = Matrix::zeros(n, n);
    let f0 = f(v);
    for i in 0..n {
        out[(i, i)] = (f(&(v + e(i))) - 2.0 * f0 + f(&(v - e(i)))) / (h * h);
        for j in 0..i {
            let val = (f(&(v + e(i) + e(j))) - f(&(v + e(i) - e(j))) - f(&(v - e(i) + e(j)))
                + f(&(v - e(i) - e(j))))
                / (4.0 * h * h);
            out[(i, j)] = val;
            out[(j, i)] = val;
        }
    }
    out
}

pub fn poly(terms: &[(f64, [u32; 2])]) -> ScalarField {
    ScalarField::Polynomial {
        terms: terms.iter().map(|(c, p)| Monomial { coef: *c, powers: p.to_vec() }).collect(),
    }
}

pub fn euclid_field(half: f64, lambda: ScalarField) -> FinslerField {
    FinslerField::new(Chart::square(2, half), NormField::Constant(NormSpec::euclidean(2)), lambda).unwrap()
}

pub fn flat(half: f64) -> StaticSpacetime {
    StaticSpacetime::new(euclid_field(half, ScalarField::constant(1.0)))
}

pub fn randers_half(half: f64) -> StaticSpacetime {
    let spec = NormSpec::randers(Matrix::identity(2, 2), v2(0.5, 0.0)).unwrap();
    StaticSpacetime::new(FinslerField::uniform(Chart::square(2, half), spec, 1.0).unwrap())
}

/// `Λ(x) = 1 + x₁²` with Euclidean `F`.
pub fn lambda_quadratic(half: f64) -> StaticSpacetime {
    StaticSpacetime::new(euclid_field(half, ScalarField::diagonal_quadratic(1.0, &[1.0, 0.0])))
}

/// Distance from `p` to the polyline through `pts`.
pub fn polyline_distance(p: &Vector, pts: &[Vector]) -> f64 {
    pts.windows(2)
        .map(|w| {
            let d = &w[1] - &w[0];
            let len2 = d.norm_squared();
            let t = if len2 > 0.0 { ((p - &w[0]).dot(&d) / len2).clamp(0.0, 1.0) } else { 0.0 };
            (p - (&w[0] + d * t)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn scene_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenes").join(name)
}

/// One result line per acceptance criterion; a run over the time limit fails.
pub fn verdict(id: u32, name: &str, ok: bool, detail: &str, elapsed: Duration, limit_s: f64) {
    let in_time = elapsed.as_secs_f64() < limit_s;
    let pass = ok && in_time;
    println!(
        "criterion {id:>2} [{name}]: {} | {detail} | {:.2} s (limit {limit_s} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
    assert!(in_time, "criterion {id} ({name}) exceeded {limit_s} s");
}
