//! Deterministic direction sampling and small scalar optimizers used by the
//! sup/inf-type operations (reversibility constant, `‖ω‖ₓ`, cone sweeps).

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::RngExt;

use crate::Vector;

/// Unit directions covering the sphere `S^{n-1}`.
///
/// * `n = 1`: `{+1, -1}` regardless of `count`.
/// * `n = 2`: uniform angle grid `θ_k = 2πk/count`.
/// * `n = 3`: Fibonacci sphere.
/// * `n ≥ 4`: normalized Gaussian samples from a fixed seed.
pub fn unit_directions(n: usize, count: usize) -> Vec<Vector> {
    match n {
        0 => Vec::new(),
        1 => vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
        2 => (0..count)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / count as f64;
                DVector::from_vec(vec![th.cos(), th.sin()])
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * k as f64;
                    DVector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..count)
                .map(|_| {
                    let v = DVector::from_fn(n, |_, _| gaussian(&mut rng));
                    let norm = v.norm();
                    v / norm
                })
                .collect()
        }
    }
}

/// Unit vector at angle `theta` in the plane.
pub fn planar(theta: f64) -> Vector {
    DVector::from_vec(vec![theta.cos(), theta.sin()])
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iterations: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iterations {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximize `f` over the unit sphere: coarse sweep over `samples` directions,
/// then local refinement (golden section on the angle in 2D, shrinking compass
/// search on the tangent space otherwise). Returns the best direction and value.
pub fn sphere_max(n: usize, samples: usize, f: impl Fn(&Vector) -> f64) -> (Vector, f64) {
    let dirs = unit_directions(n, samples);
    let (best_idx, best_val) = dirs
        .iter()
        .map(&f)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let mut best = dirs[best_idx].clone();
    let mut best_val = best_val;
    match n {
        1 => {}
        2 => {
            let th0 = std::f64::consts::TAU * best_idx as f64 / samples as f64;
            let dth = std::f64::consts::TAU / samples as f64;
            let (th, val) = golden_max(|th| f(&planar(th)), th0 - dth, th0 + dth, 80);
            if val > best_val {
                best = planar(th);
                best_val = val;
            }
        }
        _ => {
            let mut step = 0.5;
            while step > 1e-10 {
                let mut improved = false;
                for i in 0..n {
                    for sign in [1.0, -1.0] {
                        let mut cand = best.clone();
                        cand[i] += sign * step;
                        let norm = cand.norm();
                        if norm == 0.0 {
                            continue;
                        }
                        cand /= norm;
                        let val = f(&cand);
                        if val > best_val {
                            best = cand;
                            best_val = val;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
        }
    }
    (best, best_val)
}

/// Box–Muller standard normal sample.
pub(crate) fn gaussian<R: rand::Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        for n in 1..6 {
            for d in unit_directions(n, 37) {
                assert!((d.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3), -1.0, 1.0, 100);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn sphere_max_3d_refines_beyond_grid() {
        let target = DVector::from_vec(vec![0.2, -0.5, 0.7]).normalize();
        let (best, val) = sphere_max(3, 50, |u| u.dot(&target));
        assert!((val - 1.0).abs() < 1e-12);
        assert!((best - target).norm() < 1e-5);
    }
}
