mod common;

use common::*;
use static_finsler::base::curve_length;
use static_finsler::causality::{Direction, Grid, GridOptions};
use static_finsler::geodesics::*;
use static_finsler::*;

#[test]
fn flat_lightlike_line() {
    let st = flat(2.0);
    let traj = integrate_spacetime_geodesic(&st, &Event::new(0.0, vec![0.0, 0.0]), &Tangent::new(1.0, vec![1.0, 0.0]), 1.0, 1e-3).unwrap();
    for p in &traj.samples {
        assert!((p.t - p.s).abs() < 1e-12 && (p.x[0] - p.s).abs() < 1e-12 && p.x[1] == 0.0);
        assert_eq!(p.k, 1.0);
        assert_eq!(p.l, 0.0);
    }
}

#[test]
fn static_line_and_conservation() {
    let st = lambda_quadratic(3.0);
    let vertical = integrate_spacetime_geodesic(&st, &Event::new(0.0, vec![0.0, 0.0]), &Tangent::new(1.0, vec![0.0, 0.0]), 1.0, 1e-3).unwrap();
    assert!(el_residuals(&st, &vertical).into_iter().fold(0.0, f64::max) < 1e-10);

    let t = integrate_spacetime_geodesic(&st, &Event::new(0.0, vec![0.0, 0.0]), &Tangent::new(1.0, vec![1.0, 0.0]), 1.0, 1e-3).unwrap();
    assert!(t.k_drift() < 1e-8, "{}", t.k_drift());
    assert!(t.l_drift() < 1e-7, "{}", t.l_drift());
}

#[test]
fn leaving_the_chart_truncates() {
    let st = flat(1.0);
    let t = integrate_spacetime_geodesic(&st, &Event::new(0.0, vec![0.0, 0.0]), &Tangent::new(1.0, vec![1.0, 0.0]), 5.0, 1e-3).unwrap();
    assert!(t.exited_chart);
    assert!(t.last().x[0] <= 1.0);
}

#[test]
fn base_geodesics() {
    let e = euclid_field(2.0, ScalarField::constant(1.0));
    let t = integrate_base_geodesic(&e, &v2(-1.0, 0.5), &v2(0.6, -0.8), 1.0, 1e-3).unwrap();
    for p in &t.samples {
        assert_eq!(p.l, 1.0);
        let expected = v2(-1.0 + 0.6 * p.s, 0.5 - 0.8 * p.s);
        assert!((&p.x - expected).norm() < 1e-12);
    }

    let r = randers_half(2.0).base;
    let t = integrate_base_geodesic(&r, &v2(-1.0, 0.0), &v2(0.3, 0.7), 1.0, 1e-3).unwrap();
    let f0 = t.samples[0].l;
    assert!(t.samples.iter().all(|p| (p.l - f0).abs() < 1e-9));
    let pts = t.positions();
    let dir = (&pts[pts.len() - 1] - &pts[0]).normalize();
    assert!(pts.iter().all(|p| { let d = p - &pts[0]; (d[0] * dir[1] - d[1] * dir[0]).abs() < 1e-10 }));

    // short optical geodesic of Λ = 1 + x₁² is no longer than the straight chord
    let opt = lambda_quadratic(3.0).base.optical();
    let t = integrate_base_geodesic(&opt, &v2(0.5, 0.0), &v2(0.0, 1.0), 0.8, 1e-3).unwrap();
    let pts = t.positions();
    assert!(pts.last().unwrap()[0] < 0.5, "bends toward lower Λ");
    let along = curve_length(&opt, &pts).unwrap();
    let chord: Vec<Vector> = (0..=1000).map(|k| &pts[0] + (pts.last().unwrap() - &pts[0]) * (k as f64 / 1000.0)).collect();
    assert!(along <= curve_length(&opt, &chord).unwrap() + 1e-4);
}

#[test]
fn fermat_lift_values() {
    let e = euclid_field(2.0, ScalarField::constant(1.0));
    let line = integrate_base_geodesic(&e, &v2(0.0, 0.0), &v2(1.0, 0.0), 1.0, 1e-3).unwrap();
    let flat_st = flat(2.0);
    let lift = fermat_lift(&flat_st, &line, 0.0).unwrap();
    for p in &lift.samples {
        assert!((p.t - p.x[0]).abs() < 1e-12);
        let w = Tangent { tau: p.tau, v: p.v.clone() };
        assert_eq!(flat_st.classify(&p.x, &w).unwrap().kind, CausalKind::Lightlike);
    }

    let st4 = StaticSpacetime::new(euclid_field(2.0, ScalarField::constant(4.0)));
    let line = integrate_base_geodesic(&st4.base.optical(), &v2(0.0, 0.0), &v2(2.0, 0.0), 0.5, 1e-3).unwrap();
    let lift = fermat_lift(&st4, &line, 0.0).unwrap();
    assert!(lift.samples.iter().all(|p| (p.t - p.x[0] / 2.0).abs() < 1e-12));

    let st = lambda_quadratic(3.0);
    let opt = st.base.optical();
    let g = integrate_base_geodesic(&opt, &v2(-0.4, 0.3), &v2(0.8, 0.6), 1.0, 1e-3).unwrap();
    let lift = fermat_lift(&st, &g, 0.0).unwrap();
    assert!(el_residuals(&st, &lift).into_iter().fold(0.0, f64::max) < 1e-5);
}

#[test]
fn shooting_values() {
    let e = euclid_field(2.0, ScalarField::constant(1.0));
    let shot = shoot_base(&e, &ShootingProblem::new(Event::new(0.0, vec![0.0, 0.0]), v2(1.0, 1.0))).unwrap().unwrap();
    assert!((shot.length - 2f64.sqrt()).abs() < 1e-8);

    let r = randers_half(2.0).base;
    let shot = shoot_base(&r, &ShootingProblem::new(Event::new(0.0, vec![0.0, 0.0]), v2(1.0, 0.0))).unwrap().unwrap();
    assert!((shot.length - 1.5).abs() < 1e-6);

    let st = lambda_quadratic(3.0);
    let problem = ShootingProblem::new(Event::new(0.0, vec![-1.0, 0.0]), v2(1.0, 0.0));
    let shot = shoot_to_target(&st, &problem).unwrap().unwrap();
    let opt = st.base.optical();
    let chord: Vec<Vector> = (0..=2000).map(|k| v2(-1.0 + 2.0 * k as f64 / 2000.0, 0.0)).collect();
    assert!(shot.length <= curve_length(&opt, &chord).unwrap() + 1e-6);
    let grid = Grid::optical(&st, GridOptions::with_resolution(120)).unwrap();
    let d = grid.distance_field(&v2(-1.0, 0.0), Direction::Forward).unwrap().value_at(&v2(1.0, 0.0));
    assert!((shot.length / d - 1.0).abs() < 0.02, "{} vs {d}", shot.length);
}

#[test]
fn variation_probe_values() {
    let st = flat(2.0);
    let bent = Trajectory::polyline(&st, &[Event::new(0.0, vec![0.0, 0.0]), Event::new(1.0, vec![0.6, 0.8]), Event::new(2.0, vec![1.6, 0.8])], 400).unwrap();
    let r = timelike_variation_probe(&st, &bent).unwrap();
    assert!(r.alpha > 0.0);
    assert!((r.first_variation + r.alpha).abs() < 1e-4, "{r:?}");

    let straight = Trajectory::polyline(&st, &[Event::new(0.0, vec![0.0, 0.0]), Event::new(1.0, vec![1.0, 0.0])], 400).unwrap();
    assert_eq!(timelike_variation_probe(&st, &straight), Err(Error::IsGeodesic { timelike: false }));

    let timelike = Trajectory::polyline(&st, &[Event::new(0.0, vec![0.0, 0.0]), Event::new(1.0, vec![0.3, 0.2]), Event::new(2.0, vec![0.1, 0.6])], 400).unwrap();
    assert!(timelike_variation_probe(&st, &timelike).unwrap().alpha > 0.0);
}

#[test]
fn trajectory_csv_has_header() {
    let st = flat(2.0);
    let t = integrate_spacetime_geodesic(&st, &Event::new(0.0, vec![0.0, 0.0]), &Tangent::new(1.0, vec![0.5, 0.0]), 0.01, 1e-3).unwrap();
    let mut out = Vec::new();
    t.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("s,"));
    assert_eq!(lines.count(), t.len());
}
