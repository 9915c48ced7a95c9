mod common;

use std::collections::HashSet;

use common::*;
use static_finsler::causality::*;
use static_finsler::scene::Scene;
use static_finsler::*;

fn grid(st: &StaticSpacetime, resolution: usize) -> Grid {
    Grid::optical(st, GridOptions::with_resolution(resolution)).unwrap()
}

#[test]
fn distance_values() {
    let g = grid(&flat(2.0), 100);
    let o = v2(0.0, 0.0);
    let d = g.distance_field(&o, Direction::Forward).unwrap();
    assert_eq!(d.value_at(&o), 0.0);
    assert!((d.value_at(&v2(1.0, 0.0)) - 1.0).abs() <= 0.02);

    let r = grid(&randers_half(2.0), 100);
    let fwd = r.distance_field(&o, Direction::Forward).unwrap();
    let bwd = r.distance_field(&o, Direction::Backward).unwrap();
    assert!((fwd.value_at(&v2(1.0, 0.0)) / 1.5 - 1.0).abs() <= 0.02);
    assert!((bwd.value_at(&v2(1.0, 0.0)) / 0.5 - 1.0).abs() <= 0.02);
    assert_eq!(fwd.value_at(&o), 0.0);
}

#[test]
fn stencil_geometry() {
    assert_eq!(stencil(2, 2).len(), 16);
    assert_eq!(stencil(2, 3).len(), 32);
    assert!((stencil_bound(2, 2) - (1.0 / (0.5f64.atan() / 2.0).cos() - 1.0)).abs() < 1e-12);
    assert!(stencil_bound(2, 3) < stencil_bound(2, 2));
}

#[test]
fn chrono_values() {
    let g = grid(&flat(2.0), 100);
    let p = Event::new(0.0, vec![0.0, 0.0]);
    let a = chrono_related(&g, &p, &Event::new(2.0, vec![1.0, 0.0])).unwrap();
    assert!(a.chronological && (a.margin - 1.0).abs() < 0.02);
    let b = chrono_related(&g, &p, &Event::new(1.0, vec![1.0, 0.0])).unwrap();
    assert!(!b.chronological && b.causal_assuming_simplicity);

    let r = grid(&randers_half(2.0), 100);
    assert!(!chrono_related(&r, &p, &Event::new(1.0, vec![1.0, 0.0])).unwrap().chronological);
    assert!(chrono_related(&r, &p, &Event::new(1.0, vec![-1.0, 0.0])).unwrap().chronological);
    assert!(matches!(chrono_related(&r, &p, &Event::new(1.0, vec![3.0, 0.0])), Err(Error::OutsideChart { .. })));
}

#[test]
fn ball_values() {
    let g = grid(&flat(2.0), 100);
    let o = v2(0.0, 0.0);
    let ball: HashSet<usize> = g.ball(&o, 1.0, Direction::Forward).unwrap().into_iter().collect();
    // reflection x₁ ↦ −x₁ maps the disk to itself, up to one cell
    let h = 4.0 / 100.0;
    for &n in &ball {
        let p = g.node_position(n);
        let mirror = v2(-p[0], p[1]);
        let m = ball.iter().map(|&k| (g.node_position(k) - &mirror).norm()).fold(f64::INFINITY, f64::min);
        assert!(m <= h * 1.5);
    }

    let r = grid(&randers_half(2.0), 100);
    let rb: HashSet<usize> = r.ball(&o, 1.0, Direction::Forward).unwrap().into_iter().collect();
    let near = |x: f64| {
        let p = v2(x, 0.0);
        (0..r.node_count()).min_by(|&a, &b| (r.node_position(a) - &p).norm().total_cmp(&(r.node_position(b) - &p).norm())).unwrap()
    };
    assert!(rb.contains(&near(0.6)));
    assert!(!rb.contains(&near(0.72)));

    assert_eq!(g.ball(&o, 1e-3, Direction::Forward).unwrap().len(), 1);
    let closed = g.closed_ball(&o, 1.0, Direction::Forward).unwrap();
    assert!(closed.len() > ball.len());
}

#[test]
fn simplicity_values() {
    let st = flat(2.0);
    let g = grid(&st, 60);
    let r = causal_simplicity_probe(&st, &g, 10, 42, 1e-6).unwrap();
    assert!(r.all_minimizers_found, "{r:?}");

    // around the Λ dip every verdict is the stated tolerance check, whichever way it goes
    let scene = Scene::load(scene_path("obstacle.toml")).unwrap();
    let st = scene.spacetime().unwrap();
    let g = Grid::optical(&st, scene.grid_options()).unwrap();
    let r = causal_simplicity_probe(&st, &g, 10, scene.seed, 1e-6).unwrap();
    for p in &r.pairs {
        assert_eq!(p.ok, p.shot_length.is_some() && p.gap.abs() <= p.tolerance);
    }
}

#[test]
fn hyperbolicity_values() {
    let big = StaticSpacetime::new(euclid_field(10.0, ScalarField::constant(1.0)));
    let g = grid(&big, 100);
    let o = v2(0.0, 0.0);
    let small = global_hyperbolicity_probe(&g, &o, &o, 1.0, 1.0).unwrap();
    assert!(small.compact_proxy && !small.boundary_contact && small.intersection_size > 0);
    let large = global_hyperbolicity_probe(&g, &o, &o, 15.0, 15.0).unwrap();
    assert!(large.boundary_contact && !large.compact_proxy);

    let scene = Scene::load(scene_path("punctured.toml")).unwrap();
    let st = scene.spacetime().unwrap();
    let g = Grid::optical(&st, scene.grid_options()).unwrap();
    let r = global_hyperbolicity_probe(&g, &v2(-1.0, 0.0), &v2(1.0, 0.0), 1.2, 1.2).unwrap();
    assert!(r.boundary_contact);
    assert!(r.contact_nodes.iter().all(|p| p[0].hypot(p[1]) < 0.5), "contact only at the puncture");
}

#[test]
fn completeness_values() {
    let st = flat(2.0);
    let origins = vec![v2(0.5, 0.5)];
    let r = completeness_probe(&st.base.optical(), &origins, 16, 10.0, 1e-2, CompletenessModel::WholePlane).unwrap();
    assert!(r.forward_complete_proxy && r.backward_complete_proxy);
    assert_eq!(r.inconclusive_rays, r.rays);

    let punctured = Scene::load(scene_path("punctured.toml")).unwrap().spacetime().unwrap();
    let r = completeness_probe(&punctured.base.optical(), &[v2(1.0, 0.0)], 16, 3.0, 1e-2, CompletenessModel::Masked).unwrap();
    assert!(!r.forward_complete_proxy);
    assert!(r.escaping_rays.iter().any(|ray| ray.forward && ray.end == RayEnd::EnteredHole && ray.length < 1.0));

    let blowup = Scene::load(scene_path("blowup.toml")).unwrap().spacetime().unwrap();
    let r = completeness_probe(&blowup.base.optical(), &[v2(1.0, 0.0)], 16, 3.0, 1e-2, CompletenessModel::Masked).unwrap();
    assert!(r.forward_complete_proxy && r.backward_complete_proxy, "{r:?}");
}

#[test]
fn cauchy_graph_values() {
    let st = flat(2.0);
    let pts = st.chart().lattice(5);
    let r = cauchy_graph_check(&st, &ScalarField::affine(0.0, &[0.9, 0.0]), &pts, 1.0, 720).unwrap();
    assert!(r.future_spacelike && r.spacelike);
    let r = cauchy_graph_check(&st, &ScalarField::affine(0.0, &[1.1, 0.0]), &pts, 1.0, 720).unwrap();
    assert!(!r.future_spacelike);
    assert_eq!(r.worst_future.unwrap().v, vec![1.0, 0.0]);
    let r = cauchy_graph_check(&randers_half(2.0), &ScalarField::affine(0.0, &[0.9, 0.0]), &pts, 3.0, 720).unwrap();
    assert!(r.future_spacelike && r.spacelike);
}

#[test]
fn distance_csv_round_trip() {
    let g = grid(&flat(1.0), 10);
    let d = g.distance_field(&v2(0.0, 0.0), Direction::Forward).unwrap();
    let mut out = Vec::new();
    d.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), g.node_count() + 1);
    for (node, row) in rows[1..].iter().enumerate() {
        let last: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(last.to_bits(), d.values[node].to_bits());
    }
}
