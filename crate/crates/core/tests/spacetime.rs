mod common;

use approx::assert_relative_eq;
use common::*;
use static_finsler::*;

fn sstk(lam: f64, w1: f64) -> StaticSpacetime {
    StaticSpacetime::sstk(
        Chart::square(2, 2.0),
        NormField::Constant(NormSpec::euclidean(2)),
        ScalarField::constant(lam),
        vec![ScalarField::constant(w1), ScalarField::constant(0.0)],
    )
    .unwrap()
}

fn figure_one() -> StaticSpacetime {
    StaticSpacetime::new(FinslerField::new(Chart::square(2, 1.0), NormField::Constant(NormSpec::figure_one()), ScalarField::constant(1.0)).unwrap())
}

fn class(kind: CausalKind, orientation: Orientation) -> CausalClass {
    CausalClass { kind, orientation }
}

#[test]
fn lagrangian_values() {
    let st = flat(2.0);
    let o = v2(0.0, 0.0);
    assert_eq!(st.eval_l(&o, &Tangent::new(1.0, vec![1.0, 0.0])).unwrap(), 0.0);
    assert_eq!(st.eval_l(&o, &Tangent::new(2.0, vec![1.0, 0.0])).unwrap(), -3.0);
    assert_eq!(sstk(-1.0, -2.0).eval_l(&o, &Tangent::new(1.0, vec![1.0, 0.0])).unwrap(), -2.0);
}

#[test]
fn spacetime_tensor_values() {
    let o = v2(0.0, 0.0);
    let w = Tangent::new(0.7, vec![0.3, -1.0]);
    let g = flat(2.0).spacetime_tensor(&o, &w).unwrap();
    assert_eq!(g, Matrix::from_diagonal(&Vector::from_vec(vec![-1.0, 1.0, 1.0])));

    let st4 = StaticSpacetime::new(euclid_field(2.0, ScalarField::constant(4.0)));
    let g = st4.spacetime_tensor(&o, &w).unwrap();
    assert_eq!(g, Matrix::from_diagonal(&Vector::from_vec(vec![-4.0, 1.0, 1.0])));
    let eig = g.symmetric_eigen().eigenvalues;
    assert_eq!(eig.iter().filter(|e| **e < 0.0).count(), 1);

    let r = randers_half(2.0);
    let g = r.spacetime_tensor(&o, &w).unwrap();
    let block = g.view((1, 1), (2, 2)).into_owned();
    let gv = r.base.norm_at(&o).fundamental_tensor(&w.v).unwrap().g;
    assert!((block - gv).amax() < 1e-8);

    assert_eq!(flat(2.0).spacetime_tensor(&o, &Tangent::new(1.0, vec![0.0, 0.0])), Err(Error::OnExceptionalBundle));
}

#[test]
fn classification_values() {
    let o = v2(0.0, 0.0);
    let st = flat(2.0);
    assert_eq!(st.classify(&o, &Tangent::new(2.0, vec![1.0, 0.0])).unwrap(), class(CausalKind::Timelike, Orientation::Future));
    assert_eq!(st.classify(&o, &Tangent::new(-1.0, vec![1.0, 0.0])).unwrap(), class(CausalKind::Lightlike, Orientation::Past));
    assert_eq!(
        randers_half(2.0).classify(&o, &Tangent::new(1.5, vec![1.0, 0.0])).unwrap(),
        class(CausalKind::Lightlike, Orientation::Future)
    );
    assert_eq!(st.classify(&o, &Tangent::new(1.0, vec![0.0, 0.0])).unwrap().kind, CausalKind::Timelike);
    assert_eq!(st.classify(&o, &Tangent::new(0.0, vec![0.0, 0.0])).unwrap().kind, CausalKind::Zero);
    assert_eq!(st.classify(&o, &Tangent::new(0.5, vec![1.0, 0.0])).unwrap().kind, CausalKind::Spacelike);
    assert!(matches!(st.classify(&v2(3.0, 0.0), &Tangent::new(1.0, vec![1.0, 0.0])), Err(Error::OutsideChart { .. })));
}

#[test]
fn reverse_cs_values() {
    let st = flat(2.0);
    let o = v2(0.0, 0.0);
    let gap = |a: Tangent, b: Tangent| st.reverse_cs_gap(&o, &a, &b).unwrap();
    assert!(gap(Tangent::new(1.0, vec![0.5, 0.0]), Tangent::new(1.0, vec![0.5, 0.0])).abs() < 1e-15);
    assert_relative_eq!(gap(Tangent::new(2.0, vec![1.0, 0.0]), Tangent::new(2.0, vec![0.0, 1.0])), 1.0, max_relative = 1e-15);
    assert_relative_eq!(gap(Tangent::new(1.0, vec![0.0, 0.0]), Tangent::new(2.0, vec![1.0, 0.0])), 2.0 - 3f64.sqrt(), max_relative = 1e-14);
    assert!(matches!(
        st.reverse_cs_gap(&o, &Tangent::new(0.5, vec![1.0, 0.0]), &Tangent::new(1.0, vec![0.0, 0.0])),
        Err(Error::NotCausal { .. })
    ));
}

#[test]
fn cone_point_values() {
    let o = v2(0.0, 0.0);
    assert_eq!(flat(2.0).cone_point(&o, &v2(1.0, 0.0)).unwrap().tau, 1.0);
    let st4 = StaticSpacetime::new(euclid_field(2.0, ScalarField::constant(4.0)));
    assert_eq!(st4.cone_point(&o, &v2(0.0, 1.0)).unwrap().tau, 0.5);
    let demo = figure_one();
    assert_relative_eq!(demo.cone_point(&o, &v2(1.0, 0.0)).unwrap().tau, 1.0, max_relative = 1e-15);
    assert_relative_eq!(demo.cone_point(&o, &v2(0.0, 1.0)).unwrap().tau, (-2.0f64).exp(), max_relative = 1e-14);
}

#[test]
fn cone_convexity_values() {
    let o = v2(0.0, 0.0);
    assert!(flat(2.0).cone_convexity_check(&o, 10_000, 42).unwrap().convex);
    assert!(randers_half(2.0).cone_convexity_check(&o, 10_000, 42).unwrap().convex);
    let r = figure_one().cone_convexity_check(&o, 10_000, 42).unwrap();
    assert!(!r.convex);
    let w = r.witness.unwrap();
    assert!(w.l_at_midpoint > 0.0 && w.midpoint.0 < w.boundary_at_midpoint);
}

#[test]
fn jc_values() {
    let o = v2(0.0, 0.0);
    assert!(flat(2.0).jc_convexity_check(&o, 1.0, 64).unwrap().strictly_convex);
    let r = randers_half(2.0).jc_convexity_check(&o, 0.5, 64).unwrap();
    assert!(r.strictly_convex && r.chord_ok && r.min_hessian_eigenvalue > 0.0 && r.formula_deviation < 1e-5, "{r:?}");
}

#[test]
fn omega_norm_values() {
    let o = v2(0.0, 0.0);
    assert_relative_eq!(sstk(1.0, 0.5).omega_norm(&o, 720).unwrap(), 0.5, max_relative = 1e-6);
    assert_eq!(sstk(1.0, 0.0).omega_norm(&o, 720).unwrap(), 0.0);

    let spec = NormSpec::randers(Matrix::identity(2, 2), v2(0.5, 0.0)).unwrap();
    let st = StaticSpacetime::sstk(Chart::square(2, 2.0), NormField::Constant(spec), ScalarField::constant(1.0), vec![ScalarField::constant(0.3), ScalarField::constant(0.0)]).unwrap();
    // brute force: smallest dual length √(ω g_u⁻¹ ωᵀ) over directions u
    let dirs = static_finsler::sampling::unit_directions(2, 720);
    let spec = st.base.norm_at(&o);
    let oracle = dirs
        .iter()
        .map(|u| {
            let g = spec.fundamental_tensor(u).unwrap();
            let inv = g.g.clone().try_inverse().unwrap();
            let w = v2(0.3, 0.0);
            (w.transpose() * inv * &w)[(0, 0)].sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    assert!((st.omega_norm(&o, 720).unwrap() - oracle).abs() < 1e-3);
}

#[test]
fn conic_values() {
    let o = v2(0.0, 0.0);
    let m = sstk(1.0, 0.0).conic_metrics(&o, &v2(1.0, 0.0)).unwrap();
    assert_eq!((m.f_o, m.f_o_l), (Some(1.0), None));
    let m = sstk(-1.0, -2.0).conic_metrics(&o, &v2(1.0, 0.0)).unwrap();
    assert!((m.f_o.unwrap() - (2.0 - 3f64.sqrt())).abs() < 1e-12);
    assert!((m.f_o_l.unwrap() - (2.0 + 3f64.sqrt())).abs() < 1e-12);
    // Λ = −1, ω = −dx¹ fails Λ + ‖ω‖ > 0, so the equality case is checked pointwise
    let m = static_finsler::spacetime::conic_pair(-1.0, -1.0, 1.0);
    assert_eq!((m.f_o, m.f_o_l), (Some(1.0), Some(1.0)));
    // a static spacetime is the ω = 0 case
    assert_eq!(flat(2.0).conic_metrics(&o, &v2(1.0, 0.0)).unwrap().f_o, Some(1.0));
}

#[test]
fn sstk_admissibility() {
    let r = StaticSpacetime::sstk(
        Chart::square(2, 1.0),
        NormField::Constant(NormSpec::euclidean(2)),
        ScalarField::constant(-1.0),
        vec![ScalarField::constant(0.5), ScalarField::constant(0.0)],
    );
    assert!(matches!(r, Err(Error::SstkInadmissible { .. })));
}
