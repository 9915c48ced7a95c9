//! Light rays project onto optical geodesics, and optical geodesics lift
//! back to lightlike spacetime geodesics.

use static_finsler::geodesics::{el_residuals, fermat_lift, integrate_base_geodesic, integrate_spacetime_geodesic};
use static_finsler::*;

fn main() -> Result<()> {
    let st = StaticSpacetime::new(FinslerField::new(
        Chart::square(2, 3.0),
        NormField::Constant(NormSpec::euclidean(2)),
        ScalarField::diagonal_quadratic(1.0, &[1.0, 0.0]),
    )?);
    let optical = st.base.optical();
    let x0 = Vector::from_vec(vec![0.3, -0.2]);
    let v0 = Vector::from_vec(vec![1.0, 0.5]);
    let tau = optical.eval(&x0, &v0);
    let ray = integrate_spacetime_geodesic(&st, &Event { t: 0.0, x: x0.clone() }, &Tangent { tau, v: v0.clone() }, 1.0, 1e-3)?;
    let base = integrate_base_geodesic(&optical, &x0, &(&v0 / tau), 2.0, 1e-3)?;
    let base_pts = base.positions();
    let sup = ray
        .positions()
        .iter()
        .map(|p| base_pts.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0f64, f64::max);
    println!("light ray vs optical geodesic: max gap {sup:.2e} (nearest sample)");

    let lift = fermat_lift(&st, &base, 0.0)?;
    let worst = el_residuals(&st, &lift).into_iter().fold(0.0, f64::max);
    let end = lift.last();
    println!("lift ends at t = {:.6}, x = {:?}; EL residual {worst:.2e}", end.t, end.x.as_slice());
    Ok(())
}
