//! Geodesics of −Λ dt² + F² with Λ = 1 + x₁²: conservation of Λθ̇ and L,
//! and the static vertical line at a critical point of Λ.

use static_finsler::geodesics::{el_residuals, integrate_spacetime_geodesic};
use static_finsler::*;

fn main() -> Result<()> {
    let field = FinslerField::new(
        Chart::square(2, 3.0),
        NormField::Constant(NormSpec::euclidean(2)),
        ScalarField::diagonal_quadratic(1.0, &[1.0, 0.0]),
    )?;
    let st = StaticSpacetime::new(field);
    let start = Event::new(0.0, vec![0.3, -0.2]);
    let w = Tangent::new(1.0, vec![1.0, 0.0]);
    println!("step      drift(Λθ̇)   drift(L)");
    for h in [0.1, 0.05, 0.025, 0.0125, 1e-3] {
        let t = integrate_spacetime_geodesic(&st, &start, &w, 1.0, h)?;
        println!("{h:<8}  {:.3e}   {:.3e}", t.k_drift(), t.l_drift());
    }
    let line = integrate_spacetime_geodesic(&st, &Event::new(0.0, vec![0.0, 0.0]), &Tangent::new(1.0, vec![0.0, 0.0]), 1.0, 1e-3)?;
    let worst = el_residuals(&st, &line).into_iter().fold(0.0, f64::max);
    println!("vertical line at dΛ = 0: end {:?}, EL residual {worst:.2e}", line.last().x.as_slice());
    Ok(())
}
