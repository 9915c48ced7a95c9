//! Stationary splittings with Λ < 0: the two conic metrics F° ≤ F°ₗ that
//! bound the future cone from below and above.

use static_finsler::sampling::unit_directions;
use static_finsler::*;

fn main() -> Result<()> {
    let st = StaticSpacetime::sstk(
        Chart::square(2, 1.0),
        NormField::Constant(NormSpec::euclidean(2)),
        ScalarField::constant(-1.0),
        vec![ScalarField::constant(-2.0), ScalarField::constant(0.0)],
    )?;
    let x = Vector::zeros(2);
    println!("‖ω‖ = {:.4}", st.omega_norm(&x, 720)?);
    println!("      v            F°        F°ₗ");
    for v in unit_directions(2, 12) {
        let m = st.conic_metrics(&x, &v)?;
        let show = |t: Option<f64>| t.map_or("     -    ".to_string(), |t| format!("{t:10.6}"));
        println!("({:+.3}, {:+.3})  {}  {}", v[0], v[1], show(m.f_o), show(m.f_o_l));
    }
    Ok(())
}
