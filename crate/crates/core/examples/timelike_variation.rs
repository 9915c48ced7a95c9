//! A broken lightlike curve is not a geodesic: the variation it admits makes
//! it timelike to first order.

use static_finsler::geodesics::{timelike_variation_probe, Trajectory};
use static_finsler::*;

fn main() -> Result<()> {
    let st = StaticSpacetime::new(FinslerField::uniform(Chart::square(2, 2.0), NormSpec::euclidean(2), 1.0)?);
    let corner = [Event::new(0.0, vec![0.0, 0.0]), Event::new(1.0, vec![0.6, 0.8]), Event::new(2.0, vec![1.6, 0.8])];
    let curve = Trajectory::polyline(&st, &corner, 400)?;
    let r = timelike_variation_probe(&st, &curve)?;
    println!("α = {:.6}", r.alpha);
    println!("∂L/∂w at w = 0: mean {:.6}, worst pointwise deviation from −α {:.2e}", r.first_variation, r.pointwise_deviation);
    println!("dE/dw = {:.6}; Z = sin({}πu) e{}", r.energy_derivative, r.z_mode, r.z_component + 1);

    let straight = Trajectory::polyline(&st, &[Event::new(0.0, vec![0.0, 0.0]), Event::new(1.0, vec![1.0, 0.0])], 100)?;
    match timelike_variation_probe(&st, &straight) {
        Err(e) => println!("straight lightlike line: {e}"),
        Ok(r) => println!("straight line unexpectedly admits α = {}", r.alpha),
    }
    Ok(())
}
