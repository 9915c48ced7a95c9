//! Future cone boundary and cone convexity, including the non-convex
//! figure-one cone and its witness chord.

use static_finsler::sampling::unit_directions;
use static_finsler::*;

fn main() -> Result<()> {
    let randers = NormSpec::randers(Matrix::identity(2, 2), Vector::from_vec(vec![0.5, 0.0]))?;
    let st = StaticSpacetime::new(FinslerField::uniform(Chart::square(2, 1.0), randers, 1.0)?);
    let x = Vector::zeros(2);
    println!("Randers cone boundary τ = F°(v):");
    for p in st.cone_boundary(&x, &unit_directions(2, 8))? {
        println!("  v = ({:+.3}, {:+.3})  τ = {:.4}", p.v[0], p.v[1], p.tau);
    }
    let r = st.cone_convexity_check(&x, 10_000, 42)?;
    println!("convex over {} chords: {}", r.chords_tested, r.convex);

    let demo = StaticSpacetime::new(FinslerField::new(Chart::square(2, 1.0), NormField::Constant(NormSpec::figure_one()), ScalarField::constant(1.0))?);
    let r = demo.cone_convexity_check(&x, 10_000, 42)?;
    println!("figure-one cone convex: {}", r.convex);
    if let Some(w) = r.witness {
        println!("  chord {:?} → {:?}", w.a, w.b);
        println!("  midpoint τ {:.6} lies below the boundary {:.6}: L = {:.4} > 0", w.midpoint.0, w.boundary_at_midpoint, w.l_at_midpoint);
    }
    Ok(())
}
