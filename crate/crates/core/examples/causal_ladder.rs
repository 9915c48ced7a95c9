//! Causal-ladder probes on Λ = 1 + x₁²: causal simplicity, ball
//! compactness, completeness rays and a Cauchy graph.

use static_finsler::causality::*;
use static_finsler::*;

fn main() -> Result<()> {
    let st = StaticSpacetime::new(FinslerField::new(
        Chart::square(2, 3.0),
        NormField::Constant(NormSpec::euclidean(2)),
        ScalarField::diagonal_quadratic(1.0, &[1.0, 0.0]),
    )?);
    let grid = Grid::optical(&st, GridOptions { resolution: 120, stencil_radius: 3 })?;

    let s = causal_simplicity_probe(&st, &grid, 10, 42, 1e-6)?;
    println!("causal simplicity: {} of {} pairs joined by a minimizing geodesic", s.pairs.len() - s.failures.len(), s.pairs.len());

    let h = global_hyperbolicity_probe(&grid, &Vector::from_vec(vec![-1.0, 0.0]), &Vector::from_vec(vec![1.0, 0.0]), 1.2, 1.2)?;
    println!("ball intersection: {} nodes, compact proxy {}", h.intersection_size, h.compact_proxy);

    let c = completeness_probe(&st.base.optical(), &[Vector::zeros(2)], 16, 5.0, 1e-2, CompletenessModel::WholePlane)?;
    println!("completeness: forward {}, backward {} ({} of {} rays left the window)", c.forward_complete_proxy, c.backward_complete_proxy, c.inconclusive_rays, c.rays);

    let f = ScalarField::affine(0.0, &[0.3, 0.0]);
    let alpha = st.base.optical().norm_at(&Vector::zeros(2)).reversibility_constant(64);
    let g = cauchy_graph_check(&st, &f, &st.chart().lattice(9), alpha, 720)?;
    println!("graph of f = 0.3x₁ (|df|·√Λ ≤ 0.3·√10 < 1): future spacelike {}, spacelike {}", g.future_spacelike, g.spacelike);
    Ok(())
}
