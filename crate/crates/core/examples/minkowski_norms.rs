//! Quadratic and Randers norms: values, momenta, fundamental tensors,
//! Cartan symmetry and the reversibility constant.

use static_finsler::{Matrix, NormSpec, Vector};

fn main() -> static_finsler::Result<()> {
    let v = Vector::from_vec(vec![1.0, 0.5]);
    let norms = [
        ("euclidean", NormSpec::euclidean(2)),
        ("quadratic diag(4,1)", NormSpec::quadratic(Matrix::from_diagonal(&Vector::from_vec(vec![4.0, 1.0])))?),
        ("randers b=(0.5,0)", NormSpec::randers(Matrix::identity(2, 2), Vector::from_vec(vec![0.5, 0.0]))?),
    ];
    for (name, spec) in &norms {
        let g = spec.fundamental_tensor(&v)?;
        println!("{name}");
        println!("  F(v) = {:.6}, F(-v) = {:.6}", spec.eval(&v), spec.eval(&-&v));
        println!("  momentum = {:?}", spec.momentum(&v)?.as_slice());
        println!("  g_v = {:?}, min eigenvalue {:.4}", g.g.as_slice(), g.min_eigenvalue());
        println!("  Cartan residual {:.2e}", spec.cartan_symmetry_residual(&v)?);
        println!("  reversibility constant {:.6}", spec.reversibility_constant(64));
    }
    // the figure-one metric is not a vertical Hessian
    let demo = NormSpec::figure_one();
    let worst = static_finsler::sampling::unit_directions(2, 64)
        .iter()
        .map(|u| demo.cartan_symmetry_residual(u).unwrap())
        .fold(0.0f64, f64::max);
    println!("figure-one demo: largest Cartan residual over 64 directions {worst:.3}");
    Ok(())
}
