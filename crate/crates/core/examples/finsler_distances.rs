//! Optical distances on a grid: asymmetric Randers distances, balls and
//! chronological relations.

use static_finsler::causality::{chrono_related, Direction, Grid, GridOptions};
use static_finsler::*;

fn main() -> Result<()> {
    let randers = NormSpec::randers(Matrix::identity(2, 2), Vector::from_vec(vec![0.5, 0.0]))?;
    let st = StaticSpacetime::new(FinslerField::uniform(Chart::square(2, 2.0), randers, 1.0)?);
    let grid = Grid::optical(&st, GridOptions::with_resolution(100))?;
    let o = Vector::zeros(2);
    let fwd = grid.distance_field(&o, Direction::Forward)?;
    let bwd = grid.distance_field(&o, Direction::Backward)?;
    for p in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]] {
        let p = Vector::from_vec(p.to_vec());
        println!("d(0 → {:?}) = {:.4}   d({:?} → 0) = {:.4}", p.as_slice(), fwd.value_at(&p), p.as_slice(), bwd.value_at(&p));
    }
    let ball = grid.ball(&o, 1.0, Direction::Forward)?;
    println!("forward unit ball: {} nodes (relative tolerance {:.2}%)", ball.len(), 100.0 * grid.relative_tolerance());
    let p = Event::new(0.0, vec![0.0, 0.0]);
    for q in [Event::new(1.0, vec![1.0, 0.0]), Event::new(1.0, vec![-1.0, 0.0])] {
        let r = chrono_related(&grid, &p, &q)?;
        println!("p ≪ ({}, {:?}): {} (margin {:+.4}, grid_tol {:.4})", q.t, q.x.as_slice(), r.chronological, r.margin, r.grid_tol);
    }
    Ok(())
}
