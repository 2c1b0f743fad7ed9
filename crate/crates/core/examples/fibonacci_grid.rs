//! Fibonacci chain x Fibonacci chain with generating vectors at angle
//! 2 pi / 5, written as CSV.

use std::f64::consts::PI;

use aperiodic::bdl::{fibonacci_chain, grid_points, write_grid_csv};

fn main() -> aperiodic::Result<()> {
    let chain = fibonacci_chain(60);
    let theta = 2.0 * PI / 5.0;
    let pts = grid_points(&chain, &chain, [1.0, 0.0], [theta.cos(), theta.sin()], 15.0)?;

    let path = std::env::temp_dir().join("fibonacci_grid.csv");
    write_grid_csv(&pts, std::fs::File::create(&path)?)?;
    println!("{} points in [-15, 15]^2 written to {}", pts.len(), path.display());
    Ok(())
}
