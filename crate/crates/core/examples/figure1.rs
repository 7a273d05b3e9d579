// Sample-complexity curves over a grid of w, written as CSV.
//
// ```not_rust
// cargo run --example figure1 > curves.csv
// ```

use werner_distill::bounds::{default_attenuation, figure1_curves, linear_grid, parse_figure1_csv};

pub fn run_example() -> werner_distill::Result<()> {
    let grid = linear_grid(0.0, 0.95, 0.05)?;
    let fig = figure1_curves(0.1, 0.01, default_attenuation(), &grid)?;
    let csv = fig.to_csv();
    print!("{csv}");
    assert_eq!(parse_figure1_csv(&csv)?.len(), grid.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> werner_distill::Result<()> {
    run_example()
}
