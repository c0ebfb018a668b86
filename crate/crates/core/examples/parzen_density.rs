//! Rule-of-thumb bandwidth and box-window densities for a small sample.

use outlying::density::{global_bandwidth, ParzenModel};

fn main() -> outlying::Result<()> {
    let heights = [162.0, 165.5, 168.0, 170.2, 171.0, 171.4, 173.9, 176.0, 181.5, 199.0];
    println!("bandwidth: {:?}", global_bandwidth(&heights)?);

    let model = ParzenModel::fit(&heights)?;
    for (x, d) in model.sample().iter().zip(model.sample_densities()) {
        println!("{x:>6.1}  {d:.4}  ({} points in window)", model.window_count(*x));
    }
    for q in [150.0, 170.0, 190.0] {
        println!("density at {q}: {:.4}", model.density(q));
    }
    Ok(())
}
