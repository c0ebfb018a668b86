//! Mixture fit with component annihilation, and the interval around a value.

use outlying::intervals::{em_fit_observed, natural_interval, EmConfig};

fn main() -> outlying::Result<()> {
    let mut xs = Vec::new();
    for (centre, count) in [(1.0, 60), (4.0, 40), (9.0, 80)] {
        xs.extend((0..count).map(|i| centre + 0.8 * (i as f64 / count as f64 - 0.5)));
    }

    let cfg = EmConfig { annihilation_threshold: 15.0, ..EmConfig::default().with_seed(7) };
    let state = em_fit_observed(&xs, &cfg, |step| {
        println!("iteration {:>3}: {:>2} components, log-likelihood {:.3}", step.iteration, step.weights.len(), step.log_likelihood);
    })?;
    println!("started with {}, kept {}", state.initial_components, state.components());
    for j in 0..state.components() {
        println!("  mean {:.3}  sd {:.3}  weight {:.3}", state.locations[j], state.bandwidths[j], state.weights[j]);
    }
    let iv = natural_interval(&xs, 4.0, &state)?;
    println!("natural interval of 4.0: [{:.3}, {:.3}]", iv.lo, iv.hi);
    Ok(())
}
