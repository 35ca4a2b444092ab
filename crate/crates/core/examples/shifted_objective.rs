//! FOX on an objective whose optimum is away from the origin, with a
//! per-iteration observer. Shows how far the search drifts from the
//! origin-centred moves it makes.
//!
//!     cargo run --release --example shifted_objective

use foxann::fox::{self, FoxParams, SearchBounds};

fn main() -> foxann::Result<()> {
    let target = [1.5, -2.0, 0.5];
    let objective = |x: &[f64]| x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    let bounds = SearchBounds::uniform(3, -4.0, 4.0)?;
    let params = FoxParams {
        population_size: 40,
        max_iterations: 200,
        ..FoxParams::default()
    };

    let out = fox::optimize_observed(objective, &bounds, &params, 7, |iter, pop| {
        if (iter + 1) % 40 == 0 {
            println!(
                "iter {:>3}: best {:.4e}, min_t {:.4}",
                iter + 1,
                pop.best_fitness,
                pop.min_t
            );
        }
    })?;
    println!("target {target:?}");
    println!("found  {:.4?}", out.best_position);
    Ok(())
}
