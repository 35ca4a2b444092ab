//! Minimize a 5-d sphere with FOX and print the convergence curve.
//!
//!     cargo run --release --example sphere

use foxann::fox::{self, ExplorationRule, FoxParams, SearchBounds};

fn main() -> foxann::Result<()> {
    let bounds = SearchBounds::uniform(5, -5.0, 5.0)?;
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();

    for rule in [ExplorationRule::GaussianWalk, ExplorationRule::Multiplicative] {
        let params = FoxParams {
            exploration: rule,
            ..FoxParams::default()
        };
        let out = fox::optimize(sphere, &bounds, &params, 42)?;
        println!("{}:", rule.name());
        for (i, f) in out.fitness_history.iter().enumerate().filter(|(i, _)| i % 10 == 0) {
            println!("  iter {:>3}  best {f:.3e}", i + 1);
        }
        println!("  final {:.3e} at {:?}", out.best_fitness, out.best_position);
    }
    Ok(())
}
