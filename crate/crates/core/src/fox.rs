//! The FOX optimizer.
//!
//! A population of agents ("foxes") searches a box-bounded real vector space.
//! Each round every agent either exploits around the incumbent best position
//! (a jump whose length comes from a simulated sound travel time) or explores
//! with a random walk scaled by the smallest average travel time seen so far
//! and a schedule coefficient `a`. The choice is a fair coin flip per agent.
//!
//! The exploitation jump is a scaled copy of the incumbent (at most about
//! half of it), so half of all moves land close to the origin. Objectives
//! whose optimum sits at zero are therefore unusually easy for FOX.
//!
//! Randomness is drawn from one ChaCha stream per (iteration, agent), so the
//! result does not depend on how many threads evaluate the objective.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Box constraints for the search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch {
                what: "upper bounds",
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidParameter(
                "search dimension must be at least 1".into(),
            ));
        }
        for (d, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            // `!(lo < hi)` also rejects NaN.
            if !(lo < hi) {
                return Err(Error::InvalidBounds {
                    dimension: d,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same `[lower, upper]` interval in every dimension.
    pub fn uniform(dimension: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dimension], vec![upper; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.dimension()
            && position
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&x, (&lo, &hi))| lo <= x && x <= hi)
    }

    fn clip_in_place(&self, position: &mut [f64]) {
        for ((x, &lo), &hi) in position.iter_mut().zip(&self.lower).zip(&self.upper) {
            *x = x.clamp(lo, hi);
        }
    }
}

/// Clamps every component of `position` into `bounds`.
pub fn clip(position: &[f64], bounds: &SearchBounds) -> Result<Vec<f64>> {
    if position.len() != bounds.dimension() {
        return Err(Error::LengthMismatch {
            what: "position",
            expected: bounds.dimension(),
            actual: position.len(),
        });
    }
    let mut out = position.to_vec();
    bounds.clip_in_place(&mut out);
    Ok(out)
}

/// Schedule for the exploration coefficient `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ASchedule {
    /// `a = 2 (1 - iter / max_iter)`, shrinking from 2 towards 0.
    #[default]
    Decreasing,
    /// `a = 2 (iter - 1 / max_iter)`, which grows with `iter`.
    Growing,
}

impl ASchedule {
    pub fn value(self, iter: usize, max_iter: usize) -> f64 {
        let (iter, max_iter) = (iter as f64, max_iter as f64);
        match self {
            ASchedule::Decreasing => 2.0 * (1.0 - iter / max_iter),
            ASchedule::Growing => 2.0 * (iter - 1.0 / max_iter),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ASchedule::Decreasing => "decreasing",
            ASchedule::Growing => "growing",
        }
    }
}

impl std::str::FromStr for ASchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decreasing" => Ok(ASchedule::Decreasing),
            "growing" => Ok(ASchedule::Growing),
            other => Err(Error::InvalidParameter(format!(
                "unknown a-schedule `{other}` (valid: decreasing, growing)"
            ))),
        }
    }
}

/// Form of the exploration move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplorationRule {
    /// `best * U(0,1) * min_t * a`, componentwise. Every component keeps its
    /// sign and shrinks, so the search contracts towards the origin.
    Multiplicative,
    /// `best + N(0,1) * min_t * a`, componentwise: a Gaussian walk around the
    /// incumbent whose step size follows the `a` schedule.
    #[default]
    GaussianWalk,
}

impl ExplorationRule {
    pub fn name(self) -> &'static str {
        match self {
            ExplorationRule::Multiplicative => "multiplicative",
            ExplorationRule::GaussianWalk => "gaussian_walk",
        }
    }
}

impl std::str::FromStr for ExplorationRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multiplicative" => Ok(ExplorationRule::Multiplicative),
            "gaussian_walk" | "gaussian" => Ok(ExplorationRule::GaussianWalk),
            other => Err(Error::InvalidParameter(format!(
                "unknown exploration rule `{other}` (valid: multiplicative, gaussian_walk)"
            ))),
        }
    }
}

/// Tuning constants of the optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoxParams {
    pub population_size: usize,
    pub max_iterations: usize,
    /// Jump scale when `p > p_threshold`.
    pub c1: f64,
    /// Jump scale when `p <= p_threshold`.
    pub c2: f64,
    pub p_threshold: f64,
    /// Agents with `r >= r_threshold` exploit, the rest explore.
    pub r_threshold: f64,
    /// Gravitational constant used in the jump height.
    pub gravity: f64,
    pub a_schedule: ASchedule,
    pub exploration: ExplorationRule,
}

impl Default for FoxParams {
    fn default() -> Self {
        Self {
            population_size: 30,
            max_iterations: 100,
            c1: 0.18,
            c2: 0.82,
            p_threshold: 0.18,
            r_threshold: 0.5,
            gravity: 9.81,
            a_schedule: ASchedule::Decreasing,
            exploration: ExplorationRule::GaussianWalk,
        }
    }
}

impl FoxParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.population_size == 0 {
            return bad("population_size must be at least 1".into());
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(0.0 < self.c1 && self.c1 < self.c2 && self.c2 < 1.0) {
            return bad(format!(
                "expected 0 < c1 < c2 < 1, got c1 = {}, c2 = {}",
                self.c1, self.c2
            ));
        }
        for (name, v) in [
            ("p_threshold", self.p_threshold),
            ("r_threshold", self.r_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !(self.gravity.is_finite() && self.gravity > 0.0) {
            return bad(format!("gravity must be positive, got {}", self.gravity));
        }
        Ok(())
    }
}

/// State of a running search.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxPopulation {
    /// One row per agent.
    pub positions: Vec<Vec<f64>>,
    /// Fitness of each row of `positions`; `NaN` until first evaluated.
    pub fitnesses: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Running minimum of the average travel time `tt` over all exploitation
    /// moves; `+inf` until the first one happens.
    pub min_t: f64,
}

impl FoxPopulation {
    /// Replaces the incumbent with any agent whose fitness is strictly lower.
    /// Agents are scanned in index order, so ties keep the earlier best.
    fn update_best(&mut self) {
        for (position, &fitness) in self.positions.iter().zip(&self.fitnesses) {
            if fitness < self.best_fitness {
                self.best_fitness = fitness;
                self.best_position.clone_from(position);
            }
        }
    }
}

const INIT_STREAM: u64 = u64::MAX;

/// Draws every agent uniformly inside `bounds`.
pub fn init_population(
    params: &FoxParams,
    bounds: &SearchBounds,
    seed: u64,
) -> Result<FoxPopulation> {
    params.validate()?;
    let positions: Vec<Vec<f64>> = (0..params.population_size)
        .map(|agent| {
            let mut rng = seed::rng(seed::derive(seed, &[INIT_STREAM, agent as u64]));
            bounds
                .lower()
                .iter()
                .zip(bounds.upper())
                .map(|(&lo, &hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect()
        })
        .collect();
    Ok(FoxPopulation {
        best_position: positions[0].clone(),
        fitnesses: vec![f64::NAN; positions.len()],
        positions,
        best_fitness: f64::INFINITY,
        min_t: f64::INFINITY,
    })
}

/// Result of one exploitation move.
#[derive(Debug, Clone, PartialEq)]
pub struct Exploitation {
    pub position: Vec<f64>,
    /// Average of the sampled travel times.
    pub tt: f64,
}

/// Exploitation with its random inputs supplied by the caller.
///
/// `time` holds the per-dimension sound travel times (strictly positive) and
/// `p` selects between the `c1` and `c2` jump scales.
pub fn exploitation_step(
    best_position: &[f64],
    time: &[f64],
    p: f64,
    params: &FoxParams,
) -> Exploitation {
    debug_assert_eq!(best_position.len(), time.len());
    let tt = time.iter().sum::<f64>() / time.len() as f64;
    let t = tt / 2.0;
    let jump = 0.5 * params.gravity * t * t;
    let c = if p > params.p_threshold {
        params.c1
    } else {
        params.c2
    };
    let position = best_position
        .iter()
        .zip(time)
        .map(|(&best, &time)| {
            let sound_speed = best / time;
            let sound_distance = sound_speed * time;
            let fox_to_prey = 0.5 * sound_distance;
            fox_to_prey * jump * c
        })
        .collect();
    Exploitation { position, tt }
}

pub fn exploitation_move<R: Rng + ?Sized>(
    best_position: &[f64],
    params: &FoxParams,
    rng: &mut R,
) -> Exploitation {
    // 1 - U[0,1) lies in (0, 1], so the division by `time` is always safe.
    let time: Vec<f64> = (0..best_position.len())
        .map(|_| 1.0 - rng.random::<f64>())
        .collect();
    let p = rng.random::<f64>();
    exploitation_step(best_position, &time, p, params)
}

/// Exploration with its random vector supplied by the caller.
pub fn exploration_step(best_position: &[f64], walk: &[f64], min_t: f64, a: f64) -> Vec<f64> {
    debug_assert_eq!(best_position.len(), walk.len());
    let min_t = if min_t.is_finite() { min_t } else { 0.0 };
    best_position
        .iter()
        .zip(walk)
        .map(|(&best, &w)| best * w * min_t * a)
        .collect()
}

/// Gaussian-walk exploration with its normal deviates supplied by the caller.
pub fn gaussian_walk_step(best_position: &[f64], normal: &[f64], min_t: f64, a: f64) -> Vec<f64> {
    debug_assert_eq!(best_position.len(), normal.len());
    let min_t = if min_t.is_finite() { min_t } else { 0.0 };
    best_position
        .iter()
        .zip(normal)
        .map(|(&best, &z)| best + z * min_t * a)
        .collect()
}

/// Exploration move using `params.exploration`.
pub fn exploration_move<R: Rng + ?Sized>(
    best_position: &[f64],
    min_t: f64,
    iter: usize,
    max_iter: usize,
    params: &FoxParams,
    rng: &mut R,
) -> Vec<f64> {
    let a = params.a_schedule.value(iter, max_iter);
    match params.exploration {
        ExplorationRule::Multiplicative => {
            let walk: Vec<f64> = (0..best_position.len()).map(|_| rng.random()).collect();
            exploration_step(best_position, &walk, min_t, a)
        }
        ExplorationRule::GaussianWalk => {
            let normal: Vec<f64> = (0..best_position.len())
                .map(|_| rng.sample(StandardNormal))
                .collect();
            gaussian_walk_step(best_position, &normal, min_t, a)
        }
    }
}

/// Which move an agent made.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Exploitation,
    Exploration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentMove {
    pub branch: Branch,
    /// Unclipped new position.
    pub position: Vec<f64>,
    /// Average travel time, for exploitation moves.
    pub tt: Option<f64>,
}

/// One agent's update: draws `r`, then exploits (`r >= r_threshold`) or
/// explores.
pub fn move_agent<R: Rng + ?Sized>(
    best_position: &[f64],
    min_t: f64,
    iter: usize,
    max_iter: usize,
    params: &FoxParams,
    rng: &mut R,
) -> AgentMove {
    let r: f64 = rng.random();
    if r >= params.r_threshold {
        let moved = exploitation_move(best_position, params, rng);
        AgentMove {
            branch: Branch::Exploitation,
            position: moved.position,
            tt: Some(moved.tt),
        }
    } else {
        AgentMove {
            branch: Branch::Exploration,
            position: exploration_move(best_position, min_t, iter, max_iter, params, rng),
            tt: None,
        }
    }
}

/// Outcome of [`optimize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Best-so-far fitness after each iteration.
    pub fitness_history: Vec<f64>,
}

/// Minimizes `objective` over `bounds`.
pub fn optimize<F>(
    objective: F,
    bounds: &SearchBounds,
    params: &FoxParams,
    seed: u64,
) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    optimize_observed(objective, bounds, params, seed, |_, _| {})
}

/// Like [`optimize`], calling `observer(iteration, population)` after every
/// iteration once the new positions are evaluated and the incumbent updated.
///
/// The initial population is evaluated before the first iteration, so a run
/// performs `population_size * (max_iterations + 1)` objective calls.
pub fn optimize_observed<F, O>(
    objective: F,
    bounds: &SearchBounds,
    params: &FoxParams,
    seed: u64,
    mut observer: O,
) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
    O: FnMut(usize, &FoxPopulation),
{
    let mut pop = init_population(params, bounds, seed)?;
    evaluate(&objective, &mut pop, 0)?;
    pop.update_best();

    let max_iter = params.max_iterations;
    let mut history = Vec::with_capacity(max_iter);
    for iter in 0..max_iter {
        for agent in 0..pop.positions.len() {
            let mut rng = seed::rng(seed::derive(seed, &[iter as u64, agent as u64]));
            let moved = move_agent(&pop.best_position, pop.min_t, iter, max_iter, params, &mut rng);
            if let Some(tt) = moved.tt {
                pop.min_t = pop.min_t.min(tt);
            }
            let mut next = moved.position;
            bounds.clip_in_place(&mut next);
            pop.positions[agent] = next;
        }
        evaluate(&objective, &mut pop, iter + 1)?;
        pop.update_best();
        history.push(pop.best_fitness);
        observer(iter, &pop);
    }

    Ok(OptResult {
        best_position: pop.best_position,
        best_fitness: pop.best_fitness,
        fitness_history: history,
    })
}

fn evaluate<F>(objective: &F, pop: &mut FoxPopulation, iteration: usize) -> Result<()>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pop.fitnesses = pop.positions.par_iter().map(|x| objective(x)).collect();
    if let Some(agent) = pop.fitnesses.iter().position(|f| f.is_nan()) {
        return Err(Error::NanObjective {
            iteration,
            agent,
            position: pop.positions[agent].clone(),
        });
    }
    Ok(())
}
