//! The Picard iteration `x_n = f(x_{n-1})` with its exact distance trace,
//! the chained distance bound, geometric-decay verification, and the
//! finite-space sequential-continuity surrogate.

use serde::Serialize;

use crate::admissibility::SelfMap;
use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::sequence::ConvergenceMode;
use crate::space::QPSpace;

/// Why an orbit stopped. Finite spaces always terminate with a fixed point
/// or a cycle; the budget marker is reachable only when `max_steps` is
/// smaller than the point count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Termination {
    FixedPoint { index: usize },
    Cycle { length: usize, start: usize },
    BudgetExhausted,
}

/// A Picard orbit: entries, consecutive step distances `D(x_{n-1}, x_n)`,
/// and the decay ratios of consecutive steps (skipping zero denominators).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    seed: usize,
    entries: Vec<usize>,
    step_dists: Vec<Rat>,
    decay_ratios: Vec<Rat>,
    terminated: Termination,
}

impl Orbit {
    pub fn seed(&self) -> usize {
        self.seed
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn entry_names(&self, space: &QPSpace) -> Vec<String> {
        self.entries.iter().map(|&i| space.point(i).to_string()).collect()
    }

    pub fn step_dists(&self) -> &[Rat] {
        &self.step_dists
    }

    pub fn decay_ratios(&self) -> &[Rat] {
        &self.decay_ratios
    }

    pub fn terminated(&self) -> &Termination {
        &self.terminated
    }

    /// The fixed point's index into the space, when one was reached.
    pub fn fixed_point(&self) -> Option<usize> {
        match self.terminated {
            Termination::FixedPoint { index } => Some(self.entries[index]),
            _ => None,
        }
    }

    /// The values the infinite orbit keeps revisiting: the fixed point, the
    /// cycle entries, or nothing when the budget ran out first.
    pub fn recurring(&self) -> &[usize] {
        match self.terminated {
            Termination::FixedPoint { index } => &self.entries[index..],
            Termination::Cycle { start, .. } => &self.entries[start..],
            Termination::BudgetExhausted => &[],
        }
    }
}

/// The JSON face of an orbit: entries by name, rationals as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub seed: String,
    pub entries: Vec<String>,
    pub step_dists: Vec<Rat>,
    pub decay_ratios: Vec<Rat>,
    pub terminated: Termination,
}

impl OrbitReport {
    pub fn new(space: &QPSpace, orbit: &Orbit) -> Self {
        OrbitReport {
            seed: space.point(orbit.seed()).to_string(),
            entries: orbit.entry_names(space),
            step_dists: orbit.step_dists().to_vec(),
            decay_ratios: orbit.decay_ratios().to_vec(),
            terminated: orbit.terminated().clone(),
        }
    }
}

/// Runs the iteration from `x0`, stopping at the first fixed point, the
/// first revisited state, or after `max_steps` applications of `f`.
pub fn iterate(space: &QPSpace, f: &SelfMap, x0: &str, max_steps: usize) -> Result<Orbit> {
    if max_steps == 0 {
        return Err(Error::ZeroBudget);
    }
    if f.len() != space.len() {
        return Err(Error::ShapeMismatch {
            what: "self-map",
            expected: space.len(),
            found: f.len(),
        });
    }
    let seed = space.index_of(x0)?;

    let mut entries = vec![seed];
    let mut seen = vec![None; space.len()];
    seen[seed] = Some(0usize);
    let mut terminated = Termination::BudgetExhausted;
    for _ in 0..max_steps {
        let current = *entries.last().unwrap();
        let next = f.apply(current);
        if next == current {
            terminated = Termination::FixedPoint { index: entries.len() - 1 };
            break;
        }
        if let Some(start) = seen[next] {
            terminated = Termination::Cycle { length: entries.len() - start, start };
            break;
        }
        seen[next] = Some(entries.len());
        entries.push(next);
    }

    let step_dists: Vec<Rat> =
        entries.windows(2).map(|w| space.d(w[0], w[1]).clone()).collect();
    let decay_ratios = step_dists
        .windows(2)
        .filter(|w| !w[0].is_zero())
        .map(|w| &w[1] / &w[0])
        .collect();

    Ok(Orbit { seed, entries, step_dists, decay_ratios, terminated })
}

/// Checks `D(x_n, x_{n+1}) <= lambda * D(x_{n-1}, x_n)` for every consecutive
/// step; returns the first violating step index, or `None` when the decay
/// holds throughout.
pub fn verify_decay(orbit: &Orbit, lambda: &Rat) -> Result<Option<usize>> {
    if lambda.is_negative() {
        return Err(Error::NegativeLambda(lambda.clone()));
    }
    for (i, w) in orbit.step_dists.windows(2).enumerate() {
        if w[1] > lambda * &w[0] {
            return Ok(Some(i + 1));
        }
    }
    Ok(None)
}

/// One row of the chained distance bound
/// `D(x_0,x_n) <= K D(x_0,x_1) + ... + K^{n-1} D(x_{n-2},x_{n-1}) + K^{n-1} D(x_{n-1},x_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainBoundRow {
    pub n: usize,
    pub lhs: Rat,
    pub rhs: Rat,
    pub slack: Rat,
}

/// Evaluates the chained bound for every `n` along the orbit. The sum only
/// takes effect from `n = 2`; the single-step case is reported as the trivial
/// bound `D(x_0,x_1) <= D(x_0,x_1)`. Whenever the space satisfies D2 at its
/// declared coefficient, every slack is nonnegative.
pub fn verify_chain_bound(space: &QPSpace, orbit: &Orbit) -> Vec<ChainBoundRow> {
    let k = space.coeff_k();
    let mut rows = Vec::new();
    let mut weighted_prefix = Rat::zero();
    for n in 1..orbit.entries.len() {
        let lhs = space.d(orbit.entries[0], orbit.entries[n]).clone();
        let last_weight = k.pow((n - 1) as u32);
        let rhs = if n == 1 {
            orbit.step_dists[0].clone()
        } else {
            // weighted_prefix = sum_{i=1}^{n-1} K^i D(x_{i-1}, x_i)
            weighted_prefix = weighted_prefix + &last_weight * &orbit.step_dists[n - 2];
            &weighted_prefix + &(&last_weight * &orbit.step_dists[n - 1])
        };
        let slack = &rhs - &lhs;
        rows.push(ChainBoundRow { n, lhs, rhs, slack });
    }
    rows
}

/// Finite-space surrogate for sequential continuity: a sequence D-converges
/// to `x` exactly when it eventually stays in the zero set of `x`, so `f` is
/// D-sequentially continuous iff `D(x,z) = 0` implies `D(fx,fz) = 0`. The
/// `Dinv` mode mirrors the arguments; `Ds` requires both. Returns the first
/// violating pair.
pub fn check_sequential_continuity(
    space: &QPSpace,
    f: &SelfMap,
    mode: ConvergenceMode,
) -> Result<Option<(String, String)>> {
    if let Some(p) = space.check_d1() {
        return Err(Error::D1Required(p));
    }
    if f.len() != space.len() {
        return Err(Error::ShapeMismatch {
            what: "self-map",
            expected: space.len(),
            found: f.len(),
        });
    }
    let n = space.len();
    for x in 0..n {
        for z in 0..n {
            let (fx, fz) = (f.apply(x), f.apply(z));
            let broken = match mode {
                ConvergenceMode::D => space.d(x, z).is_zero() && !space.d(fx, fz).is_zero(),
                ConvergenceMode::Dinv => space.d(z, x).is_zero() && !space.d(fz, fx).is_zero(),
                ConvergenceMode::Ds => {
                    (space.d(x, z).is_zero() && !space.d(fx, fz).is_zero())
                        || (space.d(z, x).is_zero() && !space.d(fz, fx).is_zero())
                }
            };
            if broken {
                return Ok(Some((space.point(x).to_string(), space.point(z).to_string())));
            }
        }
    }
    Ok(None)
}
