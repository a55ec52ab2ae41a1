//! Random instance generation and brute-force oracles.
//!
//! The D2 oracle enumerates chains literally — every tuple of intermediates
//! up to the requested length, repeats permitted — and is kept independent
//! of the Floyd-Warshall reduction it cross-checks. With the chain length
//! capped at the point count the two are equivalent: nonnegative weights let
//! any cheaper walk be shortened to a simple path.
//!
//! The soundness search generates random problem instances, certifies them
//! under the `fix1` profile, and reports every instance where all
//! non-asserted hypotheses verified but the orbit failed to reach a fixed
//! point (none are expected). Injecting [`CheckMutation::FlipContraction`]
//! must surface such findings, proving the harness can detect violations.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::admissibility::{AdmissiblePair, SelfMap};
use crate::certifier::{certify_with, CheckMutation, Problem, Profile};
use crate::error::{Error, Result};
use crate::io::{MapFile, PairFile, SpaceFile};
use crate::picard::Termination;
use crate::rational::Rat;
use crate::space::{CompletenessFlag, KBound, QPSpace};

/// Configuration for the random generators; everything is deterministic per
/// `(seed, config)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub point_count: usize,
    pub value_grid: Vec<Rat>,
    pub seed: u64,
    pub trials: u64,
}

impl GenConfig {
    pub fn new(point_count: usize, value_grid: Vec<Rat>, seed: u64, trials: u64) -> Result<Self> {
        let cfg = GenConfig { point_count, value_grid, seed, trials };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.point_count == 0 || self.point_count > 8 {
            return Err(Error::InvalidGenConfig(format!(
                "point_count must be in 1..=8, got {}",
                self.point_count
            )));
        }
        if !self.value_grid.iter().any(|v| v.is_zero()) {
            return Err(Error::InvalidGenConfig("value_grid must contain 0".into()));
        }
        if self.value_grid.iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidGenConfig("value_grid entries must be nonnegative".into()));
        }
        Ok(())
    }

    /// A grid of small fractions that exercises zero entries and K > 1.
    pub fn default_grid() -> Vec<Rat> {
        ["0", "1/4", "1/2", "1", "2"].iter().map(|s| s.parse().unwrap()).collect()
    }

    fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// Samples a space with zero diagonal and grid-valued off-diagonals, setting
/// `K` to the minimal coefficient (resampling the rare matrices admitting no
/// finite one, and substituting `K = 1` for the all-zero matrix). Generated
/// spaces carry all three completeness flags: on a finite space every Cauchy
/// sequence is eventually inside a zero-distance relation and converges.
fn random_space(rng: &mut ChaCha8Rng, point_count: usize, grid: &[Rat]) -> QPSpace {
    let points: Vec<String> = (0..point_count).map(|i| format!("p{i}")).collect();
    let flags = [
        CompletenessFlag::LeftComplete,
        CompletenessFlag::RightComplete,
        CompletenessFlag::Bicomplete,
    ]
    .into_iter()
    .collect();
    loop {
        let dist: Vec<Vec<Rat>> = (0..point_count)
            .map(|i| {
                (0..point_count)
                    .map(|j| {
                        if i == j {
                            Rat::zero()
                        } else {
                            grid[rng.gen_range(0..grid.len())].clone()
                        }
                    })
                    .collect()
            })
            .collect();
        let probe =
            QPSpace::new(points.clone(), dist.clone(), Rat::one(), Default::default()).unwrap();
        match probe.minimal_k().expect("zero diagonal by construction") {
            KBound::Finite(k0) => {
                let k = if k0.is_positive() { k0 } else { Rat::one() };
                return QPSpace::new(points, dist, k, flags).unwrap();
            }
            KBound::Infinite => continue,
        }
    }
}

pub fn gen_space(cfg: &GenConfig) -> Result<QPSpace> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(random_space(&mut rng, cfg.point_count, &cfg.value_grid))
}

/// Generates the full random instance for one trial: space, self-map and
/// threshold pair. Maps are biased toward constant maps (one in four) and
/// matrices toward constant matrices (one in two) to keep the rate of fully
/// certified instances useful; `C_beta` is sampled as a multiple of `1/K`
/// so that C3 passes in four of six draws.
pub fn gen_instance(cfg: &GenConfig, trial: u64) -> Result<Problem> {
    cfg.validate()?;
    let mut rng = cfg.trial_rng(trial);
    let space = random_space(&mut rng, cfg.point_count, &cfg.value_grid);
    let n = space.len();

    let map = if rng.gen_range(0..4) == 0 {
        let target = rng.gen_range(0..n);
        SelfMap::from_indices(vec![target; n], n).unwrap()
    } else {
        SelfMap::from_indices((0..n).map(|_| rng.gen_range(0..n)).collect(), n).unwrap()
    };

    let c_alpha = Rat::one();
    let quarters = [0i64, 1, 2, 3, 4, 6][rng.gen_range(0..6)];
    let c_beta = Rat::new(quarters, 4) / space.coeff_k().clone();

    let pair = if rng.gen_range(0..2) == 0 {
        AdmissiblePair::constant(n, c_alpha, c_beta).unwrap()
    } else {
        let alpha_choices = [&c_alpha / &Rat::from_int(2), c_alpha.clone(), &c_alpha * &Rat::from_int(2)];
        let beta_choices = [
            &c_beta / &Rat::from_int(2),
            c_beta.clone(),
            &c_beta + &Rat::new(1, 4),
        ];
        let sample = |rng: &mut ChaCha8Rng, choices: &[Rat; 3]| {
            (0..n)
                .map(|_| (0..n).map(|_| choices[rng.gen_range(0..3)].clone()).collect())
                .collect::<Vec<Vec<Rat>>>()
        };
        let alpha = sample(&mut rng, &alpha_choices);
        let beta = sample(&mut rng, &beta_choices);
        AdmissiblePair::new(alpha, beta, c_alpha, c_beta).unwrap()
    };

    Ok(Problem { space, map, pair, seed: None })
}

/// Minimum chain total from `from` to `to` over every chain with
/// `1..=max_chain_len` intermediates, by direct enumeration. Test oracle for
/// the walk-based reduction.
pub fn min_chain_total(space: &QPSpace, from: &str, to: &str, max_chain_len: usize) -> Result<Rat> {
    assert!(max_chain_len >= 1, "chains have at least one intermediate");
    let x = space.index_of(from)?;
    let y = space.index_of(to)?;
    let mut best: Option<Rat> = None;
    fn go(
        space: &QPSpace,
        last: usize,
        y: usize,
        remaining: usize,
        sum: &Rat,
        best: &mut Option<Rat>,
    ) {
        let total = sum + space.d(last, y);
        if best.as_ref().is_none_or(|b| &total < b) {
            *best = Some(total);
        }
        if remaining > 0 {
            for z in 0..space.len() {
                let next = sum + space.d(last, z);
                go(space, z, y, remaining - 1, &next, best);
            }
        }
    }
    for z1 in 0..space.len() {
        go(space, z1, y, max_chain_len - 1, space.d(x, z1), &mut best);
    }
    Ok(best.expect("at least one chain"))
}

/// Brute-force D2 check: enumerates every chain with up to `max_chain_len`
/// intermediates and tests `D(x,y) <= k * total` for each. A branch whose
/// partial sum already reaches every threshold is dropped — totals only grow.
pub fn d2_oracle(space: &QPSpace, k: &Rat, max_chain_len: usize) -> bool {
    assert!(max_chain_len >= 1, "chains have at least one intermediate");
    let n = space.len();
    for x in 0..n {
        // A chain with total t violates pair (x,y) iff t < D(x,y) / k.
        let thresholds: Vec<Rat> = (0..n).map(|y| space.d(x, y) / k).collect();
        let max_threshold = thresholds.iter().cloned().fold(Rat::zero(), Rat::max);
        if !max_threshold.is_positive() {
            continue;
        }
        for z1 in 0..n {
            let sum = space.d(x, z1).clone();
            if sum < max_threshold
                && chain_violates(space, &thresholds, &max_threshold, z1, &sum, max_chain_len - 1)
            {
                return false;
            }
        }
    }
    true
}

fn chain_violates(
    space: &QPSpace,
    thresholds: &[Rat],
    max_threshold: &Rat,
    last: usize,
    sum: &Rat,
    remaining: usize,
) -> bool {
    for (y, threshold) in thresholds.iter().enumerate() {
        if sum + space.d(last, y) < *threshold {
            return true;
        }
    }
    if remaining == 0 {
        return false;
    }
    for z in 0..space.len() {
        let next = sum + space.d(last, z);
        if &next < max_threshold
            && chain_violates(space, thresholds, max_threshold, z, &next, remaining - 1)
        {
            return true;
        }
    }
    false
}

/// Disagreement between the walk-based check and the enumeration oracle.
#[derive(Debug, Clone, Serialize)]
pub struct OracleMismatch {
    pub trial: u64,
    pub space: SpaceFile,
    pub k: Rat,
    pub check_d2_verdict: bool,
    pub oracle_verdict: bool,
}

/// Runs `trials` random spaces, comparing `check_d2` against the oracle at
/// the minimal coefficient and just below it. Spaces whose minimal
/// coefficient is zero (all-zero matrices) carry no boundary to probe and
/// are resampled. Returns all disagreements; expected empty.
pub fn oracle_agreement_search(cfg: &GenConfig) -> Result<Vec<OracleMismatch>> {
    cfg.validate()?;
    if cfg.point_count > 5 {
        return Err(Error::InvalidGenConfig(
            "d2-oracle mode enumerates chains; point_count must be <= 5".into(),
        ));
    }
    let mut findings = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = cfg.trial_rng(trial);
        let (space, k_min) = loop {
            let space = random_space(&mut rng, cfg.point_count, &cfg.value_grid);
            match space.minimal_k().expect("generated spaces satisfy D1") {
                KBound::Finite(k) if k.is_positive() => break (space, k),
                _ => continue,
            }
        };
        let below = &k_min - &Rat::new(1, 1000);
        for k in [k_min, below] {
            if !k.is_positive() {
                continue;
            }
            let check = space.check_d2(&k).expect("D1 holds").is_none();
            let oracle = d2_oracle(&space, &k, space.len());
            if check != oracle {
                findings.push(OracleMismatch {
                    trial,
                    space: SpaceFile::from_space(&space),
                    k,
                    check_d2_verdict: check,
                    oracle_verdict: oracle,
                });
            }
        }
    }
    Ok(findings)
}

/// A certified instance whose orbit nevertheless failed to reach a fixed
/// point. The full problem is embedded so the case can be replayed.
#[derive(Debug, Clone, Serialize)]
pub struct SoundnessFinding {
    pub trial: u64,
    pub space: SpaceFile,
    pub map: MapFile,
    pub pair: PairFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    pub termination: Option<Termination>,
}

pub fn soundness_search(cfg: &GenConfig) -> Result<Vec<SoundnessFinding>> {
    soundness_search_with_mutation(cfg, None)
}

/// The soundness search with optional fault injection; see the module docs.
pub fn soundness_search_with_mutation(
    cfg: &GenConfig,
    mutation: Option<CheckMutation>,
) -> Result<Vec<SoundnessFinding>> {
    cfg.validate()?;
    let mut findings = Vec::new();
    for trial in 0..cfg.trials {
        let problem = gen_instance(cfg, trial)?;
        let cert = certify_with(&problem, Profile::Fix1, mutation)
            .expect("generated problems are well-formed");
        if cert.all_required_hold() && cert.fixed_point.is_none() {
            findings.push(SoundnessFinding {
                trial,
                space: SpaceFile::from_space(&problem.space),
                map: MapFile::from_map(&problem.space, &problem.map),
                pair: PairFile::from_pair(&problem.pair),
                seed: cert.orbit.as_ref().map(|o| o.seed.clone()),
                termination: cert.orbit.as_ref().map(|o| o.terminated.clone()),
            });
        }
    }
    Ok(findings)
}

/// Count of instances where every non-asserted `fix1` hypothesis verified;
/// used to demonstrate that the search exercises the theorem, not only
/// vacuous cases.
pub fn certified_instance_count(cfg: &GenConfig) -> Result<u64> {
    cfg.validate()?;
    let mut count = 0;
    for trial in 0..cfg.trials {
        let problem = gen_instance(cfg, trial)?;
        let cert = certify_with(&problem, Profile::Fix1, None)
            .expect("generated problems are well-formed");
        if cert.all_required_hold() {
            count += 1;
        }
    }
    Ok(count)
}
