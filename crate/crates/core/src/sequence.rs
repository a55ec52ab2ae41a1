//! Tolerance-parameterized classification of finite sequence prefixes.
//!
//! The Cauchy and convergence definitions quantify over infinite tails; only
//! a finite prefix is observable, so every verdict here is "holds on this
//! prefix at this epsilon", never a claim about the infinite sequence.
//!
//! Prefix rule for the Cauchy verdicts: a pair `(k, n)` with `k <= n` is a
//! violation when the kind's distance is `>= epsilon` (the definitions use a
//! strict `<`). The smallest candidate index is `n0 = 1 + max violating k`
//! (`0` when there are no violations), and the prefix classifies as holding
//! only when the violation-free tail `[n0, N)` contains at least two entries
//! — a single-entry tail offers only the trivial diagonal pair and would make
//! every prefix classify vacuously. A prefix with no violations at all holds
//! with `n0 = 0` whatever its length.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::space::QPSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CauchyKind {
    LeftK,
    RightK,
    Ds,
}

impl CauchyKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "left_k" => Ok(CauchyKind::LeftK),
            "right_k" => Ok(CauchyKind::RightK),
            "ds" => Ok(CauchyKind::Ds),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceMode {
    D,
    Dinv,
    Ds,
}

impl ConvergenceMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "d" | "D" => Ok(ConvergenceMode::D),
            "dinv" | "Dinv" => Ok(ConvergenceMode::Dinv),
            "ds" | "Ds" => Ok(ConvergenceMode::Ds),
            other => Err(Error::UnknownMode(other.to_string())),
        }
    }
}

/// A violating index pair and the offending distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CauchyViolation {
    pub k: usize,
    pub n: usize,
    pub distance: Rat,
}

/// Verdict of a Cauchy classification on one prefix at one epsilon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CauchyVerdict {
    pub kind: CauchyKind,
    pub epsilon: Rat,
    pub holds_on_prefix: bool,
    pub witness_n0: Option<usize>,
    pub violation: Option<CauchyViolation>,
}

/// A finite prefix of a sequence in a space; entries are point indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqPrefix<'a> {
    space: &'a QPSpace,
    entries: Vec<usize>,
}

impl<'a> SeqPrefix<'a> {
    pub fn new(space: &'a QPSpace, names: &[String]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::EmptySequence);
        }
        let entries = names.iter().map(|n| space.index_of(n)).collect::<Result<Vec<_>>>()?;
        Ok(SeqPrefix { space, entries })
    }

    pub fn from_indices(space: &'a QPSpace, entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptySequence);
        }
        for &i in &entries {
            if i >= space.len() {
                return Err(Error::UnknownPoint(format!("#{i}")));
            }
        }
        Ok(SeqPrefix { space, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Always false: construction rejects empty prefixes.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|&i| self.space.point(i).to_string()).collect()
    }

    /// The distance the given kind constrains for an index pair `k <= n`:
    /// `D(x_k, x_n)` for left, `D(x_n, x_k)` for right, and the larger of the
    /// two for the symmetrized kind.
    fn pair_distance(&self, kind: CauchyKind, k: usize, n: usize) -> Rat {
        let (a, b) = (self.entries[k], self.entries[n]);
        match kind {
            CauchyKind::LeftK => self.space.d(a, b).clone(),
            CauchyKind::RightK => self.space.d(b, a).clone(),
            CauchyKind::Ds => self.space.ds(a, b),
        }
    }

    /// Classifies the prefix under the chosen Cauchy kind; see the module
    /// docs for the prefix rule. The smallest valid `n0` is reported; on
    /// failure the latest violating pair is the witness.
    pub fn classify_cauchy(&self, kind: CauchyKind, epsilon: &Rat) -> Result<CauchyVerdict> {
        if !epsilon.is_positive() {
            return Err(Error::NonPositiveEpsilon(epsilon.clone()));
        }
        let n_len = self.entries.len();
        let mut last_violation: Option<CauchyViolation> = None;
        for k in 0..n_len {
            for n in k..n_len {
                let d = self.pair_distance(kind, k, n);
                if &d >= epsilon {
                    last_violation = Some(CauchyViolation { k, n, distance: d });
                }
            }
        }

        let n0 = match &last_violation {
            None => 0,
            Some(v) => v.k + 1,
        };
        let holds = n0 <= n_len.saturating_sub(2);
        Ok(CauchyVerdict {
            kind,
            epsilon: epsilon.clone(),
            holds_on_prefix: holds,
            witness_n0: holds.then_some(n0),
            violation: if holds { None } else { last_violation },
        })
    }

    /// Distance from the candidate limit to entry `n` under the given mode.
    fn limit_distance(&self, limit: usize, mode: ConvergenceMode, n: usize) -> Rat {
        let x = self.entries[n];
        match mode {
            ConvergenceMode::D => self.space.d(limit, x).clone(),
            ConvergenceMode::Dinv => self.space.d(x, limit).clone(),
            ConvergenceMode::Ds => self.space.ds(limit, x),
        }
    }

    /// Convergence to `limit` on the prefix: returns the first index from
    /// which every relevant distance is `< epsilon`, or `None` when even the
    /// final entry violates.
    pub fn check_convergence(
        &self,
        limit: &str,
        mode: ConvergenceMode,
        epsilon: &Rat,
    ) -> Result<Option<usize>> {
        let limit = self.space.index_of(limit)?;
        self.convergence_index(limit, mode, epsilon)
    }

    fn convergence_index(
        &self,
        limit: usize,
        mode: ConvergenceMode,
        epsilon: &Rat,
    ) -> Result<Option<usize>> {
        if !epsilon.is_positive() {
            return Err(Error::NonPositiveEpsilon(epsilon.clone()));
        }
        let mut from = 0;
        for n in 0..self.entries.len() {
            if &self.limit_distance(limit, mode, n) >= epsilon {
                from = n + 1;
            }
        }
        Ok((from < self.entries.len()).then_some(from))
    }

    /// All points the prefix converges to under the mode, in point order.
    pub fn find_limits(&self, mode: ConvergenceMode, epsilon: &Rat) -> Result<Vec<String>> {
        let mut limits = Vec::new();
        for candidate in 0..self.space.len() {
            if self.convergence_index(candidate, mode, epsilon)?.is_some() {
                limits.push(self.space.point(candidate).to_string());
            }
        }
        Ok(limits)
    }
}
