//! Finite quasi-pseudometric type spaces and their axiom checkers.
//!
//! A space is a finite point set with an exact distance matrix `D` and a
//! relaxation coefficient `K`. The axioms checked here:
//!
//! * D1: `D(x,x) = 0` for every point.
//! * D2: `D(x,y) <= K * (D(x,z1) + D(z1,z2) + ... + D(zn,y))` for every pair
//!   and every chain of intermediate points `z1..zn` (n >= 1, repeats
//!   permitted, any length). Checking all chains reduces to comparing
//!   `D(x,y)` against the cheapest connecting walk, computed exactly by
//!   Floyd-Warshall over the rational matrix.
//! * T0: no two distinct points at distance zero in both directions.
//!
//! Because a chain may pass through `x` itself at cost `D(x,x) = 0`, the
//! cheapest walk never exceeds the direct distance, so any space with a
//! positive entry forces `K >= 1`.
//!
//! Symmetry is never assumed: `D(x,y)` and `D(y,x)` are independent entries,
//! and the conjugate space (transposed matrix) swaps every left notion for
//! the corresponding right notion.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rat;

/// User-asserted completeness properties. These are not decidable from a
/// distance matrix; the certifier reports them as "asserted", never
/// "verified".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletenessFlag {
    LeftComplete,
    RightComplete,
    Bicomplete,
}

impl CompletenessFlag {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "left_complete" => Ok(CompletenessFlag::LeftComplete),
            "right_complete" => Ok(CompletenessFlag::RightComplete),
            "bicomplete" => Ok(CompletenessFlag::Bicomplete),
            other => Err(Error::UnknownFlag(other.to_string())),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CompletenessFlag::LeftComplete => "left_complete",
            CompletenessFlag::RightComplete => "right_complete",
            CompletenessFlag::Bicomplete => "bicomplete",
        }
    }
}

/// A finite point set with an exact distance matrix and coefficient `K`.
///
/// Construction validates shape, nonnegativity and `K > 0` only; the axioms
/// D1, D2 and T0 are checked by the operations below, not enforced here.
#[derive(Debug, Clone, PartialEq)]
pub struct QPSpace {
    points: Vec<String>,
    dist: Vec<Vec<Rat>>,
    coeff_k: Rat,
    flags: BTreeSet<CompletenessFlag>,
}

/// A connecting chain `x, z1, ..., zn, y` with its exact total
/// `D(x,z1) + D(z1,z2) + ... + D(zn,y)`. Intermediates are nonempty and may
/// repeat or equal the endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub from: String,
    pub to: String,
    pub intermediates: Vec<String>,
    pub total: Rat,
}

/// Witness for a D2 failure: the pair, the direct distance, and a binding
/// chain achieving the cheapest connecting walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct D2Witness {
    pub from: String,
    pub to: String,
    pub lhs: Rat,
    pub chain: Chain,
}

/// Witness that D-limits are not unique: the eventually-constant sequence at
/// `z` converges to both `x` and `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HausdorffWitness {
    pub z: String,
    pub x: String,
    pub y: String,
}

/// The least admissible coefficient, or the marker that no finite
/// coefficient works (a positive pair connected by a zero-total chain).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KBound {
    Finite(Rat),
    Infinite,
}

impl KBound {
    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            KBound::Finite(k) => Some(k),
            KBound::Infinite => None,
        }
    }
}

impl fmt::Display for KBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KBound::Finite(k) => write!(f, "{k}"),
            KBound::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for KBound {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Aggregated axiom verdicts for one space at one coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub checked_k: Rat,
    pub d1_holds: bool,
    pub d1_witness: Option<String>,
    pub d2_holds: bool,
    pub d2_witness: Option<D2Witness>,
    pub t0_holds: bool,
    pub t0_witness: Option<(String, String)>,
    pub hausdorff_finite: bool,
    pub hausdorff_witness: Option<HausdorffWitness>,
    pub minimal_k: Option<KBound>,
    pub notes: Vec<String>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.d1_holds && self.d2_holds && self.t0_holds && self.hausdorff_finite
    }
}

impl QPSpace {
    pub fn new(
        points: Vec<String>,
        dist: Vec<Vec<Rat>>,
        coeff_k: Rat,
        flags: BTreeSet<CompletenessFlag>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySpace);
        }
        let n = points.len();
        let mut seen = BTreeSet::new();
        for p in &points {
            if !seen.insert(p.clone()) {
                return Err(Error::DuplicatePoint(p.clone()));
            }
        }
        if dist.len() != n {
            return Err(Error::NonSquareMatrix { expected: n, found: dist.len() });
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquareMatrix { expected: n, found: row.len() });
            }
            for (j, value) in row.iter().enumerate() {
                if value.is_negative() {
                    return Err(Error::NegativeDistance {
                        from: points[i].clone(),
                        to: points[j].clone(),
                        value: value.clone(),
                    });
                }
            }
        }
        if !coeff_k.is_positive() {
            return Err(Error::NonPositiveCoeff(coeff_k));
        }
        Ok(QPSpace { points, dist, coeff_k, flags })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: construction rejects empty point sets.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn d(&self, i: usize, j: usize) -> &Rat {
        &self.dist[i][j]
    }

    /// `max(D(i,j), D(j,i))`, the symmetrized distance.
    pub fn ds(&self, i: usize, j: usize) -> Rat {
        self.dist[i][j].clone().max(self.dist[j][i].clone())
    }

    pub fn matrix(&self) -> &[Vec<Rat>] {
        &self.dist
    }

    pub fn coeff_k(&self) -> &Rat {
        &self.coeff_k
    }

    pub fn flags(&self) -> &BTreeSet<CompletenessFlag> {
        &self.flags
    }

    pub fn has_flag(&self, flag: CompletenessFlag) -> bool {
        self.flags.contains(&flag)
    }

    /// D1: every diagonal entry is exactly zero. Returns the first violating
    /// point, or `None` when the axiom holds.
    pub fn check_d1(&self) -> Option<String> {
        (0..self.len()).find(|&i| !self.dist[i][i].is_zero()).map(|i| self.points[i].clone())
    }

    fn require_d1(&self) -> Result<()> {
        match self.check_d1() {
            None => Ok(()),
            Some(p) => Err(Error::D1Required(p)),
        }
    }

    /// Cheapest connecting walk for every pair: entry `(x,y)` is the minimum
    /// over all chains with at least one intermediate of the chain total.
    /// Under D1 and nonnegativity this equals the Floyd-Warshall closure
    /// (the degenerate chain through `x` itself realizes the direct
    /// distance). Rejects spaces failing D1.
    pub fn shortest_walk(&self) -> Result<Vec<Vec<Rat>>> {
        self.require_d1()?;
        let n = self.len();
        let mut walk = self.dist.clone();
        for mid in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = &walk[i][mid] + &walk[mid][j];
                    if via < walk[i][j] {
                        walk[i][j] = via;
                    }
                }
            }
        }
        Ok(walk)
    }

    /// Reconstructs a chain from `x` to `y` whose total equals the cheapest
    /// walk value. Works by dynamic programming over the edge budget: a
    /// nonnegative shortest walk is always realized by a simple path, so a
    /// budget of `n - 1` edges suffices. When the direct edge is binding the
    /// chain is padded with the degenerate intermediate `x` (cost
    /// `D(x,x) = 0`) to honor the at-least-one-intermediate convention.
    fn binding_chain(&self, x: usize, y: usize) -> Chain {
        let n = self.len();
        let budget = (n - 1).max(1);
        // cost[m][v] = cheapest walk v -> y using at most m+1 edges.
        let mut cost = vec![vec![Rat::zero(); n]; budget];
        for v in 0..n {
            cost[0][v] = self.dist[v][y].clone();
        }
        for m in 1..budget {
            for v in 0..n {
                let mut best = cost[m - 1][v].clone();
                for z in 0..n {
                    let via = &self.dist[v][z] + &cost[m - 1][z];
                    if via < best {
                        best = via;
                    }
                }
                cost[m][v] = best;
            }
        }

        let mut intermediates = Vec::new();
        let mut v = x;
        let mut m = budget - 1;
        loop {
            if m == 0 || cost[m][v] == self.dist[v][y] {
                break;
            }
            let mut step = None;
            for z in 0..n {
                if &self.dist[v][z] + &cost[m - 1][z] == cost[m][v] {
                    step = Some(z);
                    break;
                }
            }
            match step {
                Some(z) => {
                    intermediates.push(z);
                    v = z;
                    m -= 1;
                }
                // cost[m][v] == cost[m-1][v]: the optimum needs fewer edges.
                None => m -= 1,
            }
        }
        if intermediates.is_empty() {
            intermediates.push(x);
        }

        let mut total = self.dist[x][intermediates[0]].clone();
        for pair in intermediates.windows(2) {
            total = total + &self.dist[pair[0]][pair[1]];
        }
        total = total + &self.dist[*intermediates.last().unwrap()][y];

        Chain {
            from: self.points[x].clone(),
            to: self.points[y].clone(),
            intermediates: intermediates.into_iter().map(|i| self.points[i].clone()).collect(),
            total,
        }
    }

    /// D2 at coefficient `k`: `D(x,y) <= k * walk(x,y)` for every pair.
    /// On failure returns the first violating pair together with a binding
    /// chain achieving the cheapest walk.
    pub fn check_d2(&self, k: &Rat) -> Result<Option<D2Witness>> {
        if !k.is_positive() {
            return Err(Error::NonPositiveCoeff(k.clone()));
        }
        let walk = self.shortest_walk()?;
        for x in 0..self.len() {
            for y in 0..self.len() {
                if self.dist[x][y] > k * &walk[x][y] {
                    let chain = self.binding_chain(x, y);
                    debug_assert_eq!(chain.total, walk[x][y]);
                    return Ok(Some(D2Witness {
                        from: self.points[x].clone(),
                        to: self.points[y].clone(),
                        lhs: self.dist[x][y].clone(),
                        chain,
                    }));
                }
            }
        }
        Ok(None)
    }

    /// The least coefficient for which D2 holds: the maximum over positive
    /// pairs of `D(x,y) / walk(x,y)`. Returns [`KBound::Infinite`] when some
    /// positive pair is connected by a zero-total chain, and `0` for the
    /// all-zero matrix (every positive coefficient works). The valid set is
    /// upward closed, so D2 holds at `k` exactly when `k >= minimal_k`.
    pub fn minimal_k(&self) -> Result<KBound> {
        let walk = self.shortest_walk()?;
        let mut best = Rat::zero();
        for x in 0..self.len() {
            for y in 0..self.len() {
                if self.dist[x][y].is_positive() {
                    if walk[x][y].is_zero() {
                        return Ok(KBound::Infinite);
                    }
                    let ratio = &self.dist[x][y] / &walk[x][y];
                    if ratio > best {
                        best = ratio;
                    }
                }
            }
        }
        Ok(KBound::Finite(best))
    }

    /// T0: no pair of distinct points at distance zero in both directions.
    pub fn check_t0(&self) -> Option<(String, String)> {
        for x in 0..self.len() {
            for y in (x + 1)..self.len() {
                if self.dist[x][y].is_zero() && self.dist[y][x].is_zero() {
                    return Some((self.points[x].clone(), self.points[y].clone()));
                }
            }
        }
        None
    }

    /// Finite-space uniqueness of D-limits: in a finite space a sequence
    /// D-converges to `x` exactly when it eventually stays inside
    /// `{w : D(x,w) = 0}`, so limits are unique iff no point `z` has two
    /// distinct points at distance zero to it. The witness names `z` and the
    /// two limits of the constant sequence at `z`.
    pub fn check_hausdorff_finite(&self) -> Result<Option<HausdorffWitness>> {
        self.require_d1()?;
        for z in 0..self.len() {
            for x in 0..self.len() {
                for y in (x + 1)..self.len() {
                    if self.dist[x][z].is_zero() && self.dist[y][z].is_zero() {
                        return Ok(Some(HausdorffWitness {
                            z: self.points[z].clone(),
                            x: self.points[x].clone(),
                            y: self.points[y].clone(),
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// The conjugate space: transposed matrix, same points, same `K`.
    /// Left and right completeness assertions swap roles; bicompleteness is
    /// direction-free and carries over.
    pub fn conjugate(&self) -> QPSpace {
        let n = self.len();
        let dist = (0..n).map(|i| (0..n).map(|j| self.dist[j][i].clone()).collect()).collect();
        let flags = self
            .flags
            .iter()
            .map(|f| match f {
                CompletenessFlag::LeftComplete => CompletenessFlag::RightComplete,
                CompletenessFlag::RightComplete => CompletenessFlag::LeftComplete,
                CompletenessFlag::Bicomplete => CompletenessFlag::Bicomplete,
            })
            .collect();
        QPSpace { points: self.points.clone(), dist, coeff_k: self.coeff_k.clone(), flags }
    }

    /// The symmetrization: elementwise max of the matrix and its transpose.
    pub fn symmetrize(&self) -> QPSpace {
        let n = self.len();
        let dist = (0..n).map(|i| (0..n).map(|j| self.ds(i, j)).collect()).collect();
        QPSpace {
            points: self.points.clone(),
            dist,
            coeff_k: self.coeff_k.clone(),
            flags: self.flags.clone(),
        }
    }

    /// Metric-type check at `k`: symmetric matrix, D1, D2 at `k`, and
    /// `D(x,y) = 0` only on the diagonal. Nonpositive `k` never qualifies.
    pub fn check_metric_type(&self, k: &Rat) -> bool {
        if !k.is_positive() || self.check_d1().is_some() {
            return false;
        }
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if self.dist[i][j] != self.dist[j][i] {
                    return false;
                }
                if i != j && self.dist[i][j].is_zero() {
                    return false;
                }
            }
        }
        matches!(self.check_d2(k), Ok(None))
    }

    /// Runs every axiom check at coefficient `k` and aggregates the verdicts.
    /// When D1 fails, the walk-based checks cannot run and are reported as
    /// failed with an explanatory note.
    pub fn axiom_report(&self, k: &Rat) -> AxiomReport {
        let d1_witness = self.check_d1();
        let d1_holds = d1_witness.is_none();
        let t0_witness = self.check_t0();

        let (d2_holds, d2_witness, hausdorff_finite, hausdorff_witness, minimal_k, notes) =
            if d1_holds {
                let d2_witness = self.check_d2(k).expect("D1 verified");
                let hausdorff_witness = self.check_hausdorff_finite().expect("D1 verified");
                let minimal_k = self.minimal_k().expect("D1 verified");
                (
                    d2_witness.is_none(),
                    d2_witness,
                    hausdorff_witness.is_none(),
                    hausdorff_witness,
                    Some(minimal_k),
                    Vec::new(),
                )
            } else {
                (
                    false,
                    None,
                    false,
                    None,
                    None,
                    vec!["D2, Hausdorff and minimal K not evaluated: D1 fails".to_string()],
                )
            };

        AxiomReport {
            checked_k: k.clone(),
            d1_holds,
            d1_witness,
            d2_holds,
            d2_witness,
            t0_holds: t0_witness.is_none(),
            t0_witness,
            hausdorff_finite,
            hausdorff_witness,
            minimal_k,
            notes,
        }
    }
}
