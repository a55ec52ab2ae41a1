//! Admissibility conditions and the contraction inequality, checked
//! exhaustively over all ordered point pairs.
//!
//! The threshold matrices `alpha` and `beta` are supplied as full matrices of
//! independent ordered-pair entries; `alpha(x,y)` and `alpha(y,x)` are
//! unrelated. The conditions:
//!
//! * C1: `alpha(x,y) >= C_alpha` implies `alpha(fx,fy) >= C_alpha`.
//! * C2: `beta(x,y) <= C_beta` implies `beta(fx,fy) <= C_beta`.
//! * C3: `C_beta / C_alpha < 1 / K` for the space's declared coefficient.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::space::QPSpace;

/// A total self-map on a space's points, stored as image indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfMap {
    map: Vec<usize>,
}

impl SelfMap {
    /// Builds the map from `(point, image)` name assignments; every point of
    /// the space must be assigned exactly once and every image must exist.
    pub fn new<'a, I>(space: &QPSpace, assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut map = vec![usize::MAX; space.len()];
        for (from, to) in assignments {
            let i = space.index_of(from)?;
            map[i] = space.index_of(to)?;
        }
        for (i, &img) in map.iter().enumerate() {
            if img == usize::MAX {
                return Err(Error::IncompleteMap(space.point(i).to_string()));
            }
        }
        Ok(SelfMap { map })
    }

    pub fn from_indices(map: Vec<usize>, point_count: usize) -> Result<Self> {
        if map.len() != point_count {
            return Err(Error::ShapeMismatch {
                what: "self-map",
                expected: point_count,
                found: map.len(),
            });
        }
        for &img in &map {
            if img >= point_count {
                return Err(Error::UnknownPoint(format!("#{img}")));
            }
        }
        Ok(SelfMap { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    fn require_shape(&self, space: &QPSpace) -> Result<()> {
        if self.map.len() != space.len() {
            return Err(Error::ShapeMismatch {
                what: "self-map",
                expected: space.len(),
                found: self.map.len(),
            });
        }
        Ok(())
    }
}

/// Threshold matrices with their constants `C_alpha > 0`, `C_beta >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissiblePair {
    alpha: Vec<Vec<Rat>>,
    beta: Vec<Vec<Rat>>,
    c_alpha: Rat,
    c_beta: Rat,
}

impl AdmissiblePair {
    pub fn new(
        alpha: Vec<Vec<Rat>>,
        beta: Vec<Vec<Rat>>,
        c_alpha: Rat,
        c_beta: Rat,
    ) -> Result<Self> {
        if !c_alpha.is_positive() {
            return Err(Error::NonPositiveCAlpha(c_alpha));
        }
        if c_beta.is_negative() {
            return Err(Error::NegativeCBeta(c_beta));
        }
        for (name, matrix) in [("alpha", &alpha), ("beta", &beta)] {
            let n = matrix.len();
            for (i, row) in matrix.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::NonSquareMatrix { expected: n, found: row.len() });
                }
                for (j, value) in row.iter().enumerate() {
                    if value.is_negative() {
                        return Err(Error::NegativeMatrixEntry {
                            matrix: name,
                            from: i,
                            to: j,
                            value: value.clone(),
                        });
                    }
                }
            }
        }
        if alpha.len() != beta.len() {
            return Err(Error::ShapeMismatch {
                what: "beta matrix",
                expected: alpha.len(),
                found: beta.len(),
            });
        }
        Ok(AdmissiblePair { alpha, beta, c_alpha, c_beta })
    }

    /// Constant matrices `alpha == C_alpha`, `beta == C_beta`; these satisfy
    /// C1 and C2 for every map and make every point a seed.
    pub fn constant(n: usize, c_alpha: Rat, c_beta: Rat) -> Result<Self> {
        let alpha = vec![vec![c_alpha.clone(); n]; n];
        let beta = vec![vec![c_beta.clone(); n]; n];
        AdmissiblePair::new(alpha, beta, c_alpha, c_beta)
    }

    pub fn alpha(&self, x: usize, y: usize) -> &Rat {
        &self.alpha[x][y]
    }

    pub fn beta(&self, x: usize, y: usize) -> &Rat {
        &self.beta[x][y]
    }

    pub fn alpha_matrix(&self) -> &[Vec<Rat>] {
        &self.alpha
    }

    pub fn beta_matrix(&self) -> &[Vec<Rat>] {
        &self.beta
    }

    pub fn c_alpha(&self) -> &Rat {
        &self.c_alpha
    }

    pub fn c_beta(&self) -> &Rat {
        &self.c_beta
    }

    /// `C_beta / C_alpha`, the contraction factor the certifier reports.
    pub fn lambda(&self) -> Rat {
        &self.c_beta / &self.c_alpha
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.alpha.len();
        (0..n).all(|i| {
            (0..n).all(|j| self.alpha[i][j] == self.alpha[j][i] && self.beta[i][j] == self.beta[j][i])
        })
    }

    /// Transposes both matrices; the conjugated problem uses this so that
    /// every ordered-pair condition mirrors exactly.
    pub fn transpose(&self) -> AdmissiblePair {
        let n = self.alpha.len();
        let alpha = (0..n).map(|i| (0..n).map(|j| self.alpha[j][i].clone()).collect()).collect();
        let beta = (0..n).map(|i| (0..n).map(|j| self.beta[j][i].clone()).collect()).collect();
        AdmissiblePair { alpha, beta, c_alpha: self.c_alpha.clone(), c_beta: self.c_beta.clone() }
    }

    fn require_shape(&self, space: &QPSpace) -> Result<()> {
        if self.alpha.len() != space.len() {
            return Err(Error::ShapeMismatch {
                what: "alpha/beta matrices",
                expected: space.len(),
                found: self.alpha.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    C1,
    C2,
}

/// First ordered pair violating C1 or C2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct C1C2Witness {
    pub condition: Condition,
    pub x: String,
    pub y: String,
}

/// First ordered pair violating the contraction inequality, with both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractionWitness {
    pub x: String,
    pub y: String,
    pub lhs: Rat,
    pub rhs: Rat,
}

/// Which distance the contraction inequality uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionForm {
    D,
    Ds,
}

/// Orientation of the seed condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedProfile {
    Left,
    Right,
    Min,
}

/// C1 and C2 over all ordered pairs; `None` means both hold.
pub fn check_c1_c2(
    space: &QPSpace,
    f: &SelfMap,
    pair: &AdmissiblePair,
) -> Result<Option<C1C2Witness>> {
    f.require_shape(space)?;
    pair.require_shape(space)?;
    let n = space.len();
    for x in 0..n {
        for y in 0..n {
            let (fx, fy) = (f.apply(x), f.apply(y));
            if pair.alpha(x, y) >= pair.c_alpha() && pair.alpha(fx, fy) < pair.c_alpha() {
                return Ok(Some(C1C2Witness {
                    condition: Condition::C1,
                    x: space.point(x).to_string(),
                    y: space.point(y).to_string(),
                }));
            }
            if pair.beta(x, y) <= pair.c_beta() && pair.beta(fx, fy) > pair.c_beta() {
                return Ok(Some(C1C2Witness {
                    condition: Condition::C2,
                    x: space.point(x).to_string(),
                    y: space.point(y).to_string(),
                }));
            }
        }
    }
    Ok(None)
}

/// C3: `C_beta / C_alpha < 1 / K`, compared as `C_beta * K < C_alpha`.
pub fn check_c3(space: &QPSpace, pair: &AdmissiblePair) -> bool {
    pair.c_beta() * space.coeff_k() < *pair.c_alpha()
}

/// The contraction inequality `alpha(x,y) d(fx,fy) <= beta(x,y) d(x,y)` over
/// all ordered pairs, with `d` either `D` or the symmetrized `Ds`.
pub fn check_contraction(
    space: &QPSpace,
    f: &SelfMap,
    pair: &AdmissiblePair,
    form: ContractionForm,
) -> Result<Option<ContractionWitness>> {
    f.require_shape(space)?;
    pair.require_shape(space)?;
    let n = space.len();
    let dist = |a: usize, b: usize| match form {
        ContractionForm::D => space.d(a, b).clone(),
        ContractionForm::Ds => space.ds(a, b),
    };
    for x in 0..n {
        for y in 0..n {
            let lhs = pair.alpha(x, y) * &dist(f.apply(x), f.apply(y));
            let rhs = pair.beta(x, y) * &dist(x, y);
            if lhs > rhs {
                return Ok(Some(ContractionWitness {
                    x: space.point(x).to_string(),
                    y: space.point(y).to_string(),
                    lhs,
                    rhs,
                }));
            }
        }
    }
    Ok(None)
}

fn seed_satisfied(f: &SelfMap, pair: &AdmissiblePair, profile: SeedProfile, x0: usize) -> bool {
    let fx0 = f.apply(x0);
    match profile {
        SeedProfile::Left => {
            pair.alpha(x0, fx0) >= pair.c_alpha() && pair.beta(x0, fx0) <= pair.c_beta()
        }
        SeedProfile::Right => {
            pair.alpha(fx0, x0) >= pair.c_alpha() && pair.beta(fx0, x0) <= pair.c_beta()
        }
        SeedProfile::Min => {
            let alpha_min = pair.alpha(x0, fx0).clone().min(pair.alpha(fx0, x0).clone());
            let beta_min = pair.beta(x0, fx0).clone().min(pair.beta(fx0, x0).clone());
            &alpha_min >= pair.c_alpha() && &beta_min <= pair.c_beta()
        }
    }
}

/// All points whose seed condition holds under the given orientation, in
/// point order.
pub fn find_seed_points(
    space: &QPSpace,
    f: &SelfMap,
    pair: &AdmissiblePair,
    profile: SeedProfile,
) -> Result<Vec<String>> {
    f.require_shape(space)?;
    pair.require_shape(space)?;
    Ok((0..space.len())
        .filter(|&x0| seed_satisfied(f, pair, profile, x0))
        .map(|x0| space.point(x0).to_string())
        .collect())
}

/// Checks one specific seed point under the given orientation.
pub fn seed_point_satisfies(
    space: &QPSpace,
    f: &SelfMap,
    pair: &AdmissiblePair,
    profile: SeedProfile,
    x0: usize,
) -> Result<bool> {
    f.require_shape(space)?;
    pair.require_shape(space)?;
    Ok(seed_satisfied(f, pair, profile, x0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn t3() -> QPSpace {
        QPSpace::new(
            vec!["p".into(), "q".into(), "r".into()],
            vec![
                vec![r("0"), r("1"), r("3/2")],
                vec![r("1"), r("0"), r("1/10")],
                vec![r("3/2"), r("1/10"), r("0")],
            ],
            r("3/2"),
            BTreeSet::new(),
        )
        .unwrap()
    }

    fn chain_map(space: &QPSpace) -> SelfMap {
        SelfMap::new(space, [("p", "q"), ("q", "r"), ("r", "r")]).unwrap()
    }

    fn swap_map(space: &QPSpace) -> SelfMap {
        SelfMap::new(space, [("p", "q"), ("q", "p"), ("r", "r")]).unwrap()
    }

    fn constant_pair() -> AdmissiblePair {
        AdmissiblePair::constant(3, r("1"), r("1/10")).unwrap()
    }

    #[test]
    fn self_map_validates() {
        let t3 = t3();
        assert!(SelfMap::new(&t3, [("p", "q"), ("q", "r")]).is_err());
        assert!(SelfMap::new(&t3, [("p", "z"), ("q", "r"), ("r", "r")]).is_err());
        let f = chain_map(&t3);
        assert_eq!(f.apply(0), 1);
        assert_eq!(f.apply(2), 2);
    }

    #[test]
    fn pair_validates() {
        assert!(AdmissiblePair::constant(2, r("0"), r("0")).is_err());
        assert!(AdmissiblePair::new(
            vec![vec![r("1")]],
            vec![vec![r("-1")]],
            r("1"),
            r("0")
        )
        .is_err());
    }

    #[test]
    fn c1_c2_examples() {
        let t3 = t3();
        let pair = constant_pair();
        for f in [chain_map(&t3), swap_map(&t3)] {
            assert_eq!(check_c1_c2(&t3, &f, &pair).unwrap(), None);
        }

        // alpha(p,q) = 1 = C_alpha but alpha(fp,fq) = alpha(q,r) = 0.
        let mut alpha = vec![vec![r("1"); 3]; 3];
        alpha[1][2] = r("0");
        let pair =
            AdmissiblePair::new(alpha, vec![vec![r("1/10"); 3]; 3], r("1"), r("1/10")).unwrap();
        let witness = check_c1_c2(&t3, &chain_map(&t3), &pair).unwrap().unwrap();
        assert_eq!(witness.condition, Condition::C1);
        assert_eq!((witness.x.as_str(), witness.y.as_str()), ("p", "q"));

        // beta everywhere above C_beta: C2 holds vacuously.
        let pair = AdmissiblePair::new(
            vec![vec![r("1"); 3]; 3],
            vec![vec![r("11/10"); 3]; 3],
            r("1"),
            r("1/10"),
        )
        .unwrap();
        assert_eq!(check_c1_c2(&t3, &chain_map(&t3), &pair).unwrap(), None);
    }

    #[test]
    fn c3_examples() {
        let t3 = t3();
        assert!(check_c3(&t3, &constant_pair()));

        let boundary = QPSpace::new(
            vec!["u".into()],
            vec![vec![r("0")]],
            r("2"),
            BTreeSet::new(),
        )
        .unwrap();
        let pair = AdmissiblePair::constant(1, r("1"), r("1/2")).unwrap();
        assert!(!check_c3(&boundary, &pair));

        let zero_beta = AdmissiblePair::constant(1, r("5"), r("0")).unwrap();
        assert!(check_c3(&boundary, &zero_beta));
    }

    #[test]
    fn contraction_examples() {
        let t3 = t3();
        let pair = constant_pair();
        assert_eq!(
            check_contraction(&t3, &chain_map(&t3), &pair, ContractionForm::D).unwrap(),
            None
        );

        let witness = check_contraction(&t3, &swap_map(&t3), &pair, ContractionForm::D)
            .unwrap()
            .unwrap();
        assert_eq!((witness.x.as_str(), witness.y.as_str()), ("p", "q"));
        assert_eq!(witness.lhs, r("1"));
        assert_eq!(witness.rhs, r("1/10"));

        // A constant map contracts for free: the left side is always zero.
        let to_r = SelfMap::new(&t3, [("p", "r"), ("q", "r"), ("r", "r")]).unwrap();
        assert_eq!(check_contraction(&t3, &to_r, &pair, ContractionForm::D).unwrap(), None);
        assert_eq!(check_contraction(&t3, &to_r, &pair, ContractionForm::Ds).unwrap(), None);
    }

    #[test]
    fn seed_examples() {
        let t3 = t3();
        let f = chain_map(&t3);
        let pair = constant_pair();
        assert_eq!(find_seed_points(&t3, &f, &pair, SeedProfile::Left).unwrap(), ["p", "q", "r"]);

        // alpha(p, fp) = alpha(p,q) = 1/2 < C_alpha excludes p.
        let mut alpha = vec![vec![r("1"); 3]; 3];
        alpha[0][1] = r("1/2");
        let pair =
            AdmissiblePair::new(alpha, vec![vec![r("1/10"); 3]; 3], r("1"), r("1/10")).unwrap();
        assert_eq!(find_seed_points(&t3, &f, &pair, SeedProfile::Left).unwrap(), ["q", "r"]);

        // On symmetric matrices the min profile coincides with the left one.
        let pair = constant_pair();
        assert_eq!(
            find_seed_points(&t3, &f, &pair, SeedProfile::Left).unwrap(),
            find_seed_points(&t3, &f, &pair, SeedProfile::Min).unwrap()
        );
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let t3 = t3();
        let small = AdmissiblePair::constant(2, r("1"), r("0")).unwrap();
        let f = chain_map(&t3);
        assert!(check_c1_c2(&t3, &f, &small).is_err());
        assert!(check_contraction(&t3, &f, &small, ContractionForm::D).is_err());
        assert!(find_seed_points(&t3, &f, &small, SeedProfile::Left).is_err());
    }
}
