//! Integer lattice indices and the symmetric moment support.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A point `k` of the integer lattice `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(k: Vec<i64>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::InvalidInput("multi-index must have dimension >= 1".into()));
        }
        Ok(Self(k))
    }

    pub fn zero(d: usize) -> Self {
        assert!(d >= 1, "dimension must be >= 1");
        Self(vec![0; d])
    }

    /// Unit vector along `axis`.
    pub fn unit(d: usize, axis: usize) -> Self {
        let mut k = vec![0; d];
        k[axis] = 1;
        Self(k)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|&x| -x).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// True for `0` and for indices whose first nonzero entry is positive.
    pub fn is_canonical(&self) -> bool {
        match self.0.iter().find(|&&x| x != 0) {
            None => true,
            Some(&x) => x > 0,
        }
    }

    /// The representative of `{k, -k}` whose first nonzero entry is positive.
    pub fn canonical(&self) -> Self {
        if self.is_canonical() {
            self.clone()
        } else {
            self.neg()
        }
    }

    /// Comma-separated key, e.g. `"1,-1,0"`.
    pub fn key(&self) -> String {
        self.to_string()
    }

    pub fn parse_key(s: &str) -> Result<Self> {
        let parts: std::result::Result<Vec<i64>, _> = s.split(',').map(|t| t.trim().parse::<i64>()).collect();
        match parts {
            Ok(v) => Self::new(v),
            Err(_) => Err(Error::InvalidInput(format!("malformed index key {s:?}"))),
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Finite index set `Λ ⊂ Z^d` containing `0` and closed under negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    d: usize,
    indices: Vec<MultiIndex>,
}

impl IndexSet {
    /// Validates and sorts `indices` lexicographically.
    pub fn new(indices: Vec<MultiIndex>) -> Result<Self> {
        let d = check_dims(&indices)?;
        let set: BTreeSet<MultiIndex> = indices.iter().cloned().collect();
        if set.len() != indices.len() {
            return Err(Error::InvalidInput("index set contains duplicates".into()));
        }
        if !set.contains(&MultiIndex::zero(d)) {
            return Err(Error::InvalidInput(
                "index set must contain the zero index".into(),
            ));
        }
        if let Some(k) = set.iter().find(|k| !set.contains(&k.neg())) {
            return Err(Error::InvalidInput(format!(
                "index set is not symmetric: contains ({k}) but not its negation"
            )));
        }
        Ok(Self {
            d,
            indices: set.into_iter().collect(),
        })
    }

    /// The trivial support `{0}` in dimension `d`.
    pub fn zero_only(d: usize) -> Self {
        Self {
            d,
            indices: vec![MultiIndex::zero(d)],
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        self.indices.binary_search(k).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.indices.iter()
    }
}

fn check_dims(indices: &[MultiIndex]) -> Result<usize> {
    let first = indices
        .first()
        .ok_or_else(|| Error::InvalidInput("index list is empty".into()))?;
    let d = first.dim();
    for k in indices {
        if k.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: k.dim(),
            });
        }
    }
    Ok(d)
}

/// Builds `Λ = Λ₊ − Λ₊ = {x − y : x, y ∈ Λ₊}`.
pub fn build_difference_set(lambda_plus: &[MultiIndex]) -> Result<IndexSet> {
    let d = check_dims(lambda_plus)?;
    if !lambda_plus.iter().any(MultiIndex::is_zero) {
        return Err(Error::InvalidInput(
            "generating set must contain the zero index".into(),
        ));
    }
    let mut out = BTreeSet::new();
    for x in lambda_plus {
        for y in lambda_plus {
            out.insert(x.sub(y));
        }
    }
    let indices: Vec<_> = out.into_iter().collect();
    debug_assert!(indices.iter().all(|k| k.dim() == d));
    IndexSet::new(indices)
}

/// One representative per `±k` pair of an [`IndexSet`], zero first.
///
/// Representatives have their first nonzero entry positive and follow in
/// lexicographic order. This ordering fixes the solver's variable layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfIndexSet {
    d: usize,
    reps: Vec<MultiIndex>,
}

impl HalfIndexSet {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of representatives including zero: `(|Λ| + 1) / 2`.
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn get(&self, r: usize) -> &MultiIndex {
        &self.reps[r]
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.reps.iter()
    }

    /// Representatives excluding zero.
    pub fn nonzero(&self) -> &[MultiIndex] {
        &self.reps[1..]
    }

    /// Position of `k` or `-k`.
    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        if k.dim() != self.d {
            return None;
        }
        let c = k.canonical();
        if c.is_zero() {
            return Some(0);
        }
        self.reps[1..].binary_search(&c).ok().map(|i| i + 1)
    }

    /// Multiplicity of representative `r` in `Λ`: 1 for zero, 2 for each pair.
    pub fn multiplicity(r: usize) -> usize {
        if r == 0 {
            1
        } else {
            2
        }
    }

    /// Recovers the full symmetric set.
    pub fn to_index_set(&self) -> IndexSet {
        let mut all = Vec::with_capacity(2 * self.reps.len() - 1);
        for k in &self.reps {
            all.push(k.clone());
            if !k.is_zero() {
                all.push(k.neg());
            }
        }
        IndexSet::new(all).expect("half set reconstructs a valid index set")
    }
}

/// Canonical half set of `lambda`.
pub fn half_index_set(lambda: &IndexSet) -> HalfIndexSet {
    let mut reps: Vec<MultiIndex> = lambda
        .iter()
        .filter(|k| !k.is_zero() && k.is_canonical())
        .cloned()
        .collect();
    reps.sort();
    reps.insert(0, MultiIndex::zero(lambda.dim()));
    HalfIndexSet {
        d: lambda.dim(),
        reps,
    }
}

/// The generating set `{0, e_1, …, e_d}` used by the degree-one filter models.
pub fn unit_generators(d: usize) -> Vec<MultiIndex> {
    let mut v = vec![MultiIndex::zero(d)];
    v.extend((0..d).map(|a| MultiIndex::unit(d, a)));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn difference_set_of_unit_generators_in_3d() {
        let lam = build_difference_set(&unit_generators(3)).unwrap();
        assert_eq!(lam.len(), 13);
        let expected = [
            [0, 0, 0],
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
            [1, -1, 0],
            [1, 0, -1],
            [0, 1, -1],
        ];
        for e in expected {
            let k = mi(&e);
            assert!(lam.contains(&k) && lam.contains(&k.neg()), "{k}");
        }
        for k in lam.iter() {
            assert!(lam.contains(&k.neg()));
        }
    }

    #[test]
    fn difference_set_trivial_cases() {
        let lam = build_difference_set(&[mi(&[0])]).unwrap();
        assert_eq!(lam.iter().cloned().collect::<Vec<_>>(), vec![mi(&[0])]);

        let lam = build_difference_set(&[mi(&[0, 0]), mi(&[1, 0])]).unwrap();
        assert_eq!(
            lam.iter().cloned().collect::<Vec<_>>(),
            vec![mi(&[-1, 0]), mi(&[0, 0]), mi(&[1, 0])]
        );
    }

    #[test]
    fn difference_set_rejects_mixed_dimensions() {
        let err = build_difference_set(&[mi(&[0, 0]), mi(&[1])]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        assert!(build_difference_set(&[]).is_err());
    }

    #[test]
    fn half_set_ordering() {
        let lam = build_difference_set(&unit_generators(3)).unwrap();
        let half = half_index_set(&lam);
        let got: Vec<String> = half.iter().map(|k| k.key()).collect();
        assert_eq!(
            got,
            ["0,0,0", "0,0,1", "0,1,-1", "0,1,0", "1,-1,0", "1,0,-1", "1,0,0"]
        );
        assert_eq!(half.to_index_set(), lam);
        assert_eq!(half.position(&mi(&[-1, 1, 0])), Some(4));
        assert_eq!(half.position(&mi(&[2, 0, 0])), None);
    }

    #[test]
    fn half_set_small_cases() {
        let lam = IndexSet::new(vec![mi(&[0, 0, 0]), mi(&[1, 0, 0]), mi(&[-1, 0, 0])]).unwrap();
        let half = half_index_set(&lam);
        assert_eq!(
            half.iter().cloned().collect::<Vec<_>>(),
            vec![mi(&[0, 0, 0]), mi(&[1, 0, 0])]
        );

        let half = half_index_set(&IndexSet::zero_only(2));
        assert_eq!(half.len(), 1);
        assert!(half.get(0).is_zero());
    }

    #[test]
    fn index_set_validation() {
        assert!(IndexSet::new(vec![mi(&[0]), mi(&[1])]).is_err());
        assert!(IndexSet::new(vec![mi(&[1]), mi(&[-1])]).is_err());
        assert!(IndexSet::new(vec![mi(&[0]), mi(&[0])]).is_err());
    }

    #[test]
    fn key_round_trip() {
        let k = mi(&[1, -1, 0]);
        assert_eq!(MultiIndex::parse_key(&k.key()).unwrap(), k);
        assert!(MultiIndex::parse_key("1,x").is_err());
    }
}
