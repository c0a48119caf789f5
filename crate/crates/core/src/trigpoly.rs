//! Real symmetric trigonometric polynomials on the torus.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridField};
use crate::index::{half_index_set, HalfIndexSet, IndexSet, MultiIndex};
use crate::scalar::Scalar;

/// `P(e^{iθ}) = Σ_{k∈Λ} p_k e^{−i⟨k,θ⟩}` with `p_{−k} = p_k`.
///
/// One coefficient is stored per `±k` pair, ordered as the [`HalfIndexSet`] of the
/// support, so the polynomial is real-valued on the torus:
/// `P(θ) = p_0 + Σ_pairs 2 p_k cos⟨k,θ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly<T> {
    support: IndexSet,
    half: HalfIndexSet,
    coeffs: Vec<T>,
}

impl<T: Scalar> TrigPoly<T> {
    pub fn new(support: IndexSet, coeffs: Vec<T>) -> Result<Self> {
        let half = half_index_set(&support);
        if coeffs.len() != half.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients (one per ± pair), got {}",
                half.len(),
                coeffs.len()
            )));
        }
        Ok(Self {
            support,
            half,
            coeffs,
        })
    }

    pub fn zero(support: IndexSet) -> Self {
        let half = half_index_set(&support);
        let coeffs = vec![T::zero(); half.len()];
        Self {
            support,
            half,
            coeffs,
        }
    }

    /// The constant polynomial `c`.
    pub fn constant(support: IndexSet, c: T) -> Self {
        let mut p = Self::zero(support);
        p.coeffs[0] = c;
        p
    }

    pub fn support(&self) -> &IndexSet {
        &self.support
    }

    pub fn half(&self) -> &HalfIndexSet {
        &self.half
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `p_k` (equal to `p_{−k}`), or `None` if `k ∉ Λ`.
    pub fn coeff(&self, k: &MultiIndex) -> Option<T> {
        self.half.position(k).map(|r| self.coeffs[r])
    }

    pub fn set_coeff(&mut self, k: &MultiIndex, v: T) -> Result<()> {
        let r = self
            .half
            .position(k)
            .ok_or_else(|| Error::InvalidSupport { lag: k.key() })?;
        self.coeffs[r] = v;
        Ok(())
    }

    /// Direct evaluation at an arbitrary `θ`.
    pub fn eval_at(&self, theta: &[T]) -> T {
        assert_eq!(theta.len(), self.dim(), "theta dimension");
        let two = T::one() + T::one();
        let mut v = self.coeffs[0];
        for (r, k) in self.half.iter().enumerate().skip(1) {
            let phase = k
                .components()
                .iter()
                .zip(theta)
                .fold(T::zero(), |acc, (&kj, &tj)| acc + T::lit(kj as f64) * tj);
            v += two * self.coeffs[r] * phase.cos();
        }
        v
    }
}

/// Evaluates `p` at every point of `grid`.
pub fn eval_trig_poly<T: Scalar>(p: &TrigPoly<T>, grid: &Grid) -> Result<GridField<T>> {
    if p.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: p.dim(),
        });
    }
    let table = grid.cos_table::<T>();
    let two = T::one() + T::one();
    Ok(GridField::from_fn(*grid, |i| {
        let mut v = p.coeffs[0];
        for (r, k) in p.half.iter().enumerate().skip(1) {
            v += two * p.coeffs[r] * table[grid.phase(k, i)];
        }
        v
    }))
}

/// Coefficients of `|g(e^{iθ})|²` for the degree-one filter
/// `g(z) = g_0 − g_1 z_1^{−1} − … − g_d z_d^{−1}`.
///
/// Constant term `Σ g_j²`, lag `e_j` gives `−g_0 g_j`, lag `e_i − e_j` gives `g_i g_j`.
/// A lag is required in `lambda` only when its coefficient is nonzero.
pub fn filter_autocorrelation<T: Scalar>(g: &[T], lambda: &IndexSet) -> Result<TrigPoly<T>> {
    let d = lambda.dim();
    if g.len() != d + 1 {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            found: g.len(),
        });
    }
    let mut p = TrigPoly::zero(lambda.clone());
    p.coeffs[0] = g.iter().map(|&x| x * x).sum();

    let mut put = |k: MultiIndex, v: T| -> Result<()> {
        match p.half.position(&k) {
            Some(r) => {
                p.coeffs[r] += v;
                Ok(())
            }
            None if v == T::zero() => Ok(()),
            None => Err(Error::InvalidSupport { lag: k.key() }),
        }
    };
    for j in 1..=d {
        put(MultiIndex::unit(d, j - 1), -g[0] * g[j])?;
    }
    for i in 1..=d {
        for j in (i + 1)..=d {
            let k = MultiIndex::unit(d, i - 1).sub(&MultiIndex::unit(d, j - 1));
            put(k, g[i] * g[j])?;
        }
    }
    Ok(p)
}

/// Packs `(p, q)` into solver coordinates `[q over the half set, p over the half set minus 0]`.
///
/// Requires `p_0 = 1` exactly.
pub fn pack_variables<T: Scalar>(p: &TrigPoly<T>, q: &TrigPoly<T>) -> Result<Vec<T>> {
    if p.coeffs[0] != T::one() {
        return Err(Error::InvariantViolation(format!(
            "numerator must have p_0 = 1, found {}",
            p.coeffs[0]
        )));
    }
    if p.support != q.support {
        return Err(Error::InvalidInput("p and q have different supports".into()));
    }
    let mut x = Vec::with_capacity(2 * q.coeffs.len() - 1);
    x.extend_from_slice(&q.coeffs);
    x.extend_from_slice(&p.coeffs[1..]);
    Ok(x)
}

/// Inverse of [`pack_variables`]; `p_0` is set to 1.
pub fn unpack_variables<T: Scalar>(x: &[T], lambda: &IndexSet) -> Result<(TrigPoly<T>, TrigPoly<T>)> {
    if x.len() != lambda.len() {
        return Err(Error::InvalidInput(format!(
            "packed vector has length {}, index set has {} elements",
            x.len(),
            lambda.len()
        )));
    }
    let h = lambda.len().div_ceil(2);
    let q = TrigPoly::new(lambda.clone(), x[..h].to_vec())?;
    let mut pc = Vec::with_capacity(h);
    pc.push(T::one());
    pc.extend_from_slice(&x[h..]);
    let p = TrigPoly::new(lambda.clone(), pc)?;
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::index::{build_difference_set, unit_generators};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mi(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn lambda3() -> IndexSet {
        build_difference_set(&unit_generators(3)).unwrap()
    }

    /// |g(e^{iθ})|² via complex arithmetic with g(z) = g0 − Σ g_j z_j^{−1}.
    fn filter_sq_mag(g: &[f64], theta: &[f64]) -> f64 {
        let (mut re, mut im) = (g[0], 0.0);
        for (j, t) in theta.iter().enumerate() {
            // z^{-1} = e^{-iθ}
            re -= g[j + 1] * t.cos();
            im += g[j + 1] * t.sin();
        }
        re * re + im * im
    }

    #[test]
    fn eval_examples() {
        let lam = lambda3();
        let g = make_grid(3, 20).unwrap();
        let one = TrigPoly::constant(lam.clone(), 1.0f64);
        assert!(eval_trig_poly(&one, &g)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 1.0));

        let mut p = TrigPoly::constant(lam.clone(), 2.0f64);
        p.set_coeff(&mi(&[1, 0, 0]), 1.0).unwrap();
        let f = eval_trig_poly(&p, &g).unwrap();
        assert!((f.at(g.linear_index(&[0, 4, 9]).unwrap()) - 4.0).abs() < 1e-15);
        assert!(f.at(g.linear_index(&[10, 4, 9]).unwrap()).abs() < 1e-15);

        assert!(eval_trig_poly(&p, &make_grid(2, 4).unwrap()).is_err());
    }

    #[test]
    fn autocorrelation_of_denominator_filter() {
        let q = filter_autocorrelation(&[1.0f64, 0.3, 0.3, 0.3], &lambda3()).unwrap();
        let want = [
            ("0,0,0", 1.27),
            ("1,0,0", -0.3),
            ("0,1,0", -0.3),
            ("0,0,1", -0.3),
            ("1,-1,0", 0.09),
            ("1,0,-1", 0.09),
            ("0,1,-1", 0.09),
        ];
        for (k, v) in want {
            let got = q.coeff(&MultiIndex::parse_key(k).unwrap()).unwrap();
            assert!((got - v).abs() < 1e-15, "{k}: {got}");
        }
    }

    #[test]
    fn autocorrelation_of_numerator_filter() {
        let p = filter_autocorrelation(&[1.0f64, -0.2, -0.3, -0.4], &lambda3()).unwrap();
        let want = [
            ("0,0,0", 1.29),
            ("1,0,0", 0.2),
            ("0,1,0", 0.3),
            ("0,0,1", 0.4),
            ("1,-1,0", 0.06),
            ("1,0,-1", 0.08),
            ("0,1,-1", 0.12),
        ];
        for (k, v) in want {
            let got = p.coeff(&MultiIndex::parse_key(k).unwrap()).unwrap();
            assert!((got - v).abs() < 1e-15, "{k}: {got}");
        }
    }

    #[test]
    fn autocorrelation_matches_pointwise_magnitude() {
        let lam = lambda3();
        let g = make_grid(3, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for filt in [
            [1.0, 0.3, 0.3, 0.3],
            [1.0, -0.2, -0.3, -0.4],
            [0.7, 0.1, -0.5, 0.9],
        ] {
            let p = filter_autocorrelation(&filt, &lam).unwrap();
            let field = eval_trig_poly(&p, &g).unwrap();
            for _ in 0..100 {
                let i = rng.random_range(0..g.len());
                let direct = filter_sq_mag(&filt, &g.theta::<f64>(i));
                assert!((field.at(i) - direct).abs() <= 1e-12 * direct.max(1e-3));
                // off-grid too
                let th: Vec<f64> = (0..3)
                    .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                    .collect();
                let direct = filter_sq_mag(&filt, &th);
                assert!((p.eval_at(&th) - direct).abs() <= 1e-12 * direct.max(1e-3));
            }
        }
    }

    #[test]
    fn autocorrelation_at_pi_for_numerator() {
        // b(−1,−1,−1) = 0.1 so |b|² = 0.01 before normalization
        let lam = lambda3();
        let g = make_grid(3, 20).unwrap();
        let p = filter_autocorrelation(&[1.0f64, -0.2, -0.3, -0.4], &lam).unwrap();
        let i = g.linear_index(&[10, 10, 10]).unwrap();
        let v = eval_trig_poly(&p, &g).unwrap().at(i);
        assert!((v - 0.01).abs() < 1e-15);
        assert!((v / 1.29 - 0.01 / 1.29).abs() < 1e-15);
    }

    #[test]
    fn identity_filter_and_missing_lags() {
        let p = filter_autocorrelation(&[1.0, 0.0, 0.0], &IndexSet::zero_only(2)).unwrap();
        assert_eq!(p.coeffs(), &[1.0]);
        let err = filter_autocorrelation(&[1.0, 0.5, 0.0], &IndexSet::zero_only(2)).unwrap_err();
        assert!(matches!(err, Error::InvalidSupport { .. }));
        assert!(filter_autocorrelation(&[1.0, 0.5], &IndexSet::zero_only(2)).is_err());
    }

    #[test]
    fn pack_layout() {
        let lam = lambda3();
        let p = TrigPoly::constant(lam.clone(), 1.0f64);
        let q = TrigPoly::constant(lam.clone(), 3.0f64);
        let x = pack_variables(&p, &q).unwrap();
        assert_eq!(x.len(), 13);
        assert_eq!(x[0], 3.0);

        let bad = TrigPoly::constant(lam.clone(), 1.5f64);
        assert!(matches!(
            pack_variables(&bad, &q),
            Err(Error::InvariantViolation(_))
        ));

        let (p0, q0) = unpack_variables(&[0.5f64], &IndexSet::zero_only(3)).unwrap();
        assert_eq!(p0.coeffs(), &[1.0]);
        assert_eq!(q0.coeffs(), &[0.5]);
        assert!(unpack_variables(&[0.5f64, 1.0], &lam).is_err());
    }

    proptest! {
        #[test]
        fn pack_unpack_round_trip(x in prop::collection::vec(-1e6f64..1e6, 13)) {
            let lam = lambda3();
            let (p, q) = unpack_variables(&x, &lam).unwrap();
            let back = pack_variables(&p, &q).unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn evaluation_is_even_on_grid(c in prop::collection::vec(-10.0f64..10.0, 7)) {
            let g = make_grid(3, 20).unwrap();
            let p = TrigPoly::new(lambda3(), c).unwrap();
            let f = eval_trig_poly(&p, &g).unwrap();
            for i in (0..g.len()).step_by(13) {
                prop_assert!((f.at(i) - f.at(g.negate(i))).abs() <= 1e-12);
            }
        }
    }
}
