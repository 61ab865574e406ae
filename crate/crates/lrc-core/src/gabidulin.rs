//! The `[N, K, D = N-K+1]` Gabidulin code over `F_{q^m}`: messages are
//! coefficient vectors of linearized polynomials, codewords their
//! evaluations at `N` points that are linearly independent over `F_q`.
//!
//! The evaluation points are fixed to the first `N` polynomial-basis
//! elements `1, x, ..., x^(N-1)` (valid whenever `N <= m`), which makes
//! codes reproducible without carrying a point set around. Decoding accepts
//! arbitrary (point, value) observations, not just codeword positions; any
//! set whose points span at least `K` dimensions over `F_q` determines the
//! message. That freedom is what lets surviving MDS parities act as extra
//! observations later in the pipeline.

use crate::error::{Error, Result};
use crate::gf::{rank_over_base, ExtParams, FieldElem};
use crate::linpoly::{lp_eval, lp_interpolate, LinearizedPoly};

#[derive(Debug, Clone)]
pub struct GabidulinCode {
    ext: ExtParams,
    n_len: usize,
    k_dim: usize,
    eval_points: Vec<FieldElem>,
}

impl GabidulinCode {
    /// Builds the `[n, k]` code over `ext`, requiring `m >= n >= k >= 1`.
    pub fn new(ext: ExtParams, n: usize, k: usize) -> Result<Self> {
        if k == 0 || n < k {
            return Err(Error::InvalidParams(format!(
                "need n >= k >= 1, got n = {n}, k = {k}"
            )));
        }
        if n > ext.degree() {
            return Err(Error::InvalidParams(format!(
                "code length {n} exceeds extension degree m = {}",
                ext.degree()
            )));
        }
        let eval_points = (0..n).map(|i| ext.basis_elem(i)).collect();
        Ok(Self {
            ext,
            n_len: n,
            k_dim: k,
            eval_points,
        })
    }

    pub fn ext(&self) -> &ExtParams {
        &self.ext
    }

    pub fn length(&self) -> usize {
        self.n_len
    }

    pub fn dimension(&self) -> usize {
        self.k_dim
    }

    /// Minimum rank distance `D = N - K + 1`.
    pub fn min_rank_distance(&self) -> usize {
        self.n_len - self.k_dim + 1
    }

    pub fn eval_points(&self) -> &[FieldElem] {
        &self.eval_points
    }

    /// Encodes `message` (the polynomial coefficients) into `N` evaluations.
    pub fn encode(&self, message: &[FieldElem]) -> Result<Vec<FieldElem>> {
        if message.len() != self.k_dim {
            return Err(Error::ShapeMismatch {
                expected: self.k_dim,
                got: message.len(),
            });
        }
        let f = LinearizedPoly::new(message.to_vec());
        Ok(self
            .eval_points
            .iter()
            .map(|g| lp_eval(&self.ext, &f, g))
            .collect())
    }

    /// Recovers the message from any observations `(obs_points[j], obs_values[j])`
    /// with `value = f(point)`, provided the points span at least `K`
    /// dimensions over `F_q`. Up to `D - 1` rank erasures are tolerated.
    pub fn erasure_decode(
        &self,
        obs_points: &[FieldElem],
        obs_values: &[FieldElem],
    ) -> Result<Vec<FieldElem>> {
        let f = lp_interpolate(&self.ext, obs_points, obs_values, self.k_dim)?;
        Ok(f.coeffs)
    }
}

/// Rank distance `d_R(u, v) = rank(U - V)` over the base field.
pub fn rank_distance(ext: &ExtParams, u: &[FieldElem], v: &[FieldElem]) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::ShapeMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let diff: Vec<FieldElem> = u.iter().zip(v).map(|(a, b)| ext.add(a, b)).collect();
    Ok(rank_over_base(ext, &diff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::test_support::rand_elem;
    use crate::gf::{span_dim_over_base, BaseParams};
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn code(s: u32, m: usize, n: usize, k: usize) -> GabidulinCode {
        let ext = ExtParams::new(BaseParams::new(s).unwrap(), m).unwrap();
        GabidulinCode::new(ext, n, k).unwrap()
    }

    fn rand_message(c: &GabidulinCode, rng: &mut impl Rng) -> Vec<FieldElem> {
        (0..c.dimension()).map(|_| rand_elem(c.ext(), rng)).collect()
    }

    #[test]
    fn eval_points_are_independent() {
        let c = code(1, 11, 11, 9);
        assert_eq!(span_dim_over_base(c.ext(), c.eval_points()), 11);
    }

    #[test]
    fn zero_message_gives_zero_codeword() {
        let c = code(1, 8, 6, 3);
        let msg = vec![c.ext().zero(); 3];
        assert!(c.encode(&msg).unwrap().iter().all(|s| s.is_zero()));
    }

    #[test]
    fn k1_codeword_is_scalar_times_points() {
        let c = code(2, 6, 5, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = rand_elem(c.ext(), &mut rng);
        let cw = c.encode(std::slice::from_ref(&m)).unwrap();
        for (s, g) in cw.iter().zip(c.eval_points()) {
            assert_eq!(*s, c.ext().mul(&m, g));
        }
    }

    #[test]
    fn encode_is_linear() {
        let c = code(2, 7, 6, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let m1 = rand_message(&c, &mut rng);
            let m2 = rand_message(&c, &mut rng);
            let sum: Vec<FieldElem> = m1
                .iter()
                .zip(&m2)
                .map(|(a, b)| c.ext().add(a, b))
                .collect();
            let c1 = c.encode(&m1).unwrap();
            let c2 = c.encode(&m2).unwrap();
            let cs = c.encode(&sum).unwrap();
            for i in 0..c.length() {
                assert_eq!(cs[i], c.ext().add(&c1[i], &c2[i]));
            }
        }
    }

    #[test]
    fn full_codeword_round_trip() {
        let c = code(3, 9, 9, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let msg = rand_message(&c, &mut rng);
            let cw = c.encode(&msg).unwrap();
            let got = c.erasure_decode(c.eval_points(), &cw).unwrap();
            assert_eq!(got, msg);
        }
    }

    #[test]
    fn decode_from_every_k_subset_11_9() {
        // Any K = 9 codeword positions of the [11, 9] code over GF(2^11)
        // recover the message: all C(11, 9) = 55 subsets.
        let c = code(1, 11, 11, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let msg = rand_message(&c, &mut rng);
        let cw = c.encode(&msg).unwrap();
        let mut count = 0;
        for subset in (0..11).combinations(9) {
            let pts: Vec<FieldElem> = subset
                .iter()
                .map(|&j: &usize| c.eval_points()[j].clone())
                .collect();
            let vals: Vec<FieldElem> = subset.iter().map(|&j| cw[j].clone()).collect();
            assert_eq!(c.erasure_decode(&pts, &vals).unwrap(), msg);
            count += 1;
        }
        assert_eq!(count, 55);
    }

    #[test]
    fn decode_rejects_deficient_span() {
        let c = code(1, 8, 8, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let msg = rand_message(&c, &mut rng);
        let cw = c.encode(&msg).unwrap();
        // only 3 distinct positions observed (plus a repeat): span 3 < 4
        let idx = [0usize, 1, 2, 2];
        let pts: Vec<FieldElem> = idx.iter().map(|&j| c.eval_points()[j].clone()).collect();
        let vals: Vec<FieldElem> = idx.iter().map(|&j| cw[j].clone()).collect();
        assert!(matches!(
            c.erasure_decode(&pts, &vals),
            Err(Error::RankDeficient { span: 3, required: 4 })
        ));
    }

    #[test]
    fn mrd_property_small_code() {
        // [4, 2] over GF(2^4): exhaustively over all 2^8 messages the
        // minimum nonzero rank weight is exactly D = 3 (Singleton-tight).
        let c = code(1, 4, 4, 2);
        let order = c.ext().order().unwrap(); // 16
        let mut min_rank = usize::MAX;
        for i in 0..order * order {
            if i == 0 {
                continue;
            }
            let msg = vec![
                c.ext().elem_from_index(i % order),
                c.ext().elem_from_index(i / order),
            ];
            let cw = c.encode(&msg).unwrap();
            min_rank = min_rank.min(rank_over_base(c.ext(), &cw));
        }
        assert_eq!(min_rank, 3);
    }

    #[test]
    fn rank_distance_properties() {
        let c = code(1, 6, 6, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u: Vec<FieldElem> = (0..6).map(|_| rand_elem(c.ext(), &mut rng)).collect();
        let v: Vec<FieldElem> = (0..6).map(|_| rand_elem(c.ext(), &mut rng)).collect();
        assert_eq!(rank_distance(c.ext(), &u, &u).unwrap(), 0);
        assert_eq!(
            rank_distance(c.ext(), &u, &v).unwrap(),
            rank_distance(c.ext(), &v, &u).unwrap()
        );
        assert!(rank_distance(c.ext(), &u, v[..5].to_vec().as_slice()).is_err());
    }

    #[test]
    fn distinct_codewords_achieve_min_distance() {
        // By linearity, the distance between distinct codewords is the rank
        // weight of the difference's codeword, so exhausting messages covers
        // all pairs of the [4, 2] code.
        let c = code(1, 4, 4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let m1 = rand_message(&c, &mut rng);
            let m2 = rand_message(&c, &mut rng);
            if m1 == m2 {
                continue;
            }
            let d = rank_distance(
                c.ext(),
                &c.encode(&m1).unwrap(),
                &c.encode(&m2).unwrap(),
            )
            .unwrap();
            assert!(d >= 3, "distance {d} below D = 3");
        }
    }

    #[test]
    fn invalid_shapes_rejected() {
        let ext = ExtParams::new(BaseParams::new(1).unwrap(), 6).unwrap();
        assert!(GabidulinCode::new(ext.clone(), 7, 3).is_err()); // n > m
        assert!(GabidulinCode::new(ext.clone(), 4, 5).is_err()); // k > n
        assert!(GabidulinCode::new(ext.clone(), 4, 0).is_err());
        let c = GabidulinCode::new(ext, 5, 3).unwrap();
        assert!(c.encode(&vec![c.ext().zero(); 2]).is_err());
    }
}
