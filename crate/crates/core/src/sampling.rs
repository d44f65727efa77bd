//! Seeded random inputs and the fixed example spaces.
//!
//! Random spaces are subsets of the real line with rational coordinates, so
//! the metric axioms hold by construction and exact mode is always available.

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::metric::{lipschitz_constant, FiniteMetricSpace, SelfMap};
use crate::real::Rational;

/// Deterministic generator used everywhere a seed is accepted.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `n` distinct points `k / den` with `k` drawn without replacement from
/// `0..range`.
pub fn random_line_space<R: Rng>(rng: &mut R, n: usize, den: u32, range: u32) -> FiniteMetricSpace<Rational> {
    assert!(n <= range as usize, "cannot draw {n} distinct points from {range}");
    let points = sample(rng, range as usize, n).into_iter().map(|k| frac(k as i64, den as i64)).collect();
    FiniteMetricSpace::induced_from_reals(points).expect("sampled points are distinct")
}

/// Uniform self-map of an `n`-point space.
pub fn random_self_map<R: Rng>(rng: &mut R, n: usize) -> SelfMap {
    SelfMap::new((0..n).map(|_| rng.gen_range(0..n)).collect()).expect("indices are in range")
}

/// A map with Lipschitz constant `lambda < 1` on a line space.
#[derive(Clone, Debug)]
pub struct BanachInstance {
    pub space: FiniteMetricSpace<Rational>,
    pub map: SelfMap,
    pub lambda: Rational,
}

/// Random Banach contraction on `n >= 2` points.
///
/// Points `p_0 < … < p_{n-1}` have strictly increasing gaps and the map is
/// monotone, `τ(0) = τ(1) = 0`, `τ(i+1) - τ(i) ∈ {0, 1}` and `τ(i) < i`. The
/// Lipschitz constant of a monotone map on the line is its largest ratio over
/// consecutive points, here `gap_{τ(i)} / gap_i` or 0, which is below 1.
/// Indices are shuffled afterwards so the space is not presented sorted.
pub fn random_banach_instance<R: Rng>(rng: &mut R, n: usize) -> BanachInstance {
    assert!(n >= 2, "need two points");
    let den = 4;
    let mut gaps: Vec<i64> = sample(rng, 400, n - 1).into_iter().map(|g| g as i64 + 1).collect();
    gaps.sort_unstable();
    let mut coords = vec![rng.gen_range(-200..200i64)];
    for g in &gaps {
        coords.push(coords.last().expect("seeded") + g);
    }
    let mut tau = vec![0usize; n];
    for i in 1..n - 1 {
        let step = usize::from(rng.gen_bool(0.6));
        tau[i + 1] = (tau[i] + step).min(i);
    }

    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    // order[k] is the sorted position shown at index k
    let mut index_of = vec![0; n];
    for (k, &p) in order.iter().enumerate() {
        index_of[p] = k;
    }
    let points = order.iter().map(|&p| frac(coords[p], den)).collect();
    let image = order.iter().map(|&p| index_of[tau[p]]).collect();
    let space = FiniteMetricSpace::induced_from_reals(points).expect("coordinates are distinct");
    let map = SelfMap::new(image).expect("indices are in range");
    let lambda = lipschitz_constant(&space, &map).expect("n >= 2");
    BanachInstance { space, map, lambda }
}

/// `{1/4, 1/2, 1, 2, 4, 8, 16}` with `x ↦ x/2` and `1/4` fixed; every pair
/// not involving `1/4` has its distance exactly halved.
pub fn halving_example() -> (FiniteMetricSpace<Rational>, SelfMap) {
    let points = [frac(1, 4), frac(1, 2), frac(1, 1), frac(2, 1), frac(4, 1), frac(8, 1), frac(16, 1)];
    let space = FiniteMetricSpace::induced_from_reals(points.to_vec()).expect("distinct");
    (space, SelfMap::new(vec![0, 0, 1, 2, 3, 4, 5]).expect("in range"))
}

/// `{0, 4, 8, 16, 32}` with `0, 4, 8 ↦ 0`, `16 ↦ 4`, `32 ↦ 8`: an
/// `(E, F)`-contraction for `F = example42F` and `E = 0.7 F`.
pub fn ef_example() -> (FiniteMetricSpace<Rational>, SelfMap) {
    let points = [0, 4, 8, 16, 32].map(|k| frac(k, 1));
    let space = FiniteMetricSpace::induced_from_reals(points.to_vec()).expect("distinct");
    (space, SelfMap::new(vec![0, 0, 0, 1, 2]).expect("in range"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn banach_instances_contract() {
        let mut rng = seeded(7);
        for _ in 0..200 {
            let n = rng.gen_range(2..=12);
            let inst = random_banach_instance(&mut rng, n);
            assert!(inst.lambda < Rational::one(), "{:?}", inst.lambda);
            assert_eq!(inst.space.len(), n);
        }
    }

    #[test]
    fn seeds_reproduce() {
        let a = random_line_space(&mut seeded(3), 8, 8, 100);
        let b = random_line_space(&mut seeded(3), 8, 8, 100);
        assert_eq!(a, b);
        let m1 = random_self_map(&mut seeded(3), 8);
        let m2 = random_self_map(&mut seeded(3), 8);
        assert_eq!(m1, m2);
    }

    #[test]
    fn halving_lipschitz_is_one_half() {
        let (s, t) = halving_example();
        assert_eq!(lipschitz_constant(&s, &t).unwrap(), frac(1, 2));
    }
}
