#![allow(dead_code)]

use iwasawa_core::{FiniteSpectrumData, OddPrime};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub const PRIMES: [u64; 3] = [3, 5, 7];

pub fn p(n: u64) -> OddPrime {
    OddPrime::new(n).unwrap()
}

pub fn data(prime: u64, betti: &[(i64, u64)]) -> FiniteSpectrumData {
    FiniteSpectrumData::from_betti(p(prime), betti.iter().copied())
}

pub fn prime() -> impl Strategy<Value = OddPrime> {
    prop::sample::select(PRIMES.to_vec()).prop_map(p)
}

/// Betti numbers in `[lo, hi]` with ranks `1..=max_rank`, plus torsion markers.
pub fn spectrum_at(
    prime: OddPrime,
    lo: i64,
    hi: i64,
    max_rank: u64,
    with_torsion: bool,
) -> impl Strategy<Value = FiniteSpectrumData> {
    let betti = prop::collection::btree_map(lo..=hi, 1..=max_rank, 0..6);
    let torsion = if with_torsion {
        prop::collection::btree_set(lo..=hi, 0..3).boxed()
    } else {
        Just(Default::default()).boxed()
    };
    (betti, torsion).prop_map(move |(b, t)| FiniteSpectrumData::from_betti(prime, b).with_torsion(t))
}

pub fn spectrum(lo: i64, hi: i64, max_rank: u64, with_torsion: bool) -> impl Strategy<Value = FiniteSpectrumData> {
    prime().prop_flat_map(move |q| spectrum_at(q, lo, hi, max_rank, with_torsion))
}

/// A runner whose draws do not depend on the environment.
pub fn fixed_runner(seed: u8) -> TestRunner {
    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]);
    TestRunner::new_with_rng(Config::default(), rng)
}

pub fn sample<S: Strategy>(runner: &mut TestRunner, strategy: &S, count: usize) -> Vec<S::Value> {
    (0..count).map(|_| strategy.new_tree(runner).unwrap().current()).collect()
}
