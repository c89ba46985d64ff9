//! Graded averages of K(1)-local homotopy orders and their logarithmic growth.
//!
//! The graded average over the window `[m+1, m+n]` is
//! `(1/n) Σ (-1)^j |π_j L_{K(1)} X|`, with even degrees counted positively.
//! Sums are accumulated exactly and streamed; nothing proportional to the
//! window length is ever held in memory.
//!
//! For a wedge of spheres the order of `π_j` can be measured two ways. The
//! growth law `-λ(X)/2 · log_p(n)` and its additivity under wedges hold for
//! [`OrderMeasure::SummandSum`], which adds the orders of the individual
//! sphere summands. The literal group order ([`OrderMeasure::GroupOrder`])
//! multiplies them instead, and is not additive.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::k1::{sphere_order, K1Error};
use crate::padic::{OddPrime, PadicValuation};
use crate::spectra::{total_lambda, FiniteSpectrumData};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsymptoticsError {
    #[error("π_{0} is infinite; skip past it")]
    InfiniteOrderInWindow(i64),
    #[error("window length must be positive")]
    EmptyWindow,
    #[error("total λ-invariant is zero; the growth ratio is undefined")]
    LambdaZero,
    #[error(transparent)]
    K1(#[from] K1Error),
    #[error("prime mismatch between wedge summands")]
    PrimeMismatch,
}

/// How the order of `π_j` of a wedge of spheres is measured.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderMeasure {
    /// `Σ_d r_d |π_{j-d} L_{K(1)}S^0|`
    #[default]
    SummandSum,
    /// `Π_d |π_{j-d} L_{K(1)}S^0|^{r_d}`
    GroupOrder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedAverage {
    pub m: i64,
    pub n: u64,
    pub value: BigRational,
}

impl GradedAverage {
    /// The un-normalized alternating sum `n * value`.
    pub fn sum(&self) -> BigInt {
        (&self.value * BigRational::from_integer(self.n.into())).to_integer()
    }
}

/// Mixed-width exact accumulator: `i128` until it would overflow.
#[derive(Debug, Clone, Default)]
struct Accumulator {
    small: i128,
    big: BigInt,
}

impl Accumulator {
    fn add_signed(&mut self, negative: bool, magnitude: Magnitude) {
        match magnitude {
            Magnitude::Small(v) => {
                let v = if negative { -(v as i128) } else { v as i128 };
                match self.small.checked_add(v) {
                    Some(s) => self.small = s,
                    None => self.big += BigInt::from(v),
                }
            }
            Magnitude::Big(v) => {
                if negative {
                    self.big -= v;
                } else {
                    self.big += v;
                }
            }
        }
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        match self.small.checked_add(other.small) {
            Some(s) => self.small = s,
            None => self.big += BigInt::from(other.small),
        }
        self.big += other.big;
        self
    }

    fn total(self) -> BigInt {
        self.big + BigInt::from(self.small)
    }
}

enum Magnitude {
    Small(u64),
    Big(BigInt),
}

fn power(p: u64, e: u64) -> Magnitude {
    match u32::try_from(e).ok().and_then(|e| p.checked_pow(e)) {
        Some(v) => Magnitude::Small(v),
        None => Magnitude::Big(num_traits::Pow::pow(BigInt::from(p), e)),
    }
}

fn scaled(r: u64, m: Magnitude) -> Magnitude {
    match m {
        Magnitude::Small(v) => match v.checked_mul(r) {
            Some(x) => Magnitude::Small(x),
            None => Magnitude::Big(BigInt::from(v) * r),
        },
        Magnitude::Big(v) => Magnitude::Big(v * r),
    }
}

/// The torsion-free cells of `X` as a flat list, for the hot loop.
struct Cells {
    p: u64,
    period: i64,
    cells: Vec<(i64, u64)>,
}

impl Cells {
    fn new(x: &FiniteSpectrumData) -> Result<Self, AsymptoticsError> {
        if !x.is_torsion_free() {
            return Err(K1Error::TorsionPresent(x.torsion().iter().copied().collect()).into());
        }
        let p = x.prime().get();
        Ok(Cells {
            p,
            period: 2 * (p as i64 - 1),
            cells: x.betti().iter().map(|(&d, &r)| (d, r)).collect(),
        })
    }

    /// First degree in `[lo, hi]` where `π_j` is infinite.
    fn first_infinite(&self, lo: i64, hi: i64) -> Option<i64> {
        self.cells
            .iter()
            .flat_map(|&(d, _)| [d - 1, d])
            .filter(|j| (lo..=hi).contains(j))
            .min()
    }

    fn add_term(&self, acc: &mut Accumulator, j: i64, measure: OrderMeasure) {
        let negative = j.rem_euclid(2) == 1;
        match measure {
            OrderMeasure::SummandSum => {
                for &(d, r) in &self.cells {
                    let order = match self.exponent(j - d) {
                        0 => Magnitude::Small(r),
                        e => scaled(r, power(self.p, e)),
                    };
                    acc.add_signed(negative, order);
                }
            }
            OrderMeasure::GroupOrder => {
                let e: u64 = self.cells.iter().map(|&(d, r)| r * self.exponent(j - d)).sum();
                acc.add_signed(negative, power(self.p, e));
            }
        }
    }

    /// Exponent of `|π_t L_{K(1)}S^0|` for `t ∉ {-1, 0}`.
    #[inline]
    fn exponent(&self, t: i64) -> u64 {
        if (t + 1) % self.period != 0 {
            return 0;
        }
        let mut m = ((t + 1) / self.period).unsigned_abs();
        let mut k = 1;
        while m.is_multiple_of(self.p) {
            m /= self.p;
            k += 1;
        }
        k
    }
}

const CHUNK: u64 = 1 << 16;

/// `Σ_{j=m+1}^{m+n} (-1)^j |π_j L_{K(1)} X|`, exactly.
pub fn graded_sum(
    x: &FiniteSpectrumData,
    m: i64,
    n: u64,
    measure: OrderMeasure,
) -> Result<BigInt, AsymptoticsError> {
    let cells = Cells::new(x)?;
    let lo = m + 1;
    let hi = m + n as i64;
    if let Some(j) = cells.first_infinite(lo, hi) {
        return Err(AsymptoticsError::InfiniteOrderInWindow(j));
    }
    let chunks = n.div_ceil(CHUNK);
    let total = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = lo + (c * CHUNK) as i64;
            let end = (start + CHUNK as i64 - 1).min(hi);
            let mut acc = Accumulator::default();
            for j in start..=end {
                cells.add_term(&mut acc, j, measure);
            }
            acc
        })
        .reduce(Accumulator::default, Accumulator::merge);
    Ok(total.total())
}

pub fn graded_average(
    x: &FiniteSpectrumData,
    m: i64,
    n: u64,
) -> Result<GradedAverage, AsymptoticsError> {
    graded_average_with(x, m, n, OrderMeasure::SummandSum)
}

pub fn graded_average_with(
    x: &FiniteSpectrumData,
    m: i64,
    n: u64,
    measure: OrderMeasure,
) -> Result<GradedAverage, AsymptoticsError> {
    if n == 0 {
        return Err(AsymptoticsError::EmptyWindow);
    }
    let sum = graded_sum(x, m, n, measure)?;
    Ok(GradedAverage { m, n, value: BigRational::new(sum, n.into()) })
}

/// Running alternating sums over `[m+1, m+N]` for `N = 1, 2, ...`.
///
/// Yields `(N, Σ_{j=m+1}^{m+N} (-1)^j |π_j|)` lazily in constant memory.
pub struct GradedSumStream {
    cells: Cells,
    m: i64,
    n: u64,
    measure: OrderMeasure,
    acc: Accumulator,
}

impl GradedSumStream {
    pub fn new(
        x: &FiniteSpectrumData,
        m: i64,
        measure: OrderMeasure,
    ) -> Result<Self, AsymptoticsError> {
        let cells = Cells::new(x)?;
        if let Some(j) = cells.first_infinite(m + 1, i64::MAX) {
            return Err(AsymptoticsError::InfiniteOrderInWindow(j));
        }
        Ok(GradedSumStream { cells, m, n: 0, measure, acc: Accumulator::default() })
    }
}

impl Iterator for GradedSumStream {
    type Item = (u64, BigInt);

    fn next(&mut self) -> Option<Self::Item> {
        self.n += 1;
        let j = self.m + self.n as i64;
        self.cells.add_term(&mut self.acc, j, self.measure);
        Some((self.n, self.acc.clone().total()))
    }
}

/// Smallest skip `m ≥ 0` for which every order in `[m+1, ∞)` is finite.
///
/// The infinite groups of `X` sit in degrees `d - 1` and `d` for each cell
/// `d`, so it suffices to start past the top cell.
pub fn default_skip(x: &FiniteSpectrumData) -> i64 {
    x.betti().keys().next_back().copied().unwrap_or(0).max(0)
}

/// `2(p-1)p^n`, the window on which the sphere's average is `(-1-n)/2`.
pub fn sphere_window_length(p: OddPrime, n: u32) -> u64 {
    2 * (p.get() - 1) * p.get().pow(n)
}

/// `(-1-n)/2`: the graded average of `S^0` over `[1, 2(p-1)p^n]`.
pub fn sn_closed_form(n: u64) -> BigRational {
    BigRational::new(BigInt::from(-1) - BigInt::from(n), 2.into())
}

pub fn log_p(p: OddPrime, x: f64) -> f64 {
    x.ln() / (p.get() as f64).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthRatio {
    Defined(f64),
    /// `λ(X) = 0`, or a window of length 1 where `log_p(n) = 0`.
    Undefined,
}

impl GrowthRatio {
    pub fn value(self) -> Option<f64> {
        match self {
            GrowthRatio::Defined(r) => Some(r),
            GrowthRatio::Undefined => None,
        }
    }
}

impl fmt::Display for GrowthRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthRatio::Defined(r) => write!(f, "{r:.6}"),
            GrowthRatio::Undefined => f.write_str("undefined"),
        }
    }
}

/// Graded average divided by `-λ(X) log_p(n) / 2`.
pub fn growth_ratio(x: &FiniteSpectrumData, m: i64, n: u64) -> Result<GrowthRatio, AsymptoticsError> {
    let avg = graded_average(x, m, n)?;
    Ok(ratio_of(x.prime(), total_lambda(x), &avg))
}

/// The ratio for an already computed average.
pub fn ratio_of(p: OddPrime, lambda: i64, avg: &GradedAverage) -> GrowthRatio {
    if lambda == 0 || avg.n < 2 {
        return GrowthRatio::Undefined;
    }
    let value = avg.value.to_f64().expect("finite rational");
    GrowthRatio::Defined(value / (-(lambda as f64) * log_p(p, avg.n as f64) / 2.0))
}

/// `graded_average(X v Z) - graded_average(X) - graded_average(Z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditivityReport {
    pub wedge: GradedAverage,
    pub left: GradedAverage,
    pub right: GradedAverage,
    pub difference: BigRational,
}

impl AdditivityReport {
    pub fn is_exact(&self) -> bool {
        self.difference.is_zero()
    }
}

pub fn additivity_check(
    x: &FiniteSpectrumData,
    z: &FiniteSpectrumData,
    m: i64,
    n: u64,
) -> Result<AdditivityReport, AsymptoticsError> {
    additivity_check_with(x, z, m, n, OrderMeasure::SummandSum)
}

pub fn additivity_check_with(
    x: &FiniteSpectrumData,
    z: &FiniteSpectrumData,
    m: i64,
    n: u64,
    measure: OrderMeasure,
) -> Result<AdditivityReport, AsymptoticsError> {
    let xz = x.wedge(z).map_err(|_| AsymptoticsError::PrimeMismatch)?;
    let wedge = graded_average_with(&xz, m, n, measure)?;
    let left = graded_average_with(x, m, n, measure)?;
    let right = graded_average_with(z, m, n, measure)?;
    let difference = &wedge.value - &left.value - &right.value;
    Ok(AdditivityReport { wedge, left, right, difference })
}

/// The two subsequences of `Σ_{j=1}^N (-1)^j |π_j L_{K(1)}S^0| / (N log_p N)`
/// at `N = 2(p-1)p^n - 1` (`t_n`) and `N = 2(p-1)p^n - 2` (`u_n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsequenceTerms {
    pub n: u32,
    pub t: f64,
    pub u: Option<f64>,
}

/// `t_n` and `u_n` from directly computed sphere sums. `u_n` is absent when
/// its window has length 1.
pub fn subsequence_terms(p: OddPrime, n: u32) -> Result<SubsequenceTerms, AsymptoticsError> {
    let s0 = FiniteSpectrumData::sphere(p, 0);
    let len = sphere_window_length(p, n);
    let term = |window: u64| -> Result<Option<f64>, AsymptoticsError> {
        if window < 2 {
            return Ok(None);
        }
        let sum = graded_sum(&s0, 0, window, OrderMeasure::SummandSum)?;
        let w = window as f64;
        Ok(Some(sum.to_f64().expect("finite") / (w * log_p(p, w))))
    };
    Ok(SubsequenceTerms {
        n,
        t: term(len - 1)?.expect("window of at least 3"),
        u: term(len - 2)?,
    })
}

/// `t_n` and `u_n` through `s_n = (-1-n)/2`:
/// `t_n = (L s_n - 1) / ((L-1) log_p(L-1))`,
/// `u_n = (L s_n - 1 + p^{n+1}) / ((L-2) log_p(L-2))`, `L = 2(p-1)p^n`.
pub fn subsequence_terms_closed_form(p: OddPrime, n: u32) -> SubsequenceTerms {
    let len = sphere_window_length(p, n) as f64;
    let ls = len * (-1.0 - n as f64) / 2.0;
    let t = (ls - 1.0) / ((len - 1.0) * log_p(p, len - 1.0));
    let u = (len > 3.0).then(|| {
        (ls - 1.0 + (p.get() as f64).powi(n as i32 + 1)) / ((len - 2.0) * log_p(p, len - 2.0))
    });
    SubsequenceTerms { n, t, u }
}

/// Peak of `|π_N L_{K(1)}S^0| / (N log_p N)` over one block
/// `N ∈ [2(p-1)p^k - 1, 2(p-1)p^{k+1} - 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPeak {
    pub block: u32,
    pub degree: u64,
    pub value: f64,
}

/// Block-wise maxima of the order density of the sphere, for `N ≤ upper`.
pub fn order_density_peaks(p: OddPrime, upper: u64) -> Vec<DensityPeak> {
    let mut peaks = Vec::new();
    let mut k = 0;
    loop {
        let start = sphere_window_length(p, k) - 1;
        if start > upper {
            break;
        }
        let end = (sphere_window_length(p, k + 1) - 2).min(upper);
        let mut best = DensityPeak { block: k, degree: start, value: f64::MIN };
        for n in start.max(2)..=end {
            let order = match sphere_order(p, n as i64).exponent {
                PadicValuation::Finite(e) => (p.get() as f64).powi(e as i32),
                PadicValuation::Infinite => unreachable!("positive degrees are finite"),
            };
            let value = order / (n as f64 * log_p(p, n as f64));
            if value > best.value {
                best = DensityPeak { block: k, degree: n, value };
            }
        }
        peaks.push(best);
        k += 1;
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> OddPrime {
        OddPrime::new(n).unwrap()
    }

    fn data(prime: u64, betti: &[(i64, u64)]) -> FiniteSpectrumData {
        FiniteSpectrumData::from_betti(p(prime), betti.iter().copied())
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn graded_average_examples() {
        let s0 = data(3, &[(0, 1)]);
        assert_eq!(graded_average(&s0, 0, 4).unwrap().value, rat(-1, 2));
        assert_eq!(graded_average(&s0, 0, 12).unwrap().value, rat(-1, 1));
        assert_eq!(
            graded_average(&s0, -1, 2),
            Err(AsymptoticsError::InfiniteOrderInWindow(0))
        );
        assert_eq!(graded_average(&s0, 0, 0), Err(AsymptoticsError::EmptyWindow));
    }

    #[test]
    fn sum_matches_term_by_term_table() {
        // oracle: the sphere table summed one degree at a time
        let x = data(5, &[(0, 2), (3, 1), (-4, 1)]);
        let m = default_skip(&x);
        for measure in [OrderMeasure::SummandSum, OrderMeasure::GroupOrder] {
            let mut expected = BigInt::zero();
            for j in m + 1..=m + 500 {
                let term: BigInt = match measure {
                    OrderMeasure::SummandSum => x
                        .betti()
                        .iter()
                        .map(|(&d, &r)| {
                            let e = sphere_order(p(5), j - d).exponent.finite().unwrap();
                            BigInt::from(r) * num_traits::Pow::pow(BigInt::from(5), e)
                        })
                        .sum(),
                    OrderMeasure::GroupOrder => {
                        let e: u64 = x
                            .betti()
                            .iter()
                            .map(|(&d, &r)| r * sphere_order(p(5), j - d).exponent.finite().unwrap())
                            .sum();
                        num_traits::Pow::pow(BigInt::from(5), e)
                    }
                };
                if j % 2 == 0 {
                    expected += term;
                } else {
                    expected -= term;
                }
            }
            assert_eq!(graded_sum(&x, m, 500, measure).unwrap(), expected);
        }
    }

    #[test]
    fn chunked_sum_matches_stream() {
        let x = data(3, &[(0, 1), (2, 2), (5, 1)]);
        let m = default_skip(&x);
        let n = 3 * CHUNK + 17;
        let (_, streamed) = GradedSumStream::new(&x, m, OrderMeasure::SummandSum)
            .unwrap()
            .nth(n as usize - 1)
            .unwrap();
        assert_eq!(graded_sum(&x, m, n, OrderMeasure::SummandSum).unwrap(), streamed);
    }

    #[test]
    fn sn_closed_form_examples() {
        assert_eq!(sn_closed_form(0), rat(-1, 2));
        assert_eq!(sn_closed_form(3), rat(-2, 1));
        assert_eq!(sn_closed_form(1), rat(-1, 1));
    }

    #[test]
    fn growth_ratio_examples() {
        let s0 = data(3, &[(0, 1)]);
        let r = growth_ratio(&s0, 0, 2 * 2 * 3u64.pow(8) - 1).unwrap().value().unwrap();
        assert!((r - 1.0).abs() <= 0.15, "ratio {r}");

        let s1 = data(3, &[(1, 1)]);
        assert_eq!(total_lambda(&s1), -1);
        let m = default_skip(&s1);
        let small = growth_ratio(&s1, m, 4).unwrap().value().unwrap();
        let large = growth_ratio(&s1, m, 4 * 3u64.pow(8)).unwrap().value().unwrap();
        assert!((large - 1.0).abs() < (small - 1.0).abs());
        assert!((large - 1.0).abs() < 0.05, "ratio {large}");

        let mixed = data(3, &[(0, 1), (1, 1)]);
        assert_eq!(growth_ratio(&mixed, 1, 50).unwrap(), GrowthRatio::Undefined);
    }

    #[test]
    fn additivity_examples() {
        let s0 = data(3, &[(0, 1)]);
        assert!(additivity_check(&s0, &s0, 0, 12).unwrap().is_exact());
        let a = data(3, &[(2, 1)]);
        let b = data(3, &[(4, 1)]);
        assert!(additivity_check(&a, &b, 4, 100).unwrap().is_exact());
        let s1 = data(3, &[(1, 1)]);
        assert!(additivity_check(&s0, &s1, 1, 50).unwrap().is_exact());
    }

    #[test]
    fn literal_group_orders_are_not_additive() {
        // |Z/9 + Z/9| = 81, not 18
        let s0 = data(3, &[(0, 1)]);
        let report = additivity_check_with(&s0, &s0, 0, 12, OrderMeasure::GroupOrder).unwrap();
        assert_eq!(report.wedge.value, rat(-8, 1));
        assert_eq!(report.difference, rat(-6, 1));
    }

    #[test]
    fn subsequence_terms_agree_with_closed_form() {
        for prime in [3u64, 5, 7] {
            for n in 0..5 {
                let direct = subsequence_terms(p(prime), n).unwrap();
                let closed = subsequence_terms_closed_form(p(prime), n);
                assert!((direct.t - closed.t).abs() < 1e-12);
                match (direct.u, closed.u) {
                    (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
                    (None, None) => {}
                    other => panic!("{other:?}"),
                }
            }
        }
    }

    #[test]
    fn subsequences_are_block_extremes() {
        // At p = 3, t_n is the least and u_{n+1} the greatest value of the
        // normalized sequence over N ∈ [2(p-1)p^n - 1, 2(p-1)p^{n+1} - 2].
        let prime = p(3);
        let s0 = data(3, &[(0, 1)]);
        let limit = sphere_window_length(prime, 6);
        let mut block = 0;
        let (mut lo, mut hi) = (f64::MAX, f64::MIN);
        for (n, sum) in GradedSumStream::new(&s0, 0, OrderMeasure::SummandSum).unwrap() {
            if n > limit - 2 {
                break;
            }
            if n < sphere_window_length(prime, 0) - 1 {
                continue;
            }
            let a = sum.to_f64().unwrap() / (n as f64 * log_p(prime, n as f64));
            lo = lo.min(a);
            hi = hi.max(a);
            if n == sphere_window_length(prime, block + 1) - 2 {
                let t = subsequence_terms(prime, block).unwrap().t;
                let u = subsequence_terms(prime, block + 1).unwrap().u.unwrap();
                assert_eq!(lo, t, "block {block}");
                assert_eq!(hi, u, "block {block}");
                block += 1;
                (lo, hi) = (f64::MAX, f64::MIN);
            }
        }
        assert_eq!(block, 6);
    }

    #[test]
    fn density_peaks_sit_at_first_element_of_order_p_power() {
        for prime in [3u64, 5, 7] {
            let peaks = order_density_peaks(p(prime), 1_000_000);
            assert!(peaks.len() >= 4);
            for peak in &peaks {
                assert_eq!(peak.degree, sphere_window_length(p(prime), peak.block) - 1);
            }
            for pair in peaks.windows(2) {
                assert!(pair[1].value < pair[0].value);
            }
        }
    }

    #[test]
    fn stream_refuses_infinite_start() {
        let s2 = data(3, &[(2, 1)]);
        assert_eq!(
            GradedSumStream::new(&s2, 0, OrderMeasure::SummandSum).err(),
            Some(AsymptoticsError::InfiniteOrderInWindow(1))
        );
    }

    #[test]
    fn default_skip_clears_infinite_groups() {
        for betti in [&[(0, 1)][..], &[(-6, 1), (3, 2)], &[(7, 1)], &[(-3, 1)]] {
            let x = data(5, betti);
            let m = default_skip(&x);
            assert!(graded_average(&x, m, 1000).is_ok());
        }
        assert_eq!(default_skip(&data(5, &[])), 0);
    }
}
