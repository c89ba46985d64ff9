//! The weak Main Conjecture for finite spectra, checked degree by degree.
//!
//! For each integer `m` two comparisons are made:
//!
//! * `|π_{2m-1} L_{K(1)} D X°|` against `f^{ε_{-m} KU^0(X)}((1+p)^{-m} - 1)`,
//! * `|π_{2m} L_{K(1)} D X°|` against `f^{ε_{-m} KU^{-1}(X)}((1+p)^{-m} - 1)`,
//!
//! both as p-adic valuations. Equality is asserted only for `m < -β/2` or
//! `m > -α/2`, where `[α, β]` is the range of degrees carrying rational
//! homology, with one further exclusion on the odd side: when `α` is odd the
//! top cell of `D X_odd` puts a `Z_p` in `π_{-α}`, i.e. at `2m - 1 = -α`, which
//! the even-degree characteristic polynomial cannot see. `S^1` at `m = 0` is
//! the smallest example. Records outside the window are still computed.

use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::iwalg::{evaluate_valuation, sphere_charpoly};
use crate::k1::{k1_order_of_dual_replacement, sphere_order};
use crate::padic::{OddPrime, PadicValuation};
use crate::spectra::{
    degree_window, eigenspace_charpoly, DegreeWindow, EigenspaceKey, FiniteSpectrumData, KDegree,
};

/// Which homotopy degree a record compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ImcSide {
    /// `π_{2m-1}` against the `KU^0` eigenspace
    #[serde(rename = "2m-1")]
    Odd,
    /// `π_{2m}` against the `KU^{-1}` eigenspace
    #[serde(rename = "2m")]
    Even,
}

impl ImcSide {
    pub fn homotopy_degree(self, m: i64) -> i64 {
        match self {
            ImcSide::Odd => 2 * m - 1,
            ImcSide::Even => 2 * m,
        }
    }

    pub fn k_degree(self) -> KDegree {
        match self {
            ImcSide::Odd => KDegree::Zero,
            ImcSide::Even => KDegree::MinusOne,
        }
    }
}

impl fmt::Display for ImcSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImcSide::Odd => "2m-1",
            ImcSide::Even => "2m",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImcRecord {
    pub m: i64,
    pub side: ImcSide,
    /// exponent of the homotopy order
    pub lhs_val: PadicValuation,
    /// valuation of the characteristic polynomial's special value
    pub rhs_val: PadicValuation,
    pub in_window: bool,
    #[serde(rename = "match")]
    pub matches: bool,
    /// `m < -β/2` or `m > -α/2`, before the odd-bottom-cell exclusion
    pub in_nominal_window: bool,
}

impl ImcRecord {
    /// A record that is asserted to match and does not.
    pub fn is_failure(&self) -> bool {
        self.in_window && !self.matches
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImcReport {
    pub p: OddPrime,
    pub window: Option<DegreeWindow>,
    pub records: Vec<ImcRecord>,
}

impl ImcReport {
    pub fn failures(&self) -> impl Iterator<Item = &ImcRecord> {
        self.records.iter().filter(|r| r.is_failure())
    }

    pub fn all_in_window_match(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// `m < -β/2` or `m > -α/2`; every `m` when `X` is rationally trivial.
pub fn in_nominal_window(window: Option<DegreeWindow>, m: i64) -> bool {
    match window {
        None => true,
        Some(DegreeWindow { alpha, beta }) => 2 * m < -beta || 2 * m > -alpha,
    }
}

/// The nominal window, less `2m - 1 = -α` on the odd side.
pub fn in_comparison_window(window: Option<DegreeWindow>, m: i64, side: ImcSide) -> bool {
    let bottom_cell_zp = match (window, side) {
        (Some(w), ImcSide::Odd) => side.homotopy_degree(m) == -w.alpha,
        _ => false,
    };
    in_nominal_window(window, m) && !bottom_cell_zp
}

pub fn imc_record(x: &FiniteSpectrumData, window: Option<DegreeWindow>, m: i64, side: ImcSide) -> ImcRecord {
    let p = x.prime();
    let lhs_val = k1_order_of_dual_replacement(x, side.homotopy_degree(m)).exponent;
    let key = EigenspaceKey::new(p, side.k_degree(), -m);
    let rhs_val = evaluate_valuation(&eigenspace_charpoly(x, key), -m);
    ImcRecord {
        m,
        side,
        lhs_val,
        rhs_val,
        in_window: in_comparison_window(window, m, side),
        matches: lhs_val == rhs_val,
        in_nominal_window: in_nominal_window(window, m),
    }
}

/// Both comparisons for every `m` in range, ordered by `m` then side.
pub fn verify_weak_imc(x: &FiniteSpectrumData, m_range: RangeInclusive<i64>) -> ImcReport {
    let window = degree_window(x);
    let ms: Vec<i64> = m_range.collect();
    let records = ms
        .par_iter()
        .flat_map_iter(|&m| [ImcSide::Odd, ImcSide::Even].map(|side| imc_record(x, window, m, side)))
        .collect();
    ImcReport { p: x.prime(), window, records }
}

/// One comparison `f_{i,j}((1+p)^{1-n} - 1) ~_p |π_{2(n+i-1)-1} L_{K(1)}S^0|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimcCheck {
    pub i: i64,
    pub j: u64,
    pub n: i64,
    pub charpoly_val: PadicValuation,
    pub homotopy_val: PadicValuation,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimcReport {
    pub checked: usize,
    pub infinite_cases: usize,
    pub mismatches: Vec<SimcCheck>,
}

/// Every `i` in range, every eigenspace `j`, every `n ≡ 1 - j mod p-1` in range.
pub fn verify_sphere_simc(
    p: OddPrime,
    i_range: RangeInclusive<i64>,
    n_range: RangeInclusive<i64>,
) -> SimcReport {
    let mut report = SimcReport::default();
    for i in i_range {
        for j in 0..p.order_of_units_mod_p() {
            let f = sphere_charpoly(p, i, j as i64);
            for n in n_range.clone() {
                if p.reduce_residue(n) != p.reduce_residue(1 - j as i64) {
                    continue;
                }
                let check = SimcCheck {
                    i,
                    j,
                    n,
                    charpoly_val: evaluate_valuation(&f, 1 - n),
                    homotopy_val: sphere_order(p, 2 * (n + i - 1) - 1).exponent,
                };
                report.checked += 1;
                if check.charpoly_val.is_infinite() && check.homotopy_val.is_infinite() {
                    report.infinite_cases += 1;
                }
                if check.charpoly_val != check.homotopy_val {
                    report.mismatches.push(check);
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicValuation::{Finite, Infinite};

    fn p(n: u64) -> OddPrime {
        OddPrime::new(n).unwrap()
    }

    fn data(prime: u64, betti: &[(i64, u64)]) -> FiniteSpectrumData {
        FiniteSpectrumData::from_betti(p(prime), betti.iter().copied())
    }

    fn record(report: &ImcReport, m: i64, side: ImcSide) -> ImcRecord {
        *report.records.iter().find(|r| r.m == m && r.side == side).unwrap()
    }

    #[test]
    fn sphere_at_m4() {
        let report = verify_weak_imc(&data(3, &[(0, 1)]), 4..=4);
        let r = record(&report, 4, ImcSide::Odd);
        assert_eq!(sphere_order(p(3), 7).exponent, Finite(1));
        assert_eq!((r.lhs_val, r.rhs_val), (Finite(1), Finite(1)));
        assert!(r.in_window && r.matches);
    }

    #[test]
    fn sphere_at_window_endpoint() {
        let report = verify_weak_imc(&data(3, &[(0, 1)]), 0..=0);
        for side in [ImcSide::Odd, ImcSide::Even] {
            let r = record(&report, 0, side);
            assert!(!r.in_window && !r.in_nominal_window);
        }
        // π_{-1} and π_0 are both Z_p; only the first is seen by KU^0
        assert_eq!(record(&report, 0, ImcSide::Odd).lhs_val, Infinite);
        assert_eq!(record(&report, 0, ImcSide::Odd).rhs_val, Infinite);
        assert_eq!(record(&report, 0, ImcSide::Even).lhs_val, Infinite);
        assert_eq!(record(&report, 0, ImcSide::Even).rhs_val, Finite(0));
    }

    #[test]
    fn cp2_at_p5() {
        let x = data(5, &[(0, 1), (2, 1), (4, 1)]);
        let report = verify_weak_imc(&x, -3..=-3);
        // oracle: DX has cells 0, -2, -4; π_{-7} sees t - d ∈ {-7, -5, -3}
        let lhs: u64 = [-7i64, -5, -3]
            .iter()
            .map(|&t| sphere_order(p(5), t).exponent.finite().unwrap())
            .sum();
        let r = record(&report, -3, ImcSide::Odd);
        assert!(r.in_window);
        assert_eq!(r.lhs_val, Finite(lhs));
        assert_eq!(r.rhs_val, Finite(lhs));
        // ε_3: none of i = 0, 1, 2 is ≡ 3 mod 4, so both sides vanish
        assert_eq!(lhs, 0);
        assert!(r.matches);

        let full = verify_weak_imc(&x, -8..=8);
        assert!(full.all_in_window_match());
    }

    #[test]
    fn odd_bottom_cell_is_excluded() {
        let s1 = data(3, &[(1, 1)]);
        let report = verify_weak_imc(&s1, 0..=0);
        let r = record(&report, 0, ImcSide::Odd);
        assert!(r.in_nominal_window);
        assert!(!r.in_window);
        assert_eq!((r.lhs_val, r.rhs_val), (Infinite, Finite(0)));
        assert!(!r.matches);
        assert!(report.all_in_window_match());
    }

    #[test]
    fn empty_spectrum_is_trivial_everywhere() {
        let report = verify_weak_imc(&data(7, &[]), -5..=5);
        assert_eq!(report.records.len(), 22);
        for r in &report.records {
            assert!(r.in_window && r.matches);
            assert_eq!((r.lhs_val, r.rhs_val), (Finite(0), Finite(0)));
        }
    }

    #[test]
    fn records_are_ordered() {
        let report = verify_weak_imc(&data(3, &[(0, 1), (3, 1)]), -4..=4);
        let keys: Vec<(i64, ImcSide)> = report.records.iter().map(|r| (r.m, r.side)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn sphere_simc_examples() {
        let f = sphere_charpoly(p(3), 0, 0);
        assert_eq!(evaluate_valuation(&f, 1 - 5), Finite(1));
        assert_eq!(sphere_order(p(3), 2 * (5 - 1) - 1).exponent, Finite(1));
        assert_eq!(evaluate_valuation(&f, 0), Infinite);
        assert_eq!(sphere_order(p(3), -1).exponent, Infinite);

        let f = sphere_charpoly(p(7), 3, 3);
        assert_eq!(evaluate_valuation(&f, 1 - 4), Finite(1));
        assert_eq!(sphere_order(p(7), 2 * 6 - 1).exponent, Finite(1));

        let report = verify_sphere_simc(p(3), 0..=0, 1..=5);
        assert!(report.mismatches.is_empty());
        assert_eq!(report.infinite_cases, 1);
    }
}
