//! Finite spectra as graded homology data.
//!
//! Only the rational Betti numbers feed any invariant computed here; p-torsion
//! in homology is recorded as opaque per-degree markers so that it can be
//! stripped by the torsion-free replacement.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iwalg::{invariants_of, CharPoly};
use crate::padic::OddPrime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectrumError {
    #[error("Betti number in degree {0} must be positive")]
    ZeroRank(i64),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(OddPrime, OddPrime),
}

/// Rational homology ranks plus p-torsion markers of a finite spectrum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteSpectrumData {
    p: OddPrime,
    betti: BTreeMap<i64, u64>,
    torsion: BTreeSet<i64>,
}

impl FiniteSpectrumData {
    pub fn new(
        p: OddPrime,
        betti: impl IntoIterator<Item = (i64, u64)>,
        torsion: impl IntoIterator<Item = i64>,
    ) -> Result<Self, SpectrumError> {
        let mut map = BTreeMap::new();
        for (d, r) in betti {
            if r == 0 {
                return Err(SpectrumError::ZeroRank(d));
            }
            *map.entry(d).or_insert(0) += r;
        }
        Ok(FiniteSpectrumData { p, betti: map, torsion: torsion.into_iter().collect() })
    }

    /// Torsion-free data from `(degree, rank)` pairs; zero ranks are dropped.
    pub fn from_betti(p: OddPrime, betti: impl IntoIterator<Item = (i64, u64)>) -> Self {
        FiniteSpectrumData::new(p, betti.into_iter().filter(|&(_, r)| r > 0), [])
            .expect("zero ranks filtered")
    }

    /// `S^n`.
    pub fn sphere(p: OddPrime, n: i64) -> Self {
        FiniteSpectrumData::from_betti(p, [(n, 1)])
    }

    pub fn prime(&self) -> OddPrime {
        self.p
    }

    pub fn betti(&self) -> &BTreeMap<i64, u64> {
        &self.betti
    }

    pub fn betti_at(&self, degree: i64) -> u64 {
        self.betti.get(&degree).copied().unwrap_or(0)
    }

    pub fn torsion(&self) -> &BTreeSet<i64> {
        &self.torsion
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_rationally_trivial(&self) -> bool {
        self.betti.is_empty()
    }

    pub fn with_torsion(mut self, degrees: impl IntoIterator<Item = i64>) -> Self {
        self.torsion.extend(degrees);
        self
    }

    /// `X v Y`: Betti numbers add, torsion markers merge.
    pub fn wedge(&self, other: &Self) -> Result<Self, SpectrumError> {
        if self.p != other.p {
            return Err(SpectrumError::PrimeMismatch(self.p, other.p));
        }
        let mut out = self.clone();
        for (&d, &r) in &other.betti {
            *out.betti.entry(d).or_insert(0) += r;
        }
        out.torsion.extend(other.torsion.iter().copied());
        Ok(out)
    }

    /// `Σ^k X`.
    pub fn suspend(&self, k: i64) -> Self {
        FiniteSpectrumData {
            p: self.p,
            betti: self.betti.iter().map(|(&d, &r)| (d + k, r)).collect(),
            torsion: self.torsion.iter().map(|&d| d + k).collect(),
        }
    }
}

impl fmt::Display for FiniteSpectrumData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} betti{{", self.p)?;
        for (n, (d, r)) in self.betti.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}:{r}")?;
        }
        f.write_str("}")?;
        if !self.torsion.is_empty() {
            let degrees: Vec<String> = self.torsion.iter().map(i64::to_string).collect();
            write!(f, " torsion[{}]", degrees.join(", "))?;
        }
        Ok(())
    }
}

/// Cohomological degree of p-adic K-theory: `KU^0` or `KU^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KDegree {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "-1")]
    MinusOne,
}

impl KDegree {
    pub fn as_i32(self) -> i32 {
        match self {
            KDegree::Zero => 0,
            KDegree::MinusOne => -1,
        }
    }
}

impl fmt::Display for KDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i32())
    }
}

/// Selects one of the `2(p - 1)` Iwasawa modules `ε_j KU^k(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EigenspaceKey {
    pub degree: KDegree,
    pub j: u64,
}

impl EigenspaceKey {
    /// `j` is reduced into `[0, p - 2]`.
    pub fn new(p: OddPrime, degree: KDegree, j: i64) -> Self {
        EigenspaceKey { degree, j: p.reduce_residue(j) }
    }

    /// All keys, `KU^0` first, then by `j`.
    pub fn all(p: OddPrime) -> Vec<EigenspaceKey> {
        [KDegree::Zero, KDegree::MinusOne]
            .into_iter()
            .flat_map(|degree| {
                (0..p.order_of_units_mod_p()).map(move |j| EigenspaceKey { degree, j })
            })
            .collect()
    }
}

impl fmt::Display for EigenspaceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ε_{} KU^{}", self.j, self.degree)
    }
}

/// Minimum and maximum degrees carrying rational homology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeWindow {
    pub alpha: i64,
    pub beta: i64,
}

pub fn euler_characteristic(x: &FiniteSpectrumData) -> i64 {
    x.betti
        .iter()
        .map(|(&d, &r)| if d.rem_euclid(2) == 0 { r as i64 } else { -(r as i64) })
        .sum()
}

/// Spanier-Whitehead dual: `H_n(DX) = H_{-n}(X)`.
pub fn dual(x: &FiniteSpectrumData) -> FiniteSpectrumData {
    FiniteSpectrumData {
        p: x.p,
        betti: x.betti.iter().map(|(&d, &r)| (-d, r)).collect(),
        torsion: x.torsion.iter().map(|&d| -d).collect(),
    }
}

/// `(X_even, X_odd)` with torsion stripped. At the level of homology data
/// the wedge of the two is the torsion-free replacement `X°`.
pub fn torsion_free_replacement(x: &FiniteSpectrumData) -> (FiniteSpectrumData, FiniteSpectrumData) {
    let (even, odd): (BTreeMap<i64, u64>, BTreeMap<i64, u64>) =
        x.betti.iter().partition(|(&d, _)| d.rem_euclid(2) == 0);
    let part = |betti| FiniteSpectrumData { p: x.p, betti, torsion: BTreeSet::new() };
    (part(even), part(odd))
}

/// `X°` as a single wedge `X_even v X_odd`.
pub fn torsion_free_wedge(x: &FiniteSpectrumData) -> FiniteSpectrumData {
    let (even, odd) = torsion_free_replacement(x);
    even.wedge(&odd).expect("same prime")
}

/// Characteristic polynomial of `ε_j KU^k(X)`.
///
/// For `KU^0` a Betti number in degree `2i` contributes `(T - (1+p)^i + 1)^r`
/// when `i ≡ j mod p-1`; for `KU^{-1}` the degree `2i - 1` plays that role.
pub fn eigenspace_charpoly(x: &FiniteSpectrumData, key: EigenspaceKey) -> CharPoly {
    let p = x.p;
    let offset = match key.degree {
        KDegree::Zero => 0,
        KDegree::MinusOne => 1,
    };
    let factors = x.betti.iter().filter_map(|(&d, &r)| {
        let shifted = d + offset;
        if shifted.rem_euclid(2) != 0 {
            return None;
        }
        let i = shifted / 2;
        (p.reduce_residue(i) == key.j).then_some((i, r))
    });
    CharPoly::from_factors(p, factors)
}

/// `Σ_j [λ(ε_j KU^0) - λ(ε_j KU^{-1})]`.
pub fn total_lambda(x: &FiniteSpectrumData) -> i64 {
    EigenspaceKey::all(x.p)
        .into_iter()
        .map(|key| {
            let lambda = eigenspace_charpoly(x, key).degree() as i64;
            match key.degree {
                KDegree::Zero => lambda,
                KDegree::MinusOne => -lambda,
            }
        })
        .sum()
}

/// μ of `ε_j KU^k(X)`, read off the characteristic polynomial. Always zero:
/// the polynomial is a product of monic linear factors.
pub fn mu_invariant(x: &FiniteSpectrumData, key: EigenspaceKey) -> u64 {
    invariants_of(&eigenspace_charpoly(x, key)).mu
}

pub fn degree_window(x: &FiniteSpectrumData) -> Option<DegreeWindow> {
    let alpha = *x.betti.keys().next()?;
    let beta = *x.betti.keys().next_back()?;
    Some(DegreeWindow { alpha, beta })
}
