//! Orders of the K(1)-local homotopy groups of spheres and of torsion-free
//! finite spectra.
//!
//! For a wedge of parity-pure torsion-free pieces the Atiyah-Hirzebruch
//! spectral sequence collapses away from the degree window, and the order of
//! `π_t(X ∧ L_{K(1)}S^0)` is the product of the orders `|π_{t-d} L_{K(1)}S^0|^{r_d}`.
//! [`wedge_order`] returns that product for every `t`; deciding where it is a
//! valid statement about the actual group is left to the caller.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::padic::{OddPrime, PadicValuation};
use crate::spectra::{dual, torsion_free_wedge, FiniteSpectrumData};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum K1Error {
    #[error("spectrum carries torsion markers in degrees {0:?}; take the torsion-free replacement first")]
    TorsionPresent(Vec<i64>),
}

/// Order `p^exponent` of a homotopy group; an infinite exponent is a `Z_p` summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupOrder {
    pub exponent: PadicValuation,
}

impl GroupOrder {
    pub const TRIVIAL: GroupOrder = GroupOrder { exponent: PadicValuation::ZERO };
    pub const ZP: GroupOrder = GroupOrder { exponent: PadicValuation::Infinite };

    pub fn finite(k: u64) -> Self {
        GroupOrder { exponent: PadicValuation::Finite(k) }
    }

    pub fn is_finite(self) -> bool {
        !self.exponent.is_infinite()
    }

    pub fn is_trivial(self) -> bool {
        self == GroupOrder::TRIVIAL
    }

    /// Order of the `r`-fold direct sum.
    pub fn pow(self, r: u64) -> GroupOrder {
        GroupOrder { exponent: self.exponent.times(r) }
    }
}

// orders multiply, so exponents add
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for GroupOrder {
    type Output = GroupOrder;

    fn mul(self, rhs: GroupOrder) -> GroupOrder {
        GroupOrder { exponent: self.exponent + rhs.exponent }
    }
}

impl std::iter::Product for GroupOrder {
    fn product<I: Iterator<Item = GroupOrder>>(iter: I) -> Self {
        iter.fold(GroupOrder::TRIVIAL, Mul::mul)
    }
}

impl fmt::Display for GroupOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent {
            PadicValuation::Infinite => f.write_str("Z_p"),
            PadicValuation::Finite(0) => f.write_str("0"),
            PadicValuation::Finite(k) => write!(f, "Z/p^{k}"),
        }
    }
}

/// `|π_t L_{K(1)} S^0|`.
///
/// `Z_p` in degrees `-1` and `0`; `Z/p^{k+1}` in degree `2(p-1)p^k r - 1`
/// with `p ∤ r`; trivial otherwise.
pub fn sphere_order(p: OddPrime, t: i64) -> GroupOrder {
    if t == -1 || t == 0 {
        return GroupOrder::ZP;
    }
    let period = 2 * (p.get() as i64 - 1);
    if (t + 1) % period != 0 {
        return GroupOrder::TRIVIAL;
    }
    // nonzero because t != -1
    let mut m = ((t + 1) / period).unsigned_abs();
    let mut k = 1;
    while m.is_multiple_of(p.get()) {
        m /= p.get();
        k += 1;
    }
    GroupOrder::finite(k)
}

fn require_torsion_free(x: &FiniteSpectrumData) -> Result<(), K1Error> {
    if x.is_torsion_free() {
        Ok(())
    } else {
        Err(K1Error::TorsionPresent(x.torsion().iter().copied().collect()))
    }
}

/// Per-cell contributions `(d, r_d, |π_{t-d} L_{K(1)}S^0|)` to `π_t(X ∧ L_{K(1)}S^0)`.
pub fn summand_orders(
    x: &FiniteSpectrumData,
    t: i64,
) -> Result<impl Iterator<Item = (i64, u64, GroupOrder)> + '_, K1Error> {
    require_torsion_free(x)?;
    let p = x.prime();
    Ok(x.betti().iter().map(move |(&d, &r)| (d, r, sphere_order(p, t - d))))
}

/// `prod_d |π_{t-d} L_{K(1)}S^0|^{r_d}` over the Betti numbers of `X`.
pub fn wedge_order(x: &FiniteSpectrumData, t: i64) -> Result<GroupOrder, K1Error> {
    Ok(summand_orders(x, t)?.map(|(_, r, order)| order.pow(r)).product())
}

/// `|π_t L_{K(1)} D X°|` via the product formula.
pub fn k1_order_of_dual_replacement(x: &FiniteSpectrumData, t: i64) -> GroupOrder {
    wedge_order(&dual(&torsion_free_wedge(x)), t).expect("replacement is torsion-free")
}
