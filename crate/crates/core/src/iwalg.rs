//! Characteristic polynomials in the polynomial shadow of `Z_p[[T]]`.
//!
//! Every characteristic polynomial of a finite spectrum is a product of the
//! linear factors `T - (1+p)^i + 1`, so a [`CharPoly`] is stored as a multiset
//! of exponents `i`. Expanded coefficients are derived on demand.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::padic::{
    extended_valuation, one_plus_p_pow_minus_one_valuation, OddPrime, PadicApprox, PadicError,
    PadicValuation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IwalgError {
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(OddPrime, OddPrime),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// `prod_i (T - (1+p)^i + 1)^{r_i}` as a map `i -> r_i`.
pub type LinearFactorForm = BTreeMap<i64, u64>;

/// A monic characteristic polynomial, held as its linear factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharPoly {
    p: OddPrime,
    factors: LinearFactorForm,
}

impl CharPoly {
    /// The constant polynomial `1` (a finite module).
    pub fn one(p: OddPrime) -> Self {
        CharPoly { p, factors: BTreeMap::new() }
    }

    /// `T - (1+p)^i + 1`.
    pub fn linear(p: OddPrime, i: i64) -> Self {
        CharPoly::from_factors(p, [(i, 1)])
    }

    pub fn from_factors(p: OddPrime, factors: impl IntoIterator<Item = (i64, u64)>) -> Self {
        let mut out = CharPoly::one(p);
        for (i, r) in factors {
            if r > 0 {
                *out.factors.entry(i).or_insert(0) += r;
            }
        }
        out
    }

    pub fn prime(&self) -> OddPrime {
        self.p
    }

    pub fn factors(&self) -> &LinearFactorForm {
        &self.factors
    }

    pub fn degree(&self) -> u64 {
        self.factors.values().sum()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// The root `(1+p)^i - 1` of the factor with exponent `i`.
    pub fn root(p: OddPrime, i: i64) -> BigRational {
        let base = BigRational::from_integer(BigInt::from(p.get() + 1));
        let power = if i >= 0 {
            Pow::pow(&base, i as u64)
        } else {
            Pow::pow(&base.recip(), i.unsigned_abs())
        };
        power - BigRational::one()
    }

    /// Expanded coefficients, constant term first. Rational only when some
    /// exponent is negative; the denominators are powers of `1+p`, so every
    /// coefficient is p-integral.
    pub fn coefficients(&self) -> Vec<BigRational> {
        let mut coeffs = vec![BigRational::one()];
        for (&i, &r) in &self.factors {
            let root = CharPoly::root(self.p, i);
            for _ in 0..r {
                // multiply by (T - root)
                let mut next = vec![BigRational::zero(); coeffs.len() + 1];
                for (k, c) in coeffs.iter().enumerate() {
                    next[k + 1] += c;
                    next[k] -= c * &root;
                }
                coeffs = next;
            }
        }
        coeffs
    }

    /// Coefficients reduced modulo `p^precision`.
    pub fn coefficients_mod(&self, precision: u32) -> Result<Vec<PadicApprox>, PadicError> {
        self.coefficients()
            .iter()
            .map(|c| PadicApprox::from_rational(self.p, c, precision))
            .collect()
    }

    /// Exact value at an arbitrary rational point, by Horner on the expansion.
    pub fn evaluate_exact(&self, x: &BigRational) -> BigRational {
        self.coefficients()
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// `f((1+p)^s - 1)` exactly.
    pub fn evaluate_at_special_point(&self, s: i64) -> BigRational {
        self.evaluate_exact(&CharPoly::root(self.p, s))
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let single = self.factors.len() == 1;
        for (n, (&i, &r)) in self.factors.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            let root = CharPoly::root(self.p, i);
            let linear = if root.is_zero() {
                "T".to_string()
            } else if root.is_negative() {
                format!("T + {}", -root.clone())
            } else {
                format!("T - {root}")
            };
            let bare = root.is_zero() || (single && r == 1);
            match (bare, r) {
                (true, 1) => f.write_str(&linear)?,
                (true, r) => write!(f, "{linear}^{r}")?,
                (false, 1) => write!(f, "({linear})")?,
                (false, r) => write!(f, "({linear})^{r}")?,
            }
        }
        Ok(())
    }
}

/// Characteristic polynomial of the `j`-th eigenspace of `KU^0(S^{2i})`.
///
/// `j` may be any integer; it is read modulo `p - 1`.
pub fn sphere_charpoly(p: OddPrime, i: i64, j: i64) -> CharPoly {
    if p.reduce_residue(i) == p.reduce_residue(j) {
        CharPoly::linear(p, i)
    } else {
        CharPoly::one(p)
    }
}

pub fn multiply(f: &CharPoly, g: &CharPoly) -> Result<CharPoly, IwalgError> {
    if f.p != g.p {
        return Err(IwalgError::PrimeMismatch(f.p, g.p));
    }
    Ok(CharPoly::from_factors(
        f.p,
        f.factors.iter().chain(&g.factors).map(|(&i, &r)| (i, r)),
    ))
}

/// `v_p(f((1+p)^s - 1))`, computed factor by factor.
///
/// The factor with exponent `i` evaluates to `(1+p)^s - (1+p)^i`, which has
/// the valuation of `(1+p)^{s-i} - 1`: `1 + v_p(s - i)`, or infinity at `s = i`.
pub fn evaluate_valuation(f: &CharPoly, s: i64) -> PadicValuation {
    f.factors
        .iter()
        .map(|(&i, &r)| {
            let v = if s == i {
                PadicValuation::Infinite
            } else {
                one_plus_p_pow_minus_one_valuation(f.p, s - i).expect("s != i")
            };
            v.times(r)
        })
        .sum()
}

/// The same valuation read off the exact big-rational value.
pub fn evaluate_valuation_exact(f: &CharPoly, s: i64) -> Result<PadicValuation, IwalgError> {
    Ok(extended_valuation(f.p, &f.evaluate_at_special_point(s))?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IwasawaInvariants {
    pub lambda: u64,
    pub mu: u64,
    pub charpoly: CharPoly,
}

/// λ is the degree; μ vanishes for every module coming from a finite spectrum.
pub fn invariants_of(f: &CharPoly) -> IwasawaInvariants {
    IwasawaInvariants { lambda: f.degree(), mu: 0, charpoly: f.clone() }
}
