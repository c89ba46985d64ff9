//! Iwasawa invariants of finite spectra and the orders of their K(1)-local
//! homotopy groups, computed in exact arithmetic.
//!
//! A finite spectrum is described by its rational Betti numbers and a set of
//! degrees carrying p-torsion ([`spectra::FiniteSpectrumData`]). From that data
//! the crate computes
//!
//! * the characteristic polynomials of the eigenspaces of `KU^0` and `KU^{-1}`
//!   as Iwasawa modules, with their λ- and μ-invariants ([`spectra`], [`iwalg`]),
//! * the orders of `π_* L_{K(1)} D X°` ([`k1`]),
//! * the degree-by-degree comparison between the two ([`imc`]),
//! * graded averages of homotopy orders and their growth ([`asymptotics`]).
//!
//! p-adic valuations are exact; `∞` stands for `v_p(0)` and for the order of `Z_p`.

pub mod asymptotics;
pub mod cli;
pub mod imc;
pub mod iwalg;
pub mod k1;
pub mod padic;
pub mod spectra;

pub use asymptotics::{graded_average, growth_ratio, GradedAverage, GrowthRatio, OrderMeasure};
pub use imc::{verify_weak_imc, ImcRecord, ImcReport, ImcSide};
pub use iwalg::{evaluate_valuation, invariants_of, CharPoly, IwasawaInvariants};
pub use k1::{k1_order_of_dual_replacement, sphere_order, wedge_order, GroupOrder};
pub use padic::{OddPrime, PadicError, PadicValuation};
pub use spectra::{EigenspaceKey, FiniteSpectrumData, KDegree};
