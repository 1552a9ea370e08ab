//! State-class analysis of time Petri nets with inhibitor (stopwatch) arcs.
//!
//! The crate builds three state-class graphs of the same net and extracts
//! quantitative timing properties from them:
//!
//! * the exact polyhedral graph, driven by Fourier–Motzkin projection
//!   ([`poly`]);
//! * the classical DBM overapproximation ([`dbm`]);
//! * a tighter overapproximation that augments each class with a
//!   time-distance system recording bounds between past firing points and
//!   the clocks still running ([`tdis`]).
//!
//! All arithmetic is exact: the engines are generic over a rational
//! [`scalar::Scalar`], with [`Rational`] (arbitrary precision) as the
//! default instantiation and [`Rational64`] as a fixed-width alternative
//! for small models.

pub mod dbm;
pub mod dot;
pub mod graph;
pub mod model;
pub mod net;
pub mod poly;
pub mod quant;
pub mod scalar;
pub mod sim;
pub mod tdis;

/// Default exact scalar: arbitrary-precision rational.
pub type Rational = num::BigRational;

/// Fixed-width rational for small models; panics on overflow in debug
/// builds, so prefer [`Rational`] for anything adversarial.
pub type Rational64 = num::rational::Ratio<i64>;

pub use net::{Marking, Net, NetBuilder, PlaceId, TransId};
pub use scalar::{Bound, Scalar};
