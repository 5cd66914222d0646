//! Curvature in convex optimization.
//!
//! * [`body`]: convex bodies with gauge, support, subgradient, polar and
//!   membership oracles.
//! * [`curving`]: the strongly convex approximation `K_t` of a body, its
//!   polar-side decomposition and weak linear optimization over it.
//! * [`certify`]: sampling-based certificates for the curvature moduli of
//!   gauges and sets.
//! * [`online`]: online linear optimization with Follow the Leader,
//!   scripted adversaries and runtime regret certificates.
//! * [`fw`]: a Frank-Wolfe baseline with duality-gap bookkeeping.

pub mod body;
pub mod certify;
pub mod curving;
pub mod error;
pub mod fw;
pub mod lp;
pub mod online;
pub mod oracle;
pub mod rng;

pub use body::{BodyKind, BodySpec, ConvexBody, Membership, SandwichRadii};
pub use curving::{CurvedBody, CurvedOracle, DecompositionCertificate, WeakOptResult, WeakOptStatus};
pub use error::{Error, Result};
pub use oracle::{GaugeBody, LinearMax, LinearOracle, Vector};
