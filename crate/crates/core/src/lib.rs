//! A one-dimensional numerical laboratory for two-species
//! chemotaxis-reaction-diffusion.
//!
//! A mobile species `rho1` diffuses, is advected up the gradient of the
//! attractant potential `chi (-Delta)^{-1} rho2`, and reacts with an immobile
//! target `rho2` at rate `eps rho1 rho2`. Alongside the full system the crate
//! evolves the purely diffusive baseline, a heat-flow comparison system, and
//! Fokker-Planck flows in fixed potentials together with their dual
//! equations, and it measures the quantities used to compare them: quarter
//! mass reaction times, concentration profiles, pass-through integrals and
//! duality defects.

pub mod analytics;
pub mod config;
pub mod error;
pub mod grid;
pub mod harness;
pub mod initial;
pub mod nonlocal;
pub mod oracle;
pub mod potentials;
pub mod scheme;
pub mod system;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{concentration, integrate, FaceField, Field, Grid};
pub use initial::{build_eta, build_rho1_initial, build_rho2_initial, Params, Side};
pub use potentials::{PotentialSpec, weakest_h, weakest_h_prime};
pub use scheme::SchemeConfig;
pub use system::{Horizon, Observer, ObserverSpec, SystemState};
