//! Light scattering at an optomechanical cavity strongly coupled to a single
//! two-level emitter, in the weak-drive / weak-mechanical-coupling regime.
//!
//! The crate evaluates the closed-form Raman transition rates between
//! adjacent vibrational levels of the mechanical oscillator, the resulting
//! cooling rate Γ = A₋ − A₊ and stationary occupation ⟨m⟩∞ = A₊/Γ, and the
//! photon flux into the Stokes/anti-Stokes sidebands. It independently
//! verifies all of it against a brute-force Lindblad master equation on a
//! truncated Fock space.
//!
//! Module map:
//! * [`params`]: physical parameters (units of the mechanical frequency ν)
//!   and the dressed-state spectrum of the atom-cavity subsystem.
//! * [`rates`]: closed-form excitation probability, transition rates,
//!   sideband rates, thermal-bath extension, cooperativity limit.
//! * [`dynamics`]: the vibrational rate equation and its stationary
//!   (thermal) distribution.
//! * [`oracle`]: dense master-equation integrator and steady-state solver
//!   used as an independent cross-check of the perturbative results.
//! * [`sweep`]: deterministic parameter-grid sweeps and dressed-state
//!   resonance curves, with CSV emission.

pub mod config;
pub mod dynamics;
pub mod numfmt;
pub mod oracle;
pub mod params;
pub mod rates;
pub mod sweep;

pub use params::{DressedSpectrum, Pump, SystemParams, ValidationError, ValidationWarning};
pub use rates::{
    CooperativityLimit, MechanicalAmplitudes, RateError, RateSet, SidebandRates, ThermalEnv,
    ThermalRates,
};
pub use dynamics::{DynamicsError, PhononDistribution, Trajectory};
pub use oracle::{OracleError, QuantumState, Truncation};
pub use sweep::{AxisSpec, Branch, SweepError, SweepGrid, SweepRecord};
