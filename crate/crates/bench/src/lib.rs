//! Shared fixtures for the criterion benches.

use omcool_core::{Pump, SystemParams};

/// The strong-coupling operating point used throughout the benches:
/// g = 2ν, κ = 7ν, γ = 0.05ν, χ = 0.1ν, Ω = ν.
pub fn reference_point() -> SystemParams {
    SystemParams {
        g: 2.0,
        kappa: 7.0,
        gamma: 0.05,
        chi: 0.1,
        omega_drive: 1.0,
        delta_cav: 0.0,
        delta_atom: 1.0,
        pump: Pump::CavityPumped,
    }
}
