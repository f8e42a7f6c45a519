//! Physical parameters and the dressed-state spectrum of the atom-cavity
//! subsystem.
//!
//! Every rate and detuning is a dimensionless multiple of the mechanical
//! oscillation frequency ν, i.e. ν ≡ 1 throughout. Note that `kappa` is
//! HALF the cavity energy loss rate: an undriven cavity photon population
//! decays as e^(−2κt), while the atomic population decays as e^(−γt).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Default upper bound on η = χ/ν below which the perturbative rate
/// formulas are trusted.
pub const DEFAULT_ETA_MAX: f64 = 0.3;

/// Which operator the pump laser couples to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Pump {
    /// The laser drives the cavity mode: X = a.
    #[default]
    CavityPumped,
    /// The laser drives the two-level transition: X = |g⟩⟨e|.
    AtomPumped,
}

impl Pump {
    pub fn as_str(&self) -> &'static str {
        match self {
            Pump::CavityPumped => "cavity",
            Pump::AtomPumped => "atom",
        }
    }
}

impl fmt::Display for Pump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pump {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "cavity" => Ok(Pump::CavityPumped),
            "atom" => Ok(Pump::AtomPumped),
            other => Err(format!("pump must be `cavity` or `atom`, got `{other}`")),
        }
    }
}

/// All physical rates and detunings of the driven system, in units of ν.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SystemParams {
    /// Atom-cavity coupling g.
    pub g: f64,
    /// Half the cavity energy loss rate (full rate 2κ).
    pub kappa: f64,
    /// Atomic spontaneous decay rate γ.
    pub gamma: f64,
    /// Single-photon optomechanical coupling χ.
    pub chi: f64,
    /// Pump rate / Rabi frequency Ω.
    pub omega_drive: f64,
    /// Laser-cavity detuning Δ = ω_L − ω_cav.
    pub delta_cav: f64,
    /// Laser-atom detuning δ = ω_L − ω_tls.
    pub delta_atom: f64,
    /// Pump scheme.
    pub pump: Pump,
}

/// Hard parameter errors: the rate formulas are meaningless for these.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum ValidationError {
    #[error("rate `{name}` must be nonnegative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
}

/// Soft diagnostics: the computation proceeds, but results may be outside
/// the validity of the perturbative treatment.
#[derive(Clone, Debug, PartialEq)]
pub enum ValidationWarning {
    /// η = χ/ν is not small; only single-phonon transitions are modeled.
    PerturbativeRegimeViolated { eta: f64, eta_max: f64 },
    /// With g = 0 a pumped atom never populates the cavity, so no
    /// radiation-pressure scattering takes place.
    AtomPumpedWithoutCoupling,
    /// κ = γ = 0 leaves no decay channel to complete a scattering cycle.
    NoDecayChannel,
}

impl fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationWarning::PerturbativeRegimeViolated { eta, eta_max } => write!(
                f,
                "perturbative regime violated: eta = chi/nu = {eta} >= eta_max = {eta_max}"
            ),
            ValidationWarning::AtomPumpedWithoutCoupling => {
                write!(f, "atom pumped but g = 0: the cavity is never excited")
            }
            ValidationWarning::NoDecayChannel => {
                write!(f, "kappa = gamma = 0: no decay channel, rates all vanish")
            }
        }
    }
}

/// Dressed-state frequencies of the single-excitation manifold and the
/// mixing angle θ = arg(Δ − δ + 2ig), reported in [0, π].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedSpectrum {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub theta: f64,
}

impl SystemParams {
    /// Cavity-atom detuning δ_ca = ω_cav − ω_tls = δ − Δ. Always derived,
    /// never stored.
    pub fn delta_ca(&self) -> f64 {
        self.delta_atom - self.delta_cav
    }

    /// Mechanical smallness parameter η = χ/ν.
    pub fn eta(&self) -> f64 {
        self.chi
    }

    /// Check the parameter record with the default η bound.
    pub fn validate(&self) -> Result<Vec<ValidationWarning>, ValidationError> {
        self.validate_with_eta_max(DEFAULT_ETA_MAX)
    }

    /// Check the parameter record, warning when η ≥ `eta_max`.
    ///
    /// Negative rates and non-finite values are hard errors; everything
    /// else comes back as warnings so that the breakdown of the
    /// perturbative formulas can still be probed against the oracle.
    pub fn validate_with_eta_max(
        &self,
        eta_max: f64,
    ) -> Result<Vec<ValidationWarning>, ValidationError> {
        let fields = [
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("chi", self.chi),
            ("omega_drive", self.omega_drive),
            ("delta_cav", self.delta_cav),
            ("delta_atom", self.delta_atom),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(ValidationError::NonFinite { name, value });
            }
        }
        for (name, value) in fields.iter().take(5) {
            if *value < 0.0 {
                return Err(ValidationError::NegativeRate { name, value: *value });
            }
        }

        let mut warnings = Vec::new();
        if self.eta() >= eta_max {
            warnings.push(ValidationWarning::PerturbativeRegimeViolated {
                eta: self.eta(),
                eta_max,
            });
        }
        if self.g == 0.0 && self.pump == Pump::AtomPumped {
            warnings.push(ValidationWarning::AtomPumpedWithoutCoupling);
        }
        if self.kappa == 0.0 && self.gamma == 0.0 {
            warnings.push(ValidationWarning::NoDecayChannel);
        }
        Ok(warnings)
    }

    /// Frequencies of the dressed states |±⟩ of the coupled atom-cavity
    /// single-excitation manifold,
    ///
    ///   ω± = −(δ + Δ)/2 ± ½√((Δ − δ)² + 4g²),
    ///
    /// together with the mixing angle θ = arg(Δ − δ + 2ig).
    pub fn dressed_spectrum(&self) -> DressedSpectrum {
        let half_sum = -0.5 * (self.delta_atom + self.delta_cav);
        let diff = self.delta_cav - self.delta_atom;
        let half_split = 0.5 * (diff * diff + 4.0 * self.g * self.g).sqrt();
        DressedSpectrum {
            omega_plus: half_sum + half_split,
            omega_minus: half_sum - half_split,
            theta: (2.0 * self.g).atan2(diff),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig3_params() -> SystemParams {
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

    #[test]
    fn fig3_point_is_clean() {
        assert!(fig3_params().validate().unwrap().is_empty());
    }

    #[test]
    fn large_chi_warns_about_perturbative_regime() {
        let p = SystemParams { chi: 0.5, kappa: 1.0, ..fig3_params() };
        let warnings = p.validate().unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].to_string().contains("perturbative regime violated"));
        // A larger bound silences it.
        assert!(p.validate_with_eta_max(0.6).unwrap().is_empty());
    }

    #[test]
    fn negative_kappa_is_an_error() {
        let p = SystemParams { kappa: -1.0, ..fig3_params() };
        assert_eq!(
            p.validate(),
            Err(ValidationError::NegativeRate { name: "kappa", value: -1.0 })
        );
    }

    #[test]
    fn negative_detunings_are_fine() {
        let p = SystemParams { delta_cav: -3.0, delta_atom: -0.5, ..fig3_params() };
        assert!(p.validate().unwrap().is_empty());
    }

    #[test]
    fn atom_pump_without_coupling_warns() {
        let p = SystemParams { g: 0.0, pump: Pump::AtomPumped, ..fig3_params() };
        assert_eq!(p.validate().unwrap(), vec![ValidationWarning::AtomPumpedWithoutCoupling]);
    }

    #[test]
    fn no_decay_channel_warns() {
        let p = SystemParams { kappa: 0.0, gamma: 0.0, ..fig3_params() };
        assert_eq!(p.validate().unwrap(), vec![ValidationWarning::NoDecayChannel]);
    }

    #[test]
    fn dressed_spectrum_on_resonance() {
        // Δ = δ = 0, g = 2: symmetric vacuum Rabi splitting.
        let p = SystemParams { g: 2.0, delta_cav: 0.0, delta_atom: 0.0, ..fig3_params() };
        let d = p.dressed_spectrum();
        assert_relative_eq!(d.omega_plus, 2.0);
        assert_relative_eq!(d.omega_minus, -2.0);
        assert_relative_eq!(d.theta, std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn dressed_spectrum_decoupled_limit() {
        // g → 0: the dressed states reduce to the bare atom and cavity.
        let p = SystemParams { g: 0.0, delta_cav: 1.0, delta_atom: 3.0, ..fig3_params() };
        let d = p.dressed_spectrum();
        assert_relative_eq!(d.omega_plus, -1.0);
        assert_relative_eq!(d.omega_minus, -3.0);
    }

    #[test]
    fn dressed_spectrum_direct_evaluation() {
        // Δ = 0, δ = −2, g = 2: ω± = 1 ± √5.
        let p = SystemParams { g: 2.0, delta_cav: 0.0, delta_atom: -2.0, ..fig3_params() };
        let d = p.dressed_spectrum();
        let root5 = 5.0_f64.sqrt();
        assert_relative_eq!(d.omega_plus, 1.0 + root5, max_relative = 1e-14);
        assert_relative_eq!(d.omega_minus, 1.0 - root5, max_relative = 1e-14);
        // Root identities of the characteristic polynomial.
        assert_relative_eq!(d.omega_plus + d.omega_minus, 2.0, max_relative = 1e-12);
        assert_relative_eq!(d.omega_plus * d.omega_minus, -4.0, max_relative = 1e-12);
    }

    #[test]
    fn delta_ca_is_derived() {
        let p = SystemParams { delta_cav: 0.5, delta_atom: 2.0, ..fig3_params() };
        assert_relative_eq!(p.delta_ca(), 1.5);
    }

    proptest! {
        #[test]
        fn root_invariants(
            g in 0.0..50.0f64,
            dc in -50.0..50.0f64,
            da in -50.0..50.0f64,
        ) {
            let p = SystemParams { g, delta_cav: dc, delta_atom: da, ..Default::default() };
            let d = p.dressed_spectrum();
            let scale = 1.0 + (da.abs() + dc.abs()).powi(2) + 4.0 * g * g;
            // ω₊ + ω₋ = −(δ + Δ) and ω₊·ω₋ = δΔ − g².
            prop_assert!((d.omega_plus + d.omega_minus + da + dc).abs() <= 1e-12 * scale);
            prop_assert!((d.omega_plus * d.omega_minus - (da * dc - g * g)).abs() <= 1e-12 * scale);
            // Minimum splitting 2g is reached at Δ = δ.
            prop_assert!(d.omega_plus - d.omega_minus >= 2.0 * g * (1.0 - 1e-14));
            // θ stays in [0, π] for g ≥ 0.
            prop_assert!((0.0..=std::f64::consts::PI).contains(&d.theta));
        }

        #[test]
        fn dressed_spectrum_is_pure(
            g in 0.0..50.0f64,
            dc in -50.0..50.0f64,
            da in -50.0..50.0f64,
        ) {
            let p = SystemParams { g, delta_cav: dc, delta_atom: da, ..Default::default() };
            let d1 = p.dressed_spectrum();
            let d2 = p.dressed_spectrum();
            prop_assert_eq!(d1.omega_plus.to_bits(), d2.omega_plus.to_bits());
            prop_assert_eq!(d1.omega_minus.to_bits(), d2.omega_minus.to_bits());
            prop_assert_eq!(d1.theta.to_bits(), d2.theta.to_bits());
        }
    }
}
