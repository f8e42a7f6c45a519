//! Closed-form perturbative scattering quantities.
//!
//! Raman scattering off the driven atom-cavity system changes the
//! vibrational quantum number by ±1 at the rates
//!
//!   A± = |S|² [ 2κ |A_{κ,±}|² + γ |A_{γ,±}|² ],
//!
//! where |S|² is the probability of exciting the cavity with the pump and
//! the mechanical amplitudes, resolved by decay channel, are
//!
//!   |A_{κ,±}|² = χ² [(δ ∓ ν)² + γ²/4] / D(∓ν),
//!   |A_{γ,±}|² = χ² g² / D(∓ν),
//!
//! with the resolvent denominator
//!
//!   D(υ) = [(δ+υ)(Δ+υ) − g² − γκ/2]² + [κ(δ+υ) + (γ/2)(Δ+υ)]².
//!
//! The Stokes (+) amplitudes carry the −ν shift and vanish identically at
//! δ = ν, γ = 0: destructive interference between the two scattering paths
//! through the dressed states suppresses the heating transition, which is
//! what makes near-ground-state cooling possible even for κ > ν. The net
//! phonon decay rate is Γ = A₋ − A₊ with stationary occupation
//! ⟨m⟩∞ = A₊/Γ whenever Γ > 0; Γ ≤ 0 means the oscillator heats up and no
//! stationary state exists.

use thiserror::Error;

use crate::params::{Pump, SystemParams};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum RateError {
    /// The scattering denominator vanished exactly. This only happens for
    /// fully degenerate undamped configurations (e.g. g = 0, γ = 0,
    /// δ = −υ), outside the assumptions of the strong-coupling treatment;
    /// the rate is reported as undefined rather than infinite.
    #[error("scattering denominator D({upsilon}) = 0: rates undefined at this parameter point")]
    DegenerateResonance { upsilon: f64 },
    /// C = 2g²/(κγ) requires κγ > 0.
    #[error("single-atom cooperativity undefined: kappa * gamma = 0")]
    UndefinedCooperativity,
}

/// Everything the closed-form theory says about one parameter point.
///
/// `a_kappa_±` / `a_gamma_±` are the two additive pieces of A± in which the
/// scattered photon leaves through the cavity (rate 2κ) or through the atom
/// (rate γ); they already include the |S|² factor, so
/// `a_plus = a_kappa_plus + a_gamma_plus` and likewise for minus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSet {
    /// Cavity excitation probability |S|².
    pub s2: f64,
    /// |A_{κ,+}|², |A_{κ,−}|² (Stokes / anti-Stokes through the cavity).
    pub a2_kappa_plus: f64,
    pub a2_kappa_minus: f64,
    /// |A_{γ,+}|², |A_{γ,−}|² (Stokes / anti-Stokes through the atom).
    pub a2_gamma_plus: f64,
    pub a2_gamma_minus: f64,
    /// Channel-resolved transition rates |S|²·2κ·|A_{κ,±}|².
    pub a_kappa_plus: f64,
    pub a_kappa_minus: f64,
    /// Channel-resolved transition rates |S|²·γ·|A_{γ,±}|².
    pub a_gamma_plus: f64,
    pub a_gamma_minus: f64,
    /// Heating rate A₊ and cooling rate A₋.
    pub a_plus: f64,
    pub a_minus: f64,
    /// Γ = A₋ − A₊; negative values mean net heating.
    pub gamma_cool: f64,
    /// ⟨m⟩∞ = A₊/Γ. `None` whenever Γ ≤ 0: heating, no stationary state.
    pub m_inf: Option<f64>,
}

/// Photon flux into the Stokes (+) and anti-Stokes (−) sidebands,
/// R± = (⟨m⟩ + δ±)A± with δ₊ = 1, δ₋ = 0, split by decay channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SidebandRates {
    pub r_kappa_plus: f64,
    pub r_kappa_minus: f64,
    pub r_gamma_plus: f64,
    pub r_gamma_minus: f64,
    pub r_plus: f64,
    pub r_minus: f64,
}

/// Mechanical bath: equilibrium occupation m_th, damping rate γ_th.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ThermalEnv {
    pub m_th: f64,
    pub gamma_th: f64,
}

impl ThermalEnv {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.m_th.is_finite() && self.m_th >= 0.0) {
            return Err(format!("m_th must be finite and nonnegative, got {}", self.m_th));
        }
        if !(self.gamma_th.is_finite() && self.gamma_th >= 0.0) {
            return Err(format!("gamma_th must be finite and nonnegative, got {}", self.gamma_th));
        }
        Ok(())
    }
}

/// Rates with intrinsic mechanical damping folded in:
/// A′₊ = A₊ + m_th γ_th, A′₋ = A₋ + (m_th + 1)γ_th.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalRates {
    pub a_plus_prime: f64,
    pub a_minus_prime: f64,
    /// Γ′ = Γ + γ_th.
    pub gamma_prime: f64,
    /// ⟨m⟩′∞ = A′₊/Γ′ = (Γ⟨m⟩∞ + γ_th m_th)/(γ_th + Γ); `None` when Γ′ ≤ 0.
    pub m_inf_prime: Option<f64>,
}

/// Squared mechanical transition amplitudes, by channel and sideband.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MechanicalAmplitudes {
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

/// Ground-state cooling limit at the optimal working point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CooperativityLimit {
    /// ⟨m⟩∞ ≈ 1/C + (γ/4ν)² with C = 2g²/(κγ).
    pub m_inf_approx: f64,
    /// Γ ≈ (2χ²/κ)|S|².
    pub gamma_approx: f64,
}

/// Resolvent denominator D(υ). Strictly positive for g > 0, κ > 0: the two
/// brackets cannot vanish simultaneously (if the second one does, the first
/// equals −γ(Δ+υ)²/(2κ) − g² − γκ/2 < 0).
pub fn denominator_d(p: &SystemParams, upsilon: f64) -> f64 {
    let du = p.delta_atom + upsilon;
    let cu = p.delta_cav + upsilon;
    let re = du * cu - p.g * p.g - 0.5 * p.gamma * p.kappa;
    let im = p.kappa * du + 0.5 * p.gamma * cu;
    re * re + im * im
}

/// Probability |S|² that the pump excites the single-photon state of the
/// cavity. Cavity pumping shows the dark resonance at δ = 0 (the numerator
/// δ² + γ²/4 collapses); atom pumping does not.
pub fn excitation_probability(p: &SystemParams) -> Result<f64, RateError> {
    let d0 = denominator_d(p, 0.0);
    if d0 == 0.0 {
        return Err(RateError::DegenerateResonance { upsilon: 0.0 });
    }
    let numerator = match p.pump {
        Pump::CavityPumped => p.delta_atom * p.delta_atom + 0.25 * p.gamma * p.gamma,
        Pump::AtomPumped => p.g * p.g,
    };
    Ok(0.25 * p.omega_drive * p.omega_drive * numerator / d0)
}

/// Squared mechanical amplitudes |A_{j,±}|². The Stokes (+) case pairs with
/// D(−ν) and the numerator (δ − ν)², so it vanishes exactly at δ = ν, γ = 0.
pub fn mechanical_amplitudes(p: &SystemParams) -> Result<MechanicalAmplitudes, RateError> {
    let d_stokes = denominator_d(p, -1.0);
    let d_anti = denominator_d(p, 1.0);
    if d_stokes == 0.0 {
        return Err(RateError::DegenerateResonance { upsilon: -1.0 });
    }
    if d_anti == 0.0 {
        return Err(RateError::DegenerateResonance { upsilon: 1.0 });
    }
    let chi2 = p.chi * p.chi;
    let g2 = p.g * p.g;
    let gamma2_4 = 0.25 * p.gamma * p.gamma;
    let dm = p.delta_atom - 1.0;
    let dp = p.delta_atom + 1.0;
    Ok(MechanicalAmplitudes {
        kappa_plus: chi2 * (dm * dm + gamma2_4) / d_stokes,
        kappa_minus: chi2 * (dp * dp + gamma2_4) / d_anti,
        gamma_plus: chi2 * g2 / d_stokes,
        gamma_minus: chi2 * g2 / d_anti,
    })
}

/// The full rate chain at one parameter point.
pub fn transition_rates(p: &SystemParams) -> Result<RateSet, RateError> {
    let s2 = excitation_probability(p)?;
    let amps = mechanical_amplitudes(p)?;
    let two_kappa = 2.0 * p.kappa;
    let a_kappa_plus = s2 * two_kappa * amps.kappa_plus;
    let a_kappa_minus = s2 * two_kappa * amps.kappa_minus;
    let a_gamma_plus = s2 * p.gamma * amps.gamma_plus;
    let a_gamma_minus = s2 * p.gamma * amps.gamma_minus;
    let a_plus = a_kappa_plus + a_gamma_plus;
    let a_minus = a_kappa_minus + a_gamma_minus;
    let gamma_cool = a_minus - a_plus;
    let m_inf = (gamma_cool > 0.0).then(|| a_plus / gamma_cool);
    Ok(RateSet {
        s2,
        a2_kappa_plus: amps.kappa_plus,
        a2_kappa_minus: amps.kappa_minus,
        a2_gamma_plus: amps.gamma_plus,
        a2_gamma_minus: amps.gamma_minus,
        a_kappa_plus,
        a_kappa_minus,
        a_gamma_plus,
        a_gamma_minus,
        a_plus,
        a_minus,
        gamma_cool,
        m_inf,
    })
}

/// Sideband photon rates at a given mean occupation. At `m_mean = ⟨m⟩∞` the
/// Stokes and anti-Stokes fluxes balance exactly (detailed balance); during
/// cooling the momentary ⟨m⟩ enters instead and they differ.
pub fn sideband_rates(rates: &RateSet, m_mean: f64) -> SidebandRates {
    assert!(m_mean.is_finite() && m_mean >= 0.0, "m_mean must be finite and >= 0");
    let stokes_weight = m_mean + 1.0;
    let r_kappa_plus = stokes_weight * rates.a_kappa_plus;
    let r_gamma_plus = stokes_weight * rates.a_gamma_plus;
    let r_kappa_minus = m_mean * rates.a_kappa_minus;
    let r_gamma_minus = m_mean * rates.a_gamma_minus;
    SidebandRates {
        r_kappa_plus,
        r_kappa_minus,
        r_gamma_plus,
        r_gamma_minus,
        r_plus: r_kappa_plus + r_gamma_plus,
        r_minus: r_kappa_minus + r_gamma_minus,
    }
}

/// Fold a slow mechanical bath into the transition rates.
pub fn thermal_rates(rates: &RateSet, env: &ThermalEnv) -> ThermalRates {
    let a_plus_prime = rates.a_plus + env.m_th * env.gamma_th;
    let a_minus_prime = rates.a_minus + (env.m_th + 1.0) * env.gamma_th;
    let gamma_prime = a_minus_prime - a_plus_prime;
    let m_inf_prime = (gamma_prime > 0.0).then(|| a_plus_prime / gamma_prime);
    ThermalRates { a_plus_prime, a_minus_prime, gamma_prime, m_inf_prime }
}

/// The laser-cavity detuning Δ_opt = (κγ/2 + g²)/2ν − ν that minimizes
/// ⟨m⟩∞ at δ = ν in the κ ≫ γ regime.
pub fn optimal_detuning(p: &SystemParams) -> f64 {
    0.5 * (0.5 * p.kappa * p.gamma + p.g * p.g) - 1.0
}

/// Cooling floor set by the single-atom cooperativity C = 2g²/(κγ),
/// valid for κ ≫ γ at δ = ν, Δ = Δ_opt (not enforced). With g = 0 the
/// floor 1/C is infinite: there is no atom-assisted cooling to speak of.
pub fn cooperativity_limit(p: &SystemParams) -> Result<CooperativityLimit, RateError> {
    let kappa_gamma = p.kappa * p.gamma;
    if kappa_gamma == 0.0 {
        return Err(RateError::UndefinedCooperativity);
    }
    let c = 2.0 * p.g * p.g / kappa_gamma;
    let atomic_noise = 0.25 * p.gamma * 0.25 * p.gamma;
    let s2 = excitation_probability(p)?;
    Ok(CooperativityLimit {
        m_inf_approx: 1.0 / c + atomic_noise,
        gamma_approx: 2.0 * p.chi * p.chi / p.kappa * s2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Pump, SystemParams};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn fig3(delta_cav: f64, delta_atom: f64) -> SystemParams {
        SystemParams {
            g: 2.0,
            kappa: 7.0,
            gamma: 0.05,
            chi: 0.1,
            omega_drive: 1.0,
            delta_cav,
            delta_atom,
            pump: Pump::CavityPumped,
        }
    }

    #[test]
    fn denominator_coupling_only() {
        // δ = Δ = 0, g = 2, κ = 1, γ = 0, υ = 0: only the −g² term survives.
        let p = SystemParams { g: 2.0, kappa: 1.0, ..Default::default() };
        assert_eq!(denominator_d(&p, 0.0), 16.0);
    }

    #[test]
    fn denominator_degenerate_zero() {
        // g = 0, κ = 1, γ = 0, δ = −υ: both brackets vanish.
        let p = SystemParams { kappa: 1.0, delta_atom: 2.0, ..Default::default() };
        assert_eq!(denominator_d(&p, -2.0), 0.0);
    }

    #[test]
    fn denominator_hand_evaluation() {
        // Independent arithmetic: (1·0 − 4 − 0.175)² + (7·1 + 0.025·0)².
        let expected = 4.175_f64 * 4.175 + 49.0;
        assert_relative_eq!(denominator_d(&fig3(0.0, 1.0), 0.0), expected, max_relative = 1e-15);
        assert_relative_eq!(expected, 66.430625, max_relative = 1e-15);
    }

    #[test]
    fn dark_resonance_kills_cavity_pumped_excitation() {
        let p = SystemParams { g: 2.0, kappa: 1.0, delta_atom: 0.0, omega_drive: 1.0, ..Default::default() };
        assert_eq!(excitation_probability(&p).unwrap(), 0.0);
    }

    #[test]
    fn atom_pumped_needs_coupling() {
        let p = SystemParams {
            g: 0.0,
            kappa: 1.0,
            gamma: 0.1,
            omega_drive: 1.0,
            delta_atom: 0.5,
            delta_cav: 0.3,
            pump: Pump::AtomPumped,
            ..Default::default()
        };
        assert_eq!(excitation_probability(&p).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_point_is_reported() {
        // g = 0, γ = 0, δ = 0 makes D(0) vanish exactly.
        let p = SystemParams { kappa: 1.0, omega_drive: 1.0, ..Default::default() };
        assert_eq!(
            excitation_probability(&p),
            Err(RateError::DegenerateResonance { upsilon: 0.0 })
        );
    }

    /// Numerically locate the maximum of a smooth single-peaked function by
    /// golden-section search; used as an independent check of where the
    /// excitation resonances sit.
    fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
        let mut c = hi - inv_phi * (hi - lo);
        let mut d = lo + inv_phi * (hi - lo);
        for _ in 0..200 {
            if f(c) > f(d) {
                hi = d;
            } else {
                lo = c;
            }
            c = hi - inv_phi * (hi - lo);
            d = lo + inv_phi * (hi - lo);
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn excitation_peaks_sit_on_dressed_resonances() {
        // γ = 0.1κ, g = 2κ, δ_ca = −2κ, Ω = κ, with κ = 1 as the scale:
        // the maxima of |S|² over Δ (with δ = Δ + δ_ca) lie where
        // ω±(Δ, Δ + δ_ca) = 0, i.e. Δ² − 2Δ − 4 = 0 → Δ = 1 ± √5.
        let delta_ca = -2.0;
        let s2_at = |dc: f64| {
            let p = SystemParams {
                g: 2.0,
                kappa: 1.0,
                gamma: 0.1,
                omega_drive: 1.0,
                delta_cav: dc,
                delta_atom: dc + delta_ca,
                ..Default::default()
            };
            excitation_probability(&p).unwrap()
        };
        for root in [1.0 + 5.0_f64.sqrt(), 1.0 - 5.0_f64.sqrt()] {
            let peak = golden_max(root - 0.5, root + 0.5, s2_at);
            // Finite damping shifts the peak slightly off the bare root.
            assert_abs_diff_eq!(peak, root, epsilon = 0.05);
        }
    }

    #[test]
    fn interference_zero_is_exact() {
        let p = SystemParams { gamma: 0.0, delta_atom: 1.0, ..fig3(0.0, 1.0) };
        let amps = mechanical_amplitudes(&p).unwrap();
        assert_eq!(amps.kappa_plus, 0.0);
        assert!(amps.gamma_plus > 0.0);
    }

    #[test]
    fn no_mechanical_coupling_no_amplitudes() {
        let p = SystemParams { chi: 0.0, ..fig3(0.3, -0.7) };
        let amps = mechanical_amplitudes(&p).unwrap();
        assert_eq!(
            (amps.kappa_plus, amps.kappa_minus, amps.gamma_plus, amps.gamma_minus),
            (0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn amplitude_hand_evaluation() {
        // Independent arithmetic at Δ = 0, δ = 1:
        // D(−1) = [(0)(−1) − 4 − 0.175]² + [0 + 0.025·(−1)]² = 17.43125,
        // |A_{γ,+}|² = χ²g²/D(−1) = 0.01·4/17.43125.
        let d_minus = 4.175_f64 * 4.175 + 0.025 * 0.025;
        assert_relative_eq!(d_minus, 17.43125, max_relative = 1e-15);
        let expected = 0.01 * 4.0 / d_minus;
        let amps = mechanical_amplitudes(&fig3(0.0, 1.0)).unwrap();
        assert_relative_eq!(amps.gamma_plus, expected, max_relative = 1e-14);
        assert_relative_eq!(amps.gamma_plus, 2.2947292936536397e-3, max_relative = 1e-12);
    }

    #[test]
    fn chi_zero_means_no_transitions() {
        let rs = transition_rates(&SystemParams { chi: 0.0, ..fig3(0.5, -1.2) }).unwrap();
        assert_eq!((rs.a_plus, rs.a_minus, rs.gamma_cool), (0.0, 0.0, 0.0));
        assert_eq!(rs.m_inf, None);
    }

    #[test]
    fn interference_limit_small_gamma() {
        // δ = ν, γ → 0 with κ ≫ γ: A₊ → 0 while Γ → A₋ > 0.
        let mut prev_a_plus = f64::INFINITY;
        for gamma in [1e-2, 1e-4, 1e-6] {
            let rs = transition_rates(&SystemParams { gamma, ..fig3(0.0, 1.0) }).unwrap();
            assert!(rs.a_plus < prev_a_plus);
            assert!(rs.gamma_cool > 0.0);
            assert_relative_eq!(rs.gamma_cool, rs.a_minus, max_relative = 1e-2);
            prev_a_plus = rs.a_plus;
        }
        let rs = transition_rates(&SystemParams { gamma: 0.0, ..fig3(0.0, 1.0) }).unwrap();
        assert_eq!(rs.a_plus, 0.0);
        assert!(rs.gamma_cool > 0.0);
    }

    #[test]
    fn rate_structure_invariant() {
        let p = fig3(1.0875, 1.0);
        let rs = transition_rates(&p).unwrap();
        assert_relative_eq!(
            rs.a_plus,
            rs.s2 * (2.0 * p.kappa * rs.a2_kappa_plus + p.gamma * rs.a2_gamma_plus),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            rs.a_minus,
            rs.s2 * (2.0 * p.kappa * rs.a2_kappa_minus + p.gamma * rs.a2_gamma_minus),
            max_relative = 1e-15
        );
        let m = rs.m_inf.expect("cooling at the optimal point");
        assert_relative_eq!(m, rs.a_plus / rs.gamma_cool, max_relative = 1e-15);
    }

    #[test]
    fn detailed_balance_at_stationary_occupation() {
        let rs = transition_rates(&fig3(1.0875, 1.0)).unwrap();
        let sb = sideband_rates(&rs, rs.m_inf.unwrap());
        assert_relative_eq!(sb.r_plus, sb.r_minus, max_relative = 1e-12);
        assert_eq!(sb.r_plus, sb.r_kappa_plus + sb.r_gamma_plus);
        assert_eq!(sb.r_minus, sb.r_kappa_minus + sb.r_gamma_minus);
    }

    #[test]
    fn suppressed_stokes_flux() {
        let mut rs = transition_rates(&fig3(0.0, 1.0)).unwrap();
        rs.a_plus = 0.0;
        rs.a_kappa_plus = 0.0;
        rs.a_gamma_plus = 0.0;
        for m in [0.0, 0.3, 12.0] {
            assert_eq!(sideband_rates(&rs, m).r_plus, 0.0);
        }
    }

    #[test]
    fn thermal_rates_identities() {
        let rs = transition_rates(&fig3(1.0875, 1.0)).unwrap();

        // γ_th = 0 reduces to the bare rates.
        let bare = thermal_rates(&rs, &ThermalEnv { m_th: 5.0, gamma_th: 0.0 });
        assert_eq!(bare.a_plus_prime, rs.a_plus);
        assert_eq!(bare.a_minus_prime, rs.a_minus);
        assert_eq!(bare.m_inf_prime, rs.m_inf);

        // χ = 0: pure thermalization pins ⟨m⟩′∞ = m_th.
        let idle = transition_rates(&SystemParams { chi: 0.0, ..fig3(0.0, 0.5) }).unwrap();
        let th = thermal_rates(&idle, &ThermalEnv { m_th: 3.25, gamma_th: 1e-4 });
        assert_relative_eq!(th.m_inf_prime.unwrap(), 3.25, max_relative = 1e-12);

        // Γ = γ_th, ⟨m⟩∞ = 0, m_th = 10: equal weights average to 5.
        let synthetic = RateSet {
            s2: 0.0,
            a2_kappa_plus: 0.0,
            a2_kappa_minus: 0.0,
            a2_gamma_plus: 0.0,
            a2_gamma_minus: 0.0,
            a_kappa_plus: 0.0,
            a_kappa_minus: 2e-3,
            a_gamma_plus: 0.0,
            a_gamma_minus: 0.0,
            a_plus: 0.0,
            a_minus: 2e-3,
            gamma_cool: 2e-3,
            m_inf: Some(0.0),
        };
        let th = thermal_rates(&synthetic, &ThermalEnv { m_th: 10.0, gamma_th: 2e-3 });
        assert_relative_eq!(th.m_inf_prime.unwrap(), 5.0, max_relative = 1e-12);
        assert_relative_eq!(th.gamma_prime, synthetic.gamma_cool + 2e-3, max_relative = 1e-15);
    }

    #[test]
    fn optimal_detuning_values() {
        let p = SystemParams { g: 2.0, kappa: 10.0, gamma: 0.01, ..Default::default() };
        assert_relative_eq!(optimal_detuning(&p), 1.025, max_relative = 1e-15);
        let p = SystemParams { g: 0.0, kappa: 8.0, gamma: 0.5, ..Default::default() };
        assert_relative_eq!(optimal_detuning(&p), 0.0);
        assert_relative_eq!(optimal_detuning(&fig3(0.0, 0.0)), 1.0875, max_relative = 1e-15);
    }

    #[test]
    fn cooperativity_limit_values() {
        let p = SystemParams {
            g: 2.0,
            kappa: 10.0,
            gamma: 0.01,
            chi: 0.1,
            omega_drive: 1.0,
            delta_cav: 1.025,
            delta_atom: 1.0,
            ..Default::default()
        };
        let lim = cooperativity_limit(&p).unwrap();
        // C = 80, m ≈ 1/80 + (0.01/4)² = 0.01250625.
        assert_relative_eq!(lim.m_inf_approx, 0.01250625, max_relative = 1e-12);

        // γ → 0 at fixed C: the atomic-noise term vanishes.
        let c = 80.0;
        for gamma in [1e-3, 1e-5] {
            let kappa = 2.0 * p.g * p.g / (c * gamma);
            let q = SystemParams { kappa, gamma, ..p };
            let lim = cooperativity_limit(&q).unwrap();
            assert_relative_eq!(lim.m_inf_approx, 1.0 / c, max_relative = gamma);
        }

        assert_eq!(
            cooperativity_limit(&SystemParams { kappa: 0.0, ..p }),
            Err(RateError::UndefinedCooperativity)
        );
    }

    #[test]
    fn cooperativity_limit_matches_exact_chain() {
        // Full rate chain vs the κ ≫ γ approximation at the optimal point.
        let base = SystemParams {
            g: 2.0,
            kappa: 10.0,
            gamma: 0.01,
            chi: 0.1,
            omega_drive: 1.0,
            delta_atom: 1.0,
            delta_cav: 0.0,
            pump: Pump::CavityPumped,
            ..Default::default()
        };
        let p = SystemParams { delta_cav: optimal_detuning(&base), ..base };
        let exact = transition_rates(&p).unwrap().m_inf.unwrap();
        let approx = cooperativity_limit(&p).unwrap().m_inf_approx;
        assert!(
            (exact - approx).abs() / approx < 0.10,
            "exact {exact} vs approx {approx}"
        );
    }

    fn arb_params() -> impl Strategy<Value = SystemParams> {
        (
            0.01..4.0f64,
            0.01..10.0f64,
            0.001..1.0f64,
            0.001..0.29f64,
            0.01..2.0f64,
            -4.0..4.0f64,
            -4.0..4.0f64,
            prop::bool::ANY,
        )
            .prop_map(|(g, kappa, gamma, chi, omega_drive, delta_cav, delta_atom, atom)| {
                SystemParams {
                    g,
                    kappa,
                    gamma,
                    chi,
                    omega_drive,
                    delta_cav,
                    delta_atom,
                    pump: if atom { Pump::AtomPumped } else { Pump::CavityPumped },
                }
            })
    }

    proptest! {
        #[test]
        fn denominator_is_positive(p in arb_params(), upsilon in -3.0..3.0f64) {
            prop_assert!(denominator_d(&p, upsilon) > 0.0);
        }

        #[test]
        fn interference_zeros(p in arb_params()) {
            let p = SystemParams { gamma: 0.0, ..p };
            let stokes = SystemParams { delta_atom: 1.0, ..p };
            prop_assert_eq!(mechanical_amplitudes(&stokes).unwrap().kappa_plus, 0.0);
            let anti = SystemParams { delta_atom: -1.0, ..p };
            prop_assert_eq!(mechanical_amplitudes(&anti).unwrap().kappa_minus, 0.0);
        }

        #[test]
        fn stationary_occupation_is_pump_independent(p in arb_params()) {
            let cavity = SystemParams { pump: Pump::CavityPumped, ..p };
            let atom = SystemParams { pump: Pump::AtomPumped, ..p };
            let mc = transition_rates(&cavity).unwrap().m_inf;
            let ma = transition_rates(&atom).unwrap().m_inf;
            match (mc, ma) {
                (Some(mc), Some(ma)) => {
                    prop_assert!((mc - ma).abs() <= 1e-12 * mc.abs().max(ma.abs()).max(1e-300));
                }
                (other_c, other_a) => prop_assert_eq!(other_c, other_a),
            }
        }

        #[test]
        fn detailed_balance(p in arb_params()) {
            let rs = transition_rates(&p).unwrap();
            if let Some(m_inf) = rs.m_inf {
                let sb = sideband_rates(&rs, m_inf);
                prop_assert!((sb.r_plus - sb.r_minus).abs()
                    <= 1e-12 * sb.r_plus.abs().max(sb.r_minus.abs()).max(1e-300));
            }
        }

        #[test]
        fn rates_scale_quadratically(p in arb_params()) {
            let base = transition_rates(&p).unwrap();
            prop_assume!(base.a_plus > 0.0 && base.a_minus > 0.0);
            // Doubling is exact in binary floating point, so the quadratic
            // scaling of A± in Ω and in χ holds exactly.
            let drive = transition_rates(&SystemParams { omega_drive: 2.0 * p.omega_drive, ..p }).unwrap();
            prop_assert_eq!(drive.a_plus, 4.0 * base.a_plus);
            prop_assert_eq!(drive.a_minus, 4.0 * base.a_minus);
            let mech = transition_rates(&SystemParams { chi: 2.0 * p.chi, ..p }).unwrap();
            prop_assert_eq!(mech.a_plus, 4.0 * base.a_plus);
            prop_assert_eq!(mech.a_minus, 4.0 * base.a_minus);
        }

        #[test]
        fn thermal_mixing_is_convex(p in arb_params(), m_th in 0.0..20.0f64, gamma_th in 1e-12..1e-2f64) {
            let rs = transition_rates(&p).unwrap();
            if let Some(m_inf) = rs.m_inf {
                let th = thermal_rates(&rs, &ThermalEnv { m_th, gamma_th });
                let m_prime = th.m_inf_prime.expect("gamma_prime > gamma_cool > 0");
                let lo = m_inf.min(m_th) * (1.0 - 1e-12) - 1e-15;
                let hi = m_inf.max(m_th) * (1.0 + 1e-12) + 1e-15;
                prop_assert!(m_prime >= lo && m_prime <= hi,
                    "m' = {} outside [{}, {}]", m_prime, lo, hi);
            }
        }
    }
}
