//! Vibrational rate-equation dynamics.
//!
//! The level populations obey the birth-death chain
//!
//!   dp_m/dt = −[m A₋ + (m+1) A₊] p_m + (m+1) A₋ p_{m+1} + m A₊ p_{m−1},
//!
//! truncated at m = M with a reflecting top level: the heating outflow
//! (M+1)A₊ p_M is dropped so total probability is conserved exactly. For
//! Γ = A₋ − A₊ > 0 the chain relaxes to the thermal (geometric)
//! distribution p_m ∝ (A₊/A₋)^m with mean ⟨m⟩∞ = A₊/Γ, and the mean obeys
//! the closed form ⟨m⟩(t) = ⟨m⟩∞ + (m₀ − ⟨m⟩∞) e^(−Γt).

use std::io::{self, Write};

use thiserror::Error;

use crate::numfmt::sig12;
use crate::rates::RateSet;

/// |Σ p_m − 1| must stay below this.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Reported distributions should keep less than this much mass in the top
/// retained level.
pub const TRUNCATION_ADEQUACY: f64 = 1e-6;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("invalid phonon distribution: {0}")]
    InvalidDistribution(String),
    #[error("explicit stepping unstable: dt*M*(A+ + A-) = {value:.3e}, must be < 0.1")]
    UnstableStep { value: f64 },
    #[error("no stationary state: gamma_cool = {gamma_cool:.6e} <= 0")]
    NoStationaryState { gamma_cool: f64 },
    #[error("transition rates must be finite and nonnegative")]
    BadRates,
}

/// Populations p_0..p_M of the vibrational levels.
#[derive(Clone, Debug, PartialEq)]
pub struct PhononDistribution {
    populations: Vec<f64>,
}

impl PhononDistribution {
    /// Wrap a population vector; it must have M ≥ 1, no negative entries,
    /// and sum to one within [`NORMALIZATION_TOL`].
    pub fn new(populations: Vec<f64>) -> Result<Self, DynamicsError> {
        if populations.len() < 2 {
            return Err(DynamicsError::InvalidDistribution(
                "need at least levels 0 and 1 (M >= 1)".into(),
            ));
        }
        if populations.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(DynamicsError::InvalidDistribution(
                "populations must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = populations.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(DynamicsError::InvalidDistribution(format!(
                "populations sum to {total}, expected 1 within {NORMALIZATION_TOL:e}"
            )));
        }
        Ok(Self { populations })
    }

    /// A single Fock level |m₀⟩ on a ladder truncated at M.
    pub fn fock(m0: usize, truncation: usize) -> Result<Self, DynamicsError> {
        if truncation < 1 || m0 > truncation {
            return Err(DynamicsError::InvalidDistribution(format!(
                "fock level {m0} does not fit a ladder truncated at {truncation}"
            )));
        }
        let mut populations = vec![0.0; truncation + 1];
        populations[m0] = 1.0;
        Ok(Self { populations })
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    /// Truncation level M.
    pub fn truncation(&self) -> usize {
        self.populations.len() - 1
    }

    /// ⟨m⟩ = Σ m p_m.
    pub fn mean(&self) -> f64 {
        self.populations.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
    }

    /// Population of the top retained level.
    pub fn top_level_mass(&self) -> f64 {
        *self.populations.last().unwrap()
    }

    pub fn truncation_adequate(&self) -> bool {
        self.top_level_mass() < TRUNCATION_ADEQUACY
    }

    /// Total-variation distance ½ Σ |p_m − q_m| (same truncation required).
    pub fn total_variation(&self, other: &Self) -> f64 {
        assert_eq!(self.populations.len(), other.populations.len());
        0.5 * self
            .populations
            .iter()
            .zip(&other.populations)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }
}

fn check_rates(rates: &RateSet) -> Result<(f64, f64), DynamicsError> {
    let (a_plus, a_minus) = (rates.a_plus, rates.a_minus);
    if !(a_plus.is_finite() && a_minus.is_finite() && a_plus >= 0.0 && a_minus >= 0.0) {
        return Err(DynamicsError::BadRates);
    }
    Ok((a_plus, a_minus))
}

/// d/dt of the population vector, reflecting at the top level.
fn rate_equation_rhs(a_plus: f64, a_minus: f64, p: &[f64], out: &mut [f64]) {
    let top = p.len() - 1;
    for m in 0..=top {
        let mf = m as f64;
        // Outflow: cooling always, heating only below the reflecting top.
        let heating_out = if m < top { (mf + 1.0) * a_plus } else { 0.0 };
        let mut dp = -(mf * a_minus + heating_out) * p[m];
        if m < top {
            dp += (mf + 1.0) * a_minus * p[m + 1];
        }
        if m > 0 {
            dp += mf * a_plus * p[m - 1];
        }
        out[m] = dp;
    }
}

fn rk4_step(a_plus: f64, a_minus: f64, p: &mut Vec<f64>, dt: f64, scratch: &mut [Vec<f64>; 4]) {
    let n = p.len();
    let [k1, k2, k3, k4] = scratch;
    rate_equation_rhs(a_plus, a_minus, p, k1);
    let tmp: Vec<f64> = (0..n).map(|i| p[i] + 0.5 * dt * k1[i]).collect();
    rate_equation_rhs(a_plus, a_minus, &tmp, k2);
    let tmp: Vec<f64> = (0..n).map(|i| p[i] + 0.5 * dt * k2[i]).collect();
    rate_equation_rhs(a_plus, a_minus, &tmp, k3);
    let tmp: Vec<f64> = (0..n).map(|i| p[i] + dt * k3[i]).collect();
    rate_equation_rhs(a_plus, a_minus, &tmp, k4);
    for i in 0..n {
        p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

fn stability_check(
    a_plus: f64,
    a_minus: f64,
    truncation: usize,
    dt: f64,
) -> Result<(), DynamicsError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DynamicsError::UnstableStep { value: f64::NAN });
    }
    let value = dt * truncation as f64 * (a_plus + a_minus);
    if value >= 0.1 {
        return Err(DynamicsError::UnstableStep { value });
    }
    Ok(())
}

fn clamp_roundoff(p: &mut [f64]) -> Result<(), DynamicsError> {
    for v in p.iter_mut() {
        if *v < 0.0 {
            if *v < -1e-12 {
                return Err(DynamicsError::InvalidDistribution(format!(
                    "integration produced a significantly negative population {v}"
                )));
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// Integrate the rate equation from `initial` to `t_final` with a fixed
/// 4th-order step of at most `dt` (the step is shrunk uniformly so the
/// final time is hit exactly).
pub fn evolve_populations(
    rates: &RateSet,
    initial: &PhononDistribution,
    t_final: f64,
    dt: f64,
) -> Result<PhononDistribution, DynamicsError> {
    let trajectory = evolve_populations_sampled(rates, initial, t_final, dt, 1)?;
    Ok(trajectory.states.into_iter().last().unwrap())
}

/// Time series of the rate-equation populations.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhononDistribution>,
}

impl Trajectory {
    pub fn mean_series(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.mean()).collect()
    }

    /// CSV columns: t, mean_m, p_0..p_M. Values carry 12 significant digits.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        let truncation = self.states[0].truncation();
        write!(out, "t,mean_m")?;
        for m in 0..=truncation {
            write!(out, ",p_{m}")?;
        }
        writeln!(out)?;
        for (t, state) in self.times.iter().zip(&self.states) {
            write!(out, "{},{}", sig12(*t), sig12(state.mean()))?;
            for p in state.populations() {
                write!(out, ",{}", sig12(*p))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// As [`evolve_populations`], but sampling `samples` intermediate states at
/// equal time intervals (the initial state is always included).
pub fn evolve_populations_sampled(
    rates: &RateSet,
    initial: &PhononDistribution,
    t_final: f64,
    dt: f64,
    samples: usize,
) -> Result<Trajectory, DynamicsError> {
    let (a_plus, a_minus) = check_rates(rates)?;
    let truncation = initial.truncation();
    stability_check(a_plus, a_minus, truncation, dt)?;
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(DynamicsError::UnstableStep { value: f64::NAN });
    }
    let samples = samples.max(1);

    let n = truncation + 1;
    let mut scratch = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut p = initial.populations().to_vec();
    let mut times = Vec::with_capacity(samples + 1);
    let mut states = Vec::with_capacity(samples + 1);
    times.push(0.0);
    states.push(initial.clone());

    let sample_dt = t_final / samples as f64;
    for k in 1..=samples {
        if sample_dt > 0.0 {
            let steps = (sample_dt / dt).ceil().max(1.0) as usize;
            let h = sample_dt / steps as f64;
            for _ in 0..steps {
                rk4_step(a_plus, a_minus, &mut p, h, &mut scratch);
            }
        }
        clamp_roundoff(&mut p)?;
        times.push(k as f64 * sample_dt);
        states.push(PhononDistribution::new(p.clone())?);
    }
    Ok(Trajectory { times, states })
}

/// The stationary (thermal) distribution p_m ∝ (A₊/A₋)^m on a ladder
/// truncated at M. Fails with [`DynamicsError::NoStationaryState`] when
/// Γ ≤ 0. The truncated mean approaches the closed form A₊/Γ as M → ∞;
/// compare [`PhononDistribution::mean`] with [`RateSet::m_inf`].
pub fn stationary_distribution(
    rates: &RateSet,
    truncation: usize,
) -> Result<PhononDistribution, DynamicsError> {
    let (a_plus, a_minus) = check_rates(rates)?;
    if rates.gamma_cool <= 0.0 {
        return Err(DynamicsError::NoStationaryState { gamma_cool: rates.gamma_cool });
    }
    if truncation < 1 {
        return Err(DynamicsError::InvalidDistribution("truncation must be >= 1".into()));
    }
    // Γ > 0 implies A₋ > A₊ ≥ 0, so the ratio is in [0, 1).
    let ratio = a_plus / a_minus;
    let mut populations: Vec<f64> = (0..=truncation).map(|m| ratio.powi(m as i32)).collect();
    let norm: f64 = populations.iter().sum();
    populations.iter_mut().for_each(|p| *p /= norm);
    PhononDistribution::new(populations)
}

/// Closed-form mean occupation at time `t` starting from ⟨m⟩(0) = m₀:
/// ⟨m⟩(t) = A₊/Γ + (m₀ − A₊/Γ) e^(−Γt) for Γ ≠ 0 (valid for heating too),
/// and the linear drift m₀ + A₊ t at the Γ = 0 boundary.
pub fn mean_phonon_trajectory(rates: &RateSet, m0: f64, t: f64) -> f64 {
    if rates.gamma_cool == 0.0 {
        return m0 + rates.a_plus * t;
    }
    let m_fixed = rates.a_plus / rates.gamma_cool;
    m_fixed + (m0 - m_fixed) * (-rates.gamma_cool * t).exp()
}
