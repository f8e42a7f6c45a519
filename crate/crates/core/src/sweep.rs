//! Parameter-grid sweeps and dressed-state resonance curves.
//!
//! Grid points are evaluated in parallel (the rate chain is pure), but
//! records are always emitted in row-major (Δ, δ) order, so the CSV output
//! is byte-identical whatever the thread count.

use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::numfmt::sig12;
use crate::params::SystemParams;
use crate::rates::{sideband_rates, transition_rates};

/// Sentinel written for quantities that do not exist at a grid point
/// (stationary occupation and sideband rates in heating regions).
pub const ABSENT: f64 = -1.0;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SweepError {
    #[error("axis needs count >= 2 and min < max, got [{min}, {max}] x {count}")]
    InvalidAxis { min: f64, max: f64, count: usize },
}

/// A uniformly spaced closed interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self, SweepError> {
        if count < 2 || !(min < max) || !min.is_finite() || !max.is_finite() {
            return Err(SweepError::InvalidAxis { min, max, count });
        }
        Ok(Self { min, max, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value(i))
    }
}

/// A rectangular (Δ, δ) grid over a base parameter set; the detunings of
/// `base` are overridden point by point.
#[derive(Clone, Copy, Debug)]
pub struct SweepGrid {
    pub delta_cav_axis: AxisSpec,
    pub delta_atom_axis: AxisSpec,
    pub base: SystemParams,
}

/// One evaluated grid point. `m_inf` and the sideband rates hold the
/// [`ABSENT`] sentinel in heating regions (Γ ≤ 0); `degenerate` flags
/// points where the scattering denominator vanished and every rate column
/// is NaN.
#[derive(Clone, Copy, Debug)]
pub struct SweepRecord {
    pub delta_cav: f64,
    pub delta_atom: f64,
    pub s2: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub gamma_cool: f64,
    pub m_inf: f64,
    pub r_kappa_plus: f64,
    pub r_kappa_minus: f64,
    pub r_gamma_plus: f64,
    pub r_gamma_minus: f64,
    pub degenerate: bool,
}

fn evaluate_point(base: &SystemParams, delta_cav: f64, delta_atom: f64) -> SweepRecord {
    let params = SystemParams { delta_cav, delta_atom, ..*base };
    match transition_rates(&params) {
        Err(_) => SweepRecord {
            delta_cav,
            delta_atom,
            s2: f64::NAN,
            a_plus: f64::NAN,
            a_minus: f64::NAN,
            gamma_cool: f64::NAN,
            m_inf: f64::NAN,
            r_kappa_plus: f64::NAN,
            r_kappa_minus: f64::NAN,
            r_gamma_plus: f64::NAN,
            r_gamma_minus: f64::NAN,
            degenerate: true,
        },
        Ok(rs) => {
            let (m_inf, sb) = match rs.m_inf {
                Some(m) => (m, Some(sideband_rates(&rs, m))),
                None => (ABSENT, None),
            };
            SweepRecord {
                delta_cav,
                delta_atom,
                s2: rs.s2,
                a_plus: rs.a_plus,
                a_minus: rs.a_minus,
                gamma_cool: rs.gamma_cool,
                m_inf,
                r_kappa_plus: sb.map_or(ABSENT, |s| s.r_kappa_plus),
                r_kappa_minus: sb.map_or(ABSENT, |s| s.r_kappa_minus),
                r_gamma_plus: sb.map_or(ABSENT, |s| s.r_gamma_plus),
                r_gamma_minus: sb.map_or(ABSENT, |s| s.r_gamma_minus),
                degenerate: false,
            }
        }
    }
}

/// Evaluate the rate chain on every grid point. Row-major in
/// (delta_cav, delta_atom) regardless of execution order; degenerate
/// points are flagged, never dropped.
pub fn run_sweep(grid: &SweepGrid) -> Result<Vec<SweepRecord>, SweepError> {
    let dc = grid.delta_cav_axis;
    let da = grid.delta_atom_axis;
    AxisSpec::new(dc.min, dc.max, dc.count)?;
    AxisSpec::new(da.min, da.max, da.count)?;
    let total = dc.count * da.count;
    Ok((0..total)
        .into_par_iter()
        .map(|idx| {
            let i = idx / da.count;
            let j = idx % da.count;
            evaluate_point(&grid.base, dc.value(i), da.value(j))
        })
        .collect())
}

/// CSV emission with a self-describing comment header (`#` lines), a
/// column-name row, and 12-significant-digit scientific values.
pub fn write_sweep_csv<W: Write + ?Sized>(
    grid: &SweepGrid,
    records: &[SweepRecord],
    out: &mut W,
) -> io::Result<()> {
    let b = &grid.base;
    writeln!(
        out,
        "# base: g = {}, kappa = {}, gamma = {}, chi = {}, omega_drive = {}, pump = {}",
        b.g, b.kappa, b.gamma, b.chi, b.omega_drive, b.pump
    )?;
    writeln!(
        out,
        "# gamma_cool <= 0 means heating: no stationary state; m_inf and r_* columns carry the sentinel -1"
    )?;
    writeln!(
        out,
        "# degenerate = 1 marks a vanishing scattering denominator; rate columns are nan there"
    )?;
    writeln!(
        out,
        "delta_cav,delta_atom,s2,a_plus,a_minus,gamma_cool,m_inf,r_kappa_plus,r_kappa_minus,r_gamma_plus,r_gamma_minus,degenerate"
    )?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            sig12(r.delta_cav),
            sig12(r.delta_atom),
            sig12(r.s2),
            sig12(r.a_plus),
            sig12(r.a_minus),
            sig12(r.gamma_cool),
            sig12(r.m_inf),
            sig12(r.r_kappa_plus),
            sig12(r.r_kappa_minus),
            sig12(r.r_gamma_plus),
            sig12(r.r_gamma_minus),
            u8::from(r.degenerate)
        )?;
    }
    Ok(())
}

/// Which dressed state a resonance curve follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(format!("branch must be `plus` or `minus`, got `{other}`")),
        }
    }
}

/// Solve ω_branch(Δ, δ) = target for δ along a Δ axis.
///
/// Squaring away the radical reduces the resonance condition to the linear
/// equation (target² + target(δ+Δ) + δΔ − g²) = 0, i.e.
/// δ = g²/(target+Δ) − target; substituting back into the dressed spectrum
/// rejects the root when it belongs to the other branch. Points with no
/// real solution are omitted.
pub fn resonance_curves(
    params: &SystemParams,
    target: f64,
    branch: Branch,
    delta_cav_axis: &AxisSpec,
) -> Vec<(f64, f64)> {
    let mut curve = Vec::new();
    for delta_cav in delta_cav_axis.values() {
        let shifted = target + delta_cav;
        if shifted == 0.0 {
            continue;
        }
        let delta_atom = params.g * params.g / shifted - target;
        let probe = SystemParams { delta_cav, delta_atom, ..*params };
        let spectrum = probe.dressed_spectrum();
        let omega = match branch {
            Branch::Plus => spectrum.omega_plus,
            Branch::Minus => spectrum.omega_minus,
        };
        if (omega - target).abs() < 1e-9 {
            curve.push((delta_cav, delta_atom));
        }
    }
    curve
}

/// CSV emission for one resonance curve.
pub fn write_resonance_csv<W: Write + ?Sized>(
    branch: Branch,
    target: f64,
    curve: &[(f64, f64)],
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "# resonance condition: omega_{}(delta_cav, delta_atom) = {}", branch.as_str(), target)?;
    writeln!(out, "delta_cav,delta_atom")?;
    for (dc, da) in curve {
        writeln!(out, "{},{}", sig12(*dc), sig12(*da))?;
    }
    Ok(())
}
