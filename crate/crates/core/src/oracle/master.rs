//! Hamiltonian, Lindblad right-hand side, and the dense vectorized
//! generator.

use num_complex::Complex64 as C64;

use crate::params::{Pump, SystemParams};
use crate::rates::ThermalEnv;

use super::operators::OperatorSet;
use super::{CMat, QuantumState};

/// Tripartite Hamiltonian in the frame rotating with the laser,
///
///   H = ν(b†b + ½) − δ σ₊σ₋ − Δ a†a + g(σ₊a + σ₋a†)
///       − χ a†a (b + b†) + (Ω/2)(X + X†),
///
/// with X = a (cavity pumped) or X = σ₋ (atom pumped). Hermitian by
/// construction.
pub fn build_hamiltonian(p: &SystemParams, ops: &OperatorSet) -> CMat {
    let r = C64::from;
    let mut h: CMat = &ops.n_mech + &(&ops.identity * r(0.5));
    h = h - &ops.sigma_ee * r(p.delta_atom) - &ops.n_cav * r(p.delta_cav);
    if p.g != 0.0 {
        let jc = ops.sigma_plus.dot(&ops.a) + ops.sigma_minus.dot(&ops.a_dag);
        h = h + jc * r(p.g);
    }
    if p.chi != 0.0 {
        let x_mech = &ops.b + &ops.b_dag;
        h = h - ops.n_cav.dot(&x_mech) * r(p.chi);
    }
    if p.omega_drive != 0.0 {
        let x = match p.pump {
            Pump::CavityPumped => &ops.a + &ops.a_dag,
            Pump::AtomPumped => &ops.sigma_minus + &ops.sigma_plus,
        };
        h = h + x * r(0.5 * p.omega_drive);
    }
    h
}

struct Channel {
    rate: f64,
    c: CMat,
    c_dag: CMat,
    /// c†c, precomputed for the anticommutator part.
    cdc: CMat,
}

impl Channel {
    fn new(rate: f64, c: CMat) -> Self {
        let c_dag = c.t().mapv(|z| z.conj());
        let cdc = c_dag.dot(&c);
        Self { rate, c, c_dag, cdc }
    }
}

/// The full generator ρ ↦ −i[H, ρ] + Σ_k rate_k D[c_k]ρ with operators
/// built once and reused.
pub struct MasterOperator {
    h: CMat,
    channels: Vec<Channel>,
    dim: usize,
}

impl MasterOperator {
    /// Decay channels: cavity loss at 2κ, spontaneous emission at γ, and,
    /// when a thermal environment is given, mechanical damping at
    /// γ_th(m_th + 1) with reabsorption at γ_th m_th.
    pub fn new(p: &SystemParams, env: Option<&ThermalEnv>, ops: &OperatorSet) -> Self {
        let h = build_hamiltonian(p, ops);
        let mut channels = Vec::new();
        let mut add = |rate: f64, c: &CMat| {
            if rate != 0.0 {
                channels.push(Channel::new(rate, c.clone()));
            }
        };
        add(2.0 * p.kappa, &ops.a);
        add(p.gamma, &ops.sigma_minus);
        if let Some(env) = env {
            add(env.gamma_th * (env.m_th + 1.0), &ops.b);
            add(env.gamma_th * env.m_th, &ops.b_dag);
        }
        let dim = ops.truncation().dim();
        Self { h, channels, dim }
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// dρ/dt.
    pub fn apply(&self, rho: &CMat) -> CMat {
        let minus_i = C64::new(0.0, -1.0);
        let mut out = (self.h.dot(rho) - rho.dot(&self.h)) * minus_i;
        for ch in &self.channels {
            let jump = ch.c.dot(rho).dot(&ch.c_dag);
            let anti = ch.cdc.dot(rho) + rho.dot(&ch.cdc);
            out = out + (jump - anti * C64::from(0.5)) * C64::from(ch.rate);
        }
        out
    }

    /// Dense matrix of the generator acting on row-major vectorized
    /// density matrices: vec(AρB) = (A ⊗ Bᵀ) vec(ρ).
    pub fn matrix(&self) -> CMat {
        let d = self.dim;
        let mut l = CMat::zeros((d * d, d * d));
        let minus_i = C64::new(0.0, -1.0);
        let plus_i = C64::new(0.0, 1.0);
        add_left(&mut l, minus_i, &self.h);
        add_right(&mut l, plus_i, &self.h);
        for ch in &self.channels {
            let rate = C64::from(ch.rate);
            add_sandwich(&mut l, rate, &ch.c);
            let half = C64::from(-0.5 * ch.rate);
            add_left(&mut l, half, &ch.cdc);
            add_right(&mut l, half, &ch.cdc);
        }
        l
    }
}

fn nonzeros(m: &CMat) -> Vec<(usize, usize, C64)> {
    let mut entries = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[[i, j]];
            if v != C64::new(0.0, 0.0) {
                entries.push((i, j, v));
            }
        }
    }
    entries
}

/// l += alpha (A ⊗ I): the map ρ ↦ Aρ.
fn add_left(l: &mut CMat, alpha: C64, a: &CMat) {
    let d = a.nrows();
    for (i, k, v) in nonzeros(a) {
        let w = alpha * v;
        for j in 0..d {
            l[[i * d + j, k * d + j]] += w;
        }
    }
}

/// l += alpha (I ⊗ Bᵀ): the map ρ ↦ ρB.
fn add_right(l: &mut CMat, alpha: C64, b: &CMat) {
    let d = b.nrows();
    for (k, j, v) in nonzeros(b) {
        let w = alpha * v;
        for i in 0..d {
            l[[i * d + j, i * d + k]] += w;
        }
    }
}

/// l += alpha (C ⊗ conj(C)): the map ρ ↦ CρC†.
fn add_sandwich(l: &mut CMat, alpha: C64, c: &CMat) {
    let d = c.nrows();
    let entries = nonzeros(c);
    for &(i, k, v1) in &entries {
        for &(j, m, v2) in &entries {
            l[[i * d + j, k * d + m]] += alpha * v1 * v2.conj();
        }
    }
}

/// Convenience form of the right-hand side for a wrapped state.
pub fn lindblad_rhs(
    p: &SystemParams,
    env: Option<&ThermalEnv>,
    ops: &OperatorSet,
    state: &QuantumState,
) -> CMat {
    MasterOperator::new(p, env, ops).apply(state.rho())
}

/// Dense vectorized generator for the given parameters.
pub fn liouvillian_matrix(p: &SystemParams, env: Option<&ThermalEnv>, ops: &OperatorSet) -> CMat {
    MasterOperator::new(p, env, ops).matrix()
}
