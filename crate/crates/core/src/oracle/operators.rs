//! Operator algebra of the truncated tripartite Hilbert space, built once
//! per run as Kronecker products over atom ⊗ cavity ⊗ mechanics.

use ndarray::linalg::kron;
use num_complex::Complex64 as C64;

use super::{CMat, Truncation};

/// All single-mode operators lifted to the full space. The position of the
/// mechanical element is x = ξ(b + b†); only the dimensionless b + b†
/// appears here since ξ is absorbed into χ.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub a: CMat,
    pub a_dag: CMat,
    pub b: CMat,
    pub b_dag: CMat,
    pub sigma_minus: CMat,
    pub sigma_plus: CMat,
    pub identity: CMat,
    /// a†a.
    pub n_cav: CMat,
    /// b†b.
    pub n_mech: CMat,
    /// σ₊σ₋ = |e⟩⟨e|.
    pub sigma_ee: CMat,
    trunc: Truncation,
}

fn annihilation(levels: usize) -> CMat {
    CMat::from_shape_fn((levels, levels), |(i, j)| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn dagger(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

impl OperatorSet {
    pub fn new(trunc: Truncation) -> Self {
        let eye_atom = CMat::eye(2);
        let eye_cav = CMat::eye(trunc.n_cav_max() + 1);
        let eye_mech = CMat::eye(trunc.n_mech_max() + 1);

        let a_local = annihilation(trunc.n_cav_max() + 1);
        let b_local = annihilation(trunc.n_mech_max() + 1);
        // |g⟩ = index 0, |e⟩ = index 1, so σ₋ = |g⟩⟨e| has the single
        // entry (0, 1).
        let mut sm_local = CMat::zeros((2, 2));
        sm_local[[0, 1]] = C64::new(1.0, 0.0);

        let a = kron(&kron(&eye_atom, &a_local), &eye_mech);
        let b = kron(&kron(&eye_atom, &eye_cav), &b_local);
        let sigma_minus = kron(&kron(&sm_local, &eye_cav), &eye_mech);
        let a_dag = dagger(&a);
        let b_dag = dagger(&b);
        let sigma_plus = dagger(&sigma_minus);
        let n_cav = a_dag.dot(&a);
        let n_mech = b_dag.dot(&b);
        let sigma_ee = sigma_plus.dot(&sigma_minus);

        Self {
            a,
            a_dag,
            b,
            b_dag,
            sigma_minus,
            sigma_plus,
            identity: CMat::eye(trunc.dim()),
            n_cav,
            n_mech,
            sigma_ee,
            trunc,
        }
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }
}

#[cfg(test)]
mod tests {
    use super::super::frobenius_norm;
    use super::*;

    fn ops() -> OperatorSet {
        OperatorSet::new(Truncation::new(2, 4).unwrap())
    }

    #[test]
    fn commutator_defect_lives_on_top_fock_level() {
        // [a, a†] = 1 everywhere except the top cavity level, where the
        // truncation leaves −(n_cav_max + 1) on the diagonal. (Entries are
        // sums of sqrt(n)², so allow roundoff.)
        let ops = ops();
        let trunc = ops.truncation();
        let comm = ops.a.dot(&ops.a_dag) - ops.a_dag.dot(&ops.a);
        let defect = &comm - &ops.identity;
        for atom in 0..2 {
            for cav in 0..=trunc.n_cav_max() {
                for mech in 0..=trunc.n_mech_max() {
                    let i = trunc.index(atom, cav, mech);
                    for j in 0..trunc.dim() {
                        let v = defect[[i, j]];
                        let expected = if cav == trunc.n_cav_max() && i == j {
                            C64::new(-(trunc.n_cav_max() as f64 + 1.0), 0.0)
                        } else {
                            C64::new(0.0, 0.0)
                        };
                        assert!((v - expected).norm() < 1e-13, "defect[{i},{j}] = {v}");
                    }
                }
            }
        }
        // Same structure for the mechanical mode.
        let comm_b = ops.b.dot(&ops.b_dag) - ops.b_dag.dot(&ops.b);
        let defect_b = &comm_b - &ops.identity;
        for atom in 0..2 {
            for cav in 0..=trunc.n_cav_max() {
                for mech in 0..trunc.n_mech_max() {
                    let i = trunc.index(atom, cav, mech);
                    assert!(defect_b[[i, i]].norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn two_level_completeness_is_exact() {
        let ops = ops();
        let sum = ops.sigma_minus.dot(&ops.sigma_plus) + ops.sigma_plus.dot(&ops.sigma_minus);
        assert_eq!(frobenius_norm(&(&sum - &ops.identity)), 0.0);
    }

    #[test]
    fn number_operators_count() {
        let ops = ops();
        let trunc = ops.truncation();
        for atom in 0..2 {
            for cav in 0..=trunc.n_cav_max() {
                for mech in 0..=trunc.n_mech_max() {
                    let i = trunc.index(atom, cav, mech);
                    assert!((ops.n_cav[[i, i]] - cav as f64).norm() < 1e-13);
                    assert!((ops.n_mech[[i, i]] - mech as f64).norm() < 1e-13);
                    assert_eq!(ops.sigma_ee[[i, i]], C64::new(atom as f64, 0.0));
                }
            }
        }
    }
}
