//! Mean-field effective fields and the counter-diabatic `B_y`.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};
use crate::model::{ProblemInstance, Schedule};

/// Guard on `bx^2 + bz^2` below which `B_y` is undefined.
pub const DENOMINATOR_EPS: f64 = 1e-12;

/// Largest accepted 1-norm condition estimate of the derivative system.
pub const MAX_CONDITION: f64 = 1e12;

/// Per-site effective field at one instant.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EffectiveField {
    pub bx: Vec<f64>,
    pub by: Vec<f64>,
    pub bz: Vec<f64>,
    pub bx_dot: Vec<f64>,
    pub bz_dot: Vec<f64>,
}

/// Knobs for [`field_at`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldOptions {
    /// Include the MFCD field `B_y`; when false `B_y = 0`.
    pub cd: bool,
    /// Flips the sign of the coupling feedback term in the derivative
    /// system. Only useful to show that the finite-difference check catches
    /// a wrong derivation.
    pub corrupt_feedback_sign: bool,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self { cd: true, corrupt_feedback_sign: false }
    }
}

/// `(bx, bz)` per site:
/// `bz_i = f sum_{j != i} J_ij m_z,j + g h_i`, `bx_i = (1 - f) gamma_d + gamma`.
pub fn effective_field(inst: &ProblemInstance, sch: &Schedule, m: &[Vector3<f64>], t: f64) -> (Vec<f64>, Vec<f64>) {
    let s = sch.at(t);
    let bx = (1.0 - s.f) * inst.gamma_d() + inst.gamma();
    let h = inst.fields();
    let bz = (0..inst.n_sites())
        .map(|i| s.f * coupled_sum(inst.coupling_row(i), m, |v| v.z) + s.g * h[i])
        .collect();
    (vec![bx; inst.n_sites()], bz)
}

#[inline]
fn coupled_sum(row: &[f64], m: &[Vector3<f64>], pick: impl Fn(&Vector3<f64>) -> f64) -> f64 {
    row.iter().zip(m).filter(|(j, _)| **j != 0.0).map(|(j, v)| j * pick(v)).sum()
}

/// `B_y = (bz_dot bx - bx_dot bz) / (2 (bx^2 + bz^2))`.
pub fn cd_field(bx: f64, bz: f64, bx_dot: f64, bz_dot: f64) -> Result<f64> {
    let d = bx * bx + bz * bz;
    if !(d > DENOMINATOR_EPS) {
        return Err(Error::VanishingDenominator { t: f64::NAN, site: 0, value: d });
    }
    Ok(0.5 * (bz_dot * bx - bx_dot * bz) / d)
}

/// `(bx_dot, bz_dot)` per site with the MFCD field switched on.
///
/// `bz_dot` depends on every neighbour's `dm_z/dt`, which in turn depends on
/// that neighbour's `B_y` and therefore on its own `bz_dot`. Writing
/// `D_j = bx_j^2 + bz_j^2`, the unknowns `v = bz_dot` satisfy
///
/// ```text
/// v_i - f sum_j J_ij (m_x,j bx_j / D_j) v_j
///     = f_dot sum_j J_ij m_z,j + g_dot h_i
///       - f sum_j J_ij (m_x,j bz_j / D_j) bx_dot_j
///       - 2 f sum_j J_ij m_y,j bx_j
/// ```
///
/// which is solved by LU with partial pivoting.
pub fn solve_field_derivatives(
    inst: &ProblemInstance,
    sch: &Schedule,
    m: &[Vector3<f64>],
    t: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = field_at(inst, sch, m, t, FieldOptions::default())?;
    Ok((f.bx_dot, f.bz_dot))
}

/// Full effective field, including derivatives and (optionally) `B_y`.
pub fn field_at(
    inst: &ProblemInstance,
    sch: &Schedule,
    m: &[Vector3<f64>],
    t: f64,
    opts: FieldOptions,
) -> Result<EffectiveField> {
    let n = inst.n_sites();
    let s = sch.at(t);
    let (bx, bz) = effective_field(inst, sch, m, t);
    let bx_dot = vec![-s.f_dot * inst.gamma_d(); n];
    let h = inst.fields();

    let bz_dot = if opts.cd {
        let mut den = vec![0.0; n];
        for j in 0..n {
            den[j] = bx[j] * bx[j] + bz[j] * bz[j];
            if !(den[j] > DENOMINATOR_EPS) {
                return Err(Error::VanishingDenominator { t, site: j, value: den[j] });
            }
        }
        let feedback = if opts.corrupt_feedback_sign { -1.0 } else { 1.0 };
        let mut rhs = DVector::zeros(n);
        let mut mat = DMatrix::identity(n, n);
        let mut coupled = false;
        for i in 0..n {
            let mut r = s.g_dot * h[i];
            for (j, &jij) in inst.coupling_row(i).iter().enumerate() {
                if jij == 0.0 {
                    continue;
                }
                let mj = &m[j];
                r += s.f_dot * jij * mj.z
                    - s.f * jij * (mj.x * bz[j] / den[j]) * bx_dot[j]
                    - 2.0 * s.f * jij * mj.y * bx[j];
                let w = s.f * jij * mj.x * bx[j] / den[j];
                if w != 0.0 {
                    mat[(i, j)] = -feedback * w;
                    coupled = true;
                }
            }
            rhs[i] = r;
        }
        if coupled {
            solve_dense(mat, rhs, t)?
        } else {
            rhs.iter().copied().collect()
        }
    } else {
        // Without B_y, dm_z/dt = -2 m_y bx is explicit.
        (0..n)
            .map(|i| {
                let row = inst.coupling_row(i);
                s.f_dot * coupled_sum(row, m, |v| v.z)
                    + s.g_dot * h[i]
                    + s.f * row.iter().zip(m).zip(&bx).map(|((j, v), b)| j * (-2.0 * v.y * b)).sum::<f64>()
            })
            .collect()
    };

    let by = if opts.cd {
        (0..n)
            .map(|i| {
                cd_field(bx[i], bz[i], bx_dot[i], bz_dot[i]).map_err(|e| match e {
                    Error::VanishingDenominator { value, .. } => Error::VanishingDenominator { t, site: i, value },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![0.0; n]
    };

    Ok(EffectiveField { bx, by, bz, bx_dot, bz_dot })
}

fn solve_dense(mat: DMatrix<f64>, rhs: DVector<f64>, t: f64) -> Result<Vec<f64>> {
    let norm1 = one_norm(&mat);
    let lu = mat.lu();
    let inv = lu.try_inverse().ok_or(Error::IllConditioned { t, condition: f64::INFINITY })?;
    let condition = norm1 * one_norm(&inv);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { t, condition });
    }
    let x = lu.solve(&rhs).ok_or(Error::IllConditioned { t, condition: f64::INFINITY })?;
    Ok(x.iter().copied().collect())
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_trig_schedule, staggered_instance, ProblemInstance, Topology};

    fn along_x(n: usize) -> Vec<Vector3<f64>> {
        vec![Vector3::new(1.0, 0.0, 0.0); n]
    }

    #[test]
    fn single_free_spin_at_start() {
        let inst = ProblemInstance::new(1, vec![0.0], vec![0.0], 0.0, 1.0, Topology::Custom).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let (bx, bz) = effective_field(&inst, &sch, &along_x(1), 0.0);
        assert_eq!((bx[0], bz[0]), (1.0, 0.0));
    }

    #[test]
    fn two_site_substitution() {
        // f = g = 0.5 needs a tabulated schedule.
        use crate::model::{ScheduleFamily, Tabulated};
        let tab = Tabulated { t: vec![0.0, 1.0], f: vec![0.5, 0.5], g: vec![0.5, 0.5] };
        let sch = Schedule::new(1.0, 0.0, ScheduleFamily::Tabulated(tab)).unwrap();
        let inst = ProblemInstance::from_pairs(2, &[(0, 1, 0.5)], vec![0.1, 0.3], 0.1, 1.0, Topology::Custom).unwrap();
        let m = vec![Vector3::new(0.0, 0.0, 0.2), Vector3::new(0.0, 0.0, -0.4)];
        let (bx, bz) = effective_field(&inst, &sch, &m, 0.3);
        assert!((bz[0] - (-0.05)).abs() < 1e-15);
        assert!((bx[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn transverse_at_end_is_gamma() {
        let inst = ProblemInstance::uniform_ferromagnet(3, 1.0, 0.5, 0.1, 1.0).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let (bx, _) = effective_field(&inst, &sch, &along_x(3), 1.0);
        assert!(bx.iter().all(|&b| (b - 0.1).abs() < 1e-15));
    }

    #[test]
    fn cd_field_cases() {
        assert_eq!(cd_field(0.7, -0.3, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(cd_field(1.0, 0.0, 0.0, 2.0).unwrap(), 1.0);
        assert!(cd_field(0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn single_site_needs_no_solve() {
        let inst = ProblemInstance::new(1, vec![0.0], vec![0.7], 0.1, 1.0, Topology::Custom).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let (_, bz_dot) = solve_field_derivatives(&inst, &sch, &along_x(1), 0.3).unwrap();
        assert!((bz_dot[0] - sch.at(0.3).g_dot * 0.7).abs() < 1e-15);
    }

    #[test]
    fn derivatives_vanish_at_start() {
        let inst = staggered_instance(4, 1.1).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let f = field_at(&inst, &sch, &along_x(4), 0.0, FieldOptions::default()).unwrap();
        assert!(f.bz_dot.iter().all(|&v| v == 0.0));
        assert!(f.by.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn vanishing_denominator_names_time() {
        // gamma = 0 and zero fields at t = T: bx = 0, bz = 0.
        let inst = ProblemInstance::new(1, vec![0.0], vec![0.0], 0.0, 1.0, Topology::Custom).unwrap();
        let sch = make_trig_schedule(1.0, 0.0).unwrap();
        let err = field_at(&inst, &sch, &along_x(1), 1.0, FieldOptions::default()).unwrap_err();
        assert!(matches!(err, Error::VanishingDenominator { t, .. } if t == 1.0));
    }

    #[test]
    fn solve_satisfies_linear_system() {
        // Residual of the stated system, evaluated independently of the solver.
        let inst = crate::model::gaussian_instance(
            5,
            1.0,
            Topology::FullyConnected,
            0.1,
            1.0,
            crate::model::RngSpec::new(4),
            crate::model::RngSpec::new(5),
        )
        .unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let m: Vec<_> = (0..5)
            .map(|i| {
                let a = 0.3 * i as f64 + 0.2;
                Vector3::new(a.cos() * 0.99, 0.05 * (i as f64 - 2.0), a.sin()).normalize()
            })
            .collect();
        let t = 0.41;
        let s = sch.at(t);
        let f = field_at(&inst, &sch, &m, t, FieldOptions::default()).unwrap();
        for i in 0..5 {
            let mut lhs = f.bz_dot[i];
            let mut rhs = s.g_dot * inst.fields()[i];
            for j in 0..5 {
                let jij = inst.coupling(i, j);
                let d = f.bx[j].powi(2) + f.bz[j].powi(2);
                lhs -= s.f * jij * m[j].x * f.bx[j] / d * f.bz_dot[j];
                rhs += s.f_dot * jij * m[j].z - s.f * jij * m[j].x * f.bz[j] / d * f.bx_dot[j]
                    - 2.0 * s.f * jij * m[j].y * f.bx[j];
            }
            assert!((lhs - rhs).abs() < 1e-12, "site {i}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn bz_dot_consistent_with_bloch_rate() {
        // bz_dot must equal d/dt of bz with dm_z/dt = 2 (m_x B_y - m_y B_x).
        let inst = crate::model::gaussian_instance(
            6,
            1.0,
            Topology::FullyConnected,
            0.1,
            1.0,
            crate::model::RngSpec::new(8),
            crate::model::RngSpec::new(9),
        )
        .unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let m: Vec<_> = (0..6)
            .map(|i| Vector3::new(1.0, 0.03 * i as f64 - 0.07, 0.4 - 0.15 * i as f64).normalize())
            .collect();
        for &cd in &[true, false] {
            let t = 0.63;
            let s = sch.at(t);
            let opts = FieldOptions { cd, ..Default::default() };
            let f = field_at(&inst, &sch, &m, t, opts).unwrap();
            for i in 0..6 {
                let mut expect = s.g_dot * inst.fields()[i];
                for j in 0..6 {
                    let mz_dot = 2.0 * (m[j].x * f.by[j] - m[j].y * f.bx[j]);
                    expect += inst.coupling(i, j) * (s.f_dot * m[j].z + s.f * mz_dot);
                }
                assert!((f.bz_dot[i] - expect).abs() < 1e-12, "cd={cd} site {i}");
            }
        }
    }

    #[test]
    fn corrupted_feedback_changes_solution() {
        let inst = ProblemInstance::uniform_ferromagnet(3, 1.0, 0.5, 0.1, 1.0).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let m = vec![Vector3::new(0.9, 0.0, 0.436).normalize(); 3];
        let good = field_at(&inst, &sch, &m, 0.5, FieldOptions::default()).unwrap();
        let bad = field_at(&inst, &sch, &m, 0.5, FieldOptions { cd: true, corrupt_feedback_sign: true }).unwrap();
        assert!((good.bz_dot[0] - bad.bz_dot[0]).abs() > 1e-3);
    }
}
