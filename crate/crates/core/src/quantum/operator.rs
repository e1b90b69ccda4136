//! Spin operators on the `2^N` computational basis.
//!
//! Basis index `b` stores site `i` in bit `i`; bit value 0 is spin up
//! (`sigma_z = +1`).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{ProblemInstance, Schedule};

/// Memory guard for state-vector work.
pub const MAX_SITES: usize = 14;

/// Exact CD needs a full spectral decomposition; keep it small.
pub const MAX_EXACT_CD_SITES: usize = 6;

/// Energy splitting below which a level pair counts as degenerate in the
/// exact CD sum.
pub const DEGENERACY_CUTOFF: f64 = 1e-9;

#[inline]
pub fn spin_z(b: usize, site: usize) -> f64 {
    if (b >> site) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn check_size(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { what, n, limit });
    }
    Ok(())
}

/// Anything that acts linearly on a state vector.
pub trait Operator {
    fn dim(&self) -> usize;

    /// `out = O psi`.
    fn apply(&self, psi: &[C64], out: &mut [C64]);

    fn to_dense(&self) -> DMatrix<C64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        let mut e = vec![C64::new(0.0, 0.0); d];
        let mut col = vec![C64::new(0.0, 0.0); d];
        for c in 0..d {
            e[c] = C64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            for r in 0..d {
                m[(r, c)] = col[r];
            }
            e[c] = C64::new(0.0, 0.0);
        }
        m
    }
}

/// `sum_b diag[b] |b><b| + sum_i (x_i sigma_x^i + y_i sigma_y^i)`.
///
/// Hermitian for any real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    pub n_sites: usize,
    pub diag: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl LocalOperator {
    pub fn zeros(n_sites: usize) -> Self {
        Self { n_sites, diag: vec![0.0; 1 << n_sites], x: vec![0.0; n_sites], y: vec![0.0; n_sites] }
    }

    pub fn is_real(&self) -> bool {
        self.y.iter().all(|&v| v == 0.0)
    }

    pub fn add_assign(&mut self, other: &LocalOperator) {
        assert_eq!(self.n_sites, other.n_sites);
        self.diag.iter_mut().zip(&other.diag).for_each(|(a, b)| *a += b);
        self.x.iter_mut().zip(&other.x).for_each(|(a, b)| *a += b);
        self.y.iter_mut().zip(&other.y).for_each(|(a, b)| *a += b);
    }

    /// Dense real matrix; panics if any `sigma_y` coefficient is nonzero.
    pub fn to_dense_real(&self) -> DMatrix<f64> {
        assert!(self.is_real(), "operator has sigma_y terms");
        let d = self.diag.len();
        let mut m = DMatrix::zeros(d, d);
        for b in 0..d {
            m[(b, b)] = self.diag[b];
            for (i, &c) in self.x.iter().enumerate() {
                if c != 0.0 {
                    m[(b ^ (1 << i), b)] += c;
                }
            }
        }
        m
    }
}

impl Operator for LocalOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, psi: &[C64], out: &mut [C64]) {
        apply_local(&self.diag, &self.x, &self.y, psi, out);
    }
}

/// Shared kernel: `out[b] = diag[b] psi[b] + sum_i x_i psi[b^i] + y_i (sigma_y psi)[b]`.
#[inline]
pub(crate) fn apply_local(diag: &[f64], x: &[f64], y: &[f64], psi: &[C64], out: &mut [C64]) {
    for (b, o) in out.iter_mut().enumerate() {
        let mut acc = psi[b] * diag[b];
        for i in 0..x.len() {
            let p = psi[b ^ (1 << i)];
            let (cx, cy) = (x[i], y[i]);
            if cx != 0.0 {
                acc += p * cx;
            }
            if cy != 0.0 {
                // sigma_y|up> = i|down>, sigma_y|down> = -i|up>
                let s = if (b >> i) & 1 == 0 { -cy } else { cy };
                acc += C64::new(-p.im * s, p.re * s);
            }
        }
        *o = acc;
    }
}

/// Dense operator, used for the non-local exact CD term.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator(pub DMatrix<C64>);

impl Operator for DenseOperator {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, psi: &[C64], out: &mut [C64]) {
        let m = &self.0;
        for (r, o) in out.iter_mut().enumerate() {
            *o = m.row(r).iter().zip(psi).map(|(a, b)| a * b).sum();
        }
    }

    fn to_dense(&self) -> DMatrix<C64> {
        self.0.clone()
    }
}

/// Per-basis-state Ising sums, independent of time.
#[derive(Clone, Debug)]
pub struct IsingTables {
    pub n_sites: usize,
    /// `sum_{i<j} J_ij z_i z_j`.
    pub zz: Vec<f64>,
    /// `sum_i h_i z_i`.
    pub hz: Vec<f64>,
}

impl IsingTables {
    pub fn new(inst: &ProblemInstance) -> Result<Self> {
        let n = inst.n_sites();
        check_size("state-vector simulation", n, MAX_SITES)?;
        let pairs: Vec<_> = inst.pairs().collect();
        let h = inst.fields();
        let dim = 1usize << n;
        let mut zz = vec![0.0; dim];
        let mut hz = vec![0.0; dim];
        for b in 0..dim {
            zz[b] = pairs.iter().map(|&(i, j, v)| v * spin_z(b, i) * spin_z(b, j)).sum();
            hz[b] = h.iter().enumerate().map(|(i, &v)| v * spin_z(b, i)).sum();
        }
        Ok(Self { n_sites: n, zz, hz })
    }

    /// `H(t)` given `f`, `g` and the total transverse coefficient.
    pub fn hamiltonian(&self, f: f64, g: f64, transverse: f64) -> LocalOperator {
        LocalOperator {
            n_sites: self.n_sites,
            diag: self.zz.iter().zip(&self.hz).map(|(zz, hz)| -f * zz - g * hz).collect(),
            x: vec![-transverse; self.n_sites],
            y: vec![0.0; self.n_sites],
        }
    }
}

/// Total transverse coefficient `(1 - f) gamma_d + gamma`.
#[inline]
pub fn transverse(inst: &ProblemInstance, f: f64) -> f64 {
    (1.0 - f) * inst.gamma_d() + inst.gamma()
}

/// `H(t) = -f sum_{i<j} J_ij zz - [(1-f) gamma_d + gamma] sum sigma_x - g sum h_i sigma_z`.
pub fn build_hamiltonian(inst: &ProblemInstance, sch: &Schedule, t: f64) -> Result<LocalOperator> {
    let tables = IsingTables::new(inst)?;
    let s = sch.at(t);
    Ok(tables.hamiltonian(s.f, s.g, transverse(inst, s.f)))
}

/// `dH/dt` with the schedule derivatives applied term by term.
pub fn hamiltonian_derivative(tables: &IsingTables, inst: &ProblemInstance, sch: &Schedule, t: f64) -> LocalOperator {
    let s = sch.at(t);
    LocalOperator {
        n_sites: tables.n_sites,
        diag: tables.zz.iter().zip(&tables.hz).map(|(zz, hz)| -s.f_dot * zz - s.g_dot * hz).collect(),
        x: vec![s.f_dot * inst.gamma_d(); tables.n_sites],
        y: vec![0.0; tables.n_sites],
    }
}

/// Mean-field CD term `-sum_i by_i sigma_y^i`.
pub fn build_cd_operator(by: &[f64]) -> LocalOperator {
    let n = by.len();
    LocalOperator { n_sites: n, diag: vec![0.0; 1 << n], x: vec![0.0; n], y: by.iter().map(|b| -b).collect() }
}

/// Exact counter-diabatic operator
/// `i sum_{n != m} <n|dH/dt|m> / (E_m - E_n) |n><m|`
/// from a full eigendecomposition of `H(t)`. Pairs closer than
/// [`DEGENERACY_CUTOFF`] in energy are skipped.
pub fn exact_cd_operator(inst: &ProblemInstance, sch: &Schedule, t: f64) -> Result<DenseOperator> {
    check_size("exact CD", inst.n_sites(), MAX_EXACT_CD_SITES)?;
    let tables = IsingTables::new(inst)?;
    Ok(exact_cd_from_tables(&tables, inst, sch, t))
}

pub(crate) fn exact_cd_from_tables(tables: &IsingTables, inst: &ProblemInstance, sch: &Schedule, t: f64) -> DenseOperator {
    let s = sch.at(t);
    let h = tables.hamiltonian(s.f, s.g, transverse(inst, s.f)).to_dense_real();
    let dh = hamiltonian_derivative(tables, inst, sch, t).to_dense_real();
    let eig = SymmetricEigen::new(h);
    let v = &eig.eigenvectors;
    let e = &eig.eigenvalues;
    // Matrix elements in the eigenbasis.
    let dh_eig = v.transpose() * dh * v;
    let d = e.len();
    let mut coef = DMatrix::<f64>::zeros(d, d);
    for n in 0..d {
        for m in 0..d {
            let gap = e[m] - e[n];
            if n != m && gap.abs() >= DEGENERACY_CUTOFF {
                coef[(n, m)] = dh_eig[(n, m)] / gap;
            }
        }
    }
    // H_cd = i V coef V^T; coef is antisymmetric so H_cd is Hermitian.
    let real = v * coef * v.transpose();
    let mut out = real.map(|x| C64::new(0.0, x));
    // Enforce exact Hermiticity against rounding.
    for r in 0..d {
        out[(r, r)] = C64::new(0.0, 0.0);
        for c in (r + 1)..d {
            let a = 0.5 * (out[(r, c)] + out[(c, r)].conj());
            out[(r, c)] = a;
            out[(c, r)] = a.conj();
        }
    }
    DenseOperator(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_trig_schedule, ProblemInstance, Topology};

    fn sup_norm(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn assert_hermitian(m: &DMatrix<C64>) {
        assert_eq!(m, &m.adjoint());
    }

    #[test]
    fn single_spin_eigenvalues() {
        let inst = ProblemInstance::new(1, vec![0.0], vec![0.0], 0.1, 1.0, Topology::Custom).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let h = build_hamiltonian(&inst, &sch, 0.3).unwrap();
        let c = (1.0 - sch.f(0.3)) + 0.1;
        let eig = SymmetricEigen::new(h.to_dense_real());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + c).abs() < 1e-14 && (ev[1] - c).abs() < 1e-14);
    }

    #[test]
    fn two_spin_ferromagnet_end_spectrum() {
        let inst = ProblemInstance::from_pairs(2, &[(0, 1, 1.0)], vec![0.0; 2], 0.0, 1.0, Topology::Custom).unwrap();
        let sch = make_trig_schedule(1.0, 0.0).unwrap();
        let h = build_hamiltonian(&inst, &sch, 1.0).unwrap().to_dense_real();
        // aligned states |00>, |11> at -1; anti-aligned at +1
        let want = [-1.0, 1.0, 1.0, -1.0];
        for b in 0..4 {
            assert!((h[(b, b)] - want[b]).abs() < 1e-15);
            for c in 0..4 {
                if b != c {
                    assert!(h[(b, c)].abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn sigma_y_action() {
        let op = build_cd_operator(&[0.3]);
        let dense = op.to_dense();
        // -0.3 sigma_y = [[0, 0.3 i], [-0.3 i, 0]]
        assert_eq!(dense[(0, 1)], C64::new(0.0, 0.3));
        assert_eq!(dense[(1, 0)], C64::new(0.0, -0.3));
        assert_hermitian(&dense);
        let zero = build_cd_operator(&[0.0, 0.0]).to_dense();
        assert!(zero.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn random_local_operators_are_hermitian() {
        let op = LocalOperator {
            n_sites: 3,
            diag: (0..8).map(|b| (b as f64 * 0.7).sin()).collect(),
            x: vec![0.3, -1.2, 0.5],
            y: vec![-0.4, 0.9, 0.05],
        };
        assert_hermitian(&op.to_dense());
    }

    #[test]
    fn exact_cd_vanishes_for_static_schedule() {
        use crate::model::{Schedule, ScheduleFamily, Tabulated};
        let tab = Tabulated { t: vec![0.0, 1.0], f: vec![0.4, 0.4], g: vec![0.2, 0.2] };
        let sch = Schedule::new(1.0, 0.0, ScheduleFamily::Tabulated(tab)).unwrap();
        let inst = ProblemInstance::uniform_ferromagnet(3, 1.0, 0.5, 0.1, 1.0).unwrap();
        let cd = exact_cd_operator(&inst, &sch, 0.5).unwrap();
        assert!(cd.0.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn exact_cd_single_spin_matches_mean_field_formula() {
        let inst = ProblemInstance::new(1, vec![0.0], vec![0.5], 0.0, 1.0, Topology::Custom).unwrap();
        let sch = make_trig_schedule(0.1, 1e-3).unwrap();
        for k in 1..100 {
            let t = 0.1 * k as f64 / 100.0;
            let s = sch.at(t);
            let (bx, bz) = (1.0 - s.f, s.g * 0.5);
            let by = 0.5 * (s.g_dot * 0.5 * bx - (-s.f_dot) * bz) / (bx * bx + bz * bz);
            let exact = exact_cd_operator(&inst, &sch, t).unwrap();
            let mf = build_cd_operator(&[by]).to_dense();
            let err = sup_norm(&exact.0, &mf);
            assert!(err <= 1e-10 * (1.0 + by.abs()), "t={t}: {err}");
            assert_hermitian(&exact.0);
        }
    }

    #[test]
    fn size_guards() {
        let inst = ProblemInstance::uniform_ferromagnet(7, 1.0, 0.5, 0.1, 1.0).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        assert!(matches!(exact_cd_operator(&inst, &sch, 0.5), Err(Error::TooLarge { .. })));
        let big = ProblemInstance::uniform_ferromagnet(15, 1.0, 0.5, 0.1, 1.0).unwrap();
        assert!(build_hamiltonian(&big, &sch, 0.5).is_err());
    }
}
