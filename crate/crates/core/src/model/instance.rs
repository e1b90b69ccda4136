use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::rng::{RngSpec, Stream};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    FullyConnected,
    Chain,
    Custom,
}

impl Topology {
    /// Whether the pair `i < j` may carry a coupling.
    pub fn permits(self, i: usize, j: usize) -> bool {
        match self {
            Topology::FullyConnected | Topology::Custom => i != j,
            Topology::Chain => i.abs_diff(j) == 1,
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fully-connected" => Ok(Topology::FullyConnected),
            "chain" => Ok(Topology::Chain),
            "custom" => Ok(Topology::Custom),
            other => Err(Error::UnknownTopology(other.to_string())),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::FullyConnected => "fully-connected",
            Topology::Chain => "chain",
            Topology::Custom => "custom",
        })
    }
}

/// How an instance was produced. Stored alongside the numbers so a file can be
/// regenerated from its own header.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum Provenance {
    Manual,
    Gaussian {
        sigma: f64,
        couplings_rng: RngSpec,
        fields_rng: RngSpec,
    },
    Staggered {
        h: f64,
    },
}

/// Transverse-field Ising problem: couplings `J_ij`, longitudinal fields `h_i`,
/// constant transverse field `gamma` and driver strength `gamma_d` (GHz).
///
/// The problem Hamiltonian counts each unordered pair once:
/// `H_P = -sum_{i<j} J_ij sz_i sz_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRecord", into = "InstanceRecord")]
pub struct ProblemInstance {
    n_sites: usize,
    couplings: Vec<f64>,
    fields: Vec<f64>,
    gamma: f64,
    gamma_d: f64,
    topology: Topology,
    provenance: Provenance,
}

/// On-disk layout; `couplings` is the dense row-major `N x N` matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct InstanceRecord {
    n_sites: usize,
    couplings: Vec<f64>,
    fields: Vec<f64>,
    gamma: f64,
    gamma_d: f64,
    topology: Topology,
    #[serde(default = "manual")]
    provenance: Provenance,
}

fn manual() -> Provenance {
    Provenance::Manual
}

impl TryFrom<InstanceRecord> for ProblemInstance {
    type Error = Error;

    fn try_from(r: InstanceRecord) -> Result<Self> {
        let mut inst =
            ProblemInstance::new(r.n_sites, r.couplings, r.fields, r.gamma, r.gamma_d, r.topology)?;
        inst.provenance = r.provenance;
        Ok(inst)
    }
}

impl From<ProblemInstance> for InstanceRecord {
    fn from(p: ProblemInstance) -> Self {
        InstanceRecord {
            n_sites: p.n_sites,
            couplings: p.couplings,
            fields: p.fields,
            gamma: p.gamma,
            gamma_d: p.gamma_d,
            topology: p.topology,
            provenance: p.provenance,
        }
    }
}

impl ProblemInstance {
    pub fn new(
        n_sites: usize,
        couplings: Vec<f64>,
        fields: Vec<f64>,
        gamma: f64,
        gamma_d: f64,
        topology: Topology,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidInstance(m));
        if n_sites == 0 {
            return bad("N must be positive".into());
        }
        if couplings.len() != n_sites * n_sites {
            return bad(format!("expected {} coupling entries, got {}", n_sites * n_sites, couplings.len()));
        }
        if fields.len() != n_sites {
            return bad(format!("expected {n_sites} fields, got {}", fields.len()));
        }
        if couplings.iter().chain(&fields).any(|x| !x.is_finite()) {
            return bad("couplings and fields must be finite".into());
        }
        if !(gamma >= 0.0) || !(gamma_d >= 0.0) {
            return bad("transverse strengths must be non-negative".into());
        }
        if gamma == 0.0 && gamma_d == 0.0 {
            return bad("gamma and gamma_d cannot both be zero".into());
        }
        for i in 0..n_sites {
            if couplings[i * n_sites + i] != 0.0 {
                return bad(format!("J[{i}][{i}] must be zero"));
            }
            for j in (i + 1)..n_sites {
                let (a, b) = (couplings[i * n_sites + j], couplings[j * n_sites + i]);
                if a.to_bits() != b.to_bits() {
                    return bad(format!("J is not symmetric at ({i}, {j}): {a} vs {b}"));
                }
                if a != 0.0 && !topology.permits(i, j) {
                    return bad(format!("J[{i}][{j}] = {a} is not allowed by topology {topology}"));
                }
            }
        }
        Ok(Self { n_sites, couplings, fields, gamma, gamma_d, topology, provenance: Provenance::Manual })
    }

    /// Builds an instance from the upper triangle given as `(i, j, J_ij)` triples.
    pub fn from_pairs(
        n_sites: usize,
        pairs: &[(usize, usize, f64)],
        fields: Vec<f64>,
        gamma: f64,
        gamma_d: f64,
        topology: Topology,
    ) -> Result<Self> {
        let mut j = vec![0.0; n_sites * n_sites];
        for &(a, b, v) in pairs {
            if a >= n_sites || b >= n_sites || a == b {
                return Err(Error::InvalidInstance(format!("bad pair ({a}, {b})")));
            }
            j[a * n_sites + b] = v;
            j[b * n_sites + a] = v;
        }
        Self::new(n_sites, j, fields, gamma, gamma_d, topology)
    }

    /// Uniform ferromagnet: `J_ij = j` on every pair, `h_i = h`.
    pub fn uniform_ferromagnet(n_sites: usize, j: f64, h: f64, gamma: f64, gamma_d: f64) -> Result<Self> {
        let mut c = vec![j; n_sites * n_sites];
        for i in 0..n_sites {
            c[i * n_sites + i] = 0.0;
        }
        Self::new(n_sites, c, vec![h; n_sites], gamma, gamma_d, Topology::FullyConnected)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i * self.n_sites + j]
    }

    /// Row `i` of the coupling matrix.
    pub fn coupling_row(&self, i: usize) -> &[f64] {
        &self.couplings[i * self.n_sites..(i + 1) * self.n_sites]
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gamma_d(&self) -> f64 {
        self.gamma_d
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Upper-triangle pairs with a nonzero coupling.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_sites;
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j, self.coupling(i, j))))
            .filter(|&(_, _, v)| v != 0.0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// SHA-256 of the compact JSON encoding, hex encoded.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("instance serialization is infallible");
        hex::encode(Sha256::digest(&json))
    }
}

/// Draws `J_ij ~ N(0, sigma^2)` once per pair allowed by `topology`, in
/// row-major upper-triangle order, and returns the symmetric dense matrix.
pub fn sample_gaussian_couplings(n: usize, sigma: f64, topology: Topology, rng: &RngSpec) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    if topology == Topology::Custom {
        return Err(Error::UnknownTopology("custom (no adjacency to sample)".into()));
    }
    let mut r = rng.rng(Stream::Couplings);
    let mut j = vec![0.0; n * n];
    for a in 0..n {
        for b in (a + 1)..n {
            if topology.permits(a, b) {
                let z: f64 = r.sample(StandardNormal);
                j[a * n + b] = sigma * z;
                j[b * n + a] = sigma * z;
            }
        }
    }
    Ok(j)
}

/// `h_i` i.i.d. uniform on `[0, 1)`.
pub fn sample_uniform_fields(n: usize, rng: &RngSpec) -> Vec<f64> {
    let mut r = rng.rng(Stream::Fields);
    (0..n).map(|_| r.gen::<f64>()).collect()
}

/// Gaussian spin-glass instance with uniform random fields.
pub fn gaussian_instance(
    n: usize,
    sigma: f64,
    topology: Topology,
    gamma: f64,
    gamma_d: f64,
    couplings_rng: RngSpec,
    fields_rng: RngSpec,
) -> Result<ProblemInstance> {
    let j = sample_gaussian_couplings(n, sigma, topology, &couplings_rng)?;
    let h = sample_uniform_fields(n, &fields_rng);
    Ok(ProblemInstance::new(n, j, h, gamma, gamma_d, topology)?
        .with_provenance(Provenance::Gaussian { sigma, couplings_rng, fields_rng }))
}

/// Fully connected antiferromagnet (`J_ij = -1`) with staggered fields:
/// `+h` on even sites (site 0 is even), `-h` on odd sites. `gamma = 0`,
/// `gamma_d = 1`.
pub fn staggered_instance(n: usize, h: f64) -> Result<ProblemInstance> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("staggered instance needs even N, got {n}")));
    }
    let mut j = vec![-1.0; n * n];
    for i in 0..n {
        j[i * n + i] = 0.0;
    }
    let fields = (0..n).map(|i| if i % 2 == 0 { h } else { -h }).collect();
    Ok(ProblemInstance::new(n, j, fields, 0.0, 1.0, Topology::FullyConnected)?
        .with_provenance(Provenance::Staggered { h }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fully_connected_draws_every_pair() {
        let j = sample_gaussian_couplings(8, 1.0, Topology::FullyConnected, &RngSpec::new(3)).unwrap();
        let nonzero = (0..8).flat_map(|a| ((a + 1)..8).map(move |b| (a, b))).filter(|&(a, b)| j[a * 8 + b] != 0.0).count();
        assert_eq!(nonzero, 28);
        for a in 0..8 {
            assert_eq!(j[a * 8 + a], 0.0);
            for b in 0..8 {
                assert_eq!(j[a * 8 + b].to_bits(), j[b * 8 + a].to_bits());
            }
        }
    }

    #[test]
    fn chain_has_n_minus_one_bonds() {
        let j = sample_gaussian_couplings(8, 1.0, Topology::Chain, &RngSpec::new(3)).unwrap();
        let mut count = 0;
        for a in 0..8 {
            for b in (a + 1)..8 {
                if j[a * 8 + b] != 0.0 {
                    count += 1;
                    assert_eq!(b, a + 1);
                }
            }
        }
        assert_eq!(count, 7);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_gaussian_couplings(2, 1.0, Topology::FullyConnected, &RngSpec::new(11)).unwrap();
        let b = sample_gaussian_couplings(2, 1.0, Topology::FullyConnected, &RngSpec::new(11)).unwrap();
        assert_eq!(a[1].to_bits(), b[1].to_bits());
        assert_eq!(sample_uniform_fields(8, &RngSpec::new(5)), sample_uniform_fields(8, &RngSpec::new(5)));
    }

    #[test]
    fn uniform_fields_in_unit_interval() {
        let h = sample_uniform_fields(8, &RngSpec::new(9));
        assert!(h.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let h1 = sample_uniform_fields(1, &RngSpec::new(9));
        assert_eq!(h1.len(), 1);
        assert!((0.0..=1.0).contains(&h1[0]));
    }

    #[test]
    fn unknown_topology_tag() {
        assert!(matches!("ring".parse::<Topology>(), Err(Error::UnknownTopology(_))));
        assert!(sample_gaussian_couplings(4, 1.0, Topology::Custom, &RngSpec::new(1)).is_err());
    }

    #[test]
    fn staggered_layout() {
        let inst = staggered_instance(8, 1.1).unwrap();
        assert_eq!(inst.fields(), &[1.1, -1.1, 1.1, -1.1, 1.1, -1.1, 1.1, -1.1]);
        assert_eq!(inst.gamma(), 0.0);
        assert_eq!(inst.gamma_d(), 1.0);
        let two = staggered_instance(2, 1.1).unwrap();
        assert_eq!(two.coupling(0, 1), -1.0);
        assert_eq!(two.fields(), &[1.1, -1.1]);
        assert!(staggered_instance(7, 1.1).is_err());
    }

    #[test]
    fn invariants_rejected() {
        let asym = vec![0.0, 1.0, 0.5, 0.0];
        assert!(ProblemInstance::new(2, asym, vec![0.0; 2], 0.1, 1.0, Topology::Custom).is_err());
        let diag = vec![1.0, 0.0, 0.0, 0.0];
        assert!(ProblemInstance::new(2, diag, vec![0.0; 2], 0.1, 1.0, Topology::Custom).is_err());
        assert!(ProblemInstance::new(1, vec![0.0], vec![0.0], 0.0, 0.0, Topology::Custom).is_err());
        let far = ProblemInstance::from_pairs(3, &[(0, 2, 1.0)], vec![0.0; 3], 0.1, 1.0, Topology::Chain);
        assert!(far.is_err());
    }

    #[test]
    fn json_round_trip_keeps_provenance() {
        let inst = gaussian_instance(4, 1.0, Topology::FullyConnected, 0.1, 1.0, RngSpec::new(1), RngSpec::new(2)).unwrap();
        let back = ProblemInstance::from_json(&inst.to_json().unwrap()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.content_hash(), inst.content_hash());
        let bad = r#"{"n_sites":2,"couplings":[0,1,2,0],"fields":[0,0],"gamma":0.1,"gamma_d":1,"topology":"custom"}"#;
        assert!(ProblemInstance::from_json(bad).is_err());
    }
}
