use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// `2^N` complex amplitudes; basis index bit `i` is site `i`, 0 = spin up.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    pub n_sites: usize,
    pub amplitudes: Vec<C64>,
}

impl QuantumState {
    pub fn new(n_sites: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_sites {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes for N = {n_sites}, got {}",
                1usize << n_sites,
                amplitudes.len()
            )));
        }
        Ok(Self { n_sites, amplitudes })
    }

    pub fn from_real(n_sites: usize, v: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(n_sites, v.into_iter().map(|x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(n_sites: usize, index: usize) -> Self {
        let mut a = vec![C64::new(0.0, 0.0); 1 << n_sites];
        a[index] = C64::new(1.0, 0.0);
        Self { n_sites, amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { n_sites: self.n_sites, amplitudes: self.amplitudes.iter().map(|a| a / n).collect() }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &[C64]) -> C64 {
        self.amplitudes.iter().zip(other).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Renders a basis index with site 0 leftmost; `0` = up, `1` = down.
pub fn bitstring(index: usize, n_sites: usize) -> String {
    (0..n_sites).map(|i| if (index >> i) & 1 == 0 { '0' } else { '1' }).collect()
}

pub fn parse_bitstring(s: &str) -> Result<usize> {
    s.chars().enumerate().try_fold(0usize, |acc, (i, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | (1 << i)),
        _ => Err(Error::InvalidArgument(format!("bad bitstring `{s}`"))),
    })
}
