//! Reproducible i.i.d. exp(1) weight fields.
//!
//! Every weight is a pure function of `(seed.base, seed.replicate, i, j)`
//! computed by a counter-based hash, so a field never has to be stored to be
//! swept. The materialized mode caches the same values in a flat array.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub base: u64,
    pub replicate: u64,
}

impl Seed {
    pub const fn new(base: u64, replicate: u64) -> Self {
        Self { base, replicate }
    }

    /// Seed of replicate `r` in the same family.
    pub fn with_replicate(self, replicate: u64) -> Self {
        Self { replicate, ..self }
    }

    /// Same replicate in an independent family tagged by `stream`.
    pub fn derive(self, stream: u64) -> Self {
        Self {
            base: mix64(self.base ^ mix64(stream ^ 0xa409_3822_299f_31d0)),
            replicate: self.replicate,
        }
    }
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based 64-bit generator: a keyed hash of a 64-bit counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: Seed) -> Self {
        let key = mix64(seed.base ^ 0x243f_6a88_85a3_08d3)
            ^ mix64(seed.replicate.wrapping_add(0x1319_8a2e_0370_7344));
        Self { key: mix64(key) }
    }

    /// Derived generator for an independent stream (e.g. Poisson sampling).
    pub fn derive(&self, stream: u64) -> Self {
        Self {
            key: mix64(self.key ^ mix64(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))),
        }
    }

    #[inline]
    pub fn u64_at(&self, counter: u64) -> u64 {
        mix64(mix64(counter ^ self.key).wrapping_add(self.key))
    }

    /// Uniform draw on the midpoints of a 2^-53 grid: strictly inside (0, 1),
    /// so weights are never exactly zero.
    #[inline]
    pub fn uniform_at(&self, counter: u64) -> f64 {
        ((self.u64_at(counter) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Inverse CDF of exp(1): `-ln(1 - u)`.
pub fn exp_inverse_cdf(u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Domain(u));
    }
    Ok(exp_inverse_cdf_unchecked(u))
}

#[inline]
fn exp_inverse_cdf_unchecked(u: f64) -> f64 {
    -(-u).ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StorageMode {
    Materialized,
    OnDemand,
}

#[derive(Debug, Clone)]
pub struct WeightField {
    bx: LatticeBox,
    seed: Option<Seed>,
    rng: CounterRng,
    data: Option<Vec<f64>>,
}

impl WeightField {
    pub fn new(side: u32, seed: Seed, mode: StorageMode) -> Result<Self> {
        if side < 2 {
            return Err(Error::Invalid(format!("box side {side} < 2")));
        }
        let mut field = Self {
            bx: LatticeBox::new(side),
            seed: Some(seed),
            rng: CounterRng::new(seed),
            data: None,
        };
        if mode == StorageMode::Materialized {
            let data = field.bx.iter().map(|v| field.generate(v)).collect();
            field.data = Some(data);
        }
        Ok(field)
    }

    pub fn on_demand(side: u32, seed: Seed) -> Result<Self> {
        Self::new(side, seed, StorageMode::OnDemand)
    }

    /// Field with explicitly given weights in row-major order (`j * side + i`).
    pub fn from_weights(side: u32, weights: Vec<f64>) -> Result<Self> {
        if side < 2 || weights.len() != side as usize * side as usize {
            return Err(Error::Invalid(format!(
                "{} weights do not fill a box of side {side}",
                weights.len()
            )));
        }
        Ok(Self {
            bx: LatticeBox::new(side),
            seed: None,
            rng: CounterRng::new(Seed::new(0, 0)),
            data: Some(weights),
        })
    }

    pub fn side(&self) -> u32 {
        self.bx.side
    }

    pub fn lattice(&self) -> LatticeBox {
        self.bx
    }

    pub fn seed(&self) -> Option<Seed> {
        self.seed
    }

    pub fn mode(&self) -> StorageMode {
        if self.data.is_some() {
            StorageMode::Materialized
        } else {
            StorageMode::OnDemand
        }
    }

    #[inline]
    fn generate(&self, v: Vertex) -> f64 {
        let counter = ((v.j as u64) << 32) | v.i as u64;
        exp_inverse_cdf_unchecked(self.rng.uniform_at(counter))
    }

    pub fn weight(&self, v: Vertex) -> Result<f64> {
        if !self.bx.contains(v) {
            return Err(Error::OutOfBox { vertex: v, side: self.bx.side });
        }
        Ok(self.weight_unchecked(v))
    }

    #[inline]
    pub(crate) fn weight_unchecked(&self, v: Vertex) -> f64 {
        match &self.data {
            Some(d) => d[self.bx.id(v)],
            None => self.generate(v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdf_fixed_points() {
        assert_eq!(exp_inverse_cdf(0.0).unwrap(), 0.0);
        let u = 1.0 - (-1.0f64).exp();
        assert!((exp_inverse_cdf(u).unwrap() - 1.0).abs() < 1e-15);
        assert!(exp_inverse_cdf(1.0).is_err());
        assert!(exp_inverse_cdf(-0.1).is_err());
        assert!(exp_inverse_cdf(f64::NAN).is_err());
    }

    #[test]
    fn inverse_cdf_monotone() {
        let mut prev = -1.0;
        for k in 0..1000 {
            let w = exp_inverse_cdf(k as f64 / 1000.0).unwrap();
            assert!(w > prev);
            prev = w;
        }
    }

    #[test]
    fn inverse_cdf_mean_is_one() {
        let rng = CounterRng::new(Seed::new(11, 0));
        let n = 1_000_000u64;
        let mean: f64 = (0..n)
            .map(|c| exp_inverse_cdf(rng.uniform_at(c)).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn weight_is_deterministic_and_mode_independent() {
        let seed = Seed::new(7, 3);
        let a = WeightField::new(16, seed, StorageMode::Materialized).unwrap();
        let b = WeightField::on_demand(16, seed).unwrap();
        let v = Vertex::new(3, 5);
        assert_eq!(a.weight(v).unwrap(), a.weight(v).unwrap());
        assert_eq!(a.weight(v).unwrap().to_bits(), b.weight(v).unwrap().to_bits());
    }

    #[test]
    fn out_of_box_is_error() {
        let f = WeightField::on_demand(4, Seed::new(1, 1)).unwrap();
        assert!(matches!(f.weight(Vertex::new(4, 0)), Err(Error::OutOfBox { .. })));
        assert!(WeightField::on_demand(1, Seed::new(1, 1)).is_err());
    }

    #[test]
    fn replicates_differ() {
        let a = WeightField::on_demand(8, Seed::new(7, 0)).unwrap();
        let b = WeightField::on_demand(8, Seed::new(7, 1)).unwrap();
        let same = a
            .lattice()
            .iter()
            .filter(|&v| a.weight(v).unwrap() == b.weight(v).unwrap())
            .count();
        assert_eq!(same, 0);
    }

    #[test]
    fn empirical_variance_near_one() {
        let f = WeightField::on_demand(1000, Seed::new(5, 0)).unwrap();
        let (mut s, mut s2) = (0.0, 0.0);
        for v in f.lattice().iter() {
            let w = f.weight(v).unwrap();
            assert!(w > 0.0);
            s += w;
            s2 += w * w;
        }
        let n = f.lattice().cells() as f64;
        let var = s2 / n - (s / n).powi(2);
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }
}
