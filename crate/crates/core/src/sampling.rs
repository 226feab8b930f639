//! Seeded random stable models for property tests and the verification
//! suite.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::filter_models::ArfimaModel;

/// Shape of the random models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerOptions {
    pub max_poles: usize,
    pub max_zeros: usize,
    /// Upper bound on every root modulus.
    pub max_modulus: f64,
    /// `d` is drawn from `[-d_max, d_max]`.
    pub d_max: f64,
    /// Probability of forcing `d = 0`.
    pub zero_d_probability: f64,
    /// Minimum distance between any two roots, keeping the metric away from
    /// the degenerate locus. Zero disables the check.
    pub min_separation: f64,
    /// Probability that a root is drawn on the real axis.
    pub real_root_probability: f64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            max_poles: 2,
            max_zeros: 2,
            max_modulus: 0.85,
            d_max: 0.45,
            zero_d_probability: 0.25,
            min_separation: 0.1,
            real_root_probability: 0.2,
        }
    }
}

impl SamplerOptions {
    pub fn arma(mut self) -> Self {
        self.zero_d_probability = 1.0;
        self
    }
}

/// Deterministic model generator.
#[derive(Debug, Clone)]
pub struct ModelSampler {
    rng: ChaCha8Rng,
    pub options: SamplerOptions,
}

impl ModelSampler {
    pub fn new(seed: u64, options: SamplerOptions) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            options,
        }
    }

    pub fn root(&mut self) -> Complex64 {
        let r_max = self.options.max_modulus;
        if self.rng.gen_bool(self.options.real_root_probability) {
            return Complex64::new(self.rng.gen_range(-r_max..=r_max), 0.0);
        }
        // uniform on the disk of radius r_max
        let r = r_max * self.rng.gen::<f64>().sqrt();
        let theta = self.rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        Complex64::from_polar(r, theta)
    }

    /// Point in the closed disk of radius `r`.
    pub fn point_in_disk(&mut self, r: f64) -> Complex64 {
        let rho = r * self.rng.gen::<f64>().sqrt();
        let theta = self.rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        Complex64::from_polar(rho, theta)
    }

    pub fn d(&mut self) -> f64 {
        if self.rng.gen_bool(self.options.zero_d_probability.clamp(0.0, 1.0)) {
            0.0
        } else {
            self.rng.gen_range(-self.options.d_max..=self.options.d_max)
        }
    }

    fn separated_roots(&mut self, count: usize) -> Vec<Complex64> {
        let mut roots: Vec<Complex64> = Vec::with_capacity(count);
        while roots.len() < count {
            let z = self.root();
            if roots.iter().all(|w| (w - z).norm() >= self.options.min_separation) {
                roots.push(z);
            }
        }
        roots
    }

    /// Unit-gain model with random orders up to the configured maxima.
    pub fn model(&mut self) -> ArfimaModel {
        let p = self.rng.gen_range(0..=self.options.max_poles);
        let q = self.rng.gen_range(0..=self.options.max_zeros);
        self.model_with_orders(p, q)
    }

    /// Unit-gain model with exactly `p` poles and `q` zeros.
    pub fn model_with_orders(&mut self, p: usize, q: usize) -> ArfimaModel {
        let d = self.d();
        let roots = self.separated_roots(p + q);
        let (poles, zeros) = roots.split_at(p);
        ArfimaModel::unit_gain(d, poles.to_vec(), zeros.to_vec()).expect("sampled roots lie inside the disk")
    }
}
