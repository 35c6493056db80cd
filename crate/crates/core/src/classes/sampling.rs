//! Seeded point generators for the sampled checkers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SampleConfig;
use crate::linalg::C64;

/// Independent streams drawn from one seed.
#[derive(Debug, Clone, Copy)]
pub enum Stream {
    UpperHalf = 1,
    Real = 2,
    Disk = 3,
    Torus = 4,
    Pencil = 5,
    Compression = 6,
}

pub struct PointSampler {
    rng: ChaCha8Rng,
    radius: f64,
    floor: f64,
    nvars: usize,
}

impl PointSampler {
    pub fn new(cfg: &SampleConfig, nvars: usize, stream: Stream) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream as u64);
        Self { rng, radius: cfg.box_radius, floor: cfg.imag_floor, nvars }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Re uniform in `[-R, R]`, Im uniform in `[ε, R]`.
    pub fn upper(&mut self) -> Vec<C64> {
        (0..self.nvars)
            .map(|_| {
                C64::new(self.rng.gen_range(-self.radius..=self.radius), self.rng.gen_range(self.floor..=self.radius))
            })
            .collect()
    }

    pub fn real(&mut self) -> Vec<C64> {
        (0..self.nvars).map(|_| C64::new(self.rng.gen_range(-self.radius..=self.radius), 0.0)).collect()
    }

    /// Uniform in the open polydisk, radius capped at `1 − 1e-3`.
    pub fn disk(&mut self) -> Vec<C64> {
        (0..self.nvars)
            .map(|_| {
                let r = self.rng.gen::<f64>().sqrt() * (1.0 - 1e-3);
                let t = self.rng.gen_range(0.0..std::f64::consts::TAU);
                C64::from_polar(r, t)
            })
            .collect()
    }

    /// Uniform on the torus, keeping every angle at least 0.05 away from
    /// `w = 1` (which maps to infinity).
    pub fn torus(&mut self) -> Vec<C64> {
        (0..self.nvars).map(|_| C64::from_polar(1.0, self.rng.gen_range(0.05..std::f64::consts::TAU - 0.05))).collect()
    }

    /// Boundary-hugging points in the upper poly-half-plane: ten with every
    /// `Im = ε`, ten with every `|Re| = R`, and ten corners `(±R, R)`.
    pub fn upper_edges(&mut self) -> Vec<Vec<C64>> {
        let (r, eps) = (self.radius, self.floor);
        let mut out = Vec::with_capacity(30);
        for _ in 0..10 {
            out.push((0..self.nvars).map(|_| C64::new(self.rng.gen_range(-r..=r), eps)).collect());
        }
        for _ in 0..10 {
            out.push((0..self.nvars).map(|_| C64::new(self.sign() * r, self.rng.gen_range(eps..=r))).collect());
        }
        for _ in 0..10 {
            out.push((0..self.nvars).map(|_| C64::new(self.sign() * r, r)).collect());
        }
        out
    }

    fn sign(&mut self) -> f64 {
        if self.rng.gen::<bool>() {
            1.0
        } else {
            -1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_points_respect_box() {
        let cfg = SampleConfig { seed: 5, ..SampleConfig::default() };
        let mut s = PointSampler::new(&cfg, 3, Stream::UpperHalf);
        for _ in 0..200 {
            for z in s.upper() {
                assert!(z.re.abs() <= 10.0 && z.im >= 1e-3 && z.im <= 10.0);
            }
        }
        for p in s.upper_edges() {
            assert!(p.iter().all(|z| z.im >= 1e-3));
        }
    }

    #[test]
    fn same_seed_same_points() {
        let cfg = SampleConfig::default();
        let a: Vec<_> = (0..5).map(|_| PointSampler::new(&cfg, 2, Stream::Disk).disk()).collect();
        let mut s = PointSampler::new(&cfg, 2, Stream::Disk);
        assert_eq!(a[0], s.disk());
        assert!(a[0].iter().all(|w| w.norm() < 1.0));
    }

    #[test]
    fn streams_differ() {
        let cfg = SampleConfig::default();
        let a = PointSampler::new(&cfg, 2, Stream::UpperHalf).upper();
        let b = PointSampler::new(&cfg, 2, Stream::Real).upper();
        assert_ne!(a, b);
    }
}
