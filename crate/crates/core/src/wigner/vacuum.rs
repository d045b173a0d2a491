//! Vacuum Wigner sampling.
//!
//! Each mode is drawn from a counter-based stream: ChaCha8 keyed by the run
//! seed, stream number = realization index, and four 32-bit words per mode,
//! so any mode of any realization can be regenerated on its own.

use core::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::field::{ComplexField, Domain};
use super::grid::SimulationGrid;

const WORDS_PER_MODE: u128 = 4;

fn rng(seed: u64, realization: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(realization);
    r
}

/// Box–Muller on two 64-bit draws; each quadrature has variance 1/4.
#[inline]
fn gaussian_pair(a: u64, b: u64) -> Complex64 {
    let u1 = ((a >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64);
    let u2 = (b >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let r = 0.5 * (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * PI * u2).sin_cos();
    Complex64::new(r * c, r * s)
}

/// Vacuum amplitude of one mode: `⟨α⟩ = 0`, `⟨|α|²⟩ = 1/2`.
pub fn vacuum_mode(seed: u64, realization: u64, mode: usize) -> Complex64 {
    let mut r = rng(seed, realization);
    r.set_word_pos(WORDS_PER_MODE * mode as u128);
    gaussian_pair(r.next_u64(), r.next_u64())
}

/// Fills `out` with the vacuum sample of `realization`, mode by mode.
pub fn fill_vacuum(out: &mut [Complex64], seed: u64, realization: u64) {
    let mut r = rng(seed, realization);
    for a in out.iter_mut() {
        *a = gaussian_pair(r.next_u64(), r.next_u64());
    }
}

/// Spectral-domain vacuum field at `z = 0`.
pub fn sample_vacuum(grid: &SimulationGrid, seed: u64, realization: u64) -> ComplexField {
    let mut f = ComplexField::zeros(grid, Domain::Spectral);
    fill_vacuum(&mut f.data, seed, realization);
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tiny_grid() -> SimulationGrid {
        SimulationGrid {
            n_t: 16,
            n_x: 16,
            n_y: 8,
            span_t: 1e-12,
            span_x: 1e-3,
            span_y: 1e-3,
            n_z: 1,
            omega_center: 2.35e15,
        }
    }

    #[test]
    fn moments_of_vacuum() {
        // 10⁴ samples of one mode, drawn from distinct realizations
        let n = 10_000;
        let (mut m2, mut re2, mut mean) = (0.0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for r in 0..n {
            let a = vacuum_mode(7, r, 3);
            m2 += a.norm_sqr();
            re2 += a * a;
            mean += a;
        }
        let nf = n as f64;
        assert!((m2 / nf - 0.5).abs() < 3.0 * 0.5 / nf.sqrt(), "{}", m2 / nf);
        assert!((re2 / nf).norm() < 3.0 * 0.5 / nf.sqrt(), "{}", re2 / nf);
        assert!((mean / nf).norm() < 3.0 * (0.5 / nf).sqrt());
    }

    #[test]
    fn sequential_fill_matches_random_access() {
        let g = tiny_grid();
        let f = sample_vacuum(&g, 42, 5);
        for i in [0usize, 1, 17, 1000, g.len() - 1] {
            assert_eq!(f.data[i], vacuum_mode(42, 5, i));
        }
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let g = tiny_grid();
        assert_eq!(sample_vacuum(&g, 1, 0).data, sample_vacuum(&g, 1, 0).data);
        assert_ne!(sample_vacuum(&g, 1, 0).data, sample_vacuum(&g, 1, 1).data);
        assert_ne!(sample_vacuum(&g, 1, 0).data, sample_vacuum(&g, 2, 0).data);
        let mut buf = vec![Complex64::new(0.0, 0.0); 4];
        fill_vacuum(&mut buf, 1, 0);
        assert_eq!(&buf[..], &sample_vacuum(&g, 1, 0).data[..4]);
    }
}
