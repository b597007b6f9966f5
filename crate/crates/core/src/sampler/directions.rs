//! Gaussian direction matrices `H = (h^1 | ... | h^z)` via Box-Muller.

use std::f64::consts::TAU;

use rand::RngCore;
use wide::f64x4;

use crate::linalg::Matrix;

use super::rng::{unit_uniform, WalkStreams};

/// Four Box-Muller transforms at once; returns the cosine and sine branches.
#[inline]
fn box_muller_x4(u1: f64x4, u2: f64x4) -> (f64x4, f64x4) {
    let radius = (f64x4::splat(-2.0) * u1.ln()).sqrt();
    let (s, c) = (f64x4::splat(TAU) * u2).sin_cos();
    (radius * c, radius * s)
}

/// Maps two uniforms to two independent standard normals.
///
/// `u1` must lie in `(0, 1]`; `u2` in `[0, 1)`. Bit-identical to the lanes
/// of the batched path used by [`fill_normals`].
pub fn box_muller(u1: f64, u2: f64) -> (f64, f64) {
    let (c, s) = box_muller_x4(f64x4::splat(u1), f64x4::splat(u2));
    (c.to_array()[0], s.to_array()[0])
}

/// Fills `out` with standard normals, two per pair of uniforms `(u1, u2)`
/// drawn in that order. Always consumes `2 * ceil(len / 2)` words from `rng`.
pub fn fill_normals<R: RngCore + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let len = out.len();
    let pairs = len.div_ceil(2);
    let mut first = 0;
    while first < pairs {
        let lanes = (pairs - first).min(4);
        let mut u1 = [1.0; 4];
        let mut u2 = [0.0; 4];
        for l in 0..lanes {
            u1[l] = 1.0 - unit_uniform(rng);
            u2[l] = unit_uniform(rng);
        }
        let (c, s) = box_muller_x4(f64x4::from(u1), f64x4::from(u2));
        let (c, s) = (c.to_array(), s.to_array());
        for l in 0..lanes {
            let i = 2 * (first + l);
            out[i] = c[l];
            if i + 1 < len {
                out[i + 1] = s[l];
            }
        }
        first += lanes;
    }
}

/// Draws column `k` of a direction matrix from its own stream into `column`.
pub fn draw_column(streams: &mut WalkStreams, k: usize, column: &mut [f64]) {
    fill_normals(streams.column(k), column);
}

/// An `n x z` matrix of standard normals, column `k` drawn from stream `k`.
pub fn generate_directions(streams: &mut WalkStreams, n: usize, z: usize) -> Matrix {
    let mut h = Matrix::zeros(n, z);
    let mut columns = vec![0.0; n * z];
    generate_into(streams, &mut h, &mut columns);
    h
}

/// Fills `h` column by column. `columns` is scratch of length `n * z` that
/// holds the draws walk-major before they are transposed into `h`.
pub(crate) fn generate_into(streams: &mut WalkStreams, h: &mut Matrix, columns: &mut [f64]) {
    let (n, z) = h.shape();
    assert!(streams.walks() >= z, "one stream per walk column is required");
    assert_eq!(columns.len(), n * z);
    for (k, column) in columns.chunks_exact_mut(n.max(1)).enumerate().take(z) {
        draw_column(streams, k, column);
    }
    const BLOCK: usize = 16;
    let data = h.as_mut_slice();
    for k0 in (0..z).step_by(BLOCK) {
        for i0 in (0..n).step_by(BLOCK) {
            for k in k0..(k0 + BLOCK).min(z) {
                for i in i0..(i0 + BLOCK).min(n) {
                    data[i * z + k] = columns[k * n + i];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_branch_vanishes_at_quarter_turn() {
        let (c, _) = box_muller(0.5, 0.25);
        assert!(c.abs() < 1e-15, "{c}");
        let (c, s) = box_muller(0.5, 0.0);
        assert!((c - (-2.0 * 0.5f64.ln()).sqrt()).abs() < 1e-15);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn agrees_with_libm() {
        for i in 1..=1000 {
            let u1 = i as f64 / 1000.0;
            let u2 = (i as f64 * 0.618_033_988_749_895).fract();
            let r = (-2.0 * u1.ln()).sqrt();
            let (sin, cos) = (TAU * u2).sin_cos();
            let (c, s) = box_muller(u1, u2);
            assert!((c - r * cos).abs() <= 4e-16 * r.max(1.0), "{u1} {u2}");
            assert!((s - r * sin).abs() <= 4e-16 * r.max(1.0), "{u1} {u2}");
        }
    }

    #[test]
    fn batched_lanes_match_scalar_transform() {
        let mut s = WalkStreams::new(5, 1);
        let mut buf = [0.0; 11];
        fill_normals(s.column(0), &mut buf);
        let mut reference = WalkStreams::new(5, 1);
        let rng = reference.column(0);
        for pair in 0..6 {
            let u1 = 1.0 - unit_uniform(rng);
            let u2 = unit_uniform(rng);
            let (c, sn) = box_muller(u1, u2);
            assert_eq!(buf[2 * pair], c);
            if 2 * pair + 1 < buf.len() {
                assert_eq!(buf[2 * pair + 1], sn);
            }
        }
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = generate_directions(&mut WalkStreams::new(42, 4), 7, 4);
        let b = generate_directions(&mut WalkStreams::new(42, 4), 7, 4);
        assert_eq!(a, b);
        let c = generate_directions(&mut WalkStreams::new(43, 4), 7, 4);
        assert_ne!(a, c);
    }

    #[test]
    fn column_does_not_depend_on_batch_width() {
        let narrow = generate_directions(&mut WalkStreams::new(3, 1), 5, 1);
        let wide = generate_directions(&mut WalkStreams::new(3, 8), 5, 8);
        assert_eq!(narrow.column(0), wide.column(0));
    }

    #[test]
    fn draw_count_is_fixed() {
        let mut s = WalkStreams::new(1, 1);
        let mut buf = [0.0; 5];
        fill_normals(s.column(0), &mut buf);
        let after = s.column(0).next_u64();
        let mut reference = WalkStreams::new(1, 1);
        for _ in 0..6 {
            reference.column(0).next_u64();
        }
        assert_eq!(after, reference.column(0).next_u64());
    }

    #[test]
    fn moments_of_many_variates() {
        let h = generate_directions(&mut WalkStreams::new(2024, 10), 10_000, 10);
        let n = h.as_slice().len() as f64;
        let mean = h.as_slice().iter().sum::<f64>() / n;
        let var = h.as_slice().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
    }
}
