//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream addressed by a
//! `(root seed, stream id)` pair. ChaCha is a counter-mode generator, so a
//! stream can be opened at any address without touching the others; results
//! never depend on evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::inference::special::normal_quantile;

/// Opens stream `id` under `root`.
pub fn stream(root: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(id);
    rng
}

/// Stream id for replicate `replicate` of grid point `grid_index`.
pub fn replicate_stream_id(grid_index: usize, replicate: usize) -> u64 {
    debug_assert!(replicate < (1 << 40) && grid_index < (1 << 24));
    ((grid_index as u64) << 40) | replicate as u64
}

/// Uniform on the open interval (0, 1) with 53 random bits.
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal by inverse-CDF transform of [`open_unit`].
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    normal_quantile(open_unit(rng)).expect("open_unit lies strictly inside (0, 1)")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_addressable() {
        let a: Vec<u64> = (0..4).map(|_| stream(7, 3).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(stream(7, 3).next_u64(), stream(7, 4).next_u64());
        assert_ne!(stream(7, 3).next_u64(), stream(8, 3).next_u64());
        assert_ne!(replicate_stream_id(0, 1), replicate_stream_id(1, 0));
    }

    #[test]
    fn unit_draws_are_interior() {
        let mut rng = stream(1, 1);
        for _ in 0..10_000 {
            let u = open_unit(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn normal_draws_have_unit_moments() {
        let mut rng = stream(42, 0);
        let xs: Vec<f64> = (0..200_000).map(|_| standard_normal(&mut rng)).collect();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!(m.abs() < 0.01, "mean {m}");
        assert!((v - 1.0).abs() < 0.01, "var {v}");
    }
}
