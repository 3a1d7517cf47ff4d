//! Scrambled Hammersley point sets.
//!
//! Coordinate 0 is the regular grid `(i + 1/2) / n`; coordinate `k >= 1` is the
//! radical inverse of `i` in the `k`-th prime base. Scrambling applies one
//! random permutation of the non-zero digits per base, so digit 0 stays fixed
//! and every coordinate keeps a finite expansion in `[0, 1)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::stream::derive_seed;
use crate::error::{invalid, Result};
use crate::point::Point;

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| !candidate.is_multiple_of(p))
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Base-`base` digit reversal of `index`, with an optional digit permutation.
pub fn radical_inverse(mut index: u64, base: u64, perm: Option<&[u64]>) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut acc = 0.0;
    while index > 0 {
        let mut digit = index % base;
        if let Some(p) = perm {
            digit = p[digit as usize];
        }
        acc += digit as f64 * scale;
        scale *= inv;
        index /= base;
    }
    acc
}

/// Digit permutation for `base` keyed by `scramble_seed`; 0 is a fixed point.
fn digit_permutation(base: u64, scramble_seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(scramble_seed, base));
    let mut perm: Vec<u64> = (0..base).collect();
    perm[1..].shuffle(&mut rng);
    perm
}

/// A precomputed scrambled Hammersley design of `n_total` points in `[0,1)^d`.
#[derive(Debug, Clone)]
pub struct ScrambledHammersley {
    dim: usize,
    n_total: u64,
    bases: Vec<u64>,
    perms: Option<Vec<Vec<u64>>>,
}

impl ScrambledHammersley {
    /// `scramble_seed == 0` disables scrambling.
    pub fn new(dim: usize, n_total: u64, scramble_seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if n_total == 0 {
            return Err(invalid("n_total must be at least 1"));
        }
        let bases = first_primes(dim - 1);
        let perms = (scramble_seed != 0).then(|| {
            bases
                .iter()
                .map(|&b| digit_permutation(b, scramble_seed))
                .collect()
        });
        Ok(ScrambledHammersley {
            dim,
            n_total,
            bases,
            perms,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> u64 {
        self.n_total
    }

    pub fn is_empty(&self) -> bool {
        self.n_total == 0
    }

    pub fn point(&self, index: u64) -> Result<Point> {
        Ok(Point::from_raw(self.unit_coords(index)?))
    }

    fn unit_coords(&self, index: u64) -> Result<Vec<f64>> {
        if index >= self.n_total {
            return Err(invalid(format!(
                "index {index} out of range for {} points",
                self.n_total
            )));
        }
        let mut coords = Vec::with_capacity(self.dim);
        coords.push((index as f64 + 0.5) / self.n_total as f64);
        for (k, &base) in self.bases.iter().enumerate() {
            let perm = self.perms.as_ref().map(|p| p[k].as_slice());
            coords.push(radical_inverse(index, base, perm));
        }
        Ok(coords)
    }

    /// Coordinates shifted to the centre of their elementary interval, so every
    /// value lies strictly inside `(0, 1)`. Used before an inverse-CDF map.
    pub fn centered_coords(&self, index: u64) -> Result<Vec<f64>> {
        let mut coords = self.unit_coords(index)?;
        for (k, &base) in self.bases.iter().enumerate() {
            let digits = digit_count(self.n_total - 1, base);
            coords[k + 1] += 0.5 * (base as f64).powi(-(digits as i32));
        }
        Ok(coords)
    }
}

fn digit_count(mut value: u64, base: u64) -> u32 {
    let mut digits = 1;
    while value >= base {
        value /= base;
        digits += 1;
    }
    digits
}

/// Point `index` of the `n_total`-point scrambled Hammersley design in `[0,1)^d`.
pub fn scrambled_hammersley(
    index: u64,
    d: usize,
    n_total: u64,
    scramble_seed: u64,
) -> Result<Point> {
    if index >= n_total {
        return Err(invalid(format!(
            "index {index} must be below n_total {n_total}"
        )));
    }
    ScrambledHammersley::new(d, n_total, scramble_seed)?.point(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert_eq!(first_primes(8), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(first_primes(0).is_empty());
    }

    #[test]
    fn van_der_corput_base_two() {
        assert_eq!(radical_inverse(0, 2, None), 0.0);
        assert_eq!(radical_inverse(1, 2, None), 0.5);
        assert_eq!(radical_inverse(2, 2, None), 0.25);
        assert_eq!(radical_inverse(3, 2, None), 0.75);
        // 5 = 12 in base 3 -> 0.21_3 = 2/3 + 1/9
        assert!((radical_inverse(5, 3, None) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn unscrambled_first_point() {
        let p = scrambled_hammersley(0, 2, 4, 0).unwrap();
        assert_eq!(p.coords(), &[0.125, 0.0]);
        let p = scrambled_hammersley(3, 2, 4, 0).unwrap();
        assert_eq!(p.coords(), &[0.875, 0.75]);
    }

    #[test]
    fn index_out_of_range() {
        assert!(scrambled_hammersley(4, 2, 4, 0).is_err());
        assert!(scrambled_hammersley(0, 0, 4, 0).is_err());
    }

    #[test]
    fn deterministic_scramble() {
        let a = scrambled_hammersley(17, 6, 100, 12345).unwrap();
        let b = scrambled_hammersley(17, 6, 100, 12345).unwrap();
        assert_eq!(a, b);
        let c = scrambled_hammersley(17, 6, 100, 999).unwrap();
        assert_ne!(a.coords()[2..], c.coords()[2..]);
    }

    #[test]
    fn permutations_fix_zero_and_are_bijective() {
        for base in first_primes(20) {
            let perm = digit_permutation(base, 77);
            assert_eq!(perm[0], 0);
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..base).collect::<Vec<_>>());
        }
    }

    #[test]
    fn coordinate_zero_increasing_and_unit_range() {
        let design = ScrambledHammersley::new(5, 257, 31).unwrap();
        let mut prev = -1.0;
        for i in 0..257 {
            let p = design.point(i).unwrap();
            assert!(p[0] > prev);
            prev = p[0];
            assert!(p.iter().all(|&c| (0.0..1.0).contains(&c)));
            let centered = design.centered_coords(i).unwrap();
            assert!(centered.iter().all(|&c| c > 0.0 && c < 1.0));
        }
    }

    #[test]
    fn scrambled_coordinates_stratify() {
        // b^k consecutive indices hit every cell of width b^-k exactly once,
        // with or without a digit permutation. Coordinate 3 uses base 5.
        let n = 125u64;
        let design = ScrambledHammersley::new(4, n, 2024).unwrap();
        let mut cells = vec![0usize; n as usize];
        for i in 0..n {
            let c = design.point(i).unwrap()[3];
            cells[(c * n as f64).round() as usize] += 1;
        }
        assert!(cells.iter().all(|&c| c == 1));
    }
}
