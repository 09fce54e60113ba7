//! Seeded integer sampling shared by the witness searches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalarlinalg::{int, Rational};

pub type SearchRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SearchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero vector with integer entries in `[-bound, bound]`.
pub fn random_int_vector(rng: &mut SearchRng, len: usize, bound: i64) -> Vec<Rational> {
    let bound = bound.max(1);
    loop {
        let v: Vec<i64> = (0..len).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|&x| x != 0) || len == 0 {
            return v.into_iter().map(int).collect();
        }
    }
}

/// Coefficient bound for random trial `index` when the bound starts at
/// `initial` and doubles every `round` trials. Saturates instead of
/// overflowing.
pub fn doubling_bound(initial: i64, round: usize, index: usize) -> i64 {
    let doublings = (index / round.max(1)).min(40) as u32;
    initial.saturating_mul(1i64 << doublings)
}

pub fn unit_vector(len: usize, i: usize) -> Vec<Rational> {
    (0..len).map(|k| int(i64::from(k == i))).collect()
}

pub fn ones(len: usize) -> Vec<Rational> {
    vec![int(1); len]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let a = random_int_vector(&mut rng(7), 5, 10);
        let b = random_int_vector(&mut rng(7), 5, 10);
        assert_eq!(a, b);
    }

    #[test]
    fn bound_doubles_per_round() {
        assert_eq!(doubling_bound(4, 8, 0), 4);
        assert_eq!(doubling_bound(4, 8, 7), 4);
        assert_eq!(doubling_bound(4, 8, 8), 8);
        assert_eq!(doubling_bound(i64::MAX / 2, 1, 5), i64::MAX);
    }
}
