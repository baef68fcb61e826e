//! Random valid spaces shared by the integration tests.

#![allow(dead_code)]

use mdbspline::MDSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A valid public space with degrees `0..=max_degree` (or `1..` when
/// `min_degree` is 1), up to `max_breaks` breakpoints on dyadic positions.
pub fn random_space(rng: &mut ChaCha8Rng, max_degree: i64, min_degree: i64, max_breaks: usize) -> MDSpace {
    let q = rng.random_range(0..=max_breaks);
    let a = f64::from(rng.random_range(-8i32..=8)) / 2.0;
    let mut x = a;
    let mut pts = Vec::with_capacity(q + 1);
    for _ in 0..=q {
        // widths in {1/8, ..., 4}
        x += f64::from(rng.random_range(1u32..=32)) / 8.0;
        pts.push(x);
    }
    let b = pts.pop().unwrap();
    let degrees: Vec<i64> = (0..=q).map(|_| rng.random_range(min_degree..=max_degree)).collect();
    let continuities: Vec<i64> = (0..q)
        .map(|i| rng.random_range(0..=degrees[i].min(degrees[i + 1])))
        .collect();
    MDSpace::new(a, b, pts, degrees, continuities).expect("generated spaces are valid")
}

pub fn random_spaces(seed: u64, n: usize, max_degree: i64, max_breaks: usize) -> Vec<MDSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_space(&mut rng, max_degree, 0, max_breaks)).collect()
}

/// A point strictly inside each interval.
pub fn interval_midpoints(s: &MDSpace) -> Vec<f64> {
    let mut ends = vec![s.a];
    ends.extend(&s.breakpoints);
    ends.push(s.b);
    ends.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}
