//! Fixtures shared by the benchmarks in `benches/`.

use intrinsic_metrics::rng::stream;
use intrinsic_metrics::{BetaParams, ConvexBody, Vector};

/// `count` uniform points of `B_n` from a fixed seed.
pub fn ball_points(n: usize, count: usize, seed: u64) -> Vec<Vector> {
    let law = BetaParams::new(n, 0.0).expect("uniform law");
    let mut rng = stream(seed);
    (0..count).map(|_| law.sample(&mut rng)).collect()
}

/// Hull of `count` uniform points of `B_n`, shifted along the first axis.
pub fn ball_polytope(n: usize, count: usize, shift: f64, seed: u64) -> ConvexBody {
    let mut offset = Vector::zeros(n);
    offset[0] = shift;
    let pts = ball_points(n, count, seed).into_iter().map(|p| p + &offset).collect();
    ConvexBody::polytope(pts).expect("finite vertices")
}
