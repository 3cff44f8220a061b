//! Shared fixtures for the criterion benches: deterministic populations and
//! trial vectors with a controlled violation pattern.

use boxde::{BoxDomain, RngStream};

/// A target/trial pair on `[0, 1]^n` where roughly `violation_rate` of the
/// trial components sit outside the box, split evenly between the sides.
pub fn correction_fixture(
    n: usize,
    violation_rate: f64,
    seed: u64,
) -> (BoxDomain, Vec<f64>, Vec<f64>) {
    let domain = BoxDomain::unit(n);
    let mut rng = RngStream::new(seed);
    let target: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
    let trial: Vec<f64> = (0..n)
        .map(|_| {
            if rng.uniform() < violation_rate {
                if rng.uniform() < 0.5 {
                    -rng.uniform_in(0.0, 0.4)
                } else {
                    1.0 + rng.uniform_in(0.0, 0.4)
                }
            } else {
                rng.uniform()
            }
        })
        .collect();
    (domain, target, trial)
}
