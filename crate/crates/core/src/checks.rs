//! Machine checks of the metric assumptions the lower-bound construction
//! relies on: axis-aligned pairs are at their euclidean distance, every other
//! pair is at least as far apart as its x-offset, and the triangle inequality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::instance::Instance;
use crate::metric::{DistanceValue, ScaledPoint, RELATIVE_TOLERANCE};

/// Triples are enumerated exhaustively up to this many cities.
pub const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 40;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// The offending pair `[i, j]` or triple `[i, j, k]`.
    pub cities: Vec<usize>,
    /// Measured values in true units, in the order the rule names them.
    pub values: Vec<f64>,
    pub rule: &'static str,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConditionReport {
    pub passed: bool,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl ConditionReport {
    fn from_violations(checked: usize, violations: Vec<Violation>) -> Self {
        Self {
            passed: violations.is_empty(),
            checked,
            violations,
        }
    }
}

/// Checks both grid conditions for every pair of the instance.
pub fn check_metric_conditions(instance: &Instance) -> ConditionReport {
    check_metric_conditions_with(instance.cities(), instance.scale(), |i, j| instance.distance(i, j))
}

/// As [`check_metric_conditions`] over an arbitrary distance function.
pub fn check_metric_conditions_with<F>(cities: &[ScaledPoint], scale: i64, distance: F) -> ConditionReport
where
    F: Fn(usize, usize) -> DistanceValue,
{
    let s = scale as f64;
    let mut violations = Vec::new();
    let mut checked = 0;
    for i in 0..cities.len() {
        for j in i + 1..cities.len() {
            checked += 1;
            let (a, b) = (cities[i], cities[j]);
            let dx = (a.x - b.x).abs();
            let dy = (a.y - b.y).abs();
            let d = distance(i, j);
            if dx == 0 || dy == 0 {
                let euclid = dx + dy;
                if !d.equals_scaled_integer(euclid) {
                    violations.push(Violation {
                        cities: vec![i, j],
                        values: vec![d.approx, euclid as f64 / s],
                        rule: "aligned pair is not at euclidean distance",
                    });
                }
            } else if !d.at_least_scaled_integer(dx) {
                violations.push(Violation {
                    cities: vec![i, j],
                    values: vec![d.approx, dx as f64 / s],
                    rule: "distance is below the x-offset",
                });
            }
        }
    }
    ConditionReport::from_violations(checked, violations)
}

/// Checks `d(i,j) <= d(i,k) + d(k,j)`; exhaustive for small instances,
/// otherwise on `sample_size` random triples drawn from `seed`.
pub fn check_triangle_inequality(instance: &Instance, sample_size: usize, seed: u64) -> ConditionReport {
    check_triangle_inequality_with(instance.len(), sample_size, seed, |i, j| instance.distance(i, j))
}

pub fn check_triangle_inequality_with<F>(n: usize, sample_size: usize, seed: u64, distance: F) -> ConditionReport
where
    F: Fn(usize, usize) -> DistanceValue,
{
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut check = |i: usize, j: usize, k: usize| {
        checked += 1;
        let (dij, dik, dkj) = (distance(i, j), distance(i, k), distance(k, j));
        if !triangle_holds(&dij, &dik, &dkj) {
            violations.push(Violation {
                cities: vec![i, j, k],
                values: vec![dij.approx, dik.approx, dkj.approx],
                rule: "triangle inequality",
            });
        }
    };
    if n <= EXHAUSTIVE_TRIANGLE_LIMIT {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    check(i, j, k);
                }
            }
        }
    } else if n > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..sample_size {
            check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        }
    }
    ConditionReport::from_violations(checked, violations)
}

fn triangle_holds(dij: &DistanceValue, dik: &DistanceValue, dkj: &DistanceValue) -> bool {
    if let (Some(a), Some(b), Some(c)) = (dij.exact, dik.exact, dkj.exact) {
        return a <= b + c;
    }
    if let (Some(a), Some(b), Some(c)) = (dij.squared_exact, dik.squared_exact, dkj.squared_exact) {
        // sqrt(a) <= sqrt(b) + sqrt(c)  <=>  a - b - c <= 2 sqrt(bc)
        let lhs = i128::from(a) - i128::from(b) - i128::from(c);
        return lhs <= 0 || lhs * lhs <= 4 * i128::from(b) * i128::from(c);
    }
    let (a, sum) = (dij.scaled(), dik.scaled() + dkj.scaled());
    a <= sum * (1.0 + RELATIVE_TOLERANCE)
}
