use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Real scalar used for effectiveness scores and their aggregates.
///
/// Measures only ever produce ratios of counts and log-discounted gains, so
/// any IEEE float works; `f64` is the default through the crate-root aliases.
pub trait Scalar:
    Float + FromPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 representable")
    }

    fn hundred() -> Self {
        Self::from_f64_lossy(100.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Arithmetic mean and sample standard deviation (n - 1). Empty input gives
/// zeros; a single value has zero spread.
pub fn mean_and_stdev<F: Scalar>(values: &[F]) -> (F, F) {
    if values.is_empty() {
        return (F::zero(), F::zero());
    }
    let n = F::from_usize_lossy(values.len());
    let mean = values.iter().fold(F::zero(), |a, &v| a + v) / n;
    if values.len() < 2 {
        return (mean, F::zero());
    }
    let ss = values.iter().fold(F::zero(), |a, &v| a + (v - mean) * (v - mean));
    (mean, (ss / (n - F::one())).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_values() {
        let (m, s) = mean_and_stdev(&[0.2_f64, 0.4]);
        assert!((m - 0.3).abs() < 1e-12);
        // sqrt(((0.1)^2 + (0.1)^2) / 1)
        assert!((s - 0.02_f64.sqrt()).abs() < 1e-12);
        assert!((s - 0.1414).abs() < 1e-4);
    }

    #[test]
    fn single_and_empty() {
        assert_eq!(mean_and_stdev(&[0.7_f32]), (0.7, 0.0));
        assert_eq!(mean_and_stdev::<f64>(&[]), (0.0, 0.0));
    }
}
