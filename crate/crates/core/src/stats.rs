//! Goodness of fit and resampling helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// One-sample Kolmogorov-Smirnov test result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

impl KsTest {
    pub fn rejects_at(&self, significance: f64) -> bool {
        self.p_value < significance
    }
}

/// KS test of `samples` against the continuous distribution `cdf`.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsTest {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let nf = n as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / nf).max((i + 1) as f64 / nf - f)
        })
        .fold(0.0, f64::max);
    KsTest {
        statistic,
        p_value: kolmogorov_p_value(statistic, n),
        n,
    }
}

/// KS test against an exponential distribution with the given rate.
pub fn ks_exponential(samples: &[f64], rate: f64) -> KsTest {
    ks_test(
        samples,
        |x| if x <= 0.0 { 0.0 } else { -(-rate * x).exp_m1() },
    )
}

/// Asymptotic p-value `P(D_n > d)` with Stephens' small-sample correction.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Half-width of a central 95% percentile interval.
pub fn percentile_half_width(values: &mut [f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (values.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        values[lo] + (values[hi] - values[lo]) * (pos - lo as f64)
    };
    0.5 * (q(0.975) - q(0.025))
}

/// Bootstrap resampling of iid units.
///
/// Resample `b` draws indices from its own ChaCha8 stream, so results do not
/// depend on thread scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bootstrap {
    pub resamples: usize,
    pub seed: u64,
}

impl Bootstrap {
    pub fn new(resamples: usize, seed: u64) -> Self {
        Bootstrap { resamples, seed }
    }

    /// 95% percentile half-widths of `K` ratio statistics
    /// `sum(numerators[k]) / sum(denominators[k])` over resampled units.
    pub fn ratio_half_widths<const K: usize>(
        &self,
        numerators: &[[f64; K]],
        denominators: &[[f64; K]],
    ) -> [f64; K] {
        assert_eq!(numerators.len(), denominators.len());
        let n = denominators.len();
        if n == 0 || self.resamples < 2 {
            return [f64::NAN; K];
        }
        let estimates: Vec<[f64; K]> = (0..self.resamples)
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(b as u64);
                let mut num = [0.0; K];
                let mut den = [0.0; K];
                for _ in 0..n {
                    let i = rng.random_range(0..n);
                    for k in 0..K {
                        num[k] += numerators[i][k];
                        den[k] += denominators[i][k];
                    }
                }
                std::array::from_fn(|k| num[k] / den[k])
            })
            .collect();
        std::array::from_fn(|k| {
            let mut col: Vec<f64> = estimates.iter().map(|e| e[k]).collect();
            percentile_half_width(&mut col)
        })
    }
}
