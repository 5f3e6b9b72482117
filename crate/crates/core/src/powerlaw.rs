//! Continuous power-law fitting: maximum-likelihood exponent, KS-optimal
//! lower cutoff and a semi-parametric bootstrap p-value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::rng::Stream;

pub const DEFAULT_REPLICATES: usize = 1000;
/// Fewer replicates than this flag the p-value as unstable.
pub const STABLE_REPLICATES: usize = 100;
/// Minimum sample size for the cutoff search.
pub const MIN_VALUES: usize = 10;
/// Above this sample size the cutoff search uses log-spaced candidates.
pub const CANDIDATE_CAP_ABOVE: usize = 10_000;
pub const CANDIDATE_CAP: usize = 250;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XminSelection {
    pub xmin: f64,
    pub alpha: f64,
    pub ks: f64,
    pub n_tail: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodnessOfFit {
    pub p: f64,
    pub replicates: usize,
    /// Set when `replicates` is below [`STABLE_REPLICATES`].
    pub unstable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub xmin: f64,
    pub alpha: f64,
    pub ks: f64,
    pub p: f64,
    pub n_tail: usize,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub p_unstable: bool,
}

fn check_positive(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        Some(v) => Err(Error::invalid(format!(
            "power-law values must be finite and positive, found {v}"
        ))),
        None => Ok(()),
    }
}

/// Maximum-likelihood exponent `1 + n / Σ ln(x / xmin)` over the values `>= xmin`.
pub fn fit_alpha(values: &[f64], xmin: f64) -> Result<f64> {
    if !(xmin > 0.0 && xmin.is_finite()) {
        return Err(Error::invalid(format!("xmin must be positive, got {xmin}")));
    }
    check_positive(values)?;
    let (n, log_sum) = values
        .iter()
        .filter(|&&x| x >= xmin)
        .fold((0usize, 0.0), |(n, s), &x| (n + 1, s + (x / xmin).ln()));
    if n < 2 {
        return Err(Error::insufficient(format!(
            "need at least 2 values >= xmin, got {n}"
        )));
    }
    if log_sum <= 0.0 {
        return Err(Error::insufficient("all tail values equal xmin"));
    }
    Ok(1.0 + n as f64 / log_sum)
}

/// KS distance between the values `>= xmin` and the fitted power-law CDF.
pub fn ks_statistic(values: &[f64], xmin: f64, alpha: f64) -> f64 {
    let mut tail: Vec<f64> = values.iter().copied().filter(|&x| x >= xmin).collect();
    tail.sort_by(f64::total_cmp);
    let nt = tail.len() as f64;
    let ln_xmin = xmin.ln();
    tail.iter()
        .enumerate()
        .map(|(j, &x)| {
            let cdf = -((1.0 - alpha) * (x.ln() - ln_xmin)).exp_m1();
            ((j + 1) as f64 / nt - cdf).max(cdf - j as f64 / nt)
        })
        .fold(0.0, f64::max)
}

/// Sorted sample with cached logarithms and suffix sums of logarithms.
struct SortedSample {
    x: Vec<f64>,
    ln: Vec<f64>,
    suffix_ln: Vec<f64>,
}

impl SortedSample {
    fn new(values: &[f64]) -> Self {
        let mut x = values.to_vec();
        x.sort_by(f64::total_cmp);
        let ln: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let mut suffix_ln = vec![0.0; x.len() + 1];
        for i in (0..x.len()).rev() {
            suffix_ln[i] = suffix_ln[i + 1] + ln[i];
        }
        SortedSample { x, ln, suffix_ln }
    }

    /// Start index of every candidate cutoff, ascending.
    fn candidates(&self) -> Vec<usize> {
        let n = self.x.len();
        let distinct_start = |i: usize| self.x.partition_point(|&v| v < self.x[i]);
        if n <= CANDIDATE_CAP_ABOVE {
            return (0..n).filter(|&i| i == 0 || self.x[i] != self.x[i - 1]).collect();
        }
        let (lo, hi) = (self.ln[0], self.ln[n - 1]);
        let mut out: Vec<usize> = (0..CANDIDATE_CAP)
            .map(|k| {
                let target = (lo + (hi - lo) * k as f64 / (CANDIDATE_CAP - 1) as f64).exp();
                let i = self.x.partition_point(|&v| v < target).min(n - 1);
                distinct_start(i)
            })
            .collect();
        out.dedup();
        out
    }

    fn deviation(&self, start: usize, alpha: f64, j: usize) -> f64 {
        let nt = (self.x.len() - start) as f64;
        let cdf = -((1.0 - alpha) * (self.ln[start + j] - self.ln[start])).exp_m1();
        ((j + 1) as f64 / nt - cdf).max(cdf - j as f64 / nt)
    }

    /// KS distance for the cutoff at `start` and the absolute index where it is
    /// attained, or `Err(index)` as soon as some deviation reaches `bound`
    /// (strictly exceeds it when `ties_win`).
    ///
    /// `probes` are absolute indices checked first; they come from earlier
    /// candidates and usually trip the bound straight away for poor cutoffs.
    fn ks_below(
        &self,
        start: usize,
        alpha: f64,
        bound: f64,
        ties_win: bool,
        probes: &[usize],
    ) -> Result<(f64, usize), usize> {
        let n = self.x.len();
        let trips = |d: f64| if ties_win { d > bound } else { d >= bound };
        for &i in probes {
            if i >= start && i < n && trips(self.deviation(start, alpha, i - start)) {
                return Err(i);
            }
        }
        let mut best = (0.0, start);
        for j in 0..n - start {
            let d = self.deviation(start, alpha, j);
            if d > best.0 {
                if trips(d) {
                    return Err(start + j);
                }
                best = (d, start + j);
            }
        }
        Ok(best)
    }

    fn mle_alpha(&self, start: usize) -> Option<f64> {
        let nt = self.x.len() - start;
        let log_sum = self.suffix_ln[start] - nt as f64 * self.ln[start];
        (nt >= 2 && log_sum > 0.0).then(|| 1.0 + nt as f64 / log_sum)
    }
}

/// Candidates evaluated in full before the main pass to get a tight bound.
const SEED_CANDIDATES: usize = 24;

/// Chooses the cutoff minimizing the KS distance; ties keep the smallest cutoff.
pub fn select_xmin(values: &[f64]) -> Result<XminSelection> {
    if values.len() < MIN_VALUES {
        return Err(Error::insufficient(format!(
            "cutoff search needs at least {MIN_VALUES} values, got {}",
            values.len()
        )));
    }
    check_positive(values)?;
    let sample = SortedSample::new(values);
    let n = sample.x.len();
    let distinct = 1 + sample.x.windows(2).filter(|w| w[0] != w[1]).count();
    if distinct < 3 {
        return Err(Error::insufficient(format!(
            "cutoff search needs at least 3 distinct values, got {distinct}"
        )));
    }

    let candidates = sample.candidates();
    let mut best: Option<(usize, f64)> = None;
    // argmax of the current best, then the last index that tripped the bound
    let mut probes = [usize::MAX; 2];
    let step = candidates.len().div_ceil(SEED_CANDIDATES).max(1);
    for &start in candidates.iter().step_by(step) {
        let Some(alpha) = sample.mle_alpha(start) else { continue };
        if let Ok((ks, at)) = sample.ks_below(start, alpha, f64::INFINITY, false, &[]) {
            if best.is_none_or(|(_, b)| ks < b) {
                best = Some((start, ks));
                probes[0] = at;
            }
        }
    }
    // The pass below keeps the exact minimum with the smallest cutoff: a
    // candidate left of the current best also wins on a tie.
    for &start in &candidates {
        let Some(alpha) = sample.mle_alpha(start) else { continue };
        let (bound, ties_win) = match best {
            Some((b, _)) if b == start => continue,
            Some((b, ks)) => (ks, start < b),
            None => (f64::INFINITY, false),
        };
        // a step CDF is at least 1/(2 nt) away from any continuous CDF
        let floor = 0.5 / (n - start) as f64;
        if floor > bound || (floor == bound && !ties_win) {
            continue;
        }
        match sample.ks_below(start, alpha, bound, ties_win, &probes) {
            Ok((ks, at)) => {
                best = Some((start, ks));
                probes[0] = at;
            }
            Err(at) => probes[1] = at,
        }
    }
    let (start, _) = best.ok_or_else(|| Error::insufficient("no usable cutoff candidate"))?;
    let xmin = sample.x[start];
    let alpha = fit_alpha(&sample.x[start..], xmin)?;
    Ok(XminSelection {
        xmin,
        alpha,
        ks: ks_statistic(&sample.x[start..], xmin, alpha),
        n_tail: n - start,
    })
}

/// Bootstrap p-value of the fitted power law.
///
/// Each replicate draws `n` points: with probability `n_tail / n` from the
/// fitted power law above `xmin`, otherwise uniformly from the observed values
/// below `xmin`. The cutoff and exponent are refitted on the synthetic set and
/// the replicate counts when its KS distance reaches the observed one.
/// Replicate `r` draws from stream `r` of `seed`, so the result does not
/// depend on evaluation order.
pub fn goodness_of_fit(
    values: &[f64],
    xmin: f64,
    alpha: f64,
    replicates: usize,
    seed: u64,
    exec: Execution,
) -> Result<GoodnessOfFit> {
    if replicates == 0 {
        return Err(Error::invalid("bootstrap needs at least one replicate"));
    }
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must exceed 1, got {alpha}")));
    }
    check_positive(values)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let below_len = sorted.partition_point(|&v| v < xmin);
    let below = &sorted[..below_len];
    let tail_share = (n - below_len) as f64 / n as f64;
    if n - below_len < 2 {
        return Err(Error::insufficient("fewer than 2 values at or above xmin"));
    }
    let observed = ks_statistic(&sorted, xmin, alpha);

    let exceed = map_indexed(exec, replicates, |r| -> Result<bool> {
        let mut rng = Stream::new(seed, r as u64);
        let synthetic: Vec<f64> = (0..n)
            .map(|_| {
                if below.is_empty() || rng.uniform() < tail_share {
                    rng.power_law(xmin, alpha)
                } else {
                    below[rng.index(below.len())]
                }
            })
            .collect();
        Ok(select_xmin(&synthetic)?.ks >= observed)
    });
    let mut count = 0usize;
    for e in exceed {
        count += e? as usize;
    }
    Ok(GoodnessOfFit {
        p: count as f64 / replicates as f64,
        replicates,
        unstable: replicates < STABLE_REPLICATES,
    })
}

pub fn fit(values: &[f64], replicates: usize, seed: u64) -> Result<PowerLawFit> {
    fit_with(values, replicates, seed, Execution::default())
}

pub fn fit_with(values: &[f64], replicates: usize, seed: u64, exec: Execution) -> Result<PowerLawFit> {
    let sel = select_xmin(values)?;
    let gof = goodness_of_fit(values, sel.xmin, sel.alpha, replicates, seed, exec)?;
    Ok(PowerLawFit {
        xmin: sel.xmin,
        alpha: sel.alpha,
        ks: sel.ks,
        p: gof.p,
        n_tail: sel.n_tail,
        n: values.len(),
        replicates,
        seed,
        p_unstable: gof.unstable,
    })
}
