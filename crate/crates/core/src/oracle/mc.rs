//! Seeded Monte Carlo over channel realizations.
//!
//! Samples are split into substreams; substream `i` is a ChaCha12 generator
//! seeded with the run seed and switched to stream `i`. Each substream keeps
//! its own running moments, and the moments are merged in index order, so a
//! result depends only on (seed, samples, substreams) and never on how many
//! workers ran it.
//!
//! A sweep reuses the same channel draws at every operating point: the SNR
//! is γ⁰ times a gain that does not depend on γ⁰.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::analytic::RelayScenario;
use crate::channels::{FadingParams, PointingParams, ThzChannelConstants};
use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
    pub substreams: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            seed: 1,
            samples: 1_000_000,
            substreams: 64,
        }
    }
}

impl McConfig {
    pub fn new(seed: u64, samples: usize, substreams: usize) -> Result<Self> {
        let c = McConfig {
            seed,
            samples,
            substreams,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "Monte Carlo needs at least {MIN_SAMPLES} samples (got {})",
                self.samples
            )));
        }
        if self.substreams == 0 || self.substreams > self.samples {
            return Err(Error::InvalidParameter(format!(
                "substream count {} must be in 1..={}",
                self.substreams, self.samples
            )));
        }
        Ok(())
    }

    /// Generator of substream `index`.
    pub fn stream(&self, index: usize) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    fn share(&self, index: usize) -> usize {
        let base = self.samples / self.substreams;
        base + usize::from(index < self.samples % self.substreams)
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        let (na, nb) = (self.n as f64, o.n as f64);
        Moments {
            n,
            mean: self.mean + d * nb / n as f64,
            m2: self.m2 + o.m2 + d * d * na * nb / n as f64,
        }
    }

    fn estimate(&self) -> Estimate {
        let var = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        Estimate {
            mean: self.mean,
            std_error: (var / self.n as f64).sqrt(),
            samples: self.n,
        }
    }
}

/// Draws α-μ amplitudes Ω(G/μ)^{1/α}, G ~ Gamma(μ, 1).
#[derive(Debug, Clone, Copy)]
pub struct AlphaMuSampler {
    params: FadingParams,
    gamma: Gamma<f64>,
}

impl AlphaMuSampler {
    pub fn new(params: FadingParams) -> Result<Self> {
        let gamma = Gamma::new(params.mu, 1.0)
            .map_err(|e| Error::InvalidParameter(format!("gamma variate: {e}")))?;
        Ok(AlphaMuSampler { params, gamma })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g = self.gamma.sample(rng);
        self.params.omega * (g / self.params.mu).powf(1.0 / self.params.alpha)
    }
}

pub fn sample_alpha_mu<R: Rng + ?Sized>(params: &FadingParams, rng: &mut R) -> Result<f64> {
    Ok(AlphaMuSampler::new(*params)?.sample(rng))
}

/// Inverse CDF of the pointing gain: S0·u^{1/φ}.
pub fn pointing_from_uniform(params: &PointingParams, u: f64) -> f64 {
    params.s0 * u.powf(1.0 / params.phi)
}

pub fn sample_pointing<R: Rng + ?Sized>(params: &PointingParams, rng: &mut R) -> f64 {
    // (0, 1]: 1 − [0, 1) keeps u away from zero.
    let u = 1.0 - rng.random::<f64>();
    pointing_from_uniform(params, u)
}

/// Gains (|h_f h_p|², |h_f′|²) of one relay realization.
#[derive(Debug, Clone, Copy)]
pub struct RelayGainSampler {
    thz: AlphaMuSampler,
    pointing: PointingParams,
    rf: AlphaMuSampler,
}

impl RelayGainSampler {
    pub fn new(thz: FadingParams, pointing: PointingParams, rf: FadingParams) -> Result<Self> {
        Ok(RelayGainSampler {
            thz: AlphaMuSampler::new(thz)?,
            pointing,
            rf: AlphaMuSampler::new(rf)?,
        })
    }

    pub fn for_scenario(s: &RelayScenario) -> Result<Self> {
        Self::new(s.thz.fading, s.thz.pointing, s.rf.fading)
    }

    pub fn thz_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let h = self.thz.sample(rng) * sample_pointing(&self.pointing, rng);
        h * h
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let x1 = self.thz_gain(rng);
        let r = self.rf.sample(rng);
        (x1, r * r)
    }
}

/// min(γ1⁰|h_f h_p|², γ2⁰|h_f′|²) for one independent draw per hop.
pub fn sample_end_to_end<R: Rng + ?Sized>(s: &RelayScenario, rng: &mut R) -> Result<f64> {
    let (x1, x2) = RelayGainSampler::for_scenario(s)?.sample(rng);
    Ok((s.thz.gamma0 * x1).min(s.rf.gamma0 * x2))
}

/// Statistic estimated from end-to-end SNR samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McQuantity {
    /// P(γ < γ_th), threshold in linear units.
    Outage(f64),
    AvgSnr,
    /// E[log2(1 + γ)].
    Capacity,
    /// E[log2 γ].
    CapacityLb,
}

impl McQuantity {
    fn eval(&self, gamma: f64) -> f64 {
        match *self {
            McQuantity::Outage(th) => f64::from(u8::from(gamma < th)),
            McQuantity::AvgSnr => gamma,
            McQuantity::Capacity => gamma.ln_1p() / std::f64::consts::LN_2,
            McQuantity::CapacityLb => gamma.log2(),
        }
    }
}

/// Which link the draws feed.
#[derive(Debug, Clone, Copy)]
pub enum McLink {
    /// min of the two hops.
    Relay(RelayGainSampler),
    /// The THz hop on its own.
    Direct {
        thz: AlphaMuSampler,
        pointing: PointingParams,
    },
}

impl McLink {
    pub fn relay(s: &RelayScenario) -> Result<Self> {
        Ok(McLink::Relay(RelayGainSampler::for_scenario(s)?))
    }

    pub fn direct(thz: &ThzChannelConstants) -> Result<Self> {
        Ok(McLink::Direct {
            thz: AlphaMuSampler::new(thz.fading)?,
            pointing: thz.pointing,
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self {
            McLink::Relay(s) => s.sample(rng),
            McLink::Direct { thz, pointing } => {
                let h = thz.sample(rng) * sample_pointing(pointing, rng);
                (h * h, f64::INFINITY)
            }
        }
    }
}

/// Estimates every quantity at every operating point (γ1⁰, γ2⁰) from one
/// set of draws. `result[point][quantity]`. γ2⁰ is ignored for a direct link.
pub fn estimate_sweep(
    link: &McLink,
    points: &[(f64, f64)],
    quantities: &[McQuantity],
    cfg: &McConfig,
) -> Result<Vec<Vec<Estimate>>> {
    cfg.validate()?;
    if points.iter().any(|&(a, b)| !(a > 0.0) || !(b > 0.0)) {
        return Err(Error::InvalidParameter(
            "faded-free SNRs must be positive".into(),
        ));
    }
    let width = points.len() * quantities.len();
    let partials: Vec<Vec<Moments>> = (0..cfg.substreams)
        .into_par_iter()
        .map(|i| {
            let mut rng = cfg.stream(i);
            let mut acc = vec![Moments::default(); width];
            for _ in 0..cfg.share(i) {
                let (x1, x2) = link.draw(&mut rng);
                for (p, &(g1, g2)) in points.iter().enumerate() {
                    let gamma = (g1 * x1).min(g2 * x2);
                    for (q, quantity) in quantities.iter().enumerate() {
                        acc[p * quantities.len() + q].push(quantity.eval(gamma));
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Moments::default(); width];
    for part in partials {
        for (t, m) in total.iter_mut().zip(part) {
            *t = t.merge(m);
        }
    }
    let estimates: Vec<Estimate> = total.iter().map(Moments::estimate).collect();
    if estimates.iter().any(|e| !e.mean.is_finite()) {
        return Err(Error::Overflow {
            func: "estimate_sweep",
            detail: "non-finite sample statistic".into(),
        });
    }
    Ok(estimates
        .chunks(quantities.len().max(1))
        .map(<[Estimate]>::to_vec)
        .collect())
}

/// One quantity of the relay link at its own operating point.
pub fn estimate(quantity: McQuantity, s: &RelayScenario, cfg: &McConfig) -> Result<Estimate> {
    let link = McLink::relay(s)?;
    Ok(estimate_sweep(&link, &[(s.thz.gamma0, s.rf.gamma0)], &[quantity], cfg)?[0][0])
}

/// Draws `n` end-to-end SNRs from substream 0.
pub fn end_to_end_samples(s: &RelayScenario, n: usize, seed: u64) -> Result<Vec<f64>> {
    let sampler = RelayGainSampler::for_scenario(s)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let (x1, x2) = sampler.sample(&mut rng);
            (s.thz.gamma0 * x1).min(s.rf.gamma0 * x2)
        })
        .collect())
}

/// Kolmogorov–Smirnov distance between a sample and a CDF. Sorts in place.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
