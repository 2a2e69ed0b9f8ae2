//! The zero-inflated gamma (ZIG) distribution: a point mass of weight `p` at
//! zero mixed with a gamma(k, θ) density on the positive reals.

mod special;

pub use special::{
    digamma, ln_gamma, regularized_lower_incomplete_gamma, INCGAMMA_MAX_ITER, INCGAMMA_TOLERANCE,
};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower bound applied to `k` and `θ` inside the training loss.
pub const LOSS_PARAM_FLOOR: f64 = 1e-12;

/// Absolute tolerance of [`zig_quantile`] bisection.
pub const QUANTILE_TOLERANCE: f64 = 1e-9;

/// Unconstrained network outputs before the link functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParamTriple {
    pub raw_p: f64,
    pub raw_k: f64,
    pub raw_theta: f64,
}

impl RawParamTriple {
    pub fn new(raw_p: f64, raw_k: f64, raw_theta: f64) -> Self {
        Self { raw_p, raw_k, raw_theta }
    }

    pub fn is_finite(&self) -> bool {
        self.raw_p.is_finite() && self.raw_k.is_finite() && self.raw_theta.is_finite()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.raw_p, self.raw_k, self.raw_theta]
    }
}

impl From<[f64; 3]> for RawParamTriple {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

/// Parameters of one predictive distribution. `p` is the zero-mass weight,
/// `k` the gamma shape and `theta` the gamma scale (units of the target).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZigParams {
    p: f64,
    k: f64,
    theta: f64,
}

impl ZigParams {
    pub fn new(p: f64, k: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("p must lie in [0, 1], got {p}")));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::domain(format!("k must be positive and finite, got {k}")));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::domain(format!("theta must be positive and finite, got {theta}")));
        }
        Ok(Self { p, k, theta })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + eˣ) without overflow for large `x`.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// ln σ(x) = −softplus(−x).
pub fn log_sigmoid(x: f64) -> f64 {
    -softplus(-x)
}

/// Sigmoid on `p`, softplus on `k` and `θ`.
///
/// `k` and `θ` are floored at the smallest normal double so that raw values
/// below about −745, where softplus underflows, still give valid parameters.
pub fn link_transform(raw: RawParamTriple) -> Result<ZigParams> {
    if !raw.is_finite() {
        return Err(Error::invalid(format!("raw parameters must be finite, got {raw:?}")));
    }
    Ok(ZigParams {
        p: sigmoid(raw.raw_p),
        k: softplus(raw.raw_k).max(f64::MIN_POSITIVE),
        theta: softplus(raw.raw_theta).max(f64::MIN_POSITIVE),
    })
}

/// Log density of the mixture with respect to (point mass at 0) + Lebesgue.
///
/// Returns `-inf` when the observation has zero probability under the
/// parameters (`x = 0` with `p = 0`, or `x > 0` with `p = 1`).
pub fn zig_log_pdf(x: f64, params: &ZigParams) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("observation must be nonnegative, got {x}")));
    }
    let ZigParams { p, k, theta } = *params;
    if x == 0.0 {
        return Ok(p.ln());
    }
    if p == 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok((-p).ln_1p() + (k - 1.0) * x.ln() - x / theta - k * theta.ln() - ln_gamma(k))
}

/// F(x) = p + (1 − p) · P(k, x / θ).
pub fn zig_cdf(x: f64, params: &ZigParams) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("observation must be nonnegative, got {x}")));
    }
    let gamma_cdf = regularized_lower_incomplete_gamma(params.k, x / params.theta)?;
    Ok((params.p + (1.0 - params.p) * gamma_cdf).min(1.0))
}

pub fn zig_mean(params: &ZigParams) -> f64 {
    (1.0 - params.p) * params.k * params.theta
}

/// Smallest `x` with F(x) ≥ q, by bisection on the CDF.
pub fn zig_quantile(q: f64, params: &ZigParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("quantile level must lie in [0, 1], got {q}")));
    }
    if q <= params.p {
        return Ok(0.0);
    }
    if q == 1.0 {
        return Ok(f64::INFINITY);
    }
    let mut lo = 0.0;
    let mut hi = (params.k * params.theta).max(params.theta);
    while zig_cdf(hi, params)? < q {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Convergence(format!("quantile {q} bracket overflow")));
        }
    }
    while hi - lo > QUANTILE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if zig_cdf(mid, params)? < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// One draw: exactly 0 with probability `p`, otherwise gamma(k, θ).
pub fn zig_sample<R: Rng + ?Sized>(params: &ZigParams, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    if u < params.p {
        return 0.0;
    }
    (gamma_sample(params.k, rng) * params.theta).max(f64::MIN_POSITIVE)
}

// Marsaglia–Tsang squeeze for shape ≥ 1; shape < 1 is boosted through
// Gamma(k) = Gamma(k + 1) · U^(1/k).
fn gamma_sample<R: Rng + ?Sized>(k: f64, rng: &mut R) -> f64 {
    if k < 1.0 {
        let boosted = gamma_sample(k + 1.0, rng);
        let u: f64 = rng.random();
        return boosted * u.powf(1.0 / k);
    }
    let d = k - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Negative log-likelihood of one observation and its gradient with respect
/// to the raw triple.
///
/// `ln p` and `ln(1 − p)` are evaluated as log-sigmoids, which stay finite for
/// every finite `raw_p`; `k` and `θ` are floored at [`LOSS_PARAM_FLOOR`].
pub fn nll_with_gradient(x: f64, raw: &RawParamTriple) -> (f64, [f64; 3]) {
    let p = sigmoid(raw.raw_p);
    if x == 0.0 {
        return (-log_sigmoid(raw.raw_p), [p - 1.0, 0.0, 0.0]);
    }
    let (k, dk) = floored_softplus(raw.raw_k);
    let (theta, dtheta) = floored_softplus(raw.raw_theta);
    let ln_theta = theta.ln();
    let ln_x = x.ln();
    let log_lik = log_sigmoid(-raw.raw_p) + (k - 1.0) * ln_x - x / theta - k * ln_theta - ln_gamma(k);
    let d_raw_k = (digamma(k) + ln_theta - ln_x) * dk;
    let d_raw_theta = (k / theta - x / (theta * theta)) * dtheta;
    (-log_lik, [p, d_raw_k, d_raw_theta])
}

fn floored_softplus(raw: f64) -> (f64, f64) {
    let v = softplus(raw);
    if v < LOSS_PARAM_FLOOR {
        (LOSS_PARAM_FLOOR, 0.0)
    } else {
        (v, sigmoid(raw))
    }
}

/// Mean negative log-likelihood, the training objective.
pub fn mean_nll(observations: &[f64], raws: &[RawParamTriple]) -> Result<f64> {
    if observations.is_empty() {
        return Err(Error::invalid("mean_nll needs at least one observation"));
    }
    if observations.len() != raws.len() {
        return Err(Error::invalid(format!(
            "mean_nll length mismatch: {} observations, {} parameter triples",
            observations.len(),
            raws.len()
        )));
    }
    let mut total = 0.0;
    for (&x, raw) in observations.iter().zip(raws) {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("observation must be nonnegative, got {x}")));
        }
        total += nll_with_gradient(x, raw).0;
    }
    Ok(total / observations.len() as f64)
}

#[cfg(test)]
mod tests;
