//! Deterministic random streams and the error models of the simulation
//! harness.
//!
//! Reports must be byte-identical across runs, hosts, and thread counts,
//! so the generator is pinned rather than delegated to a library whose
//! stream may change between releases:
//!
//! - the stream generator is xoshiro256++ (Blackman & Vigna), a published
//!   64-bit algorithm with fixed, documented state transitions;
//! - substream `i` of root seed `s` is seeded with the `i`-th output of
//!   the SplitMix64 sequence started at `s`, then expanded into the four
//!   xoshiro words by further SplitMix64 steps (the seeding procedure
//!   recommended by the xoshiro authors). Substreams are O(1) to derive,
//!   so replication `i` can be generated on any thread in any order;
//! - normal deviates use the Box-Muller transform on two fresh uniforms.
//!   No state is cached, so a stream's output depends only on its seed
//!   and the sequence of draw calls.
//!
//! Identical `(seed, stream index)` therefore always yields an identical
//! sample sequence, bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A xoshiro256++ stream with O(1) derivable substreams.
#[derive(Debug, Clone)]
pub struct RandomStream {
    s: [u64; 4],
}

impl RandomStream {
    /// Stream for a bare seed (substream 0 of that seed).
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    /// Substream `index` of `root_seed`; used as the per-replication
    /// stream in simulations.
    pub fn substream(root_seed: u64, index: u64) -> Self {
        let mut sm = root_seed.wrapping_add(GOLDEN.wrapping_mul(index));
        let sub_seed = splitmix64(&mut sm);
        let mut sm = sub_seed;
        let mut s = [0u64; 4];
        for w in s.iter_mut() {
            *w = splitmix64(&mut sm);
        }
        // An all-zero state is the one fixed point of xoshiro; unreachable
        // in practice but cheap to exclude.
        if s == [0, 0, 0, 0] {
            s[0] = GOLDEN;
        }
        Self { s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform deviate in [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate via Box-Muller on two fresh uniforms.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        // 1 - u lies in (0, 1], keeping the logarithm finite.
        let r = (-2.0 * (1.0 - self.uniform01()).ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * self.uniform01();
        r * theta.cos()
    }
}

/// Error distribution driving a simulated regression.
///
/// Serialized with a `type` tag (`normal`, `uniform`, `mixture`,
/// `ar_exponential`), matching the simulation configuration format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ErrorModel<T> {
    /// Independent N(0, sigma²).
    Normal { sigma: T },
    /// Independent uniform on [a, b].
    Uniform { a: T, b: T },
    /// Scale mixture: N(0, sigma1²) with probability p1, else N(0, sigma2²).
    Mixture { sigma1: T, p1: T, sigma2: T, p2: T },
    /// Stationary first-order autoregression with autocorrelation
    /// exp(-q·lag) and stationary standard deviation sigma, initialized
    /// from the stationary law.
    ArExponential { sigma: T, q: T },
}

impl<T: Scalar> ErrorModel<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: T| v.is_finite();
        match *self {
            ErrorModel::Normal { sigma } => {
                if !(ok(sigma) && sigma > T::zero()) {
                    return Err(Error::InvalidParameter("normal model needs sigma > 0".into()));
                }
            }
            ErrorModel::Uniform { a, b } => {
                if !(ok(a) && ok(b) && a < b) {
                    return Err(Error::InvalidParameter("uniform model needs a < b".into()));
                }
            }
            ErrorModel::Mixture { sigma1, p1, sigma2, p2 } => {
                let probs_ok = p1 >= T::zero() && p2 >= T::zero();
                let unit = (p1 + p2 - T::one()).abs() <= T::from_f64_c(1e-9);
                if !(ok(sigma1) && ok(sigma2) && sigma1 > T::zero() && sigma2 > T::zero()) {
                    return Err(Error::InvalidParameter("mixture model needs positive sigmas".into()));
                }
                if !(probs_ok && unit) {
                    return Err(Error::InvalidParameter(
                        "mixture weights must be non-negative and sum to one".into(),
                    ));
                }
            }
            ErrorModel::ArExponential { sigma, q } => {
                if !(ok(sigma) && sigma > T::zero() && ok(q) && q > T::zero()) {
                    return Err(Error::InvalidParameter(
                        "autoregressive model needs sigma > 0 and q > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Variance of a single draw (the stationary variance for the
    /// autoregressive model).
    pub fn marginal_variance(&self) -> T {
        match *self {
            ErrorModel::Normal { sigma } => sigma * sigma,
            ErrorModel::Uniform { a, b } => {
                let w = b - a;
                w * w / T::from_f64_c(12.0)
            }
            ErrorModel::Mixture { sigma1, p1, sigma2, p2 } => {
                p1 * sigma1 * sigma1 + p2 * sigma2 * sigma2
            }
            ErrorModel::ArExponential { sigma, .. } => sigma * sigma,
        }
    }
}

/// Draws an error vector of length `n` from `model` using `stream`.
pub fn sample_errors<T: Scalar>(
    model: &ErrorModel<T>,
    n: usize,
    stream: &mut RandomStream,
) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("cannot sample an empty error vector".into()));
    }
    model.validate()?;
    let conv = T::from_f64_c;
    let mut out = Vec::with_capacity(n);
    match *model {
        ErrorModel::Normal { sigma } => {
            for _ in 0..n {
                out.push(sigma * conv(stream.standard_normal()));
            }
        }
        ErrorModel::Uniform { a, b } => {
            for _ in 0..n {
                out.push(a + (b - a) * conv(stream.uniform01()));
            }
        }
        ErrorModel::Mixture { sigma1, p1, sigma2, .. } => {
            for _ in 0..n {
                let pick = conv(stream.uniform01());
                let sd = if pick < p1 { sigma1 } else { sigma2 };
                out.push(sd * conv(stream.standard_normal()));
            }
        }
        ErrorModel::ArExponential { sigma, q } => {
            let phi = (-q).exp();
            let innovation_sd = sigma * (T::one() - phi * phi).sqrt();
            let mut prev = sigma * conv(stream.standard_normal());
            out.push(prev);
            for _ in 1..n {
                prev = phi * prev + innovation_sd * conv(stream.standard_normal());
                out.push(prev);
            }
        }
    }
    Ok(out)
}
