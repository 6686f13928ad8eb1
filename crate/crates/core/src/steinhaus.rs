//! Reproducible Steinhaus random multiplicative functions.
//!
//! A Steinhaus sample assigns an independent uniform unit-circle value `X_p`
//! to every prime and extends completely multiplicatively:
//! `X_n = Π_{p^a ∥ n} X_p^a`, `X_1 = 1`, `X_{-n} = X_{-1}·X_n` with
//! `X_{-1} = ±1`.
//!
//! Phases are generated by a keyed counter mixer, not a sequential RNG: the
//! phase of `X_p` is a pure function of `(seed, stream, p)`, so lazy or
//! parallel evaluation in any order reproduces the same sample bit for bit.
//! The mixer is part of the reproducibility contract and is identified in
//! output manifests by [`MIXER_ID`].

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::trig;

/// Identifier of the frozen phase mixer (see [`mix`]): a Weyl-style key
/// combination followed by two splitmix64 finalizer rounds.
pub const MIXER_ID: &str = "weyl-splitmix64x2/1";

/// Default sampler capacity; supports truncations well past 10007 terms.
pub const DEFAULT_CAPACITY: u32 = 2_000_000;

/// Counter reserved for the sign of `X_{-1}`.
const COUNTER_SIGN: u64 = 0;
/// Counter reserved for the global phase η used by the random series.
const COUNTER_ETA: u64 = 1;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const WEYL: u64 = 0xD1B5_4A32_D192_ED03;
const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX2: u64 = 0x94D0_49BB_1331_11EB;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SteinhausError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("index {index} exceeds sampler capacity {capacity}")]
    CapacityExceeded { index: u64, capacity: u32 },
    #[error("X_0 is undefined")]
    ZeroIndex,
}

/// Seed plus sub-stream id; together they determine every phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seed: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        SeedSpec { seed, stream }
    }
}

/// Sign of `X_{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

fn splitmix_round(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(MIX1);
    x ^= x >> 27;
    x = x.wrapping_mul(MIX2);
    x ^ (x >> 31)
}

/// Keyed 64-bit mixing of `(seed, stream, counter)`.
fn mix(seed: u64, stream: u64, counter: u64) -> u64 {
    let keyed = seed
        .wrapping_add(stream.wrapping_mul(GOLDEN))
        .wrapping_add(counter.wrapping_mul(WEYL));
    splitmix_round(splitmix_round(keyed).wrapping_add(GOLDEN))
}

/// Top 53 bits mapped to `[0, 1)`.
fn unit_fraction(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Smallest-prime-factor table built by a linear sieve.
pub struct SpfSieve {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SpfSieve {
    /// Sieve up to `capacity` (inclusive); `capacity ≥ 2`.
    pub fn new(capacity: u32) -> Self {
        assert!(capacity >= 2, "sieve capacity must be at least 2");
        let n = capacity as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                if p > spf[i] || p as usize * i > n {
                    break;
                }
                spf[p as usize * i] = p;
            }
        }
        SpfSieve { spf, primes }
    }

    pub fn capacity(&self) -> u32 {
        (self.spf.len() - 1) as u32
    }

    /// Smallest prime factor of `n`, `2 ≤ n ≤ capacity`.
    pub fn spf(&self, n: u32) -> u32 {
        self.spf[n as usize]
    }

    pub fn is_prime(&self, n: u32) -> bool {
        n >= 2 && self.spf[n as usize] == n
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// `P⁺(n)`: largest prime factor, with `P⁺(1) = 1`.
    pub fn largest_prime_factor(&self, n: u32) -> u32 {
        let mut n = n;
        let mut last = 1;
        while n > 1 {
            let p = self.spf[n as usize];
            while n % p == 0 {
                n /= p;
            }
            last = p; // spf chain is ascending
        }
        last
    }

    pub fn factorize(&self, mut n: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize];
            let mut a = 0;
            while n % p == 0 {
                n /= p;
                a += 1;
            }
            out.push((p, a));
        }
        out
    }
}

/// A seeded Steinhaus sample. Immutable; cheap to clone (the sieve is shared).
#[derive(Clone)]
pub struct SteinhausSampler {
    seed: SeedSpec,
    sieve: Arc<SpfSieve>,
    sign_minus_one: Sign,
}

impl SteinhausSampler {
    pub fn new(seed: SeedSpec, capacity: u32) -> Self {
        Self::with_sieve(seed, Arc::new(SpfSieve::new(capacity)))
    }

    /// Sampler with the default capacity [`DEFAULT_CAPACITY`].
    pub fn with_default_capacity(seed: SeedSpec) -> Self {
        Self::new(seed, DEFAULT_CAPACITY)
    }

    /// Build on a shared sieve; ensembles of samplers reuse one table.
    pub fn with_sieve(seed: SeedSpec, sieve: Arc<SpfSieve>) -> Self {
        let sign_minus_one = if mix(seed.seed, seed.stream, COUNTER_SIGN) & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        };
        SteinhausSampler { seed, sieve, sign_minus_one }
    }

    pub fn seed_spec(&self) -> SeedSpec {
        self.seed
    }

    pub fn capacity(&self) -> u32 {
        self.sieve.capacity()
    }

    pub fn sieve(&self) -> &Arc<SpfSieve> {
        &self.sieve
    }

    pub fn sign_minus_one(&self) -> Sign {
        self.sign_minus_one
    }

    /// Same sample with `X_{-1}` pinned to `sign`; idempotent.
    pub fn fix_sign(&self, sign: Sign) -> Self {
        let mut out = self.clone();
        out.sign_minus_one = sign;
        out
    }

    /// The phase fraction `u_p ∈ [0,1)` with `X_p = e(u_p)`.
    pub fn phase_fraction(&self, p: u32) -> Result<f64, SteinhausError> {
        if p as u64 > self.capacity() as u64 {
            return Err(SteinhausError::CapacityExceeded {
                index: p as u64,
                capacity: self.capacity(),
            });
        }
        if !self.sieve.is_prime(p) {
            return Err(SteinhausError::NotPrime(p));
        }
        Ok(unit_fraction(mix(self.seed.seed, self.seed.stream, p as u64)))
    }

    /// `X_p` for prime `p`.
    pub fn phase(&self, p: u32) -> Result<Complex64, SteinhausError> {
        Ok(trig::e(self.phase_fraction(p)?))
    }

    /// The global phase η, drawn from a reserved counter independently of
    /// every `X_p`.
    pub fn eta(&self) -> Complex64 {
        trig::e(unit_fraction(mix(self.seed.seed, self.seed.stream, COUNTER_ETA)))
    }

    /// Accumulated phase exponent of `X_n`: the right-folded sum of `u_p`
    /// along the smallest-prime-factor chain. Shared by [`Self::value`] and
    /// [`Self::values_up_to`] so scalar and bulk evaluation agree bit for bit.
    fn phase_exponent(&self, n: u32) -> f64 {
        if n == 1 {
            return 0.0;
        }
        let p = self.sieve.spf(n);
        let u = unit_fraction(mix(self.seed.seed, self.seed.stream, p as u64));
        u + self.phase_exponent(n / p)
    }

    /// `X_n` for nonzero integer `n` with `|n| ≤ capacity`.
    pub fn value(&self, n: i64) -> Result<Complex64, SteinhausError> {
        if n == 0 {
            return Err(SteinhausError::ZeroIndex);
        }
        let abs = n.unsigned_abs();
        if abs > self.capacity() as u64 {
            return Err(SteinhausError::CapacityExceeded {
                index: abs,
                capacity: self.capacity(),
            });
        }
        let z = trig::e(self.phase_exponent(abs as u32));
        Ok(if n < 0 { self.sign_minus_one.value() * z } else { z })
    }

    /// `X_n` for `n = 0..=n_max` (entry 0 is zero-filled and unused).
    pub fn values_up_to(&self, n_max: u32) -> Result<Vec<Complex64>, SteinhausError> {
        if n_max as u64 > self.capacity() as u64 {
            return Err(SteinhausError::CapacityExceeded {
                index: n_max as u64,
                capacity: self.capacity(),
            });
        }
        let mut exps = vec![0.0f64; n_max as usize + 1];
        let mut out = vec![Complex64::new(0.0, 0.0); n_max as usize + 1];
        if n_max >= 1 {
            out[1] = Complex64::new(1.0, 0.0);
        }
        for n in 2..=n_max as usize {
            let p = self.sieve.spf(n as u32);
            let u = unit_fraction(mix(self.seed.seed, self.seed.stream, p as u64));
            exps[n] = u + exps[n / p as usize];
            out[n] = trig::e(exps[n]);
        }
        Ok(out)
    }
}
