//! Dirichlet characters modulo an odd prime.
//!
//! For prime `q` the unit group is cyclic, so a character is determined by
//! its value on one primitive root `g`: the character of index `j` sends
//! `g^k` to `e(jk/(q-1))`. A discrete-log table over `g` turns evaluation
//! into one lookup plus one root-of-unity lookup, and makes full-family
//! scans O(q) per character.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::trig;

/// Default cap on the modulus; the discrete-log table is O(q) 32-bit entries.
pub const DEFAULT_TABLE_LIMIT: u32 = 1 << 25;

const DLOG_SENTINEL: u32 = 0xFFFF_FFFF;

#[derive(Debug, thiserror::Error)]
pub enum DirichletError {
    #[error("modulus {0} is not an odd prime")]
    NotPrime(u64),
    #[error("modulus {q} exceeds the table limit {limit}")]
    TableLimit { q: u64, limit: u32 },
    #[error("character index {j} out of range for modulus {q}")]
    BadIndex { q: u32, j: u32 },
    #[error("cache file {0} failed validation")]
    CacheInvalid(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Character parity: `χ(-1) = +1` (even) or `-1` (odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `χ(-1)` as a real sign.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Which characters a family scan runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharFilter {
    All,
    Odd,
    /// Includes the principal character (index 0).
    Even,
    Nonprincipal,
}

impl CharFilter {
    fn admits(self, j: u32) -> bool {
        match self {
            CharFilter::All => true,
            CharFilter::Odd => j % 2 == 1,
            CharFilter::Even => j % 2 == 0,
            CharFilter::Nonprincipal => j != 0,
        }
    }
}

/// A prime modulus with its primitive root, discrete-log table and lazily
/// filled caches. Immutable after construction; safe to share across threads.
pub struct PrimeContext {
    q: u32,
    g: u32,
    /// `dlog[n]` = k with g^k ≡ n (mod q) for n in [1, q-1]; entry 0 is a sentinel.
    dlog: Vec<u32>,
    /// e(r/(q-1)) for r in [0, q-1), built on first character evaluation.
    roots: OnceLock<Vec<Complex64>>,
    /// e(n/q) for n in [0, q), built on first Gauss-sum request.
    additive: OnceLock<Vec<Complex64>>,
    /// τ(χ_j) per index, each filled once under atomic publish.
    gauss: OnceLock<Vec<OnceLock<Complex64>>>,
}

impl std::fmt::Debug for PrimeContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeContext")
            .field("q", &self.q)
            .field("g", &self.g)
            .finish()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d <= n / d {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

impl PrimeContext {
    /// Build the context for an odd prime `q` with the default table limit.
    pub fn new(q: u64) -> Result<Self, DirichletError> {
        Self::with_limit(q, DEFAULT_TABLE_LIMIT)
    }

    pub fn with_limit(q: u64, limit: u32) -> Result<Self, DirichletError> {
        if q > limit as u64 {
            return Err(DirichletError::TableLimit { q, limit });
        }
        if q < 3 || !is_prime(q) {
            return Err(DirichletError::NotPrime(q));
        }
        let q = q as u32;
        let g = smallest_primitive_root(q);
        let mut dlog = vec![DLOG_SENTINEL; q as usize];
        let mut x = 1u64;
        for k in 0..q - 1 {
            dlog[x as usize] = k;
            x = x * g as u64 % q as u64;
        }
        debug_assert_eq!(x, 1);
        Ok(PrimeContext {
            q,
            g,
            dlog,
            roots: OnceLock::new(),
            additive: OnceLock::new(),
            gauss: OnceLock::new(),
        })
    }

    /// Load the discrete-log table from `dir/q<q>.dlog`, or build it and
    /// write the cache file. A loaded table is validated before use and
    /// rebuilt (and rewritten) if validation fails.
    pub fn with_cache(q: u64, dir: &Path) -> Result<Self, DirichletError> {
        let path = dlog_cache_path(dir, q);
        if path.is_file() {
            if let Ok(ctx) = Self::load_dlog_cache(q, &path) {
                return Ok(ctx);
            }
        }
        let ctx = Self::new(q)?;
        std::fs::create_dir_all(dir)?;
        ctx.write_dlog_cache(&path)?;
        Ok(ctx)
    }

    /// Read a cached table and validate the full round trip
    /// `g^{dlog[n]} ≡ n (mod q)` plus the sentinel at entry 0.
    pub fn load_dlog_cache(q: u64, path: &Path) -> Result<Self, DirichletError> {
        if q < 3 || !is_prime(q) {
            return Err(DirichletError::NotPrime(q));
        }
        let q = q as u32;
        let mut raw = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut raw)?;
        if raw.len() != q as usize * 4 {
            return Err(DirichletError::CacheInvalid(path.to_path_buf()));
        }
        let dlog: Vec<u32> = raw
            .chunks_exact(4)
            .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        let g = smallest_primitive_root(q);
        let mut x = 1u64;
        let mut ok = dlog[0] == DLOG_SENTINEL;
        for k in 0..q - 1 {
            ok &= dlog[x as usize] == k;
            x = x * g as u64 % q as u64;
        }
        if !ok {
            return Err(DirichletError::CacheInvalid(path.to_path_buf()));
        }
        Ok(PrimeContext {
            q,
            g,
            dlog,
            roots: OnceLock::new(),
            additive: OnceLock::new(),
            gauss: OnceLock::new(),
        })
    }

    /// Write the table as a little-endian u32 array of length `q`
    /// (entry 0 = 0xFFFFFFFF).
    pub fn write_dlog_cache(&self, path: &Path) -> Result<(), DirichletError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for &v in &self.dlog {
            f.write_all(&v.to_le_bytes())?;
        }
        f.flush()?;
        Ok(())
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    pub fn primitive_root(&self) -> u32 {
        self.g
    }

    pub fn phi(&self) -> u32 {
        self.q - 1
    }

    /// Discrete log of `n` (in `[1, q-1]`) to base `g`.
    pub fn dlog(&self, n: u32) -> u32 {
        debug_assert!(n >= 1 && n < self.q);
        self.dlog[n as usize]
    }

    pub fn character(&self, j: u32) -> Result<Character<'_>, DirichletError> {
        if j >= self.q - 1 {
            return Err(DirichletError::BadIndex { q: self.q, j });
        }
        Ok(Character { ctx: self, j })
    }

    /// Characters of the family in index order.
    pub fn characters(&self, filter: CharFilter) -> Vec<Character<'_>> {
        (0..self.q - 1)
            .filter(|&j| filter.admits(j))
            .map(|j| Character { ctx: self, j })
            .collect()
    }

    fn roots(&self) -> &[Complex64] {
        self.roots.get_or_init(|| {
            let order = (self.q - 1) as f64;
            (0..self.q - 1)
                .map(|r| trig::e(r as f64 / order))
                .collect()
        })
    }

    /// e(n/q) table shared by Gauss sums and exponential-sum checks.
    pub fn additive_characters(&self) -> &[Complex64] {
        self.additive
            .get_or_init(|| (0..self.q).map(|n| trig::e(n as f64 / self.q as f64)).collect())
    }

    fn gauss_slot(&self, j: u32) -> &OnceLock<Complex64> {
        let table = self
            .gauss
            .get_or_init(|| (0..self.q - 1).map(|_| OnceLock::new()).collect());
        &table[j as usize]
    }
}

fn smallest_primitive_root(q: u32) -> u32 {
    let factors = prime_factors(q - 1);
    'outer: for g in 2..q {
        for &p in &factors {
            if pow_mod(g as u64, ((q - 1) / p) as u64, q as u64) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

/// `dir/q<q>.dlog`
pub fn dlog_cache_path(dir: &Path, q: u64) -> PathBuf {
    dir.join(format!("q{q}.dlog"))
}

/// One character mod `q`, identified by its index against the smallest
/// primitive root. Copyable; borrows the context.
#[derive(Clone, Copy)]
pub struct Character<'a> {
    ctx: &'a PrimeContext,
    j: u32,
}

impl std::fmt::Debug for Character<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "χ_{}(mod {})", self.j, self.ctx.q)
    }
}

impl<'a> Character<'a> {
    pub fn context(&self) -> &'a PrimeContext {
        self.ctx
    }

    pub fn index(&self) -> u32 {
        self.j
    }

    pub fn is_principal(&self) -> bool {
        self.j == 0
    }

    /// Odd iff the index is odd, since `χ_j(-1) = e(j/2) = (-1)^j`.
    pub fn parity(&self) -> Parity {
        if self.j % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `χ_j(n)` for any integer `n`; zero when `q | n`.
    pub fn value(&self, n: i64) -> Complex64 {
        let q = self.ctx.q as i64;
        let r = n.rem_euclid(q) as u32;
        self.value_at_residue(r)
    }

    /// `χ_j(n)` for a reduced residue `n` in `[0, q)`.
    ///
    /// The phase index `j·dlog[n] mod (q-1)` is reduced in integer
    /// arithmetic, so algebraic identities between character values
    /// (conjugation, multiplicativity of phases) hold bit-exactly on the
    /// shared root table.
    pub fn value_at_residue(&self, n: u32) -> Complex64 {
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let order = (self.ctx.q - 1) as u64;
        let r = (self.j as u64 * self.ctx.dlog[n as usize] as u64) % order;
        self.ctx.roots()[r as usize]
    }

    /// Gauss sum `τ(χ) = Σ_{n=1}^{q-1} χ(n) e(n/q)` by direct summation,
    /// cached in the context on first use.
    pub fn gauss_sum(&self) -> Complex64 {
        *self.ctx.gauss_slot(self.j).get_or_init(|| {
            let additive = self.ctx.additive_characters();
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 1..self.ctx.q {
                acc += self.value_at_residue(n) * additive[n as usize];
            }
            acc
        })
    }
}

/// Fill the whole Gauss-sum cache in parallel; useful before family scans.
pub fn precompute_gauss_sums(ctx: &PrimeContext) {
    ctx.additive_characters();
    ctx.characters(CharFilter::All)
        .par_iter()
        .for_each(|chi| {
            chi.gauss_sum();
        });
}
