//! Prime-field arithmetic with dense discrete-logarithm tables.
//!
//! A [`PrimeField`] fixes an odd prime `p`, finds the smallest primitive
//! root `g`, and tabulates both `e -> g^e` and its inverse `x -> dlog x`.
//! The tables turn multiplicative questions mod `p` into additive ones
//! mod `p - 1`, which is what the energy kernels run on.

use crate::error::{Error, Result};

/// An odd prime field with full dlog/pow tables.
///
/// Immutable after construction; share freely across threads.
#[derive(Debug, Clone)]
pub struct PrimeField {
    p: u64,
    g: u64,
    /// `dlog[x] = e` with `g^e = x (mod p)` for `x in 1..p`; `dlog[0]` is a sentinel.
    dlog: Vec<u32>,
    /// `pow[e] = g^e mod p` for `e in 0..p-1`.
    pow: Vec<u32>,
}

impl PrimeField {
    /// Builds the field for an odd prime `p`, with verified primality and
    /// complete dlog/pow tables.
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::EvenPrime);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        // Dense tables index by element value; keep entries in u32.
        if p > u32::MAX as u64 {
            return Err(Error::ModulusTooLarge(p));
        }
        let g = smallest_primitive_root(p);
        let mut dlog = vec![0u32; p as usize];
        let mut pow = vec![0u32; (p - 1) as usize];
        let mut x = 1u64;
        for e in 0..(p - 1) {
            pow[e as usize] = x as u32;
            dlog[x as usize] = e as u32;
            x = x * g % p;
        }
        debug_assert_eq!(x, 1);
        Ok(PrimeField { p, g, dlog, pow })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Smallest positive primitive root mod `p`.
    #[inline]
    pub fn generator(&self) -> u64 {
        self.g
    }

    /// The exponent `e in [0, p-2]` with `g^e = x (mod p)`.
    #[inline]
    pub fn dlog(&self, x: u64) -> Result<u64> {
        let r = x % self.p;
        if r == 0 {
            return Err(Error::ZeroElement);
        }
        Ok(self.dlog[r as usize] as u64)
    }

    /// `g^e mod p`; the exponent is reduced mod `p - 1`.
    #[inline]
    pub fn pow_of_generator(&self, e: u64) -> u64 {
        self.pow[(e % (self.p - 1)) as usize] as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a % self.p + b % self.p;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let (a, b) = (a % self.p, b % self.p);
        if a >= b {
            a - b
        } else {
            self.p - b + a
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        let a = a % self.p;
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a % self.p) as u128 * (b % self.p) as u128 % self.p as u128) as u64
    }

    /// Multiplicative inverse through the dlog table.
    #[inline]
    pub fn inv(&self, x: u64) -> Result<u64> {
        let e = self.dlog(x)?;
        if e == 0 {
            return Ok(1);
        }
        Ok(self.pow[(self.p - 1 - e) as usize] as u64)
    }

    /// `x / y mod p`.
    #[inline]
    pub fn div(&self, x: u64, y: u64) -> Result<u64> {
        Ok(self.mul(x, self.inv(y)?))
    }
}

/// Deterministic Miller-Rabin, valid for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    // This witness set is known to be exact below 3.3 * 10^24.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
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

/// Smallest `g` with multiplicative order `p - 1`: checks
/// `g^((p-1)/q) != 1` for every prime `q | p - 1`.
fn smallest_primitive_root(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    'cand: for g in 2..p {
        for &q in &factors {
            if pow_mod(g, (p - 1) / q, p) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("every odd prime has a primitive root")
}
