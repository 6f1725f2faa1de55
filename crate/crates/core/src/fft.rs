//! Transform kernels: a power-of-two complex FFT, a Bluestein chirp
//! transform for arbitrary (prime) lengths, a floating-point cyclic
//! convolution, and an exact integer cyclic convolution backed by a
//! three-prime NTT.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// In-place iterative radix-2 FFT, length must be a power of two.
/// `inverse` omits the 1/n scaling; callers scale when they need it.
pub fn fft_pow2(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * std::f64::consts::PI / len as f64;
        let wlen = Complex64::new(ang.cos(), ang.sin());
        for chunk in buf.chunks_mut(len) {
            let mut w = Complex64::new(1.0, 0.0);
            let half = len / 2;
            for i in 0..half {
                let u = chunk[i];
                let v = chunk[i + half] * w;
                chunk[i] = u + v;
                chunk[i + half] = u - v;
                w *= wlen;
            }
        }
        len <<= 1;
    }
}

/// Forward DFT of arbitrary length n: `X[k] = sum_j x[j] e(-2 pi i jk / n)`.
///
/// Bluestein's identity `jk = (j^2 + k^2 - (k-j)^2) / 2` turns the transform
/// into one linear convolution of length n against the conjugate chirp,
/// carried out at the next power of two >= 2n - 1. Chirp arguments are
/// reduced mod 2n in integer arithmetic before the sine/cosine call, so
/// precision does not degrade with n.
pub struct Bluestein {
    n: usize,
    m: usize,
    /// `chirp[j] = e^(-pi i j^2 / n)`, j in 0..n.
    chirp: Vec<Complex64>,
    /// FFT of the zero-padded conjugate chirp, folded over +-(n-1).
    kernel_fft: Vec<Complex64>,
}

impl Bluestein {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let m = (2 * n - 1).next_power_of_two();
        let two_n = 2 * n as u64;
        let chirp: Vec<Complex64> = (0..n as u64)
            .map(|j| {
                let r = (j * j) % two_n;
                let ang = -std::f64::consts::PI * r as f64 / n as f64;
                Complex64::new(ang.cos(), ang.sin())
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..n {
            let c = chirp[j].conj();
            kernel[j] = c;
            if j != 0 {
                kernel[m - j] = c;
            }
        }
        fft_pow2(&mut kernel, false);
        Bluestein {
            n,
            m,
            chirp,
            kernel_fft: kernel,
        }
    }

    /// Transforms a real input vector of length n.
    pub fn dft_real(&self, input: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(input.len(), self.n);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.m];
        for j in 0..self.n {
            buf[j] = self.chirp[j] * input[j];
        }
        fft_pow2(&mut buf, false);
        for (b, k) in buf.iter_mut().zip(&self.kernel_fft) {
            *b *= k;
        }
        fft_pow2(&mut buf, true);
        let scale = 1.0 / self.m as f64;
        (0..self.n)
            .map(|k| self.chirp[k] * buf[k] * scale)
            .collect()
    }
}

/// Cyclic convolution of two real vectors of equal length n
/// (`out[k] = sum_i a[i] b[(k - i) mod n]`), via pow2 FFT and index folding.
pub fn cyclic_convolve_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    if n == 0 {
        return Vec::new();
    }
    let m = (2 * n - 1).next_power_of_two();
    let mut fa = vec![Complex64::new(0.0, 0.0); m];
    let mut fb = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..n {
        fa[i].re = a[i];
        fb[i].re = b[i];
    }
    fft_pow2(&mut fa, false);
    fft_pow2(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft_pow2(&mut fa, true);
    let scale = 1.0 / m as f64;
    let mut out = vec![0.0f64; n];
    for (i, v) in fa.iter().take(2 * n - 1).enumerate() {
        out[if i < n { i } else { i - n }] += v.re * scale;
    }
    out
}

/// Rounds every convolution entry to the nearest integer, erroring if any
/// entry sits further than 1e-3 from one. Guards against silent float drift.
pub fn round_counts(conv: &[f64]) -> Result<Vec<u64>> {
    conv.iter()
        .enumerate()
        .map(|(index, &value)| {
            let r = value.round();
            if (value - r).abs() > 1e-3 {
                Err(Error::ConvolutionNotIntegral { index, value })
            } else {
                Ok(if r < 0.0 { 0 } else { r as u64 })
            }
        })
        .collect()
}

// ----- exact integer convolution (three-prime NTT + CRT) -----

const NTT_PRIMES: [u64; 3] = [998_244_353, 1_004_535_809, 469_762_049];
const NTT_ROOT: u64 = 3; // primitive root of all three

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn ntt(buf: &mut [u64], p: u64, inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut wlen = pow_mod(NTT_ROOT, (p - 1) / len as u64, p);
        if inverse {
            wlen = pow_mod(wlen, p - 2, p);
        }
        for chunk in buf.chunks_mut(len) {
            let mut w = 1u64;
            let half = len / 2;
            for i in 0..half {
                let u = chunk[i];
                let v = mul_mod(chunk[i + half], w, p);
                chunk[i] = if u + v >= p { u + v - p } else { u + v };
                chunk[i + half] = if u >= v { u - v } else { u + p - v };
                w = mul_mod(w, wlen, p);
            }
        }
        len <<= 1;
    }
    if inverse {
        let n_inv = pow_mod(n as u64, p - 2, p);
        for x in buf.iter_mut() {
            *x = mul_mod(*x, n_inv, p);
        }
    }
}

fn convolve_mod(a: &[u64], b: &[u64], p: u64, m: usize) -> Vec<u64> {
    let mut fa = vec![0u64; m];
    let mut fb = vec![0u64; m];
    for (x, &v) in fa.iter_mut().zip(a) {
        *x = v % p;
    }
    for (x, &v) in fb.iter_mut().zip(b) {
        *x = v % p;
    }
    ntt(&mut fa, p, false);
    ntt(&mut fb, p, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = mul_mod(*x, *y, p);
    }
    ntt(&mut fa, p, true);
    fa
}

/// Exact cyclic convolution of nonnegative integer vectors of equal length.
///
/// Entries must satisfy `sum(a) * sum(b) < prod(NTT_PRIMES) ~ 4.7e26`; the
/// counting workloads here stay far below that. Small lengths go through a
/// direct O(n^2) loop, longer ones through the NTT with CRT reassembly.
pub fn cyclic_convolve_exact(a: &[u64], b: &[u64]) -> Vec<u128> {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    if n == 0 {
        return Vec::new();
    }
    let sa: u128 = a.iter().map(|&x| x as u128).sum();
    let sb: u128 = b.iter().map(|&x| x as u128).sum();
    let cap = NTT_PRIMES[0] as u128 * NTT_PRIMES[1] as u128 * NTT_PRIMES[2] as u128;
    assert!(
        sa.saturating_mul(sb) < cap,
        "convolution mass overflows the CRT range"
    );
    if n <= 512 {
        let mut out = vec![0u128; n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                let k = i + j;
                out[if k >= n { k - n } else { k }] += x as u128 * y as u128;
            }
        }
        return out;
    }
    let m = (2 * n - 1).next_power_of_two();
    let residues: Vec<Vec<u64>> = NTT_PRIMES
        .iter()
        .map(|&p| convolve_mod(a, b, p, m))
        .collect();
    let [p0, p1, p2] = NTT_PRIMES;
    let inv_p0_mod_p1 = pow_mod(p0 % p1, p1 - 2, p1);
    let inv_p01_mod_p2 = pow_mod((p0 as u128 * p1 as u128 % p2 as u128) as u64, p2 - 2, p2);
    let mut lin = vec![0u128; n];
    for k in 0..2 * n - 1 {
        let (r0, r1, r2) = (residues[0][k], residues[1][k], residues[2][k]);
        // Garner reconstruction: v = r0 + p0 * t1 + p0 p1 * t2.
        let t1 = mul_mod((r1 + p1 - r0 % p1) % p1, inv_p0_mod_p1, p1);
        let v01 = r0 as u128 + p0 as u128 * t1 as u128;
        let v01_mod_p2 = (v01 % p2 as u128) as u64;
        let t2 = mul_mod((r2 + p2 - v01_mod_p2) % p2, inv_p01_mod_p2, p2);
        let v = v01 + p0 as u128 * p1 as u128 * t2 as u128;
        lin[if k >= n { k - n } else { k }] += v;
    }
    lin
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn naive_dft(x: &[f64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut s = Complex64::new(0.0, 0.0);
                for (j, &v) in x.iter().enumerate() {
                    let ang = -2.0 * std::f64::consts::PI * (j * k % n) as f64 / n as f64;
                    s += Complex64::new(ang.cos(), ang.sin()) * v;
                }
                s
            })
            .collect()
    }

    #[test]
    fn bluestein_matches_naive_dft() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for n in [1usize, 2, 3, 5, 7, 11, 13, 101, 127] {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let fast = Bluestein::new(n).dft_real(&x);
            let slow = naive_dft(&x);
            for (f, s) in fast.iter().zip(&slow) {
                assert!((f - s).norm() < 1e-9, "n={n}: {f} vs {s}");
            }
        }
    }

    fn naive_cyclic_u64(a: &[u64], b: &[u64]) -> Vec<u128> {
        let n = a.len();
        let mut out = vec![0u128; n];
        for i in 0..n {
            for j in 0..n {
                out[(i + j) % n] += a[i] as u128 * b[j] as u128;
            }
        }
        out
    }

    #[test]
    fn float_cyclic_convolution_rounds_exactly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for n in [1usize, 6, 97, 101] {
            let a: Vec<u64> = (0..n).map(|_| rng.random_range(0..50)).collect();
            let b: Vec<u64> = (0..n).map(|_| rng.random_range(0..50)).collect();
            let fa: Vec<f64> = a.iter().map(|&x| x as f64).collect();
            let fb: Vec<f64> = b.iter().map(|&x| x as f64).collect();
            let got = round_counts(&cyclic_convolve_real(&fa, &fb)).unwrap();
            let want = naive_cyclic_u64(&a, &b);
            for (g, w) in got.iter().zip(&want) {
                assert_eq!(*g as u128, *w);
            }
        }
    }

    #[test]
    fn exact_convolution_both_strategies() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        // n = 100 exercises the direct path, n = 1009 the NTT path.
        for n in [100usize, 1009] {
            let a: Vec<u64> = (0..n).map(|_| rng.random_range(0..1000)).collect();
            let b: Vec<u64> = (0..n).map(|_| rng.random_range(0..1000)).collect();
            assert_eq!(cyclic_convolve_exact(&a, &b), naive_cyclic_u64(&a, &b));
        }
    }

    #[test]
    fn integrality_guard_fires() {
        let drifted = [1.0, 2.5, 3.0];
        assert!(matches!(
            round_counts(&drifted),
            Err(crate::error::Error::ConvolutionNotIntegral { index: 1, .. })
        ));
    }
}
