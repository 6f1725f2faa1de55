//! Fourier side: transforms of set indicators, balanced functions, and
//! spectrum extraction.
//!
//! Conventions: `hat A(xi) = sum_{a in A} e(-xi a)` with `e(x) = exp(2 pi i x / p)`.
//! Conjugate symmetry `hat A(p - xi) = conj(hat A(xi))` is enforced
//! structurally: only the lower half is computed, the upper half mirrored,
//! so `mag2[xi] == mag2[p - xi]` holds bit for bit.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::Bluestein;
use crate::field::PrimeField;
use crate::set::FpSet;

/// Per-frequency values and squared magnitudes of a set transform.
#[derive(Debug, Clone)]
pub struct FourierTable {
    p: u64,
    values: Vec<Complex64>,
    mag2: Vec<f64>,
    source_size: usize,
}

impl FourierTable {
    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn source_size(&self) -> usize {
        self.source_size
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn mag2(&self) -> &[f64] {
        &self.mag2
    }

    /// `max_{xi != 0} |hat A(xi)|`.
    pub fn max_nonzero_magnitude(&self) -> f64 {
        self.mag2[1..].iter().fold(0.0f64, |m, &v| m.max(v)).sqrt()
    }

    /// `sum_xi |hat A(xi)|^2`, which Parseval pins to `p |A|`.
    pub fn parseval_sum(&self) -> f64 {
        self.mag2.iter().sum()
    }

    fn from_lower_half(p: u64, mut values: Vec<Complex64>, source_size: usize) -> Self {
        let n = p as usize;
        for xi in 1..=(n - 1) / 2 {
            values[n - xi] = values[xi].conj();
        }
        let mag2 = values.iter().map(|v| v.norm_sqr()).collect();
        FourierTable {
            p,
            values,
            mag2,
            source_size,
        }
    }
}

/// Direct `O(p |A|)` evaluation; the oracle the fast path is checked against.
pub fn dft_direct(field: &PrimeField, a: &FpSet) -> FourierTable {
    let p = field.modulus();
    let n = p as usize;
    // Roots e(-k) for k in 0..p, computed once.
    let roots: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = -2.0 * std::f64::consts::PI * k as f64 / p as f64;
            Complex64::new(ang.cos(), ang.sin())
        })
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let half = n / 2;
    values[..=half]
        .par_iter_mut()
        .enumerate()
        .for_each(|(xi, out)| {
            let mut s = Complex64::new(0.0, 0.0);
            for &x in a.elements() {
                s += roots[(xi as u64 * x % p) as usize];
            }
            *out = s;
        });
    FourierTable::from_lower_half(p, values, a.len())
}

/// Chirp-transform evaluation in `O(p log p)`; identical contract to
/// [`dft_direct`].
pub fn dft_fast(field: &PrimeField, a: &FpSet) -> FourierTable {
    let p = field.modulus();
    let values = Bluestein::new(p as usize).dft_real(&a.indicator_f64());
    FourierTable::from_lower_half(p, values, a.len())
}

/// The set of large exponential sums at threshold `eps |A|`.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eps: f64,
    /// `eps |A|`, the magnitude cutoff.
    pub threshold: f64,
    /// Frequencies with `|hat A(r)| >= eps |A| (1 - 1e-9)`, ascending.
    pub elements: Vec<u64>,
    /// `|hat A(r)|` per element, same order.
    pub magnitudes: Vec<f64>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The spectrum with 0 removed, as a set.
    pub fn punctured(&self, p: u64) -> FpSet {
        FpSet::from_elements(p, self.elements.iter().copied().filter(|&r| r != 0))
            .expect("spectrum elements are reduced mod p")
    }
}

/// Extracts `Spec_eps` from a table. Membership uses the inclusive band
/// `|hat A(r)| >= eps |A| (1 - 1e-9)` so that rounding can never evict 0 or
/// break the `Spec = -Spec` symmetry.
pub fn spectrum(table: &FourierTable, eps: f64) -> Result<SpectrumResult> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::BadEpsilon(eps));
    }
    if table.source_size == 0 {
        return Err(Error::EmptySet);
    }
    let threshold = eps * table.source_size as f64;
    let band = threshold * (1.0 - 1e-9);
    let band2 = band * band;
    let mut elements = Vec::new();
    let mut magnitudes = Vec::new();
    for (xi, &m2) in table.mag2.iter().enumerate() {
        if m2 >= band2 {
            elements.push(xi as u64);
            magnitudes.push(m2.sqrt());
        }
    }
    Ok(SpectrumResult {
        eps,
        threshold,
        elements,
        magnitudes,
    })
}

/// `|hat f_A(xi)|^2`: the balanced function kills the zero frequency and
/// agrees with the indicator transform elsewhere.
pub fn balanced_mag2(table: &FourierTable) -> Vec<f64> {
    let mut v = table.mag2.clone();
    v[0] = 0.0;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::{self, FpSet};

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn full_set_and_singleton() {
        let f = field(7);
        let full = FpSet::from_elements(7, 0..7).unwrap();
        let t = dft_direct(&f, &full);
        assert!((t.values()[0].re - 7.0).abs() < 1e-12);
        for xi in 1..7 {
            assert!(t.mag2()[xi] < 1e-18);
        }
        // The full character sum cancels on the fast path too.
        let t = dft_fast(&f, &full);
        assert!((t.values()[0].re - 7.0).abs() < 1e-9);
        for xi in 1..7 {
            assert!(t.mag2()[xi].sqrt() < 1e-6);
        }
        let zero = FpSet::from_elements(7, [0]).unwrap();
        let t = dft_direct(&f, &zero);
        for xi in 0..7 {
            assert!((t.values()[xi] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn quadratic_residues_mod_7_have_flat_tail() {
        // {1,2,4} is the order-3 subgroup of F_7*; every nonzero frequency
        // carries |hat A|^2 = 2.
        let f = field(7);
        let a = set::mult_subgroup(&f, 3).unwrap();
        let t = dft_direct(&f, &a);
        for xi in 1..7 {
            assert!(
                (t.mag2()[xi] - 2.0).abs() < 1e-9,
                "xi={xi}: {}",
                t.mag2()[xi]
            );
        }
        assert!((t.values()[0].re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn fast_path_matches_direct() {
        let f = field(1009);
        let a = set::random_set(&f, 100, 42, false).unwrap();
        let fast = dft_fast(&f, &a);
        let slow = dft_direct(&f, &a);
        let mut worst = 0.0f64;
        for (u, v) in fast.values().iter().zip(slow.values()) {
            worst = worst.max((u - v).norm());
        }
        assert!(worst < 1e-6, "max deviation {worst}");
    }

    #[test]
    fn empty_set_transform_is_zero_but_spectrum_rejects() {
        let f = field(13);
        let t = dft_fast(&f, &FpSet::empty(13));
        assert!(t.parseval_sum() < 1e-12);
        assert_eq!(spectrum(&t, 0.5).unwrap_err(), Error::EmptySet);
    }

    #[test]
    fn spectrum_examples_mod_7() {
        let f = field(7);
        let full = FpSet::from_elements(7, 0..7).unwrap();
        let s = spectrum(&dft_direct(&f, &full), 0.5).unwrap();
        assert_eq!(s.elements, vec![0]);

        let a = set::mult_subgroup(&f, 3).unwrap();
        let t = dft_direct(&f, &a);
        // sqrt(2) = 1.414.. >= 0.4 * 3 = 1.2: everything is in.
        let s = spectrum(&t, 0.4).unwrap();
        assert_eq!(s.elements, (0..7).collect::<Vec<_>>());
        // sqrt(2) < 0.5 * 3 = 1.5: only the zero frequency survives.
        let s = spectrum(&t, 0.5).unwrap();
        assert_eq!(s.elements, vec![0]);

        assert!(spectrum(&t, 0.0).is_err());
        assert!(spectrum(&t, 1.5).is_err());
        assert!(spectrum(&t, f64::NAN).is_err());
    }

    #[test]
    fn spectrum_is_symmetric_and_bounded() {
        let f = field(211);
        for seed in 0..5 {
            let a = set::random_set(&f, 20 + 3 * seed as usize, seed, false).unwrap();
            let t = dft_fast(&f, &a);
            for eps in [0.1, 0.25, 0.5, 0.9] {
                let s = spectrum(&t, eps).unwrap();
                assert!(s.elements.contains(&0));
                for &r in &s.elements {
                    if r != 0 {
                        assert!(s.elements.binary_search(&(211 - r)).is_ok());
                    }
                }
                let delta = a.len() as f64 / 211.0;
                assert!(s.len() as f64 <= 1.0 / (delta * eps * eps) + 1e-9);
            }
        }
    }

    #[test]
    fn balanced_function_parseval() {
        let f = field(101);
        let a = set::random_set(&f, 23, 7, false).unwrap();
        let t = dft_fast(&f, &a);
        let bal = balanced_mag2(&t);
        assert_eq!(bal[0], 0.0);
        let total: f64 = bal.iter().sum();
        let want = 101.0 * 23.0 - 23.0 * 23.0;
        assert!((total - want).abs() <= 1e-9 * want);
        // Singleton check: |hat A(1)|^2 = 1.
        let z = FpSet::from_elements(7, [0]).unwrap();
        let t = dft_direct(&field(7), &z);
        assert!((balanced_mag2(&t)[1] - 1.0).abs() < 1e-12);
    }
}
