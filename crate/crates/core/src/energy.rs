//! Exact integer energies and representation functions.
//!
//! Every quantity here has at least two routes: a brute-force enumeration
//! (guarded) and a convolution fast path, plus a Fourier route for the
//! additive energy. Integer results are exact; the float convolution path
//! is rounded under a drift guard. Moment accumulators are 128-bit since
//! fourth moments reach `|A|^5`.

use crate::error::{Error, Result};
use crate::fft::{cyclic_convolve_real, round_counts};
use crate::field::PrimeField;
use crate::fourier::{balanced_mag2, dft_fast};
use crate::set::FpSet;

/// Pair-enumeration guard for representation-function oracles.
pub const REP_BRUTE_GUARD: u128 = 1_000_000;
/// Quadruple-enumeration guard for the brute additive energy.
pub const ENERGY_BRUTE_GUARD: u128 = 100_000_000;
/// `c4_aggregates` enumerates the cube of the ratio support; `|A| <= 20`
/// keeps that under ~6e7 popcounts.
pub const C4_GUARD: usize = 20;

/// Where a representation function lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepDomain {
    /// Indexed by elements of `F_p`.
    Additive { p: u64 },
    /// Indexed by exponents mod `p - 1` through the dlog table.
    MultExponent { modulus: u64 },
}

/// An exact integer-valued counting function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepFunction {
    pub domain: RepDomain,
    counts: Vec<u64>,
}

impl RepFunction {
    #[inline]
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    #[inline]
    pub fn count_at(&self, index: usize) -> u64 {
        self.counts[index]
    }

    /// Total mass; `|A| * |B|` for every pairwise representation function.
    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// `sum_x counts[x]^k` in 128-bit arithmetic.
    pub fn moment(&self, k: u32) -> u128 {
        self.counts.iter().map(|&c| (c as u128).pow(k)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MulOp {
    Product,
    Ratio,
}

/// Which route produced an energy value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Brute,
    Convolution,
    Fourier,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Convolution => "convolution",
            Method::Fourier => "fourier",
        }
    }
}

/// An exact energy plus the route that computed it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnergyValue {
    pub value: u128,
    pub method: Method,
}

fn check_same_modulus(a: &FpSet, b: &FpSet) -> Result<()> {
    if a.modulus() != b.modulus() {
        return Err(Error::MismatchedModulus(a.modulus(), b.modulus()));
    }
    Ok(())
}

/// `r_{A+B}` or `r_{A-B}` over `F_p`, by length-p cyclic convolution with
/// rounding under the integrality guard.
pub fn rep_add(field: &PrimeField, a: &FpSet, b: &FpSet, sign: Sign) -> Result<RepFunction> {
    check_same_modulus(a, b)?;
    let p = field.modulus();
    let ia = a.indicator_f64();
    let mut ib = b.indicator_f64();
    if sign == Sign::Minus {
        // r_{A-B}(x) = sum_a A(a) B(a - x): convolve with the reflection.
        ib = reflect(&ib);
    }
    let counts = round_counts(&cyclic_convolve_real(&ia, &ib))?;
    Ok(RepFunction {
        domain: RepDomain::Additive { p },
        counts,
    })
}

/// Double-loop oracle for [`rep_add`], guarded.
pub fn rep_add_brute(field: &PrimeField, a: &FpSet, b: &FpSet, sign: Sign) -> Result<RepFunction> {
    check_same_modulus(a, b)?;
    guard_pairs("rep_add oracle", a.len() as u128 * b.len() as u128)?;
    let p = field.modulus();
    let mut counts = vec![0u64; p as usize];
    for &x in a.elements() {
        for &y in b.elements() {
            let v = match sign {
                Sign::Plus => field.add(x, y),
                Sign::Minus => field.sub(x, y),
            };
            counts[v as usize] += 1;
        }
    }
    Ok(RepFunction {
        domain: RepDomain::Additive { p },
        counts,
    })
}

/// `r_{AB}` or `r_{A/B}` indexed by exponents mod `p - 1`, by cyclic
/// convolution of the dlog indicators. Both sets must avoid 0.
pub fn rep_mul(field: &PrimeField, a: &FpSet, b: &FpSet, op: MulOp) -> Result<RepFunction> {
    check_same_modulus(a, b)?;
    if a.contains_zero() || b.contains_zero() {
        return Err(Error::ZeroInSet);
    }
    let m = field.modulus() - 1;
    let ea: Vec<f64> = a
        .exponent_indicator(field)?
        .iter()
        .map(|&v| v as f64)
        .collect();
    let mut eb: Vec<f64> = b
        .exponent_indicator(field)?
        .iter()
        .map(|&v| v as f64)
        .collect();
    if op == MulOp::Ratio {
        eb = reflect(&eb);
    }
    let counts = round_counts(&cyclic_convolve_real(&ea, &eb))?;
    Ok(RepFunction {
        domain: RepDomain::MultExponent { modulus: m },
        counts,
    })
}

/// Double-loop oracle for [`rep_mul`]: counts through field multiplication
/// and division, using the dlog table only to index the answer.
pub fn rep_mul_brute(field: &PrimeField, a: &FpSet, b: &FpSet, op: MulOp) -> Result<RepFunction> {
    check_same_modulus(a, b)?;
    if a.contains_zero() || b.contains_zero() {
        return Err(Error::ZeroInSet);
    }
    guard_pairs("rep_mul oracle", a.len() as u128 * b.len() as u128)?;
    let m = field.modulus() - 1;
    let mut counts = vec![0u64; m as usize];
    for &x in a.elements() {
        for &y in b.elements() {
            let v = match op {
                MulOp::Product => field.mul(x, y),
                MulOp::Ratio => field.div(x, y)?,
            };
            counts[field.dlog(v)? as usize] += 1;
        }
    }
    Ok(RepFunction {
        domain: RepDomain::MultExponent { modulus: m },
        counts,
    })
}

fn reflect(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0; n];
    for (i, &x) in v.iter().enumerate() {
        out[if i == 0 { 0 } else { n - i }] = x;
    }
    out
}

fn guard_pairs(what: &'static str, got: u128) -> Result<()> {
    if got > REP_BRUTE_GUARD {
        return Err(Error::TooLargeForBrute {
            what,
            got,
            guard: REP_BRUTE_GUARD,
        });
    }
    Ok(())
}

/// Common additive energy `E+(A,B) = #{a1 + b1 = a2 + b2}`.
pub fn additive_energy(
    field: &PrimeField,
    a: &FpSet,
    b: &FpSet,
    method: Method,
) -> Result<EnergyValue> {
    check_same_modulus(a, b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let value = match method {
        Method::Brute => {
            let cost = (a.len() as u128 * b.len() as u128).pow(2);
            if cost > ENERGY_BRUTE_GUARD {
                return Err(Error::TooLargeForBrute {
                    what: "additive energy quadruples",
                    got: cost,
                    guard: ENERGY_BRUTE_GUARD,
                });
            }
            let mut n = 0u128;
            for &a1 in a.elements() {
                for &b1 in b.elements() {
                    let s = field.add(a1, b1);
                    for &a2 in a.elements() {
                        for &b2 in b.elements() {
                            if field.add(a2, b2) == s {
                                n += 1;
                            }
                        }
                    }
                }
            }
            n
        }
        Method::Convolution => rep_add(field, a, b, Sign::Plus)?.moment(2),
        Method::Fourier => {
            let p = field.modulus() as f64;
            let ta = dft_fast(field, a);
            let tb = dft_fast(field, b);
            let s: f64 = ta
                .mag2()
                .iter()
                .zip(tb.mag2())
                .map(|(x, y)| x * y)
                .sum::<f64>()
                / p;
            s.round() as u128
        }
    };
    Ok(EnergyValue { value, method })
}

/// The balanced-function energy `E+(f_A)`, by two routes that must agree:
/// the nonzero-frequency fourth moment, and `E+(A) - |A|^4 / p`.
#[derive(Debug, Clone, Copy)]
pub struct BalancedEnergy {
    pub via_fourier: f64,
    pub via_counts: f64,
}

pub fn balanced_additive_energy(field: &PrimeField, a: &FpSet) -> Result<BalancedEnergy> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let p = field.modulus() as f64;
    let table = dft_fast(field, a);
    let via_fourier = balanced_mag2(&table).iter().map(|&m| m * m).sum::<f64>() / p;
    let e_plus = additive_energy(field, a, a, Method::Convolution)?.value as f64;
    let size = a.len() as f64;
    let via_counts = e_plus - size.powi(4) / p;
    Ok(BalancedEnergy {
        via_fourier,
        via_counts,
    })
}

/// `Ex_k(R) = sum_x r_{R/R}(x)^k` for `k in 1..=4`, exactly, through the
/// exponent convolution. `k = 2` is the multiplicative energy.
pub fn mult_energy_k(field: &PrimeField, r: &FpSet, k: u32) -> Result<EnergyValue> {
    if !(1..=4).contains(&k) {
        return Err(Error::BadMomentOrder(k));
    }
    if r.contains_zero() {
        return Err(Error::ZeroInSet);
    }
    if r.is_empty() {
        return Ok(EnergyValue {
            value: 0,
            method: Method::Convolution,
        });
    }
    let rep = rep_mul(field, r, r, MulOp::Ratio)?;
    Ok(EnergyValue {
        value: rep.moment(k),
        method: Method::Convolution,
    })
}

/// Moment oracle for [`mult_energy_k`]: ratio counts by pairwise field
/// division, no convolution involved.
pub fn mult_energy_k_brute(field: &PrimeField, r: &FpSet, k: u32) -> Result<EnergyValue> {
    if !(1..=4).contains(&k) {
        return Err(Error::BadMomentOrder(k));
    }
    if r.contains_zero() {
        return Err(Error::ZeroInSet);
    }
    if r.is_empty() {
        return Ok(EnergyValue {
            value: 0,
            method: Method::Brute,
        });
    }
    let rep = rep_mul_brute(field, r, r, MulOp::Ratio)?;
    Ok(EnergyValue {
        value: rep.moment(k),
        method: Method::Brute,
    })
}

/// `sigma_x(R) = sum_{lam in R} r_{R/R}(lam)`: the mass the ratio
/// representation puts on `R` itself.
pub fn sigma_mult(field: &PrimeField, r: &FpSet) -> Result<EnergyValue> {
    if r.contains_zero() {
        return Err(Error::ZeroInSet);
    }
    if r.is_empty() {
        return Ok(EnergyValue {
            value: 0,
            method: Method::Convolution,
        });
    }
    let rep = rep_mul(field, r, r, MulOp::Ratio)?;
    let mut total = 0u128;
    for lam in r.iter() {
        total += rep.count_at(field.dlog(lam)? as usize) as u128;
    }
    Ok(EnergyValue {
        value: total,
        method: Method::Convolution,
    })
}

/// Triple-count oracle for [`sigma_mult`]: `#{(lam, r1, r2) : lam r2 = r1}`
/// by direct multiplication and membership tests.
pub fn sigma_mult_brute(field: &PrimeField, r: &FpSet) -> Result<EnergyValue> {
    if r.contains_zero() {
        return Err(Error::ZeroInSet);
    }
    guard_pairs("sigma oracle", r.len() as u128 * r.len() as u128)?;
    let mut total = 0u128;
    for lam in r.iter() {
        for r2 in r.iter() {
            if r.contains(field.mul(lam, r2)) {
                total += 1;
            }
        }
    }
    Ok(EnergyValue {
        value: total,
        method: Method::Brute,
    })
}

/// First and second moments of `C4(A)(alpha, beta, gamma) = |A n aA n bA n cA|`
/// over all dilation triples, by enumeration of the ratio-set cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct C4Aggregates {
    /// `sum C4`, which collapses to `|A|^4`.
    pub sum: u128,
    /// `sum C4^2`, which equals `Ex_4(A)`.
    pub sum_sq: u128,
}

pub fn c4_aggregates(field: &PrimeField, a: &FpSet) -> Result<C4Aggregates> {
    if a.contains_zero() {
        return Err(Error::ZeroInSet);
    }
    if a.len() > C4_GUARD {
        return Err(Error::TooLargeForBrute {
            what: "c4 aggregates",
            got: a.len() as u128,
            guard: C4_GUARD as u128,
        });
    }
    if a.is_empty() {
        return Ok(C4Aggregates { sum: 0, sum_sq: 0 });
    }
    // C4 vanishes unless all three dilations lie in A/A; over that support,
    // record which elements of A survive each dilation as a bitmask.
    let mut support = Vec::new();
    {
        let mut seen = std::collections::HashSet::new();
        for &x in a.elements() {
            for &y in a.elements() {
                let alpha = field.div(x, y)?;
                if seen.insert(alpha) {
                    support.push(alpha);
                }
            }
        }
    }
    support.sort_unstable();
    let masks: Vec<u32> = support
        .iter()
        .map(|&alpha| {
            let mut m = 0u32;
            for (i, &x) in a.elements().iter().enumerate() {
                // x in alpha * A  <=>  x / alpha in A
                if a.contains(field.div(x, alpha).expect("alpha != 0")) {
                    m |= 1 << i;
                }
            }
            m
        })
        .collect();
    let mut sum = 0u128;
    let mut sum_sq = 0u128;
    for &ma in &masks {
        for &mb in &masks {
            let mab = ma & mb;
            if mab == 0 {
                continue;
            }
            for &mc in &masks {
                let c = (mab & mc).count_ones() as u128;
                sum += c;
                sum_sq += c * c;
            }
        }
    }
    Ok(C4Aggregates { sum, sum_sq })
}

/// `sum_x (sum_{r in R} w(x r^{-1}))^2` where `w` is the autocorrelation of
/// the balanced function, `w(y) = r_{A-A}(y) - |A|^2 / p`. This is the
/// weighted second moment the spectral energy bounds pass through.
pub fn balanced_dilate_second_moment(field: &PrimeField, a: &FpSet, r: &FpSet) -> Result<f64> {
    check_same_modulus(a, r)?;
    if r.contains_zero() {
        return Err(Error::ZeroInSet);
    }
    let p = field.modulus();
    let rep = rep_add(field, a, a, Sign::Minus)?;
    let mean = (a.len() as f64).powi(2) / p as f64;
    let w: Vec<f64> = rep.counts().iter().map(|&c| c as f64 - mean).collect();
    let mut total = 0.0f64;
    for x in 0..p {
        let mut s = 0.0f64;
        for lam in r.iter() {
            let y = field.div(x, lam)?;
            s += w[y as usize];
        }
        total += s * s;
    }
    Ok(total)
}
