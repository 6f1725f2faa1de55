//! Subsets of `F_p`: seeded generators for every set family the harness
//! sweeps over, plus sumset/product-set machinery.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitRing;
use crate::error::{Error, Result};
use crate::fft::cyclic_convolve_exact;
use crate::field::PrimeField;

/// Pairwise closure check is quadratic; above this size the subgroup test
/// switches to the dlog characterization.
pub const SUBGROUP_CLOSURE_GUARD: usize = 2048;

/// Brute-force guard for the four-tuple `rep_sq_sum_aa` oracle.
pub const AA4_ORACLE_GUARD: usize = 12;

/// A subset of `F_p` with membership bitmap and sorted element list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpSet {
    p: u64,
    bitmap: BitRing,
    elements: Vec<u64>,
}

impl FpSet {
    pub fn empty(p: u64) -> Self {
        FpSet {
            p,
            bitmap: BitRing::new(p as usize),
            elements: Vec::new(),
        }
    }

    /// Builds a set from arbitrary (possibly unsorted, repeated) elements.
    pub fn from_elements(p: u64, elems: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut bitmap = BitRing::new(p as usize);
        let mut elements = Vec::new();
        for x in elems {
            if x >= p {
                return Err(Error::OutOfRange {
                    what: "element",
                    got: x,
                    lo: 0,
                    hi: p - 1,
                });
            }
            if !bitmap.get(x as usize) {
                bitmap.set(x as usize);
                elements.push(x);
            }
        }
        elements.sort_unstable();
        Ok(FpSet {
            p,
            bitmap,
            elements,
        })
    }

    fn from_bitmap(p: u64, bitmap: BitRing) -> Self {
        let elements = bitmap.iter_ones().map(|i| i as u64).collect();
        FpSet {
            p,
            bitmap,
            elements,
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        x < self.p && self.bitmap.get(x as usize)
    }

    #[inline]
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements.iter().copied()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0)
    }

    /// 0/1 indicator over `0..p` as floats, the Fourier-side view.
    pub fn indicator_f64(&self) -> Vec<f64> {
        let mut v = vec![0.0f64; self.p as usize];
        for &x in &self.elements {
            v[x as usize] = 1.0;
        }
        v
    }

    /// 0/1 indicator over exponents `0..p-1`; requires `0` not in the set.
    pub fn exponent_indicator(&self, field: &PrimeField) -> Result<Vec<u64>> {
        if self.contains_zero() {
            return Err(Error::ZeroInSet);
        }
        let mut v = vec![0u64; (self.p - 1) as usize];
        for &x in &self.elements {
            v[field.dlog(x)? as usize] = 1;
        }
        Ok(v)
    }

    /// Writes the newline-delimited decimal format with a `p=<p>` header.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "p={}", self.p)?;
        for &x in &self.elements {
            writeln!(w, "{x}")?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl BufRead) -> Result<Self> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let p: u64 = header
            .trim()
            .strip_prefix("p=")
            .ok_or_else(|| Error::Parse("set file must start with a p=<p> header".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad modulus in set header: {e}")))?;
        let mut elems = Vec::new();
        for line in r.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            elems.push(
                t.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("bad set element {t:?}: {e}")))?,
            );
        }
        FpSet::from_elements(p, elems)
    }
}

fn check_same_modulus(a: &FpSet, b: &FpSet) -> Result<()> {
    if a.modulus() != b.modulus() {
        return Err(Error::MismatchedModulus(a.modulus(), b.modulus()));
    }
    Ok(())
}

/// The interval `{1, .., n}`.
pub fn interval(field: &PrimeField, n: u64) -> Result<FpSet> {
    let p = field.modulus();
    if n == 0 || n > p - 1 {
        return Err(Error::OutOfRange {
            what: "interval length",
            got: n,
            lo: 1,
            hi: p - 1,
        });
    }
    FpSet::from_elements(p, 1..=n)
}

/// Uniform sample of `size` distinct elements, reproducible from the seed.
pub fn random_set(field: &PrimeField, size: usize, seed: u64, avoid_zero: bool) -> Result<FpSet> {
    let p = field.modulus();
    let universe = if avoid_zero { p - 1 } else { p };
    if size as u64 > universe {
        return Err(Error::OutOfRange {
            what: "sample size",
            got: size as u64,
            lo: 0,
            hi: universe,
        });
    }
    let lo = if avoid_zero { 1 } else { 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if (size as u64) * 3 <= universe {
        // Sparse: rejection sampling against the membership bitmap.
        let mut bitmap = BitRing::new(p as usize);
        let mut picked = 0usize;
        while picked < size {
            let x = rng.random_range(lo..p);
            if !bitmap.get(x as usize) {
                bitmap.set(x as usize);
                picked += 1;
            }
        }
        Ok(FpSet::from_bitmap(p, bitmap))
    } else {
        // Dense: partial Fisher-Yates over the whole universe.
        let mut pool: Vec<u64> = (lo..p).collect();
        for i in 0..size {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        FpSet::from_elements(p, pool[..size].iter().copied())
    }
}

/// The unique multiplicative subgroup of order `d`, for `d | p - 1`.
pub fn mult_subgroup(field: &PrimeField, d: u64) -> Result<FpSet> {
    let pm1 = field.modulus() - 1;
    if d == 0 || !pm1.is_multiple_of(d) {
        return Err(Error::NotADivisor { d, pm1 });
    }
    let step = pm1 / d;
    FpSet::from_elements(
        field.modulus(),
        (0..d).map(|j| field.pow_of_generator(j * step)),
    )
}

/// Is `h` closed under multiplication (hence a subgroup)?
pub fn is_subgroup(field: &PrimeField, h: &FpSet) -> bool {
    if h.is_empty() || h.contains_zero() {
        return false;
    }
    if h.len() <= SUBGROUP_CLOSURE_GUARD {
        for &a in h.elements() {
            for &b in h.elements() {
                if !h.contains(field.mul(a, b)) {
                    return false;
                }
            }
        }
        return true;
    }
    // Large sets: H is the order-d subgroup iff d | p-1 and every dlog is a
    // multiple of (p-1)/d.
    let d = h.len() as u64;
    let pm1 = field.modulus() - 1;
    if !pm1.is_multiple_of(d) {
        return false;
    }
    let step = pm1 / d;
    h.iter()
        .all(|x| field.dlog(x).map(|e| e % step == 0).unwrap_or(false))
}

/// The coset `lam * H` of a verified subgroup `H`.
pub fn coset(field: &PrimeField, h: &FpSet, lam: u64) -> Result<FpSet> {
    if lam.is_multiple_of(field.modulus()) {
        return Err(Error::ZeroElement);
    }
    if !is_subgroup(field, h) {
        return Err(Error::NotASubgroup);
    }
    FpSet::from_elements(field.modulus(), h.iter().map(|x| field.mul(lam, x)))
}

/// `A + B = {a + b}` as a set, via bitmap rotations.
pub fn sumset(field: &PrimeField, a: &FpSet, b: &FpSet) -> Result<FpSet> {
    check_same_modulus(a, b)?;
    let p = field.modulus();
    if a.is_empty() || b.is_empty() {
        return Ok(FpSet::empty(p));
    }
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut acc = BitRing::new(p as usize);
    for &x in small.elements() {
        acc.or_rotated(&big.bitmap, x as usize);
    }
    Ok(FpSet::from_bitmap(p, acc))
}

/// `AB = {ab}` as a set; both sets must avoid 0.
pub fn product_set(field: &PrimeField, a: &FpSet, b: &FpSet) -> Result<FpSet> {
    check_same_modulus(a, b)?;
    if a.contains_zero() || b.contains_zero() {
        return Err(Error::ZeroInSet);
    }
    let p = field.modulus();
    if a.is_empty() || b.is_empty() {
        return Ok(FpSet::empty(p));
    }
    let m = (p - 1) as usize;
    let mut exp_b = BitRing::new(m);
    for &x in b.elements() {
        exp_b.set(field.dlog(x)? as usize);
    }
    let mut acc = BitRing::new(m);
    for &x in a.elements() {
        acc.or_rotated(&exp_b, field.dlog(x)? as usize);
    }
    FpSet::from_elements(p, acc.iter_ones().map(|e| field.pow_of_generator(e as u64)))
}

/// `sum_x r_{AA+AA}(x)^2` where `r_{AA}` counts ordered pairs: the ratio
/// representation is built on exponents, transported to `F_p`, self-convolved
/// additively, and squared. All stages use exact integer convolutions.
pub fn rep_sq_sum_aa(field: &PrimeField, a: &FpSet) -> Result<u128> {
    if a.contains_zero() {
        return Err(Error::ZeroInSet);
    }
    if a.is_empty() {
        return Ok(0);
    }
    let p = field.modulus();
    let exp = a.exponent_indicator(field)?;
    let r_aa_exp = cyclic_convolve_exact(&exp, &exp);
    let mut r_aa = vec![0u64; p as usize];
    for (e, &c) in r_aa_exp.iter().enumerate() {
        r_aa[field.pow_of_generator(e as u64) as usize] = c as u64;
    }
    let r_aaaa = cyclic_convolve_exact(&r_aa, &r_aa);
    Ok(r_aaaa.iter().map(|&c| c * c).sum())
}

/// Four-tuple oracle for [`rep_sq_sum_aa`]: enumerates `a1 a2 + a3 a4`
/// directly. Guarded to tiny sets.
pub fn rep_sq_sum_aa_brute(field: &PrimeField, a: &FpSet) -> Result<u128> {
    if a.contains_zero() {
        return Err(Error::ZeroInSet);
    }
    if a.len() > AA4_ORACLE_GUARD {
        return Err(Error::TooLargeForBrute {
            what: "rep_sq_sum_aa oracle",
            got: a.len() as u128,
            guard: AA4_ORACLE_GUARD as u128,
        });
    }
    let mut counts = vec![0u64; field.modulus() as usize];
    for &a1 in a.elements() {
        for &a2 in a.elements() {
            let y = field.mul(a1, a2);
            for &a3 in a.elements() {
                for &a4 in a.elements() {
                    counts[field.add(y, field.mul(a3, a4)) as usize] += 1;
                }
            }
        }
    }
    Ok(counts.iter().map(|&c| (c as u128) * (c as u128)).sum())
}
