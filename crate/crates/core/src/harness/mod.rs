//! One verification routine per inequality: compute both sides, check the
//! stated hypothesis, emit a [`TheoremReport`]. The bounds carry unknown
//! implicit constants, so reports record ratios and the sweep layer
//! regresses on them rather than asserting absolute constants.

pub mod sweep;

use serde::Serialize;

use crate::energy::{balanced_additive_energy, mult_energy_k, sigma_mult};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::fourier::{dft_fast, spectrum, FourierTable, SpectrumResult};
use crate::incidence::IncidenceReport;
use crate::set::{self, FpSet};

/// Which inequality a report verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Multiplicative energy of a spectrum subset.
    Main,
    /// Fourth moment of the full punctured spectrum.
    E4,
    /// Ratio-mass of the spectrum on itself.
    Sigma,
    /// Second moment of `r_{AA+AA}` against the fourth multiplicative moment.
    ZeroSum,
    /// Growth of `AA + AA` for sets with small sumset.
    AaPlusAa,
    /// Subgroup-coset equality cases.
    Tightness,
    /// Point-plane incidence excess.
    Planes,
    /// Point-line incidence excess on Cartesian grids.
    Lines,
}

impl TheoremId {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Main => "main",
            TheoremId::E4 => "e4",
            TheoremId::Sigma => "sigma",
            TheoremId::ZeroSum => "zero_sum",
            TheoremId::AaPlusAa => "aa_plus_aa",
            TheoremId::Tightness => "tightness",
            TheoremId::Planes => "planes",
            TheoremId::Lines => "lines",
        }
    }

    pub fn parse(s: &str) -> Option<TheoremId> {
        Some(match s {
            "main" => TheoremId::Main,
            "e4" => TheoremId::E4,
            "sigma" => TheoremId::Sigma,
            "zero_sum" => TheoremId::ZeroSum,
            "aa_plus_aa" => TheoremId::AaPlusAa,
            "tightness" => TheoremId::Tightness,
            "planes" => TheoremId::Planes,
            "lines" => TheoremId::Lines,
            _ => return None,
        })
    }

    pub const ALL: [TheoremId; 8] = [
        TheoremId::Main,
        TheoremId::E4,
        TheoremId::Sigma,
        TheoremId::ZeroSum,
        TheoremId::AaPlusAa,
        TheoremId::Tightness,
        TheoremId::Planes,
        TheoremId::Lines,
    ];
}

/// How to pick `R` inside the punctured spectrum.
#[derive(Debug, Clone)]
pub enum SpectrumRule<'a> {
    /// `R = Spec_eps(A) \ {0}` in full.
    FullSpectrum,
    /// First coset of the subgroup `A` fully inside the punctured spectrum,
    /// smallest representative first; empty `R` if none qualifies.
    CosetSearch,
    /// Caller-supplied `R`; containment in the spectrum is checked and
    /// folded into the precondition flag.
    Explicit(&'a FpSet),
}

/// One verification record.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub family: String,
    pub p: u64,
    pub set_size: usize,
    pub density: f64,
    pub eps: f64,
    pub r_size: usize,
    pub seed: u64,
    pub precondition_ok: bool,
    pub lhs: f64,
    /// Exact integer value of the left side, when it is one.
    pub lhs_exact: Option<u128>,
    pub rhs: f64,
    pub ratio: f64,
    pub notes: String,
}

impl TheoremReport {
    fn ratio_of(lhs: f64, rhs: f64) -> f64 {
        if rhs > 0.0 {
            lhs / rhs
        } else {
            0.0
        }
    }

    pub fn csv_header() -> &'static str {
        "theorem,family,p,set_size,density,eps,r_size,seed,precondition_ok,lhs,lhs_exact,rhs,ratio,notes"
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.theorem.as_str(),
            self.family,
            self.p,
            self.set_size,
            fmt12(self.density),
            fmt12(self.eps),
            self.r_size,
            self.seed,
            self.precondition_ok,
            fmt12(self.lhs),
            self.lhs_exact.map(|v| v.to_string()).unwrap_or_default(),
            fmt12(self.rhs),
            fmt12(self.ratio),
            sanitize_note(&self.notes),
        )
    }
}

/// Floats rendered with 12 significant digits, the diffable artifact format.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

fn sanitize_note(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

fn spectrum_of(field: &PrimeField, a: &FpSet, eps: f64) -> Result<(FourierTable, SpectrumResult)> {
    let table = dft_fast(field, a);
    let spec = spectrum(&table, eps)?;
    Ok((table, spec))
}

/// First coset `lam * H` fully contained in the punctured spectrum, scanning
/// coset representatives in increasing order.
pub fn find_spectrum_coset(
    field: &PrimeField,
    h: &FpSet,
    spec: &SpectrumResult,
) -> Result<Option<(u64, FpSet)>> {
    let p = field.modulus();
    let mut in_spec = vec![false; p as usize];
    for &r in &spec.elements {
        in_spec[r as usize] = true;
    }
    let mut covered = vec![false; p as usize];
    for lam in 1..p {
        if covered[lam as usize] {
            continue;
        }
        let cs = set::coset(field, h, lam)?;
        for x in cs.iter() {
            covered[x as usize] = true;
        }
        if cs.iter().all(|x| in_spec[x as usize]) {
            return Ok(Some((lam, cs)));
        }
    }
    Ok(None)
}

fn resolve_rule(
    field: &PrimeField,
    a: &FpSet,
    spec: &SpectrumResult,
    rule: &SpectrumRule,
) -> Result<(FpSet, String, bool)> {
    let p = field.modulus();
    match rule {
        SpectrumRule::FullSpectrum => Ok((spec.punctured(p), "r_rule=full_spectrum".into(), true)),
        SpectrumRule::CosetSearch => {
            if !set::is_subgroup(field, a) {
                return Err(Error::NotASubgroup);
            }
            match find_spectrum_coset(field, a, spec)? {
                Some((lam, cs)) => Ok((cs, format!("r_rule=coset;coset_rep={lam}"), true)),
                None => Ok((FpSet::empty(p), "r_rule=coset;no_coset_found".into(), true)),
            }
        }
        SpectrumRule::Explicit(r) => {
            if r.modulus() != p {
                return Err(Error::MismatchedModulus(r.modulus(), p));
            }
            let mut in_spec = vec![false; p as usize];
            for &x in &spec.elements {
                in_spec[x as usize] = true;
            }
            let contained = r.iter().all(|x| x != 0 && in_spec[x as usize]);
            let note = if contained {
                "r_rule=explicit".into()
            } else {
                "r_rule=explicit;r_not_in_spectrum".into()
            };
            Ok(((*r).clone(), note, contained))
        }
    }
}

/// `Ex(R) <= C eps^-4 delta^-1 |R|^(3/2)` under `p <= eps^2 |A|^3`, for any
/// `R` inside the punctured spectrum.
pub fn verify_main(
    field: &PrimeField,
    a: &FpSet,
    eps: f64,
    rule: SpectrumRule,
) -> Result<TheoremReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let p = field.modulus();
    let (_, spec) = spectrum_of(field, a, eps)?;
    let (r, notes, contained) = resolve_rule(field, a, &spec, &rule)?;
    let energy = mult_energy_k(field, &r, 2)?.value;
    let delta = a.len() as f64 / p as f64;
    let rhs = eps.powi(-4) / delta * (r.len() as f64).powf(1.5);
    let size_ok = (p as f64) <= eps * eps * (a.len() as f64).powi(3);
    let lhs = energy as f64;
    Ok(TheoremReport {
        theorem: TheoremId::Main,
        family: String::new(),
        p,
        set_size: a.len(),
        density: delta,
        eps,
        r_size: r.len(),
        seed: 0,
        precondition_ok: size_ok && contained,
        lhs,
        lhs_exact: Some(energy),
        rhs,
        ratio: TheoremReport::ratio_of(lhs, rhs),
        notes,
    })
}

/// `Ex_4(R) <~ eps^-16 delta^-4 (E+(f_A)/|A|^3)^2` with `R` fixed to the
/// full punctured spectrum.
pub fn verify_e4(field: &PrimeField, a: &FpSet, eps: f64) -> Result<TheoremReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let p = field.modulus();
    let (_, spec) = spectrum_of(field, a, eps)?;
    let r = spec.punctured(p);
    let energy = mult_energy_k(field, &r, 4)?.value;
    let ebal = balanced_additive_energy(field, a)?.via_counts.max(0.0);
    let delta = a.len() as f64 / p as f64;
    let rhs = eps.powi(-16) * delta.powi(-4) * (ebal / (a.len() as f64).powi(3)).powi(2);
    let lhs = energy as f64;
    Ok(TheoremReport {
        theorem: TheoremId::E4,
        family: String::new(),
        p,
        set_size: a.len(),
        density: delta,
        eps,
        r_size: r.len(),
        seed: 0,
        precondition_ok: true,
        lhs,
        lhs_exact: Some(energy),
        rhs,
        ratio: TheoremReport::ratio_of(lhs, rhs),
        notes: format!("balanced_energy={}", fmt12(ebal)),
    })
}

/// `sigma_x(R) <~ eps^-4 delta^-1 |R|^(3/4) (E+(f_A)/|A|^3)^(1/2)
/// + eps^-4 delta^-1 (1 + |R|/|A|)`, same hypothesis as the main bound.
///
/// The sigma_x definition mirrors the additive sigma; flagged in the notes.
pub fn verify_sigma(
    field: &PrimeField,
    a: &FpSet,
    eps: f64,
    rule: SpectrumRule,
) -> Result<TheoremReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let p = field.modulus();
    let (_, spec) = spectrum_of(field, a, eps)?;
    let (r, mut notes, contained) = resolve_rule(field, a, &spec, &rule)?;
    let value = sigma_mult(field, &r)?.value;
    let ebal = balanced_additive_energy(field, a)?.via_counts.max(0.0);
    let delta = a.len() as f64 / p as f64;
    let size = a.len() as f64;
    let lead = eps.powi(-4) / delta;
    let rhs = lead * (r.len() as f64).powf(0.75) * (ebal / size.powi(3)).sqrt()
        + lead * (1.0 + r.len() as f64 / size);
    let size_ok = (p as f64) <= eps * eps * size.powi(3);
    let lhs = value as f64;
    notes.push_str(";sigma_def=additive_analog");
    Ok(TheoremReport {
        theorem: TheoremId::Sigma,
        family: String::new(),
        p,
        set_size: a.len(),
        density: delta,
        eps,
        r_size: r.len(),
        seed: 0,
        precondition_ok: size_ok && contained,
        lhs,
        lhs_exact: Some(value),
        rhs,
        ratio: TheoremReport::ratio_of(lhs, rhs),
        notes,
    })
}

/// `sum r^2_{AA+AA} - |A|^8/p <~ |A|^4 Ex_4^(1/2) + Ex_4 |A|^2`.
pub fn verify_zero_sum(field: &PrimeField, a: &FpSet) -> Result<TheoremReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let p = field.modulus();
    let sum_sq = set::rep_sq_sum_aa(field, a)?;
    let e4 = mult_energy_k(field, a, 4)?.value;
    let size = a.len() as f64;
    let main_term = (a.len() as u128).pow(8) as f64 / p as f64;
    let lhs = sum_sq as f64 - main_term;
    let rhs = size.powi(4) * (e4 as f64).sqrt() + e4 as f64 * size.powi(2);
    Ok(TheoremReport {
        theorem: TheoremId::ZeroSum,
        family: String::new(),
        p,
        set_size: a.len(),
        density: size / p as f64,
        eps: 0.0,
        r_size: 0,
        seed: 0,
        precondition_ok: true,
        lhs,
        lhs_exact: None,
        rhs,
        ratio: TheoremReport::ratio_of(lhs, rhs),
        notes: format!("sum_sq={sum_sq};e4={e4}"),
    })
}

/// Growth check: `|AA+AA|` against `min(p, |A|^2)`, with the corollary's
/// hypothesis `|A+A|^3 |A| <= p^3` as the precondition and the doubling
/// constant in the notes.
pub fn verify_aa_plus_aa(field: &PrimeField, a: &FpSet) -> Result<TheoremReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let p = field.modulus();
    let apa = set::sumset(field, a, a)?;
    let doubling = apa.len() as f64 / a.len() as f64;
    let hypothesis = (apa.len() as u128).pow(3) * a.len() as u128 <= (p as u128).pow(3);
    let aa = set::product_set(field, a, a)?;
    let aaaa = set::sumset(field, &aa, &aa)?;
    let lhs = aaaa.len() as f64;
    let rhs = (p as f64).min((a.len() as f64).powi(2));
    Ok(TheoremReport {
        theorem: TheoremId::AaPlusAa,
        family: String::new(),
        p,
        set_size: a.len(),
        density: a.len() as f64 / p as f64,
        eps: 0.0,
        r_size: aa.len(),
        seed: 0,
        precondition_ok: hypothesis,
        lhs,
        lhs_exact: Some(aaaa.len() as u128),
        rhs,
        ratio: TheoremReport::ratio_of(lhs, rhs),
        notes: format!("doubling={};sumset={}", fmt12(doubling), apa.len()),
    })
}

/// Subgroup tightness: searches for a full coset of the order-d subgroup
/// inside the punctured spectrum; a found coset forces `Ex(R) = d^3` and
/// `Ex_4(R) = d^5` exactly. Also checks the balanced-energy display
/// `E+(f_A) < (max_{r!=0} |hat A(r)|)^2 |A|` and records `m / sqrt(p)`.
pub fn tightness_subgroup(field: &PrimeField, d: u64, eps: f64) -> Result<TheoremReport> {
    let a = set::mult_subgroup(field, d)?;
    let p = field.modulus();
    let (table, spec) = spectrum_of(field, &a, eps)?;
    let found = find_spectrum_coset(field, &a, &spec)?;
    let m = table.max_nonzero_magnitude();
    let ebal = balanced_additive_energy(field, &a)?.via_counts;
    let display_ok = ebal < m * m * a.len() as f64;
    let m_ratio = m / (p as f64).sqrt();
    let rhs = (d as u128).pow(5) as f64;
    let (lhs_exact, r_size, mut notes) = match &found {
        Some((lam, cs)) => {
            let e4 = mult_energy_k(field, cs, 4)?.value;
            let e2 = mult_energy_k(field, cs, 2)?.value;
            let exact_ok = e4 == (d as u128).pow(5) && e2 == (d as u128).pow(3);
            (
                e4,
                cs.len(),
                format!("coset_rep={lam};coset_exact={exact_ok}"),
            )
        }
        None => (0, 0, "no_coset_found".to_string()),
    };
    notes.push_str(&format!(
        ";display_ok={display_ok};m_over_sqrt_p={}",
        fmt12(m_ratio)
    ));
    let lhs = lhs_exact as f64;
    Ok(TheoremReport {
        theorem: TheoremId::Tightness,
        family: String::new(),
        p,
        set_size: a.len(),
        density: a.len() as f64 / p as f64,
        eps,
        r_size,
        seed: 0,
        precondition_ok: found.is_some(),
        lhs,
        lhs_exact: Some(lhs_exact),
        rhs,
        ratio: TheoremReport::ratio_of(lhs, rhs),
        notes,
    })
}

/// Wraps an incidence excess report as a theorem row.
pub fn incidence_report_row(
    theorem: TheoremId,
    q: u64,
    n_points: usize,
    n_surfaces: usize,
    seed: u64,
    rep: &IncidenceReport,
) -> TheoremReport {
    TheoremReport {
        theorem,
        family: "scene".into(),
        p: q,
        set_size: n_points,
        density: 0.0,
        eps: 0.0,
        r_size: n_surfaces,
        seed,
        precondition_ok: true,
        lhs: rep.excess,
        lhs_exact: None,
        rhs: rep.bound,
        ratio: rep.ratio,
        notes: format!(
            "incidences={};expected={};k={}",
            fmt12(rep.incidences),
            fmt12(rep.expected),
            rep.k
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn main_report_subgroup_example() {
        let f = field(101);
        let a = set::mult_subgroup(&f, 25).unwrap();
        let rep = verify_main(&f, &a, 0.5, SpectrumRule::FullSpectrum).unwrap();
        // eps^2 |A|^3 = 0.25 * 15625 >= 101.
        assert!(rep.precondition_ok);
        assert!(rep.lhs_exact.is_some());
        assert!(rep.ratio.is_finite());
        // Empty R: explicitly.
        let empty = FpSet::empty(101);
        let rep = verify_main(&f, &a, 0.5, SpectrumRule::Explicit(&empty)).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.ratio, 0.0);
    }

    #[test]
    fn main_precondition_arithmetic() {
        let f = field(101);
        let a = set::interval(&f, 3).unwrap();
        // eps^2 |A|^3 = 0.01 * 27 = 0.27 < 101.
        let rep = verify_main(&f, &a, 0.1, SpectrumRule::FullSpectrum).unwrap();
        assert!(!rep.precondition_ok);
    }

    #[test]
    fn e4_full_set_vanishes() {
        let f = field(101);
        let full = FpSet::from_elements(101, 0..101).unwrap();
        let rep = verify_e4(&f, &full, 0.5).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.r_size, 0);
    }

    #[test]
    fn e4_high_eps_typically_empties_r() {
        let f = field(211);
        let a = set::random_set(&f, 105, 3, false).unwrap();
        let rep = verify_e4(&f, &a, 0.9).unwrap();
        assert_eq!(rep.r_size, 0, "dense random set has a thin spectrum");
        assert_eq!(rep.lhs, 0.0);
    }

    #[test]
    fn sigma_singleton_r() {
        let f = field(101);
        let a = set::mult_subgroup(&f, 25).unwrap();
        let one = FpSet::from_elements(101, [1]).unwrap();
        let rep = verify_sigma(&f, &a, 0.1, SpectrumRule::Explicit(&one)).unwrap();
        assert_eq!(rep.lhs_exact, Some(1));
    }

    #[test]
    fn zero_sum_singleton() {
        let f = field(1009);
        let a = FpSet::from_elements(1009, [5]).unwrap();
        let rep = verify_zero_sum(&f, &a).unwrap();
        assert!((rep.lhs - (1.0 - 1.0 / 1009.0)).abs() < 1e-12);
        assert_eq!(rep.rhs, 2.0);
        assert!(rep.ratio < 1.0);
    }

    #[test]
    fn zero_sum_subgroup_identity() {
        // For a subgroup, sum r^2_{HH+HH} = t^4 E+(H).
        let f = field(101);
        let h = set::mult_subgroup(&f, 25).unwrap();
        let sum_sq = set::rep_sq_sum_aa(&f, &h).unwrap();
        let e_plus = crate::energy::additive_energy(&f, &h, &h, crate::energy::Method::Convolution)
            .unwrap()
            .value;
        assert_eq!(sum_sq, 25u128.pow(4) * e_plus);
    }

    #[test]
    fn aa_plus_aa_edge_cases() {
        let f = field(101);
        let one = FpSet::from_elements(101, [7]).unwrap();
        let rep = verify_aa_plus_aa(&f, &one).unwrap();
        assert_eq!(rep.lhs_exact, Some(1));
        let star = FpSet::from_elements(101, 1..101).unwrap();
        let rep = verify_aa_plus_aa(&f, &star).unwrap();
        assert_eq!(rep.lhs_exact, Some(101));
    }

    #[test]
    fn tightness_at_desk_scale() {
        let f = field(101);
        let rep = tightness_subgroup(&f, 25, 0.1).unwrap();
        assert!(rep.precondition_ok, "a coset qualifies at eps = 0.1");
        assert_eq!(rep.lhs_exact, Some(9_765_625));
        assert!(rep.notes.contains("coset_exact=true"));
        assert!(rep.notes.contains("display_ok=true"));
        assert!(tightness_subgroup(&f, 30, 0.1).is_err());
    }

    #[test]
    fn reports_are_rederivable() {
        let f = field(211);
        let a = set::random_set(&f, 36, 5, true).unwrap();
        let r1 = verify_main(&f, &a, 0.25, SpectrumRule::FullSpectrum).unwrap();
        let r2 = verify_main(&f, &a, 0.25, SpectrumRule::FullSpectrum).unwrap();
        assert_eq!(r1.lhs_exact, r2.lhs_exact);
        assert!((r1.rhs - r2.rhs).abs() <= 1e-9 * r1.rhs.abs());
        assert_eq!(r1.csv_line(), r2.csv_line());
    }

    #[test]
    fn csv_line_is_stable_and_comma_safe() {
        let f = field(101);
        let a = set::mult_subgroup(&f, 25).unwrap();
        let mut rep = verify_e4(&f, &a, 0.25).unwrap();
        rep.notes = "x=1,y=2".into();
        let line = rep.csv_line();
        assert_eq!(line.matches(',').count(), 13, "fixed column count");
    }
}
