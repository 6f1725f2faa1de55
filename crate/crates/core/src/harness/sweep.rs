//! Deterministic verification sweeps: a flat key-value config expands into
//! a cross product of runs, rows come back sorted, and per-(theorem, family)
//! max ratios regress against a blessed baseline file.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{is_prime, PrimeField};
use crate::incidence::{line_point_ratio, point_plane_ratio, random_scene_3d};
use crate::set::{self, FpSet};

use super::{
    incidence_report_row, tightness_subgroup, verify_aa_plus_aa, verify_e4, verify_main,
    verify_sigma, verify_zero_sum, SpectrumRule, TheoremId, TheoremReport,
};

/// Set families the sweep knows how to construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    Interval,
    Random,
    Subgroup,
    Coset,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Interval => "interval",
            Family::Random => "random",
            Family::Subgroup => "subgroup",
            Family::Coset => "coset",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Some(match s {
            "interval" => Family::Interval,
            "random" => Family::Random,
            "subgroup" => Family::Subgroup,
            "coset" => Family::Coset,
            _ => return None,
        })
    }
}

/// Sweep configuration; [`SweepConfig::default`] is the standard battery.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub primes: Vec<u64>,
    pub eps: Vec<f64>,
    pub seeds: Vec<u64>,
    pub families: Vec<Family>,
    pub theorems: Vec<TheoremId>,
    pub incidence_qs: Vec<u64>,
    pub incidence_seeds: u64,
    pub output: Option<String>,
    pub baseline: Option<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            primes: vec![101, 211, 421, 1009, 10007],
            eps: vec![0.1, 0.25, 0.5, 0.9],
            seeds: vec![0, 1],
            families: vec![
                Family::Interval,
                Family::Random,
                Family::Subgroup,
                Family::Coset,
            ],
            theorems: TheoremId::ALL.to_vec(),
            incidence_qs: vec![5, 7, 11, 13],
            incidence_seeds: 50,
            output: None,
            baseline: None,
        }
    }
}

impl SweepConfig {
    /// Parses the flat `key = value` format; `#` starts a comment.
    pub fn parse(text: &str) -> Result<SweepConfig> {
        let mut cfg = SweepConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (key, value) = t.split_once('=').ok_or_else(|| Error::Config {
                line,
                msg: format!("expected key = value, got {t:?}"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |msg: String| Error::Config { line, msg };
            match key {
                "primes" => {
                    cfg.primes = parse_list(value, line)?;
                    for &p in &cfg.primes {
                        if !is_prime(p) || p == 2 {
                            return Err(bad(format!("{p} is not an odd prime")));
                        }
                    }
                }
                "eps" => {
                    cfg.eps = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| {
                            s.trim()
                                .parse::<f64>()
                                .map_err(|e| bad(format!("bad eps {s:?}: {e}")))
                        })
                        .collect::<Result<_>>()?;
                    if cfg.eps.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
                        return Err(bad("eps values must lie in (0, 1]".into()));
                    }
                }
                "seeds" => cfg.seeds = parse_list(value, line)?,
                "families" => {
                    cfg.families = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| {
                            Family::parse(s.trim())
                                .ok_or_else(|| bad(format!("unknown family {s:?}")))
                        })
                        .collect::<Result<_>>()?;
                }
                "theorems" => {
                    cfg.theorems = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| {
                            TheoremId::parse(s.trim())
                                .ok_or_else(|| bad(format!("unknown theorem {s:?}")))
                        })
                        .collect::<Result<_>>()?;
                }
                "incidence_qs" => {
                    cfg.incidence_qs = parse_list(value, line)?;
                    for &q in &cfg.incidence_qs {
                        if !is_prime(q) {
                            return Err(bad(format!("{q} is not prime")));
                        }
                    }
                }
                "incidence_seeds" => {
                    cfg.incidence_seeds = value
                        .parse()
                        .map_err(|e| bad(format!("bad incidence_seeds: {e}")))?;
                }
                "output" => cfg.output = Some(value.to_string()),
                "baseline" => cfg.baseline = Some(value.to_string()),
                other => {
                    return Err(bad(format!("unknown key {other:?}")));
                }
            }
        }
        Ok(cfg)
    }
}

fn parse_list(value: &str, line: usize) -> Result<Vec<u64>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim().parse::<u64>().map_err(|e| Error::Config {
                line,
                msg: format!("bad integer {s:?}: {e}"),
            })
        })
        .collect()
}

/// Sets scale like `p^0.7` across the battery: dense enough that the main
/// hypothesis `p <= eps^2 |A|^3` holds throughout the eps grid, sparse
/// enough that spectra stay interesting.
pub fn family_target_size(p: u64) -> u64 {
    ((p as f64).powf(0.7).round() as u64).clamp(3, p - 1)
}

/// Divisor of `p - 1` nearest `p^0.7` in log scale, ties toward the larger.
pub fn subgroup_order_for(p: u64) -> u64 {
    let target = (p as f64).powf(0.7);
    let pm1 = p - 1;
    let mut best = 1u64;
    let mut best_dist = f64::INFINITY;
    for d in 1..=pm1 {
        if d * d > pm1 {
            break;
        }
        if pm1.is_multiple_of(d) {
            for cand in [d, pm1 / d] {
                let dist = ((cand as f64).ln() - target.ln()).abs();
                if dist < best_dist - 1e-12 || (dist < best_dist + 1e-12 && cand > best) {
                    best_dist = dist;
                    best = cand;
                }
            }
        }
    }
    best
}

/// Builds the family's set for one (p, seed) cell.
pub fn family_set(field: &PrimeField, family: Family, seed: u64) -> Result<FpSet> {
    let p = field.modulus();
    match family {
        Family::Interval => set::interval(field, family_target_size(p)),
        Family::Random => set::random_set(field, family_target_size(p) as usize, seed, true),
        Family::Subgroup | Family::Coset => set::mult_subgroup(field, subgroup_order_for(p)),
    }
}

fn set_theorem_families(theorem: TheoremId, families: &[Family]) -> Vec<Family> {
    match theorem {
        // R-rule coset only makes sense for the bounds that admit any R.
        TheoremId::Main | TheoremId::Sigma => families.to_vec(),
        TheoremId::E4 | TheoremId::ZeroSum | TheoremId::AaPlusAa => families
            .iter()
            .copied()
            .filter(|&f| f != Family::Coset)
            .collect(),
        TheoremId::Tightness => families
            .iter()
            .copied()
            .filter(|&f| f == Family::Subgroup)
            .collect(),
        TheoremId::Planes | TheoremId::Lines => Vec::new(),
    }
}

fn eps_grid_for(theorem: TheoremId, eps: &[f64]) -> Vec<f64> {
    match theorem {
        // eps-independent checks carry a 0 sentinel in the eps column.
        TheoremId::ZeroSum | TheoremId::AaPlusAa => vec![0.0],
        _ => eps.to_vec(),
    }
}

#[derive(Debug, Clone)]
enum Task {
    SetTheorem {
        theorem: TheoremId,
        p: u64,
        family: Family,
        eps: f64,
        seed: u64,
    },
    Incidence {
        theorem: TheoremId,
        q: u64,
        seed: u64,
    },
}

fn run_task(task: &Task) -> Result<TheoremReport> {
    match *task {
        Task::SetTheorem {
            theorem,
            p,
            family,
            eps,
            seed,
        } => {
            let field = PrimeField::new(p)?;
            let a = family_set(&field, family, seed)?;
            let mut rep = match theorem {
                TheoremId::Main => {
                    let rule = if family == Family::Coset {
                        SpectrumRule::CosetSearch
                    } else {
                        SpectrumRule::FullSpectrum
                    };
                    verify_main(&field, &a, eps, rule)?
                }
                TheoremId::Sigma => {
                    let rule = if family == Family::Coset {
                        SpectrumRule::CosetSearch
                    } else {
                        SpectrumRule::FullSpectrum
                    };
                    verify_sigma(&field, &a, eps, rule)?
                }
                TheoremId::E4 => verify_e4(&field, &a, eps)?,
                TheoremId::ZeroSum => verify_zero_sum(&field, &a)?,
                TheoremId::AaPlusAa => verify_aa_plus_aa(&field, &a)?,
                TheoremId::Tightness => tightness_subgroup(&field, subgroup_order_for(p), eps)?,
                TheoremId::Planes | TheoremId::Lines => unreachable!("incidence task"),
            };
            rep.family = family.as_str().to_string();
            rep.seed = seed;
            Ok(rep)
        }
        Task::Incidence { theorem, q, seed } => match theorem {
            TheoremId::Planes => {
                let n_points = (q * q) as usize;
                let n_planes = (q * q + q) as usize;
                let scene = random_scene_3d(q, n_points, n_planes, seed);
                let rep = point_plane_ratio(&scene, false)?;
                Ok(incidence_report_row(
                    TheoremId::Planes,
                    q,
                    scene.num_points(),
                    scene.num_surfaces(),
                    seed,
                    &rep,
                ))
            }
            TheoremId::Lines => {
                let field = PrimeField::new(q)?;
                let na = (q / 2).max(2) as usize;
                let nb = (2 * q / 3).max(na as u64) as usize;
                let a = set::random_set(&field, na, seed, false)?;
                let b = set::random_set(&field, nb, seed.wrapping_add(1), false)?;
                let lines = random_lines(q, q as usize, seed.wrapping_add(2));
                let rep = line_point_ratio(q, &a, &b, &lines)?;
                Ok(incidence_report_row(
                    TheoremId::Lines,
                    q,
                    a.len() * b.len(),
                    lines.len(),
                    seed,
                    &rep,
                ))
            }
            _ => unreachable!("set-theorem task"),
        },
    }
}

/// Seeded distinct lines `(a, b, d)` meaning `ax + by = d`, normalized.
fn random_lines(q: u64, count: usize, seed: u64) -> Vec<[u64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut out: Vec<[u64; 3]> = Vec::new();
    let universe = (q * q + q) as usize;
    while out.len() < count.min(universe) {
        let a = rng.random_range(0..q);
        let b = rng.random_range(0..q);
        if a == 0 && b == 0 {
            continue;
        }
        let d = rng.random_range(0..q);
        // Normalize by the leading coefficient so duplicates collapse.
        let lead = if a != 0 { a } else { b };
        let inv = crate::field::PrimeField::new(q)
            .expect("q validated prime")
            .inv(lead)
            .expect("lead != 0");
        let norm = [a * inv % q, b * inv % q, d * inv % q];
        if seen.insert(norm) {
            out.push(norm);
        }
    }
    out.sort_unstable();
    out
}

/// Runs the whole sweep; rows come back sorted by
/// (theorem, p, family, eps, seed) so output is order-independent.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<TheoremReport>> {
    let mut tasks = Vec::new();
    for &theorem in &config.theorems {
        match theorem {
            TheoremId::Planes | TheoremId::Lines => {
                for &q in &config.incidence_qs {
                    for seed in 0..config.incidence_seeds {
                        tasks.push(Task::Incidence { theorem, q, seed });
                    }
                }
            }
            _ => {
                for &p in &config.primes {
                    for family in set_theorem_families(theorem, &config.families) {
                        for &eps in &eps_grid_for(theorem, &config.eps) {
                            for &seed in &config.seeds {
                                tasks.push(Task::SetTheorem {
                                    theorem,
                                    p,
                                    family,
                                    eps,
                                    seed,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    let mut reports = tasks.par_iter().map(run_task).collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| {
        (a.theorem, a.p, &a.family, a.eps, a.seed)
            .partial_cmp(&(b.theorem, b.p, &b.family, b.eps, b.seed))
            .expect("eps is never NaN")
    });
    Ok(reports)
}

pub fn reports_to_csv(reports: &[TheoremReport]) -> String {
    let mut out = String::from(TheoremReport::csv_header());
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

pub fn reports_to_jsonl(reports: &[TheoremReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("report serializes"));
        out.push('\n');
    }
    out
}

/// Per-(theorem, family) maxima of the recorded ratios, plus the derived
/// `example` keys: main-bound rows at eps = 0.5 with `|R| >= 1/(4 delta
/// eps^2)` scored as `Ex(R) / |R|^(5/2)`.
pub fn aggregate_max_ratios(reports: &[TheoremReport]) -> BTreeMap<String, f64> {
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    let mut put = |key: String, v: f64| {
        let e = out.entry(key).or_insert(f64::NEG_INFINITY);
        if v > *e {
            *e = v;
        }
    };
    for r in reports {
        put(format!("{}|{}", r.theorem.as_str(), r.family), r.ratio);
        if r.theorem == TheoremId::Main
            && r.eps == 0.5
            && r.precondition_ok
            && r.r_size > 0
            && (r.r_size as f64) >= 1.0 / (4.0 * r.density * r.eps * r.eps)
        {
            put(
                format!("example|{}", r.family),
                r.lhs / (r.r_size as f64).powf(2.5),
            );
        }
    }
    out
}

/// Result of checking one aggregate against its blessed value.
#[derive(Debug, Clone)]
pub struct BaselineCheck {
    pub key: String,
    pub baseline: f64,
    pub current: f64,
    pub pass: bool,
}

/// Non-regression gate: current max must be finite and at most twice the
/// blessed max. Keys absent from the baseline pass vacuously (new battery
/// members); keys absent from the current run are skipped.
pub fn compare_to_baseline(
    current: &BTreeMap<String, f64>,
    baseline: &BTreeMap<String, f64>,
) -> Vec<BaselineCheck> {
    let mut checks = Vec::new();
    for (key, &cur) in current {
        let Some(&base) = baseline.get(key) else {
            continue;
        };
        let allowed = if base > 0.0 { 2.0 * base } else { 0.1 };
        checks.push(BaselineCheck {
            key: key.clone(),
            baseline: base,
            current: cur,
            pass: cur.is_finite() && cur <= allowed,
        });
    }
    checks
}

pub fn baseline_to_json(ratios: &BTreeMap<String, f64>) -> String {
    let mut s = serde_json::to_string_pretty(ratios).expect("map serializes");
    s.push('\n');
    s
}

pub fn baseline_from_json(text: &str) -> Result<BTreeMap<String, f64>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad baseline json: {e}")))
}
