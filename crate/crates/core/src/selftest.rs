//! The exact-identity suite: every check here is a hard pass/fail with
//! pinned tolerances (1e-9 relative where floats enter, exact otherwise),
//! plus the oracle-equivalence battery for the fast paths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{
    additive_energy, balanced_additive_energy, c4_aggregates, mult_energy_k, mult_energy_k_brute,
    sigma_mult, Method,
};
use crate::error::Result;
use crate::field::PrimeField;
use crate::fourier::{dft_direct, dft_fast};
use crate::incidence::{check_vinh, collinear_max, collinear_max_brute, random_mean_zero_scene_3d};
use crate::set::{self, FpSet};

pub const BATTERY_PRIMES: [u64; 4] = [101, 211, 421, 1009];

/// One named check with a human-readable detail line.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        CheckOutcome {
            name,
            pass: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        CheckOutcome {
            name,
            pass: false,
            detail,
        }
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// A deterministic mix of intervals, seeded random sets and subgroups over
/// the battery primes; the population every "every battery set" clause
/// quantifies over.
pub fn battery_sets(field: &PrimeField) -> Vec<FpSet> {
    let p = field.modulus();
    let mut sets = Vec::new();
    for n in [
        3,
        (p as f64).sqrt() as u64,
        crate::harness::sweep::family_target_size(p),
    ] {
        sets.push(set::interval(field, n.clamp(1, p - 1)).expect("valid interval"));
    }
    for (size, seed) in [
        (5usize, 1u64),
        (20, 2),
        (crate::harness::sweep::family_target_size(p) as usize, 3),
    ] {
        sets.push(
            set::random_set(field, size.min(p as usize - 1), seed, true).expect("valid sample"),
        );
    }
    for d in divisors(p - 1) {
        sets.push(set::mult_subgroup(field, d).expect("divisor"));
    }
    sets
}

pub fn check_parseval() -> CheckOutcome {
    let name = "parseval";
    let mut count = 0usize;
    let mut worst = 0.0f64;
    for &p in &BATTERY_PRIMES {
        let field = match PrimeField::new(p) {
            Ok(f) => f,
            Err(e) => return CheckOutcome::fail(name, e.to_string()),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        for seed in 0..50u64 {
            let size = rng.random_range(1..p) as usize;
            let a = match set::random_set(&field, size, seed, false) {
                Ok(a) => a,
                Err(e) => return CheckOutcome::fail(name, e.to_string()),
            };
            let total = dft_fast(&field, &a).parseval_sum();
            let want = (p * a.len() as u64) as f64;
            let rel = (total - want).abs() / want;
            worst = worst.max(rel);
            count += 1;
            if rel > 1e-9 {
                return CheckOutcome::fail(
                    name,
                    format!("p={p} seed={seed}: relative error {rel:e}"),
                );
            }
        }
    }
    CheckOutcome::pass(
        name,
        format!("{count} sets, worst relative error {worst:.2e}"),
    )
}

pub fn check_additive_energy_methods() -> CheckOutcome {
    let name = "additive_energy_methods";
    // Frozen reference: quadruple enumeration for {1,2,3} gives 19.
    let field = PrimeField::new(101).expect("prime");
    let a = set::interval(&field, 3).expect("interval");
    match additive_energy(&field, &a, &a, Method::Brute) {
        Ok(v) if v.value == 19 => {}
        Ok(v) => return CheckOutcome::fail(name, format!("E+({{1,2,3}}) = {} != 19", v.value)),
        Err(e) => return CheckOutcome::fail(name, e.to_string()),
    }
    let mut cases = 0usize;
    for &p in &BATTERY_PRIMES {
        let field = PrimeField::new(p).expect("prime");
        let mut rng = ChaCha8Rng::seed_from_u64(p ^ 0xE4E4);
        for seed in 0..26u64 {
            let na = rng.random_range(1..=64usize);
            let nb = rng.random_range(1..=64usize);
            let a = set::random_set(&field, na.min(p as usize), seed, false).expect("sample");
            let b =
                set::random_set(&field, nb.min(p as usize), seed + 1000, false).expect("sample");
            let routes: Result<Vec<u128>> = [Method::Brute, Method::Convolution, Method::Fourier]
                .iter()
                .map(|&m| additive_energy(&field, &a, &b, m).map(|v| v.value))
                .collect();
            match routes {
                Ok(v) if v[0] == v[1] && v[1] == v[2] => cases += 1,
                Ok(v) => {
                    return CheckOutcome::fail(
                        name,
                        format!(
                            "p={p} seed={seed}: brute={} conv={} fourier={}",
                            v[0], v[1], v[2]
                        ),
                    )
                }
                Err(e) => return CheckOutcome::fail(name, e.to_string()),
            }
        }
    }
    CheckOutcome::pass(name, format!("{cases} cases, three routes agree exactly"))
}

pub fn check_mult_energy_transport() -> CheckOutcome {
    let name = "mult_energy_transport";
    let mut cases = 0usize;
    for &p in &BATTERY_PRIMES {
        let field = PrimeField::new(p).expect("prime");
        let mut rng = ChaCha8Rng::seed_from_u64(p ^ 0x44);
        for seed in 0..26u64 {
            let n = rng.random_range(1..=40usize);
            let r = set::random_set(&field, n.min(p as usize - 1), seed, true).expect("sample");
            for k in [2u32, 4] {
                let conv = mult_energy_k(&field, &r, k).map(|v| v.value);
                let brute = mult_energy_k_brute(&field, &r, k).map(|v| v.value);
                match (conv, brute) {
                    (Ok(c), Ok(b)) if c == b => cases += 1,
                    (Ok(c), Ok(b)) => {
                        return CheckOutcome::fail(
                            name,
                            format!("p={p} seed={seed} k={k}: conv={c} brute={b}"),
                        )
                    }
                    (Err(e), _) | (_, Err(e)) => return CheckOutcome::fail(name, e.to_string()),
                }
            }
        }
    }
    CheckOutcome::pass(name, format!("{cases} (set, k) cases agree exactly"))
}

pub fn check_c4_identities() -> CheckOutcome {
    let name = "c4_identities";
    let mut cases = 0usize;
    for &p in &BATTERY_PRIMES {
        let field = PrimeField::new(p).expect("prime");
        for size in [1usize, 2, 4, 8, 12, 16] {
            for seed in [0u64, 1] {
                let a = set::random_set(&field, size, seed, true).expect("sample");
                let agg = match c4_aggregates(&field, &a) {
                    Ok(v) => v,
                    Err(e) => return CheckOutcome::fail(name, e.to_string()),
                };
                if agg.sum != (a.len() as u128).pow(4) {
                    return CheckOutcome::fail(
                        name,
                        format!("p={p} |A|={size}: sum C4 = {} != |A|^4", agg.sum),
                    );
                }
                let e4 = mult_energy_k(&field, &a, 4).expect("moment").value;
                if agg.sum_sq != e4 {
                    return CheckOutcome::fail(
                        name,
                        format!("p={p} |A|={size}: sum C4^2 = {} != Ex4 = {e4}", agg.sum_sq),
                    );
                }
                cases += 1;
            }
        }
    }
    CheckOutcome::pass(name, format!("{cases} sets: sum = |A|^4 and sum_sq = Ex4"))
}

pub fn check_subgroup_exactness() -> CheckOutcome {
    let name = "subgroup_exactness";
    let mut cases = 0usize;
    let mut primes = BATTERY_PRIMES.to_vec();
    primes.push(10007);
    for &p in &primes {
        let field = PrimeField::new(p).expect("prime");
        for d in divisors(p - 1) {
            let h = set::mult_subgroup(&field, d).expect("divisor");
            let d = d as u128;
            let e2 = mult_energy_k(&field, &h, 2).expect("energy").value;
            let e4 = mult_energy_k(&field, &h, 4).expect("energy").value;
            let sg = sigma_mult(&field, &h).expect("sigma").value;
            if e2 != d.pow(3) || e4 != d.pow(5) || sg != d.pow(2) {
                return CheckOutcome::fail(
                    name,
                    format!("p={p} d={d}: Ex={e2} Ex4={e4} sigma={sg}"),
                );
            }
            cases += 1;
        }
    }
    CheckOutcome::pass(
        name,
        format!("{cases} subgroups: Ex = d^3, Ex4 = d^5, sigma = d^2"),
    )
}

pub fn check_vinh_battery() -> CheckOutcome {
    let name = "vinh";
    let mut cases = 0usize;
    for q in [5u64, 7, 11] {
        for seed in 0..100u64 {
            let scene =
                random_mean_zero_scene_3d(q, (2 * q * q) as usize, (2 * q * q + q) as usize, seed);
            match check_vinh(&scene) {
                Ok(rep) if rep.pass => cases += 1,
                Ok(rep) => {
                    return CheckOutcome::fail(
                        name,
                        format!("q={q} seed={seed}: lhs={} > rhs={}", rep.lhs, rep.rhs),
                    )
                }
                Err(e) => return CheckOutcome::fail(name, e.to_string()),
            }
        }
    }
    CheckOutcome::pass(name, format!("{cases} mean-zero scenes, zero failures"))
}

pub fn check_balanced_energy_display() -> CheckOutcome {
    let name = "balanced_energy_display";
    let mut cases = 0usize;
    for &p in &BATTERY_PRIMES {
        let field = PrimeField::new(p).expect("prime");
        for a in battery_sets(&field) {
            if a.len() == p as usize {
                continue; // the display is strict only for proper subsets
            }
            let table = dft_fast(&field, &a);
            let m = table.max_nonzero_magnitude();
            let ebal = balanced_additive_energy(&field, &a)
                .expect("nonempty")
                .via_counts;
            // Strict inequality; NaN must fail too.
            let display_holds = ebal < m * m * a.len() as f64;
            if !display_holds {
                return CheckOutcome::fail(
                    name,
                    format!(
                        "p={p} |A|={}: E+(f_A)={ebal} vs m^2|A|={}",
                        a.len(),
                        m * m * a.len() as f64
                    ),
                );
            }
            cases += 1;
        }
    }
    CheckOutcome::pass(name, format!("{cases} battery sets satisfy the display"))
}

pub fn check_dft_agreement() -> CheckOutcome {
    let name = "dft_fast_vs_direct";
    let mut worst = 0.0f64;
    let mut fields = BATTERY_PRIMES.to_vec();
    fields.push(4999);
    for &p in &fields {
        let field = PrimeField::new(p).expect("prime");
        for (i, size) in [5usize, (p / 10) as usize, (p / 3) as usize]
            .iter()
            .enumerate()
        {
            let a = set::random_set(&field, (*size).clamp(1, p as usize), i as u64, false)
                .expect("sample");
            let fast = dft_fast(&field, &a);
            let slow = dft_direct(&field, &a);
            for (u, v) in fast.values().iter().zip(slow.values()) {
                worst = worst.max((u - v).norm());
            }
        }
    }
    if worst < 1e-6 {
        CheckOutcome::pass(name, format!("max entry deviation {worst:.2e}"))
    } else {
        CheckOutcome::fail(name, format!("max entry deviation {worst:.2e} >= 1e-6"))
    }
}

pub fn check_aa4_oracle() -> CheckOutcome {
    let name = "rep_sq_sum_aa_oracle";
    let mut cases = 0usize;
    for &p in &[101u64, 1009] {
        let field = PrimeField::new(p).expect("prime");
        for size in [1usize, 2, 5, 8, 12] {
            for seed in [0u64, 7] {
                let a = set::random_set(&field, size, seed, true).expect("sample");
                let fast = set::rep_sq_sum_aa(&field, &a);
                let brute = set::rep_sq_sum_aa_brute(&field, &a);
                match (fast, brute) {
                    (Ok(f), Ok(b)) if f == b => cases += 1,
                    (Ok(f), Ok(b)) => {
                        return CheckOutcome::fail(
                            name,
                            format!("p={p} |A|={size} seed={seed}: conv={f} brute={b}"),
                        )
                    }
                    (Err(e), _) | (_, Err(e)) => return CheckOutcome::fail(name, e.to_string()),
                }
            }
        }
        // Interval instance pinned by the battery: {1..6} in F_1009.
        if p == 1009 {
            let a = set::interval(&field, 6).expect("interval");
            let fast = set::rep_sq_sum_aa(&field, &a).expect("conv");
            let brute = set::rep_sq_sum_aa_brute(&field, &a).expect("oracle");
            if fast != brute {
                return CheckOutcome::fail(name, format!("interval: conv={fast} brute={brute}"));
            }
            cases += 1;
        }
    }
    CheckOutcome::pass(name, format!("{cases} instances agree exactly"))
}

pub fn check_collinear_oracle() -> CheckOutcome {
    let name = "collinear_oracle";
    let mut cases = 0usize;
    for q in [7u64, 11, 13] {
        let mut rng = ChaCha8Rng::seed_from_u64(q);
        for trial in 0..10 {
            let n = rng.random_range(2..=60usize);
            let mut pts = std::collections::HashSet::new();
            while pts.len() < n.min((q * q * q) as usize) {
                pts.insert([
                    rng.random_range(0..q),
                    rng.random_range(0..q),
                    rng.random_range(0..q),
                ]);
            }
            let pts: Vec<_> = {
                let mut v: Vec<_> = pts.into_iter().collect();
                v.sort_unstable();
                v
            };
            let fast = collinear_max(q, &pts);
            let slow = collinear_max_brute(q, &pts);
            match (fast, slow) {
                (Ok(f), Ok(s)) if f == s => cases += 1,
                (Ok(f), Ok(s)) => {
                    return CheckOutcome::fail(
                        name,
                        format!("q={q} trial={trial}: pair-hash={f} cubic={s}"),
                    )
                }
                (Err(e), _) | (_, Err(e)) => return CheckOutcome::fail(name, e.to_string()),
            }
        }
    }
    CheckOutcome::pass(name, format!("{cases} point sets agree"))
}

/// Runs every check in the exact-identity and oracle-equivalence suites.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        check_parseval(),
        check_additive_energy_methods(),
        check_mult_energy_transport(),
        check_c4_identities(),
        check_subgroup_exactness(),
        check_vinh_battery(),
        check_balanced_energy_display(),
        check_dft_agreement(),
        check_aa4_oracle(),
        check_collinear_oracle(),
    ]
}
