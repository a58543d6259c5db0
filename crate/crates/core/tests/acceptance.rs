//! Acceptance run: one line per criterion. Exits nonzero on any failure
//! except a target that contradicts the clipping definition, which is still
//! printed as FAIL but only tolerated when the measured value matches the
//! definition exactly.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, TAU};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use periodist_core::corona::{
    check_corona_window, establish_witness, is_unit, modulus_lower_bound, solve_bezout,
    verify_bezout, witness_from_bezout, CoronaWitness, WitnessStatus,
};
use periodist_core::exp_type::{poly_bezout_check, polynomial_reducer_search, rational, Poly};
use periodist_core::fourier::{coeffs_from_samples, synthesize, PeriodBasis};
use periodist_core::lattice::{self, shell_bound_verified};
use periodist_core::seq::pairing;
use periodist_core::stable_rank::{
    audit_trace, clip_below, exp_decay_gap, q_algebra_violation, reduce_pair, weak_star_gap,
    ReduceOptions,
};
use periodist_core::{Complex64, FastSequence, LatticeIndex, SlowSequence, WitnessSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_0f_c0_7e;

enum Verdict {
    Pass(String),
    Fail(String),
    /// The stated target contradicts the definitions; `confirmed` says
    /// whether the measured value is the one the definitions predict.
    Unattainable { detail: String, confirmed: bool },
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn idx(coords: &[i64]) -> LatticeIndex {
    LatticeIndex::new(coords.to_vec()).unwrap()
}

fn random_complex(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..TAU))
}

/// Any polynomially bounded expression, certified or not.
fn arbitrary(rng: &mut ChaCha8Rng, dim: usize, depth: u32) -> SlowSequence {
    let choice = if depth == 0 { rng.gen_range(0..5) } else { rng.gen_range(0..8) };
    match choice {
        0 => SlowSequence::constant(dim, random_complex(rng, 0.0, 2.0)).unwrap(),
        1 => SlowSequence::coord(dim, rng.gen_range(0..dim)).unwrap(),
        2 => SlowSequence::norm1(dim).unwrap(),
        3 => SlowSequence::polyenv(dim, rng.gen_range(-2..=1)).unwrap(),
        4 => SlowSequence::expdecay(dim, rng.gen_range(0.1..1.0)).unwrap(),
        5 => arbitrary(rng, dim, depth - 1)
            .plus(&arbitrary(rng, dim, depth - 1))
            .unwrap(),
        6 => arbitrary(rng, dim, depth - 1)
            .times(&arbitrary(rng, dim, depth - 1))
            .unwrap(),
        _ => arbitrary(rng, dim, depth - 1).phase(),
    }
}

/// A member from the recognised lower-bound forms.
fn certified(rng: &mut ChaCha8Rng, dim: usize, depth: u32) -> SlowSequence {
    let choice = if depth == 0 { rng.gen_range(0..4) } else { rng.gen_range(0..8) };
    match choice {
        0 => SlowSequence::constant(dim, random_complex(rng, 0.25, 3.0)).unwrap(),
        1 => SlowSequence::polyenv(dim, rng.gen_range(-2..=2)).unwrap(),
        2 => arbitrary(rng, dim, 1).phase(),
        3 => {
            let base = random_complex(rng, 0.5, 2.0);
            let entries = (0..rng.gen_range(1..4))
                .map(|_| {
                    let n: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
                    (idx(&n), random_complex(rng, 0.3, 2.0))
                })
                .collect::<BTreeMap<_, _>>();
            SlowSequence::points(dim, base, entries).unwrap()
        }
        4 => arbitrary(rng, dim, 1).clip(rng.gen_range(0.1..1.0)).unwrap(),
        5 => SlowSequence::one(dim)
            .unwrap()
            .plus(&arbitrary(rng, dim, 1).abs())
            .unwrap(),
        6 => certified(rng, dim, depth - 1)
            .times(&certified(rng, dim, depth - 1))
            .unwrap(),
        _ => {
            let arg = certified(rng, dim, depth - 1);
            let w = modulus_lower_bound(arg.node(), dim).expect("certified form");
            arg.recip(w).unwrap()
        }
    }
}

/// A family of `len` members, one of them certified, with that member's
/// lower bound as the witness.
fn family(rng: &mut ChaCha8Rng, dim: usize, len: usize) -> (Vec<SlowSequence>, WitnessSpec) {
    let slot = rng.gen_range(0..len);
    let mut a = Vec::with_capacity(len);
    let mut witness = None;
    for i in 0..len {
        if i == slot {
            let s = certified(rng, dim, 2);
            witness = modulus_lower_bound(s.node(), dim);
            a.push(s);
        } else {
            a.push(arbitrary(rng, dim, 2));
        }
    }
    (a, witness.expect("certified member has a lower bound"))
}

struct Families {
    cases: Vec<(Vec<SlowSequence>, CoronaWitness, Vec<SlowSequence>)>,
}

fn build_families(rng: &mut ChaCha8Rng) -> Families {
    let mut cases = Vec::new();
    for i in 0..120 {
        let dim = 1 + i % 3;
        let len = rng.gen_range(1..=4);
        let (a, w) = family(rng, dim, len);
        let witness = establish_witness(&a, w.delta, w.k, 0)
            .unwrap()
            .expect("certified bound holds at the origin");
        let sol = solve_bezout(&a, &witness).unwrap();
        cases.push((a, witness, sol.cofactors));
    }
    Families { cases }
}

fn criterion_1(fam: &Families) -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut uncertified = 0;
    for (a, w, b) in &fam.cases {
        if w.status != WitnessStatus::Certified {
            uncertified += 1;
        }
        let r = verify_bezout(a, b, 50).unwrap();
        worst = worst.max(r);
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "{} families, max residual {worst:.2e}, {secs:.2} s",
        fam.cases.len()
    );
    if worst <= 1e-12 && secs <= 10.0 && uncertified == 0 {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(format!("{detail}, {uncertified} witnesses not certified"))
    }
}

fn criterion_2(fam: &Families) -> Verdict {
    let mut worst_ratio = 0.0f64;
    for (a, w, b) in &fam.cases {
        let implied = witness_from_bezout(b).unwrap();
        let slack = w.delta * a.len() as f64;
        worst_ratio = worst_ratio.max(implied.delta / w.delta);
        if implied.delta > slack {
            return Verdict::Fail(format!("δ' = {} exceeds δ·N = {slack}", implied.delta));
        }
        let check = check_corona_window(a, implied.delta, implied.k, 50).unwrap();
        if !check.holds {
            return Verdict::Fail(format!(
                "window check fails at {:?} for (δ', K') = ({}, {})",
                check.first_violation, implied.delta, implied.k
            ));
        }
    }
    Verdict::Pass(format!(
        "{} families, max δ'/δ {worst_ratio:.6}, window 50",
        fam.cases.len()
    ))
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Verdict {
    let epsilons = [0.25, 0.05, 0.1, 0.2, 0.3, 0.4, 0.45];
    let mut quarter_min = f64::INFINITY;
    let mut worst_factorization = 0.0f64;
    for i in 0..105 {
        let dim = 1 + i % 3;
        let (a, w) = family(rng, dim, 2);
        let witness = CoronaWitness::new(w.delta, w.k, WitnessStatus::Certified).unwrap();
        let b = solve_bezout(&a, &witness).unwrap().cofactors;
        let eps = epsilons[i % epsilons.len()];
        let window = [40, 20, 10][dim - 1];
        let opts = ReduceOptions {
            epsilon: eps,
            window,
            ..ReduceOptions::default()
        };
        let trace = reduce_pair(&a[0], &a[1], &b[0], &b[1], &opts).unwrap();
        let audit = audit_trace(&trace, &a[0], &a[1], window).unwrap();
        if audit.min_abs_correction < 1.0 - 2.0 * eps {
            return Verdict::Fail(format!(
                "ε = {eps}: min |correction| {} < {}",
                audit.min_abs_correction,
                1.0 - 2.0 * eps
            ));
        }
        if eps == 0.25 {
            quarter_min = quarter_min.min(audit.min_abs_correction);
        }
        let unit = is_unit(&trace.result, &trace.result_inverse_witness, window).unwrap();
        if !unit.invertible {
            return Verdict::Fail(format!(
                "result not a unit under the composed witness at {:?}",
                unit.first_violation
            ));
        }
        worst_factorization = worst_factorization.max(audit.max_factorization_residual);
    }
    let detail = format!(
        "105 pairs, min |correction| at ε=1/4 {quarter_min:.6}, max factorization residual {worst_factorization:.2e}"
    );
    if quarter_min >= 0.5 && worst_factorization <= 1e-10 {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

/// `Σ_{|n|≤R} (a_ε(n) - n) 2^{-|n|}` with `a_ε(n) = ε` where `|n| ≤ ε`.
fn clipped_identity_gap(eps: f64, radius: i64) -> f64 {
    (-radius..=radius)
        .map(|n| {
            let a = n as f64;
            let clipped = if a.abs() <= eps { eps } else { a };
            (clipped - a) * 2f64.powi(-(n.abs() as i32))
        })
        .sum::<f64>()
        .abs()
}

fn criterion_4(rng: &mut ChaCha8Rng) -> Verdict {
    let a = SlowSequence::coord(1, 0).unwrap();
    let b = FastSequence::from_slow(SlowSequence::expdecay(1, LN_2).unwrap()).unwrap();
    let mut exact = Vec::new();
    let mut boundary = None;
    for eps in [1.0, 0.5, 0.25, 0.125] {
        let clipped = clip_below(&a, eps).unwrap().sequence;
        let gap = weak_star_gap(&clipped, &a, &b, 50).unwrap().gap;
        let oracle = clipped_identity_gap(eps, 50);
        if eps == 1.0 {
            boundary = Some((gap, oracle));
        } else if gap != eps {
            return Verdict::Fail(format!("ε = {eps}: gap {gap}, oracle {oracle}"));
        } else {
            exact.push(eps);
        }
    }

    for _ in 0..200 {
        let dim = rng.gen_range(1..=2);
        let x = arbitrary(rng, dim, 2);
        let eps = rng.gen_range(0.01..1.5);
        let test = if rng.gen_bool(0.5) {
            SlowSequence::expdecay(dim, rng.gen_range(0.3..2.0)).unwrap()
        } else {
            let order = (x.cert().k + dim as u32) as i32;
            SlowSequence::polyenv(dim, -order - rng.gen_range(2..4)).unwrap()
        };
        let test = FastSequence::from_slow(test).unwrap();
        let clipped = clip_below(&x, eps).unwrap().sequence;
        let report = weak_star_gap(&clipped, &x, &test, 30).unwrap();
        if report.gap > 2.0 * eps * report.abs_sum_bound {
            return Verdict::Fail(format!(
                "gap {} above 2ε·Σ|b| = {}",
                report.gap,
                2.0 * eps * report.abs_sum_bound
            ));
        }
    }

    let (gap, oracle) = boundary.expect("ε = 1 was run");
    let detail = format!(
        "gap = ε exactly for ε ∈ {exact:?}; 200 random gaps within 2ε·Σ|b|; \
         ε = 1 gives gap {gap} (oracle {oracle}), not 1: n = -1 also satisfies |n| ≤ 1 and is clipped to 1, adding 2·2^-1"
    );
    Verdict::Unattainable {
        detail,
        confirmed: (gap - 2.0).abs() <= 1e-15 && (oracle - 2.0).abs() <= 1e-15,
    }
}

fn criterion_5() -> Verdict {
    let mut worst_shell = 0;
    for delta in [1.0, 0.5, 0.1] {
        for k in [0, 1, 2, 3, 5] {
            match q_algebra_violation(1, 1.0, delta, k, 40).unwrap() {
                Some(n) => {
                    let r = n.norm1();
                    // the point must violate the bound on its own
                    let value = (-(r as f64)).exp();
                    if value >= delta * (1.0 + r as f64).powi(-(k as i32)) {
                        return Verdict::Fail(format!("({delta}, {k}): {n:?} is not a violation"));
                    }
                    worst_shell = worst_shell.max(r);
                }
                None => return Verdict::Fail(format!("({delta}, {k}): no violation up to 40")),
            }
        }
    }
    // Σ_n |n| (1+|n|)^{-3} = 2 Σ_{r≥1} r/(1+r)^3 = 2(ζ(2) - ζ(3))
    let k_prime_exact = 2.0 * (std::f64::consts::PI.powi(2) / 6.0 - 1.202_056_903_159_594_3);
    let b = FastSequence::from_slow(SlowSequence::polyenv(1, -3).unwrap()).unwrap();
    let mut lines = Vec::new();
    for eps in [0.1, 0.01] {
        let g = exp_decay_gap(eps, &b, 50).unwrap();
        if g.k_prime < k_prime_exact || g.gap > g.bound {
            return Verdict::Fail(format!(
                "ε = {eps}: gap {}, K' {} (true value {k_prime_exact})",
                g.gap, g.k_prime
            ));
        }
        lines.push(format!("ε={eps}: {:.4} ≤ {:.4}", g.gap, g.bound));
    }
    Verdict::Pass(format!(
        "15 grid points violate by shell {worst_shell}; {}",
        lines.join(", ")
    ))
}

/// Rows of lengths in `[0.5, 3]` at least 30° apart.
fn random_basis(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<f64>> {
    loop {
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let norms: Vec<f64> = rows.iter().map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
        if norms.iter().any(|&n| !(0.5..=3.0).contains(&n)) {
            continue;
        }
        if dim == 1 {
            return rows;
        }
        let det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0];
        if det.abs() >= 0.5 * norms[0] * norms[1] {
            return rows;
        }
    }
}

/// `y = A⁻ᵀ x` by Cramer's rule.
fn dual_coords(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    if rows.len() == 1 {
        return vec![x[0] / rows[0][0]];
    }
    // solve Aᵀ y = x
    let (a, b, cc, d) = (rows[0][0], rows[1][0], rows[0][1], rows[1][1]);
    let det = a * d - b * cc;
    vec![(x[0] * d - b * x[1]) / det, (a * x[1] - cc * x[0]) / det]
}

fn trig_eval(rows: &[Vec<f64>], coeffs: &[(Vec<i64>, Complex64)], x: &[f64]) -> Complex64 {
    let y = dual_coords(rows, x);
    coeffs
        .iter()
        .map(|(m, v)| {
            let phase: f64 = m.iter().zip(&y).map(|(&mi, yi)| mi as f64 * yi).sum();
            v * Complex64::from_polar(1.0, TAU * phase)
        })
        .sum()
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Verdict {
    const N: usize = 8;
    let mut worst_round_trip = 0.0f64;
    let mut worst_coefficient = 0.0f64;
    let mut worst_shift = 0.0f64;
    for i in 0..50 {
        let dim = 1 + i % 2;
        let rows = random_basis(rng, dim);
        let degree: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..=3)).collect();
        let mut coeffs = Vec::new();
        let mut m = vec![0i64; dim];
        let mut all = vec![vec![]];
        for &deg in &degree {
            all = all
                .into_iter()
                .flat_map(|p: Vec<i64>| (-deg..=deg).map(move |v| [p.clone(), vec![v]].concat()))
                .collect();
        }
        for p in all {
            m.clone_from(&p);
            coeffs.push((m.clone(), random_complex(rng, 0.0, 1.0)));
        }
        let basis = PeriodBasis::new(rows.clone()).unwrap();
        let grid: Vec<Vec<usize>> = (0..N.pow(dim as u32))
            .map(|flat| {
                if dim == 1 {
                    vec![flat]
                } else {
                    vec![flat / N, flat % N]
                }
            })
            .collect();
        let points: Vec<Vec<f64>> = grid
            .iter()
            .map(|j| {
                (0..dim)
                    .map(|axis| (0..dim).map(|k| rows[k][axis] * j[k] as f64 / N as f64).sum())
                    .collect()
            })
            .collect();
        let samples: Vec<Complex64> = points.iter().map(|x| trig_eval(&rows, &coeffs, x)).collect();
        let sampled = coeffs_from_samples(&basis, N, &samples).unwrap();
        let map = &sampled.coefficients;
        for (m, v) in &coeffs {
            worst_coefficient = worst_coefficient.max((map.get(&idx(m)).unwrap() - v).norm());
        }
        for (x, s) in points.iter().zip(&samples) {
            worst_round_trip = worst_round_trip.max((synthesize(&basis, map, x).unwrap() - s).norm());
        }
        for _ in 0..100 {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let fx = synthesize(&basis, map, &x).unwrap();
            for period in &rows {
                let shifted: Vec<f64> = x.iter().zip(period).map(|(a, b)| a + b).collect();
                worst_shift = worst_shift.max((synthesize(&basis, map, &shifted).unwrap() - fx).norm());
            }
        }
    }
    let detail = format!(
        "50 polynomials, round trip {worst_round_trip:.2e}, coefficients {worst_coefficient:.2e}, translation {worst_shift:.2e}"
    );
    if worst_round_trip <= 1e-12 && worst_shift <= 1e-10 {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn criterion_7() -> Verdict {
    let p = Poly::new(vec![rational(-1, 1), rational(-1, 1), rational(-1, 1)]);
    let q = Poly::one();
    let f = Poly::new(vec![rational(-1, 1), rational(1, 1)]);
    let g = Poly::monomial(3);
    let residual = poly_bezout_check(&p, &q, &f, &g);
    let search = polynomial_reducer_search(3).unwrap();
    let detail = format!(
        "identity residual {residual}, {} candidates, {} units, max root residual {:.2e}",
        search.samples_checked, search.units_found, search.max_root_residual
    );
    if residual == 0.0 && search.units_found == 0 && search.max_root_residual <= 1e-9 {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

/// A finitely modified constant in `d = 1`, kept as raw data.
struct Modified {
    base: Complex64,
    entries: BTreeMap<i64, Complex64>,
}

impl Modified {
    fn random(rng: &mut ChaCha8Rng, zero_base: bool) -> Self {
        let pick = |rng: &mut ChaCha8Rng| match rng.gen_range(0..4) {
            0 => c(0.0, 0.0),
            1 => c(rng.gen_range(-2.0..2.0), 0.0),
            _ => random_complex(rng, 0.0, 2.0),
        };
        let base = if zero_base { c(0.0, 0.0) } else { pick(rng) };
        let entries = (0..rng.gen_range(0..8))
            .map(|_| (rng.gen_range(-25..=25), pick(rng)))
            .collect();
        Modified { base, entries }
    }

    fn at(&self, n: i64) -> Complex64 {
        self.entries.get(&n).copied().unwrap_or(self.base)
    }

    fn sequence(&self) -> SlowSequence {
        SlowSequence::points(1, self.base, self.entries.iter().map(|(&n, &v)| (idx(&[n]), v))).unwrap()
    }
}

/// Shell order in `d = 1`: `0, -1, 1, -2, 2, …`.
fn scan(radius: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=radius).flat_map(|r| [-r, r]))
}

fn brute_violation(family: &[Modified], delta: f64, k: u32, radius: i64) -> Option<i64> {
    scan(radius).find(|&n| {
        let sum: f64 = family.iter().map(|s| s.at(n).norm()).sum();
        sum < delta / (1.0 + n.abs() as f64).powi(k as i32)
    })
}

fn criterion_8(rng: &mut ChaCha8Rng) -> Verdict {
    let mut disagreements = Vec::new();
    let mut corona_holds = 0;
    let mut units = 0;
    let mut worst_pairing = 0.0f64;
    for case in 0..1000 {
        let radius = rng.gen_range(0..=30i64);
        let delta = rng.gen_range(0.05..2.0);
        let k = rng.gen_range(0..=3u32);
        let len = rng.gen_range(1..=3);
        let raw: Vec<Modified> = (0..len).map(|_| Modified::random(rng, false)).collect();
        let family: Vec<SlowSequence> = raw.iter().map(Modified::sequence).collect();

        let lib = check_corona_window(&family, delta, k, radius as u64).unwrap();
        let brute = brute_violation(&raw, delta, k, radius);
        let lib_first = lib.first_violation.as_ref().map(|n| n.coords()[0]);
        if lib.holds != brute.is_none() || lib_first != brute {
            disagreements.push(format!("corona case {case}: {lib_first:?} vs {brute:?}"));
        }
        corona_holds += usize::from(lib.holds);

        let witness = CoronaWitness::new(delta, k, WitnessStatus::WindowVerified { radius: radius as u64 }).unwrap();
        let unit = is_unit(&family[0], &witness, radius as u64).unwrap();
        let brute_unit = brute_violation(&raw[..1], delta, k, radius);
        if unit.invertible != brute_unit.is_none() {
            disagreements.push(format!("unit case {case}: {} vs {brute_unit:?}", unit.invertible));
        } else if let Some(inv) = &unit.inverse {
            units += 1;
            for n in scan(radius) {
                let expected = 1.0 / raw[0].at(n);
                let got = inv.eval(&idx(&[n])).unwrap();
                if (got - expected).norm() > 1e-12 * expected.norm() {
                    disagreements.push(format!("inverse case {case} at {n}: {got} vs {expected}"));
                    break;
                }
            }
        }

        let test_raw = Modified::random(rng, true);
        let test = FastSequence::from_slow(test_raw.sequence()).unwrap();
        let lib_pair = pairing(&family[0], &test, radius as u64).unwrap().value;
        let (sum, scale) = scan(radius).fold((c(0.0, 0.0), 0.0), |(s, m), n| {
            let t = raw[0].at(n) * test_raw.at(n);
            (s + t, m + t.norm())
        });
        let err = (lib_pair - sum).norm();
        worst_pairing = worst_pairing.max(err);
        if err > 1e-12 * (1.0 + scale) {
            disagreements.push(format!("pairing case {case}: {lib_pair} vs {sum}"));
        }
    }
    let detail = format!(
        "1000 cases ({corona_holds} windows hold, {units} units), pairing error {worst_pairing:.2e}"
    );
    if disagreements.is_empty() {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(format!("{} disagreements, first: {}", disagreements.len(), disagreements[0]))
    }
}

fn criterion_9() -> Verdict {
    const R: i64 = 50;
    for dim in 1..=3usize {
        let mut counts = vec![0u64; R as usize + 1];
        let mut point = vec![-R; dim];
        loop {
            let norm: i64 = point.iter().map(|v| v.abs()).sum();
            if norm <= R {
                counts[norm as usize] += 1;
            }
            let mut axis = 0;
            while axis < dim && point[axis] == R {
                point[axis] = -R;
                axis += 1;
            }
            if axis == dim {
                break;
            }
            point[axis] += 1;
        }
        for (r, &count) in counts.iter().enumerate() {
            let bound = (1u64 << dim) * (1 + r as u64).pow(dim as u32 - 1);
            let shell = lattice::shell(dim, r as u64);
            if count > bound || shell.len() as u64 != count {
                return Verdict::Fail(format!(
                    "d = {dim}, r = {r}: {count} points, shell() gives {}, bound {bound}",
                    shell.len()
                ));
            }
        }
    }
    if !shell_bound_verified() {
        return Verdict::Fail("library self-check disagrees".into());
    }
    Verdict::Pass("d ≤ 3, r ≤ 50 enumerated; library self-check agrees".into())
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let families = build_families(&mut rng);
    let mut rng3 = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut rng4 = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut rng6 = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut rng8 = ChaCha8Rng::seed_from_u64(SEED + 8);

    type Run<'a> = Box<dyn FnOnce() -> Verdict + 'a>;
    let runs: Vec<(&str, Run)> = vec![
        ("bezout exactness", Box::new(|| criterion_1(&families))),
        ("witness round trip", Box::new(|| criterion_2(&families))),
        ("reduction constants", Box::new(|| criterion_3(&mut rng3))),
        ("approximation rate", Box::new(|| criterion_4(&mut rng4))),
        ("non-Q-algebra demo", Box::new(criterion_5)),
        ("fourier round trip", Box::new(|| criterion_6(&mut rng6))),
        ("polynomial identity", Box::new(criterion_7)),
        ("oracle equivalence", Box::new(|| criterion_8(&mut rng8))),
        ("shell bound", Box::new(criterion_9)),
    ];

    let mut failed = 0;
    for (i, (name, run)) in runs.into_iter().enumerate() {
        let verdict = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Verdict::Fail("panicked".into()));
        match verdict {
            Verdict::Pass(d) => println!("PASS  {}  {name}: {d}", i + 1),
            Verdict::Fail(d) => {
                failed += 1;
                println!("FAIL  {}  {name}: {d}", i + 1);
            }
            Verdict::Unattainable { detail, confirmed } => {
                if confirmed {
                    println!("FAIL  {}  {name} (unattainable as stated): {detail}", i + 1);
                } else {
                    failed += 1;
                    println!("FAIL  {}  {name}: {detail}", i + 1);
                }
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
