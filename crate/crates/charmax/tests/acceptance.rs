//! Acceptance suite: one test per criterion, each printing a pass line and
//! enforcing its runtime cap. Run with `cargo test --test acceptance --
//! --nocapture` to see the per-criterion lines.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use charmax::chargroup::{
    additive_max_partial, eval_character, multiplicative_max_partial,
    transport_subgroup_to_additive, CoefficientVector,
};
use charmax::delta::{delta_exact_small, delta_heuristic, delta_ratio, random_unit_vector, rm_upper_bound};
use charmax::discrepancy::{
    empirical_grid_discrepancy, etk_bound, fh_identity_check, find_ordered_element,
    subgroup_point_set, weil_sum, Frac, PointSet,
};
use charmax::numtheory::{
    gcd, primes_up_to, scan_fouvry_primes, units, GroupContext, SubgroupContext,
};
use charmax::perm::Permutation;
use charmax::pipeline::{scan_counterexamples, CounterexampleConfig};
use charmax::rearrangement::SearchParams;
use charmax::report;

const TRANSPORT_PAIRS: [(u64, u64); 5] = [(7, 3), (11, 5), (23, 11), (59, 29), (107, 53)];

fn elapsed_ok(name: &str, t0: Instant, cap_secs: f64) {
    let dt = t0.elapsed().as_secs_f64();
    assert!(
        dt < cap_secs,
        "criterion '{name}' exceeded its runtime cap: {dt:.1}s >= {cap_secs}s"
    );
    println!("acceptance {name}: PASS ({dt:.2}s)");
}

fn random_coeffs_on(positions: &[u64], rng: &mut ChaCha8Rng) -> CoefficientVector {
    let v = random_unit_vector(positions.len(), rng);
    CoefficientVector::new(positions.iter().zip(&v).map(|(&p, &z)| (p, z)).collect()).unwrap()
}

fn scan_config(seed: u64) -> CounterexampleConfig {
    CounterexampleConfig {
        budget: 8,
        seed,
        search: SearchParams {
            restarts: 2,
            iters: 25,
            c1: 0.1,
        },
        ..CounterexampleConfig::default()
    }
}

#[test]
fn criterion_01_orthogonality_and_parseval() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for p in primes_up_to(31) {
        let ctx = GroupContext::build(p).unwrap();
        // Exhaustive orthogonality to 1e-10 absolute.
        for n in 1..p {
            for m in 1..p {
                let mut s = Complex64::new(0.0, 0.0);
                for a in 0..p - 1 {
                    s += eval_character(&ctx, a, n).unwrap()
                        * eval_character(&ctx, a, m).unwrap().conj();
                }
                s /= (p - 1) as f64;
                let expect = if n == m { 1.0 } else { 0.0 };
                assert!(
                    (s - Complex64::new(expect, 0.0)).norm() <= 1e-10,
                    "orthogonality fails at p={p}, n={n}, m={m}"
                );
            }
        }
        // Parseval at the full cutoff to 1e-10 relative, 100 random vectors.
        let positions: Vec<u64> = (1..p).collect();
        for _ in 0..100 {
            let a = random_coeffs_on(&positions, &mut rng);
            let mut sum = 0.0;
            for ai in 0..p - 1 {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(n, v) in a.entries() {
                    acc += v * eval_character(&ctx, ai, n).unwrap();
                }
                sum += acc.norm_sqr();
            }
            let full = (sum / (p - 1) as f64).sqrt();
            assert!(
                (full - a.norm2()).abs() <= 1e-10 * a.norm2(),
                "parseval fails at p={p}: {full} vs {}",
                a.norm2()
            );
        }
    }
    elapsed_ok("criterion 1 (orthogonality & parseval)", t0, 10.0);
}

#[test]
fn criterion_02_transport_identity() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for (p, q) in TRANSPORT_PAIRS {
        let ctx = GroupContext::build(p).unwrap();
        let sub = SubgroupContext::build(&ctx, q).unwrap();
        let positions: Vec<u64> = (1..=q).collect();
        for _ in 0..100 {
            let a = random_coeffs_on(&positions, &mut rng);
            let (lhs, rhs) = transport_subgroup_to_additive(&sub, &a).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-9 * lhs.abs().max(f64::MIN_POSITIVE),
                "transport fails at p={p}, q={q}: {lhs} vs {rhs}"
            );
        }
    }
    elapsed_ok("criterion 2 (transport identity)", t0, 30.0);
}

#[test]
fn criterion_03_reduction_chain() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for p in [23u64, 47, 59] {
        let k = (p as f64).log2().floor() as usize - 1;
        assert!(1u64 << k < p);
        for _ in 0..50 {
            let values = random_unit_vector(k, &mut rng);
            let a = CoefficientVector::from_dense(&values);
            let rep = charmax::pipeline::verify_ch_reduction(p, &a).unwrap();
            let base = rep.chain_values[0];
            for v in &rep.chain_values[1..] {
                assert!(
                    (v - base).abs() <= 1e-9 * base.abs().max(f64::MIN_POSITIVE),
                    "chain values diverge at p={p}: {:?}",
                    rep.chain_values
                );
            }
            assert_eq!((p - 1) % rep.m, 0, "M must divide p-1");
            assert_eq!(gcd(rep.l, rep.m), 1, "L and M must be coprime");
            assert!(rep.m_exceeds_log, "2^M > p must hold exactly");
        }
    }
    elapsed_ok("criterion 3 (reduction chain)", t0, 60.0);
}

#[test]
fn criterion_04_exact_delta_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for n in [3u64, 4, 5] {
        let exact = delta_exact_small(n, 17).unwrap();
        let heur = delta_heuristic(n, 50, 60, 1040 + n).unwrap();
        assert!(
            heur.value >= exact.value - 1e-6 && heur.value <= exact.value + 1e-9,
            "N={n}: heuristic {} not within [exact - 1e-6, exact + 1e-9] of {}",
            heur.value,
            exact.value
        );
        let positions = units(n);
        for _ in 0..10_000 {
            let a = random_coeffs_on(&positions, &mut rng);
            let r = delta_ratio(n, &a).unwrap();
            assert!(
                r <= exact.value + 1e-6,
                "N={n}: random direction {r} exceeds exact {}",
                exact.value
            );
        }
        assert!(exact.value >= 1.0 - 1e-9, "N={n}: exact below 1");
        let rm = rm_upper_bound(n).unwrap();
        assert!(
            exact.value <= rm.value,
            "N={n}: exact {} above the ceiling {}",
            exact.value,
            rm.value
        );
    }
    elapsed_ok("criterion 4 (exact delta oracle)", t0, 120.0);
}

#[test]
fn criterion_05_fh_identity() {
    let t0 = Instant::now();
    for (p, q) in TRANSPORT_PAIRS {
        let ctx = GroupContext::build(p).unwrap();
        let sub = SubgroupContext::build(&ctx, q).unwrap();
        for s in 1..=3usize {
            // Exhaustive over ||h||_inf <= 3.
            let mut h = vec![-3i64; s];
            loop {
                let (lhs, rhs) = fh_identity_check(&sub, &h);
                assert!(
                    (lhs - rhs).norm() <= 1e-10,
                    "f_h identity fails at p={p}, q={q}, h={h:?}"
                );
                let mut k = s;
                let mut done = false;
                loop {
                    if k == 0 {
                        done = true;
                        break;
                    }
                    k -= 1;
                    h[k] += 1;
                    if h[k] <= 3 {
                        break;
                    }
                    h[k] = -3;
                }
                if done {
                    break;
                }
            }
        }
    }
    elapsed_ok("criterion 5 (f_h identity)", t0, 60.0);
}

#[test]
fn criterion_06_weil_bound() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for p in [7u64, 11, 13, 17, 19, 23] {
        for deg in 2..=5usize {
            // Exhaustive over leading-coefficient classes, random tails
            // spread across them, about 500 polynomials per (p, degree).
            let tails_per_lead = (500 / (p - 1) as usize).max(1);
            for lead in 1..p {
                for _ in 0..tails_per_lead {
                    let mut coeffs: Vec<i64> =
                        (0..deg).map(|_| rng.gen_range(0..p as i64)).collect();
                    coeffs.push(lead as i64);
                    let s = weil_sum(p, &coeffs).unwrap();
                    let bound = (deg as f64 - 1.0) * (p as f64).sqrt();
                    assert!(
                        s.norm() <= bound + 1e-6,
                        "weil bound fails at p={p}, coeffs={coeffs:?}: |{}| > {bound}",
                        s.norm()
                    );
                }
            }
        }
    }
    // Quadratic Gauss sum magnitude at p=7.
    let g = weil_sum(7, &[0, 0, 1]).unwrap();
    assert!((g.norm() - 7f64.sqrt()).abs() <= 1e-9);
    elapsed_ok("criterion 6 (weil bound)", t0, 60.0);
}

#[test]
fn criterion_07_etk_bound_validity() {
    let t0 = Instant::now();
    for (p, q) in TRANSPORT_PAIRS {
        let ctx = GroupContext::build(p).unwrap();
        let sub = SubgroupContext::build(&ctx, q).unwrap();
        for s in 1..=3usize {
            let ps = subgroup_point_set(&sub, s).unwrap();
            let empirical = empirical_grid_discrepancy(&ps, 6).unwrap();
            for m in 1..=8u64 {
                let bound = etk_bound(&ps, m).unwrap();
                assert!(
                    bound >= empirical - 1e-9,
                    "bound fails at p={p}, q={q}, s={s}, m={m}: {bound} < {empirical}"
                );
            }
        }
    }
    // Equally spaced s=1 analytic case: exactly 18/m.
    let n = 16u64;
    let pts = (0..n).map(|j| vec![Frac::new(j, n).unwrap()]).collect();
    let ps = PointSet::from_fractions(1, pts, "equally spaced").unwrap();
    for m in 1..n {
        let bound = etk_bound(&ps, m).unwrap();
        assert!(
            (bound - 18.0 / m as f64).abs() <= 1e-9,
            "analytic case fails at m={m}: {bound}"
        );
    }
    elapsed_ok("criterion 7 (etk bound validity)", t0, 120.0);
}

#[test]
fn criterion_08_ordered_element_search() {
    let t0 = Instant::now();
    // (107, 53) at s=2: both permutations of [2] must succeed.
    let ctx = GroupContext::build(107).unwrap();
    let sub = SubgroupContext::build(&ctx, 53).unwrap();
    for sigma in Permutation::all(2) {
        assert!(
            find_ordered_element(&sub, 2, &sigma).is_some(),
            "no ordered element for sigma={sigma:?} at (107, 53)"
        );
    }
    // First scanned pair with q >= 500: all 6 permutations of [3].
    let pairs = scan_fouvry_primes(2000, 1.0, 0.6687).unwrap();
    let pair = pairs
        .iter()
        .find(|pp| pp.q >= 500)
        .expect("a pair with q >= 500 exists below 2000");
    let ctx = GroupContext::build(pair.p).unwrap();
    let sub = SubgroupContext::build(&ctx, pair.q).unwrap();
    for sigma in Permutation::all(3) {
        assert!(
            find_ordered_element(&sub, 3, &sigma).is_some(),
            "no ordered element for sigma={sigma:?} at ({}, {})",
            pair.p,
            pair.q
        );
    }
    elapsed_ok("criterion 8 (ordered-element search)", t0, 60.0);
}

#[test]
fn criterion_09_end_to_end_counterexample() {
    let t0 = Instant::now();
    let entries = scan_counterexamples(5000, 1.0, 0.6687, &scan_config(42)).unwrap();
    assert!(entries.len() >= 100, "the scan should find many primes");
    for e in &entries {
        let rep = &e.report;
        for id in &rep.identities {
            assert!(
                id.abs_error <= 1e-9,
                "identity '{}' error {} at p={}",
                id.name,
                id.abs_error,
                rep.p
            );
        }
        assert!(
            rep.delta_lower_bound >= 1.0 - 1e-9,
            "bound below 1 at p={}",
            rep.p
        );
        let rm = rm_upper_bound(rep.p).unwrap();
        assert!(
            rep.delta_lower_bound <= rm.value,
            "bound above the ceiling at p={}",
            rep.p
        );
        // Independent reproduction from the published witness data.
        let assembled = CoefficientVector::new(
            rep.support
                .iter()
                .zip(rep.b.entries())
                .map(|(&r, &(_, v))| (r, v))
                .collect(),
        )
        .unwrap();
        let reproduced = delta_ratio(rep.p, &assembled).unwrap();
        assert!(
            (reproduced - rep.delta_lower_bound).abs() <= 1e-9 * (1.0 + rep.delta_lower_bound),
            "delta_ratio does not reproduce the bound at p={}",
            rep.p
        );
    }
    elapsed_ok("criterion 9 (end-to-end counterexample)", t0, 300.0);
}

#[test]
fn criterion_10_determinism() {
    let t0 = Instant::now();
    // Criterion 4 reports, twice.
    for n in [3u64, 4, 5] {
        let a = report::to_json(&delta_exact_small(n, 17).unwrap()).unwrap();
        let b = report::to_json(&delta_exact_small(n, 17).unwrap()).unwrap();
        assert_eq!(a, b, "exact oracle JSON differs at N={n}");
        let c = report::to_json(&delta_heuristic(n, 50, 60, 1040 + n).unwrap()).unwrap();
        let d = report::to_json(&delta_heuristic(n, 50, 60, 1040 + n).unwrap()).unwrap();
        assert_eq!(c, d, "heuristic JSON differs at N={n}");
    }
    // Criterion 9 reports, twice.
    let first = scan_counterexamples(5000, 1.0, 0.6687, &scan_config(42)).unwrap();
    let second = scan_counterexamples(5000, 1.0, 0.6687, &scan_config(42)).unwrap();
    assert_eq!(first.len(), second.len());
    for (x, y) in first.iter().zip(&second) {
        let a = report::to_json(&x.report).unwrap();
        let b = report::to_json(&y.report).unwrap();
        assert_eq!(a, b, "scan JSON differs at p={}", x.report.p);
    }
    elapsed_ok("criterion 10 (determinism)", t0, 300.0);
}

/// Maximal partial sums again, as an extra guard that the additive report
/// is internally consistent on the suite sizes used above.
#[test]
fn report_internals_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(999);
    let values = random_unit_vector(6, &mut rng);
    let b = CoefficientVector::from_dense(&values);
    let sigma = Permutation::identity(6);
    let rep = additive_max_partial(&b, &sigma, 12).unwrap();
    let mean_sq: f64 =
        rep.points.iter().map(|p| p.max * p.max).sum::<f64>() / rep.points.len() as f64;
    assert!((rep.l2_average * rep.l2_average - mean_sq).abs() <= 1e-12 * mean_sq);
    for pt in &rep.points {
        assert!(pt.argmax >= 1 && pt.argmax as usize <= b.len());
    }
    let ctx = GroupContext::build(13).unwrap();
    let positions: Vec<u64> = (1..13).collect();
    let a = random_coeffs_on(&positions, &mut rng);
    let rep = multiplicative_max_partial(&ctx, &a).unwrap();
    let mean_sq: f64 =
        rep.points.iter().map(|p| p.max * p.max).sum::<f64>() / rep.points.len() as f64;
    assert!((rep.l2_average * rep.l2_average - mean_sq).abs() <= 1e-12 * mean_sq);
}
