//! Search for adversarial orderings: permutations and coefficients that
//! make the additive maximal partial-sum operator large, plus the exact
//! shift-discretization step that converts a continuous level set into a
//! statement about the discrete grid a/M.
//!
//! An existence statement is replaced here by explicit search: uniformly
//! random permutations, bit-reversal-style dyadic interleavings, and local
//! swap hill-climbing, each with coefficients optimized by the alternating
//! heuristic on the system e(sigma(n) x / M). The identity permutation is
//! always scored first, so the search never returns anything worse.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chargroup::{
    additive_max_at, additive_max_partial, unit_phase_real, CoefficientVector,
};
use crate::delta::LinearizedSystem;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Knobs for the per-candidate coefficient optimization and the level-set
/// report. c1 scales the reporting threshold c1 * log^{1/4}(N).
#[derive(Clone, Copy, Debug)]
pub struct SearchParams {
    pub restarts: usize,
    pub iters: usize,
    pub c1: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            restarts: 2,
            iters: 30,
            c1: 0.1,
        }
    }
}

/// A permutation and unit coefficient vector with the score of their
/// maximal function and level-set statistics at the reporting threshold.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BadOrderWitness {
    pub n: usize,
    pub sigma: Permutation,
    pub b: CoefficientVector,
    pub threshold: f64,
    pub level_mass: f64,
    pub score: f64,
}

fn mix_seed(seed: u64, salt: u64) -> u64 {
    // splitmix64 step over seed ^ salt.
    let mut z = (seed ^ salt).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Quadratic-mean score of the maximal function of (b, sigma) over [1, M],
/// normalized by the coefficient norm.
pub fn score_of(b: &CoefficientVector, sigma: &Permutation, m: u64) -> Result<f64> {
    Ok(additive_max_partial(b, sigma, m)?.ratio)
}

/// Dyadic structured candidates: bit reversal and deal interleavings.
fn structured_candidates(n: usize) -> Vec<Permutation> {
    let mut out = vec![Permutation::bit_reversal(n)];
    let mut blocks = 2usize;
    while blocks < n {
        out.push(Permutation::deal(n, blocks));
        blocks *= 2;
    }
    let identity = Permutation::identity(n);
    out.retain(|p| *p != identity);
    out.dedup();
    out
}

/// Searches for a permutation of [n] and unit coefficients maximizing the
/// L2 average of the maximal function over [1, m]. The identity permutation
/// is always in the comparison set; `budget` counts additional candidates.
pub fn search_bad_permutation(
    n: usize,
    m: u64,
    budget: u64,
    seed: u64,
    params: &SearchParams,
) -> Result<BadOrderWitness> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if m < n as u64 {
        return Err(Error::InvalidArgument(format!(
            "evaluation modulus m={m} must be at least n={n}"
        )));
    }

    let optimize = |sigma: &Permutation, counter: u64| -> Result<(f64, Vec<num_complex::Complex64>)> {
        let system = LinearizedSystem::from_additive(sigma, m);
        let outcome =
            system.alternating_maximize(params.restarts, params.iters, mix_seed(seed, counter))?;
        Ok((outcome.value, outcome.coeffs))
    };

    let mut counter = 0u64;
    let identity = Permutation::identity(n);
    let (id_score, id_coeffs) = optimize(&identity, counter)?;
    let mut best_sigma = identity;
    let mut best_score = id_score;
    let mut best_coeffs = id_coeffs;

    let consider = |sigma: Permutation,
                        counter: u64,
                        best_sigma: &mut Permutation,
                        best_score: &mut f64,
                        best_coeffs: &mut Vec<num_complex::Complex64>|
     -> Result<()> {
        let (score, coeffs) = optimize(&sigma, counter)?;
        let better = score > *best_score
            || (score == *best_score && sigma.encoding() < best_sigma.encoding());
        if better {
            *best_sigma = sigma;
            *best_score = score;
            *best_coeffs = coeffs;
        }
        Ok(())
    };

    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, u64::MAX));
    let mut remaining = budget;
    for sigma in structured_candidates(n) {
        if remaining == 0 {
            break;
        }
        remaining -= 1;
        counter += 1;
        consider(sigma, counter, &mut best_sigma, &mut best_score, &mut best_coeffs)?;
    }
    while remaining > 0 {
        remaining -= 1;
        counter += 1;
        let sigma = if counter.is_multiple_of(2) && n >= 2 {
            // Local swap hill-climb from the best so far.
            let i = rng.gen_range(1..=n);
            let mut j = rng.gen_range(1..=n);
            while j == i {
                j = rng.gen_range(1..=n);
            }
            best_sigma.swapped(i, j)
        } else {
            Permutation::random(n, &mut rng)
        };
        consider(sigma, counter, &mut best_sigma, &mut best_score, &mut best_coeffs)?;
    }

    let b = CoefficientVector::from_dense(&best_coeffs).normalized()?;
    let report = additive_max_partial(&b, &best_sigma, m)?;
    let threshold = params.c1 * (n as f64).ln().max(0.0).powf(0.25);
    let above = report.points.iter().filter(|p| p.max > threshold).count();
    Ok(BadOrderWitness {
        n,
        sigma: best_sigma,
        b,
        threshold,
        level_mass: above as f64 / m as f64,
        score: report.ratio,
    })
}

/// Entrywise phase twist b_n -> e(sigma(n) tau) b_n. Unimodular factors,
/// so the cached norm carries over exactly.
pub fn shift_coefficients(
    b: &CoefficientVector,
    sigma: &Permutation,
    tau: f64,
) -> Result<CoefficientVector> {
    if sigma.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "permutation length {} does not match coefficient count {}",
            sigma.len(),
            b.len()
        )));
    }
    let entries = b
        .entries()
        .iter()
        .enumerate()
        .map(|(j, &(idx, v))| (idx, v * unit_phase_real(sigma.apply(j + 1) as f64 * tau)))
        .collect();
    CoefficientVector::with_norm(entries, b.norm2())
}

/// For each tau on a uniform grid of [0, 1/M), counts the points a in [M]
/// whose shifted maximal value at a/M exceeds the threshold; returns the
/// tau maximizing the count (smallest on ties) and that count. This is the
/// discrete realization of averaging the level-set indicator over shifts.
pub fn discretize_via_shift(
    b: &CoefficientVector,
    sigma: &Permutation,
    m: u64,
    grid: u64,
    threshold: f64,
) -> Result<(f64, usize)> {
    if grid == 0 || m == 0 {
        return Err(Error::InvalidArgument("m and grid must be positive".into()));
    }
    if sigma.len() != b.len() {
        return Err(Error::InvalidArgument(
            "permutation length does not match coefficient count".into(),
        ));
    }
    let mut best: Option<(f64, usize)> = None;
    for i in 0..grid {
        let tau = i as f64 / (m * grid) as f64;
        let count = (1..=m)
            .filter(|&a| additive_max_at(b, sigma, a as f64 / m as f64 + tau) > threshold)
            .count();
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((tau, count));
        }
    }
    Ok(best.expect("grid >= 1"))
}
