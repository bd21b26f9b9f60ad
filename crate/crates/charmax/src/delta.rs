//! Estimation of the sharp constant Delta(N) in the L2 maximal inequality
//! for Dirichlet characters mod N: an exact oracle for tiny N that exhausts
//! cutoff assignments, an alternating-maximization heuristic that produces
//! certified lower bounds, and the dyadic-chaining ceiling.
//!
//! The nonlinear maximal operator becomes linear once every character is
//! pinned to a fixed prefix cutoff. Each assignment turns the problem into
//! a largest-singular-value computation for a selection matrix; the exact
//! value is the max over all assignments, and the heuristic alternates
//! between the argmax assignment for fixed coefficients and the top
//! singular vector for a fixed assignment.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chargroup::{unit_phase, CoefficientVector};
use crate::error::{Error, Result};
use crate::numtheory::{euler_phi, gcd, is_prime, multiplicative_order, units, GroupContext};
use crate::perm::Permutation;

/// Composite moduli are enumerable by brute-force homomorphism search only
/// up to this bound; prime moduli go through the discrete-log table.
pub const COMPOSITE_MODULUS_CAP: u64 = 12;

/// Cap on cutoff-assignment enumeration for the exact oracle.
const ASSIGNMENT_BUDGET: u128 = 1 << 20;

/// Cap on materialized character-system entries (rows x columns).
const MAX_SYSTEM_ENTRIES: usize = 4_000_000;

/// Power-iteration convergence: relative Rayleigh-quotient change.
const POWER_TOL: f64 = 1e-10;
const POWER_CAP: usize = 100_000;

/// One cutoff per character, as one-based prefix lengths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutoffAssignment(pub Vec<u32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Exact,
    LowerBound,
    UpperBound,
}

/// A value for Delta(N) together with how it was obtained.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaEstimate {
    #[serde(rename = "N")]
    pub n: u64,
    pub value: f64,
    pub kind: EstimateKind,
    pub method: String,
    pub witness_coeffs: Option<CoefficientVector>,
    pub witness_assignment: Option<CutoffAssignment>,
}

/// The full character table of Z_N^*: one row per character, one column per
/// unit residue in increasing order.
pub(crate) struct CharacterTable {
    pub positions: Vec<u64>,
    pub rows: Vec<Vec<Complex64>>,
}

impl CharacterTable {
    pub fn build(n: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "modulus must be at least 3, got {n}"
            )));
        }
        if is_prime(n) {
            let d = (n - 1) as usize;
            if d * d > MAX_SYSTEM_ENTRIES {
                return Err(Error::BudgetExceeded(format!(
                    "character table for N={n} needs {d}x{d} entries"
                )));
            }
            let ctx = GroupContext::build(n)?;
            let positions: Vec<u64> = (1..n).collect();
            let rows = (0..n - 1)
                .map(|a| {
                    positions
                        .iter()
                        .map(|&g| unit_phase(a * ctx.nu(g), n - 1))
                        .collect()
                })
                .collect();
            Ok(CharacterTable { positions, rows })
        } else {
            if n > COMPOSITE_MODULUS_CAP {
                return Err(Error::UnsupportedModulus(n, COMPOSITE_MODULUS_CAP));
            }
            Self::build_composite(n)
        }
    }

    /// Brute-force homomorphism enumeration: a character assigns to each
    /// unit an exponent k(u) into the e-th roots of unity, where e is the
    /// group exponent, subject to k(uv) = k(u) + k(v) mod e. Candidates are
    /// exhausted with k(1) = 0 fixed; exactly phi(n) survive.
    fn build_composite(n: u64) -> Result<Self> {
        let positions = units(n);
        let d = positions.len();
        let mut pos_of = vec![usize::MAX; n as usize];
        for (i, &u) in positions.iter().enumerate() {
            pos_of[u as usize] = i;
        }
        let mul_idx: Vec<Vec<usize>> = positions
            .iter()
            .map(|&u| {
                positions
                    .iter()
                    .map(|&v| pos_of[((u * v) % n) as usize])
                    .collect()
            })
            .collect();
        let exponent = positions
            .iter()
            .map(|&u| multiplicative_order(u, n))
            .fold(1u64, |acc, o| acc / gcd(acc, o) * o);
        let e = exponent as u32;

        let mut rows = Vec::with_capacity(d);
        let mut k = vec![0u32; d];
        loop {
            let ok = (0..d).all(|i| {
                (i..d).all(|j| (k[i] + k[j]) % e == k[mul_idx[i][j]])
            });
            if ok {
                rows.push(
                    k.iter()
                        .map(|&ki| unit_phase(ki as u64, exponent))
                        .collect(),
                );
            }
            // Odometer over slots 1..d; slot 0 stays at k(1) = 0.
            let mut slot = d - 1;
            loop {
                if slot == 0 {
                    debug_assert_eq!(rows.len() as u64, euler_phi(n));
                    return Ok(CharacterTable { positions, rows });
                }
                k[slot] += 1;
                if k[slot] < e {
                    break;
                }
                k[slot] = 0;
                slot -= 1;
            }
        }
    }
}

/// A K x d system of unimodular rows with uniform weight 1/K: the rows are
/// character values (or additive phases) at the coefficient positions.
pub(crate) struct LinearizedSystem {
    rows: Vec<Vec<Complex64>>,
}

/// Result of one alternating-maximization run.
pub(crate) struct AlternatingOutcome {
    pub value: f64,
    pub coeffs: Vec<Complex64>,
    pub assignment: CutoffAssignment,
    /// Per-iteration objective of the winning restart; nondecreasing.
    #[allow(dead_code)]
    pub trace: Vec<f64>,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

/// Complex unit vector with Gaussian direction, via Box-Muller.
pub fn random_unit_vector<R: Rng>(d: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..d)
        .map(|_| {
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let r = (-2.0 * u1.ln()).sqrt();
            let t = std::f64::consts::TAU * u2;
            Complex64::new(r * t.cos(), r * t.sin())
        })
        .collect();
    normalize(&mut v);
    v
}

impl LinearizedSystem {
    pub fn new(rows: Vec<Vec<Complex64>>) -> Self {
        debug_assert!(!rows.is_empty());
        LinearizedSystem { rows }
    }

    pub fn from_character_table(table: &CharacterTable) -> Self {
        LinearizedSystem::new(table.rows.clone())
    }

    /// Rows e(sigma(j) x / m) for x = 1..m over columns j = 1..d.
    pub fn from_additive(sigma: &Permutation, m: u64) -> Self {
        let d = sigma.len();
        let rows = (1..=m)
            .map(|x| {
                (1..=d)
                    .map(|j| unit_phase(sigma.apply(j) as u64 * x, m))
                    .collect()
            })
            .collect();
        LinearizedSystem::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    fn weight(&self) -> f64 {
        1.0 / self.n_rows() as f64
    }

    /// sqrt of the weighted mean over rows of max_l |prefix sum|^2.
    pub fn nonlinear_value(&self, a: &[Complex64]) -> f64 {
        let mut sum = 0.0;
        for row in &self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut best = 0.0f64;
            for (ai, ri) in a.iter().zip(row) {
                acc += ai * ri;
                best = best.max(acc.norm_sqr());
            }
            sum += best;
        }
        (sum * self.weight()).sqrt()
    }

    /// Per-row smallest prefix attaining the maximum modulus.
    pub fn argmax_assignment(&self, a: &[Complex64]) -> CutoffAssignment {
        let cuts = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut best = f64::NEG_INFINITY;
                let mut arg = 1u32;
                for (i, (ai, ri)) in a.iter().zip(row).enumerate() {
                    acc += ai * ri;
                    let m = acc.norm_sqr();
                    if m > best {
                        best = m;
                        arg = i as u32 + 1;
                    }
                }
                arg
            })
            .collect();
        CutoffAssignment(cuts)
    }

    /// y = T a for the selection operator T of the assignment (row k keeps
    /// the first cuts[k] columns), without the 1/sqrt(K) scaling.
    fn apply_selection(&self, cuts: &[u32], a: &[Complex64], y: &mut [Complex64]) {
        for (k, row) in self.rows.iter().enumerate() {
            let l = cuts[k] as usize;
            let mut acc = Complex64::new(0.0, 0.0);
            for (ai, ri) in a.iter().zip(row).take(l) {
                acc += ai * ri;
            }
            y[k] = acc;
        }
    }

    /// out = T^H y, without scaling.
    fn apply_adjoint(&self, cuts: &[u32], y: &[Complex64], out: &mut [Complex64]) {
        for z in out.iter_mut() {
            *z = Complex64::new(0.0, 0.0);
        }
        for (k, row) in self.rows.iter().enumerate() {
            let l = cuts[k] as usize;
            let yk = y[k];
            for (oi, ri) in out.iter_mut().zip(row).take(l) {
                *oi += ri.conj() * yk;
            }
        }
    }

    /// Largest singular value and top right singular vector of the weighted
    /// selection operator, by power iteration on the Gram operator. For a
    /// positive semidefinite operator the Rayleigh quotient is nondecreasing
    /// along the iteration, so a warm start never loses ground.
    pub fn top_singular_for_assignment(
        &self,
        cuts: &CutoffAssignment,
        start: &[Complex64],
    ) -> Result<(f64, Vec<Complex64>)> {
        let d = self.dim();
        let w = self.weight();
        let mut v = start.to_vec();
        if normalize(&mut v) == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut y = vec![Complex64::new(0.0, 0.0); self.n_rows()];
        let mut g = vec![Complex64::new(0.0, 0.0); d];
        let mut prev = -1.0f64;
        for _ in 0..POWER_CAP {
            self.apply_selection(&cuts.0, &v, &mut y);
            let lambda = w * y.iter().map(|z| z.norm_sqr()).sum::<f64>();
            if prev >= 0.0 && (lambda - prev).abs() <= POWER_TOL * lambda.max(f64::MIN_POSITIVE) {
                return Ok((lambda.sqrt(), v));
            }
            prev = lambda;
            self.apply_adjoint(&cuts.0, &y, &mut g);
            for z in g.iter_mut() {
                *z *= w;
            }
            if normalize(&mut g) == 0.0 {
                return Ok((0.0, v));
            }
            std::mem::swap(&mut v, &mut g);
        }
        Err(Error::NonConvergence(POWER_CAP))
    }

    /// Alternating maximization from random unit starts. Within a run the
    /// objective never decreases: the argmax assignment dominates the old
    /// one, and the power step is warm-started from the current vector.
    pub fn alternating_maximize(
        &self,
        restarts: usize,
        iters: usize,
        seed: u64,
    ) -> Result<AlternatingOutcome> {
        if restarts == 0 || iters == 0 {
            return Err(Error::InvalidArgument(
                "restarts and iters must be positive".into(),
            ));
        }
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: Option<AlternatingOutcome> = None;
        for _ in 0..restarts {
            let mut a = random_unit_vector(d, &mut rng);
            let mut trace = Vec::with_capacity(iters + 1);
            let mut prev = -1.0f64;
            for step in 0..iters {
                let cuts = self.argmax_assignment(&a);
                let (sigma, v) = self.top_singular_for_assignment(&cuts, &a)?;
                if sigma < prev - 1e-9 * (1.0 + prev.abs()) {
                    return Err(Error::MonotonicityViolated {
                        step,
                        prev,
                        next: sigma,
                    });
                }
                trace.push(sigma);
                a = v;
                let stalled = prev >= 0.0 && sigma - prev <= 1e-13 * (1.0 + sigma);
                prev = sigma;
                if stalled {
                    break;
                }
            }
            // The reported value is the true nonlinear ratio of the witness,
            // which dominates the last fixed-assignment value.
            let value = self.nonlinear_value(&a);
            if value < prev - 1e-9 * (1.0 + prev.abs()) {
                return Err(Error::MonotonicityViolated {
                    step: trace.len(),
                    prev,
                    next: value,
                });
            }
            trace.push(value);
            let replace = match &best {
                None => true,
                Some(b) => value > b.value,
            };
            if replace {
                let assignment = self.argmax_assignment(&a);
                best = Some(AlternatingOutcome {
                    value,
                    coeffs: a,
                    assignment,
                    trace,
                });
            }
        }
        Ok(best.expect("restarts >= 1"))
    }

    /// Exhausts every cutoff assignment in lexicographic order, computing
    /// the top singular value of each selection matrix. Ties keep the
    /// lexicographically smallest assignment.
    pub fn exact_by_enumeration(&self, seed: u64) -> Result<(f64, CutoffAssignment, Vec<Complex64>)> {
        let d = self.dim();
        let k = self.n_rows();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Two independent starts guard against a start vector accidentally
        // orthogonal to the top eigenspace of some assignment.
        let starts = [random_unit_vector(d, &mut rng), random_unit_vector(d, &mut rng)];
        let mut cuts = CutoffAssignment(vec![1u32; k]);
        let mut best: Option<(f64, CutoffAssignment, Vec<Complex64>)> = None;
        loop {
            let mut sigma = 0.0f64;
            let mut vec_best: Option<Vec<Complex64>> = None;
            for start in &starts {
                let (s, v) = self.top_singular_for_assignment(&cuts, start)?;
                if s > sigma || vec_best.is_none() {
                    sigma = s;
                    vec_best = Some(v);
                }
            }
            if best.as_ref().is_none_or(|(b, _, _)| sigma > *b) {
                best = Some((sigma, cuts.clone(), vec_best.expect("at least one start")));
            }
            // Odometer: last coordinate fastest gives ascending lex order.
            let mut slot = k;
            loop {
                if slot == 0 {
                    let (v, a, w) = best.expect("at least one assignment");
                    return Ok((v, a, w));
                }
                slot -= 1;
                cuts.0[slot] += 1;
                if cuts.0[slot] as usize <= d {
                    break;
                }
                cuts.0[slot] = 1;
            }
        }
    }
}

fn validate_support(n: u64, a: &CoefficientVector) -> Result<()> {
    if a.norm2() == 0.0 {
        return Err(Error::ZeroVector);
    }
    for &(idx, _) in a.entries() {
        if idx >= n || gcd(idx, n) != 1 {
            return Err(Error::InvalidArgument(format!(
                "coefficient index {idx} is not a unit mod {n}"
            )));
        }
    }
    Ok(())
}

/// LHS(a) / ||a||_2 for the maximal character inequality mod N: a certified
/// lower bound on Delta(N) for any nonzero vector supported on units.
pub fn delta_ratio(n: u64, a: &CoefficientVector) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "modulus must be at least 3, got {n}"
        )));
    }
    validate_support(n, a)?;
    let mean_sq = if is_prime(n) {
        // Streamed over character indices; only the support columns enter.
        let ctx = GroupContext::build(n)?;
        let nus: Vec<u64> = a.entries().iter().map(|&(g, _)| ctx.nu(g)).collect();
        let mut sum = 0.0;
        for ai in 0..n - 1 {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut best = 0.0f64;
            for (&(_, v), &nu) in a.entries().iter().zip(&nus) {
                acc += v * unit_phase(ai * nu, n - 1);
                best = best.max(acc.norm_sqr());
            }
            sum += best;
        }
        sum / (n - 1) as f64
    } else {
        let table = CharacterTable::build(n)?;
        let cols: Vec<usize> = a
            .entries()
            .iter()
            .map(|&(idx, _)| {
                table
                    .positions
                    .binary_search(&idx)
                    .expect("support validated")
            })
            .collect();
        let mut sum = 0.0;
        for row in &table.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut best = 0.0f64;
            for (&(_, v), &c) in a.entries().iter().zip(&cols) {
                acc += v * row[c];
                best = best.max(acc.norm_sqr());
            }
            sum += best;
        }
        sum / table.rows.len() as f64
    };
    Ok(mean_sq.sqrt() / a.norm2())
}

/// Exact Delta(N) by exhausting cutoff assignments; each assignment is a
/// largest-singular-value problem solved by power iteration.
pub fn delta_exact_small(n: u64, seed: u64) -> Result<DeltaEstimate> {
    let table = CharacterTable::build(n)?;
    let d = table.positions.len();
    let k = table.rows.len();
    let assignments = (d as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if assignments > ASSIGNMENT_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "exact oracle for N={n} needs {assignments} cutoff assignments"
        )));
    }
    let system = LinearizedSystem::from_character_table(&table);
    let (value, assignment, vec) = system.exact_by_enumeration(seed)?;
    let witness = CoefficientVector::new(
        table
            .positions
            .iter()
            .zip(&vec)
            .map(|(&pos, &v)| (pos, v))
            .collect(),
    )?;
    Ok(DeltaEstimate {
        n,
        value,
        kind: EstimateKind::Exact,
        method: format!("cutoff-enumeration+power-iteration(seed={seed})"),
        witness_coeffs: Some(witness),
        witness_assignment: Some(assignment),
    })
}

/// Alternating-maximization lower bound on Delta(N).
pub fn delta_heuristic(n: u64, restarts: usize, iters: usize, seed: u64) -> Result<DeltaEstimate> {
    let table = CharacterTable::build(n)?;
    let system = LinearizedSystem::from_character_table(&table);
    let outcome = system.alternating_maximize(restarts, iters, seed)?;
    let witness = CoefficientVector::new(
        table
            .positions
            .iter()
            .zip(&outcome.coeffs)
            .map(|(&pos, &v)| (pos, v))
            .collect(),
    )?;
    Ok(DeltaEstimate {
        n,
        value: outcome.value,
        kind: EstimateKind::LowerBound,
        method: format!("alternating-maximization(restarts={restarts},iters={iters},seed={seed})"),
        witness_coeffs: Some(witness),
        witness_assignment: Some(outcome.assignment),
    })
}

fn ceil_log2(k: u64) -> u32 {
    debug_assert!(k >= 1);
    64 - (k - 1).leading_zeros()
}

/// Dyadic-chaining ceiling ceil(log2 phi(N)) + 1, the explicit constant in
/// the Rademacher-Menshov bound Delta(N) << log N.
pub fn rm_upper_bound(n: u64) -> Result<DeltaEstimate> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "modulus must be at least 3, got {n}"
        )));
    }
    let phi = euler_phi(n);
    let value = (ceil_log2(phi) + 1) as f64;
    Ok(DeltaEstimate {
        n,
        value,
        kind: EstimateKind::UpperBound,
        method: "rademacher-menshov-dyadic-chaining".into(),
        witness_coeffs: None,
        witness_assignment: None,
    })
}
