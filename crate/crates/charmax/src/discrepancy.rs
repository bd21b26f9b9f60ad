//! Equidistribution machinery for subgroup power orbits: the point sets
//! ({g^1/p}, ..., {g^s/p}), grid-box coverage, the Erdos-Turan-Koksma
//! discrepancy bound, complete Weil exponential sums, the character-sum
//! identity linking subgroup sums to complete sums, and the exact search
//! for an element whose power fractional parts realize a prescribed order.
//!
//! Point coordinates are exact rationals; box membership and orderings are
//! decided in integer arithmetic, so none of the combinatorial outcomes
//! depend on the floating-point environment.

use num_complex::Complex64;
use serde::Serialize;

use crate::chargroup::unit_phase;
use crate::error::{Error, Result};
use crate::numtheory::{is_prime, mul_mod, pow_mod, SubgroupContext};
use crate::perm::Permutation;

const BOX_BUDGET: u64 = 1 << 22;
const LATTICE_BUDGET: u64 = 1 << 22;
const EMPIRICAL_BUDGET: u64 = 500_000_000;

/// An exact rational in [0, 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl Frac {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num >= den {
            return Err(Error::InvalidArgument(format!(
                "{num}/{den} is not a rational in [0,1)"
            )));
        }
        Ok(Frac { num, den })
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// floor(self * t), exact.
    fn floor_times(self, t: u64) -> u64 {
        ((self.num as u128 * t as u128) / self.den as u128) as u64
    }

    /// self >= a/b, exact.
    fn ge(self, a: u64, b: u64) -> bool {
        self.num as u128 * b as u128 >= a as u128 * self.den as u128
    }

    /// self < a/b, exact.
    fn lt(self, a: u64, b: u64) -> bool {
        (self.num as u128 * b as u128) < a as u128 * self.den as u128
    }
}

/// Points in [0,1)^s with exact rational coordinates.
#[derive(Clone, Debug)]
pub struct PointSet {
    s: usize,
    points: Vec<Vec<Frac>>,
    provenance: String,
}

impl PointSet {
    pub fn from_fractions(s: usize, points: Vec<Vec<Frac>>, provenance: &str) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        for pt in &points {
            if pt.len() != s {
                return Err(Error::InvalidArgument(format!(
                    "point has {} coordinates, expected {s}",
                    pt.len()
                )));
            }
        }
        Ok(PointSet {
            s,
            points,
            provenance: provenance.to_string(),
        })
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Frac>] {
        &self.points
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// CSV rows: exact rationals as num/den strings plus double values.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for k in 1..=self.s {
            if k > 1 {
                out.push(',');
            }
            out.push_str(&format!("x{k},x{k}_value"));
        }
        out.push('\n');
        for pt in &self.points {
            for (k, f) in pt.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{}/{},{:.17e}", f.num, f.den, f.value()));
            }
            out.push('\n');
        }
        out
    }
}

/// The orbit point set y_i = ({g_i^1/p}, ..., {g_i^s/p}) over the subgroup
/// elements in natural order, with exact coordinates (g_i^k mod p)/p.
pub fn subgroup_point_set(sub: &SubgroupContext, s: usize) -> Result<PointSet> {
    if s == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let p = sub.p();
    let points = sub
        .elements()
        .iter()
        .map(|&g| {
            let mut power = 1u64;
            (0..s)
                .map(|_| {
                    power = mul_mod(power, g, p);
                    Frac { num: power, den: p }
                })
                .collect()
        })
        .collect();
    PointSet::from_fractions(
        s,
        points,
        &format!("subgroup orbit p={p}, q={}", sub.q()),
    )
}

/// Outcome of dividing [0,1]^s into (3s)^s equal boxes and checking that
/// every box holds a point.
#[derive(Clone, Debug, Serialize)]
pub struct BoxCoverage {
    pub covered: bool,
    /// Multi-indices (one entry per axis, each in [0, 3s)) of empty boxes.
    pub missing: Vec<Vec<usize>>,
}

/// Maps each point to its box via exact floor(coordinate * 3s) and reports
/// the boxes left empty. Boxes are half-open.
pub fn grid_box_coverage(ps: &PointSet) -> Result<BoxCoverage> {
    let s = ps.dim();
    let t = 3 * s as u64;
    let total = t.checked_pow(s as u32).filter(|&n| n <= BOX_BUDGET).ok_or_else(|| {
        Error::BudgetExceeded(format!("(3s)^s = {t}^{s} boxes exceed the enumeration budget"))
    })?;
    let mut occupied = vec![false; total as usize];
    for pt in ps.points() {
        let mut flat = 0u64;
        for f in pt {
            flat = flat * t + f.floor_times(t);
        }
        occupied[flat as usize] = true;
    }
    let mut missing = Vec::new();
    for (flat, &occ) in occupied.iter().enumerate() {
        if !occ {
            let mut idx = vec![0usize; s];
            let mut rest = flat as u64;
            for k in (0..s).rev() {
                idx[k] = (rest % t) as usize;
                rest /= t;
            }
            missing.push(idx);
        }
    }
    Ok(BoxCoverage {
        covered: missing.is_empty(),
        missing,
    })
}

/// True iff some point lies in the box whose k-th side is the middle third
/// of group sigma(k): coordinate k in [(3 sigma(k) - 2)/(3s), (3 sigma(k) - 1)/(3s)).
pub fn ordered_middle_box_check(ps: &PointSet, sigma: &Permutation) -> Result<bool> {
    let s = ps.dim();
    if sigma.len() != s {
        return Err(Error::InvalidArgument(format!(
            "permutation length {} does not match dimension {s}",
            sigma.len()
        )));
    }
    let t = 3 * s as u64;
    Ok(ps.points().iter().any(|pt| {
        pt.iter().enumerate().all(|(k, f)| {
            let j = sigma.apply(k + 1) as u64;
            f.ge(3 * j - 2, t) && f.lt(3 * j - 1, t)
        })
    }))
}

/// An integer frequency vector with its Erdos-Turan-Koksma weight
/// r(h) = prod max(1, |h_i|).
#[derive(Clone, Debug, Serialize)]
pub struct LatticeVector {
    pub h: Vec<i64>,
    pub weight: f64,
}

impl LatticeVector {
    pub fn new(h: Vec<i64>) -> Self {
        let weight = h.iter().map(|&hi| (hi.unsigned_abs().max(1)) as f64).product();
        LatticeVector { h, weight }
    }
}

/// e(<h, x>) averaged over the point set, with the dot product reduced
/// mod 1 exactly when the coordinates share a denominator.
fn average_exp_sum(ps: &PointSet, h: &[i64]) -> Complex64 {
    let n = ps.len() as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for pt in ps.points() {
        let den = pt[0].den;
        if pt.iter().all(|f| f.den == den) {
            let mut acc: i128 = 0;
            for (f, &hi) in pt.iter().zip(h) {
                acc += hi as i128 * f.num as i128;
            }
            let r = acc.rem_euclid(den as i128) as u64;
            total += unit_phase(r, den);
        } else {
            let t: f64 = pt.iter().zip(h).map(|(f, &hi)| hi as f64 * f.value()).sum();
            total += crate::chargroup::unit_phase_real(t);
        }
    }
    total / n
}

/// The Erdos-Turan-Koksma right-hand side
/// 2 s^2 3^{s+1} (1/m + sum_{0 < ||h||_inf <= m} |avg exp sum| / r(h)).
pub fn etk_bound(ps: &PointSet, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if ps.is_empty() {
        return Err(Error::InvalidArgument("point set is empty".into()));
    }
    let s = ps.dim();
    let count = (2 * m + 1).checked_pow(s as u32).filter(|&c| c <= LATTICE_BUDGET);
    if count.is_none() {
        return Err(Error::BudgetExceeded(format!(
            "(2m+1)^s = {}^{s} lattice vectors exceed the budget",
            2 * m + 1
        )));
    }
    let mut sum = 0.0;
    let mut h = vec![-(m as i64); s];
    loop {
        if h.iter().any(|&hi| hi != 0) {
            let lv = LatticeVector::new(h.clone());
            sum += average_exp_sum(ps, &h).norm() / lv.weight;
        }
        let mut k = s;
        loop {
            if k == 0 {
                let factor = 2.0 * (s * s) as f64 * 3f64.powi(s as i32 + 1);
                return Ok(factor * (1.0 / m as f64 + sum));
            }
            k -= 1;
            h[k] += 1;
            if h[k] <= m as i64 {
                break;
            }
            h[k] = -(m as i64);
        }
    }
}

/// Grid lower bound on the star discrepancy: max over axis-aligned boxes
/// with corners on the uniform grid of |empirical fraction - volume|.
pub fn empirical_grid_discrepancy(ps: &PointSet, resolution: u64) -> Result<f64> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    if ps.is_empty() {
        return Err(Error::InvalidArgument("point set is empty".into()));
    }
    let s = ps.dim();
    let pairs_per_axis = resolution * (resolution + 1) / 2;
    let boxes = pairs_per_axis
        .checked_pow(s as u32)
        .filter(|&b| b.saturating_mul(ps.len() as u64) <= EMPIRICAL_BUDGET);
    if boxes.is_none() {
        return Err(Error::BudgetExceeded(format!(
            "{pairs_per_axis}^{s} grid boxes exceed the budget"
        )));
    }
    // Odometer over (a_k, b_k) corner pairs per axis, 0 <= a < b <= resolution.
    let mut lo = vec![0u64; s];
    let mut hi = vec![1u64; s];
    let n = ps.len() as f64;
    let mut worst = 0.0f64;
    loop {
        let mut volume = 1.0;
        for k in 0..s {
            volume *= (hi[k] - lo[k]) as f64 / resolution as f64;
        }
        let inside = ps
            .points()
            .iter()
            .filter(|pt| {
                pt.iter()
                    .enumerate()
                    .all(|(k, f)| f.ge(lo[k], resolution) && f.lt(hi[k], resolution))
            })
            .count() as f64;
        worst = worst.max((inside / n - volume).abs());
        // Advance the (lo, hi) odometer.
        let mut k = s;
        loop {
            if k == 0 {
                return Ok(worst);
            }
            k -= 1;
            if hi[k] < resolution {
                hi[k] += 1;
                break;
            }
            if lo[k] + 1 < resolution {
                lo[k] += 1;
                hi[k] = lo[k] + 1;
                break;
            }
            lo[k] = 0;
            hi[k] = 1;
        }
    }
}

/// Complete exponential sum sum_{x=0}^{p-1} e(g(x)/p) for an integer
/// polynomial g given by coefficients (g_0, ..., g_n). Requires 0 < n < p
/// and p not dividing the leading coefficient; g(x) is reduced mod p in
/// integer arithmetic before the phase is taken.
pub fn weil_sum(p: u64, coeffs: &[i64]) -> Result<Complex64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if coeffs.len() < 2 {
        return Err(Error::InvalidArgument(
            "polynomial degree must be positive".into(),
        ));
    }
    let n = coeffs.len() - 1;
    if n as u64 >= p {
        return Err(Error::InvalidArgument(format!(
            "degree {n} must be less than p={p}"
        )));
    }
    let reduced: Vec<u64> = coeffs
        .iter()
        .map(|&c| c.rem_euclid(p as i64) as u64)
        .collect();
    if reduced[n] == 0 {
        return Err(Error::InvalidArgument(
            "leading coefficient is divisible by p".into(),
        ));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for x in 0..p {
        let mut val = 0u64;
        for &c in reduced.iter().rev() {
            val = (mul_mod(val, x, p) + c) % p;
        }
        total += unit_phase(val, p);
    }
    Ok(total)
}

/// Both sides of the pushforward identity for the subgroup character sum:
/// lhs = (1/q) sum_{g in A} e((h_1 g + ... + h_s g^s)/p),
/// rhs = (1/(p-1)) (-1 + sum_{x=0}^{p-1} e(f_h(x)/p)) with
/// f_h(x) = h_1 x^{(p-1)/q} + ... + h_s x^{s(p-1)/q}.
/// The map x -> x^{(p-1)/q} covers A with (p-1)/q preimages each, which is
/// exactly what the identity expresses; the two sides are computed by
/// independent summations.
pub fn fh_identity_check(sub: &SubgroupContext, h: &[i64]) -> (Complex64, Complex64) {
    let p = sub.p();
    let q = sub.q();
    let hm: Vec<u64> = h.iter().map(|&hi| hi.rem_euclid(p as i64) as u64).collect();

    let mut lhs = Complex64::new(0.0, 0.0);
    for &g in sub.elements() {
        let mut power = 1u64;
        let mut val = 0u64;
        for &hi in &hm {
            power = mul_mod(power, g, p);
            val = (val + mul_mod(hi, power, p)) % p;
        }
        lhs += unit_phase(val, p);
    }
    lhs /= q as f64;

    let step = (p - 1) / q;
    let mut rhs = Complex64::new(-1.0, 0.0);
    for x in 0..p {
        let y = pow_mod(x, step, p);
        let mut power = 1u64;
        let mut val = 0u64;
        for &hi in &hm {
            power = mul_mod(power, y, p);
            val = (val + mul_mod(hi, power, p)) % p;
        }
        rhs += unit_phase(val, p);
    }
    rhs /= (p - 1) as f64;

    (lhs, rhs)
}

/// First element g of A (in natural order, identity excluded) whose power
/// fractional parts satisfy {g^{sigma(1)}/p} < ... < {g^{sigma(s)}/p},
/// decided by exact residue comparison. None is a legal outcome.
pub fn find_ordered_element(
    sub: &SubgroupContext,
    s: usize,
    sigma: &Permutation,
) -> Option<u64> {
    if sigma.len() != s || s == 0 {
        return None;
    }
    let p = sub.p();
    'next: for &g in sub.elements() {
        if g == 1 {
            // All powers of the identity coincide, and downstream use needs
            // nu_A(g) != 0 mod q.
            continue;
        }
        let mut powers = Vec::with_capacity(s);
        let mut power = 1u64;
        for _ in 0..s {
            power = mul_mod(power, g, p);
            powers.push(power);
        }
        for w in (1..=s).collect::<Vec<_>>().windows(2) {
            let a = powers[sigma.apply(w[0]) - 1];
            let b = powers[sigma.apply(w[1]) - 1];
            if a >= b {
                continue 'next;
            }
        }
        return Some(g);
    }
    None
}

/// floor(delta * log^{1/2}(p)), the largest permitted orbit dimension for
/// the configured delta.
pub fn proposition8_scale(p: u64, delta: f64) -> usize {
    debug_assert!(p >= 3 && delta > 0.0);
    (delta * (p as f64).ln().sqrt()).floor() as usize
}

/// Frequency-cutoff preset m = floor(s^{delta1 s}), at least 1.
pub fn etk_m_schedule(s: usize, delta1: f64) -> u64 {
    let m = (delta1 * s as f64 * (s as f64).ln()).exp();
    if m.is_finite() {
        (m.floor() as u64).max(1)
    } else {
        u64::MAX
    }
}
