//! Character evaluation and maximal partial-sum machinery on the additive
//! group Z_M and the multiplicative group Z_p^*, plus the exact transport
//! identity between them for coefficients supported on a subgroup.
//!
//! All maxima are taken over nonempty prefixes of the supplied coefficient
//! list. Phases e(t) are always computed from t reduced mod 1 in integer
//! arithmetic before any trigonometry.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numtheory::{GroupContext, SubgroupContext};
use crate::perm::Permutation;

/// e(num/den) with the fraction reduced mod 1 first.
pub(crate) fn unit_phase(num: u64, den: u64) -> Complex64 {
    debug_assert!(den > 0);
    let r = num % den;
    Complex64::from_polar(1.0, TAU * (r as f64) / (den as f64))
}

/// e(t) for real t, reduced mod 1.
pub(crate) fn unit_phase_real(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t.rem_euclid(1.0))
}

/// Complex coefficients indexed by strictly increasing positive positions,
/// with the L2 norm cached at construction.
#[derive(Clone, Debug)]
pub struct CoefficientVector {
    entries: Vec<(u64, Complex64)>,
    norm2: f64,
}

impl CoefficientVector {
    pub fn new(entries: Vec<(u64, Complex64)>) -> Result<Self> {
        let mut prev = 0u64;
        for &(n, _) in &entries {
            if n == 0 || n <= prev {
                return Err(Error::InvalidArgument(
                    "coefficient indices must be strictly increasing and positive".into(),
                ));
            }
            prev = n;
        }
        let norm2 = entries.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>().sqrt();
        Ok(CoefficientVector { entries, norm2 })
    }

    /// Dense vector with indices 1..=len.
    pub fn from_dense(values: &[Complex64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as u64 + 1, v))
            .collect();
        CoefficientVector::new(entries).expect("dense indices are strictly increasing")
    }

    /// Unit mass at a single index.
    pub fn unit(index: u64) -> Self {
        CoefficientVector::new(vec![(index, Complex64::new(1.0, 0.0))])
            .expect("single index is valid")
    }

    pub fn entries(&self) -> &[(u64, Complex64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm2(&self) -> f64 {
        self.norm2
    }

    pub fn max_index(&self) -> u64 {
        self.entries.last().map(|&(n, _)| n).unwrap_or(0)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let entries = self.entries.iter().map(|&(n, v)| (n, c * v)).collect();
        CoefficientVector::new(entries).expect("indices unchanged")
    }

    pub fn normalized(&self) -> Result<Self> {
        if self.norm2 == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scaled(Complex64::new(1.0 / self.norm2, 0.0)))
    }

    /// Replaces the cached norm, for maps known to preserve it exactly.
    pub(crate) fn with_norm(entries: Vec<(u64, Complex64)>, norm2: f64) -> Result<Self> {
        let mut v = CoefficientVector::new(entries)?;
        v.norm2 = norm2;
        Ok(v)
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffEntryRepr {
    n: u64,
    re: f64,
    im: f64,
}

impl Serialize for CoefficientVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr: Vec<CoeffEntryRepr> = self
            .entries
            .iter()
            .map(|&(n, v)| CoeffEntryRepr { n, re: v.re, im: v.im })
            .collect();
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoefficientVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = Vec::<CoeffEntryRepr>::deserialize(deserializer)?;
        let entries = repr
            .into_iter()
            .map(|e| (e.n, Complex64::new(e.re, e.im)))
            .collect();
        CoefficientVector::new(entries).map_err(D::Error::custom)
    }
}

/// Maximum over prefixes of a single evaluation point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PointMaximum {
    /// Evaluation point: x in [1, M] or a character index in [0, p-2].
    pub x: u64,
    /// max over cutoffs of the partial-sum modulus.
    pub max: f64,
    /// Smallest one-based prefix length attaining the maximum.
    pub argmax: u32,
}

/// Per-point maxima together with their quadratic mean and the ratio
/// against the coefficient norm.
#[derive(Clone, Debug, Serialize)]
pub struct MaximalReport {
    pub points: Vec<PointMaximum>,
    pub l2_average: f64,
    pub ratio: f64,
}

impl MaximalReport {
    fn from_maxima(points: Vec<PointMaximum>, norm: f64) -> Self {
        let mean_sq =
            points.iter().map(|p| p.max * p.max).sum::<f64>() / points.len().max(1) as f64;
        let l2_average = mean_sq.sqrt();
        let ratio = if norm > 0.0 { l2_average / norm } else { 0.0 };
        MaximalReport {
            points,
            l2_average,
            ratio,
        }
    }
}

/// Running-prefix maximum of |sum of terms|, with the smallest attaining
/// prefix. Returns (max, argmax).
fn prefix_max<I: IntoIterator<Item = Complex64>>(terms: I) -> (f64, u32) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0u32;
    for (i, t) in terms.into_iter().enumerate() {
        acc += t;
        let m = acc.norm_sqr();
        if m > best {
            best = m;
            arg = i as u32 + 1;
        }
    }
    (best.max(0.0).sqrt(), arg)
}

/// chi_a(n) = e(a nu(n) / (p-1)) for the character indexed by a in [0, p-2].
pub fn eval_character(ctx: &GroupContext, a: u64, n: u64) -> Result<Complex64> {
    let p = ctx.p();
    if a > p.saturating_sub(2) {
        return Err(Error::InvalidArgument(format!(
            "character index {a} out of range [0, {}]",
            p - 2
        )));
    }
    if n.is_multiple_of(p) {
        return Err(Error::InvalidArgument(format!(
            "character argument {n} is divisible by p={p}"
        )));
    }
    Ok(unit_phase(a * ctx.nu(n), p - 1))
}

/// Maximal partial sums of b against the additive system e(sigma(n) x / M),
/// swept over x in [1, M].
pub fn additive_max_partial(
    b: &CoefficientVector,
    sigma: &Permutation,
    m: u64,
) -> Result<MaximalReport> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be positive".into()));
    }
    if sigma.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "permutation length {} does not match coefficient count {}",
            sigma.len(),
            b.len()
        )));
    }
    let freqs: Vec<u64> = (1..=b.len()).map(|j| sigma.apply(j) as u64).collect();
    let points = (1..=m)
        .map(|x| {
            let (max, argmax) = prefix_max(
                b.entries()
                    .iter()
                    .zip(&freqs)
                    .map(|(&(_, v), &f)| v * unit_phase(f * x, m)),
            );
            PointMaximum { x, max, argmax }
        })
        .collect();
    Ok(MaximalReport::from_maxima(points, b.norm2()))
}

/// The maximal function of the additive system at a continuous point t,
/// i.e. max over prefixes of |sum b_n e(sigma(n) t)|.
pub fn additive_max_at(b: &CoefficientVector, sigma: &Permutation, t: f64) -> f64 {
    let (max, _) = prefix_max(
        b.entries()
            .iter()
            .enumerate()
            .map(|(j, &(_, v))| v * unit_phase_real(sigma.apply(j + 1) as f64 * t)),
    );
    max
}

/// Maximal partial sums of a against every Dirichlet character mod p, in
/// the natural ordering of the coefficient indices. Evaluation points are
/// the character indices a in [0, p-2]; the mean uses 1/phi(p) = 1/(p-1).
pub fn multiplicative_max_partial(
    ctx: &GroupContext,
    a: &CoefficientVector,
) -> Result<MaximalReport> {
    let p = ctx.p();
    if a.max_index() >= p {
        return Err(Error::InvalidArgument(format!(
            "coefficient index {} outside [1, p-1] for p={p}",
            a.max_index()
        )));
    }
    let nus: Vec<u64> = a.entries().iter().map(|&(n, _)| ctx.nu(n)).collect();
    let points = (0..p - 1)
        .map(|ai| {
            let (max, argmax) = prefix_max(
                a.entries()
                    .iter()
                    .zip(&nus)
                    .map(|(&(_, v), &nu)| v * unit_phase(ai * nu, p - 1)),
            );
            PointMaximum { x: ai, max, argmax }
        })
        .collect();
    Ok(MaximalReport::from_maxima(points, a.norm2()))
}

fn check_subgroup_support(sub: &SubgroupContext, a: &CoefficientVector) -> Result<()> {
    if a.max_index() > sub.q() {
        return Err(Error::InvalidArgument(format!(
            "coefficient position {} outside [1, q] for q={}",
            a.max_index(),
            sub.q()
        )));
    }
    Ok(())
}

/// Multiplicative side of the transport identity: the mean over all
/// characters mod p of max_l |sum_{n<=l} a_n chi(g_n)|^2, with a indexed by
/// positions in the natural enumeration of the subgroup.
pub(crate) fn transport_multiplicative(sub: &SubgroupContext, a: &CoefficientVector) -> f64 {
    let ctx = sub.parent();
    let p = ctx.p();
    let nus: Vec<u64> = a
        .entries()
        .iter()
        .map(|&(n, _)| ctx.nu(sub.element(n as usize)))
        .collect();
    let mut sum = 0.0;
    for ai in 0..p - 1 {
        let (max, _) = prefix_max(
            a.entries()
                .iter()
                .zip(&nus)
                .map(|(&(_, v), &nu)| v * unit_phase(ai * nu, p - 1)),
        );
        sum += max * max;
    }
    sum / (p - 1) as f64
}

/// Additive side of the transport identity: the mean over x in [1, q] of
/// max_l |sum_{n<=l} a_n e(nu_A(g_n) x / q)|^2.
pub(crate) fn transport_additive(sub: &SubgroupContext, a: &CoefficientVector) -> f64 {
    let q = sub.q();
    let nu_as: Vec<u64> = a
        .entries()
        .iter()
        .map(|&(n, _)| sub.nu_a(sub.element(n as usize)))
        .collect();
    let mut sum = 0.0;
    for x in 1..=q {
        let (max, _) = prefix_max(
            a.entries()
                .iter()
                .zip(&nu_as)
                .map(|(&(_, v), &nu)| v * unit_phase(nu * x, q)),
        );
        sum += max * max;
    }
    sum / q as f64
}

/// Both sides of the transport identity, computed by independent sweeps.
/// Restricting a character mod p to the subgroup A yields a character of A,
/// and each character of A arises from exactly (p-1)/q characters mod p, so
/// the two means agree.
pub fn transport_subgroup_to_additive(
    sub: &SubgroupContext,
    a: &CoefficientVector,
) -> Result<(f64, f64)> {
    check_subgroup_support(sub, a)?;
    Ok((
        transport_multiplicative(sub, a),
        transport_additive(sub, a),
    ))
}
