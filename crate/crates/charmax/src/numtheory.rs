//! Integer and modular-arithmetic substrate: primality, factorization,
//! primitive roots, discrete-log tables, subgroup construction, and the
//! scan for primes p whose p-1 has an unusually large prime factor.
//!
//! Discrete logarithms use full tables (group orders here are desk scale),
//! so `GroupContext` construction is O(p) time and memory and everything
//! after that is table lookups.

use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest modulus for which a full discrete-log table is built.
pub const GROUP_TABLE_LIMIT: u64 = 10_000_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all u64 inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        r += 1;
    }
    // This base set is deterministic for all 64-bit integers.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factors of n with multiplicity, sorted ascending. n = 1 gives [].
pub fn factorize(n: u64) -> Vec<u64> {
    let mut n = n;
    let mut out = Vec::new();
    while n.is_multiple_of(2) && n > 1 {
        out.push(2);
        n /= 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        while n.is_multiple_of(d) {
            out.push(d);
            n /= d;
        }
        d += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn largest_prime_factor(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "largest_prime_factor requires n >= 2, got {n}"
        )));
    }
    Ok(*factorize(n).last().expect("n >= 2 has a prime factor"))
}

pub fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    let mut fs = factorize(n);
    fs.dedup();
    for p in fs {
        phi = phi / p * (p - 1);
    }
    phi
}

/// Residues in [1, n) coprime to n, ascending.
pub fn units(n: u64) -> Vec<u64> {
    (1..n).filter(|&a| gcd(a, n) == 1).collect()
}

/// Smallest d > 0 with a^d = 1 mod n. Requires gcd(a, n) = 1.
pub fn multiplicative_order(a: u64, n: u64) -> u64 {
    debug_assert_eq!(gcd(a % n, n), 1);
    let mut order = euler_phi(n);
    let mut fs = factorize(order);
    fs.dedup();
    for p in fs {
        while order.is_multiple_of(p) && pow_mod(a, order / p, n) == 1 {
            order /= p;
        }
    }
    order
}

/// Primes up to `limit` inclusive, by sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// A prime p paired with a large prime divisor q of p-1.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrimePair {
    pub p: u64,
    pub q: u64,
    /// log q / log p, the exponent actually achieved.
    #[serde(rename = "exponent_achieved")]
    pub ratio_exponent: f64,
}

/// Writes x as num/10^places when it is such a decimal exactly (within
/// binary-representation slack). Used to make boundary comparisons exact.
fn decimal_rational(x: f64, max_places: u32) -> Option<(u64, u64)> {
    if !(x.is_finite() && x >= 0.0) {
        return None;
    }
    let mut den = 1u64;
    for _ in 0..=max_places {
        let y = x * den as f64;
        let r = y.round();
        if (y - r).abs() < 1e-6 && r >= 0.0 {
            return Some((r as u64, den));
        }
        den *= 10;
    }
    None
}

/// Exact test of q >= B * p^exponent for B = b_num/b_den and
/// exponent = e_num/e_den, via integer power comparison:
/// q^e_den * b_den^e_den >= b_num^e_den * p^e_num.
pub fn fouvry_condition_exact(
    p: u64,
    q: u64,
    b_num: u64,
    b_den: u64,
    e_num: u32,
    e_den: u32,
) -> bool {
    let lhs = BigUint::from(q).pow(e_den) * BigUint::from(b_den).pow(e_den);
    let rhs = BigUint::from(b_num).pow(e_den) * BigUint::from(p).pow(e_num);
    lhs >= rhs
}

fn fouvry_condition(p: u64, q: u64, b: f64, exponent: f64) -> bool {
    // Fast float path with a safety margin; exact integer comparison only
    // in the tie zone, where float rounding could flip the answer.
    let diff = (q as f64).ln() - (b.ln() + exponent * (p as f64).ln());
    if diff > 1e-9 {
        return true;
    }
    if diff < -1e-9 {
        return false;
    }
    match (decimal_rational(b, 4), decimal_rational(exponent, 4)) {
        (Some((bn, bd)), Some((en, ed))) => {
            let g1 = gcd(bn, bd).max(1);
            let g2 = gcd(en, ed).max(1);
            fouvry_condition_exact(p, q, bn / g1, bd / g1, (en / g2) as u32, (ed / g2) as u32)
        }
        _ => diff >= 0.0,
    }
}

/// Every prime p <= limit whose largest prime factor q of p-1 satisfies
/// q >= B * p^exponent, paired with that q. Sorted by p.
pub fn scan_fouvry_primes(limit: u64, b: f64, exponent: f64) -> Result<Vec<PrimePair>> {
    if b.is_nan() || b <= 0.0 {
        return Err(Error::InvalidArgument(format!("B must be positive, got {b}")));
    }
    if !(exponent > 0.0 && exponent < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "exponent must lie in (0,1), got {exponent}"
        )));
    }
    let mut out = Vec::new();
    for p in primes_up_to(limit) {
        if p < 3 {
            continue;
        }
        let q = largest_prime_factor(p - 1)?;
        if fouvry_condition(p, q, b, exponent) {
            out.push(PrimePair {
                p,
                q,
                ratio_exponent: (q as f64).ln() / (p as f64).ln(),
            });
        }
    }
    Ok(out)
}

/// Smallest primitive root of Z_p^*. Returns 1 for p = 2.
pub fn primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let mut rs = factorize(p - 1);
    rs.dedup();
    for alpha in 2..p {
        if rs.iter().all(|&r| pow_mod(alpha, (p - 1) / r, p) != 1) {
            return Ok(alpha);
        }
    }
    unreachable!("every prime has a primitive root");
}

/// Z_p^* with a fixed primitive root alpha and the full index table
/// nu: alpha^{nu(g)} = g, nu(g) in [1, p-1] (so nu(1) = p-1).
///
/// Cloning is cheap: the table is shared.
#[derive(Clone, Debug)]
pub struct GroupContext {
    p: u64,
    alpha: u64,
    nu: Arc<Vec<u32>>,
}

impl GroupContext {
    pub fn build(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > GROUP_TABLE_LIMIT {
            return Err(Error::BudgetExceeded(format!(
                "discrete-log table for p={p} exceeds the limit {GROUP_TABLE_LIMIT}"
            )));
        }
        let alpha = primitive_root(p)?;
        let mut nu = vec![0u32; p as usize];
        let mut x = 1u64;
        for i in 1..p {
            x = mul_mod(x, alpha, p);
            nu[x as usize] = i as u32;
        }
        Ok(GroupContext {
            p,
            alpha,
            nu: Arc::new(nu),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    /// Group order p - 1.
    pub fn order(&self) -> u64 {
        self.p - 1
    }

    /// nu(g) in [1, p-1]. Panics if g = 0 mod p.
    pub fn nu(&self, g: u64) -> u64 {
        let g = g % self.p;
        assert!(g != 0, "nu is undefined at 0 mod p");
        self.nu[g as usize] as u64
    }
}

/// The order-q subgroup A of Z_p^*, with its elements in natural (integer)
/// order, a generator alpha_A, and the internal index nu_A: alpha_A^{nu_A(g)}
/// = g with nu_A(g) in [1, q].
#[derive(Clone, Debug)]
pub struct SubgroupContext {
    parent: GroupContext,
    q: u64,
    elements: Vec<u64>,
    alpha_a: u64,
    nu_a: Arc<Vec<u32>>,
}

impl SubgroupContext {
    pub fn build(parent: &GroupContext, q: u64) -> Result<Self> {
        let p = parent.p();
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if !(p - 1).is_multiple_of(q) {
            return Err(Error::InvalidArgument(format!(
                "q={q} does not divide p-1={}",
                p - 1
            )));
        }
        // The image of x -> x^{(p-1)/q} is the cyclic group generated by
        // alpha^{(p-1)/q}; walking its powers enumerates the image directly.
        let gen = pow_mod(parent.alpha(), (p - 1) / q, p);
        let mut elements = Vec::with_capacity(q as usize);
        let mut x = 1u64;
        for _ in 0..q {
            x = mul_mod(x, gen, p);
            elements.push(x);
        }
        debug_assert_eq!(x, 1, "generator must have order q");
        elements.sort_unstable();
        elements.dedup();
        if elements.len() != q as usize {
            return Err(Error::InvalidArgument(format!(
                "subgroup image has {} elements, expected {q}",
                elements.len()
            )));
        }
        // Any non-identity element generates a group of prime order; take
        // the smallest for determinism.
        let alpha_a = if q == 1 { 1 } else { elements[1] };
        let mut nu_a = vec![0u32; p as usize];
        let mut y = 1u64;
        for i in 1..=q {
            y = mul_mod(y, alpha_a, p);
            nu_a[y as usize] = i as u32;
        }
        Ok(SubgroupContext {
            parent: parent.clone(),
            q,
            elements,
            alpha_a,
            nu_a: Arc::new(nu_a),
        })
    }

    pub fn parent(&self) -> &GroupContext {
        &self.parent
    }

    pub fn p(&self) -> u64 {
        self.parent.p()
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Elements of A sorted increasing as integers in [1, p-1].
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// The n-th element of A in natural order, one-based.
    pub fn element(&self, n: usize) -> u64 {
        self.elements[n - 1]
    }

    pub fn alpha_a(&self) -> u64 {
        self.alpha_a
    }

    /// nu_A(g) in [1, q]. Panics if g is not in A.
    pub fn nu_a(&self, g: u64) -> u64 {
        let g = g % self.p();
        let v = self.nu_a[g as usize];
        assert!(v != 0, "{g} is not in the subgroup");
        v as u64
    }

    pub fn contains(&self, g: u64) -> bool {
        let g = g % self.p();
        g != 0 && self.nu_a[g as usize] != 0
    }

    /// One-based position of g in the natural ordering of A.
    pub fn position_of(&self, g: u64) -> Option<usize> {
        self.elements.binary_search(&(g % self.p())).ok().map(|i| i + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent trial-division oracle for the factorization tests.
    fn trial_division(mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut d = 2u64;
        while n > 1 {
            while n.is_multiple_of(d) {
                out.push(d);
                n /= d;
            }
            d += 1;
        }
        out
    }

    #[test]
    fn factorize_hand_cases() {
        assert_eq!(factorize(12), vec![2, 2, 3]);
        assert_eq!(factorize(1), Vec::<u64>::new());
        // 2^10 * 3^3 = 27648, cross-checked against the oracle.
        let f = factorize(27648);
        assert_eq!(f, trial_division(27648));
        assert_eq!(f.iter().filter(|&&p| p == 2).count(), 10);
        assert_eq!(f.iter().filter(|&&p| p == 3).count(), 3);
    }

    #[test]
    fn factorize_reassembles_exhaustively() {
        for n in 1..=100_000u64 {
            let prod: u64 = factorize(n).iter().product::<u64>().max(1);
            assert_eq!(prod, n, "factorize({n}) does not reassemble");
        }
    }

    #[test]
    fn factorize_factors_are_prime() {
        for n in 2..=20_000u64 {
            for f in factorize(n) {
                assert!(is_prime(f), "factor {f} of {n} is not prime");
            }
        }
    }

    #[test]
    fn largest_prime_factor_cases() {
        assert_eq!(largest_prime_factor(12).unwrap(), 3);
        assert_eq!(largest_prime_factor(22).unwrap(), 11);
        // 2^4 * 97 via the factorize oracle.
        assert_eq!(largest_prime_factor(1552).unwrap(), 97);
        assert!(largest_prime_factor(1).is_err());
    }

    #[test]
    fn is_prime_matches_sieve() {
        let primes = primes_up_to(10_000);
        let mut idx = 0;
        for n in 0..=10_000u64 {
            let expected = idx < primes.len() && primes[idx] == n;
            assert_eq!(is_prime(n), expected, "is_prime({n})");
            if expected {
                idx += 1;
            }
        }
    }

    #[test]
    fn fouvry_scan_examples() {
        let pairs = scan_fouvry_primes(25, 1.0, 0.6687).unwrap();
        let ps: Vec<u64> = pairs.iter().map(|pp| pp.p).collect();
        // P(22) = 11 >= 23^0.6687 ~ 8.13.
        assert!(ps.contains(&23));
        // P(12) = 3 < 13^0.6687 ~ 5.55.
        assert!(!ps.contains(&13));
        // P(2) = 2 < 3^0.6687 ~ 2.08.
        let small = scan_fouvry_primes(3, 1.0, 0.6687).unwrap();
        assert!(small.is_empty());
    }

    #[test]
    fn fouvry_scan_exact_recheck_small() {
        // Every returned pair must satisfy q^10000 >= p^6687 exactly; every
        // rejected prime must fail it.
        let pairs = scan_fouvry_primes(2000, 1.0, 0.6687).unwrap();
        assert!(!pairs.is_empty());
        let included: std::collections::HashSet<u64> = pairs.iter().map(|pp| pp.p).collect();
        for p in primes_up_to(2000) {
            if p < 3 {
                continue;
            }
            let q = largest_prime_factor(p - 1).unwrap();
            let exact = fouvry_condition_exact(p, q, 1, 1, 6687, 10000);
            assert_eq!(included.contains(&p), exact, "p={p}, q={q}");
        }
    }

    #[test]
    fn fouvry_scan_exact_recheck_100k() {
        // The default scan to 10^5 is nonempty and every returned pair
        // survives the exact integer power comparison.
        let pairs = scan_fouvry_primes(100_000, 1.0, 0.6687).unwrap();
        assert!(!pairs.is_empty());
        for pp in &pairs {
            assert!(
                fouvry_condition_exact(pp.p, pp.q, 1, 1, 6687, 10000),
                "p={}, q={}",
                pp.p,
                pp.q
            );
        }
    }

    #[test]
    fn fouvry_scan_rejects_bad_arguments() {
        assert!(scan_fouvry_primes(100, 0.0, 0.6687).is_err());
        assert!(scan_fouvry_primes(100, 1.0, 1.5).is_err());
    }

    #[test]
    fn primitive_root_cases() {
        // 2 has order 3 mod 7, so the smallest primitive root is 3.
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(2).unwrap(), 1);
        assert_eq!(primitive_root(11).unwrap(), 2);
        assert!(primitive_root(12).is_err());
    }

    #[test]
    fn primitive_root_has_full_order() {
        for p in primes_up_to(500) {
            let alpha = primitive_root(p).unwrap();
            assert_eq!(multiplicative_order(alpha, p), euler_phi(p));
        }
    }

    #[test]
    fn group_context_nu_table() {
        let ctx = GroupContext::build(7).unwrap();
        assert_eq!(ctx.alpha(), 3);
        assert_eq!(ctx.nu(3), 1);
        // 3^2 = 9 = 2 mod 7.
        assert_eq!(ctx.nu(2), 2);
        // nu maps into [p-1]; the identity sits at the top.
        assert_eq!(ctx.nu(1), 6);
    }

    #[test]
    fn nu_is_a_homomorphism() {
        for p in [7u64, 11, 23, 101] {
            let ctx = GroupContext::build(p).unwrap();
            for g in 1..p {
                for h in 1..p {
                    let lhs = ctx.nu(mul_mod(g, h, p)) % (p - 1);
                    let rhs = (ctx.nu(g) + ctx.nu(h)) % (p - 1);
                    assert_eq!(lhs, rhs, "p={p}, g={g}, h={h}");
                }
            }
        }
        let ctx = GroupContext::build(11).unwrap();
        assert_eq!(ctx.nu(4) % 10, (2 * ctx.nu(2)) % 10);
    }

    #[test]
    fn nu_is_a_bijection() {
        let ctx = GroupContext::build(101).unwrap();
        let mut seen = [false; 101];
        for g in 1..101u64 {
            let v = ctx.nu(g) as usize;
            assert!((1..=100).contains(&v));
            assert!(!seen[v]);
            seen[v] = true;
            assert_eq!(pow_mod(ctx.alpha(), ctx.nu(g), 101), g);
        }
    }

    #[test]
    fn subgroup_examples() {
        let ctx = GroupContext::build(7).unwrap();
        let sub3 = SubgroupContext::build(&ctx, 3).unwrap();
        assert_eq!(sub3.elements(), &[1, 2, 4]);
        assert_eq!(sub3.alpha_a(), 2);
        let sub2 = SubgroupContext::build(&ctx, 2).unwrap();
        assert_eq!(sub2.elements(), &[1, 6]);
        // q = p-1 gives the whole group (p=3 is the prime case of that).
        let ctx3 = GroupContext::build(3).unwrap();
        let full = SubgroupContext::build(&ctx3, 2).unwrap();
        assert_eq!(full.elements(), &[1, 2]);
        assert!(SubgroupContext::build(&ctx, 5).is_err());
    }

    #[test]
    fn subgroup_matches_direct_image() {
        // elements = { x^{(p-1)/q} : x in Z_p^* } computed the slow way.
        for (p, q) in [(7u64, 3u64), (11, 5), (23, 11), (59, 29)] {
            let ctx = GroupContext::build(p).unwrap();
            let sub = SubgroupContext::build(&ctx, q).unwrap();
            let mut image: Vec<u64> = (1..p).map(|x| pow_mod(x, (p - 1) / q, p)).collect();
            image.sort_unstable();
            image.dedup();
            assert_eq!(sub.elements(), &image[..]);
        }
    }

    #[test]
    fn nu_a_linearity() {
        for (p, q) in [(7u64, 3u64), (11, 5), (23, 11), (59, 29)] {
            let ctx = GroupContext::build(p).unwrap();
            let sub = SubgroupContext::build(&ctx, q).unwrap();
            for g in sub.elements().iter().copied() {
                for i in 1..=q {
                    let gi = pow_mod(g, i, p);
                    let lhs = sub.nu_a(gi) % q;
                    let rhs = (i * sub.nu_a(g)) % q;
                    assert_eq!(lhs, rhs, "p={p} q={q} g={g} i={i}");
                }
            }
            // nu_A(alpha_A^i) = i with representative in [1, q].
            for i in 1..=q {
                let gi = pow_mod(sub.alpha_a(), i, p);
                let expect = if i % q == 0 { q } else { i % q };
                assert_eq!(sub.nu_a(gi), expect);
            }
        }
    }

    #[test]
    fn multiplicative_order_cases() {
        assert_eq!(multiplicative_order(2, 7), 3);
        assert_eq!(multiplicative_order(3, 7), 6);
        assert_eq!(multiplicative_order(2, 23), 11);
    }

    #[test]
    fn group_context_table_budget() {
        // 10000019 is prime and above the table limit.
        assert!(matches!(
            GroupContext::build(10_000_019),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(matches!(GroupContext::build(10), Err(Error::NotPrime(10))));
    }
}
