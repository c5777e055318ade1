//! Integer kernel: factorization, valuations, multiplicative orders and the
//! congruence lifting used by the 2-adic arguments for ΓL₁(q).

use crate::error::{Error, Result};

const TRIAL_LIMIT: u64 = 1 << 20;

/// Prime factorization as `(prime, exponent)` pairs with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// The set π(n) of prime divisors, ascending.
    pub fn primes(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, _)| p).collect()
    }

    pub fn value(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for k in 0..len {
                    divs.push(divs[k] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
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

/// Deterministic Miller-Rabin; the base set is exact below 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    // Brent's variant, fixed starting constants so runs are reproducible.
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Exact factorization of `1 <= n < 2^63`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("cannot factor 0"));
    }
    if n > i64::MAX as u64 {
        return Err(Error::domain(format!("{n} exceeds 2^63 - 1")));
    }
    let mut rest = n;
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p < TRIAL_LIMIT && p * p <= rest {
        while rest % p == 0 {
            primes.push(p);
            rest /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        split_into(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { factors })
}

/// π(n), the prime divisors of n.
pub fn prime_set(n: u64) -> Vec<u64> {
    factorize(n).map(|f| f.primes()).unwrap_or_default()
}

pub fn divisors(n: u64) -> Vec<u64> {
    factorize(n).map(|f| f.divisors()).unwrap_or_default()
}

/// The r-adic valuation: the largest v with r^v dividing n.
pub fn v_r(r: u64, n: u64) -> Result<u32> {
    if !is_prime(r) {
        return Err(Error::NotPrime(r));
    }
    if n == 0 {
        return Err(Error::domain("valuation of 0 is infinite"));
    }
    Ok(valuation(r, n))
}

pub(crate) fn valuation(r: u64, mut n: u64) -> u32 {
    let mut v = 0;
    while n % r == 0 {
        n /= r;
        v += 1;
    }
    v
}

pub fn euler_phi(n: u64) -> u64 {
    let f = factorize(n).expect("positive argument");
    f.factors()
        .iter()
        .fold(1, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

/// o_n(b): the multiplicative order of b modulo n.
pub fn mult_order(b: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::domain("modulus must be at least 2"));
    }
    if gcd(b % n, n) != 1 {
        return Err(Error::domain(format!("gcd({b}, {n}) != 1")));
    }
    let phi = euler_phi(n);
    let mut order = phi;
    for p in factorize(phi)?.primes() {
        while order % p == 0 && pow_mod(b, order / p, n) == 1 {
            order /= p;
        }
    }
    Ok(order)
}

/// p^gcd(a,b) - 1, which equals gcd(p^a - 1, p^b - 1).
///
/// Returned as `u128` since `7^30` already overflows 64 bits.
pub fn gcd_pexp(p: u64, a: u32, b: u32) -> u128 {
    (p as u128).pow(gcd(a as u64, b as u64) as u32) - 1
}

/// The largest odd divisor of n.
/// Prime powers `q = p^f` with `qmin <= q <= qmax`, as `(p, f)` sorted by `q`.
pub fn prime_powers(qmin: u64, qmax: u64) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for p in 2..=qmax {
        if !is_prime(p) {
            continue;
        }
        let mut q = p;
        let mut f = 1;
        while q <= qmax {
            if q >= qmin {
                out.push((q, p as u32, f));
            }
            q *= p;
            f += 1;
        }
    }
    out.sort_unstable();
    out.into_iter().map(|(_, p, f)| (p, f)).collect()
}

pub fn odd_part(n: u64) -> u64 {
    assert!(n >= 1, "odd part of 0");
    n >> n.trailing_zeros()
}

/// A congruence `(1 + x)^n ≡ residue (mod modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Congruence {
    pub residue: u64,
    pub modulus: u64,
}

/// The binomial lifting congruence for `(1 + x)^n` when `r | x`.
///
/// Generic case: `1 + n x (mod r^{v_r(n x) + 1})`. When `r = 2`, `v_2(x) = 1`
/// and `n` is even the modulus drops to `2^{v_2(n x (x+2))}` with residue
/// `1 + n x (x + 2) / 2`. The even case covers every `n ≡ 0 (mod 4)` too: the
/// generic formula is false there (`3^4 ≡ 1`, not `9`, mod 16). The result is
/// checked against modular exponentiation before it is returned.
pub fn lift_congruence(r: u64, x: u64, n: u64) -> Result<Congruence> {
    if !is_prime(r) {
        return Err(Error::NotPrime(r));
    }
    if n == 0 {
        return Err(Error::domain("exponent must be positive"));
    }
    if x == 0 || x % r != 0 {
        return Err(Error::domain(format!("{r} does not divide {x}")));
    }
    let big = |a: u64| a as u128;
    let exceptional = r == 2 && valuation(2, x) == 1 && n % 2 == 0;
    let (residue, modulus) = if exceptional {
        let prod = big(n) * big(x) * big(x + 2);
        let v = valuation_u128(2, prod);
        let modulus = checked_pow(2, v)?;
        let residue = (1 + prod / 2) % big(modulus);
        (residue as u64, modulus)
    } else {
        let prod = big(n) * big(x);
        let v = valuation_u128(r, prod);
        let modulus = checked_pow(r, v + 1)?;
        let residue = (1 + prod) % big(modulus);
        (residue as u64, modulus)
    };
    let direct = pow_mod((1 + x as u128 % modulus as u128) as u64 % modulus, n, modulus);
    if direct != residue % modulus {
        return Err(Error::contract(format!(
            "(1+{x})^{n} = {direct} but lifting predicts {residue} mod {modulus}"
        )));
    }
    Ok(Congruence { residue, modulus })
}

fn valuation_u128(r: u64, mut n: u128) -> u32 {
    let r = r as u128;
    let mut v = 0;
    while n % r == 0 {
        n /= r;
        v += 1;
    }
    v
}

fn checked_pow(r: u64, e: u32) -> Result<u64> {
    r.checked_pow(e)
        .filter(|&m| m <= i64::MAX as u64)
        .ok_or(Error::Overflow("lift_congruence modulus"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().is_empty());
        assert_eq!(factorize(360).unwrap().factors(), &[(2, 3), (3, 2), (5, 1)]);
        let f = factorize(62400).unwrap();
        assert_eq!(f.factors(), trial_factor(62400).as_slice());
        assert_eq!(f.factors(), &[(2, 6), (3, 1), (5, 2), (13, 1)]);
        assert_eq!(62400, 64 * 15 * 65);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_reconstructs_up_to_a_million() {
        for n in 1..=1_000_000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(f.value(), n);
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.factors().iter().all(|&(p, _)| is_prime(p)));
        }
    }

    #[test]
    fn factorize_large_semiprime_uses_rho() {
        let p = 1_000_003u64;
        let q = 998_244_353u64;
        let f = factorize(p * q).unwrap();
        assert_eq!(f.factors(), &[(p, 1), (q, 1)]);
        assert!(factorize(u64::MAX).is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(v_r(2, 48).unwrap(), 4);
        assert_eq!(v_r(3, 10).unwrap(), 0);
        assert_eq!(v_r(2, 3u64.pow(2) - 1).unwrap(), 3);
        assert!(matches!(v_r(4, 16), Err(Error::NotPrime(4))));
    }

    #[test]
    fn multiplicative_orders() {
        assert_eq!(mult_order(2, 7).unwrap(), 3);
        for b in (1..50).step_by(2) {
            assert_eq!(mult_order(b, 2).unwrap(), 1);
        }
        assert_eq!(mult_order(3, 8).unwrap(), 2);
        assert!(mult_order(2, 8).is_err());
        for n in 2..200u64 {
            for b in 1..60u64 {
                if gcd(b, n) != 1 {
                    continue;
                }
                let o = mult_order(b, n).unwrap();
                assert_eq!(euler_phi(n) % o, 0);
                let brute = (1..=n).find(|&l| pow_mod(b, l, n) == 1).unwrap();
                assert_eq!(o, brute);
            }
        }
    }

    #[test]
    fn gcd_pexp_examples() {
        assert_eq!(gcd_pexp(2, 4, 6), 3);
        assert_eq!(gcd(15, 63), 3);
        assert_eq!(gcd_pexp(5, 3, 3), 124);
        for k in 1..8 {
            assert_eq!(gcd_pexp(3, 2, 2 * k), 8);
            assert_eq!((3u64.pow(2 * k) - 1) % 8, 0);
        }
    }

    #[test]
    fn lift_congruence_examples() {
        assert_eq!(
            lift_congruence(3, 3, 3).unwrap(),
            Congruence { residue: 10, modulus: 27 }
        );
        assert_eq!(64 % 27, 10);
        assert_eq!(
            lift_congruence(2, 2, 2).unwrap(),
            Congruence { residue: 9, modulus: 16 }
        );
        for (r, x) in [(2u64, 4u64), (3, 6), (5, 25), (7, 14)] {
            let c = lift_congruence(r, x, 1).unwrap();
            let m = r.pow(valuation(r, x) + 1);
            assert_eq!(c, Congruence { residue: (1 + x) % m, modulus: m });
        }
        // n divisible by 4 with v_2(x) = 1 must take the (x + 2) branch.
        assert_eq!(
            lift_congruence(2, 2, 4).unwrap(),
            Congruence { residue: 17, modulus: 32 }
        );
        assert_eq!(81 % 32, 17);
        assert!(lift_congruence(3, 4, 2).is_err());
        assert!(lift_congruence(6, 6, 2).is_err());
    }

    #[test]
    fn prime_power_listing() {
        let qs: Vec<u32> = prime_powers(1, 32).iter().map(|&(p, f)| p.pow(f)).collect();
        assert_eq!(qs, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32]);
        assert_eq!(prime_powers(9, 9), vec![(3, 2)]);
        assert!(prime_powers(24, 24).is_empty());
    }

    #[test]
    fn odd_parts() {
        assert_eq!(odd_part(40), 5);
        assert_eq!(odd_part(7), 7);
        assert_eq!(odd_part(64), 1);
    }

    #[test]
    fn divisor_listing() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
    }

    proptest! {
        #[test]
        fn gcd_pexp_matches_direct_gcd(p in prop::sample::select(vec![2u64, 3, 5, 7]), a in 1u32..=30, b in 1u32..=30) {
            // 7^30 overflows u64, so compare in u128.
            let pa = (p as u128).pow(a) - 1;
            let pb = (p as u128).pow(b) - 1;
            let mut x = pa;
            let mut y = pb;
            while y != 0 { let t = x % y; x = y; y = t; }
            prop_assert_eq!(gcd_pexp(p, a, b), x);
        }

        #[test]
        fn lift_congruence_holds(r in prop::sample::select(vec![2u64, 3, 5, 7, 11]), k in 1u64..200, n in 1u64..500) {
            let x = r * k;
            let c = lift_congruence(r, x, n).unwrap();
            prop_assert_eq!(pow_mod(1 + x, n, c.modulus), c.residue);
        }

        #[test]
        fn odd_part_is_odd(n in 1u64..1_000_000) {
            let o = odd_part(n);
            prop_assert_eq!(o % 2, 1);
            prop_assert_eq!(n % o, 0);
            prop_assert!((n / o).is_power_of_two());
        }
    }
}
