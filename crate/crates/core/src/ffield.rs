//! F_{p^f} in log coordinates.
//!
//! Every nonzero element is stored as its discrete logarithm with respect to a
//! fixed primitive element λ (the residue class of `x` modulo the lexicographically
//! least primitive polynomial). Addition goes through a Zech table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numth;

pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// A field element: either zero or `λ^e` with `0 <= e < q - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(u32::MAX);
    pub const ONE: Elem = Elem(0);

    /// `λ^e`; the caller guarantees `e < q - 1`.
    pub const fn exp(e: u32) -> Elem {
        Elem(e)
    }

    pub fn is_zero(self) -> bool {
        self == Elem::ZERO
    }

    /// The exponent of a nonzero element.
    pub fn log(self) -> Option<u32> {
        (!self.is_zero()).then_some(self.0)
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.log() {
            None => write!(f, "0"),
            Some(e) => write!(f, "λ^{e}"),
        }
    }
}

#[derive(Clone)]
pub struct FieldTable {
    p: u32,
    f: u32,
    q: u32,
    /// `(a_0, ..., a_{f-1})` of the monic modulus `x^f + a_{f-1} x^{f-1} + ... + a_0`.
    modulus: Vec<u32>,
    /// Coefficient vectors of `λ^0, ..., λ^{q-2}`, flattened with stride `f`.
    exp_vecs: Vec<u32>,
    /// Indexed by the base-p encoding of a coefficient vector.
    log_table: Vec<Elem>,
    /// `zech[k] = log(1 + λ^k)`.
    zech: Vec<Elem>,
}

impl fmt::Debug for FieldTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}(modulus {})", self.q, self.modulus_string())
    }
}

impl PartialEq for FieldTable {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f && self.modulus == other.modulus
    }
}

impl Eq for FieldTable {}

impl FieldTable {
    /// Builds F_{p^f} over the lexicographically least primitive modulus,
    /// comparing `(a_0, ..., a_{f-1})` with `a_0` most significant.
    pub fn new(p: u32, f: u32) -> Result<FieldTable> {
        if !numth::is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if f == 0 {
            return Err(Error::domain("field degree must be positive"));
        }
        let q = (p as u64)
            .checked_pow(f)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or_else(|| Error::domain(format!("{p}^{f} exceeds {MAX_FIELD_ORDER}")))?;
        let q = q as u32;
        let fu = f as usize;
        let mut coeffs = vec![0u32; fu];
        loop {
            // Most significant digit is a_0.
            if coeffs[0] != 0 {
                if let Some(exp_vecs) = power_table(p, &coeffs, q) {
                    return Ok(Self::from_parts(p, f, q, coeffs, exp_vecs));
                }
            }
            let mut k = fu;
            loop {
                assert!(k > 0, "no primitive polynomial of degree {f} over F_{p}");
                k -= 1;
                coeffs[k] += 1;
                if coeffs[k] < p {
                    break;
                }
                coeffs[k] = 0;
            }
        }
    }

    fn from_parts(p: u32, f: u32, q: u32, modulus: Vec<u32>, exp_vecs: Vec<u32>) -> FieldTable {
        let order = (q - 1) as usize;
        let fu = f as usize;
        let mut log_table = vec![Elem::ZERO; q as usize];
        for e in 0..order {
            let idx = encode(p, &exp_vecs[e * fu..(e + 1) * fu]);
            log_table[idx] = Elem(e as u32);
        }
        let mut zech = vec![Elem::ZERO; order];
        let mut buf = vec![0u32; fu];
        for (k, z) in zech.iter_mut().enumerate() {
            buf.copy_from_slice(&exp_vecs[k * fu..(k + 1) * fu]);
            buf[0] = (buf[0] + 1) % p;
            *z = log_table[encode(p, &buf)];
        }
        FieldTable {
            p,
            f,
            q,
            modulus,
            exp_vecs,
            log_table,
            zech,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `q - 1`, the order of λ.
    pub fn order(&self) -> u32 {
        self.q - 1
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The modulus rendered as e.g. `x^2 + x + 2`.
    pub fn modulus_string(&self) -> String {
        let mut terms = vec![if self.f == 1 {
            "x".to_string()
        } else {
            format!("x^{}", self.f)
        }];
        for k in (0..self.f as usize).rev() {
            let c = self.modulus[k];
            if c == 0 {
                continue;
            }
            let term = match (k, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (k, 1) => format!("x^{k}"),
                (k, c) => format!("{c}x^{k}"),
            };
            terms.push(term);
        }
        terms.join(" + ")
    }

    pub fn is_valid(&self, a: Elem) -> bool {
        a.is_zero() || a.0 < self.order()
    }

    pub fn lambda_pow(&self, e: i64) -> Elem {
        Elem(e.rem_euclid(self.order() as i64) as u32)
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.is_zero() || b.is_zero() {
            return Elem::ZERO;
        }
        Elem(((a.0 as u64 + b.0 as u64) % self.order() as u64) as u32)
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        a.log().map(|e| Elem((self.order() - e) % self.order()))
    }

    pub fn pow(&self, a: Elem, n: u64) -> Elem {
        match a.log() {
            None if n == 0 => Elem::ONE,
            None => Elem::ZERO,
            Some(e) => Elem(((e as u64 * n) % self.order() as u64) as u32),
        }
    }

    /// `λ^a + λ^b` through the Zech table.
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let (Some(ea), Some(eb)) = (a.log(), b.log()) else {
            return if a.is_zero() { b } else { a };
        };
        let n = self.order();
        let diff = (eb + n - ea) % n;
        match self.zech[diff as usize].log() {
            None => Elem::ZERO,
            Some(z) => Elem(((ea as u64 + z as u64) % n as u64) as u32),
        }
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 || a.is_zero() {
            return a;
        }
        // -1 = λ^{(q-1)/2} in odd characteristic.
        self.mul(a, Elem(self.order() / 2))
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    /// `a^{p^s}`.
    pub fn frobenius(&self, a: Elem, s: u32) -> Elem {
        match a.log() {
            None => Elem::ZERO,
            Some(e) => Elem(frobenius_exp(self, e, s)),
        }
    }

    /// The image of the prime-field integer `c`.
    pub fn from_int(&self, c: i64) -> Elem {
        let c = c.rem_euclid(self.p as i64) as u32;
        if c == 0 {
            return Elem::ZERO;
        }
        let mut v = vec![0u32; self.f as usize];
        v[0] = c;
        self.from_vector(&v)
    }

    /// Power-basis coordinates `(c_0, ..., c_{f-1})` with `a = Σ c_k λ^k`.
    pub fn to_vector(&self, a: Elem) -> Vec<u32> {
        let mut out = vec![0u32; self.f as usize];
        self.write_vector(a, &mut out);
        out
    }

    pub fn write_vector(&self, a: Elem, out: &mut [u32]) {
        let fu = self.f as usize;
        match a.log() {
            None => out[..fu].iter_mut().for_each(|c| *c = 0),
            Some(e) => {
                let e = e as usize;
                out[..fu].copy_from_slice(&self.exp_vecs[e * fu..(e + 1) * fu]);
            }
        }
    }

    pub fn from_vector(&self, v: &[u32]) -> Elem {
        self.log_table[encode(self.p, v)]
    }

    /// A dense index of the element in `0..q`: 0 for zero, `e + 1` for `λ^e`.
    pub fn point_index(&self, a: Elem) -> usize {
        match a.log() {
            None => 0,
            Some(e) => e as usize + 1,
        }
    }

    pub fn point(&self, index: usize) -> Elem {
        if index == 0 {
            Elem::ZERO
        } else {
            Elem(index as u32 - 1)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.q as usize).map(|k| self.point(k))
    }

    /// The exponent table as CSV rows `exponent,c_0,...,c_{f-1}`.
    pub fn exp_table_csv(&self) -> String {
        let mut out = String::from("exponent");
        for k in 0..self.f {
            out.push_str(&format!(",c{k}"));
        }
        out.push('\n');
        for e in 0..self.order() {
            out.push_str(&e.to_string());
            for c in self.to_vector(Elem(e)) {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }
}

/// `build_field`: the field table of F_{p^f}.
pub fn build_field(p: u32, f: u32) -> Result<FieldTable> {
    FieldTable::new(p, f)
}

/// `log(λ^a + λ^b)` on exponent-or-zero encodings.
pub fn add_exp(t: &FieldTable, a: Elem, b: Elem) -> Result<Elem> {
    if !t.is_valid(a) || !t.is_valid(b) {
        return Err(Error::domain(format!("invalid element encoding for {t:?}")));
    }
    Ok(t.add(a, b))
}

/// `a p^s mod (q - 1)`: the exponent of `(λ^a)^{σ^s}`.
pub fn frobenius_exp(t: &FieldTable, a: u32, s: u32) -> u32 {
    let n = t.order() as u64;
    let ps = numth::pow_mod(t.p as u64, s as u64, n);
    ((a as u64 * ps) % n) as u32
}

pub fn as_fp_vector(t: &FieldTable, a: Elem) -> Vec<u32> {
    t.to_vector(a)
}

fn encode(p: u32, v: &[u32]) -> usize {
    v.iter()
        .rev()
        .fold(0usize, |acc, &c| acc * p as usize + c as usize)
}

/// Powers of `x` modulo the monic polynomial with low coefficients `modulus`,
/// or `None` unless `x` has order exactly `q - 1`.
fn power_table(p: u32, modulus: &[u32], q: u32) -> Option<Vec<u32>> {
    let f = modulus.len();
    let order = (q - 1) as usize;
    let mut out = Vec::with_capacity(order * f);
    let mut v = vec![0u32; f];
    v[0] = 1;
    for step in 0..order {
        if step > 0 && v[0] == 1 && v[1..].iter().all(|&c| c == 0) {
            return None;
        }
        out.extend_from_slice(&v);
        let top = v[f - 1];
        for k in (1..f).rev() {
            v[k] = v[k - 1];
        }
        v[0] = 0;
        for k in 0..f {
            v[k] = ((v[k] as u64 + (p - modulus[k]) as u64 * top as u64) % p as u64) as u32;
        }
    }
    (v[0] == 1 && v[1..].iter().all(|&c| c == 0)).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Schoolbook multiplication modulo the table's modulus, independent of the logs.
    fn poly_mul(t: &FieldTable, a: &[u32], b: &[u32]) -> Vec<u32> {
        let p = t.p();
        let f = t.f() as usize;
        let mut prod = vec![0u32; 2 * f];
        for i in 0..f {
            for j in 0..f {
                prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
            }
        }
        for k in (f..2 * f).rev() {
            let c = prod[k];
            prod[k] = 0;
            for m in 0..f {
                prod[k - f + m] = (prod[k - f + m] + (p - t.modulus()[m]) * c) % p;
            }
        }
        prod.truncate(f);
        prod
    }

    fn fields() -> Vec<FieldTable> {
        [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 2), (7, 2), (2, 8), (3, 5)]
            .iter()
            .map(|&(p, f)| FieldTable::new(p, f).unwrap())
            .collect()
    }

    #[test]
    fn f9_modulus_and_powers() {
        let t = FieldTable::new(3, 2).unwrap();
        assert_eq!(t.modulus(), &[2, 1]);
        assert_eq!(t.modulus_string(), "x^2 + x + 2");
        assert_eq!(t.to_vector(Elem::exp(4)), vec![2, 0]);
        assert_eq!(t.pow(Elem::exp(1), 8), Elem::ONE);
    }

    #[test]
    fn f9_modulus_is_least_primitive_by_exhaustion() {
        // All 9 monic quadratics (a0, a1) in lexicographic order; the first whose
        // root has order 8 must be the chosen one.
        let mut first = None;
        'outer: for a0 in 0..3u32 {
            for a1 in 0..3u32 {
                let m = [a0, a1];
                let mut v = [1u32, 0];
                for step in 1..=8 {
                    let top = v[1];
                    v = [(3 - m[0]) * top % 3, (v[0] + (3 - m[1]) * top) % 3];
                    if v == [1, 0] {
                        if step == 8 {
                            first = Some(m);
                            break 'outer;
                        }
                        break;
                    }
                }
            }
        }
        assert_eq!(first, Some([2, 1]));
    }

    #[test]
    fn prime_fields_and_f16() {
        let t = FieldTable::new(2, 1).unwrap();
        assert_eq!(t.modulus(), &[1]);
        assert_eq!(t.modulus_string(), "x + 1");
        assert_eq!(t.order(), 1);
        let t = FieldTable::new(2, 4).unwrap();
        let mut seen: Vec<_> = (0..15).map(|e| t.to_vector(Elem::exp(e))).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 15);
        assert!(seen.iter().all(|v| v.iter().any(|&c| c != 0)));
    }

    #[test]
    fn bounds_are_enforced() {
        assert!(FieldTable::new(2, 21).is_err());
        assert!(FieldTable::new(4, 1).is_err());
        assert!(FieldTable::new(3, 0).is_err());
    }

    #[test]
    fn zech_addition_examples() {
        let f9 = FieldTable::new(3, 2).unwrap();
        assert_eq!(add_exp(&f9, Elem::ONE, Elem::exp(4)).unwrap(), Elem::ZERO);
        assert_eq!(add_exp(&f9, Elem::exp(5), Elem::ZERO).unwrap(), Elem::exp(5));
        let f4 = FieldTable::new(2, 2).unwrap();
        assert_eq!(add_exp(&f4, Elem::ONE, Elem::exp(1)).unwrap(), Elem::exp(2));
        assert!(add_exp(&f4, Elem::exp(3), Elem::ONE).is_err());
    }

    #[test]
    fn frobenius_examples() {
        let f9 = FieldTable::new(3, 2).unwrap();
        assert_eq!(frobenius_exp(&f9, 1, 1), 3);
        for a in 0..8 {
            assert_eq!(frobenius_exp(&f9, a, 2), a);
        }
        let f16 = FieldTable::new(2, 4).unwrap();
        assert_eq!(frobenius_exp(&f16, 5, 2), 5);
    }

    #[test]
    fn coordinates() {
        let f9 = FieldTable::new(3, 2).unwrap();
        assert_eq!(as_fp_vector(&f9, Elem::ONE), vec![1, 0]);
        assert_eq!(as_fp_vector(&f9, Elem::exp(1)), vec![0, 1]);
        // x^2 = -x - 2 = 2x + 1.
        assert_eq!(as_fp_vector(&f9, Elem::exp(2)), vec![1, 2]);
        assert_eq!(as_fp_vector(&f9, Elem::ZERO), vec![0, 0]);
    }

    #[test]
    fn lambda_is_primitive_and_tables_are_inverse() {
        for t in fields() {
            let n = t.order();
            let one = t.to_vector(Elem::ONE);
            let mut v = one.clone();
            let x = t.to_vector(t.lambda_pow(1));
            for k in 1..=n {
                v = poly_mul(&t, &v, &x);
                assert_eq!(v == one, k == n, "λ^{k} in {t:?}");
                assert_eq!(t.from_vector(&v), t.lambda_pow(k as i64));
            }
        }
    }

    #[test]
    fn arithmetic_agrees_with_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for t in fields() {
            let rand_elem = |rng: &mut ChaCha8Rng| t.point(rng.gen_range(0..t.q() as usize));
            for _ in 0..200 {
                let (a, b) = (rand_elem(&mut rng), rand_elem(&mut rng));
                let (va, vb) = (t.to_vector(a), t.to_vector(b));
                let sum: Vec<u32> = va.iter().zip(&vb).map(|(x, y)| (x + y) % t.p()).collect();
                assert_eq!(t.add(a, b), t.from_vector(&sum));
                assert_eq!(t.mul(a, b), t.from_vector(&poly_mul(&t, &va, &vb)));
                // σ is additive and multiplicative.
                for s in 0..t.f() {
                    let fs = |x| t.frobenius(x, s);
                    assert_eq!(fs(t.add(a, b)), t.add(fs(a), fs(b)));
                    assert_eq!(fs(t.mul(a, b)), t.mul(fs(a), fs(b)));
                }
                assert_eq!(t.add(a, t.neg(a)), Elem::ZERO);
            }
        }
    }

    #[test]
    fn addition_is_commutative_and_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in fields() {
            for _ in 0..500 {
                let mut r = || t.point(rng.gen_range(0..t.q() as usize));
                let (a, b, c) = (r(), r(), r());
                assert_eq!(t.add(a, b), t.add(b, a));
                assert_eq!(t.add(t.add(a, b), c), t.add(a, t.add(b, c)));
            }
        }
    }

    #[test]
    fn frobenius_fixed_exponents_are_subfields() {
        for t in fields() {
            let n = t.order();
            for e in numth::divisors(t.f() as u64) {
                let e = e as u32;
                let step = n / (t.p().pow(e) - 1);
                let fixed: Vec<u32> = (0..n).filter(|&a| frobenius_exp(&t, a, e) == a).collect();
                let expected: Vec<u32> = (0..n).filter(|a| a % step == 0).collect();
                assert_eq!(fixed, expected, "{t:?} e={e}");
            }
        }
    }
}
