//! Subgroups of ΓL₁(q) = ⟨λ⟩ ⋊ ⟨σ⟩ in the `(d, j, i)` parametrization
//! `H = ⟨λ^d, σ^j λ^i⟩`, with `H ∩ ⟨λ⟩ = ⟨λ^d⟩` and `0 <= i < d`.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{Elem, FieldTable};
use crate::linalg;
use crate::numth;

/// The map `x ↦ x^{p^s} λ^a`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SemilinearScalar {
    pub s: u32,
    pub a: u32,
}

impl SemilinearScalar {
    pub const IDENTITY: SemilinearScalar = SemilinearScalar { s: 0, a: 0 };

    pub const fn new(s: u32, a: u32) -> Self {
        SemilinearScalar { s, a }
    }
}

impl fmt::Debug for SemilinearScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.s, self.a)
    }
}

/// Canonical name of `⟨λ^d, σ^j λ^i⟩`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Gl1Subgroup {
    pub d: u32,
    pub j: u32,
    pub i: u32,
}

impl Gl1Subgroup {
    pub const fn new(d: u32, j: u32, i: u32) -> Self {
        Gl1Subgroup { d, j, i }
    }
}

impl fmt::Debug for Gl1Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.d, self.j, self.i)
    }
}

impl fmt::Display for Gl1Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// ΓL₁(q) over a fixed field table.
#[derive(Debug, Clone)]
pub struct GammaL1<'a> {
    field: &'a FieldTable,
    /// `p^s mod (q - 1)` for `0 <= s <= f`.
    ppow: Vec<u64>,
}

impl<'a> GammaL1<'a> {
    pub fn new(field: &'a FieldTable) -> Self {
        let n = field.order() as u64;
        let ppow = (0..=field.f())
            .map(|s| numth::pow_mod(field.p() as u64, s as u64, n.max(1)))
            .collect();
        GammaL1 { field, ppow }
    }

    pub fn field(&self) -> &'a FieldTable {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn f(&self) -> u32 {
        self.field.f()
    }

    /// `q - 1`.
    pub fn n(&self) -> u32 {
        self.field.order()
    }

    /// `|ΓL₁(q)| = f (q - 1)`.
    pub fn ambient_order(&self) -> u64 {
        self.f() as u64 * self.n() as u64
    }

    fn check(&self, g: SemilinearScalar) -> Result<()> {
        if g.s < self.f() && g.a < self.n() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "{g:?} is not an element of ΓL₁({})",
                self.field.q()
            )))
        }
    }

    fn mul_unchecked(&self, g: SemilinearScalar, h: SemilinearScalar) -> SemilinearScalar {
        let n = self.n() as u64;
        SemilinearScalar {
            s: (g.s + h.s) % self.f(),
            a: ((g.a as u64 * self.ppow[h.s as usize] + h.a as u64) % n) as u32,
        }
    }

    /// `(s₁, a₁)(s₂, a₂) = (s₁ + s₂, a₁ p^{s₂} + a₂)`: first `g`, then `h`.
    pub fn multiply(&self, g: SemilinearScalar, h: SemilinearScalar) -> Result<SemilinearScalar> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul_unchecked(g, h))
    }

    pub fn inverse(&self, g: SemilinearScalar) -> SemilinearScalar {
        let f = self.f();
        let n = self.n() as u64;
        let s = (f - g.s) % f;
        let a = (n - (g.a as u64 * self.ppow[s as usize]) % n) % n;
        SemilinearScalar { s, a: a as u32 }
    }

    pub fn conjugate(&self, g: SemilinearScalar, by: SemilinearScalar) -> SemilinearScalar {
        self.mul_unchecked(self.mul_unchecked(self.inverse(by), g), by)
    }

    /// The image of a field element.
    pub fn apply(&self, g: SemilinearScalar, x: Elem) -> Elem {
        self.field.mul(self.field.frobenius(x, g.s), Elem::exp(g.a))
    }

    /// `1 + p^j + ... + p^{j(k-1)} mod (q - 1)`, i.e. `(p^{jk} - 1)/(p^j - 1)`.
    fn geometric(&self, j: u32, k: u32) -> u64 {
        let n = self.n() as u64;
        let mut acc = 0u64;
        let mut term = 1 % n.max(1);
        for _ in 0..k {
            acc = (acc + term) % n.max(1);
            term = (term * self.ppow[j as usize]) % n.max(1);
        }
        acc
    }

    /// Every `(d, j, i)` satisfying `d | i (p^f - 1)/(p^j - 1)`, sorted.
    pub fn enumerate_subgroups(&self) -> Vec<Gl1Subgroup> {
        let n = self.n() as u64;
        let f = self.f();
        let p = self.p() as u64;
        let mut out = Vec::new();
        for d in numth::divisors(n) {
            for j in numth::divisors(f as u64) {
                let quotient = (p.pow(f) - 1) / (p.pow(j as u32) - 1);
                for i in 0..d {
                    if (i * (quotient % d)) % d == 0 {
                        out.push(Gl1Subgroup::new(d as u32, j as u32, i as u32));
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn is_valid(&self, h: Gl1Subgroup) -> bool {
        let n = self.n() as u64;
        let f = self.f();
        if h.d == 0 || n % h.d as u64 != 0 || h.j == 0 || f % h.j != 0 || h.i >= h.d {
            return false;
        }
        let p = self.p() as u64;
        let quotient = (p.pow(f) - 1) / (p.pow(h.j) - 1);
        (h.i as u64 * (quotient % h.d as u64)) % h.d as u64 == 0
    }

    /// `|H| = (f/j)(q-1)/d`.
    pub fn order(&self, h: Gl1Subgroup) -> u64 {
        (self.f() / h.j) as u64 * (self.n() / h.d) as u64
    }

    pub fn trivial(&self) -> Gl1Subgroup {
        Gl1Subgroup::new(self.n(), self.f(), 0)
    }

    pub fn full(&self) -> Gl1Subgroup {
        Gl1Subgroup::new(1, 1, 0)
    }

    /// The two defining generators `λ^d` and `σ^j λ^i` (the latter omitted when `j = f`).
    pub fn generators(&self, h: Gl1Subgroup) -> Vec<SemilinearScalar> {
        let mut gens = vec![SemilinearScalar::new(0, h.d % self.n().max(1))];
        if h.j < self.f() {
            gens.push(SemilinearScalar::new(h.j, h.i));
        }
        gens
    }

    /// `(σ^j λ^i)^k λ^{dℓ}` for `0 <= k < f/j`, `0 <= ℓ < (q-1)/d`.
    pub fn elements(&self, h: Gl1Subgroup) -> Vec<SemilinearScalar> {
        let n = self.n() as u64;
        let f = self.f();
        let mut out = Vec::with_capacity(self.order(h) as usize);
        for k in 0..f / h.j {
            let base = (h.i as u64 * self.geometric(h.j, k)) % n.max(1);
            for l in 0..(self.n() / h.d) as u64 {
                out.push(SemilinearScalar::new(
                    (h.j * k) % f,
                    ((base + h.d as u64 * l) % n.max(1)) as u32,
                ));
            }
        }
        out
    }

    pub fn contains(&self, h: Gl1Subgroup, g: SemilinearScalar) -> bool {
        if g.s % h.j != 0 {
            return false;
        }
        let k = g.s / h.j;
        let d = h.d as u64;
        let offset = (h.i as u64 * self.geometric(h.j, k)) % d;
        (g.a as u64 + d - offset) % d == 0
    }

    pub fn is_subgroup_of(&self, k: Gl1Subgroup, h: Gl1Subgroup) -> bool {
        self.generators(k).into_iter().all(|g| self.contains(h, g))
    }

    /// Whether `x ↦ x^{p^s} λ^a` fixes a nonzero vector: `p^{gcd(s,f)} - 1 | a`.
    pub fn fixes_nonzero(&self, g: SemilinearScalar) -> bool {
        let e = numth::gcd(g.s as u64, self.f() as u64) as u32;
        let m = (self.p() as u64).pow(e) - 1;
        g.a as u64 % m == 0
    }

    /// H*: the elements of H fixing some nonzero vector.
    pub fn h_star(&self, h: Gl1Subgroup) -> Vec<SemilinearScalar> {
        self.elements(h)
            .into_iter()
            .filter(|&g| self.fixes_nonzero(g))
            .collect()
    }

    fn index(&self, g: SemilinearScalar) -> usize {
        g.s as usize * self.n() as usize + g.a as usize
    }

    /// Breadth-first closure inside ΓL₁(q), returned as its canonical triple.
    fn close(&self, gens: &[SemilinearScalar]) -> Gl1Subgroup {
        let n = self.n();
        let f = self.f();
        let mut seen = FixedBitSet::with_capacity(self.ambient_order() as usize);
        let mut queue = vec![SemilinearScalar::IDENTITY];
        seen.insert(0);
        let mut d = n;
        let mut j = f;
        while let Some(x) = queue.pop() {
            if x.s == 0 && x.a != 0 {
                d = numth::gcd(d as u64, x.a as u64) as u32;
            }
            if x.s != 0 {
                j = numth::gcd(j as u64, x.s as u64) as u32;
            }
            for &g in gens {
                let y = self.mul_unchecked(x, g);
                let idx = self.index(y);
                if !seen.contains(idx) {
                    seen.insert(idx);
                    queue.push(y);
                }
            }
        }
        let i = if j == f {
            0
        } else {
            // Any element whose Frobenius part is exactly σ^j.
            let a = (0..n)
                .find(|&a| seen.contains(self.index(SemilinearScalar::new(j, a))))
                .expect("closure contains an element over σ^j");
            a % d
        };
        Gl1Subgroup::new(d, j, i)
    }

    /// The subgroup generated by `set`, as a canonical triple.
    pub fn generated_subgroup(&self, set: &[SemilinearScalar]) -> Result<Gl1Subgroup> {
        let mut current = self.trivial();
        for &g in set {
            self.check(g)?;
            if !self.contains(current, g) {
                let mut gens = self.generators(current);
                gens.push(g);
                current = self.close(&gens);
            }
        }
        Ok(current)
    }

    /// ⟨H*⟩.
    pub fn star_closure(&self, h: Gl1Subgroup) -> Gl1Subgroup {
        self.generated_subgroup(&self.h_star(h))
            .expect("elements of H lie in ΓL₁(q)")
    }

    /// Nilpotency through `π((q-1)/d) ⊆ π(p^j - 1)`.
    pub fn is_nilpotent_fast(&self, h: Gl1Subgroup) -> bool {
        let pj = (self.p() as u64).pow(h.j) - 1;
        numth::prime_set((self.n() / h.d) as u64)
            .into_iter()
            .all(|r| pj % r == 0)
    }

    /// Irreducibility of F_q as an F_p H-module, spinning every nonzero vector.
    pub fn is_irreducible(&self, h: Gl1Subgroup) -> bool {
        if self.f() == 1 {
            return true;
        }
        let t = self.field;
        let gens = self.generators(h);
        let maps: Vec<Box<dyn Fn(&[u32]) -> Vec<u32> + '_>> = gens
            .iter()
            .map(|&g| {
                Box::new(move |v: &[u32]| t.to_vector(self.apply(g, t.from_vector(v))))
                    as Box<dyn Fn(&[u32]) -> Vec<u32>>
            })
            .collect();
        let refs: Vec<&dyn Fn(&[u32]) -> Vec<u32>> = maps.iter().map(|b| b.as_ref()).collect();
        (0..t.order()).all(|e| {
            let v = t.to_vector(Elem::exp(e));
            linalg::spin(t.p(), &v, &refs).is_full()
        })
    }

    /// The conjugate `λ^t H λ^{-t}`: `i ↦ i + t(p^j - 1) mod d`.
    pub fn conjugate_by_lambda(&self, h: Gl1Subgroup, t: i64) -> Gl1Subgroup {
        let d = h.d as i64;
        let pj1 = ((self.p() as i64).pow(h.j) - 1) % d;
        let i = (h.i as i64 + (t.rem_euclid(d) * pj1) % d).rem_euclid(d);
        Gl1Subgroup::new(h.d, h.j, i as u32)
    }

    /// The ⟨λ⟩-conjugacy class of `h`, sorted.
    pub fn lambda_class(&self, h: Gl1Subgroup) -> Vec<Gl1Subgroup> {
        let mut class: Vec<_> = (0..h.d as i64)
            .map(|t| self.conjugate_by_lambda(h, t))
            .collect();
        class.sort();
        class.dedup();
        class
    }

    /// The shape `⟨σ, λ^{(p-1)e}⟩` (up to ⟨λ⟩-conjugacy) of a dihedral 2-group
    /// with `p ≡ 3 (mod 4)`, `f = 2` and `e | p + 1`.
    pub fn is_dihedral_shape(&self, h: Gl1Subgroup) -> bool {
        let p = self.p();
        if p % 4 != 3 || self.f() != 2 || !self.order(h).is_power_of_two() {
            return false;
        }
        let shape_matches = (1..=p + 1).filter(|e| (p + 1) % e == 0).any(|e| {
            let target = Gl1Subgroup::new((p - 1) * e, 1, 0);
            target.d == h.d && self.lambda_class(h).contains(&target)
        });
        if !shape_matches {
            return false;
        }
        // σ inverts λ^d, so H is dihedral (of order 4 or more when |H| > 2).
        let sigma = SemilinearScalar::new(1, 0);
        let rot = SemilinearScalar::new(0, h.d % self.n());
        self.conjugate(rot, sigma) == self.inverse(rot)
    }

    /// Maximal subgroups of `h` among the canonical triples, sorted.
    pub fn maximal_subgroups(&self, h: Gl1Subgroup) -> Vec<Gl1Subgroup> {
        let subs: Vec<Gl1Subgroup> = self
            .enumerate_subgroups()
            .into_iter()
            .filter(|&k| k != h && self.is_subgroup_of(k, h))
            .collect();
        subs.iter()
            .copied()
            .filter(|&k| {
                !subs
                    .iter()
                    .any(|&m| m != k && self.is_subgroup_of(k, m) && self.order(m) > self.order(k))
            })
            .collect()
    }
}
