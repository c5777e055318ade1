//! Semilinear matrix groups `H ≤ ΓL_d(q)` for `d ≤ 3`.
//!
//! An element is a pair `(M, s)` acting on row vectors by `v ↦ v^{σ^s} M`,
//! so `(M₁, s₁)(M₂, s₂) = (M₁^{σ^{s₂}} M₂, s₁ + s₂)`.

use std::collections::HashSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{Elem, FieldTable};
use crate::gammal1::SemilinearScalar;
use crate::groupengine::{self, Closure, CoveringTest, FiniteGroup};
use crate::linalg::{self, FpMatrix};
use crate::numth;
use crate::verdict::{DecidedBy, Reason, VerdictKind};

pub const MAX_DIM: usize = 3;

/// Every nonzero vector is used as a spinning probe up to this many vectors.
pub const PROBE_ALL_LIMIT: u64 = 4096;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemilinearMatrix {
    dim: u8,
    s: u8,
    m: [Elem; 9],
}

impl SemilinearMatrix {
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// The Frobenius power `s`.
    pub fn frobenius(&self) -> u32 {
        self.s as u32
    }

    pub fn entry(&self, i: usize, k: usize) -> Elem {
        self.m[i * 3 + k]
    }

    pub fn row(&self, i: usize) -> [Elem; 3] {
        [self.m[i * 3], self.m[i * 3 + 1], self.m[i * 3 + 2]]
    }

    /// The generator-spec line for this element, e.g. `1; e0 0; 0 e3`.
    pub fn to_spec_line(&self) -> String {
        let mut out = self.s.to_string();
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|k| match self.entry(i, k).log() {
                    None => "0".to_string(),
                    Some(e) => format!("e{e}"),
                })
                .collect();
            out.push_str("; ");
            out.push_str(&row.join(" "));
        }
        out
    }
}

impl fmt::Debug for SemilinearMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_spec_line())
    }
}

impl fmt::Display for SemilinearMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_spec_line())
    }
}

/// ΓL_d(q) over a fixed field table.
#[derive(Debug, Clone, Copy)]
pub struct GammaLd<'a> {
    t: &'a FieldTable,
    dim: usize,
}

fn rank_fq(t: &FieldTable, rows: &mut [[Elem; 3]], dim: usize) -> usize {
    let mut rank = 0;
    for col in 0..dim {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = t.inv(rows[rank][col]).expect("pivot is nonzero");
        for k in 0..dim {
            rows[rank][k] = t.mul(rows[rank][k], inv);
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col];
            for k in 0..dim {
                rows[r][k] = t.sub(rows[r][k], t.mul(factor, rows[rank][k]));
            }
        }
        rank += 1;
    }
    rank
}

impl<'a> GammaLd<'a> {
    pub fn new(t: &'a FieldTable, dim: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::domain(format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        Ok(GammaLd { t, dim })
    }

    pub fn field(&self) -> &'a FieldTable {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn raw(&self, entries: impl Fn(usize, usize) -> Elem, s: u32) -> SemilinearMatrix {
        let mut m = [Elem::ZERO; 9];
        for i in 0..self.dim {
            for k in 0..self.dim {
                m[i * 3 + k] = entries(i, k);
            }
        }
        SemilinearMatrix {
            dim: self.dim as u8,
            s: s as u8,
            m,
        }
    }

    pub fn identity(&self) -> SemilinearMatrix {
        self.raw(|i, k| if i == k { Elem::ONE } else { Elem::ZERO }, 0)
    }

    /// An invertible element from its rows and Frobenius power.
    pub fn from_rows(&self, rows: &[Vec<Elem>], s: u32) -> Result<SemilinearMatrix> {
        if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
            return Err(Error::domain(format!("expected a {0}×{0} matrix", self.dim)));
        }
        if s >= self.t.f() {
            return Err(Error::domain(format!(
                "Frobenius power {s} must be below f = {}",
                self.t.f()
            )));
        }
        if rows.iter().flatten().any(|&x| !self.t.is_valid(x)) {
            return Err(Error::domain("matrix entry outside the field"));
        }
        let g = self.raw(|i, k| rows[i][k], s);
        if self.det(&g).is_zero() {
            return Err(Error::domain("matrix is singular"));
        }
        Ok(g)
    }

    pub fn mul(&self, a: &SemilinearMatrix, b: &SemilinearMatrix) -> SemilinearMatrix {
        let t = self.t;
        let s = b.frobenius();
        let mut m = [Elem::ZERO; 9];
        for i in 0..self.dim {
            for k in 0..self.dim {
                let mut acc = Elem::ZERO;
                for j in 0..self.dim {
                    let x = a.entry(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    acc = t.add(acc, t.mul(t.frobenius(x, s), b.entry(j, k)));
                }
                m[i * 3 + k] = acc;
            }
        }
        SemilinearMatrix {
            dim: self.dim as u8,
            s: ((a.s as u32 + b.s as u32) % t.f()) as u8,
            m,
        }
    }

    pub fn pow(&self, g: &SemilinearMatrix, e: u64) -> SemilinearMatrix {
        let mut acc = self.identity();
        for _ in 0..e {
            acc = self.mul(&acc, g);
        }
        acc
    }

    /// Order of `g`, or `None` beyond `limit`.
    pub fn element_order(&self, g: &SemilinearMatrix, limit: usize) -> Option<usize> {
        let id = self.identity();
        let mut x = *g;
        for k in 1..=limit {
            if x == id {
                return Some(k);
            }
            x = self.mul(&x, g);
        }
        None
    }

    pub fn inverse(&self, g: &SemilinearMatrix) -> SemilinearMatrix {
        let bound = (self.t.q() as usize).pow(self.dim as u32 * self.dim as u32) * self.t.f() as usize;
        let order = self
            .element_order(g, bound.min(1 << 24))
            .expect("invertible elements have finite order");
        self.pow(g, order as u64 - 1)
    }

    pub fn det(&self, g: &SemilinearMatrix) -> Elem {
        let t = self.t;
        let e = |i, k| g.entry(i, k);
        match self.dim {
            1 => e(0, 0),
            2 => t.sub(t.mul(e(0, 0), e(1, 1)), t.mul(e(0, 1), e(1, 0))),
            _ => {
                let minor = |a: (usize, usize), b: (usize, usize), c: (usize, usize), d: (usize, usize)| {
                    t.sub(t.mul(e(a.0, a.1), e(b.0, b.1)), t.mul(e(c.0, c.1), e(d.0, d.1)))
                };
                let x = t.mul(e(0, 0), minor((1, 1), (2, 2), (1, 2), (2, 1)));
                let y = t.mul(e(0, 1), minor((1, 0), (2, 2), (1, 2), (2, 0)));
                let z = t.mul(e(0, 2), minor((1, 0), (2, 1), (1, 1), (2, 0)));
                t.add(t.sub(x, y), z)
            }
        }
    }

    /// `v^{σ^s} M`.
    pub fn apply(&self, g: &SemilinearMatrix, v: &[Elem]) -> [Elem; 3] {
        let t = self.t;
        let mut out = [Elem::ZERO; 3];
        for i in 0..self.dim {
            if v[i].is_zero() {
                continue;
            }
            let w = t.frobenius(v[i], g.frobenius());
            for (k, o) in out.iter_mut().enumerate().take(self.dim) {
                *o = t.add(*o, t.mul(w, g.entry(i, k)));
            }
        }
        out
    }

    /// `q^d`.
    pub fn vector_count(&self) -> usize {
        (self.t.q() as usize).pow(self.dim as u32)
    }

    pub fn vector_index(&self, v: &[Elem]) -> usize {
        let q = self.t.q() as usize;
        (0..self.dim).rev().fold(0, |acc, i| acc * q + self.t.point_index(v[i]))
    }

    pub fn vector(&self, mut index: usize) -> [Elem; 3] {
        let q = self.t.q() as usize;
        let mut v = [Elem::ZERO; 3];
        for x in v.iter_mut().take(self.dim) {
            *x = self.t.point(index % q);
            index /= q;
        }
        v
    }

    /// The F_p-linear map of `g` on `F_p^{df}`, in the basis `λ^t e_i` (index `i f + t`).
    pub fn fp_linearize(&self, g: &SemilinearMatrix) -> FpMatrix {
        let t = self.t;
        let f = t.f() as usize;
        let n = self.dim * f;
        let mut data = vec![0u32; n * n];
        let mut basis = [Elem::ZERO; 3];
        for i in 0..self.dim {
            for e in 0..f {
                basis.iter_mut().for_each(|x| *x = Elem::ZERO);
                basis[i] = Elem::exp(e as u32);
                let image = self.apply(g, &basis);
                let row = i * f + e;
                for k in 0..self.dim {
                    t.write_vector(image[k], &mut data[row * n + k * f..row * n + (k + 1) * f]);
                }
            }
        }
        FpMatrix { p: t.p(), n, data }
    }

    /// `dim_{F_p} C_V(g)`.
    pub fn fixed_space_dim(&self, g: &SemilinearMatrix) -> usize {
        self.fp_linearize(g).fixed_dim()
    }

    /// F_q-rank of `M - I` for a linear element.
    pub fn rank_minus_identity(&self, g: &SemilinearMatrix) -> usize {
        let t = self.t;
        let mut rows: Vec<[Elem; 3]> = (0..self.dim)
            .map(|i| {
                let mut r = g.row(i);
                r[i] = t.sub(r[i], Elem::ONE);
                r
            })
            .collect();
        rank_fq(t, &mut rows, self.dim)
    }

    /// Whether `(M - I)^d = 0` for a linear element.
    pub fn is_unipotent(&self, g: &SemilinearMatrix) -> bool {
        if g.frobenius() != 0 {
            return false;
        }
        let t = self.t;
        let n = self.raw(
            |i, k| {
                let x = g.entry(i, k);
                if i == k {
                    t.sub(x, Elem::ONE)
                } else {
                    x
                }
            },
            0,
        );
        let mut acc = n;
        for _ in 1..self.dim {
            acc = self.mul(&acc, &n);
        }
        acc.m.iter().all(|x| x.is_zero())
    }

    /// Whether `V` is irreducible under `gens`, by spinning probe vectors over F_p.
    pub fn spin_irreducible(&self, gens: &[SemilinearMatrix]) -> bool {
        let p = self.t.p();
        let n = self.dim * self.t.f() as usize;
        let mats: Vec<FpMatrix> = gens.iter().map(|g| self.fp_linearize(g)).collect();
        let maps: Vec<Box<dyn Fn(&[u32]) -> Vec<u32> + '_>> = mats
            .iter()
            .map(|m| Box::new(move |v: &[u32]| m.apply(v)) as Box<dyn Fn(&[u32]) -> Vec<u32>>)
            .collect();
        let refs: Vec<&dyn Fn(&[u32]) -> Vec<u32>> = maps.iter().map(|b| b.as_ref()).collect();
        let full = |v: &[u32]| linalg::spin(p, v, &refs).is_full();
        let basis_ok = (0..n).all(|k| {
            let mut v = vec![0u32; n];
            v[k] = 1;
            full(&v)
        });
        if !basis_ok {
            return false;
        }
        let total = (p as u64).pow(n as u32);
        if total > PROBE_ALL_LIMIT {
            return true;
        }
        (1..total).all(|code| {
            let mut c = code;
            let v: Vec<u32> = (0..n)
                .map(|_| {
                    let x = (c % p as u64) as u32;
                    c /= p as u64;
                    x
                })
                .collect();
            full(&v)
        })
    }

    pub fn closure(&self, gens: &[SemilinearMatrix], cap: usize) -> Result<Closure<SemilinearMatrix>> {
        groupengine::closure(gens, self.identity(), |a, b| self.mul(a, b), cap)
    }

    /// Orbit sizes on `V`, descending.
    pub fn orbit_sizes(&self, c: &Closure<SemilinearMatrix>) -> Result<Vec<usize>> {
        let count = self.vector_count();
        if count as u64 > PROBE_ALL_LIMIT {
            return Err(Error::SizeOverflow {
                what: "vector space",
                cap: PROBE_ALL_LIMIT as usize,
            });
        }
        let gens: Vec<SemilinearMatrix> = c
            .generator_indices()
            .into_iter()
            .map(|k| *c.element(k))
            .collect();
        Ok(c.orbit_sizes(count, |v, k| {
            self.vector_index(&self.apply(&gens[k], &self.vector(v)))
        }))
    }

    /// Whether `g` is linear with `g J ḡᵀ = J` for the antidiagonal `J`, where
    /// `x̄ = x^{p^half}`.
    pub fn preserves_hermitian_form(&self, g: &SemilinearMatrix, half: u32) -> bool {
        if g.frobenius() != 0 {
            return false;
        }
        let t = self.t;
        let d = self.dim;
        (0..d).all(|i| {
            (0..d).all(|k| {
                // (M J M̄ᵀ)_{ik} = Σ_j M_{ij} conj(M_{k, d-1-j}).
                let mut acc = Elem::ZERO;
                for j in 0..d {
                    acc = t.add(acc, t.mul(g.entry(i, j), t.frobenius(g.entry(k, d - 1 - j), half)));
                }
                acc == if i + k == d - 1 { Elem::ONE } else { Elem::ZERO }
            })
        })
    }
}

/// `F_{q0²}` for a prime power `q0`.
pub fn unitary_field(q0: u32) -> Result<FieldTable> {
    let fact = numth::factorize(q0 as u64)?;
    match fact.factors() {
        [(p, f0)] => FieldTable::new(*p as u32, 2 * f0),
        _ => Err(Error::domain(format!("{q0} is not a prime power"))),
    }
}

/// Generators of `SU₃(q0)` in `ΓL₃(q0²)` for the form with antidiagonal `J`:
/// every lower unitriangular `[[1,0,0],[a,1,0],[d,-ā,1]]` with `d + d̄ + aā = 0`,
/// and `εJ` with `ε = -1` (which is `1` in characteristic 2).
pub fn su3_generators(ctx: &GammaLd, q0: u32) -> Result<Vec<SemilinearMatrix>> {
    let t = ctx.field();
    if ctx.dim() != 3 || t.f() % 2 != 0 || t.p().pow(t.f() / 2) != q0 {
        return Err(Error::domain(format!("SU₃({q0}) needs ΓL₃({q0}²)")));
    }
    let half = t.f() / 2;
    let bar = |x: Elem| t.frobenius(x, half);
    let mut gens = Vec::new();
    for a in t.elements() {
        for d in t.elements() {
            if (a.is_zero() && d.is_zero()) || !t.add(t.add(d, bar(d)), t.mul(a, bar(a))).is_zero() {
                continue;
            }
            let rows = vec![
                vec![Elem::ONE, Elem::ZERO, Elem::ZERO],
                vec![a, Elem::ONE, Elem::ZERO],
                vec![d, t.neg(bar(a)), Elem::ONE],
            ];
            gens.push(ctx.from_rows(&rows, 0)?);
        }
    }
    let eps = t.neg(Elem::ONE);
    let w = ctx.from_rows(
        &[
            vec![Elem::ZERO, Elem::ZERO, eps],
            vec![Elem::ZERO, eps, Elem::ZERO],
            vec![eps, Elem::ZERO, Elem::ZERO],
        ],
        0,
    )?;
    gens.push(w);
    for g in &gens {
        if ctx.det(g) != Elem::ONE || !ctx.preserves_hermitian_form(g, half) {
            return Err(Error::contract(format!("generator {g} is not in SU₃({q0})")));
        }
    }
    Ok(gens)
}

/// `q0³(q0² - 1)(q0³ + 1)`.
pub fn su3_order(q0: u64) -> u64 {
    q0.pow(3) * (q0 * q0 - 1) * (q0.pow(3) + 1)
}

/// Structural facts about `SU₃(q0)` acting on `F_{q0²}³`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Su3Report {
    pub q0: u32,
    pub order: usize,
    pub expected_order: u64,
    pub orbit_sizes: Vec<usize>,
    pub stab_e1: usize,
    pub stab_e2: usize,
    pub star_size: usize,
    pub star_generates: bool,
    pub has_unipotent_j3: bool,
    pub has_unipotent_j1_j2: bool,
    pub has_order_q0_plus_1: bool,
    pub has_order_q0_minus_1: bool,
    pub irreducible: bool,
}

impl Su3Report {
    pub fn failures(&self) -> Vec<String> {
        let q0 = self.q0 as usize;
        let mut out = Vec::new();
        let mut want = |ok: bool, what: String| {
            if !ok {
                out.push(what);
            }
        };
        want(self.order as u64 == self.expected_order, format!("order {} != {}", self.order, self.expected_order));
        want(self.orbit_sizes.len() == q0 + 1, format!("{} orbits, expected {}", self.orbit_sizes.len(), q0 + 1));
        want(self.stab_e1 == q0.pow(3), format!("|Stab(e1)| = {}", self.stab_e1));
        want(self.stab_e2 == q0 * (q0 * q0 - 1), format!("|Stab(e2)| = {}", self.stab_e2));
        want(self.star_generates, "fixed-point elements generate a proper subgroup".into());
        want(self.has_unipotent_j3, "no unipotent with one Jordan block".into());
        want(self.has_unipotent_j1_j2, "no unipotent with Jordan blocks 1 and 2".into());
        want(self.has_order_q0_plus_1, format!("no element of order {}", q0 + 1));
        want(self.has_order_q0_minus_1, format!("no element of order {}", q0 - 1));
        want(self.irreducible, "not irreducible".into());
        out
    }
}

/// Closes `subset` (indices into `c`) to a subgroup at the closure level and returns its order.
fn generated_order(
    ctx: &GammaLd,
    c: &Closure<SemilinearMatrix>,
    subset: impl Iterator<Item = usize>,
    cap: usize,
) -> Result<usize> {
    let mut chosen: Vec<SemilinearMatrix> = Vec::new();
    let mut current: HashSet<SemilinearMatrix> = HashSet::from([ctx.identity()]);
    for x in subset {
        let g = c.element(x);
        if current.contains(g) {
            continue;
        }
        chosen.push(*g);
        current = ctx.closure(&chosen, cap)?.elements().iter().copied().collect();
        if current.len() == c.order() {
            break;
        }
    }
    Ok(current.len())
}

/// Orbit, stabilizer, generation and element-type checks on `SU₃(q0)`.
pub fn su3_checks(q0: u32, cap: usize) -> Result<Su3Report> {
    let t = unitary_field(q0)?;
    let ctx = GammaLd::new(&t, 3)?;
    let gens = su3_generators(&ctx, q0)?;
    let c = ctx.closure(&gens, cap)?;
    let order = c.order();
    let orbit_sizes = ctx.orbit_sizes(&c)?;
    let e1 = [Elem::ONE, Elem::ZERO, Elem::ZERO];
    let e2 = [Elem::ZERO, Elem::ONE, Elem::ZERO];
    let stab_e1 = c.elements().iter().filter(|g| g.row(0) == e1).count();
    let stab_e2 = c.elements().iter().filter(|g| g.row(1) == e2).count();
    let star: Vec<usize> = (0..order)
        .filter(|&x| ctx.fixed_space_dim(c.element(x)) > 0)
        .collect();
    let star_generates = generated_order(&ctx, &c, star.iter().copied(), cap)? == order;
    let mut has_j3 = false;
    let mut has_j1_j2 = false;
    for g in c.elements() {
        if *g != ctx.identity() && ctx.is_unipotent(g) {
            match ctx.rank_minus_identity(g) {
                2 => has_j3 = true,
                1 => has_j1_j2 = true,
                _ => {}
            }
        }
    }
    let want = [q0 as usize + 1, q0 as usize - 1];
    let mut found = [false, false];
    for g in c.elements() {
        if found.iter().all(|&f| f) {
            break;
        }
        if let Some(o) = ctx.element_order(g, order) {
            for k in 0..2 {
                found[k] |= o == want[k];
            }
        }
    }
    Ok(Su3Report {
        q0,
        order,
        expected_order: su3_order(q0 as u64),
        orbit_sizes,
        stab_e1,
        stab_e2,
        star_size: star.len(),
        star_generates,
        has_unipotent_j3: has_j3,
        has_unipotent_j1_j2: has_j1_j2,
        has_order_q0_plus_1: found[0],
        has_order_q0_minus_1: found[1],
        irreducible: ctx.spin_irreducible(&gens),
    })
}

/// A monomial element `e_i ↦ λ^{diag_i} e_{perm(i)}` composed with `σ^s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialGen {
    pub diag: Vec<u32>,
    pub perm: Vec<usize>,
    pub s: u32,
}

impl MonomialGen {
    pub fn diagonal(diag: &[u32]) -> Self {
        MonomialGen {
            diag: diag.to_vec(),
            perm: (0..diag.len()).collect(),
            s: 0,
        }
    }

    pub fn permutation(perm: &[usize]) -> Self {
        MonomialGen {
            diag: vec![0; perm.len()],
            perm: perm.to_vec(),
            s: 0,
        }
    }

    pub fn frobenius(dim: usize, s: u32) -> Self {
        MonomialGen {
            diag: vec![0; dim],
            perm: (0..dim).collect(),
            s,
        }
    }
}

pub fn monomial(ctx: &GammaLd, g: &MonomialGen) -> Result<SemilinearMatrix> {
    let d = ctx.dim();
    let mut sorted = g.perm.clone();
    sorted.sort_unstable();
    if g.diag.len() != d || sorted != (0..d).collect::<Vec<_>>() {
        return Err(Error::domain(format!("monomial spec {g:?} does not fit dimension {d}")));
    }
    let rows: Vec<Vec<Elem>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|k| if g.perm[i] == k { Elem::exp(g.diag[i] % ctx.field().order()) } else { Elem::ZERO })
                .collect()
        })
        .collect();
    ctx.from_rows(&rows, g.s)
}

pub fn monomial_subgroup(ctx: &GammaLd, gens: &[MonomialGen]) -> Result<Vec<SemilinearMatrix>> {
    gens.iter().map(|g| monomial(ctx, g)).collect()
}

/// `ΓL₁(q^d) → ΓL_d(q)` through coordinates in the basis `1, Λ, …, Λ^{d-1}`
/// of `F_{q^d}` over `F_q`, with `Λ` the primitive element of the large field.
#[derive(Debug, Clone)]
pub struct ExtensionEmbedding<'a> {
    small: &'a FieldTable,
    big: &'a FieldTable,
    d: usize,
    /// Coordinates of `Λ^e` for every exponent `e`.
    coords: Vec<[Elem; 3]>,
}

impl<'a> ExtensionEmbedding<'a> {
    pub fn new(small: &'a FieldTable, big: &'a FieldTable) -> Result<Self> {
        let (p, f) = (small.p(), small.f());
        if big.p() != p || big.f() % f != 0 || !(1..=MAX_DIM as u32).contains(&(big.f() / f)) {
            return Err(Error::domain(format!(
                "{:?} is not an extension of degree at most {MAX_DIM} of {:?}",
                big, small
            )));
        }
        let d = (big.f() / f) as usize;
        let big_n = big.order() as u64;
        let step = big_n / small.order() as u64;
        // A root μ of the small field's modulus, so that λ ↦ μ is a field embedding.
        let mu_exp = (0..small.order() as u64)
            .filter(|&k| numth::gcd(k, small.order() as u64) == 1)
            .map(|k| (k * step % big_n) as u32)
            .find(|&e| {
                let mu = Elem::exp(e);
                let mut acc = big.pow(mu, f as u64);
                for (m, &c) in small.modulus().iter().enumerate() {
                    acc = big.add(acc, big.mul(big.from_int(c as i64), big.pow(mu, m as u64)));
                }
                acc.is_zero()
            })
            .ok_or_else(|| Error::contract("no root of the modulus in the extension"))?;
        let n = big.f() as usize;
        let mut data = vec![0u32; n * n];
        for k in 0..d {
            for e in 0..f as usize {
                let b = Elem::exp(((k as u64 + e as u64 * mu_exp as u64) % big_n) as u32);
                let row = k * f as usize + e;
                big.write_vector(b, &mut data[row * n..(row + 1) * n]);
            }
        }
        let basis_inv = FpMatrix { p, n, data }
            .inverse()
            .ok_or_else(|| Error::contract("extension basis is singular"))?;
        let coords = (0..big.order())
            .map(|e| {
                let c = basis_inv.apply(&big.to_vector(Elem::exp(e)));
                let mut out = [Elem::ZERO; 3];
                for k in 0..d {
                    out[k] = small.from_vector(&c[k * f as usize..(k + 1) * f as usize]);
                }
                out
            })
            .collect();
        Ok(ExtensionEmbedding {
            small,
            big,
            d,
            coords,
        })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn target(&self) -> GammaLd<'a> {
        GammaLd {
            t: self.small,
            dim: self.d,
        }
    }

    /// Coordinates of a large-field element over the small field.
    pub fn coordinates(&self, x: Elem) -> [Elem; 3] {
        match x.log() {
            None => [Elem::ZERO; 3],
            Some(e) => self.coords[e as usize],
        }
    }

    /// The matrix of `x ↦ x^{p^s} Λ^a`.
    pub fn image(&self, g: SemilinearScalar) -> SemilinearMatrix {
        let n = self.big.order() as u64;
        let ps = numth::pow_mod(self.big.p() as u64, g.s as u64, n);
        let ctx = self.target();
        ctx.raw(
            |i, k| self.coords[((i as u64 * ps + g.a as u64) % n) as usize][k],
            g.s % self.small.f(),
        )
    }
}

/// Caps used by [`classify_matrix_group`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub closure: usize,
    pub lattice: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            closure: groupengine::DEFAULT_CLOSURE_CAP,
            lattice: groupengine::DEFAULT_LATTICE_CAP,
        }
    }
}

/// Classification of `V ⋊ H` for a matrix group `H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixVerdict {
    /// `None` when the group is too large to decide.
    pub kind: Option<VerdictKind>,
    pub reason: Option<Reason>,
    pub order: usize,
    pub star_size: Option<usize>,
    pub star_generates: Option<bool>,
    pub witness_order: Option<usize>,
    pub decided_by: DecidedBy,
    /// Set when only part of the definition could be checked.
    pub partial: Option<String>,
}

/// Decides basic/non-basic for `V ⋊ ⟨gens⟩` by brute force.
pub fn classify_matrix_group(ctx: &GammaLd, gens: &[SemilinearMatrix], caps: Caps) -> Result<MatrixVerdict> {
    let c = ctx.closure(gens, caps.closure)?;
    let order = c.order();
    let mut verdict = MatrixVerdict {
        kind: Some(VerdictKind::NotApplicable),
        reason: Some(Reason::Reducible),
        order,
        star_size: None,
        star_generates: None,
        witness_order: None,
        decided_by: DecidedBy::Irreducibility,
        partial: None,
    };
    if !ctx.spin_irreducible(gens) {
        return Ok(verdict);
    }
    verdict.reason = None;
    let star: Vec<usize> = (0..order)
        .filter(|&x| ctx.fixed_space_dim(c.element(x)) > 0)
        .collect();
    verdict.star_size = Some(star.len());
    if order > caps.lattice {
        let generated = generated_order(ctx, &c, star.iter().copied(), caps.closure)?;
        verdict.star_generates = Some(generated == order);
        verdict.decided_by = DecidedBy::StarClosure;
        if generated < order {
            verdict.kind = Some(VerdictKind::Basic);
            verdict.partial = Some("basic-by-proper-star-closure".into());
        } else {
            verdict.kind = None;
            verdict.partial = Some(format!("undetermined: order {order} exceeds the lattice cap {}", caps.lattice));
        }
        return Ok(verdict);
    }
    let group = FiniteGroup::from_closure(&c, caps.lattice.max(order))?;
    let mut star_set = FixedBitSet::with_capacity(order);
    star.iter().for_each(|&x| star_set.insert(x));
    let star_gens = group.generating_set(&star_set);
    verdict.star_generates = Some(group.generate(&star_gens).count_ones(..) == order);
    if group.normal_covering_number(2)?.is_two() {
        verdict.kind = Some(VerdictKind::NotApplicable);
        verdict.reason = Some(Reason::GammaHEqualsTwo);
        verdict.decided_by = DecidedBy::BruteForce;
        return Ok(verdict);
    }
    verdict.decided_by = DecidedBy::CoveringSearch;
    match group.covering_subgroup_test(&star_set)? {
        CoveringTest::Basic(t) => {
            verdict.kind = Some(VerdictKind::Basic);
            verdict.witness_order = Some(t.count_ones(..));
        }
        CoveringTest::NonBasic => verdict.kind = Some(VerdictKind::NonBasic),
    }
    Ok(verdict)
}

/// Whether `n` is a product of powers of 2 and 3.
pub fn is_23_number(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    for r in [2, 3] {
        while n % r == 0 {
            n /= r;
        }
    }
    n == 1
}

/// Whether `H` (given by its closure) contains `SU₃(q0)`, `q = q0²`, as a normal
/// subgroup in the standard Hermitian form.
pub fn has_normal_su3(ctx: &GammaLd, c: &Closure<SemilinearMatrix>) -> bool {
    let t = ctx.field();
    if ctx.dim() != 3 || t.f() % 2 != 0 {
        return false;
    }
    let half = t.f() / 2;
    let q0 = t.p().pow(half) as u64;
    let target = su3_order(q0);
    if c.order() as u64 % target != 0 {
        return false;
    }
    let members: HashSet<SemilinearMatrix> = c
        .elements()
        .iter()
        .filter(|g| ctx.det(g) == Elem::ONE && ctx.preserves_hermitian_form(g, half))
        .copied()
        .collect();
    if members.len() as u64 != target {
        return false;
    }
    c.generator_indices().into_iter().all(|k| {
        let g = c.element(k);
        let gi = ctx.inverse(g);
        members
            .iter()
            .all(|x| members.contains(&ctx.mul(&ctx.mul(&gi, x), g)))
    })
}

/// Parses generator lines `s; row; row; …` with entries `0` or `e<k>` (for `λ^k`);
/// `#` starts a comment.
pub fn parse_generator_spec(text: &str, t: &FieldTable) -> Result<Vec<SemilinearMatrix>> {
    let mut dim = None;
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(';').map(str::trim);
        let s_tok = parts.next().unwrap_or("");
        let s: u32 = s_tok
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid Frobenius power {s_tok:?}")))?;
        let rows: Vec<Vec<Elem>> = parts
            .map(|row| {
                row.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|tok| !tok.is_empty())
                    .map(|tok| parse_entry(tok, t).map_err(|msg| Error::parse(line_no, msg)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let d = rows.len();
        if !(1..=MAX_DIM).contains(&d) {
            return Err(Error::parse(line_no, format!("{d} rows; expected 1 to {MAX_DIM}")));
        }
        if *dim.get_or_insert(d) != d {
            return Err(Error::parse(line_no, "generators of different dimensions"));
        }
        let ctx = GammaLd::new(t, d)?;
        let g = ctx
            .from_rows(&rows, s)
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
        out.push(g);
    }
    if out.is_empty() {
        return Err(Error::parse(1, "no generators"));
    }
    Ok(out)
}

fn parse_entry(tok: &str, t: &FieldTable) -> std::result::Result<Elem, String> {
    if tok == "0" {
        return Ok(Elem::ZERO);
    }
    let exp = tok
        .strip_prefix('e')
        .and_then(|k| k.parse::<i64>().ok())
        .ok_or_else(|| format!("invalid entry {tok:?}; use 0 or e<k>"))?;
    Ok(t.lambda_pow(exp))
}

pub fn format_generator_spec(gens: &[SemilinearMatrix]) -> String {
    gens.iter().map(|g| g.to_spec_line() + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gammal1::GammaL1;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(p: u32, f: u32) -> FieldTable {
        FieldTable::new(p, f).unwrap()
    }

    fn random_element(ctx: &GammaLd, rng: &mut ChaCha8Rng) -> SemilinearMatrix {
        let t = ctx.field();
        loop {
            let rows: Vec<Vec<Elem>> = (0..ctx.dim())
                .map(|_| (0..ctx.dim()).map(|_| t.point(rng.gen_range(0..t.q() as usize))).collect())
                .collect();
            if let Ok(g) = ctx.from_rows(&rows, rng.gen_range(0..t.f())) {
                return g;
            }
        }
    }

    #[test]
    fn composition_matches_action() {
        let t = field(3, 2);
        let ctx = GammaLd::new(&t, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (a, b, c) = (random_element(&ctx, &mut rng), random_element(&ctx, &mut rng), random_element(&ctx, &mut rng));
            assert_eq!(ctx.mul(&ctx.mul(&a, &b), &c), ctx.mul(&a, &ctx.mul(&b, &c)));
            assert_eq!(ctx.mul(&a, &ctx.identity()), a);
            let v = ctx.vector(rng.gen_range(0..81));
            assert_eq!(ctx.apply(&ctx.mul(&a, &b), &v), ctx.apply(&b, &ctx.apply(&a, &v)));
        }
    }

    #[test]
    fn linearization_is_a_homomorphism() {
        for (p, f, d) in [(2, 2, 3), (3, 2, 2), (2, 3, 2)] {
            let t = field(p, f);
            let ctx = GammaLd::new(&t, d).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for _ in 0..200 {
                let a = random_element(&ctx, &mut rng);
                let b = random_element(&ctx, &mut rng);
                assert_eq!(ctx.fp_linearize(&ctx.mul(&a, &b)), ctx.fp_linearize(&a).mul(&ctx.fp_linearize(&b)));
            }
            let n = d * f as usize;
            assert_eq!(ctx.fp_linearize(&ctx.identity()), FpMatrix::identity(p, n));
        }
    }

    #[test]
    fn linearized_scalars_and_frobenius() {
        let t = field(3, 2);
        let ctx = GammaLd::new(&t, 1).unwrap();
        for a in 1..8u32 {
            let g = ctx.from_rows(&[vec![Elem::exp(a)]], 0).unwrap();
            let l = ctx.fp_linearize(&g);
            let mut x = l.clone();
            let mut order = 1;
            while x != FpMatrix::identity(3, 2) {
                x = x.mul(&l);
                order += 1;
            }
            assert_eq!(order as u64, 8 / numth::gcd(a as u64, 8));
            assert_eq!(ctx.fixed_space_dim(&g), 0);
        }
        let t = field(2, 3);
        let ctx = GammaLd::new(&t, 1).unwrap();
        let sigma = ctx.from_rows(&[vec![Elem::ONE]], 1).unwrap();
        let l = ctx.fp_linearize(&sigma);
        assert_ne!(l, FpMatrix::identity(2, 3));
        assert_eq!(l.mul(&l).mul(&l), FpMatrix::identity(2, 3));
    }

    #[test]
    fn fixed_spaces() {
        let t = field(3, 2);
        let ctx = GammaLd::new(&t, 2).unwrap();
        let iota = monomial(&ctx, &MonomialGen::permutation(&[1, 0])).unwrap();
        assert_eq!(ctx.fixed_space_dim(&iota), 2);
        assert_eq!(ctx.fixed_space_dim(&ctx.identity()), 4);
        let scalar = monomial(&ctx, &MonomialGen::diagonal(&[3, 3])).unwrap();
        assert_eq!(ctx.fixed_space_dim(&scalar), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let g = random_element(&ctx, &mut rng);
            let h = random_element(&ctx, &mut rng);
            let conj = ctx.mul(&ctx.mul(&ctx.inverse(&h), &g), &h);
            assert_eq!(ctx.fixed_space_dim(&conj), ctx.fixed_space_dim(&g));
        }
    }

    #[test]
    fn irreducibility_by_spinning() {
        let t = field(3, 2);
        let ctx = GammaLd::new(&t, 2).unwrap();
        let diag = monomial_subgroup(&ctx, &[MonomialGen::diagonal(&[1, 0]), MonomialGen::diagonal(&[0, 1])]).unwrap();
        assert!(!ctx.spin_irreducible(&diag));
        let mut with_swap = diag.clone();
        with_swap.push(monomial(&ctx, &MonomialGen::permutation(&[1, 0])).unwrap());
        assert!(ctx.spin_irreducible(&with_swap));
        let t4 = field(2, 2);
        let ctx3 = GammaLd::new(&t4, 3).unwrap();
        let cycle = monomial(&ctx3, &MonomialGen::permutation(&[1, 2, 0])).unwrap();
        assert!(!ctx3.spin_irreducible(&[cycle]));
    }

    #[test]
    fn trivial_group_orbits() {
        let t = field(2, 2);
        let ctx = GammaLd::new(&t, 2).unwrap();
        let c = ctx.closure(&[], 10).unwrap();
        assert_eq!(ctx.orbit_sizes(&c).unwrap(), vec![1; 16]);
    }

    #[test]
    fn su3_over_f4() {
        let r = su3_checks(2, groupengine::DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(r.order, 216);
        assert_eq!(r.orbit_sizes, vec![36, 27, 1]);
        assert_eq!((r.stab_e1, r.stab_e2), (8, 6));
        assert!(r.failures().is_empty(), "{:?}", r.failures());
    }

    #[test]
    fn su3_generators_validate_input() {
        let t = field(2, 2);
        assert!(su3_generators(&GammaLd::new(&t, 2).unwrap(), 2).is_err());
        assert!(su3_generators(&GammaLd::new(&t, 3).unwrap(), 4).is_err());
        let gens = su3_generators(&GammaLd::new(&t, 3).unwrap(), 2).unwrap();
        assert_eq!(gens.len(), 8);
        assert!(unitary_field(6).is_err());
    }

    #[test]
    fn monomial_group_orders() {
        let t = field(3, 2);
        let ctx = GammaLd::new(&t, 2).unwrap();
        let gens = monomial_subgroup(
            &ctx,
            &[MonomialGen::diagonal(&[1, 1]), MonomialGen::permutation(&[1, 0]), MonomialGen::frobenius(2, 1)],
        )
        .unwrap();
        let c = ctx.closure(&gens, 10_000).unwrap();
        assert_eq!(256 % c.order(), 0);
        assert!(monomial(&ctx, &MonomialGen::diagonal(&[1, 2, 3])).is_err());
        assert!(monomial(&ctx, &MonomialGen::permutation(&[0, 0])).is_err());
    }

    #[test]
    fn extension_embedding_is_a_homomorphism() {
        for (p, f, d) in [(2, 1, 2), (2, 2, 2), (3, 1, 2), (2, 1, 3), (2, 2, 3), (3, 2, 2), (5, 1, 2)] {
            let small = field(p, f);
            let big = field(p, f * d);
            let emb = ExtensionEmbedding::new(&small, &big).unwrap();
            let ctx = emb.target();
            let gl = GammaL1::new(&big);
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            for _ in 0..100 {
                let a = SemilinearScalar::new(rng.gen_range(0..big.f()), rng.gen_range(0..big.order()));
                let b = SemilinearScalar::new(rng.gen_range(0..big.f()), rng.gen_range(0..big.order()));
                let ab = gl.multiply(a, b).unwrap();
                assert_eq!(emb.image(ab), ctx.mul(&emb.image(a), &emb.image(b)));
                let x = big.point(rng.gen_range(0..big.q() as usize));
                let lhs = emb.coordinates(gl.apply(a, x));
                let rhs = ctx.apply(&emb.image(a), &emb.coordinates(x));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn embedding_preserves_fixed_points() {
        for (p, f, d) in [(2, 1, 2), (2, 2, 2), (2, 1, 3), (3, 1, 2), (2, 2, 3), (2, 4, 2), (3, 2, 2), (5, 1, 2), (7, 1, 2), (2, 1, 4 - 1)] {
            let small = field(p, f);
            let big = field(p, f * d);
            if big.q() > 256 {
                continue;
            }
            let emb = ExtensionEmbedding::new(&small, &big).unwrap();
            let ctx = emb.target();
            let gl = GammaL1::new(&big);
            for s in 0..big.f() {
                for a in 0..big.order() {
                    let g = SemilinearScalar::new(s, a);
                    assert_eq!(gl.fixes_nonzero(g), ctx.fixed_space_dim(&emb.image(g)) > 0);
                }
            }
        }
    }

    #[test]
    fn classify_reducible_and_embedded() {
        let t = field(2, 2);
        let ctx = GammaLd::new(&t, 2).unwrap();
        let diag = monomial_subgroup(&ctx, &[MonomialGen::diagonal(&[1, 0])]).unwrap();
        let v = classify_matrix_group(&ctx, &diag, Caps::default()).unwrap();
        assert_eq!(v.reason, Some(Reason::Reducible));

        let big = field(3, 4);
        let small = field(3, 2);
        let emb = ExtensionEmbedding::new(&small, &big).unwrap();
        let gl = GammaL1::new(&big);
        for h in gl.enumerate_subgroups().into_iter().step_by(7) {
            let gens: Vec<SemilinearMatrix> = gl.generators(h).into_iter().map(|g| emb.image(g)).collect();
            let mv = classify_matrix_group(&emb.target(), &gens, Caps::default()).unwrap();
            let expected = crate::affine1::classify(&gl, h).unwrap();
            assert_eq!(mv.kind, Some(expected.kind), "{h}");
        }
    }

    #[test]
    fn classify_over_lattice_cap_is_partial() {
        let t = field(2, 2);
        let ctx = GammaLd::new(&t, 3).unwrap();
        let gens = su3_generators(&ctx, 2).unwrap();
        let v = classify_matrix_group(&ctx, &gens, Caps { closure: 1000, lattice: 100 }).unwrap();
        assert!(v.partial.is_some());
        assert_eq!(v.order, 216);
        assert!(has_normal_su3(&ctx, &ctx.closure(&gens, 1000).unwrap()));
    }

    #[test]
    fn generator_spec_round_trip() {
        let t = field(3, 2);
        let text = "# dihedral\n1; e0 0; 0 e0\n0; 0 e2; e2 0  # swap\n\n";
        let gens = parse_generator_spec(text, &t).unwrap();
        assert_eq!(gens.len(), 2);
        assert_eq!(gens[0].frobenius(), 1);
        let again = parse_generator_spec(&format_generator_spec(&gens), &t).unwrap();
        assert_eq!(again, gens);
        assert_eq!(parse_generator_spec("0; e9", &t).unwrap()[0].entry(0, 0), Elem::exp(1));
    }

    #[test]
    fn generator_spec_errors() {
        let t = field(3, 2);
        for bad in [
            "",
            "# only a comment",
            "x; e0",
            "2; e0",
            "0; e0 0; 0",
            "0; 0 0; 0 0",
            "0; e0\n0; e0 0; 0 e0",
            "0; 1",
            "0; e0 e0 e0; e0 e0 e0; e0 e0 e0; e0 e0 e0",
        ] {
            assert!(matches!(parse_generator_spec(bad, &t), Err(Error::Parse { .. })), "{bad:?}");
        }
    }
}
