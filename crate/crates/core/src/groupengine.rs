//! Brute-force finite groups over explicit Cayley tables.
//!
//! Elements are dense indices with `0` the identity. Subgroups and element
//! sets are [`FixedBitSet`]s over those indices. Everything here is meant as
//! an oracle for small groups (a few thousand elements), not as a general
//! computational group theory library.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::hash::Hash;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, FpMatrix};
use crate::numth;

pub const DEFAULT_CLOSURE_CAP: usize = 200_000;
pub const DEFAULT_TABLE_CAP: usize = 6_000;
pub const DEFAULT_LATTICE_CAP: usize = 2_000;

const NO_PARENT: u32 = u32::MAX;

/// The group generated by some elements of an ambient multiplication, in
/// breadth-first order from the identity.
#[derive(Debug, Clone)]
pub struct Closure<T> {
    elements: Vec<T>,
    index: HashMap<T, u32>,
    /// `(parent, k)` with `elements[x] = elements[parent] * gens[k]`.
    parent: Vec<(u32, u32)>,
    /// `right[k][x]` is the index of `elements[x] * gens[k]`.
    right: Vec<Vec<u32>>,
}

/// Breadth-first closure of `gens` under `mul`, failing once `cap` elements are exceeded.
pub fn closure<T, F>(gens: &[T], identity: T, mut mul: F, cap: usize) -> Result<Closure<T>>
where
    T: Clone + Eq + Hash,
    F: FnMut(&T, &T) -> T,
{
    let mut elements = vec![identity.clone()];
    let mut index = HashMap::from([(identity, 0u32)]);
    let mut parent = vec![(0, NO_PARENT)];
    let mut right: Vec<Vec<u32>> = vec![Vec::new(); gens.len()];
    let mut cursor = 0;
    while cursor < elements.len() {
        let x = elements[cursor].clone();
        for (k, g) in gens.iter().enumerate() {
            let y = mul(&x, g);
            let id = match index.get(&y) {
                Some(&id) => id,
                None => {
                    if elements.len() >= cap {
                        return Err(Error::SizeOverflow {
                            what: "group closure",
                            cap,
                        });
                    }
                    let id = elements.len() as u32;
                    index.insert(y.clone(), id);
                    elements.push(y);
                    parent.push((cursor as u32, k as u32));
                    id
                }
            };
            right[k].push(id);
        }
        cursor += 1;
    }
    Ok(Closure {
        elements,
        index,
        parent,
        right,
    })
}

impl<T: Clone + Eq + Hash> Closure<T> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn element(&self, x: usize) -> &T {
        &self.elements[x]
    }

    pub fn index_of(&self, x: &T) -> Option<usize> {
        self.index.get(x).map(|&i| i as usize)
    }

    pub fn generator_count(&self) -> usize {
        self.right.len()
    }

    /// Index of `elements[x] * gens[k]`.
    pub fn right_mul(&self, x: usize, k: usize) -> usize {
        self.right[k][x] as usize
    }

    /// Index of each generator.
    pub fn generator_indices(&self) -> Vec<usize> {
        self.right.iter().map(|r| r[0] as usize).collect()
    }

    /// A word in the generators evaluating to element `x`.
    pub fn word(&self, mut x: usize) -> Vec<usize> {
        let mut w = Vec::new();
        while self.parent[x].1 != NO_PARENT {
            w.push(self.parent[x].1 as usize);
            x = self.parent[x].0 as usize;
        }
        w.reverse();
        w
    }

    /// Orbits of the closure acting through `act(point, generator index)`, sizes descending.
    pub fn orbit_sizes(&self, points: usize, act: impl Fn(usize, usize) -> usize) -> Vec<usize> {
        let mut seen = FixedBitSet::with_capacity(points);
        let mut sizes = Vec::new();
        for start in 0..points {
            if seen.contains(start) {
                continue;
            }
            seen.insert(start);
            let mut stack = vec![start];
            let mut size = 0;
            while let Some(v) = stack.pop() {
                size += 1;
                for k in 0..self.generator_count() {
                    let w = act(v, k);
                    if !seen.contains(w) {
                        seen.insert(w);
                        stack.push(w);
                    }
                }
            }
            sizes.push(size);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

/// A finite group stored as a full multiplication table.
#[derive(Debug)]
pub struct FiniteGroup {
    n: usize,
    table: Vec<u16>,
    inv: Vec<u16>,
    gens: Vec<usize>,
    orders: OnceLock<Vec<u32>>,
    classes: OnceLock<ConjugacyClasses>,
}

impl Clone for FiniteGroup {
    fn clone(&self) -> Self {
        FiniteGroup::from_parts(self.n, self.table.clone(), self.gens.clone())
    }
}

#[derive(Debug, Clone)]
struct ConjugacyClasses {
    classes: Vec<Vec<usize>>,
    class_of: Vec<u32>,
}

/// The normal covering number of a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gamma {
    /// `value` maximal subgroups, given by one representative each.
    Value { value: usize, witnesses: Vec<FixedBitSet> },
    /// No covering with at most `kmax` subgroups.
    Exceeds(usize),
    /// Cyclic groups are not unions of conjugates of proper subgroups.
    UndefinedCyclic,
}

impl Gamma {
    pub fn value(&self) -> Option<usize> {
        match self {
            Gamma::Value { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn is_two(&self) -> bool {
        self.value() == Some(2)
    }
}

/// Outcome of searching for a proper subgroup whose conjugates cover a normal subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoveringTest {
    Basic(FixedBitSet),
    NonBasic,
}

/// Maximal subgroups grouped into conjugacy classes.
#[derive(Debug, Clone)]
pub struct MaximalSubgroups {
    pub classes: Vec<Vec<FixedBitSet>>,
}

impl MaximalSubgroups {
    pub fn count(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }

    pub fn representatives(&self) -> impl Iterator<Item = &FixedBitSet> {
        self.classes.iter().map(|c| &c[0])
    }

    pub fn all(&self) -> impl Iterator<Item = &FixedBitSet> {
        self.classes.iter().flatten()
    }
}

/// Every subgroup of a group, sorted by order and then by elements.
#[derive(Debug, Clone)]
pub struct SubgroupLattice {
    pub subgroups: Vec<FixedBitSet>,
    /// Conjugacy class id of each subgroup.
    pub class_of: Vec<usize>,
    /// Whether each subgroup is maximal in the whole group.
    pub maximal: Vec<bool>,
}

impl SubgroupLattice {
    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    /// Whether subgroup `a` contains subgroup `b`.
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.subgroups[b].is_subset(&self.subgroups[a])
    }

    pub fn class_count(&self) -> usize {
        self.class_of.iter().max().map_or(0, |m| m + 1)
    }
}

/// A quotient `G/N` with the coset map.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub group: FiniteGroup,
    pub coset_of: Vec<usize>,
    pub cosets: Vec<Vec<usize>>,
}

/// Dimensions compared in the divisibility check for a normal subgroup with abelian quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimRatio {
    pub dim_v: usize,
    pub dim_w: usize,
    pub index: usize,
}

impl DimRatio {
    /// `dim V / dim W` is an integer dividing `|H : J|`.
    pub fn holds(&self) -> bool {
        self.dim_v % self.dim_w == 0 && self.index % (self.dim_v / self.dim_w) == 0
    }
}

impl FiniteGroup {
    fn from_parts(n: usize, table: Vec<u16>, gens: Vec<usize>) -> FiniteGroup {
        let mut inv = vec![0u16; n];
        for x in 0..n {
            let row = &table[x * n..(x + 1) * n];
            inv[x] = row.iter().position(|&v| v == 0).expect("rows are permutations") as u16;
        }
        FiniteGroup {
            n,
            table,
            inv,
            gens,
            orders: OnceLock::new(),
            classes: OnceLock::new(),
        }
    }

    fn check_size(n: usize, cap: usize) -> Result<()> {
        let cap = cap.min(u16::MAX as usize + 1);
        if n > cap {
            return Err(Error::SizeOverflow {
                what: "multiplication table",
                cap,
            });
        }
        Ok(())
    }

    /// The Cayley table of a closure, indexed as the closure is.
    pub fn from_closure<T: Clone + Eq + Hash>(c: &Closure<T>, cap: usize) -> Result<FiniteGroup> {
        let n = c.order();
        Self::check_size(n, cap)?;
        let mut table = vec![0u16; n * n];
        for x in 0..n {
            let row = &mut table[x * n..(x + 1) * n];
            row[0] = x as u16;
            for y in 1..n {
                let (p, k) = c.parent[y];
                row[y] = c.right[k as usize][row[p as usize] as usize] as u16;
            }
        }
        let mut gens: Vec<usize> = c.generator_indices().into_iter().filter(|&g| g != 0).collect();
        gens.sort_unstable();
        gens.dedup();
        Ok(Self::from_parts(n, table, gens))
    }

    /// Convenience: closure followed by the Cayley table.
    pub fn generate_from<T, F>(gens: &[T], identity: T, mul: F, cap: usize) -> Result<FiniteGroup>
    where
        T: Clone + Eq + Hash,
        F: FnMut(&T, &T) -> T,
    {
        let c = closure(gens, identity, mul, cap)?;
        Self::from_closure(&c, cap)
    }

    /// A validated group from a row-major table with `0` as identity.
    pub fn from_table(n: usize, entries: &[usize]) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::domain("a group has at least one element"));
        }
        Self::check_size(n, DEFAULT_TABLE_CAP)?;
        if entries.len() != n * n {
            return Err(Error::domain(format!(
                "expected {} table entries, found {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e >= n) {
            return Err(Error::domain(format!("entry {bad} out of range for order {n}")));
        }
        for x in 0..n {
            if entries[x] != x || entries[x * n] != x {
                return Err(Error::domain("element 0 is not the identity"));
            }
        }
        let mut seen = vec![usize::MAX; n];
        for x in 0..n {
            for y in 0..n {
                let v = entries[x * n + y];
                if seen[v] == x {
                    return Err(Error::domain(format!("row {x} is not a permutation")));
                }
                seen[v] = x;
            }
        }
        let mut seen = vec![usize::MAX; n];
        for y in 0..n {
            for x in 0..n {
                let v = entries[x * n + y];
                if seen[v] == y {
                    return Err(Error::domain(format!("column {y} is not a permutation")));
                }
                seen[v] = y;
            }
        }
        let m = |a: usize, b: usize| entries[a * n + b];
        let assoc = |a: usize, b: usize, c: usize| m(m(a, b), c) == m(a, m(b, c));
        let ok = if n <= 64 {
            (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| assoc(a, b, c))))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..20_000).all(|_| assoc(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)))
        };
        if !ok {
            return Err(Error::domain("multiplication is not associative"));
        }
        let table: Vec<u16> = entries.iter().map(|&e| e as u16).collect();
        let mut g = Self::from_parts(n, table, Vec::new());
        let all = g.everything();
        g.gens = g.generating_set(&all);
        Ok(g)
    }

    /// Parses `n` followed by the `n × n` table, whitespace separated; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<FiniteGroup> {
        let mut tokens = text.lines().enumerate().flat_map(|(i, line)| {
            let body = line.split('#').next().unwrap_or("");
            body.split_whitespace().map(move |t| (i + 1, t))
        });
        let (line, first) = tokens
            .next()
            .ok_or_else(|| Error::parse(1, "missing group order"))?;
        let n: usize = first
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid group order {first:?}")))?;
        if n == 0 || n > DEFAULT_TABLE_CAP {
            return Err(Error::parse(line, format!("group order {n} outside 1..={DEFAULT_TABLE_CAP}")));
        }
        let mut entries = Vec::new();
        let mut last_line = line;
        for (line, tok) in tokens {
            last_line = line;
            let v: usize = tok
                .parse()
                .map_err(|_| Error::parse(line, format!("invalid table entry {tok:?}")))?;
            if entries.len() == n * n {
                return Err(Error::parse(line, "more table entries than n*n"));
            }
            entries.push(v);
        }
        if entries.len() != n * n {
            return Err(Error::parse(
                last_line,
                format!("expected {} table entries, found {}", n * n, entries.len()),
            ));
        }
        Self::from_table(n, &entries).map_err(|e| Error::parse(last_line, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for x in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|y| self.mul(x, y).to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// The same group with element `x` renamed `perm[x]`; `perm[0]` must be `0`.
    pub fn relabel(&self, perm: &[usize]) -> FiniteGroup {
        let n = self.n;
        let mut table = vec![0u16; n * n];
        for x in 0..n {
            for y in 0..n {
                table[perm[x] * n + perm[y]] = perm[self.mul(x, y)] as u16;
            }
        }
        let gens = self.gens.iter().map(|&g| perm[g]).collect();
        Self::from_parts(n, table, gens)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    /// `g⁻¹ x g`.
    pub fn conjugate(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn pow(&self, x: usize, e: u64) -> usize {
        let mut acc = 0;
        for _ in 0..e {
            acc = self.mul(acc, x);
        }
        acc
    }

    pub fn element_orders(&self) -> &[u32] {
        self.orders.get_or_init(|| {
            (0..self.n)
                .map(|x| {
                    let mut k = 1;
                    let mut y = x;
                    while y != 0 {
                        y = self.mul(y, x);
                        k += 1;
                    }
                    k
                })
                .collect()
        })
    }

    pub fn element_order(&self, x: usize) -> usize {
        self.element_orders()[x] as usize
    }

    pub fn everything(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.n);
        s.insert_range(..);
        s
    }

    pub fn trivial_subgroup(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.n);
        s.insert(0);
        s
    }

    pub fn is_abelian(&self) -> bool {
        self.gens
            .iter()
            .all(|&a| self.gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        self.element_orders().iter().any(|&o| o as usize == self.n)
    }

    /// The subgroup generated by `gens`.
    pub fn generate(&self, gens: &[usize]) -> FixedBitSet {
        self.generate_bounded(gens, self.n).expect("bounded by the group order")
    }

    /// The subgroup generated by `gens`, or `None` once it exceeds `limit` elements.
    pub fn generate_bounded(&self, gens: &[usize], limit: usize) -> Option<FixedBitSet> {
        let mut set = self.trivial_subgroup();
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !set.contains(y) {
                    set.insert(y);
                    count += 1;
                    if count > limit {
                        return None;
                    }
                    stack.push(y);
                }
            }
        }
        Some(set)
    }

    /// A small generating set of the subgroup `k`, chosen greedily by element order.
    pub fn generating_set(&self, k: &FixedBitSet) -> Vec<usize> {
        let orders = self.element_orders();
        let mut members: Vec<usize> = k.ones().filter(|&x| x != 0).collect();
        members.sort_by_key(|&x| (std::cmp::Reverse(orders[x]), x));
        let mut gens = Vec::new();
        let mut current = self.trivial_subgroup();
        let target = k.count_ones(..);
        for x in members {
            if current.count_ones(..) == target {
                break;
            }
            if !current.contains(x) {
                gens.push(x);
                current = self.generate(&gens);
            }
        }
        gens
    }

    /// Whether `s` is a subgroup.
    pub fn is_subgroup(&self, s: &FixedBitSet) -> bool {
        s.contains(0) && s.ones().all(|a| s.ones().all(|b| s.contains(self.mul(a, b))))
    }

    pub fn is_normal(&self, k: &FixedBitSet) -> bool {
        k.ones()
            .all(|x| self.gens.iter().all(|&g| k.contains(self.conjugate(x, g))))
    }

    pub fn conjugate_set(&self, s: &FixedBitSet, g: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.n);
        for x in s.ones() {
            out.insert(self.conjugate(x, g));
        }
        out
    }

    fn class_data(&self) -> &ConjugacyClasses {
        self.classes.get_or_init(|| {
            let mut class_of = vec![u32::MAX; self.n];
            let mut classes = Vec::new();
            for start in 0..self.n {
                if class_of[start] != u32::MAX {
                    continue;
                }
                let id = classes.len() as u32;
                class_of[start] = id;
                let mut members = vec![start];
                let mut cursor = 0;
                while cursor < members.len() {
                    let x = members[cursor];
                    cursor += 1;
                    for &g in &self.gens {
                        let y = self.conjugate(x, g);
                        if class_of[y] == u32::MAX {
                            class_of[y] = id;
                            members.push(y);
                        }
                    }
                }
                members.sort_unstable();
                classes.push(members);
            }
            ConjugacyClasses { classes, class_of }
        })
    }

    /// Conjugacy classes, each sorted, ordered by least member (so the identity class comes first).
    pub fn conjugacy_classes(&self) -> &[Vec<usize>] {
        &self.class_data().classes
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_data().class_of[x] as usize
    }

    /// Class ids met by the set `s`.
    pub fn classes_meeting(&self, s: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.conjugacy_classes().len());
        for x in s.ones() {
            out.insert(self.class_of(x));
        }
        out
    }

    /// The smallest normal subgroup containing `s`.
    pub fn normal_closure(&self, s: &FixedBitSet) -> FixedBitSet {
        let mut gens = Vec::new();
        let mut current = self.trivial_subgroup();
        for x in s.ones() {
            for &y in &self.conjugacy_classes()[self.class_of(x)] {
                if !current.contains(y) {
                    gens.push(y);
                    current = self.generate(&gens);
                }
            }
        }
        current
    }

    /// The minimal normal subgroups, sorted by order and then elements.
    pub fn minimal_normal_subgroups(&self) -> Vec<FixedBitSet> {
        let mut closures: Vec<FixedBitSet> = Vec::new();
        for class in self.conjugacy_classes().iter().skip(1) {
            let mut s = FixedBitSet::with_capacity(self.n);
            s.insert(class[0]);
            let c = self.normal_closure(&s);
            if !closures.contains(&c) {
                closures.push(c);
            }
        }
        let mut minimal: Vec<FixedBitSet> = closures
            .iter()
            .filter(|c| !closures.iter().any(|d| d != *c && d.is_subset(c)))
            .cloned()
            .collect();
        sort_sets(&mut minimal);
        minimal
    }

    /// `G/N` for a normal subgroup `N`; coset 0 is `N` itself.
    pub fn quotient(&self, normal: &FixedBitSet) -> Result<Quotient> {
        if !self.is_subgroup(normal) || !self.is_normal(normal) {
            return Err(Error::contract("quotient by a set that is not a normal subgroup"));
        }
        let mut coset_of = vec![usize::MAX; self.n];
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.n {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let id = cosets.len();
            let members: Vec<usize> = normal.ones().map(|m| self.mul(x, m)).collect();
            for &y in &members {
                coset_of[y] = id;
            }
            cosets.push(members);
        }
        let m = cosets.len();
        let mut table = vec![0u16; m * m];
        for a in 0..m {
            for b in 0..m {
                table[a * m + b] = coset_of[self.mul(cosets[a][0], cosets[b][0])] as u16;
            }
        }
        let mut gens: Vec<usize> = self.gens.iter().map(|&g| coset_of[g]).filter(|&c| c != 0).collect();
        gens.sort_unstable();
        gens.dedup();
        Ok(Quotient {
            group: Self::from_parts(m, table, gens),
            coset_of,
            cosets,
        })
    }

    /// The subgroup `k` as a group of its own, with the map back to this group.
    pub fn subgroup_as_group(&self, k: &FixedBitSet) -> (FiniteGroup, Vec<usize>) {
        let members: Vec<usize> = k.ones().collect();
        let mut local = vec![usize::MAX; self.n];
        for (i, &x) in members.iter().enumerate() {
            local[x] = i;
        }
        let m = members.len();
        let mut table = vec![0u16; m * m];
        for (a, &x) in members.iter().enumerate() {
            for (b, &y) in members.iter().enumerate() {
                table[a * m + b] = local[self.mul(x, y)] as u16;
            }
        }
        let gens = self.generating_set(k).into_iter().map(|x| local[x]).collect();
        (Self::from_parts(m, table, gens), members)
    }

    /// Every subgroup, as joins of cyclic subgroups.
    pub fn all_subgroups(&self, cap: usize) -> Result<SubgroupLattice> {
        if self.n > cap {
            return Err(Error::SizeOverflow {
                what: "subgroup lattice",
                cap,
            });
        }
        let mut cyclic_gens = Vec::new();
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        let mut subgroups: Vec<(FixedBitSet, Vec<usize>)> = Vec::new();
        for x in 0..self.n {
            let c = self.generate(&[x]);
            if seen.insert(c.clone()) {
                if x != 0 {
                    cyclic_gens.push(x);
                }
                subgroups.push((c, if x == 0 { vec![] } else { vec![x] }));
            }
        }
        let mut cursor = 0;
        while cursor < subgroups.len() {
            let (k, gens) = subgroups[cursor].clone();
            cursor += 1;
            for &x in &cyclic_gens {
                if k.contains(x) {
                    continue;
                }
                let mut joined = gens.clone();
                joined.push(x);
                let j = self.generate(&joined);
                if seen.insert(j.clone()) {
                    subgroups.push((j, joined));
                }
            }
        }
        let mut subgroups: Vec<FixedBitSet> = subgroups.into_iter().map(|(s, _)| s).collect();
        sort_sets(&mut subgroups);
        let position: HashMap<FixedBitSet, usize> =
            subgroups.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut class_of = vec![usize::MAX; subgroups.len()];
        let mut next = 0;
        for i in 0..subgroups.len() {
            if class_of[i] != usize::MAX {
                continue;
            }
            for s in self.subgroup_orbit(&subgroups[i]) {
                class_of[position[&s]] = next;
            }
            next += 1;
        }
        let n = self.n;
        let maximal = subgroups
            .iter()
            .map(|k| {
                let order = k.count_ones(..);
                order < n
                    && !subgroups.iter().any(|l| {
                        let lo = l.count_ones(..);
                        lo > order && lo < n && k.is_subset(l)
                    })
            })
            .collect();
        Ok(SubgroupLattice {
            subgroups,
            class_of,
            maximal,
        })
    }

    /// The conjugates of a subgroup.
    pub fn subgroup_orbit(&self, k: &FixedBitSet) -> Vec<FixedBitSet> {
        let mut orbit = vec![k.clone()];
        let mut seen: HashSet<FixedBitSet> = HashSet::from([k.clone()]);
        let mut cursor = 0;
        while cursor < orbit.len() {
            let s = orbit[cursor].clone();
            cursor += 1;
            for &g in &self.gens {
                let c = self.conjugate_set(&s, g);
                if seen.insert(c.clone()) {
                    orbit.push(c);
                }
            }
        }
        sort_sets(&mut orbit);
        orbit
    }

    /// Maximal subgroups, grouped into conjugacy classes.
    ///
    /// Recurses through an abelian minimal normal subgroup `N`: the maximal
    /// subgroups containing `N` come from `G/N`, and the others are exactly the
    /// complements of `N`. A non-abelian minimal normal subgroup falls back to
    /// the full lattice.
    pub fn maximal_subgroups(&self) -> Result<MaximalSubgroups> {
        let list = self.maximal_subgroup_list()?;
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        let mut classes = Vec::new();
        for m in &list {
            if seen.contains(m) {
                continue;
            }
            let orbit = self.subgroup_orbit(m);
            seen.extend(orbit.iter().cloned());
            classes.push(orbit);
        }
        classes.sort_by(|a, b| {
            let (oa, ob) = (a[0].count_ones(..), b[0].count_ones(..));
            ob.cmp(&oa)
                .then_with(|| a[0].ones().cmp(b[0].ones()))
        });
        Ok(MaximalSubgroups { classes })
    }

    fn maximal_subgroup_list(&self) -> Result<Vec<FixedBitSet>> {
        let n = self.n;
        if n == 1 {
            return Ok(Vec::new());
        }
        if let Some(g) = (0..n).find(|&x| self.element_order(x) == n) {
            return Ok(numth::prime_set(n as u64)
                .into_iter()
                .map(|r| self.generate(&[self.pow(g, r)]))
                .collect());
        }
        let minimal = self.minimal_normal_subgroups();
        let abelian = minimal.iter().find(|m| {
            let gens = self.generating_set(m);
            gens.iter().all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
        });
        let Some(normal) = abelian else {
            let lattice = self.all_subgroups(DEFAULT_LATTICE_CAP)?;
            return Ok(lattice
                .subgroups
                .into_iter()
                .zip(lattice.maximal)
                .filter_map(|(s, m)| m.then_some(s))
                .collect());
        };
        let quo = self.quotient(normal)?;
        let mut out: Vec<FixedBitSet> = quo
            .group
            .maximal_subgroup_list()?
            .into_iter()
            .map(|m| {
                let mut pre = FixedBitSet::with_capacity(n);
                for c in m.ones() {
                    for &x in &quo.cosets[c] {
                        pre.insert(x);
                    }
                }
                pre
            })
            .collect();
        out.extend(self.complements(normal, &quo));
        Ok(out)
    }

    /// All complements of the normal subgroup behind `quo`.
    fn complements(&self, normal: &FixedBitSet, quo: &Quotient) -> Vec<FixedBitSet> {
        let q = &quo.group;
        let q_gens = q.generating_set(&q.everything());
        let candidates: Vec<Vec<usize>> = q_gens
            .iter()
            .map(|&c| {
                let want = q.element_order(c);
                quo.cosets[c]
                    .iter()
                    .copied()
                    .filter(|&x| self.element_order(x) == want)
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        self.extend_complement(normal, q.order(), &candidates, &mut chosen, &mut out);
        out
    }

    fn extend_complement(
        &self,
        normal: &FixedBitSet,
        target: usize,
        candidates: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        out: &mut Vec<FixedBitSet>,
    ) {
        let level = chosen.len();
        if level == candidates.len() {
            let k = self.generate(chosen);
            if k.count_ones(..) == target {
                out.push(k);
            }
            return;
        }
        for &c in &candidates[level] {
            chosen.push(c);
            if let Some(k) = self.generate_bounded(chosen, target) {
                if k.intersection_count(normal) == 1 {
                    self.extend_complement(normal, target, candidates, chosen, out);
                }
            }
            chosen.pop();
        }
    }

    /// Nilpotency as "every maximal subgroup is normal".
    pub fn is_nilpotent(&self) -> Result<bool> {
        Ok(self.maximal_subgroups()?.all().all(|m| self.is_normal(m)))
    }

    /// Nilpotency as "every Sylow subgroup is normal", by counting elements of prime-power order.
    pub fn is_nilpotent_by_sylow(&self) -> bool {
        let n = self.n as u64;
        let orders = self.element_orders();
        numth::prime_set(n).into_iter().all(|r| {
            let part = r.pow(numth::valuation(r, n));
            let count = orders
                .iter()
                .filter(|&&o| numth::prime_set(o as u64).iter().all(|&s| s == r))
                .count() as u64;
            count == part
        })
    }

    /// Supersolvability as "every maximal subgroup has prime index".
    pub fn is_supersolvable(&self) -> Result<bool> {
        let n = self.n as u64;
        Ok(self
            .maximal_subgroups()?
            .representatives()
            .all(|m| numth::is_prime(n / m.count_ones(..) as u64)))
    }

    /// Supersolvability by searching for a chief series with cyclic factors.
    pub fn is_supersolvable_by_chief_series(&self) -> Result<bool> {
        if self.n == 1 {
            return Ok(true);
        }
        for m in self.minimal_normal_subgroups() {
            if numth::is_prime(m.count_ones(..) as u64) {
                return self.quotient(&m)?.group.is_supersolvable_by_chief_series();
            }
        }
        Ok(false)
    }

    /// The least number of maximal subgroups whose conjugates cover the group.
    pub fn normal_covering_number(&self, kmax: usize) -> Result<Gamma> {
        if kmax < 1 {
            return Err(Error::domain("kmax must be at least 1"));
        }
        if self.is_cyclic() {
            return Ok(Gamma::UndefinedCyclic);
        }
        let reps: Vec<FixedBitSet> = self.maximal_subgroups()?.representatives().cloned().collect();
        let sets: Vec<FixedBitSet> = reps.iter().map(|m| self.classes_meeting(m)).collect();
        let universe = self.conjugacy_classes().len();
        for k in 1..=kmax {
            let mut picked = Vec::new();
            let covered = FixedBitSet::with_capacity(universe);
            if cover_search(&sets, universe, covered, k, &mut picked) {
                return Ok(Gamma::Value {
                    value: k,
                    witnesses: picked.into_iter().map(|i| reps[i].clone()).collect(),
                });
            }
        }
        Ok(Gamma::Exceeds(kmax))
    }

    /// Whether some maximal subgroup meets every conjugacy class that `star` meets.
    pub fn covering_subgroup_test(&self, star: &FixedBitSet) -> Result<CoveringTest> {
        let closed = star
            .ones()
            .all(|x| self.gens.iter().all(|&g| star.contains(self.conjugate(x, g))));
        if !closed {
            return Err(Error::contract("the star set is not closed under conjugation"));
        }
        let needed = self.classes_meeting(star);
        for t in self.maximal_subgroups()?.representatives() {
            if needed.is_subset(&self.classes_meeting(t)) {
                return Ok(CoveringTest::Basic(t.clone()));
            }
        }
        Ok(CoveringTest::NonBasic)
    }

    /// For `J ⊴ H` with `H/J` abelian, acting on `V = F_p^m` through `rep`
    /// (indexed by element), compares `dim V` with the least dimension of a
    /// `J`-submodule spanned by one vector.
    pub fn module_dim_divisibility(
        &self,
        p: u32,
        rep: &[FpMatrix],
        j: &FixedBitSet,
    ) -> Result<DimRatio> {
        if rep.len() != self.n {
            return Err(Error::contract("the representation must list every element"));
        }
        if !self.is_subgroup(j) || !self.is_normal(j) {
            return Err(Error::contract("J is not a normal subgroup"));
        }
        let commutators_in_j = self.gens.iter().all(|&a| {
            self.gens.iter().all(|&b| {
                let c = self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b));
                j.contains(c)
            })
        });
        if !commutators_in_j {
            return Err(Error::contract("H/J is not abelian"));
        }
        let dim = rep[0].n;
        let total = (p as u64).checked_pow(dim as u32).filter(|&t| t <= 1 << 16);
        let Some(total) = total else {
            return Err(Error::SizeOverflow {
                what: "module vectors",
                cap: 1 << 16,
            });
        };
        let min_spin = |gens: &[usize]| -> usize {
            let maps: Vec<Box<dyn Fn(&[u32]) -> Vec<u32> + '_>> = gens
                .iter()
                .map(|&g| Box::new(move |v: &[u32]| rep[g].apply(v)) as Box<dyn Fn(&[u32]) -> Vec<u32>>)
                .collect();
            let refs: Vec<&dyn Fn(&[u32]) -> Vec<u32>> = maps.iter().map(|b| b.as_ref()).collect();
            let mut best = dim;
            for code in 1..total {
                let v = digits(code, p, dim);
                best = best.min(linalg::spin(p, &v, &refs).rank());
                if best == 1 {
                    break;
                }
            }
            best
        };
        if min_spin(&self.gens) != dim {
            return Err(Error::contract("V is not irreducible under H"));
        }
        let dim_w = min_spin(&self.generating_set(j));
        Ok(DimRatio {
            dim_v: dim,
            dim_w,
            index: self.n / j.count_ones(..),
        })
    }
}

fn digits(mut code: u64, p: u32, len: usize) -> Vec<u32> {
    let mut v = vec![0u32; len];
    for slot in v.iter_mut() {
        *slot = (code % p as u64) as u32;
        code /= p as u64;
    }
    v
}

fn sort_sets(sets: &mut [FixedBitSet]) {
    sets.sort_by(|a, b| {
        a.count_ones(..)
            .cmp(&b.count_ones(..))
            .then_with(|| a.ones().cmp(b.ones()))
    });
}

/// Exact search for `k` sets covering `universe`, branching on the least-covered element.
fn cover_search(
    sets: &[FixedBitSet],
    universe: usize,
    covered: FixedBitSet,
    k: usize,
    picked: &mut Vec<usize>,
) -> bool {
    if covered.count_ones(..) == universe {
        return true;
    }
    if k == 0 {
        return false;
    }
    let best = (0..universe)
        .filter(|&c| !covered.contains(c))
        .map(|c| (sets.iter().filter(|s| s.contains(c)).count(), c))
        .min();
    let Some((options, c)) = best else {
        return true;
    };
    if options == 0 {
        return false;
    }
    // Each remaining set adds at most this many elements.
    let widest = sets.iter().map(|s| s.difference_count(&covered)).max().unwrap_or(0);
    if widest * k < universe - covered.count_ones(..) {
        return false;
    }
    for (i, s) in sets.iter().enumerate() {
        if !s.contains(c) {
            continue;
        }
        let mut next = covered.clone();
        next.union_with(s);
        picked.push(i);
        if cover_search(sets, universe, next, k - 1, picked) {
            return true;
        }
        picked.pop();
    }
    false
}

/// Composition of permutations as `x ↦ b[a[x]]`: first `a`, then `b`.
pub fn compose_perms(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().map(|&x| b[x as usize]).collect()
}

/// Small reference groups.
pub mod small {
    use super::{compose_perms, FiniteGroup};

    pub fn sym(k: u32) -> FiniteGroup {
        let id: Vec<u32> = (0..k).collect();
        let mut t = id.clone();
        t.swap(0, 1);
        let c: Vec<u32> = (0..k).map(|x| (x + 1) % k).collect();
        FiniteGroup::generate_from(&[t, c], id, |a, b| compose_perms(a, b), 10_000).expect("within the cap")
    }

    pub fn alt4() -> FiniteGroup {
        let id: Vec<u32> = (0..4).collect();
        FiniteGroup::generate_from(
            &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]],
            id,
            |a, b| compose_perms(a, b),
            100,
        )
        .expect("within the cap")
    }

    pub fn dihedral(m: u32) -> FiniteGroup {
        let id: Vec<u32> = (0..m).collect();
        let r: Vec<u32> = (0..m).map(|x| (x + 1) % m).collect();
        let s: Vec<u32> = (0..m).map(|x| (m - x) % m).collect();
        FiniteGroup::generate_from(&[r, s], id, |a, b| compose_perms(a, b), 1000).expect("within the cap")
    }

    /// `Q₈` as (sign, unit) pairs with units 1, i, j, k.
    pub fn quaternion() -> FiniteGroup {
        fn mul(a: &(i8, u8), b: &(i8, u8)) -> (i8, u8) {
            // Table of unit products: (sign, unit).
            const T: [[(i8, u8); 4]; 4] = [
                [(1, 0), (1, 1), (1, 2), (1, 3)],
                [(1, 1), (-1, 0), (1, 3), (-1, 2)],
                [(1, 2), (-1, 3), (-1, 0), (1, 1)],
                [(1, 3), (1, 2), (-1, 1), (-1, 0)],
            ];
            let (s, u) = T[a.1 as usize][b.1 as usize];
            (a.0 * b.0 * s, u)
        }
        FiniteGroup::generate_from(&[(1, 1), (1, 2)], (1, 0), mul, 100).expect("within the cap")
    }

    pub fn cyclic(m: u32) -> FiniteGroup {
        FiniteGroup::generate_from(&[1u32], 0, |a, b| (a + b) % m, 1000).expect("within the cap")
    }

    pub fn elementary_abelian(p: u32, rank: usize) -> FiniteGroup {
        let gens: Vec<Vec<u32>> = (0..rank)
            .map(|i| (0..rank).map(|k| (k == i) as u32).collect())
            .collect();
        FiniteGroup::generate_from(
            &gens,
            vec![0; rank],
            |a, b| a.iter().zip(b).map(|(x, y)| (x + y) % p).collect(),
            10_000,
        )
        .expect("within the cap")
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Symmetric group on `k` points from a transposition and a `k`-cycle.
    pub(crate) use super::small::{alt4, cyclic, dihedral, elementary_abelian, quaternion as q8, sym};

    fn class_sizes(g: &FiniteGroup) -> Vec<usize> {
        let mut s: Vec<usize> = g.conjugacy_classes().iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    }

    #[test]
    fn closure_basics() {
        let c = closure::<u32, _>(&[], 0, |a, b| a + b, 10).unwrap();
        assert_eq!(c.order(), 1);
        let c = closure(&[2u32], 0, |a, b| (a + b) % 10, 10).unwrap();
        assert_eq!(c.order(), 5);
        assert_eq!(c.elements(), &[0, 2, 4, 6, 8]);
        assert_eq!(c.word(3), vec![0, 0, 0]);
        let err = closure(&[1u32], 0, |a, b| (a + b) % 10, 5).unwrap_err();
        assert_eq!(err, Error::SizeOverflow { what: "group closure", cap: 5 });
    }

    #[test]
    fn tables_from_closures_are_groups() {
        for g in [sym(3), sym(4), q8(), dihedral(4), alt4()] {
            let entries: Vec<usize> = g.table.iter().map(|&e| e as usize).collect();
            let checked = FiniteGroup::from_table(g.order(), &entries).unwrap();
            assert_eq!(checked.order(), g.order());
            for x in 0..g.order() {
                assert_eq!(g.mul(x, g.inv(x)), 0);
            }
        }
    }

    #[test]
    fn conjugacy_classes_of_calibration_groups() {
        assert_eq!(class_sizes(&sym(3)), vec![1, 2, 3]);
        assert_eq!(class_sizes(&q8()), vec![1, 1, 2, 2, 2]);
        assert_eq!(class_sizes(&alt4()), vec![1, 3, 4, 4]);
        assert_eq!(class_sizes(&sym(4)), vec![1, 3, 6, 6, 8]);
        assert_eq!(class_sizes(&cyclic(6)), vec![1; 6]);
        assert_eq!(sym(3).conjugacy_classes()[0], vec![0]);
    }

    #[test]
    fn classes_are_conjugation_orbits() {
        let g = sym(4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let x = rng.gen_range(0..g.order());
            let h = rng.gen_range(0..g.order());
            assert_eq!(g.class_of(x), g.class_of(g.conjugate(x, h)));
        }
        let total: usize = g.conjugacy_classes().iter().map(Vec::len).sum();
        assert_eq!(total, 24);
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(sym(3).all_subgroups(100).unwrap().len(), 6);
        assert_eq!(q8().all_subgroups(100).unwrap().len(), 6);
        assert_eq!(sym(4).all_subgroups(100).unwrap().len(), 30);
        assert_eq!(alt4().all_subgroups(100).unwrap().len(), 10);
        assert_eq!(dihedral(4).all_subgroups(100).unwrap().len(), 10);
        for p in [2, 3, 5, 7] {
            assert_eq!(elementary_abelian(p, 2).all_subgroups(100).unwrap().len() as u32, p + 3);
        }
        assert_eq!(elementary_abelian(2, 4).all_subgroups(100).unwrap().len(), 67);
        assert!(matches!(
            sym(4).all_subgroups(10),
            Err(Error::SizeOverflow { .. })
        ));
    }

    #[test]
    fn lattice_structure() {
        let g = sym(3);
        let lat = g.all_subgroups(100).unwrap();
        assert_eq!(lat.subgroups[0].count_ones(..), 1);
        assert_eq!(lat.subgroups[5].count_ones(..), 6);
        assert_eq!(lat.class_count(), 4);
        assert_eq!(lat.maximal.iter().filter(|&&m| m).count(), 4);
        for i in 0..lat.len() {
            assert!(g.is_subgroup(&lat.subgroups[i]));
            assert!(lat.contains(i, 0));
            assert!(lat.contains(5, i));
        }
    }

    #[test]
    fn maximal_subgroups_match_the_lattice() {
        let mut groups = vec![
            sym(3),
            sym(4),
            q8(),
            dihedral(4),
            dihedral(6),
            alt4(),
            cyclic(12),
            elementary_abelian(2, 3),
            elementary_abelian(3, 2),
        ];
        groups.push(sym(5));
        for g in &groups {
            let lat = g.all_subgroups(200).unwrap();
            let mut expected: Vec<FixedBitSet> = lat
                .subgroups
                .iter()
                .zip(&lat.maximal)
                .filter_map(|(s, &m)| m.then(|| s.clone()))
                .collect();
            let maxes = g.maximal_subgroups().unwrap();
            let mut got: Vec<FixedBitSet> = maxes.all().cloned().collect();
            sort_sets(&mut expected);
            sort_sets(&mut got);
            assert_eq!(got, expected, "order {}", g.order());
            let classes: HashSet<usize> = maxes
                .representatives()
                .map(|r| lat.class_of[lat.subgroups.iter().position(|s| s == r).unwrap()])
                .collect();
            assert_eq!(classes.len(), maxes.classes.len());
        }
    }

    #[test]
    fn maximal_subgroup_examples() {
        let m = sym(3).maximal_subgroups().unwrap();
        assert_eq!(m.count(), 4);
        assert_eq!(m.classes.len(), 2);
        let m = dihedral(4).maximal_subgroups().unwrap();
        assert_eq!(m.count(), 3);
        assert!(m.all().all(|s| s.count_ones(..) == 4));
        assert_eq!(cyclic(27).maximal_subgroups().unwrap().count(), 1);
        assert_eq!(cyclic(1).maximal_subgroups().unwrap().count(), 0);
    }

    #[test]
    fn nilpotency_and_supersolvability() {
        for (g, nil, sup) in [
            (q8(), true, true),
            (sym(3), false, true),
            (alt4(), false, false),
            (sym(4), false, false),
            (dihedral(4), true, true),
            (dihedral(6), false, true),
            (cyclic(6), true, true),
            (cyclic(1), true, true),
        ] {
            assert_eq!(g.is_nilpotent().unwrap(), nil, "order {}", g.order());
            assert_eq!(g.is_nilpotent_by_sylow(), nil);
            assert_eq!(g.is_supersolvable().unwrap(), sup, "order {}", g.order());
            assert_eq!(g.is_supersolvable_by_chief_series().unwrap(), sup);
        }
    }

    #[test]
    fn normal_covering_numbers() {
        let g = sym(3);
        match g.normal_covering_number(5).unwrap() {
            Gamma::Value { value, witnesses } => {
                assert_eq!(value, 2);
                let mut orders: Vec<usize> = witnesses.iter().map(|w| w.count_ones(..)).collect();
                orders.sort_unstable();
                assert_eq!(orders, vec![2, 3]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(q8().normal_covering_number(5).unwrap().value(), Some(3));
        assert_eq!(cyclic(6).normal_covering_number(5).unwrap(), Gamma::UndefinedCyclic);
        assert_eq!(elementary_abelian(2, 2).normal_covering_number(5).unwrap().value(), Some(3));
        assert_eq!(elementary_abelian(3, 2).normal_covering_number(2).unwrap(), Gamma::Exceeds(2));
        assert_eq!(alt4().normal_covering_number(5).unwrap().value(), Some(2));
        assert_eq!(sym(4).normal_covering_number(5).unwrap().value(), Some(2));
        assert!(sym(3).normal_covering_number(0).is_err());
    }

    #[test]
    fn covering_number_is_label_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in [sym(4), q8(), dihedral(6), alt4()] {
            let expected = g.normal_covering_number(6).unwrap().value();
            for _ in 0..5 {
                let mut perm: Vec<usize> = (1..g.order()).collect();
                for i in (1..perm.len()).rev() {
                    perm.swap(i, rng.gen_range(0..=i));
                }
                perm.insert(0, 0);
                let h = g.relabel(&perm);
                assert_eq!(h.normal_covering_number(6).unwrap().value(), expected);
            }
        }
    }

    #[test]
    fn minimal_normal_subgroups() {
        let g = sym(4);
        let m = g.minimal_normal_subgroups();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].count_ones(..), 4);
        assert_eq!(q8().minimal_normal_subgroups().len(), 1);
        assert_eq!(elementary_abelian(2, 2).minimal_normal_subgroups().len(), 3);
        assert_eq!(sym(5).minimal_normal_subgroups()[0].count_ones(..), 60);
    }

    #[test]
    fn quotients() {
        let g = sym(4);
        let v4 = g.minimal_normal_subgroups().remove(0);
        let q = g.quotient(&v4).unwrap();
        assert_eq!(q.group.order(), 6);
        assert!(!q.group.is_abelian());
        assert!(g.quotient(&g.generate(&[1])).is_err());
    }

    #[test]
    fn covering_test() {
        let g = sym(3);
        assert!(matches!(
            g.covering_subgroup_test(&g.trivial_subgroup()).unwrap(),
            CoveringTest::Basic(_)
        ));
        let mut bad = g.trivial_subgroup();
        bad.insert(g.generators()[0]);
        let order_two = (0..6).find(|&x| g.element_order(x) == 2).unwrap();
        let mut single = g.trivial_subgroup();
        single.insert(order_two);
        assert!(g.covering_subgroup_test(&single).is_err());
        // Q8: every non-central class lies in a different maximal subgroup.
        let q = q8();
        let everything = q.everything();
        assert_eq!(q.covering_subgroup_test(&everything).unwrap(), CoveringTest::NonBasic);
    }

    #[test]
    fn covering_test_is_stable_under_class_saturation() {
        let g = sym(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let mut s = g.trivial_subgroup();
            for _ in 0..3 {
                s.insert(rng.gen_range(0..24));
            }
            let mut saturated = FixedBitSet::with_capacity(24);
            for x in s.ones() {
                for &y in &g.conjugacy_classes()[g.class_of(x)] {
                    saturated.insert(y);
                }
            }
            let twice = saturated.clone();
            let mut again = FixedBitSet::with_capacity(24);
            for x in twice.ones() {
                for &y in &g.conjugacy_classes()[g.class_of(x)] {
                    again.insert(y);
                }
            }
            assert_eq!(
                g.covering_subgroup_test(&saturated).unwrap(),
                g.covering_subgroup_test(&again).unwrap()
            );
        }
    }

    #[test]
    fn text_round_trip() {
        let g = sym(3);
        let text = g.to_text();
        let h = FiniteGroup::from_text(&text).unwrap();
        assert_eq!(h.to_text(), text);
        assert_eq!(h.normal_covering_number(4).unwrap().value(), Some(2));
        let commented = format!("# S3\n{}", text.replacen('\n', " # order\n", 1));
        assert!(FiniteGroup::from_text(&commented).is_ok());
    }

    #[test]
    fn text_rejects_malformed_tables() {
        assert!(FiniteGroup::from_text("").is_err());
        assert!(FiniteGroup::from_text("0").is_err());
        assert!(FiniteGroup::from_text("2\n0 1\n1").is_err());
        assert!(FiniteGroup::from_text("2\n0 1\n1 0 1").is_err());
        assert!(FiniteGroup::from_text("2\n0 1\n1 1").is_err());
        assert!(FiniteGroup::from_text("2\n1 0\n0 1").is_err());
        assert!(FiniteGroup::from_text("2\n0 1\n1 x").is_err());
        // A Latin square with identity that is not associative.
        let loop5 = "5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0";
        assert!(FiniteGroup::from_text(loop5).is_err());
        assert!(FiniteGroup::from_text("99999999999").is_err());
    }

    #[test]
    fn module_dimension_ratio() {
        // C3 acting on F_2^2 through the companion matrix of x^2 + x + 1.
        let g = cyclic(3);
        let a = FpMatrix { p: 2, n: 2, data: vec![0, 1, 1, 1] };
        let mut rep = vec![FpMatrix::identity(2, 2); 3];
        // The closure lists 0, 1, 2 as powers of the generator.
        rep[1] = a.clone();
        rep[2] = a.mul(&a);
        let r = g.module_dim_divisibility(2, &rep, &g.everything()).unwrap();
        assert_eq!((r.dim_v, r.dim_w, r.index), (2, 2, 1));
        let r = g.module_dim_divisibility(2, &rep, &g.trivial_subgroup()).unwrap();
        assert_eq!((r.dim_v, r.dim_w, r.index), (2, 1, 3));
        assert!(!r.holds());
        let trivial_rep = vec![FpMatrix::identity(2, 2); 3];
        assert!(g.module_dim_divisibility(2, &trivial_rep, &g.everything()).is_err());
    }
}
