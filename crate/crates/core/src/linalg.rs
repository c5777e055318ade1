//! Dense linear algebra over a prime field F_p, entries in `0..p`.

/// A row-reduced basis that absorbs vectors one at a time.
#[derive(Debug, Clone)]
pub struct Echelon {
    p: u32,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(p: u32, dim: usize) -> Self {
        Echelon {
            p,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    /// Reduces `v` in place against the basis; returns the pivot of the remainder.
    fn reduce(&self, v: &mut [u32]) -> Option<usize> {
        let p = self.p as u64;
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                let c = c as u64;
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = ((*x as u64 + (p - c) * r as u64) % p) as u32;
                }
            }
        }
        v.iter().position(|&x| x != 0)
    }

    /// Adds `v` to the span; returns `true` if it was independent.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        let Some(piv) = self.reduce(&mut w) else {
            return false;
        };
        let inv = inv_mod(w[piv], self.p) as u64;
        let p = self.p as u64;
        for x in w.iter_mut() {
            *x = ((*x as u64 * inv) % p) as u32;
        }
        // Keep the basis fully reduced so `reduce` is a single pass.
        for row in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                let c = c as u64;
                for (x, &r) in row.iter_mut().zip(&w) {
                    *x = ((*x as u64 + (p - c) * r as u64) % p) as u32;
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(piv);
        true
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w).is_none()
    }
}

pub fn inv_mod(a: u32, p: u32) -> u32 {
    crate::numth::pow_mod(a as u64, p as u64 - 2, p as u64) as u32
}

/// Row-major square matrix over F_p acting on row vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    pub p: u32,
    pub n: usize,
    pub data: Vec<u32>,
}

impl FpMatrix {
    pub fn identity(p: u32, n: usize) -> Self {
        let mut data = vec![0; n * n];
        for k in 0..n {
            data[k * n + k] = 1;
        }
        FpMatrix { p, n, data }
    }

    pub fn row(&self, k: usize) -> &[u32] {
        &self.data[k * self.n..(k + 1) * self.n]
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        let n = self.n;
        let p = self.p as u64;
        let mut data = vec![0u32; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k] as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    data[idx] = ((data[idx] as u64 + a * other.data[k * n + j] as u64) % p) as u32;
                }
            }
        }
        FpMatrix { p: self.p, n, data }
    }

    /// `v · self`.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let n = self.n;
        let p = self.p as u64;
        let mut out = vec![0u64; n];
        for (k, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += c as u64 * self.data[k * n + j] as u64;
            }
        }
        out.into_iter().map(|x| (x % p) as u32).collect()
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.p, self.n);
        for k in 0..self.n {
            e.insert(self.row(k));
        }
        e.rank()
    }

    /// The inverse, or `None` when singular.
    pub fn inverse(&self) -> Option<FpMatrix> {
        let n = self.n;
        let p = self.p as u64;
        let w = 2 * n;
        let mut a = vec![0u32; n * w];
        for i in 0..n {
            a[i * w..i * w + n].copy_from_slice(self.row(i));
            a[i * w + n + i] = 1;
        }
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r * w + col] != 0)?;
            for k in 0..w {
                a.swap(col * w + k, pivot * w + k);
            }
            let inv = inv_mod(a[col * w + col], self.p) as u64;
            for k in 0..w {
                a[col * w + k] = (a[col * w + k] as u64 * inv % p) as u32;
            }
            for r in 0..n {
                let factor = a[r * w + col] as u64;
                if r == col || factor == 0 {
                    continue;
                }
                for k in 0..w {
                    let sub = factor * a[col * w + k] as u64 % p;
                    a[r * w + k] = ((a[r * w + k] as u64 + p - sub) % p) as u32;
                }
            }
        }
        let data = (0..n).flat_map(|i| a[i * w + n..(i + 1) * w].to_vec()).collect();
        Some(FpMatrix { p: self.p, n, data })
    }

    /// Dimension of `{v : v·self = v}`.
    pub fn fixed_dim(&self) -> usize {
        let mut m = self.clone();
        for k in 0..self.n {
            let idx = k * self.n + k;
            m.data[idx] = (m.data[idx] + self.p - 1) % self.p;
        }
        self.n - m.rank()
    }
}

/// Dimension of the smallest subspace containing `start` and closed under `maps`.
pub fn spin(p: u32, start: &[u32], maps: &[&dyn Fn(&[u32]) -> Vec<u32>]) -> Echelon {
    let mut e = Echelon::new(p, start.len());
    let mut queue = vec![start.to_vec()];
    if !e.insert(start) {
        return e;
    }
    while let Some(v) = queue.pop() {
        for map in maps {
            let w = map(&v);
            if e.insert(&w) {
                if e.is_full() {
                    return e;
                }
                queue.push(w);
            }
        }
    }
    e
}
