use num_bigint::BigUint;

use crate::zm::{ext_gcd, gcd, mulmod, submod, unit_normalizer, ZmMatrix};

/// Howell normal form of a row span over Z/m.
///
/// Rows have strictly increasing pivot columns, each pivot is a divisor of m,
/// entries above a pivot are reduced into `[0, pivot)`, and every span vector
/// whose first j entries vanish lies in the span of the rows with pivot >= j.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HowellForm {
    m: u64,
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

fn axpy(dst: &mut [u64], a: u64, src: &[u64], m: u64) {
    if a == 0 {
        return;
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = ((*d as u128 + a as u128 * s as u128) % m as u128) as u64;
    }
}

fn scale(v: &mut [u64], a: u64, m: u64) {
    for x in v.iter_mut() {
        *x = mulmod(*x, a, m);
    }
}

/// Replace (x, y) by (s x + t y, (b/g) x - (a/g) y) where a = x[j], b = y[j].
/// The transform has determinant -1, and afterwards y[j] = 0.
fn gcd_combine(x: &mut [u64], y: &mut [u64], j: usize, m: u64) {
    let a = x[j] as i128;
    let b = y[j] as i128;
    let (g, s, t) = ext_gcd(a, b);
    let mi = m as i128;
    let s = s.rem_euclid(mi) as u64;
    let t = t.rem_euclid(mi) as u64;
    let bg = ((b / g).rem_euclid(mi)) as u64;
    let ag = ((-(a / g)).rem_euclid(mi)) as u64;
    for k in 0..x.len() {
        let xv = x[k] as u128;
        let yv = y[k] as u128;
        let nx = (s as u128 * xv + t as u128 * yv) % m as u128;
        let ny = (bg as u128 * xv + ag as u128 * yv) % m as u128;
        x[k] = nx as u64;
        y[k] = ny as u64;
    }
    debug_assert_eq!(y[j], 0);
}

pub fn howell_rows(m: u64, cols: usize, input: Vec<Vec<u64>>) -> HowellForm {
    let mut pool: Vec<Vec<u64>> = input
        .into_iter()
        .map(|mut r| {
            r.iter_mut().for_each(|x| *x %= m);
            r
        })
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut pivots = Vec::new();
    for j in 0..cols {
        let idx: Vec<usize> = (0..pool.len()).filter(|&i| pool[i][j] != 0).collect();
        if idx.is_empty() {
            continue;
        }
        let mut acc = pool[idx[0]].clone();
        for &i in &idx[1..] {
            let mut other = std::mem::take(&mut pool[i]);
            gcd_combine(&mut acc, &mut other, j, m);
            pool[i] = other;
        }
        let mut keep = Vec::with_capacity(pool.len());
        for (i, r) in pool.into_iter().enumerate() {
            if i != idx[0] && r.iter().any(|&x| x != 0) {
                keep.push(r);
            }
        }
        pool = keep;
        let u = unit_normalizer(acc[j], m);
        scale(&mut acc, u, m);
        let d = acc[j];
        debug_assert_eq!(d, gcd(d, m));
        if d != 1 {
            let mut extra = acc.clone();
            scale(&mut extra, m / d, m);
            if extra.iter().any(|&x| x != 0) {
                pool.push(extra);
            }
        }
        rows.push(acc);
        pivots.push(j);
    }
    for i in 0..rows.len() {
        let (j, d) = (pivots[i], rows[i][pivots[i]]);
        for k in 0..i {
            let q = rows[k][j] / d;
            if q != 0 {
                let src = rows[i].clone();
                axpy(&mut rows[k], m - (q % m), &src, m);
            }
        }
    }
    HowellForm { m, cols, rows, pivots }
}

pub fn howell(a: &ZmMatrix) -> HowellForm {
    howell_rows(a.modulus(), a.ncols(), a.rows_vec())
}

impl HowellForm {
    pub fn zero(m: u64, cols: usize) -> Self {
        HowellForm { m, cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rank_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_matrix(&self) -> ZmMatrix {
        ZmMatrix::from_rows(self.m, self.cols, &self.rows)
    }

    /// Canonical representative of v modulo the span.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut v: Vec<u64> = v.iter().map(|&x| x % self.m).collect();
        self.reduce_in_place(&mut v);
        v
    }

    pub fn reduce_in_place(&self, v: &mut [u64]) {
        assert_eq!(v.len(), self.cols);
        for (r, &j) in self.rows.iter().zip(&self.pivots) {
            let d = r[j];
            let q = v[j] / d;
            if q != 0 {
                axpy(v, self.m - q, r, self.m);
            }
        }
    }

    /// Reduce and also return the coefficients used: v = reduced + Σ c_i row_i.
    pub fn reduce_with_coeffs(&self, v: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let mut v: Vec<u64> = v.iter().map(|&x| x % self.m).collect();
        let mut c = vec![0; self.rows.len()];
        for (i, (r, &j)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let d = r[j];
            let q = v[j] / d;
            if q != 0 {
                axpy(&mut v, self.m - q, r, self.m);
                c[i] = q % self.m;
            }
        }
        (v, c)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn contains_all(&self, other: &HowellForm) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Number of elements in the span: ∏ m / pivot.
    pub fn span_size(&self) -> BigUint {
        let mut s = BigUint::from(1u32);
        for (r, &j) in self.rows.iter().zip(&self.pivots) {
            s *= BigUint::from(self.m / r[j]);
        }
        s
    }

    /// log_p of the span size when m is a power of p.
    pub fn span_log(&self, p: u64) -> u32 {
        let mut e = 0;
        for (r, &j) in self.rows.iter().zip(&self.pivots) {
            let mut q = self.m / r[j];
            while q > 1 {
                assert_eq!(q % p, 0, "modulus is not a power of p");
                q /= p;
                e += 1;
            }
        }
        e
    }

    /// Howell form of the sum of two spans.
    pub fn join(&self, other: &HowellForm) -> HowellForm {
        assert_eq!(self.cols, other.cols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        howell_rows(self.m, self.cols, rows)
    }

    pub fn with_rows(&self, extra: &[Vec<u64>]) -> HowellForm {
        let mut rows = self.rows.clone();
        rows.extend(extra.iter().cloned());
        howell_rows(self.m, self.cols, rows)
    }
}

/// Solve x·A = b. Returns None when b is outside the row span; otherwise the
/// solution is canonical modulo the kernel.
pub fn solve(a: &ZmMatrix, b: &[u64]) -> Option<Vec<u64>> {
    Solver::new(a).solve(b)
}

/// Solver with the augmented Howell form cached, for many right-hand sides.
#[derive(Clone, Debug)]
pub struct Solver {
    m: u64,
    n: usize,
    c: usize,
    h: HowellForm,
    ker: HowellForm,
}

impl Solver {
    pub fn new(a: &ZmMatrix) -> Self {
        let m = a.modulus();
        let aug = a.hstack(&ZmMatrix::identity(m, a.nrows()));
        let h = howell(&aug);
        let ker = howell_rows(m, a.nrows(), kernel_from_aug(&h, a.ncols()));
        Solver { m, n: a.nrows(), c: a.ncols(), h, ker }
    }

    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let mut v = vec![0u64; self.c + self.n];
        for (k, &x) in b.iter().enumerate() {
            v[k] = x % self.m;
        }
        self.h.reduce_in_place(&mut v);
        if v[..self.c].iter().any(|&x| x != 0) {
            return None;
        }
        let x: Vec<u64> = v[self.c..].iter().map(|&z| submod(0, z, self.m)).collect();
        Some(self.ker.reduce(&x))
    }

    pub fn kernel(&self) -> &HowellForm {
        &self.ker
    }
}

fn kernel_from_aug(h: &HowellForm, c: usize) -> Vec<Vec<u64>> {
    h.rows()
        .iter()
        .zip(h.pivots())
        .filter(|(_, &j)| j >= c)
        .map(|(r, _)| r[c..].to_vec())
        .collect()
}

/// Rows generating {x : xA = 0}, in Howell form.
pub fn kernel(a: &ZmMatrix) -> ZmMatrix {
    let m = a.modulus();
    let n = a.nrows();
    let aug = a.hstack(&ZmMatrix::identity(m, n));
    let h = howell(&aug);
    let rows = kernel_from_aug(&h, a.ncols());
    ZmMatrix::from_rows(m, n, &rows)
}

pub fn kernel_howell(a: &ZmMatrix) -> HowellForm {
    let k = kernel(a);
    howell(&k)
}
