use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl ZMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ZMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a.data[i * n + i] = BigInt::one();
        }
        a
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut a = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, &x) in r.iter().enumerate() {
                a.data[i * cols + j] = BigInt::from(x);
            }
        }
        a
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let mut a = Self::zeros(rows.len(), cols);
        for (i, r) in rows.into_iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, x) in r.into_iter().enumerate() {
                a.data[i * cols + j] = x;
            }
        }
        a
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ZMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * c;
            self.data[dst * self.cols + j] += v;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * c;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn neg_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    /// Replace rows (a, b) by a unimodular combination that puts gcd in row a at column j.
    fn row_gcd(&mut self, a: usize, b: usize, j: usize) {
        let x = self.get(a, j).clone();
        let y = self.get(b, j).clone();
        let eg = x.extended_gcd(&y);
        let (g, s, t) = (eg.gcd, eg.x, eg.y);
        let xg = &x / &g;
        let yg = &y / &g;
        for k in 0..self.cols {
            let u = self.get(a, k).clone();
            let v = self.get(b, k).clone();
            self.data[a * self.cols + k] = &s * &u + &t * &v;
            self.data[b * self.cols + k] = &yg * &u - &xg * &v;
        }
    }
}

/// Row-style Hermite normal form: H = U·A with U unimodular, rows of H in echelon
/// form with positive pivots and entries above each pivot reduced into [0, pivot).
#[derive(Clone, Debug)]
pub struct HnfData {
    pub h: ZMatrix,
    pub u: ZMatrix,
    pub pivots: Vec<usize>,
}

pub fn hnf(a: &ZMatrix) -> HnfData {
    let mut h = a.clone();
    let mut u = ZMatrix::identity(a.rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..a.cols {
        if r == h.rows {
            break;
        }
        let nz: Vec<usize> = (r..h.rows).filter(|&i| !h.get(i, j).is_zero()).collect();
        if nz.is_empty() {
            continue;
        }
        h.swap_rows(r, nz[0]);
        u.swap_rows(r, nz[0]);
        for i in r + 1..h.rows {
            if h.get(i, j).is_zero() {
                continue;
            }
            let x = h.get(r, j).clone();
            let y = h.get(i, j).clone();
            let eg = x.extended_gcd(&y);
            h.row_gcd(r, i, j);
            // Mirror the same 2x2 transform on U.
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let (xg, yg) = (&x / &g, &y / &g);
            for k in 0..u.cols {
                let p = u.get(r, k).clone();
                let q = u.get(i, k).clone();
                u.data[r * u.cols + k] = &s * &p + &t * &q;
                u.data[i * u.cols + k] = &yg * &p - &xg * &q;
            }
        }
        if h.get(r, j).is_negative() {
            h.neg_row(r);
            u.neg_row(r);
        }
        let p = h.get(r, j).clone();
        for i in 0..r {
            let q = h.get(i, j).div_floor(&p);
            if !q.is_zero() {
                let c = -q;
                h.add_row(i, r, &c);
                u.add_row(i, r, &c);
            }
        }
        pivots.push(j);
        r += 1;
    }
    HnfData { h, u, pivots }
}

/// Smith normal form data: U·A·V = D.
#[derive(Clone, Debug)]
pub struct SnfData {
    pub u: ZMatrix,
    pub v: ZMatrix,
    pub d: ZMatrix,
}

impl SnfData {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }
}

pub fn snf(a: &ZMatrix) -> SnfData {
    let (n, m) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = ZMatrix::identity(n);
    let mut v = ZMatrix::identity(m);
    let mut t = 0;
    while t < n.min(m) {
        // Pick the nonzero entry of least absolute value in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..n {
            for j in t..m {
                let x = d.get(i, j);
                if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        d.swap_rows(t, bi);
        u.swap_rows(t, bi);
        d.swap_cols(t, bj);
        v.swap_cols(t, bj);
        loop {
            let mut changed = false;
            for i in t + 1..n {
                if !d.get(i, t).is_zero() {
                    let q = d.get(i, t).div_floor(d.get(t, t));
                    let c = -q;
                    d.add_row(i, t, &c);
                    u.add_row(i, t, &c);
                    if !d.get(i, t).is_zero() {
                        d.swap_rows(t, i);
                        u.swap_rows(t, i);
                        changed = true;
                    }
                }
            }
            for j in t + 1..m {
                if !d.get(t, j).is_zero() {
                    let q = d.get(t, j).div_floor(d.get(t, t));
                    let c = -q;
                    d.add_col(j, t, &c);
                    v.add_col(j, t, &c);
                    if !d.get(t, j).is_zero() {
                        d.swap_cols(t, j);
                        v.swap_cols(t, j);
                        changed = true;
                    }
                }
            }
            if changed {
                continue;
            }
            // Divisibility: fold any entry not divisible by the pivot into row t.
            let p = d.get(t, t).clone();
            let mut bad = None;
            'outer: for i in t + 1..n {
                for j in t + 1..m {
                    if !d.get(i, j).is_multiple_of(&p) {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.neg_row(t);
            u.neg_row(t);
        }
        t += 1;
    }
    SnfData { u, v, d }
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(a: &ZMatrix) -> BigInt {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m.get(k, k).is_zero() {
            let Some(i) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                return BigInt::zero();
            };
            m.swap_rows(k, i);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                m.set(i, j, v);
            }
        }
        prev = m.get(k, k).clone();
    }
    sign * m.get(n - 1, n - 1)
}
