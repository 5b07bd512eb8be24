use std::fmt;

/// Dense matrix over Z/m with entries kept in `[0, m)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZmMatrix {
    m: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn submod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

#[inline]
pub fn negmod(a: u64, m: u64) -> u64 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Returns (g, s, t) with s*a + t*b = g = gcd(a, b).
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        (g, t, s - a.div_euclid(b) * t)
    }
}

/// Inverse of a unit modulo m.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, s, _) = ext_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(s.rem_euclid(m as i128) as u64)
}

/// A unit u with u*a ≡ gcd(a, m) (mod m).
pub fn unit_normalizer(a: u64, m: u64) -> u64 {
    let a = a % m;
    if a == 0 {
        return 1;
    }
    let g = gcd(a, m);
    let (ap, mp) = (a / g, m / g);
    let mut c = 0u64;
    loop {
        let w = (ap + c * mp) % m;
        if gcd(w, m) == 1 {
            return inv_mod(w, m).unwrap();
        }
        c += 1;
    }
}

impl ZmMatrix {
    pub fn zeros(m: u64, rows: usize, cols: usize) -> Self {
        assert!(m >= 2, "modulus must be at least 2");
        assert!(m <= u32::MAX as u64, "modulus too large");
        ZmMatrix { m, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(m: u64, n: usize) -> Self {
        let mut a = Self::zeros(m, n, n);
        for i in 0..n {
            a.set(i, i, 1);
        }
        a
    }

    pub fn from_rows(m: u64, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut a = Self::zeros(m, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            for (j, &x) in r.iter().enumerate() {
                a.data[i * cols + j] = x % m;
            }
        }
        a
    }

    pub fn from_i64_rows(m: u64, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut a = Self::zeros(m, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                a.data[i * cols + j] = x.rem_euclid(m as i64) as u64;
            }
        }
        a
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x % self.m;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn rows_vec(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn push_row(&mut self, r: &[u64]) {
        assert_eq!(r.len(), self.cols);
        self.data.extend(r.iter().map(|&x| x % self.m));
        self.rows += 1;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.m, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &ZmMatrix) -> ZmMatrix {
        assert_eq!(self.m, other.m);
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let m = self.m;
        let mut out = ZmMatrix::zeros(m, self.rows, other.cols);
        let mut acc = vec![0u128; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let brow = other.row(k);
                for (x, &b) in acc.iter_mut().zip(brow) {
                    *x += (a * b) as u128;
                }
            }
            for (j, x) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = (*x % m as u128) as u64;
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows);
        let mut acc = vec![0u128; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (x, &b) in acc.iter_mut().zip(self.row(k)) {
                *x += (a * b) as u128;
            }
        }
        acc.into_iter().map(|x| (x % self.m as u128) as u64).collect()
    }

    pub fn hstack(&self, other: &ZmMatrix) -> ZmMatrix {
        assert_eq!(self.m, other.m);
        assert_eq!(self.rows, other.rows);
        let mut out = ZmMatrix::zeros(self.m, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            let r = out.row_mut(i);
            r[..self.cols].copy_from_slice(self.row(i));
            r[self.cols..].copy_from_slice(other.row(i));
        }
        out
    }

    pub fn vstack(&self, other: &ZmMatrix) -> ZmMatrix {
        assert_eq!(self.m, other.m);
        assert_eq!(self.cols, other.cols);
        let mut out = self.clone();
        out.data.extend_from_slice(&other.data);
        out.rows += other.rows;
        out
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> ZmMatrix {
        let mut out = ZmMatrix::zeros(self.m, rows.len(), cols.len());
        for (i, ri) in rows.clone().enumerate() {
            out.row_mut(i).copy_from_slice(&self.row(ri)[cols.clone()]);
        }
        out
    }
}

impl fmt::Debug for ZmMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ZmMatrix mod {} ({}x{})", self.m, self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}
