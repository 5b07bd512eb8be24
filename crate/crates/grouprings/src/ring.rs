use zlin::{inv_mod, mulmod, solve, ZmMatrix};

use crate::group::{FinAbGroup, SubgroupSpec};

/// Coefficient table indexed by group elements, values in Z/m.
pub type GroupRingElem = Vec<u64>;

/// R = (Z/m)[G].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupRing {
    m: u64,
    group: FinAbGroup,
}

impl GroupRing {
    pub fn new(m: u64, group: FinAbGroup) -> Self {
        assert!(m >= 2);
        GroupRing { m, group }
    }

    pub fn cyclic(m: u64, orders: &[u64]) -> Self {
        Self::new(m, FinAbGroup::new(orders.to_vec()))
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    /// |G|, the Z/m-rank of R.
    pub fn dim(&self) -> usize {
        self.group.size()
    }

    pub fn zero(&self) -> GroupRingElem {
        vec![0; self.dim()]
    }

    pub fn one(&self) -> GroupRingElem {
        self.scalar(1)
    }

    pub fn scalar(&self, c: u64) -> GroupRingElem {
        let mut x = self.zero();
        x[0] = c % self.m;
        x
    }

    pub fn basis(&self, g: usize) -> GroupRingElem {
        let mut x = self.zero();
        x[g] = 1;
        x
    }

    /// σ_k^e for the generator of factor k.
    pub fn gen_pow(&self, k: usize, e: u64) -> GroupRingElem {
        self.basis(self.group.generator_pow(k, e))
    }

    pub fn reduce(&self, x: &mut GroupRingElem) {
        for c in x.iter_mut() {
            *c %= self.m;
        }
    }

    pub fn is_zero(&self, x: &[u64]) -> bool {
        x.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> GroupRingElem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.m).collect()
    }

    pub fn add_assign(&self, a: &mut [u64], b: &[u64]) {
        for (x, &y) in a.iter_mut().zip(b) {
            *x = (*x + y) % self.m;
        }
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> GroupRingElem {
        a.iter().zip(b).map(|(&x, &y)| (x + self.m - y) % self.m).collect()
    }

    pub fn neg(&self, a: &[u64]) -> GroupRingElem {
        a.iter().map(|&x| (self.m - x) % self.m).collect()
    }

    pub fn scale(&self, a: &[u64], c: u64) -> GroupRingElem {
        let c = c % self.m;
        a.iter().map(|&x| mulmod(x, c, self.m)).collect()
    }

    /// a += c * b
    pub fn axpy(&self, a: &mut [u64], c: u64, b: &[u64]) {
        let c = c % self.m;
        if c == 0 {
            return;
        }
        for (x, &y) in a.iter_mut().zip(b) {
            *x = (*x + mulmod(c, y, self.m)) % self.m;
        }
    }

    fn nonzeros(x: &[u64]) -> Vec<(usize, u64)> {
        x.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect()
    }

    /// Product; cost is |G| plus the product of the supports.
    pub fn mul(&self, a: &[u64], b: &[u64]) -> GroupRingElem {
        let na = Self::nonzeros(a);
        let nb = Self::nonzeros(b);
        let mut acc = vec![0u64; self.dim()];
        let m = self.m;
        if na.len() * nb.len() > 0 {
            let g = &self.group;
            for &(i, x) in &na {
                for &(j, y) in &nb {
                    let k = g.add(i, j);
                    acc[k] = (acc[k] + mulmod(x, y, m)) % m;
                }
            }
        }
        acc
    }

    /// Multiply by the group element g.
    pub fn shift(&self, a: &[u64], g: usize) -> GroupRingElem {
        let mut out = self.zero();
        for (i, &c) in a.iter().enumerate() {
            if c != 0 {
                out[self.group.add(i, g)] = c;
            }
        }
        out
    }

    pub fn augmentation(&self, a: &[u64]) -> u64 {
        a.iter().fold(0, |s, &c| (s + c) % self.m)
    }

    pub fn involution(&self, a: &[u64]) -> GroupRingElem {
        let mut out = self.zero();
        for (i, &c) in a.iter().enumerate() {
            out[self.group.neg(i)] = c;
        }
        out
    }

    pub fn norm_element(&self, h: &SubgroupSpec) -> GroupRingElem {
        let mut out = self.zero();
        for g in h.elements(&self.group) {
            out[g] = (out[g] + 1) % self.m;
        }
        out
    }

    /// Regular representation matrix: row g is the coefficient vector of g·a.
    pub fn regular_matrix(&self, a: &[u64]) -> ZmMatrix {
        let n = self.dim();
        let mut out = ZmMatrix::zeros(self.m, n, n);
        for g in 0..n {
            for (h, &c) in a.iter().enumerate() {
                if c != 0 {
                    out.set(g, self.group.add(g, h), c);
                }
            }
        }
        out
    }

    /// For a local ring (Z/p^k)[p-group], units are exactly the elements whose
    /// augmentation is prime to p.
    pub fn is_unit(&self, a: &[u64]) -> bool {
        zlin::gcd(self.augmentation(a), self.m) == 1
    }

    pub fn inverse(&self, a: &[u64]) -> Option<GroupRingElem> {
        if self.dim() == 1 {
            return inv_mod(a[0], self.m).map(|x| vec![x]);
        }
        let mat = self.regular_matrix(a);
        solve(&mat, &self.one())
    }

    pub fn pow(&self, a: &[u64], e: u64) -> GroupRingElem {
        let mut out = self.one();
        for _ in 0..e {
            out = self.mul(&out, a);
        }
        out
    }

    /// Multiply by Σ_i c_i σ_k^i along the k-th factor; cost |G|·#c.
    pub fn mul_axis_poly(&self, a: &[u64], k: usize, coeffs: &[u64]) -> GroupRingElem {
        let g = &self.group;
        let c = g.orders()[k] as usize;
        let stride = g.stride(k);
        let mut out = self.zero();
        for (i, &ci) in coeffs.iter().enumerate() {
            let ci = ci % self.m;
            if ci == 0 {
                continue;
            }
            let shift = i % c;
            for (idx, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let d = (idx / stride) % c;
                let nd = (d + shift) % c;
                let j = idx + nd * stride - d * stride;
                out[j] = (out[j] + mulmod(ci, x, self.m)) % self.m;
            }
        }
        out
    }

    /// Kill the listed factors: σ_k ↦ 1 for k in `kill`, as an endomorphism of R.
    pub fn kill_factors(&self, a: &[u64], kill: &[usize]) -> GroupRingElem {
        let g = &self.group;
        let mut out = self.zero();
        for (idx, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let mut j = idx;
            for &k in kill {
                j -= g.digit(idx, k) as usize * g.stride(k);
            }
            out[j] = (out[j] + x) % self.m;
        }
        out
    }
}

/// A ring homomorphism between group rings induced by a group homomorphism
/// given on element indices.
#[derive(Clone, Debug)]
pub struct RingMap {
    pub target_dim: usize,
    pub m: u64,
    pub image: Vec<usize>,
}

impl RingMap {
    pub fn apply(&self, a: &[u64]) -> GroupRingElem {
        let mut out = vec![0; self.target_dim];
        for (i, &x) in a.iter().enumerate() {
            if x != 0 {
                let j = self.image[i];
                out[j] = (out[j] + x) % self.m;
            }
        }
        out
    }

    /// Projection G/H for a subgroup spec.
    pub fn quotient(src: &GroupRing, h: &SubgroupSpec) -> (GroupRing, RingMap) {
        let (q, proj) = h.quotient(src.group());
        let ring = GroupRing::new(src.modulus(), q);
        let map = RingMap { target_dim: ring.dim(), m: src.modulus(), image: proj };
        (ring, map)
    }

    /// Map induced by sending source factor k to target factor `factor_map[k]`
    /// (exponent reduced mod the target order), or to the identity when None.
    pub fn by_factors(src: &GroupRing, dst: &GroupRing, factor_map: &[Option<usize>]) -> RingMap {
        let (sg, dg) = (src.group(), dst.group());
        assert_eq!(factor_map.len(), sg.nfactors());
        let image = (0..sg.size())
            .map(|i| {
                let e = sg.exps(i);
                let mut de = vec![0u64; dg.nfactors()];
                for (k, t) in factor_map.iter().enumerate() {
                    if let Some(t) = t {
                        de[*t] = (de[*t] + e[k]) % dg.orders()[*t];
                    }
                }
                dg.index(&de)
            })
            .collect();
        RingMap { target_dim: dst.dim(), m: src.modulus(), image }
    }
}

/// Dense matrix over a group ring; the ring is passed to every operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GroupRingElem>,
}

impl RMatrix {
    pub fn zeros(ring: &GroupRing, rows: usize, cols: usize) -> Self {
        RMatrix { rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &GroupRing, n: usize) -> Self {
        let mut a = Self::zeros(ring, n, n);
        for i in 0..n {
            a.set(i, i, ring.one());
        }
        a
    }

    pub fn from_rows(rows: Vec<Vec<GroupRingElem>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols);
            data.extend(row);
        }
        RMatrix { rows: r, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: GroupRingElem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[GroupRingElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<GroupRingElem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<GroupRingElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn push_row(&mut self, row: Vec<GroupRingElem>) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> RMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        RMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, ring: &GroupRing, other: &RMatrix) -> RMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = RMatrix::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if ring.is_zero(b) {
                        continue;
                    }
                    let p = ring.mul(a, b);
                    let idx = i * other.cols + j;
                    ring.add_assign(&mut out.data[idx], &p);
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, ring: &GroupRing, v: &[GroupRingElem]) -> Vec<GroupRingElem> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![ring.zero(); self.cols];
        for (k, a) in v.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            for j in 0..self.cols {
                let b = self.get(k, j);
                if !ring.is_zero(b) {
                    let p = ring.mul(a, b);
                    ring.add_assign(&mut out[j], &p);
                }
            }
        }
        out
    }

    pub fn map_entries(&self, f: impl Fn(&GroupRingElem) -> GroupRingElem) -> RMatrix {
        RMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Determinant by Laplace expansion with memoized column subsets.
    pub fn det(&self, ring: &GroupRing) -> GroupRingElem {
        assert_eq!(self.rows, self.cols);
        det_of(ring, self.rows, |i, j| self.get(i, j))
    }
}

/// Determinant of an n×n matrix given entrywise; O(n·2^n) ring products.
pub fn det_of<'a>(ring: &GroupRing, n: usize, entry: impl Fn(usize, usize) -> &'a GroupRingElem) -> GroupRingElem {
    if n == 0 {
        return ring.one();
    }
    // f[S] = det of rows (n-|S|..n) and columns S, built from the bottom row up.
    let full = 1usize << n;
    let mut f: Vec<Option<GroupRingElem>> = vec![None; full];
    f[0] = Some(ring.one());
    for mask in 1..full {
        let k = mask.count_ones() as usize;
        let row = n - k;
        let mut acc = ring.zero();
        let mut pos = 0;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let e = entry(row, j);
            let rest = f[mask ^ (1 << j)].as_ref().unwrap();
            if !ring.is_zero(e) && !ring.is_zero(rest) {
                let p = ring.mul(e, rest);
                if pos % 2 == 0 {
                    ring.add_assign(&mut acc, &p);
                } else {
                    acc = ring.sub(&acc, &p);
                }
            }
            pos += 1;
        }
        f[mask] = Some(acc);
    }
    f[full - 1].take().unwrap()
}

/// Coefficient vector of an R-vector, concatenated.
pub fn flatten_vec(ring: &GroupRing, v: &[GroupRingElem]) -> Vec<u64> {
    let mut out = Vec::with_capacity(v.len() * ring.dim());
    for x in v {
        out.extend_from_slice(x);
    }
    out
}

pub fn unflatten_vec(ring: &GroupRing, v: &[u64]) -> Vec<GroupRingElem> {
    v.chunks(ring.dim()).map(|c| c.to_vec()).collect()
}

/// Block matrix of regular representations; flatten(v)·flatten(A) = flatten(v·A).
pub fn flatten(ring: &GroupRing, a: &RMatrix) -> ZmMatrix {
    let n = ring.dim();
    let mut out = ZmMatrix::zeros(ring.modulus(), a.nrows() * n, a.ncols() * n);
    let g = ring.group();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let e = a.get(i, j);
            for (h, &c) in e.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for x in 0..n {
                    out.set(i * n + x, j * n + g.add(x, h), c);
                }
            }
        }
    }
    out
}

/// All G-translates of the given R-vectors, flattened: their Z/m-span is the
/// R-submodule they generate.
pub fn translates(ring: &GroupRing, vecs: &[Vec<GroupRingElem>]) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(vecs.len() * ring.dim());
    for v in vecs {
        for g in 0..ring.dim() {
            let shifted: Vec<GroupRingElem> = v.iter().map(|x| ring.shift(x, g)).collect();
            out.push(flatten_vec(ring, &shifted));
        }
    }
    out
}

/// Translates of a flattened vector.
pub fn translates_flat(ring: &GroupRing, v: &[u64]) -> Vec<Vec<u64>> {
    let parts = unflatten_vec(ring, v);
    translates(ring, &[parts])
}
