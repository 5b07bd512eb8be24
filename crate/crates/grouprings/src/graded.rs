use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use zlin::{hnf, howell_rows, mulmod, snf, HowellForm, ZMatrix};

use crate::ring::{GroupRing, GroupRingElem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GradedError {
    /// The element is not in I^ν (witness: first monomial with a residual coefficient).
    NotInFiltration { monomial: Vec<u32> },
    BadInput(String),
}

impl std::fmt::Display for GradedError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GradedError::NotInFiltration { monomial } => {
                write!(f, "element not in the augmentation power (residue at monomial {:?})", monomial)
            }
            GradedError::BadInput(s) => write!(f, "{}", s),
        }
    }
}

impl std::error::Error for GradedError {}

fn binom_i128(a: u64, j: u64) -> i128 {
    if j > a {
        return 0;
    }
    let mut r: i128 = 1;
    for i in 0..j {
        r = r * (a - i) as i128 / (i + 1) as i128;
    }
    r
}

/// Monomials y^α in t variables of total degree ≤ ν, ordered by degree then
/// lexicographically.
pub fn monomials(t: usize, nu: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for deg in 0..=nu {
        let mut cur = vec![0u32; t];
        gen_deg(t, deg as u32, 0, &mut cur, &mut out);
    }
    out
}

fn gen_deg(t: usize, left: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if k + 1 >= t {
        if t == 0 {
            if left == 0 {
                out.push(Vec::new());
            }
            return;
        }
        cur[k] = left;
        out.push(cur.clone());
        cur[k] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[k] = e;
        gen_deg(t, left - e, k + 1, cur, out);
    }
    cur[k] = 0;
}

/// r ⊗_Z (I^ν / I^{ν+1}) for Z[H], H = ∏ Z/e_q, with y_q = σ_q − 1.
///
/// Z[H]/I^{ν+1} is modeled as Z[y]/((y)^{ν+1} + J) with J generated by
/// (1 + y_q)^{e_q} − 1; the lattice J̄ of truncated monomial multiples of these
/// generators is put in Hermite form with lower-degree columns first.
#[derive(Clone, Debug)]
pub struct GradedPiece {
    orders: Vec<u64>,
    nu: usize,
    m: u64,
    monos: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    top_start: usize,
    lower: Vec<(usize, Vec<BigInt>)>,
    top_rel: HowellForm,
    full_mod: HowellForm,
    embeds: bool,
    pure: Option<usize>,
    invariants: Vec<u64>,
}

impl GradedPiece {
    pub fn new(orders: &[u64], nu: usize, m: u64) -> Self {
        let t = orders.len();
        let monos = monomials(t, nu);
        let index: HashMap<Vec<u32>, usize> = monos.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let top_start = monos.iter().position(|a| a.iter().sum::<u32>() as usize == nu).unwrap_or(monos.len());
        let n = monos.len();
        let ntop = n - top_start;

        let mut gens: Vec<Vec<BigInt>> = Vec::new();
        for (q, &e) in orders.iter().enumerate() {
            for beta in monos.iter().filter(|b| (b.iter().sum::<u32>() as usize) < nu) {
                let mut row = vec![BigInt::zero(); n];
                let deg_b = beta.iter().sum::<u32>() as usize;
                for j in 1..=(nu - deg_b) as u64 {
                    let c = binom_i128(e, j);
                    if c == 0 {
                        continue;
                    }
                    let mut a = beta.clone();
                    a[q] += j as u32;
                    row[index[&a]] = BigInt::from(c);
                }
                gens.push(row);
            }
        }

        let mut lower = Vec::new();
        let mut top_rows_int: Vec<Vec<BigInt>> = Vec::new();
        if !gens.is_empty() {
            let h = hnf(&ZMatrix::from_rows(n, gens.clone()));
            for (i, &p) in h.pivots.iter().enumerate() {
                let row = h.h.row(i).to_vec();
                if p < top_start {
                    lower.push((p, row));
                } else {
                    top_rows_int.push(row[top_start..].to_vec());
                }
            }
        }
        let modm = |x: &BigInt| -> u64 {
            let mm = BigInt::from(m);
            let r = ((x % &mm) + &mm) % &mm;
            r.to_u64().unwrap()
        };
        let top_rel = howell_rows(m, ntop, top_rows_int.iter().map(|r| r.iter().map(modm).collect()).collect());
        let full_mod = howell_rows(m, n, gens.iter().map(|r| r.iter().map(modm).collect()).collect());
        let trunc_top: Vec<Vec<u64>> = full_mod
            .rows()
            .iter()
            .zip(full_mod.pivots())
            .filter(|(_, &p)| p >= top_start)
            .map(|(r, _)| r[top_start..].to_vec())
            .collect();
        let embeds = howell_rows(m, ntop, trunc_top) == top_rel;

        let pure = if nu == t { index.get(&vec![1u32; t]).map(|&i| i - top_start) } else { None };

        let mut smat: Vec<Vec<BigInt>> = top_rows_int.clone();
        for i in 0..ntop {
            let mut r = vec![BigInt::zero(); ntop];
            r[i] = BigInt::from(m);
            smat.push(r);
        }
        let invariants = if ntop == 0 {
            Vec::new()
        } else {
            snf(&ZMatrix::from_rows(ntop, smat))
                .diagonal()
                .into_iter()
                .map(|d| d.abs().to_u64().unwrap())
                .filter(|&d| d != 1)
                .collect()
        };

        GradedPiece { orders: orders.to_vec(), nu, m, monos, index, top_start, lower, top_rel, full_mod, embeds, pure, invariants }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn degree(&self) -> usize {
        self.nu
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// All monomials of degree ≤ ν (coordinates of the truncated ring).
    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monos
    }

    /// Monomials of degree exactly ν (coordinates of the graded piece).
    pub fn top_monomials(&self) -> &[Vec<u32>] {
        &self.monos[self.top_start..]
    }

    pub fn top_start(&self) -> usize {
        self.top_start
    }

    pub fn dim(&self) -> usize {
        self.monos.len() - self.top_start
    }

    pub fn mono_index(&self, a: &[u32]) -> Option<usize> {
        self.index.get(a).copied()
    }

    /// Relations among top monomials over Z/M.
    pub fn relations(&self) -> &HowellForm {
        &self.top_rel
    }

    /// Whether r ⊗ gr_ν injects into r ⊗ Z[H]/I^{ν+1}.
    pub fn embeds_in_truncation(&self) -> bool {
        self.embeds
    }

    /// Invariant factors (≠ 1) of r ⊗ gr_ν.
    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariants
    }

    /// Index among top coordinates of the class of ∏_q (σ_q − 1).
    pub fn pure_index(&self) -> Option<usize> {
        self.pure
    }

    pub fn pure_class(&self) -> Option<Vec<u64>> {
        self.pure.map(|i| {
            let mut v = vec![0; self.dim()];
            v[i] = 1;
            self.top_rel.reduce(&v)
        })
    }

    pub fn zero_class(&self) -> Vec<u64> {
        vec![0; self.dim()]
    }

    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        self.top_rel.reduce(v)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let s: Vec<u64> = a.iter().zip(b).map(|(&x, &y)| (x + y) % self.m).collect();
        self.reduce(&s)
    }

    pub fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        let s: Vec<u64> = a.iter().map(|&x| mulmod(x, c % self.m, self.m)).collect();
        self.reduce(&s)
    }

    /// Pure component is free of rank one and a direct summand on the monomial basis.
    pub fn pure_is_free_summand(&self) -> bool {
        match self.pure {
            None => false,
            Some(i) => self.top_rel.rows().iter().all(|r| r[i] == 0),
        }
    }

    /// Class of an integer polynomial lying in I^ν (given on all monomials ≤ ν).
    pub fn class_of_integer(&self, v: &[BigInt]) -> Result<Vec<u64>, GradedError> {
        assert_eq!(v.len(), self.monos.len());
        let mut v = v.to_vec();
        for (p, row) in &self.lower {
            let d = &row[*p];
            if v[*p].is_zero() {
                continue;
            }
            if !(&v[*p] % d).is_zero() {
                return Err(GradedError::NotInFiltration { monomial: self.monos[*p].clone() });
            }
            let q = &v[*p] / d;
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        if let Some(i) = (0..self.top_start).find(|&i| !v[i].is_zero()) {
            return Err(GradedError::NotInFiltration { monomial: self.monos[i].clone() });
        }
        let mm = BigInt::from(self.m);
        let top: Vec<u64> = v[self.top_start..].iter().map(|x| ((x % &mm) + &mm) % &mm).map(|x| x.to_u64().unwrap()).collect();
        Ok(self.top_rel.reduce(&top))
    }

    /// Class of an element of r ⊗ Z[H]/I^{ν+1} (coefficients mod M on all
    /// monomials) required to lie in the image of r ⊗ I^ν.
    pub fn class_of_mod(&self, v: &[u64]) -> Result<Vec<u64>, GradedError> {
        assert_eq!(v.len(), self.monos.len());
        let red = self.full_mod.reduce(v);
        if let Some(i) = (0..self.top_start).find(|&i| red[i] != 0) {
            return Err(GradedError::NotInFiltration { monomial: self.monos[i].clone() });
        }
        Ok(self.top_rel.reduce(&red[self.top_start..]))
    }

    /// Image of a group ring element of r[H] (H indexed in mixed radix with the
    /// given orders) in r ⊗ Z[H]/I^{ν+1}, on all monomials.
    pub fn expand(&self, x: &[u64]) -> Vec<u64> {
        let t = self.orders.len();
        let k = self.nu + 1;
        // Per-axis moment transform: axis q of length e_q becomes length ν+1,
        // entry j holding Σ_a C(a, j) x[a].
        let mut dims: Vec<usize> = self.orders.iter().map(|&e| e as usize).collect();
        let mut data: Vec<u64> = x.iter().map(|&c| c % self.m).collect();
        for q in 0..t {
            let e = dims[q];
            let stride: usize = dims[..q].iter().product();
            let outer: usize = dims[q + 1..].iter().product();
            let mut next = vec![0u64; stride * k * outer];
            let binoms: Vec<Vec<u64>> = (0..e as u64)
                .map(|a| (0..k as u64).map(|j| (binom_i128(a, j) % self.m as i128) as u64).collect())
                .collect();
            for o in 0..outer {
                for a in 0..e {
                    for s in 0..stride {
                        let c = data[s + stride * (a + e * o)];
                        if c == 0 {
                            continue;
                        }
                        for j in 0..k {
                            let b = binoms[a][j];
                            if b != 0 {
                                let idx = s + stride * (j + k * o);
                                next[idx] = (next[idx] + mulmod(c, b, self.m)) % self.m;
                            }
                        }
                    }
                }
            }
            data = next;
            dims[q] = k;
        }
        self.monos
            .iter()
            .map(|a| {
                let mut idx = 0;
                let mut stride = 1;
                for &aq in a {
                    idx += aq as usize * stride;
                    stride *= k;
                }
                data[idx]
            })
            .collect()
    }

    /// Class in r ⊗ gr_ν of x ∈ I^ν·r[H].
    pub fn class_of_element(&self, x: &[u64]) -> Result<Vec<u64>, GradedError> {
        self.class_of_mod(&self.expand(x))
    }

    /// Integer expansion ∏_q ((1 + y_q)^{a_q}) truncated at degree ν.
    pub fn expand_group_element_integer(&self, exps: &[u64]) -> Vec<BigInt> {
        self.monos
            .iter()
            .map(|a| {
                let mut c: i128 = 1;
                for (q, &aq) in a.iter().enumerate() {
                    c *= binom_i128(exps[q], aq as u64);
                }
                BigInt::from(c)
            })
            .collect()
    }

    /// The quotient map π_d (σ_q ↦ 1 for q outside `keep`) on top coordinates.
    pub fn pi_d(&self, v: &[u64], keep: &[bool]) -> Vec<u64> {
        let top = self.top_monomials();
        let out: Vec<u64> = v
            .iter()
            .zip(top)
            .map(|(&c, a)| if a.iter().enumerate().all(|(q, &e)| e == 0 || keep[q]) { c } else { 0 })
            .collect();
        self.reduce(&out)
    }

    /// s_n = Σ_{d | n} (−1)^{ν(n/d)} π_d on the top coordinates, summed literally.
    pub fn s_projector(&self, v: &[u64]) -> Vec<u64> {
        let t = self.orders.len();
        let mut acc = vec![0u64; self.dim()];
        for mask in 0..(1usize << t) {
            let keep: Vec<bool> = (0..t).map(|q| mask & (1 << q) != 0).collect();
            let term = self.pi_d(v, &keep);
            let sign_neg = (t - mask.count_ones() as usize) % 2 == 1;
            for (x, &y) in acc.iter_mut().zip(&term) {
                *x = if sign_neg { (*x + self.m - y) % self.m } else { (*x + y) % self.m };
            }
        }
        self.reduce(&acc)
    }

    /// s_n acting on r ⊗ Z[H]/I^{ν+1} (all monomials).
    pub fn s_projector_truncated(&self, v: &[u64]) -> Vec<u64> {
        let t = self.orders.len();
        let mut acc = vec![0u64; self.monos.len()];
        for mask in 0..(1usize << t) {
            let sign_neg = (t - mask.count_ones() as usize) % 2 == 1;
            for (i, a) in self.monos.iter().enumerate() {
                if a.iter().enumerate().all(|(q, &e)| e == 0 || mask & (1 << q) != 0) {
                    let y = v[i];
                    acc[i] = if sign_neg { (acc[i] + self.m - y) % self.m } else { (acc[i] + y) % self.m };
                }
            }
        }
        acc
    }
}

/// Layout of 𝓖 = Γ × H inside a group ring whose first `gamma_factors` factors
/// form Γ and the remaining ones form H.
#[derive(Clone, Copy, Debug)]
pub struct SplitLayout {
    pub gamma_size: usize,
    pub h_size: usize,
}

impl SplitLayout {
    pub fn of(ring: &GroupRing, gamma_factors: usize) -> Self {
        let orders = ring.group().orders();
        let gamma_size: usize = orders[..gamma_factors].iter().map(|&c| c as usize).product();
        SplitLayout { gamma_size, h_size: ring.dim() / gamma_size }
    }

    pub fn h_part(&self, x: &[u64], gamma: usize) -> Vec<u64> {
        (0..self.h_size).map(|h| x[gamma + self.gamma_size * h]).collect()
    }
}

/// Resolvent map I^s·X → X^H ⊗ gr_s for X = r[Γ × H]^k free.
///
/// Output: for each coordinate, for each γ ∈ Γ, the class of the H-part; it
/// represents Σ_γ N_H γ e_j ⊗ [x_{j,γ}].
pub fn resolvent(
    ring: &GroupRing,
    gamma_factors: usize,
    gp: &GradedPiece,
    x: &[GroupRingElem],
) -> Result<Vec<Vec<Vec<u64>>>, GradedError> {
    let lay = SplitLayout::of(ring, gamma_factors);
    let h_orders = &ring.group().orders()[gamma_factors..];
    if h_orders != gp.orders() {
        return Err(GradedError::BadInput("graded piece does not match H".into()));
    }
    x.iter()
        .map(|xj| (0..lay.gamma_size).map(|g| gp.class_of_element(&lay.h_part(xj, g))).collect())
        .collect()
}

/// Σ_{σ∈H} σ·x ⊗ σ^{-1} in X ⊗ r ⊗ Z[H]/I^{ν+1}: for each monomial y^α the
/// coefficient E_α·x with E_α = Σ_σ coef_α(σ^{-1}) σ, computed axis by axis.
pub fn twisted_trace(ring: &GroupRing, gamma_factors: usize, gp: &GradedPiece, x: &[GroupRingElem]) -> Vec<Vec<GroupRingElem>> {
    let m = ring.modulus();
    let orders = gp.orders().to_vec();
    gp.monomials()
        .iter()
        .map(|a| {
            x.iter()
                .map(|xj| {
                    let mut cur = xj.clone();
                    for (q, &e) in orders.iter().enumerate() {
                        let coeffs: Vec<u64> = (0..e)
                            .map(|s| {
                                let inv = (e - s) % e;
                                (binom_i128(inv, a[q] as u64) % m as i128) as u64
                            })
                            .collect();
                        cur = ring.mul_axis_poly(&cur, gamma_factors + q, &coeffs);
                    }
                    cur
                })
                .collect()
        })
        .collect()
}

/// Direct sum over σ of σx ⊗ expand(σ^{-1}); quadratic in |H|, for oracles.
pub fn twisted_trace_naive(ring: &GroupRing, gamma_factors: usize, gp: &GradedPiece, x: &[GroupRingElem]) -> Vec<Vec<GroupRingElem>> {
    let g = ring.group();
    let lay = SplitLayout::of(ring, gamma_factors);
    let nm = gp.monomials().len();
    let mut out = vec![vec![ring.zero(); x.len()]; nm];
    for h in 0..lay.h_size {
        let sigma = h * lay.gamma_size;
        let e = g.exps(sigma);
        let inv: Vec<u64> = e[gamma_factors..].iter().zip(gp.orders()).map(|(&a, &o)| (o - a) % o).collect();
        let poly = gp.expand_group_element_integer(&inv);
        for (j, xj) in x.iter().enumerate() {
            let sx = ring.shift(xj, sigma);
            for (mi, c) in poly.iter().enumerate() {
                let mm = BigInt::from(ring.modulus());
                let c = (((c % &mm) + &mm) % &mm).to_u64().unwrap();
                if c != 0 {
                    ring.axpy(&mut out[mi][j], c, &sx);
                }
            }
        }
    }
    out
}
