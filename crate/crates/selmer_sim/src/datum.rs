use complexes::TwoTermComplex;
use grouprings::{GroupRing, GroupRingElem, RMatrix};
use modalg::{left_kernel, FPModule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use zlin::{inv_mod, mulmod};

use crate::{primes_of, Level, SelmerError};

/// Sparse group ring element: (group index, coefficient) pairs.
pub type Sparse = Vec<(usize, u64)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Regular,
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub p: u64,
    pub k: u32,
    /// |Γ|, a power of p (Γ is cyclic).
    pub gamma: u64,
    pub r: usize,
    pub primes: usize,
    pub regime: Regime,
}

impl Params {
    pub fn new(p: u64, k: u32, gamma: u64, r: usize, primes: usize) -> Self {
        Params { p, k, gamma, r, primes, regime: Regime::Regular }
    }

    pub fn degenerate(self) -> Self {
        Params { regime: Regime::Degenerate, ..self }
    }

    pub fn check(&self) -> Result<(), SelmerError> {
        let bad = |s: &str| Err(SelmerError::InvalidParams(s.into()));
        if self.p < 3 || self.p % 2 == 0 {
            return bad("p must be odd");
        }
        if (2..self.p).take_while(|d| d * d <= self.p).any(|d| self.p % d == 0) {
            return bad("p must be prime");
        }
        if self.k == 0 || self.p.checked_pow(self.k).map_or(true, |m| m > 1 << 20) {
            return bad("k out of range");
        }
        let mut g = self.gamma;
        while g > 1 && g % self.p == 0 {
            g /= self.p;
        }
        if g != 1 || self.gamma == 0 {
            return bad("|Γ| must be a power of p");
        }
        if self.r == 0 {
            return bad("r must be at least 1");
        }
        if self.primes > 8 {
            return bad("at most 8 primes");
        }
        Ok(())
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }
}

/// Frobenius data at one prime: its matrix on T = r², the Euler polynomial
/// P_q(x) = det(1 − F_q^{-1} x), Q_q = P_q / (x − 1), and the exponents of
/// Fr_q in the other G_{q'} (zero at q itself).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerData {
    pub frob_matrix: Vec<Vec<u64>>,
    pub p_coeffs: Vec<u64>,
    pub q_coeffs: Vec<u64>,
    pub frob_exps: Vec<u64>,
}

/// Coefficients of det(1 − A x) over Z/M, as signed sums of principal minors.
pub(crate) fn char_poly_rev(a: &[Vec<u64>], m: u64) -> Vec<u64> {
    let t = a.len();
    let mut out = vec![0u64; t + 1];
    // coefficient of x^k is (−1)^k Σ_{|S|=k} det A_S
    for mask in 0u32..(1 << t) {
        let idx: Vec<usize> = (0..t).filter(|&i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        let minor = det_small(&idx.iter().map(|&i| idx.iter().map(|&j| a[i][j]).collect()).collect::<Vec<Vec<u64>>>(), m);
        let v = if k % 2 == 1 { (m - minor) % m } else { minor };
        out[k] = (out[k] + v) % m;
    }
    out
}

fn det_small(a: &[Vec<u64>], m: u64) -> u64 {
    let n = a.len();
    if n == 0 {
        return 1 % m;
    }
    let mut acc = 0u64;
    for j in 0..n {
        let sub: Vec<Vec<u64>> = a[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
        let term = mulmod(a[0][j], det_small(&sub, m), m);
        acc = if j % 2 == 0 { (acc + term) % m } else { (acc + m - term) % m };
    }
    acc
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], m: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).fold(0, |s, k| (s + mulmod(a[i][k], b[k][j], m)) % m)).collect()).collect()
}

pub(crate) fn inverse_2x2(a: &[Vec<u64>], m: u64) -> Option<Vec<Vec<u64>>> {
    let det = det_small(a, m);
    let di = inv_mod(det, m)?;
    Some(vec![
        vec![mulmod(a[1][1], di, m), mulmod((m - a[0][1]) % m, di, m)],
        vec![mulmod((m - a[1][0]) % m, di, m), mulmod(a[0][0], di, m)],
    ])
}

/// Quotient of P by the monic x − 1, dropping the remainder.
pub(crate) fn divide_by_x_minus_1(p: &[u64], m: u64) -> Vec<u64> {
    let n = p.len();
    if n < 2 {
        return vec![];
    }
    let mut q = vec![0u64; n - 1];
    q[n - 2] = p[n - 1] % m;
    for i in (1..n - 1).rev() {
        q[i - 1] = (p[i] + q[i]) % m;
    }
    q
}

/// Synthetic Selmer datum. H = R^d / ⟨h_relations⟩; every functional is a
/// coordinate row of length d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerDatum {
    pub seed: u64,
    pub params: Params,
    pub modulus: u64,
    pub gamma_orders: Vec<u64>,
    pub prime_orders: Vec<u64>,
    pub d: usize,
    pub h_relations: Vec<Vec<GroupRingElem>>,
    pub v: Vec<Vec<GroupRingElem>>,
    pub phi_fs: Vec<Vec<GroupRingElem>>,
    pub euler: Vec<EulerData>,
    /// P[q][q'] for q ≠ q'; the diagonal is zero.
    pub cross: Vec<Vec<u64>>,
}

fn rand_elem(ring: &GroupRing, rng: &mut ChaCha8Rng) -> GroupRingElem {
    (0..ring.dim()).map(|_| rng.gen_range(0..ring.modulus())).collect()
}

/// Nonzero element of the maximal ideal, if there is one.
fn rand_max_ideal(ring: &GroupRing, p: u64, rng: &mut ChaCha8Rng) -> Option<GroupRingElem> {
    if ring.dim() == 1 && ring.modulus() == p {
        return None;
    }
    loop {
        let x = rand_elem(ring, rng);
        if ring.augmentation(&x) % p == 0 && !ring.is_zero(&x) {
            return Some(x);
        }
    }
}

pub fn generate_selmer(seed: u64, params: Params) -> Result<SelmerDatum, SelmerError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = params.p;
    let m = params.modulus();
    let gamma_orders = if params.gamma == 1 { vec![] } else { vec![params.gamma] };
    let ring = GroupRing::cyclic(m, &gamma_orders);
    let (r, s) = (params.r, params.primes);
    let d = r + s;
    let prime_orders = vec![m; s];

    let mut h_relations = Vec::new();
    // Allowed first coordinates of functionals: Ann(x) when H = R^d/⟨x e_1⟩.
    let mut first_coord_gens: Option<Vec<GroupRingElem>> = None;
    if params.regime == Regime::Degenerate {
        let x = rand_max_ideal(&ring, p, &mut rng).unwrap_or_else(|| ring.one());
        let mut rel = vec![ring.zero(); d];
        rel[0] = x.clone();
        h_relations.push(rel);
        first_coord_gens = Some(left_kernel(&ring, 1, &[vec![x]]).into_iter().map(|v| v[0].clone()).collect());
    }
    let functional = |rng: &mut ChaCha8Rng| -> Vec<GroupRingElem> {
        let mut f: Vec<GroupRingElem> = (0..d).map(|_| rand_elem(&ring, rng)).collect();
        if let Some(gens) = &first_coord_gens {
            let mut c = ring.zero();
            for g in gens {
                ring.add_assign(&mut c, &ring.mul(g, &rand_elem(&ring, rng)));
            }
            f[0] = c;
        }
        f
    };

    let mut v = Vec::with_capacity(s);
    for _ in 0..s {
        let mut vq = functional(&mut rng);
        if rng.gen_range(0..3) == 0 {
            if let Some(c) = rand_max_ideal(&ring, p, &mut rng) {
                vq = vq.iter().map(|x| ring.mul(x, &c)).collect();
            }
        }
        v.push(vq);
    }
    let phi_fs: Vec<Vec<GroupRingElem>> = (0..s).map(|_| functional(&mut rng)).collect();

    let mut euler = Vec::with_capacity(s);
    for q in 0..s {
        let u = loop {
            let u = rng.gen_range(1..m);
            if u % p != 0 && u % p != 1 {
                break u;
            }
        };
        let (sm, sinv) = loop {
            let sm: Vec<Vec<u64>> = (0..2).map(|_| (0..2).map(|_| rng.gen_range(0..m)).collect()).collect();
            if let Some(si) = inverse_2x2(&sm, m) {
                break (sm, si);
            }
        };
        let diag = vec![vec![1 % m, 0], vec![0, u]];
        let frob = mat_mul(&mat_mul(&sm, &diag, m), &sinv, m);
        let finv = inverse_2x2(&frob, m).expect("Frobenius is invertible");
        let p_coeffs = char_poly_rev(&finv, m);
        let q_coeffs = divide_by_x_minus_1(&p_coeffs, m);
        let frob_exps: Vec<u64> = (0..s).map(|q2| if q2 == q { 0 } else { rng.gen_range(0..prime_orders[q2]) }).collect();
        euler.push(EulerData { frob_matrix: frob, p_coeffs, q_coeffs, frob_exps });
    }
    let cross = (0..s)
        .map(|q| {
            let e = &euler[q];
            let dp1 = e.p_coeffs.iter().enumerate().fold(0u64, |acc, (j, &c)| (acc + mulmod(j as u64 % m, c, m)) % m);
            (0..s).map(|q2| if q2 == q { 0 } else { mulmod((m - dp1) % m, e.frob_exps[q2] % m, m) }).collect()
        })
        .collect();

    Ok(SelmerDatum { seed, params, modulus: m, gamma_orders, prime_orders, d, h_relations, v, phi_fs, euler, cross })
}

impl SelmerDatum {
    pub fn ring(&self) -> GroupRing {
        GroupRing::cyclic(self.modulus, &self.gamma_orders)
    }

    pub fn r(&self) -> usize {
        self.params.r
    }

    pub fn s(&self) -> usize {
        self.v.len()
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    /// Column of the level complexes carrying the j-th prime.
    pub fn prime_column(&self, q: usize) -> usize {
        self.r() + q
    }

    pub fn full_level(&self) -> Level {
        (1u32 << self.s()) - 1
    }

    pub fn h_module(&self) -> FPModule {
        FPModule::new(&self.ring(), self.d, self.h_relations.clone())
    }

    /// H free of rank r + |𝒫| on the given generators.
    pub fn is_regular(&self) -> bool {
        let ring = self.ring();
        self.d == self.r() + self.s() && self.h_relations.iter().all(|rel| rel.iter().all(|x| ring.is_zero(x)))
    }

    pub fn require_regular(&self) -> Result<(), SelmerError> {
        if self.is_regular() {
            Ok(())
        } else {
            Err(SelmerError::DatumNotRegular)
        }
    }

    /// Generators in R^d of (the preimage of) H¹_{F^n} = ∩_{q ∤ n} ker v_q.
    pub fn relaxed_gens(&self, n: Level) -> Vec<Vec<GroupRingElem>> {
        let cols: Vec<Vec<GroupRingElem>> = (0..self.s()).filter(|q| n & (1 << q) == 0).map(|q| self.v[q].clone()).collect();
        left_kernel(&self.ring(), self.d, &cols)
    }

    /// The functionals cutting out H¹_{F(n)}: v_q for q ∤ n, φ^fs_q for q | n.
    pub fn strict_functionals(&self, n: Level) -> Vec<Vec<GroupRingElem>> {
        (0..self.s()).map(|q| if n & (1 << q) == 0 { self.v[q].clone() } else { self.phi_fs[q].clone() }).collect()
    }

    /// Generators in R^d of H¹_{F(n)}.
    pub fn strict_gens(&self, n: Level) -> Vec<Vec<GroupRingElem>> {
        left_kernel(&self.ring(), self.d, &self.strict_functionals(n))
    }

    /// Synthetic Ш²(n) = coker(H → R^{𝒫∖n}, x ↦ (v_q(x))_{q ∤ n}).
    pub fn sha_module(&self, n: Level) -> FPModule {
        let ring = self.ring();
        let outside: Vec<usize> = (0..self.s()).filter(|q| n & (1 << q) == 0).collect();
        let rels: Vec<Vec<GroupRingElem>> = (0..self.d).map(|j| outside.iter().map(|&q| self.v[q][j].clone()).collect()).collect();
        FPModule::new(&ring, outside.len(), rels)
    }

    /// Level-n complex: column r + q is v_q for q ∤ n, every other column is zero.
    pub fn level_complex(&self, n: Level) -> Result<TwoTermComplex, SelmerError> {
        self.require_regular()?;
        let ring = self.ring();
        let zero = vec![ring.zero(); self.d];
        let mut cols = vec![zero.clone(); self.d];
        for q in 0..self.s() {
            if n & (1 << q) == 0 {
                cols[self.prime_column(q)] = self.v[q].clone();
            }
        }
        Ok(TwoTermComplex::from_columns(&ring, &cols).expect("square"))
    }

    /// Projection H¹ → X_n = R^{r+ν(n)} onto the first r and the n-prime coordinates.
    pub fn level_projection(&self, n: Level) -> RMatrix {
        let ring = self.ring();
        let ps = primes_of(n);
        let mut f = RMatrix::zeros(&ring, self.d, self.r() + ps.len());
        for i in 0..self.r() {
            f.set(i, i, ring.one());
        }
        for (k, &q) in ps.iter().enumerate() {
            f.set(self.prime_column(q), self.r() + k, ring.one());
        }
        f
    }

    /// P'_q(1) mod M.
    pub fn euler_derivative_at_one(&self, q: usize) -> u64 {
        let m = self.modulus;
        self.euler[q].p_coeffs.iter().enumerate().fold(0u64, |acc, (j, &c)| (acc + mulmod(j as u64 % m, c, m)) % m)
    }

    pub(crate) fn check_shape(&self) -> Result<(), SelmerError> {
        let bad = |s: &str| Err(SelmerError::Schema(s.into()));
        self.params.check().or_else(|e| bad(&e.to_string()))?;
        let n = self.ring().dim();
        let s = self.s();
        let elem_ok = |x: &GroupRingElem| x.len() == n && x.iter().all(|&c| c < self.modulus);
        let vec_ok = |v: &Vec<GroupRingElem>| v.len() == self.d && v.iter().all(elem_ok);
        if self.modulus != self.params.modulus() || self.gamma_orders.iter().product::<u64>() != self.params.gamma {
            return bad("modulus or Γ does not match the parameters");
        }
        if self.prime_orders.len() != s || self.phi_fs.len() != s || self.euler.len() != s || self.cross.len() != s {
            return bad("per-prime tables have inconsistent lengths");
        }
        if self.prime_orders.iter().any(|&e| e % self.modulus != 0) {
            return bad("M must divide every #G_q");
        }
        if !self.v.iter().chain(&self.phi_fs).chain(&self.h_relations).all(vec_ok) {
            return bad("functional or relation has the wrong shape");
        }
        for e in &self.euler {
            if e.frob_exps.len() != s || e.frob_matrix.iter().any(|row| row.len() != e.frob_matrix.len()) {
                return bad("Euler data has the wrong shape");
            }
        }
        if self.cross.iter().any(|row| row.len() != s) {
            return bad("cross-term table has the wrong shape");
        }
        Ok(())
    }
}
