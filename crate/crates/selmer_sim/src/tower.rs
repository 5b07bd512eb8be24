use grouprings::{resolvent, FinAbGroup, GradedPiece, GroupRing, GroupRingElem, RMatrix, RingMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{primes_of, Level, SelmerDatum, SelmerError, Sparse};

/// Master lifts over r[G_𝒫], G_𝒫 = Γ × ∏_q G_q (Γ factors first). Every
/// level is obtained by projection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerLifts {
    pub seed: u64,
    pub noise: bool,
    /// Ṽ_q = ι(v_q) + I_𝒫-noise.
    pub v_lift: Vec<Vec<Sparse>>,
    /// Φ̃_q = ι(φ^fs_q) + I_𝒫-noise.
    pub phi_lift: Vec<Vec<Sparse>>,
    /// w_q with entries in I_𝒫; contributes (σ_q − 1)·w_q ∈ I_n² to prime columns.
    pub w: Vec<Vec<Sparse>>,
    /// Determinant coordinate of the vertical system at level 𝒫.
    pub unit: Sparse,
    /// Additive patches on lifted matrices: (level, row, column, element over
    /// the level ring). Used to build corrupted towers.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub patches: Vec<(Level, usize, usize, Sparse)>,
}

impl TowerLifts {
    pub(crate) fn check_shape(&self, datum: &SelmerDatum) -> Result<(), SelmerError> {
        let s = datum.s();
        let size: usize = datum.gamma_orders.iter().chain(&datum.prime_orders).map(|&e| e as usize).product();
        let ok_sparse = |x: &Sparse| x.iter().all(|&(i, c)| i < size && c < datum.modulus);
        let ok_vecs = |v: &Vec<Vec<Sparse>>| v.len() == s && v.iter().all(|row| row.len() == datum.d && row.iter().all(ok_sparse));
        if !ok_vecs(&self.v_lift) || !ok_vecs(&self.phi_lift) || !ok_vecs(&self.w) || !ok_sparse(&self.unit) {
            return Err(SelmerError::Schema("tower lifts have the wrong shape".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TowerDatum {
    pub datum: SelmerDatum,
    pub lifts: TowerLifts,
    master: FinAbGroup,
}

fn embed(x: &GroupRingElem) -> Sparse {
    x.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect()
}

/// c·γ·(σ_q^a − 1) for random γ, q, a, c: an element of I_𝒫.
fn aug_noise(datum: &SelmerDatum, master: &FinAbGroup, rng: &mut ChaCha8Rng) -> Sparse {
    let m = datum.modulus;
    let s = datum.s();
    if s == 0 {
        return vec![];
    }
    let gamma_size: usize = datum.gamma_orders.iter().map(|&e| e as usize).product();
    let g = rng.gen_range(0..gamma_size);
    let q = rng.gen_range(0..s);
    let e = datum.prime_orders[q];
    let a = rng.gen_range(1..e);
    let c = rng.gen_range(1..m);
    let k = datum.gamma_orders.len() + q;
    let moved = g + a as usize * master.stride(k);
    vec![(moved, c), (g, m - c)]
}

fn rand_noise(datum: &SelmerDatum, master: &FinAbGroup, rng: &mut ChaCha8Rng, on: bool) -> Sparse {
    if !on {
        return vec![];
    }
    let mut out = Sparse::new();
    for _ in 0..rng.gen_range(0..3) {
        out.extend(aug_noise(datum, master, rng));
    }
    out
}

fn add_sparse(a: &Sparse, b: &Sparse) -> Sparse {
    a.iter().chain(b).copied().collect()
}

pub fn generate_tower(seed: u64, datum: &SelmerDatum, noise: bool) -> Result<TowerDatum, SelmerError> {
    datum.require_regular()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x746f_7765_72);
    let master = master_group(datum);
    let ring = datum.ring();
    let (s, d) = (datum.s(), datum.d);
    let mut v_lift = Vec::with_capacity(s);
    let mut phi_lift = Vec::with_capacity(s);
    let mut w = Vec::with_capacity(s);
    for q in 0..s {
        v_lift.push((0..d).map(|j| add_sparse(&embed(&datum.v[q][j]), &rand_noise(datum, &master, &mut rng, noise))).collect());
        phi_lift.push((0..d).map(|j| add_sparse(&embed(&datum.phi_fs[q][j]), &rand_noise(datum, &master, &mut rng, noise))).collect());
        w.push((0..d).map(|_| rand_noise(datum, &master, &mut rng, noise)).collect());
    }
    let base_unit = loop {
        let x: GroupRingElem = (0..ring.dim()).map(|_| rng.gen_range(0..datum.modulus)).collect();
        if ring.is_unit(&x) {
            break x;
        }
    };
    let unit = add_sparse(&embed(&base_unit), &rand_noise(datum, &master, &mut rng, noise));
    let lifts = TowerLifts { seed, noise, v_lift, phi_lift, w, unit, patches: vec![] };
    Ok(TowerDatum::new(datum.clone(), lifts))
}

fn master_group(datum: &SelmerDatum) -> FinAbGroup {
    FinAbGroup::new(datum.gamma_orders.iter().chain(&datum.prime_orders).copied().collect())
}

impl TowerDatum {
    pub fn new(datum: SelmerDatum, lifts: TowerLifts) -> Self {
        let master = master_group(&datum);
        TowerDatum { datum, lifts, master }
    }

    pub fn gamma_factors(&self) -> usize {
        self.datum.gamma_orders.len()
    }

    /// r[G_n], factors Γ then G_q for q | n in order.
    pub fn level_ring(&self, n: Level) -> GroupRing {
        let mut orders = self.datum.gamma_orders.clone();
        orders.extend(primes_of(n).iter().map(|&q| self.datum.prime_orders[q]));
        GroupRing::cyclic(self.datum.modulus, &orders)
    }

    /// Factor index of G_q in r[G_n].
    pub fn factor_of(&self, n: Level, q: usize) -> Option<usize> {
        primes_of(n).iter().position(|&x| x == q).map(|k| self.gamma_factors() + k)
    }

    /// Projection r[G_n] → r[G_d] for d | n.
    pub fn projection(&self, n: Level, d: Level) -> RingMap {
        assert!(d & !n == 0, "projection needs d | n");
        let g = self.gamma_factors();
        let mut fm: Vec<Option<usize>> = (0..g).map(Some).collect();
        fm.extend(primes_of(n).iter().map(|&q| self.factor_of(d, q)));
        RingMap::by_factors(&self.level_ring(n), &self.level_ring(d), &fm)
    }

    /// Projection of a master element to level n.
    pub fn project(&self, n: Level, x: &Sparse) -> GroupRingElem {
        let ring = self.level_ring(n);
        let g = ring.group();
        let gf = self.gamma_factors();
        let ps = primes_of(n);
        let mut out = ring.zero();
        let m = self.datum.modulus;
        for &(idx, c) in x {
            let e = self.master.exps(idx);
            let mut le: Vec<u64> = e[..gf].to_vec();
            le.extend(ps.iter().map(|&q| e[gf + q]));
            let j = g.index(&le);
            out[j] = (out[j] + c) % m;
        }
        out
    }

    /// λ_q = P_q(Fr_q^{-1}) with Fr_q ∈ H_{n∖q}, inside r[G_n].
    pub fn lambda(&self, q: usize, n: Level) -> GroupRingElem {
        let ring = self.level_ring(n);
        let g = ring.group();
        let gf = self.gamma_factors();
        let e = &self.datum.euler[q];
        let mut out = ring.zero();
        let m = self.datum.modulus;
        for (j, &c) in e.p_coeffs.iter().enumerate() {
            let mut exps = vec![0u64; g.nfactors()];
            for (k, &q2) in primes_of(n).iter().enumerate() {
                if q2 != q {
                    let ord = self.datum.prime_orders[q2];
                    exps[gf + k] = (ord - (j as u64 * e.frob_exps[q2]) % ord) % ord;
                }
            }
            let idx = g.index(&exps);
            out[idx] = (out[idx] + c) % m;
        }
        out
    }

    /// Lifted complex ψ̃_n over r[G_n].
    pub fn lifted_psi(&self, n: Level) -> RMatrix {
        let ring = self.level_ring(n);
        let d = self.datum.d;
        let m = self.datum.modulus;
        let mut psi = RMatrix::zeros(&ring, d, d);
        for q in 0..self.datum.s() {
            let col = self.datum.prime_column(q);
            match self.factor_of(n, q) {
                None => {
                    for j in 0..d {
                        psi.set(j, col, self.project(n, &self.lifts.v_lift[q][j]));
                    }
                }
                Some(k) => {
                    let lam = self.lambda(q, n);
                    let minus_one = [m - 1, 1];
                    for j in 0..d {
                        let a = self.project(n, &self.lifts.phi_lift[q][j]);
                        let w = self.project(n, &self.lifts.w[q][j]);
                        let mut x = ring.mul_axis_poly(&ring.add(&a, &w), k, &minus_one);
                        ring.add_assign(&mut x, &ring.mul(&lam, &self.project(n, &self.lifts.v_lift[q][j])));
                        psi.set(j, col, x);
                    }
                }
            }
        }
        for (lvl, row, col, x) in &self.lifts.patches {
            if *lvl == n {
                let mut e = psi.get(*row, *col).clone();
                let mut add = ring.zero();
                for &(i, c) in x {
                    add[i] = (add[i] + c) % m;
                }
                ring.add_assign(&mut e, &add);
                psi.set(*row, *col, e);
            }
        }
        psi
    }

    /// Coordinate u_n of the vertical determinantal system at level n.
    pub fn level_unit(&self, n: Level) -> GroupRingElem {
        self.project(n, &self.lifts.unit)
    }

    /// Bockstein components read off the prime column of ψ̃_n at q: for each
    /// q' | n in order, the functional H → R given by the y_{q'}-coefficient
    /// of the class in R ⊗ I_n/I_n².
    pub fn tower_bockstein(&self, n: Level, q: usize) -> Result<Vec<Vec<GroupRingElem>>, String> {
        self.tower_bockstein_of(&self.lifted_psi(n), n, q)
    }

    pub fn tower_bockstein_of(&self, psi: &RMatrix, n: Level, q: usize) -> Result<Vec<Vec<GroupRingElem>>, String> {
        if n & (1 << q) == 0 {
            return Err(format!("q{} does not divide {}", q + 1, crate::level_name(n)));
        }
        let ring = self.level_ring(n);
        let base = self.datum.ring();
        let ps = primes_of(n);
        let orders: Vec<u64> = ps.iter().map(|&q2| self.datum.prime_orders[q2]).collect();
        let gp = GradedPiece::new(&orders, 1, self.datum.modulus);
        let col = self.datum.prime_column(q);
        let d = self.datum.d;
        let mut out = vec![vec![base.zero(); d]; ps.len()];
        for j in 0..d {
            let cls = resolvent(&ring, self.gamma_factors(), &gp, &[psi.get(j, col).clone()])
                .map_err(|e| format!("entry ({j}, {col}) at level {}: {e}", crate::level_name(n)))?;
            for (k, _) in ps.iter().enumerate() {
                let mut mono = vec![0u32; ps.len()];
                mono[k] = 1;
                let t = gp.mono_index(&mono).expect("degree-one monomial") - gp.top_start();
                let mut x = base.zero();
                for (g, c) in cls[0].iter().enumerate() {
                    x[g] = c[t];
                }
                out[k][j] = x;
            }
        }
        Ok(out)
    }

    /// Components prescribed by the tables: φ^fs_q at q, P[q][q']·v_q at q' ≠ q.
    pub fn table_bockstein(&self, n: Level, q: usize) -> Vec<Vec<GroupRingElem>> {
        let base = self.datum.ring();
        let m = self.datum.modulus;
        primes_of(n)
            .iter()
            .map(|&q2| {
                if q2 == q {
                    self.datum.phi_fs[q].clone()
                } else {
                    self.datum.v[q].iter().map(|x| base.scale(x, self.datum.cross[q][q2] % m)).collect()
                }
            })
            .collect()
    }

    /// Index of Fr_q^{-1} in G_n.
    pub fn frobenius_inverse(&self, q: usize, n: Level) -> usize {
        let g = self.level_ring(n);
        let g = g.group();
        let gf = self.gamma_factors();
        let mut exps = vec![0u64; g.nfactors()];
        for (k, &q2) in primes_of(n).iter().enumerate() {
            if q2 != q {
                let ord = self.datum.prime_orders[q2];
                exps[gf + k] = (ord - self.datum.euler[q].frob_exps[q2] % ord) % ord;
            }
        }
        g.index(&exps)
    }
}
