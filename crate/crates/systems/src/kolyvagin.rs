use grouprings::{GradedPiece, GroupRing, GroupRingElem};
use modalg::free::{dual_apply, wedge};
use modalg::{subsets, AmbientBidual};
use rand::Rng;
use selmer_sim::{all_levels, level_name, nu, primes_of, Level, SelmerDatum, TowerDatum};

use crate::{first_diff, permutations, StarkSystem, SystemsError};

/// A collection κ_n ∈ ∧^r R^d indexed by level, with G_n trivialized via the
/// chosen generators σ_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KolyvaginCollection {
    pub r: usize,
    pub d: usize,
    pub levels: Vec<Vec<GroupRingElem>>,
}

impl KolyvaginCollection {
    pub fn zero(datum: &SelmerDatum) -> Self {
        let ring = datum.ring();
        let len = subsets(datum.d, datum.r()).len();
        KolyvaginCollection { r: datum.r(), d: datum.d, levels: vec![vec![ring.zero(); len]; 1 << datum.s()] }
    }

    pub fn level(&self, n: Level) -> &[GroupRingElem] {
        &self.levels[n as usize]
    }

    pub fn scale(&self, ring: &GroupRing, a: &[u64]) -> Self {
        let levels = self.levels.iter().map(|v| v.iter().map(|x| ring.mul(x, a)).collect()).collect();
        KolyvaginCollection { levels, ..self.clone() }
    }

    pub fn is_zero(&self, ring: &GroupRing) -> bool {
        self.levels.iter().all(|v| v.iter().all(|x| ring.is_zero(x)))
    }

    /// First (level, coordinate) where the two collections differ.
    pub fn first_difference(&self, ring: &GroupRing, other: &Self) -> Option<(Level, usize)> {
        self.levels
            .iter()
            .zip(&other.levels)
            .enumerate()
            .find_map(|(n, (a, b))| first_diff(ring, a, b).map(|c| (n as Level, c)))
    }
}

/// Uniformly random coordinates at every level.
pub fn random_collection(datum: &SelmerDatum, rng: &mut impl Rng) -> KolyvaginCollection {
    let ring = datum.ring();
    let len = subsets(datum.d, datum.r()).len();
    let m = datum.modulus;
    let levels = (0..1usize << datum.s())
        .map(|_| (0..len).map(|_| (0..ring.dim()).map(|_| rng.gen_range(0..m)).collect()).collect())
        .collect();
    KolyvaginCollection { r: datum.r(), d: datum.d, levels }
}

fn negate_if(ring: &GroupRing, v: Vec<GroupRingElem>, neg: bool) -> Vec<GroupRingElem> {
    if neg {
        v.iter().map(|x| ring.neg(x)).collect()
    } else {
        v
    }
}

/// κ_n = (−1)^{ν(n)} (∧_{q | n} φ^fs_q)(ε_n).
pub fn regulator(datum: &SelmerDatum, eps: &StarkSystem) -> KolyvaginCollection {
    let ring = datum.ring();
    let (d, r) = (datum.d, eps.r);
    let levels = all_levels(datum.s())
        .iter()
        .map(|&n| {
            let k = nu(n);
            if k == 0 {
                return eps.level(n).to_vec();
            }
            let funcs: Vec<Vec<GroupRingElem>> = primes_of(n).iter().map(|&q| datum.phi_fs[q].clone()).collect();
            let out = dual_apply(&ring, d, k, r + k, &wedge(&ring, d, &funcs), eps.level(n));
            negate_if(&ring, out, k % 2 == 1)
        })
        .collect();
    KolyvaginCollection { r, d, levels }
}

fn apply_functional(ring: &GroupRing, d: usize, r: usize, phi: &[GroupRingElem], a: &[GroupRingElem]) -> Vec<GroupRingElem> {
    dual_apply(ring, d, 1, r, phi, a)
}

/// κ_n ∈ ∩^r H¹_{F(n)} and v_q(κ_n) = φ^fs_q(κ_{n/q}) for q | n.
pub fn is_kolyvagin(datum: &SelmerDatum, k: &KolyvaginCollection) -> Result<(), SystemsError> {
    let ring = datum.ring();
    let (d, r) = (datum.d, k.r);
    for n in all_levels(datum.s()) {
        let ab = AmbientBidual::of_kernel(&ring, d, r, &datum.strict_functionals(n));
        if let Some(c) = ab.violated(k.level(n)) {
            return Err(SystemsError::NotKS(format!("κ_{} leaves the Selmer bidual (constraint {c})", level_name(n))));
        }
        if r == 0 {
            continue;
        }
        for q in primes_of(n) {
            let lower = n & !(1 << q);
            let lhs = apply_functional(&ring, d, r, &datum.v[q], k.level(n));
            let rhs = apply_functional(&ring, d, r, &datum.phi_fs[q], k.level(lower));
            if let Some(c) = first_diff(&ring, &lhs, &rhs) {
                return Err(SystemsError::NotKS(format!("(n, q) = ({}, q{}) at coordinate {c}", level_name(n), q + 1)));
            }
        }
    }
    Ok(())
}

/// κ'_n ∈ ∩^r H¹_{F^n}, φ^fs_q(κ'_{n/q}) = v_q(κ'_n), and Ψ(κ')_n ∈ ∩^r H¹_{F(n)}.
pub fn is_dks(datum: &SelmerDatum, k: &KolyvaginCollection) -> Result<(), SystemsError> {
    let ring = datum.ring();
    let (d, r) = (datum.d, k.r);
    let image = psi_raw(datum, k);
    for n in all_levels(datum.s()) {
        let outside: Vec<Vec<GroupRingElem>> = (0..datum.s()).filter(|q| n & (1 << q) == 0).map(|q| datum.v[q].clone()).collect();
        if let Some(c) = AmbientBidual::of_kernel(&ring, d, r, &outside).violated(k.level(n)) {
            return Err(SystemsError::NotDKS(format!("κ'_{} leaves the relaxed bidual (constraint {c})", level_name(n))));
        }
        if r > 0 {
            for q in primes_of(n) {
                let lower = n & !(1 << q);
                let lhs = apply_functional(&ring, d, r, &datum.phi_fs[q], k.level(lower));
                let rhs = apply_functional(&ring, d, r, &datum.v[q], k.level(n));
                if let Some(c) = first_diff(&ring, &lhs, &rhs) {
                    return Err(SystemsError::NotDKS(format!("(n, q) = ({}, q{}) at coordinate {c}", level_name(n), q + 1)));
                }
            }
        }
        if let Some(c) = AmbientBidual::of_kernel(&ring, d, r, &datum.strict_functionals(n)).violated(image.level(n)) {
            return Err(SystemsError::NotDKS(format!("Ψ(κ')_{} leaves the Selmer bidual (constraint {c})", level_name(n))));
        }
    }
    Ok(())
}

/// Terms of Ψ at level n: (d_τ, signed coefficient) for τ ∈ S(n), skipping the identity if asked.
fn psi_terms(datum: &SelmerDatum, n: Level, skip_identity: bool) -> Vec<(Level, u64)> {
    let m = datum.modulus;
    let ps = primes_of(n);
    let mut out = Vec::new();
    for (perm, odd) in permutations(ps.len()) {
        let fixed: Level = ps.iter().enumerate().filter(|(i, _)| perm[*i] == *i).fold(0, |acc, (_, &q)| acc | (1 << q));
        if skip_identity && fixed == n {
            continue;
        }
        let mut c = 1u64;
        for (i, &q) in ps.iter().enumerate() {
            if perm[i] != i {
                c = c * (datum.cross[ps[perm[i]]][q] % m) % m;
            }
        }
        if odd {
            c = (m - c) % m;
        }
        if c != 0 {
            out.push((fixed, c));
        }
    }
    out
}

/// Ψ(κ')_n = Σ_{τ ∈ S(n)} sgn(τ) ∏_{τ(q) ≠ q} P[τ(q)][q] · κ'_{d_τ}, d_τ the fixed primes.
pub fn psi_raw(datum: &SelmerDatum, k: &KolyvaginCollection) -> KolyvaginCollection {
    let ring = datum.ring();
    let levels = all_levels(datum.s())
        .iter()
        .map(|&n| {
            let mut acc = vec![ring.zero(); k.level(n).len()];
            for (dt, c) in psi_terms(datum, n, false) {
                for (x, y) in acc.iter_mut().zip(k.level(dt)) {
                    ring.axpy(x, c, y);
                }
            }
            acc
        })
        .collect();
    KolyvaginCollection { levels, ..k.clone() }
}

/// Inverse of [`psi_raw`], solved level by level in increasing order.
pub fn psi_inv_raw(datum: &SelmerDatum, k: &KolyvaginCollection) -> KolyvaginCollection {
    let ring = datum.ring();
    let m = datum.modulus;
    let mut out = k.clone();
    for n in all_levels(datum.s()) {
        let mut acc = k.level(n).to_vec();
        for (dt, c) in psi_terms(datum, n, true) {
            let lower = out.levels[dt as usize].clone();
            for (x, y) in acc.iter_mut().zip(&lower) {
                ring.axpy(x, (m - c) % m, y);
            }
        }
        out.levels[n as usize] = acc;
    }
    out
}

/// Ψ : KS' → KS, refusing input that is not a derived system.
pub fn psi(datum: &SelmerDatum, k: &KolyvaginCollection) -> Result<KolyvaginCollection, SystemsError> {
    is_dks(datum, k)?;
    Ok(psi_raw(datum, k))
}

/// Ψ⁻¹ : KS → KS', refusing input that is not a Kolyvagin system.
pub fn psi_inv(datum: &SelmerDatum, k: &KolyvaginCollection) -> Result<KolyvaginCollection, SystemsError> {
    is_kolyvagin(datum, k)?;
    Ok(psi_inv_raw(datum, k))
}

/// Bockstein φ^n_q : H¹ → R ⊗ I_n/I_n², one functional on R^d per q' | n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bockstein {
    pub n: Level,
    pub q: usize,
    pub components: Vec<Vec<GroupRingElem>>,
}

impl Bockstein {
    /// (φ^n_q(x))_{q'} for x ∈ R^d.
    pub fn apply(&self, ring: &GroupRing, x: &[GroupRingElem]) -> Vec<GroupRingElem> {
        self.components.iter().map(|f| modalg::pair(ring, f, x)).collect()
    }
}

/// Components from the tables: φ^fs_q at q and P[q][q']·v_q at q' ≠ q.
pub fn bockstein_map(datum: &SelmerDatum, n: Level, q: usize) -> Result<Bockstein, SystemsError> {
    if n & (1 << q) == 0 {
        return Err(SystemsError::NotDivisor { m: level_name(n), n: format!("q{}", q + 1) });
    }
    let ring = datum.ring();
    let m = datum.modulus;
    let components = primes_of(n)
        .iter()
        .map(|&q2| if q2 == q { datum.phi_fs[q].clone() } else { datum.v[q].iter().map(|x| ring.scale(x, datum.cross[q][q2] % m)).collect() })
        .collect();
    Ok(Bockstein { n, q, components })
}

/// The Bockstein read off the lifted complex, checked against the tables.
pub fn bockstein_from_tower(tower: &TowerDatum, n: Level, q: usize) -> Result<Bockstein, SystemsError> {
    let table = bockstein_map(&tower.datum, n, q)?;
    let components = tower.tower_bockstein(n, q).map_err(SystemsError::TowerStructure)?;
    let ring = tower.datum.ring();
    for (k, (a, b)) in components.iter().zip(&table.components).enumerate() {
        if let Some(j) = first_diff(&ring, a, b) {
            let q2 = primes_of(n)[k];
            return Err(SystemsError::TowerMismatch(format!("level {}, q{}, component q{}, row {j}", level_name(n), q + 1, q2 + 1)));
        }
    }
    Ok(Bockstein { n, q, components })
}

/// (∧_{q | n} φ^n_q)(a) in R^d-coordinates ⊗ gr_ν: for every output
/// coordinate and γ ∈ Γ, the reduced class over the degree-ν monomials.
/// `bock[j][k]` is the y_{q_k}-component of φ^n_{q_j}.
pub(crate) fn wedge_class(
    datum: &SelmerDatum,
    n: Level,
    bock: &[Vec<Vec<GroupRingElem>>],
    a: &[GroupRingElem],
    kdeg: usize,
) -> (GradedPiece, Vec<Vec<Vec<u64>>>) {
    let ring = datum.ring();
    let d = datum.d;
    let ps = primes_of(n);
    let t = ps.len();
    let orders: Vec<u64> = ps.iter().map(|&q| datum.prime_orders[q]).collect();
    let gp = GradedPiece::new(&orders, t, datum.modulus);
    let out_len = subsets(d, kdeg - t).len();
    let mut acc = vec![vec![ring.zero(); gp.dim()]; out_len];
    let mut tau = vec![0usize; t];
    loop {
        let mut alpha = vec![0u32; t];
        for &x in &tau {
            alpha[x] += 1;
        }
        let idx = gp.mono_index(&alpha).expect("degree-ν monomial") - gp.top_start();
        let funcs: Vec<Vec<GroupRingElem>> = (0..t).map(|j| bock[j][tau[j]].clone()).collect();
        let term = dual_apply(&ring, d, t, kdeg, &wedge(&ring, d, &funcs), a);
        for (c, x) in term.iter().enumerate() {
            ring.add_assign(&mut acc[c][idx], x);
        }
        // next function τ : {0..t} → {0..t}
        let mut j = 0;
        while j < t {
            tau[j] += 1;
            if tau[j] < t {
                break;
            }
            tau[j] = 0;
            j += 1;
        }
        if j == t {
            break;
        }
    }
    let classes = acc
        .iter()
        .map(|mons| (0..ring.dim()).map(|g| gp.reduce(&mons.iter().map(|x| x[g]).collect::<Vec<_>>())).collect())
        .collect();
    (gp, classes)
}

/// κ'_n = (−1)^{ν(n)} s_n((∧_{q | n} φ^n_q)(ε_n)) read on ∏(σ_q − 1), Bocksteins from the tables.
pub fn us_to_dks(datum: &SelmerDatum, eps: &StarkSystem) -> KolyvaginCollection {
    us_to_dks_with(datum, eps, |n, q| bockstein_map(datum, n, q)).expect("table Bocksteins exist")
}

/// As [`us_to_dks`] with the Bocksteins supplied by the caller.
pub fn us_to_dks_with(
    datum: &SelmerDatum,
    eps: &StarkSystem,
    bockstein: impl Fn(Level, usize) -> Result<Bockstein, SystemsError>,
) -> Result<KolyvaginCollection, SystemsError> {
    let m = datum.modulus;
    let mut levels = Vec::new();
    for n in all_levels(datum.s()) {
        let t = nu(n);
        if t == 0 {
            levels.push(eps.level(n).to_vec());
            continue;
        }
        let bock: Vec<Vec<Vec<GroupRingElem>>> =
            primes_of(n).iter().map(|&q| bockstein(n, q).map(|b| b.components)).collect::<Result<_, _>>()?;
        let (gp, classes) = wedge_class(datum, n, &bock, eps.level(n), eps.r + t);
        let pure = gp.pure_index().expect("pure monomial");
        let level: Vec<GroupRingElem> = classes
            .iter()
            .map(|per_g| {
                per_g
                    .iter()
                    .map(|cls| {
                        let v = gp.s_projector(cls)[pure];
                        if t % 2 == 1 {
                            (m - v) % m
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        levels.push(level);
    }
    Ok(KolyvaginCollection { r: eps.r, d: datum.d, levels })
}
