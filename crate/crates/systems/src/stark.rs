use complexes::{horizontal_transition, pi_map, DetElement, LocalBlock, StandardRep};
use grouprings::{translates, GroupRing, GroupRingElem, RMatrix};
use modalg::free::{dual_apply, wedge};
use modalg::{bidual_contract, bidual_inclusion, dual, left_kernel, submodule, subsets, AmbientBidual, Bidual, ExteriorPower, ModuleHom};
use selmer_sim::{all_levels, divides, level_name, nu, primes_of, Level, SelmerDatum};
use zlin::howell_rows;

use crate::{first_diff, linear_columns, pair_name, sub_levels, transition_sign, vec_eq, SystemsError};

/// A family ε_n ∈ ∩^{r+ν(n)} H¹_{F^n} ⊆ ∧^{r+ν(n)} R^d, indexed by level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarkSystem {
    pub r: usize,
    pub d: usize,
    pub levels: Vec<Vec<GroupRingElem>>,
}

impl StarkSystem {
    pub fn zero(datum: &SelmerDatum, r: usize) -> Self {
        let ring = datum.ring();
        let levels = all_levels(datum.s()).iter().map(|&n| vec![ring.zero(); coord_len(datum.d, r + nu(n))]).collect();
        StarkSystem { r, d: datum.d, levels }
    }

    pub fn level(&self, n: Level) -> &[GroupRingElem] {
        &self.levels[n as usize]
    }

    pub fn scale(&self, ring: &GroupRing, a: &[u64]) -> Self {
        let levels = self.levels.iter().map(|v| v.iter().map(|x| ring.mul(x, a)).collect()).collect();
        StarkSystem { r: self.r, d: self.d, levels }
    }

    pub fn add(&self, ring: &GroupRing, other: &StarkSystem) -> Self {
        let levels = self.levels.iter().zip(&other.levels).map(|(a, b)| a.iter().zip(b).map(|(x, y)| ring.add(x, y)).collect()).collect();
        StarkSystem { r: self.r, d: self.d, levels }
    }

    pub fn is_zero(&self, ring: &GroupRing) -> bool {
        self.levels.iter().all(|v| v.iter().all(|x| ring.is_zero(x)))
    }
}

fn coord_len(d: usize, k: usize) -> usize {
    if k > d {
        0
    } else {
        subsets(d, k).len()
    }
}

fn relaxed_functionals(datum: &SelmerDatum, n: Level) -> Vec<Vec<GroupRingElem>> {
    (0..datum.s()).filter(|q| n & (1 << q) == 0).map(|q| datum.v[q].clone()).collect()
}

fn relaxed_bidual(datum: &SelmerDatum, n: Level, k: usize) -> AmbientBidual {
    AmbientBidual::of_kernel(&datum.ring(), datum.d, k, &relaxed_functionals(datum, n))
}

/// v_{m,n} = sgn(m, n)·(∧_{q | m/n} v_q): ∩^{r+ν(m)} H¹_{F^m} → ∩^{r+ν(n)} H¹_{F^n}.
#[derive(Clone, Debug)]
pub struct VTransition {
    pub m: Level,
    pub n: Level,
    pub r: usize,
    d: usize,
    negative: bool,
    phi: Vec<GroupRingElem>,
}

pub fn v_transition(datum: &SelmerDatum, r: usize, m: Level, n: Level) -> Result<VTransition, SystemsError> {
    if !divides(n, m) {
        let (m, n) = pair_name(m, n);
        return Err(SystemsError::NotDivisor { m, n });
    }
    let ring = datum.ring();
    let funcs: Vec<Vec<GroupRingElem>> = primes_of(m & !n).iter().map(|&q| datum.v[q].clone()).collect();
    let phi = if funcs.is_empty() { vec![] } else { wedge(&ring, datum.d, &funcs) };
    Ok(VTransition { m, n, r, d: datum.d, negative: transition_sign(m, n), phi })
}

impl VTransition {
    /// (source degree, target degree).
    pub fn degrees(&self) -> (usize, usize) {
        (self.r + nu(self.m), self.r + nu(self.n))
    }

    pub fn apply(&self, ring: &GroupRing, a: &[GroupRingElem]) -> Vec<GroupRingElem> {
        let (km, kn) = self.degrees();
        if km == kn {
            return a.to_vec();
        }
        if km > self.d {
            return vec![ring.zero(); coord_len(self.d, kn)];
        }
        let out = dual_apply(ring, self.d, km - kn, km, &self.phi, a);
        if self.negative {
            out.iter().map(|x| ring.neg(x)).collect()
        } else {
            out
        }
    }

    /// The transition as a module map between the two biduals.
    pub fn hom(&self, datum: &SelmerDatum) -> Result<ModuleHom, SystemsError> {
        let ring = datum.ring();
        let (km, kn) = self.degrees();
        if km > self.d {
            return Err(SystemsError::Algebra(format!("degree {km} exceeds rank {}", self.d)));
        }
        let (src, inc_src) = relaxed_bidual(datum, self.m, km).module();
        let (dst, inc_dst) = relaxed_bidual(datum, self.n, kn).module();
        let solver = inc_dst.preimage_solver();
        let images = (0..src.ngens())
            .map(|i| {
                let x = inc_src.apply(&src.gen(i));
                let y = self.apply(&ring, &inc_src.dst().coords(&x));
                solver
                    .solve(&inc_dst.dst().from_coords(&y))
                    .ok_or_else(|| SystemsError::Algebra("transition leaves the target bidual".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        ModuleHom::new(&src, &dst, images).map_err(|e| SystemsError::Algebra(e.to_string()))
    }
}

/// Membership ε_n ∈ ∩^{r+ν(n)} H¹_{F^n} and v_{n,n/q}(ε_n) = ε_{n/q}.
pub fn is_stark(datum: &SelmerDatum, sys: &StarkSystem) -> Result<(), SystemsError> {
    let ring = datum.ring();
    for n in all_levels(datum.s()) {
        let k = sys.r + nu(n);
        if k <= datum.d {
            if let Some(c) = relaxed_bidual(datum, n, k).violated(sys.level(n)) {
                return Err(SystemsError::NotStark(format!("ε_{} violates constraint {c}", level_name(n))));
            }
        }
        for q in primes_of(n) {
            let lower = n & !(1 << q);
            let t = v_transition(datum, sys.r, n, lower)?;
            let img = t.apply(&ring, sys.level(n));
            if let Some(c) = first_diff(&ring, &img, sys.level(lower)) {
                return Err(SystemsError::NotStark(format!("v({}, {}) at coordinate {c}", level_name(n), level_name(lower))));
            }
        }
    }
    Ok(())
}

/// Structure of SS_r.
#[derive(Clone, Debug)]
pub struct StarkModule {
    /// log_p of the number of Stark systems.
    pub log_size: u32,
    /// log_p |R|.
    pub ring_log_size: u32,
    pub free_rank_one: bool,
    /// Number of generators found (after pruning).
    pub ngens: usize,
    /// Ambient generators; empty for the generic computation.
    pub gens: Vec<StarkSystem>,
    pub generator: Option<StarkSystem>,
}

fn ring_log(datum: &SelmerDatum) -> u32 {
    datum.params.k * datum.ring().dim() as u32
}

fn span_log(ring: &GroupRing, p: u64, width: usize, vecs: &[Vec<GroupRingElem>]) -> u32 {
    if vecs.is_empty() || width == 0 {
        return 0;
    }
    howell_rows(ring.modulus(), width * ring.dim(), translates(ring, vecs)).span_log(p)
}

/// SS_r(T, F). On regular data the computation stays inside ∧^• R^d; otherwise
/// it falls back to [`stark_module_generic`].
pub fn stark_module(datum: &SelmerDatum, r: usize) -> Result<StarkModule, SystemsError> {
    if !datum.is_regular() {
        return stark_module_generic(datum, r);
    }
    let ring = datum.ring();
    let d = datum.d;
    let levels = all_levels(datum.s());
    let lens: Vec<usize> = levels.iter().map(|&n| coord_len(d, r + nu(n))).collect();
    let mut offs = vec![0usize; lens.len() + 1];
    for i in 0..lens.len() {
        offs[i + 1] = offs[i] + lens[i];
    }
    let total = offs[lens.len()];
    let mut cols: Vec<Vec<GroupRingElem>> = Vec::new();
    for &n in &levels {
        let k = r + nu(n);
        if k > d || lens[n as usize] == 0 {
            continue;
        }
        let ab = relaxed_bidual(datum, n, k);
        for phi in ab.constraints() {
            for c in linear_columns(&ring, lens[n as usize], |e| dual_apply(&ring, d, 1, k, phi, e)) {
                let mut col = vec![ring.zero(); total];
                col[offs[n as usize]..offs[n as usize + 1]].clone_from_slice(&c);
                cols.push(col);
            }
        }
    }
    for &m in &levels {
        for n in sub_levels(m).filter(|&n| n != m) {
            let (lm, ln) = (lens[m as usize], lens[n as usize]);
            if ln == 0 {
                continue;
            }
            let t = v_transition(datum, r, m, n)?;
            let tc = if lm == 0 { vec![vec![]; ln] } else { linear_columns(&ring, lm, |e| t.apply(&ring, e)) };
            for (c, tcol) in tc.into_iter().enumerate() {
                let mut col = vec![ring.zero(); total];
                col[offs[m as usize]..offs[m as usize + 1]].clone_from_slice(&tcol);
                col[offs[n as usize] + c] = ring.neg(&ring.one());
                cols.push(col);
            }
        }
    }
    let sols = if total == 0 { vec![] } else { left_kernel(&ring, total, &cols) };
    let gens: Vec<StarkSystem> = sols
        .iter()
        .map(|v| StarkSystem { r, d, levels: (0..lens.len()).map(|i| v[offs[i]..offs[i + 1]].to_vec()).collect() })
        .collect();
    let log_size = span_log(&ring, datum.p(), total, &sols);
    let rl = ring_log(datum);
    let generator = if log_size == rl {
        gens.iter().find(|g| span_log(&ring, datum.p(), total, &[g.flat_levels()]) == rl).cloned()
    } else {
        None
    };
    Ok(StarkModule { log_size, ring_log_size: rl, free_rank_one: generator.is_some(), ngens: gens.len(), gens, generator })
}

impl StarkSystem {
    fn flat_levels(&self) -> Vec<GroupRingElem> {
        self.levels.iter().flatten().cloned().collect()
    }
}

/// SS_r computed with presented biduals: ∩^k X_n for X_n = H¹_{F^n} ⊆ H,
/// included into ∩^k H and compared through the generic contraction maps.
pub fn stark_module_generic(datum: &SelmerDatum, r: usize) -> Result<StarkModule, SystemsError> {
    let ring = datum.ring();
    let alg = |e: modalg::ModAlgError| SystemsError::Algebra(e.to_string());
    let h = datum.h_module();
    let dh = dual(&h);
    let levels = all_levels(datum.s());
    let maxk = r + datum.s();
    let bh: Vec<Bidual> = (0..=maxk).map(|k| Bidual::with_dual(&dh, k)).collect::<Result<_, _>>().map_err(alg)?;
    // Per level: generators of ∩^{k_n} X_n mapped into the value space of ∩^{k_n} H.
    let mut incl_vals: Vec<Vec<Vec<GroupRingElem>>> = Vec::new();
    for &n in &levels {
        let k = r + nu(n);
        let gens: Vec<Vec<u64>> = datum.relaxed_gens(n).iter().map(|g| h.from_coords(g)).collect();
        let (xn, inc) = submodule(&h, &gens);
        let bx = Bidual::new(&xn, k).map_err(alg)?;
        let iota = bidual_inclusion(&inc, &bx, &bh[k]).map_err(alg)?;
        let src = bx.module();
        incl_vals.push((0..src.ngens()).map(|i| bh[k].values(&iota.apply(&src.gen(i)))).collect());
    }
    let vlen: Vec<usize> = levels.iter().map(|&n| bh[r + nu(n)].module().ngens()).collect();
    let glen: Vec<usize> = incl_vals.iter().map(|v| v.len()).collect();
    let mut offs = vec![0usize; glen.len() + 1];
    for i in 0..glen.len() {
        offs[i + 1] = offs[i] + glen[i];
    }
    let total = offs[glen.len()];
    let mut cols: Vec<Vec<GroupRingElem>> = Vec::new();
    for &m in &levels {
        for n in sub_levels(m).filter(|&n| n != m) {
            let (km, kn) = (r + nu(m), r + nu(n));
            let t = km - kn;
            let ext = ExteriorPower::new(bh[km].dual().module(), t).map_err(alg)?;
            let funcs: Vec<Vec<GroupRingElem>> = primes_of(m & !n).iter().map(|&q| datum.v[q].clone()).collect();
            let mut phi = bh[km].dual_wedge(&ext, &funcs).map_err(alg)?;
            if transition_sign(m, n) {
                phi = ext.module().neg(&phi);
            }
            let c = bidual_contract(&bh[km], &bh[kn], &ext, &phi).map_err(alg)?;
            // Image under C of each generator of ∩^{k_m} X_m, as values.
            let imgs: Vec<Vec<GroupRingElem>> = incl_vals[m as usize]
                .iter()
                .map(|v| {
                    let f = bh[km].from_values(v).expect("included element");
                    bh[kn].values(&c.apply(&f))
                })
                .collect();
            for coord in 0..vlen[n as usize] {
                let mut col = vec![ring.zero(); total];
                for (i, img) in imgs.iter().enumerate() {
                    col[offs[m as usize] + i] = img[coord].clone();
                }
                for (i, v) in incl_vals[n as usize].iter().enumerate() {
                    col[offs[n as usize] + i] = ring.neg(&v[coord]);
                }
                cols.push(col);
            }
        }
    }
    let sols = if total == 0 { vec![] } else { left_kernel(&ring, total, &cols) };
    // Images of the solutions in ⊕_n values(∩^{k_n} H).
    let image = |a: &[GroupRingElem]| -> Vec<GroupRingElem> {
        let mut out = Vec::new();
        for (li, vals) in incl_vals.iter().enumerate() {
            let mut acc = vec![ring.zero(); vlen[li]];
            for (i, v) in vals.iter().enumerate() {
                let c = &a[offs[li] + i];
                if ring.is_zero(c) {
                    continue;
                }
                for (x, y) in acc.iter_mut().zip(v) {
                    ring.add_assign(x, &ring.mul(c, y));
                }
            }
            out.extend(acc);
        }
        out
    };
    let imgs: Vec<Vec<GroupRingElem>> = sols.iter().map(|s| image(s)).collect();
    let width: usize = vlen.iter().sum();
    let log_size = span_log(&ring, datum.p(), width, &imgs);
    let rl = ring_log(datum);
    let free = log_size == rl && imgs.iter().any(|g| span_log(&ring, datum.p(), width, &[g.clone()]) == rl);
    let ngens = modalg::prune_generators(&ring, width, imgs).len();
    Ok(StarkModule { log_size, ring_log_size: rl, free_rank_one: free, ngens, gens: vec![], generator: None })
}

/// The constant horizontal family: coordinate `unit` at every level.
pub fn horizontal_family(datum: &SelmerDatum, unit: &GroupRingElem) -> Vec<DetElement> {
    all_levels(datum.s()).iter().map(|&n| DetElement::new(format!("C_{}", level_name(n)), unit.clone())).collect()
}

/// ε_n = Π(z_n) for the level complex, with X_n = R^{r+ν(n)} on the n-prime
/// coordinates followed by the first r.
pub fn epsilon_at(datum: &SelmerDatum, n: Level, z: &DetElement) -> Result<Vec<GroupRingElem>, SystemsError> {
    let c = datum.level_complex(n)?;
    let ring = datum.ring();
    let (d, r) = (datum.d, datum.r());
    let ps = primes_of(n);
    let mut f = RMatrix::zeros(&ring, d, r + ps.len());
    for (i, &q) in ps.iter().enumerate() {
        f.set(datum.prime_column(q), i, ring.one());
    }
    for i in 0..r {
        f.set(i, ps.len() + i, ring.one());
    }
    let mut order: Vec<usize> = ps.iter().map(|&q| datum.prime_column(q)).collect();
    order.extend(0..r);
    order.extend((0..datum.s()).filter(|q| n & (1 << q) == 0).map(|q| datum.prime_column(q)));
    let rows: Vec<Vec<GroupRingElem>> = order
        .iter()
        .map(|&j| {
            let mut e = vec![ring.zero(); d];
            e[j] = ring.one();
            e
        })
        .collect();
    let rep = StandardRep::new(&c, f, RMatrix::from_rows(rows, d)).map_err(|e| SystemsError::Algebra(e.to_string()))?;
    Ok(pi_map(&rep, z))
}

/// ε = Π(z) for a horizontally compatible family z of determinant elements.
pub fn stark_from_horizontal(datum: &SelmerDatum, z: &[DetElement]) -> Result<StarkSystem, SystemsError> {
    datum.require_regular()?;
    let levels = all_levels(datum.s());
    if z.len() != levels.len() {
        return Err(SystemsError::Algebra(format!("expected {} levels, got {}", levels.len(), z.len())));
    }
    let ring = datum.ring();
    let complexes: Vec<_> = levels.iter().map(|&n| datum.level_complex(n)).collect::<Result<_, _>>()?;
    for &n in &levels {
        for q in primes_of(n) {
            let lower = n & !(1 << q);
            let block = LocalBlock { column: datum.prime_column(q), scalar: ring.one() };
            let moved = horizontal_transition(&complexes[n as usize], &complexes[lower as usize], &[block], &z[n as usize], "")
                .map_err(|e| SystemsError::Algebra(e.to_string()))?;
            if !vec_eq(&ring, &[moved.coord], &[z[lower as usize].coord.clone()]) {
                let (m, n) = pair_name(n, lower);
                return Err(SystemsError::IncompatibleFamily { m, n });
            }
        }
    }
    let levels_eps = levels.iter().map(|&n| epsilon_at(datum, n, &z[n as usize])).collect::<Result<_, _>>()?;
    let sys = StarkSystem { r: datum.r(), d: datum.d, levels: levels_eps };
    is_stark(datum, &sys)?;
    Ok(sys)
}
