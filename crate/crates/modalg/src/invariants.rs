use grouprings::{GroupRing, GroupRingElem, RingMap, SubgroupSpec};
use zlin::{kernel, Solver, ZmMatrix};

use crate::bidual::Bidual;
use crate::exterior::wedge_coords;
use crate::module::{prime_of, Elem, FPModule};
use crate::ModAlgError;

/// X^H as a module over R[G/H], with its embedding in X.
#[derive(Clone, Debug)]
pub struct InvariantSubmodule {
    pub quotient_ring: GroupRing,
    pub proj: RingMap,
    /// One lift in G of each element of G/H.
    pub lifts: Vec<usize>,
    pub module: FPModule,
    /// Images in X of the generators of `module`.
    pub embedding: Vec<Elem>,
}

pub fn invariant_submodule(x: &FPModule, h: &SubgroupSpec) -> InvariantSubmodule {
    let ring = x.ring();
    let (qring, proj) = RingMap::quotient(ring, h);
    let nq = qring.dim();
    let mut lifts = vec![usize::MAX; nq];
    for (g, &q) in proj.image.iter().enumerate() {
        if lifts[q] == usize::MAX {
            lifts[q] = g;
        }
    }
    let hgens = h.generators(ring.group());
    let inv = x.invariants(&hgens);
    let m = ring.modulus();

    let mut span = x.relation_span().clone();
    let mut gens: Vec<Elem> = Vec::new();
    for e in inv {
        let e = x.reduce(&e);
        if span.contains(&e) {
            continue;
        }
        let tr: Vec<Vec<u64>> = lifts.iter().map(|&g| x.shift(&e, g)).collect();
        span = span.with_rows(&tr);
        gens.push(e);
    }
    let k = gens.len();
    let module = if k == 0 {
        FPModule::zero(&qring)
    } else {
        let mut rows = Vec::new();
        for z in &gens {
            for &g in &lifts {
                rows.push(x.shift(z, g));
            }
        }
        rows.extend(x.relation_span().rows().iter().cloned());
        let ker = kernel(&ZmMatrix::from_rows(m, x.flat_dim(), &rows));
        let rel_rows = (0..ker.nrows()).map(|i| ker.row(i)[..k * nq].to_vec()).collect();
        FPModule::from_flat_relations(&qring, k, rel_rows)
    };
    InvariantSubmodule { quotient_ring: qring, proj, lifts, module, embedding: gens }
}

/// The identification ∩^r_{R[G/H]}(X^H) ≅ (∩^r_{R[G]} X)^H.
///
/// Forward: F ↦ (Φ ↦ N_H·F(∧^r res Φ)), where res restricts a functional on X
/// to X^H and divides its (H-invariant) values by N_H. The inverse is solved
/// on flat coordinates.
pub struct InvariantsIso {
    pub sub: InvariantSubmodule,
    pub bidual_x: Bidual,
    pub bidual_xh: Bidual,
    forward_rows: Vec<Vec<u64>>,
    solver: Solver,
    injective: bool,
    onto_invariants: bool,
}

impl InvariantsIso {
    pub fn new(x: &FPModule, h: &SubgroupSpec, r: usize) -> Result<Self, ModAlgError> {
        let ring = x.ring();
        let m = ring.modulus();
        let sub = invariant_submodule(x, h);
        let qring = &sub.quotient_ring;
        let bx = Bidual::new(x, r)?;
        let bh = Bidual::new(&sub.module, r)?;

        // res(f_j) in X^H's dual presentation.
        let dx_vals = bx.dual_gen_values();
        let res_coords: Vec<Vec<GroupRingElem>> = dx_vals
            .iter()
            .map(|vals| {
                let tuple: Vec<Elem> = sub
                    .embedding
                    .iter()
                    .map(|z| {
                        let cs = x.coords(z);
                        let mut acc = ring.zero();
                        for (c, v) in cs.iter().zip(vals) {
                            ring.add_assign(&mut acc, &ring.mul(c, v));
                        }
                        sub.lifts.iter().map(|&g| acc[g]).collect()
                    })
                    .collect();
                let hq = bh.dual().from_tuple(&tuple).ok_or(ModAlgError::NotWellDefined)?;
                Ok(bh.dual().module().coords(&hq))
            })
            .collect::<Result<_, ModAlgError>>()?;
        // ∧^r res on the basis wedges of ∧^r X*.
        let wedges: Vec<Vec<GroupRingElem>> = bx
            .exterior_dual()
            .subsets()
            .iter()
            .map(|s| {
                let vs: Vec<Vec<GroupRingElem>> = s.iter().map(|&j| res_coords[j].clone()).collect();
                wedge_coords(qring, &vs, bh.exterior_dual().subsets())
            })
            .collect();

        let src = bh.module();
        let mut forward_rows = Vec::with_capacity(src.flat_dim());
        for i in 0..src.flat_dim() {
            let mut e = vec![0u64; src.flat_dim()];
            e[i] = 1;
            let fv = bh.values(&e);
            let vals: Vec<GroupRingElem> = wedges
                .iter()
                .map(|w| {
                    let mut acc = qring.zero();
                    for (c, v) in w.iter().zip(&fv) {
                        qring.add_assign(&mut acc, &qring.mul(c, v));
                    }
                    sub.proj.image.iter().map(|&q| acc[q]).collect::<GroupRingElem>()
                })
                .collect();
            forward_rows.push(bx.from_values(&vals).ok_or(ModAlgError::NotWellDefined)?);
        }

        let tgt = bx.module();
        let mut stacked = forward_rows.clone();
        stacked.extend(tgt.relation_span().rows().iter().cloned());
        let a = ZmMatrix::from_rows(m, tgt.flat_dim(), &stacked);
        let ker = kernel(&a);
        let injective = (0..ker.nrows()).all(|i| src.is_zero_elem(&ker.row(i)[..src.flat_dim()]));

        let p = prime_of(m);
        let hgens = h.generators(ring.group());
        let invs = tgt.invariants(&hgens);
        let inv_span = tgt.zspan_of(&invs);
        let img_span = tgt.zspan_of(&forward_rows);
        let onto_invariants = inv_span.contains_all(&img_span) && inv_span.span_log(p) == img_span.span_log(p);
        Ok(InvariantsIso { sub, bidual_x: bx, bidual_xh: bh, forward_rows, solver: Solver::new(&a), injective, onto_invariants })
    }

    pub fn forward(&self, f: &[u64]) -> Elem {
        let tgt = self.bidual_x.module();
        let mm = tgt.ring().modulus();
        let mut acc = vec![0u64; tgt.flat_dim()];
        for (c, row) in f.iter().zip(&self.forward_rows) {
            if *c == 0 {
                continue;
            }
            for (a, b) in acc.iter_mut().zip(row) {
                *a = (*a + c * b) % mm;
            }
        }
        tgt.reduce(&acc)
    }

    pub fn inverse(&self, g: &[u64]) -> Option<Elem> {
        let src = self.bidual_xh.module();
        self.solver.solve(g).map(|x| src.reduce(&x[..src.flat_dim()]))
    }

    pub fn is_isomorphism(&self) -> bool {
        self.injective && self.onto_invariants
    }
}

pub fn invariants_identify(x: &FPModule, h: &SubgroupSpec, r: usize) -> Result<InvariantsIso, ModAlgError> {
    InvariantsIso::new(x, h, r)
}
