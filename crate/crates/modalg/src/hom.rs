use grouprings::GroupRingElem;
use zlin::{howell_rows, kernel, Solver, ZmMatrix};

use crate::module::{block_rows, shift_flat, Elem, FPModule};

/// Hom_R(X, Y) with an R-presentation and the maps it stands for.
///
/// A homomorphism is recorded by its tuple of images of the generators of X;
/// the presentation's generators are a greedy R-generating set of the
/// solution space of the relation constraints.
#[derive(Clone)]
pub struct HomModule {
    module: FPModule,
    src: FPModule,
    dst: FPModule,
    gen_maps: Vec<Elem>,
    solver: std::sync::Arc<Solver>,
}

impl std::fmt::Debug for HomModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HomModule").field("module", &self.module).field("gen_maps", &self.gen_maps).finish()
    }
}

impl HomModule {
    pub fn new(src: &FPModule, dst: &FPModule) -> Self {
        let ring = src.ring();
        let m = ring.modulus();
        let n = ring.dim();
        let gx = src.ngens();
        let w = dst.flat_dim();
        let t = gx * w;
        let rels = src.relations();

        // Candidate tuples: Z/m-generators of {y : Σ ρ_i y_i ∈ Rel_Y for every relation ρ}.
        let candidates: Vec<Vec<u64>> = if rels.is_empty() || t == 0 {
            (0..t)
                .map(|i| {
                    let mut v = vec![0; t];
                    v[i] = 1;
                    v
                })
                .collect()
        } else {
            let nr = rels.len();
            let mut rows = Vec::with_capacity(t + nr * dst.relation_span().rows().len());
            for i in 0..gx {
                for j in 0..dst.ngens() {
                    for g in 0..n {
                        let mut row = vec![0u64; nr * w];
                        for (ri, rho) in rels.iter().enumerate() {
                            for (h, &c) in rho[i].iter().enumerate() {
                                if c != 0 {
                                    row[ri * w + j * n + ring.group().add(g, h)] = c;
                                }
                            }
                        }
                        rows.push(row);
                    }
                }
            }
            rows.extend(block_rows(dst.relation_span().rows(), w, nr));
            let ker = kernel(&ZmMatrix::from_rows(m, nr * w, &rows));
            (0..ker.nrows()).map(|i| ker.row(i)[..t].to_vec()).collect()
        };

        let trivial = block_rows(dst.relation_span().rows(), w, gx);
        let mut span = howell_rows(m, t, trivial.clone());
        let mut gens: Vec<Elem> = Vec::new();
        for c in candidates {
            if span.contains(&c) {
                continue;
            }
            let tr: Vec<Vec<u64>> = (0..n).map(|g| shift_flat(ring, &c, g)).collect();
            span = span.with_rows(&tr);
            gens.push(c);
        }

        let k = gens.len();
        let mut rows = Vec::with_capacity(k * n + trivial.len());
        for y in &gens {
            for g in 0..n {
                rows.push(shift_flat(ring, y, g));
            }
        }
        rows.extend(trivial);
        let a = ZmMatrix::from_rows(m, t, &rows);
        let module = if k == 0 {
            FPModule::zero(ring)
        } else {
            let ker = kernel(&a);
            let rel_rows = (0..ker.nrows()).map(|i| ker.row(i)[..k * n].to_vec()).collect();
            FPModule::from_flat_relations(ring, k, rel_rows)
        };
        HomModule { module, src: src.clone(), dst: dst.clone(), gen_maps: gens, solver: std::sync::Arc::new(Solver::new(&a)) }
    }

    pub fn module(&self) -> &FPModule {
        &self.module
    }

    pub fn src(&self) -> &FPModule {
        &self.src
    }

    pub fn dst(&self) -> &FPModule {
        &self.dst
    }

    /// Images of the source generators under the j-th generator.
    pub fn gen_tuple(&self, j: usize) -> Vec<Elem> {
        self.split(&self.gen_maps[j])
    }

    fn split(&self, flat: &[u64]) -> Vec<Elem> {
        let w = self.dst.flat_dim();
        (0..self.src.ngens()).map(|i| self.dst.reduce(&flat[i * w..(i + 1) * w])).collect()
    }

    /// Images of the source generators under h.
    pub fn to_tuple(&self, h: &[u64]) -> Vec<Elem> {
        let ring = self.src.ring();
        let n = ring.dim();
        let m = ring.modulus();
        let t = self.src.ngens() * self.dst.flat_dim();
        let mut acc = vec![0u64; t];
        for (j, y) in self.gen_maps.iter().enumerate() {
            for g in 0..n {
                let c = h[j * n + g];
                if c == 0 {
                    continue;
                }
                let s = shift_flat(ring, y, g);
                for (a, b) in acc.iter_mut().zip(&s) {
                    *a = (*a + c * b) % m;
                }
            }
        }
        self.split(&acc)
    }

    /// The element sending generator i of X to `tuple[i]`, if that is a homomorphism.
    pub fn from_tuple(&self, tuple: &[Elem]) -> Option<Elem> {
        let flat: Vec<u64> = tuple.iter().flat_map(|y| y.iter().copied()).collect();
        let k = self.module.ngens() * self.src.ring().dim();
        self.solver.solve(&flat).map(|x| self.module.reduce(&x[..k]))
    }

    /// h(x).
    pub fn evaluate(&self, h: &[u64], x: &[u64]) -> Elem {
        let ys = self.to_tuple(h);
        let cs: Vec<GroupRingElem> = self.src.coords(x);
        self.dst.combine(&cs, &ys)
    }
}

/// X* = Hom_R(X, R).
pub fn dual(x: &FPModule) -> HomModule {
    HomModule::new(x, &FPModule::free(x.ring(), 1))
}

pub fn hom_module(x: &FPModule, y: &FPModule) -> HomModule {
    HomModule::new(x, y)
}
