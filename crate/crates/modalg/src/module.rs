use grouprings::{flatten_vec, translates, unflatten_vec, GroupRing, GroupRingElem};
use num_bigint::BigUint;
use zlin::{howell_rows, kernel, HowellForm, Solver, ZmMatrix};

use crate::ModAlgError;

/// Element of an FP module: R-coordinates on the generators, concatenated.
pub type Elem = Vec<u64>;

/// Smallest prime factor of m (m is a prime power throughout).
pub(crate) fn prime_of(m: u64) -> u64 {
    (2..=m).find(|d| m % d == 0).unwrap()
}

/// Block-diagonal copies of the given rows, `copies` times, in a space of
/// `copies * width` columns.
pub(crate) fn block_rows(rows: &[Vec<u64>], width: usize, copies: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(rows.len() * copies);
    for c in 0..copies {
        for r in rows {
            let mut v = vec![0; width * copies];
            v[c * width..(c + 1) * width].copy_from_slice(r);
            out.push(v);
        }
    }
    out
}

/// Finitely presented module R^g / (relations) over R = (Z/m)[G].
#[derive(Clone, Debug)]
pub struct FPModule {
    ring: GroupRing,
    ngens: usize,
    relations: Vec<Vec<GroupRingElem>>,
    rel: HowellForm,
}

impl FPModule {
    /// Redundant relations (already in the R-span of earlier ones) are dropped.
    pub fn new(ring: &GroupRing, ngens: usize, relations: Vec<Vec<GroupRingElem>>) -> Self {
        let n = ring.dim();
        let m = ring.modulus();
        let mut rel = HowellForm::zero(m, ngens * n);
        let mut kept = Vec::new();
        for r in relations {
            assert_eq!(r.len(), ngens, "relation length");
            let r: Vec<GroupRingElem> = r.into_iter().map(|mut x| {
                ring.reduce(&mut x);
                x
            }).collect();
            let flat = flatten_vec(ring, &r);
            if rel.contains(&flat) {
                continue;
            }
            rel = rel.with_rows(&translates(ring, &[r.clone()]));
            kept.push(r);
        }
        FPModule { ring: ring.clone(), ngens, relations: kept, rel }
    }

    /// Module given by flattened Z/m-relation rows whose span is already an R-submodule.
    pub fn from_flat_relations(ring: &GroupRing, ngens: usize, rows: Vec<Vec<u64>>) -> Self {
        let h = howell_rows(ring.modulus(), ngens * ring.dim(), rows);
        let rels: Vec<Vec<GroupRingElem>> = h.rows().iter().map(|r| unflatten_vec(ring, r)).collect();
        FPModule::new(ring, ngens, rels)
    }

    pub fn free(ring: &GroupRing, d: usize) -> Self {
        FPModule::new(ring, d, vec![])
    }

    pub fn zero(ring: &GroupRing) -> Self {
        FPModule::new(ring, 0, vec![])
    }

    pub fn ring(&self) -> &GroupRing {
        &self.ring
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &[Vec<GroupRingElem>] {
        &self.relations
    }

    pub fn relation_span(&self) -> &HowellForm {
        &self.rel
    }

    pub fn flat_dim(&self) -> usize {
        self.ngens * self.ring.dim()
    }

    pub fn relation_matrix(&self) -> grouprings::RMatrix {
        grouprings::RMatrix::from_rows(self.relations.clone(), self.ngens)
    }

    pub fn reduce(&self, x: &[u64]) -> Elem {
        self.rel.reduce(x)
    }

    pub fn eq_elem(&self, a: &[u64], b: &[u64]) -> bool {
        self.reduce(a) == self.reduce(b)
    }

    pub fn is_zero_elem(&self, a: &[u64]) -> bool {
        self.rel.contains(a)
    }

    pub fn zero_elem(&self) -> Elem {
        vec![0; self.flat_dim()]
    }

    pub fn gen(&self, i: usize) -> Elem {
        let mut v = self.zero_elem();
        v[i * self.ring.dim()] = 1;
        self.reduce(&v)
    }

    pub fn from_coords(&self, c: &[GroupRingElem]) -> Elem {
        assert_eq!(c.len(), self.ngens);
        self.reduce(&flatten_vec(&self.ring, c))
    }

    /// A lift of x to R^g.
    pub fn coords(&self, x: &[u64]) -> Vec<GroupRingElem> {
        unflatten_vec(&self.ring, x)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Elem {
        let m = self.ring.modulus();
        let s: Vec<u64> = a.iter().zip(b).map(|(&x, &y)| (x + y) % m).collect();
        self.reduce(&s)
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Elem {
        let m = self.ring.modulus();
        let s: Vec<u64> = a.iter().zip(b).map(|(&x, &y)| (x + m - y) % m).collect();
        self.reduce(&s)
    }

    pub fn neg(&self, a: &[u64]) -> Elem {
        let m = self.ring.modulus();
        self.reduce(&a.iter().map(|&x| (m - x) % m).collect::<Vec<_>>())
    }

    /// r·x for r ∈ R.
    pub fn act(&self, r: &[u64], x: &[u64]) -> Elem {
        let c: Vec<GroupRingElem> = self.coords(x).iter().map(|xi| self.ring.mul(r, xi)).collect();
        self.from_coords(&c)
    }

    /// g·x for a group element g.
    pub fn shift(&self, x: &[u64], g: usize) -> Elem {
        shift_flat(&self.ring, x, g)
    }

    /// Σ c_i x_i for R-coefficients c_i.
    pub fn combine(&self, coeffs: &[GroupRingElem], xs: &[Elem]) -> Elem {
        let mut acc = vec![0u64; self.flat_dim()];
        let m = self.ring.modulus();
        for (c, x) in coeffs.iter().zip(xs) {
            let y = self.act(c, x);
            for (a, b) in acc.iter_mut().zip(&y) {
                *a = (*a + b) % m;
            }
        }
        self.reduce(&acc)
    }

    /// log_p |X|.
    pub fn log_card(&self) -> u32 {
        let m = self.ring.modulus();
        let p = prime_of(m);
        let k = {
            let mut k = 0;
            let mut t = m;
            while t > 1 {
                t /= p;
                k += 1;
            }
            k
        };
        k * self.flat_dim() as u32 - self.rel.span_log(p)
    }

    pub fn cardinality(&self) -> BigUint {
        BigUint::from(prime_of(self.ring.modulus())).pow(self.log_card())
    }

    pub fn is_zero_module(&self) -> bool {
        self.log_card() == 0
    }

    /// Howell form of the R-submodule generated by the given elements, joined
    /// with the relation span.
    pub fn span_of(&self, xs: &[Elem]) -> HowellForm {
        let mut rows: Vec<Vec<u64>> = self.rel.rows().to_vec();
        for x in xs {
            for g in 0..self.ring.dim() {
                rows.push(self.shift(x, g));
            }
        }
        howell_rows(self.ring.modulus(), self.flat_dim(), rows)
    }

    /// Z/m-span of the listed elements plus relations (no R-closure).
    pub fn zspan_of(&self, xs: &[Elem]) -> HowellForm {
        let mut rows: Vec<Vec<u64>> = self.rel.rows().to_vec();
        rows.extend(xs.iter().cloned());
        howell_rows(self.ring.modulus(), self.flat_dim(), rows)
    }

    /// Enumerate all elements in canonical form. Only for tiny modules.
    pub fn elements(&self) -> Vec<Elem> {
        let m = self.ring.modulus();
        let dim = self.flat_dim();
        // The quotient is spanned by unit vectors; enumerate the coset
        // representatives by walking the complement of the Howell pivots.
        let mut bound = vec![m; dim];
        for (row, &p) in self.rel.rows().iter().zip(self.rel.pivots()) {
            bound[p] = row[p];
        }
        let total: u64 = bound.iter().product();
        assert!(total <= 1 << 20, "module too large to enumerate");
        let mut out = Vec::with_capacity(total as usize);
        let mut cur = vec![0u64; dim];
        loop {
            out.push(self.reduce(&cur));
            let mut i = 0;
            loop {
                if i == dim {
                    return out;
                }
                cur[i] += 1;
                if cur[i] < bound[i] {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    /// Z/m-generators of the invariants under the listed group elements.
    pub fn invariants(&self, group_elems: &[usize]) -> Vec<Elem> {
        let dim = self.flat_dim();
        let k = group_elems.len();
        if k == 0 {
            return (0..dim)
                .map(|i| {
                    let mut v = vec![0; dim];
                    v[i] = 1;
                    v
                })
                .collect();
        }
        let m = self.ring.modulus();
        // x ↦ ((g−1)x)_g, modulo relations in each copy.
        let mut rows = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut e = vec![0; dim];
            e[i] = 1;
            let mut row = Vec::with_capacity(dim * k);
            for &g in group_elems {
                let s = self.shift(&e, g);
                row.extend(s.iter().zip(&e).map(|(&a, &b)| (a + m - b) % m));
            }
            rows.push(row);
        }
        rows.extend(block_rows(self.rel.rows(), dim, k));
        let ker = kernel(&ZmMatrix::from_rows(m, dim * k, &rows));
        (0..ker.nrows())
            .map(|i| ker.row(i)[..dim].to_vec())
            .filter(|v| !self.is_zero_elem(v))
            .collect()
    }
}

pub(crate) fn shift_flat(ring: &GroupRing, x: &[u64], g: usize) -> Elem {
    let n = ring.dim();
    let mut out = Vec::with_capacity(x.len());
    for c in x.chunks(n) {
        out.extend(ring.shift(c, g));
    }
    out
}

/// R-linear map given by the images of the source generators.
#[derive(Clone, Debug)]
pub struct ModuleHom {
    src: FPModule,
    dst: FPModule,
    images: Vec<Elem>,
    flat: ZmMatrix,
}

impl ModuleHom {
    pub fn new(src: &FPModule, dst: &FPModule, images: Vec<Elem>) -> Result<Self, ModAlgError> {
        assert_eq!(images.len(), src.ngens());
        let images: Vec<Elem> = images.into_iter().map(|y| dst.reduce(&y)).collect();
        let ring = src.ring();
        let n = ring.dim();
        let mut rows = Vec::with_capacity(src.flat_dim());
        for y in &images {
            for g in 0..n {
                rows.push(dst.shift(y, g));
            }
        }
        let flat = ZmMatrix::from_rows(ring.modulus(), dst.flat_dim(), &rows);
        let h = ModuleHom { src: src.clone(), dst: dst.clone(), images, flat };
        for r in src.relations() {
            let img = h.apply_raw(&flatten_vec(ring, r));
            if !dst.is_zero_elem(&img) {
                return Err(ModAlgError::NotWellDefined);
            }
        }
        Ok(h)
    }

    pub fn identity(x: &FPModule) -> Self {
        let imgs = (0..x.ngens()).map(|i| x.gen(i)).collect();
        ModuleHom::new(x, x, imgs).unwrap()
    }

    pub fn src(&self) -> &FPModule {
        &self.src
    }

    pub fn dst(&self) -> &FPModule {
        &self.dst
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    /// Z/m matrix on flat coordinates: flat(f(x)) ≡ flat(x)·M.
    pub fn flat_matrix(&self) -> &ZmMatrix {
        &self.flat
    }

    fn apply_raw(&self, x: &[u64]) -> Elem {
        self.flat.vec_mul(x)
    }

    pub fn apply(&self, x: &[u64]) -> Elem {
        self.dst.reduce(&self.apply_raw(x))
    }

    pub fn compose(&self, after: &ModuleHom) -> ModuleHom {
        let imgs = self.images.iter().map(|y| after.apply(y)).collect();
        ModuleHom::new(&self.src, &after.dst, imgs).unwrap()
    }

    /// Z/m-generators of the kernel (reduced, nonzero).
    pub fn kernel_elems(&self) -> Vec<Elem> {
        let m = self.src.ring().modulus();
        let d = self.src.flat_dim();
        let mut rows: Vec<Vec<u64>> = (0..d).map(|i| self.flat.row(i).to_vec()).collect();
        rows.extend(self.dst.relation_span().rows().iter().cloned());
        let a = ZmMatrix::from_rows(m, self.dst.flat_dim(), &rows);
        let ker = kernel(&a);
        (0..ker.nrows())
            .map(|i| self.src.reduce(&ker.row(i)[..d]))
            .filter(|v| v.iter().any(|&c| c != 0))
            .collect()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_elems().is_empty()
    }

    pub fn image_span(&self) -> HowellForm {
        self.dst.zspan_of(&self.images.iter().flat_map(|y| (0..self.src.ring().dim()).map(move |g| (y, g))).map(|(y, g)| self.dst.shift(y, g)).collect::<Vec<_>>())
    }

    pub fn is_surjective(&self) -> bool {
        let p = prime_of(self.dst.ring().modulus());
        let span = self.image_span();
        let full = howell_rows(self.dst.ring().modulus(), self.dst.flat_dim(), (0..self.dst.flat_dim()).map(|i| {
            let mut v = vec![0; self.dst.flat_dim()];
            v[i] = 1;
            v
        }).collect());
        span.span_log(p) == full.span_log(p)
    }

    /// Solver for preimages: returns x with f(x) = y when it exists.
    pub fn preimage_solver(&self) -> PreimageSolver {
        let m = self.src.ring().modulus();
        let d = self.src.flat_dim();
        let mut rows: Vec<Vec<u64>> = (0..d).map(|i| self.flat.row(i).to_vec()).collect();
        rows.extend(self.dst.relation_span().rows().iter().cloned());
        let a = ZmMatrix::from_rows(m, self.dst.flat_dim(), &rows);
        PreimageSolver { solver: Solver::new(&a), d, src: self.src.clone() }
    }
}

pub struct PreimageSolver {
    solver: Solver,
    d: usize,
    src: FPModule,
}

impl PreimageSolver {
    pub fn solve(&self, y: &[u64]) -> Option<Elem> {
        self.solver.solve(y).map(|x| self.src.reduce(&x[..self.d]))
    }
}

/// R-submodule generated by the given elements, presented on a greedily
/// chosen generating subset, with its inclusion.
pub fn submodule(x: &FPModule, elems: &[Elem]) -> (FPModule, ModuleHom) {
    let ring = x.ring();
    let n = ring.dim();
    let m = ring.modulus();
    let mut span = x.relation_span().clone();
    let mut gens: Vec<Elem> = Vec::new();
    for e in elems {
        let e = x.reduce(e);
        if span.contains(&e) {
            continue;
        }
        let tr: Vec<Vec<u64>> = (0..n).map(|g| x.shift(&e, g)).collect();
        span = span.with_rows(&tr);
        gens.push(e);
    }
    let k = gens.len();
    let sub = if k == 0 {
        FPModule::zero(ring)
    } else {
        let mut rows = Vec::with_capacity(k * n + x.relation_span().rows().len());
        for y in &gens {
            for g in 0..n {
                rows.push(x.shift(y, g));
            }
        }
        rows.extend(x.relation_span().rows().iter().cloned());
        let a = ZmMatrix::from_rows(m, x.flat_dim(), &rows);
        let ker = kernel(&a);
        let rel_rows: Vec<Vec<u64>> = (0..ker.nrows()).map(|i| ker.row(i)[..k * n].to_vec()).collect();
        FPModule::from_flat_relations(ring, k, rel_rows)
    };
    let inc = ModuleHom::new(&sub, x, gens).unwrap();
    (sub, inc)
}

/// Quotient X / ⟨elems⟩.
pub fn quotient(x: &FPModule, elems: &[Elem]) -> FPModule {
    let mut rels: Vec<Vec<GroupRingElem>> = x.relations().to_vec();
    rels.extend(elems.iter().map(|e| x.coords(e)));
    FPModule::new(x.ring(), x.ngens(), rels)
}

/// Direct sum X ⊕ Y.
pub fn direct_sum(x: &FPModule, y: &FPModule) -> FPModule {
    let ring = x.ring();
    let mut rels = Vec::new();
    for r in x.relations() {
        let mut v = r.clone();
        v.extend(std::iter::repeat(ring.zero()).take(y.ngens()));
        rels.push(v);
    }
    for r in y.relations() {
        let mut v: Vec<GroupRingElem> = std::iter::repeat(ring.zero()).take(x.ngens()).collect();
        v.extend(r.iter().cloned());
        rels.push(v);
    }
    FPModule::new(ring, x.ngens() + y.ngens(), rels)
}
