//! Biduals of submodules of a free module R^d, kept inside ∧^k R^d.
//!
//! For X ⊆ R^d over a self-injective R, ∩^k X is identified with
//! {a ∈ ∧^k R^d : φ(a) = 0 for every φ ∈ X^⊥}, where X^⊥ ⊆ (R^d)* is the
//! annihilator of X. Elements are plain coordinate vectors over the k-subsets.

use grouprings::{flatten_vec, unflatten_vec, GroupRing, GroupRingElem};
use zlin::{kernel, HowellForm, ZmMatrix};

use crate::exterior::free::dual_apply;
use crate::exterior::subsets;
use crate::module::{submodule, FPModule, ModuleHom};

/// Greedy R-generating subset of a list of vectors in R^d.
pub fn prune_generators(ring: &GroupRing, d: usize, vecs: Vec<Vec<GroupRingElem>>) -> Vec<Vec<GroupRingElem>> {
    let n = ring.dim();
    let mut span = HowellForm::zero(ring.modulus(), d * n);
    let mut out = Vec::new();
    for v in vecs {
        let flat = flatten_vec(ring, &v);
        if span.contains(&flat) {
            continue;
        }
        let tr: Vec<Vec<u64>> = (0..n).map(|g| v.iter().flat_map(|x| ring.shift(x, g)).collect()).collect();
        span = span.with_rows(&tr);
        out.push(v);
    }
    out
}

/// R-generators of {x ∈ R^d : Σ_u x_u·c_u = 0 for every column vector c},
/// where `cols[k][u]` is the u-th entry of the k-th column.
pub fn left_kernel(ring: &GroupRing, d: usize, cols: &[Vec<GroupRingElem>]) -> Vec<Vec<GroupRingElem>> {
    let n = ring.dim();
    let m = ring.modulus();
    if cols.is_empty() {
        return (0..d)
            .map(|i| {
                let mut v = vec![ring.zero(); d];
                v[i] = ring.one();
                v
            })
            .collect();
    }
    // Row (u, g) of the flat matrix is the image of g·e_u.
    let mut rows = Vec::with_capacity(d * n);
    for u in 0..d {
        for g in 0..n {
            let row: Vec<u64> = cols.iter().flat_map(|c| ring.shift(&c[u], g)).collect();
            rows.push(row);
        }
    }
    let ker = kernel(&ZmMatrix::from_rows(m, cols.len() * n, &rows));
    let vecs: Vec<Vec<GroupRingElem>> = (0..ker.nrows()).map(|i| unflatten_vec(ring, ker.row(i))).collect();
    prune_generators(ring, d, vecs)
}

/// X^⊥ for X = span(gens) ⊆ R^d, as functionals given by coordinate rows.
pub fn annihilator(ring: &GroupRing, d: usize, gens: &[Vec<GroupRingElem>]) -> Vec<Vec<GroupRingElem>> {
    left_kernel(ring, d, gens)
}

/// φ(x) = Σ_u φ_u x_u.
pub fn pair(ring: &GroupRing, phi: &[GroupRingElem], x: &[GroupRingElem]) -> GroupRingElem {
    let mut acc = ring.zero();
    for (a, b) in phi.iter().zip(x) {
        ring.add_assign(&mut acc, &ring.mul(a, b));
    }
    acc
}

/// ∩^k X inside ∧^k R^d, cut out by generators of X^⊥.
#[derive(Clone, Debug)]
pub struct AmbientBidual {
    ring: GroupRing,
    d: usize,
    k: usize,
    constraints: Vec<Vec<GroupRingElem>>,
}

impl AmbientBidual {
    pub fn new(ring: &GroupRing, d: usize, k: usize, annihilator: Vec<Vec<GroupRingElem>>) -> Self {
        assert!(k <= d);
        AmbientBidual { ring: ring.clone(), d, k, constraints: annihilator }
    }

    /// X given by R-generators.
    pub fn of_span(ring: &GroupRing, d: usize, k: usize, gens: &[Vec<GroupRingElem>]) -> Self {
        AmbientBidual::new(ring, d, k, annihilator(ring, d, gens))
    }

    /// X = ∩ ker φ_i. The annihilator is recomputed from X rather than taken
    /// to be the span of the φ_i.
    pub fn of_kernel(ring: &GroupRing, d: usize, k: usize, funcs: &[Vec<GroupRingElem>]) -> Self {
        let x = left_kernel(ring, d, funcs);
        AmbientBidual::of_span(ring, d, k, &x)
    }

    pub fn ring(&self) -> &GroupRing {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn constraints(&self) -> &[Vec<GroupRingElem>] {
        &self.constraints
    }

    /// Same X, another degree.
    pub fn with_degree(&self, k: usize) -> Self {
        AmbientBidual { k, ..self.clone() }
    }

    pub fn coord_len(&self) -> usize {
        subsets(self.d, self.k).len()
    }

    pub fn zero(&self) -> Vec<GroupRingElem> {
        vec![self.ring.zero(); self.coord_len()]
    }

    /// Index of the first constraint φ with φ(a) ≠ 0.
    pub fn violated(&self, a: &[GroupRingElem]) -> Option<usize> {
        if self.k == 0 {
            return None;
        }
        self.constraints.iter().position(|phi| {
            dual_apply(&self.ring, self.d, 1, self.k, phi, a).iter().any(|c| !self.ring.is_zero(c))
        })
    }

    pub fn contains(&self, a: &[GroupRingElem]) -> bool {
        self.violated(a).is_none()
    }

    /// The bidual as an R-module, with its inclusion into the free module ∧^k R^d.
    pub fn module(&self) -> (FPModule, ModuleHom) {
        let ring = &self.ring;
        let n = self.coord_len();
        let free = FPModule::free(ring, n);
        if self.k == 0 || self.constraints.is_empty() {
            let gens: Vec<Vec<u64>> = (0..n).map(|i| free.gen(i)).collect();
            return submodule(&free, &gens);
        }
        // Column (φ, T) of the constraint map is e_S ↦ coefficient of e_T in φ(e_S).
        let low = subsets(self.d, self.k - 1).len();
        let mut cols: Vec<Vec<GroupRingElem>> = vec![vec![ring.zero(); n]; low * self.constraints.len()];
        for s in 0..n {
            let mut e = vec![ring.zero(); n];
            e[s] = ring.one();
            for (c, phi) in self.constraints.iter().enumerate() {
                let img = dual_apply(ring, self.d, 1, self.k, phi, &e);
                for (t, v) in img.into_iter().enumerate() {
                    cols[c * low + t][s] = v;
                }
            }
        }
        let gens = left_kernel(ring, n, &cols);
        let flat: Vec<Vec<u64>> = gens.iter().map(|g| flatten_vec(ring, g)).collect();
        submodule(&free, &flat)
    }
}
