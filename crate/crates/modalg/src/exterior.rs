use std::collections::HashMap;

use grouprings::{det_of, GroupRing, GroupRingElem};

use crate::module::{Elem, FPModule, ModuleHom};
use crate::ModAlgError;

/// Largest exterior degree accepted by the API.
pub const MAX_DEGREE: usize = 6;

/// r-subsets of {0..n}, lexicographic.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// Sign of the shuffle listing `u` first and then the rest of `t`, where u ⊆ t
/// is given by positions in t.
pub fn shuffle_sign(upos: &[usize]) -> bool {
    let s: usize = upos.iter().enumerate().map(|(k, &p)| p - k).sum();
    s % 2 == 1
}

/// Sign and support of e_a ∧ e_b for disjoint sorted index sets; None if they meet.
pub fn merge_sign(a: &[usize], b: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut inv = 0usize;
    for &x in a {
        for &y in b {
            if x == y {
                return None;
            }
            if x > y {
                inv += 1;
            }
        }
    }
    let mut s: Vec<usize> = a.iter().chain(b).copied().collect();
    s.sort();
    Some((inv % 2 == 1, s))
}

/// ∧^r X presented on the wedges e_S of r-subsets of X's generators.
#[derive(Clone, Debug)]
pub struct ExteriorPower {
    base: FPModule,
    r: usize,
    subsets: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    module: FPModule,
}

impl ExteriorPower {
    pub fn new(x: &FPModule, r: usize) -> Result<Self, ModAlgError> {
        if r > MAX_DEGREE {
            return Err(ModAlgError::DegreeTooLarge(r));
        }
        let ring = x.ring();
        let g = x.ngens();
        let subs = subsets(g, r);
        let index: HashMap<Vec<usize>, usize> = subs.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut rels = Vec::new();
        if r >= 1 {
            for rho in x.relations() {
                for t in subsets(g, r - 1) {
                    let mut v = vec![ring.zero(); subs.len()];
                    let mut any = false;
                    for (i, c) in rho.iter().enumerate() {
                        if t.contains(&i) || ring.is_zero(c) {
                            continue;
                        }
                        let (neg, s) = merge_sign(&[i], &t).unwrap();
                        let k = index[&s];
                        v[k] = if neg { ring.sub(&v[k], c) } else { ring.add(&v[k], c) };
                        any = true;
                    }
                    if any {
                        rels.push(v);
                    }
                }
            }
        }
        let module = FPModule::new(ring, subs.len(), rels);
        Ok(ExteriorPower { base: x.clone(), r, subsets: subs, index, module })
    }

    pub fn base(&self) -> &FPModule {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.r
    }

    pub fn module(&self) -> &FPModule {
        &self.module
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// x_1 ∧ … ∧ x_r.
    pub fn wedge(&self, xs: &[Elem]) -> Elem {
        assert_eq!(xs.len(), self.r);
        let ring = self.base.ring();
        let coords: Vec<Vec<GroupRingElem>> = xs.iter().map(|x| self.base.coords(x)).collect();
        let c = wedge_coords(ring, &coords, &self.subsets);
        self.module.from_coords(&c)
    }

    /// The basis wedge e_S (S sorted).
    pub fn basis(&self, s: &[usize]) -> Elem {
        self.module.gen(self.index[s])
    }
}

/// Coefficients of v_1 ∧ … ∧ v_r on the given subsets: minors of the r × g matrix.
pub fn wedge_coords(ring: &GroupRing, vs: &[Vec<GroupRingElem>], subs: &[Vec<usize>]) -> Vec<GroupRingElem> {
    let r = vs.len();
    subs.iter()
        .map(|s| if r == 0 { ring.one() } else { det_of(ring, r, |i, j| &vs[i][s[j]]) })
        .collect()
}

pub fn exterior_power(x: &FPModule, r: usize) -> Result<ExteriorPower, ModAlgError> {
    ExteriorPower::new(x, r)
}

/// Core of Φ(a) for Φ = Σ c_S f_{S_1} ∧ … ∧ f_{S_r} and a = Σ a_T b_{T_1} ∧ … ∧ b_{T_s},
/// where `vals[k][u]` = f_k(b_u). Returns coefficients on (s−r)-subsets of
/// {0..nb}:
///
/// Σ_S Σ_T c_S a_T Σ_{U ⊆ T, |U| = r} sgn(U, T∖U) det(f_{S_i}(b_{U_j})) e_{T∖U}.
pub fn wedge_dual_core(
    ring: &GroupRing,
    vals: &[Vec<GroupRingElem>],
    phi: &[(Vec<usize>, GroupRingElem)],
    a: &[(Vec<usize>, GroupRingElem)],
    nb: usize,
    r: usize,
    s: usize,
) -> Result<Vec<GroupRingElem>, ModAlgError> {
    if r > s {
        return Err(ModAlgError::DegreeMismatch { r, s });
    }
    let out_subs = subsets(nb, s - r);
    let out_index: HashMap<Vec<usize>, usize> = out_subs.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let mut out = vec![ring.zero(); out_subs.len()];
    let upos_list = subsets(s, r);
    let mut det_cache: HashMap<(Vec<usize>, Vec<usize>), GroupRingElem> = HashMap::new();
    for (sset, c) in phi {
        if ring.is_zero(c) {
            continue;
        }
        for (t, at) in a {
            if ring.is_zero(at) {
                continue;
            }
            let ca = ring.mul(c, at);
            for upos in &upos_list {
                let u: Vec<usize> = upos.iter().map(|&p| t[p]).collect();
                let rest: Vec<usize> = t.iter().copied().filter(|x| !u.contains(x)).collect();
                let key = (sset.clone(), u.clone());
                let d = det_cache
                    .entry(key)
                    .or_insert_with(|| if r == 0 { ring.one() } else { det_of(ring, r, |i, j| &vals[sset[i]][u[j]]) })
                    .clone();
                if ring.is_zero(&d) {
                    continue;
                }
                let term = ring.mul(&ca, &d);
                let k = out_index[&rest];
                out[k] = if shuffle_sign(upos) { ring.sub(&out[k], &term) } else { ring.add(&out[k], &term) };
            }
        }
    }
    Ok(out)
}

fn nonzero_terms(ring: &GroupRing, subs: &[Vec<usize>], coords: &[GroupRingElem]) -> Vec<(Vec<usize>, GroupRingElem)> {
    subs.iter().cloned().zip(coords.iter().cloned()).filter(|(_, c)| !ring.is_zero(c)).collect()
}

/// Φ(a) ∈ ∧^{s−r} X for Φ ∈ ∧^r(X*) and a ∈ ∧^s X.
///
/// `dual_ext` is ∧^r of a dual presentation of X, whose generators evaluate on
/// X's generators through `gen_vals[k][u]`.
pub fn wedge_dual_apply(
    dual_ext: &ExteriorPower,
    gen_vals: &[Vec<GroupRingElem>],
    phi: &[u64],
    a_ext: &ExteriorPower,
    a: &[u64],
    out_ext: &ExteriorPower,
) -> Result<Elem, ModAlgError> {
    let ring = a_ext.base().ring();
    let r = dual_ext.degree();
    let s = a_ext.degree();
    if r > s {
        return Err(ModAlgError::DegreeMismatch { r, s });
    }
    let phi_terms = nonzero_terms(ring, dual_ext.subsets(), &dual_ext.module().coords(phi));
    let a_terms = nonzero_terms(ring, a_ext.subsets(), &a_ext.module().coords(a));
    let c = wedge_dual_core(ring, gen_vals, &phi_terms, &a_terms, a_ext.base().ngens(), r, s)?;
    Ok(out_ext.module().from_coords(&c))
}

/// φ^{(r)} : ∧^r X → ∧^{r−1} X for φ given by its values on X's generators.
pub fn contraction(phi_vals: &[GroupRingElem], src: &ExteriorPower, dst: &ExteriorPower) -> Result<ModuleHom, ModAlgError> {
    let ring = src.base().ring();
    let r = src.degree();
    if r == 0 || dst.degree() + 1 != r {
        return Err(ModAlgError::DegreeMismatch { r: 1, s: r });
    }
    let vals = vec![phi_vals.to_vec()];
    let phi = vec![(vec![0usize], ring.one())];
    let images: Vec<Elem> = src
        .subsets()
        .iter()
        .map(|t| {
            let c = wedge_dual_core(ring, &vals, &phi, &[(t.clone(), ring.one())], src.base().ngens(), 1, r).unwrap();
            dst.module().from_coords(&c)
        })
        .collect();
    ModuleHom::new(src.module(), dst.module(), images)
}

/// Free-module shortcuts on explicit coordinates over subsets of {0..d}.
pub mod free {
    use super::*;

    pub fn subset_index(d: usize, r: usize) -> HashMap<Vec<usize>, usize> {
        subsets(d, r).into_iter().enumerate().map(|(i, s)| (s, i)).collect()
    }

    /// e*_S(e_T) contraction on R^d: coefficients over (s−r)-subsets.
    pub fn dual_apply(ring: &GroupRing, d: usize, r: usize, s: usize, phi: &[GroupRingElem], a: &[GroupRingElem]) -> Vec<GroupRingElem> {
        let rs = subsets(d, r);
        let ss = subsets(d, s);
        let out_idx = subset_index(d, s - r);
        let mut out = vec![ring.zero(); out_idx.len()];
        for (t, at) in ss.iter().zip(a) {
            if ring.is_zero(at) {
                continue;
            }
            for (sset, c) in rs.iter().zip(phi) {
                if ring.is_zero(c) || !sset.iter().all(|x| t.contains(x)) {
                    continue;
                }
                let upos: Vec<usize> = sset.iter().map(|x| t.iter().position(|y| y == x).unwrap()).collect();
                let rest: Vec<usize> = t.iter().copied().filter(|x| !sset.contains(x)).collect();
                let term = ring.mul(c, at);
                let k = out_idx[&rest];
                out[k] = if shuffle_sign(&upos) { ring.sub(&out[k], &term) } else { ring.add(&out[k], &term) };
            }
        }
        out
    }

    /// φ_1 ∧ … ∧ φ_r of functionals on R^d given as coordinate rows.
    pub fn wedge(ring: &GroupRing, d: usize, vs: &[Vec<GroupRingElem>]) -> Vec<GroupRingElem> {
        wedge_coords(ring, vs, &subsets(d, vs.len()))
    }
}
