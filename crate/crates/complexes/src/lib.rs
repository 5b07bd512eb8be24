//! Two-term complexes R^d → R^d over a local group ring, standard
//! representatives, determinant coordinates, the Π map and determinant
//! transitions.
//!
//! Conventions: elements of R^d are row vectors, a map R^a → R^b is an a×b
//! matrix acting on the right, so ψ(e_j) is row j of Ψ and the functional
//! ψ_i = e_i^* ∘ ψ is column i.

use grouprings::{flatten, flatten_vec, unflatten_vec, GroupRing, GroupRingElem, RMatrix, RingMap};
use modalg::free::{dual_apply, wedge};
use modalg::{bidual_restrict, left_kernel, AmbientBidual, Bidual, FPModule, ModAlgError, Restriction};
use rand::{Rng, RngCore};
use zlin::{inv_mod, HowellForm, Solver};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("f is not surjective")]
    NotSurjective,
    #[error("cannot complete to an adapted basis")]
    CannotComplete,
    #[error("f does not vanish on the image of psi")]
    NotWellDefined,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a standard representative: {0}")]
    NotStandard(&'static str),
}

fn prime_of(m: u64) -> u64 {
    (2..=m).find(|d| m % d == 0).unwrap()
}

/// Inverse of a square matrix over R, if it exists.
pub fn invert(ring: &GroupRing, b: &RMatrix) -> Option<RMatrix> {
    let d = b.nrows();
    assert_eq!(d, b.ncols());
    if d == 0 {
        return Some(RMatrix::zeros(ring, 0, 0));
    }
    let solver = Solver::new(&flatten(ring, b));
    let mut rows = Vec::with_capacity(d);
    for i in 0..d {
        let mut e = vec![ring.zero(); d];
        e[i] = ring.one();
        let x = solver.solve(&flatten_vec(ring, &e))?;
        rows.push(unflatten_vec(ring, &x));
    }
    Some(RMatrix::from_rows(rows, d))
}

fn is_zero_matrix(ring: &GroupRing, a: &RMatrix) -> bool {
    (0..a.nrows()).all(|i| a.row(i).iter().all(|x| ring.is_zero(x)))
}

fn matrices_equal(ring: &GroupRing, a: &RMatrix, b: &RMatrix) -> bool {
    a.nrows() == b.nrows()
        && a.ncols() == b.ncols()
        && (0..a.nrows()).all(|i| a.row(i).iter().zip(b.row(i)).all(|(x, y)| ring.is_zero(&ring.sub(x, y))))
}

/// R-span of vectors in R^d as a Howell form on flat coordinates.
fn r_span(ring: &GroupRing, d: usize, vecs: &[Vec<GroupRingElem>]) -> HowellForm {
    let n = ring.dim();
    let mut rows = Vec::with_capacity(vecs.len() * n);
    for v in vecs {
        for g in 0..n {
            rows.push(v.iter().flat_map(|x| ring.shift(x, g)).collect());
        }
    }
    zlin::howell_rows(ring.modulus(), d * n, rows)
}

/// A complex P′ → P with P′ = P = R^d.
#[derive(Clone, Debug)]
pub struct TwoTermComplex {
    ring: GroupRing,
    psi: RMatrix,
}

impl TwoTermComplex {
    pub fn new(ring: &GroupRing, psi: RMatrix) -> Result<Self, ComplexError> {
        if psi.nrows() != psi.ncols() {
            return Err(ComplexError::ShapeMismatch(format!("{}x{} is not square", psi.nrows(), psi.ncols())));
        }
        Ok(TwoTermComplex { ring: ring.clone(), psi })
    }

    /// Complex whose i-th column functional is `cols[i]`.
    pub fn from_columns(ring: &GroupRing, cols: &[Vec<GroupRingElem>]) -> Result<Self, ComplexError> {
        let d = cols.len();
        if cols.iter().any(|c| c.len() != d) {
            return Err(ComplexError::ShapeMismatch("column length".into()));
        }
        let rows = (0..d).map(|j| (0..d).map(|i| cols[i][j].clone()).collect()).collect();
        TwoTermComplex::new(ring, RMatrix::from_rows(rows, d))
    }

    pub fn ring(&self) -> &GroupRing {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.psi.nrows()
    }

    pub fn psi(&self) -> &RMatrix {
        &self.psi
    }

    /// ψ_i as a coordinate row: ψ_i(e_j) = Ψ[j][i].
    pub fn column(&self, i: usize) -> Vec<GroupRingElem> {
        self.psi.col(i)
    }

    /// H¹ = coker ψ.
    pub fn h1(&self) -> FPModule {
        FPModule::new(&self.ring, self.rank(), self.psi.rows_vec())
    }

    /// R-generators of H⁰ = ker ψ.
    pub fn h0_gens(&self) -> Vec<Vec<GroupRingElem>> {
        let cols: Vec<Vec<GroupRingElem>> = (0..self.rank()).map(|i| self.column(i)).collect();
        left_kernel(&self.ring, self.rank(), &cols)
    }

    /// ∩^k H⁰ inside ∧^k P′.
    pub fn h0_bidual(&self, k: usize) -> AmbientBidual {
        AmbientBidual::of_span(&self.ring, self.rank(), k, &self.h0_gens())
    }
}

/// A complex with a surjection f : H¹ → R^r (given on generators, d×r) and an
/// adapted basis b_1..b_d of P (rows of `basis`).
#[derive(Clone, Debug)]
pub struct StandardRep {
    complex: TwoTermComplex,
    f: RMatrix,
    basis: RMatrix,
    basis_inv: RMatrix,
}

impl StandardRep {
    pub fn new(complex: &TwoTermComplex, f: RMatrix, basis: RMatrix) -> Result<Self, ComplexError> {
        let ring = complex.ring();
        let d = complex.rank();
        if f.nrows() != d || f.ncols() > d || basis.nrows() != d || basis.ncols() != d {
            return Err(ComplexError::ShapeMismatch("f or basis".into()));
        }
        let basis_inv = invert(ring, &basis).ok_or(ComplexError::NotStandard("basis is not invertible"))?;
        let rep = StandardRep { complex: complex.clone(), f, basis, basis_inv };
        rep.validate()?;
        Ok(rep)
    }

    pub fn complex(&self) -> &TwoTermComplex {
        &self.complex
    }

    pub fn f(&self) -> &RMatrix {
        &self.f
    }

    pub fn basis(&self) -> &RMatrix {
        &self.basis
    }

    pub fn r(&self) -> usize {
        self.f.ncols()
    }

    /// x_i = f(b_i) for i ≤ r, as an r×r matrix.
    pub fn x_matrix(&self) -> RMatrix {
        let ring = self.complex.ring();
        let bf = self.basis.mul(ring, &self.f);
        RMatrix::from_rows((0..self.r()).map(|i| bf.row(i).to_vec()).collect(), self.r())
    }

    /// Ψ·B⁻¹: column i is ψ_i = b_i^* ∘ ψ.
    pub fn adapted_psi(&self) -> RMatrix {
        self.complex.psi().mul(self.complex.ring(), &self.basis_inv)
    }

    /// Checks the defining conditions of a standard representative.
    pub fn validate(&self) -> Result<(), ComplexError> {
        let ring = self.complex.ring();
        let d = self.complex.rank();
        let r = self.r();
        let psi = self.complex.psi();
        if !is_zero_matrix(ring, &psi.mul(ring, &self.f)) {
            return Err(ComplexError::NotWellDefined);
        }
        let bf = self.basis.mul(ring, &self.f);
        if !ring.is_unit(&self.x_matrix().det(ring)) {
            return Err(ComplexError::NotStandard("f(b_1), …, f(b_r) is not a basis"));
        }
        if (r..d).any(|i| bf.row(i).iter().any(|x| !ring.is_zero(x))) {
            return Err(ComplexError::NotStandard("b_i ∉ ker f for some i > r"));
        }
        // span(b_{>r}) + im ψ must be all of ker(f ∘ π).
        let mut gens: Vec<Vec<GroupRingElem>> = (r..d).map(|i| self.basis.row(i).to_vec()).collect();
        gens.extend(psi.rows_vec());
        let span = r_span(ring, d, &gens);
        let fcols: Vec<Vec<GroupRingElem>> = (0..r).map(|i| self.f.col(i)).collect();
        let ker = left_kernel(ring, d, &fcols);
        if ker.iter().any(|k| !span.contains(&flatten_vec(ring, k))) {
            return Err(ComplexError::NotStandard("⟨b_{r+1}, …, b_d⟩ does not cover ker f"));
        }
        let adapted = self.adapted_psi();
        if (0..r).any(|i| adapted.col(i).iter().any(|x| !ring.is_zero(x))) {
            return Err(ComplexError::NotStandard("ψ_i ≠ 0 for some i ≤ r"));
        }
        Ok(())
    }
}

fn random_elem(ring: &GroupRing, rng: &mut dyn RngCore) -> GroupRingElem {
    (0..ring.dim()).map(|_| rng.gen_range(0..ring.modulus())).collect()
}

fn random_invertible(ring: &GroupRing, t: usize, rng: &mut dyn RngCore) -> RMatrix {
    loop {
        let rows = (0..t).map(|_| (0..t).map(|_| random_elem(ring, rng)).collect()).collect();
        let a = RMatrix::from_rows(rows, t);
        if ring.is_unit(&a.det(ring)) {
            return a;
        }
    }
}

/// Vectors among `cands` that stay independent modulo the maximal ideal,
/// greedily, until `want` are found.
fn independent_mod_max(ring: &GroupRing, cands: &[Vec<GroupRingElem>], want: usize) -> Option<Vec<usize>> {
    let p = prime_of(ring.modulus());
    let d = cands.first().map_or(0, |c| c.len());
    let mut echelon: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, c) in cands.iter().enumerate() {
        if chosen.len() == want {
            break;
        }
        let mut v: Vec<u64> = c.iter().map(|x| ring.augmentation(x) % p).collect();
        for (piv, row) in &echelon {
            let a = v[*piv];
            if a != 0 {
                for k in 0..d {
                    v[k] = (v[k] + (p - a) * row[k]) % p;
                }
            }
        }
        if let Some(piv) = v.iter().position(|&x| x != 0) {
            let inv = inv_mod(v[piv], p).unwrap();
            for x in v.iter_mut() {
                *x = *x * inv % p;
            }
            echelon.push((piv, v));
            chosen.push(idx);
        }
    }
    (chosen.len() == want).then_some(chosen)
}

/// Finds an adapted basis for (C, f) with f given on generators (d×r). With an
/// rng, the basis is re-randomized inside the set of adapted bases.
pub fn standardize(c: &TwoTermComplex, f: &RMatrix, rng: Option<&mut dyn RngCore>) -> Result<StandardRep, ComplexError> {
    let ring = c.ring();
    let d = c.rank();
    let r = f.ncols();
    if f.nrows() != d || r > d {
        return Err(ComplexError::ShapeMismatch(format!("f is {}x{}, d = {d}", f.nrows(), r)));
    }
    if !is_zero_matrix(ring, &c.psi().mul(ring, f)) {
        return Err(ComplexError::NotWellDefined);
    }
    // Lift a basis of X.
    let mut ys: Vec<Vec<GroupRingElem>> = Vec::with_capacity(r);
    if r > 0 {
        let solver = Solver::new(&flatten(ring, f));
        for i in 0..r {
            let mut e = vec![ring.zero(); r];
            e[i] = ring.one();
            let y = solver.solve(&flatten_vec(ring, &e)).ok_or(ComplexError::NotSurjective)?;
            ys.push(unflatten_vec(ring, &y));
        }
    }
    // Project e_j onto ker f along span(y); these generate ker f.
    let proj: Vec<Vec<GroupRingElem>> = (0..d)
        .map(|j| {
            let mut v = vec![ring.zero(); d];
            v[j] = ring.one();
            for i in 0..r {
                let c = f.get(j, i);
                for u in 0..d {
                    v[u] = ring.sub(&v[u], &ring.mul(c, &ys[i][u]));
                }
            }
            v
        })
        .collect();
    let pick = independent_mod_max(ring, &proj, d - r).ok_or(ComplexError::CannotComplete)?;
    let mut ks: Vec<Vec<GroupRingElem>> = pick.iter().map(|&j| proj[j].clone()).collect();

    if let Some(rng) = rng {
        // y_i += Σ c_ij k_j, then k ← T·k and y ← S·y with T, S invertible.
        for y in ys.iter_mut() {
            for k in &ks {
                let c = random_elem(ring, rng);
                for u in 0..d {
                    y[u] = ring.add(&y[u], &ring.mul(&c, &k[u]));
                }
            }
        }
        let t = random_invertible(ring, d - r, rng);
        ks = t.mul(ring, &RMatrix::from_rows(ks, d)).rows_vec();
        let s = random_invertible(ring, r, rng);
        ys = s.mul(ring, &RMatrix::from_rows(ys, d)).rows_vec();
    }
    let mut rows = ys;
    rows.extend(ks);
    StandardRep::new(c, f.clone(), RMatrix::from_rows(rows, d))
}

/// Coordinate of an element of det(C) = ∧^d P′ ⊗ ∧^d P* against
/// (e_1∧…∧e_d) ⊗ (e_1^*∧…∧e_d^*) for the basis recorded by `tag`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetElement {
    pub tag: String,
    pub coord: GroupRingElem,
}

impl DetElement {
    pub fn new(tag: impl Into<String>, coord: GroupRingElem) -> Self {
        DetElement { tag: tag.into(), coord }
    }

    pub fn scale(&self, ring: &GroupRing, a: &[u64]) -> DetElement {
        DetElement { tag: self.tag.clone(), coord: ring.mul(&self.coord, a) }
    }

    /// Coordinate for the basis T·e: the two wedges change by det(T) and det(T)⁻¹.
    pub fn change_basis(&self, ring: &GroupRing, t: &RMatrix, tag: impl Into<String>) -> Result<DetElement, ComplexError> {
        let det = t.det(ring);
        let inv = ring.inverse(&det).ok_or(ComplexError::NotStandard("basis change is not invertible"))?;
        Ok(DetElement { tag: tag.into(), coord: ring.mul(&ring.mul(&self.coord, &inv), &det) })
    }
}

/// Π(z) ∈ ∩^r H⁰ ⊆ ∧^r P′, reported against x_1^*∧…∧x_r^* for the standard
/// basis of X. Coordinates are over the r-subsets of {0..d}.
///
/// With B the adapted basis and X_B = (f(b_i))_{i≤r}:
/// Π(z) = (−1)^{r(d−r)} u det(B) det(X_B)⁻¹ (ψ_{r+1}∧…∧ψ_d)(e_1∧…∧e_d).
pub fn pi_map(rep: &StandardRep, z: &DetElement) -> Vec<GroupRingElem> {
    let ring = rep.complex.ring();
    let d = rep.complex.rank();
    let r = rep.r();
    let scalar = pi_scalar(rep, z);
    let adapted = rep.adapted_psi();
    let funcs: Vec<Vec<GroupRingElem>> = (r..d).map(|i| adapted.col(i)).collect();
    let phi = wedge(ring, d, &funcs);
    dual_apply(ring, d, d - r, d, &phi, &[scalar])
}

fn pi_scalar(rep: &StandardRep, z: &DetElement) -> GroupRingElem {
    let ring = rep.complex.ring();
    let d = rep.complex.rank();
    let r = rep.r();
    let xdet = rep.x_matrix().det(ring);
    let xinv = ring.inverse(&xdet).expect("validated representative");
    let mut s = ring.mul(&ring.mul(&z.coord, &rep.basis.det(ring)), &xinv);
    if (r * (d - r)) % 2 == 1 {
        s = ring.neg(&s);
    }
    s
}

/// Π(z) as an element of the generic bidual ∩^r H⁰, obtained by restricting
/// ξ(a) ∈ ∩^d P′ along ψ_{r+1}, …, ψ_d.
pub fn pi_map_bidual(rep: &StandardRep, z: &DetElement) -> Result<(Restriction, modalg::Elem), ModAlgError> {
    let ring = rep.complex.ring();
    let d = rep.complex.rank();
    let r = rep.r();
    let free = FPModule::free(ring, d);
    let top = Bidual::new(&free, d)?;
    let low = Bidual::new(&free, r)?;
    let adapted = rep.adapted_psi();
    let phis: Vec<Vec<GroupRingElem>> = (r..d).map(|i| adapted.col(i)).collect();
    let res = bidual_restrict(&top, &low, &phis)?;
    let a = top.exterior().module().from_coords(&[pi_scalar(rep, z)]);
    let img = res.map.apply(&top.xi(&a));
    Ok((res, img))
}

/// ev_Φ(z) = Φ(Π(z)) for Φ ∈ ∧^r(P′*) given by coordinates over r-subsets.
pub fn ev_phi(rep: &StandardRep, phi: &[GroupRingElem], z: &DetElement) -> GroupRingElem {
    let ring = rep.complex.ring();
    let d = rep.complex.rank();
    let r = rep.r();
    let a = pi_map(rep, z);
    dual_apply(ring, d, r, r, phi, &a).pop().unwrap()
}

/// A local block at column `column`, trivialized with the scalar `scalar`.
#[derive(Clone, Debug)]
pub struct LocalBlock {
    pub column: usize,
    pub scalar: GroupRingElem,
}

/// Transport det(C_m) → det(C_n) where C_m differs from C_n by one block per
/// listed column: the block column vanishes in C_m, all other columns agree.
pub fn horizontal_transition(
    cm: &TwoTermComplex,
    cn: &TwoTermComplex,
    blocks: &[LocalBlock],
    z: &DetElement,
    tag: impl Into<String>,
) -> Result<DetElement, ComplexError> {
    let ring = cm.ring();
    let d = cm.rank();
    if cn.rank() != d {
        return Err(ComplexError::ShapeMismatch(format!("ranks {} and {}", d, cn.rank())));
    }
    for i in 0..d {
        let block = blocks.iter().any(|b| b.column == i);
        let cmi = cm.column(i);
        if block {
            if cmi.iter().any(|x| !ring.is_zero(x)) {
                return Err(ComplexError::ShapeMismatch(format!("block column {i} is nonzero in the source")));
            }
        } else if cmi.iter().zip(cn.column(i)).any(|(a, b)| !ring.is_zero(&ring.sub(a, &b))) {
            return Err(ComplexError::ShapeMismatch(format!("column {i} differs")));
        }
    }
    let mut coord = z.coord.clone();
    for b in blocks {
        if b.column >= d {
            return Err(ComplexError::ShapeMismatch(format!("block column {} out of range", b.column)));
        }
        coord = ring.mul(&coord, &b.scalar);
    }
    Ok(DetElement { tag: tag.into(), coord })
}

/// det(1 − U).
pub fn euler_factor(ring: &GroupRing, u: &RMatrix) -> GroupRingElem {
    let t = u.nrows();
    assert_eq!(t, u.ncols());
    let mut a = RMatrix::identity(ring, t);
    for i in 0..t {
        for j in 0..t {
            a.set(i, j, ring.sub(a.get(i, j), u.get(i, j)));
        }
    }
    a.det(ring)
}

/// Norm det(C_n) → det(C_n) ⊗ R_d followed by the trivialization of the local
/// blocks. `map` projects R_n onto R_d; block columns of π(C_n) must equal the
/// block scalar times the matching column of C_d, other columns must agree.
/// Returns the projected element and the product of the block scalars.
pub fn vertical_transition(
    map: &RingMap,
    ring_d: &GroupRing,
    cn: &TwoTermComplex,
    cd: &TwoTermComplex,
    blocks: &[LocalBlock],
    z: &DetElement,
    tag: impl Into<String>,
) -> Result<(DetElement, GroupRingElem), ComplexError> {
    let d = cn.rank();
    if cd.rank() != d {
        return Err(ComplexError::ShapeMismatch(format!("ranks {} and {}", d, cd.rank())));
    }
    if map.target_dim != ring_d.dim() {
        return Err(ComplexError::ShapeMismatch("ring map target".into()));
    }
    let projected = cn.psi().map_entries(|x| map.apply(x));
    let mut expected = cd.psi().clone();
    let mut scalar = ring_d.one();
    for b in blocks {
        if b.column >= d {
            return Err(ComplexError::ShapeMismatch(format!("block column {} out of range", b.column)));
        }
        for j in 0..d {
            expected.set(j, b.column, ring_d.mul(&b.scalar, cd.psi().get(j, b.column)));
        }
        scalar = ring_d.mul(&scalar, &b.scalar);
    }
    if !matrices_equal(ring_d, &projected, &expected) {
        return Err(ComplexError::ShapeMismatch("projected complex does not match the target up to the blocks".into()));
    }
    Ok((DetElement { tag: tag.into(), coord: map.apply(&z.coord) }, scalar))
}
