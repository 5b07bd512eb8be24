use grouprings::{det_of, GroupRingElem};

use crate::exterior::{merge_sign, wedge_coords, ExteriorPower};
use crate::hom::{dual, HomModule};
use crate::module::{submodule, Elem, FPModule, ModuleHom};
use crate::ModAlgError;

/// ∩^r X = (∧^r X*)*, with the pieces needed to evaluate it.
#[derive(Clone, Debug)]
pub struct Bidual {
    x: FPModule,
    r: usize,
    dual: HomModule,
    gen_vals: Vec<Vec<GroupRingElem>>,
    ext_dual: ExteriorPower,
    ext_x: ExteriorPower,
    hom: HomModule,
    pairing: Vec<Vec<GroupRingElem>>,
}

impl Bidual {
    pub fn new(x: &FPModule, r: usize) -> Result<Self, ModAlgError> {
        Self::with_dual(&dual(x), r)
    }

    /// Build on a given presentation of X*, so that several degrees share it.
    pub fn with_dual(d: &HomModule, r: usize) -> Result<Self, ModAlgError> {
        let x = d.src().clone();
        let ring = x.ring();
        let gen_vals: Vec<Vec<GroupRingElem>> = (0..d.module().ngens()).map(|j| d.gen_tuple(j)).collect();
        let ext_dual = ExteriorPower::new(d.module(), r)?;
        let ext_x = ExteriorPower::new(&x, r)?;
        let hom = HomModule::new(ext_dual.module(), &FPModule::free(ring, 1));
        let pairing = ext_dual
            .subsets()
            .iter()
            .map(|s| {
                ext_x
                    .subsets()
                    .iter()
                    .map(|t| if r == 0 { ring.one() } else { det_of(ring, r, |i, j| &gen_vals[s[i]][t[j]]) })
                    .collect()
            })
            .collect();
        Ok(Bidual { x, r, dual: d.clone(), gen_vals, ext_dual, ext_x, hom, pairing })
    }

    pub fn base(&self) -> &FPModule {
        &self.x
    }

    pub fn degree(&self) -> usize {
        self.r
    }

    pub fn module(&self) -> &FPModule {
        self.hom.module()
    }

    pub fn dual(&self) -> &HomModule {
        &self.dual
    }

    /// f_k(b_u) for the generators f_k of the dual presentation.
    pub fn dual_gen_values(&self) -> &[Vec<GroupRingElem>] {
        &self.gen_vals
    }

    pub fn exterior_dual(&self) -> &ExteriorPower {
        &self.ext_dual
    }

    pub fn exterior(&self) -> &ExteriorPower {
        &self.ext_x
    }

    /// F(e_S) for every basis wedge e_S of ∧^r X*.
    pub fn values(&self, f: &[u64]) -> Vec<GroupRingElem> {
        self.hom.to_tuple(f)
    }

    pub fn from_values(&self, vals: &[GroupRingElem]) -> Option<Elem> {
        self.hom.from_tuple(vals)
    }

    /// F(Ψ) for Ψ ∈ ∧^r X*.
    pub fn evaluate(&self, f: &[u64], psi: &[u64]) -> GroupRingElem {
        self.hom.evaluate(f, psi)
    }

    /// Values of ξ(a) on basis wedges: Φ ↦ Φ(a).
    pub fn xi_values(&self, a: &[u64]) -> Vec<GroupRingElem> {
        let ring = self.x.ring();
        let coords = self.ext_x.module().coords(a);
        self.pairing
            .iter()
            .map(|row| {
                let mut acc = ring.zero();
                for (p, c) in row.iter().zip(&coords) {
                    ring.add_assign(&mut acc, &ring.mul(p, c));
                }
                acc
            })
            .collect()
    }

    pub fn xi(&self, a: &[u64]) -> Elem {
        self.from_values(&self.xi_values(a)).expect("ξ(a) is a homomorphism")
    }

    /// ξ as a module map ∧^r X → ∩^r X.
    pub fn xi_hom(&self) -> ModuleHom {
        let src = self.ext_x.module();
        let images = (0..src.ngens()).map(|i| self.xi(&src.gen(i))).collect();
        ModuleHom::new(src, self.module(), images).unwrap()
    }

    /// Coordinates in ∧^k X* of f_1 ∧ … ∧ f_k for functionals given by their
    /// values on X's generators.
    pub fn dual_wedge(&self, ext: &ExteriorPower, funcs: &[Vec<GroupRingElem>]) -> Result<Elem, ModAlgError> {
        let coords: Vec<Vec<GroupRingElem>> = funcs
            .iter()
            .map(|f| {
                let tuple: Vec<Elem> = f.to_vec();
                self.dual.from_tuple(&tuple).map(|h| self.dual.module().coords(&h)).ok_or(ModAlgError::NotWellDefined)
            })
            .collect::<Result<_, _>>()?;
        let c = wedge_coords(self.x.ring(), &coords, ext.subsets());
        Ok(ext.module().from_coords(&c))
    }

    /// Ideal generators {F(e_S)}: the image of F as a functional on ∧^r X*.
    pub fn image_ideal(&self, f: &[u64]) -> Vec<GroupRingElem> {
        let ring = self.x.ring();
        self.values(f).into_iter().filter(|v| !ring.is_zero(v)).collect()
    }
}

pub fn bidual(x: &FPModule, r: usize) -> Result<Bidual, ModAlgError> {
    Bidual::new(x, r)
}

/// Values of the map Ψ ↦ F(Φ ∧ Ψ) on basis wedges of ∧^{s−r} X*, with Φ given
/// by coordinates on ∧^r X* (of the shared dual presentation).
fn contract_values(from: &Bidual, phi_ext: &ExteriorPower, phi: &[u64], to: &Bidual, f: &[u64]) -> Vec<GroupRingElem> {
    let ring = from.x.ring();
    let fv = from.values(f);
    let pc = phi_ext.module().coords(phi);
    to.ext_dual
        .subsets()
        .iter()
        .map(|v| {
            let mut acc = ring.zero();
            for (s, c) in phi_ext.subsets().iter().zip(&pc) {
                if ring.is_zero(c) {
                    continue;
                }
                if let Some((neg, w)) = merge_sign(s, v) {
                    let k = from.ext_dual.index_of(&w).unwrap();
                    let t = ring.mul(c, &fv[k]);
                    acc = if neg { ring.sub(&acc, &t) } else { ring.add(&acc, &t) };
                }
            }
            acc
        })
        .collect()
}

/// The map ∩^s X → ∩^{s−r} X dual to Ψ ↦ Φ ∧ Ψ.
pub fn bidual_contract(from: &Bidual, to: &Bidual, phi_ext: &ExteriorPower, phi: &[u64]) -> Result<ModuleHom, ModAlgError> {
    let (s, r) = (from.r, phi_ext.degree());
    if r > s || to.r + r != s {
        return Err(ModAlgError::DegreeMismatch { r, s });
    }
    let src = from.module();
    let images = (0..src.ngens())
        .map(|i| to.from_values(&contract_values(from, phi_ext, phi, to, &src.gen(i))).ok_or(ModAlgError::NotWellDefined))
        .collect::<Result<Vec<_>, _>>()?;
    ModuleHom::new(src, to.module(), images)
}

/// Restriction of functionals along ι: the element of X* given by Y-functional h'.
fn restrict_functional(iota: &ModuleHom, dy: &HomModule, h: &[u64]) -> Vec<GroupRingElem> {
    let vals = dy.to_tuple(h);
    let x = iota.src();
    (0..x.ngens())
        .map(|i| {
            let img = iota.apply(&x.gen(i));
            let cs = iota.dst().coords(&img);
            dy.dst().combine(&cs, &vals)
        })
        .collect()
}

/// ∩^r X → ∩^r Y for an injection ι : X → Y whose dual Y* → X* is onto.
pub fn bidual_inclusion(iota: &ModuleHom, bx: &Bidual, by: &Bidual) -> Result<ModuleHom, ModAlgError> {
    if bx.r != by.r {
        return Err(ModAlgError::DegreeMismatch { r: bx.r, s: by.r });
    }
    if !iota.is_injective() {
        return Err(ModAlgError::NotInjective);
    }
    let ring = bx.x.ring();
    let dx = &bx.dual;
    let dy = &by.dual;
    // ι* on the generators of Y*, in X*'s presentation.
    let restricted: Vec<Elem> = (0..dy.module().ngens())
        .map(|j| {
            let t = restrict_functional(iota, dy, &dy.module().gen(j));
            dx.from_tuple(&t).ok_or(ModAlgError::NotWellDefined)
        })
        .collect::<Result<_, _>>()?;
    let istar = ModuleHom::new(dy.module(), dx.module(), restricted.clone())?;
    if !istar.is_surjective() {
        return Err(ModAlgError::NonSurjectiveDual);
    }
    let rc: Vec<Vec<GroupRingElem>> = restricted.iter().map(|h| dx.module().coords(h)).collect();
    // ∧^r ι*(e_S) in ∧^r X*, one coordinate vector per basis wedge of ∧^r Y*.
    let wedges: Vec<Vec<GroupRingElem>> = by
        .ext_dual
        .subsets()
        .iter()
        .map(|s| {
            let vs: Vec<Vec<GroupRingElem>> = s.iter().map(|&j| rc[j].clone()).collect();
            wedge_coords(ring, &vs, bx.ext_dual.subsets())
        })
        .collect();
    let src = bx.module();
    let images = (0..src.ngens())
        .map(|i| {
            let fv = bx.values(&src.gen(i));
            let vals: Vec<GroupRingElem> = wedges
                .iter()
                .map(|w| {
                    let mut acc = ring.zero();
                    for (c, v) in w.iter().zip(&fv) {
                        ring.add_assign(&mut acc, &ring.mul(c, v));
                    }
                    acc
                })
                .collect();
            by.from_values(&vals).ok_or(ModAlgError::NotWellDefined)
        })
        .collect::<Result<Vec<_>, _>>()?;
    ModuleHom::new(src, by.module(), images)
}

/// Result of restricting ∩^{r+s} Y to X = ∩ ker φ_i.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub kernel: FPModule,
    pub inclusion: ModuleHom,
    pub bidual_kernel: Bidual,
    /// ∩^{r+s} Y → ∩^r X.
    pub map: ModuleHom,
    /// ∩^r X → ∩^r Y.
    pub bidual_inclusion: ModuleHom,
}

/// The map ∩^{r+s} Y → ∩^r X induced by φ_1 ∧ … ∧ φ_s, with each φ_i given by
/// its values on Y's generators.
pub fn bidual_restrict(y_top: &Bidual, y_low: &Bidual, phis: &[Vec<GroupRingElem>]) -> Result<Restriction, ModAlgError> {
    let s = phis.len();
    let r = y_low.r;
    if y_top.r != r + s {
        return Err(ModAlgError::DegreeMismatch { r: s, s: y_top.r });
    }
    let y = &y_top.x;
    let ring = y.ring();
    // X = ∩ ker φ_i as a submodule of Y.
    let rfree = FPModule::free(ring, s.max(1));
    let images: Vec<Elem> = (0..y.ngens())
        .map(|u| {
            let c: Vec<GroupRingElem> = if s == 0 { vec![ring.zero()] } else { phis.iter().map(|p| p[u].clone()).collect() };
            rfree.from_coords(&c)
        })
        .collect();
    let phi_map = ModuleHom::new(y, &rfree, images)?;
    let ker = phi_map.kernel_elems();
    let ker = if s == 0 { (0..y.ngens()).map(|i| y.gen(i)).collect() } else { ker };
    let (xmod, incl) = submodule(y, &ker);

    let phi_ext = ExteriorPower::new(y_top.dual.module(), s)?;
    let phi = y_top.dual_wedge(&phi_ext, phis)?;
    let contract = bidual_contract(y_top, y_low, &phi_ext, &phi)?;
    let bx = Bidual::new(&xmod, r)?;
    let binc = bidual_inclusion(&incl, &bx, y_low)?;
    let solver = binc.preimage_solver();
    let src = y_top.module();
    let imgs = (0..src.ngens())
        .map(|i| solver.solve(&contract.apply(&src.gen(i))).ok_or(ModAlgError::NoPreimage))
        .collect::<Result<Vec<_>, _>>()?;
    let map = ModuleHom::new(src, bx.module(), imgs)?;
    Ok(Restriction { kernel: xmod, inclusion: incl, bidual_kernel: bx, map, bidual_inclusion: binc })
}
