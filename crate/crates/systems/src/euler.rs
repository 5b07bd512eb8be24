use complexes::{vertical_transition, DetElement, LocalBlock, TwoTermComplex};
use grouprings::{apply_derivative, GroupRingElem, SplitLayout};
use modalg::free::{dual_apply, wedge};
use selmer_sim::{all_levels, level_name, nu, primes_of, Level, TowerDatum};

use crate::{first_diff, psi_raw, KolyvaginCollection, SystemsError};

/// c_n ∈ ∧^r r[G_n]^d for every level, each over its own ring r[G_n].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerCollection {
    pub r: usize,
    pub d: usize,
    pub levels: Vec<Vec<GroupRingElem>>,
}

impl EulerCollection {
    pub fn level(&self, n: Level) -> &[GroupRingElem] {
        &self.levels[n as usize]
    }
}

/// The vertical determinantal family: coordinate u_n at level n.
pub fn vertical_family(tower: &TowerDatum) -> Vec<DetElement> {
    all_levels(tower.datum.s())
        .iter()
        .map(|&n| DetElement::new(format!("C~_{}", level_name(n)), tower.level_unit(n)))
        .collect()
}

/// c_n = (−1)^{r(d−r)} u (ψ̃_{r+1} ∧ … ∧ ψ̃_d)(e_1 ∧ … ∧ e_d) for the lifted
/// complex at level n, whose first r columns vanish.
pub fn euler_at(tower: &TowerDatum, n: Level, u: &GroupRingElem) -> Vec<GroupRingElem> {
    let ring = tower.level_ring(n);
    let (d, r) = (tower.datum.d, tower.datum.r());
    let psi = tower.lifted_psi(n);
    let funcs: Vec<Vec<GroupRingElem>> = (r..d).map(|i| psi.col(i)).collect();
    let scalar = if (r * (d - r)) % 2 == 1 { ring.neg(u) } else { u.clone() };
    dual_apply(&ring, d, d - r, d, &wedge(&ring, d, &funcs), &[scalar])
}

/// c = Π(z) on the tower, after checking that z is vertically compatible and
/// that the norm relations Cor(c_n) = P_q(Fr_q⁻¹) c_{n/q} hold.
pub fn euler_from_tower(tower: &TowerDatum, z: &[DetElement]) -> Result<EulerCollection, SystemsError> {
    let datum = &tower.datum;
    datum.require_regular()?;
    let levels = all_levels(datum.s());
    if z.len() != levels.len() {
        return Err(SystemsError::Algebra(format!("expected {} levels, got {}", levels.len(), z.len())));
    }
    let complexes: Vec<TwoTermComplex> = levels
        .iter()
        .map(|&n| TwoTermComplex::new(&tower.level_ring(n), tower.lifted_psi(n)).map_err(|e| SystemsError::TowerStructure(e.to_string())))
        .collect::<Result<_, _>>()?;
    let cs: Vec<Vec<GroupRingElem>> = levels.iter().map(|&n| euler_at(tower, n, &z[n as usize].coord)).collect();
    for &n in &levels {
        for q in primes_of(n) {
            let lower = n & !(1 << q);
            let ring_l = tower.level_ring(lower);
            let map = tower.projection(n, lower);
            let lambda = tower.lambda(q, lower);
            let block = LocalBlock { column: datum.prime_column(q), scalar: lambda.clone() };
            let fail = || SystemsError::NormRelationFailure { level: level_name(n), prime: q + 1 };
            let (moved, _) =
                vertical_transition(&map, &ring_l, &complexes[n as usize], &complexes[lower as usize], &[block], &z[n as usize], "")
                    .map_err(|_| fail())?;
            if first_diff(&ring_l, &[moved.coord], &[z[lower as usize].coord.clone()]).is_some() {
                return Err(SystemsError::IncompatibleFamily { m: level_name(n), n: level_name(lower) });
            }
            let projected: Vec<GroupRingElem> = cs[n as usize].iter().map(|x| map.apply(x)).collect();
            let expected: Vec<GroupRingElem> = cs[lower as usize].iter().map(|x| ring_l.mul(&lambda, x)).collect();
            if first_diff(&ring_l, &projected, &expected).is_some() {
                return Err(fail());
            }
        }
    }
    Ok(EulerCollection { r: datum.r(), d: datum.d, levels: cs })
}

/// κ'_n(c): D_n c_n is H_n-invariant, equal to N_{H_n}·κ'_n.
pub fn derived_collection(tower: &TowerDatum, c: &EulerCollection) -> Result<KolyvaginCollection, SystemsError> {
    let datum = &tower.datum;
    let gf = tower.gamma_factors();
    let m = datum.modulus;
    let mut levels = Vec::new();
    for n in all_levels(datum.s()) {
        let ring = tower.level_ring(n);
        let factors: Vec<usize> = (gf..gf + nu(n)).collect();
        let lay = SplitLayout::of(&ring, gf);
        let mut level = Vec::new();
        for x in c.level(n) {
            let dx = apply_derivative(&ring, x, &factors).map_err(|e| SystemsError::Algebra(e.to_string()))?;
            for &k in &factors {
                if !ring.is_zero(&ring.mul_axis_poly(&dx, k, &[m - 1, 1])) {
                    return Err(SystemsError::NotInvariant(level_name(n)));
                }
            }
            level.push(dx[..lay.gamma_size].to_vec());
        }
        levels.push(level);
    }
    Ok(KolyvaginCollection { r: c.r, d: c.d, levels })
}

/// 𝒟_r(c) = Ψ(κ'(c)).
pub fn derivative_system(tower: &TowerDatum, c: &EulerCollection) -> Result<KolyvaginCollection, SystemsError> {
    Ok(psi_raw(&tower.datum, &derived_collection(tower, c)?))
}
