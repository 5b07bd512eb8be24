use grouprings::{flatten_vec, FinAbGroup, GradedPiece, GroupRing, GroupRingElem};
use modalg::{pair, submodule, FPModule, ModuleHom};
use serde::{Deserialize, Serialize};

use crate::datum::{char_poly_rev, inverse_2x2};
use crate::{all_levels, divides, level_name, primes_of, SelmerDatum, TowerDatum};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, res: Result<(), String>) {
        self.checks.push(AxiomCheck { name: name.into(), pass: res.is_ok(), witness: res.err() });
    }
}

pub fn validate(datum: &SelmerDatum) -> ValidationReport {
    let mut rep = ValidationReport::default();
    rep.push("A1", check_a1(datum));
    rep.push("A2", check_a2(datum));
    rep.push("A3", check_a3(datum));
    rep.push("A4", check_a4(datum));
    rep
}

pub fn validate_tower(t: &TowerDatum) -> ValidationReport {
    let mut rep = validate(&t.datum);
    let psis: Vec<_> = all_levels(t.datum.s()).into_iter().map(|n| t.lifted_psi(n)).collect();
    rep.push("B1", check_b1(t, &psis));
    rep.push("B2", check_b2(t, &psis));
    rep.push("B3", check_b3(t, &psis));
    rep
}

fn check_a1(datum: &SelmerDatum) -> Result<(), String> {
    let m = datum.modulus;
    let s = datum.s();
    let h_ring = GroupRing::cyclic(m, &datum.prime_orders);
    let hg = h_ring.group().clone();
    let gp = GradedPiece::new(&datum.prime_orders, 1, m);
    for (q, e) in datum.euler.iter().enumerate() {
        let name = format!("q{}", q + 1);
        let p1 = e.p_coeffs.iter().fold(0, |a, &c| (a + c) % m);
        if p1 != 0 {
            return Err(format!("{name}: P(1) = {p1} mod {m}"));
        }
        // (x − 1)·Q(x)
        let mut prod = vec![0u64; e.q_coeffs.len() + 1];
        for (i, &c) in e.q_coeffs.iter().enumerate() {
            prod[i + 1] = (prod[i + 1] + c) % m;
            prod[i] = (prod[i] + m - c % m) % m;
        }
        let mut pc = e.p_coeffs.clone();
        pc.resize(prod.len().max(pc.len()), 0);
        prod.resize(pc.len(), 0);
        if prod != pc {
            return Err(format!("{name}: (x-1)Q(x) = {prod:?} but P = {:?}", e.p_coeffs));
        }
        if e.frob_matrix.len() == 2 {
            let finv = inverse_2x2(&e.frob_matrix, m).ok_or(format!("{name}: Frobenius matrix not invertible"))?;
            let mut cp = char_poly_rev(&finv, m);
            let mut pc = e.p_coeffs.clone();
            let len = cp.len().max(pc.len());
            cp.resize(len, 0);
            pc.resize(len, 0);
            if cp != pc {
                return Err(format!("{name}: det(1 - F^-1 x) = {cp:?} but P = {pc:?}"));
            }
        }
        if e.frob_exps[q] != 0 {
            return Err(format!("{name}: Fr_q has a component in its own G_q"));
        }
        // Cross terms: class of P_q(Fr_q^{-1}) in I/I².
        let lam = lambda_in(&hg, &datum.prime_orders, e, q, m);
        let cls = gp.class_of_element(&lam).map_err(|err| format!("{name}: P_q(Fr_q^-1) not in the augmentation ideal ({err})"))?;
        for q2 in 0..s {
            let mut mono = vec![0u32; s];
            mono[q2] = 1;
            let t = gp.mono_index(&mono).unwrap() - gp.top_start();
            let want = if q2 == q { 0 } else { datum.cross[q][q2] % m };
            if cls[t] != want {
                return Err(format!("{name}: component along q{} is {} but the table has {}", q2 + 1, cls[t], want));
            }
        }
    }
    Ok(())
}

fn lambda_in(g: &FinAbGroup, orders: &[u64], e: &crate::EulerData, q: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; g.size()];
    for (j, &c) in e.p_coeffs.iter().enumerate() {
        let exps: Vec<u64> = (0..orders.len())
            .map(|q2| if q2 == q { 0 } else { (orders[q2] - (j as u64 * e.frob_exps[q2]) % orders[q2]) % orders[q2] })
            .collect();
        let i = g.index(&exps);
        out[i] = (out[i] + c) % m;
    }
    out
}

fn check_a2(datum: &SelmerDatum) -> Result<(), String> {
    let ring = datum.ring();
    if datum.d != datum.r() + datum.s() {
        return Err(format!("H has {} generators, expected r + |P| = {}", datum.d, datum.r() + datum.s()));
    }
    if let Some((i, _)) = datum.h_relations.iter().enumerate().find(|(_, rel)| rel.iter().any(|x| !ring.is_zero(x))) {
        let h = datum.h_module();
        return Err(format!("relation {i} is nonzero: H is not free of rank {} (|H| = {})", datum.d, h.cardinality()));
    }
    Ok(())
}

/// g∘f = 0 and |ker g| = |im f|.
pub fn exact_at(f: &ModuleHom, g: &ModuleHom) -> bool {
    let b = f.dst();
    let p = prime_of(b.ring().modulus());
    if f.images().iter().any(|x| !g.dst().is_zero_elem(&g.apply(x))) {
        return false;
    }
    let rel_b = b.relation_span().span_log(p);
    let rel_c = g.dst().relation_span().span_log(p);
    let im_f = f.image_span().span_log(p) - rel_b;
    let im_g = g.image_span().span_log(p) - rel_c;
    b.log_card() - im_g == im_f
}

fn prime_of(m: u64) -> u64 {
    (2..=m).find(|d| m % d == 0).unwrap()
}

fn check_a3(datum: &SelmerDatum) -> Result<(), String> {
    let ring = datum.ring();
    let h = datum.h_module();
    let s = datum.s();
    let flat = |gens: &[Vec<GroupRingElem>]| gens.iter().map(|g| flatten_vec(&ring, g)).collect::<Vec<_>>();
    let levels = all_levels(s);
    let subs: Vec<(FPModule, ModuleHom)> = levels.iter().map(|&n| submodule(&h, &flat(&datum.relaxed_gens(n)))).collect();
    let shas: Vec<FPModule> = levels.iter().map(|&n| datum.sha_module(n)).collect();
    for &m in &levels {
        for &n in &levels {
            if !divides(n, m) {
                continue;
            }
            let tag = format!("n = {}, m = {}", level_name(n), level_name(m));
            let (a, inc_a) = &subs[n as usize];
            let (b, inc_b) = &subs[m as usize];
            let solver = inc_b.preimage_solver();
            let mut f_imgs = Vec::new();
            for x in inc_a.images() {
                f_imgs.push(solver.solve(x).ok_or(format!("{tag}: H1_F^n is not inside H1_F^m"))?);
            }
            let f = ModuleHom::new(a, b, f_imgs).map_err(|e| format!("{tag}: {e}"))?;
            let between: Vec<usize> = primes_of(m & !n);
            let c = FPModule::free(&ring, between.len());
            let g_imgs: Vec<Vec<u64>> = inc_b
                .images()
                .iter()
                .map(|x| {
                    let coords = h.coords(x);
                    let vals: Vec<GroupRingElem> = between.iter().map(|&q| pair(&ring, &datum.v[q], &coords)).collect();
                    flatten_vec(&ring, &vals)
                })
                .collect();
            let g = ModuleHom::new(b, &c, g_imgs).map_err(|e| format!("{tag}: {e}"))?;
            let dn = &shas[n as usize];
            let em = &shas[m as usize];
            let outside_n: Vec<usize> = (0..s).filter(|q| n & (1 << q) == 0).collect();
            let outside_m: Vec<usize> = (0..s).filter(|q| m & (1 << q) == 0).collect();
            let h_imgs: Vec<Vec<u64>> = between.iter().map(|q| dn.gen(outside_n.iter().position(|x| x == q).unwrap())).collect();
            let hm = ModuleHom::new(&c, dn, h_imgs).map_err(|e| format!("{tag}: {e}"))?;
            let k_imgs: Vec<Vec<u64>> = outside_n
                .iter()
                .map(|q| match outside_m.iter().position(|x| x == q) {
                    Some(i) => em.gen(i),
                    None => em.zero_elem(),
                })
                .collect();
            let k = ModuleHom::new(dn, em, k_imgs).map_err(|e| format!("{tag}: {e}"))?;
            if !f.is_injective() {
                return Err(format!("{tag}: H1_F^n -> H1_F^m not injective"));
            }
            for (name, ok) in [("H1_F^m", exact_at(&f, &g)), ("R^nu(m/n)", exact_at(&g, &hm)), ("Sha2(n)", exact_at(&hm, &k))] {
                if !ok {
                    return Err(format!("{tag}: not exact at {name}"));
                }
            }
            if !k.is_surjective() {
                return Err(format!("{tag}: Sha2(n) -> Sha2(m) not surjective"));
            }
        }
    }
    Ok(())
}

fn check_a4(datum: &SelmerDatum) -> Result<(), String> {
    let ring = datum.ring();
    for (i, rel) in datum.h_relations.iter().enumerate() {
        for q in 0..datum.s() {
            for (name, f) in [("v", &datum.v[q]), ("phi_fs", &datum.phi_fs[q])] {
                if !ring.is_zero(&pair(&ring, f, rel)) {
                    return Err(format!("{name}_q{} does not vanish on relation {i} of H", q + 1));
                }
            }
        }
    }
    for n in all_levels(datum.s()) {
        let funcs = datum.strict_functionals(n);
        for g in datum.strict_gens(n) {
            if let Some(q) = funcs.iter().position(|f| !ring.is_zero(&pair(&ring, f, &g))) {
                return Err(format!("level {}: generator of H1_F(n) not killed by functional at q{}", level_name(n), q + 1));
            }
        }
    }
    Ok(())
}

fn check_b1(t: &TowerDatum, psis: &[grouprings::RMatrix]) -> Result<(), String> {
    let d = t.datum.d;
    for n in all_levels(t.datum.s()) {
        let red = t.projection(n, 0);
        let target = t.datum.level_complex(n).map_err(|e| e.to_string())?;
        let psi = &psis[n as usize];
        for j in 0..d {
            for i in 0..d {
                if red.apply(psi.get(j, i)) != *target.psi().get(j, i) {
                    return Err(format!("level {}: entry ({j}, {i}) does not reduce to the level complex", level_name(n)));
                }
            }
        }
        for q in primes_of(n) {
            let lower = n & !(1 << q);
            let proj = t.projection(n, lower);
            let lam = t.lambda(q, lower);
            let lring = t.level_ring(lower);
            let col_q = t.datum.prime_column(q);
            for j in 0..d {
                for i in 0..d {
                    let got = proj.apply(psi.get(j, i));
                    let below = psis[lower as usize].get(j, i);
                    let want = if i == col_q { lring.mul(&lam, below) } else { below.clone() };
                    if got != want {
                        return Err(format!(
                            "levels {} -> {}: entry ({j}, {i}) breaks the vertical relation",
                            level_name(n),
                            level_name(lower)
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_b2(t: &TowerDatum, psis: &[grouprings::RMatrix]) -> Result<(), String> {
    let d = t.datum.d;
    for n in all_levels(t.datum.s()) {
        let ring = t.level_ring(n);
        let h_factors: Vec<usize> = (t.gamma_factors()..ring.group().nfactors()).collect();
        for q in primes_of(n) {
            let col = t.datum.prime_column(q);
            for j in 0..d {
                let x = psis[n as usize].get(j, col);
                if !ring.is_zero(&ring.kill_factors(x, &h_factors)) {
                    return Err(format!("level {}: prime column entry ({j}, {col}) is not in I_n", level_name(n)));
                }
            }
        }
    }
    Ok(())
}

fn check_b3(t: &TowerDatum, psis: &[grouprings::RMatrix]) -> Result<(), String> {
    for n in all_levels(t.datum.s()) {
        for q in primes_of(n) {
            let got = t.tower_bockstein_of(&psis[n as usize], n, q)?;
            let want = t.table_bockstein(n, q);
            for (k, q2) in primes_of(n).into_iter().enumerate() {
                if let Some(j) = (0..t.datum.d).find(|&j| got[k][j] != want[k][j]) {
                    return Err(format!(
                        "level {}, q{}: component along q{} differs at e_{j} ({:?} vs {:?})",
                        level_name(n),
                        q + 1,
                        q2 + 1,
                        got[k][j],
                        want[k][j]
                    ));
                }
            }
        }
    }
    Ok(())
}
