use std::collections::HashSet;

use grouprings::{GroupRing, GroupRingElem, SubgroupSpec};
use modalg::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c3(m: u64) -> GroupRing {
    GroupRing::cyclic(m, &[3])
}

fn rand_elem(ring: &GroupRing, rng: &mut ChaCha8Rng) -> GroupRingElem {
    (0..ring.dim()).map(|_| rng.gen_range(0..ring.modulus())).collect()
}

/// Elements of the maximal ideal, biased towards small multiples of (g−1) and p.
fn rand_nonunit(ring: &GroupRing, rng: &mut ChaCha8Rng) -> GroupRingElem {
    let p = if ring.modulus() % 3 == 0 { 3 } else { 5 };
    let x = rand_elem(ring, rng);
    match rng.gen_range(0..3) {
        0 => ring.mul(&x, &ring.sub(&ring.gen_pow(0, 1), &ring.one())),
        1 => ring.scale(&x, p),
        _ => {
            let y = ring.mul(&x, &ring.sub(&ring.gen_pow(0, 1), &ring.one()));
            ring.add(&y, &ring.scale(&rand_elem(ring, rng), p))
        }
    }
}

fn rand_module(ring: &GroupRing, rng: &mut ChaCha8Rng, max_gens: usize) -> FPModule {
    let g = rng.gen_range(1..=max_gens);
    let nrel = rng.gen_range(0..=g);
    let rels = (0..nrel)
        .map(|_| {
            (0..g)
                .map(|_| if rng.gen_bool(0.5) { rand_nonunit(ring, rng) } else { ring.zero() })
                .collect()
        })
        .collect();
    FPModule::new(ring, g, rels)
}

fn rand_module_elem(x: &FPModule, rng: &mut ChaCha8Rng) -> Elem {
    let c: Vec<GroupRingElem> = (0..x.ngens()).map(|_| rand_elem(x.ring(), rng)).collect();
    x.from_coords(&c)
}

fn all_ring_elems(ring: &GroupRing) -> Vec<GroupRingElem> {
    let m = ring.modulus();
    let n = ring.dim();
    let total = (m as usize).pow(n as u32);
    (0..total)
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = (k % m as usize) as u64;
                    k /= m as usize;
                    d
                })
                .collect()
        })
        .collect()
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn hom_examples() {
    let r = c3(3);
    let free1 = FPModule::free(&r, 1);
    let h = hom_module(&free1, &free1);
    assert_eq!(h.module().cardinality(), free1.cardinality());
    let id = h.from_tuple(&[free1.gen(0)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let x = rand_module_elem(&free1, &mut rng);
        assert_eq!(h.evaluate(&id, &x), x);
    }

    let gm1 = r.sub(&r.gen_pow(0, 1), &r.one());
    let cyc = FPModule::new(&r, 1, vec![vec![gm1.clone()]]);
    let hc = hom_module(&cyc, &free1);
    // Oracle: images a of the generator with (g−1)a = 0.
    let count = all_ring_elems(&r).into_iter().filter(|a| r.is_zero(&r.mul(&gm1, a))).count();
    assert_eq!(count, 3);
    assert_eq!(hc.module().cardinality(), 3u32.into());
    let n = r.norm_element(&SubgroupSpec::whole(r.group()));
    let hn = hc.from_tuple(&[n.clone()]).unwrap();
    assert_eq!(hc.module().span_of(&[hn]).span_size(), hc.module().relation_span().span_size() * 3u32);
    assert!(hc.from_tuple(&[r.one()]).is_none());

    let zero = FPModule::zero(&r);
    assert!(hom_module(&zero, &free1).module().is_zero_module());
}

#[test]
fn hom_cardinality_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let r = c3(3);
    let elems = all_ring_elems(&r);
    for _ in 0..15 {
        let x = rand_module(&r, &mut rng, 2);
        let y = rand_module(&r, &mut rng, 1);
        let h = hom_module(&x, &y);
        // Brute force over images in Y of each generator, counted up to equality in Y.
        let yelems: Vec<Elem> = {
            let mut s = HashSet::new();
            for e in &elems {
                s.insert(y.from_coords(&[e.clone()]));
            }
            s.into_iter().collect()
        };
        let mut count = 0u64;
        let mut idx = vec![0usize; x.ngens()];
        loop {
            let imgs: Vec<Elem> = idx.iter().map(|&i| yelems[i].clone()).collect();
            if x.relations().iter().all(|rho| y.is_zero_elem(&y.combine(rho, &imgs))) {
                count += 1;
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < yelems.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        assert_eq!(h.module().cardinality(), count.into());
        for _ in 0..3 {
            let f = rand_module_elem(h.module(), &mut rng);
            let a = rand_module_elem(&x, &mut rng);
            let b = rand_module_elem(&x, &mut ring_rng(&mut rng));
            let s = rand_elem(&r, &mut rng);
            let lhs = h.evaluate(&f, &x.add(&x.act(&s, &a), &b));
            let rhs = y.add(&y.act(&s, &h.evaluate(&f, &a)), &h.evaluate(&f, &b));
            assert_eq!(lhs, rhs);
        }
    }
}

fn ring_rng(rng: &mut ChaCha8Rng) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(rng.gen())
}

#[test]
fn dual_examples() {
    for m in [3, 9] {
        let r = c3(m);
        for d in 0..=3 {
            let f = FPModule::free(&r, d);
            let df = dual(&f);
            assert_eq!(df.module().ngens(), d);
            assert_eq!(df.module().cardinality(), f.cardinality());
            for j in 0..d {
                let t = df.gen_tuple(j);
                for (i, v) in t.iter().enumerate() {
                    assert_eq!(v, &if i == j { r.one() } else { r.zero() });
                }
            }
        }
    }
    let r = c3(3);
    let x = r.sub(&r.gen_pow(0, 1), &r.one());
    let cyc = FPModule::new(&r, 1, vec![vec![x.clone()]]);
    let dc = dual(&cyc);
    // Oracle: annihilator of x in R, enumerated.
    let ann: Vec<GroupRingElem> = all_ring_elems(&r).into_iter().filter(|a| r.is_zero(&r.mul(a, &x))).collect();
    assert_eq!(ann.len(), 3);
    assert_eq!(dc.module().cardinality(), 3u32.into());
    assert!(ann.contains(&r.mul(&x, &x)));
    assert!(dual(&FPModule::zero(&r)).module().is_zero_module());
}

#[test]
fn exterior_examples() {
    let r = c3(9);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = rand_module(&r, &mut rng, 3);
    let e0 = exterior_power(&x, 0).unwrap();
    assert_eq!(e0.module().ngens(), 1);
    assert_eq!(e0.module().cardinality(), FPModule::free(&r, 1).cardinality());

    let f2 = FPModule::free(&r, 2);
    let e2 = exterior_power(&f2, 2).unwrap();
    assert_eq!(e2.module().cardinality(), FPModule::free(&r, 1).cardinality());
    let w = e2.wedge(&[f2.gen(0), f2.gen(1)]);
    assert_eq!(w, e2.basis(&[0, 1]));
    let w2 = e2.wedge(&[f2.gen(1), f2.gen(0)]);
    assert_eq!(w2, e2.module().neg(&w));

    let cyc = FPModule::new(&r, 1, vec![vec![r.scale(&r.one(), 3)]]);
    assert!(exterior_power(&cyc, 2).unwrap().module().is_zero_module());
    assert!(matches!(exterior_power(&f2, 7), Err(ModAlgError::DegreeTooLarge(7))));
}

/// Wedges are alternating and multilinear, and respect relations.
#[test]
fn wedge_is_alternating() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for m in [3, 9] {
        let r = c3(m);
        for _ in 0..10 {
            let x = rand_module(&r, &mut rng, 3);
            let e = exterior_power(&x, 2).unwrap();
            let a = rand_module_elem(&x, &mut rng);
            let b = rand_module_elem(&x, &mut rng);
            let c = rand_module_elem(&x, &mut rng);
            let s = rand_elem(&r, &mut rng);
            assert!(e.module().is_zero_elem(&e.wedge(&[a.clone(), a.clone()])));
            let lhs = e.wedge(&[x.add(&x.act(&s, &a), &c), b.clone()]);
            let rhs = e.module().add(&e.module().act(&s, &e.wedge(&[a.clone(), b.clone()])), &e.wedge(&[c.clone(), b.clone()]));
            assert_eq!(lhs, rhs);
            // Changing a lift by a relation does not change the wedge.
            if let Some(rho) = x.relations().first() {
                let rel = grouprings::flatten_vec(&r, rho);
                let a2: Vec<u64> = a.iter().zip(&rel).map(|(&u, &v)| (u + v) % m).collect();
                assert_eq!(e.wedge(&[a2, b.clone()]), e.wedge(&[a, b]));
            }
        }
    }
}

#[test]
fn contraction_examples() {
    let r = c3(3);
    let f2 = FPModule::free(&r, 2);
    let e1 = exterior_power(&f2, 1).unwrap();
    let e2 = exterior_power(&f2, 2).unwrap();
    let b1star = vec![r.one(), r.zero()];
    let c = contraction(&b1star, &e2, &e1).unwrap();
    assert_eq!(c.apply(&e2.basis(&[0, 1])), e1.basis(&[1]));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let e0 = exterior_power(&f2, 0).unwrap();
    let phi: Vec<GroupRingElem> = (0..2).map(|_| rand_elem(&r, &mut rng)).collect();
    let c1 = contraction(&phi, &e1, &e0).unwrap();
    for i in 0..2 {
        assert_eq!(c1.apply(&e1.basis(&[i])), e0.module().from_coords(&[phi[i].clone()]));
    }
    // r = 2: φ(x1)x2 − φ(x2)x1.
    let x1 = rand_module_elem(&f2, &mut rng);
    let x2 = rand_module_elem(&f2, &mut rng);
    let ev = |x: &Elem| {
        let cs = f2.coords(x);
        r.add(&r.mul(&cs[0], &phi[0]), &r.mul(&cs[1], &phi[1]))
    };
    let c2 = contraction(&phi, &e2, &e1).unwrap();
    let lhs = c2.apply(&e2.wedge(&[x1.clone(), x2.clone()]));
    let rhs = f2.sub(&f2.act(&ev(&x1), &x2), &f2.act(&ev(&x2), &x1));
    assert_eq!(lhs, e1.module().reduce(&rhs));
}

#[test]
fn wedge_dual_apply_examples() {
    let r = c3(9);
    for d in 1..=3usize {
        let f = FPModule::free(&r, d);
        let df = dual(&f);
        let vals: Vec<Vec<GroupRingElem>> = (0..d).map(|j| df.gen_tuple(j)).collect();
        let ed = exterior_power(df.module(), d).unwrap();
        let ex = exterior_power(&f, d).unwrap();
        let e0 = exterior_power(&f, 0).unwrap();
        let all: Vec<usize> = (0..d).collect();
        let phi = ed.basis(&all);
        let one = wedge_dual_apply(&ed, &vals, &phi, &ex, &ex.basis(&all), &e0).unwrap();
        assert_eq!(one, e0.module().gen(0));
        if d >= 2 {
            let mut gens: Vec<Elem> = (0..d).map(|i| f.gen(i)).collect();
            gens.swap(0, 1);
            let a = ex.wedge(&gens);
            let v = wedge_dual_apply(&ed, &vals, &phi, &ex, &a, &e0).unwrap();
            assert_eq!(v, e0.module().neg(&e0.module().gen(0)));
        }
    }
    let f = FPModule::free(&r, 2);
    let df = dual(&f);
    let vals: Vec<Vec<GroupRingElem>> = (0..2).map(|j| df.gen_tuple(j)).collect();
    let ed2 = exterior_power(df.module(), 2).unwrap();
    let ex1 = exterior_power(&f, 1).unwrap();
    let e0 = exterior_power(&f, 0).unwrap();
    assert!(matches!(
        wedge_dual_apply(&ed2, &vals, &ed2.basis(&[0, 1]), &ex1, &ex1.basis(&[0]), &e0),
        Err(ModAlgError::DegreeMismatch { .. })
    ));
}

/// On decomposables, Φ = φ1 ∧ φ2 applied to a ∈ ∧^3 R^3 equals φ2^{(2)} ∘ φ1^{(3)}.
#[test]
fn wedge_dual_apply_matches_iterated_contraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for m in [3, 9] {
        let r = c3(m);
        let f = FPModule::free(&r, 3);
        let df = dual(&f);
        let vals: Vec<Vec<GroupRingElem>> = (0..3).map(|j| df.gen_tuple(j)).collect();
        let e: Vec<ExteriorPower> = (0..=3).map(|k| exterior_power(&f, k).unwrap()).collect();
        let ed2 = exterior_power(df.module(), 2).unwrap();
        let b = Bidual::with_dual(&df, 2).unwrap();
        for _ in 0..20 {
            let phi1: Vec<GroupRingElem> = (0..3).map(|_| rand_elem(&r, &mut rng)).collect();
            let phi2: Vec<GroupRingElem> = (0..3).map(|_| rand_elem(&r, &mut rng)).collect();
            let xs: Vec<Elem> = (0..3).map(|_| rand_module_elem(&f, &mut rng)).collect();
            let a = e[3].wedge(&xs);
            let big = b.dual_wedge(&ed2, &[phi1.clone(), phi2.clone()]).unwrap();
            let lhs = wedge_dual_apply(&ed2, &vals, &big, &e[3], &a, &e[1]).unwrap();
            let step1 = contraction(&phi1, &e[3], &e[2]).unwrap().apply(&a);
            let rhs = contraction(&phi2, &e[2], &e[1]).unwrap().apply(&step1);
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn bidual_examples() {
    let r = c3(3);
    for d in 0..=3usize {
        let f = FPModule::free(&r, d);
        for k in 0..=d {
            let b = bidual(&f, k).unwrap();
            let expect = FPModule::free(&r, binom(d, k)).cardinality();
            assert_eq!(b.module().cardinality(), expect);
        }
    }
    let cyc = FPModule::new(&r, 1, vec![vec![r.sub(&r.gen_pow(0, 1), &r.one())]]);
    assert!(bidual(&cyc, 2).unwrap().module().is_zero_module());
    let b0 = bidual(&cyc, 0).unwrap();
    assert_eq!(b0.module().cardinality(), FPModule::free(&r, 1).cardinality());
    assert!(b0.xi_hom().is_injective() && b0.xi_hom().is_surjective());
}

/// ξ^r_X bijective for free X of rank ≤ 4, r ≤ 3.
#[test]
fn xi_bijective_on_free() {
    for m in [3, 9] {
        let r = c3(m);
        for d in 0..=4usize {
            let f = FPModule::free(&r, d);
            let df = dual(&f);
            for k in 0..=3usize.min(d) {
                let b = Bidual::with_dual(&df, k).unwrap();
                let xi = b.xi_hom();
                assert!(xi.is_injective(), "m {} d {} r {}", m, d, k);
                assert_eq!(b.module().cardinality(), b.exterior().module().cardinality());
            }
        }
    }
}

/// ∩^1 X ≅ X through ξ on random finitely presented X.
#[test]
fn bidual_one_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in [3, 9] {
        let r = c3(m);
        for _ in 0..15 {
            let x = rand_module(&r, &mut rng, 3);
            let b = bidual(&x, 1).unwrap();
            let xi = b.xi_hom();
            assert_eq!(b.module().cardinality(), x.cardinality());
            assert!(xi.is_injective());
            assert!(xi.is_surjective());
        }
    }
}

/// bidual_contract(Φ) ∘ ξ_s = ξ_{s−r} ∘ wedge_dual_apply(Φ, ·).
#[test]
fn contract_square_commutes() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for m in [3, 9] {
        let r = c3(m);
        for _ in 0..8 {
            let x = rand_module(&r, &mut rng, 3);
            let dx = dual(&x);
            let s = rng.gen_range(0..=x.ngens().min(3));
            let k = rng.gen_range(0..=s);
            let bs = Bidual::with_dual(&dx, s).unwrap();
            let bl = Bidual::with_dual(&dx, s - k).unwrap();
            let phi_ext = exterior_power(dx.module(), k).unwrap();
            let phi = rand_module_elem(phi_ext.module(), &mut rng);
            let contract = bidual_contract(&bs, &bl, &phi_ext, &phi).unwrap();
            for _ in 0..3 {
                let a = rand_module_elem(bs.exterior().module(), &mut rng);
                let lhs = contract.apply(&bs.xi(&a));
                let w = wedge_dual_apply(&phi_ext, bs.dual_gen_values(), &phi, bs.exterior(), &a, bl.exterior()).unwrap();
                assert_eq!(lhs, bl.xi(&w));
            }
            // Direct evaluation: (contract F)(Ψ) = F(Φ ∧ Ψ) on basis wedges.
            let f = rand_module_elem(bs.module(), &mut rng);
            let g = contract.apply(&f);
            for (vi, v) in bl.exterior_dual().subsets().iter().enumerate() {
                let psi = bl.exterior_dual().basis(v);
                let mut acc = r.zero();
                let pc = phi_ext.module().coords(&phi);
                for (sset, c) in phi_ext.subsets().iter().zip(&pc) {
                    if let Some((neg, w)) = merge_sign(sset, v) {
                        let val = bs.evaluate(&f, &bs.exterior_dual().basis(&w));
                        let t = r.mul(c, &val);
                        acc = if neg { r.sub(&acc, &t) } else { r.add(&acc, &t) };
                    }
                }
                assert_eq!(bl.evaluate(&g, &psi), acc, "wedge {}", vi);
            }
        }
    }
}

#[test]
fn bidual_inclusion_examples() {
    let r = c3(9);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = rand_module(&r, &mut rng, 2);
    let id = ModuleHom::identity(&x);
    let b = bidual(&x, 1).unwrap();
    let inc = bidual_inclusion(&id, &b, &b).unwrap();
    for i in 0..b.module().ngens() {
        let g = b.module().gen(i);
        assert_eq!(inc.apply(&g), g);
    }

    let r1 = FPModule::free(&r, 1);
    let r2 = FPModule::free(&r, 2);
    let split = ModuleHom::new(&r1, &r2, vec![r2.gen(0)]).unwrap();
    for k in 0..=1 {
        let b1 = bidual(&r1, k).unwrap();
        let b2 = bidual(&r2, k).unwrap();
        let inc = bidual_inclusion(&split, &b1, &b2).unwrap();
        assert!(inc.is_injective());
    }

    // (g−1)·R ⊂ R: R is self-injective, so the dual restriction is onto and
    // the induced map is injective.
    let gm1 = r.sub(&r.gen_pow(0, 1), &r.one());
    let (sub, incl) = submodule(&r1, &[r1.from_coords(&[gm1.clone()])]);
    let bs = bidual(&sub, 1).unwrap();
    let b1 = bidual(&r1, 1).unwrap();
    assert!(bidual_inclusion(&incl, &bs, &b1).unwrap().is_injective());

    let not_inj = ModuleHom::new(&r1, &r1, vec![r1.from_coords(&[gm1])]).unwrap();
    assert!(matches!(bidual_inclusion(&not_inj, &b1, &b1), Err(ModAlgError::NotInjective)));
}

#[test]
fn bidual_restrict_examples() {
    let r = c3(3);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // s = 0.
    let y = rand_module(&r, &mut rng, 2);
    let dy = dual(&y);
    let b = Bidual::with_dual(&dy, 1).unwrap();
    let res = bidual_restrict(&b, &b, &[]).unwrap();
    assert_eq!(res.kernel.cardinality(), y.cardinality());
    assert!(res.map.is_injective() && res.map.is_surjective());

    // Y = R^{r+s}, φ_i the last s coordinate projections.
    for (rr, s) in [(1usize, 1usize), (1, 2), (2, 1)] {
        let y = FPModule::free(&r, rr + s);
        let dy = dual(&y);
        let top = Bidual::with_dual(&dy, rr + s).unwrap();
        let low = Bidual::with_dual(&dy, rr).unwrap();
        let phis: Vec<Vec<GroupRingElem>> = (rr..rr + s)
            .map(|i| (0..rr + s).map(|u| if u == i { r.one() } else { r.zero() }).collect())
            .collect();
        let res = bidual_restrict(&top, &low, &phis).unwrap();
        assert_eq!(res.kernel.cardinality(), FPModule::free(&r, rr).cardinality());
        assert!(res.map.is_surjective());
        assert_eq!(res.bidual_kernel.module().cardinality(), FPModule::free(&r, 1).cardinality());
    }
}

/// Random split instances: contraction lands inside ∩^r X (Howell membership).
#[test]
fn bidual_restrict_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in [3, 9] {
        let r = c3(m);
        for _ in 0..6 {
            let rr = rng.gen_range(1..=2);
            let s = rng.gen_range(1..=2);
            let y = FPModule::free(&r, rr + s);
            let dy = dual(&y);
            let top = Bidual::with_dual(&dy, rr + s).unwrap();
            let low = Bidual::with_dual(&dy, rr).unwrap();
            let phis: Vec<Vec<GroupRingElem>> =
                (0..s).map(|_| (0..rr + s).map(|_| rand_elem(&r, &mut rng)).collect()).collect();
            let res = bidual_restrict(&top, &low, &phis).unwrap();
            let phi_ext = exterior_power(dy.module(), s).unwrap();
            let phi = top.dual_wedge(&phi_ext, &phis).unwrap();
            let contract = bidual_contract(&top, &low, &phi_ext, &phi).unwrap();
            for _ in 0..3 {
                let f = rand_module_elem(top.module(), &mut rng);
                let lhs = res.bidual_inclusion.apply(&res.map.apply(&f));
                assert_eq!(lhs, contract.apply(&f));
            }
        }
    }
}

#[test]
fn invariants_identify_examples() {
    let r = c3(3);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let x = rand_module(&r, &mut rng, 2);
    let triv = SubgroupSpec::trivial(r.group());
    let iso = invariants_identify(&x, &triv, 1).unwrap();
    assert!(iso.is_isomorphism());

    for d in 1..=2usize {
        let f = FPModule::free(&r, d);
        for k in 0..=d {
            let iso = invariants_identify(&f, &SubgroupSpec::whole(r.group()), k).unwrap();
            assert!(iso.is_isomorphism());
            // Over R[G/G] = Z/3 the right side is ∧^k of a free Z/3-module of rank d.
            let expect = 3u32.pow(binom(d, k) as u32);
            assert_eq!(iso.bidual_xh.module().cardinality(), expect.into());
        }
    }
}

#[test]
fn invariants_identify_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (m, orders, h) in [(3u64, vec![3u64], vec![3u64]), (3, vec![9], vec![3]), (3, vec![3, 3], vec![1, 3]), (9, vec![3], vec![3])] {
        let r = GroupRing::cyclic(m, &orders);
        let hs = SubgroupSpec { orders: h };
        for _ in 0..4 {
            let x = rand_module(&r, &mut rng, 2);
            let k = rng.gen_range(1..=2);
            let iso = invariants_identify(&x, &hs, k).unwrap();
            assert!(iso.is_isomorphism());
            let src = iso.bidual_xh.module();
            for _ in 0..3 {
                let f = rand_module_elem(src, &mut rng);
                let g = iso.forward(&f);
                assert_eq!(iso.inverse(&g).unwrap(), f);
            }
        }
    }
}

#[test]
fn image_ideal_examples() {
    let r = c3(9);
    let f = FPModule::free(&r, 2);
    let b = bidual(&f, 2).unwrap();
    let basis = b.exterior().basis(&[0, 1]);
    let xi = b.xi(&basis);
    assert_eq!(b.image_ideal(&xi), vec![r.one()]);
    assert!(b.image_ideal(&b.module().zero_elem()).is_empty());
    let a = r.sub(&r.gen_pow(0, 1), &r.one());
    let ax = b.module().act(&a, &xi);
    assert_eq!(b.image_ideal(&ax), vec![a]);
}

#[test]
fn submodule_and_quotient_sizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let r = c3(9);
    for _ in 0..10 {
        let x = rand_module(&r, &mut rng, 3);
        let elems: Vec<Elem> = (0..2).map(|_| rand_module_elem(&x, &mut rng)).collect();
        let (sub, inc) = submodule(&x, &elems);
        assert!(inc.is_injective());
        let q = quotient(&x, &elems);
        assert_eq!(sub.log_card() + q.log_card(), x.log_card());
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn xi_one_bijective(seed in any::<u64>(), m in prop_oneof![Just(3u64), Just(9u64)]) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = c3(m);
            let x = rand_module(&r, &mut rng, 2);
            let b = bidual(&x, 1).unwrap();
            let xi = b.xi_hom();
            prop_assert!(xi.is_injective());
            prop_assert!(xi.is_surjective());
        }

        #[test]
        fn dual_of_dual_has_same_size(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = c3(9);
            let x = rand_module(&r, &mut rng, 2);
            let d = dual(&x);
            prop_assert_eq!(d.module().cardinality(), x.cardinality());
        }
    }
}
