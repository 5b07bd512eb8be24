use complexes::*;
use fitting::{annihilator_ideal, fitting_ideal, ideal_of, Ideal};
use grouprings::{flatten_vec, GroupRing, GroupRingElem, RMatrix, RingMap};
use modalg::{submodule, Bidual, FPModule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rand_elem(ring: &GroupRing, rng: &mut ChaCha8Rng) -> GroupRingElem {
    (0..ring.dim()).map(|_| rng.gen_range(0..ring.modulus())).collect()
}

fn rand_invertible(ring: &GroupRing, d: usize, rng: &mut ChaCha8Rng) -> RMatrix {
    loop {
        let a = RMatrix::from_rows((0..d).map(|_| (0..d).map(|_| rand_elem(ring, rng)).collect()).collect(), d);
        if ring.is_unit(&a.det(ring)) {
            return a;
        }
    }
}

/// Element of the maximal ideal: augmentation divisible by p.
fn rand_nonunit(ring: &GroupRing, rng: &mut ChaCha8Rng) -> GroupRingElem {
    let p = (2..=ring.modulus()).find(|d| ring.modulus() % d == 0).unwrap();
    loop {
        let x = rand_elem(ring, rng);
        if ring.augmentation(&x) % p == 0 {
            return x;
        }
    }
}

fn rings() -> Vec<GroupRing> {
    vec![GroupRing::cyclic(9, &[]), GroupRing::cyclic(3, &[3]), GroupRing::cyclic(9, &[3]), GroupRing::cyclic(5, &[5])]
}

/// A complex in standard shape (first r columns zero) hidden by random base
/// changes on both sides, with the matching f.
fn hidden_complex(ring: &GroupRing, d: usize, r: usize, rng: &mut ChaCha8Rng) -> (TwoTermComplex, RMatrix) {
    let mut psi0 = RMatrix::zeros(ring, d, d);
    for i in r..d {
        let scale = match rng.gen_range(0..3) {
            0 => ring.one(),
            1 => rand_nonunit(ring, rng),
            _ => rand_elem(ring, rng),
        };
        for j in 0..d {
            let x = ring.mul(&scale, &rand_elem(ring, rng));
            psi0.set(j, i, x);
        }
    }
    let mut f0 = RMatrix::zeros(ring, d, r);
    for i in 0..r {
        f0.set(i, i, ring.one());
    }
    let a = rand_invertible(ring, d, rng);
    let c = rand_invertible(ring, d, rng);
    let cinv = invert(ring, &c).unwrap();
    let psi = a.mul(ring, &psi0).mul(ring, &c);
    let f = cinv.mul(ring, &f0);
    (TwoTermComplex::new(ring, psi).unwrap(), f)
}

fn elem(ring: &GroupRing, coeffs: &[(usize, u64)]) -> GroupRingElem {
    let mut x = ring.zero();
    for &(g, c) in coeffs {
        x[g] = c % ring.modulus();
    }
    x
}

fn std_z(ring: &GroupRing) -> DetElement {
    DetElement::new("e", ring.one())
}

#[test]
fn two_by_two_example() {
    for ring in rings() {
        let a = if ring.dim() == 1 { ring.scalar(3) } else { elem(&ring, &[(1, 1), (0, ring.modulus() - 1)]) };
        let psi = RMatrix::from_rows(vec![vec![ring.zero(), ring.zero()], vec![ring.zero(), a.clone()]], 2);
        let c = TwoTermComplex::new(&ring, psi).unwrap();
        let f = RMatrix::from_rows(vec![vec![ring.one()], vec![ring.zero()]], 1);
        let rep = standardize(&c, &f, None).unwrap();
        let pi = pi_map(&rep, &std_z(&ring));
        assert_eq!(pi, vec![a.clone(), ring.zero()]);
        // (b1, b2) itself is adapted.
        let b = StandardRep::new(&c, f.clone(), RMatrix::identity(&ring, 2)).unwrap();
        assert_eq!(pi_map(&b, &std_z(&ring)), pi);
        // Ideal of evaluations is ⟨a⟩ = Fitt¹(R ⊕ R/a).
        let evs: Vec<GroupRingElem> = (0..2)
            .map(|i| {
                let mut phi = vec![ring.zero(); 2];
                phi[i] = ring.one();
                ev_phi(&rep, &phi, &std_z(&ring))
            })
            .collect();
        let fitt = fitting_ideal(&c.h1(), 1).unwrap();
        assert_eq!(ideal_of(&ring, &evs), fitt);
        assert_eq!(fitt, ideal_of(&ring, &[a.clone()]));
        // a = 0 gives the zero map.
        let c0 = TwoTermComplex::new(&ring, RMatrix::zeros(&ring, 2, 2)).unwrap();
        let rep0 = standardize(&c0, &f, None).unwrap();
        assert!(pi_map(&rep0, &std_z(&ring)).iter().all(|x| ring.is_zero(x)));
    }
}

#[test]
fn trivial_cases() {
    let ring = GroupRing::cyclic(9, &[3]);
    // ψ = 0, d = r, f = id: every basis is adapted, Π(z) = u·e_1∧…∧e_d.
    for d in 1..=3 {
        let c = TwoTermComplex::new(&ring, RMatrix::zeros(&ring, d, d)).unwrap();
        let f = RMatrix::identity(&ring, d);
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let b = rand_invertible(&ring, d, &mut rng);
        let rep = StandardRep::new(&c, f.clone(), b).unwrap();
        let u = elem(&ring, &[(0, 2), (1, 1)]);
        assert_eq!(pi_map(&rep, &DetElement::new("e", u.clone())), vec![u]);
    }
    // ψ = identity, r = 0: H¹ = 0 and ev over ∧⁰ is the unit ideal.
    let c = TwoTermComplex::new(&ring, RMatrix::identity(&ring, 3)).unwrap();
    let rep = standardize(&c, &RMatrix::zeros(&ring, 3, 0), None).unwrap();
    let v = ev_phi(&rep, &[ring.one()], &std_z(&ring));
    assert!(ideal_of(&ring, &[v]).is_unit());
}

#[test]
fn standardize_errors() {
    let ring = GroupRing::cyclic(9, &[]);
    let psi = RMatrix::from_rows(vec![vec![ring.zero(), ring.one()], vec![ring.zero(), ring.zero()]], 2);
    let c = TwoTermComplex::new(&ring, psi).unwrap();
    let bad = RMatrix::from_rows(vec![vec![ring.zero()], vec![ring.one()]], 1);
    assert_eq!(standardize(&c, &bad, None).unwrap_err(), ComplexError::NotWellDefined);
    let nonsurj = RMatrix::from_rows(vec![vec![ring.scalar(3)], vec![ring.zero()]], 1);
    assert_eq!(standardize(&c, &nonsurj, None).unwrap_err(), ComplexError::NotSurjective);
    let ok = RMatrix::from_rows(vec![vec![ring.one()], vec![ring.zero()]], 1);
    let rep = standardize(&c, &ok, None).unwrap();
    // Swapping the basis breaks adaptedness.
    let swapped = RMatrix::from_rows(vec![rep.basis().row(1).to_vec(), rep.basis().row(0).to_vec()], 2);
    assert!(StandardRep::new(&c, ok, swapped).is_err());
    assert!(TwoTermComplex::new(&ring, RMatrix::zeros(&ring, 2, 3)).is_err());
}

#[test]
fn generated_complexes_standardize() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for ring in rings() {
        for _ in 0..10 {
            let d = rng.gen_range(1..=4);
            let r = rng.gen_range(0..=d);
            let (c, f) = hidden_complex(&ring, d, r, &mut rng);
            let rep = standardize(&c, &f, None).unwrap();
            rep.validate().unwrap();
            let rep2 = standardize(&c, &f, Some(&mut rng)).unwrap();
            rep2.validate().unwrap();
        }
    }
}

fn annihilator_of_coords(ring: &GroupRing, coords: &[GroupRingElem]) -> Ideal {
    annihilator_ideal(&ideal_of(ring, coords))
}

#[test]
fn annihilators_of_pi_image() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nonsplit = 0;
    for k in 0..100 {
        let ring = &rings()[k % 4];
        let d = rng.gen_range(1..=4);
        let r = rng.gen_range(0..=d);
        let (c, f) = hidden_complex(ring, d, r, &mut rng);
        let rep = standardize(&c, &f, Some(&mut rng)).unwrap();
        let pi = pi_map(&rep, &std_z(ring));
        // Π lands in ∩^r H⁰.
        assert!(c.h0_bidual(r).contains(&pi));
        let h1 = c.h1();
        let fitt_r = fitting_ideal(&h1, r).unwrap();
        // ker f ⊆ H¹.
        let fcols: Vec<Vec<GroupRingElem>> = (0..r).map(|i| f.col(i)).collect();
        let kgens: Vec<Vec<u64>> = modalg::left_kernel(ring, d, &fcols).iter().map(|v| flatten_vec(ring, v)).collect();
        let (kerf, _) = submodule(&h1, &kgens);
        let fitt0 = fitting_ideal(&kerf, 0).unwrap();
        if !fitt0.is_unit() && !fitt0.is_zero() {
            nonsplit += 1;
        }
        // The ideal of evaluations is Fitt^r(H¹) = Fitt⁰(ker f).
        let evs = ideal_of(ring, &pi);
        assert_eq!(evs, fitt_r, "instance {k}");
        assert_eq!(fitt_r, fitt0, "instance {k}");
        let ann = annihilator_of_coords(ring, &pi);
        assert_eq!(ann, annihilator_ideal(&fitt_r));
        assert_eq!(ann, annihilator_ideal(&fitt0));
    }
    assert!(nonsplit > 10, "only {nonsplit} non-split instances");
}

#[test]
fn split_complexes_give_generators() {
    // H¹ free of rank r and f an isomorphism: Π(z) generates ∩^r H⁰ ≅ R.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..100 {
        let ring = &rings()[k % 4];
        let d = rng.gen_range(1..=4);
        let r = rng.gen_range(0..=d);
        let mut psi0 = RMatrix::zeros(ring, d, d);
        for i in r..d {
            psi0.set(i, i, ring.one());
        }
        let a = rand_invertible(ring, d, &mut rng);
        let c = rand_invertible(ring, d, &mut rng);
        let cinv = invert(ring, &c).unwrap();
        let cx = TwoTermComplex::new(ring, a.mul(ring, &psi0).mul(ring, &c)).unwrap();
        let mut f0 = RMatrix::zeros(ring, d, r);
        for i in 0..r {
            f0.set(i, i, ring.one());
        }
        let f = cinv.mul(ring, &f0);
        let rep = standardize(&cx, &f, Some(&mut rng)).unwrap();
        let pi = pi_map(&rep, &std_z(ring));
        let host = cx.h0_bidual(r);
        assert!(host.contains(&pi));
        let (module, incl) = host.module();
        let gen = incl.dst().from_coords(&pi);
        let free = incl.dst().clone();
        let span = free.span_of(&[gen]);
        assert_eq!(span.span_size(), incl.image_span().span_size(), "instance {k}");
        assert_eq!(module.cardinality(), FPModule::free(ring, 1).cardinality());
    }
}

#[test]
fn pi_independent_of_representative() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for k in 0..50 {
        let ring = &rings()[k % 4];
        let d = rng.gen_range(1..=4);
        let r = rng.gen_range(0..=d);
        let (c, f) = hidden_complex(ring, d, r, &mut rng);
        let u = rand_elem(ring, &mut rng);
        let z = DetElement::new("e", u);
        let base = pi_map(&standardize(&c, &f, None).unwrap(), &z);
        for _ in 0..5 {
            let rep = standardize(&c, &f, Some(&mut rng)).unwrap();
            assert_eq!(pi_map(&rep, &z), base, "instance {k}");
        }
    }
}

#[test]
fn pi_agrees_with_generic_bidual() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for k in 0..12 {
        let ring = &rings()[k % 3];
        let d = rng.gen_range(1..=3);
        let r = rng.gen_range(0..=d);
        let (c, f) = hidden_complex(ring, d, r, &mut rng);
        let rep = standardize(&c, &f, Some(&mut rng)).unwrap();
        let z = DetElement::new("e", rand_elem(ring, &mut rng));
        let (res, img) = pi_map_bidual(&rep, &z).unwrap();
        let low = Bidual::new(&FPModule::free(ring, d), r).unwrap();
        let ambient = pi_map(&rep, &z);
        let expected = low.xi(&low.exterior().module().from_coords(&ambient));
        assert!(low.module().eq_elem(&res.bidual_inclusion.apply(&img), &expected), "instance {k}");
    }
}

#[test]
fn det_element_base_change() {
    let ring = GroupRing::cyclic(9, &[3]);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let t = rand_invertible(&ring, 3, &mut rng);
    let z = DetElement::new("e", rand_elem(&ring, &mut rng));
    let w = z.change_basis(&ring, &t, "t").unwrap();
    assert_eq!(w.coord, z.coord);
    assert_eq!(w.tag, "t");
    let two = z.scale(&ring, &ring.scalar(2));
    assert_eq!(two.coord, ring.scale(&z.coord, 2));
}

#[test]
fn euler_factor_examples() {
    let ring = GroupRing::cyclic(3, &[]);
    assert_eq!(euler_factor(&ring, &RMatrix::zeros(&ring, 2, 2)), ring.one());
    assert_eq!(euler_factor(&ring, &RMatrix::identity(&ring, 2)), ring.zero());
    // Companion matrix of x² is nilpotent, so det(1 − U) = 1.
    let comp = RMatrix::from_rows(vec![vec![ring.zero(), ring.zero()], vec![ring.one(), ring.zero()]], 2);
    assert_eq!(euler_factor(&ring, &comp), ring.one());
    // U = [[1, 1], [0, 2]] over Z/3: det [[0, −1], [0, −1]] = 0.
    let u = RMatrix::from_rows(vec![vec![ring.one(), ring.one()], vec![ring.zero(), ring.scalar(2)]], 2);
    assert_eq!(euler_factor(&ring, &u), ring.zero());
    // Over a group ring: U = g·1 gives 1 − g.
    let gr = GroupRing::cyclic(3, &[3]);
    let g = gr.basis(1);
    let ef = euler_factor(&gr, &RMatrix::from_rows(vec![vec![g.clone()]], 1));
    assert_eq!(ef, gr.sub(&gr.one(), &g));
}

#[test]
fn horizontal_transitions() {
    let ring = GroupRing::cyclic(9, &[3]);
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let d = 4;
    let cols: Vec<Vec<GroupRingElem>> = (0..d).map(|_| (0..d).map(|_| rand_elem(&ring, &mut rng)).collect()).collect();
    let zero = vec![ring.zero(); d];
    let with_zeros = |zs: &[usize]| {
        let c: Vec<Vec<GroupRingElem>> = (0..d).map(|i| if zs.contains(&i) { zero.clone() } else { cols[i].clone() }).collect();
        TwoTermComplex::from_columns(&ring, &c).unwrap()
    };
    let c0 = with_zeros(&[0]);
    let c1 = with_zeros(&[0, 2]);
    let c2 = with_zeros(&[0, 2, 3]);
    let z = DetElement::new("m", rand_elem(&ring, &mut rng));
    // No blocks: identity.
    assert_eq!(horizontal_transition(&c0, &c0, &[], &z, "m").unwrap(), z);
    let one = |col| LocalBlock { column: col, scalar: ring.one() };
    let a = horizontal_transition(&c1, &c0, &[one(2)], &z, "n").unwrap();
    assert_eq!(a.coord, z.coord);
    // Composite of single steps equals the two-block transition.
    let s = elem(&ring, &[(0, 1), (1, 3)]);
    let t = elem(&ring, &[(2, 2)]);
    let b1 = LocalBlock { column: 3, scalar: s.clone() };
    let b2 = LocalBlock { column: 2, scalar: t.clone() };
    let step = horizontal_transition(&c2, &c1, &[b1.clone()], &z, "a").unwrap();
    let step = horizontal_transition(&c1, &c0, &[b2.clone()], &step, "b").unwrap();
    let direct = horizontal_transition(&c2, &c0, &[b1, b2], &z, "b").unwrap();
    assert_eq!(step, direct);
    // Mismatched shapes are rejected.
    assert!(horizontal_transition(&c0, &c1, &[one(2)], &z, "x").is_err());
    assert!(horizontal_transition(&c2, &c0, &[one(2)], &z, "x").is_err());
}

#[test]
fn vertical_one_prime() {
    // R_n = (Z/3)[C3] over R_d = Z/3: the block column projects to λ times the
    // target column and the transition scalar is the Euler factor.
    let rn = GroupRing::cyclic(3, &[3]);
    let rd = GroupRing::cyclic(3, &[]);
    let map = RingMap::by_factors(&rn, &rd, &[None]);
    let u = RMatrix::from_rows(vec![vec![rd.zero(), rd.scalar(2)], vec![rd.one(), rd.scalar(2)]], 2);
    let lambda = euler_factor(&rd, &u);
    let v = vec![rd.one(), rd.scalar(2)];
    let w = vec![rd.scalar(1), rd.zero()];
    let cd = TwoTermComplex::from_columns(&rd, &[vec![rd.zero(); 2], v.clone()]).unwrap();
    let sigma_minus_1 = rn.sub(&rn.basis(1), &rn.one());
    let lift = |x: &GroupRingElem| {
        let mut y = rn.zero();
        y[0] = x[0];
        y
    };
    let col: Vec<GroupRingElem> = (0..2)
        .map(|j| rn.add(&rn.mul(&sigma_minus_1, &lift(&w[j])), &lift(&rd.mul(&lambda, &v[j]))))
        .collect();
    let cn = TwoTermComplex::from_columns(&rn, &[vec![rn.zero(); 2], col]).unwrap();
    let z = DetElement::new("n", rn.add(&rn.one(), &sigma_minus_1));
    let (zd, scalar) =
        vertical_transition(&map, &rd, &cn, &cd, &[LocalBlock { column: 1, scalar: lambda.clone() }], &z, "d").unwrap();
    assert_eq!(scalar, lambda);
    assert_eq!(zd.coord, rd.one());
    // Wrong scalar is rejected unless λ happens to be 1 − … equal.
    let wrong = rd.add(&lambda, &rd.one());
    assert!(vertical_transition(&map, &rd, &cn, &cd, &[LocalBlock { column: 1, scalar: wrong }], &z, "d").is_err());
    // d = n: identity.
    let id = RingMap::by_factors(&rn, &rn, &[Some(0)]);
    let (same, s) = vertical_transition(&id, &rn, &cn, &cn, &[], &z, "n").unwrap();
    assert_eq!(same, z);
    assert_eq!(s, rn.one());
}

#[test]
fn vertical_chain_composes() {
    // C3 × C3 → C3 → 1: the composite equals the direct transition.
    let r2 = GroupRing::cyclic(3, &[3, 3]);
    let r1 = GroupRing::cyclic(3, &[3]);
    let r0 = GroupRing::cyclic(3, &[]);
    let m21 = RingMap::by_factors(&r2, &r1, &[Some(0), None]);
    let m10 = RingMap::by_factors(&r1, &r0, &[None]);
    let m20 = RingMap::by_factors(&r2, &r0, &[None, None]);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let d = 3;
    let base: Vec<Vec<GroupRingElem>> = (0..d).map(|_| (0..d).map(|_| rand_elem(&r0, &mut rng)).collect()).collect();
    let c0 = TwoTermComplex::from_columns(&r0, &base).unwrap();
    // Level 1: column 2 scaled by λ1 ∈ R_0 (embedded); level 2: column 1 scaled by λ2 ∈ R_1.
    let emb01 = |x: &GroupRingElem| {
        let mut y = r1.zero();
        y[0] = x[0];
        y
    };
    let lambda1 = r0.scalar(2);
    let cols1: Vec<Vec<GroupRingElem>> = (0..d)
        .map(|i| base[i].iter().map(|x| if i == 2 { emb01(&r0.mul(&lambda1, x)) } else { emb01(x) }).collect())
        .collect();
    let c1 = TwoTermComplex::from_columns(&r1, &cols1).unwrap();
    let lambda2 = r1.sub(&r1.basis(1), &r1.scalar(2));
    let emb12 = |x: &GroupRingElem| {
        let mut y = r2.zero();
        y[..3].copy_from_slice(x);
        y
    };
    let cols2: Vec<Vec<GroupRingElem>> = (0..d)
        .map(|i| cols1[i].iter().map(|x| if i == 1 { emb12(&r1.mul(&lambda2, x)) } else { emb12(x) }).collect())
        .collect();
    let c2 = TwoTermComplex::from_columns(&r2, &cols2).unwrap();
    let z = DetElement::new("2", rand_elem(&r2, &mut rng));
    let (z1, s1) = vertical_transition(&m21, &r1, &c2, &c1, &[LocalBlock { column: 1, scalar: lambda2.clone() }], &z, "1").unwrap();
    let (z0, s0) = vertical_transition(&m10, &r0, &c1, &c0, &[LocalBlock { column: 2, scalar: lambda1.clone() }], &z1, "0").unwrap();
    let l2 = m10.apply(&lambda2);
    let direct = vertical_transition(
        &m20,
        &r0,
        &c2,
        &c0,
        &[LocalBlock { column: 1, scalar: l2.clone() }, LocalBlock { column: 2, scalar: lambda1.clone() }],
        &z,
        "0",
    )
    .unwrap();
    assert_eq!(direct.0, z0);
    assert_eq!(direct.1, r0.mul(&m10.apply(&s1), &s0));
}
