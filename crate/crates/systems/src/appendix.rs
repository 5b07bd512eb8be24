//! Oracle-backed checks of the linear algebra and module-theoretic toolkit.
//!
//! Every check is seeded and returns a single [`CheckResult`] covering all of
//! its instances; the first failing instance becomes the witness.

use complexes::{invert, pi_map, standardize, DetElement, TwoTermComplex};
use fitting::{annihilator_ideal, fitting_ideal, ideal_of};
use grouprings::{flatten_vec, GroupRing, GroupRingElem, RMatrix, SubgroupSpec};
use modalg::{bidual_restrict, dual, invariants_identify, left_kernel, submodule, Bidual, FPModule};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zlin::{howell, hnf, kernel, snf, solve, submod, zdet, ZMatrix, ZmMatrix};

use crate::{derivative_lemma_holds, timed, CheckResult};

fn rand_elem(ring: &GroupRing, rng: &mut ChaCha8Rng) -> GroupRingElem {
    (0..ring.dim()).map(|_| rng.gen_range(0..ring.modulus())).collect()
}

fn residue_prime(m: u64) -> u64 {
    (2..=m).find(|d| m % d == 0).unwrap_or(m)
}

/// Elements of the maximal ideal, biased towards multiples of (g−1) and p.
fn rand_nonunit(ring: &GroupRing, rng: &mut ChaCha8Rng) -> GroupRingElem {
    let p = residue_prime(ring.modulus());
    let x = rand_elem(ring, rng);
    let has_group = ring.group().orders().iter().any(|&o| o > 1);
    match rng.gen_range(0..3) {
        0 if has_group => ring.mul(&x, &ring.sub(&ring.gen_pow(0, 1), &ring.one())),
        2 if has_group => {
            let y = ring.mul(&x, &ring.sub(&ring.gen_pow(0, 1), &ring.one()));
            ring.add(&y, &ring.scale(&rand_elem(ring, rng), p))
        }
        _ => ring.scale(&x, p),
    }
}

fn rand_invertible(ring: &GroupRing, d: usize, rng: &mut ChaCha8Rng) -> RMatrix {
    loop {
        let a = RMatrix::from_rows((0..d).map(|_| (0..d).map(|_| rand_elem(ring, rng)).collect()).collect(), d);
        if ring.is_unit(&a.det(ring)) {
            return a;
        }
    }
}

fn rand_module(ring: &GroupRing, rng: &mut ChaCha8Rng, max_gens: usize) -> FPModule {
    let g = rng.gen_range(1..=max_gens);
    let nrel = rng.gen_range(0..=g);
    let rels = (0..nrel)
        .map(|_| (0..g).map(|_| if rng.gen_bool(0.5) { rand_nonunit(ring, rng) } else { ring.zero() }).collect())
        .collect();
    FPModule::new(ring, g, rels)
}

fn complex_rings() -> Vec<GroupRing> {
    vec![GroupRing::cyclic(9, &[]), GroupRing::cyclic(3, &[3]), GroupRing::cyclic(9, &[3]), GroupRing::cyclic(5, &[5])]
}

/// A complex whose first r columns vanish after a hidden change of basis on
/// both sides, together with the matching f.
fn hidden_complex(ring: &GroupRing, d: usize, r: usize, rng: &mut ChaCha8Rng) -> (TwoTermComplex, RMatrix) {
    let mut psi0 = RMatrix::zeros(ring, d, d);
    for i in r..d {
        let scale = match rng.gen_range(0..3) {
            0 => ring.one(),
            1 => rand_nonunit(ring, rng),
            _ => rand_elem(ring, rng),
        };
        for j in 0..d {
            psi0.set(j, i, ring.mul(&scale, &rand_elem(ring, rng)));
        }
    }
    let mut f0 = RMatrix::zeros(ring, d, r);
    for i in 0..r {
        f0.set(i, i, ring.one());
    }
    let a = rand_invertible(ring, d, rng);
    let c = rand_invertible(ring, d, rng);
    let cinv = invert(ring, &c).expect("invertible by construction");
    let psi = a.mul(ring, &psi0).mul(ring, &c);
    let complex = TwoTermComplex::new(ring, psi).expect("square matrix");
    (complex, cinv.mul(ring, &f0))
}

fn zm_round_trip(m: u64, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (r, c) = (rng.gen_range(1..7), rng.gen_range(1..7));
    let mut a = ZmMatrix::zeros(m, r, c);
    for i in 0..r {
        for j in 0..c {
            a.set(i, j, if rng.gen_bool(0.3) { 0 } else { rng.gen_range(0..m) });
        }
    }
    let h = howell(&a);
    if howell(&h.to_matrix()) != h {
        return Err("Howell form not idempotent".into());
    }
    if (0..r).any(|i| !h.contains(a.row(i))) {
        return Err("row outside its Howell span".into());
    }
    let k = kernel(&a);
    if (0..k.nrows()).any(|i| a.vec_mul(k.row(i)).iter().any(|&x| x != 0)) {
        return Err("kernel row does not annihilate".into());
    }
    let x: Vec<u64> = (0..r).map(|_| rng.gen_range(0..m)).collect();
    let b = a.vec_mul(&x);
    let y = solve(&a, &b).ok_or("no solution for a reachable target")?;
    if a.vec_mul(&y) != b {
        return Err("solve returned a wrong solution".into());
    }
    let diff: Vec<u64> = x.iter().zip(&y).map(|(&p, &q)| submod(p, q, m)).collect();
    if !howell(&k).contains(&diff) {
        return Err("two solutions differ outside the kernel".into());
    }
    Ok(())
}

fn z_round_trip(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (r, c) = (rng.gen_range(1..5), rng.gen_range(1..5));
    let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-20..20)).collect()).collect();
    let a = ZMatrix::from_i64(&rows);
    let zero = BigInt::from(0);
    let unimodular = |u: &ZMatrix| {
        let d = zdet(u);
        d == BigInt::from(1) || d == BigInt::from(-1)
    };
    let s = snf(&a);
    if s.u.mul(&a).mul(&s.v) != s.d || !unimodular(&s.u) || !unimodular(&s.v) {
        return Err("Smith form does not reconstruct".into());
    }
    for i in 0..s.d.nrows() {
        for j in 0..s.d.ncols() {
            if i != j && *s.d.get(i, j) != zero {
                return Err("Smith form not diagonal".into());
            }
        }
    }
    for w in s.diagonal().windows(2) {
        let ok = if w[0] == zero { w[1] == zero } else { &w[1] % &w[0] == zero };
        if !ok {
            return Err(format!("Smith diagonal {} does not divide {}", w[0], w[1]));
        }
    }
    let h = hnf(&a);
    if h.u.mul(&a) != h.h || !unimodular(&h.u) {
        return Err("Hermite form does not reconstruct".into());
    }
    Ok(())
}

/// Howell, kernel and solve round trips over Z/m, plus SNF/HNF reconstruction
/// over Z; `count` instances per modulus in {8, 9, 27}.
pub fn linalg_round_trips(seed: u64, count: usize) -> CheckResult {
    timed("zlin round trips", "Howell forms", || -> Result<(), String> {
        for m in [8u64, 9, 27] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ m);
            for k in 0..count {
                zm_round_trip(m, &mut rng).map_err(|e| format!("modulus {m}, instance {k}: {e}"))?;
                z_round_trip(&mut rng).map_err(|e| format!("integer instance {k}: {e}"))?;
            }
        }
        Ok(())
    })
}

/// ξ^r is bijective on free modules of rank d ≤ 4, r ≤ 3, over (Z/3)[C3] and
/// (Z/9)[C3].
pub fn xi_bijective_free() -> CheckResult {
    timed("xi on free modules", "Lemma xi free", || -> Result<(), String> {
        for m in [3u64, 9] {
            let ring = GroupRing::cyclic(m, &[3]);
            for d in 0..=4usize {
                let df = dual(&FPModule::free(&ring, d));
                for r in 0..=3usize.min(d) {
                    let b = Bidual::with_dual(&df, r).map_err(|e| e.to_string())?;
                    let ok = b.xi_hom().is_injective() && b.module().cardinality() == b.exterior().module().cardinality();
                    if !ok {
                        return Err(format!("modulus {m}, rank {d}, degree {r}"));
                    }
                }
            }
        }
        Ok(())
    })
}

/// For Y free of rank r+s and φ_1..φ_s ∈ Y*, the ideal generated by the image
/// of F = (∧φ_i)(ω) ∈ ∩^r X equals Fitt⁰ of the cokernel of ⊕φ_i : Y → R^s.
/// The φ_i are a diagonal shape with random (often non-unit) entries hidden
/// by a random change of basis of Y.
pub fn fitting_identity(seed: u64, count: usize) -> CheckResult {
    timed("Fitting identity", "Prop rubin fitting", || -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rings = [GroupRing::cyclic(3, &[3]), GroupRing::cyclic(9, &[3]), GroupRing::cyclic(9, &[]), GroupRing::cyclic(5, &[5])];
        for k in 0..count {
            let ring = &rings[k % rings.len()];
            let r = rng.gen_range(1..=2);
            let s = rng.gen_range(1..=2);
            let d = r + s;
            let mut shape = RMatrix::zeros(ring, d, s);
            for i in 0..s {
                let x = match rng.gen_range(0..3) {
                    0 => ring.one(),
                    1 => rand_nonunit(ring, &mut rng),
                    _ => rand_elem(ring, &mut rng),
                };
                shape.set(r + i, i, x);
            }
            let c = rand_invertible(ring, d, &mut rng);
            let phi_mat = c.mul(ring, &shape);
            let phis: Vec<Vec<GroupRingElem>> = (0..s).map(|i| phi_mat.col(i)).collect();

            let dy = dual(&FPModule::free(ring, d));
            let top = Bidual::with_dual(&dy, d).map_err(|e| e.to_string())?;
            let low = Bidual::with_dual(&dy, r).map_err(|e| e.to_string())?;
            let res = bidual_restrict(&top, &low, &phis).map_err(|e| format!("instance {k}: {e}"))?;
            let omega = top.xi(&top.exterior().module().gen(0));
            let f = res.map.apply(&omega);
            let im = ideal_of(ring, &res.bidual_kernel.image_ideal(&f));

            let rels: Vec<Vec<GroupRingElem>> = (0..d).map(|j| phis.iter().map(|p| p[j].clone()).collect()).collect();
            let coker = FPModule::new(ring, s, rels);
            let fitt = fitting_ideal(&coker, 0).map_err(|e| e.to_string())?;
            if im != fitt {
                return Err(format!("instance {k}: ideal of im F differs from Fitt^0 of the cokernel"));
            }
        }
        Ok(())
    })
}

/// ∩^r_{R[G/H]} X^H → (∩^r_R X)^H is an isomorphism with a working inverse.
pub fn invariants_iso(seed: u64, count: usize) -> CheckResult {
    timed("bidual invariants", "Prop bidual invariant", || -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cases: [(u64, &[u64], &[u64]); 4] = [(3, &[3], &[3]), (3, &[9], &[3]), (3, &[3, 3], &[1, 3]), (9, &[3], &[3])];
        for k in 0..count {
            let (m, orders, h) = cases[k % cases.len()];
            let ring = GroupRing::cyclic(m, orders);
            let x = rand_module(&ring, &mut rng, 2);
            let r = rng.gen_range(1..=2);
            let iso = invariants_identify(&x, &SubgroupSpec { orders: h.to_vec() }, r).map_err(|e| format!("instance {k}: {e}"))?;
            if !iso.is_isomorphism() {
                return Err(format!("instance {k}: not an isomorphism"));
            }
            let src = iso.bidual_xh.module();
            for _ in 0..3 {
                let c: Vec<GroupRingElem> = (0..src.ngens()).map(|_| rand_elem(src.ring(), &mut rng)).collect();
                let f = src.from_coords(&c);
                if iso.inverse(&iso.forward(&f)).as_ref() != Some(&f) {
                    return Err(format!("instance {k}: inverse does not undo forward"));
                }
            }
        }
        Ok(())
    })
}

/// Π(z) lies in ∩^r H⁰, its evaluations generate Fitt^r(H¹) = Fitt⁰(ker f),
/// and the annihilators agree. Fails if fewer than a tenth of the instances
/// have a proper non-zero Fitt⁰(ker f).
pub fn pi_annihilators(seed: u64, count: usize) -> CheckResult {
    timed("annihilator of im Pi", "Lemma standard annihilator", || -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rings = complex_rings();
        let mut nonsplit = 0;
        for k in 0..count {
            let ring = &rings[k % rings.len()];
            let d = rng.gen_range(1..=4);
            let r = rng.gen_range(0..=d);
            let (c, f) = hidden_complex(ring, d, r, &mut rng);
            let rep = standardize(&c, &f, Some(&mut rng)).map_err(|e| format!("instance {k}: {e}"))?;
            let pi = pi_map(&rep, &DetElement::new("e", ring.one()));
            if !c.h0_bidual(r).contains(&pi) {
                return Err(format!("instance {k}: Pi(z) outside the bidual of H0"));
            }
            let h1 = c.h1();
            let fitt_r = fitting_ideal(&h1, r).map_err(|e| e.to_string())?;
            let fcols: Vec<Vec<GroupRingElem>> = (0..r).map(|i| f.col(i)).collect();
            let kgens: Vec<Vec<u64>> = left_kernel(ring, d, &fcols).iter().map(|v| flatten_vec(ring, v)).collect();
            let (kerf, _) = submodule(&h1, &kgens);
            let fitt0 = fitting_ideal(&kerf, 0).map_err(|e| e.to_string())?;
            if !fitt0.is_unit() && !fitt0.is_zero() {
                nonsplit += 1;
            }
            let evs = ideal_of(ring, &pi);
            if evs != fitt_r || fitt_r != fitt0 {
                return Err(format!("instance {k}: ideal of im Pi differs from the Fitting ideals"));
            }
            let ann = annihilator_ideal(&evs);
            if ann != annihilator_ideal(&fitt_r) || ann != annihilator_ideal(&fitt0) {
                return Err(format!("instance {k}: annihilators differ"));
            }
        }
        if nonsplit * 10 < count {
            return Err(format!("only {nonsplit} non-split instances"));
        }
        Ok(())
    })
}

/// Π(z) is unchanged under `restd` random re-standardizations of each of
/// `count` complexes.
pub fn pi_independence(seed: u64, count: usize, restd: usize) -> CheckResult {
    timed("Pi independence", "Prop admissible (v)", || -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rings = complex_rings();
        for k in 0..count {
            let ring = &rings[k % rings.len()];
            let d = rng.gen_range(1..=4);
            let r = rng.gen_range(0..=d);
            let (c, f) = hidden_complex(ring, d, r, &mut rng);
            let z = DetElement::new("e", rand_elem(ring, &mut rng));
            let base = pi_map(&standardize(&c, &f, None).map_err(|e| e.to_string())?, &z);
            for t in 0..restd {
                let rep = standardize(&c, &f, Some(&mut rng)).map_err(|e| e.to_string())?;
                if pi_map(&rep, &z) != base {
                    return Err(format!("instance {k}, re-standardization {t}"));
                }
            }
        }
        Ok(())
    })
}

/// s_n(Σ σx ⊗ σ⁻¹) = (−1)^ν D_n x ⊗ ∏(σ_q − 1) for x in a free module of rank
/// ≤ 3 over r[Γ × H_n], H_n a product of ν ≤ 3 cyclic groups of order M.
pub fn derivative_lemma(seed: u64, count: usize) -> CheckResult {
    timed("derivative lemma", "Lemma derivative lemma (ii)", || -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for m in [3u64, 9] {
            for nu in 0..=3usize {
                let ring = GroupRing::cyclic(m, &vec![m; nu]);
                for k in 0..count {
                    let rank = rng.gen_range(1..=3);
                    let x: Vec<GroupRingElem> = (0..rank).map(|_| rand_elem(&ring, &mut rng)).collect();
                    if !derivative_lemma_holds(&ring, 0, &x) {
                        return Err(format!("modulus {m}, {nu} primes, instance {k}"));
                    }
                }
            }
        }
        Ok(())
    })
}

/// The toolkit suite at its acceptance sizes.
pub fn appendix_suite(seed: u64) -> Vec<CheckResult> {
    vec![
        linalg_round_trips(seed, 1000),
        xi_bijective_free(),
        fitting_identity(seed, 100),
        invariants_iso(seed, 100),
        pi_annihilators(seed, 100),
        pi_independence(seed, 50, 5),
        derivative_lemma(seed, 50),
    ]
}
