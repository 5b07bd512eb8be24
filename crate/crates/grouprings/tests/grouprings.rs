use grouprings::*;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zlin::{hnf, kernel, snf, ZMatrix};

fn rand_elem(ring: &GroupRing, rng: &mut ChaCha8Rng) -> GroupRingElem {
    (0..ring.dim()).map(|_| rng.gen_range(0..ring.modulus())).collect()
}

#[test]
fn involution_examples() {
    let r = GroupRing::cyclic(3, &[3]);
    assert_eq!(r.involution(&[1, 2, 0]), vec![1, 0, 2]);
    assert_eq!(r.involution(&r.one()), r.one());
    let n = r.norm_element(&SubgroupSpec::whole(r.group()));
    assert_eq!(r.involution(&n), n);
}

#[test]
fn norm_element_examples() {
    let r = GroupRing::cyclic(3, &[3]);
    let n = r.norm_element(&SubgroupSpec::whole(r.group()));
    assert_eq!(n, vec![1, 1, 1]);
    assert_eq!(r.augmentation(&n), 0);
    assert_eq!(r.norm_element(&SubgroupSpec::trivial(r.group())), r.one());

    let r2 = GroupRing::cyclic(5, &[2, 2]);
    let n2 = r2.norm_element(&SubgroupSpec { orders: vec![1, 2] });
    assert_eq!(n2, r2.add(&r2.one(), &r2.gen_pow(1, 1)));
    assert_eq!(r2.augmentation(&n2), 2);
}

#[test]
fn flatten_examples() {
    let r = GroupRing::cyclic(3, &[3]);
    let g = RMatrix::from_rows(vec![vec![r.gen_pow(0, 1)]], 1);
    let f = flatten(&r, &g);
    let mut perm = 0;
    for i in 0..3 {
        for j in 0..3 {
            let v = f.get(i, j);
            assert!(v == 0 || v == 1);
            perm += v;
        }
    }
    assert_eq!(perm, 3);
    assert_eq!(f.mul(&f).mul(&f), zlin::ZmMatrix::identity(3, 3));
    assert!(flatten(&r, &RMatrix::zeros(&r, 1, 1)).is_zero());

    let gm1 = RMatrix::from_rows(vec![vec![r.sub(&r.gen_pow(0, 1), &r.one())]], 1);
    let k = kernel(&flatten(&r, &gm1));
    let span = zlin::howell(&k).span_size();
    assert_eq!(span, 3u32.into());
}

#[test]
fn flatten_is_multiplicative() {
    let r = GroupRing::cyclic(9, &[3, 3]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let a = RMatrix::from_rows((0..2).map(|_| (0..2).map(|_| rand_elem(&r, &mut rng)).collect()).collect(), 2);
        let b = RMatrix::from_rows((0..2).map(|_| (0..2).map(|_| rand_elem(&r, &mut rng)).collect()).collect(), 2);
        assert_eq!(flatten(&r, &a.mul(&r, &b)), flatten(&r, &a).mul(&flatten(&r, &b)));
        let v: Vec<GroupRingElem> = (0..2).map(|_| rand_elem(&r, &mut rng)).collect();
        let lhs = flatten_vec(&r, &a.vec_mul(&r, &v));
        let rhs = flatten(&r, &a).vec_mul(&flatten_vec(&r, &v));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn det_matches_leibniz() {
    let r = GroupRing::cyclic(9, &[3]);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 1..=4usize {
        let a = RMatrix::from_rows((0..n).map(|_| (0..n).map(|_| rand_elem(&r, &mut rng)).collect()).collect(), n);
        let mut acc = r.zero();
        let mut perm: Vec<usize> = (0..n).collect();
        permute_all(&mut perm, 0, &mut |p| {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            let mut t = r.one();
            for (i, &j) in p.iter().enumerate() {
                t = r.mul(&t, a.get(i, j));
            }
            acc = if inv % 2 == 0 { r.add(&acc, &t) } else { r.sub(&acc, &t) };
        });
        assert_eq!(a.det(&r), acc);
    }
}

fn permute_all(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute_all(p, k + 1, f);
        p.swap(k, i);
    }
}

#[test]
fn inverse_of_units() {
    let r = GroupRing::cyclic(9, &[3, 3]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let a = rand_elem(&r, &mut rng);
        match r.inverse(&a) {
            Some(b) => {
                assert!(r.is_unit(&a));
                assert_eq!(r.mul(&a, &b), r.one());
            }
            None => assert!(!r.is_unit(&a)),
        }
    }
}

#[test]
fn quotient_map_examples() {
    let r = GroupRing::cyclic(3, &[3, 3]);
    let sq = r.gen_pow(0, 1);
    let sq2 = r.gen_pow(1, 1);
    assert_eq!(quotient_map(&r, &sq, &[0, 1], &[]).unwrap(), r.one());
    let prod = r.mul(&sq, &sq2);
    assert_eq!(quotient_map(&r, &prod, &[0, 1], &[0]).unwrap(), sq);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = rand_elem(&r, &mut rng);
    let once = quotient_map(&r, &x, &[0, 1], &[1]).unwrap();
    assert_eq!(quotient_map(&r, &once, &[0, 1], &[1]).unwrap(), once);
    assert_eq!(quotient_map(&r, &x, &[0], &[1]), Err(DerivativeError::NotSubset));
}

#[test]
fn derivative_examples() {
    let r = GroupRing::cyclic(9, &[3]);
    assert_eq!(kolyvagin_derivative(&r, 0).unwrap(), vec![0, 1, 2]);
    let r2 = GroupRing::cyclic(5, &[2]);
    assert_eq!(kolyvagin_derivative(&r2, 0), Err(DerivativeError::EvenOrder(2)));

    let r33 = GroupRing::cyclic(3, &[3, 3]);
    let d = derivative_product(&r33, &[0, 1]).unwrap();
    let d1 = kolyvagin_derivative(&r33, 0).unwrap();
    let d2 = kolyvagin_derivative(&r33, 1).unwrap();
    assert_eq!(d, r33.mul(&d1, &d2));
    assert_eq!(d.iter().filter(|&&c| c != 0).count(), 4);

    let r55 = GroupRing::cyclic(25, &[5, 5]);
    let d = derivative_product(&r55, &[0, 1]).unwrap();
    assert_eq!(d.iter().filter(|&&c| c != 0).count(), 16);
    assert_eq!(d[r55.group().index(&[2, 3])], 6);
}

/// (σ − 1) D = #G − N for a cyclic factor.
#[test]
fn derivative_telescopes() {
    for &(m, e) in &[(3u64, 3u64), (9, 3), (9, 9), (5, 5), (25, 5)] {
        let r = GroupRing::cyclic(m, &[e]);
        let d = kolyvagin_derivative(&r, 0).unwrap();
        let lhs = r.mul(&r.sub(&r.gen_pow(0, 1), &r.one()), &d);
        let n = r.norm_element(&SubgroupSpec::whole(r.group()));
        assert_eq!(lhs, r.sub(&r.scalar(e), &n));
    }
}

// ---------- brute-force lattice oracle for I^ν / I^{ν+1} ----------

struct Lattice {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

fn lattice(cols: usize, gens: Vec<Vec<BigInt>>) -> Lattice {
    let h = hnf(&ZMatrix::from_rows(cols, gens));
    let rows = (0..h.pivots.len()).map(|i| h.h.row(i).to_vec()).collect();
    Lattice { rows, pivots: h.pivots }
}

impl Lattice {
    fn coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut v = v.to_vec();
        let mut c = Vec::new();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !(&v[p] % &row[p]).is_zero() {
                return None;
            }
            let q = &v[p] / &row[p];
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &q * y;
            }
            c.push(q);
        }
        if v.iter().all(|x| x.is_zero()) {
            Some(c)
        } else {
            None
        }
    }
}

fn int_mul(g: &FinAbGroup, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); g.size()];
    for i in 0..g.size() {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..g.size() {
            out[g.add(i, j)] += &a[i] * &b[j];
        }
    }
    out
}

fn aug_power_gens(g: &FinAbGroup, nu: usize) -> Vec<Vec<BigInt>> {
    let n = g.size();
    let unit = |i: usize| -> Vec<BigInt> { (0..n).map(|j| BigInt::from((i == j) as i64)).collect() };
    let mut cur: Vec<Vec<BigInt>> = (0..n).map(unit).collect();
    for _ in 0..nu {
        let mut next = Vec::new();
        for x in &cur {
            for k in 0..g.nfactors() {
                let mut y = unit(g.generator_pow(k, 1));
                y[0] -= 1;
                next.push(int_mul(g, x, &y));
            }
        }
        let l = lattice(n, next);
        cur = l.rows;
    }
    cur
}

fn oracle_invariants(orders: &[u64], nu: usize, m: u64) -> (Vec<u64>, Lattice, Lattice) {
    let g = FinAbGroup::new(orders.to_vec());
    let n = g.size();
    let top = lattice(n, aug_power_gens(&g, nu));
    let mut sub_gens = aug_power_gens(&g, nu + 1);
    for r in &top.rows {
        sub_gens.push(r.iter().map(|x| x * BigInt::from(m)).collect());
    }
    let sub = lattice(n, sub_gens);
    let k = top.rows.len();
    let rel: Vec<Vec<BigInt>> = sub.rows.iter().map(|r| top.coords(r).unwrap()).collect();
    let mut inv: Vec<u64> =
        snf(&ZMatrix::from_rows(k, rel)).diagonal().into_iter().map(|d| d.abs().to_u64().unwrap()).filter(|&d| d != 1).collect();
    inv.sort();
    (inv, top, sub)
}

const CASES: &[(&[u64], usize, u64)] = &[
    (&[3], 0, 3),
    (&[3], 1, 3),
    (&[3], 2, 3),
    (&[3], 1, 9),
    (&[9], 1, 9),
    (&[9], 2, 3),
    (&[9], 3, 9),
    (&[5], 1, 5),
    (&[5], 2, 25),
    (&[3, 3], 1, 3),
    (&[3, 3], 2, 3),
    (&[3, 3], 2, 9),
    (&[3, 3], 3, 3),
    (&[9, 3], 2, 9),
    (&[3, 3, 3], 3, 3),
];

#[test]
fn graded_piece_matches_lattice_oracle() {
    for &(orders, nu, m) in CASES {
        let gp = GradedPiece::new(orders, nu, m);
        let (inv, _, _) = oracle_invariants(orders, nu, m);
        let mut got = gp.invariant_factors().to_vec();
        got.sort();
        assert_eq!(got, inv, "orders {:?} nu {} m {}", orders, nu, m);
    }
}

#[test]
fn graded_classes_match_lattice_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &(orders, nu, m) in CASES {
        let gp = GradedPiece::new(orders, nu, m);
        let g = FinAbGroup::new(orders.to_vec());
        let (_, top, sub) = oracle_invariants(orders, nu, m);
        for trial in 0..30 {
            // Random element of I^ν; every third one pushed into I^{ν+1} + M I^ν.
            let src = if trial % 3 == 0 { &sub.rows } else { &top.rows };
            let mut x = vec![BigInt::zero(); g.size()];
            for r in src {
                let c = BigInt::from(rng.gen_range(-4i64..5));
                for (a, b) in x.iter_mut().zip(r) {
                    *a += &c * b;
                }
            }
            let mut expanded = vec![BigInt::zero(); gp.monomials().len()];
            for (h, c) in x.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (e, t) in expanded.iter_mut().zip(gp.expand_group_element_integer(&g.exps(h))) {
                    *e += c * t;
                }
            }
            let cls = gp.class_of_integer(&expanded).unwrap();
            let is_zero = cls.iter().all(|&c| c == 0);
            assert_eq!(is_zero, sub.coords(&x).is_some(), "orders {:?} nu {} m {}", orders, nu, m);
            if gp.embeds_in_truncation() {
                let mm = BigInt::from(m);
                let xm: Vec<u64> = x.iter().map(|c| ((c % &mm) + &mm) % &mm).map(|c| c.to_u64().unwrap()).collect();
                assert_eq!(gp.class_of_element(&xm).unwrap(), cls);
            }
        }
    }
}

#[test]
fn graded_piece_examples() {
    let gp = GradedPiece::new(&[3], 1, 3);
    assert_eq!(gp.invariant_factors(), &[3]);
    let r = GroupRing::cyclic(3, &[3]);
    let s = r.sub(&r.gen_pow(0, 1), &r.one());
    let c = gp.class_of_element(&s).unwrap();
    assert_eq!(Some(c.clone()), gp.pure_class());
    assert_eq!(gp.s_projector(&c), c);

    let gp0 = GradedPiece::new(&[3, 3], 0, 3);
    assert_eq!(gp0.invariant_factors(), &[3]);
    assert_eq!(gp0.dim(), 1);

    let gp2 = GradedPiece::new(&[3, 3], 2, 3);
    assert!(gp2.pure_is_free_summand());
    let r2 = GroupRing::cyclic(3, &[3, 3]);
    let y1 = r2.sub(&r2.gen_pow(0, 1), &r2.one());
    let y2 = r2.sub(&r2.gen_pow(1, 1), &r2.one());
    let pure = gp2.class_of_element(&r2.mul(&y1, &y2)).unwrap();
    assert_eq!(Some(pure.clone()), gp2.pure_class());
    let sq = gp2.class_of_element(&r2.mul(&y1, &y1)).unwrap();
    assert!(sq.iter().any(|&c| c != 0));
    assert!(gp2.s_projector(&sq).iter().all(|&c| c == 0));
    assert_eq!(gp2.s_projector(&pure), pure);
}

#[test]
fn not_in_filtration_rejected() {
    let gp = GradedPiece::new(&[3, 3], 2, 9);
    let r = GroupRing::cyclic(9, &[3, 3]);
    let y1 = r.sub(&r.gen_pow(0, 1), &r.one());
    assert!(matches!(gp.class_of_element(&y1), Err(GradedError::NotInFiltration { .. })));
    assert!(gp.class_of_element(&r.one()).is_err());
}

#[test]
fn s_projector_idempotent_and_kills_repeats() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (orders, m) in [(vec![3u64, 3], 3u64), (vec![3, 3, 3], 3), (vec![5, 5], 5), (vec![9, 9], 9), (vec![9, 3], 3)] {
        let t = orders.len();
        let gp = GradedPiece::new(&orders, t, m);
        assert!(gp.pure_is_free_summand());
        for _ in 0..10 {
            let v: Vec<u64> = (0..gp.dim()).map(|_| rng.gen_range(0..m)).collect();
            let v = gp.reduce(&v);
            let s = gp.s_projector(&v);
            assert_eq!(gp.s_projector(&s), s);
        }
        for (i, a) in gp.top_monomials().iter().enumerate() {
            let mut v = gp.zero_class();
            v[i] = 1;
            let s = gp.s_projector(&gp.reduce(&v));
            if a.iter().all(|&e| e == 1) {
                assert_eq!(s, gp.reduce(&v));
            } else {
                assert!(s.iter().all(|&c| c == 0));
            }
        }
    }
}

/// s_n(x) lies in I^{ν(n)} for any x ∈ r[H_n].
#[test]
fn s_element_lands_in_filtration() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (orders, m) in [(vec![3u64, 3], 9u64), (vec![3, 3, 3], 3), (vec![5, 5], 25)] {
        let t = orders.len();
        let r = GroupRing::cyclic(m, &orders);
        let gp = GradedPiece::new(&orders, t, m);
        let factors: Vec<usize> = (0..t).collect();
        for _ in 0..10 {
            let x = rand_elem(&r, &mut rng);
            assert!(gp.class_of_element(&s_element(&r, &x, &factors)).is_ok());
        }
    }
}

#[test]
fn twisted_trace_axis_matches_naive() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (gamma, h, m, nu) in [(vec![], vec![3u64], 9u64, 1usize), (vec![3u64], vec![3, 3], 3, 2), (vec![], vec![5, 5], 5, 2)] {
        let gf = gamma.len();
        let orders: Vec<u64> = gamma.iter().chain(&h).copied().collect();
        let r = GroupRing::cyclic(m, &orders);
        let gp = GradedPiece::new(&h, nu, m);
        let x: Vec<GroupRingElem> = (0..2).map(|_| rand_elem(&r, &mut rng)).collect();
        assert_eq!(twisted_trace(&r, gf, &gp, &x), twisted_trace_naive(&r, gf, &gp, &x));
    }
}

#[test]
fn resolvent_examples() {
    let r = GroupRing::cyclic(3, &[3]);
    let gp1 = GradedPiece::new(&[3], 1, 3);
    let y = r.sub(&r.gen_pow(0, 1), &r.one());
    let res = resolvent(&r, 0, &gp1, &[y.clone()]).unwrap();
    assert_eq!(res, vec![vec![gp1.pure_class().unwrap()]]);
    let zero = resolvent(&r, 0, &gp1, &[r.zero()]).unwrap();
    assert_eq!(zero, vec![vec![gp1.zero_class()]]);
    assert!(resolvent(&r, 0, &gp1, &[r.one()]).is_err());

    let gp0 = GradedPiece::new(&[3], 0, 3);
    let x = vec![2, 1, 1];
    let res0 = resolvent(&r, 0, &gp0, &[x]).unwrap();
    assert_eq!(res0, vec![vec![vec![1]]]);
}

/// The resolvent composed with inclusion equals the twisted trace for x ∈ I^s X.
#[test]
fn resolvent_matches_twisted_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let gamma = vec![3u64];
    let h = vec![3u64, 3];
    let m = 9;
    let orders: Vec<u64> = gamma.iter().chain(&h).copied().collect();
    let r = GroupRing::cyclic(m, &orders);
    let s = 2;
    let gp = GradedPiece::new(&h, s, m);
    assert!(gp.embeds_in_truncation());
    let y: Vec<GroupRingElem> = (0..2).map(|k| r.sub(&r.gen_pow(1 + k, 1), &r.one())).collect();
    for _ in 0..10 {
        // x = Σ_{|β| = s} a_β y^β with random a_β.
        let x: Vec<GroupRingElem> = (0..2)
            .map(|_| {
                let mut acc = r.zero();
                for (i, j) in [(0, 0), (0, 1), (1, 1)] {
                    let t = r.mul(&r.mul(&y[i], &y[j]), &rand_elem(&r, &mut rng));
                    r.add_assign(&mut acc, &t);
                }
                acc
            })
            .collect();
        let res = resolvent(&r, 1, &gp, &x).unwrap();
        let tt = twisted_trace(&r, 1, &gp, &x);
        let lay = SplitLayout::of(&r, 1);
        for j in 0..2 {
            // The trace is H-invariant: every H-translate of a Γ-coordinate gives the same class.
            for g in 0..lay.gamma_size {
                for hh in 0..lay.h_size {
                    let coord = g + lay.gamma_size * hh;
                    let col: Vec<u64> = tt.iter().map(|e| e[j][coord]).collect();
                    assert_eq!(gp.class_of_mod(&col).unwrap(), res[j][g]);
                }
            }
        }
    }
}

/// s_n(Σ_σ σx ⊗ σ^{-1}) = (−1)^ν D_n x ⊗ ∏(σ_q − 1).
#[test]
fn derivative_lemma_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (gamma, h, m) in [(vec![], vec![3u64], 3u64), (vec![3u64], vec![3, 3], 9), (vec![], vec![3, 9], 9)] {
        let gf = gamma.len();
        let orders: Vec<u64> = gamma.iter().chain(&h).copied().collect();
        let r = GroupRing::cyclic(m, &orders);
        let nu = h.len();
        let gp = GradedPiece::new(&h, nu, m);
        let factors: Vec<usize> = (gf..orders.len()).collect();
        let x: Vec<GroupRingElem> = (0..2).map(|_| rand_elem(&r, &mut rng)).collect();
        let tt = twisted_trace(&r, gf, &gp, &x);
        let pure = gp.pure_class().unwrap();
        let sign_neg = nu % 2 == 1;
        for j in 0..x.len() {
            let dx = apply_derivative(&r, &x[j], &factors).unwrap();
            for coord in 0..r.dim() {
                let col: Vec<u64> = tt.iter().map(|e| e[j][coord]).collect();
                let s = gp.s_projector_truncated(&col);
                let cls = gp.class_of_mod(&s).unwrap();
                let c = if sign_neg { (m - dx[coord]) % m } else { dx[coord] };
                assert_eq!(cls, gp.scale(&pure, c));
            }
        }
    }
}

proptest! {
    #[test]
    fn involution_is_involutive(coeffs in proptest::collection::vec(0u64..9, 9)) {
        let r = GroupRing::cyclic(9, &[3, 3]);
        prop_assert_eq!(r.involution(&r.involution(&coeffs)), coeffs.clone());
        let other: Vec<u64> = coeffs.iter().rev().copied().collect();
        prop_assert_eq!(r.involution(&r.mul(&coeffs, &other)), r.mul(&r.involution(&coeffs), &r.involution(&other)));
    }

    #[test]
    fn augmentation_is_multiplicative(a in proptest::collection::vec(0u64..27, 9), b in proptest::collection::vec(0u64..27, 9)) {
        let r = GroupRing::cyclic(27, &[9]);
        prop_assert_eq!(r.augmentation(&r.mul(&a, &b)), r.augmentation(&a) * r.augmentation(&b) % 27);
    }

    #[test]
    fn quotient_map_idempotent(a in proptest::collection::vec(0u64..3, 27), mask in 0usize..8) {
        let r = GroupRing::cyclic(3, &[3, 3, 3]);
        let d: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
        let once = quotient_map(&r, &a, &[0, 1, 2], &d).unwrap();
        prop_assert_eq!(quotient_map(&r, &once, &[0, 1, 2], &d).unwrap(), once.clone());
        let other: Vec<u64> = a.iter().rev().copied().collect();
        let lhs = quotient_map(&r, &r.mul(&a, &other), &[0, 1, 2], &d).unwrap();
        let rhs = r.mul(&once, &quotient_map(&r, &other, &[0, 1, 2], &d).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}
