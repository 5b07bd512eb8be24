//! Ideals of (Z/m)[G], higher Fitting ideals, annihilators and relative
//! Fitting ideals.

use std::collections::HashSet;

use grouprings::{det_of, GroupRing, GroupRingElem};
use modalg::{quotient, submodule, Elem, FPModule};
use zlin::{kernel, HowellForm, ZmMatrix};

/// Default enumeration cap for relative Fitting ideals.
pub const DEFAULT_CAP: u64 = 59049;

/// Largest generator count accepted by `fitting_ideal`.
pub const MAX_GENS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FittingError {
    #[error("enumeration needs {required} tuples, cap is {cap}")]
    CapExceeded { required: u128, cap: u64 },
    #[error("presentation too large for minor enumeration ({gens} generators)")]
    TooLarge { gens: usize },
}

/// Ideal of R, kept with the Howell form of its flattened span.
#[derive(Clone, Debug)]
pub struct Ideal {
    ring: GroupRing,
    gens: Vec<GroupRingElem>,
    span: HowellForm,
}

impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        self.span == other.span
    }
}

impl Eq for Ideal {}

impl Ideal {
    pub fn new(ring: &GroupRing, gens: Vec<GroupRingElem>) -> Self {
        let mut id = Ideal::zero(ring);
        for g in gens {
            id.add_generator(g);
        }
        id
    }

    pub fn zero(ring: &GroupRing) -> Self {
        Ideal { ring: ring.clone(), gens: Vec::new(), span: HowellForm::zero(ring.modulus(), ring.dim()) }
    }

    pub fn unit(ring: &GroupRing) -> Self {
        Ideal::new(ring, vec![ring.one()])
    }

    pub fn ring(&self) -> &GroupRing {
        &self.ring
    }

    pub fn generators(&self) -> &[GroupRingElem] {
        &self.gens
    }

    pub fn span(&self) -> &HowellForm {
        &self.span
    }

    /// Adds g unless it already lies in the ideal.
    pub fn add_generator(&mut self, mut g: GroupRingElem) {
        self.ring.reduce(&mut g);
        if self.span.contains(&g) {
            return;
        }
        let tr: Vec<Vec<u64>> = (0..self.ring.dim()).map(|h| self.ring.shift(&g, h)).collect();
        self.span = self.span.with_rows(&tr);
        self.gens.push(g);
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.span.contains(x)
    }

    pub fn contains_ideal(&self, other: &Ideal) -> bool {
        self.span.contains_all(&other.span)
    }

    pub fn is_zero(&self) -> bool {
        self.span.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.contains(&self.ring.one())
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        let mut out = self.clone();
        for g in &other.gens {
            out.add_generator(g.clone());
        }
        out
    }

    pub fn product(&self, other: &Ideal) -> Ideal {
        let mut out = Ideal::zero(&self.ring);
        for a in &self.gens {
            for b in &other.gens {
                out.add_generator(self.ring.mul(a, b));
            }
        }
        out
    }

    /// log_p of the number of elements.
    pub fn log_size(&self) -> u32 {
        let m = self.ring.modulus();
        let p = (2..=m).find(|d| m % d == 0).unwrap();
        self.span.span_log(p)
    }
}

fn ann_from_rows(ring: &GroupRing, rows: Vec<Vec<u64>>, width: usize) -> Ideal {
    let m = ring.modulus();
    let n = ring.dim();
    if width == 0 {
        return Ideal::unit(ring);
    }
    let ker = kernel(&ZmMatrix::from_rows(m, width, &rows));
    Ideal::new(ring, (0..ker.nrows()).map(|i| ker.row(i)[..n].to_vec()).collect())
}

/// Ann_R(J) = {r : rJ = 0}.
pub fn annihilator_ideal(j: &Ideal) -> Ideal {
    let ring = &j.ring;
    let n = ring.dim();
    let k = j.gens.len();
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|g| j.gens.iter().flat_map(|x| ring.shift(x, g)).collect())
        .collect();
    ann_from_rows(ring, rows, k * n)
}

/// Ann_R(X) = {r : rX = 0}.
pub fn annihilator_module(x: &FPModule) -> Ideal {
    let ring = x.ring();
    let n = ring.dim();
    let d = x.flat_dim();
    if d == 0 {
        return Ideal::unit(ring);
    }
    // Row g is the image of g ∈ R, namely (g·b_1, …, g·b_k); relation rows follow.
    let mut rows: Vec<Vec<u64>> = (0..n)
        .map(|g| {
            let mut v = vec![0u64; d];
            for i in 0..x.ngens() {
                v[i * n + g] = 1;
            }
            v
        })
        .collect();
    rows.extend(x.relation_span().rows().iter().cloned());
    let ker = kernel(&ZmMatrix::from_rows(ring.modulus(), d, &rows));
    Ideal::new(ring, (0..ker.nrows()).map(|i| ker.row(i)[..n].to_vec()).collect())
}

/// Fitt^i_R(X): the ideal of (g−i)-minors of the relation matrix.
pub fn fitting_ideal(x: &FPModule, i: usize) -> Result<Ideal, FittingError> {
    let ring = x.ring();
    let g = x.ngens();
    if i >= g {
        return Ok(Ideal::unit(ring));
    }
    if g > MAX_GENS {
        return Err(FittingError::TooLarge { gens: g });
    }
    let k = g - i;
    let rels = x.relations();
    let mut id = Ideal::zero(ring);
    if rels.len() < k {
        return Ok(id);
    }
    let row_sets = modalg::subsets(rels.len(), k);
    let col_sets = modalg::subsets(g, k);
    for rs in &row_sets {
        for cs in &col_sets {
            let d = det_of(ring, k, |a, b| &rels[rs[a]][cs[b]]);
            id.add_generator(d);
            if id.is_unit() {
                return Ok(id);
            }
        }
    }
    Ok(id)
}

/// Fitt^{(0,i)}(X, Y): sum of Fitt⁰(X/Z) over submodules Z ⊆ Y generated by
/// i elements, by enumeration of i-tuples of Y (up to the R-span they generate).
pub fn relative_fitting(x: &FPModule, y_gens: &[Elem], i: usize, cap: u64) -> Result<Ideal, FittingError> {
    if i == 0 {
        return fitting_ideal(x, 0);
    }
    let (ymod, inc) = submodule(x, y_gens);
    let ysize = ymod.cardinality();
    let ysize: u128 = ysize.try_into().unwrap_or(u128::MAX);
    let required = ysize.checked_pow(i as u32).unwrap_or(u128::MAX);
    if required > cap as u128 {
        return Err(FittingError::CapExceeded { required, cap });
    }
    let elems: Vec<Elem> = ymod.elements().iter().map(|e| inc.apply(e)).collect();
    // Tuples generating an already seen submodule are skipped.
    let mut seen: HashSet<Vec<Vec<u64>>> = HashSet::new();
    let mut id = Ideal::zero(x.ring());
    let mut idx = vec![0usize; i];
    loop {
        let tuple: Vec<Elem> = idx.iter().map(|&k| elems[k].clone()).collect();
        let span = x.span_of(&tuple);
        if seen.insert(span.rows().to_vec()) {
            let q = quotient(x, &tuple);
            let f = fitting_ideal(&q, 0)?;
            id = id.sum(&f);
        }
        let mut k = 0;
        loop {
            if k == i {
                return Ok(id);
            }
            idx[k] += 1;
            if idx[k] < elems.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// The ideal generated by a list of elements, as a convenience.
pub fn ideal_of(ring: &GroupRing, gens: &[GroupRingElem]) -> Ideal {
    Ideal::new(ring, gens.to_vec())
}

