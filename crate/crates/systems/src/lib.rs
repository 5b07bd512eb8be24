//! Stark, Kolyvagin and Euler systems over synthetic Selmer data, the maps
//! between them and checkers for the theorems relating them.

pub mod appendix;
mod euler;
mod kolyvagin;
mod report;
mod stark;
mod theorems;

pub use euler::{derivative_system, derived_collection, euler_at, euler_from_tower, vertical_family, EulerCollection};
pub use kolyvagin::{
    bockstein_from_tower, bockstein_map, is_dks, is_kolyvagin, psi, psi_inv, psi_inv_raw, psi_raw, random_collection, regulator,
    us_to_dks, us_to_dks_with, Bockstein, KolyvaginCollection,
};
pub use report::{timed, CheckResult, Verdict};
pub use stark::{
    epsilon_at, horizontal_family, is_stark, stark_from_horizontal, stark_module, stark_module_generic, v_transition, StarkModule,
    StarkSystem, VTransition,
};
pub use theorems::{
    bockstein_table_check, check_commutative, check_fitting_theorems, check_main, check_mrs, corrupt_for_main, corrupt_for_mrs,
    d_identity_holds, derivative_lemma_holds, stark_ideal_j, tower_epsilon, tower_stark,
};

use grouprings::{GroupRing, GroupRingElem};
use selmer_sim::{level_name, primes_of, Level, SelmerError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemsError {
    #[error("datum is not regular")]
    DatumNotRegular,
    #[error("{n} does not divide {m}")]
    NotDivisor { m: String, n: String },
    #[error("incompatible family at {m} -> {n}")]
    IncompatibleFamily { m: String, n: String },
    #[error("not a Stark system: {0}")]
    NotStark(String),
    #[error("not a Kolyvagin system: {0}")]
    NotKS(String),
    #[error("not a derived Kolyvagin system: {0}")]
    NotDKS(String),
    #[error("tower Bockstein disagrees with the tables: {0}")]
    TowerMismatch(String),
    #[error("malformed tower: {0}")]
    TowerStructure(String),
    #[error("norm relation fails at {level} for q{prime}")]
    NormRelationFailure { level: String, prime: usize },
    #[error("derivative is not invariant at {0}")]
    NotInvariant(String),
    #[error("membership failure at {level}: {detail}")]
    MembershipFailure { level: String, detail: String },
    #[error("equality failure at {level}, coordinate {coord}: {detail}")]
    EqualityFailure { level: String, coord: usize, detail: String },
    #[error("{0}")]
    Algebra(String),
}

impl From<SelmerError> for SystemsError {
    fn from(e: SelmerError) -> Self {
        match e {
            SelmerError::DatumNotRegular => SystemsError::DatumNotRegular,
            other => SystemsError::Algebra(other.to_string()),
        }
    }
}

/// Sign of v_{m,n}: parity of (primes of m/n, then primes of n) against the
/// sorted primes of m. True means −1.
pub fn transition_sign(m: Level, n: Level) -> bool {
    let outer = primes_of(m & !n);
    let inner = primes_of(n);
    let inv: usize = outer.iter().map(|a| inner.iter().filter(|&&b| b < *a).count()).sum();
    inv % 2 == 1
}

fn sub_levels(n: Level) -> impl Iterator<Item = Level> {
    (0..=n).filter(move |d| d & !n == 0)
}

fn vec_eq(ring: &GroupRing, a: &[GroupRingElem], b: &[GroupRingElem]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| ring.is_zero(&ring.sub(x, y)))
}

fn first_diff(ring: &GroupRing, a: &[GroupRingElem], b: &[GroupRingElem]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| !ring.is_zero(&ring.sub(x, y)))
}

fn pair_name(m: Level, n: Level) -> (String, String) {
    (level_name(m), level_name(n))
}

/// All permutations of 0..n, with their parity (true = odd).
fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, bool)>) {
        let n = used.len();
        if cur.len() == n {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if cur[i] > cur[j] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), inv % 2 == 1));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Columns for `left_kernel` encoding the R-linear map f on R^dim: entry u of
/// column c is f(e_u)_c.
fn linear_columns(ring: &GroupRing, dim: usize, f: impl Fn(&[GroupRingElem]) -> Vec<GroupRingElem>) -> Vec<Vec<GroupRingElem>> {
    let mut cols: Vec<Vec<GroupRingElem>> = Vec::new();
    for u in 0..dim {
        let mut e = vec![ring.zero(); dim];
        e[u] = ring.one();
        let img = f(&e);
        if cols.is_empty() {
            cols = vec![vec![ring.zero(); dim]; img.len()];
        }
        for (c, x) in img.into_iter().enumerate() {
            cols[c][u] = x;
        }
    }
    cols
}
