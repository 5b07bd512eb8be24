use crate::ring::{GroupRing, GroupRingElem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivativeError {
    EvenOrder(u64),
    NotSubset,
}

impl std::fmt::Display for DerivativeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DerivativeError::EvenOrder(c) => write!(f, "derivative operator needs odd #G_q, got {}", c),
            DerivativeError::NotSubset => write!(f, "d is not a subset of n"),
        }
    }
}

impl std::error::Error for DerivativeError {}

/// Coefficients of D_q = Σ_{i=1}^{e−1} i σ^i.
pub fn derivative_coeffs(e: u64, m: u64) -> Result<Vec<u64>, DerivativeError> {
    if e % 2 == 0 {
        return Err(DerivativeError::EvenOrder(e));
    }
    Ok((0..e).map(|i| i % m).collect())
}

/// D_q for the generator of factor k.
pub fn kolyvagin_derivative(ring: &GroupRing, k: usize) -> Result<GroupRingElem, DerivativeError> {
    let e = ring.group().orders()[k];
    let c = derivative_coeffs(e, ring.modulus())?;
    Ok(ring.mul_axis_poly(&ring.one(), k, &c))
}

/// D_n = ∏_{k ∈ factors} D_k.
pub fn derivative_product(ring: &GroupRing, factors: &[usize]) -> Result<GroupRingElem, DerivativeError> {
    apply_derivative(ring, &ring.one(), factors)
}

/// D_n·x computed axis by axis.
pub fn apply_derivative(ring: &GroupRing, x: &[u64], factors: &[usize]) -> Result<GroupRingElem, DerivativeError> {
    let mut cur = x.to_vec();
    for &k in factors {
        let e = ring.group().orders()[k];
        let c = derivative_coeffs(e, ring.modulus())?;
        cur = ring.mul_axis_poly(&cur, k, &c);
    }
    Ok(cur)
}

/// π_d on r[H_n]: σ_q ↦ 1 for factors in n but not in d.
pub fn quotient_map(ring: &GroupRing, x: &[u64], n_factors: &[usize], d_factors: &[usize]) -> Result<GroupRingElem, DerivativeError> {
    if d_factors.iter().any(|d| !n_factors.contains(d)) {
        return Err(DerivativeError::NotSubset);
    }
    let kill: Vec<usize> = n_factors.iter().copied().filter(|k| !d_factors.contains(k)).collect();
    Ok(ring.kill_factors(x, &kill))
}

/// s_n(x) = Σ_{d ⊆ n} (−1)^{|n∖d|} π_d(x) on r[H_n].
pub fn s_element(ring: &GroupRing, x: &[u64], n_factors: &[usize]) -> GroupRingElem {
    let t = n_factors.len();
    let mut acc = ring.zero();
    for mask in 0..(1usize << t) {
        let d: Vec<usize> = (0..t).filter(|&i| mask & (1 << i) != 0).map(|i| n_factors[i]).collect();
        let term = quotient_map(ring, x, n_factors, &d).unwrap();
        if (t - d.len()) % 2 == 1 {
            acc = ring.sub(&acc, &term);
        } else {
            ring.add_assign(&mut acc, &term);
        }
    }
    acc
}
