/// Finite abelian group ∏ Z/c_i, elements indexed in mixed radix with the
/// first factor varying fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinAbGroup {
    orders: Vec<u64>,
    strides: Vec<usize>,
    size: usize,
}

impl FinAbGroup {
    pub fn new(orders: Vec<u64>) -> Self {
        assert!(orders.iter().all(|&c| c > 1), "cyclic factors must have order > 1");
        let mut strides = Vec::with_capacity(orders.len());
        let mut size = 1usize;
        for &c in &orders {
            strides.push(size);
            size *= c as usize;
        }
        FinAbGroup { orders, strides, size }
    }

    pub fn trivial() -> Self {
        Self::new(vec![])
    }

    /// True when every factor order is a power of p.
    pub fn is_p_group(&self, p: u64) -> bool {
        self.orders.iter().all(|&c| {
            let mut c = c;
            while c % p == 0 {
                c /= p;
            }
            c == 1
        })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn nfactors(&self) -> usize {
        self.orders.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    pub fn index(&self, exps: &[u64]) -> usize {
        assert_eq!(exps.len(), self.orders.len());
        exps.iter()
            .zip(&self.orders)
            .zip(&self.strides)
            .map(|((&e, &c), &s)| (e % c) as usize * s)
            .sum()
    }

    pub fn exps(&self, idx: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.orders.len());
        let mut i = idx;
        for &c in &self.orders {
            out.push((i % c as usize) as u64);
            i /= c as usize;
        }
        out
    }

    #[inline]
    pub fn digit(&self, idx: usize, k: usize) -> u64 {
        ((idx / self.strides[k]) % self.orders[k] as usize) as u64
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for k in 0..self.orders.len() {
            let c = self.orders[k];
            let d = (self.digit(a, k) + self.digit(b, k)) % c;
            out += d as usize * self.strides[k];
        }
        out
    }

    pub fn neg(&self, a: usize) -> usize {
        let mut out = 0;
        for k in 0..self.orders.len() {
            let c = self.orders[k];
            let d = (c - self.digit(a, k)) % c;
            out += d as usize * self.strides[k];
        }
        out
    }

    /// Index of the k-th generator raised to the power e.
    pub fn generator_pow(&self, k: usize, e: u64) -> usize {
        (e % self.orders[k]) as usize * self.strides[k]
    }

    /// Table of a + b for all a, b. Only for small groups.
    pub fn add_table(&self) -> Vec<usize> {
        let n = self.size;
        let mut t = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                t[a * n + b] = self.add(a, b);
            }
        }
        t
    }
}

/// Subgroup ∏ ⟨g_i^{c_i / h_i}⟩ given by the orders h_i | c_i of its factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec {
    pub orders: Vec<u64>,
}

impl SubgroupSpec {
    pub fn trivial(g: &FinAbGroup) -> Self {
        SubgroupSpec { orders: vec![1; g.nfactors()] }
    }

    pub fn whole(g: &FinAbGroup) -> Self {
        SubgroupSpec { orders: g.orders().to_vec() }
    }

    pub fn validate(&self, g: &FinAbGroup) -> bool {
        self.orders.len() == g.nfactors()
            && self.orders.iter().zip(g.orders()).all(|(&h, &c)| h >= 1 && c % h == 0)
    }

    pub fn size(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    pub fn elements(&self, g: &FinAbGroup) -> Vec<usize> {
        assert!(self.validate(g), "not a subgroup");
        let mut out = vec![0usize];
        for (k, (&h, &c)) in self.orders.iter().zip(g.orders()).enumerate() {
            let step = c / h;
            let mut next = Vec::with_capacity(out.len() * h as usize);
            for &x in &out {
                for j in 0..h {
                    next.push(x + g.generator_pow(k, j * step));
                }
            }
            out = next;
        }
        out
    }

    /// Generators g_i^{c_i/h_i} for the nontrivial factors.
    pub fn generators(&self, g: &FinAbGroup) -> Vec<usize> {
        self.orders
            .iter()
            .zip(g.orders())
            .enumerate()
            .filter(|(_, (&h, _))| h > 1)
            .map(|(k, (&h, &c))| g.generator_pow(k, c / h))
            .collect()
    }

    /// Quotient G/H as a group with factor orders c_i / h_i (trivial factors dropped)
    /// and the projection on element indices.
    pub fn quotient(&self, g: &FinAbGroup) -> (FinAbGroup, Vec<usize>) {
        assert!(self.validate(g), "not a subgroup");
        let qorders: Vec<u64> = self.orders.iter().zip(g.orders()).map(|(&h, &c)| c / h).collect();
        let kept: Vec<usize> = (0..qorders.len()).filter(|&k| qorders[k] > 1).collect();
        let q = FinAbGroup::new(kept.iter().map(|&k| qorders[k]).collect());
        let proj = (0..g.size())
            .map(|i| {
                let e = g.exps(i);
                let qe: Vec<u64> = kept.iter().map(|&k| e[k] % qorders[k]).collect();
                q.index(&qe)
            })
            .collect();
        (q, proj)
    }
}
