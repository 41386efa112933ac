use std::cmp::Ordering;
use std::fmt;

/// Exponent vector `α ∈ ℕⁿ` of a monomial `X^α`.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// vectors lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `e_k`, the exponent of the variable `X_k`.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut e = vec![0; n];
        e[k] = 1;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0[k]
    }

    /// Exponent after differentiating once in `X_k`, or `None` if the
    /// derivative vanishes.
    pub fn derive(&self, k: usize) -> Option<MultiIndex> {
        if self.0[k] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[k] -= 1;
        Some(MultiIndex(e))
    }

    /// Prepends an exponent for a new leading variable `X_0`.
    pub fn prepend(&self, e0: u32) -> MultiIndex {
        let mut e = Vec::with_capacity(self.0.len() + 1);
        e.push(e0);
        e.extend_from_slice(&self.0);
        MultiIndex(e)
    }

    /// All exponent vectors in `n` variables of total degree at most `d`,
    /// in graded-lex order.
    pub fn all_up_to(n: usize, d: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if k == cur.len() {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur[k] = e;
                rec(k + 1, left - e, cur, out);
            }
            cur[k] = 0;
        }
        rec(0, d, &mut cur, &mut out);
        out.sort();
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let a = MultiIndex::new(vec![0, 2]);
        let b = MultiIndex::new(vec![2, 0]);
        let c = MultiIndex::new(vec![1, 0]);
        assert!(c < a);
        assert!(a < b);
    }

    #[test]
    fn enumerates_dense_support() {
        let all = MultiIndex::all_up_to(2, 2);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], MultiIndex::zero(2));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(MultiIndex::all_up_to(3, 3).len(), 20);
    }
}
