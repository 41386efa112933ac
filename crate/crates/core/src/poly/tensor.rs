use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::norms::Mat;
use crate::poly::{MultiIndex, PolyTuple};
use crate::scalar::{compensated_sum, Scalar};

/// `D^ℓ_x f`: the order-`ℓ` derivative tensor of a tuple at a point, stored
/// as a `q × nˡ` row-major array symmetric in its `ℓ` direction slots.
///
/// Orders above `max d_i` are kept as an explicit zero without allocating.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeTensor<T> {
    order: u32,
    q: usize,
    n: usize,
    point: Vec<T>,
    entries: Option<Vec<T>>,
}

impl<T: Scalar> DerivativeTensor<T> {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn point(&self) -> &[T] {
        &self.point
    }

    /// True for the explicit zero tensor (order above every degree).
    pub fn is_zero(&self) -> bool {
        self.entries.is_none()
    }

    /// Flat entries, `None` for the explicit zero tensor.
    pub fn entries(&self) -> Option<&[T]> {
        self.entries.as_deref()
    }

    fn slot_len(&self) -> usize {
        self.n.pow(self.order)
    }

    /// Entry `∂^ℓ f_i / ∂X_{k_1}⋯∂X_{k_ℓ}`.
    pub fn get(&self, i: usize, dirs: &[usize]) -> T {
        debug_assert_eq!(dirs.len(), self.order as usize);
        match &self.entries {
            None => T::zero(),
            Some(e) => {
                let idx = dirs.iter().fold(0usize, |acc, &k| acc * self.n + k);
                e[i * self.slot_len() + idx]
            }
        }
    }

    /// `D^ℓ_x f[v_1, …, v_ℓ] ∈ ℝ^q`.
    pub fn apply(&self, vs: &[&[T]]) -> Result<Vec<T>> {
        if vs.len() != self.order as usize {
            return Err(Error::DimensionMismatch {
                expected: self.order as usize,
                got: vs.len(),
            });
        }
        if let Some(v) = vs.iter().find(|v| v.len() != self.n) {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        let Some(entries) = &self.entries else {
            return Ok(vec![T::zero(); self.q]);
        };
        let block = self.slot_len();
        Ok((0..self.q)
            .map(|i| {
                let mut cur: Vec<T> = entries[i * block..(i + 1) * block].to_vec();
                // contract the trailing slot first
                for v in vs.iter().rev() {
                    cur = cur
                        .chunks(self.n)
                        .map(|chunk| compensated_sum(chunk.iter().zip(v.iter()).map(|(a, b)| *a * *b)))
                        .collect();
                }
                cur[0]
            })
            .collect())
    }

    /// The Jacobian `D_x f` as a `q × n` matrix (order 1 only).
    pub fn to_matrix(&self) -> Mat<T> {
        assert_eq!(self.order, 1, "to_matrix needs an order-1 tensor");
        match &self.entries {
            None => Mat::zeros(self.q, self.n),
            Some(e) => Mat::from_row_major(self.q, self.n, e.clone()),
        }
    }
}

/// Falling factorial `a (a−1) ⋯ (a−b+1)`.
fn falling(a: u32, b: u32) -> f64 {
    (0..b).map(|j| f64::from(a - j)).product()
}

impl<T: Scalar> PolyTuple<T> {
    /// `D^ℓ_x f`, computed from one canonical table of mixed partials so the
    /// result is exactly symmetric.
    pub fn derivative_tensor(&self, x: &[T], order: u32) -> Result<DerivativeTensor<T>> {
        self.check_point(x)?;
        if order == 0 {
            return Err(Error::InvalidInput("derivative order must be at least 1".into()));
        }
        let (n, q) = (self.n(), self.q());
        if order > self.max_degree() {
            return Ok(DerivativeTensor {
                order,
                q,
                n,
                point: x.to_vec(),
                entries: None,
            });
        }
        let powers = self.power_table(x);
        // canonical table: sorted direction multiset -> per-row partial
        let mut table: HashMap<Vec<u32>, Vec<T>> = HashMap::new();
        for beta in MultiIndex::all_up_to(n, order)
            .into_iter()
            .filter(|b| b.degree() == order)
        {
            let vals = self
                .polys()
                .iter()
                .map(|p| {
                    compensated_sum(p.terms().filter_map(|(alpha, c)| {
                        let ok = alpha
                            .exponents()
                            .iter()
                            .zip(beta.exponents())
                            .all(|(a, b)| a >= b);
                        if !ok {
                            return None;
                        }
                        let mut acc = *c;
                        for (k, (&a, &b)) in alpha.exponents().iter().zip(beta.exponents()).enumerate() {
                            acc = acc * T::lit(falling(a, b)) * powers[k][(a - b) as usize];
                        }
                        Some(acc)
                    }))
                })
                .collect();
            table.insert(beta.exponents().to_vec(), vals);
        }
        let block = n.pow(order);
        let mut entries = vec![T::zero(); q * block];
        let mut dirs = vec![0usize; order as usize];
        let mut counts = vec![0u32; n];
        for flat in 0..block {
            let mut rem = flat;
            for slot in (0..order as usize).rev() {
                dirs[slot] = rem % n;
                rem /= n;
            }
            counts.iter_mut().for_each(|c| *c = 0);
            for &k in &dirs {
                counts[k] += 1;
            }
            let vals = &table[&counts];
            for i in 0..q {
                entries[i * block + flat] = vals[i];
            }
        }
        Ok(DerivativeTensor {
            order,
            q,
            n,
            point: x.to_vec(),
            entries: Some(entries),
        })
    }

    /// `D_x f` as a `q × n` matrix.
    pub fn jacobian(&self, x: &[T]) -> Result<Mat<T>> {
        Ok(self.derivative_tensor(x, 1)?.to_matrix())
    }
}
