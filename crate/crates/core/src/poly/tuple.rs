use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::MultiIndex;
use crate::scalar::{binomial, compensated_sum, Scalar};

/// A single sparse polynomial in `n` variables.
///
/// Keys of the term map form the support; a key may carry a zero coefficient
/// so that a sampled support is kept even when a coefficient comes out zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero() -> Self {
        Polynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &T)> + '_ {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> + '_ {
        self.terms.keys()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> T {
        self.terms.get(alpha).copied().unwrap_or_else(T::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total degree among nonzero terms; zero for the zero polynomial.
    pub fn actual_degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, c)| **c != T::zero())
            .map(|(a, _)| a.degree())
            .max()
            .unwrap_or(0)
    }

    /// `Σ_α |f_α|`.
    pub fn one_norm(&self) -> T {
        compensated_sum(self.terms.values().map(|c| c.abs()))
    }

    fn add_term(&mut self, alpha: MultiIndex, c: T) {
        let slot = self.terms.entry(alpha).or_insert_with(T::zero);
        *slot = *slot + c;
    }

    /// Evaluation against a precomputed table `powers[k][e] = x_k^e`.
    fn eval_with(&self, powers: &[Vec<T>]) -> T {
        compensated_sum(self.terms.iter().map(|(alpha, c)| {
            alpha
                .exponents()
                .iter()
                .enumerate()
                .fold(*c, |acc, (k, &e)| acc * powers[k][e as usize])
        }))
    }

    fn partial(&self, k: usize) -> Polynomial<T> {
        let mut out = Polynomial::zero();
        for (alpha, c) in &self.terms {
            if let Some(beta) = alpha.derive(k) {
                out.add_term(beta, *c * T::lit(f64::from(alpha.get(k))));
            }
        }
        out
    }
}

/// A `q`-tuple of real polynomials in `n` variables with degree vector `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyTuple<T> {
    n: usize,
    degrees: Vec<u32>,
    polys: Vec<Polynomial<T>>,
}

impl<T: Scalar> PolyTuple<T> {
    /// Builds a tuple from `(exponents, coefficient)` lists, one per
    /// polynomial. Repeated exponents are summed.
    pub fn new(n: usize, degrees: Vec<u32>, polys: Vec<Vec<(Vec<u32>, T)>>) -> Result<Self> {
        if polys.len() != degrees.len() {
            return Err(Error::InvalidInput(format!(
                "{} polynomials but {} degrees",
                polys.len(),
                degrees.len()
            )));
        }
        let mut built = Vec::with_capacity(polys.len());
        for (i, terms) in polys.into_iter().enumerate() {
            let mut p = Polynomial::zero();
            for (exps, c) in terms {
                if exps.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: exps.len(),
                    });
                }
                let alpha = MultiIndex::new(exps);
                if alpha.degree() > degrees[i] {
                    return Err(Error::DegreeOverflow {
                        poly: i,
                        degree: alpha.degree(),
                        max: degrees[i],
                    });
                }
                p.add_term(alpha, c);
            }
            built.push(p);
        }
        Self::from_polynomials(n, degrees, built)
    }

    pub(crate) fn from_polynomials(
        n: usize,
        degrees: Vec<u32>,
        polys: Vec<Polynomial<T>>,
    ) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::InvalidInput("empty polynomial tuple".into()));
        }
        if degrees.contains(&0) {
            return Err(Error::InvalidInput("degrees must be positive".into()));
        }
        if polys.len() > n {
            return Err(Error::InvalidInput(format!(
                "tuple length q = {} exceeds dimension n = {n}",
                polys.len()
            )));
        }
        Ok(PolyTuple { n, degrees, polys })
    }

    /// Builds a tuple directly from term maps keyed by [`MultiIndex`].
    pub fn from_supports(
        n: usize,
        degrees: Vec<u32>,
        polys: Vec<Vec<(MultiIndex, T)>>,
    ) -> Result<Self> {
        Self::new(
            n,
            degrees,
            polys
                .into_iter()
                .map(|p| {
                    p.into_iter()
                        .map(|(a, c)| (a.exponents().to_vec(), c))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn zero(n: usize, degrees: Vec<u32>) -> Result<Self> {
        let q = degrees.len();
        Self::from_polynomials(n, degrees, vec![Polynomial::zero(); q])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.polys.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// `D = max d_i`.
    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn polys(&self) -> &[Polynomial<T>] {
        &self.polys
    }

    pub fn poly(&self, i: usize) -> &Polynomial<T> {
        &self.polys[i]
    }

    /// True when every coefficient is an integer (bit-model tuples).
    pub fn is_integral(&self) -> bool {
        self.polys
            .iter()
            .flat_map(|p| p.terms.values())
            .all(|c| c.fract() == T::zero())
    }

    pub(crate) fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `powers[k][e] = x_k^e` for `e ≤ D`.
    pub(crate) fn power_table(&self, x: &[T]) -> Vec<Vec<T>> {
        let dmax = self.max_degree() as usize;
        x.iter()
            .map(|&xk| {
                let mut row = Vec::with_capacity(dmax + 1);
                let mut acc = T::one();
                for _ in 0..=dmax {
                    row.push(acc);
                    acc = acc * xk;
                }
                row
            })
            .collect()
    }

    /// `f(x) ∈ ℝ^q`.
    pub fn evaluate(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_point(x)?;
        let powers = self.power_table(x);
        Ok(self.polys.iter().map(|p| p.eval_with(&powers)).collect())
    }

    /// `f(x)` against a table from [`PolyTuple::power_table`] of a tuple
    /// with the same `n` and at least the same maximum degree.
    pub(crate) fn evaluate_with_powers(&self, powers: &[Vec<T>]) -> Vec<T> {
        self.polys.iter().map(|p| p.eval_with(powers)).collect()
    }

    /// `‖f‖₁ = max_i Σ_α |f_{i,α}|`.
    pub fn one_norm(&self) -> T {
        self.polys
            .iter()
            .map(Polynomial::one_norm)
            .fold(T::zero(), T::max)
    }

    /// `‖binom(Δ, ℓ) f‖₁ = max_i binom(d_i, ℓ)·‖f_i‖₁`.
    pub fn binom_delta_norm(&self, order: u32) -> T {
        self.polys
            .iter()
            .zip(&self.degrees)
            .map(|(p, &d)| binomial::<T>(d, order) * p.one_norm())
            .fold(T::zero(), T::max)
    }

    /// `∂f/∂X_k` with degree vector `d − 1` floored at zero.
    pub fn partial(&self, k: usize) -> PolyTuple<T> {
        PolyTuple {
            n: self.n,
            degrees: self.degrees.iter().map(|d| d.saturating_sub(1)).collect(),
            polys: self.polys.iter().map(|p| p.partial(k)).collect(),
        }
    }

    /// `∂f[v] = Σ_k v_k ∂f/∂X_k`, degree vector `d − 1` floored at zero.
    pub fn directional_derivative_poly(&self, v: &[T]) -> Result<PolyTuple<T>> {
        self.check_point(v)?;
        let mut polys = vec![Polynomial::zero(); self.q()];
        for (k, &vk) in v.iter().enumerate() {
            if vk == T::zero() {
                continue;
            }
            for (out, p) in polys.iter_mut().zip(&self.polys) {
                for (beta, c) in p.partial(k).terms {
                    out.add_term(beta, c * vk);
                }
            }
        }
        Ok(PolyTuple {
            n: self.n,
            degrees: self.degrees.iter().map(|d| d.saturating_sub(1)).collect(),
            polys,
        })
    }

    /// `f^h_i = f_i(X/X_0)·X_0^{d_i}` in the `n + 1` variables `(X_0, X_1, …)`.
    pub fn homogenize(&self) -> PolyTuple<T> {
        let polys = self
            .polys
            .iter()
            .zip(&self.degrees)
            .map(|(p, &d)| Polynomial {
                terms: p
                    .terms
                    .iter()
                    .map(|(alpha, c)| (alpha.prepend(d - alpha.degree()), *c))
                    .collect(),
            })
            .collect();
        PolyTuple {
            n: self.n + 1,
            degrees: self.degrees.clone(),
            polys,
        }
    }

    /// Multiplies polynomial `i` by `factors[i]`.
    pub fn scale_rows(&self, factors: &[T]) -> Result<PolyTuple<T>> {
        if factors.len() != self.q() {
            return Err(Error::DimensionMismatch {
                expected: self.q(),
                got: factors.len(),
            });
        }
        Ok(self.map_rows(|i, c| c * factors[i]))
    }

    /// `c·f`.
    pub fn scaled(&self, c: T) -> PolyTuple<T> {
        self.map_rows(|_, a| a * c)
    }

    /// `Δ⁻¹ f`, zero-degree rows left untouched.
    pub fn delta_inverse(&self) -> PolyTuple<T> {
        let degrees = self.degrees.clone();
        self.map_rows(|i, c| {
            if degrees[i] == 0 {
                c
            } else {
                c / T::lit(f64::from(degrees[i]))
            }
        })
    }

    fn map_rows(&self, f: impl Fn(usize, T) -> T) -> PolyTuple<T> {
        PolyTuple {
            n: self.n,
            degrees: self.degrees.clone(),
            polys: self
                .polys
                .iter()
                .enumerate()
                .map(|(i, p)| Polynomial {
                    terms: p.terms.iter().map(|(a, c)| (a.clone(), f(i, *c))).collect(),
                })
                .collect(),
        }
    }

    /// Converts coefficients to another scalar type.
    pub fn cast<U: Scalar>(&self) -> PolyTuple<U> {
        PolyTuple {
            n: self.n,
            degrees: self.degrees.clone(),
            polys: self
                .polys
                .iter()
                .map(|p| Polynomial {
                    terms: p
                        .terms
                        .iter()
                        .map(|(a, c)| (a.clone(), U::lit(c.as_f64())))
                        .collect(),
                })
                .collect(),
        }
    }
}
