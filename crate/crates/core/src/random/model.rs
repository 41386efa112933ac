use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{MultiIndex, PolyTuple};

/// Coefficient distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelKind {
    /// Independent uniform coefficients in `[−1, 1]`.
    UniformContinuous,
    /// `N(μ, σ²)` with `μ` uniform in `[−mu_range, mu_range]` and `σ`
    /// uniform in `[sigma0, sigma1]`, drawn per coefficient.
    Gaussian {
        #[serde(default)]
        mu_range: f64,
        #[serde(default = "one")]
        sigma0: f64,
        #[serde(default = "one")]
        sigma1: f64,
    },
    /// Uniform integers in `[−2^τ, 2^τ]`.
    BitUniform { tau: u32 },
    /// Integers drawn from `table`, a list of `(value, probability)` pairs
    /// shared by every coefficient.
    BitGeneral { tau: u32, table: Vec<(i64, f64)> },
}

fn one() -> f64 {
    1.0
}

/// Monomial supports `M_1, …, M_q`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportSpec {
    /// All monomials of degree at most `d_i`.
    #[default]
    Dense,
    /// Exactly the Renegar set `R_{n,d_i}`.
    Renegar,
    /// Explicit exponent lists, one per polynomial.
    Custom(Vec<Vec<Vec<u32>>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct RandomModelSpec {
    #[serde(flatten)]
    pub kind: ModelKind,
    #[serde(default)]
    pub support: SupportSpec,
    /// Subexponential order used by the continuous tail bounds.
    #[serde(default)]
    pub p: Option<f64>,
}

/// `flatten` switches off `deny_unknown_fields`, so the shared keys are
/// split off by hand and the rest must parse as a [`ModelKind`].
#[derive(Deserialize)]
struct RawSpec(serde_json::Map<String, serde_json::Value>);

impl TryFrom<RawSpec> for RandomModelSpec {
    type Error = String;

    fn try_from(RawSpec(mut map): RawSpec) -> std::result::Result<Self, String> {
        let support = match map.remove("support") {
            Some(v) => serde_json::from_value(v).map_err(|e| format!("support: {e}"))?,
            None => SupportSpec::Dense,
        };
        let p = match map.remove("p") {
            Some(v) => serde_json::from_value(v).map_err(|e| format!("p: {e}"))?,
            None => None,
        };
        // unit variants ignore extra keys even under deny_unknown_fields
        if map.get("kind").and_then(|k| k.as_str()) == Some("uniform_continuous") {
            if let Some(extra) = map.keys().find(|k| *k != "kind") {
                return Err(format!("unknown field `{extra}` for kind `uniform_continuous`"));
            }
        }
        let kind = serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| e.to_string())?;
        Ok(RandomModelSpec { kind, support, p })
    }
}

impl RandomModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        RandomModelSpec {
            kind,
            support: SupportSpec::Dense,
            p: None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, ModelKind::BitUniform { .. } | ModelKind::BitGeneral { .. })
    }

    pub fn tau(&self) -> Option<u32> {
        match self.kind {
            ModelKind::BitUniform { tau } | ModelKind::BitGeneral { tau, .. } => Some(tau),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        match &self.kind {
            ModelKind::UniformContinuous => {}
            ModelKind::Gaussian {
                mu_range,
                sigma0,
                sigma1,
            } => {
                if !(*mu_range >= 0.0 && mu_range.is_finite()) {
                    return bad("gaussian.mu_range must be finite and non-negative".into());
                }
                if !(*sigma0 > 0.0 && sigma0 <= sigma1 && sigma1.is_finite()) {
                    return bad("gaussian needs 0 < sigma0 <= sigma1 < inf".into());
                }
            }
            ModelKind::BitUniform { tau } => check_tau(*tau)?,
            ModelKind::BitGeneral { tau, table } => {
                check_tau(*tau)?;
                let bound = 1i64 << tau;
                if table.is_empty() {
                    return bad("bit_general.table is empty".into());
                }
                if let Some((v, _)) = table.iter().find(|(v, _)| v.abs() > bound) {
                    return bad(format!("bit_general.table value {v} exceeds 2^tau"));
                }
                if table.iter().any(|(_, w)| !(*w >= 0.0)) {
                    return bad("bit_general.table weights must be non-negative".into());
                }
                let total: f64 = table.iter().map(|(_, w)| w).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return bad(format!("bit_general.table weights sum to {total}, not 1"));
                }
            }
        }
        if let Some(p) = self.p {
            if !(p >= 1.0) {
                return bad("p must be at least 1".into());
            }
        }
        Ok(())
    }
}

fn check_tau(tau: u32) -> Result<()> {
    if tau > 52 {
        return Err(Error::InvalidInput("tau above 52 is not exactly representable".into()));
    }
    Ok(())
}

/// `R_{n,d} = ∪_k {(d−1)e_k + e_l : l = 0..n}` with `e_0 = 0`.
pub fn renegar_set(n: usize, d: u32) -> BTreeSet<MultiIndex> {
    let e = |k: usize, c: u32| -> Vec<u32> {
        let mut v = vec![0; n];
        if k > 0 {
            v[k - 1] += c;
        }
        v
    };
    let mut out = BTreeSet::new();
    for k in 0..=n {
        for l in 0..=n {
            let mut v = e(k, d - 1);
            if l > 0 {
                v[l - 1] += 1;
            }
            out.insert(MultiIndex::new(v));
        }
    }
    out
}

/// The supports `M_i` of `spec` for the given shape, checked to contain
/// `R_{n,d_i}` and to respect the degrees.
pub fn supports(spec: &SupportSpec, n: usize, degrees: &[u32]) -> Result<Vec<Vec<MultiIndex>>> {
    if degrees.contains(&0) {
        return Err(Error::InvalidInput("degrees must be positive".into()));
    }
    match spec {
        SupportSpec::Dense => Ok(degrees.iter().map(|&d| MultiIndex::all_up_to(n, d)).collect()),
        SupportSpec::Renegar => Ok(degrees.iter().map(|&d| renegar_set(n, d).into_iter().collect()).collect()),
        SupportSpec::Custom(lists) => {
            if lists.len() != degrees.len() {
                return Err(Error::DimensionMismatch {
                    expected: degrees.len(),
                    got: lists.len(),
                });
            }
            let mut out = Vec::with_capacity(lists.len());
            for (i, (list, &d)) in lists.iter().zip(degrees).enumerate() {
                let mut set = BTreeSet::new();
                for e in list {
                    if e.len() != n {
                        return Err(Error::DimensionMismatch { expected: n, got: e.len() });
                    }
                    let m = MultiIndex::new(e.clone());
                    if m.degree() > d {
                        return Err(Error::DegreeOverflow {
                            poly: i,
                            degree: m.degree(),
                            max: d,
                        });
                    }
                    set.insert(m);
                }
                if let Some(miss) = renegar_set(n, d).iter().find(|m| !set.contains(*m)) {
                    return Err(Error::InvalidInput(format!(
                        "support of polynomial {i} lacks the required monomial {miss}"
                    )));
                }
                out.push(set.into_iter().collect());
            }
            Ok(out)
        }
    }
}

/// Model constants entering the tail bounds. Zintzo kinds fill `l` and
/// `rho`, bit kinds fill `w` and `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub l: Option<f64>,
    pub rho: Option<f64>,
    pub w: Option<f64>,
    pub u: Option<f64>,
    /// `max_i |M_i|`.
    pub max_support: usize,
}

pub fn model_constants(spec: &RandomModelSpec, n: usize, degrees: &[u32]) -> Result<ModelConstants> {
    spec.validate()?;
    let m = supports(&spec.support, n, degrees)?.iter().map(Vec::len).max().unwrap_or(0);
    let mf = m as f64;
    let inv_sqrt_2pi = 1.0 / (2.0 * PI).sqrt();
    let mut c = ModelConstants {
        l: None,
        rho: None,
        w: None,
        u: None,
        max_support: m,
    };
    match &spec.kind {
        ModelKind::UniformContinuous => {
            c.l = Some(mf);
            c.rho = Some(0.5);
        }
        ModelKind::Gaussian {
            mu_range,
            sigma0,
            sigma1,
        } => {
            if *mu_range == 0.0 && *sigma0 == 1.0 && *sigma1 == 1.0 {
                c.l = Some(2f64.sqrt() * mf);
                c.rho = Some(inv_sqrt_2pi);
            } else {
                c.l = Some(mu_range.max(2.0 * sigma1) * mf);
                c.rho = Some(inv_sqrt_2pi / sigma0);
            }
        }
        ModelKind::BitUniform { tau } => {
            c.w = Some(1.0 / (2f64.powi(*tau as i32 + 1) + 1.0));
            c.u = Some(0.0);
        }
        ModelKind::BitGeneral { tau, table } => {
            let w = table.iter().map(|(_, p)| *p).fold(0.0, f64::max);
            c.w = Some(w);
            c.u = Some(((1.0 + 2f64.powi(*tau as i32 + 1)) * w).ln());
        }
    }
    Ok(c)
}

/// Draws a tuple from `spec`; the same seed gives the same tuple.
pub fn sample_tuple(spec: &RandomModelSpec, n: usize, degrees: &[u32], seed: u64) -> Result<PolyTuple<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_tuple_with(spec, n, degrees, &mut rng)
}

pub fn sample_tuple_with<R: Rng + ?Sized>(
    spec: &RandomModelSpec,
    n: usize,
    degrees: &[u32],
    rng: &mut R,
) -> Result<PolyTuple<f64>> {
    spec.validate()?;
    let supp = supports(&spec.support, n, degrees)?;
    let cumulative: Vec<f64> = match &spec.kind {
        ModelKind::BitGeneral { table, .. } => table
            .iter()
            .scan(0.0, |acc, (_, w)| {
                *acc += w;
                Some(*acc)
            })
            .collect(),
        _ => Vec::new(),
    };
    let mut polys = Vec::with_capacity(supp.len());
    for list in &supp {
        let mut terms = Vec::with_capacity(list.len());
        for alpha in list {
            let c = match &spec.kind {
                ModelKind::UniformContinuous => rng.random_range(-1.0..=1.0),
                ModelKind::Gaussian {
                    mu_range,
                    sigma0,
                    sigma1,
                } => {
                    let mu = if *mu_range > 0.0 {
                        rng.random_range(-mu_range..=*mu_range)
                    } else {
                        0.0
                    };
                    let sigma = if sigma1 > sigma0 {
                        rng.random_range(*sigma0..=*sigma1)
                    } else {
                        *sigma0
                    };
                    let z: f64 = rng.sample(rand_distr::StandardNormal);
                    mu + sigma * z
                }
                ModelKind::BitUniform { tau } => {
                    let b = 1i64 << tau;
                    rng.random_range(-b..=b) as f64
                }
                ModelKind::BitGeneral { table, .. } => {
                    let x: f64 = rng.random::<f64>() * cumulative[cumulative.len() - 1];
                    let k = cumulative.partition_point(|c| *c <= x).min(table.len() - 1);
                    table[k].0 as f64
                }
            };
            terms.push((alpha.exponents().to_vec(), c));
        }
        polys.push(terms);
    }
    PolyTuple::new(n, degrees.to_vec(), polys)
}
