//! JSON interchange format:
//! `{"n":2,"q":1,"degrees":[2],"polys":[[{"exp":[2,0],"coef":1.0}, …]]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::PolyTuple;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coef: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTupleJson {
    pub n: usize,
    pub q: usize,
    pub degrees: Vec<u32>,
    pub polys: Vec<Vec<TermJson>>,
}

impl<T: Scalar> From<&PolyTuple<T>> for PolyTupleJson {
    fn from(f: &PolyTuple<T>) -> Self {
        PolyTupleJson {
            n: f.n(),
            q: f.q(),
            degrees: f.degrees().to_vec(),
            polys: f
                .polys()
                .iter()
                .map(|p| {
                    p.terms()
                        .map(|(a, c)| TermJson {
                            exp: a.exponents().to_vec(),
                            coef: c.as_f64(),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl PolyTupleJson {
    pub fn into_tuple<T: Scalar>(self) -> Result<PolyTuple<T>> {
        if self.q != self.polys.len() {
            return Err(Error::InvalidInput(format!(
                "q = {} but {} polynomials listed",
                self.q,
                self.polys.len()
            )));
        }
        PolyTuple::new(
            self.n,
            self.degrees,
            self.polys
                .into_iter()
                .map(|p| p.into_iter().map(|t| (t.exp, T::lit(t.coef))).collect())
                .collect(),
        )
    }
}

impl<T: Scalar> PolyTuple<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolyTupleJson::from(self)).expect("serializable")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let raw: PolyTupleJson =
            serde_json::from_str(src).map_err(|e| Error::InvalidInput(format!("polynomial JSON: {e}")))?;
        raw.into_tuple()
    }
}
