//! Input description of an exponential-sum family and its JSON wire format.
//!
//! A spec file is one JSON object:
//!
//! ```json
//! { "p": 7, "a": 1, "m": 1, "A": [[1], [-1]], "e": [2] }
//! ```
//!
//! `n` and `N` may be given explicitly and are then checked against `A`; `m`
//! defaults to `n` (all variables toric). Optional keys are `beta` (parameter
//! for the solution basis), `u0` (base representation for the series check),
//! and `caps` with any of `weight_cap`, `relation_norm_cap`, `oracle_budget`.
//! Integers may be written as JSON numbers or as decimal strings.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::ASet;
use crate::modp;
use crate::vector::{ExponentVector, LatticeVector};

/// Search and work limits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub weight_cap: u64,
    /// `None` means three times the largest 1-norm in the kernel basis.
    pub relation_norm_cap: Option<u64>,
    pub oracle_budget: u64,
}

impl Caps {
    pub fn defaults(p: u64, a: u32, big_n: usize) -> Self {
        Caps {
            weight_cap: 4 * a as u64 * big_n as u64 * (p - 1),
            relation_norm_cap: None,
            oracle_budget: 100_000_000,
        }
    }

    /// Applies one `key=value` override.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        let v: u64 = value.trim().parse().map_err(|_| {
            Error::InvalidInput(format!("cap value `{value}` is not a nonnegative integer"))
        })?;
        match key.trim() {
            "weight_cap" => self.weight_cap = v,
            "relation_norm_cap" => self.relation_norm_cap = Some(v),
            "oracle_budget" => self.oracle_budget = v,
            other => return Err(Error::InvalidInput(format!("unknown cap `{other}`"))),
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProblemSpec {
    pub p: u64,
    pub a: u32,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    #[serde(rename = "A")]
    pub matrix: Vec<Vec<i64>>,
    pub e: LatticeVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<LatticeVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u0: Option<ExponentVector>,
    pub caps: Caps,
}

impl ProblemSpec {
    /// All variables toric.
    pub fn toric(p: u64, a: u32, matrix: Vec<Vec<i64>>, e: Vec<i64>) -> Result<Self> {
        let n = matrix.first().map_or(0, Vec::len);
        ProblemSpec::affine(p, a, matrix, e, n)
    }

    /// The first `m` variables toric, the remaining `n - m` affine.
    pub fn affine(p: u64, a: u32, matrix: Vec<Vec<i64>>, e: Vec<i64>, m: usize) -> Result<Self> {
        let n = matrix.first().map_or(0, Vec::len);
        let big_n = matrix.len();
        let caps = Caps::defaults(p.max(2), a.max(1), big_n);
        let spec = ProblemSpec {
            p,
            a,
            n,
            m,
            big_n,
            matrix,
            e: LatticeVector(e),
            beta: None,
            u0: None,
            caps,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_beta(mut self, beta: Vec<i64>) -> Result<Self> {
        self.beta = Some(LatticeVector(beta));
        self.validate()?;
        Ok(self)
    }

    pub fn with_u0(mut self, u0: Vec<u64>) -> Result<Self> {
        self.u0 = Some(ExponentVector(u0));
        self.validate()?;
        Ok(self)
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.a)
    }

    pub fn a_set(&self) -> Result<ASet> {
        ASet::new(self.n, self.matrix.clone())
    }

    pub fn is_toric(&self) -> bool {
        self.m == self.n
    }

    pub fn validate(&self) -> Result<()> {
        modp::check_prime(self.p)?;
        if self.a == 0 {
            return Err(Error::InvalidInput(
                "extension degree a must be at least 1".into(),
            ));
        }
        match self.p.checked_pow(self.a) {
            Some(q) if q <= 1 << 32 => {}
            _ => return Err(Error::InvalidInput("q = p^a is too large".into())),
        }
        if self.n == 0 || self.big_n == 0 {
            return Err(Error::InvalidInput(
                "A must be a nonempty N x n matrix with n >= 1".into(),
            ));
        }
        if self.big_n != self.matrix.len() {
            return Err(Error::DimensionMismatch {
                expected: self.big_n,
                found: self.matrix.len(),
            });
        }
        if let Some(row) = self.matrix.iter().find(|r| r.len() != self.n) {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: row.len(),
            });
        }
        if self.m > self.n {
            return Err(Error::InvalidInput(format!(
                "m = {} exceeds n = {}",
                self.m, self.n
            )));
        }
        if self.e.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.e.len(),
            });
        }
        if self.e.0[self.m..].iter().any(|&x| x != 0) {
            return Err(Error::InvalidInput(
                "e must vanish in the affine coordinates".into(),
            ));
        }
        if let Some(b) = &self.beta {
            if b.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: b.len(),
                });
            }
        }
        if let Some(u) = &self.u0 {
            if u.len() != self.big_n {
                return Err(Error::DimensionMismatch {
                    expected: self.big_n,
                    found: u.len(),
                });
            }
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))?;
        ProblemSpec::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidInput("spec must be a JSON object".into()))?;
        let field = |k: &str| {
            obj.get(k)
                .ok_or_else(|| Error::InvalidInput(format!("missing field `{k}`")))
        };
        let p = to_u64(field("p")?, "p")?;
        let a = obj
            .get("a")
            .map(|x| to_u64(x, "a"))
            .transpose()?
            .unwrap_or(1);
        let a = u32::try_from(a).map_err(|_| Error::InvalidInput("a is too large".into()))?;
        let matrix: Vec<Vec<i64>> = field("A")?
            .as_array()
            .ok_or_else(|| Error::InvalidInput("`A` must be an array of rows".into()))?
            .iter()
            .map(|row| to_i64_vec(row, "A"))
            .collect::<Result<_>>()?;
        let n_from_a = matrix.first().map_or(0, Vec::len);
        let n = obj
            .get("n")
            .map(|x| to_usize(x, "n"))
            .transpose()?
            .unwrap_or(n_from_a);
        let big_n = obj
            .get("N")
            .map(|x| to_usize(x, "N"))
            .transpose()?
            .unwrap_or(matrix.len());
        let m = obj
            .get("m")
            .map(|x| to_usize(x, "m"))
            .transpose()?
            .unwrap_or(n);
        let e = match obj.get("e") {
            Some(x) => to_i64_vec(x, "e")?,
            None => vec![0; n],
        };
        let beta = obj
            .get("beta")
            .map(|x| to_i64_vec(x, "beta"))
            .transpose()?
            .map(LatticeVector);
        let u0 = obj
            .get("u0")
            .map(|x| to_i64_vec(x, "u0"))
            .transpose()?
            .map(|v| {
                v.into_iter()
                    .map(|x| {
                        u64::try_from(x).map_err(|_| {
                            Error::InvalidInput("u0 entries must be nonnegative".into())
                        })
                    })
                    .collect::<Result<Vec<u64>>>()
            })
            .transpose()?
            .map(ExponentVector);
        if !modp::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut caps = Caps::defaults(p, a.max(1), big_n);
        if let Some(c) = obj.get("caps") {
            let c = c
                .as_object()
                .ok_or_else(|| Error::InvalidInput("`caps` must be an object".into()))?;
            for (k, val) in c {
                let v = to_u64(val, k)?;
                caps.apply_override(k, &v.to_string())?;
            }
        }
        let spec = ProblemSpec {
            p,
            a,
            n,
            m,
            big_n,
            matrix,
            e: LatticeVector(e),
            beta,
            u0,
            caps,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn to_i64(v: &Value, what: &str) -> Result<i64> {
    let bad = || Error::InvalidInput(format!("`{what}` must contain integers"));
    match v {
        Value::Number(n) => n.as_i64().ok_or_else(bad),
        Value::String(s) => s.trim().parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn to_u64(v: &Value, what: &str) -> Result<u64> {
    u64::try_from(to_i64(v, what)?)
        .map_err(|_| Error::InvalidInput(format!("`{what}` must be nonnegative")))
}

fn to_usize(v: &Value, what: &str) -> Result<usize> {
    Ok(to_u64(v, what)? as usize)
}

fn to_i64_vec(v: &Value, what: &str) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInput(format!("`{what}` must be an array")))?
        .iter()
        .map(|x| to_i64(x, what))
        .collect()
}

/// Writes an integer for the wire: a JSON number when it is exactly
/// representable as a double, a decimal string otherwise.
pub fn wire_int(x: i128) -> Value {
    if x.unsigned_abs() <= 1u128 << 53 {
        Value::from(x as i64)
    } else {
        Value::String(x.to_string())
    }
}
