//! Instance files: JSON with decimal-string or plain integers.

use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Deserialize, Clone, Debug)]
#[serde(untagged)]
enum IntLike {
    Int(i64),
    Str(String),
}

impl IntLike {
    fn big(&self, field: &str) -> Result<BigInt> {
        match self {
            IntLike::Int(i) => Ok(BigInt::from(*i)),
            IntLike::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Io(format!("field {field}: {s:?} is not a decimal integer"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    description: Option<String>,
    p: IntLike,
    k: IntLike,
    t: Vec<IntLike>,
    #[serde(default)]
    res_units: Option<Vec<IntLike>>,
    lambda: Vec<Vec<IntLike>>,
    #[serde(default)]
    analytic: Option<RawAnalytic>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalytic {
    #[serde(default)]
    h: Option<IntLike>,
    #[serde(default, rename = "w_K")]
    w_k: Option<IntLike>,
    #[serde(default, rename = "f_I")]
    f_i: Option<IntLike>,
    #[serde(default, rename = "h_L")]
    h_l: Option<IntLike>,
    #[serde(default, rename = "h_FI")]
    h_fi: Option<IntLike>,
    #[serde(default)]
    q: Option<Vec<IntLike>>,
}

/// Optional arithmetic inputs used only by the index formulas.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Analytic {
    pub h: Option<BigInt>,
    pub w_k: Option<BigInt>,
    pub f_i: Option<BigInt>,
    pub h_l: Option<BigInt>,
    pub h_fi: Option<BigInt>,
    pub q: Option<Vec<BigInt>>,
}

/// Raw instance data as supplied, before validation and reordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamificationInstance {
    pub name: Option<String>,
    pub p: BigInt,
    pub k: BigInt,
    pub t: Vec<BigInt>,
    pub res_units: Vec<BigInt>,
    pub lambda: Vec<Vec<BigInt>>,
    pub analytic: Option<Analytic>,
}

fn opt(v: &Option<IntLike>, field: &str) -> Result<Option<BigInt>> {
    v.as_ref().map(|x| x.big(field)).transpose()
}

impl RamificationInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawInstance =
            serde_json::from_str(text).map_err(|e| Error::Io(format!("instance is not valid JSON: {e}")))?;
        let _ = raw.description;
        let t = raw.t.iter().map(|x| x.big("t")).collect::<Result<Vec<_>>>()?;
        let res_units = match &raw.res_units {
            Some(u) => u.iter().map(|x| x.big("res_units")).collect::<Result<Vec<_>>>()?,
            None => vec![BigInt::from(1); t.len()],
        };
        let lambda = raw
            .lambda
            .iter()
            .map(|row| row.iter().map(|x| x.big("lambda")).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let analytic = match &raw.analytic {
            None => None,
            Some(a) => Some(Analytic {
                h: opt(&a.h, "h")?,
                w_k: opt(&a.w_k, "w_K")?,
                f_i: opt(&a.f_i, "f_I")?,
                h_l: opt(&a.h_l, "h_L")?,
                h_fi: opt(&a.h_fi, "h_FI")?,
                q: a.q.as_ref().map(|q| q.iter().map(|x| x.big("q")).collect::<Result<Vec<_>>>()).transpose()?,
            }),
        };
        Ok(RamificationInstance {
            name: raw.name,
            p: raw.p.big("p")?,
            k: raw.k.big("k")?,
            t,
            res_units,
            lambda,
            analytic,
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Value {
        let s = |v: &BigInt| Value::String(v.to_string());
        let mut out = json!({
            "p": s(&self.p),
            "k": s(&self.k),
            "t": self.t.iter().map(s).collect::<Vec<_>>(),
            "res_units": self.res_units.iter().map(s).collect::<Vec<_>>(),
            "lambda": self.lambda.iter().map(|r| r.iter().map(s).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        if let Some(name) = &self.name {
            out["name"] = Value::String(name.clone());
        }
        if let Some(a) = &self.analytic {
            let mut m = serde_json::Map::new();
            for (key, v) in [("h", &a.h), ("w_K", &a.w_k), ("f_I", &a.f_i), ("h_L", &a.h_l), ("h_FI", &a.h_fi)] {
                if let Some(v) = v {
                    m.insert(key.into(), s(v));
                }
            }
            if let Some(q) = &a.q {
                m.insert("q".into(), Value::Array(q.iter().map(s).collect()));
            }
            out["analytic"] = Value::Object(m);
        }
        out
    }
}
