use serde::{Deserialize, Serialize};

use super::{ModelError, Objective, Polynomial, Problem, QuadraticObjective, SeparableObjective};

/// Objective coefficient: a JSON number, or a string holding a decimal or
/// a fraction such as `"-7/3"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Coeff {
    Number(f64),
    Text(String),
}

impl Coeff {
    fn value(&self) -> Result<f64, ModelError> {
        match self {
            Coeff::Number(v) => Ok(*v),
            Coeff::Text(s) => parse_rational(s),
        }
    }
}

fn parse_rational(s: &str) -> Result<f64, ModelError> {
    let bad = || ModelError::Schema(format!("invalid coefficient {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            Ok(p / q)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RawTerm {
    poly: Vec<Coeff>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawObjective {
    Quadratic {
        #[serde(rename = "Q")]
        q: Vec<Vec<Coeff>>,
        c: Vec<Coeff>,
        #[serde(default = "zero_coeff")]
        c0: Coeff,
    },
    Separable {
        terms: Vec<RawTerm>,
    },
}

fn zero_coeff() -> Coeff {
    Coeff::Number(0.0)
}

#[derive(Debug, Serialize, Deserialize)]
struct RawInstance {
    #[serde(default)]
    name: String,
    n: usize,
    m: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<i64>>,
    b: Vec<i64>,
    l: Vec<i64>,
    u: Vec<i64>,
    objective: RawObjective,
}

fn values(v: &[Coeff]) -> Result<Vec<f64>, ModelError> {
    v.iter().map(Coeff::value).collect()
}

/// Parse the native JSON instance format and validate the problem.
pub fn parse_instance_json(text: &str) -> Result<Problem, ModelError> {
    let raw: RawInstance =
        serde_json::from_str(text).map_err(|e| ModelError::Schema(e.to_string()))?;
    if raw.a.len() != raw.m {
        return Err(ModelError::Dimension(format!(
            "m = {} but A has {} rows",
            raw.m,
            raw.a.len()
        )));
    }
    if raw.l.len() != raw.n || raw.u.len() != raw.n {
        return Err(ModelError::Dimension(format!(
            "n = {} but l, u have {} and {} entries",
            raw.n,
            raw.l.len(),
            raw.u.len()
        )));
    }
    let objective = match raw.objective {
        RawObjective::Quadratic { q, c, c0 } => {
            let q = q.iter().map(|r| values(r)).collect::<Result<Vec<_>, _>>()?;
            Objective::Quadratic(QuadraticObjective::new(q, values(&c)?, c0.value()?)?)
        }
        RawObjective::Separable { terms } => Objective::Separable(SeparableObjective {
            terms: terms
                .iter()
                .map(|t| values(&t.poly).map(Polynomial))
                .collect::<Result<_, _>>()?,
        }),
    };
    Problem::new(raw.name, raw.a, raw.b, raw.l, raw.u, objective)
}

/// Serialize a problem in the native JSON instance format.
pub fn write_instance_json(p: &Problem) -> String {
    let num = |v: &f64| Coeff::Number(*v);
    let objective = match p.objective() {
        Objective::Quadratic(q) => RawObjective::Quadratic {
            q: q.q.iter().map(|r| r.iter().map(num).collect()).collect(),
            c: q.c.iter().map(num).collect(),
            c0: Coeff::Number(q.c0),
        },
        Objective::Separable(s) => RawObjective::Separable {
            terms: s
                .terms
                .iter()
                .map(|t| RawTerm {
                    poly: t.0.iter().map(num).collect(),
                })
                .collect(),
        },
    };
    let raw = RawInstance {
        name: p.name().to_string(),
        n: p.n(),
        m: p.m(),
        a: p.a_rows().to_vec(),
        b: p.b().to_vec(),
        l: p.lower().to_vec(),
        u: p.upper().to_vec(),
        objective,
    };
    serde_json::to_string_pretty(&raw).expect("instance serialization cannot fail")
}
