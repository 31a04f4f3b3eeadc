//! Importer for the QPLIB `.qplib` ASCII format, restricted to instances
//! with integer variables, finite bounds, and linear equality constraints.
//!
//! Layout, one item per line (text after `#` is a comment):
//!
//! ```text
//! name
//! type code, e.g. QBL (objective, variables, constraints)
//! minimize | maximize
//! n
//! m                                 (only if constraints are present)
//! #quadratic objective terms, then "i j v" lines, lower triangle, 1-based
//!                                   (only if the objective is not linear)
//! default linear coefficient, #non-default, then "i v" lines
//! objective constant
//! #linear constraint terms, then "i j v" lines
//! infinity
//! default lhs, #non-default, "i v" lines
//! default rhs, #non-default, "i v" lines
//! default lower bound, #non-default, "i v" lines  (unless all binary)
//! default upper bound, #non-default, "i v" lines  (unless all binary)
//! default variable type, #non-default, "i t" lines (mixed types only)
//! ... starting point, duals and names, which are ignored
//! ```
//!
//! The objective convention is `½ xᵀQx + bᵀx + q0`, the same as the native
//! one, so listed off-diagonal entries land on both `Q_ij` and `Q_ji`.

use super::{ModelError, Objective, Problem, QuadraticObjective};

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Self { lines, pos: 0 }
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), ModelError> {
        let (no, line) = *self
            .lines
            .get(self.pos)
            .ok_or_else(|| ModelError::Schema(format!("unexpected end of file reading {what}")))?;
        self.pos += 1;
        Ok((no, line.split_whitespace().collect()))
    }

    fn word(&mut self, what: &str) -> Result<String, ModelError> {
        let (_, toks) = self.next(what)?;
        Ok(toks.first().copied().unwrap_or_default().to_string())
    }

    fn count(&mut self, what: &str) -> Result<usize, ModelError> {
        let (no, toks) = self.next(what)?;
        toks.first()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| ModelError::Schema(format!("line {no}: expected {what}")))
    }

    fn real(&mut self, what: &str) -> Result<f64, ModelError> {
        let (no, toks) = self.next(what)?;
        toks.first()
            .and_then(|t| parse_real(t))
            .ok_or_else(|| ModelError::Schema(format!("line {no}: expected {what}")))
    }

    /// `count` lines of `arity` 1-based indices followed by a value.
    fn entries(&mut self, arity: usize, what: &str) -> Result<Vec<(Vec<usize>, f64)>, ModelError> {
        let count = self.count(what)?;
        (0..count)
            .map(|_| {
                let (no, toks) = self.next(what)?;
                let err = || ModelError::Schema(format!("line {no}: malformed {what} entry"));
                if toks.len() < arity + 1 {
                    return Err(err());
                }
                let idx = toks[..arity]
                    .iter()
                    .map(|t| t.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(err)?;
                let v = parse_real(toks[arity]).ok_or_else(err)?;
                Ok((idx, v))
            })
            .collect()
    }

    /// Default value plus sparse overrides, expanded to a dense vector.
    fn defaulted_vector(&mut self, len: usize, what: &str) -> Result<Vec<f64>, ModelError> {
        let default = self.real(what)?;
        let mut out = vec![default; len];
        for (idx, v) in self.entries(1, what)? {
            *out.get_mut(idx[0]).ok_or_else(|| {
                ModelError::Schema(format!("{what}: index {} out of range", idx[0] + 1))
            })? = v;
        }
        Ok(out)
    }
}

fn parse_real(t: &str) -> Option<f64> {
    t.replace(['d', 'D'], "e").parse().ok()
}

fn as_integer(v: f64, what: impl Fn() -> String) -> Result<i64, ModelError> {
    if v.fract() != 0.0 || v.abs() > 9.0e15 {
        return Err(ModelError::UnsupportedFeature(format!(
            "non-integer {}: {v}",
            what()
        )));
    }
    Ok(v as i64)
}

/// Import a QPLIB instance that fits `min f(x), Ax = b, l <= x <= u, x ∈ Z^n`.
pub fn import_qplib(text: &str) -> Result<Problem, ModelError> {
    let mut r = Lines::new(text);
    let name = r.word("name")?;
    let code = r.word("problem type")?.to_ascii_uppercase();
    let code: Vec<char> = code.chars().collect();
    if code.len() != 3 {
        return Err(ModelError::Schema(format!("bad problem type {code:?}")));
    }
    let (obj_kind, var_kind, con_kind) = (code[0], code[1], code[2]);
    match con_kind {
        'L' => {}
        'N' | 'B' => {
            return Err(ModelError::UnsupportedFeature(
                "no linear equality constraints".into(),
            ))
        }
        _ => return Err(ModelError::UnsupportedFeature("quadratic constraints".into())),
    }
    match var_kind {
        'B' | 'I' | 'M' | 'G' => {}
        'C' => return Err(ModelError::UnsupportedFeature("continuous variables".into())),
        other => return Err(ModelError::Schema(format!("unknown variable type {other}"))),
    }

    let sense = r.word("objective sense")?.to_ascii_lowercase();
    let maximize = match sense.as_str() {
        "minimize" => false,
        "maximize" => true,
        other => return Err(ModelError::Schema(format!("unknown sense {other:?}"))),
    };
    let n = r.count("number of variables")?;
    let m = r.count("number of constraints")?;
    if n == 0 || m == 0 {
        return Err(ModelError::Dimension(format!("n = {n}, m = {m}")));
    }

    let mut q = vec![vec![0.0; n]; n];
    if obj_kind != 'L' {
        for (idx, v) in r.entries(2, "objective quadratic term")? {
            let (i, j) = (idx[0], idx[1]);
            if i >= n || j >= n {
                return Err(ModelError::Schema(format!(
                    "objective term ({}, {}) out of range",
                    i + 1,
                    j + 1
                )));
            }
            q[i][j] += v;
            if i != j {
                q[j][i] += v;
            }
        }
    }
    let mut c = r.defaulted_vector(n, "objective linear coefficient")?;
    let mut c0 = r.real("objective constant")?;

    let mut a = vec![vec![0i64; n]; m];
    for (idx, v) in r.entries(2, "constraint linear term")? {
        let (i, j) = (idx[0], idx[1]);
        if i >= m || j >= n {
            return Err(ModelError::Schema(format!(
                "constraint term ({}, {}) out of range",
                i + 1,
                j + 1
            )));
        }
        a[i][j] += as_integer(v, || format!("constraint coefficient ({}, {})", i + 1, j + 1))?;
    }

    let infinity = r.real("infinity")?.abs();
    let lhs = r.defaulted_vector(m, "constraint left-hand side")?;
    let rhs = r.defaulted_vector(m, "constraint right-hand side")?;
    let mut b = Vec::with_capacity(m);
    for (i, (&lo, &hi)) in lhs.iter().zip(&rhs).enumerate() {
        if lo != hi || lo.abs() >= infinity {
            return Err(ModelError::UnsupportedFeature(format!(
                "inequality row {} ({lo} <= a·x <= {hi})",
                i + 1
            )));
        }
        b.push(as_integer(lo, || format!("right-hand side of row {}", i + 1))?);
    }

    let (mut lower, mut upper) = if var_kind == 'B' {
        (vec![0.0; n], vec![1.0; n])
    } else {
        (
            r.defaulted_vector(n, "variable lower bound")?,
            r.defaulted_vector(n, "variable upper bound")?,
        )
    };
    if matches!(var_kind, 'M' | 'G') {
        let types = r.defaulted_vector(n, "variable type")?;
        for (j, &t) in types.iter().enumerate() {
            match t as i64 {
                0 => {
                    return Err(ModelError::UnsupportedFeature(format!(
                        "continuous variable {}",
                        j + 1
                    )))
                }
                2 => {
                    lower[j] = lower[j].max(0.0);
                    upper[j] = upper[j].min(1.0);
                }
                _ => {}
            }
        }
    }
    let mut l = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    for j in 0..n {
        if lower[j].abs() >= infinity || upper[j].abs() >= infinity {
            return Err(ModelError::UnsupportedFeature(format!(
                "unbounded variable {}",
                j + 1
            )));
        }
        l.push(lower[j].ceil() as i64);
        u.push(upper[j].floor() as i64);
    }

    let mut name = name;
    if maximize {
        for row in q.iter_mut() {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        for v in c.iter_mut() {
            *v = -*v;
        }
        c0 = -c0;
        name.push_str(" (maximize, negated)");
    }
    let objective = Objective::Quadratic(QuadraticObjective::new(q, c, c0)?);
    Problem::new(name, a, b, l, u, objective)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two binary assignment rows over four variables.
    const SMALL: &str = "\
TOY_01 # name
QBL # problem type
minimize # sense
4 # variables
2 # constraints
3 # quadratic terms in objective
1 1 2.0
2 1 -1.0
4 3 0.5
0.0 # default linear coefficient
1 # non-default linear coefficients
3 1.5
7.0 # objective constant
4 # linear constraint terms
1 1 1.0
1 2 1.0
2 3 1.0
2 4 1.0
1.0E+30 # infinity
1.0 # default lhs
0 # non-default lhs
1.0 # default rhs
0 # non-default rhs
0.0 # start
0
0
";

    #[test]
    fn imports_small_binary_instance() {
        let p = import_qplib(SMALL).unwrap();
        assert_eq!((p.n(), p.m()), (4, 2));
        assert_eq!(p.a_rows(), &[vec![1, 1, 0, 0], vec![0, 0, 1, 1]]);
        assert_eq!(p.b(), &[1, 1]);
        assert_eq!(p.lower(), &[0; 4]);
        assert_eq!(p.upper(), &[1; 4]);
        // ½·2·x1² − x1x2 + 0.5·x3x4 + 1.5·x3 + 7
        assert_eq!(p.eval(&[1, 0, 1, 0]), 1.0 + 1.5 + 7.0);
        assert_eq!(p.eval(&[1, 1, 1, 1]), 1.0 - 1.0 + 0.5 + 1.5 + 7.0);
    }

    #[test]
    fn maximization_is_negated() {
        let text = SMALL.replace("minimize", "maximize");
        let p = import_qplib(&text).unwrap();
        assert!(p.name().contains("maximize"));
        assert_eq!(p.eval(&[1, 0, 1, 0]), -(1.0 + 1.5 + 7.0));
    }

    #[test]
    fn inequality_row_rejected() {
        let text = SMALL.replace("1.0 # default rhs", "2.0 # default rhs");
        match import_qplib(&text) {
            Err(ModelError::UnsupportedFeature(msg)) => assert!(msg.contains("inequality row 1")),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn other_features_rejected() {
        for (from, to, needle) in [
            ("QBL", "QCL", "continuous"),
            ("QBL", "QBQ", "quadratic constraints"),
            ("QBL", "QBN", "equality"),
        ] {
            match import_qplib(&SMALL.replace(from, to)) {
                Err(ModelError::UnsupportedFeature(msg)) => assert!(msg.contains(needle), "{msg}"),
                other => panic!("expected rejection, got {other:?}"),
            }
        }
    }

    #[test]
    fn general_integer_with_bounds() {
        let text = "\
INT_01
LIL
minimize
3
1
0.0
3
1 1.0
2 2.0
3 3.0
0.0
3
1 1 1
1 2 1
1 3 1
1e30
5
0
5
0
0.0
0
4.0
1
3 2.0
";
        let p = import_qplib(text).unwrap();
        assert_eq!(p.upper(), &[4, 4, 2]);
        assert_eq!(p.b(), &[5]);
        assert_eq!(p.eval(&[1, 2, 2]), 1.0 + 4.0 + 6.0);
    }

    #[test]
    fn truncated_file_is_schema_error() {
        let text: String = SMALL.lines().take(9).collect::<Vec<_>>().join("\n");
        assert!(matches!(import_qplib(&text), Err(ModelError::Schema(_))));
    }
}
