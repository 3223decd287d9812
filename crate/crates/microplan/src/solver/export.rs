//! Line-oriented textual dump of a model, for cross-checking with external
//! solvers. Re-parsing a dump reproduces an equivalent model.
//!
//! Format (UTF-8, whitespace-separated tokens, `#` starts a comment line):
//!
//! ```text
//! var <name> <lo> <hi>
//! lin <rel> <const> [<coef>*<name>]...
//! imp <name> <zero|pos> : lin <rel> <const> [<coef>*<name>]...
//! prod <name> <= <name>*<name>[+<offset>]
//! obj <min|max> [<w>*<name>]...
//! ```
//!
//! `<rel>` is one of `<=`, `>=`, `=`. The `obj` line is omitted when the
//! objective has no terms. Lines appear in a stable order: header comments,
//! variables, linear constraints, implications, product bounds, objective.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{
    GuardSense, Implication, LinearConstraint, Model, Objective, ProductBound, Relation, Sense,
    SolverError, VarId,
};

pub fn export_model(model: &Model) -> String {
    let mut out = String::new();
    out.push_str("# integer model export v1\n");
    let _ = writeln!(
        out,
        "# vars {} lin {} imp {} prod {}",
        model.num_vars(),
        model.linear.len(),
        model.implications.len(),
        model.product_bounds.len()
    );
    for def in model.vars() {
        let _ = writeln!(out, "var {} {} {}", def.name, def.lo, def.hi);
    }
    for c in &model.linear {
        let _ = writeln!(out, "lin {}", lin_text(model, c));
    }
    for imp in &model.implications {
        let sense = match imp.sense {
            GuardSense::IsZero => "zero",
            GuardSense::IsPositive => "pos",
        };
        let _ = writeln!(
            out,
            "imp {} {} : lin {}",
            model.var(imp.guard).name,
            sense,
            lin_text(model, &imp.consequence)
        );
    }
    for p in &model.product_bounds {
        let offset = if p.offset == 0 {
            String::new()
        } else {
            format!("+{}", p.offset)
        };
        let _ = writeln!(
            out,
            "prod {} <= {}*{}{}",
            model.var(p.bounded).name,
            model.var(p.factor_a).name,
            model.var(p.factor_b).name,
            offset
        );
    }
    if !model.objective.terms.is_empty() {
        let sense = match model.objective.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        let mut line = format!("obj {sense}");
        for (w, v) in &model.objective.terms {
            let _ = write!(line, " {}*{}", w, model.var(*v).name);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn lin_text(model: &Model, c: &LinearConstraint) -> String {
    let mut s = format!("{} {}", c.relation.symbol(), c.constant);
    for (coef, var) in &c.terms {
        let _ = write!(s, " {}*{}", coef, model.var(*var).name);
    }
    s
}

/// Parses a dump produced by [`export_model`].
pub fn parse_model(text: &str) -> Result<Model, SolverError> {
    let mut model = Model::new();
    let mut names: BTreeMap<String, VarId> = BTreeMap::new();

    let err = |line: usize, message: &str| SolverError::Parse {
        line,
        message: message.to_string(),
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "var" => {
                if tokens.len() != 4 {
                    return Err(err(line_no, "expected: var <name> <lo> <hi>"));
                }
                let lo = tokens[2]
                    .parse()
                    .map_err(|_| err(line_no, "bad lower bound"))?;
                let hi = tokens[3]
                    .parse()
                    .map_err(|_| err(line_no, "bad upper bound"))?;
                let id = model.add_var(tokens[1], lo, hi);
                if names.insert(tokens[1].to_string(), id).is_some() {
                    return Err(err(line_no, "duplicate variable name"));
                }
            }
            "lin" => {
                let c = parse_lin(&tokens[1..], &names, line_no)?;
                model.add_linear(c);
            }
            "imp" => {
                // imp <name> <zero|pos> : lin <rel> <const> terms...
                if tokens.len() < 6 || tokens[3] != ":" || tokens[4] != "lin" {
                    return Err(err(line_no, "expected: imp <name> <zero|pos> : lin ..."));
                }
                let guard = *names
                    .get(tokens[1])
                    .ok_or_else(|| err(line_no, "unknown guard variable"))?;
                let sense = match tokens[2] {
                    "zero" => GuardSense::IsZero,
                    "pos" => GuardSense::IsPositive,
                    _ => return Err(err(line_no, "guard sense must be zero or pos")),
                };
                let consequence = parse_lin(&tokens[5..], &names, line_no)?;
                model.add_implication(Implication {
                    guard,
                    sense,
                    consequence,
                });
            }
            "prod" => {
                // prod <name> <= <name>*<name>[+<offset>]
                if tokens.len() != 4 || tokens[2] != "<=" {
                    return Err(err(line_no, "expected: prod <name> <= <name>*<name>[+<off>]"));
                }
                let bounded = *names
                    .get(tokens[1])
                    .ok_or_else(|| err(line_no, "unknown variable"))?;
                let (factors, offset) = match tokens[3].split_once('+') {
                    Some((f, off)) => (
                        f,
                        off.parse::<i64>().map_err(|_| err(line_no, "bad offset"))?,
                    ),
                    None => (tokens[3], 0),
                };
                let (a, b) = factors
                    .split_once('*')
                    .ok_or_else(|| err(line_no, "expected <name>*<name>"))?;
                let factor_a = *names.get(a).ok_or_else(|| err(line_no, "unknown factor"))?;
                let factor_b = *names.get(b).ok_or_else(|| err(line_no, "unknown factor"))?;
                model.add_product_bound(ProductBound {
                    bounded,
                    factor_a,
                    factor_b,
                    offset,
                });
            }
            "obj" => {
                if tokens.len() < 2 {
                    return Err(err(line_no, "expected: obj <min|max> terms..."));
                }
                let sense = match tokens[1] {
                    "min" => Sense::Minimize,
                    "max" => Sense::Maximize,
                    _ => return Err(err(line_no, "objective sense must be min or max")),
                };
                let terms = parse_terms(&tokens[2..], &names, line_no)?;
                model.set_objective(Objective { sense, terms });
            }
            other => {
                return Err(SolverError::Parse {
                    line: line_no,
                    message: format!("unknown directive {other:?}"),
                });
            }
        }
    }
    model.validate()?;
    Ok(model)
}

fn parse_lin(
    tokens: &[&str],
    names: &BTreeMap<String, VarId>,
    line_no: usize,
) -> Result<LinearConstraint, SolverError> {
    let err = |message: &str| SolverError::Parse {
        line: line_no,
        message: message.to_string(),
    };
    if tokens.len() < 2 {
        return Err(err("expected: <rel> <const> terms..."));
    }
    let relation = match tokens[0] {
        "<=" => Relation::Le,
        ">=" => Relation::Ge,
        "=" => Relation::Eq,
        _ => return Err(err("relation must be <=, >= or =")),
    };
    let constant = tokens[1].parse().map_err(|_| err("bad constant"))?;
    let terms = parse_terms(&tokens[2..], names, line_no)?;
    Ok(LinearConstraint::new(terms, relation, constant))
}

fn parse_terms(
    tokens: &[&str],
    names: &BTreeMap<String, VarId>,
    line_no: usize,
) -> Result<Vec<(i64, VarId)>, SolverError> {
    let err = |message: String| SolverError::Parse {
        line: line_no,
        message,
    };
    let mut terms = Vec::with_capacity(tokens.len());
    for token in tokens {
        let (coef, name) = token
            .split_once('*')
            .ok_or_else(|| err(format!("expected <coef>*<name>, got {token:?}")))?;
        let coef = coef
            .parse()
            .map_err(|_| err(format!("bad coefficient in {token:?}")))?;
        let var = *names
            .get(name)
            .ok_or_else(|| err(format!("unknown variable {name:?}")))?;
        terms.push((coef, var));
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn empty_model_exports_header_only() {
        let text = export_model(&Model::new());
        assert!(text.lines().all(|l| l.starts_with('#')));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn small_model_line_counts() {
        let mut m = Model::new();
        let x = m.add_var("x", 0, 2);
        let y = m.add_var("y", 0, 2);
        m.add_linear(LinearConstraint::new(vec![(1, x), (1, y)], Relation::Ge, 3));
        m.set_objective(Objective {
            sense: Sense::Minimize,
            terms: vec![(2, x), (1, y)],
        });
        let text = export_model(&m);
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body.len(), 4); // 2 vars, 1 constraint, 1 objective
        assert_eq!(body[0], "var x 0 2");
        assert_eq!(body[2], "lin >= 3 1*x 1*y");
        assert_eq!(body[3], "obj min 2*x 1*y");
    }

    #[test]
    fn round_trip_reproduces_the_model() {
        let mut m = Model::new();
        let b = m.add_var("bind(p,A,B)", 0, 9);
        let x = m.add_var("inst(A)", 0, 3);
        let y = m.add_var("inst(B)", 0, 3);
        let u = m.add_var("used(n#1)", 0, 1);
        m.add_linear(LinearConstraint::new(vec![(2, x), (-1, b)], Relation::Le, 0));
        m.add_implication(Implication {
            guard: u,
            sense: GuardSense::IsZero,
            consequence: LinearConstraint::new(vec![(1, x), (1, y)], Relation::Le, 0),
        });
        m.add_product_bound(ProductBound {
            bounded: b,
            factor_a: x,
            factor_b: y,
            offset: 0,
        });
        m.add_product_bound(ProductBound {
            bounded: b,
            factor_a: x,
            factor_b: x,
            offset: -1,
        });
        m.set_objective(Objective {
            sense: Sense::Maximize,
            terms: vec![(7, u)],
        });

        let text = export_model(&m);
        let parsed = parse_model(&text).unwrap();
        assert_eq!(parsed, m);
        assert_eq!(export_model(&parsed), text);
    }

    #[test]
    fn parse_rejects_unknown_variables() {
        let text = "var x 0 1\nlin <= 1 1*ghost\n";
        assert!(matches!(
            parse_model(text),
            Err(SolverError::Parse { line: 2, .. })
        ));
    }
}
