//! CPLEX-style LP text: `Minimize` / `Subject To` / `Binary` / `End`.
//!
//! Coefficients are written with the shortest representation that parses
//! back to the same `f64`, so [`parse_lp`] reproduces the model exactly.
//! Long rows are wrapped; continuation lines start with a space.

use std::fmt::Write;

use super::model::{Constraint, Family, IlpModel, Sense, Variable};
use crate::error::{Error, Result};

const TERMS_PER_LINE: usize = 6;

fn number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn write_terms(out: &mut String, model: &IlpModel, terms: &[(usize, f64)]) {
    for (n, &(v, c)) in terms.iter().enumerate() {
        if n > 0 && n % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let sign = if c < 0.0 || (c == 0.0 && c.is_sign_negative()) { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", number(c.abs()), model.variables[v].name);
    }
}

/// Renders `model` as LP text.
pub fn export_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ joint NF caching and offloading\n");
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model, &model.objective);
    let k = model.objective_constant;
    if k != 0.0 || model.objective.is_empty() {
        let _ = write!(out, " {} {}", if k < 0.0 { '-' } else { '+' }, number(k.abs()));
    }
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, model, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense.symbol(), number(c.rhs));
    }
    out.push_str("Binary\n");
    for chunk in model.variables.chunks(8) {
        out.push(' ');
        out.push_str(&chunk.iter().map(|v| v.name.as_str()).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Binary,
    Done,
}

struct Token<'a> {
    text: &'a str,
    line: usize,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::LpParse { line, msg: msg.into() }
}

/// Parses the subset of LP produced by [`export_lp`]: one minimization
/// objective (optionally with a constant), named rows, and a binary section
/// declaring every variable.
pub fn parse_lp(text: &str) -> Result<IlpModel> {
    let mut section = Section::Preamble;
    let mut objective_tokens: Vec<Token> = Vec::new();
    let mut rows: Vec<(String, usize, Vec<Token>)> = Vec::new();
    let mut names: Vec<&str> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('\\').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        match body.to_ascii_lowercase().as_str() {
            "minimize" | "minimise" | "min" => {
                section = Section::Objective;
                continue;
            }
            "subject to" | "st" | "s.t." => {
                section = Section::Constraints;
                continue;
            }
            "binary" | "binaries" | "bin" => {
                section = Section::Binary;
                continue;
            }
            "end" => {
                section = Section::Done;
                continue;
            }
            "maximize" | "maximise" | "max" => return Err(err(line, "only minimization is supported")),
            "bounds" | "general" | "generals" => return Err(err(line, format!("unsupported section '{body}'"))),
            _ => {}
        }
        let tokens = body.split_whitespace().map(|text| Token { text, line });
        match section {
            Section::Preamble => return Err(err(line, "content before the objective section")),
            Section::Done => return Err(err(line, "content after End")),
            Section::Objective => objective_tokens.extend(tokens),
            Section::Constraints => {
                for tok in tokens {
                    if let Some(name) = tok.text.strip_suffix(':') {
                        rows.push((name.to_string(), tok.line, Vec::new()));
                    } else if let Some((_, _, toks)) = rows.last_mut() {
                        toks.push(tok);
                    } else {
                        return Err(err(tok.line, "constraint without a name"));
                    }
                }
            }
            Section::Binary => names.extend(body.split_whitespace()),
        }
    }
    if section != Section::Done {
        return Err(err(text.lines().count(), "missing End"));
    }

    let mut variables = Vec::with_capacity(names.len());
    for name in names {
        variables.push(Variable::from_name(name).ok_or_else(|| err(0, format!("unrecognised variable '{name}'")))?);
    }
    let model = IlpModel::new(variables, Vec::new(), Vec::new(), 0.0);

    let objective_tokens = match objective_tokens.split_first() {
        Some((label, rest)) if label.text.ends_with(':') => rest,
        _ => &objective_tokens[..],
    };
    let (objective, constant, tail) = parse_expr(&model, objective_tokens)?;
    if let Some(t) = tail.first() {
        return Err(err(t.line, format!("unexpected '{}' in objective", t.text)));
    }

    let mut constraints = Vec::with_capacity(rows.len());
    for (name, line, toks) in rows {
        let family = name
            .split('_')
            .next()
            .and_then(|f| f.strip_prefix('C'))
            .and_then(|n| n.parse::<u8>().ok())
            .ok_or_else(|| err(line, format!("row name '{name}' carries no family")))?;
        let (terms, constant, tail) = parse_expr(&model, &toks)?;
        if constant != 0.0 {
            return Err(err(line, "constant on the left-hand side"));
        }
        let [sense, rhs] = tail else {
            return Err(err(line, format!("row '{name}' must end with '<sense> <rhs>'")));
        };
        let sense = match sense.text {
            "<=" | "=<" | "<" => Sense::Le,
            ">=" | "=>" | ">" => Sense::Ge,
            "=" => Sense::Eq,
            other => return Err(err(line, format!("unknown sense '{other}'"))),
        };
        let rhs = rhs.text.parse::<f64>().map_err(|_| err(line, format!("bad right-hand side '{}'", rhs.text)))?;
        constraints.push(Constraint { name, family: Family(family), terms, sense, rhs });
    }

    let IlpModel { variables, .. } = model;
    Ok(IlpModel::new(variables, constraints, objective, constant))
}

/// Reads `[+|-] [coef] var` terms and bare constants until a sense token.
fn parse_expr<'t, 'a>(model: &IlpModel, toks: &'t [Token<'a>]) -> Result<(Vec<(usize, f64)>, f64, &'t [Token<'a>])> {
    let mut terms = Vec::new();
    let mut constant = 0.0;
    let mut i = 0;
    while i < toks.len() {
        let mut sign = 1.0;
        match toks[i].text {
            "+" => i += 1,
            "-" => {
                sign = -1.0;
                i += 1;
            }
            t if ["<=", ">=", "=", "<", ">", "=<", "=>"].contains(&t) => break,
            _ => {}
        }
        let Some(tok) = toks.get(i) else {
            return Err(err(toks[i - 1].line, "dangling sign"));
        };
        if let Ok(c) = tok.text.parse::<f64>() {
            match toks.get(i + 1).and_then(|t| model.var(t.text)) {
                Some(v) => {
                    terms.push((v, sign * c));
                    i += 2;
                }
                None => {
                    constant += sign * c;
                    i += 1;
                }
            }
        } else if let Some(v) = model.var(tok.text) {
            terms.push((v, sign));
            i += 1;
        } else {
            return Err(err(tok.line, format!("unknown token '{}'", tok.text)));
        }
    }
    Ok((terms, constant, &toks[i..]))
}
