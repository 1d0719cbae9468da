//! Line-oriented text formats for structures and teams.
//!
//! ```text
//! domain a b c
//! rel R 2
//!   a b
//!   b c
//! end
//! pred P: a b
//! ```
//!
//! A team file is `team x y`, one row of element names per line, then `end`.
//! A zero-variable team is `team` followed by `eps` for `{ε}` or by nothing
//! for the empty team. Blank lines and `%` comments are ignored.

use std::fmt::Write as _;

use super::{Elem, ModelError, Relation, Structure, Team, Var};

fn syntax(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Non-blank lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('%').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn lookup(m: &Structure, line: usize, name: &str) -> Result<Elem, ModelError> {
    m.elem(name)
        .ok_or_else(|| syntax(line, format!("unknown element `{name}`")))
}

pub fn parse_model(text: &str) -> Result<Structure, ModelError> {
    let mut it = lines(text);
    let (line, first) = it.next().ok_or_else(|| syntax(1, "missing `domain` line"))?;
    let mut words = first.split_whitespace();
    if words.next() != Some("domain") {
        return Err(syntax(line, "expected `domain`"));
    }
    let names: Vec<String> = words.map(str::to_string).collect();
    let mut m = Structure::new(names).map_err(|e| syntax(line, e.to_string()))?;

    while let Some((line, l)) = it.next() {
        let mut words = l.split_whitespace();
        match words.next() {
            Some("rel") => {
                let sym = words.next().ok_or_else(|| syntax(line, "missing symbol"))?;
                let arity: usize = words
                    .next()
                    .and_then(|a| a.parse().ok())
                    .ok_or_else(|| syntax(line, "missing or bad arity"))?;
                if words.next().is_some() {
                    return Err(syntax(line, "trailing input after arity"));
                }
                let mut rel = Relation::empty(arity);
                let mut closed = false;
                for (tl, t) in it.by_ref() {
                    if t == "end" {
                        closed = true;
                        break;
                    }
                    let tuple = t
                        .split_whitespace()
                        .map(|n| lookup(&m, tl, n))
                        .collect::<Result<Vec<_>, _>>()?;
                    rel.insert(tuple).map_err(|e| syntax(tl, e.to_string()))?;
                }
                if !closed {
                    return Err(syntax(line, format!("relation `{sym}` is missing `end`")));
                }
                m.add_relation(sym, rel).map_err(|e| syntax(line, e.to_string()))?;
            }
            Some("pred") => {
                let rest = l["pred".len()..].trim();
                let (sym, elems) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax(line, "expected `pred P: a b`"))?;
                let sym = sym.trim();
                if sym.is_empty() || sym.contains(char::is_whitespace) {
                    return Err(syntax(line, "bad predicate symbol"));
                }
                let elems = elems
                    .split_whitespace()
                    .map(|n| lookup(&m, line, n))
                    .collect::<Result<Vec<_>, _>>()?;
                m.add_predicate(sym, elems).map_err(|e| syntax(line, e.to_string()))?;
            }
            Some("domain") => return Err(syntax(line, "second `domain` line")),
            _ => return Err(syntax(line, format!("unexpected `{l}`"))),
        }
    }
    Ok(m)
}

pub fn parse_team(text: &str, m: &Structure) -> Result<Team, ModelError> {
    let mut it = lines(text);
    let (line, first) = it.next().ok_or_else(|| syntax(1, "missing `team` line"))?;
    let mut words = first.split_whitespace();
    if words.next() != Some("team") {
        return Err(syntax(line, "expected `team`"));
    }
    let vs: Vec<Var> = words.map(Var::new).collect();
    let mut rows = Vec::new();
    let mut closed = false;
    let mut trailing = None;
    for (rl, r) in it.by_ref() {
        if r == "end" {
            closed = true;
            break;
        }
        if r == "eps" {
            if !vs.is_empty() {
                return Err(syntax(rl, "`eps` only allowed in a zero-variable team"));
            }
            rows.push(vec![]);
            continue;
        }
        let row = r
            .split_whitespace()
            .map(|n| lookup(m, rl, n))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != vs.len() {
            return Err(syntax(
                rl,
                format!("row has {} values, expected {}", row.len(), vs.len()),
            ));
        }
        rows.push(row);
    }
    if let Some((l, _)) = it.next() {
        trailing = Some(l);
    }
    if let Some(l) = trailing {
        return Err(syntax(l, "input after `end`"));
    }
    // `end` is optional for the zero-variable forms
    if !closed && !vs.is_empty() {
        return Err(syntax(line, "team is missing `end`"));
    }
    Team::new(vs, rows).map_err(|e| syntax(line, e.to_string()))
}

pub fn write_model(m: &Structure) -> String {
    let mut out = String::from("domain");
    for n in m.names() {
        out.push(' ');
        out.push_str(n);
    }
    out.push('\n');
    for (sym, rel) in m.relations() {
        let _ = writeln!(out, "rel {sym} {}", rel.arity());
        for t in rel.tuples() {
            out.push_str("  ");
            out.push_str(&join_names(m, t));
            out.push('\n');
        }
        out.push_str("end\n");
    }
    for (sym, rel) in m.predicates() {
        let elems: Vec<Elem> = rel.tuples().map(|t| t[0]).collect();
        let _ = writeln!(out, "pred {sym}: {}", join_names(m, &elems));
    }
    out
}

pub fn write_team(x: &Team, m: &Structure) -> String {
    let mut out = String::from("team");
    for v in x.vars() {
        out.push(' ');
        out.push_str(v.as_str());
    }
    out.push('\n');
    for r in x.rows() {
        if r.is_empty() {
            out.push_str("eps\n");
        } else {
            out.push_str("  ");
            out.push_str(&join_names(m, r));
            out.push('\n');
        }
    }
    out.push_str("end\n");
    out
}

fn join_names(m: &Structure, t: &[Elem]) -> String {
    t.iter().map(|&e| m.name(e)).collect::<Vec<_>>().join(" ")
}
