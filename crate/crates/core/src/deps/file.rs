use super::{DepError, Dependency};
use crate::syntax::parse_classical;

/// Parse dependency definitions:
///
/// ```text
/// dep ne 1
/// formula E x R(x)
/// end
/// ```
///
/// The sentence may continue over several lines before `end`. `%` starts a
/// comment.
pub fn parse_dep_file(text: &str) -> Result<Vec<Dependency>, DepError> {
    let mut out = Vec::new();
    let mut current: Option<(usize, String, usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| DepError::Format { line: line_no, msg };
        let mut words = line.split_whitespace();
        let head = words.next().unwrap_or("");
        match (&mut current, head) {
            (None, "dep") => {
                let name = words.next().ok_or_else(|| err("missing name".into()))?;
                if !is_ident(name) {
                    return Err(err(format!("invalid dependency name {name}")));
                }
                let k = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| err("missing arity".into()))?;
                if words.next().is_some() {
                    return Err(err("trailing input after arity".into()));
                }
                current = Some((line_no, name.to_string(), k, String::new()));
            }
            (None, _) => return Err(err(format!("expected `dep`, found `{head}`"))),
            (Some((start, name, k, body)), "end") => {
                if body.trim().is_empty() {
                    return Err(err(format!("dependency {name} has no formula")));
                }
                let phi = parse_classical(body).map_err(|e| DepError::Format {
                    line: *start,
                    msg: format!("{name}: {e}"),
                })?;
                let d = Dependency::fo(name, phi, *k).map_err(|e| DepError::Format {
                    line: *start,
                    msg: e.to_string(),
                })?;
                if out.iter().any(|o: &Dependency| o.name() == d.name()) {
                    return Err(DepError::Duplicate(d.name().to_string()));
                }
                out.push(d);
                current = None;
            }
            (Some((_, _, _, body)), "formula") if body.is_empty() => {
                let rest = line["formula".len()..].trim();
                body.push_str(rest);
                body.push(' ');
            }
            (Some((_, _, _, body)), _) if !body.is_empty() => {
                body.push_str(line);
                body.push('\n');
            }
            (Some(_), _) => return Err(err("expected `formula`".into())),
        }
    }
    if let Some((start, name, ..)) = current {
        return Err(DepError::Format {
            line: start,
            msg: format!("dependency {name} is missing `end`"),
        });
    }
    Ok(out)
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}
