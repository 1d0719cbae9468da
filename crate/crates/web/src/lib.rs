use wasm_bindgen::prelude::*;

use teamsem::deps::{classify, Registry};
use teamsem::eval::{Compiled, EvalConfig};
use teamsem::model::{parse_model, parse_team, write_team, Interpretation, Team, Var};
use teamsem::syntax::parse_formula;

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn team_or_unit(text: &str, m: &teamsem::model::Structure) -> Result<Team, JsValue> {
    if text.trim().is_empty() {
        Ok(Team::unit())
    } else {
        parse_team(text, m).map_err(err)
    }
}

/// Evaluate a team formula; returns "true" or "false", or the trace when
/// `trace` is set.
#[wasm_bindgen]
pub fn evaluate(model: &str, team: &str, formula: &str, trace: bool) -> Result<String, JsValue> {
    let m = parse_model(model).map_err(err)?;
    let x = team_or_unit(team, &m)?;
    let f = parse_formula(formula).map_err(err)?;
    let reg = Registry::standard();
    let compiled = Compiled::new(&f, &reg, EvalConfig::fast()).map_err(err)?;
    if trace {
        return Ok(compiled.explain(&m, &x).map_err(err)?.to_string());
    }
    Ok(compiled.eval(&m, &x).map_err(err)?.to_string())
}

/// Closure table of a builtin dependency, one property per line.
#[wasm_bindgen]
pub fn classify_dependency(name: &str, max_domain: usize) -> Result<String, JsValue> {
    let d = Registry::standard().lookup(name).map_err(err)?;
    let mut out = String::new();
    for v in classify(&d, max_domain.clamp(1, 3)).map_err(err)? {
        out.push_str(&format!("{:<13}{}", v.property.name(), if v.holds { "yes" } else { "no" }));
        if let Some(w) = v.witness {
            out.push_str(&format!("  witness {w}"));
        }
        out.push('\n');
    }
    Ok(out)
}

/// `X[M/vs]`: extend every row by every tuple of the universe.
#[wasm_bindgen]
pub fn duplicate(model: &str, team: &str, vars: &str) -> Result<String, JsValue> {
    let m = parse_model(model).map_err(err)?;
    let x = team_or_unit(team, &m)?;
    let vs: Vec<Var> = vars.split_whitespace().map(Var::new).collect();
    let y = x.duplicate(&vs, m.universe()).map_err(err)?;
    Ok(write_team(&y, &m))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MODEL: &str = "domain 0 1\npred P: 1\n";

    #[test]
    fn evaluate_and_duplicate() {
        let team = "team v\n0\n1\nend\n";
        assert_eq!(evaluate(MODEL, team, "#const(v)", false).unwrap(), "false");
        assert_eq!(evaluate(MODEL, "", "E x P(x)", false).unwrap(), "true");
        let out = duplicate(MODEL, team, "w").unwrap();
        assert_eq!(out.lines().filter(|l| l.split_whitespace().count() == 2).count(), 4);
    }

    #[test]
    fn classify_constancy() {
        let t = classify_dependency("const/1", 3).unwrap();
        assert!(t.lines().any(|l| l.starts_with("downwards") && l.contains("yes")));
        assert!(t.lines().any(|l| l.starts_with("union") && l.contains("no")));
    }
}
