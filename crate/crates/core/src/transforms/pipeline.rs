use super::{
    assemble_putback, desugar, extract_atoms, split_occurrences, ExtractionResult, PutbackGroup,
    TransformError,
};
use crate::deps::{Dependency, Registry};
use crate::syntax::{
    check_positive_classical, free_vars, free_vars_classical, require_first_order, to_prenex,
    Classical, Formula, FormulaError, FreshGen,
};

/// Every stage of the rewrite, for display.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub desugared: Formula,
    pub extraction: ExtractionResult,
    pub translated: Classical,
    pub split: Classical,
    pub prenex: Classical,
    pub groups: Vec<PutbackGroup>,
    pub sentence: Formula,
}

/// The translation step for residues that are already first-order.
pub fn identity_translation(f: &Formula) -> Result<Classical, String> {
    require_first_order(f).map_err(|e| e.to_string())
}

/// Eliminate a family of non-target dependencies from a sentence while
/// keeping the downwards closed `targets`: extract the target atoms into
/// fresh relation symbols, translate the residue to first-order logic with
/// `translate`, split each symbol into single occurrences, prenex, and
/// encode the symbols back into the team.
pub fn safety_pipeline(
    phi: &Formula,
    targets: &[Dependency],
    registry: &Registry,
    translate: &dyn Fn(&Formula) -> Result<Classical, String>,
) -> Result<Pipeline, TransformError> {
    let free = free_vars(phi);
    if !free.is_empty() {
        return Err(TransformError::NotASentence(
            free.iter().map(|v| v.as_str().to_string()).collect(),
        ));
    }
    let desugared = desugar(phi);
    let extraction = extract_atoms(&desugared, targets, registry)?;
    let translated = translate(&extraction.formula).map_err(TransformError::Translation)?;
    let stray = free_vars_classical(&translated);
    if !stray.is_empty() {
        return Err(TransformError::TranslationOutput(FormulaError::NotASentence(
            stray.into_iter().collect(),
        )));
    }
    for b in &extraction.bindings {
        if !check_positive_classical(&translated, &b.symbol) {
            return Err(TransformError::TranslationOutput(
                FormulaError::NegativeOccurrence(b.symbol.clone()),
            ));
        }
    }
    let mut fresh = FreshGen::new();
    fresh.reserve_formula(&desugared).reserve_classical(&translated);
    let mut split = translated.clone();
    let mut targets_split = Vec::new();
    for b in &extraction.bindings {
        let (next, ws) = split_occurrences(&split, &b.symbol, &mut fresh)?;
        split = next;
        targets_split.push((b.dep.clone(), ws));
    }
    let prenex = to_prenex(&split);
    let (sentence, groups) = assemble_putback(&prenex, &targets_split)?;
    Ok(Pipeline {
        desugared,
        extraction,
        translated,
        split,
        prenex,
        groups,
        sentence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{sentence_true, EvalConfig};
    use crate::model::{Elem, Overlay, Relation};
    use crate::syntax::{dep_atoms, parse_formula};

    fn check_equivalent(text: &str) {
        let reg = Registry::standard();
        let phi = parse_formula(text).unwrap();
        let p = safety_pipeline(&phi, &[Dependency::constancy(1)], &reg, &identity_translation).unwrap();
        assert!(dep_atoms(&p.sentence).iter().all(|a| &*a.name == "const"));
        for n in 1..=2u8 {
            let u: Vec<Elem> = (0..n).collect();
            for pmask in 0..1u32 << n {
                let pr = Relation::unary(u.iter().copied().filter(|e| pmask >> e & 1 == 1));
                let m = Overlay::bare(&u).with("P", pr);
                assert_eq!(
                    sentence_true(&m, &reg, &phi, &EvalConfig::fast()).unwrap(),
                    sentence_true(&m, &reg, &p.sentence, &EvalConfig::fast()).unwrap(),
                    "{text} at |M|={n} pmask={pmask}"
                );
            }
        }
    }

    #[test]
    fn constancy_under_universal() {
        check_equivalent("A x (#const(x) | x = x)");
        check_equivalent("E x (P(x) & A y (#const(y) | P(y)))");
        check_equivalent("A x E y (#const(y) & x != y)");
    }

    #[test]
    fn no_targets_returns_the_formula() {
        let phi = parse_formula("A x (P(x) | E y x != y)").unwrap();
        let p = safety_pipeline(&phi, &[Dependency::constancy(1)], &Registry::standard(), &identity_translation)
            .unwrap();
        assert!(p.groups.is_empty());
        assert_eq!(p.sentence, crate::syntax::classical_to_nnf(&to_prenex(&p.translated)));
    }

    #[test]
    fn rejects_open_formulas_and_bad_translations() {
        let reg = Registry::standard();
        let c = [Dependency::constancy(1)];
        let open = parse_formula("#const(x)").unwrap();
        assert!(matches!(
            safety_pipeline(&open, &c, &reg, &identity_translation),
            Err(TransformError::NotASentence(_))
        ));
        let phi = parse_formula("E x #const(x)").unwrap();
        let negating = |_: &Formula| Ok(crate::syntax::parse_classical("E x ~_S(x)").unwrap());
        assert!(matches!(
            safety_pipeline(&phi, &c, &reg, &negating),
            Err(TransformError::TranslationOutput(_))
        ));
        let residue = parse_formula("E x E y (#const(x) & #incl(x;y))").unwrap();
        assert!(matches!(
            safety_pipeline(&residue, &c, &reg, &identity_translation),
            Err(TransformError::Translation(_))
        ));
    }
}
