//! Browser bindings: direct specialisation, the compiler generator and the
//! binding-time analysis, each taking and returning program text.

use wasm_bindgen::prelude::*;

use pdgen::annotations::parse_annotated;
use pdgen::bta::Norm;
use pdgen::term::{parse_program, parse_term, Term};

fn goals(text: &str) -> Result<Vec<Term>, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            parse_term(l.trim_end_matches('.'))
                .map(|r| r.term)
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// Specialises an annotated program for the goals, one per line.
pub fn lix_text(source: &str, goal_lines: &str) -> Result<String, String> {
    let p = parse_annotated(source).map_err(|e| e.to_string())?;
    let r = pdgen::lix::specialise(&p, &goals(goal_lines)?).map_err(|e| e.to_string())?;
    Ok(r.render())
}

/// The generating extension of an annotated program.
pub fn cogen_text(source: &str) -> Result<String, String> {
    let p = parse_annotated(source).map_err(|e| e.to_string())?;
    let g = pdgen::logen::build_genex(&p).map_err(|e| e.to_string())?;
    Ok(g.render())
}

/// Annotates a plain program for a goal under the named norm.
pub fn bta_text(source: &str, goal: &str, norm: &str) -> Result<String, String> {
    let p = parse_program(source).map_err(|e| e.to_string())?;
    let norm: Norm = norm
        .parse()
        .map_err(|e: pdgen::bta::UnknownNorm| e.to_string())?;
    let g = goals(goal)?.into_iter().next().ok_or("no goal given")?;
    let r = pdgen::bta::bta(&p, &g, norm).map_err(|e| e.to_string())?;
    Ok(format!(
        "% {} round(s), callset {}\n{}",
        r.rounds,
        r.callset.render(),
        r.annotated_program().render()
    ))
}

#[wasm_bindgen]
pub fn specialise(source: &str, goals: &str) -> Result<String, JsError> {
    lix_text(source, goals).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cogen(source: &str) -> Result<String, JsError> {
    cogen_text(source).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn analyse(source: &str, goal: &str, norm: &str) -> Result<String, JsError> {
    bta_text(source, goal, norm).map_err(|e| JsError::new(&e))
}

/// Example inputs for the page, as `name\u{1}annotated source\u{1}goal`
/// records separated by `\u{2}`.
#[wasm_bindgen]
pub fn examples() -> String {
    pdgen::fixtures::ALL
        .iter()
        .map(|f| format!("{}\u{1}{}\u{1}{}", f.name, f.source, f.goal))
        .collect::<Vec<_>>()
        .join("\u{2}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parser_round_trip() {
        let f = &pdgen::fixtures::PARSER;
        assert_eq!(
            lix_text(f.source, "nont(c,T,R).\n").unwrap(),
            f.golden.unwrap()
        );
        assert!(cogen_text(f.source).unwrap().contains("nont_m(A,B,C,D)"));
    }

    #[test]
    fn analysis_reports_callset() {
        let out = bta_text(
            pdgen::fixtures::VANILLA_SOLVE,
            "solve([mem(X,Xs)])",
            "listlength",
        )
        .unwrap();
        assert!(out.starts_with("% 2 round(s)"), "{out}");
        assert!(bta_text("p.", "p", "depth").is_err());
    }
}
