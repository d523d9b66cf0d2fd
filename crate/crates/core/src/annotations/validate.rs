use std::fmt;

use indexmap::IndexSet;

use super::{is_propagation_sensitive, is_side_effect, mixline_kind, AnnBody, AnnotatedProgram};
use crate::engine::is_core_builtin;
use crate::term::{atoms, render_term, PredKey, Term};

/// Impurity verdicts for an annotated program.
///
/// A residual side-effect builtin or a residual propagation-sensitive test is
/// impure, and so is any call that reaches one through unfolding or
/// memoisation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Impurity {
    preds: IndexSet<PredKey>,
}

impl Impurity {
    pub fn is_impure(&self, b: &AnnBody) -> bool {
        match b {
            AnnBody::Rescall(g) | AnnBody::Semicall(g) => {
                is_side_effect(g) || is_propagation_sensitive(g)
            }
            AnnBody::Unfold(g) | AnnBody::Memo(g) => {
                g.pred_key().is_some_and(|k| self.preds.contains(&k))
            }
            other => other.children().into_iter().any(|c| self.is_impure(c)),
        }
    }

    pub fn is_impure_predicate(&self, pred: PredKey) -> bool {
        self.preds.contains(&pred)
    }

    pub fn impure_predicates(&self) -> impl Iterator<Item = &PredKey> {
        self.preds.iter()
    }
}

pub fn classify_impure(p: &AnnotatedProgram) -> Impurity {
    let mut imp = Impurity::default();
    loop {
        let mut changed = false;
        for c in &p.clauses {
            if !imp.preds.contains(&c.pred()) && imp.is_impure(&c.body) {
                imp.preds.insert(c.pred());
                changed = true;
            }
        }
        if !changed {
            return imp;
        }
    }
}

/// Does the code a body translates to in the generating extension neither
/// fail nor bind variables seen by the rest of the clause?
///
/// Residual calls, memoised calls and `hide_nf` are hidden; conjunctions,
/// disjunctions and conditionals are hidden when all their parts are.
pub fn hidden(b: &AnnBody) -> bool {
    match b {
        AnnBody::True
        | AnnBody::Rescall(_)
        | AnnBody::Memo(_)
        | AnnBody::Mcall(_)
        | AnnBody::HideNf(_) => true,
        AnnBody::Call(g) => g.is_atom(atoms::TRUE),
        AnnBody::Semicall(g) => mixline_kind(g).is_none(),
        AnnBody::Unfold(_) | AnnBody::Ucall(_) | AnnBody::Not(_) | AnnBody::Hide(_) => false,
        AnnBody::Resnot(a) => hidden(a),
        AnnBody::Conj(..)
        | AnnBody::If(..)
        | AnnBody::Resif(..)
        | AnnBody::Semif(..)
        | AnnBody::Disj(..)
        | AnnBody::Resdisj(..) => b.children().into_iter().all(hidden),
    }
}

/// A body part that may fail or bind variables where that is not allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HideViolation {
    pub clause: i64,
    /// The offending annotated goal.
    pub node: String,
    pub reason: String,
}

impl fmt::Display for HideViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "clause {}: {} {}; wrap it in hide_nf",
            self.clause, self.node, self.reason
        )
    }
}

/// Checks the hide obligations of every clause: after an impure conjunct all
/// later conjuncts must be hidden, and the parts of residual negations,
/// conditionals and disjunctions must be hidden.
pub fn check_hide(p: &AnnotatedProgram) -> Vec<HideViolation> {
    let imp = classify_impure(p);
    let mut out = Vec::new();
    for c in &p.clauses {
        walk(&c.body, c.id, &imp, &mut out);
    }
    out
}

fn violation(clause: i64, b: &AnnBody, reason: String) -> HideViolation {
    HideViolation {
        clause,
        node: render_term(&b.to_term()),
        reason,
    }
}

fn walk(b: &AnnBody, clause: i64, imp: &Impurity, out: &mut Vec<HideViolation>) {
    match b {
        AnnBody::Conj(..) => {
            let parts = b.conjuncts();
            if let Some(first) = parts.iter().position(|k| imp.is_impure(k)) {
                let culprit = render_term(&parts[first].to_term());
                for later in &parts[first + 1..] {
                    if !hidden(later) {
                        out.push(violation(
                            clause,
                            later,
                            format!("follows impure {culprit}"),
                        ));
                    }
                }
            }
            for k in parts {
                walk(k, clause, imp, out);
            }
            return;
        }
        AnnBody::Resnot(a) => require_hidden(a, clause, "inside resnot", out),
        AnnBody::Resif(x, y, z) => {
            for k in [x, y, z] {
                require_hidden(k, clause, "inside resif", out);
            }
        }
        AnnBody::Resdisj(x, y) => {
            for k in [x, y] {
                require_hidden(k, clause, "inside resdisj", out);
            }
        }
        AnnBody::Semif(x, y, z) => {
            if !matches!(**x, AnnBody::Semicall(_)) {
                require_hidden(x, clause, "as semif test", out);
            }
            for k in [y, z] {
                require_hidden(k, clause, "inside semif", out);
            }
        }
        _ => {}
    }
    for k in b.children() {
        walk(k, clause, imp, out);
    }
}

fn require_hidden(b: &AnnBody, clause: i64, place: &str, out: &mut Vec<HideViolation>) {
    if !hidden(b) {
        out.push(violation(
            clause,
            b,
            format!("may fail or bind variables {place}"),
        ));
    }
}

/// Can specialising `b` leave residual code behind? Unfolded calls are
/// followed through `code_preds`; `ucall` targets are unknown and assumed to
/// leave none.
fn leaves_code(b: &AnnBody, code_preds: &IndexSet<PredKey>) -> bool {
    match b {
        AnnBody::True | AnnBody::Call(_) | AnnBody::Ucall(_) => false,
        AnnBody::Unfold(g) => g.pred_key().is_some_and(|k| code_preds.contains(&k)),
        AnnBody::Memo(_)
        | AnnBody::Rescall(_)
        | AnnBody::Semicall(_)
        | AnnBody::Mcall(_)
        | AnnBody::Resif(..)
        | AnnBody::Semif(..)
        | AnnBody::Resnot(_)
        | AnnBody::Resdisj(..)
        | AnnBody::Hide(_)
        | AnnBody::HideNf(_) => true,
        // A reducible negation never emits code itself.
        AnnBody::Not(_) => false,
        AnnBody::Conj(..) | AnnBody::Disj(..) => {
            b.children().into_iter().any(|c| leaves_code(c, code_preds))
        }
        AnnBody::If(_, t, e) => leaves_code(t, code_preds) || leaves_code(e, code_preds),
    }
}

/// Ids of clauses containing a reducible negation whose argument may leave
/// residual code. Such a negation cannot be decided at specialisation time.
pub fn residual_negations(p: &AnnotatedProgram) -> Vec<i64> {
    let mut code_preds: IndexSet<PredKey> = IndexSet::new();
    loop {
        let mut changed = false;
        for c in &p.clauses {
            if !code_preds.contains(&c.pred()) && leaves_code(&c.body, &code_preds) {
                code_preds.insert(c.pred());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = Vec::new();
    for c in &p.clauses {
        let mut stack = vec![&c.body];
        while let Some(b) = stack.pop() {
            if let AnnBody::Not(inner) = b {
                if leaves_code(inner, &code_preds) && !out.contains(&c.id) {
                    out.push(c.id);
                }
            }
            stack.extend(b.children());
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

/// One validation message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub clause: Option<i64>,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        match self.clause {
            Some(id) => write!(f, "{level}: clause {id}: {}", self.message),
            None => write!(f, "{level}: {}", self.message),
        }
    }
}

/// All static checks: division well-formedness, annotation targets, and the
/// hide obligations.
pub fn check_program(p: &AnnotatedProgram) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut push = |severity, clause, message: String| {
        out.push(Finding {
            severity,
            clause,
            message,
        })
    };

    for (pred, types) in p.division.iter() {
        for t in types {
            if let Err(e) = p.types.check(t) {
                push(Severity::Error, None, format!("division for {pred}: {e}"));
            }
        }
        if !p.defines(*pred) {
            push(
                Severity::Warning,
                None,
                format!("division given for {pred}, which has no clauses"),
            );
        }
    }
    for r in &p.residual {
        if !p.division.contains(*r) {
            push(
                Severity::Error,
                None,
                format!("residual predicate {r} has no division entry"),
            );
        }
        if !p.defines(*r) {
            push(
                Severity::Error,
                None,
                format!("residual predicate {r} has no clauses"),
            );
        }
    }

    for c in &p.clauses {
        let id = Some(c.id);
        for leaf in c.body.leaves() {
            let goal_text = || render_term(&leaf.to_term());
            match leaf {
                AnnBody::Memo(g) | AnnBody::Unfold(g) => {
                    let Some(k) = g.pred_key() else {
                        push(
                            Severity::Error,
                            id,
                            format!("{} calls a non-callable term", goal_text()),
                        );
                        continue;
                    };
                    if !p.defines(k) {
                        push(
                            Severity::Error,
                            id,
                            format!("{}: {k} has no annotated clauses", goal_text()),
                        );
                    }
                    if matches!(leaf, AnnBody::Memo(_)) && !p.division.contains(k) {
                        push(
                            Severity::Error,
                            id,
                            format!("{}: memoised {k} has no division entry", goal_text()),
                        );
                    }
                }
                AnnBody::Call(g) => {
                    if !builtin(g) {
                        push(
                            Severity::Error,
                            id,
                            format!(
                                "{}: only builtins can be executed at specialisation time",
                                goal_text()
                            ),
                        );
                    } else if is_side_effect(g) {
                        push(
                            Severity::Warning,
                            id,
                            format!(
                                "{}: side effect happens at specialisation time",
                                goal_text()
                            ),
                        );
                    }
                }
                AnnBody::Rescall(g) => {
                    if !builtin(g) {
                        push(
                            Severity::Warning,
                            id,
                            format!(
                                "{}: not a builtin, kept as a call to an open predicate",
                                goal_text()
                            ),
                        );
                    }
                }
                AnnBody::Semicall(g) if mixline_kind(g).is_none() => {
                    push(
                            Severity::Error,
                            id,
                            format!("{}: semicall needs var, copy_term, \\==, ground, nonvar, atom, integer or ==", goal_text()),
                        );
                }
                _ => {}
            }
        }
    }
    for id in residual_negations(p) {
        push_finding(
            &mut out,
            Severity::Error,
            Some(id),
            "reducible not may leave residual code; use resnot".to_string(),
        );
    }
    for v in check_hide(p) {
        out.push(Finding {
            severity: Severity::Error,
            clause: Some(v.clause),
            message: format!("{} {}; wrap it in hide_nf", v.node, v.reason),
        });
    }
    out
}

fn push_finding(out: &mut Vec<Finding>, severity: Severity, clause: Option<i64>, message: String) {
    out.push(Finding {
        severity,
        clause,
        message,
    });
}

fn builtin(g: &Term) -> bool {
    g.pred_key().is_some_and(is_core_builtin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotations::parse_annotated;

    const HIDE: &str = "residual(p(_)).
filter(p(X),[dynamic]).
ann_clause(1,p(X),(rescall(print(X)),hide_nf(unfold(q(X))))).
ann_clause(2,q(a),true).
ann_clause(3,q(b),true).
";

    #[test]
    fn impurity() {
        let p = parse_annotated(
            "ann_clause(1,p(X),rescall(print(X))).
ann_clause(2,q(X),memo(p(X))).
ann_clause(3,r(X),call(X is 1 + 2)).
ann_clause(4,s(X),rescall(var(X))).",
        )
        .unwrap();
        let imp = classify_impure(&p);
        let names: Vec<String> = imp.impure_predicates().map(|k| k.to_string()).collect();
        assert_eq!(names, vec!["p/1", "q/1", "s/1"]);
        assert!(!imp.is_impure(&p.clauses[2].body));
    }

    #[test]
    fn hide_obligations() {
        let ok = parse_annotated(HIDE).unwrap();
        assert!(check_hide(&ok).is_empty());
        assert!(check_program(&ok)
            .iter()
            .all(|f| f.severity < Severity::Error));
        let stripped =
            parse_annotated(&HIDE.replace("hide_nf(unfold(q(X)))", "unfold(q(X))")).unwrap();
        let v = check_hide(&stripped);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].node, "unfold(q(A))");
        let memos = parse_annotated("ann_clause(1,r(X),(memo(p(X)),memo(q(X)))).").unwrap();
        assert!(check_hide(&memos).is_empty());
    }

    #[test]
    fn residual_constructs_need_hidden_parts() {
        let p =
            parse_annotated("ann_clause(1,p(X),resnot(unfold(q(X)))).\nann_clause(2,q(a),true).")
                .unwrap();
        assert_eq!(check_hide(&p).len(), 1);
        let p = parse_annotated(
            "ann_clause(1,p(X),resnot(hide_nf(unfold(q(X))))).\nann_clause(2,q(a),true).",
        )
        .unwrap();
        assert!(check_hide(&p).is_empty());
    }

    #[test]
    fn negations_must_be_decidable() {
        let p = parse_annotated(
            "ann_clause(1,p(X),not(unfold(q(X)))).
ann_clause(2,q(X),rescall(r(X))).
ann_clause(3,s(X),not(unfold(t(X)))).
ann_clause(4,t(a),true).",
        )
        .unwrap();
        assert_eq!(residual_negations(&p), vec![1]);
    }

    #[test]
    fn program_checks() {
        let p = parse_annotated(
            "residual(p(_)).
ann_clause(1,p(X),(memo(q(X)),call(foo(X)),semicall(X is 1),rescall(bar(X)))).",
        )
        .unwrap();
        let f = check_program(&p);
        let errors = f.iter().filter(|f| f.severity == Severity::Error).count();
        let warnings = f.iter().filter(|f| f.severity == Severity::Warning).count();
        assert_eq!(errors, 5, "{f:?}");
        assert_eq!(warnings, 1);
    }
}
