use super::{BindingType, Division, TypeError, TypeSystem};
use crate::term::{render_term, Term};

/// Does `t` belong to the binding type `tau`? `mix` accepts any term.
pub fn judge(t: &Term, tau: &BindingType, ts: &TypeSystem) -> Result<bool, TypeError> {
    // Conjunctive obligations are kept on a worklist so that long list
    // skeletons do not recurse once per cell.
    let mut work: Vec<(Term, BindingType)> = vec![(t.clone(), tau.clone())];
    while let Some((t, tau)) = work.pop() {
        let ok = match &tau {
            BindingType::Dynamic | BindingType::Mix => true,
            BindingType::Static => t.is_ground(),
            BindingType::Nonvar => !t.is_var(),
            BindingType::Param(_) => return Err(TypeError::NotGround(tau.to_string())),
            BindingType::Or(a, b) => judge(&t, a, ts)? || judge(&t, b, ts)?,
            BindingType::Struct(f, args) => match t.functor() {
                Some((g, n)) if g == *f && n == args.len() => {
                    work.extend(t.args().iter().cloned().zip(args.iter().cloned()));
                    true
                }
                _ => false,
            },
            BindingType::Ctor(c, actuals) => {
                let alts = ts.unfold(*c, actuals)?;
                match t.functor() {
                    None => false,
                    Some((g, n)) => match alts
                        .into_iter()
                        .find(|a| a.functor == g && a.args.len() == n)
                    {
                        Some(alt) => {
                            work.extend(t.args().iter().cloned().zip(alt.args));
                            true
                        }
                        None => false,
                    },
                }
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sound but incomplete test of `tau ⊒ tau2` (every term of `tau2` is a term
/// of `tau`).
pub fn more_general_type(tau: &BindingType, tau2: &BindingType) -> bool {
    use BindingType::*;
    if tau == tau2 {
        return true;
    }
    match (tau, tau2) {
        (Dynamic | Mix, _) => true,
        (Nonvar, Static | Ctor(..) | Struct(..)) => true,
        (Nonvar, Or(a, b)) => more_general_type(tau, a) && more_general_type(tau, b),
        (_, Or(a, b)) => more_general_type(tau, a) && more_general_type(tau, b),
        (Or(a, b), _) => more_general_type(a, tau2) || more_general_type(b, tau2),
        (Ctor(c, xs), Ctor(d, ys)) | (Struct(c, xs), Struct(d, ys)) => {
            c == d
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| more_general_type(x, y))
        }
        _ => false,
    }
}

fn not_safe(t: &Term, tau: &BindingType) -> TypeError {
    TypeError::NotSafe {
        term: render_term(t),
        ty: tau.to_string(),
    }
}

/// Generalises `t` according to `tau`: static and mix parts are kept, dynamic
/// parts become fresh variables numbered from `*next` upwards.
pub fn gen_term(
    t: &Term,
    tau: &BindingType,
    ts: &TypeSystem,
    next: &mut u32,
) -> Result<Term, TypeError> {
    let mut fresh = || {
        let v = Term::var(*next);
        *next += 1;
        v
    };
    match tau {
        BindingType::Static => {
            if t.is_ground() {
                Ok(t.clone())
            } else {
                Err(not_safe(t, tau))
            }
        }
        BindingType::Mix => Ok(t.clone()),
        BindingType::Dynamic => Ok(fresh()),
        BindingType::Param(_) => Err(TypeError::NotGround(tau.to_string())),
        BindingType::Nonvar => match t {
            Term::Var(_) => Err(not_safe(t, tau)),
            Term::Compound(c) => Ok(Term::compound(
                c.functor,
                c.args.iter().map(|_| fresh()).collect(),
            )),
            other => Ok(other.clone()),
        },
        BindingType::Or(a, b) => {
            let saved = *next;
            match gen_term(t, a, ts, next) {
                Ok(g) => Ok(g),
                Err(TypeError::NotSafe { .. }) => {
                    *next = saved;
                    gen_term(t, b, ts, next).map_err(|e| match e {
                        TypeError::NotSafe { .. } => not_safe(t, tau),
                        e => e,
                    })
                }
                Err(e) => Err(e),
            }
        }
        BindingType::Struct(f, args) => match t.functor() {
            Some((g, n)) if g == *f && n == args.len() => gen_args(t, args, ts, next),
            _ => Err(not_safe(t, tau)),
        },
        BindingType::Ctor(c, actuals) => {
            let alts = ts.unfold(*c, actuals)?;
            let Some((g, n)) = t.functor() else {
                return Err(not_safe(t, tau));
            };
            match alts.iter().find(|a| a.functor == g && a.args.len() == n) {
                Some(alt) => gen_args(t, &alt.args, ts, next).map_err(|e| match e {
                    TypeError::NotSafe { .. } => not_safe(t, tau),
                    e => e,
                }),
                None => Err(not_safe(t, tau)),
            }
        }
    }
}

fn gen_args(
    t: &Term,
    types: &[BindingType],
    ts: &TypeSystem,
    next: &mut u32,
) -> Result<Term, TypeError> {
    let (f, _) = t.functor().expect("caller checked the functor");
    let args = t
        .args()
        .iter()
        .zip(types)
        .map(|(a, ty)| gen_term(a, ty, ts, next))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Term::compound(f, args))
}

/// Generalises an atom argument-wise by its division entry. Fresh variables
/// are numbered above those of `a`.
pub fn gen_atom(a: &Term, d: &Division, ts: &TypeSystem) -> Result<Term, TypeError> {
    let pred = a
        .pred_key()
        .ok_or_else(|| TypeError::Malformed(render_term(a)))?;
    let types = d.get(pred).ok_or(TypeError::MissingDivision(pred))?;
    let mut next = a.max_var().map_or(0, |m| m + 1);
    let args = a
        .args()
        .iter()
        .zip(types)
        .map(|(t, ty)| gen_term(t, ty, ts, &mut next))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| match e {
            TypeError::NotSafe { term, ty } => TypeError::NotSafe {
                term: format!("{term} in {}", render_term(a)),
                ty,
            },
            e => e,
        })?;
    Ok(Term::compound(pred.name, args))
}

/// Is `a` safe with respect to `d`: has an entry, and every argument belongs
/// to its type?
pub fn atom_safe(a: &Term, d: &Division, ts: &TypeSystem) -> bool {
    let Some(pred) = a.pred_key() else {
        return false;
    };
    let Some(types) = d.get(pred) else {
        return false;
    };
    a.args()
        .iter()
        .zip(types)
        .all(|(t, ty)| judge(t, ty, ts).unwrap_or(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{is_variant, parse_term, render_term, PredKey};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap().term
    }

    fn ty(s: &str) -> BindingType {
        BindingType::from_term(&t(s)).unwrap()
    }

    fn division(entries: &[(&str, &[&str])]) -> Division {
        let mut d = Division::new();
        for (name, types) in entries {
            d.insert(
                PredKey::new(name, types.len()),
                types.iter().map(|s| ty(s)).collect(),
            )
            .unwrap();
        }
        d
    }

    #[test]
    fn judgements() {
        let ts = TypeSystem::new();
        assert!(judge(&t("s(0)"), &ty("static"), &ts).unwrap());
        assert!(judge(&t("s(X)"), &ty("nonvar"), &ts).unwrap());
        assert!(!judge(&t("X"), &ty("nonvar"), &ts).unwrap());
        assert!(judge(&t("[s(0)]"), &ty("list(static)"), &ts).unwrap());
        assert!(!judge(&t("[s(0)|T]"), &ty("list(static)"), &ts).unwrap());
        assert!(judge(&t("X"), &ty("mix"), &ts).unwrap());
        assert!(judge(
            &t("[[a,X],[]]"),
            &ty("type(list(type(list(dynamic))))"),
            &ts
        )
        .unwrap());
        assert!(judge(&t("[]"), &ty("(struct('[]',[]) ; nonvar)"), &ts).unwrap());
        assert!(judge(&t("f(X)"), &ty("(struct('[]',[]) ; nonvar)"), &ts).unwrap());
        assert!(matches!(
            judge(&t("a"), &ty("tree(static)"), &ts),
            Err(TypeError::UnknownConstructor(_))
        ));
    }

    #[test]
    fn ordering_axioms() {
        assert!(more_general_type(&ty("list(dynamic)"), &ty("list(static)")));
        assert!(more_general_type(&ty("nonvar"), &ty("static")));
        assert!(more_general_type(&ty("nonvar"), &ty("list(static)")));
        assert!(!more_general_type(&ty("static"), &ty("dynamic")));
        assert!(!more_general_type(
            &ty("list(static)"),
            &ty("list(dynamic)")
        ));
    }

    #[test]
    fn generalisation() {
        let ts = TypeSystem::new();
        let mut next = 10;
        let g = gen_term(&t("[a,b,c]"), &ty("list(dynamic)"), &ts, &mut next).unwrap();
        assert!(is_variant(&g, &t("[X,Y,Z]")));
        let g = gen_term(&t("f(a,b)"), &ty("nonvar"), &ts, &mut next).unwrap();
        assert!(is_variant(&g, &t("f(X,Y)")));
        assert!(matches!(
            gen_term(&t("[H|T]"), &ty("list(dynamic)"), &ts, &mut next),
            Err(TypeError::NotSafe { .. })
        ));
    }

    #[test]
    fn atom_generalisation() {
        let ts = TypeSystem::new();
        let d = division(&[
            ("p", &["static", "dynamic"]),
            ("q", &["dynamic", "static", "nonvar"]),
            ("demo", &["nonvar"]),
        ]);
        assert!(is_variant(
            &gen_atom(&t("p(a,b)"), &d, &ts).unwrap(),
            &t("p(a,X)")
        ));
        assert!(is_variant(
            &gen_atom(&t("q(a,b,f(c))"), &d, &ts).unwrap(),
            &t("q(Y,b,f(Z))")
        ));
        let g = gen_atom(&t("demo(append(X,[a],Z))"), &d, &ts).unwrap();
        assert_eq!(render_term(&g), "demo(append(A,B,C))");
        assert!(matches!(
            gen_atom(&t("r(a)"), &d, &ts),
            Err(TypeError::MissingDivision(_))
        ));
    }

    #[test]
    fn safety() {
        let ts = TypeSystem::new();
        let d = division(&[("p", &["static", "dynamic"])]);
        assert!(atom_safe(&t("p(a,X)"), &d, &ts));
        assert!(!atom_safe(&t("p(X,a)"), &d, &ts));
        let all_dyn = division(&[("p", &["dynamic", "dynamic"])]);
        assert!(atom_safe(&t("p(X,f(Y))"), &all_dyn, &ts));
    }

    #[test]
    fn refined_transpose_division() {
        let ts = TypeSystem::new();
        let tau = ty("(struct('[]',[]) ; struct('.',[type(list(dynamic)),type(list(dynamic))]))");
        let mut next = 0;
        let g = gen_term(&t("[[a,b],[c,d]]"), &tau, &ts, &mut next).unwrap();
        assert!(is_variant(&g, &t("[[A,B]|[C]]")));
    }
}
