use super::store::Store;
use super::EngineError;
use crate::term::{atoms, render_term, Term};

/// Evaluates an integer arithmetic expression under the store's bindings.
pub(crate) fn eval(store: &Store, t: &Term, context: &str) -> Result<i64, EngineError> {
    match store.deref(t) {
        Term::Int(n) => Ok(n),
        Term::Var(_) => Err(EngineError::Instantiation(context.to_string())),
        Term::Atom(a) => Err(EngineError::Type {
            context: context.to_string(),
            expected: "evaluable",
            found: format!("{}/0", a),
        }),
        Term::Compound(c) => {
            let overflow = || {
                EngineError::Evaluation(format!(
                    "integer overflow in {}",
                    render_term(&store.resolve(t))
                ))
            };
            match c.args.len() {
                1 => {
                    let x = eval(store, &c.args[0], context)?;
                    match c.functor {
                        f if f == atoms::MINUS => x.checked_neg().ok_or_else(overflow),
                        f if f == atoms::PLUS => Ok(x),
                        f if f == atoms::ABS => x.checked_abs().ok_or_else(overflow),
                        f => Err(unknown(context, f.name(), 1)),
                    }
                }
                2 => {
                    let x = eval(store, &c.args[0], context)?;
                    let y = eval(store, &c.args[1], context)?;
                    let zero = || EngineError::Evaluation("division by zero".to_string());
                    match c.functor {
                        f if f == atoms::PLUS => x.checked_add(y).ok_or_else(overflow),
                        f if f == atoms::MINUS => x.checked_sub(y).ok_or_else(overflow),
                        f if f == atoms::STAR => x.checked_mul(y).ok_or_else(overflow),
                        f if f == atoms::INT_DIV || f == atoms::SLASH => {
                            if y == 0 {
                                Err(zero())
                            } else {
                                x.checked_div(y).ok_or_else(overflow)
                            }
                        }
                        f if f == atoms::MOD => {
                            if y == 0 {
                                Err(zero())
                            } else {
                                Ok(x.rem_euclid(y)
                                    + if y < 0 && x.rem_euclid(y) != 0 { y } else { 0 })
                            }
                        }
                        f if f == atoms::REM => {
                            if y == 0 {
                                Err(zero())
                            } else {
                                x.checked_rem(y).ok_or_else(overflow)
                            }
                        }
                        f if f == atoms::MIN => Ok(x.min(y)),
                        f if f == atoms::MAX => Ok(x.max(y)),
                        f => Err(unknown(context, f.name(), 2)),
                    }
                }
                n => Err(unknown(context, c.functor.name(), n)),
            }
        }
    }
}

fn unknown(context: &str, name: &str, arity: usize) -> EngineError {
    EngineError::Type {
        context: context.to_string(),
        expected: "evaluable",
        found: format!("{name}/{arity}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn ev(s: &str) -> Result<i64, EngineError> {
        let store = Store::new(false);
        eval(&store, &parse_term(s).unwrap().term, "is/2")
    }

    #[test]
    fn integer_arithmetic() {
        assert_eq!(ev("1 + 2 * 3").unwrap(), 7);
        assert_eq!(ev("7 // 2").unwrap(), 3);
        assert_eq!(ev("-7 mod 3").unwrap(), 2);
        assert_eq!(ev("7 mod -3").unwrap(), -2);
        assert_eq!(ev("-7 rem 3").unwrap(), -1);
        assert_eq!(ev("max(3, 4) - abs(-2)").unwrap(), 2);
    }

    #[test]
    fn errors() {
        assert!(matches!(ev("X + 1"), Err(EngineError::Instantiation(_))));
        assert!(matches!(ev("1 // 0"), Err(EngineError::Evaluation(_))));
        assert!(matches!(ev("foo + 1"), Err(EngineError::Type { .. })));
    }
}
