//! Terms over an algebra's signature.
//!
//! Text form is prefix notation: `+(x0,-(x1))`. Variables are `x<i>`,
//! constants (used by polynomials) are `#<element>`, and nullary symbols are
//! written bare.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{valid_symbol, FiniteAlgebra};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Const(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(symbol.into(), args)
    }

    /// One more than the largest variable index, or 0 for ground terms.
    pub fn num_vars(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Const(_) => 0,
            Term::App(_, args) => args.iter().map(Term::num_vars).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn has_constants(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().any(Term::has_constants),
        }
    }

    /// Replaces every `x_i` by `args[i]`.
    pub fn substitute(&self, args: &[Term]) -> Term {
        match self {
            Term::Var(i) => args[*i].clone(),
            Term::Const(c) => Term::Const(*c),
            Term::App(f, children) => Term::App(f.clone(), children.iter().map(|c| c.substitute(args)).collect()),
        }
    }

    /// Checks symbols, arities and constants against `alg`.
    pub fn check(&self, alg: &FiniteAlgebra) -> Result<()> {
        match self {
            Term::Var(_) => Ok(()),
            Term::Const(c) => alg.check_element(*c),
            Term::App(f, args) => {
                let op = alg.op(f).ok_or_else(|| Error::UnknownSymbol(f.clone()))?;
                if op.arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: f.clone(),
                        expected: op.arity,
                        actual: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(alg))
            }
        }
    }

    /// The value of the induced term (or polynomial) operation at
    /// `assignment`.
    pub fn eval(&self, alg: &FiniteAlgebra, assignment: &[usize]) -> Result<usize> {
        match self {
            Term::Var(i) => assignment.get(*i).copied().ok_or(Error::UnassignedVariable {
                index: *i,
                len: assignment.len(),
            }),
            Term::Const(c) => {
                alg.check_element(*c)?;
                Ok(*c)
            }
            Term::App(f, args) => {
                let op = alg.op(f).ok_or_else(|| Error::UnknownSymbol(f.clone()))?;
                if op.arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: f.clone(),
                        expected: op.arity,
                        actual: args.len(),
                    });
                }
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(a.eval(alg, assignment)?);
                }
                Ok(op.apply(alg.size, &values))
            }
        }
    }

    /// The full table of the induced `vars`-ary operation, indexed
    /// row-major like operation tables.
    pub fn table(&self, alg: &FiniteAlgebra, vars: usize) -> Result<Vec<usize>> {
        if self.num_vars() > vars {
            return Err(Error::UnassignedVariable {
                index: self.num_vars() - 1,
                len: vars,
            });
        }
        self.check(alg)?;
        let n = alg.size;
        let len = n.pow(vars as u32);
        Ok(self.table_unchecked(alg, vars, len))
    }

    fn table_unchecked(&self, alg: &FiniteAlgebra, vars: usize, len: usize) -> Vec<usize> {
        let n = alg.size;
        match self {
            Term::Var(i) => {
                let stride = n.pow((vars - 1 - i) as u32);
                (0..len).map(|idx| (idx / stride) % n).collect()
            }
            Term::Const(c) => vec![*c; len],
            Term::App(f, args) => {
                let op = alg.op(f).expect("checked");
                let children: Vec<Vec<usize>> = args.iter().map(|a| a.table_unchecked(alg, vars, len)).collect();
                (0..len)
                    .map(|idx| {
                        let flat = children.iter().fold(0, |acc, c| acc * n + c[idx]);
                        op.table[flat]
                    })
                    .collect()
            }
        }
    }
}

/// True iff `s ≈ t` holds in `alg` for all assignments of `vars` variables.
pub fn verify_identity(alg: &FiniteAlgebra, s: &Term, t: &Term, vars: usize) -> Result<bool> {
    Ok(s.table(alg, vars)? == t.table(alg, vars)?)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Const(c) => write!(f, "#{c}"),
            Term::App(sym, args) if args.is_empty() => f.write_str(sym),
            Term::App(sym, args) => {
                write!(f, "{sym}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct TermParser<'a> {
    src: &'a str,
    pos: usize,
}

impl TermParser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("term at offset {}: {msg}", self.pos))
    }

    fn token(&mut self) -> &str {
        let rest = &self.src[self.pos..];
        let end = rest.find(['(', ')', ',']).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn term(&mut self) -> Result<Term> {
        let tok = self.token().to_string();
        if tok.is_empty() {
            return Err(self.error("expected a symbol"));
        }
        if let Some(digits) = tok.strip_prefix('x').filter(|d| !d.is_empty()) {
            if let Ok(i) = digits.parse() {
                return Ok(Term::Var(i));
            }
        }
        if let Some(digits) = tok.strip_prefix('#') {
            return digits.parse().map(Term::Const).map_err(|_| self.error("bad constant"));
        }
        if !valid_symbol(&tok) {
            return Err(self.error("invalid symbol"));
        }
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `)`")),
                }
            }
        }
        Ok(Term::App(tok, args))
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        let mut p = TermParser { src: s, pos: 0 };
        let t = p.term()?;
        if p.pos != s.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operation;
    use proptest::prelude::*;

    fn cyclic(n: usize) -> FiniteAlgebra {
        FiniteAlgebra::new(
            format!("Z{n}"),
            n,
            vec![
                Operation::from_fn("+", n, 2, |a| (a[0] + a[1]) % n),
                Operation::from_fn("-", n, 1, |a| (n - a[0]) % n),
                Operation::new("0", 0, vec![0]),
            ],
        )
        .unwrap()
    }

    fn difference() -> Term {
        "+(+(x0,-(x1)),x2)".parse().unwrap()
    }

    #[test]
    fn projection() {
        let a = cyclic(4);
        assert_eq!(Term::Var(1).eval(&a, &[3, 2]).unwrap(), 2);
    }

    #[test]
    fn group_difference_term() {
        assert_eq!(difference().eval(&cyclic(2), &[1, 1, 0]).unwrap(), 0);
        // Oracle: direct table arithmetic in Z4.
        let z4 = cyclic(4);
        let (x, y, z) = (1usize, 2usize, 3usize);
        let expected = (x + (4 - y) % 4 + z) % 4;
        assert_eq!(expected, 2);
        assert_eq!(difference().eval(&z4, &[x, y, z]).unwrap(), expected);
    }

    #[test]
    fn eval_errors() {
        let a = cyclic(2);
        assert_eq!(
            "*(x0,x1)".parse::<Term>().unwrap().eval(&a, &[0, 0]),
            Err(Error::UnknownSymbol("*".into()))
        );
        assert!(matches!(
            "+(x0)".parse::<Term>().unwrap().eval(&a, &[0]),
            Err(Error::ArityMismatch {
                expected: 2,
                actual: 1,
                ..
            })
        ));
        assert!(matches!(
            Term::Var(2).eval(&a, &[0, 1]),
            Err(Error::UnassignedVariable { index: 2, len: 2 })
        ));
    }

    #[test]
    fn tables_match_pointwise_evaluation() {
        let a = cyclic(3);
        let t: Term = "+(x2,+(x0,#1))".parse().unwrap();
        let table = t.table(&a, 3).unwrap();
        crate::algebra::for_each_tuple(3, 3, |args| {
            let idx = crate::algebra::flat_index(3, args);
            assert_eq!(table[idx], t.eval(&a, args).unwrap());
        });
    }

    #[test]
    fn identities() {
        let z2 = cyclic(2);
        let t = difference();
        assert!(verify_identity(&z2, &t, &t, 3).unwrap());
        let p: Term = "+(+(x0,x1),x2)".parse().unwrap();
        let lhs = p.substitute(&[Term::Var(0), Term::Var(0), Term::Var(1)]);
        assert!(verify_identity(&z2, &lhs, &Term::Var(1), 2).unwrap());
        assert!(!verify_identity(&cyclic(3), &lhs, &Term::Var(1), 2).unwrap());
    }

    #[test]
    fn text_form() {
        let t: Term = "f(x0,g(#2,x1),c)".parse().unwrap();
        assert_eq!(
            t,
            Term::app(
                "f",
                vec![
                    Term::Var(0),
                    Term::app("g", vec![Term::Const(2), Term::Var(1)]),
                    Term::app("c", vec![])
                ]
            )
        );
        assert_eq!(t.to_string(), "f(x0,g(#2,x1),c)");
        assert!("f(x0".parse::<Term>().is_err());
        assert!("f(x0))".parse::<Term>().is_err());
        assert!("".parse::<Term>().is_err());
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![(0..4usize).prop_map(Term::Var), (0..9usize).prop_map(Term::Const)];
        leaf.prop_recursive(4, 32, 3, |inner| {
            (
                prop_oneof![Just("+"), Just("meet"), Just("∧"), Just("-"), Just("x")],
                proptest::collection::vec(inner, 0..3),
            )
                .prop_map(|(s, args)| Term::app(s, args))
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(t in arb_term()) {
            let text = t.to_string();
            prop_assert_eq!(text.parse::<Term>().unwrap(), t.clone());
            prop_assert_eq!(text.parse::<Term>().unwrap().to_string(), text);
        }
    }
}
