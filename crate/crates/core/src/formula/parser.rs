//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! impl  := or ( "->" impl )?
//! or    := and ( "|" and )*
//! and   := until ( "&" until )*
//! until := unary ( ("U" | "R") until )?
//! unary := ("!" | "X" | "F" | "G") unary | "(" impl ")" | "true" | "false" | ATOM
//! ```
//!
//! A word made only of the letters `G`, `F`, `X` is read as a sequence of
//! unary operators, so `GF p` and `G F p` are the same formula.

use super::{BoolExpr, Gr1Formula, Ltl};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("undeclared atom `{name}` at {line}:{col}")]
    UndeclaredAtom { name: String, line: usize, col: usize },
    #[error("not a GR(1) formula: `{0}` is not a conjunction of GF terms over propositional formulas")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    Next,
    Finally,
    Globally,
    Until,
    Release,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| FormulaError::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let push = |tok: Tok, width: usize, out: &mut Vec<Token>| {
            out.push(Token { tok, line: tl, col: tc });
            width
        };
        let width = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => 1,
            '(' => push(Tok::LParen, 1, &mut out),
            ')' => push(Tok::RParen, 1, &mut out),
            '!' | '~' => push(Tok::Not, 1, &mut out),
            '&' if chars.get(i + 1) == Some(&'&') => push(Tok::And, 2, &mut out),
            '&' => push(Tok::And, 1, &mut out),
            '|' if chars.get(i + 1) == Some(&'|') => push(Tok::Or, 2, &mut out),
            '|' => push(Tok::Or, 1, &mut out),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Implies, 2, &mut out),
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                match word.as_str() {
                    "true" => push(Tok::True, 0, &mut out),
                    "false" => push(Tok::False, 0, &mut out),
                    "U" => push(Tok::Until, 0, &mut out),
                    "R" => push(Tok::Release, 0, &mut out),
                    w if w.chars().all(|c| matches!(c, 'G' | 'F' | 'X')) => {
                        for (k, ch) in w.chars().enumerate() {
                            let tok = match ch {
                                'G' => Tok::Globally,
                                'F' => Tok::Finally,
                                _ => Tok::Next,
                            };
                            out.push(Token { tok, line: tl, col: tc + k });
                        }
                        0
                    }
                    _ => {
                        if word.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                            return Err(err(tl, tc, format!("atom `{word}` must not start with a digit")));
                        }
                        push(Tok::Ident(word), 0, &mut out)
                    }
                };
                col += j - i;
                i = j;
                continue;
            }
            other => return Err(err(tl, tc, format!("unexpected character `{other}`"))),
        };
        i += width;
        col += width;
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    atoms: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: &str) -> Result<T, FormulaError> {
        let t = self.peek();
        let found = match &t.tok {
            Tok::Eof => "end of input".to_string(),
            Tok::Ident(s) => format!("`{s}`"),
            other => format!("{other:?}"),
        };
        Err(FormulaError::Syntax {
            line: t.line,
            col: t.col,
            msg: format!("{msg}, found {found}"),
        })
    }

    fn implication(&mut self) -> Result<Ltl, FormulaError> {
        let lhs = self.disjunction()?;
        if self.peek().tok == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Ltl::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Ltl, FormulaError> {
        let mut lhs = self.conjunction()?;
        while self.peek().tok == Tok::Or {
            self.bump();
            lhs = Ltl::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Ltl, FormulaError> {
        let mut lhs = self.until()?;
        while self.peek().tok == Tok::And {
            self.bump();
            lhs = Ltl::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Ltl, FormulaError> {
        let lhs = self.unary()?;
        match self.peek().tok {
            Tok::Until => {
                self.bump();
                Ok(Ltl::until(lhs, self.until()?))
            }
            Tok::Release => {
                self.bump();
                Ok(Ltl::release(lhs, self.until()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Ltl, FormulaError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Not => {
                self.bump();
                Ok(Ltl::not(self.unary()?))
            }
            Tok::Next => {
                self.bump();
                Ok(Ltl::next(self.unary()?))
            }
            Tok::Finally => {
                self.bump();
                Ok(Ltl::finally(self.unary()?))
            }
            Tok::Globally => {
                self.bump();
                Ok(Ltl::globally(self.unary()?))
            }
            Tok::True => {
                self.bump();
                Ok(Ltl::True)
            }
            Tok::False => {
                self.bump();
                Ok(Ltl::False)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.implication()?;
                if self.peek().tok != Tok::RParen {
                    return self.fail("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                match self.atoms.iter().position(|a| *a == name) {
                    Some(i) => Ok(Ltl::Atom(i)),
                    None => Err(FormulaError::UndeclaredAtom {
                        name,
                        line: t.line,
                        col: t.col,
                    }),
                }
            }
            _ => self.fail("expected a formula"),
        }
    }
}

/// Parses an LTL formula over the declared atoms.
pub fn parse_ltl(text: &str, atoms: &[String]) -> Result<Ltl, FormulaError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        atoms,
    };
    let f = p.implication()?;
    if p.peek().tok != Tok::Eof {
        return p.fail("expected end of input");
    }
    Ok(f)
}

/// Parses a formula and checks that it has the GR(1) shape.
pub fn parse_gr1(text: &str, atoms: &[String]) -> Result<Gr1Formula, FormulaError> {
    let f = parse_ltl(text, atoms)?;
    ltl_to_gr1(&f, atoms)
}

/// Syntactic GR(1) recognition after flattening conjunctions.
pub(crate) fn ltl_to_gr1(f: &Ltl, atoms: &[String]) -> Result<Gr1Formula, FormulaError> {
    match f {
        Ltl::Implies(lhs, rhs) => Ok(Gr1Formula::new(gf_terms(lhs, atoms)?, gf_terms(rhs, atoms)?)),
        other => Ok(Gr1Formula::new(vec![], gf_terms(other, atoms)?)),
    }
}

fn gf_terms(f: &Ltl, atoms: &[String]) -> Result<Vec<BoolExpr>, FormulaError> {
    let shape_err = |g: &Ltl| FormulaError::Shape(g.display(atoms).to_string());
    match f {
        Ltl::True => Ok(vec![]),
        Ltl::And(a, b) => {
            let mut v = gf_terms(a, atoms)?;
            v.extend(gf_terms(b, atoms)?);
            Ok(v)
        }
        Ltl::Globally(inner) => match inner.as_ref() {
            Ltl::Finally(body) => Ok(vec![to_bool(body).ok_or_else(|| shape_err(body))?]),
            _ => Err(shape_err(f)),
        },
        _ => Err(shape_err(f)),
    }
}

fn to_bool(f: &Ltl) -> Option<BoolExpr> {
    Some(match f {
        Ltl::True => BoolExpr::True,
        Ltl::False => BoolExpr::False,
        Ltl::Atom(a) => BoolExpr::Atom(*a),
        Ltl::Not(g) => BoolExpr::not(to_bool(g)?),
        Ltl::And(a, b) => BoolExpr::and(to_bool(a)?, to_bool(b)?),
        Ltl::Or(a, b) => BoolExpr::or(to_bool(a)?, to_bool(b)?),
        Ltl::Implies(a, b) => BoolExpr::or(BoolExpr::not(to_bool(a)?), to_bool(b)?),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms() -> Vec<String> {
        ["p", "q", "r", "at_s0"].iter().map(|s| s.to_string()).collect()
    }

    fn gf(a: usize) -> Ltl {
        Ltl::globally(Ltl::finally(Ltl::Atom(a)))
    }

    #[test]
    fn implication_of_gf_terms() {
        let f = parse_ltl("G F p -> G F q", &atoms()).unwrap();
        assert_eq!(f, Ltl::implies(gf(0), gf(1)));
        assert_eq!(parse_ltl("GF p -> GF q", &atoms()).unwrap(), f);
    }

    #[test]
    fn until_over_conjunction() {
        let f = parse_ltl("p U (q & !r)", &atoms()).unwrap();
        assert_eq!(
            f,
            Ltl::until(Ltl::Atom(0), Ltl::and(Ltl::Atom(1), Ltl::not(Ltl::Atom(2))))
        );
    }

    #[test]
    fn dangling_implication_is_a_syntax_error() {
        let err = parse_ltl("p ->", &atoms()).unwrap_err();
        assert!(matches!(err, FormulaError::Syntax { line: 1, col: 5, .. }), "{err}");
    }

    #[test]
    fn precedence_and_associativity() {
        let a = atoms();
        // & binds tighter than |, which binds tighter than ->.
        assert_eq!(
            parse_ltl("p | q & r", &a).unwrap(),
            Ltl::or(Ltl::Atom(0), Ltl::and(Ltl::Atom(1), Ltl::Atom(2)))
        );
        assert_eq!(
            parse_ltl("p -> q -> r", &a).unwrap(),
            Ltl::implies(Ltl::Atom(0), Ltl::implies(Ltl::Atom(1), Ltl::Atom(2)))
        );
        // U binds tighter than &; unary operators tighter than U.
        assert_eq!(
            parse_ltl("p & q U r", &a).unwrap(),
            Ltl::and(Ltl::Atom(0), Ltl::until(Ltl::Atom(1), Ltl::Atom(2)))
        );
        assert_eq!(
            parse_ltl("!p U X q", &a).unwrap(),
            Ltl::until(Ltl::not(Ltl::Atom(0)), Ltl::next(Ltl::Atom(1)))
        );
    }

    #[test]
    fn undeclared_atom_reports_position() {
        let err = parse_ltl("G\n  zz", &atoms()).unwrap_err();
        assert_eq!(
            err,
            FormulaError::UndeclaredAtom {
                name: "zz".into(),
                line: 2,
                col: 3
            }
        );
    }

    #[test]
    fn gr1_shapes() {
        let a = atoms();
        let g = parse_gr1("(GF p & GF q) -> (GF r)", &a).unwrap();
        assert_eq!(g.antecedents, vec![BoolExpr::Atom(0), BoolExpr::Atom(1)]);
        assert_eq!(g.consequents, vec![BoolExpr::Atom(2)]);

        let g = parse_gr1("GF (p | q)", &a).unwrap();
        assert!(g.antecedents.is_empty());
        assert_eq!(g.consequents, vec![BoolExpr::or(BoolExpr::Atom(0), BoolExpr::Atom(1))]);

        assert_eq!(parse_gr1("true", &a).unwrap(), Gr1Formula::truth());
        assert_eq!(parse_gr1("GF at_s0", &a).unwrap().consequents, vec![BoolExpr::Atom(3)]);
    }

    #[test]
    fn gr1_shape_error_names_subterm() {
        let err = parse_gr1("p U q -> GF r", &atoms()).unwrap_err();
        assert_eq!(err, FormulaError::Shape("p U q".into()));
        let err = parse_gr1("GF (X p)", &atoms()).unwrap_err();
        assert_eq!(err, FormulaError::Shape("X p".into()));
    }

    #[test]
    fn gr1_display_round_trips() {
        let a = atoms();
        for text in ["(GF p & GF q) -> (GF r)", "GF (p | !q)", "true", "GF p -> true"] {
            let g = parse_gr1(text, &a).unwrap();
            let printed = g.display(&a).to_string();
            assert_eq!(parse_gr1(&printed, &a).unwrap(), g, "{printed}");
        }
    }
}
