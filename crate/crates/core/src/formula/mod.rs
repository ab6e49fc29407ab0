//! LTL and GR(1) syntax, evaluation and normal forms.

mod parser;

use std::collections::BTreeSet;
use std::fmt;

pub use parser::{parse_gr1, parse_ltl, FormulaError};

use crate::buchi;
use crate::model::{Arena, AtomId, Label, Lasso};

/// Propositional formula over atoms, used for GR(1) building blocks and
/// automaton guards.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolExpr {
    True,
    False,
    Atom(AtomId),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn not(e: BoolExpr) -> BoolExpr {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> BoolExpr {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> BoolExpr {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction of a list, `True` when empty.
    pub fn conj<I: IntoIterator<Item = BoolExpr>>(items: I) -> BoolExpr {
        items
            .into_iter()
            .reduce(BoolExpr::and)
            .unwrap_or(BoolExpr::True)
    }

    pub fn eval(&self, label: &Label) -> bool {
        match self {
            BoolExpr::True => true,
            BoolExpr::False => false,
            BoolExpr::Atom(a) => label.contains(a),
            BoolExpr::Not(e) => !e.eval(label),
            BoolExpr::And(a, b) => a.eval(label) && b.eval(label),
            BoolExpr::Or(a, b) => a.eval(label) || b.eval(label),
        }
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<AtomId>) {
        match self {
            BoolExpr::True | BoolExpr::False => {}
            BoolExpr::Atom(a) => {
                out.insert(*a);
            }
            BoolExpr::Not(e) => e.collect_atoms(out),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn to_ltl(&self) -> Ltl {
        match self {
            BoolExpr::True => Ltl::True,
            BoolExpr::False => Ltl::False,
            BoolExpr::Atom(a) => Ltl::Atom(*a),
            BoolExpr::Not(e) => Ltl::not(e.to_ltl()),
            BoolExpr::And(a, b) => Ltl::and(a.to_ltl(), b.to_ltl()),
            BoolExpr::Or(a, b) => Ltl::or(a.to_ltl(), b.to_ltl()),
        }
    }

    pub fn display<'a>(&'a self, atoms: &'a [String]) -> impl fmt::Display + 'a {
        DisplayWith(move |f: &mut fmt::Formatter<'_>| self.to_ltl().write(f, atoms))
    }
}

/// Propositional evaluation of `e` against a state's label set.
pub fn eval_bool(e: &BoolExpr, label: &Label) -> bool {
    e.eval(label)
}

/// `(GF ψ_1 ∧ … ∧ GF ψ_m) → (GF θ_1 ∧ … ∧ GF θ_n)`; an empty side is `true`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gr1Formula {
    pub antecedents: Vec<BoolExpr>,
    pub consequents: Vec<BoolExpr>,
}

impl Gr1Formula {
    pub fn new(antecedents: Vec<BoolExpr>, consequents: Vec<BoolExpr>) -> Self {
        Gr1Formula {
            antecedents,
            consequents,
        }
    }

    /// The tautology `true → true`.
    pub fn truth() -> Self {
        Gr1Formula::new(vec![], vec![])
    }

    pub fn atoms(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        for e in self.antecedents.iter().chain(&self.consequents) {
            e.collect_atoms(&mut out);
        }
        out
    }

    /// Truth value on an ultimately periodic word, given the labels of the
    /// states visited infinitely often.
    pub fn holds_on_cycle<'a, I>(&self, cycle_labels: I) -> bool
    where
        I: IntoIterator<Item = &'a Label>,
        I::IntoIter: Clone,
    {
        let labels = cycle_labels.into_iter();
        let seen = |e: &BoolExpr| labels.clone().any(|l| e.eval(l));
        !self.antecedents.iter().all(seen) || self.consequents.iter().all(seen)
    }

    pub fn to_ltl(&self) -> Ltl {
        let gf = |e: &BoolExpr| Ltl::globally(Ltl::finally(e.to_ltl()));
        let side = |es: &[BoolExpr]| es.iter().map(gf).reduce(Ltl::and);
        match (side(&self.antecedents), side(&self.consequents)) {
            (_, None) => Ltl::True,
            (None, Some(rhs)) => rhs,
            (Some(lhs), Some(rhs)) => Ltl::implies(lhs, rhs),
        }
    }

    pub fn display<'a>(&'a self, atoms: &'a [String]) -> impl fmt::Display + 'a {
        DisplayWith(move |f: &mut fmt::Formatter<'_>| {
            let side = |f: &mut fmt::Formatter<'_>, es: &[BoolExpr]| -> fmt::Result {
                if es.is_empty() {
                    return write!(f, "true");
                }
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    write!(f, "GF (")?;
                    e.to_ltl().write(f, atoms)?;
                    write!(f, ")")?;
                }
                Ok(())
            };
            write!(f, "(")?;
            side(f, &self.antecedents)?;
            write!(f, ") -> (")?;
            side(f, &self.consequents)?;
            write!(f, ")")
        })
    }
}

/// Embedding of a GR(1) formula into LTL.
pub fn gr1_to_ltl(g: &Gr1Formula) -> Ltl {
    g.to_ltl()
}

/// LTL formula tree. `Release` and `False` only arise from negation
/// normal form but are also accepted by the parser.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ltl {
    True,
    False,
    Atom(AtomId),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
    Finally(Box<Ltl>),
    Globally(Box<Ltl>),
}

impl Ltl {
    pub fn not(f: Ltl) -> Ltl {
        Ltl::Not(Box::new(f))
    }
    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Implies(Box::new(a), Box::new(b))
    }
    pub fn next(f: Ltl) -> Ltl {
        Ltl::Next(Box::new(f))
    }
    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }
    pub fn release(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Release(Box::new(a), Box::new(b))
    }
    pub fn finally(f: Ltl) -> Ltl {
        Ltl::Finally(Box::new(f))
    }
    pub fn globally(f: Ltl) -> Ltl {
        Ltl::Globally(Box::new(f))
    }

    pub fn atoms(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<AtomId>) {
        match self {
            Ltl::True | Ltl::False => {}
            Ltl::Atom(a) => {
                out.insert(*a);
            }
            Ltl::Not(f) | Ltl::Next(f) | Ltl::Finally(f) | Ltl::Globally(f) => f.collect_atoms(out),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of temporal operators in the tree.
    pub fn temporal_depth(&self) -> usize {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => 0,
            Ltl::Not(f) => f.temporal_depth(),
            Ltl::Next(f) | Ltl::Finally(f) | Ltl::Globally(f) => 1 + f.temporal_depth(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) => a.temporal_depth() + b.temporal_depth(),
            Ltl::Until(a, b) | Ltl::Release(a, b) => 1 + a.temporal_depth() + b.temporal_depth(),
        }
    }

    pub fn is_temporal_free(&self) -> bool {
        self.temporal_depth() == 0
    }

    /// Negation normal form: negations only on atoms; `→` eliminated.
    pub fn nnf(&self) -> Ltl {
        nnf(self, false)
    }

    pub fn display<'a>(&'a self, atoms: &'a [String]) -> impl fmt::Display + 'a {
        DisplayWith(move |f: &mut fmt::Formatter<'_>| self.write(f, atoms))
    }

    fn is_leaf(&self) -> bool {
        matches!(self, Ltl::True | Ltl::False | Ltl::Atom(_))
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, atoms: &[String]) -> fmt::Result {
        let sub = |f: &mut fmt::Formatter<'_>, g: &Ltl| -> fmt::Result {
            if g.is_leaf() {
                g.write(f, atoms)
            } else {
                write!(f, "(")?;
                g.write(f, atoms)?;
                write!(f, ")")
            }
        };
        match self {
            Ltl::True => write!(f, "true"),
            Ltl::False => write!(f, "false"),
            Ltl::Atom(a) => match atoms.get(*a) {
                Some(name) => write!(f, "{name}"),
                None => write!(f, "#{a}"),
            },
            Ltl::Not(g) => {
                write!(f, "!")?;
                sub(f, g)
            }
            Ltl::Next(g) => {
                write!(f, "X ")?;
                sub(f, g)
            }
            Ltl::Finally(g) => {
                write!(f, "F ")?;
                sub(f, g)
            }
            Ltl::Globally(g) => {
                write!(f, "G ")?;
                sub(f, g)
            }
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                let op = match self {
                    Ltl::And(..) => "&",
                    Ltl::Or(..) => "|",
                    Ltl::Implies(..) => "->",
                    Ltl::Until(..) => "U",
                    _ => "R",
                };
                sub(f, a)?;
                write!(f, " {op} ")?;
                sub(f, b)
            }
        }
    }
}

fn nnf(f: &Ltl, neg: bool) -> Ltl {
    match (f, neg) {
        (Ltl::True, false) | (Ltl::False, true) => Ltl::True,
        (Ltl::True, true) | (Ltl::False, false) => Ltl::False,
        (Ltl::Atom(a), false) => Ltl::Atom(*a),
        (Ltl::Atom(a), true) => Ltl::not(Ltl::Atom(*a)),
        (Ltl::Not(g), _) => nnf(g, !neg),
        (Ltl::And(a, b), false) | (Ltl::Or(a, b), true) => Ltl::and(nnf(a, neg), nnf(b, neg)),
        (Ltl::Or(a, b), false) | (Ltl::And(a, b), true) => Ltl::or(nnf(a, neg), nnf(b, neg)),
        (Ltl::Implies(a, b), false) => Ltl::or(nnf(a, true), nnf(b, false)),
        (Ltl::Implies(a, b), true) => Ltl::and(nnf(a, false), nnf(b, true)),
        (Ltl::Next(g), _) => Ltl::next(nnf(g, neg)),
        (Ltl::Until(a, b), false) | (Ltl::Release(a, b), true) => Ltl::until(nnf(a, neg), nnf(b, neg)),
        (Ltl::Release(a, b), false) | (Ltl::Until(a, b), true) => Ltl::release(nnf(a, neg), nnf(b, neg)),
        (Ltl::Finally(g), false) | (Ltl::Globally(g), true) => Ltl::finally(nnf(g, neg)),
        (Ltl::Globally(g), false) | (Ltl::Finally(g), true) => Ltl::globally(nnf(g, neg)),
    }
}

/// `¬f` pushed to negation normal form.
pub fn negate_to_ltl(f: &Ltl) -> Ltl {
    nnf(f, true)
}

/// Whether the label word of the lasso belongs to `L(f)`.
pub fn lasso_satisfies(f: &Ltl, lasso: &Lasso, arena: &Arena) -> bool {
    let aut = buchi::translate(&f.nnf());
    buchi::lasso_accepted(&aut, lasso, arena)
}

struct DisplayWith<F>(F);

impl<F: Fn(&mut fmt::Formatter<'_>) -> fmt::Result> fmt::Display for DisplayWith<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (self.0)(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::g1;
    use crate::model::{Step, StateId};

    fn atoms() -> Vec<String> {
        vec!["p".into(), "q".into(), "r".into()]
    }

    #[test]
    fn eval_bool_examples() {
        let p_and_not_q = BoolExpr::and(BoolExpr::Atom(0), BoolExpr::not(BoolExpr::Atom(1)));
        assert!(eval_bool(&p_and_not_q, &Label::from([0])));
        assert!(!eval_bool(&BoolExpr::False, &Label::from([0, 1, 2])));
        assert!(!eval_bool(&BoolExpr::or(BoolExpr::Atom(0), BoolExpr::Atom(1)), &Label::new()));
    }

    #[test]
    fn gr1_embedding() {
        assert_eq!(gr1_to_ltl(&Gr1Formula::truth()), Ltl::True);
        let g = Gr1Formula::new(vec![BoolExpr::Atom(0)], vec![BoolExpr::Atom(1)]);
        assert_eq!(
            gr1_to_ltl(&g),
            Ltl::implies(
                Ltl::globally(Ltl::finally(Ltl::Atom(0))),
                Ltl::globally(Ltl::finally(Ltl::Atom(1)))
            )
        );
    }

    #[test]
    fn negation_pushes_through_gf() {
        let gf_p = Ltl::globally(Ltl::finally(Ltl::Atom(0)));
        assert_eq!(
            negate_to_ltl(&gf_p),
            Ltl::finally(Ltl::globally(Ltl::not(Ltl::Atom(0))))
        );
        assert_eq!(negate_to_ltl(&Ltl::True), Ltl::False);
    }

    #[test]
    fn display_parses_back() {
        let a = atoms();
        let f = parse_ltl("G F p -> !(q U X r) | p R q", &a).unwrap();
        let printed = f.display(&a).to_string();
        assert_eq!(parse_ltl(&printed, &a).unwrap(), f);
    }

    fn lasso_of(prefix: &[StateId], cycle: &[StateId]) -> Lasso {
        Lasso::new(
            prefix.iter().map(|&s| Step::new(s, 0)).collect(),
            cycle.iter().map(|&s| Step::new(s, 0)).collect(),
        )
    }

    #[test]
    fn lasso_satisfaction_examples() {
        // G1 labels: s0 = {}, sW = {p}, sL = {}.
        let arena = g1().arena;
        let a = arena.atoms().to_vec();
        let g_p = parse_ltl("G p", &a).unwrap();
        assert!(lasso_satisfies(&g_p, &lasso_of(&[], &[1]), &arena));
        let x_p = parse_ltl("X p", &a).unwrap();
        assert!(lasso_satisfies(&x_p, &lasso_of(&[0], &[1]), &arena));
        let gf_p = parse_ltl("G F p", &a).unwrap();
        assert!(!lasso_satisfies(&gf_p, &lasso_of(&[0], &[2]), &arena));
    }
}
