//! LTL to nondeterministic Büchi automata by tableau expansion, and
//! emptiness of a labelled graph synchronised with such an automaton.
//!
//! Automaton edges read letters: a run `q0 q1 q2 …` on `a0 a1 a2 …` needs
//! `a_k ⊨ guard(q_k → q_{k+1})` for every `k`. A product node `(v, q)`
//! therefore means "at graph node `v`, automaton in `q`, about to read the
//! label of `v`".

use std::collections::{BTreeSet, HashMap};

use crate::formula::{BoolExpr, Ltl};
use crate::graph;
use crate::model::{Arena, Label, Lasso, Step};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton {
    pub num_states: usize,
    pub initial: Vec<usize>,
    /// `edges[q]` lists `(target, guard)`.
    pub edges: Vec<Vec<(usize, BoolExpr)>>,
    pub accepting: Vec<bool>,
}

impl BuchiAutomaton {
    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    /// Successor states of `q` when reading `label`.
    pub fn step<'a>(&'a self, q: usize, label: &'a Label) -> impl Iterator<Item = usize> + 'a {
        self.edges[q]
            .iter()
            .filter(move |(_, g)| g.eval(label))
            .map(|(t, _)| *t)
    }
}

#[derive(Debug, Clone)]
struct Pending {
    incoming: BTreeSet<usize>,
    new: BTreeSet<Ltl>,
    old: BTreeSet<Ltl>,
    next: BTreeSet<Ltl>,
}

struct Node {
    incoming: BTreeSet<usize>,
    old: BTreeSet<Ltl>,
    next: BTreeSet<Ltl>,
}

const INIT: usize = usize::MAX;

fn desugar(f: &Ltl) -> Ltl {
    match f {
        Ltl::True | Ltl::False | Ltl::Atom(_) => f.clone(),
        Ltl::Not(g) => Ltl::not(desugar(g)),
        Ltl::And(a, b) => Ltl::and(desugar(a), desugar(b)),
        Ltl::Or(a, b) => Ltl::or(desugar(a), desugar(b)),
        Ltl::Implies(a, b) => Ltl::or(Ltl::not(desugar(a)), desugar(b)),
        Ltl::Next(g) => Ltl::next(desugar(g)),
        Ltl::Until(a, b) => Ltl::until(desugar(a), desugar(b)),
        Ltl::Release(a, b) => Ltl::release(desugar(a), desugar(b)),
        Ltl::Finally(g) => Ltl::until(Ltl::True, desugar(g)),
        Ltl::Globally(g) => Ltl::release(Ltl::False, desugar(g)),
    }
}

fn collect_untils(f: &Ltl, out: &mut BTreeSet<Ltl>) {
    match f {
        Ltl::True | Ltl::False | Ltl::Atom(_) => {}
        Ltl::Not(g) | Ltl::Next(g) | Ltl::Finally(g) | Ltl::Globally(g) => collect_untils(g, out),
        Ltl::Until(a, b) => {
            out.insert(f.clone());
            collect_untils(a, out);
            collect_untils(b, out);
        }
        Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Release(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
        }
    }
}

fn complement(lit: &Ltl) -> Ltl {
    match lit {
        Ltl::Not(a) => (**a).clone(),
        other => Ltl::not(other.clone()),
    }
}

fn expand(f: Ltl) -> Vec<Node> {
    let mut nodes: Vec<Node> = Vec::new();
    let mut stack = vec![Pending {
        incoming: BTreeSet::from([INIT]),
        new: BTreeSet::from([f]),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];
    while let Some(mut n) = stack.pop() {
        let Some(eta) = n.new.pop_first() else {
            if let Some(existing) = nodes.iter_mut().find(|m| m.old == n.old && m.next == n.next) {
                existing.incoming.extend(n.incoming);
            } else {
                let id = nodes.len();
                stack.push(Pending {
                    incoming: BTreeSet::from([id]),
                    new: n.next.clone(),
                    old: BTreeSet::new(),
                    next: BTreeSet::new(),
                });
                nodes.push(Node {
                    incoming: n.incoming,
                    old: n.old,
                    next: n.next,
                });
            }
            continue;
        };
        if n.old.contains(&eta) {
            stack.push(n);
            continue;
        }
        let add_new = |p: &mut Pending, g: &Ltl| {
            if !p.old.contains(g) {
                p.new.insert(g.clone());
            }
        };
        match &eta {
            Ltl::True => stack.push(n),
            Ltl::False => {}
            Ltl::Atom(_) | Ltl::Not(_) => {
                if !n.old.contains(&complement(&eta)) {
                    n.old.insert(eta);
                    stack.push(n);
                }
            }
            Ltl::And(a, b) => {
                add_new(&mut n, a);
                add_new(&mut n, b);
                n.old.insert(eta.clone());
                stack.push(n);
            }
            Ltl::Next(a) => {
                n.next.insert((**a).clone());
                n.old.insert(eta.clone());
                stack.push(n);
            }
            Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                let mut left = n.clone();
                let mut right = n;
                match &eta {
                    Ltl::Or(..) => {
                        add_new(&mut left, a);
                        add_new(&mut right, b);
                    }
                    Ltl::Until(..) => {
                        add_new(&mut left, a);
                        left.next.insert(eta.clone());
                        add_new(&mut right, b);
                    }
                    _ => {
                        add_new(&mut left, b);
                        left.next.insert(eta.clone());
                        add_new(&mut right, a);
                        add_new(&mut right, b);
                    }
                }
                left.old.insert(eta.clone());
                right.old.insert(eta.clone());
                stack.push(right);
                stack.push(left);
            }
            Ltl::Implies(..) | Ltl::Finally(_) | Ltl::Globally(_) => unreachable!("desugared"),
        }
    }
    nodes
}

/// Translates `f` into a Büchi automaton accepting exactly its models.
/// The formula is brought into negation normal form first.
pub fn translate(f: &Ltl) -> BuchiAutomaton {
    let f = desugar(&f.nnf());
    let mut untils = BTreeSet::new();
    collect_untils(&f, &mut untils);
    let untils: Vec<Ltl> = untils.into_iter().collect();
    let nodes = expand(f);

    let guard = |n: &Node| {
        BoolExpr::conj(n.old.iter().filter_map(|g| match g {
            Ltl::Atom(a) => Some(BoolExpr::Atom(*a)),
            Ltl::Not(a) => match **a {
                Ltl::Atom(x) => Some(BoolExpr::not(BoolExpr::Atom(x))),
                _ => None,
            },
            _ => None,
        }))
    };
    let guards: Vec<BoolExpr> = nodes.iter().map(guard).collect();
    // fulfils[k][v]: node v is in the k-th acceptance set.
    let fulfils: Vec<Vec<bool>> = untils
        .iter()
        .map(|u| {
            let Ltl::Until(_, b) = u else { unreachable!() };
            nodes
                .iter()
                .map(|n| !n.old.contains(u) || n.old.contains(&**b))
                .collect()
        })
        .collect();
    // succs[v] = nodes having v in their incoming set.
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    let mut initial_nodes = Vec::new();
    for (w, n) in nodes.iter().enumerate() {
        for &v in &n.incoming {
            if v == INIT {
                initial_nodes.push(w);
            } else {
                succs[v].push(w);
            }
        }
    }

    // Degeneralise with a counter over the acceptance sets.
    let k = untils.len().max(1);
    let in_set = |c: usize, v: usize| untils.is_empty() || fulfils[c][v];
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut intern = |key: (usize, usize), order: &mut Vec<(usize, usize)>| -> usize {
        *index.entry(key).or_insert_with(|| {
            order.push(key);
            order.len() - 1
        })
    };
    let initial: Vec<usize> = initial_nodes.iter().map(|&v| intern((v, 0), &mut order)).collect();
    let mut edges: Vec<Vec<(usize, BoolExpr)>> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (v, c) = order[i];
        let c2 = if in_set(c, v) { (c + 1) % k } else { c };
        let mut out = Vec::new();
        for &w in &succs[v] {
            let t = intern((w, c2), &mut order);
            out.push((t, guards[v].clone()));
        }
        edges.push(out);
        i += 1;
    }
    let accepting = order.iter().map(|&(v, c)| c == 0 && in_set(0, v)).collect();
    BuchiAutomaton {
        num_states: order.len(),
        initial,
        edges,
        accepting,
    }
}

/// A graph whose nodes carry label sets and whose edges carry a tag
/// (for arenas: the action profile played).
#[derive(Debug, Clone, Default)]
pub struct LabelledGraph {
    pub labels: Vec<Label>,
    pub edges: Vec<Vec<(usize, usize)>>,
}

impl LabelledGraph {
    /// The arena as a graph, edges tagged with profiles; parallel edges to
    /// the same target keep the smallest profile.
    pub fn from_arena(arena: &Arena) -> LabelledGraph {
        let mut edges = Vec::with_capacity(arena.num_states());
        for s in 0..arena.num_states() {
            let mut out: Vec<(usize, usize)> = Vec::new();
            for p in 0..arena.num_profiles() {
                let t = arena.tr(s, p);
                if !out.iter().any(|&(u, _)| u == t) {
                    out.push((t, p));
                }
            }
            edges.push(out);
        }
        LabelledGraph {
            labels: arena.labels().to_vec(),
            edges,
        }
    }

    /// The lasso unrolled into a graph on its positions.
    pub fn from_lasso(lasso: &Lasso, arena: &Arena) -> LabelledGraph {
        let n = lasso.len();
        let steps: Vec<Step> = lasso.steps().copied().collect();
        LabelledGraph {
            labels: steps.iter().map(|s| arena.label(s.state).clone()).collect(),
            edges: (0..n)
                .map(|k| {
                    let next = if k + 1 < n { k + 1 } else { lasso.prefix.len() };
                    vec![(next, steps[k].profile)]
                })
                .collect(),
        }
    }
}

/// A position in the product: graph node, tag of the edge leaving it, and
/// automaton state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductStep {
    pub node: usize,
    pub tag: usize,
    pub aut: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductRun {
    pub prefix: Vec<ProductStep>,
    pub cycle: Vec<ProductStep>,
}

impl ProductRun {
    /// Projection to the graph, tags as profiles.
    pub fn project(&self) -> Lasso {
        let proj = |v: &[ProductStep]| v.iter().map(|p| Step::new(p.node, p.tag)).collect();
        Lasso::new(proj(&self.prefix), proj(&self.cycle))
    }
}

/// Searches the product of `g` and `aut` from `start` for a reachable cycle
/// through an accepting automaton state.
pub fn is_empty_product(g: &LabelledGraph, aut: &BuchiAutomaton, start: usize) -> Option<ProductRun> {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut tags: Vec<Vec<usize>> = Vec::new();
    let mut roots = Vec::new();
    for &q in &aut.initial {
        let id = *index.entry((start, q)).or_insert_with(|| {
            nodes.push((start, q));
            nodes.len() - 1
        });
        roots.push(id);
    }
    let mut i = 0;
    while i < nodes.len() {
        let (v, q) = nodes[i];
        let (mut out, mut out_tags) = (Vec::new(), Vec::new());
        for q2 in aut.step(q, &g.labels[v]) {
            for &(w, tag) in &g.edges[v] {
                let id = *index.entry((w, q2)).or_insert_with(|| {
                    nodes.push((w, q2));
                    nodes.len() - 1
                });
                if !out.contains(&id) {
                    out.push(id);
                    out_tags.push(tag);
                }
            }
        }
        succ.push(out);
        tags.push(out_tags);
        i += 1;
    }
    let alive = vec![true; nodes.len()];
    let accepting_in_cycle = graph::sccs(&succ, &alive)
        .into_iter()
        .filter(|c| graph::is_nontrivial(&succ, c))
        .flat_map(|c| c.into_iter().filter(|&x| aut.is_accepting(nodes[x].1)).collect::<Vec<_>>())
        .min()?;
    let x = accepting_in_cycle;
    let prefix_nodes = graph::shortest_path(&succ, &roots, &alive, |v| v == x)?;
    let mut cycle_nodes = vec![x];
    cycle_nodes.extend(graph::shortest_nonempty_path(&succ, x, &alive, |v| v == x)?);
    let step = |from: usize, to: usize| {
        let k = succ[from].iter().position(|&w| w == to).expect("product edge");
        ProductStep {
            node: nodes[from].0,
            tag: tags[from][k],
            aut: nodes[from].1,
        }
    };
    let prefix = prefix_nodes.windows(2).map(|w| step(w[0], w[1])).collect();
    let cycle = cycle_nodes.windows(2).map(|w| step(w[0], w[1])).collect();
    Some(ProductRun { prefix, cycle })
}

/// Whether the label word of the lasso is accepted by `aut`.
pub fn lasso_accepted(aut: &BuchiAutomaton, lasso: &Lasso, arena: &Arena) -> bool {
    is_empty_product(&LabelledGraph::from_lasso(lasso, arena), aut, 0).is_some()
}
