//! Exact feasibility of edge-flow linear programs over graphs with
//! rational vertex weights, and extraction of witness cycles from feasible
//! flows.
//!
//! A feasible circulation `x` with `Σ x_e ≥ 1`, nonnegative weighted totals
//! in every dimension and the required visits describes a cycle whose
//! averages meet the thresholds. Programs are solved per strongly connected
//! component so that the circulation can be realised as one closed walk.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::buchi::BuchiAutomaton;
use crate::formula::Gr1Formula;
use crate::graph;
use crate::lasso_search::{build_streett_product, RestrictedArena, StreettProduct};
use crate::model::{Arena, Lasso, StateId};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
}

/// Constraints over nonnegative variables `x_0 … x_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub rows: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            rows: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.num_vars));
        self.rows.push(Constraint { coeffs, rel, rhs });
    }

    /// Whether `x` satisfies every constraint and nonnegativity exactly.
    pub fn check(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().all(|row| {
                let lhs: Rational = row.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
                match row.rel {
                    Relation::Le => lhs <= row.rhs,
                    Relation::Ge => lhs >= row.rhs,
                    Relation::Eq => lhs == row.rhs,
                }
            })
    }
}

/// Phase-one simplex with Bland's rule: some feasible point, or `None`.
pub fn feasible(lp: &LinearProgram) -> Option<Vec<Rational>> {
    let m = lp.rows.len();
    let n = lp.num_vars;
    if m == 0 {
        return Some(vec![Rational::zero(); n]);
    }
    // Normalise right-hand sides to be nonnegative.
    let rows: Vec<(Vec<(usize, Rational)>, Relation, Rational)> = lp
        .rows
        .iter()
        .map(|r| {
            if r.rhs.is_negative() {
                let rel = match r.rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (r.coeffs.iter().map(|(j, a)| (*j, -a)).collect(), rel, -&r.rhs)
            } else {
                (r.coeffs.clone(), r.rel, r.rhs.clone())
            }
        })
        .collect();
    let num_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let num_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = n + num_slack + num_art;
    let rhs = cols;
    let mut t = vec![vec![Rational::zero(); cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut is_art = vec![false; cols];
    let (mut next_slack, mut next_art) = (n, n + num_slack);
    for (r, (coeffs, rel, b)) in rows.iter().enumerate() {
        for (j, a) in coeffs {
            t[r][*j] += a;
        }
        t[r][rhs] = b.clone();
        match rel {
            Relation::Le => {
                t[r][next_slack] = Rational::one();
                basis[r] = next_slack;
                next_slack += 1;
            }
            Relation::Ge | Relation::Eq => {
                if *rel == Relation::Ge {
                    t[r][next_slack] = -Rational::one();
                    next_slack += 1;
                }
                t[r][next_art] = Rational::one();
                is_art[next_art] = true;
                basis[r] = next_art;
                next_art += 1;
            }
        }
    }
    // Reduced costs of "minimise the sum of artificials".
    let mut z = vec![Rational::zero(); cols + 1];
    for (j, art) in is_art.iter().enumerate() {
        if *art {
            z[j] = Rational::one();
        }
    }
    for r in 0..m {
        if is_art[basis[r]] {
            for j in 0..=cols {
                let v = t[r][j].clone();
                z[j] -= &v;
            }
        }
    }
    loop {
        let Some(enter) = (0..cols).find(|&j| z[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for r in 0..m {
            if !t[r][enter].is_positive() {
                continue;
            }
            let ratio = &t[r][rhs] / &t[r][enter];
            let better = match &leave {
                None => true,
                Some((lr, lratio)) => ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let (pr, _) = leave.expect("phase one is bounded");
        pivot(&mut t, &mut z, pr, enter);
        basis[pr] = enter;
    }
    if !z[rhs].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for r in 0..m {
        if basis[r] < n {
            x[basis[r]] = t[r][rhs].clone();
        }
    }
    debug_assert!(lp.check(&x));
    Some(x)
}

fn pivot(t: &mut [Vec<Rational>], z: &mut [Rational], pr: usize, pc: usize) {
    let p = t[pr][pc].clone();
    for v in t[pr].iter_mut() {
        if !v.is_zero() {
            *v = &*v / &p;
        }
    }
    let prow = t[pr].clone();
    let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
    for (r, row) in t.iter_mut().enumerate() {
        if r == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for &j in &nz {
            let d = &f * &prow[j];
            row[j] -= &d;
        }
    }
    if !z[pc].is_zero() {
        let f = z[pc].clone();
        for &j in &nz {
            let d = &f * &prow[j];
            z[j] -= &d;
        }
    }
}

/// A directed graph with per-dimension rational vertex weights and marked
/// vertex sets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightedEdgeGraph {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    /// `weights[d][v]`, already shifted by the threshold of dimension `d`.
    pub weights: Vec<Vec<Rational>>,
    /// Sets that must each be visited (`V(θ_r)`).
    pub theta: Vec<Vec<bool>>,
    /// Sets of which one must be avoided (`V(ψ_l)`).
    pub psi: Vec<Vec<bool>>,
}

impl WeightedEdgeGraph {
    fn base_lp(&self) -> LinearProgram {
        let e = self.edges.len();
        let mut lp = LinearProgram::new(e);
        let one = Rational::one;
        // At least one edge is used.
        lp.add((0..e).map(|k| (k, one())).collect(), Relation::Ge, one());
        // Nonnegative total weight in every dimension.
        for w in &self.weights {
            let coeffs = (0..e)
                .map(|k| (k, w[self.edges[k].0].clone()))
                .filter(|(_, a)| !a.is_zero())
                .collect();
            lp.add(coeffs, Relation::Ge, Rational::zero());
        }
        // Flow conservation.
        for v in 0..self.num_vertices {
            let mut coeffs: Vec<(usize, Rational)> = Vec::new();
            for (k, &(s, t)) in self.edges.iter().enumerate() {
                let c = (t == v) as i64 - (s == v) as i64;
                if c != 0 {
                    coeffs.push((k, Rational::from_int(c)));
                }
            }
            if !coeffs.is_empty() {
                lp.add(coeffs, Relation::Eq, Rational::zero());
            }
        }
        lp
    }

    fn leaving(&self, set: &[bool]) -> Vec<(usize, Rational)> {
        (0..self.edges.len())
            .filter(|&k| set[self.edges[k].0])
            .map(|k| (k, Rational::one()))
            .collect()
    }
}

/// Every consequent set visited, all dimensions nonnegative.
pub fn build_lp_theta(g: &WeightedEdgeGraph) -> LinearProgram {
    let mut lp = g.base_lp();
    for set in &g.theta {
        lp.add(g.leaving(set), Relation::Ge, Rational::one());
    }
    lp
}

/// The `l`-th antecedent set avoided, all dimensions nonnegative.
pub fn build_lp_psi(g: &WeightedEdgeGraph, l: usize) -> LinearProgram {
    let mut lp = g.base_lp();
    lp.add(g.leaving(&g.psi[l]), Relation::Eq, Rational::zero());
    lp
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("a feasible flow exists but no connected support was found to build a witness cycle")]
pub struct WitnessGapError;

/// What the cycle must satisfy besides the weight constraints.
#[derive(Debug, Clone, Copy)]
pub enum CycleSpec<'a> {
    Gr1(&'a Gr1Formula),
    Buchi(&'a BuchiAutomaton),
}

/// Largest connector multiplicity tried when a flow splits into pieces.
const MAX_CONNECTOR_REPEAT: u32 = 1 << 16;

/// Euler circuit of the integer-scaled flow, if its support is connected.
fn euler_circuit(edges: &[(usize, usize)], mult: &[u64]) -> Option<Vec<usize>> {
    let used: Vec<usize> = (0..edges.len()).filter(|&k| mult[k] > 0).collect();
    let first = *used.first()?;
    let mut out: HashMap<usize, Vec<usize>> = HashMap::new();
    for &k in &used {
        out.entry(edges[k].0).or_default().push(k);
    }
    let mut left = mult.to_vec();
    let mut ptr: HashMap<usize, usize> = HashMap::new();
    // Hierholzer over edge indices.
    let mut stack = vec![(edges[first].0, usize::MAX)];
    let mut circuit: Vec<usize> = Vec::new();
    while let Some(&(v, via)) = stack.last() {
        let list = out.get(&v).map(Vec::as_slice).unwrap_or(&[]);
        let p = ptr.entry(v).or_insert(0);
        while *p < list.len() && left[list[*p]] == 0 {
            *p += 1;
        }
        if *p < list.len() {
            let k = list[*p];
            left[k] -= 1;
            stack.push((edges[k].1, k));
        } else {
            stack.pop();
            if via != usize::MAX {
                circuit.push(via);
            }
        }
    }
    if left.iter().any(|&c| c > 0) {
        return None;
    }
    circuit.reverse();
    Some(circuit)
}

/// Integer multiplicities proportional to `x`.
fn scale(x: &[Rational]) -> Option<Vec<u64>> {
    let l = Rational::lcm_denominators(x.iter());
    x.iter()
        .map(|v| {
            let n: BigInt = v.numer() * (&l / v.denom());
            n.to_u64()
        })
        .collect()
}

struct Scc<'a> {
    graph: &'a WeightedEdgeGraph,
    /// Local vertex -> global product node.
    nodes: Vec<usize>,
}

fn sub_graph(
    g: &WeightedEdgeGraph,
    succ: &[Vec<usize>],
    comp: &[usize],
) -> (WeightedEdgeGraph, Vec<usize>) {
    let local: HashMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges = Vec::new();
    for &v in comp {
        for &w in &succ[v] {
            if let Some(&lw) = local.get(&w) {
                edges.push((local[&v], lw));
            }
        }
    }
    let pick = |sets: &[Vec<bool>]| -> Vec<Vec<bool>> {
        sets.iter().map(|s| comp.iter().map(|&v| s[v]).collect()).collect()
    };
    (
        WeightedEdgeGraph {
            num_vertices: comp.len(),
            edges,
            weights: g
                .weights
                .iter()
                .map(|w| comp.iter().map(|&v| w[v].clone()).collect())
                .collect(),
            theta: pick(&g.theta),
            psi: pick(&g.psi),
        },
        comp.to_vec(),
    )
}

/// Checks a closed walk (as local edge indices) against the weight and
/// visit requirements.
fn walk_ok(g: &WeightedEdgeGraph, walk: &[usize], avoid: Option<&[bool]>) -> bool {
    if walk.is_empty() {
        return false;
    }
    let srcs: Vec<usize> = walk.iter().map(|&k| g.edges[k].0).collect();
    g.weights.iter().all(|w| srcs.iter().map(|&v| w[v].clone()).sum::<Rational>() >= Rational::zero())
        && g.theta.iter().all(|set| srcs.iter().any(|&v| set[v]))
        && avoid.is_none_or(|set| srcs.iter().all(|&v| !set[v]))
}

impl Scc<'_> {
    /// A closed walk realising (a piece of) the flow `x`.
    fn witness(&self, x: &[Rational], avoid: Option<&[bool]>) -> Option<Vec<usize>> {
        let g = self.graph;
        let mult = scale(x)?;
        if let Some(c) = euler_circuit(&g.edges, &mult) {
            return Some(c);
        }
        // Split the support into weakly connected pieces.
        let mut parent: Vec<usize> = (0..g.num_vertices).collect();
        fn find(p: &mut [usize], v: usize) -> usize {
            let mut r = v;
            while p[r] != r {
                r = p[r];
            }
            p[v] = r;
            r
        }
        for (k, &(s, t)) in g.edges.iter().enumerate() {
            if mult[k] > 0 {
                let (a, b) = (find(&mut parent, s), find(&mut parent, t));
                parent[a] = b;
            }
        }
        let mut pieces: Vec<(usize, Vec<u64>)> = Vec::new();
        for (k, &(s, _)) in g.edges.iter().enumerate() {
            if mult[k] == 0 {
                continue;
            }
            let root = find(&mut parent, s);
            let idx = match pieces.iter().position(|(r, _)| *r == root) {
                Some(i) => i,
                None => {
                    pieces.push((root, vec![0; g.edges.len()]));
                    pieces.len() - 1
                }
            };
            pieces[idx].1[k] = mult[k];
        }
        let circuits: Vec<Vec<usize>> = pieces
            .iter()
            .map(|(_, m)| euler_circuit(&g.edges, m).expect("each piece is a connected circulation"))
            .collect();
        for c in &circuits {
            if walk_ok(g, c, avoid) {
                return Some(c.clone());
            }
        }
        // Join the pieces with connecting paths, repeating the pieces.
        let succ_local = {
            let mut s = vec![Vec::new(); g.num_vertices];
            for &(a, b) in &g.edges {
                s[a].push(b);
            }
            s
        };
        let inside: Vec<bool> = (0..g.num_vertices)
            .map(|v| avoid.is_none_or(|set| !set[v]))
            .collect();
        let edge_index = |a: usize, b: usize| g.edges.iter().position(|&e| e == (a, b)).expect("edge");
        let mut connectors: Vec<Vec<usize>> = Vec::new();
        for i in 0..circuits.len() {
            let from = g.edges[circuits[i][0]].0;
            let to = g.edges[circuits[(i + 1) % circuits.len()][0]].0;
            let path = graph::shortest_path(&succ_local, &[from], &inside, |v| v == to)?;
            connectors.push(path.windows(2).map(|w| edge_index(w[0], w[1])).collect());
        }
        let mut repeat = 1u32;
        while repeat <= MAX_CONNECTOR_REPEAT {
            let mut walk = Vec::new();
            for (c, conn) in circuits.iter().zip(&connectors) {
                for _ in 0..repeat {
                    walk.extend_from_slice(c);
                }
                walk.extend_from_slice(conn);
            }
            if walk_ok(g, &walk, avoid) {
                return Some(walk);
            }
            repeat *= 2;
        }
        None
    }
}

/// Weights of every product node, looked up through its arena state.
fn node_weights(p: &StreettProduct, dims: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    dims.iter()
        .map(|w| p.state_of.iter().map(|&s| w[s].clone()).collect())
        .collect()
}

/// Searches the restricted arena for a lasso whose cycle has nonnegative
/// average in every dimension of `dims` (indexed by arena state) and
/// satisfies `spec`. `Err` means such a cycle exists but no witness walk
/// could be built.
pub fn mp_lasso_search(
    arena: &Arena,
    ra: &RestrictedArena,
    dims: &[Vec<Rational>],
    spec: CycleSpec<'_>,
) -> Result<Option<Lasso>, WitnessGapError> {
    let product = match spec {
        CycleSpec::Gr1(_) => build_streett_product(arena, ra, &[], None),
        CycleSpec::Buchi(aut) => build_streett_product(arena, ra, &[], Some(aut)),
    };
    let (theta, psi): (Vec<Vec<bool>>, Vec<Vec<bool>>) = match spec {
        CycleSpec::Gr1(f) => {
            let holds = |e: &crate::formula::BoolExpr| -> Vec<bool> {
                product.state_of.iter().map(|&s| e.eval(arena.label(s))).collect()
            };
            (
                f.consequents.iter().map(holds).collect(),
                f.antecedents.iter().map(holds).collect(),
            )
        }
        CycleSpec::Buchi(_) => (vec![product.pairs[0].c.clone()], Vec::new()),
    };
    let full = WeightedEdgeGraph {
        num_vertices: product.len(),
        edges: Vec::new(),
        weights: node_weights(&product, dims),
        theta,
        psi,
    };
    let all = vec![true; product.len()];
    let reach = graph::reachable(&product.succ, &product.starts, &all);
    let mut gap = false;

    // (LP kind, alive mask) in the fixed search order: θ first, then each ψ_l.
    let mut branches: Vec<(Option<usize>, Vec<bool>)> = vec![(None, reach.clone())];
    for l in 0..full.psi.len() {
        let alive: Vec<bool> = (0..product.len()).map(|v| reach[v] && !full.psi[l][v]).collect();
        branches.push((Some(l), alive));
    }
    for (kind, alive) in branches {
        let mut comps = graph::sccs(&product.succ, &alive);
        comps.reverse();
        for comp in comps {
            if !graph::is_nontrivial(&product.succ, &comp) {
                continue;
            }
            let (mut sub, nodes) = sub_graph(&full, &product.succ, &comp);
            let lp = match kind {
                None => build_lp_theta(&sub),
                Some(l) => {
                    sub.theta.clear();
                    build_lp_psi(&sub, l)
                }
            };
            let Some(x) = feasible(&lp) else { continue };
            let scc = Scc { graph: &sub, nodes };
            let avoid = kind.map(|l| sub.psi[l].clone());
            let Some(walk) = scc.witness(&x, avoid.as_deref()) else {
                gap = true;
                continue;
            };
            return Ok(Some(lasso_from_walk(&product, &scc, &walk)));
        }
    }
    if gap {
        Err(WitnessGapError)
    } else {
        Ok(None)
    }
}

fn lasso_from_walk(p: &StreettProduct, scc: &Scc<'_>, walk: &[usize]) -> Lasso {
    let g = scc.graph;
    let cycle: Vec<usize> = walk.iter().map(|&k| scc.nodes[g.edges[k].0]).collect();
    let all = vec![true; p.len()];
    let entry = cycle[0];
    let path = graph::shortest_path(&p.succ, &p.starts, &all, |v| v == entry).expect("reachable");
    p.project(&path[..path.len() - 1], &cycle)
}

/// Per-dimension weights `w(s) - shift` as rationals.
pub fn shifted(weights: &[i64], shift: &Rational) -> Vec<Rational> {
    weights.iter().map(|&w| Rational::from_int(w) - shift).collect()
}

/// Negated shifted weights `shift - w(s)`, for "at most" constraints.
pub fn shifted_below(weights: &[Rational], shift: &Rational) -> Vec<Rational> {
    weights.iter().map(|w| shift - w).collect()
}

/// Average of each dimension along a cycle of arena states.
pub fn cycle_averages(dims: &[Vec<Rational>], cycle: &[StateId]) -> Vec<Rational> {
    let len = Rational::from_int(cycle.len() as i64);
    dims.iter()
        .map(|w| cycle.iter().map(|&s| w[s].clone()).sum::<Rational>() / &len)
        .collect()
}
