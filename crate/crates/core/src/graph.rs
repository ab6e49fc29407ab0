//! Small explicit-graph helpers shared by the solvers: reachability,
//! strongly connected components and shortest paths, all over adjacency
//! lists restricted by an `alive` mask.

use std::collections::VecDeque;

/// Nodes reachable from `starts` through alive nodes.
pub fn reachable(succ: &[Vec<usize>], starts: &[usize], alive: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut stack: Vec<usize> = Vec::new();
    for &s in starts {
        if alive[s] && !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &w in &succ[v] {
            if alive[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Strongly connected components of the alive subgraph (iterative Tarjan).
/// Components come out in reverse topological order.
pub fn sccs(succ: &[Vec<usize>], alive: &[bool]) -> Vec<Vec<usize>> {
    let n = succ.len();
    const NONE: usize = usize::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0usize;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if !alive[root] || index[root] != NONE {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, next)) = call.last() {
            if next < succ[v].len() {
                let w = succ[v][next];
                call.last_mut().expect("nonempty").1 += 1;
                if !alive[w] {
                    continue;
                }
                if index[w] == NONE {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Whether a component contains a cycle (more than one node, or a self-loop).
pub fn is_nontrivial(succ: &[Vec<usize>], comp: &[usize]) -> bool {
    comp.len() > 1 || succ[comp[0]].contains(&comp[0])
}

/// Shortest path (as a node sequence, both ends included) from any node of
/// `from` to a node satisfying `target`, moving only through `inside`.
/// A start node that already satisfies `target` yields a one-node path.
pub fn shortest_path(
    succ: &[Vec<usize>],
    from: &[usize],
    inside: &[bool],
    target: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let n = succ.len();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in from {
        if inside[s] && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        if target(v) {
            let mut path = vec![v];
            let mut cur = v;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in &succ[v] {
            if inside[w] && !seen[w] {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Shortest nonempty path from `v` back to a node satisfying `target`
/// (at least one edge), through `inside`. Returned without the leading `v`.
pub fn shortest_nonempty_path(
    succ: &[Vec<usize>],
    v: usize,
    inside: &[bool],
    target: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let starts: Vec<usize> = succ[v].iter().copied().filter(|&w| inside[w]).collect();
    shortest_path(succ, &starts, inside, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tarjan_finds_components() {
        // 0 -> 1 -> 2 -> 1, 2 -> 3, 3 self-loop, 4 isolated
        let succ = vec![vec![1], vec![2], vec![1, 3], vec![3], vec![]];
        let alive = vec![true; 5];
        let mut comps = sccs(&succ, &alive);
        comps.sort();
        assert_eq!(comps, vec![vec![0], vec![1, 2], vec![3], vec![4]]);
        assert!(is_nontrivial(&succ, &[3]));
        assert!(!is_nontrivial(&succ, &[0]));
    }

    #[test]
    fn masks_are_respected() {
        let succ = vec![vec![1], vec![2], vec![0]];
        let alive = vec![true, false, true];
        assert_eq!(reachable(&succ, &[0], &alive), vec![true, false, false]);
        assert_eq!(sccs(&succ, &alive).len(), 2);
    }

    #[test]
    fn paths() {
        let succ = vec![vec![1, 2], vec![3], vec![3], vec![0]];
        let inside = vec![true; 4];
        assert_eq!(shortest_path(&succ, &[0], &inside, |v| v == 3).unwrap().len(), 3);
        assert_eq!(shortest_path(&succ, &[0], &inside, |v| v == 0).unwrap(), vec![0]);
        assert_eq!(shortest_nonempty_path(&succ, 0, &inside, |v| v == 0).unwrap().len(), 3);
    }
}
