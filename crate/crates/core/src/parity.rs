//! Turn-based max-parity games solved with Zielonka's recursive algorithm,
//! with memoryless winning strategies for both players.
//!
//! Player 0 ("even") wins a play when the highest priority seen infinitely
//! often is even; player 1 ("odd") otherwise.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<u8>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParitySolution {
    /// Winning player (0 or 1) of every node.
    pub winner: Vec<u8>,
    /// For nodes won by their owner: a successor that keeps winning.
    /// `usize::MAX` elsewhere.
    pub strategy: Vec<usize>,
}

impl ParitySolution {
    pub fn region(&self, player: u8) -> Vec<usize> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == player).collect()
    }
}

const NONE: usize = usize::MAX;

impl ParityGame {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (v, ws) in self.succ.iter().enumerate() {
            for &w in ws {
                pred[w].push(v);
            }
        }
        pred
    }

    /// Attractor of `target` for `player` inside `sub`; records an
    /// attracting edge for `player`'s nodes in `strategy`.
    fn attractor(
        &self,
        pred: &[Vec<usize>],
        sub: &[bool],
        target: &[usize],
        player: u8,
        strategy: &mut [usize],
    ) -> Vec<bool> {
        let mut inside = vec![false; self.len()];
        let mut count: Vec<usize> = vec![0; self.len()];
        for v in 0..self.len() {
            if sub[v] {
                count[v] = self.succ[v].iter().filter(|&&w| sub[w]).count();
            }
        }
        let mut queue: Vec<usize> = Vec::new();
        for &t in target {
            if sub[t] && !inside[t] {
                inside[t] = true;
                queue.push(t);
            }
        }
        while let Some(w) = queue.pop() {
            for &v in &pred[w] {
                if !sub[v] || inside[v] {
                    continue;
                }
                if self.owner[v] == player {
                    inside[v] = true;
                    strategy[v] = w;
                    queue.push(v);
                } else {
                    count[v] -= 1;
                    if count[v] == 0 {
                        inside[v] = true;
                        queue.push(v);
                    }
                }
            }
        }
        inside
    }

    fn zielonka(&self, pred: &[Vec<usize>], sub: &[bool], strategy: &mut [usize]) -> [Vec<bool>; 2] {
        let n = self.len();
        let Some(d) = (0..n).filter(|&v| sub[v]).map(|v| self.priority[v]).max() else {
            return [vec![false; n], vec![false; n]];
        };
        let p = (d % 2) as u8;
        let q = 1 - p;
        let top: Vec<usize> = (0..n).filter(|&v| sub[v] && self.priority[v] == d).collect();
        let mut attr_strat = vec![NONE; n];
        let a = self.attractor(pred, sub, &top, p, &mut attr_strat);
        let rest: Vec<bool> = (0..n).map(|v| sub[v] && !a[v]).collect();
        let w1 = self.zielonka(pred, &rest, strategy);
        if !w1[q as usize].iter().any(|&b| b) {
            for v in 0..n {
                if !a[v] || self.owner[v] != p {
                    continue;
                }
                strategy[v] = if attr_strat[v] != NONE {
                    attr_strat[v]
                } else {
                    *self.succ[v].iter().find(|&&w| sub[w]).expect("subgame is total")
                };
            }
            let mut win = [vec![false; n], vec![false; n]];
            win[p as usize] = sub.to_vec();
            return win;
        }
        let opp_won: Vec<usize> = (0..n).filter(|&v| w1[q as usize][v]).collect();
        let mut b_strat = vec![NONE; n];
        let b = self.attractor(pred, sub, &opp_won, q, &mut b_strat);
        for v in 0..n {
            if b[v] && !w1[q as usize][v] && self.owner[v] == q {
                strategy[v] = b_strat[v];
            }
        }
        let rest2: Vec<bool> = (0..n).map(|v| sub[v] && !b[v]).collect();
        let mut w2 = self.zielonka(pred, &rest2, strategy);
        for v in 0..n {
            if b[v] {
                w2[q as usize][v] = true;
            }
        }
        w2
    }

    /// Solves the game. Every node needs at least one successor.
    pub fn solve(&self) -> ParitySolution {
        assert!(self.succ.iter().all(|s| !s.is_empty()), "parity game has a dead end");
        let pred = self.predecessors();
        let mut strategy = vec![NONE; self.len()];
        let all = vec![true; self.len()];
        let win = self.zielonka(&pred, &all, &mut strategy);
        let winner: Vec<u8> = (0..self.len()).map(|v| if win[0][v] { 0 } else { 1 }).collect();
        for v in 0..self.len() {
            if winner[v] != self.owner[v] {
                strategy[v] = NONE;
            }
        }
        ParitySolution { winner, strategy }
    }
}
