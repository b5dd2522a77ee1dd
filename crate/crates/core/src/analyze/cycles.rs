//! Elementary cycle enumeration (Johnson, 1975).

/// Upper bound on the number of cycles reported by the analyses.
pub const CYCLE_CAP: usize = 10_000;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CycleSet {
    /// Each cycle starts at its smallest node index.
    pub cycles: Vec<Vec<usize>>,
    /// Set when enumeration stopped at the cap.
    pub truncated: bool,
}

/// All elementary cycles of the digraph with adjacency lists `adj`,
/// self-loops included, up to `cap` cycles.
///
/// Every cycle is reported once, starting at its smallest node. The result
/// is sorted.
pub fn elementary_cycles(adj: &[Vec<usize>], cap: usize) -> CycleSet {
    let n = adj.len();
    let mut adj: Vec<Vec<usize>> = adj.to_vec();
    for succ in &mut adj {
        succ.sort_unstable();
        succ.dedup();
    }
    let mut search = Search {
        adj: &adj,
        allowed: vec![false; n],
        blocked: vec![false; n],
        blocked_by: vec![Vec::new(); n],
        stack: Vec::new(),
        out: CycleSet::default(),
        cap,
    };
    for start in 0..n {
        if search.out.truncated {
            break;
        }
        let component = component_of(&adj, start);
        let cyclic = component.len() > 1 || adj[start].contains(&start);
        if !cyclic {
            continue;
        }
        for v in 0..n {
            search.allowed[v] = false;
            search.blocked[v] = false;
            search.blocked_by[v].clear();
        }
        for &v in &component {
            search.allowed[v] = true;
        }
        search.circuit(start, start);
    }
    search.out.cycles.sort();
    search.out
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    allowed: Vec<bool>,
    blocked: Vec<bool>,
    blocked_by: Vec<Vec<usize>>,
    stack: Vec<usize>,
    out: CycleSet,
    cap: usize,
}

impl Search<'_> {
    fn circuit(&mut self, v: usize, start: usize) -> bool {
        let mut found = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for &w in &self.adj[v] {
            if self.out.truncated {
                break;
            }
            if !self.allowed[w] {
                continue;
            }
            if w == start {
                if self.out.cycles.len() == self.cap {
                    self.out.truncated = true;
                    break;
                }
                self.out.cycles.push(self.stack.clone());
                found = true;
            } else if !self.blocked[w] && self.circuit(w, start) {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &w in &self.adj[v] {
                if self.allowed[w] && !self.blocked_by[w].contains(&v) {
                    self.blocked_by[w].push(v);
                }
            }
        }
        self.stack.pop();
        found
    }

    fn unblock(&mut self, v: usize) {
        let mut work = vec![v];
        while let Some(u) = work.pop() {
            if !self.blocked[u] {
                continue;
            }
            self.blocked[u] = false;
            work.append(&mut self.blocked_by[u]);
        }
    }
}

/// The strongly connected component of `start` in the subgraph induced by
/// nodes `>= start`, sorted.
fn component_of(adj: &[Vec<usize>], start: usize) -> Vec<usize> {
    let reach = |forward: bool| {
        let mut seen = vec![false; adj.len()];
        let mut work = vec![start];
        seen[start] = true;
        while let Some(u) = work.pop() {
            let next: Vec<usize> = if forward {
                adj[u].clone()
            } else {
                (start..adj.len())
                    .filter(|&p| adj[p].contains(&u))
                    .collect()
            };
            for w in next {
                if w >= start && !seen[w] {
                    seen[w] = true;
                    work.push(w);
                }
            }
        }
        seen
    };
    let fwd = reach(true);
    let bwd = reach(false);
    (start..adj.len()).filter(|&v| fwd[v] && bwd[v]).collect()
}
