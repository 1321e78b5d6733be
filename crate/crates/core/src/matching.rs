//! Maximum cardinality matching on general graphs (Edmonds' blossom
//! contraction, breadth-first augmenting path search).

use std::collections::VecDeque;

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    stamp: Vec<u32>,
    clock: u32,
    queue: VecDeque<usize>,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        Blossom {
            adj,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            stamp: vec![0; n],
            clock: 0,
            queue: VecDeque::new(),
        }
    }

    fn lca(&mut self, mut a: usize, mut b: usize) -> usize {
        self.clock += 1;
        loop {
            a = self.base[a];
            self.stamp[a] = self.clock;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if self.stamp[b] == self.clock {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Searches an augmenting path from the exposed vertex `root`; returns its
    /// other endpoint.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|b| *b = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
    }
}

/// Returns `mate[v]` for a maximum matching of the graph on `n` vertices.
/// Self loops and repeated edges are ignored.
pub fn maximum_matching(n: usize, edges: &[(usize, usize)]) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let mut b = Blossom::new(&adj);
    // greedy start
    for v in 0..n {
        if b.mate[v] == NONE {
            if let Some(&u) = adj[v].iter().find(|&&u| b.mate[u] == NONE) {
                b.mate[v] = u;
                b.mate[u] = v;
            }
        }
    }
    for v in 0..n {
        if b.mate[v] == NONE {
            if let Some(end) = b.find_path(v) {
                b.augment(end);
            }
        }
    }
    b.mate
        .into_iter()
        .map(|m| if m == NONE { None } else { Some(m) })
        .collect()
}

pub fn matching_size(mate: &[Option<usize>]) -> usize {
    mate.iter().filter(|m| m.is_some()).count() / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Exhaustive maximum matching by recursion over the lowest unmatched vertex.
    fn brute_force(n: usize, edges: &[(usize, usize)]) -> usize {
        fn go(v: usize, n: usize, used: &mut Vec<bool>, adj: &[Vec<bool>]) -> usize {
            if v >= n {
                return 0;
            }
            if used[v] {
                return go(v + 1, n, used, adj);
            }
            used[v] = true;
            let mut best = go(v + 1, n, used, adj);
            for u in v + 1..n {
                if !used[u] && adj[v][u] {
                    used[u] = true;
                    best = best.max(1 + go(v + 1, n, used, adj));
                    used[u] = false;
                }
            }
            used[v] = false;
            best
        }
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edges {
            if u != v {
                adj[u][v] = true;
                adj[v][u] = true;
            }
        }
        go(0, n, &mut vec![false; n], &adj)
    }

    fn check_valid(n: usize, edges: &[(usize, usize)], mate: &[Option<usize>]) {
        assert_eq!(mate.len(), n);
        for (v, m) in mate.iter().enumerate() {
            if let Some(u) = *m {
                assert_eq!(mate[u], Some(v));
                assert!(edges.contains(&(u, v)) || edges.contains(&(v, u)));
            }
        }
    }

    #[test]
    fn odd_cycle_leaves_one_vertex() {
        let edges = [(0, 1), (1, 2), (2, 0)];
        let mate = maximum_matching(3, &edges);
        assert_eq!(matching_size(&mate), 1);
    }

    #[test]
    fn blossom_is_needed() {
        // a 5-cycle with a pendant on two ends, greedy alone can get stuck
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 5), (3, 6), (2, 7)];
        let mate = maximum_matching(8, &edges);
        check_valid(8, &edges, &mate);
        assert_eq!(matching_size(&mate), brute_force(8, &edges));
    }

    proptest! {
        #[test]
        fn agrees_with_exhaustive_search(
            n in 1usize..10,
            raw in proptest::collection::vec((0usize..10, 0usize..10), 0..25),
        ) {
            let edges: Vec<(usize, usize)> = raw.into_iter().map(|(a, b)| (a % n, b % n)).collect();
            let mate = maximum_matching(n, &edges);
            check_valid(n, &edges, &mate);
            prop_assert_eq!(matching_size(&mate), brute_force(n, &edges));
        }
    }
}
