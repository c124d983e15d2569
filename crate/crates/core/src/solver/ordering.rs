//! Fill-reducing ordering by level-structure nested dissection.
//!
//! The graph is split at the middle level of a breadth-first level structure
//! rooted at a pseudo-peripheral vertex; both halves are ordered
//! recursively and the separator is numbered last.

use std::collections::VecDeque;

use crate::sparse::CsrMatrix;

const LEAF_SIZE: usize = 48;

struct Graph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    /// Pattern of `A + Aᵀ` without the diagonal.
    fn from_matrix(a: &CsrMatrix) -> Self {
        let n = a.nrows;
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            for (j, _) in a.row(i) {
                if i != j {
                    lists[i].push(j);
                    lists[j].push(i);
                }
            }
        }
        let mut ptr = Vec::with_capacity(n + 1);
        let mut adj = Vec::new();
        ptr.push(0);
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
            adj.extend_from_slice(l);
            ptr.push(adj.len());
        }
        Self { ptr, adj }
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.ptr[v]..self.ptr[v + 1]]
    }

    fn degree(&self, v: usize) -> usize {
        self.ptr[v + 1] - self.ptr[v]
    }
}

struct Dissector<'g> {
    graph: &'g Graph,
    member: Vec<u32>,
    visited: Vec<u32>,
    stamp: u32,
    order: Vec<usize>,
}

impl Dissector<'_> {
    fn next_stamp(&mut self) -> u32 {
        self.stamp += 1;
        self.stamp
    }

    /// Level structure of the component containing `root`, restricted to
    /// vertices marked with `set`.
    fn levels(&mut self, root: usize, set: u32) -> Vec<Vec<usize>> {
        let seen = self.next_stamp();
        self.visited[root] = seen;
        let mut levels = vec![vec![root]];
        loop {
            let mut next = Vec::new();
            for &v in levels.last().unwrap() {
                for &w in self.graph.neighbors(v) {
                    if self.member[w] == set && self.visited[w] != seen {
                        self.visited[w] = seen;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return levels;
            }
            levels.push(next);
        }
    }

    fn pseudo_peripheral(&mut self, start: usize, set: u32) -> (usize, Vec<Vec<usize>>) {
        let mut root = start;
        let mut levels = self.levels(root, set);
        loop {
            let last = levels.last().unwrap();
            let cand = *last
                .iter()
                .min_by_key(|&&v| (self.graph.degree(v), v))
                .unwrap();
            let trial = self.levels(cand, set);
            if trial.len() > levels.len() {
                root = cand;
                levels = trial;
            } else {
                return (root, levels);
            }
        }
    }

    fn order_leaf(&mut self, nodes: &[usize]) {
        // breadth-first within the leaf keeps neighbours close together
        let set = self.next_stamp();
        for &v in nodes {
            self.member[v] = set;
        }
        let seen = self.next_stamp();
        let mut queue = VecDeque::new();
        for &s in nodes {
            if self.visited[s] == seen {
                continue;
            }
            self.visited[s] = seen;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                self.order.push(v);
                for &w in self.graph.neighbors(v) {
                    if self.member[w] == set && self.visited[w] != seen {
                        self.visited[w] = seen;
                        queue.push_back(w);
                    }
                }
            }
        }
    }

    fn dissect(&mut self, nodes: Vec<usize>) {
        if nodes.len() <= LEAF_SIZE {
            self.order_leaf(&nodes);
            return;
        }
        let set = self.next_stamp();
        for &v in &nodes {
            self.member[v] = set;
        }
        let (_, levels) = self.pseudo_peripheral(nodes[0], set);
        let reached: usize = levels.iter().map(Vec::len).sum();
        if reached < nodes.len() {
            // disconnected: split off the component we found
            let comp_stamp = self.visited[nodes[0]];
            let (comp, rest): (Vec<usize>, Vec<usize>) =
                nodes.iter().partition(|&&v| self.visited[v] == comp_stamp);
            self.dissect(comp);
            self.dissect(rest);
            return;
        }
        if levels.len() < 3 {
            self.order_leaf(&nodes);
            return;
        }
        let half = nodes.len() / 2;
        let mut cum = 0;
        let mut mid = 1;
        for (i, l) in levels.iter().enumerate() {
            if cum + l.len() > half {
                mid = i;
                break;
            }
            cum += l.len();
        }
        let mid = mid.clamp(1, levels.len() - 2);
        let upper = self.next_stamp();
        for &v in &levels[mid + 1] {
            self.member[v] = upper;
        }
        for l in &levels[mid + 2..] {
            for &v in l {
                self.member[v] = upper;
            }
        }
        let mut lower: Vec<usize> = levels[..mid].concat();
        let mut separator = Vec::new();
        for &v in &levels[mid] {
            if self.graph.neighbors(v).iter().any(|&w| self.member[w] == upper) {
                separator.push(v);
            } else {
                lower.push(v);
            }
        }
        let upper_nodes: Vec<usize> = levels[mid + 1..].concat();
        self.dissect(lower);
        self.dissect(upper_nodes);
        self.order.extend(separator);
    }
}

/// Column elimination order `q` (`q[k]` is the `k`-th column eliminated).
pub fn nested_dissection(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows;
    let graph = Graph::from_matrix(a);
    let mut d = Dissector {
        graph: &graph,
        member: vec![0; n],
        visited: vec![0; n],
        stamp: 0,
        order: Vec::with_capacity(n),
    };
    d.dissect((0..n).collect());
    d.order
}
