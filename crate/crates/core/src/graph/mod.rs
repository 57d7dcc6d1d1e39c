//! Undirected, connected graphs and the spectral primitives built on them.
//!
//! A [`Graph`] is always symmetric, loop-free and connected; every
//! constructor enforces this, so downstream code can treat the adjacency
//! matrix as irreducible.

mod spectral;

use std::collections::{BTreeSet, HashMap, VecDeque};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use spectral::{
    is_irreducible, pf_eigen, pf_eigen_default, SpectralResult, DEFAULT_MAX_ITER, DEFAULT_TOL,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<String>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph on nodes `0..n` labelled by their index.
    ///
    /// Duplicate and reversed edges are collapsed. Self-loops, out-of-range
    /// endpoints and disconnected edge sets are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::build(labels, edges.iter().copied().enumerate().map(|(k, e)| (k + 1, e)))
    }

    fn build(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (usize, (usize, usize))>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut set = BTreeSet::new();
        for (line, (u, v)) in edges {
            for idx in [u, v] {
                if idx >= n {
                    return Err(Error::NodeOutOfRange { index: idx, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { line, label: labels[u].clone() });
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in &edges {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let graph = Graph { n, edges, labels, neighbors };
        graph.ensure_connected()?;
        Ok(graph)
    }

    fn ensure_connected(&self) -> Result<()> {
        let seen = bfs(&self.neighbors, 0);
        match seen.iter().position(|&s| !s) {
            None => Ok(()),
            Some(missing) => Err(Error::Disconnected {
                reached: self.labels[0].clone(),
                unreached: self.labels[missing].clone(),
            }),
        }
    }

    /// Renumbers nodes so that node `i` carries `reference.labels()[i]`.
    pub fn aligned_to(&self, reference: &Graph) -> Result<Graph> {
        if self.n != reference.n {
            return Err(Error::DimensionMismatch { expected: reference.n, got: self.n });
        }
        let index: HashMap<&str, usize> =
            reference.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut perm = Vec::with_capacity(self.n);
        for label in &self.labels {
            match index.get(label.as_str()) {
                Some(&i) => perm.push(i),
                None => {
                    return Err(Error::Precondition(format!("node {label:?} is missing from the reference graph")))
                }
            }
        }
        let edges = self.edges.iter().enumerate().map(|(k, &(u, v))| (k + 1, (perm[u], perm[v])));
        Self::build(reference.labels.clone(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Node labels in first-seen order; `labels()[i]` is the label of node `i`.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Dense symmetric 0/1 adjacency matrix.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        a
    }

    /// Minimum and maximum node degree.
    pub fn degrees(&self) -> (usize, usize) {
        let it = self.neighbors.iter().map(Vec::len);
        let min = it.clone().min().unwrap_or(0);
        let max = it.max().unwrap_or(0);
        (min, max)
    }

    /// Perron-Frobenius eigenvalue of the adjacency matrix at default tolerance.
    pub fn spectral_radius(&self) -> Result<f64> {
        pf_eigen_default(&self.adjacency()).map(|r| r.value)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::from_edges(n, &edges)
    }

    /// Star on `n` nodes: hub 0 joined to `n - 1` leaves.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|j| (0, j)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|j| (j - 1, j)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|j| (j, (j + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    /// Wheel on `n` nodes: hub 0 joined to every node of the rim cycle `1..n`.
    pub fn wheel(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidParameter(format!("wheel needs n >= 4, got {n}")));
        }
        let rim = n - 1;
        let mut edges: Vec<_> = (1..n).map(|j| (0, j)).collect();
        edges.extend((0..rim).map(|k| (1 + k, 1 + (k + 1) % rim)));
        Self::from_edges(n, &edges)
    }
}

pub(crate) fn bfs(neighbors: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; neighbors.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &neighbors[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Parses a whitespace-separated edge list.
///
/// `#` starts a comment line, blank lines are skipped, and labels are mapped
/// to dense indices in first-seen order.
pub fn load_edge_list(text: &str) -> Result<Graph> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse { line, message: format!("expected two labels, got {trimmed:?}") });
        };
        if tokens.next().is_some() {
            return Err(Error::Parse { line, message: format!("trailing tokens in {trimmed:?}") });
        }
        if a == b {
            return Err(Error::SelfLoop { line, label: a.to_string() });
        }
        let u = intern(a, &mut index, &mut labels);
        let v = intern(b, &mut index, &mut labels);
        edges.push((line, (u, v)));
    }
    if labels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Graph::build(labels, edges)
}

fn intern<'a>(label: &'a str, index: &mut HashMap<&'a str, usize>, labels: &mut Vec<String>) -> usize {
    *index.entry(label).or_insert_with(|| {
        labels.push(label.to_string());
        labels.len() - 1
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_from_text() {
        let g = load_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn duplicates_and_comments_collapse() {
        let g = load_edge_list("a b\nb a\n# comment\nb c").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.labels(), &["a", "b", "c"]);
    }

    #[test]
    fn blank_lines_ignored() {
        let g = load_edge_list("\n  \nx y\n\n").unwrap();
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn self_loop_reports_line() {
        match load_edge_list("0 1\n# c\n1 1\n") {
            Err(Error::SelfLoop { line, label }) => {
                assert_eq!(line, 3);
                assert_eq!(label, "1");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn disconnected_names_nodes() {
        match load_edge_list("a b\nc d\n") {
            Err(Error::Disconnected { reached, unreached }) => {
                assert_eq!(reached, "a");
                assert_eq!(unreached, "c");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(load_edge_list(""), Err(Error::EmptyGraph)));
        assert!(matches!(load_edge_list("# only\n\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn malformed_line() {
        assert!(matches!(load_edge_list("a\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load_edge_list("a b c\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn alignment_follows_reference_labels() {
        let a = load_edge_list("a b\nb c\nc d").unwrap();
        let b = load_edge_list("d a\nb d\nc b").unwrap();
        let aligned = b.aligned_to(&a).unwrap();
        assert_eq!(aligned.labels(), a.labels());
        assert_eq!(aligned.edges(), &[(0, 3), (1, 2), (1, 3)]);
        let other = load_edge_list("a b\nb c\nc x").unwrap();
        assert!(matches!(other.aligned_to(&a), Err(Error::Precondition(_))));
    }

    #[test]
    fn degree_extremes() {
        assert_eq!(Graph::complete(5).unwrap().degrees(), (4, 4));
        assert_eq!(Graph::star(4).unwrap().degrees(), (1, 3));
        assert_eq!(Graph::wheel(6).unwrap().degrees(), (3, 5));
        assert_eq!(Graph::cycle(6).unwrap().degrees(), (2, 2));
    }

    #[test]
    fn adjacency_is_symmetric_loop_free() {
        let a = Graph::wheel(7).unwrap().adjacency();
        assert_eq!(a, a.transpose());
        assert!((0..7).all(|i| a[(i, i)] == 0.0));
    }

    #[test]
    fn single_node_is_connected() {
        let g = Graph::from_edges(1, &[]).unwrap();
        assert_eq!(g.degrees(), (0, 0));
    }
}
