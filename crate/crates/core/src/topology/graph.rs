use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Serialize, Deserialize)]
struct EdgeList {
    num_qubits: usize,
    edges: Vec<(usize, usize)>,
}

/// Undirected simple coupling graph. Serializes as an edge list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EdgeList", into = "EdgeList")]
pub struct ConnectivityGraph {
    num_qubits: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl TryFrom<EdgeList> for ConnectivityGraph {
    type Error = crate::Error;
    fn try_from(e: EdgeList) -> Result<Self> {
        ConnectivityGraph::new(e.num_qubits, e.edges)
    }
}

impl From<ConnectivityGraph> for EdgeList {
    fn from(g: ConnectivityGraph) -> Self {
        EdgeList { num_qubits: g.num_qubits, edges: g.edges }
    }
}

impl ConnectivityGraph {
    /// Edges are normalized to `(min, max)`, sorted and deduplicated.
    pub fn new(num_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut norm = Vec::new();
        for (a, b) in edges {
            if a == b {
                return invalid(format!("self-loop on qubit {a}"));
            }
            if a >= num_qubits || b >= num_qubits {
                return invalid(format!("edge ({a},{b}) outside {num_qubits} qubits"));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        norm.dedup();
        let mut adjacency = vec![Vec::new(); num_qubits];
        for &(a, b) in &norm {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        adjacency.iter_mut().for_each(|v| v.sort_unstable());
        Ok(ConnectivityGraph { num_qubits, edges: norm, adjacency })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.num_qubits && self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.num_qubits == 0 {
            return true;
        }
        let mut seen = vec![false; self.num_qubits];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Subgraph induced by `vertices`; node `i` of the result is
    /// `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Result<ConnectivityGraph> {
        let mut index = vec![usize::MAX; self.num_qubits];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.num_qubits {
                return invalid(format!("vertex {v} outside {} qubits", self.num_qubits));
            }
            if index[v] != usize::MAX {
                return invalid(format!("vertex {v} listed twice"));
            }
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| index[*a] != usize::MAX && index[*b] != usize::MAX)
            .map(|(a, b)| (index[*a], index[*b]));
        ConnectivityGraph::new(vertices.len(), edges)
    }

    pub fn path(n: usize) -> Self {
        ConnectivityGraph::new(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 nodes");
        ConnectivityGraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Self {
        ConnectivityGraph::new(n, (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))).expect("valid clique")
    }

    /// Square lattice, row-major numbering.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        ConnectivityGraph::new(rows * cols, edges).expect("valid grid")
    }

    /// Heavy-hexagon lattice with `rows` bands of `cols` hexagons.
    ///
    /// Built as a brick wall of `rows + 1` horizontal lines of `2*cols + 1`
    /// nodes, with a vertical rung between lines `r` and `r+1` at every column
    /// `c` where `c + r` is even; every brick-wall edge is then subdivided by
    /// an extra qubit. Brick-wall nodes come first in row-major order,
    /// subdivision qubits follow in edge order.
    pub fn heavy_hex(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "heavy_hex needs rows, cols >= 1");
        let width = 2 * cols + 1;
        let id = |r: usize, c: usize| r * width + c;
        let mut brick = Vec::new();
        for r in 0..=rows {
            for c in 0..width - 1 {
                brick.push((id(r, c), id(r, c + 1)));
            }
        }
        for r in 0..rows {
            for c in 0..width {
                if (c + r) % 2 == 0 {
                    brick.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        let base = (rows + 1) * width;
        let mut edges = Vec::with_capacity(2 * brick.len());
        for (k, (a, b)) in brick.iter().enumerate() {
            let mid = base + k;
            edges.push((*a, mid));
            edges.push((mid, *b));
        }
        ConnectivityGraph::new(base + brick.len(), edges).expect("valid heavy-hex")
    }

    /// Closed-form edge count of [`ConnectivityGraph::heavy_hex`].
    pub fn heavy_hex_edge_count(rows: usize, cols: usize) -> usize {
        let horizontal = (rows + 1) * 2 * cols;
        let rungs = rows.div_ceil(2) * (cols + 1) + (rows / 2) * cols;
        2 * (horizontal + rungs)
    }
}
