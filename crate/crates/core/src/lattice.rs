//! Lattice graphs carrying the Ising couplings and the kink operator.
//!
//! All generators use open boundaries except [`LatticeGraph::ring`], which
//! exists for comparisons against the periodic free-fermion solution.
//!
//! Edges are stored canonically: smaller index first, sorted
//! lexicographically. Vertex numbering per generator:
//!
//! * chain: `0..n` along the path.
//! * square / ladder: row-major, `site = y * nx + x` with `nx` columns.
//! * heavy-hex: line-major. Each of the `cell_rows + 1` horizontal lines
//!   holds `4 * cell_cols + 4` consecutive indices; the `cell_cols + 1`
//!   bridge qubits linking line `r` to line `r + 1` are numbered right after
//!   line `r`. Bridges sit at columns `4j + 3` below even lines and `4j + 1`
//!   below odd lines. `(cell_rows, cell_cols) = (7, 3)` reproduces the
//!   156-qubit Heron coupling map (176 edges) including its qubit labels.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Chain,
    /// Periodic chain; only used as a reference for the exact 1D solution.
    Ring,
    Ladder,
    Square,
    HeavyHex,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeGraph {
    n_sites: usize,
    edges: Vec<(usize, usize)>,
    geometry: Geometry,
}

impl LatticeGraph {
    /// Validates and canonicalizes an edge list.
    pub fn from_edges(
        n_sites: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        geometry: Geometry,
    ) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidSize(format!(
                "a lattice needs at least 2 sites, got {n_sites}"
            )));
        }
        let mut canon = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {a}")));
            }
            if a >= n_sites || b >= n_sites {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{n_sites}"
                )));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let graph = Self {
            n_sites,
            edges: canon,
            geometry,
        };
        if !graph.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(graph)
    }

    /// Open-boundary path graph.
    pub fn chain(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("chain needs n >= 2, got {n}")));
        }
        Self::from_edges(n, (0..n - 1).map(|i| (i, i + 1)), Geometry::Chain)
    }

    /// Periodic chain (the chain plus the wrap-around edge).
    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSize(format!("ring needs n >= 3, got {n}")));
        }
        let edges = (0..n - 1).map(|i| (i, i + 1)).chain(std::iter::once((0, n - 1)));
        Self::from_edges(n, edges, Geometry::Ring)
    }

    /// Open-boundary `nx` (columns) by `ny` (rows) grid.
    pub fn square(nx: usize, ny: usize) -> Result<Self> {
        Self::grid(nx, ny, Geometry::Square)
    }

    /// Three-leg ladder of length `nx`: the same graph as `square(nx, 3)`.
    pub fn ladder(nx: usize) -> Result<Self> {
        Self::grid(nx, 3, Geometry::Ladder)
    }

    fn grid(nx: usize, ny: usize, geometry: Geometry) -> Result<Self> {
        if nx == 0 || ny == 0 || nx * ny < 2 {
            return Err(Error::InvalidSize(format!(
                "grid {nx}x{ny} is degenerate (need nx, ny >= 1 and nx*ny >= 2)"
            )));
        }
        let mut edges = Vec::with_capacity(nx * (ny - 1) + ny * (nx - 1));
        for y in 0..ny {
            for x in 0..nx {
                let site = y * nx + x;
                if x + 1 < nx {
                    edges.push((site, site + 1));
                }
                if y + 1 < ny {
                    edges.push((site, site + nx));
                }
            }
        }
        Self::from_edges(nx * ny, edges, geometry)
    }

    /// Heavy-hexagonal lattice with `cell_rows` rows of `cell_cols` complete
    /// hexagons each (see the module docs for the layout).
    pub fn heavy_hex(cell_rows: usize, cell_cols: usize) -> Result<Self> {
        if cell_rows == 0 || cell_cols == 0 {
            return Err(Error::InvalidSize(format!(
                "heavy-hex needs at least one cell row and column, got {cell_rows}x{cell_cols}"
            )));
        }
        let line_len = 4 * cell_cols + 4;
        let bridges = cell_cols + 1;
        let mut line_start = Vec::with_capacity(cell_rows + 1);
        // (bridge index, gap, column)
        let mut bridge_sites = Vec::with_capacity(cell_rows * bridges);
        let mut edges = Vec::new();
        let mut next = 0;
        for line in 0..=cell_rows {
            line_start.push(next);
            edges.extend((next..next + line_len - 1).map(|s| (s, s + 1)));
            next += line_len;
            if line < cell_rows {
                let offset = if line % 2 == 0 { 3 } else { 1 };
                for j in 0..bridges {
                    bridge_sites.push((next, line, offset + 4 * j));
                    next += 1;
                }
            }
        }
        for (bridge, gap, col) in bridge_sites {
            edges.push((line_start[gap] + col, bridge));
            edges.push((bridge, line_start[gap + 1] + col));
        }
        Self::from_edges(next, edges, Geometry::HeavyHex)
    }

    /// Parses the edge-list document: first non-comment line is the site
    /// count, every further non-empty line is `i j`. Lines starting with `#`
    /// are comments.
    pub fn load_edge_list(text: &str) -> Result<Self> {
        let mut n_sites: Option<usize> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r').trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse = |tok: &str| {
                tok.parse::<usize>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("'{tok}': {e}"),
                })
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match (n_sites, tokens.as_slice()) {
                (None, [n]) => n_sites = Some(parse(n)?),
                (None, _) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected the site count on its own line".into(),
                    })
                }
                (Some(_), [a, b]) => edges.push((parse(a)?, parse(b)?)),
                (Some(_), _) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected 'i j', found {} tokens", tokens.len()),
                    })
                }
            }
        }
        let n = n_sites.ok_or(Error::Parse {
            line: 1,
            message: "missing site count".into(),
        })?;
        Self::from_edges(n, edges, Geometry::Custom)
    }

    /// Renders the graph in the edge-list format accepted by
    /// [`LatticeGraph::load_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n_sites);
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Adjacency lists, sorted.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_sites];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_sites];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    fn is_connected(&self) -> bool {
        let adj = self.neighbors();
        let mut seen = vec![false; self.n_sites];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n_sites
    }

    /// First triangle found, if any, as a sorted vertex triple.
    pub fn find_triangle(&self) -> Option<(usize, usize, usize)> {
        let adj = self.neighbors();
        for &(a, b) in &self.edges {
            // both lists are sorted: merge for a common neighbour
            let (mut i, mut j) = (0, 0);
            while i < adj[a].len() && j < adj[b].len() {
                match adj[a][i].cmp(&adj[b][j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let mut t = [a, b, adj[a][i]];
                        t.sort_unstable();
                        return Some((t[0], t[1], t[2]));
                    }
                }
            }
        }
        None
    }

    pub fn is_triangle_free(&self) -> bool {
        self.find_triangle().is_none()
    }

    pub fn is_bipartite(&self) -> bool {
        let adj = self.neighbors();
        let mut side = vec![u8::MAX; self.n_sites];
        side[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[v];
                    queue.push_back(w);
                } else if side[w] == side[v] {
                    return false;
                }
            }
        }
        true
    }

    /// Number of kink edges (anti-aligned endpoints) in a computational basis
    /// state; bit `i` of `index` is site `i`.
    pub fn kinks_in_basis_state(&self, index: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| ((index >> a) ^ (index >> b)) & 1 == 1)
            .count()
    }
}
