//! Rooted trees with positive integer edge lengths.
//!
//! Nodes carry 1-based labels and live in a flat arena indexed by label.
//! Parents, weighted depths, the height, and the depth-first leaf order are
//! all precomputed at construction, so distance and coverage queries never
//! re-traverse the tree. A constructed tree is immutable and can be shared
//! freely between concurrent solver calls.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// 1-based node label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    /// Returns `None` for 0; labels start at 1.
    pub fn new(id: u32) -> Option<Self> {
        if id == 0 {
            None
        } else {
            Some(NodeId(id))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub(crate) fn idx(self) -> usize {
        (self.0 - 1) as usize
    }

    pub(crate) fn from_idx(i: usize) -> Self {
        NodeId(i as u32 + 1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Structural errors raised when building or querying a tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("node count must be at least 1")]
    InvalidNodeCount,
    #[error("root {root} out of range 1..={n}")]
    RootOutOfRange { root: u32, n: usize },
    #[error("node id {id} out of range 1..={n}")]
    IdOutOfRange { id: u32, n: usize },
    #[error("edge length must be a positive integer")]
    NonPositiveLength,
    #[error("node {id} listed as a child twice")]
    DuplicateChild { id: u32 },
    #[error("the root cannot appear as a child")]
    RootAsChild,
    #[error("expected {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("node {id} does not reach the root (cycle or disconnected)")]
    Unreachable { id: u32 },
    #[error("unknown node id {id}")]
    UnknownNode { id: u32 },
}

/// A [`TreeError`] or syntax problem located on a line of a tree file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Tree(TreeError),
}

/// Immutable rooted tree with positive integer edge lengths.
///
/// The depth of a node is the total edge length on its path from the root.
/// Leaves are the childless nodes other than the root, listed in the order a
/// depth-first traversal (children in ascending label order) first reaches
/// them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    root: NodeId,
    parent: Vec<Option<NodeId>>,
    up_len: Vec<u64>,
    children: Vec<Vec<NodeId>>,
    depth: Vec<u64>,
    height: u64,
    leaves: Vec<NodeId>,
    leaf_rank: Vec<Option<u32>>,
}

impl RootedTree {
    /// Builds a tree from `(parent, child, length)` edges over labels
    /// `1..=n`. There must be exactly `n - 1` edges, every non-root node
    /// exactly one parent, and every node must reach the root.
    pub fn from_edges(n: usize, root: u32, edges: &[(u32, u32, u64)]) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::InvalidNodeCount);
        }
        if root == 0 || root as usize > n {
            return Err(TreeError::RootOutOfRange { root, n });
        }
        if edges.len() != n - 1 {
            return Err(TreeError::EdgeCount {
                expected: n - 1,
                found: edges.len(),
            });
        }
        let root = NodeId(root);

        let mut parent: Vec<Option<NodeId>> = vec![None; n];
        let mut up_len: Vec<u64> = vec![0; n];
        for &(pa, ch, len) in edges {
            for id in [pa, ch] {
                if id == 0 || id as usize > n {
                    return Err(TreeError::IdOutOfRange { id, n });
                }
            }
            if len == 0 {
                return Err(TreeError::NonPositiveLength);
            }
            if ch == root.get() {
                return Err(TreeError::RootAsChild);
            }
            let child = NodeId(ch);
            if parent[child.idx()].is_some() {
                return Err(TreeError::DuplicateChild { id: ch });
            }
            parent[child.idx()] = Some(NodeId(pa));
            up_len[child.idx()] = len;
        }

        let mut children: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for i in 0..n {
            if let Some(pa) = parent[i] {
                children[pa.idx()].push(NodeId::from_idx(i));
            }
        }
        for list in &mut children {
            list.sort_unstable();
        }

        // Depths via preorder walk; any node the walk misses sits on a cycle
        // or in a detached component.
        let mut depth: Vec<u64> = vec![0; n];
        let mut seen: Vec<bool> = vec![false; n];
        let mut stack = vec![root];
        seen[root.idx()] = true;
        let mut visited = 1usize;
        while let Some(v) = stack.pop() {
            for &c in &children[v.idx()] {
                depth[c.idx()] = depth[v.idx()] + up_len[c.idx()];
                seen[c.idx()] = true;
                visited += 1;
                stack.push(c);
            }
        }
        if visited != n {
            let id = seen.iter().position(|&s| !s).unwrap() as u32 + 1;
            return Err(TreeError::Unreachable { id });
        }

        // Depth-first leaf order, children ascending.
        let mut leaves = Vec::new();
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if children[v.idx()].is_empty() {
                if v != root {
                    leaves.push(v);
                }
            } else {
                stack.extend(children[v.idx()].iter().rev());
            }
        }
        let mut leaf_rank: Vec<Option<u32>> = vec![None; n];
        for (r, l) in leaves.iter().enumerate() {
            leaf_rank[l.idx()] = Some(r as u32);
        }

        let height = depth.iter().copied().max().unwrap_or(0);

        Ok(RootedTree {
            root,
            parent,
            up_len,
            children,
            depth,
            height,
            leaves,
            leaf_rank,
        })
    }

    /// Parses the tree file format: a `n root` header followed by exactly
    /// `n - 1` lines `parent child length`. Blank lines and lines starting
    /// with `#` are skipped. Errors carry the offending 1-based line number.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
            ParseError {
                line,
                kind: ParseErrorKind::Syntax(msg.into()),
            }
        }
        fn structural(line: usize, e: TreeError) -> ParseError {
            ParseError {
                line,
                kind: ParseErrorKind::Tree(e),
            }
        }

        let mut header: Option<(usize, u32)> = None;
        let mut edges: Vec<(u32, u32, u64)> = Vec::new();
        let mut edge_lines: Vec<usize> = Vec::new();
        let mut seen_child: Vec<bool> = Vec::new();
        let mut last_line = 0;

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = s.split_whitespace().collect();
            match header {
                None => {
                    if toks.len() != 2 {
                        return Err(syntax(line, "expected header `n root`"));
                    }
                    let n: usize = toks[0]
                        .parse()
                        .map_err(|_| syntax(line, "node count is not an integer"))?;
                    let root: u32 = toks[1]
                        .parse()
                        .map_err(|_| syntax(line, "root id is not an integer"))?;
                    if n == 0 {
                        return Err(structural(line, TreeError::InvalidNodeCount));
                    }
                    if root == 0 || root as usize > n {
                        return Err(structural(line, TreeError::RootOutOfRange { root, n }));
                    }
                    header = Some((n, root));
                    seen_child = vec![false; n];
                }
                Some((n, root)) => {
                    if edges.len() == n - 1 {
                        return Err(syntax(
                            line,
                            format!("unexpected extra line; expected {} edges", n - 1),
                        ));
                    }
                    if toks.len() != 3 {
                        return Err(syntax(line, "expected edge `parent child length`"));
                    }
                    let pa: u32 = toks[0]
                        .parse()
                        .map_err(|_| syntax(line, "parent id is not an integer"))?;
                    let ch: u32 = toks[1]
                        .parse()
                        .map_err(|_| syntax(line, "child id is not an integer"))?;
                    let len: i64 = toks[2]
                        .parse()
                        .map_err(|_| syntax(line, "edge length is not an integer"))?;
                    for id in [pa, ch] {
                        if id == 0 || id as usize > n {
                            return Err(structural(line, TreeError::IdOutOfRange { id, n }));
                        }
                    }
                    if len < 1 {
                        return Err(structural(line, TreeError::NonPositiveLength));
                    }
                    if ch == root {
                        return Err(structural(line, TreeError::RootAsChild));
                    }
                    if seen_child[(ch - 1) as usize] {
                        return Err(structural(line, TreeError::DuplicateChild { id: ch }));
                    }
                    seen_child[(ch - 1) as usize] = true;
                    edges.push((pa, ch, len as u64));
                    edge_lines.push(line);
                }
            }
        }

        let (n, root) = header.ok_or_else(|| syntax(last_line.max(1), "empty input"))?;
        if edges.len() != n - 1 {
            return Err(structural(
                last_line,
                TreeError::EdgeCount {
                    expected: n - 1,
                    found: edges.len(),
                },
            ));
        }
        Self::from_edges(n, root, &edges).map_err(|e| {
            let line = match e {
                TreeError::Unreachable { id } => edges
                    .iter()
                    .position(|&(_, ch, _)| ch == id)
                    .map(|i| edge_lines[i])
                    .unwrap_or(last_line),
                _ => last_line,
            };
            structural(line, e)
        })
    }

    /// Canonical text form: header, then one edge line per non-root node in
    /// ascending label order. `parse` of the result reproduces the tree.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.node_count(), self.root);
        for i in 0..self.node_count() {
            if let Some(pa) = self.parent[i] {
                let child = NodeId::from_idx(i);
                out.push_str(&format!("{} {} {}\n", pa, child, self.up_len[i]));
            }
        }
        out
    }

    /// Grows a random tree on nodes `1..=n` rooted at 1: starting from node
    /// 1, repeatedly attach a uniformly chosen pending node to a uniformly
    /// chosen node already in the tree, with unit edge length. Deterministic
    /// for a fixed seed.
    pub fn random(n: usize, seed: u64) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::InvalidNodeCount);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut in_tree: Vec<u32> = vec![1];
        let mut pending: Vec<u32> = (2..=n as u32).collect();
        let mut edges = Vec::with_capacity(n - 1);
        while !pending.is_empty() {
            let v = in_tree[rng.random_range(0..in_tree.len())];
            let w = pending.swap_remove(rng.random_range(0..pending.len()));
            edges.push((v, w, 1));
            in_tree.push(w);
        }
        Self::from_edges(n, 1, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Maximum depth over all nodes; 0 for a single-node tree.
    pub fn height(&self) -> u64 {
        self.height
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.idx() < self.node_count()
    }

    /// Total edge length from the root to `v`. `v` must belong to the tree.
    pub fn depth(&self, v: NodeId) -> u64 {
        self.depth[v.idx()]
    }

    /// `None` for the root.
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v.idx()]
    }

    /// Length of the edge from `v` up to its parent; 0 for the root.
    pub fn up_len(&self, v: NodeId) -> u64 {
        self.up_len[v.idx()]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v.idx()]
    }

    /// Leaves in depth-first order (children visited in ascending label
    /// order). The root is never a leaf.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.contains(v) && self.leaf_rank[v.idx()].is_some()
    }

    /// Position of `v` in the depth-first leaf order.
    pub fn leaf_rank(&self, v: NodeId) -> Option<usize> {
        if !self.contains(v) {
            return None;
        }
        self.leaf_rank[v.idx()].map(|r| r as usize)
    }

    /// Weighted path length between two nodes, via their lowest common
    /// ancestor. Symmetric; 0 for `u == v`.
    pub fn distance(&self, u: NodeId, v: NodeId) -> Result<u64, TreeError> {
        for w in [u, v] {
            if !self.contains(w) {
                return Err(TreeError::UnknownNode { id: w.get() });
            }
        }
        let (mut a, mut b) = (u, v);
        // Parent-walk to the LCA; depths strictly decrease going up.
        while a != b {
            if self.depth(a) >= self.depth(b) {
                a = self.parent(a).expect("non-root node has a parent");
            } else {
                b = self.parent(b).expect("non-root node has a parent");
            }
        }
        Ok(self.depth(u) + self.depth(v) - 2 * self.depth(a))
    }
}

/// Per-instance solve parameters: autonomy `p` (maximum cost of one walk)
/// and agent count `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceParams {
    pub p: u64,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("autonomy p={p} is below 2*h(T)={min}; the deepest node cannot be visited")]
    AutonomyTooSmall { p: u64, min: u64 },
    #[error("agent count must be at least 1")]
    NoAgents,
}

impl InstanceParams {
    /// A walk must be able to reach the deepest node and return, so `p`
    /// must be at least twice the height; `k` must be at least 1.
    pub fn validate(&self, tree: &RootedTree) -> Result<(), InstanceError> {
        validate_autonomy(tree, self.p)?;
        if self.k < 1 {
            return Err(InstanceError::NoAgents);
        }
        Ok(())
    }
}

/// Checks `p >= 2 * height` without an agent count.
pub fn validate_autonomy(tree: &RootedTree, p: u64) -> Result<(), InstanceError> {
    let min = 2 * tree.height();
    if p < min {
        return Err(InstanceError::AutonomyTooSmall { p, min });
    }
    Ok(())
}
