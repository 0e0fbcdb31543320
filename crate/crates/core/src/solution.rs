//! Covering solutions, their validity checks, and the solution text format.
//!
//! A valid cover assigns every leaf of the tree to exactly one immersion,
//! keeps each immersion within the autonomy budget, and (when agents are
//! scheduled) partitions the immersions into `k` blocks whose largest cost
//! sum is the makespan. `CoverSolution::verify` checks all of that from
//! scratch and reports every violation it finds, so it also vets solutions
//! read back from text.

use std::fmt;

use thiserror::Error;

use crate::immersion::{immersion_cost, Immersion};
use crate::tree::{InstanceParams, NodeId, RootedTree};

/// A set of immersions covering a tree, with an optional assignment of the
/// immersions to `k` agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSolution {
    immersions: Vec<Immersion>,
    assignment: Option<Vec<Vec<usize>>>,
    total_distance: u64,
    makespan: Option<u64>,
}

impl CoverSolution {
    pub fn from_immersions(immersions: Vec<Immersion>) -> Self {
        let total_distance = immersions.iter().map(Immersion::cost).sum();
        CoverSolution {
            immersions,
            assignment: None,
            total_distance,
            makespan: None,
        }
    }

    /// Attaches an agent assignment; the makespan is the largest block cost
    /// sum. `blocks` holds 0-based immersion indices, one inner list per
    /// agent (possibly empty).
    pub fn with_assignment(immersions: Vec<Immersion>, blocks: Vec<Vec<usize>>) -> Self {
        let total_distance = immersions.iter().map(Immersion::cost).sum();
        let makespan = blocks
            .iter()
            .map(|b| b.iter().map(|&i| immersions[i].cost()).sum::<u64>())
            .max()
            .unwrap_or(0);
        CoverSolution {
            immersions,
            assignment: Some(blocks),
            total_distance,
            makespan: Some(makespan),
        }
    }

    pub(crate) fn from_parsed(
        immersions: Vec<Immersion>,
        assignment: Option<Vec<Vec<usize>>>,
        total_distance: u64,
        makespan: Option<u64>,
    ) -> Self {
        CoverSolution {
            immersions,
            assignment,
            total_distance,
            makespan,
        }
    }

    pub fn immersions(&self) -> &[Immersion] {
        &self.immersions
    }

    pub fn immersion_count(&self) -> usize {
        self.immersions.len()
    }

    pub fn assignment(&self) -> Option<&[Vec<usize>]> {
        self.assignment.as_deref()
    }

    pub fn total_distance(&self) -> u64 {
        self.total_distance
    }

    pub fn makespan(&self) -> Option<u64> {
        self.makespan
    }

    /// Checks every solution invariant against `tree` and `params` and
    /// returns all violations found (empty means valid).
    pub fn verify(&self, tree: &RootedTree, params: &InstanceParams) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = tree.node_count();

        // Leaf membership and coverage counts.
        let mut cover_count: Vec<u32> = vec![0; n];
        let mut bad_member = false;
        for (i, imm) in self.immersions.iter().enumerate() {
            if imm.is_empty() {
                out.push(Violation::EmptyImmersion { index: i });
            }
            for &l in imm.leaves() {
                if !tree.is_leaf(l) {
                    out.push(Violation::NotALeaf { node: l.get() });
                    bad_member = true;
                } else {
                    cover_count[l.idx()] += 1;
                }
            }
        }
        for &l in tree.leaves() {
            match cover_count[l.idx()] {
                0 => out.push(Violation::LeafUncovered { leaf: l.get() }),
                1 => {}
                _ => out.push(Violation::LeafMultiplyCovered { leaf: l.get() }),
            }
        }

        // Per-immersion cost arithmetic and budget.
        if !bad_member {
            for (i, imm) in self.immersions.iter().enumerate() {
                let actual = immersion_cost(tree, imm.leaves()).expect("members are leaves");
                if actual != imm.cost() {
                    out.push(Violation::CostMismatch {
                        index: i,
                        stored: imm.cost(),
                        actual,
                    });
                }
                if actual > params.p {
                    out.push(Violation::BudgetExceeded {
                        index: i,
                        cost: actual,
                        p: params.p,
                    });
                }
            }
        }

        // Node coverage: the walks must reach every node of the tree.
        let mut reached = vec![false; n];
        reached[tree.root().idx()] = true;
        for imm in &self.immersions {
            for &l in imm.leaves() {
                if !tree.is_leaf(l) {
                    continue;
                }
                let mut v = l;
                while !reached[v.idx()] {
                    reached[v.idx()] = true;
                    v = tree.parent(v).expect("root is marked");
                }
            }
        }
        for i in 0..n {
            if !reached[i] {
                out.push(Violation::NodeUncovered { node: i as u32 + 1 });
            }
        }

        let sum: u64 = self.immersions.iter().map(Immersion::cost).sum();
        if sum != self.total_distance {
            out.push(Violation::TotalMismatch {
                stored: self.total_distance,
                actual: sum,
            });
        }

        // Assignment block structure and makespan arithmetic.
        match (&self.assignment, self.makespan) {
            (Some(blocks), makespan) => {
                if blocks.len() != params.k {
                    out.push(Violation::BlockCountMismatch {
                        blocks: blocks.len(),
                        k: params.k,
                    });
                }
                let m = self.immersions.len();
                let mut assigned: Vec<u32> = vec![0; m];
                for block in blocks {
                    for &i in block {
                        if i >= m {
                            out.push(Violation::AssignmentIndexOutOfRange { index: i });
                        } else {
                            assigned[i] += 1;
                        }
                    }
                }
                for (i, &count) in assigned.iter().enumerate() {
                    match count {
                        0 => out.push(Violation::ImmersionUnassigned { index: i }),
                        1 => {}
                        _ => out.push(Violation::ImmersionMultiplyAssigned { index: i }),
                    }
                }
                let actual = blocks
                    .iter()
                    .map(|b| {
                        b.iter()
                            .filter(|&&i| i < m)
                            .map(|&i| self.immersions[i].cost())
                            .sum::<u64>()
                    })
                    .max()
                    .unwrap_or(0);
                match makespan {
                    None => out.push(Violation::MakespanMissing),
                    Some(stored) if stored != actual => {
                        out.push(Violation::MakespanMismatch { stored, actual })
                    }
                    Some(_) => {}
                }
            }
            (None, Some(_)) => out.push(Violation::MakespanWithoutAssignment),
            (None, None) => {}
        }

        out
    }

    pub fn is_valid(&self, tree: &RootedTree, params: &InstanceParams) -> bool {
        self.verify(tree, params).is_empty()
    }

    /// Renders the solution text format:
    ///
    /// ```text
    /// I1: 3 4 cost=6
    /// agent 1: 1 time=6
    /// total=6 makespan=6
    /// ```
    ///
    /// Immersion and agent numbering is 1-based; the agent lines reference
    /// immersions by their `I` index.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, imm) in self.immersions.iter().enumerate() {
            out.push_str(&format!("I{}:", i + 1));
            for &l in imm.leaves() {
                out.push_str(&format!(" {}", l));
            }
            out.push_str(&format!(" cost={}\n", imm.cost()));
        }
        if let Some(blocks) = &self.assignment {
            for (j, block) in blocks.iter().enumerate() {
                out.push_str(&format!("agent {}:", j + 1));
                let mut time = 0u64;
                for &i in block {
                    out.push_str(&format!(" {}", i + 1));
                    time += self.immersions.get(i).map_or(0, Immersion::cost);
                }
                out.push_str(&format!(" time={}\n", time));
            }
        }
        out.push_str(&format!("total={}", self.total_distance));
        if let Some(m) = self.makespan {
            out.push_str(&format!(" makespan={}", m));
        }
        out.push('\n');
        out
    }

    /// Parses the text produced by [`CoverSolution::to_text`]. Costs and
    /// totals are taken at face value; run [`CoverSolution::verify`] to
    /// check them against a tree.
    pub fn parse(text: &str) -> Result<Self, SolutionParseError> {
        fn err(line: usize, msg: impl Into<String>) -> SolutionParseError {
            SolutionParseError {
                line,
                msg: msg.into(),
            }
        }
        fn trailing_value(tok: &str, key: &str) -> Option<u64> {
            tok.strip_prefix(key).and_then(|v| v.parse().ok())
        }

        let mut immersions: Vec<Immersion> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut trailer: Option<(u64, Option<u64>)> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            if trailer.is_some() {
                return Err(err(line, "content after the total line"));
            }
            let toks: Vec<&str> = s.split_whitespace().collect();
            if s.starts_with('I') {
                let head = toks[0]
                    .strip_prefix('I')
                    .and_then(|h| h.strip_suffix(':'))
                    .and_then(|h| h.parse::<usize>().ok())
                    .ok_or_else(|| err(line, "malformed immersion header"))?;
                if head != immersions.len() + 1 {
                    return Err(err(line, "immersion lines must be numbered consecutively"));
                }
                let last = toks.last().unwrap();
                let cost = trailing_value(last, "cost=")
                    .ok_or_else(|| err(line, "immersion line must end with cost=<int>"))?;
                let mut leaves = Vec::new();
                for tok in &toks[1..toks.len() - 1] {
                    let id: u32 = tok
                        .parse()
                        .map_err(|_| err(line, format!("bad leaf id `{tok}`")))?;
                    leaves
                        .push(NodeId::new(id).ok_or_else(|| err(line, "leaf id must be >= 1"))?);
                }
                immersions.push(Immersion::from_raw(leaves, cost));
            } else if s.starts_with("agent") {
                if toks.len() < 3 {
                    return Err(err(line, "malformed agent line"));
                }
                let idx = toks[1]
                    .strip_suffix(':')
                    .and_then(|h| h.parse::<usize>().ok())
                    .ok_or_else(|| err(line, "malformed agent header"))?;
                if idx != blocks.len() + 1 {
                    return Err(err(line, "agent lines must be numbered consecutively"));
                }
                let last = toks.last().unwrap();
                if trailing_value(last, "time=").is_none() {
                    return Err(err(line, "agent line must end with time=<int>"));
                }
                let mut block = Vec::new();
                for tok in &toks[2..toks.len() - 1] {
                    let r: usize = tok
                        .parse()
                        .map_err(|_| err(line, format!("bad immersion index `{tok}`")))?;
                    if r == 0 {
                        return Err(err(line, "immersion indices are 1-based"));
                    }
                    block.push(r - 1);
                }
                blocks.push(block);
            } else if s.starts_with("total=") {
                let total = trailing_value(toks[0], "total=")
                    .ok_or_else(|| err(line, "malformed total"))?;
                let makespan = match toks.len() {
                    1 => None,
                    2 => Some(
                        trailing_value(toks[1], "makespan=")
                            .ok_or_else(|| err(line, "malformed makespan"))?,
                    ),
                    _ => return Err(err(line, "unexpected tokens after makespan")),
                };
                trailer = Some((total, makespan));
            } else {
                return Err(err(line, format!("unrecognized line `{s}`")));
            }
        }
        let (total, makespan) =
            trailer.ok_or_else(|| err(text.lines().count().max(1), "missing total line"))?;
        let assignment = if blocks.is_empty() { None } else { Some(blocks) };
        Ok(CoverSolution::from_parsed(
            immersions, assignment, total, makespan,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct SolutionParseError {
    pub line: usize,
    pub msg: String,
}

/// One broken solution invariant, reported by [`CoverSolution::verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotALeaf { node: u32 },
    LeafUncovered { leaf: u32 },
    LeafMultiplyCovered { leaf: u32 },
    NodeUncovered { node: u32 },
    EmptyImmersion { index: usize },
    BudgetExceeded { index: usize, cost: u64, p: u64 },
    CostMismatch { index: usize, stored: u64, actual: u64 },
    TotalMismatch { stored: u64, actual: u64 },
    BlockCountMismatch { blocks: usize, k: usize },
    AssignmentIndexOutOfRange { index: usize },
    ImmersionUnassigned { index: usize },
    ImmersionMultiplyAssigned { index: usize },
    MakespanMismatch { stored: u64, actual: u64 },
    MakespanMissing,
    MakespanWithoutAssignment,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotALeaf { node } => write!(f, "node {node} is not a leaf"),
            Violation::LeafUncovered { leaf } => write!(f, "leaf {leaf} uncovered"),
            Violation::LeafMultiplyCovered { leaf } => write!(f, "leaf {leaf} multiply covered"),
            Violation::NodeUncovered { node } => write!(f, "node {node} not visited by any walk"),
            Violation::EmptyImmersion { index } => write!(f, "immersion {} is empty", index + 1),
            Violation::BudgetExceeded { index, cost, p } => {
                write!(f, "immersion {} budget exceeded: cost {cost} > p={p}", index + 1)
            }
            Violation::CostMismatch {
                index,
                stored,
                actual,
            } => write!(
                f,
                "immersion {} cost mismatch: stored {stored}, actual {actual}",
                index + 1
            ),
            Violation::TotalMismatch { stored, actual } => {
                write!(f, "total mismatch: stored {stored}, actual {actual}")
            }
            Violation::BlockCountMismatch { blocks, k } => {
                write!(f, "assignment has {blocks} blocks for k={k} agents")
            }
            Violation::AssignmentIndexOutOfRange { index } => {
                write!(f, "assignment references missing immersion {}", index + 1)
            }
            Violation::ImmersionUnassigned { index } => {
                write!(f, "immersion {} not assigned to any agent", index + 1)
            }
            Violation::ImmersionMultiplyAssigned { index } => {
                write!(f, "immersion {} assigned to multiple agents", index + 1)
            }
            Violation::MakespanMismatch { stored, actual } => {
                write!(f, "makespan mismatch: stored {stored}, actual {actual}")
            }
            Violation::MakespanMissing => write!(f, "assignment present but makespan missing"),
            Violation::MakespanWithoutAssignment => {
                write!(f, "makespan present but no assignment")
            }
        }
    }
}
