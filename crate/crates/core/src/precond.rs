//! Block ILU and Restricted Additive Schwarz preconditioners.
//!
//! The matrix graph is split into `s` parts by BFS graph growing. Each part
//! (grown by `overlap` neighbor rounds for RAS) yields a principal submatrix
//! that is factored on its own. The per-block factors are stacked into one
//! block-diagonal `L` and `U` over the concatenated local numbering and
//! prepared once, so the level schedule spans all blocks.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::formats::{CsrMatrix, WidthPolicy};
use crate::ilu::{ilu0, ilu_k, ilut, IluFactors};
use crate::trisolve::LuSolver;

/// Anything that approximates `A^{-1} r`.
pub trait Preconditioner {
    fn n(&self) -> usize;
    fn apply(&self, r: &[f64], workers: usize) -> Result<Vec<f64>>;
}

impl Preconditioner for LuSolver {
    fn n(&self) -> usize {
        LuSolver::n(self)
    }

    fn apply(&self, r: &[f64], workers: usize) -> Result<Vec<f64>> {
        LuSolver::apply(self, r, workers)
    }
}

/// Disjoint cover of `0..n` by non-empty, sorted index lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    part_of: Vec<usize>,
    parts: Vec<Vec<usize>>,
}

impl Partition {
    pub fn from_parts(n: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut part_of = vec![usize::MAX; n];
        for (p, members) in parts.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::InvalidArgument(format!("part {p} is empty")));
            }
            for w in members.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidArgument(format!("part {p} is not sorted")));
                }
            }
            for &v in members {
                if v >= n || part_of[v] != usize::MAX {
                    return Err(Error::InvalidArgument(format!("vertex {v} is out of range or shared")));
                }
                part_of[v] = p;
            }
        }
        if let Some(v) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::InvalidArgument(format!("vertex {v} is not assigned")));
        }
        Ok(Self { part_of, parts })
    }

    pub fn n(&self) -> usize {
        self.part_of.len()
    }

    pub fn n_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn part_of(&self) -> &[usize] {
        &self.part_of
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }
}

/// Neighbor lists of the symmetrized pattern of `a`, without self loops.
pub fn symmetric_adjacency(a: &CsrMatrix) -> Vec<Vec<usize>> {
    let n = a.n_rows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for &j in a.row(i).0 {
            if i != j && j < n {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for nb in &mut adj {
        nb.sort_unstable();
        nb.dedup();
    }
    adj
}

/// Splits the graph of `a` into exactly `s` parts by BFS graph growing.
///
/// Each part is seeded at the lowest unassigned vertex and grown breadth
/// first, visiting neighbors in ascending order, until it holds
/// `ceil(remaining / parts_left)` vertices. If its component runs out first,
/// growth resumes from the next lowest unassigned vertex. Every part
/// therefore has at most `ceil(n / s)` vertices.
pub fn partition_graph(a: &CsrMatrix, s: usize) -> Result<Partition> {
    if !a.is_square() {
        return Err(Error::NotSquare { n_rows: a.n_rows(), n_cols: a.n_cols() });
    }
    let n = a.n_rows();
    if s == 0 || s > n {
        return Err(Error::InvalidArgument(format!("cannot split {n} rows into {s} parts")));
    }
    let adj = symmetric_adjacency(a);
    let mut part_of = vec![usize::MAX; n];
    let mut parts = Vec::with_capacity(s);
    let mut next_seed = 0;
    let mut remaining = n;
    let mut queue = VecDeque::new();

    for p in 0..s {
        let target = remaining.div_ceil(s - p);
        let mut members = Vec::with_capacity(target);
        while members.len() < target {
            if queue.is_empty() {
                while part_of[next_seed] != usize::MAX {
                    next_seed += 1;
                }
                part_of[next_seed] = p;
                members.push(next_seed);
                queue.push_back(next_seed);
                continue;
            }
            let v = queue.pop_front().unwrap();
            for &u in &adj[v] {
                if members.len() == target {
                    break;
                }
                if part_of[u] == usize::MAX {
                    part_of[u] = p;
                    members.push(u);
                    queue.push_back(u);
                }
            }
        }
        queue.clear();
        remaining -= members.len();
        members.sort_unstable();
        parts.push(members);
    }
    Ok(Partition { part_of, parts })
}

/// Grows every part by `overlap` rounds of one-hop neighbors.
pub fn extend_overlap(a: &CsrMatrix, partition: &Partition, overlap: usize) -> Vec<Vec<usize>> {
    if overlap == 0 {
        return partition.parts().to_vec();
    }
    let adj = symmetric_adjacency(a);
    let n = partition.n();
    let mut mark = vec![usize::MAX; n];
    partition
        .parts()
        .iter()
        .enumerate()
        .map(|(p, members)| {
            let mut set = members.clone();
            for &v in &set {
                mark[v] = p;
            }
            let mut frontier = set.clone();
            for _ in 0..overlap {
                let mut next = Vec::new();
                for &v in &frontier {
                    for &u in &adj[v] {
                        if mark[u] != p {
                            mark[u] = p;
                            next.push(u);
                        }
                    }
                }
                if next.is_empty() {
                    break;
                }
                set.extend_from_slice(&next);
                frontier = next;
            }
            set.sort_unstable();
            set
        })
        .collect()
}

/// Principal submatrix `a[idx, idx]` for a sorted index list.
pub fn principal_submatrix(a: &CsrMatrix, idx: &[usize]) -> CsrMatrix {
    let mut local = vec![usize::MAX; a.n_cols()];
    for (k, &g) in idx.iter().enumerate() {
        local[g] = k;
    }
    let mut offsets = vec![0];
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for &g in idx {
        let (rc, rv) = a.row(g);
        for (&c, &v) in rc.iter().zip(rv) {
            if local[c] != usize::MAX {
                cols.push(local[c]);
                vals.push(v);
            }
        }
        offsets.push(cols.len());
    }
    CsrMatrix::from_parts_unchecked(idx.len(), idx.len(), offsets, cols, vals)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrecondKind {
    /// Block ILU(0).
    Bilu0,
    /// Block ILU(k).
    Biluk { level: usize },
    /// Block ILUT(p, tol).
    Bilut { p: usize, tol: f64 },
    /// Restricted Additive Schwarz with ILU(0) subdomain solves.
    Ras,
}

impl PrecondKind {
    /// Short name as used in the `pre` column of benchmark output.
    pub fn label(&self) -> &'static str {
        match self {
            PrecondKind::Bilu0 => "BILU",
            PrecondKind::Biluk { .. } => "BILUK",
            PrecondKind::Bilut { .. } => "BILUT",
            PrecondKind::Ras => "RAS",
        }
    }

    pub fn allows_overlap(&self) -> bool {
        matches!(self, PrecondKind::Ras)
    }

    fn factor(&self, a: &CsrMatrix) -> Result<IluFactors> {
        match *self {
            PrecondKind::Bilu0 | PrecondKind::Ras => ilu0(a),
            PrecondKind::Biluk { level } => ilu_k(a, level),
            PrecondKind::Bilut { p, tol } => ilut(a, p, tol),
        }
    }
}

impl fmt::Display for PrecondKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrecondKind::Bilu0 => write!(f, "BILU"),
            PrecondKind::Biluk { level } => write!(f, "BILU({level})"),
            PrecondKind::Bilut { p, tol } => write!(f, "BILUT({p},{tol})"),
            PrecondKind::Ras => write!(f, "RAS"),
        }
    }
}

impl FromStr for PrecondKind {
    type Err = Error;

    /// Accepts `bilu0`, `ras`, `biluk:K`, and `bilut:P,TOL`; the ILUT form
    /// may also be written `bilut(P,TOL)` or `ilut(P,TOL)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || Error::InvalidArgument(format!("unrecognized preconditioner `{s}`"));
        let (name, args) = match s.find([':', '(']) {
            Some(k) => {
                let args = s[k + 1..].trim_end_matches(')');
                (&s[..k], Some(args))
            }
            None => (s.as_str(), None),
        };
        match (name, args) {
            ("bilu0" | "bilu" | "ilu0", None) => Ok(PrecondKind::Bilu0),
            ("ras", None) => Ok(PrecondKind::Ras),
            ("biluk" | "iluk", Some(a)) => {
                let level = a.trim().parse().map_err(|_| bad())?;
                Ok(PrecondKind::Biluk { level })
            }
            ("bilut" | "ilut", Some(a)) => {
                let (p, tol) = a.split_once(',').ok_or_else(bad)?;
                let p: usize = p.trim().parse().map_err(|_| bad())?;
                let tol: f64 = tol.trim().parse().map_err(|_| bad())?;
                if p == 0 || tol.is_nan() || tol < 0.0 {
                    return Err(bad());
                }
                Ok(PrecondKind::Bilut { p, tol })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecondConfig {
    pub kind: PrecondKind,
    pub blocks: usize,
    pub overlap: usize,
    pub width: WidthPolicy,
}

impl PrecondConfig {
    pub fn new(kind: PrecondKind, blocks: usize) -> Self {
        Self { kind, blocks, overlap: 0, width: WidthPolicy::Auto }
    }

    pub fn with_overlap(mut self, overlap: usize) -> Self {
        self.overlap = overlap;
        self
    }

    pub fn with_width(mut self, width: WidthPolicy) -> Self {
        self.width = width;
        self
    }
}

#[derive(Debug, Clone)]
pub struct BlockPreconditioner {
    kind: PrecondKind,
    overlap: usize,
    partition: Partition,
    extended_parts: Vec<Vec<usize>>,
    block_offsets: Vec<usize>,
    /// concatenated local index -> global row
    local_to_global: Vec<usize>,
    /// global row -> the local index whose result it takes
    owner_slot: Vec<usize>,
    block_factors: Vec<IluFactors>,
    assembled: IluFactors,
    solver: LuSolver,
}

impl BlockPreconditioner {
    pub fn build(a: &CsrMatrix, cfg: &PrecondConfig) -> Result<Self> {
        if cfg.overlap > 0 && !cfg.kind.allows_overlap() {
            return Err(Error::InvalidArgument(format!("{} does not take an overlap", cfg.kind)));
        }
        let partition = partition_graph(a, cfg.blocks)?;
        let extended_parts = extend_overlap(a, &partition, cfg.overlap);

        let mut block_offsets = vec![0];
        let mut local_to_global = Vec::new();
        let mut owner_slot = vec![usize::MAX; a.n_rows()];
        let mut block_factors = Vec::with_capacity(extended_parts.len());
        for (b, idx) in extended_parts.iter().enumerate() {
            let base = local_to_global.len();
            for (k, &g) in idx.iter().enumerate() {
                if partition.part_of()[g] == b {
                    owner_slot[g] = base + k;
                }
            }
            local_to_global.extend_from_slice(idx);
            block_offsets.push(local_to_global.len());

            let sub = principal_submatrix(a, idx);
            let f = cfg.kind.factor(&sub).map_err(|e| match e {
                Error::ZeroPivot { row } => Error::BlockZeroPivot { block: b, local_row: row },
                other => other,
            })?;
            block_factors.push(f);
        }

        let assembled = IluFactors {
            l: block_diagonal(block_factors.iter().map(|f| &f.l)),
            u: block_diagonal(block_factors.iter().map(|f| &f.u)),
        };
        let solver = assembled.solver(cfg.width)?;
        Ok(Self {
            kind: cfg.kind,
            overlap: cfg.overlap,
            partition,
            extended_parts,
            block_offsets,
            local_to_global,
            owner_slot,
            block_factors,
            assembled,
            solver,
        })
    }

    pub fn kind(&self) -> PrecondKind {
        self.kind
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn extended_parts(&self) -> &[Vec<usize>] {
        &self.extended_parts
    }

    /// Start of each block in the concatenated local numbering.
    pub fn block_offsets(&self) -> &[usize] {
        &self.block_offsets
    }

    pub fn block_factors(&self) -> &[IluFactors] {
        &self.block_factors
    }

    /// `diag(L_1..L_s)` and `diag(U_1..U_s)`.
    pub fn assembled(&self) -> &IluFactors {
        &self.assembled
    }

    pub fn solver(&self) -> &LuSolver {
        &self.solver
    }

    /// Whether each local row of block `b` is owned by that block.
    pub fn restriction(&self, b: usize) -> Vec<bool> {
        self.extended_parts[b].iter().map(|&g| self.partition.part_of()[g] == b).collect()
    }

    /// Local slot each global row is read back from.
    pub fn owner_slots(&self) -> &[usize] {
        &self.owner_slot
    }

    pub fn apply(&self, r: &[f64], workers: usize) -> Result<Vec<f64>> {
        let n = self.partition.n();
        if r.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: r.len() });
        }
        let gathered: Vec<f64> = self.local_to_global.iter().map(|&g| r[g]).collect();
        let z = self.solver.apply(&gathered, workers)?;
        Ok(self.owner_slot.iter().map(|&k| z[k]).collect())
    }
}

impl Preconditioner for BlockPreconditioner {
    fn n(&self) -> usize {
        self.partition.n()
    }

    fn apply(&self, r: &[f64], workers: usize) -> Result<Vec<f64>> {
        BlockPreconditioner::apply(self, r, workers)
    }
}

fn block_diagonal<'a>(blocks: impl Iterator<Item = &'a CsrMatrix>) -> CsrMatrix {
    let mut offsets = vec![0];
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut base = 0;
    for b in blocks {
        for i in 0..b.n_rows() {
            let (rc, rv) = b.row(i);
            cols.extend(rc.iter().map(|&c| c + base));
            vals.extend_from_slice(rv);
            offsets.push(cols.len());
        }
        base += b.n_rows();
    }
    CsrMatrix::from_parts_unchecked(base, base, offsets, cols, vals)
}
