//! Pairwise balanced designs: verification, replication profiles, the Bose
//! triple system construction, incidence matrices, and alist file I/O.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::gf2::BinaryMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesignError {
    #[error("point index {index} out of range for {v} points")]
    PointOutOfRange { index: usize, v: usize },
    #[error("blocks must be nonempty")]
    EmptyBlock,
    #[error("block contains a repeated point: {0:?}")]
    RepeatedPoint(Vec<usize>),
    #[error("order {0} is not congruent to 3 mod 6")]
    BoseOrder(usize),
    #[error("constructed design failed verification: {0}")]
    ConstructionInvalid(String),
    #[error("malformed alist: {0}")]
    Alist(String),
}

/// A candidate pairwise balanced design of index 1.
///
/// Blocks are stored as sorted point-index lists and the block list itself is
/// sorted, so incidence matrices are deterministic. Construction performs
/// only structural checks; the index-1 condition is examined by
/// [`PairwiseBalancedDesign::verify`], which reports rather than rejects.
#[derive(Clone, PartialEq, Eq)]
pub struct PairwiseBalancedDesign {
    v: usize,
    blocks: Vec<Vec<usize>>,
    sizes: BTreeSet<usize>,
}

impl PairwiseBalancedDesign {
    pub fn new(v: usize, blocks: Vec<Vec<usize>>) -> Result<Self, DesignError> {
        let mut canonical = Vec::with_capacity(blocks.len());
        for mut block in blocks {
            if block.is_empty() {
                return Err(DesignError::EmptyBlock);
            }
            block.sort_unstable();
            if let Some(&max) = block.last() {
                if max >= v {
                    return Err(DesignError::PointOutOfRange { index: max, v });
                }
            }
            if block.windows(2).any(|w| w[0] == w[1]) {
                return Err(DesignError::RepeatedPoint(block));
            }
            canonical.push(block);
        }
        canonical.sort_unstable();
        let sizes = canonical.iter().map(Vec::len).collect();
        Ok(Self {
            v,
            blocks: canonical,
            sizes,
        })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// The set `K` of occurring block sizes.
    pub fn block_sizes(&self) -> &BTreeSet<usize> {
        &self.sizes
    }

    /// `Some(mu)` when all blocks share the single size `mu`.
    pub fn steiner_block_size(&self) -> Option<usize> {
        if self.sizes.len() == 1 {
            self.sizes.first().copied()
        } else {
            None
        }
    }

    /// No blocks, or a single block covering every point.
    pub fn is_trivial(&self) -> bool {
        self.blocks.is_empty() || (self.blocks.len() == 1 && self.blocks[0].len() == self.v)
    }

    /// Per-point replication numbers and parity flags.
    pub fn replication_profile(&self) -> ReplicationProfile {
        let mut counts = vec![0usize; self.v];
        for block in &self.blocks {
            for &p in block {
                counts[p] += 1;
            }
        }
        let equireplicate = counts.windows(2).all(|w| w[0] == w[1]);
        let odd_replicate = counts.iter().all(|&r| r % 2 == 1);
        let even_replicate = counts.iter().all(|&r| r % 2 == 0);
        ReplicationProfile {
            counts,
            equireplicate,
            odd_replicate,
            even_replicate,
        }
    }

    /// Check the index-1 condition: every unordered pair of distinct points
    /// in exactly one block. Violations are reported, never thrown.
    pub fn verify(&self) -> PbdReport {
        let mut pair_counts = vec![0u32; self.v * self.v];
        for block in &self.blocks {
            for (i, &a) in block.iter().enumerate() {
                for &b in &block[i + 1..] {
                    pair_counts[a * self.v + b] += 1;
                }
            }
        }
        let mut violations = Vec::new();
        for a in 0..self.v {
            for b in a + 1..self.v {
                let count = pair_counts[a * self.v + b] as usize;
                if count != 1 {
                    violations.push(PairViolation { pair: (a, b), count });
                }
            }
        }
        PbdReport {
            valid: violations.is_empty(),
            sizes: self.sizes.clone(),
            profile: self.replication_profile(),
            violations,
        }
    }

    /// The `v x b` incidence matrix: rows indexed by points, columns by
    /// blocks in block-list order.
    pub fn incidence(&self) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(self.v, self.blocks.len());
        for (j, block) in self.blocks.iter().enumerate() {
            for &p in block {
                m.set(p, j, true);
            }
        }
        m
    }

    /// Reinterpret matrix columns as blocks (rows as points).
    pub fn from_incidence(m: &BinaryMatrix) -> Result<Self, DesignError> {
        let t = m.transpose();
        let blocks = (0..m.cols()).map(|c| t.row(c).support()).collect();
        Self::new(m.rows(), blocks)
    }
}

impl fmt::Debug for PairwiseBalancedDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PairwiseBalancedDesign(v={}, b={}, K={:?})",
            self.v,
            self.blocks.len(),
            self.sizes
        )
    }
}

/// Per-point replication numbers of a design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicationProfile {
    pub counts: Vec<usize>,
    pub equireplicate: bool,
    pub odd_replicate: bool,
    pub even_replicate: bool,
}

impl ReplicationProfile {
    /// The common replication number, when one exists.
    pub fn replication(&self) -> Option<usize> {
        if self.equireplicate {
            self.counts.first().copied()
        } else {
            None
        }
    }
}

/// An unordered point pair covered by a wrong number of blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairViolation {
    pub pair: (usize, usize),
    pub count: usize,
}

/// Outcome of [`PairwiseBalancedDesign::verify`].
#[derive(Debug, Clone)]
pub struct PbdReport {
    pub valid: bool,
    pub sizes: BTreeSet<usize>,
    pub profile: ReplicationProfile,
    pub violations: Vec<PairViolation>,
}

impl fmt::Display for PbdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "valid: {}", self.valid)?;
        let sizes: Vec<String> = self.sizes.iter().map(ToString::to_string).collect();
        writeln!(f, "block_sizes: {{{}}}", sizes.join(","))?;
        writeln!(f, "equireplicate: {}", self.profile.equireplicate)?;
        if let Some(r) = self.profile.replication() {
            writeln!(f, "replication: {r}")?;
        }
        writeln!(
            f,
            "replication_parity: {}",
            if self.profile.odd_replicate {
                "odd"
            } else if self.profile.even_replicate {
                "even"
            } else {
                "mixed"
            }
        )?;
        write!(f, "pair_violations: {}", self.violations.len())
    }
}

/// Steiner triple system of order `v = 6t + 3` on the points
/// `Z_{2t+1} x {0,1,2}` via the Bose construction.
///
/// The point `(x, i)` is flattened to index `i*(2t+1) + x`. The triples are
/// the verticals `{(x,0),(x,1),(x,2)}` together with
/// `{(x,i),(y,i),((x+y)(t+1) mod 2t+1, i+1 mod 3)}` for `x < y`; the
/// multiplier `t + 1` realizes the half sum in the odd cyclic group. The
/// result is checked for validity before being returned.
pub fn bose_sts(v: usize) -> Result<PairwiseBalancedDesign, DesignError> {
    if v < 9 || v % 6 != 3 {
        return Err(DesignError::BoseOrder(v));
    }
    let t = (v - 3) / 6;
    let n = 2 * t + 1;
    let flat = |x: usize, level: usize| level * n + x;
    let mut blocks = Vec::with_capacity(v * (v - 1) / 6);
    for x in 0..n {
        blocks.push(vec![flat(x, 0), flat(x, 1), flat(x, 2)]);
    }
    for level in 0..3 {
        for x in 0..n {
            for y in x + 1..n {
                let z = ((x + y) * (t + 1)) % n;
                blocks.push(vec![flat(x, level), flat(y, level), flat(z, (level + 1) % 3)]);
            }
        }
    }
    let design = PairwiseBalancedDesign::new(v, blocks)?;
    let report = design.verify();
    if !report.valid {
        return Err(DesignError::ConstructionInvalid(format!(
            "Bose system of order {v} has {} pair violations",
            report.violations.len()
        )));
    }
    Ok(design)
}

/// Serialize a binary matrix in the MacKay alist format.
///
/// Layout: `N M` (columns, rows), the maximum column and row degrees, the
/// per-column and per-row degree lists, then 1-based position lists, one
/// line per column followed by one line per row. Lists are never
/// zero-padded on write.
pub fn export_alist(m: &BinaryMatrix) -> String {
    let col_weights = m.column_weights();
    let row_weights = m.row_weights();
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", m.cols(), m.rows()));
    out.push_str(&format!(
        "{} {}\n",
        col_weights.iter().max().copied().unwrap_or(0),
        row_weights.iter().max().copied().unwrap_or(0)
    ));
    let join = |ws: &[usize]| {
        ws.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.push_str(&join(&col_weights));
    out.push('\n');
    out.push_str(&join(&row_weights));
    out.push('\n');
    let t = m.transpose();
    for c in 0..m.cols() {
        let ones: Vec<String> = t.row(c).support().iter().map(|r| (r + 1).to_string()).collect();
        out.push_str(&ones.join(" "));
        out.push('\n');
    }
    for r in 0..m.rows() {
        let ones: Vec<String> = m.row(r).support().iter().map(|c| (c + 1).to_string()).collect();
        out.push_str(&ones.join(" "));
        out.push('\n');
    }
    out
}

/// Parse a matrix from alist text. Zero-padded position lists are accepted;
/// the row lists are cross-checked against the column lists.
pub fn import_alist(text: &str) -> Result<BinaryMatrix, DesignError> {
    let malformed = |msg: &str| DesignError::Alist(msg.to_string());
    // Empty lines are meaningful: a zero-weight row or column exports as an
    // empty position list.
    let mut lines = text.lines();
    let mut next_ints = |expect: &str| -> Result<Vec<usize>, DesignError> {
        let line = lines
            .next()
            .ok_or_else(|| malformed(&format!("missing {expect}")))?;
        line.split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| malformed(&format!("bad integer {tok:?} in {expect}")))
            })
            .collect()
    };
    let dims = next_ints("dimensions line")?;
    let [cols, rows] = dims[..] else {
        return Err(malformed("dimensions line must hold exactly two integers"));
    };
    if cols == 0 || rows == 0 {
        return Err(malformed("matrix dimensions must be positive"));
    }
    let max_degrees = next_ints("max-degree line")?;
    if max_degrees.len() != 2 {
        return Err(malformed("max-degree line must hold exactly two integers"));
    }
    let col_degrees = next_ints("column degree list")?;
    if col_degrees.len() != cols {
        return Err(malformed("column degree list has wrong length"));
    }
    let row_degrees = next_ints("row degree list")?;
    if row_degrees.len() != rows {
        return Err(malformed("row degree list has wrong length"));
    }
    let mut m = BinaryMatrix::zeros(rows, cols);
    for (c, &degree) in col_degrees.iter().enumerate() {
        let entries = next_ints("column position list")?;
        let nonzero: Vec<usize> = entries.iter().copied().filter(|&e| e != 0).collect();
        if nonzero.len() != degree {
            return Err(malformed(&format!(
                "column {} lists {} positions but declares degree {degree}",
                c + 1,
                nonzero.len()
            )));
        }
        for r in nonzero {
            if r > rows {
                return Err(malformed(&format!("row index {r} out of range")));
            }
            m.set(r - 1, c, true);
        }
    }
    for (r, &degree) in row_degrees.iter().enumerate() {
        let entries = next_ints("row position list")?;
        let nonzero: Vec<usize> = entries.iter().copied().filter(|&e| e != 0).collect();
        if nonzero.len() != degree {
            return Err(malformed(&format!(
                "row {} lists {} positions but declares degree {degree}",
                r + 1,
                nonzero.len()
            )));
        }
        for c in nonzero {
            if c > cols {
                return Err(malformed(&format!("column index {c} out of range")));
            }
            if !m.get(r, c - 1) {
                return Err(malformed(&format!(
                    "row list places an entry at ({},{c}) absent from the column lists",
                    r + 1
                )));
            }
        }
        if m.row_weight(r) != degree {
            return Err(malformed(&format!(
                "row {} degree disagrees with column lists",
                r + 1
            )));
        }
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(malformed("trailing content after position lists"));
    }
    Ok(m)
}
