//! Structural verification of parity-check matrices and designs: girth,
//! even-freeness, forbidden configurations, rank-theorem predictions, and
//! the degeneracy audit.

mod configurations;
mod even_free;

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::designs::PairwiseBalancedDesign;
use crate::gf2::BinaryMatrix;

pub use configurations::{count_configurations, ConfigurationKind};
pub use even_free::{even_freeness, EvenFreenessReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("argument out of range: {0}")]
    InvalidArgument(String),
    #[error("configuration kind {kind} requires {requirement}")]
    WrongBlockSize {
        kind: &'static str,
        requirement: String,
    },
    #[error("search budget exceeded; verified only up to configurations of size {verified}")]
    SearchBudget { verified: usize },
    #[error("exhaustive audit supports at most {limit} rows, got {rows}")]
    TooManyRows { rows: usize, limit: usize },
}

pub(crate) fn require_valid(design: &PairwiseBalancedDesign) -> Result<(), AnalysisError> {
    let report = design.verify();
    if report.valid {
        Ok(())
    } else {
        Err(AnalysisError::InvalidDesign(format!(
            "{} pair violations",
            report.violations.len()
        )))
    }
}

/// Girth of the Tanner graph of a parity-check matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Girth {
    Length(usize),
    Acyclic,
}

impl Girth {
    pub fn length(self) -> Option<usize> {
        match self {
            Girth::Length(l) => Some(l),
            Girth::Acyclic => None,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Length(l) => write!(f, "{l}"),
            Girth::Acyclic => write!(f, "acyclic"),
        }
    }
}

/// Length of a shortest cycle in the Tanner graph, by breadth-first search
/// from every vertex. Checks are vertices `0..rows`, bits are
/// `rows..rows+cols`.
pub fn girth(m: &BinaryMatrix) -> Girth {
    let n = m.rows() + m.cols();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for r in 0..m.rows() {
        for c in m.row(r).support() {
            adj[r].push((m.rows() + c) as u32);
            adj[m.rows() + c].push(r as u32);
        }
    }
    let best = (0..n)
        .into_par_iter()
        .map(|root| {
            let mut dist = vec![u32::MAX; n];
            let mut parent = vec![u32::MAX; n];
            let mut queue = VecDeque::new();
            dist[root] = 0;
            queue.push_back(root as u32);
            let mut local_best = usize::MAX;
            while let Some(u) = queue.pop_front() {
                let du = dist[u as usize] as usize;
                // Any cycle closed from here on has length >= 2*du + 2.
                if 2 * du + 2 >= local_best {
                    break;
                }
                for &w in &adj[u as usize] {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = dist[u as usize] + 1;
                        parent[w as usize] = u;
                        queue.push_back(w);
                    } else if parent[u as usize] != w {
                        local_best = local_best.min(du + dist[w as usize] as usize + 1);
                    }
                }
            }
            local_best
        })
        .min()
        .unwrap_or(usize::MAX);
    if best == usize::MAX {
        Girth::Acyclic
    } else {
        Girth::Length(best)
    }
}

/// Outcome of [`odd_point_bound_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddPointReport {
    pub holds: bool,
    /// Minimum of `|C| + odd(C)` over all examined configurations, if any.
    pub min_value: Option<usize>,
    /// Block indices attaining the minimum.
    pub witness: Option<Vec<usize>>,
}

impl fmt::Display for OddPointReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "holds: {}", self.holds)?;
        match self.min_value {
            Some(v) => writeln!(f, "min_value: {v}")?,
            None => writeln!(f, "min_value: none (vacuous range)")?,
        }
        match &self.witness {
            Some(w) => write!(
                f,
                "witness_blocks: {}",
                w.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
            ),
            None => write!(f, "witness_blocks: none"),
        }
    }
}

/// Minimum of `|C| + odd(C)` over all block subsets `C` with
/// `1 < |C| <= limit`, where `odd(C)` counts the points lying in an odd
/// number of blocks of `C`. `holds` is true when the minimum is at least
/// `bound` (vacuously true when the range is empty).
pub fn odd_point_bound_check(
    design: &PairwiseBalancedDesign,
    limit: usize,
    bound: usize,
) -> Result<OddPointReport, AnalysisError> {
    if limit > 9 {
        return Err(AnalysisError::InvalidArgument(format!(
            "odd-point search limit must be at most 9, got {limit}"
        )));
    }
    if design.v() > 128 {
        return Err(AnalysisError::SearchBudget { verified: 0 });
    }
    require_valid(design)?;
    let blocks = design.blocks();
    let b = blocks.len();
    if limit < 2 || b < 2 {
        return Ok(OddPointReport {
            holds: true,
            min_value: None,
            witness: None,
        });
    }
    let masks: Vec<u128> = blocks
        .iter()
        .map(|block| block.iter().fold(0u128, |m, &p| m | (1 << p)))
        .collect();
    let max_size = design.block_sizes().last().copied().unwrap_or(0);

    struct Best {
        value: usize,
        witness: Vec<usize>,
    }

    fn dfs(
        masks: &[u128],
        chosen: &mut Vec<usize>,
        acc: u128,
        next: usize,
        limit: usize,
        max_size: usize,
        best: &mut Option<Best>,
    ) {
        let depth = chosen.len();
        if depth >= 2 {
            let value = depth + acc.count_ones() as usize;
            if best.as_ref().is_none_or(|b| value < b.value) {
                *best = Some(Best {
                    value,
                    witness: chosen.clone(),
                });
            }
        }
        if depth == limit {
            return;
        }
        // Each further block changes |C| + odd(C) by at least 1 - max_size,
        // so no descendant can beat this floor.
        if let Some(b) = best.as_ref() {
            let here = depth + acc.count_ones() as usize;
            if here.saturating_sub((limit - depth) * (max_size - 1)) >= b.value {
                return;
            }
        }
        for i in next..masks.len() {
            chosen.push(i);
            dfs(masks, chosen, acc ^ masks[i], i + 1, limit, max_size, best);
            chosen.pop();
        }
    }

    let best = (0..b)
        .into_par_iter()
        .map(|first| {
            let mut best = None;
            let mut chosen = vec![first];
            dfs(
                &masks,
                &mut chosen,
                masks[first],
                first + 1,
                limit,
                max_size,
                &mut best,
            );
            best.map(|b| (b.value, b.witness))
        })
        .reduce(|| None, |a, b| match (a, b) {
            (Some(x), Some(y)) => Some(std::cmp::min(x, y)),
            (x, None) => x,
            (None, y) => y,
        });
    let (min_value, witness) = match best {
        Some((v, w)) => (Some(v), Some(w)),
        None => (None, None),
    };
    Ok(OddPointReport {
        holds: min_value.is_none_or(|v| v >= bound),
        min_value,
        witness,
    })
}

/// Exact evaluation of the binary rank formula for projective line designs
/// over fields of characteristic two.
///
/// With `q = 2^t`, sums over all tuples `(s_0, ..., s_t)` with `s_0 = s_t`,
/// `0 <= s_j <= m - 1`, and `0 <= 2 s_{j+1} - s_j <= m + 1` the product of
/// the alternating inner sums; binomials with `0 < a < b` vanish.
pub fn phi_e(m: u32, q: u64) -> Result<u64, AnalysisError> {
    if q < 2 || !q.is_power_of_two() {
        return Err(AnalysisError::InvalidArgument(format!(
            "order {q} is not a power of two"
        )));
    }
    if m < 1 {
        return Err(AnalysisError::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let t = q.trailing_zeros() as usize;
    let m = m as i64;

    fn binom(a: i64, b: i64) -> i128 {
        if b < 0 || a < b {
            return 0;
        }
        let mut acc: i128 = 1;
        for i in 0..b {
            acc = acc * (a - i) as i128 / (i as i128 + 1);
        }
        acc
    }

    fn inner(m: i64, s_next: i64, s_prev: i64) -> i128 {
        let diff = 2 * s_next - s_prev;
        let cap = diff / 2;
        let mut total: i128 = 0;
        for i in 0..=cap {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            total += sign * binom(m + 1, i) * binom(m + diff - 2 * i, m);
        }
        total
    }

    fn walk(m: i64, t: usize, step: usize, s0: i64, s_prev: i64, acc: i128, total: &mut i128) {
        if step == t {
            if s_prev == s0 {
                *total += acc;
            }
            return;
        }
        for s_next in 0..m.max(1) {
            let diff = 2 * s_next - s_prev;
            if diff < 0 || diff > m + 1 {
                continue;
            }
            walk(m, t, step + 1, s0, s_next, acc * inner(m, s_next, s_prev), total);
        }
    }

    let mut total: i128 = 0;
    for s0 in 0..m.max(1) {
        walk(m, t, 0, s0, s0, 1, &mut total);
    }
    u64::try_from(total).map_err(|_| {
        AnalysisError::InvalidArgument("rank formula overflowed".into())
    })
}

/// What a rank prediction constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankTarget {
    Rank,
    GramRank,
}

/// A single prediction evaluated against the computed value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCheck {
    pub name: &'static str,
    pub target: RankTarget,
    pub low: usize,
    pub high: usize,
    pub observed: usize,
    pub consistent: bool,
}

/// Outcome of [`rank_predictions`].
#[derive(Debug, Clone)]
pub struct RankReport {
    pub v: usize,
    pub block_count: usize,
    pub rank: usize,
    pub gram_rank: usize,
    pub checks: Vec<RankCheck>,
    pub all_consistent: bool,
}

impl fmt::Display for RankReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "points: {}", self.v)?;
        writeln!(f, "blocks: {}", self.block_count)?;
        writeln!(f, "rank: {}", self.rank)?;
        writeln!(f, "gram_rank: {}", self.gram_rank)?;
        for check in &self.checks {
            let target = match check.target {
                RankTarget::Rank => "rank",
                RankTarget::GramRank => "gram_rank",
            };
            let range = if check.low == check.high {
                format!("{}", check.low)
            } else if check.high == usize::MAX {
                format!(">= {}", check.low)
            } else {
                format!("{}..={}", check.low, check.high)
            };
            writeln!(
                f,
                "check[{}]: {target} in {range}, observed {}, {}",
                check.name,
                check.observed,
                if check.consistent { "ok" } else { "VIOLATED" }
            )?;
        }
        write!(f, "all_consistent: {}", self.all_consistent)
    }
}

/// Evaluate every applicable rank prediction for a valid design against the
/// computed rank and Gram rank of its incidence matrix.
///
/// For Steiner 2-designs this covers the parity-based full-rank and
/// rank-`v-1` criteria and the square-root lower bound on the rank; for any
/// index-1 design with all replication numbers and block sizes above one,
/// the Gram rank is 1 exactly when the design is odd-replicate.
pub fn rank_predictions(design: &PairwiseBalancedDesign) -> Result<RankReport, AnalysisError> {
    require_valid(design)?;
    let incidence = design.incidence();
    let rank = incidence.rank();
    let gram_rank = incidence.gram_rank();
    let v = design.v();
    let profile = design.replication_profile();
    let mut checks = Vec::new();
    let mut push = |name, target, low, high, observed| {
        checks.push(RankCheck {
            name,
            target,
            low,
            high,
            observed,
            consistent: (low..=high).contains(&observed),
        });
    };

    if let Some(mu) = design.steiner_block_size() {
        if v > mu {
            if (mu * (v - mu) / (mu - 1)) % 2 == 1 {
                push("full-rank parity criterion", RankTarget::Rank, v, v, rank);
            } else if mu % 2 == 0 && ((v - mu) / (mu - 1)) % 2 == 1 {
                push(
                    "even-block-size rank criterion",
                    RankTarget::Rank,
                    v - 1,
                    v - 1,
                    rank,
                );
            }
            // Least L with mu*L*(L-1) >= (v-1)(v-mu), the square-root bound
            // evaluated in integers.
            let target = (v - 1) * (v - mu);
            let lower = (1..).find(|&l| mu * l * (l - 1) >= target).unwrap();
            push("square-root rank bound", RankTarget::Rank, lower, v, rank);
        }
    }

    let min_replication = profile.counts.iter().min().copied().unwrap_or(0);
    let min_block = design.block_sizes().first().copied().unwrap_or(0);
    if min_replication >= 2 && min_block >= 2 {
        if profile.odd_replicate {
            push("odd-replicate Gram criterion", RankTarget::GramRank, 1, 1, gram_rank);
        } else {
            // The criterion is two-sided: a Gram rank of 1 forces odd
            // replication.
            push(
                "odd-replicate Gram criterion (converse)",
                RankTarget::GramRank,
                2,
                usize::MAX,
                gram_rank,
            );
        }
    }

    let all_consistent = checks.iter().all(|c| c.consistent);
    Ok(RankReport {
        v,
        block_count: design.block_count(),
        rank,
        gram_rank,
        checks,
        all_consistent,
    })
}

/// Outcome of [`degeneracy_audit`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegeneracyReport {
    pub rows: usize,
    pub target_weight: usize,
    /// Minimum nonzero weight over all sums of evenly many rows.
    pub min_even_row_weight: Option<usize>,
    pub has_weight_d_even_combination: bool,
    /// True when no even row combination has weight at most the target.
    pub non_degenerate: bool,
}

impl fmt::Display for DegeneracyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows: {}", self.rows)?;
        writeln!(f, "target_weight: {}", self.target_weight)?;
        match self.min_even_row_weight {
            Some(w) => writeln!(f, "min_even_row_weight: {w}")?,
            None => writeln!(f, "min_even_row_weight: none (all even sums vanish)")?,
        }
        writeln!(
            f,
            "has_weight_d_even_combination: {}",
            self.has_weight_d_even_combination
        )?;
        write!(f, "non_degenerate: {}", self.non_degenerate)
    }
}

const DEGENERACY_ROW_LIMIT: usize = 24;

/// Exhaustively enumerate the sums of all even-cardinality row subsets of
/// `hp` and report the minimum nonzero weight, whether any sum has weight
/// exactly `d`, and whether none has weight at most `d`.
pub fn degeneracy_audit(hp: &BinaryMatrix, d: usize) -> Result<DegeneracyReport, AnalysisError> {
    let rows = hp.rows();
    if rows > DEGENERACY_ROW_LIMIT {
        return Err(AnalysisError::TooManyRows {
            rows,
            limit: DEGENERACY_ROW_LIMIT,
        });
    }
    let mut min_weight: Option<usize> = None;
    let mut has_d = false;
    if rows >= 2 {
        // The even-subset space is spanned by row_0 + row_i; walk it with a
        // Gray code.
        let basis: Vec<crate::gf2::BinaryVector> = (1..rows)
            .map(|i| {
                let mut row = hp.row(0);
                row.xor_assign(&hp.row(i));
                row
            })
            .collect();
        let mut current = crate::gf2::BinaryVector::zeros(hp.cols());
        for i in 1u64..(1u64 << basis.len()) {
            current.xor_assign(&basis[i.trailing_zeros() as usize]);
            let weight = current.weight();
            if weight == d {
                has_d = true;
            }
            if weight > 0 && min_weight.is_none_or(|m| weight < m) {
                min_weight = Some(weight);
            }
        }
    }
    Ok(DegeneracyReport {
        rows,
        target_weight: d,
        min_even_row_weight: min_weight,
        has_weight_d_even_combination: has_d,
        non_degenerate: min_weight.is_none_or(|m| m > d),
    })
}
