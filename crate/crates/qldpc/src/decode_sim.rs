//! Syndrome-based sum-product decoding over binary symmetric channels and a
//! reproducible Monte Carlo block-error-rate harness.
//!
//! Decoding is in the syndrome domain: given `s = H e^T` and per-position
//! crossover probabilities, belief propagation with a flooding schedule
//! infers `e`. The check update uses the tanh rule with the syndrome bit as
//! a sign; iteration stops as soon as the hard decision reproduces the
//! syndrome. Trials draw their randomness from a stream derived from
//! `(seed, grid index, trial index)`, so sweeps are bit-reproducible at any
//! thread count.

use std::collections::HashMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::gf2::{BinaryMatrix, BinaryVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("crossover probability {0} outside [0, 0.5]")]
    ProbabilityRange(f64),
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("syndrome table infeasible for a {rows} x {cols} matrix")]
    TableTooLarge { rows: usize, cols: usize },
    #[error("syndrome is not in the row space of the parity-check matrix")]
    InconsistentSyndrome,
    #[error("block error rate {0} outside [0, 1]")]
    BlerRange(f64),
}

/// Per-position crossover probabilities: uniform, or a separate probability
/// for a leading block of positions.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    len: usize,
    aux_len: usize,
    p_aux: f64,
    p_rest: f64,
}

impl ChannelModel {
    pub fn uniform(len: usize, p: f64) -> Result<Self, SimError> {
        check_probability(p)?;
        Ok(Self {
            len,
            aux_len: 0,
            p_aux: p,
            p_rest: p,
        })
    }

    /// `p_aux` on the first `aux_len` positions, `p` on the rest. Equal
    /// probabilities collapse to the uniform layout so that sampling is
    /// bit-identical to a uniform channel.
    pub fn split(len: usize, aux_len: usize, p_aux: f64, p: f64) -> Result<Self, SimError> {
        check_probability(p_aux)?;
        check_probability(p)?;
        if aux_len > len {
            return Err(SimError::Dimension(format!(
                "auxiliary block {aux_len} exceeds channel length {len}"
            )));
        }
        let aux_len = if p_aux == p { 0 } else { aux_len };
        Ok(Self {
            len,
            aux_len,
            p_aux,
            p_rest: p,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn probability(&self, position: usize) -> f64 {
        if position < self.aux_len {
            self.p_aux
        } else {
            self.p_rest
        }
    }

    pub fn aux_probability(&self) -> f64 {
        if self.aux_len > 0 {
            self.p_aux
        } else {
            self.p_rest
        }
    }

    pub fn rest_probability(&self) -> f64 {
        self.p_rest
    }

    /// Prior log-likelihood ratio `log((1-p)/p)`, clamped; zero-probability
    /// positions receive the clamp value.
    fn prior_llr(&self, position: usize, clamp: f64) -> f64 {
        let p = self.probability(position);
        if p <= 0.0 {
            clamp
        } else {
            (((1.0 - p) / p).ln()).clamp(-clamp, clamp)
        }
    }

    /// Sample an error pattern with independent per-position flips, using
    /// geometric gap skipping within each constant-probability segment.
    pub fn sample_error(&self, rng: &mut impl Rng) -> BinaryVector {
        let mut e = BinaryVector::zeros(self.len);
        self.sample_segment(rng, 0, self.aux_len, self.p_aux, &mut e);
        self.sample_segment(rng, self.aux_len, self.len, self.p_rest, &mut e);
        e
    }

    fn sample_segment(
        &self,
        rng: &mut impl Rng,
        start: usize,
        end: usize,
        p: f64,
        out: &mut BinaryVector,
    ) {
        if p <= 0.0 || start >= end {
            return;
        }
        let log_q = (1.0 - p).ln();
        let mut pos = start;
        loop {
            // Gap to the next flip is geometric with success probability p.
            let u: f64 = 1.0 - rng.random::<f64>();
            let gap = (u.ln() / log_q).floor();
            if !gap.is_finite() || gap >= (end - pos) as f64 {
                break;
            }
            pos += gap as usize;
            out.set(pos, true);
            pos += 1;
            if pos >= end {
                break;
            }
        }
    }
}

fn check_probability(p: f64) -> Result<(), SimError> {
    if !(0.0..=0.5).contains(&p) {
        return Err(SimError::ProbabilityRange(p));
    }
    Ok(())
}

/// Result of one decoding attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub estimate: BinaryVector,
    pub converged: bool,
    pub iterations: usize,
}

/// Sum-product decoder state compiled from a parity-check matrix.
#[derive(Debug, Clone)]
pub struct SumProductDecoder {
    rows: usize,
    cols: usize,
    max_iterations: usize,
    llr_clamp: f64,
    /// Edges grouped by check: `check_edges[start[c]..start[c+1]]` hold the
    /// variable of each edge.
    check_start: Vec<u32>,
    edge_var: Vec<u32>,
    /// Edge indices grouped by variable.
    var_start: Vec<u32>,
    var_edges: Vec<u32>,
}

pub const DEFAULT_MAX_ITERATIONS: usize = 100;
pub const DEFAULT_LLR_CLAMP: f64 = 30.0;

impl SumProductDecoder {
    pub fn new(h: &BinaryMatrix) -> Self {
        Self::with_config(h, DEFAULT_MAX_ITERATIONS, DEFAULT_LLR_CLAMP)
    }

    pub fn with_config(h: &BinaryMatrix, max_iterations: usize, llr_clamp: f64) -> Self {
        let rows = h.rows();
        let cols = h.cols();
        let mut check_start = Vec::with_capacity(rows + 1);
        let mut edge_var = Vec::new();
        check_start.push(0);
        for r in 0..rows {
            for c in h.row(r).support() {
                edge_var.push(c as u32);
            }
            check_start.push(edge_var.len() as u32);
        }
        let mut var_edges_vec: Vec<Vec<u32>> = vec![Vec::new(); cols];
        for (edge, &v) in edge_var.iter().enumerate() {
            var_edges_vec[v as usize].push(edge as u32);
        }
        let mut var_start = Vec::with_capacity(cols + 1);
        let mut var_edges = Vec::with_capacity(edge_var.len());
        var_start.push(0);
        for edges in var_edges_vec {
            var_edges.extend(edges);
            var_start.push(var_edges.len() as u32);
        }
        Self {
            rows,
            cols,
            max_iterations,
            llr_clamp,
            check_start,
            edge_var,
            var_start,
            var_edges,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn syndrome_matches(&self, estimate: &BinaryVector, syndrome: &BinaryVector) -> bool {
        for c in 0..self.rows {
            let mut parity = false;
            for e in self.check_start[c]..self.check_start[c + 1] {
                parity ^= estimate.get(self.edge_var[e as usize] as usize);
            }
            if parity != syndrome.get(c) {
                return false;
            }
        }
        true
    }

    /// Infer an error pattern from its syndrome under the channel priors.
    ///
    /// `converged` is true when the hard decision reproduces the syndrome at
    /// some iteration, at which point iteration stops; otherwise the final
    /// hard decision is returned.
    pub fn decode(
        &self,
        syndrome: &BinaryVector,
        channel: &ChannelModel,
    ) -> Result<DecodeOutcome, SimError> {
        if syndrome.len() != self.rows {
            return Err(SimError::Dimension(format!(
                "syndrome length {} but matrix has {} rows",
                syndrome.len(),
                self.rows
            )));
        }
        if channel.len() != self.cols {
            return Err(SimError::Dimension(format!(
                "channel length {} but matrix has {} columns",
                channel.len(),
                self.cols
            )));
        }
        let edge_count = self.edge_var.len();
        let priors: Vec<f64> = (0..self.cols)
            .map(|v| channel.prior_llr(v, self.llr_clamp))
            .collect();
        let mut var_to_check = vec![0.0f64; edge_count];
        let mut check_to_var = vec![0.0f64; edge_count];
        for (e, &v) in self.edge_var.iter().enumerate() {
            var_to_check[e] = priors[v as usize];
        }
        let mut estimate = BinaryVector::zeros(self.cols);
        for (v, &p) in priors.iter().enumerate() {
            if p < 0.0 {
                estimate.set(v, true);
            }
        }
        if self.syndrome_matches(&estimate, syndrome) {
            return Ok(DecodeOutcome {
                estimate,
                converged: true,
                iterations: 0,
            });
        }
        let mut tanh_buf: Vec<f64> = Vec::new();
        let mut suffix_buf: Vec<f64> = Vec::new();
        for iteration in 1..=self.max_iterations {
            // Check pass: exclusive tanh products with the syndrome sign,
            // assembled from prefix and suffix products.
            for c in 0..self.rows {
                let lo = self.check_start[c] as usize;
                let hi = self.check_start[c + 1] as usize;
                let degree = hi - lo;
                tanh_buf.clear();
                tanh_buf.extend(var_to_check[lo..hi].iter().map(|&m| (0.5 * m).tanh()));
                suffix_buf.clear();
                suffix_buf.resize(degree + 1, 1.0);
                for i in (0..degree).rev() {
                    suffix_buf[i] = suffix_buf[i + 1] * tanh_buf[i];
                }
                let sign = if syndrome.get(c) { -1.0 } else { 1.0 };
                let mut prefix = sign;
                for (i, e) in (lo..hi).enumerate() {
                    let product = (prefix * suffix_buf[i + 1])
                        .clamp(-0.999_999_999_999, 0.999_999_999_999);
                    check_to_var[e] =
                        (2.0 * product.atanh()).clamp(-self.llr_clamp, self.llr_clamp);
                    prefix *= tanh_buf[i];
                }
            }
            // Variable pass and hard decision.
            for (v, &prior) in priors.iter().enumerate() {
                let lo = self.var_start[v] as usize;
                let hi = self.var_start[v + 1] as usize;
                let total: f64 = prior
                    + self.var_edges[lo..hi]
                        .iter()
                        .map(|&e| check_to_var[e as usize])
                        .sum::<f64>();
                for &e in &self.var_edges[lo..hi] {
                    var_to_check[e as usize] =
                        (total - check_to_var[e as usize]).clamp(-self.llr_clamp, self.llr_clamp);
                }
                estimate.set(v, total < 0.0);
            }
            if self.syndrome_matches(&estimate, syndrome) {
                return Ok(DecodeOutcome {
                    estimate,
                    converged: true,
                    iterations: iteration,
                });
            }
        }
        Ok(DecodeOutcome {
            estimate,
            converged: false,
            iterations: self.max_iterations,
        })
    }
}

/// Exhaustive coset-leader decoder: a minimum-weight error consistent with
/// the syndrome, ties broken by lexicographically least support.
#[derive(Debug, Clone)]
pub struct SyndromeTable {
    rows: usize,
    map: HashMap<BinaryVector, BinaryVector>,
}

impl SyndromeTable {
    pub fn build(h: &BinaryMatrix) -> Result<Self, SimError> {
        if h.cols() > 25 && h.rows() > 20 {
            return Err(SimError::TableTooLarge {
                rows: h.rows(),
                cols: h.cols(),
            });
        }
        let total = 1usize << h.rank().min(63);
        let mut map = HashMap::with_capacity(total);
        let columns: Vec<BinaryVector> = {
            let t = h.transpose();
            (0..h.cols()).map(|c| t.row(c)).collect()
        };
        // Enumerate supports by increasing weight, lexicographic within a
        // weight, keeping the first error for each syndrome.
        let mut support = Vec::new();
        for weight in 0..=h.cols() {
            if map.len() == total {
                break;
            }
            enumerate_weight(
                h.cols(),
                weight,
                0,
                &mut support,
                &columns,
                &BinaryVector::zeros(h.rows()),
                &mut map,
            );
        }
        Ok(Self { rows: h.rows(), map })
    }

    pub fn decode(&self, syndrome: &BinaryVector) -> Result<BinaryVector, SimError> {
        if syndrome.len() != self.rows {
            return Err(SimError::Dimension(format!(
                "syndrome length {} but table expects {}",
                syndrome.len(),
                self.rows
            )));
        }
        self.map
            .get(syndrome)
            .cloned()
            .ok_or(SimError::InconsistentSyndrome)
    }
}

fn enumerate_weight(
    n: usize,
    remaining: usize,
    start: usize,
    support: &mut Vec<usize>,
    columns: &[BinaryVector],
    syndrome: &BinaryVector,
    map: &mut HashMap<BinaryVector, BinaryVector>,
) {
    if remaining == 0 {
        map.entry(syndrome.clone())
            .or_insert_with(|| BinaryVector::from_support(columns.len(), support));
        return;
    }
    for i in start..=n - remaining {
        support.push(i);
        let mut next = syndrome.clone();
        next.xor_assign(&columns[i]);
        enumerate_weight(n, remaining - 1, i + 1, support, columns, &next, map);
        support.pop();
    }
}

/// One-shot convenience wrapper over [`SyndromeTable`].
pub fn ml_syndrome_decode(
    h: &BinaryMatrix,
    syndrome: &BinaryVector,
) -> Result<BinaryVector, SimError> {
    SyndromeTable::build(h)?.decode(syndrome)
}

/// A single Monte Carlo measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct BlerPoint {
    pub p: f64,
    pub p_aux: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bler: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

/// Wilson 95% score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (low, high)
}

/// Estimated block error rate over the quantum channel from the classical
/// one: `1 - (1 - b)^2`.
pub fn quantum_bler(b: f64) -> Result<f64, SimError> {
    if !(0.0..=1.0).contains(&b) {
        return Err(SimError::BlerRange(b));
    }
    Ok(1.0 - (1.0 - b) * (1.0 - b))
}

/// Grid, stop rule, seeding, and thread count for a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: Vec<f64>,
    pub min_block_errors: u64,
    pub max_trials: u64,
    pub seed: u64,
    /// Worker threads; zero means the global default.
    pub threads: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.grid.is_empty() {
            return Err(SimError::Config("empty probability grid".into()));
        }
        for &p in &self.grid {
            check_probability(p)?;
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimError::Config(
                "probability grid must be strictly increasing".into(),
            ));
        }
        if self.min_block_errors == 0 {
            return Err(SimError::Config("min_block_errors must be at least 1".into()));
        }
        if self.max_trials == 0 {
            return Err(SimError::Config("max_trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Auxiliary-block probability rule for split-channel sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuxProbability {
    /// Same as the grid probability (uniform channel).
    Same,
    /// Grid probability times a factor, e.g. one half.
    Scaled(f64),
    /// A constant probability.
    Fixed(f64),
}

impl AuxProbability {
    pub fn apply(&self, p: f64) -> f64 {
        match self {
            AuxProbability::Same => p,
            AuxProbability::Scaled(factor) => p * factor,
            AuxProbability::Fixed(value) => *value,
        }
    }
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent random stream for one trial, derived from the sweep seed,
/// grid index, and trial index.
fn trial_rng(seed: u64, grid_index: u64, trial: u64) -> ChaCha8Rng {
    let mut state = splitmix64(seed ^ 0x71C9_47A3_9B1D_55D1);
    state = splitmix64(state ^ grid_index.wrapping_mul(0xA24B_AED4_963E_E407));
    state = splitmix64(state ^ trial.wrapping_mul(0x9FB2_1C65_1E98_DF25));
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Trials are dispatched in fixed-size batches so the stopping decision
/// depends only on completed batch boundaries, never on thread scheduling.
const TRIAL_BATCH: u64 = 512;

/// Estimate the block error rate at one grid point. A trial succeeds only
/// when the decoder output matches the sampled error bit for bit; detected
/// failures and miscorrections both count as block errors.
pub fn simulate_bler(
    h: &BinaryMatrix,
    channel: &ChannelModel,
    min_block_errors: u64,
    max_trials: u64,
    seed: u64,
    grid_index: u64,
) -> Result<BlerPoint, SimError> {
    let decoder = SumProductDecoder::new(h);
    simulate_point(h, &decoder, channel, min_block_errors, max_trials, seed, grid_index)
}

fn simulate_point(
    h: &BinaryMatrix,
    decoder: &SumProductDecoder,
    channel: &ChannelModel,
    min_block_errors: u64,
    max_trials: u64,
    seed: u64,
    grid_index: u64,
) -> Result<BlerPoint, SimError> {
    if channel.len() != h.cols() {
        return Err(SimError::Dimension(format!(
            "channel length {} but matrix has {} columns",
            channel.len(),
            h.cols()
        )));
    }
    let mut trials = 0u64;
    let mut block_errors = 0u64;
    while trials < max_trials && block_errors < min_block_errors {
        let batch = TRIAL_BATCH.min(max_trials - trials);
        let failures: u64 = (trials..trials + batch)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(seed, grid_index, trial);
                let error = channel.sample_error(&mut rng);
                let syndrome = h.mul_vector(&error).expect("matching dimensions");
                let outcome = decoder
                    .decode(&syndrome, channel)
                    .expect("validated dimensions");
                u64::from(outcome.estimate != error)
            })
            .sum();
        block_errors += failures;
        trials += batch;
    }
    let bler = if trials == 0 {
        0.0
    } else {
        block_errors as f64 / trials as f64
    };
    let (ci_low, ci_high) = wilson_interval(block_errors, trials);
    Ok(BlerPoint {
        p: channel.rest_probability(),
        p_aux: channel.aux_probability(),
        trials,
        block_errors,
        bler,
        ci_low,
        ci_high,
        seed,
    })
}

/// Run one `BlerPoint` per grid value. In split mode the first `rows(h)`
/// positions use `aux.apply(p)` instead of `p`.
pub fn sweep(
    h: &BinaryMatrix,
    cfg: &SimConfig,
    aux: AuxProbability,
) -> Result<Vec<BlerPoint>, SimError> {
    cfg.validate()?;
    let decoder = SumProductDecoder::new(h);
    let run = || -> Result<Vec<BlerPoint>, SimError> {
        let mut points = Vec::with_capacity(cfg.grid.len());
        for (grid_index, &p) in cfg.grid.iter().enumerate() {
            let channel = match aux {
                AuxProbability::Same => ChannelModel::uniform(h.cols(), p)?,
                rule => ChannelModel::split(h.cols(), h.rows(), rule.apply(p), p)?,
            };
            points.push(simulate_point(
                h,
                &decoder,
                &channel,
                cfg.min_block_errors,
                cfg.max_trials,
                cfg.seed,
                grid_index as u64,
            )?);
        }
        Ok(points)
    };
    if cfg.threads == 0 {
        run()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| SimError::Config(e.to_string()))?;
        pool.install(run)
    }
}

/// CSV rows: `code_id,mode,p,p_aux,trials,block_errors,bler,ci_low,ci_high,seed`.
///
/// Commas inside the identifier fields are replaced by semicolons so the
/// column positions stay fixed for downstream tools.
pub fn write_csv(
    out: &mut impl Write,
    code_id: &str,
    mode: &str,
    points: &[BlerPoint],
) -> io::Result<()> {
    let code_id = code_id.replace(',', ";");
    let mode = mode.replace(',', ";");
    writeln!(
        out,
        "code_id,mode,p,p_aux,trials,block_errors,bler,ci_low,ci_high,seed"
    )?;
    for point in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            code_id,
            mode,
            point.p,
            point.p_aux,
            point.trials,
            point.block_errors,
            point.bler,
            point.ci_low,
            point.ci_high,
            point.seed
        )?;
    }
    Ok(())
}

/// A gnuplot script rendering log-scale block error rate against crossover
/// probability from a CSV produced by [`write_csv`].
pub fn gnuplot_script(csv_path: &str, title: &str) -> String {
    format!(
        concat!(
            "set datafile separator ','\n",
            "set logscale y\n",
            "set xlabel 'crossover probability p'\n",
            "set ylabel 'block error rate'\n",
            "set title '{title}'\n",
            "set key left top\n",
            "set grid\n",
            "plot '{csv}' skip 1 using 3:7:8:9 with yerrorlines title 'BLER'\n",
        ),
        title = title,
        csv = csv_path,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::ag_lines;
    use crate::qcode::build_standard_form;

    fn affine_plane_code() -> BinaryMatrix {
        build_standard_form(&ag_lines(2, 3).unwrap().design)
            .unwrap()
            .matrix()
            .clone()
    }

    #[test]
    fn zero_syndrome_decodes_to_zero() {
        let h = affine_plane_code();
        let decoder = SumProductDecoder::new(&h);
        let channel = ChannelModel::uniform(21, 0.05).unwrap();
        let outcome = decoder
            .decode(&BinaryVector::zeros(9), &channel)
            .unwrap();
        assert!(outcome.converged);
        assert!(outcome.estimate.is_zero());
        assert!(outcome.iterations <= 1);
    }

    #[test]
    fn all_single_errors_recover_and_match_oracle() {
        let h = affine_plane_code();
        let decoder = SumProductDecoder::new(&h);
        let table = SyndromeTable::build(&h).unwrap();
        let channel = ChannelModel::uniform(21, 0.01).unwrap();
        // The zero pattern plus all 21 single-position errors.
        let mut patterns = vec![BinaryVector::zeros(21)];
        patterns.extend((0..21).map(|i| BinaryVector::from_support(21, &[i])));
        for error in patterns {
            let syndrome = h.mul_vector(&error).unwrap();
            let outcome = decoder.decode(&syndrome, &channel).unwrap();
            assert!(outcome.converged, "no convergence for {:?}", error);
            assert_eq!(outcome.estimate, error);
            assert_eq!(table.decode(&syndrome).unwrap(), error);
        }
    }

    #[test]
    fn converged_estimates_satisfy_the_syndrome() {
        let h = affine_plane_code();
        let decoder = SumProductDecoder::new(&h);
        let channel = ChannelModel::uniform(21, 0.08).unwrap();
        for trial in 0..200 {
            let mut rng = trial_rng(11, 0, trial);
            let error = channel.sample_error(&mut rng);
            let syndrome = h.mul_vector(&error).unwrap();
            let outcome = decoder.decode(&syndrome, &channel).unwrap();
            if outcome.converged {
                assert_eq!(h.mul_vector(&outcome.estimate).unwrap(), syndrome);
            }
        }
    }

    #[test]
    fn ml_oracle_unit_syndromes() {
        let h = affine_plane_code();
        let table = SyndromeTable::build(&h).unwrap();
        for i in 0..9 {
            let syndrome = BinaryVector::from_support(9, &[i]);
            // Column i of the identity block matches the unit syndrome.
            assert_eq!(
                table.decode(&syndrome).unwrap(),
                BinaryVector::from_support(21, &[i])
            );
        }
    }

    #[test]
    fn ml_oracle_rejects_oversized_instances() {
        let h = BinaryMatrix::identity(30);
        assert!(matches!(
            SyndromeTable::build(&h),
            Err(SimError::TableTooLarge { .. })
        ));
    }

    #[test]
    fn bler_zero_at_zero_crossover() {
        let h = affine_plane_code();
        let channel = ChannelModel::uniform(21, 0.0).unwrap();
        let point = simulate_bler(&h, &channel, 10, 2000, 1, 0).unwrap();
        assert_eq!(point.block_errors, 0);
        assert_eq!(point.bler, 0.0);
        assert_eq!(point.trials, 2000);
    }

    #[test]
    fn bler_near_one_at_half_crossover() {
        let h = affine_plane_code();
        let channel = ChannelModel::uniform(21, 0.5).unwrap();
        let point = simulate_bler(&h, &channel, 1000, 2000, 1, 0).unwrap();
        assert!(point.bler > 0.9, "bler {}", point.bler);
    }

    #[test]
    fn quantum_bler_values() {
        assert_eq!(quantum_bler(0.0).unwrap(), 0.0);
        assert_eq!(quantum_bler(1.0).unwrap(), 1.0);
        assert!((quantum_bler(0.01).unwrap() - 0.0199).abs() < 1e-12);
        assert!(quantum_bler(1.5).is_err());
        // Monotone on a grid.
        let values: Vec<f64> = (0..=10)
            .map(|i| quantum_bler(i as f64 / 10.0).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn channel_sampling_unbiased() {
        let channel = ChannelModel::uniform(1000, 0.03).unwrap();
        let mut rng = trial_rng(42, 0, 0);
        let mut flips = 0usize;
        let samples = 1000usize;
        for _ in 0..samples {
            flips += channel.sample_error(&mut rng).weight();
        }
        let total = (samples * 1000) as f64;
        let expected = 0.03 * total;
        let sigma = (total * 0.03 * 0.97).sqrt();
        assert!(
            ((flips as f64) - expected).abs() < 3.0 * sigma,
            "flips {flips}, expected {expected}"
        );
    }

    #[test]
    fn split_channel_with_equal_probabilities_is_uniform() {
        let uniform = ChannelModel::uniform(21, 0.02).unwrap();
        let split = ChannelModel::split(21, 9, 0.02, 0.02).unwrap();
        assert_eq!(uniform, split);
        let h = affine_plane_code();
        let cfg = SimConfig {
            grid: vec![0.01, 0.02],
            min_block_errors: 50,
            max_trials: 500,
            seed: 9,
            threads: 0,
        };
        let a = sweep(&h, &cfg, AuxProbability::Same).unwrap();
        let b = sweep(&h, &cfg, AuxProbability::Scaled(1.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_reproducible_across_thread_counts() {
        let h = affine_plane_code();
        let mut cfg = SimConfig {
            grid: vec![0.01, 0.03, 0.05],
            min_block_errors: 30,
            max_trials: 600,
            seed: 5,
            threads: 1,
        };
        let single = sweep(&h, &cfg, AuxProbability::Same).unwrap();
        cfg.threads = 4;
        let multi = sweep(&h, &cfg, AuxProbability::Same).unwrap();
        assert_eq!(single, multi);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let h = affine_plane_code();
        let bad = SimConfig {
            grid: vec![0.02, 0.01],
            min_block_errors: 1,
            max_trials: 10,
            seed: 0,
            threads: 0,
        };
        assert!(sweep(&h, &bad, AuxProbability::Same).is_err());
        let out_of_range = SimConfig {
            grid: vec![0.6],
            min_block_errors: 1,
            max_trials: 10,
            seed: 0,
            threads: 0,
        };
        assert!(sweep(&h, &out_of_range, AuxProbability::Same).is_err());
    }

    #[test]
    fn csv_layout() {
        let point = BlerPoint {
            p: 0.01,
            p_aux: 0.005,
            trials: 100,
            block_errors: 3,
            bler: 0.03,
            ci_low: 0.01,
            ci_high: 0.08,
            seed: 7,
        };
        let mut buffer = Vec::new();
        write_csv(&mut buffer, "ag(2,3)", "rqa", &[point]).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "code_id,mode,p,p_aux,trials,block_errors,bler,ci_low,ci_high,seed"
        );
        // Commas in the identifier are sanitized to keep columns aligned.
        assert_eq!(lines.next().unwrap(), "ag(2;3),rqa,0.01,0.005,100,3,0.03,0.01,0.08,7");
    }

    #[test]
    fn wilson_interval_contains_point_estimate() {
        for (errors, trials) in [(0u64, 100u64), (1, 100), (50, 100), (100, 100)] {
            let (lo, hi) = wilson_interval(errors, trials);
            let phat = errors as f64 / trials as f64;
            assert!(lo <= phat && phat <= hi);
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
    }

    #[test]
    fn weight_three_errors_may_fail_but_are_counted() {
        // Beyond the guaranteed radius the decoder may fail or miscorrect;
        // both outcomes count as block errors in the harness.
        let h = affine_plane_code();
        let decoder = SumProductDecoder::new(&h);
        let channel = ChannelModel::uniform(21, 0.01).unwrap();
        let error = BinaryVector::from_support(21, &[2, 9, 15]);
        let syndrome = h.mul_vector(&error).unwrap();
        let outcome = decoder.decode(&syndrome, &channel).unwrap();
        if outcome.converged {
            assert_eq!(h.mul_vector(&outcome.estimate).unwrap(), syndrome);
        }
    }
}
