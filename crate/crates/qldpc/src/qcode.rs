//! Parity-check matrix assembly and quantum code parameter derivation for
//! both assistance modes, plus a progressive edge-growth baseline.
//!
//! Two ways of paying for structure are covered. Reliable-qubit assistance
//! (RQA) imports a standard-form `[I | A]` parity-check matrix and yields a
//! `[[2n-k, k]]` code in which `2(n-k)` designated qubits only suffer phase
//! errors. Entanglement assistance (EA) accepts any parity-check matrix and
//! consumes one noiseless ebit per unit of Gram rank; odd-replicate designs
//! need exactly one, and even-replicate Steiner designs reach one after the
//! all-one row extension.

use std::fmt;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::designs::{DesignError, PairwiseBalancedDesign};
use crate::gf2::BinaryMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QcodeError {
    #[error("design contains a block of size 1")]
    BlockOfSizeOne,
    #[error("design is trivial")]
    TrivialDesign,
    #[error("operation requires a Steiner 2-design")]
    NotSteiner,
    #[error("design is odd-replicate; use its incidence matrix directly (Gram rank is already 1)")]
    OddReplicateInput,
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("parity-check matrix is zero")]
    ZeroMatrix,
    #[error("rate gain requires n > k, got n = {n}, k = {k}")]
    RateGainDomain { n: u64, k: u64 },
    #[error("infeasible degree request: {0}")]
    InfeasibleDegrees(String),
    #[error(transparent)]
    Design(#[from] DesignError),
}

/// A parity-check matrix `[I | A]` whose right part is the incidence matrix
/// of an index-1 design.
#[derive(Debug, Clone)]
pub struct StandardFormCode {
    matrix: BinaryMatrix,
    information_part: BinaryMatrix,
    n: usize,
    k: usize,
    design: PairwiseBalancedDesign,
    design_distance: usize,
}

impl StandardFormCode {
    /// The full `(n-k) x n` parity-check matrix.
    pub fn matrix(&self) -> &BinaryMatrix {
        &self.matrix
    }

    /// The `(n-k) x k` incidence block `A`.
    pub fn information_part(&self) -> &BinaryMatrix {
        &self.information_part
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn design(&self) -> &PairwiseBalancedDesign {
        &self.design
    }

    /// One more than the smallest block size.
    pub fn design_distance(&self) -> usize {
        self.design_distance
    }
}

/// Build `H = [I | incidence(design)]`.
///
/// The design must be valid, nontrivial, and free of singleton blocks, which
/// makes the columns of `H` pairwise distinct and the code minimum distance
/// one more than the smallest block size.
pub fn build_standard_form(
    design: &PairwiseBalancedDesign,
) -> Result<StandardFormCode, QcodeError> {
    let report = design.verify();
    if !report.valid {
        return Err(QcodeError::InvalidDesign(format!(
            "{} pair violations",
            report.violations.len()
        )));
    }
    if design.is_trivial() {
        return Err(QcodeError::TrivialDesign);
    }
    let min_block = design.block_sizes().first().copied().unwrap_or(0);
    if min_block < 2 {
        return Err(QcodeError::BlockOfSizeOne);
    }
    let information_part = design.incidence();
    let matrix = BinaryMatrix::identity(design.v())
        .hconcat(&information_part)
        .expect("row counts match by construction");
    Ok(StandardFormCode {
        matrix,
        information_part,
        n: design.v() + design.block_count(),
        k: design.block_count(),
        design: design.clone(),
        design_distance: min_block + 1,
    })
}

/// Assistance mode of a derived quantum code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssistMode {
    /// Less-noisy qubits that only suffer phase errors.
    ReliableQubits,
    /// Noiseless shared ebits.
    Entanglement,
}

impl fmt::Display for AssistMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssistMode::ReliableQubits => write!(f, "RQA"),
            AssistMode::Entanglement => write!(f, "EA"),
        }
    }
}

/// Where a reported design distance comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceProvenance {
    /// One more than the computed even-freeness of the source design.
    EvenFreeness,
    /// Supplied by a structural theorem for the source family.
    Theorem,
    /// One more than the smallest block size of the standard-form design.
    MinBlockSize,
}

impl fmt::Display for DistanceProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceProvenance::EvenFreeness => write!(f, "even-freeness"),
            DistanceProvenance::Theorem => write!(f, "theorem"),
            DistanceProvenance::MinBlockSize => write!(f, "block-size"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignDistance {
    pub value: usize,
    pub provenance: DistanceProvenance,
}

/// Derived quantum code parameters.
///
/// For entanglement assistance `dimension` is the full derived dimension
/// `2k - n + c`; `catalytic_dimension` nets out the `c` consumed ebits and
/// is the default reporting convention. The `rate` field follows the
/// default convention of each mode.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCodeParams {
    pub mode: AssistMode,
    pub length: usize,
    pub dimension: i64,
    pub catalytic_dimension: Option<i64>,
    pub assist_count: usize,
    pub rate: f64,
    pub design_distance: Option<DesignDistance>,
    /// Guaranteed correctable error weight `floor((d-1)/2)`, when known.
    pub correctable_weight: Option<usize>,
}

impl QuantumCodeParams {
    /// Single-line record: mode, `[[length,dimension(;ebits)]]`, assist
    /// count, rate to four decimals, design distance. Entanglement-assisted
    /// parameters report the catalytic dimension unless `raw` is set.
    pub fn record(&self, raw: bool) -> String {
        let (shown_dimension, shown_rate) = match (self.mode, raw) {
            (AssistMode::Entanglement, false) => {
                let catalytic = self.catalytic_dimension.unwrap_or(self.dimension);
                (catalytic, catalytic as f64 / self.length as f64)
            }
            _ => (self.dimension, self.dimension as f64 / self.length as f64),
        };
        let brackets = match self.mode {
            AssistMode::Entanglement => format!(
                "[[{},{};{}]]",
                self.length, shown_dimension, self.assist_count
            ),
            AssistMode::ReliableQubits => format!("[[{},{}]]", self.length, shown_dimension),
        };
        let distance = match self.design_distance {
            Some(d) => format!("{} ({})", d.value, d.provenance),
            None => "unknown".to_string(),
        };
        format!(
            "{} {} assist={} rate={} distance={}",
            self.mode,
            brackets,
            self.assist_count,
            format_rate(shown_rate),
            distance
        )
    }
}

/// Rate rounded to four decimals with trailing zeros trimmed.
pub fn format_rate(rate: f64) -> String {
    let mut s = format!("{:.4}", rate);
    while s.contains('.') && s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

/// Parameters of the `[[2n-k, k]]` code assisted by `2(n-k)` less-noisy
/// qubits.
pub fn rqa_params(code: &StandardFormCode) -> QuantumCodeParams {
    let (n, k) = (code.n(), code.k());
    let length = 2 * n - k;
    let d = code.design_distance();
    QuantumCodeParams {
        mode: AssistMode::ReliableQubits,
        length,
        dimension: k as i64,
        catalytic_dimension: None,
        assist_count: 2 * (n - k),
        rate: k as f64 / length as f64,
        design_distance: Some(DesignDistance {
            value: d,
            provenance: DistanceProvenance::MinBlockSize,
        }),
        correctable_weight: Some((d - 1) / 2),
    }
}

/// The pair of `2(n-k) x k` information check matrices `[A; 0]` and
/// `[0; A]`.
#[derive(Debug, Clone)]
pub struct InformationCheckMatrices {
    pub h_z: BinaryMatrix,
    pub h_x: BinaryMatrix,
}

pub fn information_check_matrices(code: &StandardFormCode) -> InformationCheckMatrices {
    let a = code.information_part();
    let zero = BinaryMatrix::zeros(a.rows(), a.cols());
    InformationCheckMatrices {
        h_z: a.vconcat(&zero).expect("matching widths"),
        h_x: zero.vconcat(a).expect("matching widths"),
    }
}

/// Extend the incidence matrix of an even-replicate Steiner 2-design by an
/// identity block and an all-one bottom row:
///
/// ```text
/// H' = [ I  H ]
///      [ 1  0 ]
/// ```
///
/// Reindexed by rows as points, `H'` is the incidence matrix of an index-1
/// design on `v + 1` points with `v` blocks of size 2 added, and its Gram
/// rank is 1. Both properties are verified before returning.
pub fn extend_addr(design: &PairwiseBalancedDesign) -> Result<BinaryMatrix, QcodeError> {
    let report = design.verify();
    if !report.valid {
        return Err(QcodeError::InvalidDesign(format!(
            "{} pair violations",
            report.violations.len()
        )));
    }
    if design.is_trivial() {
        return Err(QcodeError::TrivialDesign);
    }
    let Some(mu) = design.steiner_block_size() else {
        return Err(QcodeError::NotSteiner);
    };
    if mu < 2 {
        return Err(QcodeError::BlockOfSizeOne);
    }
    if !report.profile.even_replicate {
        return Err(QcodeError::OddReplicateInput);
    }
    let v = design.v();
    let h = design.incidence();
    let top = BinaryMatrix::identity(v)
        .hconcat(&h)
        .expect("row counts match");
    let bottom = BinaryMatrix::from_fn(1, v + h.cols(), |_, c| c < v);
    let extended = top.vconcat(&bottom).expect("matching widths");
    let as_design = PairwiseBalancedDesign::from_incidence(&extended)?;
    if !as_design.verify().valid {
        return Err(QcodeError::InvalidDesign(
            "extension is not an index-1 design".into(),
        ));
    }
    if extended.gram_rank() != 1 {
        return Err(QcodeError::InvalidDesign(
            "extension does not have Gram rank 1".into(),
        ));
    }
    Ok(extended)
}

/// Entanglement-assisted parameters of the code checked by `h`: length
/// `n = cols`, derived dimension `2k - n + c` with `c` the Gram rank, and
/// the catalytic dimension `2k - n`.
pub fn ea_params(
    h: &BinaryMatrix,
    design_distance: Option<DesignDistance>,
) -> Result<QuantumCodeParams, QcodeError> {
    if h.is_zero() {
        return Err(QcodeError::ZeroMatrix);
    }
    let n = h.cols();
    let k = n - h.rank();
    let c = h.gram_rank();
    let dimension = 2 * k as i64 - n as i64 + c as i64;
    let catalytic = dimension - c as i64;
    Ok(QuantumCodeParams {
        mode: AssistMode::Entanglement,
        length: n,
        dimension,
        catalytic_dimension: Some(catalytic),
        assist_count: c,
        rate: catalytic as f64 / n as f64,
        design_distance,
        correctable_weight: design_distance.map(|d| (d.value - 1) / 2),
    })
}

/// Exact information-rate gain of reliable-qubit assistance over the bare
/// CSS construction: `k/(2n-k) - (2k-n)/n = 2(n-k)^2 / (n(2n-k))`.
pub fn rate_gain(n: u64, k: u64) -> Result<Ratio<u64>, QcodeError> {
    if n <= k {
        return Err(QcodeError::RateGainDomain { n, k });
    }
    Ok(Ratio::new(2 * (n - k) * (n - k), n * (2 * n - k)))
}

/// Progressive edge growth with the given column weight.
///
/// Variables are processed in order; every edge attaches to a check at
/// maximal breadth-first distance in the current Tanner graph (unreached
/// checks count as infinitely far), breaking ties by lowest current check
/// degree and then by a seeded pseudorandom choice.
pub fn peg_construct(
    check_count: usize,
    var_count: usize,
    col_weight: usize,
    seed: u64,
) -> Result<BinaryMatrix, QcodeError> {
    if col_weight == 0 || var_count == 0 || check_count == 0 {
        return Err(QcodeError::InfeasibleDegrees(
            "all dimensions must be positive".into(),
        ));
    }
    if col_weight > check_count {
        return Err(QcodeError::InfeasibleDegrees(format!(
            "column weight exceeds check count ({col_weight} > {check_count})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check_vars: Vec<Vec<u32>> = vec![Vec::new(); check_count];
    let mut var_checks: Vec<Vec<u32>> = vec![Vec::new(); var_count];
    let mut check_dist = vec![u32::MAX; check_count];
    let mut var_dist = vec![u32::MAX; var_count];
    let mut queue = std::collections::VecDeque::new();
    for var in 0..var_count {
        for _ in 0..col_weight {
            // Breadth-first distances from this variable to every check.
            check_dist.fill(u32::MAX);
            var_dist.fill(u32::MAX);
            queue.clear();
            var_dist[var] = 0;
            queue.push_back(var as u32);
            while let Some(u) = queue.pop_front() {
                for &c in &var_checks[u as usize] {
                    if check_dist[c as usize] == u32::MAX {
                        check_dist[c as usize] = var_dist[u as usize] + 1;
                        for &w in &check_vars[c as usize] {
                            if var_dist[w as usize] == u32::MAX {
                                var_dist[w as usize] = check_dist[c as usize] + 1;
                                queue.push_back(w);
                            }
                        }
                    }
                }
            }
            let key = |c: usize| {
                (
                    std::cmp::Reverse(check_dist[c] as u64),
                    check_vars[c].len(),
                )
            };
            let best = (0..check_count)
                .filter(|&c| !var_checks[var].contains(&(c as u32)))
                .map(key)
                .min();
            let Some(best) = best else {
                return Err(QcodeError::InfeasibleDegrees(
                    "variable exhausted candidate checks".into(),
                ));
            };
            let tied: Vec<usize> = (0..check_count)
                .filter(|&c| !var_checks[var].contains(&(c as u32)) && key(c) == best)
                .collect();
            let chosen = tied[rng.random_range(0..tied.len())];
            check_vars[chosen].push(var as u32);
            var_checks[var].push(chosen as u32);
        }
    }
    let mut m = BinaryMatrix::zeros(check_count, var_count);
    for (c, vars) in check_vars.iter().enumerate() {
        for &v in vars {
            m.set(c, v as usize, true);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{girth, Girth};
    use crate::designs::bose_sts;
    use crate::galois::ag_lines;

    #[test]
    fn standard_form_affine_plane() {
        let code = build_standard_form(&ag_lines(2, 3).unwrap().design).unwrap();
        assert_eq!((code.matrix().rows(), code.matrix().cols()), (9, 21));
        assert_eq!((code.n(), code.k()), (21, 12));
        assert_eq!(code.design_distance(), 4);
        assert_eq!(girth(code.matrix()), Girth::Length(6));
        assert_eq!(code.matrix().min_distance(10).unwrap(), 4);
    }

    #[test]
    fn standard_form_affine_four_dimensional() {
        let code = build_standard_form(&ag_lines(4, 3).unwrap().design).unwrap();
        assert_eq!((code.matrix().rows(), code.matrix().cols()), (81, 1161));
        // Mean column weight 3321/1161, every row weight 41.
        assert_eq!(code.matrix().count_ones(), 3321);
        assert!(code.matrix().row_weights().iter().all(|&w| w == 41));
        assert_eq!(code.matrix().column_weights().iter().max(), Some(&3));
    }

    #[test]
    fn standard_form_affine_three_five() {
        let code = build_standard_form(&ag_lines(3, 5).unwrap().design).unwrap();
        assert_eq!((code.matrix().rows(), code.matrix().cols()), (125, 900));
        assert_eq!((code.n(), code.k()), (900, 775));
    }

    #[test]
    fn standard_form_rejects_singletons_and_trivial() {
        let with_singleton =
            PairwiseBalancedDesign::new(3, vec![vec![0], vec![0, 1], vec![1, 2], vec![0, 2]])
                .unwrap();
        assert!(with_singleton.verify().valid);
        assert!(matches!(
            build_standard_form(&with_singleton),
            Err(QcodeError::BlockOfSizeOne)
        ));
        let trivial = PairwiseBalancedDesign::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(matches!(
            build_standard_form(&trivial),
            Err(QcodeError::TrivialDesign)
        ));
    }

    #[test]
    fn rqa_affine_four_dimensional_matches_reference() {
        let params = rqa_params(&build_standard_form(&ag_lines(4, 3).unwrap().design).unwrap());
        assert_eq!(params.length, 1242);
        assert_eq!(params.dimension, 1080);
        assert_eq!(params.assist_count, 162);
        assert_eq!(format_rate(params.rate), "0.8696");
        assert_eq!(
            params.record(false),
            "RQA [[1242,1080]] assist=162 rate=0.8696 distance=4 (block-size)"
        );
    }

    #[test]
    fn rqa_affine_three_five_matches_reference() {
        let params = rqa_params(&build_standard_form(&ag_lines(3, 5).unwrap().design).unwrap());
        assert_eq!(params.length, 1025);
        assert_eq!(params.dimension, 775);
        assert_eq!(params.assist_count, 250);
        assert_eq!(params.correctable_weight, Some(2));
    }

    #[test]
    fn rqa_affine_plane() {
        let params = rqa_params(&build_standard_form(&ag_lines(2, 3).unwrap().design).unwrap());
        assert_eq!(params.length, 30);
        assert_eq!(params.dimension, 12);
        assert_eq!(params.assist_count, 18);
    }

    #[test]
    fn information_check_matrices_structure() {
        let code = build_standard_form(&ag_lines(2, 3).unwrap().design).unwrap();
        let pair = information_check_matrices(&code);
        assert_eq!((pair.h_z.rows(), pair.h_z.cols()), (18, 12));
        assert_eq!((pair.h_x.rows(), pair.h_x.cols()), (18, 12));
        for r in 0..9 {
            for c in 0..12 {
                assert_eq!(pair.h_z.get(r, c), code.information_part().get(r, c));
                assert_eq!(pair.h_x.get(r + 9, c), code.information_part().get(r, c));
                assert!(!pair.h_z.get(r + 9, c));
                assert!(!pair.h_x.get(r, c));
            }
        }
        // Column weights of each part equal the block sizes.
        assert!(pair.h_z.column_weights().iter().all(|&w| w == 3));
    }

    #[test]
    fn addr_extension_affine_plane() {
        let extended = extend_addr(&ag_lines(2, 3).unwrap().design).unwrap();
        assert_eq!((extended.rows(), extended.cols()), (10, 21));
        assert_eq!(extended.gram_rank(), 1);
        let as_design = PairwiseBalancedDesign::from_incidence(&extended).unwrap();
        assert!(as_design.verify().valid);
        assert_eq!(
            as_design.block_sizes().iter().copied().collect::<Vec<_>>(),
            vec![2, 3]
        );
        assert_eq!(girth(&extended), Girth::Length(6));
    }

    #[test]
    fn addr_extension_affine_four_dimensional() {
        let extended = extend_addr(&ag_lines(4, 3).unwrap().design).unwrap();
        assert_eq!((extended.rows(), extended.cols()), (82, 1161));
        // 3402 entries: mean column weight 2.93, mean row weight 41.48.
        assert_eq!(extended.count_ones(), 3402);
        assert_eq!(extended.row_weights().iter().max(), Some(&81));
        assert_eq!(extended.column_weights().iter().max(), Some(&3));
        assert_eq!(extended.gram_rank(), 1);
    }

    #[test]
    fn addr_rejects_odd_replicate() {
        assert!(matches!(
            extend_addr(&ag_lines(3, 3).unwrap().design),
            Err(QcodeError::OddReplicateInput)
        ));
    }

    #[test]
    fn ea_params_addr_extended_affine_four_dimensional() {
        let extended = extend_addr(&ag_lines(4, 3).unwrap().design).unwrap();
        let params = ea_params(
            &extended,
            Some(DesignDistance {
                value: 6,
                provenance: DistanceProvenance::EvenFreeness,
            }),
        )
        .unwrap();
        assert_eq!(params.length, 1161);
        assert_eq!(params.dimension, 998);
        assert_eq!(params.catalytic_dimension, Some(997));
        assert_eq!(params.assist_count, 1);
        assert_eq!(format_rate(params.rate), "0.8587");
        assert_eq!(
            params.record(false),
            "EA [[1161,997;1]] assist=1 rate=0.8587 distance=6 (even-freeness)"
        );
        assert_eq!(
            params.record(true),
            "EA [[1161,998;1]] assist=1 rate=0.8596 distance=6 (even-freeness)"
        );
    }

    #[test]
    fn ea_params_odd_replicate_affine() {
        let h = ag_lines(3, 3).unwrap().design.incidence();
        let params = ea_params(&h, None).unwrap();
        assert_eq!(params.length, 117);
        assert_eq!(params.assist_count, 1);
        assert_eq!(params.dimension, 64);
        assert_eq!(params.catalytic_dimension, Some(63));
    }

    #[test]
    fn ea_params_addr_extended_affine_plane() {
        let extended = extend_addr(&ag_lines(2, 3).unwrap().design).unwrap();
        let params = ea_params(&extended, None).unwrap();
        assert_eq!(params.length, 21);
        assert_eq!(params.dimension, 2);
        assert_eq!(params.catalytic_dimension, Some(1));
        assert_eq!(params.assist_count, 1);
    }

    #[test]
    fn rate_gain_values() {
        assert_eq!(rate_gain(21, 12).unwrap(), Ratio::new(162, 630));
        assert_eq!(rate_gain(1000, 999).unwrap(), Ratio::new(2u64, 1000 * 1001));
        assert!(matches!(
            rate_gain(5, 5),
            Err(QcodeError::RateGainDomain { .. })
        ));
    }

    #[test]
    fn rate_gain_identity() {
        // k/(2n-k) - (2k-n)/n equals the closed form for every pair.
        for n in 2u64..=200 {
            for k in 1..n {
                let lhs = Ratio::new(k as i64, (2 * n - k) as i64)
                    - Ratio::new(2 * k as i64 - n as i64, n as i64);
                let gain = rate_gain(n, k).unwrap();
                assert_eq!(lhs, Ratio::new(*gain.numer() as i64, *gain.denom() as i64));
            }
        }
    }

    #[test]
    fn peg_matches_reference_shape() {
        let m = peg_construct(82, 1161, 3, 7).unwrap();
        assert_eq!((m.rows(), m.cols()), (82, 1161));
        assert!(m.column_weights().iter().all(|&w| w == 3));
        assert_eq!(m.count_ones(), 3483);
        let max_row = m.row_weights().into_iter().max().unwrap();
        assert!((42..=44).contains(&max_row), "max row weight {max_row}");
    }

    #[test]
    fn peg_reaches_girth_six_when_feasible() {
        for seed in 0..5 {
            let m = peg_construct(24, 30, 3, seed).unwrap();
            assert!(
                girth(&m).length().unwrap_or(usize::MAX) >= 6,
                "seed {seed}: {:?}",
                girth(&m)
            );
        }
    }

    #[test]
    fn peg_degree_infeasible() {
        assert!(matches!(
            peg_construct(2, 4, 3, 0),
            Err(QcodeError::InfeasibleDegrees(_))
        ));
    }

    #[test]
    fn peg_forced_four_cycles_at_tight_shapes() {
        // Eight weight-2 columns cannot all use distinct check pairs.
        let m = peg_construct(4, 8, 2, 3).unwrap();
        assert_eq!(girth(&m), Girth::Length(4));
    }

    #[test]
    fn peg_deterministic_for_fixed_seed() {
        assert_eq!(
            peg_construct(12, 30, 3, 5).unwrap(),
            peg_construct(12, 30, 3, 5).unwrap()
        );
    }

    #[test]
    fn bose_standard_form_girth() {
        let code = build_standard_form(&bose_sts(15).unwrap()).unwrap();
        assert_eq!(girth(code.matrix()), Girth::Length(6));
    }
}
