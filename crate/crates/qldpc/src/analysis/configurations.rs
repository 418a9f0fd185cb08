//! Counting the named forbidden configurations of Steiner 2-designs by
//! their rigid intersection signatures.
//!
//! In a triple system an even 4-configuration is four blocks pairwise
//! meeting in six distinct points; an even 6-configuration has nine points
//! in exactly two blocks each, with a block intersection graph that is
//! either complete bipartite (the grid) or a triangular prism (the double
//! triangle). For block size `mu`, the smallest even configuration is the
//! dual of the complete graph on `mu + 1` vertices.

use super::{require_valid, AnalysisError};
use crate::designs::PairwiseBalancedDesign;

/// The configuration shapes with a dedicated counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigurationKind {
    /// Four triples on six points, every point in two blocks.
    Pasch,
    /// `mu + 1` blocks pairwise meeting in distinct points; for `mu = 3`
    /// this is the Pasch configuration.
    GeneralizedPasch(usize),
    /// Six triples on nine points whose intersection graph is complete
    /// bipartite.
    Grid,
    /// Six triples on nine points whose intersection graph is a prism.
    DoubleTriangle,
}

impl ConfigurationKind {
    fn name(self) -> &'static str {
        match self {
            ConfigurationKind::Pasch => "pasch",
            ConfigurationKind::GeneralizedPasch(_) => "generalized_pasch",
            ConfigurationKind::Grid => "grid",
            ConfigurationKind::DoubleTriangle => "double_triangle",
        }
    }
}

/// Pair-to-block lookup and per-point block lists for a valid design.
pub(crate) struct SteinerIndex {
    v: usize,
    /// `pair_block[a * v + b]`: index of the unique block through `{a, b}`.
    pair_block: Vec<u32>,
    /// Blocks through each point.
    through: Vec<Vec<u32>>,
}

const NO_BLOCK: u32 = u32::MAX;

impl SteinerIndex {
    pub(crate) fn new(design: &PairwiseBalancedDesign) -> Self {
        let v = design.v();
        let mut pair_block = vec![NO_BLOCK; v * v];
        let mut through = vec![Vec::new(); v];
        for (j, block) in design.blocks().iter().enumerate() {
            for (i, &a) in block.iter().enumerate() {
                through[a].push(j as u32);
                for &b in &block[i + 1..] {
                    pair_block[a * v + b] = j as u32;
                    pair_block[b * v + a] = j as u32;
                }
            }
        }
        Self {
            v,
            pair_block,
            through,
        }
    }

    #[inline]
    pub(crate) fn block_through(&self, a: usize, b: usize) -> Option<usize> {
        let j = self.pair_block[a * self.v + b];
        (j != NO_BLOCK).then_some(j as usize)
    }

    pub(crate) fn through(&self, point: usize) -> &[u32] {
        &self.through[point]
    }
}

/// Third point of a triple after removing two known members.
fn third(block: &[usize], a: usize, b: usize) -> usize {
    debug_assert_eq!(block.len(), 3);
    block
        .iter()
        .copied()
        .find(|&p| p != a && p != b)
        .expect("triple has a third point")
}

/// Number of block subsets isomorphic to the named configuration.
pub fn count_configurations(
    design: &PairwiseBalancedDesign,
    kind: ConfigurationKind,
) -> Result<u64, AnalysisError> {
    require_valid(design)?;
    let mu = design.steiner_block_size();
    match kind {
        ConfigurationKind::Pasch | ConfigurationKind::Grid | ConfigurationKind::DoubleTriangle => {
            if mu != Some(3) {
                return Err(AnalysisError::WrongBlockSize {
                    kind: kind.name(),
                    requirement: "a Steiner triple system".to_string(),
                });
            }
        }
        ConfigurationKind::GeneralizedPasch(k) => {
            if k < 3 || mu != Some(k) {
                return Err(AnalysisError::WrongBlockSize {
                    kind: kind.name(),
                    requirement: format!("a Steiner 2-design with block size {k} >= 3"),
                });
            }
        }
    }
    let index = SteinerIndex::new(design);
    Ok(match kind {
        ConfigurationKind::Pasch => {
            let mut count = 0;
            pasch_scan(design, &index, &mut |_| {
                count += 1;
                true
            });
            debug_assert_eq!(count % 6, 0);
            count / 6
        }
        ConfigurationKind::GeneralizedPasch(k) => generalized_pasch_count(design, k),
        ConfigurationKind::Grid => {
            let mut count = 0;
            grid_scan(design, &index, &mut |_| {
                count += 1;
                true
            });
            debug_assert_eq!(count % 6, 0);
            count / 6
        }
        ConfigurationKind::DoubleTriangle => {
            let mut count = 0;
            double_triangle_scan(design, &index, &mut |_| {
                count += 1;
                true
            });
            debug_assert_eq!(count % 2, 0);
            count / 2
        }
    })
}

/// Smallest witness of the named configuration, as sorted block indices.
pub(crate) fn find_configuration(
    design: &PairwiseBalancedDesign,
    index: &SteinerIndex,
    kind: ConfigurationKind,
) -> Option<Vec<usize>> {
    let mut witness = None;
    let mut capture = |blocks: &[usize]| {
        let mut sorted = blocks.to_vec();
        sorted.sort_unstable();
        witness = Some(sorted);
        false
    };
    match kind {
        ConfigurationKind::Pasch => pasch_scan(design, index, &mut capture),
        ConfigurationKind::Grid => grid_scan(design, index, &mut capture),
        ConfigurationKind::DoubleTriangle => double_triangle_scan(design, index, &mut capture),
        ConfigurationKind::GeneralizedPasch(_) => unreachable!("witness path unused"),
    }
    witness
}

/// Visit Pasch quadruples; each is reported once per ordered device
/// (meeting pair of blocks and pairing), six times in total. The visitor
/// returns `false` to stop.
fn pasch_scan(
    design: &PairwiseBalancedDesign,
    index: &SteinerIndex,
    visit: &mut impl FnMut(&[usize]) -> bool,
) {
    let blocks = design.blocks();
    for a in 0..design.v() {
        let through = index.through(a);
        for (i, &b1) in through.iter().enumerate() {
            let (x1, x2) = {
                let block = &blocks[b1 as usize];
                let mut rest = block.iter().copied().filter(|&p| p != a);
                (rest.next().unwrap(), rest.next().unwrap())
            };
            for &b2 in &through[i + 1..] {
                let (y1, y2) = {
                    let block = &blocks[b2 as usize];
                    let mut rest = block.iter().copied().filter(|&p| p != a);
                    (rest.next().unwrap(), rest.next().unwrap())
                };
                for (p, q) in [(y1, y2), (y2, y1)] {
                    let Some(f1) = index.block_through(x1, p) else {
                        continue;
                    };
                    let Some(f2) = index.block_through(x2, q) else {
                        continue;
                    };
                    if third(&blocks[f1], x1, p) == third(&blocks[f2], x2, q)
                        && !visit(&[b1 as usize, b2 as usize, f1, f2])
                    {
                        return;
                    }
                }
            }
        }
    }
}

/// Visit grids; each is reported once per unordered disjoint same-side pair
/// with the matching permutation, six times in total.
fn grid_scan(
    design: &PairwiseBalancedDesign,
    index: &SteinerIndex,
    visit: &mut impl FnMut(&[usize]) -> bool,
) {
    let blocks = design.blocks();
    let b = blocks.len();
    let disjoint = |x: &[usize], y: &[usize]| x.iter().all(|p| !y.contains(p));
    for r1 in 0..b {
        let row1 = &blocks[r1];
        for r2 in r1 + 1..b {
            let row2 = &blocks[r2];
            if !disjoint(row1, row2) {
                continue;
            }
            let perms = [
                [row2[0], row2[1], row2[2]],
                [row2[0], row2[2], row2[1]],
                [row2[1], row2[0], row2[2]],
                [row2[1], row2[2], row2[0]],
                [row2[2], row2[0], row2[1]],
                [row2[2], row2[1], row2[0]],
            ];
            'perm: for perm in perms {
                let mut columns = [0usize; 3];
                let mut thirds = [0usize; 3];
                for i in 0..3 {
                    let Some(k) = index.block_through(row1[i], perm[i]) else {
                        continue 'perm;
                    };
                    let t = third(&blocks[k], row1[i], perm[i]);
                    if row1.contains(&t) || row2.contains(&t) {
                        continue 'perm;
                    }
                    columns[i] = k;
                    thirds[i] = t;
                }
                if thirds[0] == thirds[1] || thirds[0] == thirds[2] || thirds[1] == thirds[2] {
                    continue;
                }
                // The three third points must themselves form a block.
                let Some(r3) = index.block_through(thirds[0], thirds[1]) else {
                    continue;
                };
                if third(&blocks[r3], thirds[0], thirds[1]) != thirds[2] {
                    continue;
                }
                if !visit(&[r1, r2, r3, columns[0], columns[1], columns[2]]) {
                    return;
                }
            }
        }
    }
}

/// Visit double triangles; each is reported once per choice of end
/// triangle, twice in total.
fn double_triangle_scan(
    design: &PairwiseBalancedDesign,
    index: &SteinerIndex,
    visit: &mut impl FnMut(&[usize]) -> bool,
) {
    let blocks = design.blocks();
    // Enumerate block triangles (three blocks pairwise meeting in three
    // distinct points) once each as x < y < z.
    for a in 0..design.v() {
        let through = index.through(a);
        for (i, &bx) in through.iter().enumerate() {
            let x = &blocks[bx as usize];
            for &by in &through[i + 1..] {
                let y = &blocks[by as usize];
                for &u in x.iter().filter(|&&p| p != a) {
                    for &w in y.iter().filter(|&&p| p != a) {
                        let Some(bz) = index.block_through(u, w) else {
                            continue;
                        };
                        if bz <= by as usize || blocks[bz].contains(&a) {
                            continue;
                        }
                        let free_x = third(x, a, u);
                        let free_y = third(y, a, w);
                        let free_z = third(&blocks[bz], u, w);
                        if !extend_triangle(
                            design,
                            index,
                            [bx as usize, by as usize, bz],
                            [a, u, w],
                            [free_x, free_y, free_z],
                            visit,
                        ) {
                            return;
                        }
                    }
                }
            }
        }
    }
}

/// Attach a second triangle through the free points of the first; reports
/// each completion to the visitor.
fn extend_triangle(
    design: &PairwiseBalancedDesign,
    index: &SteinerIndex,
    triangle: [usize; 3],
    meets: [usize; 3],
    frees: [usize; 3],
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    let blocks = design.blocks();
    let used = |p: usize| meets.contains(&p) || frees.contains(&p);
    let [free_x, free_y, free_z] = frees;
    for &bp in index.through(free_x) {
        let bp = bp as usize;
        if triangle.contains(&bp) {
            continue;
        }
        let p_block = &blocks[bp];
        let mut rest = p_block.iter().copied().filter(|&p| p != free_x);
        let (s, t) = (rest.next().unwrap(), rest.next().unwrap());
        if used(s) || used(t) {
            continue;
        }
        for (g, other) in [(s, t), (t, s)] {
            // Q joins free_y to the shared point g; R closes up through
            // free_z, `other`, and Q's third point.
            let Some(bq) = index.block_through(free_y, g) else {
                continue;
            };
            if triangle.contains(&bq) || bq == bp {
                continue;
            }
            let h = third(&blocks[bq], free_y, g);
            if used(h) || h == other {
                continue;
            }
            let Some(br) = index.block_through(free_z, other) else {
                continue;
            };
            if triangle.contains(&br) || br == bp || br == bq {
                continue;
            }
            if third(&blocks[br], free_z, other) != h {
                continue;
            }
            if !visit(&[triangle[0], triangle[1], triangle[2], bp, bq, br]) {
                return false;
            }
        }
    }
    true
}

/// Count configurations dual to the complete graph on `mu + 1` vertices:
/// `mu + 1` blocks pairwise intersecting in distinct points.
fn generalized_pasch_count(design: &PairwiseBalancedDesign, mu: usize) -> u64 {
    let blocks = design.blocks();
    let b = blocks.len();
    let mut count = 0u64;
    let mut chosen: Vec<usize> = Vec::with_capacity(mu + 1);
    let mut meets: Vec<usize> = Vec::with_capacity(mu * (mu + 1) / 2);

    fn rec(
        blocks: &[Vec<usize>],
        b: usize,
        target: usize,
        chosen: &mut Vec<usize>,
        meets: &mut Vec<usize>,
        count: &mut u64,
    ) {
        if chosen.len() == target {
            *count += 1;
            return;
        }
        let start = chosen.last().map_or(0, |&c| c + 1);
        'candidate: for cand in start..b {
            let cand_block = &blocks[cand];
            let mut new_meets = Vec::with_capacity(chosen.len());
            for &prev in chosen.iter() {
                let mut met = None;
                for &p in &blocks[prev] {
                    if cand_block.contains(&p) {
                        if met.is_some() {
                            continue 'candidate;
                        }
                        met = Some(p);
                    }
                }
                let Some(p) = met else {
                    continue 'candidate;
                };
                // Every intersection point must be fresh: a point of the
                // configuration lies in exactly two of its blocks.
                if meets.contains(&p) || new_meets.contains(&p) {
                    continue 'candidate;
                }
                new_meets.push(p);
            }
            let added = new_meets.len();
            chosen.push(cand);
            meets.extend(new_meets);
            rec(blocks, b, target, chosen, meets, count);
            chosen.pop();
            meets.truncate(meets.len() - added);
        }
    }

    rec(blocks, b, mu + 1, &mut chosen, &mut meets, &mut count);
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::bose_sts;
    use crate::galois::{ag_lines, pg_lines};

    /// Oracle: count block subsets of the given size in which every covered
    /// point lies in an even number of blocks.
    fn brute_even_subsets(design: &PairwiseBalancedDesign, size: usize) -> Vec<Vec<usize>> {
        let blocks = design.blocks();
        let mut found = Vec::new();
        let mut chosen = Vec::new();
        fn rec(
            blocks: &[Vec<usize>],
            v: usize,
            size: usize,
            start: usize,
            chosen: &mut Vec<usize>,
            found: &mut Vec<Vec<usize>>,
        ) {
            if chosen.len() == size {
                let mut counts = vec![0usize; v];
                for &b in chosen.iter() {
                    for &p in &blocks[b] {
                        counts[p] += 1;
                    }
                }
                if counts.iter().all(|&c| c % 2 == 0) {
                    found.push(chosen.clone());
                }
                return;
            }
            for i in start..blocks.len() {
                chosen.push(i);
                rec(blocks, v, size, i + 1, chosen, found);
                chosen.pop();
            }
        }
        rec(blocks, design.v(), size, 0, &mut chosen, &mut found);
        found
    }

    /// Oracle classification of an even 6-subset: bipartite intersection
    /// graph means grid, a triangle means prism (double triangle).
    fn brute_six_split(design: &PairwiseBalancedDesign) -> (u64, u64) {
        let blocks = design.blocks();
        let mut grids = 0;
        let mut prisms = 0;
        for subset in brute_even_subsets(design, 6) {
            let meets = |i: usize, j: usize| {
                blocks[subset[i]]
                    .iter()
                    .any(|p| blocks[subset[j]].contains(p))
            };
            let mut has_triangle = false;
            for i in 0..6 {
                for j in i + 1..6 {
                    for k in j + 1..6 {
                        if meets(i, j) && meets(i, k) && meets(j, k) {
                            has_triangle = true;
                        }
                    }
                }
            }
            if has_triangle {
                prisms += 1;
            } else {
                grids += 1;
            }
        }
        (grids, prisms)
    }

    #[test]
    fn pasch_free_affine_plane() {
        let d = ag_lines(2, 3).unwrap().design;
        assert_eq!(count_configurations(&d, ConfigurationKind::Pasch).unwrap(), 0);
        assert!(brute_even_subsets(&d, 4).is_empty());
    }

    #[test]
    fn pasch_count_fano_matches_oracle() {
        let d = pg_lines(2, 2).unwrap().design;
        let count = count_configurations(&d, ConfigurationKind::Pasch).unwrap();
        let brute = brute_even_subsets(&d, 4).len() as u64;
        assert_eq!(count, brute);
        assert!(count > 0);
    }

    #[test]
    fn pasch_count_bose_systems_match_oracle() {
        for v in [9, 15, 21] {
            let d = bose_sts(v).unwrap();
            let count = count_configurations(&d, ConfigurationKind::Pasch).unwrap();
            let brute = brute_even_subsets(&d, 4).len() as u64;
            assert_eq!(count, brute, "order {v}");
        }
    }

    #[test]
    fn generalized_pasch_agrees_with_pasch_on_triples() {
        for v in [9, 15] {
            let d = bose_sts(v).unwrap();
            assert_eq!(
                count_configurations(&d, ConfigurationKind::Pasch).unwrap(),
                count_configurations(&d, ConfigurationKind::GeneralizedPasch(3)).unwrap(),
            );
        }
        let fano = pg_lines(2, 2).unwrap().design;
        assert_eq!(
            count_configurations(&fano, ConfigurationKind::Pasch).unwrap(),
            count_configurations(&fano, ConfigurationKind::GeneralizedPasch(3)).unwrap(),
        );
    }

    #[test]
    fn generalized_pasch_block_size_four_matches_oracle() {
        // PG(2,3) has none (no five lines avoid a triple concurrence, the
        // dual of the four-point arc bound); AG(2,4) has plenty.
        let pg = pg_lines(2, 3).unwrap().design;
        let count = count_configurations(&pg, ConfigurationKind::GeneralizedPasch(4)).unwrap();
        assert_eq!(count, brute_even_subsets(&pg, 5).len() as u64);
        assert_eq!(count, 0);

        let ag = ag_lines(2, 4).unwrap().design;
        let count = count_configurations(&ag, ConfigurationKind::GeneralizedPasch(4)).unwrap();
        assert_eq!(count, brute_even_subsets(&ag, 5).len() as u64);
        assert!(count > 0);
    }

    #[test]
    fn grid_and_double_triangle_counts_affine_plane() {
        let d = ag_lines(2, 3).unwrap().design;
        let grids = count_configurations(&d, ConfigurationKind::Grid).unwrap();
        let prisms = count_configurations(&d, ConfigurationKind::DoubleTriangle).unwrap();
        let (brute_grids, brute_prisms) = brute_six_split(&d);
        assert_eq!(grids, brute_grids);
        assert_eq!(prisms, brute_prisms);
        assert!(grids > 0);
    }

    #[test]
    fn grid_and_double_triangle_counts_fano() {
        let d = pg_lines(2, 2).unwrap().design;
        let grids = count_configurations(&d, ConfigurationKind::Grid).unwrap();
        let prisms = count_configurations(&d, ConfigurationKind::DoubleTriangle).unwrap();
        let (brute_grids, brute_prisms) = brute_six_split(&d);
        assert_eq!(grids, brute_grids);
        assert_eq!(prisms, brute_prisms);
    }

    #[test]
    fn grid_and_double_triangle_counts_bose_15() {
        let d = bose_sts(15).unwrap();
        let grids = count_configurations(&d, ConfigurationKind::Grid).unwrap();
        let prisms = count_configurations(&d, ConfigurationKind::DoubleTriangle).unwrap();
        let (brute_grids, brute_prisms) = brute_six_split(&d);
        assert_eq!(grids, brute_grids);
        assert_eq!(prisms, brute_prisms);
    }

    #[test]
    fn wrong_block_size_is_rejected() {
        let d = pg_lines(2, 3).unwrap().design; // block size 4
        assert!(matches!(
            count_configurations(&d, ConfigurationKind::Pasch),
            Err(AnalysisError::WrongBlockSize { .. })
        ));
        assert!(matches!(
            count_configurations(&d, ConfigurationKind::GeneralizedPasch(3)),
            Err(AnalysisError::WrongBlockSize { .. })
        ));
    }
}
