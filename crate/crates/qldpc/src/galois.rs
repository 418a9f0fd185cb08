//! Finite field arithmetic and the line designs of affine and projective
//! geometries.
//!
//! Field elements are integers below the order `q = p^e`, read as base-`p`
//! digit vectors, i.e. polynomial coefficients over the prime field.
//! Extension fields reduce modulo a stored irreducible polynomial; prime
//! fields use plain modular arithmetic.

use std::collections::HashMap;

use thiserror::Error;

use crate::designs::{DesignError, PairwiseBalancedDesign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} exceeds the supported maximum 2^16")]
    OrderTooLarge(u64),
    #[error("geometry dimension must be at least 2, got {0}")]
    DimensionTooSmall(u32),
    #[error("geometry too large: {0} points")]
    GeometryTooLarge(u64),
    #[error(transparent)]
    Design(#[from] DesignError),
}

/// The finite field of order `q = p^e`.
///
/// For `e >= 2` the modulus is the least monic irreducible polynomial of
/// degree `e`, ordered by its coefficient vector read from the leading
/// coefficient down. Elements are `0..q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    e: u32,
    q: u64,
    /// Coefficients `c_0..c_e` of the monic modulus; empty for prime fields.
    modulus: Vec<u64>,
}

impl FiniteField {
    pub fn new(q: u64) -> Result<Self, GaloisError> {
        if q > 1 << 16 {
            return Err(GaloisError::OrderTooLarge(q));
        }
        let (p, e) = prime_power_decomposition(q).ok_or(GaloisError::NotPrimePower(q))?;
        let modulus = if e == 1 {
            Vec::new()
        } else {
            least_irreducible(p, e)
        };
        Ok(Self { p, e, q, modulus })
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Coefficients `c_0..c_e` of the modulus (empty for prime fields).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.e == 1 {
            return (a + b) % self.p;
        }
        let mut digits_a = self.digits(a);
        for (da, db) in digits_a.iter_mut().zip(self.digits(b)) {
            *da = (*da + db) % self.p;
        }
        self.undigits(&digits_a)
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.e == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let digits = self.digits(a).iter().map(|&d| (self.p - d) % self.p).collect::<Vec<_>>();
        self.undigits(&digits)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.e == 1 {
            return a * b % self.p;
        }
        let da = self.digits(a);
        let db = self.digits(b);
        let mut product = vec![0u64; 2 * self.e as usize];
        for (i, &ca) in da.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in db.iter().enumerate() {
                product[i + j] = (product[i + j] + ca * cb) % self.p;
            }
        }
        poly_reduce(&mut product, &self.modulus, self.p);
        self.undigits(&product[..self.e as usize])
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0 && a < self.q, "inverse of zero or out-of-range element");
        self.pow(a, self.q - 2)
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn digits(&self, mut a: u64) -> Vec<u64> {
        let mut out = vec![0; self.e as usize];
        for d in out.iter_mut() {
            *d = a % self.p;
            a /= self.p;
        }
        out
    }

    fn undigits(&self, digits: &[u64]) -> u64 {
        digits
            .iter()
            .rev()
            .fold(0, |acc, &d| acc * self.p + d)
    }
}

fn prime_power_decomposition(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&d| q.is_multiple_of(d)).expect("q >= 2 has a factor");
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Remainder of `poly` (low-to-high coefficients) modulo the monic `modulus`.
fn poly_reduce(poly: &mut [u64], modulus: &[u64], p: u64) {
    let deg_m = modulus.len() - 1;
    for i in (deg_m..poly.len()).rev() {
        let lead = poly[i];
        if lead == 0 {
            continue;
        }
        poly[i] = 0;
        for (j, &c) in modulus[..deg_m].iter().enumerate() {
            let idx = i - deg_m + j;
            poly[idx] = (poly[idx] + (p - c % p) % p * lead) % p;
        }
    }
}

fn is_irreducible(candidate: &[u64], p: u64) -> bool {
    let e = candidate.len() - 1;
    // Trial division by every monic polynomial of degree 1..=e/2.
    for k in 1..=e / 2 {
        let mut divisor = vec![0u64; k + 1];
        divisor[k] = 1;
        for low in 0..p.pow(k as u32) {
            let mut rest = low;
            for d in divisor[..k].iter_mut() {
                *d = rest % p;
                rest /= p;
            }
            let mut work = candidate.to_vec();
            poly_reduce(&mut work, &divisor, p);
            if work[..k].iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible polynomial of degree `e` over `F_p`, ordered by
/// the coefficient vector `(c_{e-1}, ..., c_0)`.
fn least_irreducible(p: u64, e: u32) -> Vec<u64> {
    let e = e as usize;
    for value in 0..p.pow(e as u32) {
        let mut candidate = vec![0u64; e + 1];
        candidate[e] = 1;
        let mut rest = value;
        for c in candidate[..e].iter_mut() {
            *c = rest % p;
            rest /= p;
        }
        if is_irreducible(&candidate, p) {
            return candidate;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

/// Which finite geometry a design came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    Affine,
    Projective,
}

/// The points and lines of `AG(m,q)` or `PG(m,q)` as a block design.
#[derive(Debug, Clone)]
pub struct GeometryDesign {
    pub kind: GeometryKind,
    pub m: u32,
    pub q: u64,
    pub design: PairwiseBalancedDesign,
}

const MAX_GEOMETRY_POINTS: u64 = 1 << 20;

/// The points and 1-dimensional affine subspaces (lines) of `AG(m,q)`.
///
/// Points are the vectors of `F_q^m` in lexicographic order; blocks are all
/// cosets of the 1-dimensional subspaces. The result is verified to be a
/// Steiner 2-design with block size `q` on `q^m` points.
pub fn ag_lines(m: u32, q: u64) -> Result<GeometryDesign, GaloisError> {
    if m < 2 {
        return Err(GaloisError::DimensionTooSmall(m));
    }
    let field = FiniteField::new(q)?;
    let v = q
        .checked_pow(m)
        .filter(|&v| v <= MAX_GEOMETRY_POINTS)
        .ok_or(GaloisError::GeometryTooLarge(u64::MAX))?;
    let v = v as usize;
    let dims = m as usize;
    let coords_of = |mut index: usize| -> Vec<u64> {
        let mut coords = vec![0u64; dims];
        for c in coords.iter_mut().rev() {
            *c = (index as u64) % q;
            index /= q as usize;
        }
        coords
    };
    let index_of = |coords: &[u64]| -> usize {
        coords.iter().fold(0usize, |acc, &c| acc * q as usize + c as usize)
    };
    // Directions normalized so the first nonzero coordinate is 1: one
    // representative per 1-dimensional subspace.
    let directions: Vec<Vec<u64>> = (1..v)
        .map(coords_of)
        .filter(|coords| {
            coords
                .iter()
                .find(|&&c| c != 0)
                .is_some_and(|&first| first == 1)
        })
        .collect();
    let mut blocks = Vec::new();
    let mut visited = vec![false; v];
    for direction in &directions {
        visited.fill(false);
        for base in 0..v {
            if visited[base] {
                continue;
            }
            let base_coords = coords_of(base);
            let mut line: Vec<usize> = field
                .elements()
                .map(|t| {
                    let coords: Vec<u64> = base_coords
                        .iter()
                        .zip(direction)
                        .map(|(&b, &d)| field.add(b, field.mul(t, d)))
                        .collect();
                    index_of(&coords)
                })
                .collect();
            for &p in &line {
                visited[p] = true;
            }
            line.sort_unstable();
            blocks.push(line);
        }
    }
    let design = PairwiseBalancedDesign::new(v, blocks)?;
    let expected_blocks = (q.pow(m - 1) * (q.pow(m) - 1) / (q - 1)) as usize;
    let report = design.verify();
    if !report.valid
        || design.block_count() != expected_blocks
        || design.steiner_block_size() != Some(q as usize)
    {
        return Err(GaloisError::Design(DesignError::ConstructionInvalid(
            format!("AG({m},{q}) line design failed verification"),
        )));
    }
    Ok(GeometryDesign {
        kind: GeometryKind::Affine,
        m,
        q,
        design,
    })
}

/// The points and 1-dimensional projective subspaces (lines) of `PG(m,q)`.
///
/// Points are the 1-dimensional subspaces of `F_q^{m+1}`, represented by the
/// vector whose first nonzero coordinate is 1, in lexicographic order.
/// Blocks are the point sets of the 2-dimensional subspaces. The result is
/// verified to be a Steiner 2-design with block size `q + 1`.
pub fn pg_lines(m: u32, q: u64) -> Result<GeometryDesign, GaloisError> {
    if m < 2 {
        return Err(GaloisError::DimensionTooSmall(m));
    }
    let field = FiniteField::new(q)?;
    let ambient = q
        .checked_pow(m + 1)
        .filter(|&n| n <= MAX_GEOMETRY_POINTS)
        .ok_or(GaloisError::GeometryTooLarge(u64::MAX))?;
    let dims = (m + 1) as usize;
    let coords_of = |mut index: u64| -> Vec<u64> {
        let mut coords = vec![0u64; dims];
        for c in coords.iter_mut().rev() {
            *c = index % q;
            index /= q;
        }
        coords
    };
    let mut points = Vec::new();
    let mut index_map: HashMap<Vec<u64>, usize> = HashMap::new();
    for raw in 1..ambient {
        let coords = coords_of(raw);
        let first = coords.iter().copied().find(|&c| c != 0).unwrap();
        if first == 1 {
            index_map.insert(coords.clone(), points.len());
            points.push(coords);
        }
    }
    let v = points.len();
    let normalize = |coords: &[u64]| -> Vec<u64> {
        let first = coords.iter().copied().find(|&c| c != 0).expect("nonzero vector");
        let scale = field.inv(first);
        coords.iter().map(|&c| field.mul(c, scale)).collect()
    };
    let mut blocks = Vec::new();
    for i in 0..v {
        for j in i + 1..v {
            // The q+1 points of the span of P_i and P_j.
            let mut line = vec![i, j];
            for t in 1..q {
                let combined: Vec<u64> = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(&a, &b)| field.add(field.mul(t, a), b))
                    .collect();
                line.push(index_map[&normalize(&combined)]);
            }
            line.sort_unstable();
            // Emit each line once: when (i, j) are its two least points.
            if line[0] == i && line[1] == j {
                blocks.push(line);
            }
        }
    }
    let design = PairwiseBalancedDesign::new(v, blocks)?;
    let expected_v = ((q.pow(m + 1) - 1) / (q - 1)) as usize;
    let expected_blocks = expected_v * (expected_v - 1) / ((q + 1) * q) as usize;
    let report = design.verify();
    if !report.valid
        || v != expected_v
        || design.block_count() != expected_blocks
        || design.steiner_block_size() != Some((q + 1) as usize)
    {
        return Err(GaloisError::Design(DesignError::ConstructionInvalid(
            format!("PG({m},{q}) line design failed verification"),
        )));
    }
    Ok(GeometryDesign {
        kind: GeometryKind::Projective,
        m,
        q,
        design,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = FiniteField::new(3).unwrap();
        assert_eq!(f.elements().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(f.add(2, 2), 1);
        assert_eq!(f.mul(2, 2), 1);
        assert_eq!(f.inv(2), 2);
    }

    #[test]
    fn gf4_modulus_and_cubes() {
        let f = FiniteField::new(4).unwrap();
        // x^2 + x + 1 is the least irreducible quadratic over F_2.
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let x = 2; // the polynomial x
        assert_eq!(f.mul(x, f.mul(x, x)), 1);
        for a in 1..4 {
            assert_eq!(f.pow(a, 3), 1);
        }
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert_eq!(FiniteField::new(6).unwrap_err(), GaloisError::NotPrimePower(6));
        assert_eq!(FiniteField::new(12).unwrap_err(), GaloisError::NotPrimePower(12));
        assert_eq!(FiniteField::new(1).unwrap_err(), GaloisError::NotPrimePower(1));
    }

    #[test]
    fn field_axioms_exhaustive_small_orders() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = FiniteField::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "inverse fails for {a} in GF({q})");
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c)),
                            "distributivity fails in GF({q})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn affine_plane_of_order_three() {
        let g = ag_lines(2, 3).unwrap();
        assert_eq!(g.design.v(), 9);
        assert_eq!(g.design.block_count(), 12);
        assert_eq!(g.design.steiner_block_size(), Some(3));
    }

    #[test]
    fn affine_four_dimensional() {
        let g = ag_lines(4, 3).unwrap();
        assert_eq!(g.design.v(), 81);
        assert_eq!(g.design.block_count(), 1080);
    }

    #[test]
    fn affine_three_dimensional_order_five() {
        let g = ag_lines(3, 5).unwrap();
        assert_eq!(g.design.v(), 125);
        assert_eq!(g.design.block_count(), 775);
    }

    #[test]
    fn fano_plane() {
        let g = pg_lines(2, 2).unwrap();
        assert_eq!(g.design.v(), 7);
        assert_eq!(g.design.block_count(), 7);
        assert_eq!(g.design.steiner_block_size(), Some(3));
    }

    #[test]
    fn projective_three_space() {
        let g = pg_lines(3, 2).unwrap();
        assert_eq!(g.design.v(), 15);
        assert_eq!(g.design.block_count(), 35);
    }

    #[test]
    fn projective_plane_of_order_three() {
        let g = pg_lines(2, 3).unwrap();
        assert_eq!(g.design.v(), 13);
        assert_eq!(g.design.block_count(), 13);
        assert_eq!(g.design.steiner_block_size(), Some(4));
    }

    #[test]
    fn geometry_dimension_must_be_at_least_two() {
        assert!(matches!(ag_lines(1, 3), Err(GaloisError::DimensionTooSmall(1))));
        assert!(matches!(pg_lines(1, 3), Err(GaloisError::DimensionTooSmall(1))));
    }

    #[test]
    fn replication_numbers_match_formula() {
        for (m, q) in [(2u32, 3u64), (3, 3), (2, 4), (2, 5)] {
            let expected = ((q.pow(m) - 1) / (q - 1)) as usize;
            let g = ag_lines(m, q).unwrap();
            let profile = g.design.replication_profile();
            assert_eq!(profile.replication(), Some(expected));
        }
        for (m, q) in [(2u32, 2u64), (3, 2), (2, 3)] {
            let expected = ((q.pow(m) - 1) / (q - 1)) as usize;
            let g = pg_lines(m, q).unwrap();
            assert_eq!(g.design.replication_profile().replication(), Some(expected));
        }
    }
}
