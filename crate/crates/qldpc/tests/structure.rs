//! Cross-module structural invariants: geometry batteries, girth, the
//! even-freeness and minimum-distance correspondence, and Gram-rank
//! criteria across design families.

use qldpc::analysis::{
    count_configurations, even_freeness, girth, odd_point_bound_check, ConfigurationKind, Girth,
};
use qldpc::designs::bose_sts;
use qldpc::galois::{ag_lines, pg_lines};
use qldpc::qcode::{build_standard_form, ea_params, extend_addr};
use qldpc::PairwiseBalancedDesign;

const GEOMETRY_BATTERY: [(u32, u64); 8] = [
    (2, 3),
    (3, 3),
    (4, 3),
    (2, 4),
    (2, 5),
    (3, 5),
    (2, 2),
    (3, 2),
];

#[test]
fn affine_battery_verifies_as_steiner_designs() {
    for (m, q) in GEOMETRY_BATTERY {
        let g = ag_lines(m, q).unwrap();
        let report = g.design.verify();
        assert!(report.valid, "AG({m},{q})");
        assert_eq!(g.design.v(), q.pow(m) as usize);
        assert_eq!(g.design.steiner_block_size(), Some(q as usize));
        assert_eq!(
            g.design.block_count(),
            (q.pow(m - 1) * (q.pow(m) - 1) / (q - 1)) as usize
        );
        assert_eq!(
            report.profile.replication(),
            Some(((q.pow(m) - 1) / (q - 1)) as usize)
        );
    }
}

#[test]
fn projective_battery_verifies_as_steiner_designs() {
    for (m, q) in GEOMETRY_BATTERY {
        let g = pg_lines(m, q).unwrap();
        let report = g.design.verify();
        assert!(report.valid, "PG({m},{q})");
        let v = ((q.pow(m + 1) - 1) / (q - 1)) as usize;
        assert_eq!(g.design.v(), v);
        assert_eq!(g.design.steiner_block_size(), Some((q + 1) as usize));
        assert_eq!(
            g.design.block_count(),
            v * (v - 1) / ((q + 1) * q) as usize
        );
        assert_eq!(
            report.profile.replication(),
            Some(((q.pow(m) - 1) / (q - 1)) as usize)
        );
    }
}

#[test]
fn steiner_incidence_and_standard_form_have_girth_six() {
    let designs: Vec<PairwiseBalancedDesign> = vec![
        ag_lines(2, 3).unwrap().design,
        ag_lines(2, 4).unwrap().design,
        pg_lines(2, 2).unwrap().design,
        pg_lines(2, 3).unwrap().design,
        bose_sts(15).unwrap(),
        bose_sts(21).unwrap(),
    ];
    for design in designs {
        assert_eq!(girth(&design.incidence()), Girth::Length(6));
        let code = build_standard_form(&design).unwrap();
        assert_eq!(girth(code.matrix()), Girth::Length(6));
    }
}

#[test]
fn even_freeness_capped_at_seven_and_matches_min_distance() {
    // Triple systems: even-freeness never exceeds 7, and wherever the
    // incidence code minimum distance is computable the two quantities
    // differ by exactly one.
    let systems: Vec<(String, PairwiseBalancedDesign)> = vec![
        ("fano".into(), pg_lines(2, 2).unwrap().design),
        ("ag(2,3)".into(), ag_lines(2, 3).unwrap().design),
        ("ag(3,3)".into(), ag_lines(3, 3).unwrap().design),
        ("bose(15)".into(), bose_sts(15).unwrap()),
        ("bose(21)".into(), bose_sts(21).unwrap()),
        ("bose(27)".into(), bose_sts(27).unwrap()),
    ];
    for (name, design) in systems {
        let report = even_freeness(&design, 7).unwrap();
        assert!(report.r <= 7, "{name}: r = {}", report.r);
        if let Ok(min_distance) = design.incidence().min_distance(8) {
            assert_eq!(min_distance, report.r + 1, "{name}");
        }
        // The Pasch configuration is the unique even 4-configuration.
        let pasch = count_configurations(&design, ConfigurationKind::Pasch).unwrap();
        let min_distance_is_four = report.r == 3;
        assert_eq!(pasch > 0, min_distance_is_four, "{name}");
    }
}

#[test]
fn affine_plane_attains_the_abelian_even_freeness_bound() {
    // Block size 3 caps transitive designs at r = 2*3 - 1 = 5.
    let d = ag_lines(2, 3).unwrap().design;
    assert_eq!(even_freeness(&d, 7).unwrap().r, 5);
}

#[test]
fn odd_point_minimum_is_twice_the_order_for_affine_planes() {
    for q in [3u64, 5] {
        let d = ag_lines(2, q).unwrap().design;
        let limit = (2 * q - 1) as usize;
        let report = odd_point_bound_check(&d, limit, 2 * q as usize).unwrap();
        assert!(report.holds, "AG(2,{q})");
        assert_eq!(report.min_value, Some(2 * q as usize), "AG(2,{q})");
    }
}

#[test]
fn standard_form_min_distance_is_one_more_than_block_size() {
    let designs: Vec<PairwiseBalancedDesign> = vec![
        ag_lines(2, 3).unwrap().design,
        ag_lines(2, 4).unwrap().design,
        pg_lines(2, 2).unwrap().design,
        bose_sts(15).unwrap(),
    ];
    for design in designs {
        let code = build_standard_form(&design).unwrap();
        let mu = design.steiner_block_size().unwrap();
        assert_eq!(code.matrix().min_distance(mu + 2).unwrap(), mu + 1);
    }
}

#[test]
fn gram_rank_one_exactly_for_odd_replicate_designs() {
    let odd_replicate: Vec<PairwiseBalancedDesign> = vec![
        pg_lines(2, 2).unwrap().design,
        pg_lines(3, 2).unwrap().design,
        ag_lines(3, 3).unwrap().design,
        bose_sts(15).unwrap(),
    ];
    for design in odd_replicate {
        assert!(design.replication_profile().odd_replicate);
        assert_eq!(design.incidence().gram_rank(), 1);
    }
    let even_replicate: Vec<PairwiseBalancedDesign> = vec![
        ag_lines(2, 3).unwrap().design,
        ag_lines(2, 5).unwrap().design,
        bose_sts(21).unwrap(),
    ];
    for design in even_replicate {
        assert!(design.replication_profile().even_replicate);
        assert_ne!(design.incidence().gram_rank(), 1);
        // The all-one row extension brings the Gram rank down to 1.
        let extended = extend_addr(&design).unwrap();
        assert_eq!(extended.gram_rank(), 1);
        assert_eq!(girth(&extended), Girth::Length(6));
    }
}

#[test]
fn ea_dimension_identity() {
    for h in [
        ag_lines(3, 3).unwrap().design.incidence(),
        extend_addr(&ag_lines(2, 3).unwrap().design).unwrap(),
        extend_addr(&bose_sts(21).unwrap()).unwrap(),
        pg_lines(2, 2).unwrap().design.incidence(),
    ] {
        let params = ea_params(&h, None).unwrap();
        assert_eq!(
            params.dimension - params.catalytic_dimension.unwrap(),
            params.assist_count as i64
        );
    }
}

#[test]
fn addr_preserves_even_freeness_at_desk_scale() {
    // The odd-point property of the affine plane implies the extension
    // keeps its even-freeness.
    let d = ag_lines(2, 3).unwrap().design;
    let before = even_freeness(&d, 7).unwrap().r;
    let extended = PairwiseBalancedDesign::from_incidence(&extend_addr(&d).unwrap()).unwrap();
    let after = even_freeness(&extended, 7).unwrap().r;
    assert_eq!(before, 5);
    assert_eq!(after, 5);
}
