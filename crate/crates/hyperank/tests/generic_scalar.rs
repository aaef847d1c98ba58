//! The score math is generic over the scalar; exercise the f32
//! instantiation end to end and check it agrees with f64 at f32 precision.

use hyperank::fixtures::six_node_instance;
use hyperank::metrics::{presets, tensor, MatchFunction};
use hyperank::poset::{build_dag, entities_for_edge, topo_rank, ScoringContext};
use hyperank::rank::{rank, score_all, RankKey};
use hyperank::tables::{rank_entities, SchemaEntity};

#[test]
fn match_functions_evaluate_at_f32() {
    assert_eq!(MatchFunction::RatioMinMax.eval(16.0f32, 16.0f32).unwrap(), 1.0f32);
    assert_eq!(MatchFunction::LatencyInverse.eval(10.0f32, 10.0f32).unwrap(), 0.5f32);
    let bw: f32 = MatchFunction::BandwidthShift.eval(500.0f32, 500.0f32).unwrap();
    assert!((bw - 500.0 / 501.0).abs() < 1e-6);
}

#[test]
fn f32_scores_track_f64_scores_at_single_precision() {
    let h32 = six_node_instance::<f32>(1);
    let h64 = six_node_instance::<f64>(1);
    let m32 = presets::appendix(&h32.schema).unwrap();
    let m64 = presets::appendix(&h64.schema).unwrap();
    for (n32, n64) in h32.nodes.iter().zip(&h64.nodes) {
        let t32 = tensor(&h32.schema, n32, &h32.edges[0], &m32).unwrap();
        let t64 = tensor(&h64.schema, n64, &h64.edges[0], &m64).unwrap();
        assert!(
            (f64::from(t32) - t64).abs() < 1e-5,
            "{}: f32 {} vs f64 {}",
            n32.id,
            t32,
            t64
        );
    }
}

#[test]
fn f32_ranking_and_topological_order_match_f64() {
    let h32 = six_node_instance::<f32>(6);
    let h64 = six_node_instance::<f64>(6);
    let m32 = presets::appendix(&h32.schema).unwrap();
    let m64 = presets::appendix(&h64.schema).unwrap();

    let r32 = rank(score_all(&h32, &h32.edges[0], &m32).unwrap(), 6, RankKey::Upsilon);
    let r64 = rank(score_all(&h64, &h64.edges[0], &m64).unwrap(), 6, RankKey::Upsilon);
    assert_eq!(r32.selected, r64.selected);

    let ctx = ScoringContext::new(&h32, RankKey::Tensor).with_operator("appendix", m32);
    let dag = build_dag(entities_for_edge(&h32, "t1", "appendix"), &ctx).unwrap();
    let order = topo_rank(&dag).unwrap();
    let ids: Vec<&str> = order
        .iter()
        .map(|&i| dag.vertices[i].node_id.as_str())
        .collect();
    assert_eq!(ids, vec!["n4", "n2", "n5", "n3", "n1", "n6"]);
}

#[test]
fn f32_table_ranking_scores_self_similarity_as_one() {
    let entities = vec![SchemaEntity::new("orders", "total")];
    let ranked = rank_entities::<f32>("orders.total", &entities, 1).unwrap();
    assert!((ranked.entries[0].score - 1.0).abs() <= 1e-6);
}
