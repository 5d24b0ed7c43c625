mod common;

use std::collections::HashMap;
use std::ops::ControlFlow;

use proptest::prelude::*;
use subtraj::oracle::{brute_all_centres, brute_pareto_front};
use subtraj::psc::{decompose, PscSolver};
use subtraj::{frechet_leq, psc_stream, Cluster, Point};

use common::{instance, pair, store_of};

fn collect(store: &subtraj::TrajectoryStore, delta: f64) -> Vec<Cluster> {
    let mut out = Vec::new();
    psc_stream(delta, store, |c| {
        out.push(c);
        ControlFlow::Continue(())
    })
    .unwrap();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stream_is_a_two_approximate_front(inst in instance(3, 20, 6), k in 0usize..4) {
        let delta = [0.0, 1.0, 2.5, 5.0][k];
        let store = store_of(&inst);
        let stream = collect(&store, delta);
        let cards: HashMap<(usize, usize), usize> = brute_all_centres(&inst, delta)
            .unwrap()
            .into_iter()
            .map(|c| (c.centre, c.cardinality))
            .collect();
        for c in &stream {
            // every emitted cluster is optimal for its own centre
            prop_assert_eq!(c.cardinality(), cards[&pair(&c.centre)]);
            prop_assert!(c.members_disjoint());
            for m in &c.members {
                prop_assert!(frechet_leq(store.slice(&c.centre), store.slice(m), delta).unwrap());
            }
        }
        for (&(a, b), &card) in &cards {
            let vc = b - a + 1;
            prop_assert!(
                stream.iter().any(|q| q.cardinality() >= card && vc <= 2 * q.centre_vertices()),
                "centre [{}, {}] with {} members is not dominated", a, b, card
            );
        }
        for f in brute_pareto_front(&inst, delta).unwrap() {
            prop_assert!(stream.iter().any(|q| q.cardinality() >= f.cardinality && f.vertices <= 2 * q.centre_vertices()));
        }
    }

    #[test]
    fn cardinality_never_grows_along_a_pass(inst in instance(3, 30, 8), k in 0usize..3) {
        let delta = [1.0, 3.0, 6.0][k];
        let store = store_of(&inst);
        let stream = collect(&store, delta);
        for w in stream.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            let grows = q.centre.vertex_count() == p.centre.vertex_count() + 1
                && (q.centre.start() == p.centre.start() || q.centre.end() == p.centre.end());
            if grows {
                prop_assert!(q.cardinality() <= p.cardinality());
            }
        }
    }

    #[test]
    fn decomposition_nests_and_covers(inst in instance(5, 60, 3)) {
        let store = store_of(&inst);
        let nodes = decompose(&store);
        let mut leaves: Vec<usize> = nodes.iter().filter(|n| n.lo == n.hi).map(|n| n.lo).collect();
        leaves.sort();
        prop_assert_eq!(leaves, (1..=store.len()).collect::<Vec<_>>());
        for n in &nodes {
            prop_assert!(store.subtrajectory(n.lo, n.hi).is_ok());
            if n.depth > 0 {
                let parent = nodes.iter().find(|p| p.depth + 1 == n.depth && p.lo <= n.lo && n.hi <= p.hi);
                prop_assert!(parent.is_some());
                let p = parent.unwrap();
                prop_assert!(n.vertex_count() <= (p.vertex_count() + 1) / 2);
            }
        }
        let max_depth = nodes.iter().map(|n| n.depth).max().unwrap();
        prop_assert!((1usize << max_depth) < 2 * store.len().max(1));
    }
}

#[test]
fn identical_copies_appear_with_two_members() {
    let base: Vec<Point> = (0..9).map(|i| Point::new(i as f64 * 2.0, (i * i % 5) as f64)).collect();
    let far: Vec<Point> = base.iter().map(|p| Point::new(p.x, p.y + 1000.0)).collect();
    let store = store_of(&vec![base.clone(), far, base]);
    let stream = collect(&store, 0.1);
    assert!(stream.iter().any(|c| c.cardinality() == 2 && c.centre.len() == 8));
}

#[test]
fn suffix_of_whole_node_equals_prefix_of_whole_node() {
    let inst = vec![(0..11).map(|i| Point::new((i % 4) as f64, (i % 3) as f64)).collect::<Vec<_>>()];
    let store = store_of(&inst);
    let mut whole = Vec::new();
    PscSolver::new(&store)
        .unwrap()
        .stream(1.0, |c| {
            if c.centre.start() == 1 && c.centre.end() == 11 {
                whole.push(c);
            }
            ControlFlow::Continue(())
        })
        .unwrap();
    assert_eq!(whole.len(), 2);
    assert_eq!(whole[0], whole[1]);
}
