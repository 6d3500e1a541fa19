mod common;

use common::*;
use proptest::prelude::*;
use provsynth_core::consistency::{prov_consistent, prov_consistent_projected};
use provsynth_core::eval::{eval, eval_prov};
use provsynth_core::harness::generate_demo;
use provsynth_core::synth::construct_skeletons;
use provsynth_core::Query;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn evaluating_provenance_gives_the_values(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let db = random_db(&mut rng, 6, 4);
        let Some(path) = random_walk(&mut rng, &db, 2) else { return Ok(()) };
        let q = path.last().unwrap();
        let Ok(plain) = eval(q, &db) else { return Ok(()) };
        let prov = eval_prov(q, &db).unwrap();
        let via_prov = prov.eval(&db).unwrap();
        prop_assert_eq!(plain.rows, via_prov.rows, "query {}", q);
    }

    #[test]
    fn abstraction_bounds_every_instantiation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let db = random_db2(&mut rng, 6, 4);
        let depth = rng.random_range(1..=3);
        let Some(path) = random_walk(&mut rng, &db, depth) else { return Ok(()) };
        let concrete = path.last().unwrap();
        let partial = &path[rng.random_range(0..path.len())];
        if let Some(outcome) = over_approximates(&mut rng, &db, partial, concrete) {
            prop_assert_eq!(outcome, Ok(()), "partial {} of {}", partial, concrete);
        }
    }

    #[test]
    fn pruners_keep_paths_to_consistent_queries(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let db = random_db2(&mut rng, 6, 4);
        let depth = rng.random_range(1..=3);
        let Some(path) = random_walk(&mut rng, &db, depth) else { return Ok(()) };
        let Some(demo) = random_demo(&mut rng, &db, path.last().unwrap()) else { return Ok(()) };
        prop_assert!(prov_consistent_projected(&eval_prov(path.last().unwrap(), &db).unwrap(), &demo).is_some());
        let bad = unsound_pruners(&db, &demo, &path);
        prop_assert!(bad.is_empty(), "{:?} on {}", bad, demo.to_json());
    }

    #[test]
    fn generated_demos_match_their_ground_truth(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let db = random_db(&mut rng, 6, 4);
        let Some(path) = random_walk(&mut rng, &db, 2) else { return Ok(()) };
        let gt = path.last().unwrap();
        if let Ok((sampled, demo)) = generate_demo(&db, gt, seed) {
            let star = eval_prov(gt, &sampled).unwrap();
            prop_assert!(prov_consistent(&star, &demo).is_some());
        }
    }

    #[test]
    fn query_json_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let db = random_db(&mut rng, 4, 3);
        let Some(path) = random_walk(&mut rng, &db, 3) else { return Ok(()) };
        for q in &path {
            prop_assert_eq!(&Query::parse_json(&q.to_json()).unwrap(), q);
        }
    }
}

#[test]
fn skeletons_have_no_filled_slots() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let db = random_db(&mut rng, 3, 3);
    for s in construct_skeletons(&db, 2) {
        assert_eq!(s.holes().len(), s.holes().iter().map(|h| h.id).max().map_or(0, |m| m + 1));
        assert!(s.own_holes().len() == s.holes().len() || s.size() > 1);
    }
}
