mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use satroute::analysis::xor_size;
use satroute::config::{parse_config, DemandPolicy, ExperimentGrid};
use satroute::constellation::{common_support, generate_network, ConstellationConfig, LinkClass};
use satroute::lp::{export_lp_text, parse_lp_text, solve_milp};
use satroute::topology::{read_topology, write_topology};

fn small_config() -> impl Strategy<Value = ConstellationConfig> {
    (1usize..=4, 2usize..=5, 0usize..=2, 0usize..=2, 1usize..=4, 1u32..=4, 1u32..=3, any::<u64>(), any::<bool>())
        .prop_map(|(orbits, per_orbit, p, q, steps, bp, bt, seed, wrap)| ConstellationConfig {
            orbits,
            per_orbit,
            permanent_links: p,
            temporary_links: q,
            steps,
            max_permanent_bw: bp,
            max_temporary_bw: bt,
            seed,
            wrap_orbits: wrap,
            ..Default::default()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_networks_respect_their_config(cfg in small_config()) {
        prop_assume!(cfg.validate().is_ok());
        let net = generate_network(&cfg).unwrap();
        prop_assert_eq!(net.num_nodes(), cfg.orbits * cfg.per_orbit);
        prop_assert_eq!(net.num_steps(), cfg.steps);
        for w in net.links.windows(2) {
            prop_assert!((w[0].u, w[0].v) < (w[1].u, w[1].v));
        }
        for caps in &net.capacities {
            for (l, &c) in net.links.iter().zip(caps) {
                match l.class {
                    LinkClass::Permanent => prop_assert!(c >= 1 && c <= cfg.max_permanent_bw),
                    LinkClass::Temporary => prop_assert!(c <= cfg.max_temporary_bw),
                }
            }
        }
        // Every edge appears in both directions.
        for l in &net.links {
            prop_assert!(net.edge_index(l.v, l.u).is_some());
        }
        prop_assert_eq!(generate_network(&cfg).unwrap(), net);
    }

    #[test]
    fn common_support_is_the_always_up_edge_set(cfg in small_config()) {
        prop_assume!(cfg.validate().is_ok());
        let net = generate_network(&cfg).unwrap();
        let expected: BTreeSet<(usize, usize)> = net
            .links
            .iter()
            .enumerate()
            .filter(|&(e, _)| net.capacities.iter().all(|caps| caps[e] > 0))
            .map(|(_, l)| (l.u, l.v))
            .collect();
        prop_assert_eq!(common_support(&net), expected);
        for l in &net.links {
            if l.class == LinkClass::Permanent {
                prop_assert!(common_support(&net).contains(&(l.u, l.v)));
            }
        }
    }

    #[test]
    fn topology_dump_round_trips(cfg in small_config()) {
        prop_assume!(cfg.validate().is_ok());
        let net = generate_network(&cfg).unwrap();
        let text = write_topology(&net);
        let back = read_topology(&text).unwrap();
        prop_assert_eq!(&back, &net);
        prop_assert_eq!(write_topology(&back), text);
    }

    #[test]
    fn lp_text_round_trips(seed in any::<u64>(), b in 0usize..=4, c in 1usize..=3, rows in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lp = common::random_program(&mut rng, b, c, rows);
        let text = export_lp_text(&lp).unwrap();
        let back = parse_lp_text(&text).unwrap();
        prop_assert_eq!(export_lp_text(&back).unwrap(), text.clone());
        let (x, y) = (solve_milp(&lp).unwrap(), solve_milp(&back).unwrap());
        prop_assert_eq!(x.status, y.status);
        if x.is_optimal() {
            prop_assert!((x.objective_value - y.objective_value).abs() <= 1e-9);
        }
    }

    #[test]
    fn xor_size_is_a_metric(
        a in prop::collection::btree_set((0usize..6, 0usize..6), 0..12),
        b in prop::collection::btree_set((0usize..6, 0usize..6), 0..12),
        c in prop::collection::btree_set((0usize..6, 0usize..6), 0..12),
    ) {
        prop_assert_eq!(xor_size(&a, &a), 0);
        prop_assert_eq!(xor_size(&a, &b), xor_size(&b, &a));
        prop_assert!(xor_size(&a, &c) <= xor_size(&a, &b) + xor_size(&b, &c));
        prop_assert_eq!(xor_size(&a, &b), a.symmetric_difference(&b).count());
    }

    #[test]
    fn grid_config_round_trips(
        k in prop::collection::vec(1usize..=20, 1..4),
        t in prop::collection::vec(1usize..=12, 1..4),
        trials in 1usize..=6,
        seed in any::<u64>(),
        fixed in prop::option::of(1u32..=9),
    ) {
        let grid = ExperimentGrid {
            k_values: k,
            t_values: t,
            trials,
            master_seed: seed,
            demand_policy: fixed.map(|d| DemandPolicy::Fixed(f64::from(d))),
            ..Default::default()
        };
        let back = parse_config(&grid.to_json()).unwrap();
        prop_assert_eq!(&back, &grid);
        prop_assert_eq!(back.to_json(), grid.to_json());
    }
}
