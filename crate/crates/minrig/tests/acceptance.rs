//! End-to-end checks over seeded corpora: construction minimality, the
//! numerical certificate, the counting identity, both brute-force oracles,
//! hand-built classification fixtures, edge-budget comparisons, and byte
//! determinism. Each check prints one summary line (visible with
//! `--nocapture`).

use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use minrig::construction::{
    build_grunbaum_2d, build_grunbaum_3d, edge, minimal_edge_count, FanDecomposition, Framework,
};
use minrig::geometry::Configuration;
use minrig::io::{render_svg, FrameworkFile};
use minrig::oracle::{enumerate_fan_2d, enumerate_fan_3d, perturbation_flex_search};
use minrig::rigidity::{
    certified_stress, congruence_check, count_flexes_and_stresses, lateration_edge_count,
    superstability_test, Classification,
};
use minrig::session::{Event, Session};

const CORPUS_PER_DIM: usize = 100;

fn corpus(dim: usize) -> Vec<Configuration> {
    let (lo, hi) = match dim {
        2 => (4usize, 50usize),
        _ => (5, 40),
    };
    let span = hi - lo + 1;
    (0..CORPUS_PER_DIM)
        .map(|i| {
            let n = lo + i % span;
            Configuration::random(n, dim, 0x5EED_0000 + (dim * 1000 + i) as u64)
                .expect("corpus parameters are valid")
        })
        .collect()
}

fn build(config: &Configuration) -> (Framework, FanDecomposition) {
    match config.dim() {
        2 => build_grunbaum_2d(config).expect("random planar corpus entry builds"),
        _ => build_grunbaum_3d(config).expect("random spatial corpus entry builds"),
    }
}

fn square_cycle() -> Framework {
    let config =
        Configuration::from_points_2d(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    Framework::new(config, [[0, 1], [1, 2], [2, 3], [0, 3]]).unwrap()
}

#[test]
fn acceptance_1_minimal_edge_counts() {
    let t0 = Instant::now();
    for dim in [2, 3] {
        for config in corpus(dim) {
            let (fw, _) = build(&config);
            assert_eq!(
                fw.edges().len(),
                minimal_edge_count(config.len(), dim),
                "n={} dim={dim}",
                config.len()
            );
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "construction corpus took {dt:?}");
    println!(
        "acceptance 1: pass ({} frameworks built at 2n-2 / 3n-5 edges in {dt:?})",
        2 * CORPUS_PER_DIM
    );
}

#[test]
fn acceptance_2_superstability_certificates() {
    let t0 = Instant::now();
    for dim in [2, 3] {
        for config in corpus(dim) {
            let n = config.len();
            let (fw, _) = build(&config);
            let report = superstability_test(&fw).expect("corpus certificate runs");
            assert!(
                report.superstable
                    && report.m == 0
                    && report.s == 1
                    && report.psd
                    && report.affine_ok
                    && report.omega_rank == n - dim - 1,
                "n={n} dim={dim}: {report:?}"
            );
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "certificate corpus took {dt:?}");
    println!(
        "acceptance 2: pass ({} certificates, all superstable, in {dt:?})",
        2 * CORPUS_PER_DIM
    );
}

#[test]
fn acceptance_3_flex_stress_counting_identity() {
    let identity_holds = |fw: &Framework| {
        let (m, s, _) = count_flexes_and_stresses(fw).expect("full-dimensional input");
        let d = fw.dim() as i64;
        let n = fw.len() as i64;
        let e = fw.edges().len() as i64;
        d * n - d * (d + 1) / 2 - e == m as i64 - s as i64
    };

    let mut checked = 0usize;
    for dim in [2, 3] {
        for config in corpus(dim) {
            let (fw, _) = build(&config);
            assert!(identity_holds(&fw), "constructed n={} dim={dim}", config.len());
            checked += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(777);
    for _ in 0..200 {
        let dim = if rng.random::<bool>() { 2 } else { 3 };
        let n = rng.random_range(dim + 2..16);
        let config = Configuration::random(n, dim, rng.random()).unwrap();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < 0.5 {
                    edges.push(edge(i, j));
                }
            }
        }
        let fw = Framework::new(config, edges).unwrap();
        assert!(identity_holds(&fw), "random graph n={n} dim={dim}");
        checked += 1;
    }
    println!("acceptance 3: pass (counting identity on {checked} frameworks)");
}

#[test]
fn acceptance_4_unfolded_maximum_oracle() {
    let t0 = Instant::now();
    let mut checked = 0usize;
    for dim in [2, 3] {
        for config in corpus(dim) {
            let (fw, fan) = build(&config);
            if fan.fold_count() > 12 {
                continue;
            }
            let set = match dim {
                2 => enumerate_fan_2d(&fan, fw.config()),
                _ => enumerate_fan_3d(&fan, fw.config()),
            }
            .expect("fold count is under the cap");
            assert_eq!(set.realizations.len(), 1usize << set.f);
            assert!(
                congruence_check(fw.config(), &set.realizations[0]),
                "all-plus state must reproduce the input (n={} dim={dim})",
                config.len()
            );
            assert!(
                set.max_is_strictly_unfolded(),
                "neighbor distance not strictly maximal unfolded (n={} dim={dim})",
                config.len()
            );
            checked += 1;
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 120.0, "enumeration corpus took {dt:?}");
    println!(
        "acceptance 4: pass ({checked} fans exhaustively enumerated, distance peaks only unfolded, in {dt:?})"
    );
}

#[test]
fn acceptance_5_perturbation_probe() {
    let t0 = Instant::now();
    let mut converged = 0usize;
    for dim in [2, 3] {
        for k in 0..20usize {
            let n = 5 + k % 8;
            let config =
                Configuration::random(n, dim, 0xF1E_0000 + (dim * 100 + k) as u64).unwrap();
            let (fw, _) = build(&config);
            for ambient in dim..=dim + 2 {
                let results =
                    perturbation_flex_search(&fw, ambient, 100, 0.01, 0xA5A5 + k as u64).unwrap();
                for (q, residual) in results {
                    if residual < 1e-8 {
                        converged += 1;
                        assert!(
                            congruence_check(fw.config(), &q),
                            "non-congruent realization for n={n} dim={dim} ambient={ambient}"
                        );
                    }
                }
            }
        }
    }

    let cycle = square_cycle();
    let results = perturbation_flex_search(&cycle, 2, 100, 0.01, 99).unwrap();
    let escapes = results
        .iter()
        .filter(|(q, residual)| *residual < 1e-8 && !congruence_check(cycle.config(), q))
        .count();
    assert!(escapes > 0, "the flexible cycle must reach a non-congruent realization");

    let dt = t0.elapsed();
    println!(
        "acceptance 5: pass ({converged} converged realizations all congruent; \
         flexible cycle escaped {escapes} times; {dt:?})"
    );
}

#[test]
fn acceptance_6_classification_fixtures() {
    // (a) the square cycle flexes
    let report = superstability_test(&square_cycle()).unwrap();
    assert!(report.m >= 1, "square cycle: {report:?}");
    assert_eq!(report.classification, Classification::Flexible);

    // (b) two triangles on a shared base: no flex, no selfstress
    let config = Configuration::from_points_2d(&[
        [0.0, 0.0],
        [2.0, 0.0],
        [1.0, 1.2],
        [1.0, -0.8],
    ])
    .unwrap();
    let fw = Framework::new(config, [[0, 1], [0, 2], [1, 2], [0, 3], [1, 3]]).unwrap();
    let report = superstability_test(&fw).unwrap();
    assert_eq!((report.m, report.s), (0, 0), "shared-base triangles: {report:?}");
    assert_eq!(report.classification, Classification::InfRigid);

    // (c) quadrilateral rim triangulated from an interior hub: no flex
    let config = Configuration::from_points_2d(&[
        [0.0, 0.0],
        [2.1, 0.1],
        [2.3, 2.2],
        [-0.2, 1.9],
        [1.05, 1.0],
    ])
    .unwrap();
    let fw = Framework::new(
        config,
        [[0, 1], [1, 2], [2, 3], [0, 3], [0, 4], [1, 4], [2, 4], [3, 4]],
    )
    .unwrap();
    let report = superstability_test(&fw).unwrap();
    assert_eq!(report.m, 0, "hub-triangulated rim: {report:?}");

    // (d) constructed framework on a convex pentagon: full certificate
    let pentagon: Vec<[f64; 2]> = (0..5)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 5.0;
            [a.cos(), a.sin()]
        })
        .collect();
    let config = Configuration::from_points_2d(&pentagon).unwrap();
    let (fw, _) = build_grunbaum_2d(&config).unwrap();
    let report = superstability_test(&fw).unwrap();
    assert!(report.superstable, "convex pentagon: {report:?}");

    // (e) constructed framework on a nonconvex 5-point set: full certificate
    let config = Configuration::from_points_2d(&[
        [0.0, 0.0],
        [3.0, 0.0],
        [3.4, 2.8],
        [0.3, 2.5],
        [1.2, 0.9],
    ])
    .unwrap();
    let (fw, _) = build_grunbaum_2d(&config).unwrap();
    let report = superstability_test(&fw).unwrap();
    assert!(report.superstable, "nonconvex 5-point set: {report:?}");

    println!("acceptance 6: pass (five fixtures classified as expected)");
}

#[test]
fn acceptance_7_edge_budget_versus_lateration() {
    let n = 1000;
    let planar = lateration_edge_count(n, 2) as f64 / minimal_edge_count(n, 2) as f64;
    let spatial = lateration_edge_count(n, 3) as f64 / minimal_edge_count(n, 3) as f64;
    assert_eq!(lateration_edge_count(n, 2), 2994);
    assert_eq!(minimal_edge_count(n, 2), 1998);
    assert_eq!(lateration_edge_count(n, 3), 3990);
    assert_eq!(minimal_edge_count(n, 3), 2995);
    assert!((planar - 1.5).abs() < 0.005, "planar ratio {planar}");
    assert!((spatial - 4.0 / 3.0).abs() < 0.005, "spatial ratio {spatial}");
    println!(
        "acceptance 7: pass (edge budget ratios {planar:.4} and {spatial:.4} against laterative builds)"
    );
}

#[test]
fn acceptance_8_deterministic_outputs() {
    let mut files = 0usize;
    for dim in [2, 3] {
        for config in corpus(dim).into_iter().step_by(10) {
            let render_once = || {
                let (fw, fan) = build(&config);
                let report = superstability_test(&fw).unwrap();
                let stress = certified_stress(&fw).unwrap();
                let file =
                    FrameworkFile::from_parts(&fw, Some(&fan), Some(&report), Some(&stress));
                let svg = render_svg(&file).unwrap().svg;
                (file.to_json(), svg)
            };
            let (json_a, svg_a) = render_once();
            let (json_b, svg_b) = render_once();
            assert_eq!(json_a, json_b, "framework bytes differ (dim={dim})");
            assert_eq!(svg_a, svg_b, "svg bytes differ (dim={dim})");
            files += 1;
        }
    }

    let script: Vec<Event> = vec![
        Event::Add { id: 3, point: vec![0.0, 0.0] },
        Event::Add { id: 1, point: vec![2.0, 0.2] },
        Event::Add { id: 7, point: vec![1.1, 1.8] },
        Event::Add { id: 4, point: vec![-0.4, 1.1] },
        Event::Move { id: 7, point: vec![1.0, 2.1] },
        Event::Add { id: 9, point: vec![0.9, 0.7] },
        Event::Remove { id: 1 },
    ];
    let replay = || {
        let mut session = Session::new(2).unwrap();
        for ev in &script {
            session.apply_event(ev.clone()).unwrap();
        }
        session
    };
    let a = replay();
    let b = replay();
    assert_eq!(a.history(), b.history());
    assert_eq!(a.current(), b.current());
    assert_eq!(a.current().unwrap().framework.edges(), b.current().unwrap().framework.edges());

    println!(
        "acceptance 8: pass ({files} corpus entries rebuilt byte-identically; session replay exact)"
    );
}
