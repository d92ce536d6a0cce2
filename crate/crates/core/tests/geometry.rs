use cover_core::geometry::{max_neighbor_distance, nearest_site, voronoi_partition};
use cover_core::{ConvexPolygon, Point};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn sites(max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..=max)
        .prop_map(|v| v.into_iter().map(Point::from).collect())
}

/// Distinct sites; near-duplicates are rejected by the partition.
fn distinct(sites: &[Point]) -> bool {
    sites
        .iter()
        .enumerate()
        .all(|(i, a)| sites[..i].iter().all(|b| a.dist(*b) > 1e-6))
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn cells_tile_the_domain(sites in sites(100)) {
        prop_assume!(distinct(&sites));
        let sq = ConvexPolygon::unit_square();
        let part = voronoi_partition(&sites, &sq).unwrap();
        prop_assert_eq!(part.cells.len(), sites.len());
        let area: f64 = part.cells.iter().map(|c| c.area()).sum();
        prop_assert!((area - 1.0).abs() < 1e-9, "area {}", area);
        for (i, c) in part.cells.iter().enumerate() {
            prop_assert!(c.contains(sites[i], 1e-9));
        }
    }

    #[test]
    fn translation_moves_cells(sites in sites(20), dx in -5.0..5.0f64, dy in -5.0..5.0f64) {
        prop_assume!(distinct(&sites));
        let v = Point::new(dx, dy);
        let sq = ConvexPolygon::unit_square();
        let a = voronoi_partition(&sites, &sq).unwrap();
        let moved: Vec<Point> = sites.iter().map(|&p| p + v).collect();
        let b = voronoi_partition(&moved, &sq.translated(v)).unwrap();
        for (ca, cb) in a.cells.iter().zip(&b.cells) {
            prop_assert!((ca.area() - cb.area()).abs() < 1e-9);
            prop_assert!(((ca.centroid() + v) - cb.centroid()).norm() < 1e-9);
        }
    }
}

#[test]
fn probes_fall_in_their_nearest_cell() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let domain = ConvexPolygon::regular(Point::new(0.5, 0.5), 0.7, 7).unwrap();
    let sites: Vec<Point> = (0..30)
        .map(|_| loop {
            let p = Point::new(rng.random(), rng.random());
            if domain.contains(p, 0.0) {
                break p;
            }
        })
        .collect();
    let part = voronoi_partition(&sites, &domain).unwrap();
    let bb = domain.bounding_box();
    let mut probes = 0;
    while probes < 10_000 {
        let q = Point::new(
            bb.min.x + rng.random::<f64>() * bb.width(),
            bb.min.y + rng.random::<f64>() * bb.height(),
        );
        if !domain.contains(q, 0.0) {
            continue;
        }
        probes += 1;
        let i = nearest_site(&sites, q);
        assert!(
            part.cells[i].contains(q, 1e-9),
            "probe {q:?} not in cell {i}"
        );
    }
}

#[test]
fn neighbor_distance_matches_brute_force() {
    // Two cells are neighbors when a point just inside the domain sees both
    // sites at (numerically) equal distance and no other site closer.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let sq = ConvexPolygon::unit_square();
    for _ in 0..20 {
        let sites: Vec<Point> = (0..8)
            .map(|_| Point::new(rng.random(), rng.random()))
            .collect();
        let part = voronoi_partition(&sites, &sq).unwrap();
        let n = 400;
        let mut expected = 0.0f64;
        for gi in 0..n {
            for gj in 0..n {
                let q = Point::new((gi as f64 + 0.5) / n as f64, (gj as f64 + 0.5) / n as f64);
                let mut d: Vec<(f64, usize)> = sites
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.dist(q), i))
                    .collect();
                d.sort_by(|a, b| a.0.total_cmp(&b.0));
                // within half a grid diagonal of the shared boundary
                if d[1].0 - d[0].0 < 1.0 / n as f64 {
                    expected = expected.max(sites[d[0].1].dist(sites[d[1].1]));
                }
            }
        }
        let got = max_neighbor_distance(&part, &sites);
        assert!(got >= expected - 1e-12, "{got} < {expected}");
        // every reported pair really shares an edge
        for &(i, j) in &part.neighbor_pairs {
            let shared = part.cells[i]
                .vertices()
                .iter()
                .filter(|v| part.cells[j].contains(**v, 1e-9))
                .count();
            assert!(shared >= 2, "pair ({i}, {j}) shares {shared} vertices");
        }
    }
}

#[test]
fn cell_areas_agree_with_point_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let sq = ConvexPolygon::unit_square();
    let sites: Vec<Point> = (0..10)
        .map(|_| Point::new(rng.random(), rng.random()))
        .collect();
    let part = voronoi_partition(&sites, &sq).unwrap();
    let n = 200_000;
    let mut counts = vec![0usize; sites.len()];
    for _ in 0..n {
        counts[nearest_site(&sites, Point::new(rng.random(), rng.random()))] += 1;
    }
    for (c, cell) in counts.iter().zip(&part.cells) {
        let p = cell.area();
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((*c as f64 / n as f64 - p).abs() < 5.0 * sigma);
    }
}
