use cover_core::coverage::wkmeans_cost_points;
use cover_core::density::polygon_moments;
use cover_core::geometry::nearest_site;
use cover_core::{
    coverage_cost, wkmeans_cost, CellPartition, ConvexPolygon, Density, DensityField, GaussianTerm,
    Point, Quadrature,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Midpoint rule on an `n × n` grid over `[x0, x1] × [y0, y1]`.
fn midpoint(n: usize, (x0, y0): (f64, f64), (x1, y1): (f64, f64), f: impl Fn(Point) -> f64) -> f64 {
    let (hx, hy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum += f(Point::new(
                x0 + (i as f64 + 0.5) * hx,
                y0 + (j as f64 + 0.5) * hy,
            ));
        }
    }
    sum * hx * hy
}

fn paper_field() -> DensityField {
    DensityField::paper()
        .normalize(&ConvexPolygon::unit_square())
        .unwrap()
}

#[test]
fn single_gaussian_normalization() {
    let raw = DensityField::new(vec![GaussianTerm::new(1.0, 0.4, 0.6, 10.0, 10.0)]).unwrap();
    let a = raw
        .normalize(&ConvexPolygon::unit_square())
        .unwrap()
        .normalization();
    let expected = midpoint(2000, (0.0, 0.0), (1.0, 1.0), |q| raw.eval_raw(q));
    assert!((a - expected).abs() / expected < 1e-6, "{a} vs {expected}");
}

#[test]
fn cell_moments_match_midpoint_sums() {
    let field = paper_field();
    let cell = ConvexPolygon::rectangle(Point::new(0.2, 0.2), Point::new(0.3, 0.3)).unwrap();
    let m = polygon_moments(&field, &cell, Quadrature::default());
    let lo = (0.2, 0.2);
    let hi = (0.3, 0.3);
    let w = midpoint(1000, lo, hi, |q| field.eval(q));
    let mx = midpoint(1000, lo, hi, |q| q.x * field.eval(q));
    let my = midpoint(1000, lo, hi, |q| q.y * field.eval(q));
    let c = Point::new(mx / w, my / w);
    let j = midpoint(1000, lo, hi, |q| q.dist_sq(c) * field.eval(q));
    assert!((m.weight - w).abs() / w < 1e-7);
    assert!(m.centroid().dist(c) < 1e-8);
    assert!(
        (m.central_inertia() - j).abs() / j < 1e-6,
        "{} vs {j}",
        m.central_inertia()
    );
}

#[test]
fn moments_are_additive_over_a_triangulation() {
    let field = paper_field();
    let quad = Quadrature::new(5);
    let poly = ConvexPolygon::regular(Point::new(0.5, 0.5), 0.45, 9).unwrap();
    let whole = polygon_moments(&field, &poly, quad);
    let r = Point::new(0.1, 0.9);
    let (mut w, mut first, mut inertia) = (0.0, Point::new(0.0, 0.0), 0.0);
    let v = poly.vertices();
    for i in 1..v.len() - 1 {
        let tri = ConvexPolygon::new(vec![v[0], v[i], v[i + 1]]).unwrap();
        let m = polygon_moments(&field, &tri, quad);
        w += m.weight;
        first += m.first_moment;
        inertia += m.inertia_about(r);
    }
    assert!((w - whole.weight).abs() < 1e-12);
    assert!((first - whole.first_moment).norm() < 1e-12);
    assert!((inertia - whole.inertia_about(r)).abs() < 1e-12);
}

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x1417),
        failure_persistence: None,
        ..Config::default()
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn parallel_axis_identity(
        cx in 0.05..0.95f64, cy in 0.05..0.95f64, radius in 0.01..0.3f64, n in 3usize..12,
        rx in -2.0..3.0f64, ry in -2.0..3.0f64,
    ) {
        let field = paper_field();
        let poly = ConvexPolygon::regular(Point::new(cx, cy), radius, n).unwrap();
        let m = polygon_moments(&field, &poly, Quadrature::default());
        let r = Point::new(rx, ry);
        let lhs = m.inertia_about(r);
        let rhs = m.central_inertia() + m.weight * r.dist_sq(m.centroid());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1.0));
    }

    #[test]
    fn moments_follow_translation(dx in -3.0..3.0f64, dy in -3.0..3.0f64) {
        let field = paper_field();
        let v = Point::new(dx, dy);
        let poly = ConvexPolygon::regular(Point::new(0.4, 0.3), 0.2, 6).unwrap();
        let a = polygon_moments(&field, &poly, Quadrature::default());
        let b = polygon_moments(&field.translated(v), &poly.translated(v), Quadrature::default());
        prop_assert!((a.weight - b.weight).abs() < 1e-12);
        prop_assert!(((a.centroid() + v) - b.centroid()).norm() < 1e-9);
        prop_assert!((a.central_inertia() - b.central_inertia()).abs() < 1e-12);
    }
}

#[test]
fn coverage_cost_matches_riemann_sum() {
    let field = paper_field();
    let sq = ConvexPolygon::unit_square();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..2 {
        let sites: Vec<Point> = (0..10)
            .map(|_| Point::new(rng.random(), rng.random()))
            .collect();
        let h = coverage_cost(&sites, &field, &sq, Quadrature::default()).unwrap();
        let riemann = midpoint(2000, (0.0, 0.0), (1.0, 1.0), |q| {
            q.dist_sq(sites[nearest_site(&sites, q)]) * field.eval(q)
        });
        assert!((h - riemann).abs() < 1e-5, "{h} vs {riemann}");
    }
}

#[test]
fn wkmeans_cost_matches_double_loop() {
    let field = paper_field();
    let sq = ConvexPolygon::unit_square();
    let cells = CellPartition::build(&sq, 0.1, &field, Quadrature::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let centers: Vec<Point> = (0..7)
        .map(|_| Point::new(rng.random(), rng.random()))
        .collect();
    let mut naive = 0.0;
    for cell in &cells.cells {
        let mut best = f64::INFINITY;
        for c in &centers {
            let d = (cell.centroid.x - c.x).powi(2) + (cell.centroid.y - c.y).powi(2);
            if d < best {
                best = d;
            }
        }
        naive += cell.weight * best;
    }
    assert!((wkmeans_cost(&centers, &cells) - naive).abs() < 1e-12);
    let (p, w) = cells.candidate_arrays();
    assert!((wkmeans_cost_points(&centers, &p, &w) - naive).abs() < 1e-12);
}

#[test]
fn grid_cells_carry_the_whole_mass() {
    let field = paper_field();
    let domain = ConvexPolygon::regular(Point::new(0.5, 0.5), 0.5, 5).unwrap();
    let field = field.normalize(&domain).unwrap();
    for eps in [0.1, 0.05, 0.037] {
        let cells = CellPartition::build(&domain, eps, &field, Quadrature::default()).unwrap();
        assert!((cells.total_area() - domain.area()).abs() < 1e-12);
        assert!((cells.total_weight() - 1.0).abs() < 1e-7);
    }
}
