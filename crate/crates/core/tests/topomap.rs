use std::collections::{HashSet, VecDeque};

use dbs_core::data::{euclidean_dissimilarity, generate_fcps, pairwise_euclidean, DissimilarityMatrix, FcpsName};
use dbs_core::grid::{GridConfig, GridPos, Torus};
use dbs_core::pswarm::{pswarm_project, Projection};
use dbs_core::topomap::{delaunay_torus, render_heightmap, u_heights, HeightClass};
use proptest::prelude::*;

fn projection(cfg: GridConfig, positions: Vec<GridPos>) -> Projection {
    Projection {
        grid: cfg,
        seed: 0,
        positions,
        epochs: Vec::new(),
    }
}

/// Two full-height stripes of points, far apart in input space, on a 20×24 grid.
fn two_blob_layout() -> (Projection, DissimilarityMatrix, usize) {
    let cfg = GridConfig::with_dims(20, 24, 4, 0.8).unwrap();
    let mut positions = Vec::new();
    let mut features = Vec::new();
    for (blob, col0) in [(0.0, 3), (1.0, 15)] {
        for r in (0..20).step_by(2) {
            for c in col0..col0 + 5 {
                positions.push(GridPos::new(r, c));
                features.push(vec![blob * 50.0 + (r as f64) * 0.1, (c - col0) as f64 * 0.1]);
            }
        }
    }
    let rows: Vec<&[f64]> = features.iter().map(|f| f.as_slice()).collect();
    (projection(cfg, positions), pairwise_euclidean(&rows).unwrap(), 50)
}

#[test]
fn ridge_separates_two_blobs() {
    let (proj, d, split) = two_blob_layout();
    let g = delaunay_torus(&proj, &d).unwrap();
    let map = render_heightmap(&proj, &u_heights(&g).unwrap());
    let torus = Torus::new(&proj.grid);
    let blob_b: HashSet<GridPos> = proj.positions[split..].iter().copied().collect();
    let low = |p: GridPos| map.class(p) < HeightClass::Hill;
    let mut seen: HashSet<GridPos> = proj.positions[..split].iter().copied().filter(|&p| low(p)).collect();
    assert!(!seen.is_empty(), "blob interior should be lowland");
    let mut queue: VecDeque<GridPos> = seen.iter().copied().collect();
    while let Some(p) = queue.pop_front() {
        assert!(!blob_b.contains(&p), "low path reaches the other blob at {p:?}");
        for q in torus.ring(p, 1) {
            if low(q) && seen.insert(q) {
                queue.push_back(q);
            }
        }
    }
}

#[test]
fn hepta_delaunay_graph_is_a_torus_triangulation() {
    let ds = generate_fcps(FcpsName::Hepta, 1);
    let d = euclidean_dissimilarity(&ds);
    let proj = pswarm_project(&d, 1).unwrap();
    let g = delaunay_torus(&proj, &d).unwrap();
    assert!(g.is_connected());
    let mut seen = HashSet::new();
    for &(a, b, w) in g.edges() {
        assert_ne!(a, b);
        assert!(seen.insert((a.min(b), a.max(b))), "duplicate edge {a}-{b}");
        assert_eq!(w, d.get(a, b));
    }
    // Euler characteristic 0: a triangulation of the torus has E = 3V.
    assert_eq!(g.edges().len(), 3 * g.len());
    assert!((0..g.len()).all(|v| g.degree(v) >= 3));
}

#[test]
fn heights_scale_and_map_is_invariant() {
    let ds = generate_fcps(FcpsName::Lsun3D, 2);
    let d = euclidean_dissimilarity(&ds);
    let proj = pswarm_project(&d, 2).unwrap();
    let gamma = 7.5;
    let d2 = d.scaled(gamma).unwrap();
    let h1 = u_heights(&delaunay_torus(&proj, &d).unwrap()).unwrap();
    let h2 = u_heights(&delaunay_torus(&proj, &d2).unwrap()).unwrap();
    for (a, b) in h1.iter().zip(&h2) {
        assert!((b - gamma * a).abs() <= 1e-12 * b.abs());
    }
    let m1 = render_heightmap(&proj, &h1);
    let m2 = render_heightmap(&proj, &h2);
    for (a, b) in m1.grid_heights.iter().zip(&m2.grid_heights) {
        assert!((a - b).abs() <= 1e-12);
    }
    assert_eq!(m1.classes, m2.classes);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_layouts_triangulate_and_normalize(seed in 0u64..1000, n in 8usize..40) {
        let cfg = GridConfig::with_dims(12, 16, 4, 0.7).unwrap();
        let mut cells: Vec<GridPos> = (0..12).flat_map(|r| (0..16).map(move |c| GridPos::new(r, c))).collect();
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        for i in (1..cells.len()).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            cells.swap(i, (x >> 33) as usize % (i + 1));
        }
        cells.truncate(n);
        let features: Vec<Vec<f64>> = cells.iter().enumerate().map(|(i, p)| vec![p.row as f64, p.col as f64, (i % 3) as f64]).collect();
        let rows: Vec<&[f64]> = features.iter().map(|f| f.as_slice()).collect();
        let d = pairwise_euclidean(&rows).unwrap();
        let proj = projection(cfg, cells);
        let g = delaunay_torus(&proj, &d).unwrap();
        prop_assert!(g.is_connected());
        let h = u_heights(&g).unwrap();
        let map = render_heightmap(&proj, &h);
        let (lo, hi) = map.grid_heights.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        prop_assert!(lo >= 0.0 && hi <= 1.0);
        prop_assert!(lo == 0.0 && (hi - 1.0).abs() < 1e-12 || hi == 0.0);
        prop_assert_eq!(map.grid_heights.len(), 12 * 16);
    }
}
