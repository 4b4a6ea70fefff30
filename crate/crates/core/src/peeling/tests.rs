use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geom::{dot, support_value};

fn pts2(p: &[[f64; 2]]) -> PointSet {
    PointSet::from_points(2, p.iter()).unwrap()
}

fn grid3() -> PointSet {
    let mut v = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            v.push([i as f64, j as f64]);
        }
    }
    pts2(&v)
}

fn generic() -> PeelOptions {
    PeelOptions {
        backend: HullBackend::Generic,
        ..PeelOptions::default()
    }
}

#[test]
fn interior_point_excluded() {
    let x = pts2(&[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [0.5, 0.5]]);
    assert_eq!(extreme_points(&x).unwrap(), vec![0, 1, 2]);
}

#[test]
fn grid_corners_only() {
    // indices: i*3 + j; corners are 0, 2, 6, 8
    assert_eq!(extreme_points(&grid3()).unwrap(), vec![0, 2, 6, 8]);
    assert_eq!(extreme_points_2d_oracle(&grid3()).unwrap(), vec![0, 2, 6, 8]);
}

#[test]
fn line_extremes() {
    let x = PointSet::from_points(1, [[-1.0], [0.0], [1.0]]).unwrap();
    assert_eq!(extreme_points(&x).unwrap(), vec![0, 2]);
}

#[test]
fn oracle_collinear_and_hexagon() {
    let x = pts2(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
    assert_eq!(extreme_points_2d_oracle(&x).unwrap(), vec![0, 2]);
    let hex: Vec<[f64; 2]> = (0..6)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 3.0;
            [t.cos(), t.sin()]
        })
        .collect();
    assert_eq!(extreme_points_2d_oracle(&pts2(&hex)).unwrap(), (0..6).collect::<Vec<_>>());
    assert_eq!(extreme_points(&pts2(&hex)).unwrap(), (0..6).collect::<Vec<_>>());
    let cube = PointSet::from_points(3, [[0.0, 0.0, 0.0]]).unwrap();
    assert!(extreme_points_2d_oracle(&cube).is_err());
}

#[test]
fn random_planar_agrees_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let coords: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x = PointSet::from_flat(2, coords).unwrap();
    assert_eq!(extreme_points(&x).unwrap(), extreme_points_2d_oracle(&x).unwrap());
}

#[test]
fn empty_and_duplicates_rejected() {
    let empty = PointSet::new(2).unwrap();
    assert_eq!(extreme_points(&empty), Err(Error::Empty));
    assert_eq!(peel(&empty), Err(Error::Empty));
    assert_eq!(layer_number(&empty), Ok(0));
    let dup = pts2(&[[0.1, 0.1], [0.5, 0.2], [0.1, 0.1]]);
    assert!(matches!(peel(&dup), Err(Error::Duplicate { .. })));
}

#[test]
fn single_point_one_layer() {
    let x = pts2(&[[0.2, 0.3]]);
    assert_eq!(layer_number(&x).unwrap(), 1);
    assert_eq!(peel_with(&x, &generic()).unwrap().layer_number(), 1);
}

#[test]
fn grid_peels_in_three_layers() {
    for opts in [PeelOptions::default(), generic()] {
        let l = peel_with(&grid3(), &opts).unwrap();
        assert_eq!(
            l.layers(),
            &[vec![0, 2, 6, 8], vec![1, 3, 5, 7], vec![4]],
            "{opts:?}"
        );
        assert_eq!(l.depth(4), 3);
    }
}

#[test]
fn segment_layer_count() {
    for n in 1..=12usize {
        let pts: Vec<[f64; 1]> = (0..=2 * n).map(|i| [i as f64 / n as f64 - 1.0]).collect();
        let x = PointSet::from_points(1, &pts).unwrap();
        assert_eq!(layer_number(&x).unwrap(), n + 1);
        assert_eq!(peel_with(&x, &generic()).unwrap().layer_number(), n + 1);
    }
}

#[test]
fn convex_position_is_one_layer() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in 2..=4 {
        let x = PointSet::from_points(d, (0..40).map(|_| crate::rng::unit_vector(&mut rng, d)))
            .unwrap();
        assert_eq!(peel_with(&x, &generic()).unwrap().layer_number(), 1);
    }
}

#[test]
fn cube_with_face_centres() {
    // vertices of [-1,1]^3, centres of faces and the origin
    let mut v = Vec::new();
    for s in 0..8 {
        v.push([
            if s & 1 == 0 { -1.0 } else { 1.0 },
            if s & 2 == 0 { -1.0 } else { 1.0 },
            if s & 4 == 0 { -1.0 } else { 1.0 },
        ]);
    }
    for k in 0..3 {
        for s in [-1.0, 1.0] {
            let mut c = [0.0; 3];
            c[k] = s;
            v.push(c);
        }
    }
    v.push([0.0, 0.0, 0.0]);
    let x = PointSet::from_points(3, &v).unwrap();
    assert_eq!(extreme_points(&x).unwrap(), (0..8).collect::<Vec<_>>());
    let l = peel(&x).unwrap();
    assert_eq!(l.layer_number(), 3);
    assert_eq!(l.layers()[1], (8..14).collect::<Vec<_>>());
    assert_eq!(l.layers()[2], vec![14]);
}

#[test]
fn layering_validation() {
    assert!(Layering::from_layers(3, vec![vec![0, 1], vec![2]]).is_ok());
    assert!(Layering::from_layers(3, vec![vec![0, 1]]).is_err());
    assert!(Layering::from_layers(3, vec![vec![0, 1], vec![1, 2]]).is_err());
    assert!(Layering::from_layers(2, vec![vec![0, 1], vec![]]).is_err());
}

fn random_set(rng: &mut ChaCha8Rng, d: usize, n: usize) -> PointSet {
    PointSet::from_points(d, (0..n).map(|_| crate::rng::ball_point(rng, d))).unwrap()
}

#[test]
fn layers_partition_and_hulls_shrink() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in 2..=4 {
        let x = random_set(&mut rng, d, 300);
        let l = peel_with(&x, &generic()).unwrap();
        let mut seen = vec![false; x.len()];
        for layer in l.layers() {
            for &i in layer {
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        // hull of later survivors lies inside the hull of earlier survivors
        let mut alive: Vec<usize> = (0..x.len()).collect();
        let dirs: Vec<Vec<f64>> = (0..100).map(|_| crate::rng::unit_vector(&mut rng, d)).collect();
        let mut prev: Option<Vec<f64>> = None;
        for layer in l.layers() {
            let sub = x.subset(&alive);
            let h: Vec<f64> = dirs.iter().map(|u| support_value(&sub, u).unwrap()).collect();
            if let Some(p) = &prev {
                for (a, b) in h.iter().zip(p) {
                    assert!(*a <= *b + EPS_GEOM);
                }
            }
            prev = Some(h);
            alive.retain(|i| !layer.contains(i));
        }
        let max = l.max_layer_size();
        assert!(l.layer_number() >= x.len().div_ceil(max));
    }
}

#[test]
fn generic_and_planar_backends_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let n = rng.random_range(3..300);
        let x = random_set(&mut rng, 2, n);
        let fast = peel(&x).unwrap();
        assert_eq!(fast, peel_with(&x, &generic()).unwrap());
        assert_eq!(fast, peel_with_oracle(&x, EPS_GEOM).unwrap());
    }
}

#[test]
fn extreme_points_have_separating_directions() {
    // every reported vertex is the unique maximiser of some direction
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let x = random_set(&mut rng, 3, 400);
    let ext = extreme_points(&x).unwrap();
    let all: Vec<usize> = (0..x.len()).collect();
    for &v in &ext {
        let others: Vec<usize> = all.iter().copied().filter(|&i| i != v).collect();
        match nearest_in_hull(&x, &others, x.point(v), Stop::Converge) {
            Outcome::Converged {
                distance,
                direction: Some(u),
            } => {
                assert!(distance > EPS_GEOM);
                let sv = dot(&u, x.point(v));
                assert!(others.iter().all(|&i| dot(&u, x.point(i)) < sv));
            }
            other => panic!("{other:?}"),
        }
    }
    for i in all.iter().filter(|i| !ext.contains(i)) {
        let others: Vec<usize> = all.iter().copied().filter(|&j| j != *i).collect();
        assert!(matches!(
            nearest_in_hull(&x, &others, x.point(*i), Stop::Decide(EPS_GEOM)),
            Outcome::Inside
        ));
    }
}
