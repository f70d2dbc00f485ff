use cubeconn::analysis::{bracket_sets, Analyzer, ScanConfig, Verdict};
use cubeconn::cellset::CellSet;
use cubeconn::chessboard::{random_lipschitz_field, separating_level, steinhaus_witness, Labeling};
use cubeconn::field::{Expr, ExprField, ScalarField, VertexField};
use cubeconn::grid::{FaceId, GridFace, GridSpec, Sign};
use cubeconn::interval::Interval;
use cubeconn::synthesis::{build_function, evaluate, validate_spec, ConnSepSpec, PrescribedSet};
use cubeconn::topology::{components, connects, separates};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid_and_set(max_n: usize, max_k: usize) -> impl Strategy<Value = CellSet> {
    (1..=max_n, 1..=max_k).prop_flat_map(|(n, k)| {
        let spec = GridSpec::new(n, k).unwrap();
        prop::collection::vec(any::<bool>(), spec.cell_count()).prop_map(move |bits| CellSet::from_fn(spec, |l| bits[l]))
    })
}

fn set_and_superset() -> impl Strategy<Value = (CellSet, CellSet)> {
    (1..=3usize, 1..=4usize).prop_flat_map(|(n, k)| {
        let spec = GridSpec::new(n, k).unwrap();
        let c = spec.cell_count();
        (prop::collection::vec(any::<bool>(), c), prop::collection::vec(any::<bool>(), c)).prop_map(move |(a, b)| {
            let s = CellSet::from_fn(spec, |l| a[l]);
            let t = s.union(&CellSet::from_fn(spec, |l| b[l]));
            (s, t)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intersection_dim_is_symmetric_and_faces_are_shared(n in 1..=4usize, k in 1..=4usize, a in any::<u64>(), b in any::<u64>()) {
        let spec = GridSpec::new(n, k).unwrap();
        let (p, q) = (spec.cell_at(a as usize % spec.cell_count()), spec.cell_at(b as usize % spec.cell_count()));
        let d = spec.intersection_dim(&p, &q).unwrap();
        prop_assert_eq!(d, spec.intersection_dim(&q, &p).unwrap());
        prop_assert_eq!(d == n as isize, p == q);
        match spec.shared_face(&p, &q).unwrap() {
            Some(f) => {
                prop_assert_eq!(f.dimension() as isize, d);
                prop_assert!(f.is_subface_of(&GridFace::of_cell(&p)) && f.is_subface_of(&GridFace::of_cell(&q)));
            }
            None => prop_assert_eq!(d, -1),
        }
    }

    #[test]
    fn connects_is_monotone((s, t) in set_and_superset(), d in 0..=3usize) {
        let n = s.spec().n();
        let d = d.min(n);
        for i in 1..=n {
            if connects(&s, i, d).unwrap().is_some() {
                prop_assert!(connects(&t, i, d).unwrap().is_some());
            }
            if separates(&s, i).unwrap().is_some() {
                prop_assert!(separates(&t, i).unwrap().is_some());
            }
        }
    }

    #[test]
    fn witnesses_verify_and_match_components(s in grid_and_set(3, 4)) {
        let spec = s.spec();
        for i in 1..=spec.n() {
            let chain = connects(&s, i, 0).unwrap();
            let spanning = components(&s, 0).unwrap().iter().any(|c| {
                c.iter().any(|x| spec.touches_face(x, FaceId::new(i, Sign::Minus)).unwrap())
                    && c.iter().any(|x| spec.touches_face(x, FaceId::new(i, Sign::Plus)).unwrap())
            });
            prop_assert_eq!(chain.is_some(), spanning);
            if let Some(c) = chain {
                prop_assert!(c.verify(&s).is_ok());
            }
            if let Some(cert) = separates(&s, i).unwrap() {
                prop_assert!(cert.verify(&s).is_ok());
            }
        }
    }

    #[test]
    fn separating_one_axis_connects_the_others(s in grid_and_set(3, 4)) {
        let n = s.spec().n();
        for j in 1..=n {
            if separates(&s, j).unwrap().is_some() {
                for i in (1..=n).filter(|&i| i != j) {
                    prop_assert!(connects(&s, i, 0).unwrap().is_some(), "separates {} but misses {}", j, i);
                }
            }
        }
    }

    #[test]
    fn planar_duality(k in 1..=6usize, bits in prop::collection::vec(any::<bool>(), 36)) {
        let spec = GridSpec::new(2, k).unwrap();
        let s = CellSet::from_fn(spec, |l| bits[l]);
        prop_assert_eq!(connects(&s, 1, 0).unwrap().is_some(), separates(&s, 2).unwrap().is_some());
        prop_assert_eq!(connects(&s, 2, 0).unwrap().is_some(), separates(&s, 1).unwrap().is_some());
    }

    #[test]
    fn random_labelings_have_witnesses(seed in any::<u64>(), k in 1..=4usize) {
        let spec = GridSpec::new(3, k).unwrap();
        let mut x = seed;
        let colors = (0..spec.cell_count()).map(|_| { x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (x >> 33) as u8 % 3 + 1 }).collect();
        let board = Labeling::new(spec, colors).unwrap();
        for generalized in [false, true] {
            let w = steinhaus_witness(&board, generalized).unwrap();
            prop_assert!(w.chain.verify(&board.class(w.axis)).is_ok());
            if generalized {
                prop_assert!(w.chain.link_dims.iter().all(|&d| d + 1 >= w.axis));
            }
        }
    }

    #[test]
    fn random_integer_fields_have_a_level(seed in any::<u64>(), n in 1..=3usize, k in 1..=4usize) {
        let spec = GridSpec::new(n, k).unwrap();
        let g = random_lipschitz_field(spec, &mut ChaCha8Rng::seed_from_u64(seed));
        for i in 1..=n {
            prop_assert!(separating_level(&g, i).is_ok());
        }
    }

    #[test]
    fn interval_ops_enclose_point_results(a in -1e3..1e3f64, b in -1e3..1e3f64, c in 1e-3..1e3f64) {
        let (x, y, z) = (Interval::point(a), Interval::point(b), Interval::point(c));
        prop_assert!((x + y).contains(a + b));
        prop_assert!((x - y).contains(a - b));
        prop_assert!((x * y).contains(a * b));
        prop_assert!(x.div(z).contains(a / c));
        prop_assert!(z.sqrt().contains(c.sqrt()));
    }
}

fn ramp_field(seed: u64) -> ScalarField {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=3);
    let terms = (1..=n)
        .map(|axis| {
            let mut t: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
            t.sort_by(f64::total_cmp);
            t.dedup();
            Expr::ramp(Expr::coord(axis), t.into_iter().map(|x| (x, rng.gen_range(-1.0..1.0))).collect())
        })
        .collect();
    ExprField::new(n, Expr::sum(terms)).unwrap().into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn certificates_never_conflict_and_refine(seed in any::<u64>()) {
        let g = ramp_field(seed);
        let n = g.dim();
        let sets = bracket_sets(&g, &ScanConfig::new((1..=n).collect(), vec![4, 8], 0.05)).unwrap();
        prop_assert!(sets.nesting_violations.is_empty(), "{:?}", sets.nesting_violations);
        for scan in &sets.scans {
            for lv in &scan.levels {
                for i in 0..n {
                    // Sep on axis i forces Conn on every other axis
                    if lv.sep[i] == Verdict::In {
                        for j in (0..n).filter(|&j| j != i) {
                            prop_assert!(lv.conn[j] != Verdict::Out);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn brackets_are_consistent(seed in any::<u64>(), p in -1.5..1.5f64) {
        let g = ramp_field(seed);
        let spec = GridSpec::new(g.dim(), 6).unwrap();
        let b = Analyzer::new(&g, spec).unwrap().bracket(p);
        prop_assert!(b.strictly_below.is_disjoint(&b.strictly_above));
        prop_assert!(b.strictly_below.is_subset(&b.below_outer));
        prop_assert!(b.strictly_above.is_subset(&b.above_outer));
        prop_assert!(b.exact.is_subset(&b.outer));
        // every cell is below, above or meets the fiber
        prop_assert!(b.below_outer.union(&b.above_outer).union(&b.outer).is_full());
    }

    #[test]
    fn vertex_ranges_enclose_the_interpolant(seed in any::<u64>(), k2 in 1..=7usize) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let native = GridSpec::new(2, 3).unwrap();
        let v = VertexField::new(native, (0..native.vertex_count()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let f: ScalarField = v.into();
        let spec = GridSpec::new(2, k2).unwrap();
        for cell in spec.cells() {
            let r = f.cell_range(spec, &cell).unwrap();
            for _ in 0..8 {
                let x: Vec<f64> = cell.index().iter().map(|&j| (j as f64 - rng.gen_range(0.0..1.0)) / k2 as f64).collect();
                prop_assert!(r.contains(f.eval(&x)), "{} outside {}", f.eval(&x), r);
            }
        }
    }
}

fn valid_specs() -> Vec<ConnSepSpec> {
    use PrescribedSet::{Empty, Interval as Iv, Point};
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    use rand::Rng;
    while out.len() < 40 {
        let n = rng.gen_range(2..=4);
        let mut draw = || {
            let a: f64 = (rng.gen_range(0.0..1.0f64) * 20.0).round() / 20.0;
            let b: f64 = (rng.gen_range(0.0..1.0f64) * 20.0).round() / 20.0;
            match rng.gen_range(0..3) {
                0 => Empty,
                1 => Point(a),
                _ if a == b => Point(a),
                _ => Iv(a.min(b), a.max(b)),
            }
        };
        let a: Vec<PrescribedSet> = (0..n).map(|_| draw()).collect();
        let b: Vec<PrescribedSet> = (0..n).map(|_| draw()).collect();
        let s = ConnSepSpec { n, a, b };
        if validate_spec(&s).unwrap().is_none() {
            out.push(s);
        }
    }
    out
}

#[test]
fn synthesized_fields_respect_their_spec() {
    for s in valid_specs() {
        let f = build_function(&s).unwrap();
        let g = f.scalar();
        let k = if s.n <= 2 { 32 } else { 8 };
        let sets = bracket_sets(&g, &ScanConfig::new((1..=s.n).collect(), vec![k], 0.05)).unwrap();
        for lv in &sets.finest().levels {
            for i in 0..s.n {
                for (v, set) in [(lv.conn[i], &s.a[i]), (lv.sep[i], &s.b[i])] {
                    match v {
                        Verdict::In => assert!(set.contains(lv.p), "{s:?}: level {} certified in", lv.p),
                        Verdict::Out => assert!(!set.contains(lv.p), "{s:?}: level {} certified out", lv.p),
                        Verdict::Undetermined => {}
                    }
                }
            }
        }
        // evaluation agrees with the field it exports
        let x = vec![0.37; s.n];
        assert_eq!(evaluate(&f, &x).unwrap(), g.eval(&x));
    }
}

#[test]
fn all_nonempty_conn_sets_share_a_point() {
    use PrescribedSet::Interval as Iv;
    let s = ConnSepSpec { n: 3, a: vec![Iv(0.2, 0.6), Iv(0.4, 0.9), Iv(0.3, 0.5)], b: vec![PrescribedSet::Empty; 3] };
    let g = build_function(&s).unwrap().scalar();
    let sets = bracket_sets(&g, &ScanConfig::new(vec![1, 2, 3], vec![32], 0.01)).unwrap();
    let common = sets.finest().levels.iter().any(|lv| lv.conn.iter().all(|&v| v == Verdict::In));
    assert!(common, "no level certified in Conn on every axis");
}
