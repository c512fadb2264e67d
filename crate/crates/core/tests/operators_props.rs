use autov_core::autov::published_operator;
use autov_core::invariance::{check_scale, check_translation};
use autov_core::numerics::{random_orthogonal, RandomStream};
use autov_core::operators::{
    de_mutate, fep_mutate, sbx, sbx_with_betas, FepOperator, FepState, OperatorConfig,
    OperatorRegistry, SbxParams,
};
use autov_core::problems::Bounds;
use proptest::prelude::*;

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, dim)
}

fn parents(arity: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=12).prop_flat_map(move |d| prop::collection::vec(vector(d), arity))
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn every_registered_operator_replays_bit_identically(seed in any::<u64>(), dim in 1usize..=10) {
        let registry = OperatorRegistry::with_builtins();
        let cfg = OperatorConfig { matrix: Some(published_operator()), ..Default::default() };
        let bounds = Bounds::uniform(dim, -5.0, 5.0).unwrap();
        let mut inputs = RandomStream::new(seed);
        for name in registry.names() {
            let op = registry.create(name, &cfg).unwrap();
            let ps: Vec<Vec<f64>> = (0..op.arity()).map(|_| bounds.sample(&mut inputs)).collect();
            let refs: Vec<&[f64]> = ps.iter().map(Vec::as_slice).collect();
            let mut s = RandomStream::new(seed).split(name);
            let snap = s.snapshot();
            let a = op.vary(&refs, &bounds, &mut s).unwrap();
            s.restore(snap);
            let b = op.vary(&refs, &bounds, &mut s).unwrap();
            let bits = |v: &Vec<Vec<f64>>| -> Vec<u64> { v.iter().flatten().map(|x| x.to_bits()).collect() };
            prop_assert_eq!(bits(&a), bits(&b), "{}", name);
        }
    }

    #[test]
    fn sbx_preserves_parent_mean(ps in parents(2), seed in any::<u64>(), betas_seed in any::<u64>()) {
        let (x1, x2) = (&ps[0], &ps[1]);
        let (o1, o2) = sbx(x1, x2, &SbxParams::default(), &mut RandomStream::new(seed)).unwrap();
        let mid = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| (p + q) / 2.0).collect() };
        prop_assert!(close(&mid(&o1, &o2), &mid(x1, x2), 1e-12));
        let mut s = RandomStream::new(betas_seed);
        let betas: Vec<f64> = (0..x1.len()).map(|_| s.uniform_in(-5.0, 5.0)).collect();
        let (o1, o2) = sbx_with_betas(x1, x2, &betas).unwrap();
        prop_assert!(close(&mid(&o1, &o2), &mid(x1, x2), 1e-12));
    }

    #[test]
    fn de_mutate_equivariant(ps in parents(3), f in 0.0f64..2.0, b in -100.0f64..100.0,
                             a in prop::sample::select(vec![-100.0, -0.5, 0.01, 3.0, 1e2]), seed in any::<u64>()) {
        let dim = ps[0].len();
        let base = de_mutate(&ps[0], &ps[1], &ps[2], f).unwrap();
        let shifted: Vec<Vec<f64>> = ps.iter().map(|x| x.iter().map(|v| v + b).collect()).collect();
        let t = de_mutate(&shifted[0], &shifted[1], &shifted[2], f).unwrap();
        let want: Vec<f64> = base.iter().map(|v| v + b).collect();
        prop_assert!(t.iter().zip(&want).all(|(x, y)| (x - y).abs() < 1e-12 * (1.0 + b.abs() + 10.0 * f)));
        let scaled: Vec<Vec<f64>> = ps.iter().map(|x| x.iter().map(|v| a * v).collect()).collect();
        let s = de_mutate(&scaled[0], &scaled[1], &scaled[2], f).unwrap();
        prop_assert!(s.iter().zip(&base).all(|(x, y)| (x / a - y).abs() < 1e-12 * (10.0 + 10.0 * f)));
        let m = random_orthogonal(dim, &mut RandomStream::new(seed)).unwrap();
        let r = de_mutate(&m.apply(&ps[0]), &m.apply(&ps[1]), &m.apply(&ps[2]), f).unwrap();
        let want = m.apply(&base);
        prop_assert!(r.iter().zip(&want).all(|(x, y)| (x - y).abs() < 1e-12 * (10.0 + 10.0 * f) * dim as f64));
    }

    #[test]
    fn fep_translation_equivariant(x in (1usize..=12).prop_flat_map(vector), b in -100.0f64..100.0, seed in any::<u64>()) {
        let state = FepState::new(x.len(), 3.0).unwrap();
        let (o, _) = fep_mutate(&x, &state, &mut RandomStream::new(seed)).unwrap();
        let shifted: Vec<f64> = x.iter().map(|v| v + b).collect();
        let (t, _) = fep_mutate(&shifted, &state, &mut RandomStream::new(seed)).unwrap();
        prop_assert!(t.iter().zip(&o).all(|(p, q)| (p - b - q).abs() < 1e-12 * (1.0 + b.abs() + q.abs())));
    }
}

#[test]
fn fep_is_not_scale_equivariant() {
    let op = FepOperator { initial_eta: 3.0 };
    let bounds = Bounds::uniform(4, -10.0, 10.0).unwrap();
    let x = [1.0, -2.0, 0.5, 3.0];
    let t = check_translation(&op, &[&x], &bounds, 7.0, &mut RandomStream::new(1)).unwrap();
    assert!(t < 1e-9);
    let s = check_scale(&op, &[&x], &bounds, 10.0, &mut RandomStream::new(1)).unwrap();
    assert!(s > 1e-3, "{s}");
}
