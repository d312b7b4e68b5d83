use orgsync_core::landscape::{draw_contributions, CorrelatedUniforms};
use orgsync_core::seed::SimRng;
use orgsync_core::stats::{ks_uniform, pearson};
use orgsync_core::{BitString, InteractionMatrix, LandscapeSet, NkcsParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const REGIMES: [(usize, usize, usize); 2] = [(3, 0, 0), (2, 2, 2)];

fn landscape(kcs: (usize, usize, usize), seed: u64) -> LandscapeSet {
    LandscapeSet::from_seed(NkcsParams::new(5, 4, kcs.0, kcs.1, kcs.2), true, 0.9, seed, 26).unwrap()
}

/// Row index rebuilt from the matrix cells alone: own bit first, then the
/// coupled columns of the own block ascending, then each partner block (in
/// slot order) ascending.
fn oracle_row_index(im: &InteractionMatrix, x: &BitString, task: usize) -> usize {
    let n = im.params().tasks_per_agent;
    let m = im.size();
    let own_block = task / n;
    let mut cols: Vec<usize> = (own_block * n..(own_block + 1) * n)
        .filter(|&j| j != task && im.get(task, j))
        .collect();
    for &q in im.partners(own_block) {
        cols.extend((q * n..(q + 1) * n).filter(|&j| im.get(task, j)));
    }
    assert_eq!(cols.len() + 1, (0..m).filter(|&j| im.get(task, j)).count());
    let mut idx = x.get(task) as usize;
    for j in cols {
        idx = idx * 2 + x.get(j) as usize;
    }
    idx
}

#[test]
fn row_index_matches_matrix_oracle() {
    for kcs in REGIMES {
        for seed in 0..5 {
            let ls = landscape(kcs, seed);
            let im = ls.interactions();
            let mut rng = SimRng::seed_from_u64(seed);
            for _ in 0..100 {
                let x = BitString::from_word(rng.random(), 20);
                for task in 0..20 {
                    let idx = oracle_row_index(im, &x, task);
                    assert_eq!(im.row_index(&x, task), idx);
                    assert_eq!(ls.contribution(&x, task), ls.table(task)[idx]);
                }
            }
        }
    }
}

#[test]
fn performance_means_match_direct_recomputation() {
    for kcs in REGIMES {
        let ls = landscape(kcs, 3);
        let mut rng = SimRng::seed_from_u64(99);
        for _ in 0..100 {
            let x = BitString::from_word(rng.random(), 20);
            let contributions: Vec<f64> = (0..20).map(|i| ls.contribution(&x, i)).collect();
            for p in 0..5 {
                let direct = contributions[p * 4..(p + 1) * 4].iter().sum::<f64>() / 4.0;
                assert!((ls.agent_performance(&x, p) - direct).abs() < 1e-15);
            }
            let flat = contributions.iter().sum::<f64>() / 20.0;
            assert!((ls.org_performance(&x) - flat).abs() < 1e-14);
        }
    }
}

#[test]
fn no_coupling_contribution_depends_only_on_own_bit() {
    let ls = LandscapeSet::from_seed(NkcsParams::new(5, 4, 0, 0, 0), true, 0.9, 1, 26).unwrap();
    let mut rng = SimRng::seed_from_u64(1);
    for _ in 0..100 {
        let x = BitString::from_word(rng.random(), 20);
        for i in 0..20 {
            for j in (0..20).filter(|&j| j != i) {
                assert_eq!(ls.contribution(&x, i), ls.contribution(&x.flipped(j), i));
            }
        }
    }
}

#[test]
fn global_max_dominates_and_normalizes() {
    for kcs in REGIMES {
        for seed in 0..3 {
            let ls = landscape(kcs, seed);
            let argmax = ls.global_argmax();
            assert_eq!(ls.org_performance(&argmax), ls.global_max());
            assert_eq!(ls.normalized_performance(&argmax).unwrap(), 1.0);
            let mut rng = SimRng::seed_from_u64(seed + 1000);
            for _ in 0..1000 {
                let x = BitString::from_word(rng.random(), 20);
                assert!(ls.org_performance(&x) <= ls.global_max());
                assert!(ls.normalized_performance(&x).unwrap() <= 1.0);
            }
        }
    }
}

#[test]
fn global_max_equals_brute_force_on_small_instance() {
    // M = 12: compare the Gray-code walk against a plain loop.
    let ls = LandscapeSet::from_seed(NkcsParams::new(3, 4, 2, 1, 2), true, 0.5, 8, 26).unwrap();
    let mut best = (f64::NEG_INFINITY, BitString::zeros(12));
    for w in 0..1u64 << 12 {
        let x = BitString::from_word(w, 12);
        let v = ls.org_performance(&x);
        if v > best.0 || (v == best.0 && x < best.1) {
            best = (v, x);
        }
    }
    assert_eq!(ls.global_max(), best.0);
    assert_eq!(ls.global_argmax(), best.1);
}

#[test]
fn identical_seeds_reproduce_landscapes() {
    for kcs in REGIMES {
        let a = landscape(kcs, 17);
        let b = landscape(kcs, 17);
        assert_eq!(a.interactions(), b.interactions());
        assert_eq!(a.values(), b.values());
        assert_eq!(a.global_argmax(), b.global_argmax());
        let c = landscape(kcs, 18);
        assert_ne!(a.values(), c.values());
    }
}

#[test]
fn copula_sampling_oracle_at_benchmark_correlation() {
    // Check the latent-correlation adjustment directly on the sampler before
    // relying on it for landscapes.
    let sampler = CorrelatedUniforms::new(0.9).unwrap();
    let mut rng = SimRng::seed_from_u64(2024);
    let mut draw = [0.0; 2];
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for _ in 0..200_000 {
        sampler.sample_into(&mut rng, &mut draw);
        xs.push(draw[0]);
        ys.push(draw[1]);
    }
    let r = pearson(&xs, &ys);
    assert!((r - 0.9).abs() < 0.02, "pearson {r}");
    // Without the adjustment the uniforms would be noticeably less correlated.
    assert!((CorrelatedUniforms::normal_correlation(0.9) - 0.9080).abs() < 1e-3);
}

#[test]
fn homologous_contributions_hit_target_correlation() {
    let im = InteractionMatrix::build(NkcsParams::new(5, 4, 2, 2, 2), true, &mut SimRng::seed_from_u64(0)).unwrap();
    let mut rng = SimRng::seed_from_u64(1);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    while xs.len() < 100_000 {
        let v = draw_contributions(&im, 0.9, &mut rng).unwrap();
        let rows = 128;
        for a in 0..4 {
            for row in 0..rows {
                xs.push(v[a * rows + row]);
                ys.push(v[(3 * 4 + a) * rows + row]);
            }
        }
    }
    let r = pearson(&xs, &ys);
    assert!((r - 0.9).abs() < 0.02, "pearson {r}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contributions_ignore_uncoupled_flips(seed in 0u64..20, word in any::<u64>(), i in 0usize..20, j in 0usize..20) {
        let ls = landscape((2, 2, 2), seed);
        let x = BitString::from_word(word, 20);
        if !ls.interactions().get(i, j) {
            prop_assert_eq!(ls.contribution(&x, i), ls.contribution(&x.flipped(j), i));
        }
    }

    #[test]
    fn tables_stay_in_unit_interval(seed in 0u64..1000, rho in 0.0f64..=1.0) {
        let im = InteractionMatrix::build(NkcsParams::new(5, 4, 2, 2, 2), true, &mut SimRng::seed_from_u64(seed)).unwrap();
        let v = draw_contributions(&im, rho, &mut SimRng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(v.len(), 20 * 128);
        prop_assert!(v.iter().all(|u| (0.0..=1.0).contains(u)));
    }
}

#[test]
fn marginals_are_uniform() {
    let im = InteractionMatrix::build(NkcsParams::new(5, 4, 3, 0, 0), true, &mut SimRng::seed_from_u64(5)).unwrap();
    let mut rng = SimRng::seed_from_u64(6);
    let mut pooled = Vec::new();
    while pooled.len() < 400_000 {
        pooled.extend(draw_contributions(&im, 0.9, &mut rng).unwrap());
    }
    let ks = ks_uniform(&pooled);
    assert!(ks < 0.01, "ks {ks}");
}
