use proptest::prelude::*;
use tiktv::rng::{seeded, standard_normal_vec};
use tiktv::robust_stats::*;

#[test]
fn mad_is_consistent_for_gaussian_samples() {
    let v = standard_normal_vec(&mut seeded(31), 100_000);
    let m = mad(&v).unwrap();
    assert!((m - 1.0).abs() <= 0.02, "mad = {m}");
}

#[test]
fn documented_values() {
    assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
    assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
    assert_eq!(median(&[5.0]).unwrap(), 5.0);
    assert!(median(&[]).is_err());
    assert_eq!(mad(&[2.0; 7]).unwrap(), 0.0);
    assert!((mad(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap() - 1.4826).abs() < 1e-15);

    let g = [1.0, 2.0, 3.0, 4.0, 100.0];
    let s = gradient_stats(&g, &g, 2.5).unwrap();
    assert!((s.z[4] - 97.0 / 1.4826).abs() < 1e-12);
    assert_eq!(s.normal_mask, vec![true, true, true, true, false]);
    assert_eq!(s.nrm_inf, 4.0);
    assert_eq!(s.phi, s.g2_inf - s.nrm_inf);
}

fn stats_with(g2_inf: f64, nrm_inf: f64) -> GradientStats {
    // a gradient whose normal part peaks at nrm_inf, and a g2 peaking at g2_inf
    let g = [nrm_inf, 0.0, 0.0, 0.0];
    let g2 = [g2_inf, 0.0, 0.0, 0.0];
    let s = gradient_stats(&g, &g2, 2.5).unwrap();
    assert_eq!(s.nrm_inf, nrm_inf);
    assert_eq!(s.g2_inf, g2_inf);
    s
}

#[test]
fn beta_update_documented_values() {
    assert_eq!(beta_update(1.0, &stats_with(3.0, 1.0)).unwrap(), 1.5);
    assert_eq!(beta_update(1.0, &stats_with(1.0, 3.0)).unwrap(), 0.5);
    assert_eq!(beta_update(7.0, &stats_with(2.0, 2.0)).unwrap(), 7.0);
    assert!(beta_update(0.0, &stats_with(2.0, 2.0)).is_err());
}

proptest! {
    #[test]
    fn stationary_exactly_at_balance(beta in 1e-6f64..1e6, a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
        let balanced = stats_with(a, a);
        prop_assert_eq!(beta_update(beta, &balanced).unwrap(), beta);
        if a != b {
            let s = stats_with(a, b);
            let next = beta_update(beta, &s).unwrap();
            prop_assert!(next != beta);
            if a > b { prop_assert!(next > beta) } else { prop_assert!(next < beta) }
            prop_assert!(next > 0.0);
        }
    }

    #[test]
    fn classification_is_scale_invariant(
        g in prop::collection::vec(-10.0f64..10.0, 5..60), c in 1e-3f64..1e3, tau in 0.5f64..4.0,
    ) {
        let s1 = gradient_stats(&g, &g, tau).unwrap();
        let gc: Vec<f64> = g.iter().map(|x| x * c).collect();
        let s2 = gradient_stats(&gc, &gc, tau).unwrap();
        prop_assert_eq!(&s1.normal_mask, &s2.normal_mask);
        for (a, b) in s1.z.iter().zip(&s2.z) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn stats_invariants(g in prop::collection::vec(-5.0f64..5.0, 1..80), tau in 0.1f64..5.0) {
        let g2: Vec<f64> = g.iter().map(|x| 0.5 * x).collect();
        let s = gradient_stats(&g, &g2, tau).unwrap();
        for i in 0..g.len() {
            prop_assert_eq!(s.normal_mask[i], s.z[i].abs() <= tau);
        }
        let masked = g.iter().zip(&s.normal_mask).filter(|(_, m)| **m).map(|(x, _)| x.abs()).fold(None, |a: Option<f64>, x| Some(a.map_or(x, |a| a.max(x))));
        match masked {
            Some(v) => prop_assert_eq!(s.nrm_inf, v),
            None => prop_assert!(s.normal_set_empty),
        }
        prop_assert_eq!(s.phi, s.g2_inf - s.nrm_inf);
        prop_assert!(s.mad_g >= 0.0);
    }
}
