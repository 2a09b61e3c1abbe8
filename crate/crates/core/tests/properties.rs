use proptest::prelude::*;

use wffd::bounds::{
    ccdp_outer, inner_antipodal, inner_mode, inner_narrow, inner_tin_closed, inner_tin_exact,
    outer_antipodal, outer_fat, outer_mode, outer_narrow, outer_strong, report_antipodal,
    report_ccdp, report_fat, report_mode, report_narrow, report_strong, report_symmetric, Theorem,
};
use wffd::fading::{
    canonicalize, make_antipodal, make_fat_tail, make_geometric, make_strong_set,
    make_truncated_gaussian, make_uniform, DistSpec, FadingDistribution,
};
use wffd::gauss::{
    expected_r_gamma, expected_r_gamma_adaptive, optimize_rho, rho_from_pair, UxSign,
};
use wffd::oracle::{build_channel, gp_capacity_bruteforce, policy_rate, rate_from_joint, GpPolicy};
use wffd::verify::{gap_suite, sandwich_suite, SweepGrid};

fn power() -> impl Strategy<Value = f64> {
    (-2.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

fn gain() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0).prop_map(|e| 10f64.powf(e))
}

fn sign() -> impl Strategy<Value = UxSign> {
    prop_oneof![Just(UxSign::Plus), Just(UxSign::Minus)]
}

/// A pair `(ρ_XS, ρ_US)` with `ρ_XS·ρ_US ≤ 0` and radicand in `[1e−6, 1 − 1e−6]`.
fn rho_pair() -> impl Strategy<Value = (f64, f64)> {
    (-0.99f64..0.99, -0.99f64..0.99)
        .prop_map(|(x, u)| if x * u > 0.0 { (x, -u) } else { (x, u) })
        .prop_filter("radicand in range", |(x, u)| {
            let r = 1.0 - (x - u) * (x - u);
            (1e-6..=1.0 - 1e-6).contains(&r)
        })
}

fn canonical_law() -> impl Strategy<Value = FadingDistribution> {
    prop_oneof![
        Just(make_antipodal()),
        (0.5f64..0.95).prop_map(|q| make_geometric(q).unwrap()),
        (3u32..10, 3u32..12).prop_map(|(c, m)| make_fat_tail(c as f64, m).unwrap()),
        (-1.0f64..3.0, 0.2f64..2.0, 0.2f64..2.0).prop_map(|(m, h, s)| {
            let d = make_truncated_gaussian(m, h, s).unwrap();
            canonicalize(1.0, &d, 0.0, 1.0).unwrap().1
        }),
    ]
}

fn dist_spec() -> impl Strategy<Value = DistSpec> {
    prop_oneof![
        Just(DistSpec::Antipodal {}),
        (0.5f64..0.99).prop_map(|q| DistSpec::Geometric { q }),
        (2.01f64..10.0, 3u32..9).prop_map(|(c, m)| DistSpec::StrongSet { c, m }),
        (2.5f64..10.0, 3u32..12).prop_map(|(c, m)| DistSpec::FatTail { c, m }),
        (-5.0f64..5.0).prop_map(|m| DistSpec::PointMass { m }),
        (-2.0f64..2.0, 0.1f64..3.0, 0.1f64..3.0).prop_map(|(center, halfwidth, sigma)| {
            DistSpec::TruncatedGaussian {
                center,
                halfwidth,
                sigma,
            }
        }),
        (-2.0f64..2.0, 0.1f64..3.0).prop_map(|(lo, w)| DistSpec::Uniform { lo, hi: lo + w }),
        (0.1f64..2.0, 1.1f64..5.0).prop_map(|(lo, r)| DistSpec::LogUniform { lo, hi: lo * r }),
        prop::collection::vec((-3.0f64..3.0, 0.05f64..1.0), 1..5).prop_map(|pts| {
            let total: f64 = pts.iter().map(|p| p.1).sum();
            DistSpec::Discrete {
                points: pts.into_iter().map(|(v, p)| [v, p / total]).collect(),
            }
        }),
    ]
}

proptest! {
    #[test]
    fn antipodal_sandwich_and_gap(p in power(), c in gain()) {
        let r = report_antipodal(p, c).unwrap();
        prop_assert!(r.inner_bpcu <= r.outer_bpcu + 1e-12);
        prop_assert!(r.gap_realized_bpcu <= 1.0 + 1e-9);
    }

    #[test]
    fn mode_sandwich_on_geometric(p in power(), c in gain(), q in 0.5f64..0.95) {
        let d = make_geometric(q).unwrap();
        let outer = outer_mode(p, c, &d, 0.0).unwrap().rate;
        let inner = inner_mode(p, c, &d, 0.0).unwrap().rate;
        prop_assert!(inner <= outer + 1e-12, "inner {inner} outer {outer}");
    }

    #[test]
    fn narrow_sandwich(p in power(), c in 1.01f64..10.0, s in 0.05f64..0.5) {
        let d = make_truncated_gaussian(1.0, 1.0, s).unwrap();
        let m = d.mean();
        if let Ok(outer) = outer_narrow(p, c, &d, m, 1.0) {
            let inner = inner_narrow(p, c, &d, m).unwrap();
            prop_assert!(inner <= outer.rate + 1e-12);
        }
    }

    #[test]
    fn rates_are_never_negative(p in power(), c in gain(), q in 0.5f64..0.95, m in 3u32..7) {
        let law = make_geometric(q).unwrap();
        let mut reports = vec![
            report_antipodal(p, c).unwrap(),
            report_ccdp(p, c).unwrap(),
            report_mode(p, c, &law, None).unwrap(),
            report_symmetric(p, c, &make_uniform(-1.0, 1.0).unwrap()).unwrap(),
        ];
        if c > 2.0 {
            reports.push(report_strong(p, c, &make_strong_set(c, m).unwrap()).unwrap());
            reports.extend(report_fat(p, c));
        }
        if c > 1.0 {
            reports.extend(report_narrow(p, c, &make_truncated_gaussian(1.0, 1.0, 0.2).unwrap()));
        }
        for r in reports {
            prop_assert!(r.inner_bpcu >= 0.0 && r.outer_bpcu >= 0.0, "{r:?}");
            prop_assert!(r.inner_bpcu.is_finite() && r.outer_bpcu.is_finite());
        }
        prop_assert!(inner_antipodal(p, c).rate >= 0.0);
    }

    #[test]
    fn outer_bounds_fall_with_gain(p in power(), c in gain(), k in 1.0f64..4.0, q in 0.5f64..0.95) {
        let c2 = c * k;
        prop_assert!(outer_antipodal(p, c2).rate <= outer_antipodal(p, c).rate + 1e-12);
        prop_assert!(ccdp_outer(p, c2).rate <= ccdp_outer(p, c).rate + 1e-12);
        let d = make_geometric(q).unwrap();
        prop_assert!(
            outer_mode(p, c2, &d, 0.0).unwrap().rate <= outer_mode(p, c, &d, 0.0).unwrap().rate + 1e-12
        );
        if c > 2.0 {
            prop_assert!(outer_fat(p, c2).unwrap() <= outer_fat(p, c).unwrap() + 1e-12);
        }
    }

    #[test]
    fn strong_outer_falls_with_gain(p in power(), c in 2.01f64..10.0, k in 1.0f64..3.0, m in 3u32..9) {
        let c2 = c * k;
        let lo = outer_strong(p, c, &make_strong_set(c, m).unwrap(), 1.0).unwrap().rate;
        let hi = outer_strong(p, c2, &make_strong_set(c2, m).unwrap(), 1.0).unwrap().rate;
        prop_assert!(hi <= lo + 1e-12, "{lo} -> {hi}");
    }

    #[test]
    fn closed_tin_below_exact(p in power(), c in gain(), d in canonical_law()) {
        let exact = inner_tin_exact(p, c, &d).unwrap();
        let closed = inner_tin_closed(p, c, d.mean());
        prop_assert!(closed <= exact + 1e-12, "closed {closed} exact {exact}");
    }

    #[test]
    fn antipodal_boundary_jumps(p in power()) {
        let jump = |b: f64| outer_antipodal(p, b * (1.0 - 1e-12)).rate - outer_antipodal(p, b * (1.0 + 1e-12)).rate;
        // The unit-gain jump lies in [½, 1), not below ½.
        let unit = 1.0 - 0.5 * ((p + 2.0) / (p + 1.0)).log2();
        prop_assert!((jump(1.0) - unit).abs() <= 1e-9, "{} vs {unit}", jump(1.0));
        let j = jump((p + 1.0).sqrt());
        prop_assert!((0.0..=0.5 + 1e-9).contains(&j), "{j}");
    }

    #[test]
    fn canonicalize_is_idempotent(g in -5.0f64..5.0, d in canonical_law(), var in 0.1f64..10.0) {
        let (g1, d1) = canonicalize(g, &d, 0.3, var).unwrap();
        prop_assert!((d1.variance() - 1.0).abs() <= 1e-9);
        let (g2, d2) = canonicalize(g1, &d1, 0.0, 1.0).unwrap();
        prop_assert!((g2 - g1).abs() <= 1e-9 * g1.abs().max(1.0));
        prop_assert!((d2.mean() - d1.mean()).abs() <= 1e-9);
        prop_assert!((d2.variance() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn pairs_land_on_the_manifold((xs, us) in rho_pair(), s in sign()) {
        let r = rho_from_pair(xs, us, s).unwrap();
        prop_assert!(r.manifold_residual() <= 1e-12);
        prop_assert!(r.reflected().manifold_residual() <= 1e-12);
    }

    #[test]
    fn spec_json_round_trip(spec in dist_spec()) {
        let back = DistSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(back, spec);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reflection_leaves_expectation_unchanged(
        (xs, us) in rho_pair(), s in sign(), p in 0.1f64..100.0, c in 0.0f64..3.0
    ) {
        let r = rho_from_pair(xs, us, s).unwrap();
        let a = expected_r_gamma_adaptive(&r, p, c).unwrap();
        let b = expected_r_gamma_adaptive(&r.reflected(), p, c).unwrap();
        prop_assume!(a.is_finite());
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{a} vs {b}");
        let h = expected_r_gamma(&r, p, c, 64).unwrap().value;
        let hr = expected_r_gamma(&r.reflected(), p, c, 64).unwrap().value;
        prop_assert!((h - hr).abs() <= 1e-12 * h.abs().max(1.0));
    }

    #[test]
    fn hermite_doubling_at_small_gain(
        i in -49i32..=49, j in -49i32..=49, s in sign(), p in 0.1f64..10.0, c in 0.0f64..0.5
    ) {
        let (xs, us) = (i as f64 * 0.02, j as f64 * 0.02);
        prop_assume!(xs * us <= 0.0);
        let rad = 1.0 - (xs - us) * (xs - us);
        prop_assume!((1e-6..=1.0 - 1e-6).contains(&rad));
        let e = expected_r_gamma(&rho_from_pair(xs, us, s).unwrap(), p, c, 64).unwrap();
        prop_assert!(e.converged, "{e:?}");
    }

    #[test]
    fn data_processing_on_fixed_policy(
        c in 0.0f64..2.0,
        maps in prop::collection::vec(0usize..3, 4),
        w in prop::collection::vec(0.01f64..1.0, 2),
    ) {
        let d = make_antipodal();
        let span = 8.0 + 2.0 * c;
        let coarse = build_channel(1.0, c, &d, 3, 2, 24, span).unwrap();
        let fine = build_channel(1.0, c, &d, 3, 2, 48, span).unwrap();
        let policy = GpPolicy {
            x_map: vec![vec![maps[0], maps[1]], vec![maps[2], maps[3]]],
            p_u_given_s: w.iter().map(|&v| vec![v, 1.0 - v]).collect(),
        };
        let lo = policy_rate(&coarse, &policy);
        let hi = policy_rate(&fine, &policy);
        prop_assert!(hi >= lo - 1e-6, "{lo} -> {hi}");
        prop_assert!((rate_from_joint(&fine, &policy) - hi).abs() <= 1e-9);
    }
}

/// Blahut–Arimoto for a discrete memoryless channel `w[x][y]`, in bits.
fn blahut_arimoto(w: &[Vec<f64>]) -> f64 {
    let nx = w.len();
    let ny = w[0].len();
    let mut px = vec![1.0 / nx as f64; nx];
    let mut capacity = 0.0;
    for _ in 0..10_000 {
        let qy: Vec<f64> = (0..ny)
            .map(|y| (0..nx).map(|x| px[x] * w[x][y]).sum())
            .collect();
        let d: Vec<f64> = (0..nx)
            .map(|x| {
                (0..ny)
                    .filter(|&y| w[x][y] > 0.0)
                    .map(|y| w[x][y] * (w[x][y] / qy[y]).log2())
                    .sum()
            })
            .collect();
        let lower: f64 = (0..nx).map(|x| px[x] * d[x]).sum();
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        capacity = lower;
        if upper - lower < 1e-12 {
            break;
        }
        let z: f64 = (0..nx).map(|x| px[x] * d[x].exp2()).sum();
        px = (0..nx).map(|x| px[x] * d[x].exp2() / z).collect();
    }
    capacity
}

#[test]
fn stateless_oracle_matches_blahut_arimoto() {
    for p in [0.5, 1.0, 4.0] {
        let ch = build_channel(p, 0.0, &make_antipodal(), 2, 2, 64, p.sqrt() + 7.0).unwrap();
        let w: Vec<Vec<f64>> = (0..2).map(|x| ch.transition(x, 0, 0).to_vec()).collect();
        let ba = blahut_arimoto(&w);
        let sol = gp_capacity_bruteforce(&ch, 2, 10, 1 << 40).unwrap();
        assert!(
            (sol.rate - ba).abs() <= 1e-6,
            "P = {p}: oracle {} vs BA {ba}",
            sol.rate
        );
    }
}

#[test]
fn oracle_is_deterministic() {
    let ch = build_channel(1.0, 1.0, &make_antipodal(), 3, 2, 32, 9.0).unwrap();
    let a = gp_capacity_bruteforce(&ch, 2, 6, 1 << 40).unwrap();
    let b = gp_capacity_bruteforce(&ch, 2, 6, 1 << 40).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gauss_optimum_grows_with_power() {
    for c in [0.5, 1.0] {
        let mut last = 0.0;
        for p in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let opt = optimize_rho(p, c).unwrap();
            assert!(opt.rho.manifold_residual() <= 1e-10);
            assert!(
                opt.rate >= last - 1e-6,
                "c = {c}, P = {p}: {} < {last}",
                opt.rate
            );
            last = opt.rate;
        }
    }
}

#[test]
fn certificates_are_reproducible() {
    let grid = SweepGrid::new(
        vec![0.1, 1.0, 10.0],
        vec![0.5, 1.5, 3.0],
        vec![DistSpec::Geometric { q: 0.5 }, DistSpec::Antipodal {}],
    )
    .unwrap();
    for t in [Theorem::Antipodal, Theorem::Mode] {
        let a = gap_suite(t, &grid).unwrap();
        let b = gap_suite(t, &grid).unwrap();
        assert!(a.same_outcome(&b));
        let s = sandwich_suite(t, &grid).unwrap();
        assert!(s.passed(), "{s:?}");
    }
    let sym = SweepGrid::new(
        vec![1.0],
        vec![0.5],
        vec![DistSpec::Uniform { lo: -1.0, hi: 1.0 }],
    )
    .unwrap();
    assert!(sandwich_suite(Theorem::SymmetricCont, &sym)
        .unwrap()
        .passed());
}
