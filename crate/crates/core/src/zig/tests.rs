use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zigcast_testkit::{gamma_closed_form, integrate, lower_incomplete_gamma_by_quadrature};

use super::*;

fn params(p: f64, k: f64, theta: f64) -> ZigParams {
    ZigParams::new(p, k, theta).unwrap()
}

#[test]
fn link_at_origin() {
    let z = link_transform(RawParamTriple::new(0.0, 0.0, 0.0)).unwrap();
    assert_eq!(z.p(), 0.5);
    assert!((z.k() - 2f64.ln()).abs() < 1e-15);
    assert!((z.theta() - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn link_saturates_without_going_negative() {
    let z = link_transform(RawParamTriple::new(-40.0, 0.0, 0.0)).unwrap();
    assert!(z.p() >= 0.0 && z.p() < 1e-17);
}

#[test]
fn link_matches_high_precision_values() {
    // 30-digit evaluations of σ(1), ln(1+e), ln(1+e²)
    let z = link_transform(RawParamTriple::new(1.0, 1.0, 2.0)).unwrap();
    assert!((z.p() - 0.731_058_578_630_004_9).abs() < 1e-15);
    assert!((z.k() - 1.313_261_687_518_222_8).abs() < 1e-15);
    assert!((z.theta() - 2.126_928_011_042_972_5).abs() < 1e-15);
}

#[test]
fn link_rejects_non_finite() {
    let err = link_transform(RawParamTriple::new(f64::NAN, 0.0, 0.0)).unwrap_err();
    assert!(matches!(err, Error::InvalidInput(_)));
    assert!(link_transform(RawParamTriple::new(0.0, f64::INFINITY, 0.0)).is_err());
}

#[test]
fn log_pdf_examples() {
    let lp = zig_log_pdf(0.0, &params(0.25, 3.0, 9.0)).unwrap();
    assert!((lp - 0.25f64.ln()).abs() < 1e-15);
    let lp = zig_log_pdf(1.0, &params(0.0, 1.0, 1.0)).unwrap();
    assert!((lp + 1.0).abs() < 1e-14);

    // ln 0.7 + ln(x e^{-x/θ} / θ²) for k = 2, evaluated at 30 digits
    let lp = zig_log_pdf(2.5, &params(0.3, 2.0, 1.5)).unwrap();
    assert!((lp + 1.917_981_094_947_572_8).abs() < 1e-12);
}

#[test]
fn log_pdf_sentinels_and_domain() {
    assert_eq!(zig_log_pdf(0.0, &params(0.0, 2.0, 1.0)).unwrap(), f64::NEG_INFINITY);
    assert_eq!(zig_log_pdf(1.0, &params(1.0, 2.0, 1.0)).unwrap(), f64::NEG_INFINITY);
    assert!(matches!(zig_log_pdf(-1.0, &params(0.2, 2.0, 1.0)), Err(Error::Domain(_))));
}

#[test]
fn cdf_examples() {
    assert_eq!(zig_cdf(0.0, &params(0.4, 2.0, 1.0)).unwrap(), 0.4);
    for &(k, theta) in &[(0.5, 10.0), (3.0, 1.0), (20.0, 10.0)] {
        let f = zig_cdf(1e9, &params(0.1, k, theta)).unwrap();
        assert!((1.0 - f).abs() < 1e-9);
    }
    let f = zig_cdf(3.0, &params(0.2, 2.0, 1.5)).unwrap();
    assert!((f - 0.675_195_320_232_129_6).abs() < 1e-10);
    assert!(matches!(zig_cdf(-0.5, &params(0.2, 2.0, 1.5)), Err(Error::Domain(_))));
}

#[test]
fn mean_examples() {
    assert_eq!(zig_mean(&params(1.0, 4.0, 2.0)), 0.0);
    assert_eq!(zig_mean(&params(0.0, 2.0, 3.0)), 6.0);
    assert!((zig_mean(&params(0.3, 2.0, 1.5)) - 2.1).abs() < 1e-15);
}

#[test]
fn sample_all_zero_when_p_is_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let z = params(1.0, 2.0, 1.0);
    assert!((0..10_000).all(|_| zig_sample(&z, &mut rng) == 0.0));
}

#[test]
fn sample_is_deterministic_per_seed() {
    let z = params(0.3, 0.7, 2.0);
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..1000).map(|_| zig_sample(&z, &mut rng).to_bits()).collect::<Vec<_>>()
    };
    assert_eq!(draw(42), draw(42));
    assert_ne!(draw(42), draw(43));
}

fn monte_carlo_moments(z: &ZigParams, n: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let x = zig_sample(z, &mut rng);
        sum += x;
        sum_sq += x * x;
    }
    let mean = sum / n as f64;
    let var = sum_sq / n as f64 - mean * mean;
    (mean, var.sqrt())
}

#[test]
fn sample_mean_of_pure_gamma() {
    let n = 1_000_000;
    let (mean, sd) = monte_carlo_moments(&params(0.0, 2.0, 1.5), n, 7);
    assert!((mean - 3.0).abs() < 3.0 * sd / 1000.0, "mean {mean} sd {sd}");
}

#[test]
fn sample_mean_matches_analytic_mean_over_random_settings() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..20 {
        let z = params(
            rng.random_range(0.0..0.9),
            rng.random_range(0.2..8.0),
            rng.random_range(0.1..5.0),
        );
        let n = 1_000_000;
        let (mean, sd) = monte_carlo_moments(&z, n, 100 + i);
        let se = sd / (n as f64).sqrt();
        assert!((mean - zig_mean(&z)).abs() < 4.0 * se, "{z:?}: {mean} vs {}", zig_mean(&z));
    }
}

#[test]
fn mean_nll_examples() {
    let single = mean_nll(&[0.0], &[RawParamTriple::new(0.0, 0.3, -0.2)]).unwrap();
    assert!((single - 2f64.ln()).abs() < 1e-15);

    let raw = RawParamTriple::new(0.4, 1.1, -0.3);
    let one = mean_nll(&[1.7], &[raw]).unwrap();
    let two = mean_nll(&[1.7, 1.7], &[raw, raw]).unwrap();
    assert_eq!(one, two);

    let xs = [0.0, 2.5, 0.0, 0.1, 7.0];
    let raws: Vec<_> = [
        [0.5, 1.0, 2.0],
        [-1.0, 0.3, 0.7],
        [2.0, -0.5, 1.5],
        [0.0, 0.0, 0.0],
        [-3.0, 2.0, 1.0],
    ]
    .into_iter()
    .map(RawParamTriple::from)
    .collect();
    let expected: f64 = xs
        .iter()
        .zip(&raws)
        .map(|(&x, &r)| -zig_log_pdf(x, &link_transform(r).unwrap()).unwrap())
        .sum::<f64>()
        / 5.0;
    assert!((mean_nll(&xs, &raws).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn mean_nll_input_errors() {
    assert!(matches!(mean_nll(&[], &[]), Err(Error::InvalidInput(_))));
    let r = RawParamTriple::new(0.0, 0.0, 0.0);
    assert!(matches!(mean_nll(&[1.0, 2.0], &[r]), Err(Error::InvalidInput(_))));
}

#[test]
fn nll_gradient_matches_finite_differences() {
    let cases = [
        (0.0, [0.3, -0.2, 1.0]),
        (0.5, [-1.0, 0.7, 0.2]),
        (3.2, [0.8, 1.5, -0.4]),
        (12.0, [-2.0, -1.0, 2.5]),
    ];
    for (x, raw) in cases {
        let (_, grad) = nll_with_gradient(x, &RawParamTriple::from(raw));
        for i in 0..3 {
            let fd = zigcast_testkit::central_difference(
                |r| nll_with_gradient(x, &RawParamTriple::new(r[0], r[1], r[2])).0,
                &raw,
                i,
                1e-5,
            );
            assert!((fd - grad[i]).abs() < 1e-7 * fd.abs().max(1.0), "x={x} i={i}: {fd} vs {}", grad[i]);
        }
    }
}

#[test]
fn quantile_inverts_cdf() {
    let z = params(0.2, 2.0, 1.5);
    assert_eq!(zig_quantile(0.1, &z).unwrap(), 0.0);
    assert_eq!(zig_quantile(0.2, &z).unwrap(), 0.0);
    let x = zig_quantile(0.675_195_320_232_129_6, &z).unwrap();
    assert!((x - 3.0).abs() < 1e-8);
    let levels = [0.05, 0.25, 0.5, 0.75, 0.95, 0.999];
    let qs: Vec<f64> = levels.iter().map(|&q| zig_quantile(q, &z).unwrap()).collect();
    assert!(qs.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn incomplete_gamma_matches_quadrature_on_grid() {
    for &k in &[0.5, 1.0, 2.0, 5.0, 10.0] {
        let g = gamma_closed_form(k);
        for &z in &[0.1, 1.0, 5.0, 20.0] {
            let oracle = lower_incomplete_gamma_by_quadrature(k, z, g);
            let got = regularized_lower_incomplete_gamma(k, z).unwrap();
            assert!((got - oracle).abs() < 1e-8, "P({k}, {z}) = {got}, quadrature {oracle}");
        }
    }
}

/// p + ∫₀^∞ exp(log pdf) dx, with x = u^(1/k) for k < 1 so the integrand stays bounded.
fn total_mass(z: &ZigParams) -> f64 {
    let density = |x: f64| if x <= 0.0 { 0.0 } else { zig_log_pdf(x, z).unwrap().exp() };
    let upper = z.theta() * (z.k() + 60.0 + 20.0 * z.k().sqrt());
    let continuous = if z.k() < 1.0 {
        let m = 1.0 / z.k();
        integrate(
            |u| if u <= 0.0 { (1.0 - z.p()) / (z.theta().powf(z.k()) * ln_gamma(z.k()).exp()) * m }
                else { density(u.powf(m)) * m * u.powf(m - 1.0) },
            0.0,
            upper.powf(z.k()),
            1e-11,
        )
    } else {
        integrate(density, 0.0, upper, 1e-11)
    };
    z.p() + continuous
}

#[test]
fn density_normalizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let z = params(
            rng.random_range(0.0..1.0),
            rng.random_range(0.3..10.0),
            rng.random_range(0.1..5.0),
        );
        let mass = total_mass(&z);
        assert!((mass - 1.0).abs() < 1e-6, "{z:?} mass {mass}");
    }
}

proptest! {
    #[test]
    fn link_always_valid(a in -50.0..50.0f64, b in -50.0..50.0f64, c in -50.0..50.0f64) {
        let z = link_transform(RawParamTriple::new(a, b, c)).unwrap();
        prop_assert!((0.0..=1.0).contains(&z.p()));
        prop_assert!(z.k() > 0.0 && z.theta() > 0.0);
        prop_assert!(ZigParams::new(z.p(), z.k(), z.theta()).is_ok());
    }

    #[test]
    fn cdf_monotone_and_anchored(
        p in 0.0..1.0f64, k in 0.2..15.0f64, theta in 0.05..8.0f64,
        a in 0.0..40.0f64, b in 0.0..40.0f64,
    ) {
        let z = params(p, k, theta);
        prop_assert_eq!(zig_cdf(0.0, &z).unwrap(), p);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let f_lo = zig_cdf(lo, &z).unwrap();
        let f_hi = zig_cdf(hi, &z).unwrap();
        prop_assert!(f_lo <= f_hi + 1e-14);
        prop_assert!((0.0..=1.0).contains(&f_hi));
    }
}
