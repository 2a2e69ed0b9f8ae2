//! Independent numerical oracles for the zigcast test suites.
//!
//! Nothing here shares code with the library under test: quadrature is plain
//! adaptive Simpson, derivatives are central differences, and the gamma
//! function values needed by the oracles are closed forms.

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Γ(k) for the half-integer and integer shapes used in the oracle grids.
pub fn gamma_closed_form(k: f64) -> f64 {
    let twice = (2.0 * k).round();
    assert!((twice - 2.0 * k).abs() < 1e-12 && k > 0.0, "no closed form for {k}");
    let twice = twice as u64;
    if twice % 2 == 0 {
        (1..twice / 2).map(|i| i as f64).product()
    } else {
        // Γ(n + 1/2) = (2n)! / (4^n n!) · √π
        let n = (twice - 1) / 2;
        let mut g = std::f64::consts::PI.sqrt();
        for i in 0..n {
            g *= i as f64 + 0.5;
        }
        g
    }
}

/// Regularized lower incomplete gamma P(k, z) by direct quadrature.
///
/// For k < 1 the substitution t = u^(1/k) removes the endpoint singularity.
pub fn lower_incomplete_gamma_by_quadrature(k: f64, z: f64, gamma_k: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let integral = if k < 1.0 {
        integrate(|u| (-u.powf(1.0 / k)).exp() / k, 0.0, z.powf(k), 1e-14)
    } else {
        integrate(|t| t.powf(k - 1.0) * (-t).exp(), 0.0, z, 1e-14)
    };
    integral / gamma_k
}

/// Central finite difference of `f` at `x` along coordinate `i`.
pub fn central_difference<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], i: usize, h: f64) -> f64 {
    let mut probe = x.to_vec();
    probe[i] = x[i] + h;
    let up = f(&probe);
    probe[i] = x[i] - h;
    let down = f(&probe);
    (up - down) / (2.0 * h)
}

/// Relative error with a floor on the denominator so that gradients which are
/// zero on both sides compare as equal.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    let denom = analytic.abs().max(numeric.abs()).max(floor);
    (analytic - numeric).abs() / denom
}

/// Linear-interpolation quantile of an already sorted slice, by definition.
pub fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_and_exponentials() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-12) - 9.0).abs() < 1e-10);
        let e = integrate(|t| t * (-t).exp(), 0.0, 2.0, 1e-14);
        assert!((e - (1.0 - 3.0 * (-2.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn closed_form_gamma() {
        assert_eq!(gamma_closed_form(1.0), 1.0);
        assert_eq!(gamma_closed_form(5.0), 24.0);
        assert!((gamma_closed_form(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((gamma_closed_form(2.5) - 1.329_340_388_179_137).abs() < 1e-14);
    }

    #[test]
    fn half_shape_quadrature() {
        // P(1/2, z) = erf(√z); erf(1) = 0.8427007929497149
        let p = lower_incomplete_gamma_by_quadrature(0.5, 1.0, gamma_closed_form(0.5));
        assert!((p - 0.842_700_792_949_714_9).abs() < 1e-12);
    }
}
