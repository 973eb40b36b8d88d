//! Small numerical kernels: binomial and Poisson tails, adaptive Simpson.

/// `ln C(n, k)` for integer arguments, exact to rounding for the small `n` of witness trees.
fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// `P(X >= k_min)` for `X ~ Binomial(n, p)`, summed term by term in log space.
pub fn binomial_upper_tail(n: usize, k_min: usize, p: f64) -> f64 {
    if k_min == 0 {
        return 1.0;
    }
    if k_min > n {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let total: f64 = (k_min..=n)
        .map(|k| (ln_binomial(n, k) + k as f64 * ln_p + (n - k) as f64 * ln_q).exp())
        .sum();
    total.clamp(0.0, 1.0)
}

/// `sum_{k=0}^{count-1} e^{-lambda} lambda^k / k!`, i.e. `P(N < count)` for `N ~ Poisson(lambda)`.
pub fn poisson_lower_sum(lambda: f64, count: usize) -> f64 {
    if count == 0 {
        return 0.0;
    }
    if lambda <= 0.0 {
        return 1.0;
    }
    let ln_lambda = lambda.ln();
    let mut ln_fact = 0.0;
    let mut total = 0.0;
    for k in 0..count {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        total += (k as f64 * ln_lambda - lambda - ln_fact).exp();
    }
    total.min(1.0)
}

/// `P(N >= count)` for `N ~ Poisson(lambda)`.
///
/// When the lower sum is close to one the complement is taken from the
/// upper tail directly to avoid cancellation.
pub fn poisson_upper_tail(lambda: f64, count: usize) -> f64 {
    if count == 0 {
        return 1.0;
    }
    if lambda <= 0.0 {
        return 0.0;
    }
    let lower = poisson_lower_sum(lambda, count);
    if lower < 0.5 {
        return 1.0 - lower;
    }
    // upper tail: sum from `count` until terms vanish
    let ln_lambda = lambda.ln();
    let mut ln_term = count as f64 * ln_lambda - lambda - ln_factorial(count);
    let mut total = 0.0;
    let mut k = count;
    loop {
        let term = ln_term.exp();
        total += term;
        k += 1;
        ln_term += ln_lambda - (k as f64).ln();
        if (k as f64) > lambda && term < total * 1e-17 {
            break;
        }
    }
    total.min(1.0)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 48)
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_edges() {
        assert_eq!(binomial_upper_tail(6, 0, 0.3), 1.0);
        assert_eq!(binomial_upper_tail(6, 7, 0.3), 0.0);
        assert_eq!(binomial_upper_tail(6, 1, 0.0), 0.0);
        assert_eq!(binomial_upper_tail(6, 6, 1.0), 1.0);
        assert!((binomial_upper_tail(6, 6, 0.5) - 1.0 / 64.0).abs() < 1e-15);
        // P(X >= 1) = 1 - q^n
        assert!((binomial_upper_tail(4, 1, 0.2) - (1.0 - 0.8f64.powi(4))).abs() < 1e-14);
    }

    #[test]
    fn poisson_small_cases() {
        assert!((poisson_lower_sum(2.0, 1) - (-2.0f64).exp()).abs() < 1e-15);
        assert!((poisson_upper_tail(2.0, 1) - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert_eq!(poisson_upper_tail(0.0, 3), 0.0);
        assert_eq!(poisson_upper_tail(5.0, 0), 1.0);
        // complement consistency in the cancellation regime
        let lam = 30.0;
        assert!((poisson_upper_tail(lam, 10) + poisson_lower_sum(lam, 10) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_polynomials_and_trig() {
        let cubic = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12);
        assert!((cubic - 0.0).abs() < 1e-12);
        let sine = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-10);
        assert!((sine - 2.0).abs() < 1e-9);
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0, 1e-9), 0.0);
    }
}
