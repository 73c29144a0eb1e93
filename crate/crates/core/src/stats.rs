//! Special functions and the few distributions the statistical measures need.

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 100_000;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower and upper incomplete gamma `(P(a, x), Q(a, x))`.
pub fn regularized_gamma(a: f64, x: f64) -> (f64, f64) {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return (0.0, 1.0);
    }
    let log_prefix = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        let p = (sum.ln() + log_prefix).exp().min(1.0);
        (p, 1.0 - p)
    } else {
        // modified Lentz
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        let q = (h.ln() + log_prefix).exp().min(1.0);
        (1.0 - q, q)
    }
}

/// `P[Poisson(λ) ≥ k]`.
pub fn poisson_sf(lambda: f64, k: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if k == 0 {
        return Ok(1.0);
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(regularized_gamma(k as f64, lambda).0)
}

/// `P[Poisson(λ) ≤ k]`.
pub fn poisson_cdf(lambda: f64, k: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(1.0);
    }
    Ok(regularized_gamma(k as f64 + 1.0, lambda).1)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_nan() || lambda < 0.0 {
        Err(Error::InvalidArgument(format!(
            "poisson rate must be non-negative, got {lambda}"
        )))
    } else {
        Ok(())
    }
}

pub fn erf(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let p = regularized_gamma(0.5, x * x).0;
    if x > 0.0 {
        p
    } else {
        -p
    }
}

pub fn erfc(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let (p, q) = regularized_gamma(0.5, x * x);
    if x > 0.0 {
        q
    } else {
        1.0 + p
    }
}

pub fn std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == f64::INFINITY {
        return 1.0;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `P[N(0,1) ≥ z]`, accurate in the upper tail.
pub fn std_normal_sf(z: f64) -> f64 {
    std_normal_cdf(-z)
}

pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "normal quantile needs 0 < p < 1, got {p}"
        )));
    }
    let mut z = acklam(p);
    // Halley steps against the accurate cdf
    for _ in 0..3 {
        let e = if p < 0.5 {
            std_normal_cdf(z) - p
        } else {
            (1.0 - p) - std_normal_sf(z)
        };
        let u = e / std_normal_pdf(z);
        if !u.is_finite() {
            break;
        }
        z -= u / (1.0 + 0.5 * z * u);
    }
    Ok(z)
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const LOW: f64 = 0.024_25;
    if p < LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Largest population handled in exact integer arithmetic.
const EXACT_HYPERGEOM_MAX: u64 = 120;

/// `P[H ≤ k]` for `H` hypergeometric: `draws` taken from `pop`, of which
/// `successes` are marked.
pub fn hypergeom_cdf(pop: u64, successes: u64, draws: u64, k: u64) -> Result<f64> {
    hypergeom_tails(pop, successes, draws, k).map(|t| t.0)
}

/// `P[H > k]`, computed directly rather than as `1 - cdf`.
pub fn hypergeom_sf(pop: u64, successes: u64, draws: u64, k: u64) -> Result<f64> {
    hypergeom_tails(pop, successes, draws, k).map(|t| t.1)
}

/// Both tails; symmetric in `successes` and `draws` bit for bit.
pub fn hypergeom_tails(pop: u64, successes: u64, draws: u64, k: u64) -> Result<(f64, f64)> {
    if successes > pop || draws > pop {
        return Err(Error::InvalidArgument(format!(
            "hypergeometric needs K, draws <= N (N={pop}, K={successes}, draws={draws})"
        )));
    }
    let (successes, draws) = (successes.min(draws), successes.max(draws));
    let lo = (draws + successes).saturating_sub(pop);
    let hi = successes;
    if k >= hi {
        return Ok((1.0, 0.0));
    }
    if k < lo {
        return Ok((0.0, 1.0));
    }
    if pop <= EXACT_HYPERGEOM_MAX {
        let term = |i: u64| binom_u128(successes, i) * binom_u128(pop - successes, draws - i);
        let below: u128 = (lo..=k).map(term).sum();
        let den = binom_u128(pop, draws);
        let d = den as f64;
        return Ok((below as f64 / d, (den - below) as f64 / d));
    }
    let ln_den = ln_binom(pop, draws);
    let term =
        |i: u64| (ln_binom(successes, i) + ln_binom(pop - successes, draws - i) - ln_den).exp();
    let below: f64 = (lo..=k).map(term).sum();
    let above: f64 = (k + 1..=hi).map(term).sum();
    Ok((below.clamp(0.0, 1.0), above.clamp(0.0, 1.0)))
}

pub(crate) fn binom_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

fn ln_binom(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_poisson_sf(lambda: f64, k: u64) -> f64 {
        // sum the complementary head in log space, summing from the mode outward
        let mut head = 0.0;
        let mut ln_term = -lambda;
        for i in 0..k {
            if i > 0 {
                ln_term += lambda.ln() - (i as f64).ln();
            }
            head += ln_term.exp();
        }
        1.0 - head
    }

    #[test]
    fn poisson_edges() {
        assert_eq!(poisson_sf(7.5, 0).unwrap(), 1.0);
        assert_eq!(poisson_sf(0.0, 1).unwrap(), 0.0);
        assert!(poisson_sf(-1.0, 2).is_err());
    }

    #[test]
    fn poisson_matches_series() {
        let tail: f64 = (5..200)
            .map(|i| (-3.0f64 + i as f64 * 3.0f64.ln() - ln_gamma(i as f64 + 1.0)).exp())
            .sum();
        let got = poisson_sf(3.0, 5).unwrap();
        assert!((got - tail).abs() < 1e-12);
        assert!((got - 0.184_736_8).abs() < 5e-8);
        for &lambda in &[0.5, 2.0, 17.0] {
            for k in 0..40 {
                let a = poisson_sf(lambda, k).unwrap();
                assert!((a - direct_poisson_sf(lambda, k)).abs() < 1e-10);
                if k > 0 {
                    let b = poisson_cdf(lambda, k - 1).unwrap();
                    assert!((a + b - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn normal_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        assert!((std_normal_quantile(0.975).unwrap() - 1.959_963_98).abs() < 1e-8);
        // erf(1) to 16 digits
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((std_normal_cdf(-3.0) - 1.349_898_031_630_094_5e-3).abs() < 1e-15);
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
    }

    #[test]
    fn quantile_round_trip() {
        let mut z = -6.0;
        while z <= 6.0 {
            let back = std_normal_quantile(std_normal_cdf(z)).unwrap();
            assert!((back - z).abs() < 1e-8, "z={z} back={back}");
            z += 0.01;
        }
    }

    #[test]
    fn hypergeom_values() {
        let v = hypergeom_cdf(10, 5, 4, 2).unwrap();
        assert!((v - 155.0 / 210.0).abs() < 1e-15);
        assert_eq!(hypergeom_cdf(10, 5, 4, 4).unwrap(), 1.0);
        assert_eq!(hypergeom_cdf(10, 8, 4, 1).unwrap(), 0.0);
        assert!(hypergeom_cdf(5, 6, 1, 0).is_err());
    }

    #[test]
    fn hypergeom_tails_are_symmetric() {
        for (k_succ, draws, k) in [(30, 70, 25), (12, 88, 3), (55, 41, 30)] {
            let (c1, s1) = hypergeom_tails(100, k_succ, draws, k).unwrap();
            let (c2, s2) = hypergeom_tails(100, draws, k_succ, k).unwrap();
            assert_eq!((c1.to_bits(), s1.to_bits()), (c2.to_bits(), s2.to_bits()));
            assert!((c1 + s1 - 1.0).abs() < 1e-15);
        }
        assert_eq!(hypergeom_sf(10, 5, 4, 4).unwrap(), 0.0);
    }

    #[test]
    fn hypergeom_log_path_agrees() {
        // pmf ratio recursion from the lower end of the support
        let (n, succ, draws) = (400u64, 150u64, 90u64);
        let mut p = (0..draws).fold(1.0, |acc, j| acc * (n - succ - j) as f64 / (n - j) as f64);
        let mut cum = p;
        for i in 0..30u64 {
            p *= ((succ - i) * (draws - i)) as f64 / ((i + 1) * (n - succ - draws + i + 1)) as f64;
            cum += p;
        }
        assert!((hypergeom_cdf(n, succ, draws, 30).unwrap() - cum).abs() < 1e-12);
    }
}
