//! Test-only numerical oracles, deliberately independent of the library's
//! own error-function path: the normal CDF here comes from Gauss-Legendre
//! quadrature of the density, and expected observed frequencies come from
//! deterministic integration over the parameter space rather than from
//! the Monte-Carlo pipeline under test.

use std::sync::OnceLock;

const SQRT_2PI: f64 = 2.5066282746310002;

/// Legendre-Gauss nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn density(t: f64) -> f64 {
    (-0.5 * t * t).exp() / SQRT_2PI
}

fn rule64() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(64))
}

/// Standard normal CDF by quadrature of the density on [0, |z|].
pub fn phi(z: f64) -> f64 {
    if z.is_infinite() {
        return if z > 0.0 { 1.0 } else { 0.0 };
    }
    let b = z.abs().min(9.0);
    let (nodes, weights) = rule64();
    let half = 0.5 * b;
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * half * density(half * (x + 1.0));
    }
    if z >= 0.0 {
        (0.5 + acc).min(1.0)
    } else {
        (0.5 - acc).max(0.0)
    }
}

/// Inverse of [`phi`] by bisection; 0 and 1 map to the infinities.
pub fn inv_phi(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p));
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (-9.0, 9.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Antiderivative of the CDF: d/dz [z·Phi(z) + phi_density(z)] = Phi(z).
fn cdf_antiderivative(z: f64) -> f64 {
    z * phi(z) + density(z)
}

/// Expected per-bin (positive, observed) probability masses of the
/// unfiltered view at collection time `t_c`, for events with location
/// uniform on `mu_range`, scale uniform on `sigma_range`, and scheduled
/// date uniform on [0, horizon]. Integration over the scheduled date and
/// the occurrence time is exact given the CDF; the remaining double
/// integral uses a tensor Gauss-Legendre grid.
///
/// Returns one `(numerator, denominator)` pair per forecast bin; the
/// expected frequency is their ratio where the denominator is positive.
pub fn expected_bin_masses(
    mu_range: (f64, f64),
    sigma_range: (f64, f64),
    horizon: f64,
    t_c: f64,
    n_bins: usize,
    grid: usize,
) -> Vec<(f64, f64)> {
    let z_edges: Vec<f64> = (0..=n_bins)
        .map(|b| inv_phi(b as f64 / n_bins as f64))
        .collect();
    let g_edges: Vec<f64> = z_edges
        .iter()
        .map(|&z| {
            if z.is_finite() {
                cdf_antiderivative(z)
            } else {
                0.0
            }
        })
        .collect();

    let (nodes, weights) = gauss_legendre(grid);
    let map = |range: (f64, f64), x: f64| 0.5 * (x + 1.0) * (range.1 - range.0) + range.0;

    let mut masses = vec![(0.0, 0.0); n_bins];
    for (xm, wm) in nodes.iter().zip(&weights) {
        let mu = map(mu_range, *xm);
        for (xs, ws) in nodes.iter().zip(&weights) {
            let sigma = map(sigma_range, *xs);
            // Uniform expectations: each dimension contributes w/2.
            let w = 0.25 * wm * ws;

            let z_c = (t_c - mu) / sigma;
            let phi_c = phi(z_c);
            let g_c = cdf_antiderivative(z_c);
            let g_at = |t: f64| cdf_antiderivative((t - mu) / sigma);

            for b in 0..n_bins {
                let raw_lo = mu + sigma * z_edges[b];
                let raw_hi = mu + sigma * z_edges[b + 1];
                let a = raw_lo.clamp(0.0, horizon);
                let c = raw_hi.clamp(0.0, horizon);
                if c <= a {
                    continue;
                }
                let (mut num, mut den) = (0.0, 0.0);
                // Scheduled dates before t_c: observed surely, positive
                // with the forecast probability itself.
                let m = c.min(t_c);
                if m > a {
                    let g_a = if a == raw_lo { g_edges[b] } else { g_at(a) };
                    let g_m = if m == raw_hi {
                        g_edges[b + 1]
                    } else if m == t_c {
                        g_c
                    } else {
                        g_at(m)
                    };
                    num += sigma * (g_m - g_a);
                    den += m - a;
                }
                // Scheduled dates after t_c: observed only when the event
                // occurred by t_c, in which case it is positive.
                let lo = a.max(t_c);
                if c > lo {
                    num += (c - lo) * phi_c;
                    den += (c - lo) * phi_c;
                }
                masses[b].0 += w * num;
                masses[b].1 += w * den;
            }
        }
    }
    // The 1/horizon density of the scheduled date cancels in the ratio;
    // apply it anyway so the denominators sum to the observed fraction.
    for m in &mut masses {
        m.0 /= horizon;
        m.1 /= horizon;
    }
    masses
}
