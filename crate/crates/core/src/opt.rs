//! Small dense optimization utilities shared by the solvers: golden-section
//! search, bisection, and a Nelder-Mead simplex for the few-variable
//! constrained subproblems (used inside multi-start penalty loops).

/// Golden-section maximization of `f` on `[lo, hi]` to an argument tolerance.
/// Returns `(argmax, max)`. Assumes `f` is unimodal on the bracket; callers
/// that cannot guarantee unimodality should coarse-scan first and pass a
/// bracket around the best sample.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let m = 0.5 * (a + b);
    (m, f(m))
}

/// Coarse scan followed by golden-section refinement around the best sample.
/// Robust to mild multimodality at the cost of `n` extra evaluations.
pub fn scan_golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, tol: f64) -> (f64, f64) {
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    let step = (hi - lo) / (n as f64 - 1.0);
    for i in 0..n {
        let v = f(lo + step * i as f64);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let (x, v) = golden_max(&f, a, b, tol);
    if v >= best_v {
        (x, v)
    } else {
        (lo + step * best_i as f64, best_v)
    }
}

/// Bisection root of a continuous `f` on a sign-changing bracket `[lo, hi]`,
/// to an argument tolerance. Returns the midpoint of the final bracket.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    debug_assert!(flo * f(hi) <= 0.0, "bisect_root needs a sign change");
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// Nelder-Mead minimization from a starting point. Standard reflection /
/// expansion / contraction / shrink coefficients, simplex seeded with steps
/// of size `scale` along each axis. Returns `(argmin, min)`.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    scale: f64,
    max_iter: usize,
    ftol: f64,
) -> (Vec<f64>, f64) {
    let n = start.len();
    if n == 0 {
        return (vec![], f(start));
    }
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += if p[i].abs() > 1.0 { scale * p[i].abs() } else { scale };
        simplex.push(p);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    for _ in 0..max_iter {
        // Order best..worst.
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| fv[a].partial_cmp(&fv[b]).unwrap());
        let reorder: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let refv: Vec<f64> = idx.iter().map(|&i| fv[i]).collect();
        simplex = reorder;
        fv = refv;

        if (fv[n] - fv[0]).abs() <= ftol * (1.0 + fv[0].abs()) {
            break;
        }

        // Centroid of all but worst.
        let mut cen = vec![0.0; n];
        for p in simplex.iter().take(n) {
            for (c, v) in cen.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let combine = |a: f64, b: f64| -> Vec<f64> {
            cen.iter()
                .zip(&worst)
                .map(|(c, w)| a * c + b * w)
                .collect()
        };

        let xr = combine(2.0, -1.0);
        let fr = f(&xr);
        if fr < fv[0] {
            let xe = combine(3.0, -2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if fr < fv[n - 1] {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            let (xc, fc) = if fr < fv[n] {
                let xc = combine(1.5, -0.5);
                let v = f(&xc);
                (xc, v)
            } else {
                let xc = combine(0.5, 0.5);
                let v = f(&xc);
                (xc, v)
            };
            if fc < fv[n].min(fr) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                // Shrink toward best.
                for i in 1..=n {
                    let best = simplex[0].clone();
                    for (x, b) in simplex[i].iter_mut().zip(&best) {
                        *x = 0.5 * (*x + b);
                    }
                    fv[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    (simplex[best].clone(), fv[best])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|t| -(t - 1.3) * (t - 1.3), -10.0, 10.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-8);
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect_root(|t| t * t - 2.0, 0.0, 2.0, 1e-12);
        assert!((r - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |p: &[f64]| {
            let (x, y) = (p[0], p[1]);
            (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
        };
        let (p, v) = nelder_mead(f, &[-1.2, 1.0], 0.5, 4000, 1e-14);
        assert!(v < 1e-8, "v={v} at {p:?}");
    }
}
