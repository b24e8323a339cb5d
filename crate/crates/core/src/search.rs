//! One-dimensional search primitives: golden-section maximization and
//! bracketed bisection.

use crate::scalar::Scalar;

const MAX_ITER: usize = 500;

fn inv_phi<T: Scalar>() -> T {
    // 1/φ = (√5 − 1)/2
    (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0)
}

/// Maximizes a unimodal `f` on `[lo, hi]` until the bracket is narrower than `tol`.
/// Returns `(argmax, max)`.
pub fn golden_max<T, F>(mut f: F, mut lo: T, mut hi: T, tol: T) -> (T, T)
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    if hi < lo {
        std::mem::swap(&mut lo, &mut hi);
    }
    let k = inv_phi::<T>();
    let mut x1 = hi - k * (hi - lo);
    let mut x2 = lo + k * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iter = 0;
    while hi - lo > tol && iter < MAX_ITER {
        iter += 1;
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + k * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - k * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = (lo + hi) / T::lit(2.0);
    let fm = f(mid);
    // Keep the best point actually evaluated.
    [(x1, f1), (x2, f2)]
        .into_iter()
        .fold((mid, fm), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// Minimizes `f` by maximizing `−f`.
pub fn golden_min<T, F>(mut f: F, lo: T, hi: T, tol: T) -> (T, T)
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let (x, v) = golden_max(|x| -f(x), lo, hi, tol);
    (x, -v)
}

/// Evenly spaced grid of `points` values spanning `[lo, hi]`, endpoints exact.
pub fn linspace<T: Scalar>(lo: T, hi: T, points: usize) -> Vec<T> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::lit((points - 1) as f64);
            (0..points)
                .map(|i| if i + 1 == points { hi } else { lo + step * T::lit(i as f64) })
                .collect()
        }
    }
}

/// Result of [`scan_then_golden_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanMax<T> {
    pub argmax: T,
    pub max: T,
    /// `max − min` over the coarse grid.
    pub spread: T,
}

/// Coarse grid scan followed by golden-section refinement in the two grid
/// cells around the best grid point. Ties on the grid go to the lower point.
pub fn scan_then_golden_max<T, F>(mut f: F, lo: T, hi: T, points: usize, tol: T) -> ScanMax<T>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let grid = linspace(lo, hi, points.max(2));
    let values: Vec<T> = grid.iter().map(|&x| f(x)).collect();
    let mut best = 0;
    let mut worst = values[0];
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
        if v < worst {
            worst = v;
        }
    }
    let spread = values[best] - worst;
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let (x, v) = golden_max(&mut f, a, b, tol);
    if v > values[best] {
        ScanMax { argmax: x, max: v, spread }
    } else {
        ScanMax { argmax: grid[best], max: values[best], spread }
    }
}

/// Bisection for a root of `f` on `[lo, hi]`, which must bracket a sign change.
pub fn bisect_root<T, F>(mut f: F, mut lo: T, mut hi: T, tol: T) -> T
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let mut f_lo = f(lo);
    for _ in 0..MAX_ITER {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return mid;
        }
        if (f_mid < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) / T::lit(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x: f64| -(x - 0.2).powi(2), -1.0, 1.0, 1e-9);
        assert!((x - 0.2).abs() < 1e-8);
        assert!(v.abs() < 1e-15);
        let (x, _) = golden_min(|x: f64| (x - 3.0).powi(2), 5.0, 0.0, 1e-9);
        assert!((x - 3.0).abs() < 1e-8);
    }

    #[test]
    fn golden_handles_boundary_maximum() {
        let (x, _) = golden_max(|x: f64| x, 0.0, 1.0, 1e-10);
        assert!((x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scan_escapes_secondary_peak() {
        // Broad bump near 1 and a narrow, taller spike at 7.3.
        let f = |x: f64| (-(x - 1.0).powi(2)).exp() + 2.0 / (1.0 + ((x - 7.3) / 0.01).powi(2));
        let r = scan_then_golden_max(f, 0.0, 10.0, 64, 1e-9);
        assert!((r.argmax - 7.3).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn scan_reports_spread() {
        let r = scan_then_golden_max(|_x: f64| 4.0, 1.0, 10.0, 64, 1e-6);
        assert_eq!(r.spread, 0.0);
        assert_eq!(r.argmax, 1.0);
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.1f64, 0.9, 9);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[8], 0.9);
        assert!((g[4] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bisect_sqrt2() {
        let r = bisect_root(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let r = bisect_root(|x: f32| 1.0 - x, 0.0, 3.0, 1e-6);
        assert!((r - 1.0).abs() < 1e-5);
    }
}
