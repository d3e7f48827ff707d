//! Small numeric building blocks shared across modules.

/// Bisection for a root of `f` on `[lo, hi]`, assuming `f(lo) <= 0 <= f(hi)`.
/// Runs a fixed number of halvings; the interval shrinks well below f64
/// resolution long before `iters` large reaches the cap.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, iters: u32, f: impl Fn(f64) -> f64) -> f64 {
    debug_assert!(lo <= hi);
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
/// Returns the abscissa located to within `tol`.
pub(crate) fn golden_max(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

/// Solves a 3x3 linear system by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot degenerates.
pub(crate) fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        let lead = m[col];
        for row in m.iter_mut().skip(col + 1) {
            let factor = row[col] / lead[col];
            for (dst, src) in row[col..].iter_mut().zip(&lead[col..]) {
                *dst -= factor * src;
            }
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut acc = m[i][3];
        for k in i + 1..3 {
            acc -= m[i][k] * x[k];
        }
        x[i] = acc / m[i][i];
    }
    Some(x)
}
