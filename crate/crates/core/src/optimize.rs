//! One-dimensional golden-section search and bisection.

use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const MAX_ITER: usize = 200;

/// Maximises `f` on `[lo, hi]` until the bracket is narrower than `tol`.
/// Returns the best point seen and its value.
pub fn golden_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..MAX_ITER {
        if b - a <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Minimises `f` on `[lo, hi]`; see [`golden_max`].
pub fn golden_min<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (x, v) = golden_max(|x| f(x).map(|y| -y), lo, hi, tol)?;
    Ok((x, -v))
}

/// Locates a crossing of `level` between `below` (f ≤ level) and `above`
/// (f > level) by bisection, to an interval narrower than `tol`.
pub fn bisect_level<F>(f: F, level: f64, mut below: f64, mut above: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    for _ in 0..MAX_ITER {
        if (above - below).abs() <= tol {
            break;
        }
        let mid = 0.5 * (below + above);
        if f(mid)? > level {
            above = mid;
        } else {
            below = mid;
        }
    }
    Ok(0.5 * (below + above))
}
