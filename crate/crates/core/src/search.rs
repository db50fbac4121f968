//! One-dimensional golden-section maximization.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Best point seen while narrowing a bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximizes a unimodal `f` on `[lo, hi]` until the bracket is narrower than `tol`.
///
/// Returns the best evaluated point, so the result is never worse than any
/// probe the search made.
pub fn golden_section_max<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<Maximum, E> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evaluations = 2;
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };

    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
        evaluations += 1;
    }
    Ok(Maximum {
        x: best.0,
        value: best.1,
        evaluations,
    })
}
