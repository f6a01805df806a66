//! Adaptive Simpson quadrature with an absolute tolerance and a fixed
//! recursion depth cap.

const MAX_DEPTH: u32 = 40;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Classic adaptive Simpson with Richardson correction; each interval split
/// halves the tolerance budget. When the depth cap is reached the current
/// corrected estimate is accepted.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive(f, a, m, b, fa, fm, fb, whole, tol.abs().max(f64::MIN_POSITIVE), MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}
