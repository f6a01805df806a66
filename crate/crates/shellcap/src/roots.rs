//! Bracketed scalar root finding: uniform pre-scan followed by bisection.
//!
//! The scan makes root multiplicity observable instead of silently picking a
//! branch; a failed scan reports the full `(x, f(x))` table for diagnosis.

/// One scanned point of the objective.
pub type ScanRow = (f64, f64);

#[derive(Debug, Clone)]
pub enum RootError {
    /// No sign change in the scanned bracket; carries the scan table.
    NoSignChange { lo: f64, hi: f64, table: Vec<ScanRow> },
    /// Invalid bracket or scan configuration.
    BadBracket { lo: f64, hi: f64, points: usize },
}

impl std::fmt::Display for RootError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RootError::NoSignChange { lo, hi, table } => write!(
                f,
                "no sign change of the objective in [{lo}, {hi}] ({} scan points)",
                table.len()
            ),
            RootError::BadBracket { lo, hi, points } => {
                write!(f, "bad bracket [{lo}, {hi}] with {points} scan points")
            }
        }
    }
}

impl std::error::Error for RootError {}

/// Bisects a sign-change interval `[a, b]` down to machine resolution and
/// returns the visited abscissa with the smallest |f|.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    let fb = f(b);
    let mut best = if fa.abs() <= fb.abs() { (a, fa.abs()) } else { (b, fb.abs()) };
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break; // interval at machine resolution
        }
        let fm = f(m);
        if fm.abs() < best.1 {
            best = (m, fm.abs());
        }
        if fm == 0.0 {
            return m;
        }
        if (fa > 0.0) != (fm > 0.0) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    best.0
}

/// Scans `[lo, hi]` at `points` uniform abscissae and bisects every
/// sign-change interval. Roots are returned in ascending order.
pub fn find_roots<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<f64>, RootError> {
    if !(hi > lo) || points < 2 {
        return Err(RootError::BadBracket { lo, hi, points });
    }
    let mut table = Vec::with_capacity(points);
    let step = (hi - lo) / (points - 1) as f64;
    for i in 0..points {
        let x = if i == points - 1 { hi } else { lo + step * i as f64 };
        table.push((x, f(x)));
    }
    let mut roots = Vec::new();
    for w in table.windows(2) {
        let (xa, fa) = w[0];
        let (xb, fb) = w[1];
        if fa == 0.0 {
            roots.push(xa);
        } else if fa * fb < 0.0 {
            roots.push(bisect(f, xa, xb));
        }
    }
    if table.last().map(|&(_, v)| v == 0.0).unwrap_or(false) {
        roots.push(hi);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * a.abs().max(1.0));
    if roots.is_empty() {
        return Err(RootError::NoSignChange { lo, hi, table });
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_root_to_machine_precision() {
        let f = |x: f64| x * x - 2.0;
        let roots = find_roots(&f, 0.0, 3.0, 1000).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 2.0f64.sqrt()).abs() < 1e-14);
        assert!(f(roots[0]).abs() < 1e-14);
    }

    #[test]
    fn reports_all_roots() {
        let f = |x: f64| (x - 1.0) * (x - 2.0) * (x - 3.5);
        let roots = find_roots(&f, 0.0, 5.0, 4000).unwrap();
        assert_eq!(roots.len(), 3);
        for (r, want) in roots.iter().zip([1.0, 2.0, 3.5]) {
            assert!((r - want).abs() < 1e-12);
        }
    }

    #[test]
    fn no_sign_change_reports_table() {
        let f = |x: f64| x * x + 1.0;
        match find_roots(&f, -1.0, 1.0, 50) {
            Err(RootError::NoSignChange { table, .. }) => assert_eq!(table.len(), 50),
            other => panic!("expected NoSignChange, got {other:?}"),
        }
    }
}
