//! Independent oracles for the acceptance suite: a literal transcription of
//! the interface equilibrium equation, plain bisection, an adaptive-Simpson
//! integrator, and a deterministic generator. Nothing here calls into the
//! library's solve or quadrature paths.

/// Deterministic SplitMix64 stream in [0, 1).
pub struct Rng(pub u64);

impl Rng {
    pub fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }
}

/// Interface equilibrium residual, transcribed independently of the library.
#[allow(clippy::too_many_arguments)]
pub fn oracle_residual(
    x: f64,
    alpha: f64,
    xi: f64,
    eta: f64,
    eta_f: f64,
    omega_s: f64,
    omega_l: f64,
    wet: bool,
    p_hat_o: f64,
) -> f64 {
    let e2s = (2.0 * omega_s).exp();
    let x3 = x.powi(3);
    let a3 = alpha.powi(3);
    let bulk = x.powf(-4.0) + 4.0 / x
        + alpha * (4.0 - 4.0 * x3 - 5.0 * a3) / (x3 + a3 - 1.0).powf(4.0 / 3.0);
    let surface = -(4.0 / x) * (e2s * x * x - 1.0) * (xi / (x * x) + eta * e2s);
    let fluid = if wet {
        2.0 * (-7.0 * omega_l).exp() * ((3.0 * omega_l).exp() - x3) * eta_f
    } else {
        0.0
    };
    bulk + surface + fluid - 2.0 * p_hat_o
}

/// Plain midpoint bisection over a pre-scanned bracket; returns the root
/// closest to 1.
#[allow(clippy::too_many_arguments)]
pub fn oracle_root(
    alpha: f64,
    xi: f64,
    eta: f64,
    eta_f: f64,
    omega_s: f64,
    omega_l: f64,
    wet: bool,
    p_hat_o: f64,
) -> f64 {
    let g = |x: f64| oracle_residual(x, alpha, xi, eta, eta_f, omega_s, omega_l, wet, p_hat_o);
    let (lo, hi, n) = (0.2, 5.0, 4000);
    let mut roots = Vec::new();
    let mut xp = lo;
    let mut gp = g(xp);
    for i in 1..n {
        let xc = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let gc = g(xc);
        if gp * gc < 0.0 {
            let (mut a, mut b) = (xp, xc);
            let mut ga = gp;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let gm = g(m);
                if gm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if ga * gm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    ga = gm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        xp = xc;
        gp = gc;
    }
    roots
        .into_iter()
        .min_by(|p, q| (p - 1.0).abs().partial_cmp(&(q - 1.0).abs()).unwrap())
        .expect("oracle bracket holds a root")
}

/// Adaptive Simpson, written independently of the library's integrator.
pub fn oracle_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64 + Copy>(
        f: F,
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
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let d = left + right - whole;
        if depth == 0 || d.abs() <= 15.0 * tol {
            left + right + d / 15.0
        } else {
            rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, m, b, fa, fm, fb, whole, tol, 40)
}
