//! Projected BFGS for small box-constrained smooth problems.

pub(crate) struct Options {
    pub max_iter: usize,
    /// Relative tolerance on successive objective values.
    pub tol: f64,
}

pub(crate) struct Outcome<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn project<const N: usize>(x: &mut [f64; N], lo: &[f64; N], hi: &[f64; N]) {
    for i in 0..N {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f` (returning value and gradient) over `[lo, hi]` from `x0`.
pub(crate) fn minimize<const N: usize, F>(mut f: F, x0: [f64; N], lo: [f64; N], hi: [f64; N], opts: &Options) -> Outcome<N>
where
    F: FnMut(&[f64; N]) -> (f64, [f64; N]),
{
    let identity = || {
        let mut h = [[0.0; N]; N];
        for (i, row) in h.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        h
    };
    let mut x = x0;
    project(&mut x, &lo, &hi);
    let (mut fx, mut g) = f(&x);
    let mut h = identity();
    for it in 1..=opts.max_iter {
        let mut d = [0.0; N];
        for i in 0..N {
            d[i] = -(0..N).map(|j| h[i][j] * g[j]).sum::<f64>();
        }
        // drop components pushing against an active bound
        for i in 0..N {
            if (x[i] <= lo[i] && d[i] < 0.0) || (x[i] >= hi[i] && d[i] > 0.0) {
                d[i] = 0.0;
            }
        }
        if dot(&d, &g) >= 0.0 {
            h = identity();
            for i in 0..N {
                d[i] = -g[i];
                if (x[i] <= lo[i] && d[i] < 0.0) || (x[i] >= hi[i] && d[i] > 0.0) {
                    d[i] = 0.0;
                }
            }
        }
        if d.iter().all(|v| *v == 0.0) {
            return Outcome { x, value: fx, iterations: it, converged: true };
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut xn = x;
            for i in 0..N {
                xn[i] += step * d[i];
            }
            project(&mut xn, &lo, &hi);
            let (fn_, gn) = f(&xn);
            let moved: [f64; N] = std::array::from_fn(|i| xn[i] - x[i]);
            if fn_.is_finite() && fn_ <= fx + 1e-4 * dot(&g, &moved) {
                accepted = Some((xn, fn_, gn, moved));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn, s)) = accepted else {
            let converged = g.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-6;
            return Outcome { x, value: fx, iterations: it, converged };
        };
        let y: [f64; N] = std::array::from_fn(|i| gn[i] - g[i]);
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            let hy: [f64; N] = std::array::from_fn(|i| (0..N).map(|j| h[i][j] * y[j]).sum());
            let yhy = dot(&y, &hy);
            for i in 0..N {
                for j in 0..N {
                    h[i][j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        let change = (fx - fn_).abs();
        x = xn;
        fx = fn_;
        g = gn;
        if change <= opts.tol * (1.0 + fx.abs()) {
            return Outcome { x, value: fx, iterations: it, converged: true };
        }
    }
    Outcome { x, value: fx, iterations: opts.max_iter, converged: false }
}
