//! Derivative-free local minimization used by the optimization modules:
//! central-difference gradients with an adaptive backtracking step.

pub(crate) struct MinimizeResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

pub(crate) fn minimize<F>(f: F, x0: &[f64], max_iters: usize, tol: f64) -> MinimizeResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut step = 0.25;
    let mut stall = 0usize;
    let mut converged = false;
    let h = 1e-6;

    for _ in 0..max_iters {
        let mut g = vec![0.0f64; n];
        let mut gn2 = 0.0f64;
        for i in 0..n {
            let saved = x[i];
            x[i] = saved + h;
            let fp = f(&x);
            x[i] = saved - h;
            let fm = f(&x);
            x[i] = saved;
            let gi = (fp - fm) / (2.0 * h);
            if gi.is_finite() {
                g[i] = gi;
                gn2 += gi * gi;
            }
        }
        let gn = gn2.sqrt();
        if gn < 1e-11 {
            converged = true;
            break;
        }
        let mut accepted = false;
        let mut fnew = fx;
        while step > 1e-13 {
            let cand: Vec<f64> = x
                .iter()
                .zip(&g)
                .map(|(xi, gi)| xi - step * gi / gn)
                .collect();
            let fc = f(&cand);
            if fc.is_finite() && fc < fx - 1e-15 {
                x = cand;
                fnew = fc;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            converged = true;
            break;
        }
        let gain = fx - fnew;
        fx = fnew;
        step = (step * 1.6).min(1.0);
        if gain < tol {
            stall += 1;
            if stall >= 5 {
                converged = true;
                break;
            }
        } else {
            stall = 0;
        }
    }
    MinimizeResult {
        x,
        value: fx,
        converged,
    }
}
