//! Dormand–Prince 5(4) integrator with step-size control and dense output.
//!
//! Works on complex state vectors; the master-equation code feeds it vec(ρ).

use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense-output coefficients (Hairer & Wanner, DOPRI5 continuous extension).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
    /// Hard cap on accepted + rejected steps.
    pub max_steps: usize,
    /// Upper bound on the step, as a fraction of the integration span. Zero means unbounded.
    pub max_step_fraction: f64,
}

impl Default for DormandPrince {
    fn default() -> Self {
        Self::with_tolerance(1e-9)
    }
}

impl DormandPrince {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            max_steps: 5_000_000,
            max_step_fraction: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// axpy-style accumulation `out = y + h * Σ w_i k_i`.
fn combine(out: &mut CVector, y: &CVector, h: f64, terms: &[(f64, &CVector)]) {
    out.copy_from(y);
    for &(w, k) in terms {
        if w != 0.0 {
            out.axpy(C64::new(h * w, 0.0), k, C64::new(1.0, 0.0));
        }
    }
}

fn error_norm(err: &CVector, y0: &CVector, y1: &CVector, rtol: f64, atol: f64) -> f64 {
    let n = err.len().max(1) as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

impl DormandPrince {
    /// Integrates `dy/dt = f(t, y)` from `grid[0]` and returns the solution at
    /// every grid time. `grid` must be strictly increasing.
    pub fn solve<F>(&self, mut f: F, y0: &CVector, grid: &[f64]) -> Result<(Vec<CVector>, Stats)>
    where
        F: FnMut(f64, &CVector, &mut CVector),
    {
        if grid.is_empty() {
            return Ok((Vec::new(), Stats::default()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "output grid must be strictly increasing".into(),
            ));
        }
        let t0 = grid[0];
        let t_end = *grid.last().unwrap();
        let span = t_end - t0;
        let mut out = Vec::with_capacity(grid.len());
        out.push(y0.clone());
        let mut stats = Stats::default();
        if grid.len() == 1 {
            return Ok((out, stats));
        }
        let h_max = if self.max_step_fraction > 0.0 {
            self.max_step_fraction * span
        } else {
            span
        };

        let n = y0.len();
        let mut y = y0.clone();
        let mut k1 = CVector::zeros(n);
        let mut k2 = CVector::zeros(n);
        let mut k3 = CVector::zeros(n);
        let mut k4 = CVector::zeros(n);
        let mut k5 = CVector::zeros(n);
        let mut k6 = CVector::zeros(n);
        let mut k7 = CVector::zeros(n);
        let mut tmp = CVector::zeros(n);
        let mut y_new = CVector::zeros(n);
        let mut err = CVector::zeros(n);

        f(t0, &y, &mut k1);
        stats.evaluations += 1;

        let mut t = t0;
        let mut h = self.initial_step(&mut f, t0, &y, &k1, span, &mut stats).min(h_max);
        let mut next_out = 1;
        let mut last_rejected = false;

        while next_out < grid.len() {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::Integration {
                    t,
                    step: h,
                    reason: format!("exceeded {} steps", self.max_steps),
                });
            }
            let remaining = t_end - t;
            let mut final_step = false;
            if h >= remaining {
                h = remaining;
                final_step = true;
            }
            if h <= 1e-14 * span.max(t.abs()) {
                return Err(Error::Integration {
                    t,
                    step: h,
                    reason: "step size underflow".into(),
                });
            }

            combine(&mut tmp, &y, h, &[(A21, &k1)]);
            f(t + C2 * h, &tmp, &mut k2);
            combine(&mut tmp, &y, h, &[(A31, &k1), (A32, &k2)]);
            f(t + C3 * h, &tmp, &mut k3);
            combine(&mut tmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            f(t + C4 * h, &tmp, &mut k4);
            combine(&mut tmp, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            f(t + C5 * h, &tmp, &mut k5);
            combine(
                &mut tmp,
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            f(t + h, &tmp, &mut k6);
            combine(
                &mut y_new,
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            f(t + h, &y_new, &mut k7);
            stats.evaluations += 6;

            err.fill(C64::new(0.0, 0.0));
            for (w, k) in [(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)] {
                err.axpy(C64::new(h * w, 0.0), k, C64::new(1.0, 0.0));
            }
            let en = error_norm(&err, &y, &y_new, self.rtol, self.atol);

            if en <= 1.0 {
                stats.accepted += 1;
                let t_new = if final_step { t_end } else { t + h };

                // Emit every output point inside (t, t_new].
                while next_out < grid.len() && grid[next_out] <= t_new {
                    let tg = grid[next_out];
                    if next_out == grid.len() - 1 && final_step {
                        out.push(y_new.clone());
                    } else {
                        let theta = (tg - t) / h;
                        out.push(dense(&y, &y_new, &k1, &k3, &k4, &k5, &k6, &k7, h, theta));
                    }
                    next_out += 1;
                }

                y.copy_from(&y_new);
                std::mem::swap(&mut k1, &mut k7);
                t = t_new;

                let fac = if en == 0.0 { 10.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 10.0) };
                let fac = if last_rejected { fac.min(1.0) } else { fac };
                h = (h * fac).min(h_max);
                last_rejected = false;
            } else {
                if !en.is_finite() {
                    return Err(Error::Integration {
                        t,
                        step: h,
                        reason: "non-finite error estimate".into(),
                    });
                }
                stats.rejected += 1;
                h *= (0.9 * en.powf(-0.2)).max(0.2);
                last_rejected = true;
            }
        }
        Ok((out, stats))
    }

    fn initial_step<F>(
        &self,
        f: &mut F,
        t0: f64,
        y0: &CVector,
        f0: &CVector,
        span: f64,
        stats: &mut Stats,
    ) -> f64
    where
        F: FnMut(f64, &CVector, &mut CVector),
    {
        let sc = |y: &CVector, v: &CVector| -> f64 {
            let n = v.len().max(1) as f64;
            (v.iter()
                .zip(y.iter())
                .map(|(x, yy)| (x.norm() / (self.atol + self.rtol * yy.norm())).powi(2))
                .sum::<f64>()
                / n)
                .sqrt()
        };
        let d0 = sc(y0, y0);
        let d1 = sc(y0, f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let mut y1 = y0.clone();
        y1.axpy(C64::new(h0, 0.0), f0, C64::new(1.0, 0.0));
        let mut f1 = CVector::zeros(y0.len());
        f(t0 + h0, &y1, &mut f1);
        stats.evaluations += 1;
        let d2 = sc(y0, &(&f1 - f0)) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (1e-6f64).max(h0 * 1e-3)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }
}

#[allow(clippy::too_many_arguments)]
fn dense(
    y0: &CVector,
    y1: &CVector,
    k1: &CVector,
    k3: &CVector,
    k4: &CVector,
    k5: &CVector,
    k6: &CVector,
    k7: &CVector,
    h: f64,
    theta: f64,
) -> CVector {
    let ydiff = y1 - y0;
    let bspl = k1 * C64::new(h, 0.0) - &ydiff;
    let r4 = &ydiff - k7 * C64::new(h, 0.0) - &bspl;
    let mut r5 = k1 * C64::new(D1 * h, 0.0);
    for (d, k) in [(D3, k3), (D4, k4), (D5, k5), (D6, k6), (D7, k7)] {
        r5.axpy(C64::new(d * h, 0.0), k, C64::new(1.0, 0.0));
    }
    let th1 = 1.0 - theta;
    let inner = r4 + r5 * C64::new(th1, 0.0);
    let inner = bspl + inner * C64::new(theta, 0.0);
    let inner = ydiff + inner * C64::new(th1, 0.0);
    y0 + inner * C64::new(theta, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(z: C64) -> CVector {
        CVector::from_vec(vec![z])
    }

    #[test]
    fn exponential_decay_on_grid() {
        let lambda = C64::new(-1.3, 4.0);
        let grid: Vec<f64> = (0..=50).map(|k| k as f64 * 0.04).collect();
        let (ys, stats) = DormandPrince::with_tolerance(1e-10)
            .solve(|_, y, dy| dy.copy_from(&(y * lambda)), &scalar(C64::new(1.0, 0.0)), &grid)
            .unwrap();
        assert_eq!(ys.len(), grid.len());
        for (t, y) in grid.iter().zip(&ys) {
            let exact = (lambda * t).exp();
            assert!((y[0] - exact).norm() < 1e-8, "t={t}");
        }
        assert!(stats.accepted > 0);
    }

    #[test]
    fn dense_output_is_accurate_between_steps() {
        // Steps are much longer than the grid spacing, so most outputs are interpolated.
        let grid: Vec<f64> = (0..=400).map(|k| k as f64 * 0.01).collect();
        let (ys, stats) = DormandPrince::with_tolerance(1e-10)
            .solve(|t, _, dy| dy[0] = C64::new(t.cos(), 0.0), &scalar(C64::new(0.0, 0.0)), &grid)
            .unwrap();
        assert!(stats.accepted < grid.len());
        for (t, y) in grid.iter().zip(&ys) {
            assert!((y[0].re - t.sin()).abs() < 1e-6, "t={t}: {}", y[0].re);
        }
    }

    #[test]
    fn rejects_non_monotone_grid() {
        let r = DormandPrince::default().solve(|_, _, _| {}, &scalar(C64::new(1.0, 0.0)), &[0.0, 1.0, 1.0]);
        assert!(r.is_err());
    }

    #[test]
    fn reports_step_budget_exhaustion() {
        let dp = DormandPrince {
            max_steps: 3,
            ..DormandPrince::with_tolerance(1e-12)
        };
        let r = dp.solve(
            |_, y, dy| dy.copy_from(&(y * C64::new(0.0, 200.0))),
            &scalar(C64::new(1.0, 0.0)),
            &[0.0, 10.0],
        );
        assert!(matches!(r, Err(Error::Integration { .. })));
    }

    #[test]
    fn error_shrinks_with_tolerance() {
        let run = |tol: f64| {
            let (ys, _) = DormandPrince::with_tolerance(tol)
                .solve(|_, y, dy| dy.copy_from(&(y * C64::new(-0.5, 30.0))), &scalar(C64::new(1.0, 0.0)), &[0.0, 2.0])
                .unwrap();
            (ys[1][0] - (C64::new(-0.5, 30.0) * 2.0).exp()).norm()
        };
        let coarse = run(1e-6);
        let fine = run(1e-9);
        assert!(fine < coarse / 10.0, "coarse={coarse:e} fine={fine:e}");
    }
}
