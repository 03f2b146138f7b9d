//! Panel quadrature for oscillatory integrands on `[0, ∞)` with a `C/ω²` tail.
//!
//! `[0, Ω]` is cut into panels of width `c·π/T` (`T` sets the oscillation
//! period in ω). Each panel is integrated with a fixed Gauss–Legendre rule
//! and bisected while the whole-panel and two-half estimates disagree. The
//! remainder `∫_Ω^∞` is modelled as `C/Ω` with `C` the mean of `ω²J` over
//! the last decade `[Ω/10, Ω]`; `Ω` doubles until the combined error
//! estimate meets the tolerance.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{QfiSpectrum, QuadratureConfig};
use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be >= 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `∫_a^b f` for a plain closure.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Sum with `O(log n)` error growth and an order fixed by the input layout.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// One Gauss–Legendre pass over a sub-interval.
#[derive(Debug, Clone, Default)]
struct RuleEval {
    integral: f64,
    /// `∫ ω² f`
    moment: f64,
    /// `∫ |f|`
    abs: f64,
    samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Panel {
    pub integral: f64,
    pub moment: f64,
    pub error: f64,
    pub samples: Vec<(f64, f64)>,
}

struct Ctx<'a, F> {
    f: &'a F,
    rule: &'a GaussLegendre,
    rel_tol: f64,
    max_depth: usize,
}

impl<F> Ctx<'_, F>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    fn eval(&self, a: f64, b: f64) -> Result<RuleEval> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut out = RuleEval {
            samples: Vec::with_capacity(self.rule.order()),
            ..Default::default()
        };
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let om = mid + half * x;
            let v = (self.f)(om)?;
            out.integral += w * v;
            out.moment += w * v * om * om;
            out.abs += w * v.abs();
            out.samples.push((om, v));
        }
        out.integral *= half;
        out.moment *= half;
        out.abs *= half;
        Ok(out)
    }

    fn panel(&self, a: f64, b: f64, floor: f64) -> Result<Panel> {
        let whole = self.eval(a, b)?;
        self.refine(a, b, whole, floor, self.max_depth)
    }

    fn refine(&self, a: f64, b: f64, whole: RuleEval, floor: f64, depth: usize) -> Result<Panel> {
        let m = 0.5 * (a + b);
        let left = self.eval(a, m)?;
        let right = self.eval(m, b)?;
        let split = left.integral + right.integral;
        let err = (split - whole.integral).abs();
        let scale = left.abs + right.abs;
        if err <= (0.1 * self.rel_tol * scale).max(floor) || depth == 0 {
            let mut samples = left.samples;
            samples.extend(right.samples);
            return Ok(Panel {
                integral: split,
                moment: left.moment + right.moment,
                error: err,
                samples,
            });
        }
        let l = self.refine(a, m, left, 0.5 * floor, depth - 1)?;
        let r = self.refine(m, b, right, 0.5 * floor, depth - 1)?;
        let mut samples = l.samples;
        samples.extend(r.samples);
        Ok(Panel {
            integral: l.integral + r.integral,
            moment: l.moment + r.moment,
            error: l.error + r.error,
            samples,
        })
    }
}

fn eval_panels<F>(
    ctx: &Ctx<'_, F>,
    width: f64,
    range: std::ops::Range<usize>,
    floor: f64,
) -> Result<Vec<Panel>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    range
        .into_par_iter()
        .map(|i| ctx.panel(i as f64 * width, (i + 1) as f64 * width, floor))
        .collect()
}

fn validate(cfg: &QuadratureConfig) -> Result<()> {
    let ok = cfg.rel_tol > 0.0
        && cfg.abs_tol > 0.0
        && cfg.panel_width_factor > 0.0
        && cfg.tail_start_factor > 0.0
        && cfg.max_panels >= 1
        && cfg.gauss_order >= 1;
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "invalid quadrature config {cfg:?}"
        )))
    }
}

/// `∫₀^∞ f(ω) dω` for an integrand oscillating with period `~2π/period_time`
/// and decaying like `C/ω²` beyond `feature_frequency`.
pub fn integrate_semi_infinite<F>(
    f: F,
    period_time: f64,
    feature_frequency: f64,
    cfg: &QuadratureConfig,
) -> Result<QfiSpectrum>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    validate(cfg)?;
    if !(period_time > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "period time must be > 0, got {period_time}"
        )));
    }
    let rule = GaussLegendre::new(cfg.gauss_order);
    let ctx = Ctx {
        f: &f,
        rule: &rule,
        rel_tol: cfg.rel_tol,
        max_depth: cfg.max_depth,
    };
    let width = cfg.panel_width_factor * PI / period_time;
    // Ω is a multiple of ten panels so the fitting decade starts on a panel edge.
    let block = 10usize;
    let start = cfg.tail_start_factor * feature_frequency.max(1.0 / period_time);
    let mut n = ((start / width / block as f64).ceil() as usize).max(1) * block;
    if n > cfg.max_panels {
        n = (cfg.max_panels / block).max(1) * block;
    }
    let floor = |n: usize| cfg.abs_tol / n as f64;
    let mut panels = eval_panels(&ctx, width, 0..n, floor(n))?;

    loop {
        let omega_max = n as f64 * width;
        let integrals: Vec<f64> = panels.iter().map(|p| p.integral).collect();
        let finite = pairwise_sum(&integrals);
        let quad_err: f64 = pairwise_sum(&panels.iter().map(|p| p.error).collect::<Vec<_>>());

        let lo = n / block;
        let mid = (lo + n) / 2;
        let moment = |r: std::ops::Range<usize>| {
            let m: Vec<f64> = panels[r.clone()].iter().map(|p| p.moment).collect();
            pairwise_sum(&m) / ((r.end - r.start) as f64 * width)
        };
        let c_all = moment(lo..n);
        let c_lo = moment(lo..mid);
        let c_hi = moment(mid..n);
        let tail = c_all / omega_max;
        let tail_err =
            (c_hi - c_lo).abs() / omega_max + c_all.abs() / (period_time * omega_max * omega_max);
        let integral = finite + tail;
        let error_estimate = quad_err + tail_err;

        let done = error_estimate <= cfg.abs_tol.max(cfg.rel_tol * integral.abs());
        if done || 2 * n > cfg.max_panels {
            let mut omegas = Vec::new();
            let mut values = Vec::new();
            for p in &panels {
                for &(w, v) in &p.samples {
                    omegas.push(w);
                    values.push(v);
                }
            }
            let spectrum = QfiSpectrum {
                omegas,
                values,
                integral,
                error_estimate,
                tail_coefficient: c_all,
                tail_start: omega_max,
                panels: n,
            };
            if done {
                return Ok(spectrum);
            }
            return Err(Error::NonConvergence {
                panels: n,
                partial: Box::new(spectrum),
            });
        }
        let more = eval_panels(&ctx, width, n..2 * n, floor(2 * n))?;
        panels.extend(more);
        n *= 2;
    }
}

/// `∫_a^b f` with the same panel rule and no tail.
pub fn integrate_band<F>(
    f: F,
    a: f64,
    b: f64,
    period_time: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    validate(cfg)?;
    if !(b >= a) {
        return Err(Error::InvalidParameter(format!("band [{a}, {b}] is empty")));
    }
    let rule = GaussLegendre::new(cfg.gauss_order);
    let ctx = Ctx {
        f: &f,
        rule: &rule,
        rel_tol: cfg.rel_tol,
        max_depth: cfg.max_depth,
    };
    let target = cfg.panel_width_factor * PI / period_time;
    let n = (((b - a) / target).ceil() as usize).max(1);
    let width = (b - a) / n as f64;
    let floor = cfg.abs_tol / n as f64;
    let panels: Vec<Panel> = (0..n)
        .into_par_iter()
        .map(|i| {
            ctx.panel(
                a + i as f64 * width,
                if i + 1 == n {
                    b
                } else {
                    a + (i + 1) as f64 * width
                },
                floor,
            )
        })
        .collect::<Result<_>>()?;
    let integral = pairwise_sum(&panels.iter().map(|p| p.integral).collect::<Vec<_>>());
    let error = panels.iter().map(|p| p.error).sum();
    Ok((integral, error))
}
