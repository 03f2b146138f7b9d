//! Integrated QFI `K(T) = ∫₀^∞ J(B|ω) dω`, Haar averages and T-sweeps.

mod export;
pub mod quadrature;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Protocol;
use crate::protocol::{InitialState, PulseSequence};
use crate::signal::SignalParams;

pub use export::{spectrum_csv, sweep_csv, write_atomic, CSV_VERSION_LINE};
pub use quadrature::{integrate_band, integrate_semi_infinite, pairwise_sum, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Panel width in units of `π/T`.
    pub panel_width_factor: f64,
    /// First tail cut `Ω` in units of the protocol's feature frequency.
    pub tail_start_factor: f64,
    pub max_panels: usize,
    pub gauss_order: usize,
    /// Bisection depth limit inside one panel.
    pub max_depth: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-4,
            abs_tol: 1e-10,
            panel_width_factor: 1.0,
            tail_start_factor: 40.0,
            max_panels: 1 << 18,
            gauss_order: 10,
            max_depth: 12,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }
}

/// Sampled spectrum and its integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfiSpectrum {
    /// Quadrature nodes, strictly increasing, covering `[0, tail_start]`.
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    pub integral: f64,
    pub error_estimate: f64,
    /// `C` in `J ≈ C/ω²` beyond `tail_start`.
    pub tail_coefficient: f64,
    pub tail_start: f64,
    pub panels: usize,
}

impl QfiSpectrum {
    /// Largest sampled `J` and where it occurs.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.omegas
            .iter()
            .zip(&self.values)
            .fold(None, |best: Option<(f64, f64)>, (&w, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((w, v)),
            })
    }
}

/// `K(T)` for `protocol` with `signal` as a template (its `ω` is swept).
pub fn integrate_iqfi<P: Protocol + ?Sized>(
    protocol: &P,
    signal: &SignalParams,
    cfg: &QuadratureConfig,
) -> Result<QfiSpectrum> {
    protocol.check()?;
    let f = |w: f64| protocol.qfi(&signal.with_omega(w));
    integrate_semi_infinite(
        f,
        protocol.total_time(),
        protocol.feature_frequency(signal),
        cfg,
    )
}

/// `∫_a^b J(B|ω) dω`, with its quadrature error estimate.
pub fn integrate_iqfi_band<P: Protocol + ?Sized>(
    protocol: &P,
    signal: &SignalParams,
    band: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    protocol.check()?;
    if !(band.0 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "band starts below zero: {}",
            band.0
        )));
    }
    let f = |w: f64| protocol.qfi(&signal.with_omega(w));
    integrate_band(f, band.0, band.1, protocol.total_time(), cfg)
}

/// `J(B|ω)` on an explicit grid, evaluated in parallel.
pub fn qfi_on_grid<P: Protocol + ?Sized>(
    protocol: &P,
    signal: &SignalParams,
    omegas: &[f64],
) -> Result<Vec<f64>> {
    protocol.check()?;
    if let Some(w) = omegas.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::InvalidParameter(format!("negative frequency {w}")));
    }
    omegas
        .par_iter()
        .map(|&w| protocol.qfi(&signal.with_omega(w)))
        .collect()
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(hi > lo) || lo < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "bad grid [{lo}, {hi}] with {n} points"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i + 1 == n { hi } else { lo + i as f64 * step })
        .collect())
}

/// `∫₀^∞ sin(ωt₁) sin(ωt₀)/ω² dω = (π/2) min(t₁, t₀)`.
pub fn cross_spectral_integral(t1: f64, t0: f64) -> Result<f64> {
    if !(t0 >= 0.0 && t1 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "times must be >= 0, got ({t1}, {t0})"
        )));
    }
    Ok(FRAC_PI_2 * t1.min(t0))
}

/// The same integral by quadrature, used to exercise the engine on a known
/// oscillatory integrand.
pub fn cross_spectral_numeric(t1: f64, t0: f64, cfg: &QuadratureConfig) -> Result<QfiSpectrum> {
    cross_spectral_integral(t1, t0)?;
    let longest = t1.max(t0);
    if longest == 0.0 {
        return integrate_semi_infinite(|_| Ok(0.0), 1.0, 1.0, cfg);
    }
    let f = move |w: f64| Ok(t1 * t0 * sinc(w * t1) * sinc(w * t0));
    let shortest = [t1, t0, (t1 - t0).abs()]
        .into_iter()
        .filter(|t| *t > 0.0)
        .fold(longest, f64::min);
    integrate_semi_infinite(f, longest, 1.0 / shortest, cfg)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarConfig {
    pub samples: usize,
    pub seed: u64,
    /// Largest accepted `std_error / mean`.
    pub target_rel_error: f64,
}

/// Seed used when none is given.
pub const DEFAULT_HAAR_SEED: u64 = 0x5eed_1f1;

impl Default for HaarConfig {
    fn default() -> Self {
        Self {
            samples: 4096,
            seed: DEFAULT_HAAR_SEED,
            target_rel_error: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaarMethod {
    /// `K(α) = K(π/2)·sin²α`, averaged exactly over the polar angle.
    Analytic,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarAverage {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub method: HaarMethod,
}

/// Average of `K(T)` over Haar-random initial states.
///
/// When every pulse maps `Z` to `±Z`, the protocol imprints a single signed
/// phase and `K` depends on the initial state only through `sin²α`, whose
/// Haar mean is `2/3`. Other sequences are averaged by Monte Carlo with a
/// fixed seed.
pub fn haar_average_iqfi(
    seq: &PulseSequence,
    signal: &SignalParams,
    cfg: &QuadratureConfig,
    haar: &HaarConfig,
) -> Result<HaarAverage> {
    seq.validate()?;
    if seq.is_z_preserving() {
        let eq = seq.clone().with_initial_state(FRAC_PI_2, 0.0);
        let k = integrate_iqfi(&eq, signal, cfg)?;
        return Ok(HaarAverage {
            mean: 2.0 / 3.0 * k.integral,
            std_error: 2.0 / 3.0 * k.error_estimate,
            samples: 0,
            method: HaarMethod::Analytic,
        });
    }
    if haar.samples < 2 {
        return Err(Error::InvalidParameter(
            "Monte Carlo needs at least 2 samples".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(haar.seed);
    let states: Vec<InitialState> = (0..haar.samples)
        .map(|_| {
            let u: f64 = rng.random_range(-1.0..=1.0);
            let beta: f64 = rng.random_range(0.0..TAU);
            InitialState {
                alpha: u.acos(),
                beta,
            }
        })
        .collect();
    let ks: Vec<f64> = states
        .par_iter()
        .map(|s| {
            let one = PulseSequence {
                initial_state: *s,
                ..seq.clone()
            };
            integrate_iqfi(&one, signal, cfg).map(|k| k.integral)
        })
        .collect::<Result<_>>()?;
    let n = ks.len() as f64;
    let mean = pairwise_sum(&ks) / n;
    let dev: Vec<f64> = ks.iter().map(|k| (k - mean) * (k - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    let std_error = (var / n).sqrt();
    if std_error > haar.target_rel_error * mean.abs() {
        return Err(Error::MonteCarlo { mean, std_error });
    }
    Ok(HaarAverage {
        mean,
        std_error,
        samples: haar.samples,
        method: HaarMethod::MonteCarlo,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub k: Option<f64>,
    pub k_err: Option<f64>,
    /// Why this point failed, if it did.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// `[T_lo, T_hi]` used for the slope fit.
    pub window: (f64, f64),
    /// Least-squares slope of `ln K` against `ln T` inside `window`.
    pub slope: Option<f64>,
}

impl SweepTable {
    pub fn in_window(&self, t: f64) -> bool {
        t >= self.window.0 && t <= self.window.1
    }
}

/// `K(T)` over `ts` for a protocol family, plus the log-log slope over
/// `window` (defaults to the full range). Failed points are recorded and do
/// not stop the sweep.
pub fn sweep_iqfi_vs_t<P, F>(
    family: F,
    ts: &[f64],
    signal: &SignalParams,
    cfg: &QuadratureConfig,
    window: Option<(f64, f64)>,
) -> Result<SweepTable>
where
    P: Protocol,
    F: Fn(f64) -> Result<P> + Sync,
{
    if ts.is_empty() {
        return Err(Error::InvalidParameter("no T values".into()));
    }
    if let Some(i) = (1..ts.len()).find(|&i| !(ts[i] > ts[i - 1])) {
        return Err(Error::Ordering {
            index: i,
            prev: ts[i - 1],
            next: ts[i],
        });
    }
    let window = window.unwrap_or((ts[0], ts[ts.len() - 1]));
    let rows: Vec<SweepRow> = ts
        .par_iter()
        .map(
            |&t| match family(t).and_then(|p| integrate_iqfi(&p, signal, cfg)) {
                Ok(s) => SweepRow {
                    t,
                    k: Some(s.integral),
                    k_err: Some(s.error_estimate),
                    error: None,
                },
                Err(e) => SweepRow {
                    t,
                    k: None,
                    k_err: None,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect();
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.t >= window.0 && r.t <= window.1)
        .filter_map(|r| r.k.filter(|k| *k > 0.0).map(|k| (r.t.ln(), k.ln())))
        .collect();
    Ok(SweepTable {
        rows,
        window,
        slope: loglog_slope(&pts),
    })
}

/// Least-squares slope through `(x, y)` points; `None` with fewer than two
/// distinct abscissae.
pub fn loglog_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `2πζ²T`, the IQFI of Ramsey and of any equatorial π-train.
pub fn linear_reference(total_time: f64, zeta: f64) -> f64 {
    2.0 * PI * zeta * zeta * total_time
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{make_pi_train, make_ramsey, Axis};

    #[test]
    fn ramsey_linear_in_t() {
        let cfg = QuadratureConfig::default();
        for t in [1.0, 3.0] {
            let k = integrate_iqfi(&make_ramsey(t).unwrap(), &SignalParams::dc(0.0), &cfg).unwrap();
            let exact = linear_reference(t, 1.0);
            assert!(
                (k.integral - exact).abs() < 1e-3 * exact,
                "{} vs {exact}",
                k.integral
            );
            assert!(k.error_estimate <= 1e-4 * k.integral * 1.0001);
            assert!(k.values.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn spectrum_peak_and_grid() {
        let seq = make_ramsey(2.0).unwrap();
        let k = integrate_iqfi(&seq, &SignalParams::dc(1.0), &QuadratureConfig::default()).unwrap();
        let (w, v) = k.peak().unwrap();
        assert!(w < 0.1 && (v - 16.0).abs() < 0.1);
        let grid = linear_grid(0.0, 5.0, 6).unwrap();
        let j = qfi_on_grid(&seq, &SignalParams::dc(1.0), &grid).unwrap();
        assert_eq!(j.len(), 6);
        assert!((j[0] - 16.0).abs() < 1e-12);
        assert!(linear_grid(1.0, 1.0, 4).is_err());
    }

    #[test]
    fn cross_spectral_cases() {
        assert_eq!(cross_spectral_integral(3.0, 5.0).unwrap(), 1.5 * PI);
        assert_eq!(cross_spectral_integral(0.0, 5.0).unwrap(), 0.0);
        assert!(cross_spectral_integral(-1.0, 1.0).is_err());
        let cfg = QuadratureConfig::default();
        let n = cross_spectral_numeric(3.0, 5.0, &cfg).unwrap().integral;
        assert!((n - 1.5 * PI).abs() < 1e-3 * 1.5 * PI, "{n}");
        assert_eq!(
            cross_spectral_numeric(0.0, 5.0, &cfg).unwrap().integral,
            0.0
        );
    }

    #[test]
    fn haar_analytic_for_pi_train() {
        let seq = make_pi_train(&[1.0, 2.0, 3.0], Axis::X, 4.0).unwrap();
        let h = haar_average_iqfi(
            &seq,
            &SignalParams::dc(0.0),
            &QuadratureConfig::default(),
            &HaarConfig::default(),
        )
        .unwrap();
        assert_eq!(h.method, HaarMethod::Analytic);
        let exact = 4.0 * PI * 4.0 / 3.0;
        assert!((h.mean - exact).abs() < 1e-3 * exact);
    }

    #[test]
    fn sweep_reports_slope_and_failures() {
        let ts = [1.0, 2.0, 4.0];
        let table = sweep_iqfi_vs_t(
            make_ramsey,
            &ts,
            &SignalParams::dc(0.0),
            &QuadratureConfig::default(),
            None,
        )
        .unwrap();
        assert!((table.slope.unwrap() - 1.0).abs() < 1e-3);
        let failing = |t: f64| make_ramsey(if t > 1.5 { -t } else { t });
        let table = sweep_iqfi_vs_t(
            failing,
            &ts,
            &SignalParams::dc(0.0),
            &QuadratureConfig::default(),
            None,
        )
        .unwrap();
        assert!(table.rows[1].error.is_some() && table.rows[0].k.is_some());
        assert!(table.slope.is_none());
        assert!(sweep_iqfi_vs_t(
            make_ramsey,
            &[2.0, 1.0],
            &SignalParams::dc(0.0),
            &QuadratureConfig::default(),
            None
        )
        .is_err());
    }

    #[test]
    fn slope_of_line() {
        let pts: Vec<(f64, f64)> = (1..5).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&pts[..1]).is_none());
    }
}
