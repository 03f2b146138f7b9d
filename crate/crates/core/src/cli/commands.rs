use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::config::{parse_list, ConfigFile};
use super::{CliError, CommandKind, CommonArgs, THREADS_ENV};
use crate::bounds::{self, BoundReport};
use crate::error::Result;
use crate::evolution::{ContinuousProtocol, GhzProtocol, Protocol, SensorState, DEFAULT_ODE_TOL};
use crate::iqfi::{
    haar_average_iqfi, integrate_iqfi, linear_grid, qfi_on_grid, spectrum_csv, sweep_csv,
    sweep_iqfi_vs_t, write_atomic, HaarConfig, QuadratureConfig, CSV_VERSION_LINE,
};
use crate::protocol::{
    make_pi2_train, make_pi_train, make_ramsey, make_trotterized_gx, Axis, DecodedProtocol,
    ProtocolDocument, PulseSequence,
};
use crate::signal::SignalParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolName {
    Ramsey,
    PiTrain,
    Pi2Train,
    Gx,
    TrotterGx,
    Ghz,
}

impl ProtocolName {
    pub fn parse(s: &str) -> Option<Self> {
        Some(
            match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
                "ramsey" => Self::Ramsey,
                "pi-train" => Self::PiTrain,
                "pi2-train" => Self::Pi2Train,
                "gx" => Self::Gx,
                "trotter-gx" => Self::TrotterGx,
                "ghz" => Self::Ghz,
                _ => return None,
            },
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ramsey => "ramsey",
            Self::PiTrain => "pi-train",
            Self::Pi2Train => "pi2-train",
            Self::Gx => "gx",
            Self::TrotterGx => "trotter-gx",
            Self::Ghz => "ghz",
        }
    }
}

/// Any protocol the CLI can build.
#[derive(Debug, Clone)]
pub enum AnyProtocol {
    Discrete(PulseSequence),
    Continuous(ContinuousProtocol),
    Ghz(GhzProtocol),
}

impl Protocol for AnyProtocol {
    fn check(&self) -> Result<()> {
        self.inner().check()
    }
    fn evolve(&self, signal: &SignalParams) -> Result<SensorState> {
        self.inner().evolve(signal)
    }
    fn total_time(&self) -> f64 {
        self.inner().total_time()
    }
    fn feature_frequency(&self, signal: &SignalParams) -> f64 {
        self.inner().feature_frequency(signal)
    }
}

impl AnyProtocol {
    fn inner(&self) -> &dyn Protocol {
        match self {
            AnyProtocol::Discrete(p) => p,
            AnyProtocol::Continuous(p) => p,
            AnyProtocol::Ghz(p) => p,
        }
    }
}

/// Flags merged with the config file and defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub protocol: ProtocolName,
    pub protocol_file: Option<PathBuf>,
    pub total_time: f64,
    pub t_values: Vec<f64>,
    pub b: f64,
    pub b_values: Vec<f64>,
    pub zeta: f64,
    pub phi: f64,
    pub g: f64,
    pub m: Option<usize>,
    pub n: usize,
    pub spacing: Option<f64>,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub window: Option<(f64, f64)>,
    pub quadrature: QuadratureConfig,
    pub seed: u64,
    pub samples: usize,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn pick<T: std::str::FromStr>(
    flag: Option<T>,
    file: &ConfigFile,
    key: &str,
) -> std::result::Result<Option<T>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => Ok(file.get(key)?),
    }
}

fn pick_str(flag: &Option<String>, file: &ConfigFile, key: &str) -> Option<String> {
    flag.clone().or_else(|| file.raw(key).map(str::to_string))
}

const KNOWN_KEYS: &[&str] = &[
    "protocol",
    "protocol_file",
    "t",
    "t_values",
    "b",
    "b_values",
    "zeta",
    "phi",
    "g",
    "m",
    "n",
    "spacing",
    "omega_min",
    "omega_max",
    "omega_points",
    "window",
    "rel_tol",
    "max_panels",
    "seed",
    "samples",
    "jobs",
    "out",
    "format",
];

impl RunConfig {
    pub fn resolve(kind: CommandKind, a: &CommonArgs) -> std::result::Result<Self, CliError> {
        let file = match &a.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        if let Some(k) = file.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(CliError::Config(format!("unknown config key '{k}'")));
        }
        let cfg_err = |m: String| CliError::Config(m);

        let protocol = match pick_str(&a.protocol, &file, "protocol") {
            Some(s) => {
                ProtocolName::parse(&s).ok_or_else(|| cfg_err(format!("unknown protocol '{s}'")))?
            }
            None => ProtocolName::Ramsey,
        };
        let protocol_file = a
            .protocol_file
            .clone()
            .or_else(|| file.raw("protocol_file").map(PathBuf::from));

        let fig = matches!(kind, CommandKind::Fig1 | CommandKind::Fig2);
        let default_b = if fig { 1.0 } else { 0.0 };
        let total_time = pick(a.t, &file, "t")?.unwrap_or(4.0);
        let b = pick(a.b, &file, "b")?.unwrap_or(default_b);
        let zeta = pick(a.zeta, &file, "zeta")?.unwrap_or(1.0);
        let phi = pick(a.phi, &file, "phi")?.unwrap_or(0.0);
        let g = pick(a.g, &file, "g")?.unwrap_or(FRAC_PI_2);
        let m = pick(a.m, &file, "m")?;
        let n = pick(a.n, &file, "n")?.unwrap_or(2);
        let spacing = pick(a.spacing, &file, "spacing")?;

        let t_values = match pick_str(&a.t_values, &file, "t_values") {
            Some(s) => parse_list(&s)?,
            None if kind == CommandKind::Fig1 => (1..=16).map(|k| 2.0 * k as f64).collect(),
            None if kind == CommandKind::Fig2 => vec![2.0, 4.0, 6.0, 8.0],
            None => vec![total_time],
        };
        let b_values = match pick_str(&a.b_values, &file, "b_values") {
            Some(s) => parse_list(&s)?,
            None if kind == CommandKind::Fig1 => vec![0.0, 0.01, 0.1, 1.0]
                .into_iter()
                .map(|zb| zb / zeta)
                .collect(),
            None => vec![b],
        };
        let window = match pick_str(&a.window, &file, "window") {
            Some(s) => match parse_list(&s)?.as_slice() {
                [lo, hi] if lo < hi => Some((*lo, *hi)),
                _ => return Err(cfg_err(format!("window must be 'lo,hi', got '{s}'"))),
            },
            None if kind == CommandKind::Fig1 => Some((8.0, 32.0)),
            None => None,
        };

        let omega_min = pick(a.omega_min, &file, "omega_min")?.unwrap_or(0.0);
        let omega_max = pick(a.omega_max, &file, "omega_max")?.unwrap_or(10.0);
        let omega_points = pick(a.omega_points, &file, "omega_points")?.unwrap_or(501);
        let rel_tol =
            pick(a.rel_tol, &file, "rel_tol")?.unwrap_or(QuadratureConfig::default().rel_tol);
        let max_panels = pick(a.max_panels, &file, "max_panels")?
            .unwrap_or(QuadratureConfig::default().max_panels);
        if max_panels == 0 {
            return Err(cfg_err("max-panels must be >= 1".into()));
        }
        let seed = pick(a.seed, &file, "seed")?.unwrap_or(1);
        let samples = pick(a.samples, &file, "samples")?.unwrap_or(HaarConfig::default().samples);
        let jobs = match pick(a.jobs, &file, "jobs")? {
            Some(j) => Some(j),
            None => match std::env::var(THREADS_ENV) {
                Ok(v) if !v.trim().is_empty() => Some(
                    v.trim()
                        .parse()
                        .map_err(|_| cfg_err(format!("{THREADS_ENV}={v} is not a count")))?,
                ),
                _ => None,
            },
        };
        if jobs == Some(0) {
            return Err(cfg_err("jobs must be >= 1".into()));
        }
        let out = a.out.clone().or_else(|| file.raw("out").map(PathBuf::from));
        let format = match pick_str(&a.format, &file, "format").as_deref() {
            None => {
                if matches!(
                    kind,
                    CommandKind::BoundsCheck | CommandKind::Iqfi | CommandKind::Haar
                ) {
                    Format::Json
                } else {
                    Format::Csv
                }
            }
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(cfg_err(format!("unsupported format '{other}'"))),
        };

        let positive = [("T", total_time), ("zeta", zeta), ("rel-tol", rel_tol)];
        if let Some((k, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(cfg_err(format!("{k} must be > 0, got {v}")));
        }
        if t_values.is_empty() || t_values.iter().any(|t| !(*t > 0.0)) {
            return Err(cfg_err("T values must be > 0".into()));
        }
        if !(b.is_finite() && phi.is_finite() && g.is_finite()) {
            return Err(cfg_err("B, phi and g must be finite".into()));
        }
        if fig && out.is_none() {
            return Err(cfg_err("fig1 and fig2 need --out <directory>".into()));
        }
        Ok(Self {
            protocol,
            protocol_file,
            total_time,
            t_values,
            b,
            b_values,
            zeta,
            phi,
            g,
            m,
            n,
            spacing,
            omega_min,
            omega_max,
            omega_points,
            window,
            quadrature: QuadratureConfig {
                rel_tol,
                max_panels,
                ..Default::default()
            },
            seed,
            samples,
            jobs,
            out,
            format,
        })
    }

    pub fn signal(&self, b: f64) -> Result<SignalParams> {
        SignalParams::new(b, 0.0, self.phi, self.zeta)
    }

    /// The configured protocol at duration `t`.
    pub fn build(&self, t: f64) -> Result<AnyProtocol> {
        if let Some(path) = &self.protocol_file {
            let doc = ProtocolDocument::from_json(&std::fs::read_to_string(path)?)?;
            return Ok(match doc.decode()? {
                DecodedProtocol::Discrete(s) => AnyProtocol::Discrete(s),
                DecodedProtocol::Continuous(c) => {
                    AnyProtocol::Continuous(ContinuousProtocol::new(c, DEFAULT_ODE_TOL)?)
                }
            });
        }
        self.build_named(self.protocol, t)
    }

    pub fn build_named(&self, name: ProtocolName, t: f64) -> Result<AnyProtocol> {
        Ok(match name {
            ProtocolName::Ramsey => AnyProtocol::Discrete(make_ramsey(t)?),
            ProtocolName::PiTrain => AnyProtocol::Discrete(make_pi_train(
                &train_times(self.spacing.unwrap_or(1.0), t)?,
                Axis::X,
                t,
            )?),
            ProtocolName::Pi2Train => {
                AnyProtocol::Discrete(make_pi2_train(self.spacing.unwrap_or(0.5), t)?)
            }
            ProtocolName::Gx => {
                AnyProtocol::Continuous(ContinuousProtocol::transverse_drive(self.g, t)?)
            }
            ProtocolName::TrotterGx => {
                let m = self
                    .m
                    .unwrap_or_else(|| (2.0 * t).round().max(1.0) as usize);
                AnyProtocol::Discrete(make_trotterized_gx(t, m, self.g)?)
            }
            ProtocolName::Ghz => AnyProtocol::Ghz(GhzProtocol::free(self.n, vec![0.0, t])?),
        })
    }

    fn name(&self) -> String {
        match &self.protocol_file {
            Some(p) => p.display().to_string(),
            None => self.protocol.as_str().to_string(),
        }
    }
}

/// `spacing, 2·spacing, …` up to `T`, always ending with a pulse at `T`.
fn train_times(spacing: f64, t: f64) -> Result<Vec<f64>> {
    if !(spacing > 0.0) {
        return Err(crate::error::Error::InvalidParameter(format!(
            "spacing must be > 0, got {spacing}"
        )));
    }
    let mut times: Vec<f64> = (1..)
        .map(|k| k as f64 * spacing)
        .take_while(|x| *x < t * (1.0 - 1e-12))
        .collect();
    times.push(t);
    Ok(times)
}

pub fn dispatch(kind: CommandKind, cfg: &RunConfig) -> std::result::Result<(), CliError> {
    match kind {
        CommandKind::Spectrum => spectrum(cfg),
        CommandKind::Iqfi => iqfi(cfg),
        CommandKind::Fig1 => fig1(cfg),
        CommandKind::Fig2 => fig2(cfg),
        CommandKind::BoundsCheck => bounds_check(cfg),
        CommandKind::Haar => haar(cfg),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> std::result::Result<(), CliError> {
    match &cfg.out {
        Some(p) => write_atomic(p, text).map_err(CliError::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_to(dir: &Path, file: &str, text: &str) -> std::result::Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write_atomic(&dir.join(file), text).map_err(CliError::from)
}

fn pretty(v: &impl serde::Serialize) -> std::result::Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn grid(cfg: &RunConfig) -> Result<Vec<f64>> {
    linear_grid(cfg.omega_min, cfg.omega_max, cfg.omega_points)
}

fn spectrum(cfg: &RunConfig) -> std::result::Result<(), CliError> {
    let p = cfg.build(cfg.total_time)?;
    let omegas = grid(cfg)?;
    let values = qfi_on_grid(&p, &cfg.signal(cfg.b)?, &omegas)?;
    let text = match cfg.format {
        Format::Csv => spectrum_csv(&omegas, &values),
        Format::Json => pretty(&json!({
            "version": CSV_VERSION_LINE.trim_start_matches("# "),
            "protocol": cfg.name(),
            "T": p.total_time(),
            "B": cfg.b,
            "zeta": cfg.zeta,
            "phi": cfg.phi,
            "omega": omegas,
            "J": values,
        }))?,
    };
    emit(cfg, &text)
}

fn applicable_bounds(cfg: &RunConfig, p: &AnyProtocol, k: f64, slack: f64) -> Vec<BoundReport> {
    let t = p.total_time();
    let zeta = cfg.zeta;
    let mut out = Vec::new();
    match p {
        AnyProtocol::Discrete(seq) => {
            out.push(BoundReport::upper(
                "n_pulse",
                k,
                bounds::n_pulse_bound(seq.active_segments().max(1), t - seq.start_time, zeta),
                slack,
            ));
            if cfg.protocol_file.is_none() && cfg.protocol == ProtocolName::Ramsey {
                out.push(BoundReport::equality(
                    "ramsey_closed_form",
                    k,
                    bounds::ramsey_closed_form(t, cfg.phi, zeta),
                    0.005,
                ));
            }
        }
        AnyProtocol::Ghz(g) => {
            let (ent, _) = bounds::ghz_scaling(g.n, t, zeta);
            out.push(BoundReport::upper("ghz_n_pulse", k, ent, slack));
        }
        AnyProtocol::Continuous(_) => {}
    }
    let n = if let AnyProtocol::Ghz(g) = p {
        g.n as f64
    } else {
        1.0
    };
    if (n * zeta * cfg.b * t).abs() <= 0.1 && !matches!(p, AnyProtocol::Ghz(_)) {
        out.push(BoundReport::upper(
            "weak_field",
            k,
            bounds::b0_linear_bound(t, cfg.b, zeta),
            slack,
        ));
    }
    out
}

fn iqfi(cfg: &RunConfig) -> std::result::Result<(), CliError> {
    let p = cfg.build(cfg.total_time)?;
    let k = integrate_iqfi(&p, &cfg.signal(cfg.b)?, &cfg.quadrature)?;
    let slack = k.error_estimate.max(cfg.quadrature.rel_tol * k.integral);
    let reports = applicable_bounds(cfg, &p, k.integral, slack);
    let text = match cfg.format {
        Format::Json => pretty(&json!({
            "protocol": cfg.name(),
            "T": p.total_time(),
            "B": cfg.b,
            "zeta": cfg.zeta,
            "phi": cfg.phi,
            "K": k.integral,
            "error_estimate": k.error_estimate,
            "tail_coefficient": k.tail_coefficient,
            "tail_start": k.tail_start,
            "panels": k.panels,
            "bounds": reports,
        }))?,
        Format::Csv => {
            let mut s = format!("{CSV_VERSION_LINE}\nquantity,value\n");
            let _ = writeln!(s, "K,{}", k.integral);
            let _ = writeln!(s, "K_err,{}", k.error_estimate);
            let _ = writeln!(s, "tail_coefficient,{}", k.tail_coefficient);
            for r in &reports {
                let _ = writeln!(s, "margin:{},{}", r.name, r.margin);
            }
            s
        }
    };
    emit(cfg, &text)
}

fn fig1(cfg: &RunConfig) -> std::result::Result<(), CliError> {
    let dir = cfg.out.as_deref().expect("checked in resolve");
    let family = |t: f64| -> Result<PulseSequence> {
        let m = cfg.m.unwrap_or_else(|| (2.0 * t).round().max(1.0) as usize);
        make_trotterized_gx(t, m, cfg.g)
    };
    let mut all = Vec::new();
    for &b in &cfg.b_values {
        let table = sweep_iqfi_vs_t(
            family,
            &cfg.t_values,
            &cfg.signal(b)?,
            &cfg.quadrature,
            cfg.window,
        )?;
        let zb = cfg.zeta * b;
        for r in table.rows.iter().filter(|r| r.error.is_some()) {
            eprintln!(
                "iqfi-lab: fig1 zetaB={zb} T={}: {}",
                r.t,
                r.error.as_deref().unwrap_or("")
            );
        }
        match table.slope {
            Some(s) => println!("zetaB={zb} slope={s}"),
            None => println!("zetaB={zb} slope=n/a"),
        }
        if cfg.format == Format::Csv {
            emit_to(dir, &format!("fig1_zb{zb}.csv"), &sweep_csv(&table))?;
        }
        all.push(json!({ "zeta_b": zb, "table": table }));
    }
    if cfg.format == Format::Json {
        emit_to(dir, "fig1.json", &pretty(&all)?)?;
    }
    Ok(())
}

const FIG2_PROTOCOLS: [ProtocolName; 4] = [
    ProtocolName::Ramsey,
    ProtocolName::PiTrain,
    ProtocolName::Pi2Train,
    ProtocolName::Gx,
];

fn fig2(cfg: &RunConfig) -> std::result::Result<(), CliError> {
    let dir = cfg.out.as_deref().expect("checked in resolve");
    let omegas = grid(cfg)?;
    let signal = cfg.signal(cfg.b)?;
    for &t in &cfg.t_values {
        let mut panel = Vec::new();
        for name in FIG2_PROTOCOLS {
            let p = cfg.build_named(name, t)?;
            let values = qfi_on_grid(&p, &signal, &omegas)?;
            if cfg.format == Format::Csv {
                emit_to(
                    dir,
                    &format!("fig2_T{t}_{}.csv", name.as_str()),
                    &spectrum_csv(&omegas, &values),
                )?;
            }
            panel.push(json!({ "protocol": name.as_str(), "J": values }));
        }
        if cfg.format == Format::Json {
            let doc = json!({ "T": t, "B": cfg.b, "zeta": cfg.zeta, "g": cfg.g, "omega": omegas, "spectra": panel });
            emit_to(dir, &format!("fig2_T{t}.json"), &pretty(&doc)?)?;
        }
    }
    Ok(())
}

fn bounds_check(cfg: &RunConfig) -> std::result::Result<(), CliError> {
    let battery = bounds::BatteryConfig {
        seed: cfg.seed,
        quadrature: cfg.quadrature,
        total_time: cfg.total_time,
        zeta: cfg.zeta,
        ..Default::default()
    };
    let reports = bounds::battery(&battery)?;
    let text = match cfg.format {
        Format::Json => pretty(&reports)?,
        Format::Csv => {
            let mut s =
                format!("{CSV_VERSION_LINE}\nname,measured,bound_or_reference,satisfied,margin\n");
            for r in &reports {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.name, r.measured, r.bound_or_reference, r.satisfied, r.margin
                );
            }
            s
        }
    };
    emit(cfg, &text)?;
    let failed = reports.iter().filter(|r| !r.satisfied).count();
    if failed > 0 {
        for r in reports.iter().filter(|r| !r.satisfied) {
            eprintln!(
                "iqfi-lab: violated {} (measured {}, bound {})",
                r.name, r.measured, r.bound_or_reference
            );
        }
        return Err(CliError::Violation(failed));
    }
    Ok(())
}

fn haar(cfg: &RunConfig) -> std::result::Result<(), CliError> {
    let AnyProtocol::Discrete(seq) = cfg.build(cfg.total_time)? else {
        return Err(CliError::Config(
            "haar needs a pulse-sequence protocol".into(),
        ));
    };
    let h = haar_average_iqfi(
        &seq,
        &cfg.signal(cfg.b)?,
        &cfg.quadrature,
        &HaarConfig {
            samples: cfg.samples,
            seed: cfg.seed,
            ..Default::default()
        },
    )?;
    let reference = 4.0 * PI * cfg.zeta * cfg.zeta * (seq.total_time - seq.start_time) / 3.0;
    let text = match cfg.format {
        Format::Json => pretty(&json!({
            "protocol": cfg.name(),
            "T": seq.total_time,
            "mean": h.mean,
            "std_error": h.std_error,
            "samples": h.samples,
            "method": h.method,
            "pi_train_reference": reference,
        }))?,
        Format::Csv => format!(
            "{CSV_VERSION_LINE}\nquantity,value\nmean,{}\nstd_error,{}\nsamples,{}\npi_train_reference,{reference}\n",
            h.mean, h.std_error, h.samples
        ),
    };
    emit(cfg, &text)
}
