//! Parameter sweeps, table output and the crossover presets.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::probe::{Parity, ProbeSpec};
use crate::qcrb::{crossover_mean_photon, Crossover, Curve, QcrbResult};

pub const CSV_HEADER: [&str; 13] = [
    "r",
    "T",
    "n",
    "d",
    "parity",
    "eta",
    "total_mean",
    "f_d",
    "f_o",
    "qcrb",
    "eps_opt",
    "route_deviation",
    "flags",
];

/// `start:stop:step`, inclusive of `stop` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + self.step * i as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::Config(format!("grid step must be positive, got {}", self.step)));
        }
        if !(self.stop >= self.start) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Config(format!(
                "grid stop {} is before start {}",
                self.stop, self.start
            )));
        }
        Ok(())
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let parse = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{p}` is not a number")))
        };
        let grid = match parts.as_slice() {
            [single] => {
                let x = parse(single)?;
                Grid { start: x, stop: x, step: 1.0 }
            }
            [a, b, step] => Grid {
                start: parse(a)?,
                stop: parse(b)?,
                step: parse(step)?,
            },
            _ => return Err(Error::Config(format!("expected start:stop:step, got `{s}`"))),
        };
        grid.validate()?;
        Ok(grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format `{other}` (csv | json)"))),
        }
    }
}

/// What the `r` grid ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    R,
    /// Grid values are total mean photon numbers, mapped back to `r`.
    Mean,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r" => Ok(Axis::R),
            "mean" | "total_mean" => Ok(Axis::Mean),
            other => Err(Error::Config(format!("unknown axis `{other}` (r | mean)"))),
        }
    }
}

/// One `key = value` setting and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    /// e.g. `config.txt:3` or `--T`.
    pub origin: String,
}

/// Flat `key = value` text; `#` starts a comment.
pub fn parse_config_text(text: &str, source: &str) -> Result<Vec<Entry>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{source}:{}: expected `key = value`, got `{line}`",
                i + 1
            )));
        };
        entries.push(Entry {
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            origin: format!("{source}:{}", i + 1),
        });
    }
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub grid: Grid,
    pub t: Vec<f64>,
    pub n: Vec<usize>,
    pub d: usize,
    /// Empty for the lossless bound.
    pub eta: Vec<f64>,
    pub parity: Parity,
    pub axis: Axis,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid: Grid {
                start: 0.1,
                stop: 1.5,
                step: 0.1,
            },
            t: vec![0.9],
            n: vec![1],
            d: 5,
            eta: Vec::new(),
            parity: Parity::Symmetric,
            axis: Axis::R,
            format: Format::Csv,
            out: None,
            threads: None,
        }
    }
}

fn parse_list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|v| v.trim().parse::<T>().map_err(|_| format!("`{}` is not valid", v.trim())))
        .collect()
}

impl SweepConfig {
    /// Defaults overridden by `entries` in order (later entries win).
    pub fn from_entries(entries: &[Entry]) -> Result<Self> {
        let mut cfg = Self::default();
        for e in entries {
            let fail = |msg: String| Error::Config(format!("{}: `{}`: {msg}", e.origin, e.key));
            let v = e.value.as_str();
            match e.key.as_str() {
                "r" => cfg.grid = v.parse().map_err(|err: Error| fail(err.to_string()))?,
                "T" | "t" => cfg.t = parse_list(v).map_err(fail)?,
                "n" => cfg.n = parse_list(v).map_err(fail)?,
                "d" => cfg.d = v.parse().map_err(|_| fail(format!("`{v}` is not an integer")))?,
                "eta" => cfg.eta = parse_list(v).map_err(fail)?,
                "parity" => cfg.parity = v.parse().map_err(|err: Error| fail(err.to_string()))?,
                "axis" => cfg.axis = v.parse().map_err(|err: Error| fail(err.to_string()))?,
                "format" => cfg.format = v.parse().map_err(|err: Error| fail(err.to_string()))?,
                "out" => cfg.out = Some(PathBuf::from(v)),
                "threads" => {
                    cfg.threads = Some(v.parse().map_err(|_| fail(format!("`{v}` is not an integer")))?)
                }
                _ => return Err(fail("unknown key".into())),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.axis == Axis::R && self.grid.start < 0.0 {
            return Err(Error::Config(format!("r must be >= 0, grid starts at {}", self.grid.start)));
        }
        if self.t.is_empty() || self.n.is_empty() {
            return Err(Error::Config("T and n lists must be non-empty".into()));
        }
        if let Some(t) = self.t.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(Error::Config(format!("T = {t} is outside 0 < T <= 1")));
        }
        if let Some(e) = self.eta.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::Config(format!("eta = {e} is outside 0 <= eta <= 1")));
        }
        if self.d == 0 {
            return Err(Error::Config("d must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.grid.values().len() * self.t.len() * self.n.len() * self.eta.len().max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    /// `None` when a requested mean photon number could not be mapped to `r`.
    pub r: Option<f64>,
    pub t: f64,
    pub n: usize,
    pub d: usize,
    pub parity: Parity,
    pub eta: Option<f64>,
    pub outcome: std::result::Result<QcrbResult, Error>,
}

impl Record {
    pub fn is_error(&self) -> bool {
        self.outcome.is_err()
    }
}

fn evaluate(cfg: &SweepConfig, x: f64, t: f64, n: usize, eta: Option<f64>) -> Record {
    let base = ProbeSpec {
        r: 0.0,
        t,
        n,
        d: cfg.d,
        parity: cfg.parity,
    };
    let curve = Curve { spec: base, eta };
    let r = match cfg.axis {
        Axis::R => Ok(x),
        Axis::Mean => curve.r_for_mean(x),
    };
    let (r, outcome) = match r {
        Ok(r) => (Some(r), curve.at_r(r)),
        Err(e) => (None, Err(e)),
    };
    Record {
        r,
        t,
        n,
        d: cfg.d,
        parity: cfg.parity,
        eta,
        outcome,
    }
}

/// Evaluates every grid point, ordered by `r` (or mean), then `T`, `n`, `eta`.
/// Failed points are kept as error records.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    let etas: Vec<Option<f64>> = if cfg.eta.is_empty() {
        vec![None]
    } else {
        cfg.eta.iter().map(|&e| Some(e)).collect()
    };
    let mut points = Vec::with_capacity(cfg.point_count());
    for x in cfg.grid.values() {
        for &t in &cfg.t {
            for &n in &cfg.n {
                for &eta in &etas {
                    points.push((x, t, n, eta));
                }
            }
        }
    }
    let run = || -> Vec<Record> {
        points
            .par_iter()
            .map(|&(x, t, n, eta)| evaluate(cfg, x, t, n, eta))
            .collect()
    };
    match cfg.threads {
        None => Ok(run()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn flags(rec: &Record) -> String {
    match &rec.outcome {
        Ok(_) => String::new(),
        Err(e) => format!("error={}: {e}", e.code()),
    }
}

fn csv_row(rec: &Record) -> Vec<String> {
    let q = rec.outcome.as_ref().ok();
    vec![
        opt(rec.r),
        num(rec.t),
        rec.n.to_string(),
        rec.d.to_string(),
        rec.parity.to_string(),
        opt(rec.eta),
        opt(q.map(|q| q.total_mean)),
        opt(q.map(|q| q.f_d)),
        opt(q.map(|q| q.f_o)),
        opt(q.map(|q| q.trace_inv)),
        opt(q.and_then(|q| q.eps_opt)),
        opt(q.and_then(|q| q.route_deviation)),
        flags(rec),
    ]
}

fn json_row(rec: &Record) -> Value {
    let q = rec.outcome.as_ref().ok();
    let f = |x: Option<f64>| x.map(Value::from).unwrap_or(Value::Null);
    let mut m = Map::new();
    m.insert("r".into(), f(rec.r));
    m.insert("T".into(), f(Some(rec.t)));
    m.insert("n".into(), rec.n.into());
    m.insert("d".into(), rec.d.into());
    m.insert("parity".into(), rec.parity.to_string().into());
    m.insert("eta".into(), f(rec.eta));
    m.insert("total_mean".into(), f(q.map(|q| q.total_mean)));
    m.insert("f_d".into(), f(q.map(|q| q.f_d)));
    m.insert("f_o".into(), f(q.map(|q| q.f_o)));
    m.insert("qcrb".into(), f(q.map(|q| q.trace_inv)));
    m.insert("eps_opt".into(), f(q.and_then(|q| q.eps_opt)));
    m.insert("route_deviation".into(), f(q.and_then(|q| q.route_deviation)));
    m.insert("flags".into(), flags(rec).into());
    Value::Object(m)
}

/// CSV numbers use 17 significant digits; JSON numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn emit_table(records: &[Record], format: Format, out: impl Write) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for rec in records {
                w.write_record(csv_row(rec))?;
            }
            w.flush()
        }
        Format::Json => {
            let rows: Vec<Value> = records.iter().map(json_row).collect();
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig6a,
    Fig7,
    Fig8a,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fig6a, Preset::Fig7, Preset::Fig8a];
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Fig6a => "fig6a",
            Preset::Fig7 => "fig7",
            Preset::Fig8a => "fig8a",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig6a" => Ok(Preset::Fig6a),
            "fig7" => Ok(Preset::Fig7),
            "fig8a" => Ok(Preset::Fig8a),
            other => Err(Error::Config(format!("unknown preset `{other}` (fig6a | fig7 | fig8a)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CrossoverEntry {
    pub label: String,
    pub quoted: f64,
    pub tolerance: f64,
    pub measured: std::result::Result<Crossover, Error>,
    /// Closed-form vs matrix-route deviation of the lossless catalyzed bound
    /// at the crossing point.
    pub route_deviation: Option<f64>,
}

impl CrossoverEntry {
    pub fn deviation(&self) -> Option<f64> {
        self.measured.as_ref().ok().map(|c| c.total_mean - self.quoted)
    }

    pub fn within_tolerance(&self) -> bool {
        self.deviation().is_some_and(|d| d.abs() <= self.tolerance)
    }
}

#[derive(Debug, Clone)]
pub struct CrossoverReport {
    pub preset: Preset,
    pub assumptions: Vec<String>,
    pub window: (f64, f64),
    pub entries: Vec<CrossoverEntry>,
}

impl CrossoverReport {
    pub fn all_within_tolerance(&self) -> bool {
        self.entries.iter().all(CrossoverEntry::within_tolerance)
    }
}

impl fmt::Display for CrossoverReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "preset {}", self.preset)?;
        for a in &self.assumptions {
            writeln!(f, "  assume: {a}")?;
        }
        writeln!(f, "  window: total_mean in [{}, {}]", self.window.0, self.window.1)?;
        for e in &self.entries {
            match &e.measured {
                Ok(c) => writeln!(
                    f,
                    "  {}: measured {:.4} (r = {:.6} / {:.6}), quoted {:.2} ± {:.2}, deviation {:+.4} ({:+.1}%){}, route deviation {:.1e}",
                    e.label,
                    c.total_mean,
                    c.a.spec.r,
                    c.b.spec.r,
                    e.quoted,
                    e.tolerance,
                    c.total_mean - e.quoted,
                    100.0 * (c.total_mean - e.quoted) / e.quoted,
                    if c.clipped { " [window clipped]" } else { "" },
                    e.route_deviation.unwrap_or(f64::NAN),
                )?,
                Err(err) => writeln!(f, "  {}: {err} (quoted {:.2})", e.label, e.quoted)?,
            }
        }
        Ok(())
    }
}

struct Comparison {
    label: String,
    catalyzed: Curve,
    baseline: Curve,
    quoted: f64,
    tolerance: f64,
}

/// Locates the crossings quoted for the figure presets.
///
/// All curves merge as the photon number goes to zero, so each window
/// starts above that region and the first sign change in it is reported.
pub fn find_paper_crossovers(preset: Preset) -> Result<CrossoverReport> {
    let d = 5;
    let t = 0.9;
    let sym = |n| ProbeSpec::new(0.0, t, n, d, Parity::Symmetric);
    let esvs = Curve::lossless(ProbeSpec::esvs(0.0, d, Parity::Symmetric)?);
    let mut assumptions = vec![
        format!("d = {d} estimated phases ({} modes)", d + 1),
        format!("T = {t}"),
        "x axis: total mean photon number over all modes".to_string(),
    ];
    let (window, comparisons) = match preset {
        Preset::Fig6a => {
            assumptions.push("catalyzed: n = 1, eta = 0.9; baseline: lossless symmetric ESVS".into());
            (
                (0.15, 1.0),
                vec![Comparison {
                    label: "n=1 eta=0.9 vs ESVS".into(),
                    catalyzed: Curve::lossy(sym(1)?, 0.9),
                    baseline: esvs,
                    quoted: 0.32,
                    tolerance: 0.05,
                }],
            )
        }
        Preset::Fig7 => {
            assumptions.push("catalyzed: eta = 0.94; baseline: lossless symmetric ESVS".into());
            let quoted = [0.72, 0.90, 0.95];
            let comparisons = (1..=3)
                .map(|n| {
                    Ok(Comparison {
                        label: format!("n={n} eta=0.94 vs ESVS"),
                        catalyzed: Curve::lossy(sym(n)?, 0.94),
                        baseline: esvs,
                        quoted: quoted[n - 1],
                        tolerance: 0.05,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            ((0.2, 2.0), comparisons)
        }
        Preset::Fig8a => {
            assumptions.push(
                "catalyzed: antisymmetric, n = 3, lossless; baseline: lossless antisymmetric ESVS".into(),
            );
            let anti = ProbeSpec::new(0.0, t, 3, d, Parity::Antisymmetric)?;
            (
                (2.5, 8.0),
                vec![Comparison {
                    label: "antisym n=3 vs antisym ESVS".into(),
                    catalyzed: Curve::lossless(anti),
                    baseline: Curve::lossless(ProbeSpec::esvs(0.0, d, Parity::Antisymmetric)?),
                    quoted: 4.13,
                    tolerance: 0.6,
                }],
            )
        }
    };
    let entries = comparisons
        .into_par_iter()
        .map(|c| {
            let measured = crossover_mean_photon(&c.catalyzed, &c.baseline, window.0, window.1);
            let route_deviation = measured.as_ref().ok().and_then(|x| {
                Curve::lossless(c.catalyzed.spec)
                    .at_r(x.a.spec.r)
                    .ok()
                    .and_then(|q| q.route_deviation)
            });
            CrossoverEntry {
                label: c.label,
                quoted: c.quoted,
                tolerance: c.tolerance,
                measured,
                route_deviation,
            }
        })
        .collect();
    Ok(CrossoverReport {
        preset,
        assumptions,
        window,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcrb::qcrb_lossy;

    fn entries(pairs: &[(&str, &str)]) -> Vec<Entry> {
        pairs
            .iter()
            .map(|(k, v)| Entry {
                key: k.to_string(),
                value: v.to_string(),
                origin: format!("--{k}"),
            })
            .collect()
    }

    #[test]
    fn grid_values() {
        let g: Grid = "0.1:0.5:0.1".parse().unwrap();
        assert_eq!(g.values().len(), 5);
        assert_eq!("0.3".parse::<Grid>().unwrap().values(), vec![0.3]);
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("1:0:0.1".parse::<Grid>().is_err());
        assert!("a:b".parse::<Grid>().is_err());
    }

    #[test]
    fn config_file_diagnostics() {
        let text = "# fig 3\nr = 0.1:1:0.1\nT = 0.7, 0.8\nbogus line\n";
        let err = parse_config_text(text, "cfg.txt").unwrap_err();
        assert!(err.to_string().contains("cfg.txt:4"), "{err}");

        let parsed = parse_config_text("T = 0.7, 0\n", "cfg.txt").unwrap();
        let err = SweepConfig::from_entries(&parsed).unwrap_err();
        assert!(err.to_string().contains("T = 0"), "{err}");

        let err = SweepConfig::from_entries(&entries(&[("colour", "red")])).unwrap_err();
        assert!(err.to_string().contains("--colour"), "{err}");
    }

    #[test]
    fn later_entries_override() {
        let cfg = SweepConfig::from_entries(&entries(&[("d", "3"), ("n", "1,2"), ("d", "2")])).unwrap();
        assert_eq!(cfg.d, 2);
        assert_eq!(cfg.n, vec![1, 2]);
    }

    #[test]
    fn fig3_config_has_nine_curves() {
        let cfg = SweepConfig::from_entries(&entries(&[
            ("r", "0.5"),
            ("T", "0.7,0.8,0.9"),
            ("n", "1,2,3"),
            ("d", "5"),
        ]))
        .unwrap();
        assert_eq!(run_sweep(&cfg).unwrap().len(), 9);
    }

    #[test]
    fn single_point_matches_engine() {
        let cfg = SweepConfig::from_entries(&entries(&[("r", "0.5"), ("eta", "0.9")])).unwrap();
        let rec = run_sweep(&cfg).unwrap();
        let expected = qcrb_lossy(&ProbeSpec::new(0.5, 0.9, 1, 5, Parity::Symmetric).unwrap(), 0.9).unwrap();
        assert_eq!(rec.len(), 1);
        assert_eq!(rec[0].outcome.as_ref().unwrap(), &expected);
    }

    #[test]
    fn ordering_and_error_rows() {
        let cfg = SweepConfig::from_entries(&entries(&[
            ("r", "0:0.2:0.1"),
            ("T", "0.8,0.9"),
            ("n", "1,2"),
            ("eta", "0.5,1"),
        ]))
        .unwrap();
        let recs = run_sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 3 * 2 * 2 * 2);
        // r = 0 carries no information: explicit error rows, not dropped
        assert!(recs[..8].iter().all(Record::is_error));
        assert!(recs[8..].iter().all(|r| !r.is_error()));
        let keys: Vec<_> = recs.iter().map(|r| (r.r.unwrap(), r.t, r.n, r.eta.unwrap())).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
    }

    #[test]
    fn serial_equals_parallel() {
        let mut cfg = SweepConfig::from_entries(&entries(&[
            ("r", "0.2:1.0:0.2"),
            ("T", "0.7,0.9"),
            ("n", "1,3"),
            ("eta", "0.9"),
        ]))
        .unwrap();
        cfg.threads = Some(1);
        let serial = run_sweep(&cfg).unwrap();
        cfg.threads = Some(4);
        assert_eq!(run_sweep(&cfg).unwrap(), serial);
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        emit_table(&[], Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), CSV_HEADER.join(",") + "\n");

        let cfg = SweepConfig::from_entries(&entries(&[("r", "0.5"), ("eta", "0.9")])).unwrap();
        let recs = run_sweep(&cfg).unwrap();
        let mut buf = Vec::new();
        emit_table(&recs, Format::Csv, &mut buf).unwrap();
        let mut rdr = csv::Reader::from_reader(buf.as_slice());
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 1);
        let q = recs[0].outcome.as_ref().unwrap();
        assert_eq!(rows[0][9].parse::<f64>().unwrap(), q.trace_inv);
        assert_eq!(rows[0][6].parse::<f64>().unwrap(), q.total_mean);
        assert_eq!(rows[0][10].parse::<f64>().unwrap(), q.eps_opt.unwrap());
    }

    #[test]
    fn json_round_trip() {
        let cfg = SweepConfig::from_entries(&entries(&[("r", "0:0.5:0.5")])).unwrap();
        let recs = run_sweep(&cfg).unwrap();
        let mut buf = Vec::new();
        emit_table(&recs, Format::Json, &mut buf).unwrap();
        let v: Vec<Value> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v[0]["flags"].as_str().unwrap().starts_with("error=singular"));
        let q = recs[1].outcome.as_ref().unwrap();
        assert_eq!(v[1]["qcrb"].as_f64().unwrap(), q.trace_inv);
        let keys: Vec<_> = v[1].as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, CSV_HEADER);
    }

    #[test]
    fn mean_axis_inverts_squeezing() {
        let cfg = SweepConfig::from_entries(&entries(&[("r", "0.3:0.6:0.3"), ("axis", "mean")])).unwrap();
        let recs = run_sweep(&cfg).unwrap();
        for (rec, x) in recs.iter().zip([0.3, 0.6]) {
            let q = rec.outcome.as_ref().unwrap();
            assert!((q.total_mean - x).abs() < 1e-10);
        }
        let cfg = SweepConfig::from_entries(&entries(&[("r", "500"), ("axis", "mean")])).unwrap();
        let recs = run_sweep(&cfg).unwrap();
        assert!(matches!(recs[0].outcome, Err(Error::Domain { .. })));
    }
}
