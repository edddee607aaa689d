//! Experiment configuration files.
//!
//! One `key = value` entry per line; blank lines and lines whose first
//! non-blank character is `#` are ignored. Keys may not repeat, and every key
//! must be used by the chosen `data_source`, `loss` and `eta`:
//!
//! ```text
//! data_source     = synthetic_ridge | synthetic_pca | libsvm
//! libsvm_path     = <path>              # libsvm
//! dim             = <count>             # libsvm, optional
//! n               = <count>             # synthetic
//! d               = <count>             # synthetic
//! noise           = <real>              # synthetic_ridge
//! data_seed       = <integer>           # synthetic
//! loss            = quadratic | pca
//! mu              = <real>              # pca
//! b_seed          = <integer>           # pca
//! lambda          = <real>
//! eta             = auto | <real>
//! tau             = <count>             # eta = auto, optional
//! K H T S         = <count>
//! straggler_p     = <real>
//! straggler_m_min = <real>
//! straggler_m_max = <real>
//! base_round_time = <real>
//! network_latency = <real>
//! engine          = deterministic | threaded
//! mode            = async | sync_barrier | sequential_sdca | sequential_dfsdca
//! seed            = <integer>
//! record_every    = <count>
//! output_path     = <path>
//! trace_path      = <path>              # optional
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dist::{Engine, Mode, StragglerModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Libsvm { path: PathBuf, dim: Option<usize> },
    SyntheticRidge { n: usize, d: usize, noise: f64, seed: u64 },
    SyntheticPca { n: usize, d: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossSetting {
    Quadratic,
    Pca { mu: f64, b_seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaSetting {
    /// Step-size bound with a configured or measured delay bound.
    Auto { tau: Option<u64> },
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Async,
    SyncBarrier,
    SequentialSdca,
    SequentialDfsdca,
}

impl RunMode {
    pub fn cluster_mode(self) -> Option<Mode> {
        match self {
            RunMode::Async => Some(Mode::Async),
            RunMode::SyncBarrier => Some(Mode::SyncBarrier),
            _ => None,
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunMode::Async => "async",
            RunMode::SyncBarrier => "sync_barrier",
            RunMode::SequentialSdca => "sequential_sdca",
            RunMode::SequentialDfsdca => "sequential_dfsdca",
        })
    }
}

impl FromStr for RunMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "async" => Ok(RunMode::Async),
            "sync_barrier" => Ok(RunMode::SyncBarrier),
            "sequential_sdca" => Ok(RunMode::SequentialSdca),
            "sequential_dfsdca" => Ok(RunMode::SequentialDfsdca),
            _ => Err(Error::Config(format!("unknown mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data: DataSource,
    pub loss: LossSetting,
    pub lambda: f64,
    pub eta: EtaSetting,
    pub workers: usize,
    pub local_samples: usize,
    pub epoch_len: usize,
    /// Server epochs; the sequential modes run this many passes of `n` steps.
    pub epochs: usize,
    /// `rng_seed` always equals `seed`.
    pub straggler: StragglerModel,
    pub network_latency: f64,
    pub engine: Engine,
    pub mode: RunMode,
    pub seed: u64,
    pub record_every: usize,
    pub output_path: PathBuf,
    pub trace_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Sets the run seed, which also drives straggler timing.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.straggler.rng_seed = seed;
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn fmt::Display| writeln!(out, "{k} = {v}").unwrap();
        match &self.data {
            DataSource::Libsvm { path, dim } => {
                kv("data_source", &"libsvm");
                kv("libsvm_path", &path.display());
                if let Some(d) = dim {
                    kv("dim", d);
                }
            }
            DataSource::SyntheticRidge { n, d, noise, seed } => {
                kv("data_source", &"synthetic_ridge");
                kv("n", n);
                kv("d", d);
                kv("noise", noise);
                kv("data_seed", seed);
            }
            DataSource::SyntheticPca { n, d, seed } => {
                kv("data_source", &"synthetic_pca");
                kv("n", n);
                kv("d", d);
                kv("data_seed", seed);
            }
        }
        match &self.loss {
            LossSetting::Quadratic => kv("loss", &"quadratic"),
            LossSetting::Pca { mu, b_seed } => {
                kv("loss", &"pca");
                kv("mu", mu);
                kv("b_seed", b_seed);
            }
        }
        kv("lambda", &self.lambda);
        match self.eta {
            EtaSetting::Auto { tau } => {
                kv("eta", &"auto");
                if let Some(t) = tau {
                    kv("tau", &t);
                }
            }
            EtaSetting::Fixed(e) => kv("eta", &e),
        }
        kv("K", &self.workers);
        kv("H", &self.local_samples);
        kv("T", &self.epoch_len);
        kv("S", &self.epochs);
        kv("straggler_p", &self.straggler.p);
        kv("straggler_m_min", &self.straggler.m_min);
        kv("straggler_m_max", &self.straggler.m_max);
        kv("base_round_time", &self.straggler.base_round_time);
        kv("network_latency", &self.network_latency);
        kv("engine", &self.engine);
        kv("mode", &self.mode);
        kv("seed", &self.seed);
        kv("record_every", &self.record_every);
        kv("output_path", &self.output_path.display());
        if let Some(p) = &self.trace_path {
            kv("trace_path", &p.display());
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut e = Entries::read(text)?;
        let data = match e.req("data_source")?.as_str() {
            "libsvm" => DataSource::Libsvm {
                path: e.path("libsvm_path")?,
                dim: e.opt_num("dim")?,
            },
            "synthetic_ridge" => DataSource::SyntheticRidge {
                n: e.num("n")?,
                d: e.num("d")?,
                noise: e.real("noise")?,
                seed: e.num("data_seed")?,
            },
            "synthetic_pca" => DataSource::SyntheticPca {
                n: e.num("n")?,
                d: e.num("d")?,
                seed: e.num("data_seed")?,
            },
            other => return Err(e.bad("data_source", format!("unknown data source '{other}'"))),
        };
        let loss = match e.req("loss")?.as_str() {
            "quadratic" => LossSetting::Quadratic,
            "pca" => LossSetting::Pca {
                mu: e.real("mu")?,
                b_seed: e.num("b_seed")?,
            },
            other => return Err(e.bad("loss", format!("unknown loss '{other}'"))),
        };
        let lambda = e.real("lambda")?;
        let eta = match e.req("eta")?.as_str() {
            "auto" => EtaSetting::Auto {
                tau: e.opt_num("tau")?,
            },
            v => EtaSetting::Fixed(real_value(v).map_err(|m| e.bad("eta", m))?),
        };
        let workers = e.num("K")?;
        let local_samples = e.num("H")?;
        let epoch_len = e.num("T")?;
        let epochs = e.num("S")?;
        let p = e.real("straggler_p")?;
        let m_min = e.real("straggler_m_min")?;
        let m_max = e.real("straggler_m_max")?;
        let base_round_time = e.real("base_round_time")?;
        let network_latency = e.real("network_latency")?;
        let engine = e.parsed::<Engine>("engine")?;
        let mode = e.parsed::<RunMode>("mode")?;
        let seed = e.num("seed")?;
        let record_every = e.num("record_every")?;
        let output_path = e.path("output_path")?;
        let trace_path = match e.take("trace_path") {
            Some(_) => Some(PathBuf::from(e.last_value.clone())),
            None => None,
        };
        e.finish()?;
        Ok(Self {
            data,
            loss,
            lambda,
            eta,
            workers,
            local_samples,
            epoch_len,
            epochs,
            straggler: StragglerModel {
                p,
                m_min,
                m_max,
                base_round_time,
                rng_seed: seed,
            },
            network_latency,
            engine,
            mode,
            seed,
            record_every,
            output_path,
            trace_path,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

fn real_value(v: &str) -> std::result::Result<f64, String> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected a finite real, found '{v}'")),
    }
}

/// Key-value pairs with the line each came from.
struct Entries {
    map: BTreeMap<String, (String, usize)>,
    last_value: String,
}

impl Entries {
    fn read(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line}: expected 'key = value'")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config(format!("line {line}: empty key or value")));
            }
            if let Some((_, first)) = map.insert(key.to_string(), (value.to_string(), line)) {
                return Err(Error::Config(format!(
                    "line {line}: duplicate key '{key}' (first set on line {first})"
                )));
            }
        }
        Ok(Self {
            map,
            last_value: String::new(),
        })
    }

    fn bad(&self, key: &str, msg: String) -> Error {
        Error::Config(format!("{key}: {msg}"))
    }

    fn take(&mut self, key: &str) -> Option<usize> {
        let (v, line) = self.map.remove(key)?;
        self.last_value = v;
        Some(line)
    }

    fn req(&mut self, key: &str) -> Result<String> {
        match self.take(key) {
            Some(_) => Ok(self.last_value.clone()),
            None => Err(Error::Config(format!("missing key '{key}'"))),
        }
    }

    fn parsed<T: FromStr<Err = Error>>(&mut self, key: &str) -> Result<T> {
        self.req(key)?.parse()
    }

    fn with_line<T>(&mut self, key: &str, f: impl FnOnce(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.take(key) {
            Some(line) => f(&self.last_value)
                .map(Some)
                .map_err(|m| Error::Config(format!("line {line}: {key}: {m}"))),
            None => Ok(None),
        }
    }

    fn opt_num<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        self.with_line(key, |v| {
            v.parse::<T>()
                .map_err(|_| format!("expected a non-negative integer, found '{v}'"))
        })
    }

    fn num<T: FromStr>(&mut self, key: &str) -> Result<T> {
        self.opt_num(key)?
            .ok_or_else(|| Error::Config(format!("missing key '{key}'")))
    }

    fn real(&mut self, key: &str) -> Result<f64> {
        self.with_line(key, real_value)?
            .ok_or_else(|| Error::Config(format!("missing key '{key}'")))
    }

    fn path(&mut self, key: &str) -> Result<PathBuf> {
        Ok(PathBuf::from(self.req(key)?))
    }

    /// Rejects keys that were not consumed.
    fn finish(self) -> Result<()> {
        match self.map.iter().min_by_key(|(_, (_, line))| *line) {
            Some((key, (_, line))) => Err(Error::Config(format!(
                "line {line}: unknown or unused key '{key}'"
            ))),
            None => Ok(()),
        }
    }
}
