//! Plain-text run configuration.
//!
//! ```text
//! # comment
//! [model]
//! id = resonance-pi4
//! epsilon = +1
//! zeros = 0, pi/4          # pairs re,im separated by ';'
//!
//! [testfunction.f]
//! kind = bump
//! box = -0.25, 0.25, 0.75, 1.25
//! ```
//!
//! Numbers accept `pi` factors (`pi/4`, `3*pi/8`, `-pi`). Every error names
//! the offending line.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::fields::TestFunction2D;
use crate::scattering_function::{ScatteringFunction, Sign};
use crate::{Error, Result, C64};

pub const DEFAULT_SEED: u64 = 0xD15EA5E;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub id: String,
    pub epsilon: Sign,
    pub a: f64,
    pub mass: f64,
    pub zeros: Vec<C64>,
    pub auto_mirror: bool,
    /// `false` skips the mirror-pairing check (negative controls).
    pub validate: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            id: "model".into(),
            epsilon: Sign::Plus,
            a: 0.0,
            mass: 1.0,
            zeros: Vec::new(),
            auto_mirror: true,
            validate: true,
        }
    }
}

impl ModelConfig {
    pub fn build(&self) -> Result<ScatteringFunction> {
        if self.validate {
            ScatteringFunction::build(self.epsilon, self.a, &self.zeros, self.mass, self.auto_mirror)
        } else {
            ScatteringFunction::unvalidated(self.epsilon, self.a, &self.zeros, self.mass)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub half_width: f64,
    pub count: usize,
    pub n_max: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            half_width: 6.0,
            count: 41,
            n_max: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunctionShape {
    Gaussian { center: [f64; 2], sigma: f64, q: [f64; 2] },
    Bump { bx: [f64; 4], order: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionConfig {
    pub shape: TestFunctionShape,
    pub amplitude: C64,
}

impl TestFunctionConfig {
    pub fn build(&self) -> Result<TestFunction2D> {
        match self.shape {
            TestFunctionShape::Gaussian { center, sigma, q } => {
                TestFunction2D::gaussian(center, sigma, q, self.amplitude)
            }
            TestFunctionShape::Bump { bx, order } => {
                Ok(TestFunction2D::bump(bx, order)?.with_amplitude(self.amplitude))
            }
        }
    }

    /// Bump in the right wedge with ‖f^±‖ of order one at unit mass.
    pub fn default_right() -> Self {
        TestFunctionConfig {
            shape: TestFunctionShape::Bump {
                bx: [-0.25, 0.25, 0.75, 1.25],
                order: 64,
            },
            amplitude: C64::new(200.0, 0.0),
        }
    }

    pub fn default_left() -> Self {
        TestFunctionConfig {
            shape: TestFunctionShape::Bump {
                bx: [-0.3, 0.2, -1.4, -0.8],
                order: 64,
            },
            amplitude: C64::new(0.0, 180.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationsConfig {
    pub window: f64,
    pub samples: usize,
}

impl Default for RelationsConfig {
    fn default() -> Self {
        RelationsConfig {
            window: 8.0,
            samples: 201,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraConfig {
    pub representation_count: usize,
    pub representation_n_max: usize,
    pub representation_trials: usize,
    pub zf_half_width: f64,
    pub zf_count: usize,
    pub zf_n_max: usize,
    pub zf_trials: usize,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        AlgebraConfig {
            representation_count: 9,
            representation_n_max: 4,
            representation_trials: 50,
            zf_half_width: 6.0,
            zf_count: 7,
            zf_n_max: 3,
            zf_trials: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityConfig {
    pub n_values: Vec<usize>,
    pub samples: usize,
    pub spectator_range: f64,
    pub study_panels: usize,
    pub study_orders: Vec<usize>,
    pub operator_half_width: f64,
    pub operator_count: usize,
    pub probe_n: usize,
    pub doubling_counts: Vec<usize>,
    pub doubling_probe_n: usize,
}

impl Default for LocalityConfig {
    fn default() -> Self {
        LocalityConfig {
            n_values: vec![0, 1, 2, 3],
            samples: 2,
            spectator_range: 2.0,
            study_panels: 32,
            study_orders: vec![4, 8, 16, 32, 64],
            operator_half_width: 6.0,
            operator_count: 97,
            probe_n: 1,
            doubling_counts: vec![25, 49, 97, 193],
            doubling_probe_n: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmatrixConfig {
    pub n_values: Vec<usize>,
    pub trials: usize,
}

impl Default for SmatrixConfig {
    fn default() -> Self {
        SmatrixConfig {
            n_values: vec![2, 3, 4],
            trials: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuclearityConfig {
    /// Defaults to κ(S₂)/2.
    pub kappa: Option<f64>,
    /// In units of 1/m.
    pub s_values: Vec<f64>,
    pub half_width: f64,
    pub nodes: usize,
    pub refine: bool,
    pub max_doublings: usize,
    pub smin_tol: f64,
    pub bose_s: Vec<f64>,
    pub fermi_s: Vec<f64>,
    /// Defaults to 1/m.
    pub partition_r: Option<f64>,
    /// In units of r.
    pub partition_beta: Vec<f64>,
    pub improved: bool,
}

impl Default for NuclearityConfig {
    fn default() -> Self {
        NuclearityConfig {
            kappa: None,
            s_values: vec![0.2, 0.5, 1.0, 2.0, 5.0],
            half_width: 12.0,
            nodes: 400,
            refine: true,
            max_doublings: 3,
            smin_tol: 1e-4,
            bose_s: vec![0.5, 1.0, 2.0, 10.0],
            fermi_s: vec![0.5, 1.0, 2.0],
            partition_r: None,
            partition_beta: (1..=10).map(|k| k as f64 / 10.0).collect(),
            improved: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub relations: f64,
    pub representation: f64,
    pub zf: f64,
    pub contour: f64,
    pub order_floor: f64,
    pub commutator: f64,
    pub doubling_floor: f64,
    pub negative_control: f64,
    pub smatrix: f64,
    pub trace_change: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            relations: 1e-12,
            representation: 1e-12,
            zf: 1e-12,
            contour: 1e-6,
            order_floor: 1e-12,
            commutator: 1e-4,
            doubling_floor: 1e-13,
            negative_control: 1e-2,
            smatrix: 1e-10,
            trace_change: 1e-3,
        }
    }
}

impl Tolerances {
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "relations" => &mut self.relations,
            "representation" => &mut self.representation,
            "zf" => &mut self.zf,
            "contour" => &mut self.contour,
            "order_floor" => &mut self.order_floor,
            "commutator" => &mut self.commutator,
            "doubling_floor" => &mut self.doubling_floor,
            "negative_control" => &mut self.negative_control,
            "smatrix" => &mut self.smatrix,
            "trace_change" => &mut self.trace_change,
            _ => return Err(Error::Config { line: 0, message: format!("unknown tolerance '{key}'") }),
        };
        if !(value > 0.0) {
            return Err(Error::Config { line: 0, message: format!("tolerance '{key}' must be positive") });
        }
        *slot = value;
        Ok(())
    }

    pub const KEYS: [&'static str; 10] = [
        "relations",
        "representation",
        "zf",
        "contour",
        "order_floor",
        "commutator",
        "doubling_floor",
        "negative_control",
        "smatrix",
        "trace_change",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub f: TestFunctionConfig,
    pub g: TestFunctionConfig,
    pub relations: RelationsConfig,
    pub algebra: AlgebraConfig,
    pub locality: LocalityConfig,
    pub smatrix: SmatrixConfig,
    pub nuclearity: NuclearityConfig,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            model: ModelConfig::default(),
            grid: GridConfig::default(),
            f: TestFunctionConfig::default_right(),
            g: TestFunctionConfig::default_left(),
            relations: RelationsConfig::default(),
            algebra: AlgebraConfig::default(),
            locality: LocalityConfig::default(),
            smatrix: SmatrixConfig::default(),
            nuclearity: NuclearityConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line, message: message.into() }
}

/// `2.5`, `pi`, `-pi/4`, `3*pi/8`, `1e-12`
pub fn parse_number(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty number".into());
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let mut value = 1.0;
    let mut divide = false;
    let mut rest = body;
    loop {
        let cut = rest.find(['*', '/']).unwrap_or(rest.len());
        let tok = rest[..cut].trim();
        let x = if tok.eq_ignore_ascii_case("pi") {
            PI
        } else {
            tok.parse::<f64>().map_err(|_| format!("'{text}' is not a number"))?
        };
        value = if divide { value / x } else { value * x };
        if cut == rest.len() {
            break;
        }
        divide = rest.as_bytes()[cut] == b'/';
        rest = &rest[cut + 1..];
    }
    if !value.is_finite() {
        return Err(format!("'{text}' is not finite"));
    }
    Ok(if neg { -value } else { value })
}

struct Entry {
    value: String,
    line: usize,
}

struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn num(&mut self, key: &str, slot: &mut f64) -> Result<()> {
        if let Some(e) = self.take(key) {
            *slot = parse_number(&e.value).map_err(|m| err(e.line, format!("{key}: {m}")))?;
        }
        Ok(())
    }

    fn opt_num(&mut self, key: &str, slot: &mut Option<f64>) -> Result<()> {
        if let Some(e) = self.take(key) {
            *slot = Some(parse_number(&e.value).map_err(|m| err(e.line, format!("{key}: {m}")))?);
        }
        Ok(())
    }

    fn count(&mut self, key: &str, slot: &mut usize) -> Result<()> {
        if let Some(e) = self.take(key) {
            *slot = e
                .value
                .trim()
                .parse()
                .map_err(|_| err(e.line, format!("{key}: '{}' is not a non-negative integer", e.value.trim())))?;
        }
        Ok(())
    }

    fn flag(&mut self, key: &str, slot: &mut bool) -> Result<()> {
        if let Some(e) = self.take(key) {
            *slot = match e.value.trim() {
                "true" | "yes" | "1" => true,
                "false" | "no" | "0" => false,
                v => return Err(err(e.line, format!("{key}: '{v}' is not a boolean"))),
            };
        }
        Ok(())
    }

    fn nums(&mut self, key: &str, slot: &mut Vec<f64>) -> Result<()> {
        if let Some(e) = self.take(key) {
            *slot = number_list(&e.value).map_err(|m| err(e.line, format!("{key}: {m}")))?;
        }
        Ok(())
    }

    fn counts(&mut self, key: &str, slot: &mut Vec<usize>) -> Result<()> {
        if let Some(e) = self.take(key) {
            *slot = e
                .value
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(e.line, format!("{key}: expected a list of non-negative integers")))?;
        }
        Ok(())
    }

    fn fixed<const N: usize>(&mut self, key: &str) -> Result<Option<[f64; N]>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => {
                let v = number_list(&e.value).map_err(|m| err(e.line, format!("{key}: {m}")))?;
                let arr: [f64; N] = v
                    .try_into()
                    .map_err(|v: Vec<f64>| err(e.line, format!("{key}: expected {N} numbers, got {}", v.len())))?;
                Ok(Some(arr))
            }
        }
    }

    fn finish(self, name: &str) -> Result<()> {
        match self.entries.into_iter().next() {
            Some((k, e)) => Err(err(e.line, format!("unknown key '{k}' in [{name}]"))),
            None => Ok(()),
        }
    }
}

fn number_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_number).collect()
}

fn parse_sections(text: &str) -> Result<Vec<(String, Section)>> {
    let mut out: Vec<(String, Section)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line, "unterminated section header"))?
                .trim()
                .to_string();
            if out.iter().any(|(n, _)| *n == name) {
                return Err(err(line, format!("section [{name}] appears twice")));
            }
            out.push((
                name,
                Section {
                    line,
                    entries: BTreeMap::new(),
                },
            ));
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected 'key = value', got '{content}'")))?;
        let key = k.trim().to_string();
        let (_, sec) = out
            .last_mut()
            .ok_or_else(|| err(line, "key outside of any section"))?;
        if sec.entries.contains_key(&key) {
            return Err(err(line, format!("duplicate key '{key}'")));
        }
        sec.entries.insert(
            key,
            Entry {
                value: v.trim().to_string(),
                line,
            },
        );
    }
    Ok(out)
}

fn parse_zeros(e: &Entry) -> Result<Vec<C64>> {
    if e.value.trim().is_empty() {
        return Ok(Vec::new());
    }
    e.value
        .split(';')
        .map(|pair| {
            let v = number_list(pair).map_err(|m| err(e.line, format!("zeros: {m}")))?;
            match v.as_slice() {
                [re, im] => Ok(C64::new(*re, *im)),
                _ => Err(err(e.line, format!("zeros: expected 're, im', got '{}'", pair.trim()))),
            }
        })
        .collect()
}

fn parse_model(sec: &mut Section, m: &mut ModelConfig) -> Result<()> {
    if let Some(e) = sec.take("id") {
        m.id = e.value;
    }
    if let Some(e) = sec.take("epsilon") {
        let x = parse_number(&e.value).map_err(|msg| err(e.line, format!("epsilon: {msg}")))?;
        m.epsilon = Sign::from_f64(x).map_err(|_| err(e.line, "epsilon must be +1 or -1"))?;
    }
    sec.num("a", &mut m.a)?;
    sec.num("mass", &mut m.mass)?;
    if let Some(e) = sec.take("zeros") {
        m.zeros = parse_zeros(&e)?;
    }
    sec.flag("auto_mirror", &mut m.auto_mirror)?;
    sec.flag("validate", &mut m.validate)?;
    Ok(())
}

fn parse_testfunction(sec: &mut Section, t: &mut TestFunctionConfig) -> Result<()> {
    let kind = sec.take("kind");
    let kind_name = kind.as_ref().map(|e| e.value.clone());
    let line = kind.as_ref().map_or(sec.line, |e| e.line);
    match kind_name.as_deref() {
        Some("gaussian") => {
            let (mut center, mut sigma, mut q) = ([0.0; 2], 1.0, [0.0; 2]);
            if let TestFunctionShape::Gaussian { center: c, sigma: s, q: qq } = t.shape {
                (center, sigma, q) = (c, s, qq);
            }
            if let Some(c) = sec.fixed::<2>("center")? {
                center = c;
            }
            sec.num("sigma", &mut sigma)?;
            if let Some(v) = sec.fixed::<2>("q")? {
                q = v;
            }
            t.shape = TestFunctionShape::Gaussian { center, sigma, q };
        }
        Some("bump") | None => {
            let (mut bx, mut order) = match t.shape {
                TestFunctionShape::Bump { bx, order } => (bx, order),
                _ => ([0.0; 4], 64),
            };
            if let Some(b) = sec.fixed::<4>("box")? {
                bx = b;
            }
            sec.count("order", &mut order)?;
            t.shape = TestFunctionShape::Bump { bx, order };
        }
        Some(other) => return Err(err(line, format!("unknown test-function kind '{other}'"))),
    }
    if let Some(a) = sec.fixed::<2>("amplitude")? {
        t.amplitude = C64::new(a[0], a[1]);
    }
    t.build().map_err(|e| err(line, e.to_string()))?;
    Ok(())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen_model = false;
        for (name, mut sec) in parse_sections(text)? {
            let line = sec.line;
            match name.as_str() {
                "run" => {
                    if let Some(e) = sec.take("seed") {
                        cfg.seed = parse_seed(&e.value).map_err(|m| err(e.line, m))?;
                    }
                }
                "model" => {
                    seen_model = true;
                    parse_model(&mut sec, &mut cfg.model)?;
                    cfg.model.build().map_err(|e| err(line, e.to_string()))?;
                }
                "grid" => {
                    sec.num("half_width", &mut cfg.grid.half_width)?;
                    sec.count("count", &mut cfg.grid.count)?;
                    sec.count("n_max", &mut cfg.grid.n_max)?;
                }
                "testfunction.f" => parse_testfunction(&mut sec, &mut cfg.f)?,
                "testfunction.g" => parse_testfunction(&mut sec, &mut cfg.g)?,
                "scattering" => {
                    sec.num("window", &mut cfg.relations.window)?;
                    sec.count("samples", &mut cfg.relations.samples)?;
                }
                "algebra" => {
                    let a = &mut cfg.algebra;
                    sec.count("representation_count", &mut a.representation_count)?;
                    sec.count("representation_n_max", &mut a.representation_n_max)?;
                    sec.count("representation_trials", &mut a.representation_trials)?;
                    sec.num("zf_half_width", &mut a.zf_half_width)?;
                    sec.count("zf_count", &mut a.zf_count)?;
                    sec.count("zf_n_max", &mut a.zf_n_max)?;
                    sec.count("zf_trials", &mut a.zf_trials)?;
                }
                "locality" => {
                    let l = &mut cfg.locality;
                    sec.counts("n_values", &mut l.n_values)?;
                    sec.count("samples", &mut l.samples)?;
                    sec.num("spectator_range", &mut l.spectator_range)?;
                    sec.count("study_panels", &mut l.study_panels)?;
                    sec.counts("study_orders", &mut l.study_orders)?;
                    sec.num("operator_half_width", &mut l.operator_half_width)?;
                    sec.count("operator_count", &mut l.operator_count)?;
                    sec.count("probe_n", &mut l.probe_n)?;
                    sec.counts("doubling_counts", &mut l.doubling_counts)?;
                    sec.count("doubling_probe_n", &mut l.doubling_probe_n)?;
                }
                "smatrix" => {
                    sec.counts("n_values", &mut cfg.smatrix.n_values)?;
                    sec.count("trials", &mut cfg.smatrix.trials)?;
                }
                "nuclearity" => {
                    let n = &mut cfg.nuclearity;
                    sec.opt_num("kappa", &mut n.kappa)?;
                    sec.nums("s_values", &mut n.s_values)?;
                    sec.num("half_width", &mut n.half_width)?;
                    sec.count("nodes", &mut n.nodes)?;
                    sec.flag("refine", &mut n.refine)?;
                    sec.count("max_doublings", &mut n.max_doublings)?;
                    sec.num("smin_tol", &mut n.smin_tol)?;
                    sec.nums("bose_s", &mut n.bose_s)?;
                    sec.nums("fermi_s", &mut n.fermi_s)?;
                    sec.opt_num("partition_r", &mut n.partition_r)?;
                    sec.nums("partition_beta", &mut n.partition_beta)?;
                    sec.flag("improved", &mut n.improved)?;
                }
                "tolerances" => {
                    let keys: Vec<String> = sec.entries.keys().cloned().collect();
                    for k in keys {
                        let e = sec.take(&k).expect("key listed above");
                        let v = parse_number(&e.value).map_err(|m| err(e.line, format!("{k}: {m}")))?;
                        cfg.tolerances.set(&k, v).map_err(|x| match x {
                            Error::Config { message, .. } => err(e.line, message),
                            other => other,
                        })?;
                    }
                }
                other => return Err(err(line, format!("unknown section [{other}]"))),
            }
            sec.finish(&name)?;
        }
        if !seen_model {
            return Err(err(0, "missing [model] section"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(0, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if !(g.half_width > 0.0) || g.count < 2 {
            return Err(err(0, "grid needs half_width > 0 and count >= 2"));
        }
        if self.nuclearity.nodes < 16 || !(self.nuclearity.half_width > 0.0) {
            return Err(err(0, "nuclearity grid needs nodes >= 16 and half_width > 0"));
        }
        if self.nuclearity.s_values.iter().any(|&s| !(s > 0.0)) {
            return Err(err(0, "nuclearity s_values must be positive"));
        }
        Ok(())
    }

    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| err(0, format!("override '{assignment}' is not KEY=VAL")))?;
        let value = parse_number(v).map_err(|m| err(0, format!("override {k}: {m}")))?;
        self.tolerances.set(k.trim(), value)
    }
}

pub fn parse_seed(text: &str) -> std::result::Result<u64, String> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| format!("'{t}' is not a 64-bit seed"))
}
