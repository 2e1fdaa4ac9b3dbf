//! Batch verification over parameter grids.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::MAX_N;
use crate::forms::HwvId;
use crate::operators::{
    fourier_solver, hodge_riemann_report, lefschetz_closed_form, lefschetz_coeff,
};
use crate::pairing::{pairing_closed_form, pairing_from_density, verify_pairing_ledger};
use crate::repn::{certify_hwv, highest_weight, Weight};
use crate::report::{ItemId, ReportItem, VerificationReport};
use crate::rumin::{
    primitive_coefficient, rumin_differential, sigma_tau_coefficients, verify_negative_ledger,
    verify_rumin_ledger, LedgerEntry,
};
use crate::scalar::ExactScalar;
use crate::transfer::{
    pullback_expected, pullback_transfer, pushforward_expected, pushforward_transfer,
    verify_substitution_rows, vol_dimension_holds,
};

/// Environment variable holding the default number of worker threads.
pub const JOBS_ENV: &str = "VALCALC_JOBS";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("cannot parse range {0:?}: expected N or A..B")]
    BadRange(String),
    #[error("dimension range {0}..{1} must lie within 2..{MAX_N} and be increasing")]
    DimensionRange(u8, u8),
    #[error("m-max must be at least 2, got {0}")]
    MMax(u32),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("unknown format {0:?}")]
    UnknownFormat(String),
    #[error("no valid id for suite {suite} with the given n, r, k and m-max")]
    EmptyGrid { suite: Suite },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("invalid value {value:?} for {name}")]
    BadEnv { name: &'static str, value: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Hwv,
    Rumin,
    Pairing,
    Transfer,
    Fourier,
    Lefschetz,
    HodgeRiemann,
    Ledger,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Hwv,
        Suite::Rumin,
        Suite::Pairing,
        Suite::Transfer,
        Suite::Fourier,
        Suite::Lefschetz,
        Suite::HodgeRiemann,
        Suite::Ledger,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hwv => "hwv",
            Suite::Rumin => "rumin",
            Suite::Pairing => "pairing",
            Suite::Transfer => "transfer",
            Suite::Fourier => "fourier",
            Suite::Lefschetz => "lefschetz",
            Suite::HodgeRiemann => "hodge-riemann",
            Suite::Ledger => "ledger",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| ConfigError::UnknownSuite(s.into()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(ConfigError::UnknownFormat(s.into())),
        }
    }
}

/// Inclusive range of dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimRange {
    pub lo: u8,
    pub hi: u8,
}

impl DimRange {
    pub fn new(lo: u8, hi: u8) -> Result<Self, ConfigError> {
        if lo < 2 || hi as usize > MAX_N || lo > hi {
            return Err(ConfigError::DimensionRange(lo, hi));
        }
        Ok(DimRange { lo, hi })
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        self.lo..=self.hi
    }
}

impl FromStr for DimRange {
    type Err = ConfigError;
    /// `"4"`, `"2..5"` or `"2..=5"`; both ends are included.
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let bad = || ConfigError::BadRange(s.into());
        let num = |t: &str| t.trim().parse::<u8>().map_err(|_| bad());
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = num(s)?;
                (v, v)
            }
        };
        DimRange::new(lo, hi)
    }
}

impl fmt::Display for DimRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub n: DimRange,
    pub r: Option<u8>,
    pub k: Option<i8>,
    pub m_max: u32,
    pub format: Format,
    pub out: Option<std::path::PathBuf>,
    /// Worker threads; `None` reads `VALCALC_JOBS`, then falls back to the rayon default.
    pub jobs: Option<usize>,
}

impl SuiteConfig {
    pub fn new(suite: Suite, n: DimRange, m_max: u32) -> Self {
        SuiteConfig {
            suite,
            n,
            r: None,
            k: None,
            m_max,
            format: Format::Json,
            out: None,
            jobs: None,
        }
    }

    fn wants(&self, r: u8, k: i8) -> bool {
        self.r.is_none_or(|x| x == r) && self.k.is_none_or(|x| x == k)
    }

    fn ids(&self) -> Vec<HwvId> {
        self.n
            .iter()
            .flat_map(|n| HwvId::grid(n, self.m_max))
            .filter(|id| self.wants(id.r, id.k))
            .collect()
    }

    /// Triples `(n, r, k)` with `k ≥ 1` used by the identity ledgers.
    fn triples(&self) -> Vec<(u8, u8, u8)> {
        let mut out = Vec::new();
        for n in self.n.iter() {
            for r in 1..n {
                for k in 1..=r.min(n - r) {
                    if self.wants(r, k as i8) {
                        out.push((n, r, k));
                    }
                }
            }
        }
        out
    }

    fn params(&self) -> serde_json::Value {
        serde_json::json!({
            "suite": self.suite,
            "n": self.n.to_string(),
            "r": self.r,
            "k": self.k,
            "m_max": self.m_max,
        })
    }

    fn command(&self) -> String {
        let mut s = format!("verify {} --n {}", self.suite, self.n);
        if let Some(r) = self.r {
            s += &format!(" --r {r}");
        }
        if let Some(k) = self.k {
            s += &format!(" --k {k}");
        }
        s + &format!(" --m-max {}", self.m_max)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        DimRange::new(self.n.lo, self.n.hi)?;
        if self.m_max < 2 {
            return Err(ConfigError::MMax(self.m_max));
        }
        if self.ids().is_empty() {
            return Err(ConfigError::EmptyGrid { suite: self.suite });
        }
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool, ConfigError> {
        let jobs = match self.jobs {
            Some(j) => Some(j),
            None => match std::env::var(JOBS_ENV) {
                Ok(v) if !v.trim().is_empty() => {
                    Some(v.trim().parse::<usize>().map_err(|_| ConfigError::BadEnv {
                        name: JOBS_ENV,
                        value: v.clone(),
                    })?)
                }
                _ => None,
            },
        };
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = jobs {
            b = b.num_threads(j);
        }
        b.build().map_err(|e| ConfigError::Pool(e.to_string()))
    }
}

/// One unit of work on the pool.
#[derive(Clone, Copy, Debug)]
enum Task {
    Hwv(HwvId),
    Rumin(HwvId),
    Pairing(HwvId),
    Transfer(HwvId),
    VolDimension(u8),
    Fourier {
        n: crate::suite::DimRange,
        m: u32,
        r: Option<u8>,
        k: Option<i8>,
    },
    Lefschetz(HwvId),
    HodgeRiemann {
        n: u8,
        r: u8,
        m_max: u32,
    },
    Ledger(u8, u8, u8),
    NegativeLedger(u8),
    Rows(u8),
}

fn weight_text(w: &Weight) -> String {
    let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn ledger_items(id: ItemId, group: &str, entries: Vec<LedgerEntry>) -> Vec<ReportItem> {
    entries
        .into_iter()
        .map(|e| {
            let got = if e.holds { "holds" } else { "fails" };
            ReportItem::new(
                id,
                "ledger",
                &format!("{group}: {}", e.name),
                "holds",
                got,
                e.holds,
            )
        })
        .collect()
}

fn run_task(task: Task) -> Vec<ReportItem> {
    match task {
        Task::Hwv(id) => {
            let expected = weight_text(&highest_weight(id));
            vec![match certify_hwv(id) {
                Ok(c) => ReportItem::compare(
                    id,
                    "hwv",
                    "highest weight",
                    expected,
                    weight_text(&c.weight),
                ),
                Err(e) => ReportItem::error(id, "hwv", "highest weight", expected, e),
            }]
        }
        Task::Rumin(id) => {
            let c = primitive_coefficient(id.n, id.r, id.m);
            let (a, b) = sigma_tau_coefficients(id);
            let expected = format!("sigma: {}, tau: {}", c.scale_int(a), c.scale_int(b));
            vec![match rumin_differential(id) {
                Ok(cert) => ReportItem::compare(
                    id,
                    "rumin",
                    "D omega",
                    expected,
                    format!(
                        "sigma: {}, tau: {}",
                        cert.sigma_coefficient, cert.tau_coefficient
                    ),
                ),
                Err(e) => ReportItem::error(id, "rumin", "D omega", expected, e),
            }]
        }
        Task::Pairing(id) => {
            let expected = pairing_closed_form(id);
            vec![match pairing_from_density(id) {
                Ok(v) => ReportItem::compare(id, "pairing", "pairing", &expected, &v),
                Err(e) => ReportItem::error(id, "pairing", "pairing", &expected, e),
            }]
        }
        Task::Transfer(id) => {
            let pull = match pullback_transfer(id) {
                Ok(t) => ReportItem::compare(id, "transfer", "pullback", pullback_expected(id), t),
                Err(e) => ReportItem::error(id, "transfer", "pullback", pullback_expected(id), e),
            };
            let push = match pushforward_transfer(id) {
                Ok(t) => {
                    ReportItem::compare(id, "transfer", "pushforward", pushforward_expected(id), t)
                }
                Err(e) => {
                    ReportItem::error(id, "transfer", "pushforward", pushforward_expected(id), e)
                }
            };
            vec![pull, push]
        }
        Task::VolDimension(n) => {
            let item = match vol_dimension_holds(n) {
                Ok(h) => ReportItem::new(
                    ItemId::dim(n),
                    "transfer",
                    "volume bridge",
                    "holds",
                    if h { "holds" } else { "fails" },
                    h,
                ),
                Err(e) => {
                    ReportItem::error(ItemId::dim(n), "transfer", "volume bridge", "holds", e)
                }
            };
            vec![item]
        }
        Task::Fourier { n, m, r, k } => {
            let ids: Vec<HwvId> = n
                .iter()
                .flat_map(|d| HwvId::grid(d, m))
                .filter(|id| {
                    id.m == m && r.is_none_or(|x| x == id.r) && k.is_none_or(|x| x == id.k)
                })
                .collect();
            let expected = crate::operators::fourier_closed_form;
            match fourier_solver(n.hi, m) {
                Ok(table) => ids
                    .into_iter()
                    .flat_map(|id| {
                        let f = &table.entries[&id];
                        let rule = format!("{:?}", table.provenance[&id]).to_lowercase();
                        let dual = &table.entries[&HwvId {
                            r: id.n - id.r,
                            ..id
                        }];
                        let plancherel = f * dual;
                        vec![
                            ReportItem::compare(
                                id,
                                "fourier",
                                &format!("multiplier ({rule})"),
                                expected(id),
                                f,
                            ),
                            ReportItem::compare(
                                id,
                                "fourier",
                                "plancherel",
                                ExactScalar::sign(m as i64),
                                plancherel,
                            ),
                        ]
                    })
                    .collect(),
                Err(e) => ids
                    .into_iter()
                    .map(|id| ReportItem::error(id, "fourier", "multiplier", expected(id), &e))
                    .collect(),
            }
        }
        Task::Lefschetz(id) => {
            let expected = lefschetz_closed_form(id);
            vec![match lefschetz_coeff(id) {
                Ok(c) => ReportItem::compare(id, "lefschetz", "coefficient", &expected, &c),
                Err(e) => ReportItem::error(id, "lefschetz", "coefficient", &expected, e),
            }]
        }
        Task::HodgeRiemann { n, r, m_max } => hodge_riemann_report(n, r, m_max).items,
        Task::Ledger(n, r, k) => {
            let id = ItemId::rk(n, r, k as i8);
            let mut out = ledger_items(id, "rumin", verify_rumin_ledger(n, r, k));
            out.extend(ledger_items(id, "pairing", verify_pairing_ledger(n, r, k)));
            out
        }
        Task::NegativeLedger(n) => ledger_items(
            ItemId::rk(n, n / 2, -((n / 2) as i8)),
            "reflected",
            verify_negative_ledger(n),
        ),
        Task::Rows(n) => match verify_substitution_rows(n) {
            Ok(entries) => ledger_items(ItemId::dim(n), "transfer", entries),
            Err(e) => vec![ReportItem::error(
                ItemId::dim(n),
                "ledger",
                "substitution rows",
                "holds",
                e,
            )],
        },
    }
}

fn tasks(cfg: &SuiteConfig, suite: Suite) -> Vec<Task> {
    let ids = cfg.ids();
    let filters_free = cfg.r.is_none() && cfg.k.is_none();
    match suite {
        Suite::Hwv => ids.into_iter().map(Task::Hwv).collect(),
        Suite::Rumin => ids.into_iter().map(Task::Rumin).collect(),
        Suite::Pairing => ids.into_iter().map(Task::Pairing).collect(),
        Suite::Transfer => {
            let mut t: Vec<Task> = ids
                .into_iter()
                .filter(|id| id.n >= 3 && id.k > 0)
                .map(Task::Transfer)
                .collect();
            if filters_free {
                t.extend(cfg.n.iter().filter(|&n| n >= 3).map(Task::VolDimension));
            }
            t
        }
        Suite::Fourier => (2..=cfg.m_max)
            .map(|m| Task::Fourier {
                n: cfg.n,
                m,
                r: cfg.r,
                k: cfg.k,
            })
            .collect(),
        Suite::Lefschetz => ids.into_iter().map(Task::Lefschetz).collect(),
        Suite::HodgeRiemann => {
            let mut t = Vec::new();
            for n in cfg.n.iter() {
                for r in 1..=n / 2 {
                    if cfg.r.is_none_or(|x| x == r) {
                        t.push(Task::HodgeRiemann {
                            n,
                            r,
                            m_max: cfg.m_max,
                        });
                    }
                }
            }
            t
        }
        Suite::Ledger => {
            let mut t: Vec<Task> = cfg
                .triples()
                .into_iter()
                .map(|(n, r, k)| Task::Ledger(n, r, k))
                .collect();
            for n in cfg.n.iter() {
                let l = n / 2;
                if n % 2 == 0 && n >= 4 && cfg.wants(l, -(l as i8)) {
                    t.push(Task::NegativeLedger(n));
                }
                if n >= 3 && filters_free {
                    t.push(Task::Rows(n));
                }
            }
            t
        }
        Suite::All => Suite::EACH.iter().flat_map(|&s| tasks(cfg, s)).collect(),
    }
}

/// Runs the configured suite on a worker pool. Items come back sorted by `(n, r, k, m)`,
/// so the report does not depend on the number of workers.
pub fn run_suite(cfg: &SuiteConfig) -> Result<VerificationReport, ConfigError> {
    cfg.validate()?;
    let pool = cfg.pool()?;
    let start = Instant::now();
    let work = tasks(cfg, cfg.suite);
    let items: Vec<ReportItem> =
        pool.install(|| work.into_par_iter().flat_map_iter(run_task).collect());
    Ok(VerificationReport::new(
        cfg.command(),
        cfg.params(),
        items,
        start.elapsed().as_millis() as u64,
    ))
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// The report as pretty-printed JSON.
pub fn to_json(report: &VerificationReport) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}

/// Flat CSV projection with one row per item.
pub fn to_csv(report: &VerificationReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n", "r", "k", "m", "suite", "check", "expected", "computed", "status",
    ])
    .expect("in-memory writer");
    for it in &report.items {
        let status = if it.passed() { "pass" } else { "fail" };
        w.write_record([
            it.id.n.to_string(),
            opt(it.id.r),
            opt(it.id.k),
            opt(it.id.m),
            it.suite.clone(),
            it.check.clone(),
            it.expected.clone(),
            it.computed.clone(),
            status.to_string(),
        ])
        .expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

pub fn render(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
    }
}

/// Aligned text table of the items, followed by the summary line.
pub fn human_table(report: &VerificationReport) -> String {
    let id_text = |id: &ItemId| format!("{} {} {} {}", id.n, opt(id.r), opt(id.k), opt(id.m));
    let mut rows: Vec<[String; 6]> = vec![[
        "n r k m".into(),
        "suite".into(),
        "check".into(),
        "expected".into(),
        "computed".into(),
        "status".into(),
    ]];
    for it in &report.items {
        rows.push([
            id_text(&it.id),
            it.suite.clone(),
            it.check.clone(),
            it.expected.clone(),
            it.computed.clone(),
            if it.passed() {
                "pass".into()
            } else {
                "FAIL".into()
            },
        ]);
    }
    let widths: Vec<usize> = (0..6)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &rows {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        out += cells.join("  ").trim_end();
        out.push('\n');
    }
    out += &format!(
        "{} passed, {} failed ({} ms)\n",
        report.summary.pass, report.summary.fail, report.elapsed_ms
    );
    out
}

/// Which value table to print.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Pairing,
    Fourier,
    Lefschetz,
}

impl FromStr for TableKind {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "pairing" => Ok(TableKind::Pairing),
            "fourier" => Ok(TableKind::Fourier),
            "lefschetz" => Ok(TableKind::Lefschetz),
            _ => Err(ConfigError::UnknownSuite(s.into())),
        }
    }
}

/// Rows `(id, value)` of certified constants: pairings `φ̄_r * φ_{n-r}`, Fourier
/// multipliers, or Lefschetz coefficients. Values are computed through the certified
/// pipelines, never the closed forms alone.
pub fn value_table(
    kind: TableKind,
    n: DimRange,
    m_max: u32,
) -> Result<Vec<(HwvId, String)>, ConfigError> {
    let suite = match kind {
        TableKind::Pairing => Suite::Pairing,
        TableKind::Fourier => Suite::Fourier,
        TableKind::Lefschetz => Suite::Lefschetz,
    };
    let report = run_suite(&SuiteConfig::new(suite, n, m_max))?;
    Ok(report
        .items
        .iter()
        .filter(|it| !it.check.starts_with("plancherel"))
        .filter_map(|it| {
            let id = HwvId {
                n: it.id.n,
                r: it.id.r?,
                k: it.id.k?,
                m: it.id.m?,
            };
            let v = if it.passed() {
                it.computed.clone()
            } else {
                format!("FAILED ({})", it.computed)
            };
            Some((id, v))
        })
        .collect())
}
