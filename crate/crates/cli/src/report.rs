//! Reports printed by every command.
//!
//! A report is plain data. The text form and the `--json` form are both
//! rendered from it, and every verdict line is derived from a margin and a
//! tolerance stored next to it.

use std::fmt::Write as _;

use posmap::decompose::{DecompositionResult, Interpretation, UniquenessReport};
use posmap::positivity::PositivityReport;
use posmap::{Margin, ToleranceConfig, Verdict};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::mapfile::matrix_to_rows;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub hermitian: f64,
    pub psd: f64,
    pub pos: f64,
    pub structural: f64,
    pub face: f64,
    pub witness: f64,
    pub feas: f64,
    pub inv: f64,
}

impl From<&ToleranceConfig> for Tolerances {
    fn from(t: &ToleranceConfig) -> Self {
        Self {
            hermitian: t.hermitian_tol,
            psd: t.psd_tol,
            pos: t.pos_tol,
            structural: t.structural_tol,
            face: t.face_tol,
            witness: t.witness_tol,
            feas: t.feas_tol,
            inv: t.inv_tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictEntry {
    pub margin: f64,
    pub tol: f64,
    pub holds: bool,
}

impl From<Verdict> for VerdictEntry {
    fn from(v: Verdict) -> Self {
        Self {
            margin: v.margin,
            tol: v.tol,
            holds: v.holds(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginEntry {
    pub name: String,
    /// `None` for a skipped condition.
    pub value: Option<f64>,
    pub tol: f64,
    pub passed: bool,
}

impl From<&Margin> for MarginEntry {
    fn from(m: &Margin) -> Self {
        Self {
            name: m.name.to_string(),
            value: m.value,
            tol: m.tol,
            passed: m.passed(),
        }
    }
}

pub fn margin_entries(ms: &[Margin]) -> Vec<MarginEntry> {
    ms.iter().map(MarginEntry::from).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivitySection {
    pub block_positive: VerdictEntry,
    pub cp: VerdictEntry,
    pub ccp: VerdictEntry,
    pub face_form: bool,
    pub structural: Vec<MarginEntry>,
}

impl From<&PositivityReport> for PositivitySection {
    fn from(r: &PositivityReport) -> Self {
        Self {
            block_positive: r.is_block_positive.into(),
            cp: r.is_cp.into(),
            ccp: r.is_ccp.into(),
            face_form: r.face_form.is_some(),
            structural: r.face_form.as_ref().map(|f| margin_entries(&f.structural)).unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionSection {
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub cp_margin: f64,
    pub ppt_margin: f64,
    pub reduced_directions: usize,
    pub likely_non_decomposable: bool,
}

impl From<&DecompositionResult> for DecompositionSection {
    fn from(r: &DecompositionResult) -> Self {
        Self {
            converged: r.converged,
            iterations: r.iterations,
            residual: r.residual,
            cp_margin: r.cp_margin,
            ppt_margin: r.ppt_margin,
            reduced_directions: r.reduced_directions,
            likely_non_decomposable: r.likely_non_decomposable,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CanonicalSection {
    pub xi: Vec<[f64; 2]>,
    pub eta: Vec<[f64; 2]>,
    pub w: Vec<Vec<[f64; 2]>>,
    pub v: Vec<Vec<[f64; 2]>>,
    pub face_residual_after: f64,
}

impl CanonicalSection {
    pub fn new(f: &posmap::choi::FacePair, c: &posmap::choi::Canonicalized, residual: f64) -> Self {
        Self {
            xi: f.xi.iter().map(|z| [z.re, z.im]).collect(),
            eta: f.eta.iter().map(|z| [z.re, z.im]).collect(),
            w: matrix_to_rows(&c.w),
            v: matrix_to_rows(&c.v),
            face_residual_after: residual,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    /// `None` for boundary-stratum samples.
    pub slack: Option<f64>,
    pub seed: u64,
    pub boundary_margin: Option<f64>,
    pub diameter: f64,
    pub converged_starts: usize,
    pub starts: usize,
    pub interpretation: &'static str,
}

impl ProbeRow {
    pub fn new(slack: Option<f64>, seed: u64, r: &UniquenessReport) -> Self {
        Self {
            slack,
            seed,
            boundary_margin: r.boundary_margin,
            diameter: r.diameter_estimate,
            converged_starts: r.converged_starts(),
            starts: r.per_start_converged.len(),
            interpretation: interpretation_name(r.interpretation),
        }
    }
}

pub fn interpretation_name(i: Interpretation) -> &'static str {
    match i {
        Interpretation::ConsistentWithUniqueness => "consistent-with-uniqueness",
        Interpretation::NonUniqueCertified => "non-unique-certified",
        Interpretation::Inconclusive => "inconclusive",
        Interpretation::InsufficientSamples => "insufficient-samples",
    }
}

/// Decade bins for diameters; the last bin is open.
pub const HISTOGRAM_EDGES: [f64; 10] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1];

#[derive(Debug, Clone, Serialize)]
pub struct ProbeAggregate {
    pub slack: Option<f64>,
    pub samples: usize,
    pub consistent: usize,
    pub certified: usize,
    pub inconclusive: usize,
    pub insufficient: usize,
    /// Counts per bin `(−∞, 1e-10], (1e-10, 1e-9], …, (1e-1, ∞)` over samples
    /// with at least two converged starts.
    pub diameter_histogram: Vec<usize>,
}

impl ProbeAggregate {
    pub fn new(slack: Option<f64>, rows: &[&ProbeRow]) -> Self {
        let count = |name: &str| rows.iter().filter(|r| r.interpretation == name).count();
        let mut hist = vec![0; HISTOGRAM_EDGES.len() + 1];
        for r in rows.iter().filter(|r| r.converged_starts >= 2) {
            let bin = HISTOGRAM_EDGES.iter().position(|&e| r.diameter <= e).unwrap_or(HISTOGRAM_EDGES.len());
            hist[bin] += 1;
        }
        Self {
            slack,
            samples: rows.len(),
            consistent: count("consistent-with-uniqueness"),
            certified: count("non-unique-certified"),
            inconclusive: count("inconclusive"),
            insufficient: count("insufficient-samples"),
            diameter_histogram: hist,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeSection {
    pub rows: Vec<ProbeRow>,
    pub aggregates: Vec<ProbeAggregate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub command: &'static str,
    pub input_sha256: Option<String>,
    pub tolerances: Tolerances,
    pub positivity: Option<PositivitySection>,
    pub decomposition: Option<DecompositionSection>,
    pub verification: Option<Vec<MarginEntry>>,
    pub canonicalization: Option<CanonicalSection>,
    pub probe: Option<ProbeSection>,
    pub outputs: Vec<String>,
    pub verdicts: Vec<String>,
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"))
}

impl ReportDocument {
    pub fn new(command: &'static str, tol: &ToleranceConfig) -> Self {
        Self {
            command,
            input_sha256: None,
            tolerances: tol.into(),
            positivity: None,
            decomposition: None,
            verification: None,
            canonicalization: None,
            probe: None,
            outputs: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    /// Fills `verdicts` from the sections present.
    pub fn derive_verdicts(&mut self) {
        let mut v = Vec::new();
        let line = |name: &str, e: &VerdictEntry| {
            format!("{name}: {} (margin {:.6e}, tol {:e})", yes_no(e.holds), e.margin, e.tol)
        };
        if let Some(p) = &self.positivity {
            v.push(line("block-positive", &p.block_positive));
            v.push(line("CP", &p.cp));
            v.push(line("co-CP", &p.ccp));
            if p.face_form {
                let failed: Vec<&str> = p.structural.iter().filter(|m| !m.passed).map(|m| m.name.as_str()).collect();
                if failed.is_empty() {
                    v.push("structural conditions: all passed".into());
                } else {
                    v.push(format!("structural conditions failed: {}", failed.join(", ")));
                }
            } else {
                v.push("face form: no".into());
            }
        }
        if let Some(d) = &self.decomposition {
            v.push(format!(
                "decomposition: {} after {} iterations (residual {:.6e})",
                if d.converged { "converged" } else { "not converged" },
                d.iterations,
                d.residual
            ));
            if d.likely_non_decomposable {
                v.push("decomposition: stalled, likely non-decomposable (evidence only)".into());
            }
        }
        if let Some(ms) = &self.verification {
            let failed: Vec<&str> = ms.iter().filter(|m| !m.passed).map(|m| m.name.as_str()).collect();
            if failed.is_empty() {
                v.push("verification: all margins passed".into());
            } else {
                v.push(format!("verification failed: {}", failed.join(", ")));
            }
        }
        if let Some(c) = &self.canonicalization {
            v.push(format!("canonical face residual: {:.6e}", c.face_residual_after));
        }
        if let Some(p) = &self.probe {
            for a in &p.aggregates {
                v.push(format!(
                    "probe {}: {} samples, {} certified non-unique, {} consistent with uniqueness, {} inconclusive, {} insufficient",
                    a.slack.map_or_else(|| "boundary".to_string(), |s| format!("slack {s}")),
                    a.samples,
                    a.certified,
                    a.consistent,
                    a.inconclusive,
                    a.insufficient
                ));
            }
        }
        self.verdicts = v;
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serialises");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        if let Some(d) = &self.input_sha256 {
            let _ = writeln!(s, "input sha256: {d}");
        }
        let t = &self.tolerances;
        let _ = writeln!(
            s,
            "tolerances: hermitian={:e} psd={:e} pos={:e} structural={:e} face={:e} witness={:e} feas={:e} inv={:e}",
            t.hermitian, t.psd, t.pos, t.structural, t.face, t.witness, t.feas, t.inv
        );
        for line in &self.verdicts {
            let _ = writeln!(s, "{line}");
        }
        let table = |s: &mut String, title: &str, ms: &[MarginEntry]| {
            let _ = writeln!(s, "{title}:");
            let width = ms.iter().map(|m| m.name.len()).max().unwrap_or(0);
            for m in ms {
                let _ = writeln!(
                    s,
                    "  {:width$}  {:>14}  tol {:e}  {}",
                    m.name,
                    opt(m.value),
                    m.tol,
                    match (m.value, m.passed) {
                        (None, _) => "skipped",
                        (_, true) => "pass",
                        (_, false) => "FAIL",
                    }
                );
            }
        };
        if let Some(p) = &self.positivity {
            if p.face_form {
                table(&mut s, "structural margins", &p.structural);
            }
        }
        if let Some(ms) = &self.verification {
            table(&mut s, "verification margins", ms);
        }
        if let Some(c) = &self.canonicalization {
            let fmt = |rows: &Vec<Vec<[f64; 2]>>| {
                rows.iter()
                    .map(|r| r.iter().map(|[a, b]| format!("{a:+.6e}{b:+.6e}i")).collect::<Vec<_>>().join(" "))
                    .collect::<Vec<_>>()
            };
            let _ = writeln!(s, "W:");
            for r in fmt(&c.w) {
                let _ = writeln!(s, "  {r}");
            }
            let _ = writeln!(s, "V:");
            for r in fmt(&c.v) {
                let _ = writeln!(s, "  {r}");
            }
        }
        if let Some(p) = &self.probe {
            let _ = writeln!(s, "{:>8} {:>20} {:>14} {:>14} {:>9}  interpretation", "slack", "seed", "boundary", "diameter", "converged");
            for r in &p.rows {
                let _ = writeln!(
                    s,
                    "{:>8} {:>20} {:>14} {:>14.6e} {:>5}/{:<3}  {}",
                    r.slack.map_or_else(|| "boundary".to_string(), |x| format!("{x}")),
                    r.seed,
                    opt(r.boundary_margin),
                    r.diameter,
                    r.converged_starts,
                    r.starts,
                    r.interpretation
                );
            }
            let _ = writeln!(s, "diameter histogram (upper edges {:?}, last bin open):", HISTOGRAM_EDGES);
            for a in &p.aggregates {
                let _ = writeln!(
                    s,
                    "  {:>8}  {:?}",
                    a.slack.map_or_else(|| "boundary".to_string(), |x| format!("{x}")),
                    a.diameter_histogram
                );
            }
        }
        for o in &self.outputs {
            let _ = writeln!(s, "wrote {o}");
        }
        s
    }
}
