//! Seeded experiments and their reports.
//!
//! A configuration fully determines a report: one generator seeded from
//! `seed` drives every random construction in order, reports carry no
//! timestamps, and maps are ordered. Running the same configuration twice
//! therefore produces byte-identical output.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::correct::{average_step, kazhdan_correct, stabilize_projection, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::deformation::{ps_continuity_corrected, ps_pi, ps_structural_checks, DeformationOps};
use crate::error::{Error, Result};
use crate::group::{build_group, CosetSystem, FiniteGroup, GroupSpec};
use crate::induction::{compress, induce};
use crate::linalg::{self, CMatrix};
use crate::quasirep::{one_dim_witness, QuasiRep};
use crate::random::{below, random_hermitian_unit, random_unitary, seeded, uniform, unitary_at_distance, LabRng};
use crate::reps::{one_dim_characters, perturb, random_representation};
use crate::witnesses::{brooks_phi, coboundary_sup, distance_to_hom, exp_circle, nearest_circle_hom, Rolli, RolliData};
use crate::word::{enumerate_ball, FreeWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Correct,
    Stabilize,
    InduceCompress,
    Rolli,
    Quasimorphism,
    Deform,
    WitnessScan,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Correct,
        Command::Stabilize,
        Command::InduceCompress,
        Command::Rolli,
        Command::Quasimorphism,
        Command::Deform,
        Command::WitnessScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Correct => "correct",
            Command::Stabilize => "stabilize",
            Command::InduceCompress => "induce-compress",
            Command::Rolli => "rolli",
            Command::Quasimorphism => "quasimorphism",
            Command::Deform => "deform",
            Command::WitnessScan => "witness-scan",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Usage(format!("unknown format {s:?} (expected json or csv)"))),
        }
    }
}

/// A single value or a list of values to sweep over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sweep {
    One(f64),
    Many(Vec<f64>),
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Sweep::One(x) => vec![*x],
            Sweep::Many(v) => v.clone(),
        }
    }
}

/// Experiment parameters. Unset fields take per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// Group recipe such as `cyclic:7`, `dihedral:4`, `symmetric:3` or
    /// `file:path`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    /// Generators of the subgroup for `induce-compress`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Perturbation size, defect bound or rotation size, per command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Sweep>,
    /// Scale `t` of the circle-valued witnesses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Sweep>,
    /// Real deformation parameters for the unitarity report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_word_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl ExperimentConfig {
    /// Parses JSON, reporting the path of an offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Usage(format!("config field {path}: {}", e.into_inner()))
        })
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Hex SHA-256 of the canonical JSON of the configuration, without the
    /// output location and format.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = None;
        canonical.format = Format::default();
        let bytes = serde_json::to_vec(&canonical).expect("config serialises");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn command(&self) -> Result<Command> {
        self.command.ok_or_else(|| Error::Usage("config field command: missing".into()))
    }

    fn group_spec(&self, default: &str) -> Result<GroupSpec> {
        self.group
            .as_deref()
            .unwrap_or(default)
            .parse()
            .map_err(|e: Error| Error::Usage(format!("config field group: {e}")))
    }

    fn sweep(field: &Option<Sweep>, name: &str, default: &[f64]) -> Result<Vec<f64>> {
        let v = field.as_ref().map(Sweep::values).unwrap_or_else(|| default.to_vec());
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Usage(format!("config field {name}: expected finite values")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    CertifiedLowerBound,
    ConstructiveUpperBound,
    Observation,
}

/// A labelled numerical shadow of a quantity that is not itself computable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub quantity: String,
    pub value: f64,
    pub certificate: Certificate,
    /// Operation whose output backs the value.
    pub source: String,
    /// Hash of the configuration that produced it.
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    /// The configuration without its output path.
    pub config: ExperimentConfig,
    pub config_hash: String,
    /// Identifiers of the bounds asserted while producing the rows.
    pub checks: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub estimates: Vec<EstimateRecord>,
    pub notes: Vec<String>,
    /// Secondary tables, keyed by name (JSON output only).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Table>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// Header row, then one row per sweep point; reals carry 17
    /// significant digits.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| Error::Usage(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(|e| Error::Usage(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

/// JSON diagnostic for a failed run.
pub fn diagnostic(err: &Error) -> serde_json::Value {
    let (kind, statement) = match err {
        Error::BoundViolated { statement, .. } => ("bound-violated", Some(statement.clone())),
        Error::Usage(_) => ("usage", None),
        Error::Parse(_) | Error::Json(_) => ("parse", None),
        Error::Io(_) => ("io", None),
        Error::GroupLoad(_) | Error::NotSubgroup(_) | Error::NotNormal(_) => ("group", None),
        _ => ("numerical", None),
    };
    let detail = match err {
        Error::BoundViolated { detail, .. } => detail.clone(),
        other => other.to_string(),
    };
    serde_json::json!({ "status": "failed", "kind": kind, "statement": statement, "detail": detail })
}

/// Process exit code for an error: 1 for a violated bound, 2 for bad
/// input, 3 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BoundViolated { .. } => 1,
        Error::Usage(_) | Error::Parse(_) | Error::Json(_) | Error::GroupLoad(_) | Error::NotSubgroup(_) => 2,
        _ => 3,
    }
}

struct Builder {
    hash: String,
    checks: Vec<String>,
    table: Table,
    estimates: Vec<EstimateRecord>,
    notes: Vec<String>,
    extra: BTreeMap<String, Table>,
}

impl Builder {
    fn new(config: &ExperimentConfig, checks: &[&str], columns: &[&str]) -> Self {
        Self {
            hash: config.hash(),
            checks: checks.iter().map(|s| s.to_string()).collect(),
            table: Table::new(columns),
            estimates: Vec::new(),
            notes: Vec::new(),
            extra: BTreeMap::new(),
        }
    }

    fn estimate(&mut self, quantity: String, value: f64, certificate: Certificate, source: &str) {
        self.estimates.push(EstimateRecord {
            quantity,
            value,
            certificate,
            source: source.into(),
            provenance: self.hash.clone(),
        });
    }

    fn finish(self, command: Command, config: &ExperimentConfig) -> Report {
        let mut config = config.clone();
        config.out = None;
        Report {
            command,
            config,
            config_hash: self.hash,
            checks: self.checks,
            columns: self.table.columns,
            rows: self.table.rows,
            estimates: self.estimates,
            notes: self.notes,
            extra: self.extra,
        }
    }
}

fn violated(statement: &str, detail: String) -> Error {
    Error::BoundViolated { statement: statement.into(), detail }
}

/// Runs the configured pipeline. A failed bound aborts with
/// [`Error::BoundViolated`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    let command = config.command()?;
    let mut rng = seeded(config.seed);
    let b = match command {
        Command::Correct => run_correct(config, &mut rng)?,
        Command::Stabilize => run_stabilize(config, &mut rng)?,
        Command::InduceCompress => run_induce_compress(config, &mut rng)?,
        Command::Rolli => run_rolli(config, &mut rng)?,
        Command::Quasimorphism => run_quasimorphism(config)?,
        Command::Deform => run_deform(config, &mut rng)?,
        Command::WitnessScan => run_witness_scan(config)?,
    };
    Ok(b.finish(command, config))
}

/// Runs and writes the report to `config.out` (or returns it only).
pub fn run_and_write(config: &ExperimentConfig) -> Result<String> {
    let report = run_experiment(config)?;
    let text = report.render(config.format)?;
    if let Some(path) = &config.out {
        std::fs::write(path, &text)?;
    }
    Ok(text)
}

fn finite_group(config: &ExperimentConfig, default: &str) -> Result<Arc<FiniteGroup>> {
    Ok(Arc::new(build_group(&config.group_spec(default)?)?))
}

fn run_correct(config: &ExperimentConfig, rng: &mut LabRng) -> Result<Builder> {
    let g = finite_group(config, "cyclic:7")?;
    let d = config.dim.unwrap_or(3);
    let eps_list = ExperimentConfig::sweep(&config.delta, "delta", &[0.01])?;
    let trials = config.trials.unwrap_or(1);
    let tol = config.tol.unwrap_or(DEFAULT_TOL);
    let max_iter = config.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let mut b = Builder::new(
        config,
        &["kazhdan-correction-bound", "one-step-contraction"],
        &[
            "epsilon",
            "trial",
            "input_defect",
            "iterations",
            "final_defect",
            "distance",
            "guarantee",
            "one_step_defect",
            "converged",
        ],
    );
    b.notes.push(
        "each non-identity value is multiplied by a unitary at distance epsilon/3, so the input defect is at most epsilon"
            .into(),
    );
    for &eps in &eps_list {
        if !(0.0..2.0).contains(&eps) {
            return Err(Error::Usage(format!("config field delta: {eps} must lie in [0, 2)")));
        }
        let mut worst_ratio: f64 = 0.0;
        for trial in 0..trials {
            let rho = random_representation(rng, &g, d)?;
            let mu = perturb(rng, &rho, eps / 3.0)?;
            let trace = kazhdan_correct(&mu, tol, max_iter)?;
            let e = trace.initial_defect;
            let one_step = if trace.iterations.is_empty() {
                e
            } else {
                average_step(&mu)?.defect(None)?.value
            };
            if e <= 0.05 && one_step > 11.0 * e * e + crate::correct::BOUND_SLACK {
                return Err(violated(
                    "one-step-contraction",
                    format!("defect after one step {one_step:e} exceeds 11ε² for ε = {e:e} (trial {trial})"),
                ));
            }
            if e > 0.0 {
                worst_ratio = worst_ratio.max(trace.distance_to_input / e);
            }
            b.table.push(vec![
                eps.into(),
                trial.into(),
                e.into(),
                trace.iterations.len().into(),
                trace.final_defect.into(),
                trace.distance_to_input.into(),
                trace.guarantee.map(Cell::Real).unwrap_or(Cell::Text("n/a".into())),
                one_step.into(),
                trace.converged.into(),
            ]);
            b.estimate(
                format!("D_upper[{},{d}](trial {trial}, eps {eps})", g.order()),
                trace.distance_to_input,
                Certificate::ConstructiveUpperBound,
                "kazhdan_correct",
            );
            b.estimate(
                format!("D_lower[{},{d}](trial {trial}, eps {eps})", g.order()),
                e / 3.0,
                Certificate::CertifiedLowerBound,
                "defect/3",
            );
        }
        b.estimate(
            format!("distance_over_defect_max[{},{d}](eps {eps})", g.order()),
            worst_ratio,
            Certificate::Observation,
            "kazhdan_correct",
        );
    }
    Ok(b)
}

/// Nontrivial projection commuting with `ν`: a spectral projection of a
/// group-averaged random Hermitian matrix, cut at the spectral gap whose
/// rank is nearest to `rank`. Fails when `ν` is irreducible.
pub fn invariant_projection(rng: &mut LabRng, nu: &QuasiRep, rank: usize) -> Result<CMatrix> {
    let g = nu.group().ok_or_else(|| Error::Usage("finite domain expected".into()))?;
    let d = nu.dim();
    for _ in 0..20 {
        let h = random_hermitian_unit(rng, d);
        let mut avg = CMatrix::zeros(d, d);
        for x in g.elements() {
            avg += nu.value(x) * &h * nu.value(x).adjoint();
        }
        let avg = linalg::hermitian_part(&avg.unscale(g.order() as f64));
        let eig = linalg::hermitian_eigen(&avg)?;
        // eigenvalues ascending; a cut at c keeps the top d − c
        let cut = (1..d)
            .filter(|&c| eig.values[c] - eig.values[c - 1] > 1e-3)
            .min_by_key(|&c| ((d - c) as i64 - rank as i64).abs());
        if let Some(c) = cut {
            return linalg::spectral_projection_from(&eig, 0.5 * (eig.values[c] + eig.values[c - 1]));
        }
    }
    Err(Error::Usage("no nontrivial invariant projection found; the representation may be irreducible".into()))
}

fn reducible_with_projection(
    rng: &mut LabRng,
    g: &Arc<FiniteGroup>,
    d: usize,
    rank: usize,
) -> Result<(QuasiRep, CMatrix)> {
    for _ in 0..100 {
        let nu = random_representation(rng, g, d)?;
        if let Ok(p) = invariant_projection(rng, &nu, rank) {
            return Ok((nu, p));
        }
    }
    Err(Error::Usage(format!("no reducible representation of dimension {d} found")))
}

fn run_stabilize(config: &ExperimentConfig, rng: &mut LabRng) -> Result<Builder> {
    let g = finite_group(config, "dihedral:4")?;
    let d = config.dim.unwrap_or(4);
    let sizes = ExperimentConfig::sweep(&config.delta, "delta", &[0.05])?;
    let trials = config.trials.unwrap_or(1);
    let mut b = Builder::new(
        config,
        &["projection-stabilization"],
        &["rotation", "trial", "rank", "measured_delta", "p_minus_q", "bound", "q0_minus_p", "max_commutator"],
    );
    for &size in &sizes {
        for trial in 0..trials {
            let rank = 1 + below(rng, d.max(2) - 1);
            let (nu, p0) = reducible_with_projection(rng, &g, d, rank)?;
            let u = unitary_at_distance(rng, d, size);
            let p = linalg::hermitian_part(&(u.matrix() * &p0 * u.matrix().adjoint()));
            let probe = stabilize_projection(&nu, &p, 0.499).map_err(|e| match e {
                Error::SpectralGap { .. } | Error::Usage(_) => {
                    Error::Usage(format!("rotation {size} is too large for the stabilization hypothesis: {e}"))
                }
                other => other,
            })?;
            let s = stabilize_projection(&nu, &p, probe.measured_delta)?;
            b.table.push(vec![
                size.into(),
                trial.into(),
                rank.into(),
                s.measured_delta.into(),
                s.p_minus_q.into(),
                (2.0 * s.measured_delta).into(),
                s.q0_minus_p.into(),
                s.max_commutator.into(),
            ]);
        }
    }
    Ok(b)
}

fn run_induce_compress(config: &ExperimentConfig, rng: &mut LabRng) -> Result<Builder> {
    let g = finite_group(config, "cyclic:4")?;
    let gens = config.subgroup.clone().unwrap_or_else(|| vec![2]);
    if let Some(&bad) = gens.iter().find(|&&x| x >= g.order()) {
        return Err(Error::Usage(format!("config field subgroup: element {bad} out of range")));
    }
    let cs = CosetSystem::new(g.clone(), &g.generated_subgroup(&gens))?;
    let d = config.dim.unwrap_or(2);
    let sizes = ExperimentConfig::sweep(&config.delta, "delta", &[0.01])?;
    let trials = config.trials.unwrap_or(1);
    let mut b = Builder::new(
        config,
        &["induction-preserves-defect", "induction-isometry", "induction-compression"],
        &[
            "conjugation",
            "trial",
            "index",
            "delta",
            "p_conjugation",
            "p_minus_q",
            "q_minus_v",
            "p_minus_v",
            "final_distance",
            "final_bound",
        ],
    );
    for &size in &sizes {
        for trial in 0..trials {
            let mu = random_representation(rng, cs.subgroup_group(), d)?;
            let ind = induce(&mu, &cs)?;
            // isometry of induction on a perturbed pair
            let m1 = perturb(rng, &mu, 0.05)?;
            let m2 = perturb(rng, &mu, 0.03)?;
            let (i1, i2) = (induce(&m1, &cs)?, induce(&m2, &cs)?);
            let (lhs, rhs) = (i1.total.uniform_distance(&i2.total)?.value, m1.uniform_distance(&m2)?.value);
            if (lhs - rhs).abs() > crate::induction::INDUCTION_TOL {
                return Err(violated("induction-isometry", format!("‖μ̄₁ − μ̄₂‖ = {lhs:e} but ‖μ₁ − μ₂‖ = {rhs:e}")));
            }
            let u = unitary_at_distance(rng, ind.total.dim(), size);
            let nu = ind.total.conjugate(&u);
            let delta = nu.uniform_distance(&ind.total)?.value * (1.0 + 1e-9) + 1e-15;
            let r = compress(&nu, &mu, &cs, delta)?;
            b.table.push(vec![
                size.into(),
                trial.into(),
                cs.index().into(),
                delta.into(),
                r.p_conjugation.into(),
                r.p_minus_q.into(),
                r.q_minus_v.into(),
                r.p_minus_v.into(),
                r.final_distance.into(),
                (16.0 * delta).into(),
            ]);
        }
    }
    Ok(b)
}

fn run_rolli(config: &ExperimentConfig, rng: &mut LabRng) -> Result<Builder> {
    let n = config.dim.unwrap_or(2);
    let deltas = ExperimentConfig::sweep(&config.delta, "delta", &[0.1, 0.3, 1.0])?;
    let l = config.trunc.unwrap_or(4);
    let candidates = config.trials.unwrap_or(20).max(1);
    let mut b = Builder::new(
        config,
        &["rolli-defect"],
        &[
            "dim",
            "delta",
            "trunc",
            "defect",
            "witness_x",
            "witness_y",
            "natural_candidate_distance",
            "best_candidate_distance",
        ],
    );
    b.notes.push(
        "the distance to all representations is an infimum out of numerical reach; candidate distances are reported, not asserted"
            .into(),
    );
    for &delta in &deltas {
        let rolli = Rolli::new(RolliData::new(n, delta, config.seed))?;
        let mu = rolli.tabulate(l)?;
        let def = mu.defect(Some(l))?;
        if def.value > delta + 1e-10 {
            return Err(violated("rolli-defect", format!("truncated defect {:e} exceeds δ = {delta}", def.value)));
        }
        let ball = match mu.domain() {
            crate::quasirep::Domain::Free(b) => b.clone(),
            _ => unreachable!("rolli maps live on free groups"),
        };
        let natural = [mu.value(1).clone(), mu.value(3).clone()];
        debug_assert_eq!(ball.word(1).to_string(), "a");
        debug_assert_eq!(ball.word(3).to_string(), "b");
        let natural_dist = distance_to_hom(&mu, &natural, l)?.value;
        let mut best = natural_dist;
        for _ in 1..candidates {
            let images = [random_unitary(rng, n).into_matrix(), random_unitary(rng, n).into_matrix()];
            best = best.min(distance_to_hom(&mu, &images, l)?.value);
        }
        b.table.push(vec![
            n.into(),
            delta.into(),
            l.into(),
            def.value.into(),
            ball.word(def.witness.0).to_string().into(),
            ball.word(def.witness.1).to_string().into(),
            natural_dist.into(),
            best.into(),
        ]);
        b.estimate(
            format!("def_trunc[{l}](rolli n={n}, delta={delta})"),
            def.value,
            Certificate::CertifiedLowerBound,
            "defect over |x|,|y|,|xy| <= L",
        );
        b.estimate(
            format!("D_candidates[{l}](rolli n={n}, delta={delta})"),
            best,
            Certificate::Observation,
            "min over seeded homomorphism candidates",
        );
    }
    Ok(b)
}

fn run_quasimorphism(config: &ExperimentConfig) -> Result<Builder> {
    let pattern: FreeWord = config
        .pattern
        .as_deref()
        .unwrap_or(crate::witnesses::quasimorphism::DEFAULT_PATTERN)
        .parse()
        .map_err(|e: Error| Error::Usage(format!("config field pattern: {e}")))?;
    let phi = brooks_phi(&pattern)?;
    let l = config.trunc.unwrap_or(8);
    let ts = ExperimentConfig::sweep(&config.t, "t", &[0.1, 0.01, 0.001])?;
    let grid = config.grid.unwrap_or(64);
    let cob = coboundary_sup(&phi, l)?;
    let mut b = Builder::new(
        config,
        &["circle-witness-defect"],
        &["t", "trunc", "defect", "defect_bound", "fit_distance", "fit_alpha", "fit_beta"],
    );
    b.notes.push(format!(
        "coboundary sup over |g|,|h| <= {l} is {} at ({}, {})",
        cob.value, cob.witness.0, cob.witness.1
    ));
    b.notes.push(
        "the limit inferior sqrt(3) of the distance as t -> 0 is not assertable under truncation; fit distances are observations"
            .into(),
    );
    b.estimate(format!("dphi_trunc[{l}]({pattern})"), cob.value, Certificate::CertifiedLowerBound, "coboundary_sup");
    for &t in &ts {
        let mu = exp_circle(&phi, t, l)?;
        let def = mu.defect(Some(l))?.value;
        let bound = 2.0 * PI * t.abs() * cob.value;
        if def > bound + 1e-12 {
            return Err(violated("circle-witness-defect", format!("defect {def:e} exceeds 2πt·sup|dφ| = {bound:e} at t = {t}")));
        }
        let fit = nearest_circle_hom(&mu, l, grid)?;
        b.table.push(vec![
            t.into(),
            l.into(),
            def.into(),
            bound.into(),
            fit.distance.into(),
            fit.alpha.into(),
            fit.beta.into(),
        ]);
        b.estimate(format!("def_trunc[{l}](t={t})"), def, Certificate::CertifiedLowerBound, "defect");
        b.estimate(format!("D_hat[{l}](t={t})"), fit.distance, Certificate::Observation, "nearest_circle_hom");
    }
    Ok(b)
}

fn run_deform(config: &ExperimentConfig, rng: &mut LabRng) -> Result<Builder> {
    let l = config.trunc.unwrap_or(8);
    let k = 2;
    let pairs = config.trials.unwrap_or(50);
    let max_len = config.max_word_len.unwrap_or(3).min(l);
    let zs = ExperimentConfig::sweep(&config.z, "z", &[0.5])?;
    let ops = DeformationOps::new(k, l)?;
    let words = enumerate_ball(k, max_len)?;
    let mut b = Builder::new(
        config,
        &["deformation-structure", "deformation-continuity-corrected"],
        &["pair", "z_re", "z_im", "w_re", "w_im", "word", "lhs", "rhs", "difference_norm", "uncorrected_holds"],
    );
    let mut structure = Table::new(&["word", "k_dim", "difference_norm", "image_outside_k", "p_on_k_norm"]);
    for a in &words {
        let r = ps_structural_checks(&ops, a)?;
        structure.push(vec![
            a.to_string().into(),
            r.k_dim.into(),
            r.difference_norm.into(),
            r.image_outside_k.into(),
            r.p_on_k_norm.into(),
        ]);
    }
    for pair in 0..pairs {
        let z = random_disk_point(rng, 0.9);
        let w = random_disk_point(rng, 0.9);
        for a in &words {
            let gap = ps_continuity_corrected(&ops, z, w, a)?;
            b.table.push(vec![
                pair.into(),
                z.re.into(),
                z.im.into(),
                w.re.into(),
                w.im.into(),
                a.to_string().into(),
                gap.lhs.into(),
                gap.rhs.into(),
                gap.difference_norm.into(),
                (gap.lhs <= gap.rhs + crate::deformation::CONTINUITY_SLACK).into(),
            ]);
        }
    }
    let mut unitarity = Table::new(&["z", "word", "interior_unitarity_defect"]);
    for &z in &zs {
        for a in words.iter().filter(|a| a.len() >= 1) {
            let p = ps_pi(&ops, z, a)?;
            unitarity.push(vec![z.into(), a.to_string().into(), p.interior_unitarity_defect.into()]);
        }
    }
    b.extra.insert("structure".into(), structure);
    b.extra.insert("unitarity".into(), unitarity);
    b.notes.push(
        "continuity is asserted as lhs <= |P - λ(a)Pλ(a)⁻¹| · Σ|zⁿ - wⁿ|; the column uncorrected_holds records the form without that factor"
            .into(),
    );
    b.notes.push("unitarity of the deformed operators is reported on the interior domain, not asserted".into());
    Ok(b)
}

fn random_disk_point(rng: &mut LabRng, radius: f64) -> Complex64 {
    let r = radius * uniform(rng, 0.0, 1.0).sqrt();
    Complex64::from_polar(r, uniform(rng, 0.0, 2.0 * PI))
}

fn run_witness_scan(config: &ExperimentConfig) -> Result<Builder> {
    let g = finite_group(config, "cyclic:5")?;
    let deltas = ExperimentConfig::sweep(&config.delta, "delta", &[0.05, 0.1, 0.2, 0.4])?;
    let chars = one_dim_characters(&g)?;
    let mut b = Builder::new(config, &["one-dim-witness-defect"], &["delta", "element", "defect", "distance_to_characters", "ratio"]);
    b.notes.push("for one-dimensional maps the distance to the finitely many characters is computed exactly".into());
    for &delta in &deltas {
        if !(delta > 0.0 && delta <= 2.0) {
            return Err(Error::Usage(format!("config field delta: {delta} must lie in (0, 2]")));
        }
        let mut worst: f64 = f64::INFINITY;
        for gamma0 in g.elements().filter(|&x| x != g.identity()) {
            let mu = one_dim_witness(g.clone(), gamma0, delta)?;
            let def = mu.defect(None)?.value;
            if def > delta + 1e-12 {
                return Err(violated("one-dim-witness-defect", format!("defect {def:e} exceeds δ = {delta}")));
            }
            let d = chars
                .iter()
                .map(|c| mu.uniform_distance(c).map(|r| r.value))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            worst = worst.min(d);
            b.table.push(vec![delta.into(), gamma0.into(), def.into(), d.into(), (d / delta).into()]);
        }
        if worst.is_finite() {
            b.estimate(
                format!("F_lower[{},1]({delta})", g.order()),
                worst,
                Certificate::CertifiedLowerBound,
                "exact distance of a one-dimensional witness to all characters",
            );
        }
    }
    Ok(b)
}

/// Distance from `μ` to its nearest one-dimensional character, computed
/// exactly over all characters.
pub fn distance_to_characters(mu: &QuasiRep) -> Result<f64> {
    let g = mu.group().ok_or_else(|| Error::Usage("finite domain expected".into()))?;
    let mut best = f64::INFINITY;
    for c in one_dim_characters(g)? {
        best = best.min(mu.uniform_distance(&c)?.value);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(command: Command) -> ExperimentConfig {
        ExperimentConfig { command: Some(command), seed: 42, ..Default::default() }
    }

    #[test]
    fn correct_on_cyclic_seven() {
        let mut c = config(Command::Correct);
        c.delta = Some(Sweep::One(0.01));
        let r = run_experiment(&c).unwrap();
        let col = r.columns.iter().position(|s| s == "distance").unwrap();
        for row in &r.rows {
            let Cell::Real(d) = row[col] else { panic!() };
            assert!(d <= 0.022);
        }
    }

    #[test]
    fn exact_representation_needs_no_iterations() {
        let mut c = config(Command::Correct);
        c.delta = Some(Sweep::One(0.0));
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.rows[0][3], Cell::Int(0));
        assert_eq!(r.rows[0][5], Cell::Real(0.0));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let err = ExperimentConfig::from_json(r#"{"command": "correct", "dim": "three"}"#).unwrap_err();
        assert!(err.to_string().contains("dim"), "{err}");
        let err = ExperimentConfig::from_json(r#"{"colour": 1}"#).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
        let err = ExperimentConfig::from_json(r#"{"command": "frobnicate"}"#).unwrap_err();
        assert!(err.to_string().contains("command"), "{err}");
    }

    #[test]
    fn diagnostics_name_the_statement() {
        let e = Error::BoundViolated { statement: "rolli-defect".into(), detail: "x".into() };
        assert_eq!(exit_code(&e), 1);
        let d = diagnostic(&e);
        assert_eq!(d["statement"], "rolli-defect");
        assert_eq!(d["kind"], "bound-violated");
        assert_eq!(exit_code(&Error::Usage("u".into())), 2);
    }

    #[test]
    fn sweeps_accept_scalars_and_lists() {
        let c = ExperimentConfig::from_json(r#"{"delta": 0.1, "t": [0.1, 0.2]}"#).unwrap();
        assert_eq!(c.delta, Some(Sweep::One(0.1)));
        assert_eq!(c.t.unwrap().values(), vec![0.1, 0.2]);
    }

    #[test]
    fn hash_ignores_output_settings() {
        let mut a = config(Command::Rolli);
        let h = a.hash();
        a.out = Some("x.json".into());
        a.format = Format::Csv;
        assert_eq!(a.hash(), h);
        a.seed = 7;
        assert_ne!(a.hash(), h);
    }

    #[test]
    fn csv_has_header_and_seventeen_digits() {
        let mut c = config(Command::WitnessScan);
        c.delta = Some(Sweep::Many(vec![0.1]));
        let csv = run_experiment(&c).unwrap().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "delta,element,defect,distance_to_characters,ratio");
        let first = lines.next().unwrap();
        assert!(first.starts_with("1.0000000000000001e-1,1,"), "{first}");
    }
}
