//! File formats: plans, state files, and CSV tables with JSON mirrors.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::mapping::{Mapping, MappingKind};
use crate::pauli::Letter;
use crate::perm::{NCSetting, PermSetting, Setting};
use crate::planner::{CoveragePlan, Ensemble};
use crate::sim::{reference_state, CMatrix, DenseState, StateSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SettingRecord {
    Fgu { pi: Vec<usize> },
    Nc { u: Vec<usize>, basis: String },
}

impl From<&Setting> for SettingRecord {
    fn from(s: &Setting) -> Self {
        match s {
            Setting::Fgu(q) => SettingRecord::Fgu { pi: q.images().to_vec() },
            Setting::Nc(s) => SettingRecord::Nc { u: s.modes().to_vec(), basis: s.basis_string() },
        }
    }
}

impl TryFrom<SettingRecord> for Setting {
    type Error = Error;
    fn try_from(r: SettingRecord) -> Result<Self> {
        Ok(match r {
            SettingRecord::Fgu { pi } => Setting::Fgu(PermSetting::new(pi)?),
            SettingRecord::Nc { u, basis } => {
                let letters = basis
                    .chars()
                    .map(|c| Letter::from_char(c).ok_or_else(|| Error::Format(format!("bad basis letter '{c}'"))))
                    .collect::<Result<Vec<_>>>()?;
                Setting::Nc(NCSetting::new(u, letters)?)
            }
        })
    }
}

#[derive(Serialize, Deserialize)]
struct PlanRecord {
    n: usize,
    k: usize,
    ensemble: Ensemble,
    mapping: MappingKind,
    r: u64,
    seed: u64,
    #[serde(default)]
    k_r: Option<usize>,
    #[serde(default)]
    min_coverage: Option<u64>,
    #[serde(default)]
    mean_coverage: Option<f64>,
    settings: Vec<SettingRecord>,
}

/// A measurement plan as read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanFile {
    pub n: usize,
    pub k: usize,
    pub ensemble: Ensemble,
    pub mapping: MappingKind,
    pub r: u64,
    pub seed: u64,
    pub settings: Vec<Setting>,
}

pub fn plan_to_json(plan: &CoveragePlan) -> Result<String> {
    let rec = PlanRecord {
        n: plan.n,
        k: plan.k,
        ensemble: plan.ensemble,
        mapping: plan.mapping.kind(),
        r: plan.r,
        seed: plan.seed,
        k_r: Some(plan.k_r()),
        min_coverage: Some(plan.min_coverage()),
        mean_coverage: Some(plan.mean_coverage()),
        settings: plan.settings.iter().map(SettingRecord::from).collect(),
    };
    Ok(serde_json::to_string_pretty(&rec)? + "\n")
}

pub fn plan_from_json(text: &str) -> Result<PlanFile> {
    let rec: PlanRecord = serde_json::from_str(text)?;
    let settings = rec.settings.into_iter().map(Setting::try_from).collect::<Result<Vec<_>>>()?;
    if let Some(bad) = settings.iter().find(|s| s.n() != rec.n) {
        return Err(Error::ModeMismatch { expected: rec.n, found: bad.n() });
    }
    let ensemble_ok = settings
        .iter()
        .all(|s| matches!((s, rec.ensemble), (Setting::Fgu(_), Ensemble::Fgu) | (Setting::Nc(_), Ensemble::Nc)));
    if !ensemble_ok {
        return Err(Error::Format(format!("plan mixes settings with ensemble {}", rec.ensemble)));
    }
    Ok(PlanFile {
        n: rec.n,
        k: rec.k,
        ensemble: rec.ensemble,
        mapping: rec.mapping,
        r: rec.r,
        seed: rec.seed,
        settings,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRecord {
    #[serde(default)]
    fock: Option<Vec<u8>>,
    /// `[re, im]` pairs.
    #[serde(default)]
    amplitudes: Option<Vec<[f64; 2]>>,
    /// Rows of `[re, im]` pairs.
    #[serde(default)]
    density: Option<Vec<Vec<[f64; 2]>>>,
}

fn qubits_for(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Format(format!("state dimension {len} is not a power of two ≥ 2")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Parses `{"fock": [...]}`, `{"amplitudes": [[re, im], ...]}` or
/// `{"density": [[[re, im], ...], ...]}`. Fock occupations are encoded with
/// the given mapping; amplitudes and densities are taken in its qubit basis.
pub fn state_from_json(text: &str, mapping: MappingKind) -> Result<DenseState> {
    let rec: StateRecord = serde_json::from_str(text)?;
    match (rec.fock, rec.amplitudes, rec.density) {
        (Some(occ), None, None) => {
            let n = occ.len();
            reference_state(n, &StateSpec::Fock(occ), &Mapping::new(mapping, n)?)
        }
        (None, Some(a), None) => {
            let n = qubits_for(a.len())?;
            let amps: Vec<Complex64> = a.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            DenseState::from_amplitudes(n, &amps)
        }
        (None, None, Some(rows)) => {
            let n = qubits_for(rows.len())?;
            let dim = rows.len();
            if rows.iter().any(|r| r.len() != dim) {
                return Err(Error::Format("density matrix is not square".into()));
            }
            let rho = CMatrix::from_fn(dim, dim, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
            DenseState::from_density(n, rho)
        }
        _ => Err(Error::Format("state file needs exactly one of fock, amplitudes, density".into())),
    }
}

/// Run configuration echoed at the top of every table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Header {
    entries: Vec<(String, String)>,
}

impl Header {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    fn json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in &self.entries {
            m.insert(k.clone(), Value::String(v.clone()));
        }
        Value::Object(m)
    }
}

/// A rectangular table rendered as CSV (with `#` header lines) and JSON.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Header,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Table {
    pub fn new(header: Header, columns: &[&str]) -> Self {
        Table { header, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header.entries {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert(c.clone(), v.clone());
                }
                Value::Object(m)
            })
            .collect();
        Ok(serde_json::to_string_pretty(&json!({ "config": self.header.json(), "rows": rows }))? + "\n")
    }

    /// Writes `path` as CSV and a sibling `.json` mirror.
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        std::fs::write(path.with_extension("json"), self.to_json()?)?;
        Ok(())
    }
}

/// Space-separated mode tuple, e.g. `"0 1"`.
pub fn tuple_label(t: &[usize]) -> String {
    t.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn rdm_table(header: Header, rdm: &crate::observables::RDMTensor) -> Table {
    let mut t = Table::new(header, &["p", "q", "real", "imag"]);
    let tuples = rdm.tuples();
    for (rp, p) in tuples.iter().enumerate() {
        for (rq, q) in tuples.iter().enumerate() {
            let v = rdm.get(rp, rq);
            t.push(vec![json!(tuple_label(p)), json!(tuple_label(q)), json!(v.re), json!(v.im)]);
        }
    }
    t
}
