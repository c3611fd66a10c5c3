//! JSON and CSV file formats.
//!
//! Every reader goes through [`parse`], which keeps serde's line and column
//! on syntax and shape errors. Conversion into core types reports the
//! offending field by name.

use std::collections::BTreeMap;

use menger_core::combinatorics::{FiniteRelation, IndexSet, Periodic};
use menger_core::espace::{AffineMap, EPoint, ESpace, Euclidean, MetricTable, ProbSpace};
use menger_core::pm_space::{FinitePmSpace, TableMap};
use menger_core::pn_space::{FinitePnSpace, Vector};
use menger_core::solver::{OrbitTrace, Outcome};
use menger_core::{Ddf, TNorm};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}:{line}:{column}: {msg}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("field `{field}`: {msg}")]
    Invalid { field: String, msg: String },
}

impl FormatError {
    pub fn invalid(field: impl Into<String>, msg: impl ToString) -> Self {
        FormatError::Invalid {
            field: field.into(),
            msg: msg.to_string(),
        }
    }
}

/// Parses `text` as `T`; `path` only labels the error.
pub fn parse<T: DeserializeOwned>(path: &str, text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        msg: strip_position(&e),
    })
}

fn strip_position(e: &serde_json::Error) -> String {
    let full = e.to_string();
    match full.rfind(" at line ") {
        Some(pos) => full[..pos].to_string(),
        None => full,
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DdfJson {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl DdfJson {
    pub fn to_ddf(&self, field: &str) -> Result<Ddf, FormatError> {
        Ddf::new(self.breakpoints.clone(), self.values.clone())
            .map_err(|e| FormatError::invalid(field, e))
    }
}

impl From<&Ddf> for DdfJson {
    fn from(f: &Ddf) -> Self {
        DdfJson {
            breakpoints: f.breakpoints().to_vec(),
            values: f.values().to_vec(),
        }
    }
}

/// Finite probabilistic metric space; `ddfs` is keyed by `"p|q"` in either
/// order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceJson {
    pub points: Vec<String>,
    #[serde(default)]
    pub ddfs: BTreeMap<String, DdfJson>,
}

impl SpaceJson {
    pub fn to_space(&self) -> Result<FinitePmSpace, FormatError> {
        let mut entries = Vec::with_capacity(self.ddfs.len());
        for (key, d) in &self.ddfs {
            let field = format!("ddfs.{key}");
            let (p, q) = key
                .split_once('|')
                .ok_or_else(|| FormatError::invalid(&field, "key must have the form \"p|q\""))?;
            entries.push((p.to_string(), q.to_string(), d.to_ddf(&field)?));
        }
        FinitePmSpace::build(self.points.clone(), entries).map_err(|e| FormatError::invalid("ddfs", e))
    }

    pub fn from_space(space: &FinitePmSpace) -> Self {
        let labels = space.labels();
        let mut ddfs = BTreeMap::new();
        for i in 0..labels.len() {
            for j in i + 1..labels.len() {
                ddfs.insert(format!("{}|{}", labels[i], labels[j]), space.get(i, j).into());
            }
        }
        SpaceJson {
            points: labels.to_vec(),
            ddfs,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseJson {
    Euclidean { dim: usize },
    Table { dist: Vec<Vec<f64>> },
}

/// E-space instance: outcome probabilities, a base metric, and points given
/// as one base element per outcome (a coordinate array, a bare number in
/// dimension 1, or a table index).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub probs: Vec<f64>,
    pub base: BaseJson,
    pub points: Vec<Vec<Value>>,
}

#[derive(Debug, Clone)]
pub enum Instance {
    Euclidean(ESpace<Euclidean>),
    Table(ESpace<MetricTable>),
}

impl Instance {
    pub fn to_pm_space(&self) -> Result<(FinitePmSpace, Vec<usize>), FormatError> {
        let collapsed = match self {
            Instance::Euclidean(s) => s.to_pm_space(),
            Instance::Table(s) => s.to_pm_space(),
        }
        .map_err(|e| FormatError::invalid("points", e))?;
        Ok((collapsed.space, collapsed.representative))
    }

    pub fn len(&self) -> usize {
        match self {
            Instance::Euclidean(s) => s.points().len(),
            Instance::Table(s) => s.points().len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub(crate) fn prob_space(probs: &[f64]) -> Result<ProbSpace, FormatError> {
    ProbSpace::new(probs.to_vec()).map_err(|e| FormatError::invalid("probs", e))
}

fn coord_vector(v: &Value, field: &str) -> Result<Vec<f64>, FormatError> {
    let num = |x: &Value| {
        x.as_f64()
            .ok_or_else(|| FormatError::invalid(field, "expected a number"))
    };
    match v {
        Value::Array(xs) => xs.iter().map(num).collect(),
        other => Ok(vec![num(other)?]),
    }
}

pub(crate) fn vector_points(points: &[Vec<Value>], field: &str) -> Result<Vec<Vector>, FormatError> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let f = format!("{field}[{i}]");
            p.iter()
                .map(|c| coord_vector(c, &f))
                .collect::<Result<Vec<_>, _>>()
                .map(EPoint::new)
        })
        .collect()
}

impl InstanceJson {
    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        let prob = prob_space(&self.probs)?;
        let invalid = |e| FormatError::invalid("points", e);
        match &self.base {
            BaseJson::Euclidean { dim } => {
                let base = Euclidean::new(*dim).map_err(|e| FormatError::invalid("base.dim", e))?;
                let points = vector_points(&self.points, "points")?;
                ESpace::new(prob, base, points).map(Instance::Euclidean).map_err(invalid)
            }
            BaseJson::Table { dist } => {
                let base =
                    MetricTable::new(dist.clone()).map_err(|e| FormatError::invalid("base.dist", e))?;
                let mut points = Vec::with_capacity(self.points.len());
                for (i, p) in self.points.iter().enumerate() {
                    let coords = p
                        .iter()
                        .map(|c| {
                            c.as_u64().map(|x| x as usize).ok_or_else(|| {
                                FormatError::invalid(format!("points[{i}]"), "expected a table index")
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    points.push(EPoint::new(coords));
                }
                ESpace::new(prob, base, points).map(Instance::Table).map_err(invalid)
            }
        }
    }

    pub fn from_euclidean(space: &ESpace<Euclidean>) -> Self {
        InstanceJson {
            probs: space.prob().probs().to_vec(),
            base: BaseJson::Euclidean {
                dim: space.base().dim(),
            },
            points: space.points().iter().map(vector_json).collect(),
        }
    }
}

pub(crate) fn vector_json(p: &Vector) -> Vec<Value> {
    p.coords
        .iter()
        .map(|x| Value::from(x.iter().copied().map(Value::from).collect::<Vec<_>>()))
        .collect()
}

/// A self-map: a label table for finite spaces, or `x ↦ A·x + b` per outcome
/// for Euclidean instances, with `A` given as `scale·I` or a full matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MapJson {
    Table {
        map: BTreeMap<String, String>,
    },
    Affine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Vec<f64>>,
    },
}

impl MapJson {
    pub fn to_table(&self, labels: &[String]) -> Result<TableMap, FormatError> {
        let MapJson::Table { map } = self else {
            return Err(FormatError::invalid("kind", "expected a table map"));
        };
        let index = |l: &str, field: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| FormatError::invalid(field, format!("unknown point `{l}`")))
        };
        let mut image = vec![None; labels.len()];
        for (from, to) in map {
            let field = format!("map.{from}");
            image[index(from, &field)?] = Some(index(to, &field)?);
        }
        let image = image
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| FormatError::invalid("map", format!("no image for `{}`", labels[i]))))
            .collect::<Result<Vec<_>, _>>()?;
        TableMap::new(image).map_err(|e| FormatError::invalid("map", e))
    }

    pub fn to_affine(&self, dim: usize) -> Result<AffineMap, FormatError> {
        let MapJson::Affine {
            scale,
            matrix,
            offset,
        } = self
        else {
            return Err(FormatError::invalid("kind", "expected an affine map"));
        };
        let offset = offset.clone().unwrap_or_else(|| vec![0.0; dim]);
        let map = match (scale, matrix) {
            (Some(s), None) => AffineMap::scale(*s, offset),
            (None, Some(m)) => AffineMap::new(m.clone(), offset),
            _ => return Err(FormatError::invalid("scale", "give exactly one of `scale` and `matrix`")),
        }
        .map_err(|e| FormatError::invalid("matrix", e))?;
        if map.dim() != dim {
            return Err(FormatError::invalid(
                "matrix",
                format!("map acts on dimension {}, the instance has {dim}", map.dim()),
            ));
        }
        Ok(map)
    }

    pub fn from_affine(map: &AffineMap) -> Self {
        MapJson::Affine {
            scale: None,
            matrix: Some(map.matrix_rows().map(<[f64]>::to_vec).collect()),
            offset: Some(map.offset().to_vec()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodicJson {
    #[serde(default)]
    pub pre: Vec<usize>,
    pub p: usize,
    pub residues: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
}

/// Index set on `[0, n)`. With only a periodic descriptor, `n` may be
/// omitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexSetJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic: Option<PeriodicJson>,
}

impl IndexSetJson {
    pub fn periodic(&self) -> Result<Option<Periodic>, FormatError> {
        self.periodic
            .as_ref()
            .map(|p| {
                Periodic::new(p.pre.clone(), p.p, p.residues.clone(), p.start)
                    .map_err(|e| FormatError::invalid("periodic", e))
            })
            .transpose()
    }

    /// The set on its window; a bare periodic descriptor gets `default_n`.
    pub fn to_index_set(&self, default_n: Option<usize>) -> Result<IndexSet, FormatError> {
        let periodic = self.periodic()?;
        let n = self
            .n
            .or(default_n)
            .ok_or_else(|| FormatError::invalid("n", "window length is required"))?;
        let invalid = |e| FormatError::invalid("members", e);
        match (&self.members, periodic) {
            (Some(m), Some(p)) => IndexSet::with_periodic(n, m.clone(), p).map_err(invalid),
            (Some(m), None) => IndexSet::new(n, m.clone()).map_err(invalid),
            (None, Some(p)) => IndexSet::from_periodic(n, p).map_err(invalid),
            (None, None) => Err(FormatError::invalid("members", "give `members` or `periodic`")),
        }
    }

    pub fn from_set(set: &IndexSet) -> Self {
        IndexSetJson {
            n: Some(set.window()),
            members: Some(set.members().to_vec()),
            periodic: set.periodic().map(|p| PeriodicJson {
                pre: p.pre().to_vec(),
                p: p.period(),
                residues: p.residues().to_vec(),
                start: Some(p.start()),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationJson {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl RelationJson {
    pub fn to_relation(&self) -> Result<FiniteRelation, FormatError> {
        FiniteRelation::from_pairs(self.n, self.pairs.iter().copied())
            .map_err(|e| FormatError::invalid("pairs", e))
    }

    pub fn from_relation(rel: &FiniteRelation) -> Self {
        RelationJson {
            n: rel.window(),
            pairs: rel.pairs().collect(),
        }
    }
}

fn default_tau() -> String {
    "W".into()
}

fn default_tau_star() -> String {
    "M".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PnConfigJson {
    pub probs: Vec<f64>,
    pub dim: usize,
    #[serde(default = "default_tau")]
    pub tau: String,
    #[serde(default = "default_tau_star")]
    pub tau_star: String,
}

impl PnConfigJson {
    pub fn to_space(&self) -> Result<FinitePnSpace, FormatError> {
        let tau: TNorm = self.tau.parse().map_err(|e| FormatError::invalid("tau", e))?;
        let tau_star: TNorm = self
            .tau_star
            .parse()
            .map_err(|e| FormatError::invalid("tau_star", e))?;
        FinitePnSpace::new(prob_space(&self.probs)?, self.dim, tau, tau_star)
            .map_err(|e| FormatError::invalid("dim", e))
    }
}

/// Normed-space instance: configuration, sample vectors and an optional
/// linear map given as a `dim × dim` matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PnInstanceJson {
    #[serde(flatten)]
    pub config: PnConfigJson,
    pub vectors: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

impl PnInstanceJson {
    pub fn vectors(&self) -> Result<Vec<Vector>, FormatError> {
        vector_points(&self.vectors, "vectors")
    }

    pub fn map(&self) -> Result<Option<AffineMap>, FormatError> {
        self.matrix
            .as_ref()
            .map(|m| AffineMap::linear(m.clone()).map_err(|e| FormatError::invalid("matrix", e)))
            .transpose()
    }
}

/// A certified contraction fixture as written by the generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureJson {
    pub m: usize,
    pub k: f64,
    pub instance: InstanceJson,
    pub map: MapJson,
}

/// A pair of functions for the one-shot `sibley` and `tau` commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DdfPairJson {
    pub f: DdfJson,
    pub g: DdfJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Value>,
    pub iters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified_dist: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_offset: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_length: Option<usize>,
}

impl TraceSummary {
    pub fn new<P>(trace: &OrbitTrace<P>, point: impl Fn(&P) -> Value) -> Self {
        let (outcome, offset, length) = match trace.outcome {
            Outcome::Converged { .. } => ("converged", None, None),
            Outcome::Cycle { offset, length } => ("cycle", Some(offset), Some(length)),
            Outcome::BudgetExhausted => ("budget_exhausted", None, None),
        };
        TraceSummary {
            outcome,
            r: trace.fixed_point().map(point),
            iters: trace.iterations(),
            verified_dist: trace.verified_dist,
            cycle_offset: offset,
            cycle_length: length,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub point_id: String,
    pub step_dist: f64,
}

/// Row `n` describes the step from `xₙ` to `xₙ₊₁`.
pub fn trace_rows<P>(trace: &OrbitTrace<P>, id: impl Fn(usize, &P) -> String) -> Vec<TraceRow> {
    trace
        .step_dists
        .iter()
        .enumerate()
        .map(|(n, &d)| TraceRow {
            iter: n,
            point_id: id(n, &trace.points[n]),
            step_dist: d,
        })
        .collect()
}

/// Trace as CSV with the header `iter,point_id,step_dist`.
pub fn trace_csv<P>(trace: &OrbitTrace<P>, id: impl Fn(usize, &P) -> String) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in trace_rows(trace, id) {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
