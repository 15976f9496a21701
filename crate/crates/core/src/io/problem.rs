//! JSON problem schema.
//!
//! ```json
//! {
//!   "vertices": [0, 1, 2],
//!   "faces": [[0, 1, 2]],
//!   "alpha": {"0": 1.0, "1": 1.0, "2": 1.0, "hat": 1.0},
//!   "eta": {"0-1": 1.0, "0-2": 1.0, "1-2": 1.0},
//!   "mu": {"0": -1.0, "1": -1.0, "2": -1.0},
//!   "f_init": {"0": 0.0, "1": 0.0, "2": 0.0, "hat": 1.0}
//! }
//! ```
//!
//! `mu` lives on boundary vertices and becomes `η̂` on the augmented edges.
//! Missing `f_init` entries default to 0 on the disk and to the solver's
//! starting rule at the apex.

use serde_json::{Map, Value};

use crate::complex::{augment, validate_disk, AugmentedDisk, Complex, VertexId};
use crate::conformal::{ConformalStructure, Label};
use crate::error::ProblemError;
use crate::io::json::to_canonical_json;
use crate::solver::initial_label;

/// Key standing for the apex vertex in `alpha` and `f_init`.
pub const APEX_KEY: &str = "hat";

const TOP_KEYS: [&str; 6] = ["vertices", "faces", "alpha", "eta", "mu", "f_init"];

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub aug: AugmentedDisk,
    pub structure: ConformalStructure,
    pub f_init: Option<Label>,
}

impl Problem {
    /// `f_init` when given, otherwise the solver's default start.
    pub fn initial_label(&self) -> Label {
        self.f_init.clone().unwrap_or_else(|| initial_label(&self.aug, None))
    }
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>, ProblemError> {
    v.as_object().ok_or_else(|| ProblemError::schema(ptr, "expected an object"))
}

fn array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>, ProblemError> {
    v.as_array().ok_or_else(|| ProblemError::schema(ptr, "expected an array"))
}

fn vertex_id(v: &Value, ptr: &str) -> Result<VertexId, ProblemError> {
    v.as_u64()
        .and_then(|x| VertexId::try_from(x).ok())
        .ok_or_else(|| ProblemError::schema(ptr, "expected a vertex id (non-negative 32-bit integer)"))
}

fn number(v: &Value, ptr: &str) -> Result<f64, ProblemError> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(ProblemError::schema(ptr, "expected a finite number")),
    }
}

fn parse_key_id(key: &str, ptr: &str) -> Result<VertexId, ProblemError> {
    // reject signs, leading zeros and whitespace so keys stay canonical
    let canonical = !key.is_empty() && key.bytes().all(|b| b.is_ascii_digit()) && (key == "0" || !key.starts_with('0'));
    key.parse::<VertexId>()
        .ok()
        .filter(|_| canonical)
        .ok_or_else(|| ProblemError::schema(ptr, format!("`{key}` is not a vertex id")))
}

/// Vertex index for a key of `alpha` or `f_init`, with the apex allowed.
fn vertex_key(aug: &AugmentedDisk, key: &str, ptr: &str) -> Result<usize, ProblemError> {
    if key == APEX_KEY {
        return Ok(aug.apex());
    }
    let id = parse_key_id(key, ptr)?;
    aug.base().index_of(id).ok_or_else(|| ProblemError::schema(ptr, format!("unknown vertex {id}")))
}

pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ProblemError::Json(e.to_string()))?;
    problem_from_value(&value)
}

pub fn problem_from_value(value: &Value) -> Result<Problem, ProblemError> {
    let root = object(value, "")?;
    for key in root.keys() {
        if !TOP_KEYS.contains(&key.as_str()) {
            return Err(ProblemError::schema(format!("/{}", escape(key)), "unknown key"));
        }
    }
    let field = |name: &str| root.get(name).ok_or_else(|| ProblemError::schema(format!("/{name}"), "missing"));

    let ids = array(field("vertices")?, "/vertices")?
        .iter()
        .enumerate()
        .map(|(i, v)| vertex_id(v, &format!("/vertices/{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut faces = Vec::new();
    for (i, t) in array(field("faces")?, "/faces")?.iter().enumerate() {
        let ptr = format!("/faces/{i}");
        let t = array(t, &ptr)?;
        if t.len() != 3 {
            return Err(ProblemError::schema(ptr, "a face has exactly three vertices"));
        }
        let mut face = [0; 3];
        for k in 0..3 {
            face[k] = vertex_id(&t[k], &format!("{ptr}/{k}"))?;
        }
        faces.push(face);
    }
    let aug = augment(&validate_disk(&ids, &faces)?);
    let base = aug.base();

    let mut alpha = vec![None; aug.vertex_count()];
    for (key, v) in object(field("alpha")?, "/alpha")? {
        let ptr = format!("/alpha/{}", escape(key));
        let idx = vertex_key(&aug, key, &ptr)?;
        alpha[idx] = Some(number(v, &ptr)?);
    }
    let alpha = alpha
        .into_iter()
        .enumerate()
        .map(|(v, a)| a.ok_or_else(|| ProblemError::schema("/alpha", format!("missing entry for {}", key_of(&aug, v)))))
        .collect::<Result<Vec<_>, _>>()?;

    let mut eta = vec![None; aug.edges().len()];
    for (key, v) in object(field("eta")?, "/eta")? {
        let ptr = format!("/eta/{}", escape(key));
        let (a, b) = key
            .split_once('-')
            .ok_or_else(|| ProblemError::schema(&ptr, "expected a key of the form \"i-j\""))?;
        let (a, b) = (parse_key_id(a, &ptr)?, parse_key_id(b, &ptr)?);
        if a >= b {
            return Err(ProblemError::schema(ptr, "edge keys list the smaller id first"));
        }
        let edge = match (base.index_of(a), base.index_of(b)) {
            (Some(i), Some(j)) => base.edge_index(i, j),
            _ => None,
        }
        .ok_or_else(|| ProblemError::schema(&ptr, format!("{a}-{b} is not an edge of the disk")))?;
        eta[edge] = Some(number(v, &ptr)?);
    }

    let mu_obj = object(field("mu")?, "/mu")?;
    for (key, v) in mu_obj {
        let ptr = format!("/mu/{}", escape(key));
        let id = parse_key_id(key, &ptr)?;
        let idx = base.index_of(id).ok_or_else(|| ProblemError::schema(&ptr, format!("unknown vertex {id}")))?;
        if !base.is_boundary_vertex(idx) {
            return Err(ProblemError::schema(ptr, format!("vertex {id} is not on the boundary")));
        }
        let e = aug.apex_edge(idx).expect("boundary vertex has an apex edge");
        eta[e] = Some(number(v, &ptr)?);
    }
    let eta = eta
        .into_iter()
        .enumerate()
        .map(|(e, x)| {
            x.ok_or_else(|| {
                let [a, b] = aug.edges()[e];
                if b == aug.apex() {
                    ProblemError::schema("/mu", format!("missing entry for boundary vertex {}", aug.id(a)))
                } else {
                    let (x, y) = (aug.id(a).min(aug.id(b)), aug.id(a).max(aug.id(b)));
                    ProblemError::schema("/eta", format!("missing entry for edge {x}-{y}"))
                }
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let f_init = match root.get("f_init") {
        None => None,
        Some(obj) => {
            let mut disk = vec![0.0; base.vertex_count()];
            let mut apex = None;
            for (key, v) in object(obj, "/f_init")? {
                let ptr = format!("/f_init/{}", escape(key));
                let idx = vertex_key(&aug, key, &ptr)?;
                let x = number(v, &ptr)?;
                if idx == aug.apex() {
                    apex = Some(x);
                } else {
                    disk[idx] = x;
                }
            }
            let mut f = initial_label(&aug, Some(&disk));
            if let Some(x) = apex {
                f.0[aug.apex()] = x;
            }
            Some(f)
        }
    };

    Ok(Problem { aug, structure: ConformalStructure { alpha, eta }, f_init })
}

fn key_of(aug: &AugmentedDisk, v: usize) -> String {
    if v == aug.apex() {
        APEX_KEY.to_string()
    } else {
        aug.id(v).to_string()
    }
}

pub fn problem_to_value(p: &Problem) -> Value {
    let aug = &p.aug;
    let base = aug.base();
    let per_vertex = |vals: &[f64]| -> Value {
        Value::Object((0..aug.vertex_count()).map(|v| (key_of(aug, v), Value::from(vals[v]))).collect())
    };
    let mut root = Map::new();
    root.insert("vertices".into(), Value::from(base.ids().to_vec()));
    root.insert(
        "faces".into(),
        Value::Array(base.faces().iter().map(|t| Value::from(t.map(|v| aug.id(v)).to_vec())).collect()),
    );
    root.insert("alpha".into(), per_vertex(&p.structure.alpha));
    let mut eta = Map::new();
    let mut mu = Map::new();
    for (e, [a, b]) in aug.edges().iter().enumerate() {
        let x = Value::from(p.structure.eta[e]);
        if *b == aug.apex() {
            mu.insert(aug.id(*a).to_string(), x);
        } else {
            let (i, j) = (aug.id(*a).min(aug.id(*b)), aug.id(*a).max(aug.id(*b)));
            eta.insert(format!("{i}-{j}"), x);
        }
    }
    root.insert("eta".into(), Value::Object(eta));
    root.insert("mu".into(), Value::Object(mu));
    if let Some(f) = &p.f_init {
        root.insert("f_init".into(), per_vertex(&f.0));
    }
    Value::Object(root)
}

pub fn serialize_problem(p: &Problem) -> String {
    to_canonical_json(&problem_to_value(p))
}
