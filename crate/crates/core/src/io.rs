//! JSON formats for spaces, elements, algebras, certificates and HTT data.
//!
//! Rationals are strings `"p/q"` (or `"p"`), elements are objects from basis id to rational.
//! Serialization is canonical: basis order, entries sorted by arity then argument indices,
//! and always in the shifted convention.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::ainfty::{AInftyAlgebra, AInftyBuilder};
use crate::defcomplex::HttData;
use crate::graded::{format_scalar, parse_scalar, BasisVector, Element, FiltrationWeight, GradedSpace, LinearMap, SpaceError};
use crate::linfty::{AlgebraBuilder, CurvedAlgebra};
use crate::solver::{Certificate, Step};

/// Degree convention of an input file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    #[default]
    Shifted,
    /// Degrees of the suspension-free data: brackets `l_n` of degree `2 - n`, antisymmetric.
    Unshifted,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    pub convention: Convention,
    pub max_dim: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    /// JSON path of the offending field, or `line L column C` for syntax errors.
    pub at: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.at, self.message)
    }
}

impl std::error::Error for SchemaError {}

fn err(at: impl Into<String>, message: impl fmt::Display) -> SchemaError {
    SchemaError { at: at.into(), message: message.to_string() }
}

fn syntax(e: serde_json::Error) -> SchemaError {
    if e.line() == 0 {
        err("document", e)
    } else {
        err(format!("line {} column {}", e.line(), e.column()), e)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisJson {
    id: String,
    degree: i64,
    #[serde(default = "one")]
    weight: i64,
}

fn one() -> i64 {
    1
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceJson {
    basis: Vec<BasisJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    arity: usize,
    args: Vec<String>,
    value: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraJson {
    space: SpaceJson,
    #[serde(default)]
    brackets: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct AInftyJson {
    space: SpaceJson,
    #[serde(default)]
    ops: Vec<EntryJson>,
    weight_cap: usize,
}

fn space_from_json(s: &SpaceJson, opts: &ParseOptions, at: &str) -> Result<GradedSpace, SchemaError> {
    if let Some(max) = opts.max_dim {
        if s.basis.len() > max {
            return Err(err(format!("{at}.basis"), format!("{} basis vectors exceed the limit {max}", s.basis.len())));
        }
    }
    let shift = if opts.convention == Convention::Unshifted { 1 } else { 0 };
    let mut basis = Vec::with_capacity(s.basis.len());
    for (i, b) in s.basis.iter().enumerate() {
        if b.weight < 1 || b.weight > u32::MAX as i64 {
            return Err(err(format!("{at}.basis[{i}].weight"), format!("weight {} must be at least 1", b.weight)));
        }
        basis.push(BasisVector::new(b.id.clone(), b.degree - shift, b.weight as u32));
    }
    GradedSpace::new(basis).map_err(|e| match &e {
        SpaceError::DuplicateId(id) => {
            let i = s.basis.iter().rposition(|b| &b.id == id).unwrap_or(0);
            err(format!("{at}.basis[{i}].id"), e)
        }
        _ => err(format!("{at}.basis"), e),
    })
}

fn space_to_json(space: &GradedSpace) -> Value {
    let basis: Vec<Value> = space
        .basis()
        .iter()
        .map(|b| json!({"id": b.id, "degree": b.degree, "weight": b.weight}))
        .collect();
    json!({ "basis": basis })
}

pub fn element_from_json(space: &GradedSpace, v: &Map<String, Value>, at: &str) -> Result<Element, SchemaError> {
    let mut x = Element::zero();
    for (id, c) in v {
        let i = space.index_of(id).map_err(|e| err(format!("{at}.{id}"), e))?;
        let s = c.as_str().ok_or_else(|| err(format!("{at}.{id}"), "coefficient must be a string \"p/q\""))?;
        let q = parse_scalar(s).ok_or_else(|| err(format!("{at}.{id}"), format!("not a rational: {s:?}")))?;
        if x.coeff(i).is_some() {
            return Err(err(format!("{at}.{id}"), "repeated basis id"));
        }
        x.add_term(i, q);
    }
    Ok(x)
}

pub fn element_to_json(space: &GradedSpace, x: &Element) -> Value {
    let mut m = Map::new();
    for (i, c) in x.iter() {
        m.insert(space.id(i).to_string(), Value::String(format_scalar(c)));
    }
    Value::Object(m)
}

/// `(-1)^{sum_i (n - i) |x_i|}` with unshifted degrees, `i = 1..n`.
fn decalage_sign(unshifted: &[i64]) -> i64 {
    let n = unshifted.len() as i64;
    let e: i64 = unshifted.iter().enumerate().map(|(i, d)| (n - 1 - i as i64) * d).sum();
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn resolve_entry(
    space: &GradedSpace,
    e: &EntryJson,
    opts: &ParseOptions,
    at: &str,
) -> Result<(Vec<usize>, Element), SchemaError> {
    if e.arity != e.args.len() {
        return Err(err(format!("{at}.arity"), format!("arity {} but {} arguments", e.arity, e.args.len())));
    }
    let mut args = Vec::with_capacity(e.args.len());
    for (j, id) in e.args.iter().enumerate() {
        args.push(space.index_of(id).map_err(|x| err(format!("{at}.args[{j}]"), x))?);
    }
    let mut value = element_from_json(space, &e.value, &format!("{at}.value"))?;
    if opts.convention == Convention::Unshifted {
        let degs: Vec<i64> = args.iter().map(|&a| space.degree(a) + 1).collect();
        if decalage_sign(&degs) < 0 {
            value = value.negated();
        }
    }
    Ok((args, value))
}

pub fn parse_algebra(text: &str, opts: &ParseOptions) -> Result<CurvedAlgebra, SchemaError> {
    let j: AlgebraJson = serde_json::from_str(text).map_err(syntax)?;
    let space = space_from_json(&j.space, opts, "space")?;
    let mut b = AlgebraBuilder::new(space.clone());
    let mut seen = BTreeSet::new();
    for (i, e) in j.brackets.iter().enumerate() {
        let at = format!("brackets[{i}]");
        let (args, value) = resolve_entry(&space, e, opts, &at)?;
        let mut key = args.clone();
        key.sort_unstable();
        if !seen.insert(key) {
            return Err(err(&at, "bracket on this multiset of arguments already given"));
        }
        b.bracket(&args, value).map_err(|x| err(&at, x))?;
    }
    Ok(b.build())
}

pub fn algebra_to_json(alg: &CurvedAlgebra) -> Value {
    let space = alg.space();
    let brackets: Vec<Value> = alg
        .entries()
        .into_iter()
        .map(|(args, v)| {
            let ids: Vec<&str> = args.iter().map(|&a| space.id(a)).collect();
            json!({"arity": args.len(), "args": ids, "value": element_to_json(space, v)})
        })
        .collect();
    json!({"space": space_to_json(space), "brackets": brackets})
}

fn ainfty_from_value(j: AInftyJson, opts: &ParseOptions, at: &str) -> Result<AInftyAlgebra, SchemaError> {
    let alg = ainfty_unchecked(j, opts, at)?;
    alg.check_stasheff().map_err(|x| err(format!("{at}ops"), x))?;
    Ok(alg)
}

fn ainfty_unchecked(j: AInftyJson, opts: &ParseOptions, at: &str) -> Result<AInftyAlgebra, SchemaError> {
    let space = space_from_json(&j.space, opts, &format!("{at}space"))?;
    if j.weight_cap < 1 {
        return Err(err(format!("{at}weightCap"), "weight cap must be at least 1"));
    }
    let mut b = AInftyBuilder::new(space.clone(), j.weight_cap);
    let mut seen = BTreeSet::new();
    for (i, e) in j.ops.iter().enumerate() {
        let at = format!("{at}ops[{i}]");
        let (args, value) = resolve_entry(&space, e, opts, &at)?;
        if !seen.insert(args.clone()) {
            return Err(err(&at, "operation on this word already given"));
        }
        b.op(&args, value).map_err(|x| err(&at, x))?;
    }
    Ok(b.build_unchecked())
}

pub fn parse_ainfty(text: &str, opts: &ParseOptions) -> Result<AInftyAlgebra, SchemaError> {
    let j: AInftyJson = serde_json::from_str(text).map_err(syntax)?;
    ainfty_from_value(j, opts, "")
}

/// Parses without checking the Stasheff relations.
pub fn parse_ainfty_unchecked(text: &str, opts: &ParseOptions) -> Result<AInftyAlgebra, SchemaError> {
    let j: AInftyJson = serde_json::from_str(text).map_err(syntax)?;
    ainfty_unchecked(j, opts, "")
}

pub fn ainfty_to_json(alg: &AInftyAlgebra) -> Value {
    let space = alg.space();
    let ops: Vec<Value> = alg
        .sorted_ops()
        .into_iter()
        .map(|(w, v)| {
            let ids: Vec<&str> = w.iter().map(|&a| space.id(a)).collect();
            json!({"arity": w.len(), "args": ids, "value": element_to_json(space, v)})
        })
        .collect();
    json!({"space": space_to_json(space), "ops": ops, "weightCap": alg.weight_cap()})
}

pub fn weight_to_json(w: FiltrationWeight) -> Value {
    match w {
        FiltrationWeight::Finite(p) => json!(p),
        FiltrationWeight::Infinite => json!("inf"),
    }
}

fn weight_from_json(v: &Value, at: &str) -> Result<FiltrationWeight, SchemaError> {
    match v {
        Value::String(s) if s == "inf" => Ok(FiltrationWeight::Infinite),
        Value::Number(n) => n
            .as_u64()
            .and_then(|p| u32::try_from(p).ok())
            .map(FiltrationWeight::Finite)
            .ok_or_else(|| err(at, "expected a nonnegative integer or \"inf\"")),
        _ => Err(err(at, "expected a nonnegative integer or \"inf\"")),
    }
}

pub fn certificate_to_json(space: &GradedSpace, cert: &Certificate) -> Value {
    let steps: Vec<Value> = cert
        .steps
        .iter()
        .map(|s| {
            json!({
                "k": s.k,
                "twist": element_to_json(space, &s.twist),
                "before": s.before,
                "after": weight_to_json(s.after),
            })
        })
        .collect();
    json!({"alpha": element_to_json(space, &cert.alpha), "r": cert.r, "steps": steps})
}

pub fn parse_certificate(space: &GradedSpace, text: &str) -> Result<Certificate, SchemaError> {
    let v: Value = serde_json::from_str(text).map_err(syntax)?;
    let obj = v.as_object().ok_or_else(|| err("document", "expected an object"))?;
    let map = |key: &str| -> Result<&Map<String, Value>, SchemaError> {
        obj.get(key).and_then(Value::as_object).ok_or_else(|| err(key, "expected an object"))
    };
    let alpha = element_from_json(space, map("alpha")?, "alpha")?;
    let r = obj
        .get("r")
        .and_then(Value::as_u64)
        .and_then(|r| u32::try_from(r).ok())
        .ok_or_else(|| err("r", "expected a nonnegative integer"))?;
    let steps_v = obj.get("steps").and_then(Value::as_array).ok_or_else(|| err("steps", "expected an array"))?;
    let mut steps = Vec::with_capacity(steps_v.len());
    for (i, s) in steps_v.iter().enumerate() {
        let at = format!("steps[{i}]");
        let so = s.as_object().ok_or_else(|| err(&at, "expected an object"))?;
        let int_field = |key: &str| -> Result<u32, SchemaError> {
            so.get(key)
                .and_then(Value::as_u64)
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| err(format!("{at}.{key}"), "expected a nonnegative integer"))
        };
        let twist_map =
            so.get("twist").and_then(Value::as_object).ok_or_else(|| err(format!("{at}.twist"), "expected an object"))?;
        steps.push(Step {
            k: int_field("k")?,
            twist: element_from_json(space, twist_map, &format!("{at}.twist"))?,
            before: int_field("before")?,
            after: weight_from_json(so.get("after").unwrap_or(&Value::Null), &format!("{at}.after"))?,
        });
    }
    Ok(Certificate { alpha, r, steps })
}

/// `{"transferred": A-infinity, "original"?: A-infinity, "inclusion"?: {h id: element of original},
/// "projection"?: {original id: element of H}}`. The maps are checked to be quasi-isomorphisms.
pub fn parse_htt(h: &AInftyAlgebra, text: &str, opts: &ParseOptions) -> Result<(HttData, Option<AInftyAlgebra>), SchemaError> {
    let v: Value = serde_json::from_str(text).map_err(syntax)?;
    let obj = v.as_object().ok_or_else(|| err("document", "expected an object"))?;
    for k in obj.keys() {
        if !["transferred", "original", "inclusion", "projection"].contains(&k.as_str()) {
            return Err(err(k.as_str(), "unknown field"));
        }
    }
    let sub = |key: &str| -> Result<Option<AInftyAlgebra>, SchemaError> {
        match obj.get(key) {
            None => Ok(None),
            Some(x) => {
                let j: AInftyJson = serde_json::from_value(x.clone()).map_err(|e| err(key, e))?;
                ainfty_from_value(j, opts, &format!("{key}.")).map(Some)
            }
        }
    };
    let transferred = sub("transferred")?.ok_or_else(|| err("transferred", "missing field"))?;
    let original = sub("original")?;
    let linear = |key: &str, from: &GradedSpace, to: &GradedSpace| -> Result<Option<LinearMap>, SchemaError> {
        let Some(m) = obj.get(key) else { return Ok(None) };
        let m = m.as_object().ok_or_else(|| err(key, "expected an object"))?;
        let mut columns = vec![Element::zero(); from.dim()];
        for (id, col) in m {
            let i = from.index_of(id).map_err(|e| err(format!("{key}.{id}"), e))?;
            let c = col.as_object().ok_or_else(|| err(format!("{key}.{id}"), "expected an object"))?;
            columns[i] = element_from_json(to, c, &format!("{key}.{id}"))?;
        }
        let f = LinearMap { columns, degree: 0 };
        if let Err((i, d)) = f.check_degree(from, to) {
            return Err(err(format!("{key}.{}", from.id(i)), format!("image must have degree {d}")));
        }
        Ok(Some(f))
    };
    let (inclusion, projection) = match &original {
        Some(b) => (linear("inclusion", h.space(), b.space())?, linear("projection", b.space(), h.space())?),
        None => {
            if obj.contains_key("inclusion") || obj.contains_key("projection") {
                return Err(err("original", "inclusion and projection need the original algebra"));
            }
            (None, None)
        }
    };
    Ok((HttData { transferred, inclusion, projection }, original))
}
