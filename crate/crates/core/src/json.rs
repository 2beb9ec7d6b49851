//! JSON encoding of instances, schemes and generator specs.
//!
//! Rationals are written as `"p/q"` strings (integers as `"p"`); plain JSON
//! integers are accepted on input. Actions are arrays of element indices.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{format_rational, int, parse_rational, Field, Rational};
use crate::model::{ActionSet, ConstraintSpec, Instance, OracleMatroid, Sense, SignalingScheme, UtilitySpec};
use crate::reductions::{LineqMaSpec, PublicPersuasionSpec};

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn rational_to_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(int)
            .ok_or_else(|| err(format!("{n} is not an integer; write fractions as \"p/q\""))),
        other => Err(err(format!("expected a rational, got {other}"))),
    }
}

fn rationals(v: &Value) -> Result<Vec<Rational>> {
    array(v)?.iter().map(rational_from_json).collect()
}

fn array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| err(format!("expected an array, got {v}")))
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| err(format!("missing field {key:?}")))
}

fn index(v: &Value) -> Result<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| err(format!("expected an index, got {v}")))
}

fn indices(v: &Value) -> Result<Vec<usize>> {
    array(v)?.iter().map(index).collect()
}

fn strings(v: &Value) -> Result<Vec<String>> {
    array(v)?
        .iter()
        .map(|s| s.as_str().map(str::to_owned).ok_or_else(|| err("expected a string")))
        .collect()
}

fn pairs(v: &Value) -> Result<Vec<(usize, usize)>> {
    array(v)?
        .iter()
        .map(|p| match indices(p)?.as_slice() {
            &[a, b] => Ok((a, b)),
            _ => Err(err("expected a pair of indices")),
        })
        .collect()
}

pub fn action_to_json(a: &ActionSet) -> Value {
    json!(a.elements())
}

pub fn action_from_json(v: &Value) -> Result<ActionSet> {
    Ok(ActionSet::new(indices(v)?))
}

/// Compact key used in scheme maps: `"[0,2]"`.
pub fn action_key(a: &ActionSet) -> String {
    action_to_json(a).to_string()
}

fn utility_to_json(u: &UtilitySpec) -> Value {
    match u {
        UtilitySpec::Linear(v) => json!({
            "kind": "linear",
            "values": v.iter().map(|row| row.iter().map(rational_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
        UtilitySpec::Tabular(t) => json!({
            "kind": "tabular",
            "values": t.iter().map(|m| m.iter().map(|(a, v)| json!({
                "action": action_to_json(a),
                "value": rational_to_json(v),
            })).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
    }
}

fn utility_from_json(v: &Value) -> Result<UtilitySpec> {
    let values = array(field(v, "values")?)?;
    match field(v, "kind")?.as_str() {
        Some("linear") => Ok(UtilitySpec::Linear(
            values.iter().map(rationals).collect::<Result<_>>()?,
        )),
        Some("tabular") => {
            let mut states = Vec::new();
            for row in values {
                let mut m = BTreeMap::new();
                for entry in array(row)? {
                    let a = action_from_json(field(entry, "action")?)?;
                    let val = rational_from_json(field(entry, "value")?)?;
                    if m.insert(a.clone(), val).is_some() {
                        return Err(err(format!("duplicate tabular entry {a:?}")));
                    }
                }
                states.push(m);
            }
            Ok(UtilitySpec::Tabular(states))
        }
        other => Err(err(format!("unknown utility kind {other:?}"))),
    }
}

fn constraint_to_json(c: &ConstraintSpec) -> Result<Value> {
    Ok(match c {
        ConstraintSpec::Uniform { k } => json!({"kind": "uniform", "k": k}),
        ConstraintSpec::Partition { blocks, caps } => json!({"kind": "partition", "blocks": blocks, "caps": caps}),
        ConstraintSpec::Graphic { vertices, edges } => json!({"kind": "graphic", "vertices": vertices, "edges": edges}),
        ConstraintSpec::Oracle(o) => {
            let inner = o
                .wraps
                .as_deref()
                .ok_or_else(|| err(format!("oracle {:?} has no serializable form", o.id)))?;
            json!({"kind": "oracle", "id": o.id, "inner": constraint_to_json(inner)?})
        }
        ConstraintSpec::Path {
            vertices,
            arcs,
            source,
            sink,
        } => json!({"kind": "path", "vertices": vertices, "arcs": arcs, "source": source, "sink": sink}),
    })
}

fn constraint_from_json(v: &Value) -> Result<ConstraintSpec> {
    match field(v, "kind")?.as_str() {
        Some("uniform") => Ok(ConstraintSpec::Uniform {
            k: index(field(v, "k")?)?,
        }),
        Some("partition") => Ok(ConstraintSpec::Partition {
            blocks: array(field(v, "blocks")?)?.iter().map(indices).collect::<Result<_>>()?,
            caps: indices(field(v, "caps")?)?,
        }),
        Some("graphic") => Ok(ConstraintSpec::Graphic {
            vertices: strings(field(v, "vertices")?)?,
            edges: pairs(field(v, "edges")?)?,
        }),
        Some("oracle") => {
            let id = field(v, "id")?
                .as_str()
                .ok_or_else(|| err("oracle id must be a string"))?;
            Ok(ConstraintSpec::Oracle(OracleMatroid::wrapping(
                id,
                constraint_from_json(field(v, "inner")?)?,
            )?))
        }
        Some("path") => Ok(ConstraintSpec::Path {
            vertices: strings(field(v, "vertices")?)?,
            arcs: pairs(field(v, "arcs")?)?,
            source: index(field(v, "source")?)?,
            sink: index(field(v, "sink")?)?,
        }),
        other => Err(err(format!("unknown constraint kind {other:?}"))),
    }
}

pub fn instance_to_json(inst: &Instance) -> Result<Value> {
    Ok(json!({
        "states": inst.states,
        "prior": inst.prior.iter().map(rational_to_json).collect::<Vec<_>>(),
        "elements": inst.elements,
        "sender": utility_to_json(&inst.sender),
        "receiver": utility_to_json(&inst.receiver),
        "constraint": constraint_to_json(&inst.constraint)?,
        "sense": match inst.sense { Sense::Maximize => "max", Sense::Minimize => "min" },
    }))
}

pub fn instance_from_json(v: &Value) -> Result<Instance> {
    let sense = match v.get("sense").and_then(Value::as_str) {
        None | Some("max") => Sense::Maximize,
        Some("min") => Sense::Minimize,
        Some(other) => return Err(err(format!("unknown sense {other:?}"))),
    };
    Instance::new(
        strings(field(v, "states")?)?,
        rationals(field(v, "prior")?)?,
        strings(field(v, "elements")?)?,
        utility_from_json(field(v, "sender")?)?,
        utility_from_json(field(v, "receiver")?)?,
        constraint_from_json(field(v, "constraint")?)?,
        sense,
    )
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    instance_from_json(&serde_json::from_str(text)?)
}

pub fn write_instance(inst: &Instance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&instance_to_json(inst)?)?)
}

/// SHA-256 of the canonical (key-sorted, compact) encoding, in hex.
pub fn instance_digest(inst: &Instance) -> Result<String> {
    let canonical = instance_to_json(inst)?.to_string();
    Ok(format!("{:x}", Sha256::digest(canonical.as_bytes())))
}

/// `{"state": {"[actions]": "p/q"}}`, zero entries omitted.
pub fn phi_to_json(scheme: &SignalingScheme, num_states: usize) -> Value {
    let mut by_state = Map::new();
    for t in 0..num_states {
        let mut m = Map::new();
        for (a, probs) in scheme.entries() {
            if !probs[t].is_zero() {
                m.insert(action_key(a), rational_to_json(&probs[t]));
            }
        }
        by_state.insert(t.to_string(), Value::Object(m));
    }
    Value::Object(by_state)
}

pub fn phi_from_json(v: &Value, num_states: usize) -> Result<SignalingScheme> {
    let obj = v.as_object().ok_or_else(|| err("phi must be an object"))?;
    let mut scheme = SignalingScheme::new();
    for (state, actions) in obj {
        let t: usize = state.parse().map_err(|_| err(format!("bad state key {state:?}")))?;
        if t >= num_states {
            return Err(err(format!("state {t} out of range")));
        }
        let actions = actions.as_object().ok_or_else(|| err("phi rows must be objects"))?;
        for (key, p) in actions {
            let a = action_from_json(&serde_json::from_str(key)?)?;
            scheme.add(t, a, rational_from_json(p)?, num_states);
        }
    }
    Ok(scheme.strip_zeros())
}

/// A scheme file: the scheme plus its value, method and instance digest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeFile {
    pub scheme: SignalingScheme,
    pub value: Rational,
    pub method: String,
    pub instance_digest: String,
}

pub fn scheme_to_json(file: &SchemeFile, num_states: usize) -> Value {
    json!({
        "value": rational_to_json(&file.value),
        "method": file.method,
        "instance_digest": file.instance_digest,
        "phi": phi_to_json(&file.scheme, num_states),
    })
}

pub fn scheme_from_json(v: &Value, num_states: usize) -> Result<SchemeFile> {
    Ok(SchemeFile {
        scheme: phi_from_json(field(v, "phi")?, num_states)?,
        value: rational_from_json(field(v, "value")?)?,
        method: field(v, "method")?.as_str().unwrap_or_default().to_owned(),
        instance_digest: field(v, "instance_digest")?
            .as_str()
            .ok_or_else(|| err("instance_digest must be a string"))?
            .to_owned(),
    })
}

pub fn lineq_to_json(spec: &LineqMaSpec) -> Value {
    let rows = |m: &[Vec<Rational>]| -> Vec<Vec<Value>> {
        m.iter().map(|r| r.iter().map(rational_to_json).collect()).collect()
    };
    let mut v = json!({
        "a": rows(&spec.a),
        "c": spec.c.iter().map(rational_to_json).collect::<Vec<_>>(),
        "zeta": rational_to_json(&spec.zeta),
        "delta": rational_to_json(&spec.delta),
    });
    if let Some(x) = &spec.known_solution {
        v["known_solution"] = json!(x.iter().map(|&b| b as u8).collect::<Vec<_>>());
    }
    v
}

pub fn lineq_from_json(v: &Value) -> Result<LineqMaSpec> {
    let a = array(field(v, "a")?)?.iter().map(rationals).collect::<Result<_>>()?;
    let zero = json!(0);
    let spec = LineqMaSpec::new(
        a,
        rationals(field(v, "c")?)?,
        rational_from_json(v.get("zeta").unwrap_or(&zero))?,
        rational_from_json(v.get("delta").unwrap_or(&zero))?,
    )?;
    match v.get("known_solution") {
        None | Some(Value::Null) => Ok(spec),
        Some(x) => spec.with_solution(
            indices(x)?
                .into_iter()
                .map(|b| match b {
                    0 => Ok(false),
                    1 => Ok(true),
                    _ => Err(err("known_solution entries must be 0 or 1")),
                })
                .collect::<Result<_>>()?,
        ),
    }
}

pub fn public_to_json(spec: &PublicPersuasionSpec) -> Value {
    json!({
        "prior": spec.prior.iter().map(rational_to_json).collect::<Vec<_>>(),
        "receiver": spec.receiver.iter().map(|row| row.iter().map(|p| vec![rational_to_json(&p[0]), rational_to_json(&p[1])]).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "sender": spec.sender.iter().map(|row| row.iter().map(rational_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn public_from_json(v: &Value) -> Result<PublicPersuasionSpec> {
    let receiver = array(field(v, "receiver")?)?
        .iter()
        .map(|row| {
            array(row)?
                .iter()
                .map(|p| match rationals(p)?.as_slice() {
                    [a, b] => Ok([a.clone(), b.clone()]),
                    _ => Err(err("receiver utilities come in pairs")),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let spec = PublicPersuasionSpec {
        prior: rationals(field(v, "prior")?)?,
        receiver,
        sender: array(field(v, "sender")?)?
            .iter()
            .map(rationals)
            .collect::<Result<_>>()?,
    };
    spec.validate()?;
    Ok(spec)
}
