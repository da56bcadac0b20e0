//! JSON encoding of shapes. Rationals are `"num/den"` strings; bracketed
//! values are `{"lo": .., "hi": ..}`.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::numeric::{fmt_ratio, parse_ratio};

use super::family::{RationalPoint, ShapeMeta, ShapeRecord};
use super::shape::{Norm, Shape};

fn enc(v: &Interval) -> Value {
    if v.is_exact() {
        Value::String(fmt_ratio(&v.lo))
    } else {
        json!({ "lo": fmt_ratio(&v.lo), "hi": fmt_ratio(&v.hi) })
    }
}

fn enc_vec(v: &[Interval]) -> Value {
    Value::Array(v.iter().map(enc).collect())
}

fn enc_norm(n: &Norm) -> Value {
    Value::String(match n {
        Norm::Max => "inf".into(),
        Norm::P(r) => fmt_ratio(r),
    })
}

fn bad(what: &str) -> Error {
    Error::Parse(format!("shape json: bad or missing {what}"))
}

fn dec(v: &Value) -> Result<Interval> {
    match v {
        Value::String(s) => Ok(Interval::exact(parse_ratio(s)?)),
        Value::Object(m) => {
            let lo = parse_ratio(m.get("lo").and_then(Value::as_str).ok_or_else(|| bad("lo"))?)?;
            let hi = parse_ratio(m.get("hi").and_then(Value::as_str).ok_or_else(|| bad("hi"))?)?;
            if lo > hi {
                return Err(bad("interval order"));
            }
            Ok(Interval::new(lo, hi))
        }
        _ => Err(bad("number")),
    }
}

fn dec_vec(v: Option<&Value>, what: &str) -> Result<Vec<Interval>> {
    v.and_then(Value::as_array).ok_or_else(|| bad(what))?.iter().map(dec).collect()
}

fn dec_norm(v: Option<&Value>) -> Result<Norm> {
    match v.and_then(Value::as_str).ok_or_else(|| bad("norm"))? {
        "inf" => Ok(Norm::Max),
        s => Norm::p(parse_ratio(s)?),
    }
}

pub fn shape_to_json(shape: &Shape) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), shape.kind().into());
    m.insert("center".into(), enc_vec(shape.center()));
    match shape {
        Shape::Ball { radius, norm, .. } => {
            m.insert("radius".into(), enc(radius));
            m.insert("norm".into(), enc_norm(norm));
        }
        Shape::Rect { radii, .. } => {
            m.insert("radii".into(), enc_vec(radii));
            m.insert("norm".into(), "inf".into());
        }
        Shape::Annulus { r_out, r_in, .. } => {
            m.insert("radius".into(), json!({ "outer": enc(r_out), "inner": enc(r_in) }));
            m.insert("norm".into(), "inf".into());
        }
        Shape::RectAnnulus { outer, inner, .. } => {
            m.insert("radii".into(), json!({ "outer": enc_vec(outer), "inner": enc_vec(inner) }));
            m.insert("norm".into(), "inf".into());
        }
        Shape::QuasiAnnulus { r, inner_norm, .. } => {
            m.insert("radius".into(), enc(r));
            m.insert("norm".into(), "inf".into());
            m.insert("inner_norm".into(), enc_norm(inner_norm));
        }
    }
    Value::Object(m)
}

pub fn record_to_json(rec: &ShapeRecord) -> Value {
    let mut v = shape_to_json(&rec.shape);
    let meta = json!({
        "p": rec.meta.point.as_ref().map(|p| p.p.clone()),
        "q": rec.meta.point.as_ref().map(|p| p.q),
        "degenerate": rec.meta.degenerate,
        "clipped": rec.meta.clipped,
        "bits": rec.meta.bits,
    });
    v.as_object_mut().expect("shape json is an object").insert("meta".into(), meta);
    v
}

pub fn shape_from_json(v: &Value) -> Result<Shape> {
    let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("kind"))?;
    let center = dec_vec(v.get("center"), "center")?;
    let radius = v.get("radius");
    let radii = v.get("radii");
    match kind {
        "ball" => Shape::ball(center, dec(radius.ok_or_else(|| bad("radius"))?)?, dec_norm(v.get("norm"))?),
        "rect" => Shape::rect(center, dec_vec(radii, "radii")?),
        "annulus" => {
            let r = radius.ok_or_else(|| bad("radius"))?;
            Shape::annulus(
                center,
                dec(r.get("outer").ok_or_else(|| bad("outer"))?)?,
                dec(r.get("inner").ok_or_else(|| bad("inner"))?)?,
            )
        }
        "rect_annulus" => {
            let r = radii.ok_or_else(|| bad("radii"))?;
            Shape::rect_annulus(center, dec_vec(r.get("outer"), "outer")?, dec_vec(r.get("inner"), "inner")?)
        }
        "quasi_annulus" => Shape::quasi_annulus(
            center,
            dec(radius.ok_or_else(|| bad("radius"))?)?,
            dec_norm(v.get("inner_norm"))?,
        ),
        other => Err(Error::Parse(format!("unknown shape kind {other:?}"))),
    }
}

pub fn record_from_json(v: &Value) -> Result<ShapeRecord> {
    let shape = shape_from_json(v)?;
    let meta = v.get("meta").ok_or_else(|| bad("meta"))?;
    let point = match (meta.get("p"), meta.get("q").and_then(Value::as_u64)) {
        (Some(Value::Array(p)), Some(q)) => {
            let p = p.iter().map(|x| x.as_u64().ok_or_else(|| bad("p"))).collect::<Result<Vec<_>>>()?;
            Some(RationalPoint::new(p, q)?)
        }
        _ => None,
    };
    let flag = |k: &str| meta.get(k).and_then(Value::as_bool).ok_or_else(|| bad(k));
    Ok(ShapeRecord {
        shape,
        meta: ShapeMeta {
            point,
            degenerate: flag("degenerate")?,
            clipped: flag("clipped")?,
            bits: meta.get("bits").and_then(Value::as_u64).map(|b| b as u32),
        },
    })
}
