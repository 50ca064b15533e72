//! JSON document formats shared by the command line and the file interfaces.
//!
//! Rationals travel as `[numerator, denominator]` integer pairs.  The poset
//! document has `elements` and `covers` fields, with an optional
//! `kind: "lattice"` marker; the script document is
//! `{"grid": [c, d], "steps": [{"cell_bottom": [[un,ud],[vn,vd]], "k": k}]}`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::diagram::{BuildScript, Diagram, Step};
use crate::forbidden::{PropertyRow, PropertyVerdict};
use crate::geom::{Pt, Rat};
use crate::order::{Morphism, Poset};
use crate::photon::{AbstractEntry, AbstractSystem, Quadruple, SetKind};
use crate::repr::{Outcome, Verdict, Witness};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("rational out of the 64-bit document range")]
    RationalRange,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Order(#[from] crate::order::OrderError),
}

fn rat_to_value(r: &Rat) -> Result<Value, DocError> {
    let n = r.numer().to_i64().ok_or(DocError::RationalRange)?;
    let d = r.denom().to_i64().ok_or(DocError::RationalRange)?;
    Ok(json!([n, d]))
}

fn rat_from_value(v: &Value) -> Result<Rat, DocError> {
    // accepts [num, den] or a bare integer
    if let Some(n) = v.as_i64() {
        return Ok(crate::geom::rat(n));
    }
    let arr = v.as_array().ok_or_else(|| DocError::Malformed("rational".to_string()))?;
    if arr.len() != 2 {
        return Err(DocError::Malformed("rational pair".to_string()));
    }
    let n = arr[0].as_i64().ok_or_else(|| DocError::Malformed("numerator".to_string()))?;
    let d = arr[1].as_i64().ok_or_else(|| DocError::Malformed("denominator".to_string()))?;
    if d == 0 {
        return Err(DocError::Malformed("zero denominator".to_string()));
    }
    Ok(Rat::new(BigInt::from(n), BigInt::from(d)))
}

fn pt_to_value(p: &Pt) -> Result<Value, DocError> {
    Ok(json!([rat_to_value(&p.u)?, rat_to_value(&p.v)?]))
}

fn pt_from_value(v: &Value) -> Result<Pt, DocError> {
    let arr = v.as_array().ok_or_else(|| DocError::Malformed("point".to_string()))?;
    if arr.len() != 2 {
        return Err(DocError::Malformed("point pair".to_string()));
    }
    Ok(Pt::new(rat_from_value(&arr[0])?, rat_from_value(&arr[1])?))
}

pub fn poset_to_json(p: &Poset, kind: Option<&str>) -> Value {
    let mut m = Map::new();
    m.insert("elements".to_string(), json!(p.labels()));
    m.insert(
        "covers".to_string(),
        json!(p.cover_pairs().iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>()),
    );
    if let Some(k) = kind {
        m.insert("kind".to_string(), json!(k));
    }
    Value::Object(m)
}

pub fn poset_from_json(v: &Value) -> Result<Poset, DocError> {
    let obj = v.as_object().ok_or_else(|| DocError::Malformed("poset object".to_string()))?;
    let elements: Vec<String> = obj
        .get("elements")
        .and_then(|e| e.as_array())
        .ok_or_else(|| DocError::Malformed("elements".to_string()))?
        .iter()
        .map(|x| {
            x.as_str()
                .map(str::to_string)
                .ok_or_else(|| DocError::Malformed("element label".to_string()))
        })
        .collect::<Result<_, _>>()?;
    let covers: Vec<(String, String)> = obj
        .get("covers")
        .and_then(|e| e.as_array())
        .ok_or_else(|| DocError::Malformed("covers".to_string()))?
        .iter()
        .map(|pair| {
            let arr = pair
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| DocError::Malformed("cover pair".to_string()))?;
            match (arr[0].as_str(), arr[1].as_str()) {
                (Some(a), Some(b)) => Ok((a.to_string(), b.to_string())),
                _ => Err(DocError::Malformed("cover labels".to_string())),
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(Poset::new(elements, covers)?)
}

pub fn script_to_json(s: &BuildScript) -> Result<Value, DocError> {
    let steps: Vec<Value> = s
        .steps
        .iter()
        .map(|st| {
            let p = st.point();
            Ok(json!({"cell_bottom": pt_to_value(&p)?, "k": st.k}))
        })
        .collect::<Result<_, DocError>>()?;
    Ok(json!({"grid": [s.grid.0, s.grid.1], "steps": steps}))
}

pub fn script_from_json(v: &Value) -> Result<BuildScript, DocError> {
    let obj = v.as_object().ok_or_else(|| DocError::Malformed("script object".to_string()))?;
    let grid = obj
        .get("grid")
        .and_then(|g| g.as_array())
        .filter(|g| g.len() == 2)
        .ok_or_else(|| DocError::Malformed("grid".to_string()))?;
    let c = grid[0].as_u64().ok_or_else(|| DocError::Malformed("grid side".to_string()))?;
    let d = grid[1].as_u64().ok_or_else(|| DocError::Malformed("grid side".to_string()))?;
    if c == 0 || d == 0 {
        return Err(DocError::Malformed("grid sides must be positive".to_string()));
    }
    let mut steps = Vec::new();
    for st in obj
        .get("steps")
        .and_then(|s| s.as_array())
        .ok_or_else(|| DocError::Malformed("steps".to_string()))?
    {
        let so = st.as_object().ok_or_else(|| DocError::Malformed("step".to_string()))?;
        let p = pt_from_value(
            so.get("cell_bottom")
                .ok_or_else(|| DocError::Malformed("cell_bottom".to_string()))?,
        )?;
        let k = so
            .get("k")
            .and_then(|k| k.as_u64())
            .filter(|&k| k >= 1)
            .ok_or_else(|| DocError::Malformed("k".to_string()))?;
        steps.push(Step::new(&p, k as u32));
    }
    Ok(BuildScript { grid: (c as u32, d as u32), steps })
}

/// Rebuilds a diagram from its document (poset plus coordinates).  The
/// result is not validated; callers decide whether to run the integrity
/// checks.
pub fn diagram_from_json(v: &Value) -> Result<Diagram, DocError> {
    let poset = poset_from_json(v)?;
    let obj = v.as_object().unwrap();
    let coords = obj
        .get("coords")
        .and_then(|c| c.as_object())
        .ok_or_else(|| DocError::Malformed("coords".to_string()))?;
    let mut pts = Vec::with_capacity(poset.len());
    for label in poset.labels() {
        let p = coords
            .get(label)
            .ok_or_else(|| DocError::Malformed(format!("missing coordinates for {label}")))?;
        pts.push(pt_from_value(p)?);
    }
    let covers: Vec<(usize, usize)> = poset.covers_idx().to_vec();
    let script = obj.get("script").map(script_from_json).transpose()?;
    Ok(Diagram::from_parts(pts, covers, script))
}

/// Poset document plus exact coordinates.
pub fn diagram_to_json(d: &Diagram) -> Result<Value, DocError> {
    let poset = d.to_poset();
    let mut v = poset_to_json(&poset, Some("lattice"));
    let mut coords = Map::new();
    for i in 0..d.n() {
        coords.insert(format!("e{i}"), pt_to_value(d.pt(i))?);
    }
    v.as_object_mut().unwrap().insert("coords".to_string(), Value::Object(coords));
    if let Ok(s) = d.script() {
        v.as_object_mut().unwrap().insert("script".to_string(), script_to_json(s)?);
    }
    Ok(v)
}

fn kind_str(k: SetKind) -> &'static str {
    match k {
        SetKind::LeftStripe => "left",
        SetKind::RightStripe => "right",
        SetKind::AShape => "internal",
    }
}

fn kind_from_str(s: &str) -> Result<SetKind, DocError> {
    match s {
        "left" => Ok(SetKind::LeftStripe),
        "right" => Ok(SetKind::RightStripe),
        "internal" => Ok(SetKind::AShape),
        other => Err(DocError::Malformed(format!("set kind `{other}`"))),
    }
}

pub fn system_to_json(s: &AbstractSystem) -> Result<Value, DocError> {
    let sets: Vec<Value> = s
        .entries
        .iter()
        .map(|e| {
            Ok(json!({
                "kind": kind_str(e.kind),
                "p": rat_to_value(&e.quad.p)?,
                "q": rat_to_value(&e.quad.q)?,
                "r": rat_to_value(&e.quad.r)?,
                "s": rat_to_value(&e.quad.s)?,
            }))
        })
        .collect::<Result<_, DocError>>()?;
    Ok(json!({
        "rect": [rat_to_value(&s.u_max)?, rat_to_value(&s.v_max)?],
        "sets": sets,
    }))
}

pub fn system_from_json(v: &Value) -> Result<AbstractSystem, DocError> {
    // accepts either a bare array of sets or an object with rect + sets
    let (rect, sets) = match v {
        Value::Array(a) => (None, a.clone()),
        Value::Object(o) => {
            let sets = o
                .get("sets")
                .and_then(|s| s.as_array())
                .ok_or_else(|| DocError::Malformed("sets".to_string()))?
                .clone();
            (o.get("rect").cloned(), sets)
        }
        _ => return Err(DocError::Malformed("system document".to_string())),
    };
    let mut entries = Vec::new();
    for s in &sets {
        let o = s.as_object().ok_or_else(|| DocError::Malformed("set".to_string()))?;
        let kind = kind_from_str(
            o.get("kind")
                .and_then(|k| k.as_str())
                .ok_or_else(|| DocError::Malformed("kind".to_string()))?,
        )?;
        let quad = Quadruple {
            p: rat_from_value(o.get("p").ok_or_else(|| DocError::Malformed("p".into()))?)?,
            q: rat_from_value(o.get("q").ok_or_else(|| DocError::Malformed("q".into()))?)?,
            r: rat_from_value(o.get("r").ok_or_else(|| DocError::Malformed("r".into()))?)?,
            s: rat_from_value(o.get("s").ok_or_else(|| DocError::Malformed("s".into()))?)?,
        };
        entries.push(AbstractEntry { kind, quad });
    }
    let (u_max, v_max) = match rect {
        Some(r) => {
            let arr = r
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| DocError::Malformed("rect".to_string()))?;
            (rat_from_value(&arr[0])?, rat_from_value(&arr[1])?)
        }
        None => {
            // infer: right-side length from the largest q, the rest above
            let u = entries
                .iter()
                .map(|e| e.quad.q.clone())
                .max()
                .unwrap_or_else(|| Rat::one());
            let top = entries
                .iter()
                .map(|e| e.quad.s.clone())
                .max()
                .unwrap_or_else(|| &u + Rat::one());
            let v = &top - &u;
            (u, v)
        }
    };
    Ok(AbstractSystem { u_max, v_max, entries })
}

fn morphism_to_json(m: &Morphism) -> Value {
    Value::Object(m.map.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
}

pub fn property_rows_to_json(rows: &[PropertyRow]) -> Value {
    let arr: Vec<Value> = rows
        .iter()
        .map(|r| {
            let (verdict, witness) = match &r.verdict {
                PropertyVerdict::Holds => ("holds", None),
                PropertyVerdict::HoldsTrivially => ("holds-trivially", None),
                PropertyVerdict::Inconclusive => ("inconclusive", None),
                PropertyVerdict::Fails(m) => ("fails", Some(morphism_to_json(m))),
            };
            let mut o = Map::new();
            o.insert("property".to_string(), json!(r.property));
            o.insert("n".to_string(), json!(r.n));
            o.insert("verdict".to_string(), json!(verdict));
            if let Some(w) = witness {
                o.insert("witness".to_string(), w);
            }
            Value::Object(o)
        })
        .collect();
    Value::Array(arr)
}

pub fn verdict_to_json(v: &Verdict) -> Result<Value, DocError> {
    let mut o = Map::new();
    match &v.outcome {
        Outcome::Representable(w) => {
            o.insert("outcome".to_string(), json!("representable"));
            match w {
                Witness::TrivialChain(n) => {
                    o.insert("witness".to_string(), json!({"chain": n}));
                    o.insert(
                        "note".to_string(),
                        json!("chain witness: slim planar semimodular but not rectangular"),
                    );
                }
                Witness::Script(s) => {
                    o.insert("witness".to_string(), script_to_json(s)?);
                }
            }
        }
        Outcome::NotRepresentable(r) => {
            o.insert("outcome".to_string(), json!("not_representable"));
            o.insert("reason".to_string(), json!(r));
        }
        Outcome::Inconclusive(r) => {
            o.insert("outcome".to_string(), json!("inconclusive"));
            o.insert("budget_state".to_string(), json!(r));
        }
    }
    o.insert(
        "filters".to_string(),
        json!(v
            .filter_log
            .iter()
            .map(|f| json!({"name": f.name, "passed": f.passed, "detail": f.detail}))
            .collect::<Vec<_>>()),
    );
    o.insert("nodes".to_string(), json!(v.nodes_used));
    Ok(Value::Object(o))
}

/// Lamp and tube report: per lamp its foot, peak, kind, tube edges, and
/// coordinate quadruple.
pub fn lamp_report_to_json(d: &Diagram) -> Result<Value, DocError> {
    let (tubes, lamp_list) = crate::lamps::lamps(d);
    let sets = crate::photon::litsets(d);
    let primary = crate::lamps::classify_tubes(d);
    let arr: Vec<Value> = lamp_list
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let kind = match l.kind {
                crate::lamps::LampKind::LeftBoundary => "left-boundary",
                crate::lamps::LampKind::RightBoundary => "right-boundary",
                crate::lamps::LampKind::Internal => "internal",
            };
            let tube_arr: Vec<Value> = l
                .tubes
                .iter()
                .map(|&ti| {
                    Ok(json!({
                        "foot": format!("e{}", tubes[ti].foot),
                        "peak": format!("e{}", tubes[ti].peak),
                        "primary": primary[ti],
                    }))
                })
                .collect::<Result<_, DocError>>()?;
            let q = &sets[i].quadruple;
            Ok(json!({
                "foot": format!("e{}", l.foot),
                "peak": format!("e{}", l.peak),
                "kind": kind,
                "tubes": tube_arr,
                "quadruple": [
                    rat_to_value(&q.p)?, rat_to_value(&q.q)?,
                    rat_to_value(&q.r)?, rat_to_value(&q.s)?
                ],
            }))
        })
        .collect::<Result<_, DocError>>()?;
    Ok(json!({"lamps": arr}))
}

/// Drawing coordinates for rendering; `y` grows downward in SVG.
pub fn draw_xy(p: &Pt) -> (f64, f64) {
    let to_f = |r: &Rat| {
        let n = r.numer().to_f64().unwrap_or(if r.numer().is_negative() {
            f64::MIN
        } else {
            f64::MAX
        });
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    };
    (to_f(&p.draw_x()), -to_f(&p.draw_y()))
}
