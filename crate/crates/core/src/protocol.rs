//! Newline-delimited JSON engine protocol used by the explorer front end.
//!
//! Each request line is `{"v":1,"op":...,"payload":{...}}` with an optional
//! `"id"` echoed back. Each response line is `{"v":1,"ok":true,"payload":...}`
//! or `{"v":1,"ok":false,"error":"..."}`. The engine keeps no state between
//! requests.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classify::{classify_spiral, grid_classify, spiral_window_check, transversal_check, WindowFrame};
use crate::dynamics::{t3_coords_forward, t3_coords_inverse, t_k_forward, t_k_inverse, MapLabeling};
use crate::error::{Error, Result};
use crate::io::{InvariantsJson, PolygonJson};
use crate::orbit::{orbit_projection, sample_in_square, Direction};
use crate::polygon::{alpha_seed, conditioned_seed, reconstruct, square_seed, CornerInvariants};

pub const PROTOCOL_VERSION: u64 = 1;

pub const OPS: [&str; 6] = ["reconstruct", "invariants", "step", "classify", "project", "sample"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub v: u64,
    pub op: String,
    #[serde(default)]
    pub payload: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub v: u64,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<Value>,
}

impl Response {
    fn ok(payload: Value, id: Option<Value>) -> Self {
        Response { v: PROTOCOL_VERSION, ok: true, payload: Some(payload), error: None, id }
    }

    fn err(msg: String, id: Option<Value>) -> Self {
        Response { v: PROTOCOL_VERSION, ok: false, payload: None, error: Some(msg), id }
    }
}

#[derive(Deserialize)]
struct SamplePayload {
    square: String,
    n: usize,
    seed: u64,
}

#[derive(Deserialize)]
struct ReconstructPayload {
    x: Vec<f64>,
    #[serde(default)]
    frame: Option<String>,
}

#[derive(Deserialize)]
struct StepPayload {
    #[serde(default)]
    x: Option<Vec<f64>>,
    #[serde(default)]
    polygon: Option<PolygonJson>,
    #[serde(default = "default_k")]
    k: usize,
    #[serde(default)]
    direction: Option<Direction>,
    #[serde(default)]
    labeling: Option<MapLabeling>,
}

#[derive(Deserialize)]
struct ClassifyPayload {
    #[serde(default)]
    x: Option<Vec<f64>>,
    #[serde(default)]
    polygon: Option<PolygonJson>,
    #[serde(default = "default_k")]
    k: usize,
    #[serde(default)]
    start: i64,
    #[serde(default)]
    horizon: Option<usize>,
}

#[derive(Deserialize)]
struct ProjectPayload {
    x: Vec<f64>,
    steps: usize,
}

fn default_k() -> usize {
    3
}

fn parse<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("bad payload: {e}")))
}

fn invariants_of(x: &[f64]) -> Result<CornerInvariants<f64>> {
    if x.len() % 2 != 0 {
        return Err(Error::InvalidInput("corner invariants need an even count".into()));
    }
    InvariantsJson { n: x.len() / 2, x: x.to_vec(), seed: None }.to_invariants()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("protocol payloads serialize")
}

fn dispatch(op: &str, payload: Value) -> Result<Value> {
    match op {
        "sample" => {
            let p: SamplePayload = parse(payload)?;
            let x = sample_in_square(p.square.parse()?, p.n, p.seed)?;
            Ok(to_value(&InvariantsJson::from_invariants(&x, Some(p.seed))?))
        }
        "reconstruct" => {
            let p: ReconstructPayload = parse(payload)?;
            let x = invariants_of(&p.x)?;
            let seed = match p.frame.as_deref() {
                None | Some("square") => square_seed(),
                Some("alpha") => alpha_seed(),
                Some("conditioned") => conditioned_seed(&x)?,
                Some(other) => return Err(Error::InvalidInput(format!("unknown frame {other:?}"))),
            };
            let poly = reconstruct(&x, Some(&seed))?;
            Ok(to_value(&PolygonJson::from_polygon(&poly)))
        }
        "invariants" => {
            let p: PolygonJson = parse(payload)?;
            let x = p.to_polygon()?.corner_invariants()?;
            let mut out = to_value(&InvariantsJson::from_invariants(&x, None)?);
            out["square"] = to_value(&grid_classify(&x));
            Ok(out)
        }
        "step" => {
            let p: StepPayload = parse(payload)?;
            let dir = p.direction.unwrap_or(Direction::Forward);
            match (p.polygon, p.x) {
                (Some(poly), _) => {
                    let poly = poly.to_polygon()?;
                    let img = match dir {
                        Direction::Forward => t_k_forward(&poly, p.k, p.labeling.unwrap_or(MapLabeling::ForwardShift))?,
                        Direction::Backward => t_k_inverse(&poly, p.k)?,
                    };
                    let x = img.corner_invariants()?;
                    Ok(json!({
                        "polygon": to_value(&PolygonJson::from_polygon(&img)),
                        "x": to_value(&InvariantsJson::from_invariants(&x, None)?.x),
                    }))
                }
                (None, Some(x)) => {
                    if p.k != 3 {
                        return Err(Error::InvalidInput("coordinate steps exist for k = 3 only".into()));
                    }
                    let x = invariants_of(&x)?;
                    let y = match dir {
                        Direction::Forward => t3_coords_forward(&x)?,
                        Direction::Backward => t3_coords_inverse(&x)?,
                    };
                    Ok(to_value(&InvariantsJson::from_invariants(&y, None)?))
                }
                (None, None) => Err(Error::InvalidInput("step needs \"x\" or \"polygon\"".into())),
            }
        }
        "classify" => {
            let p: ClassifyPayload = parse(payload)?;
            match (p.polygon, p.x) {
                (Some(poly), _) => {
                    let poly = poly.to_polygon()?;
                    let x = poly.corner_invariants()?;
                    let horizon = p.horizon.unwrap_or(3 * poly.n());
                    let spiral = spiral_window_check(&poly, p.k, p.start, horizon)?;
                    let tr = transversal_check(&poly, p.k, p.start, horizon, WindowFrame::AsGiven).ok();
                    Ok(json!({ "grid": grid_classify(&x), "spiral": spiral, "transversals": tr }))
                }
                (None, Some(x)) => {
                    let x = invariants_of(&x)?;
                    let horizon = p.horizon.unwrap_or(3 * x.n());
                    let spiral = classify_spiral(&x, p.k, p.start, horizon).ok();
                    Ok(json!({ "grid": grid_classify(&x), "spiral": spiral }))
                }
                (None, None) => Err(Error::InvalidInput("classify needs \"x\" or \"polygon\"".into())),
            }
        }
        "project" => {
            let p: ProjectPayload = parse(payload)?;
            let pts = orbit_projection(&invariants_of(&p.x)?, p.steps)?;
            Ok(json!({ "points": pts.iter().map(|q| [q.x, q.y]).collect::<Vec<_>>() }))
        }
        other => Err(Error::InvalidInput(format!("unknown op {other:?}"))),
    }
}

/// Answers one request.
pub fn handle(req: Request) -> Response {
    if req.v != PROTOCOL_VERSION {
        return Response::err(format!("unsupported protocol version {}", req.v), req.id);
    }
    match dispatch(&req.op, req.payload) {
        Ok(v) => Response::ok(v, req.id),
        Err(e) => Response::err(e.to_string(), req.id),
    }
}

/// Answers one request line with one response line (no trailing newline).
pub fn handle_line(line: &str) -> String {
    let resp = match serde_json::from_str::<Request>(line) {
        Ok(req) => handle(req),
        Err(e) => Response::err(format!("malformed request: {e}"), None),
    };
    serde_json::to_string(&resp).expect("responses serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(line: &str) -> Response {
        serde_json::from_str(&handle_line(line)).unwrap()
    }

    #[test]
    fn sample_then_reconstruct() {
        let r = call(r#"{"v":1,"op":"sample","payload":{"square":"KJ","n":4,"seed":42},"id":7}"#);
        assert!(r.ok);
        assert_eq!(r.id, Some(json!(7)));
        let x = r.payload.unwrap()["x"].clone();
        let r = call(&json!({"v":1,"op":"reconstruct","payload":{"x":x}}).to_string());
        assert!(r.ok);
        let poly = r.payload.unwrap();
        let r = call(&json!({"v":1,"op":"invariants","payload":poly}).to_string());
        assert_eq!(r.payload.unwrap()["square"], json!({"even":"K","odd":"J"}));
    }

    #[test]
    fn errors_are_reported_not_thrown() {
        assert!(!call("not json").ok);
        assert!(!call(r#"{"v":2,"op":"sample","payload":{}}"#).ok);
        assert!(!call(r#"{"v":1,"op":"nope","payload":{}}"#).ok);
        let r = call(r#"{"v":1,"op":"step","payload":{"x":[0.5,0.5,0.5,0.5]}}"#);
        assert!(!r.ok);
        assert!(r.error.unwrap().contains("singular"));
    }

    #[test]
    fn request_roundtrip() {
        let req = Request { v: 1, op: "project".into(), payload: json!({"x":[2.0,0.5,2.0,0.5],"steps":3}), id: None };
        let text = serde_json::to_string(&req).unwrap();
        assert_eq!(serde_json::from_str::<Request>(&text).unwrap(), req);
        let r = handle(req);
        assert_eq!(r.payload.unwrap()["points"].as_array().unwrap().len(), 3);
    }
}
