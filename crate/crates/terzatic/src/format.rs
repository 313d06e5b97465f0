//! The JSON instance document: mode, function model, optional certificate,
//! domain upper bound, and the (q, blocks, r_blocks) instance. Float mode
//! carries plain JSON numbers; rational mode carries "num/den" or finite
//! decimal strings so values survive JSON number limits. Reports are
//! rendered with the same scalar conventions.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::estimate::CertificateEstimate;
use crate::function::{Family, FunctionModel, Polynomial};
use crate::fuzz::{FuzzReport, Violation};
use crate::instance::{GeneralInstance, PointVector, SimpleInstance, Weights};
use crate::report::{CheckReport, Target};
use crate::scalar::{Rat, Scalar};

/// Computation mode of a document or run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Float,
    Rational,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Float => "float",
            Mode::Rational => "rational",
        }
    }

    pub fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Mode::Float),
            "rational" => Ok(Mode::Rational),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

/// Scalar JSON conventions per mode.
pub trait JsonScalar: Scalar {
    const MODE: Mode;
    fn from_json(value: &Value, path: &str) -> Result<Self>;
    fn to_json(&self) -> Value;
}

impl JsonScalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_json(value: &Value, path: &str) -> Result<Self> {
        let v = value
            .as_f64()
            .ok_or_else(|| Error::parse(path, "expected a JSON number (float mode)"))?;
        if !v.is_finite() {
            return Err(Error::parse(path, "expected a finite number"));
        }
        Ok(v)
    }

    fn to_json(&self) -> Value {
        json!(self)
    }
}

impl JsonScalar for Rat {
    const MODE: Mode = Mode::Rational;

    fn from_json(value: &Value, path: &str) -> Result<Self> {
        let s = value.as_str().ok_or_else(|| {
            Error::parse(path, "expected a \"num/den\" or decimal string (rational mode)")
        })?;
        Self::parse_literal(s).map_err(|e| Error::parse(path, e.to_string()))
    }

    fn to_json(&self) -> Value {
        Value::String(self.render())
    }
}

/// One fully parsed document in a fixed mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedDocument<S: Scalar> {
    /// The function model, with the document certificate (when present)
    /// attached.
    pub function: FunctionModel<S>,
    pub instance: GeneralInstance<S>,
}

/// A parsed document, dispatching on its mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Float(TypedDocument<f64>),
    Rational(TypedDocument<Rat>),
}

impl Document {
    pub fn mode(&self) -> Mode {
        match self {
            Document::Float(_) => Mode::Float,
            Document::Rational(_) => Mode::Rational,
        }
    }
}

fn get_field<'v>(obj: &'v Value, field: &str, path: &str) -> Result<&'v Value> {
    obj.get(field)
        .ok_or_else(|| Error::parse(join(path, field), "missing field"))
}

fn join(path: &str, field: &str) -> String {
    if path.is_empty() {
        field.to_string()
    } else {
        format!("{path}.{field}")
    }
}

fn as_array<'v>(value: &'v Value, path: &str) -> Result<&'v Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| Error::parse(path, "expected an array"))
}

fn scalar_list<S: JsonScalar>(value: &Value, path: &str) -> Result<Vec<S>> {
    as_array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, v)| S::from_json(v, &format!("{path}[{i}]")))
        .collect()
}

/// Weights in a document must already sum to 1 (exactly in rational mode,
/// within 1e-9 in float mode); construction then renormalizes.
fn parse_weights<S: JsonScalar>(value: &Value, path: &str) -> Result<Weights<S>> {
    let raw = scalar_list::<S>(value, path)?;
    for (i, w) in raw.iter().enumerate() {
        if *w <= S::zero() {
            return Err(Error::parse(
                format!("{path}[{i}]"),
                format!("weight must be strictly positive, got {}", w.render()),
            ));
        }
    }
    let sum = S::sum_terms(raw.iter().cloned());
    let off = (sum.clone() - S::one()).abs();
    let tolerance = if S::EXACT { S::zero() } else { S::from_f64(1e-9) };
    if off > tolerance {
        return Err(Error::WeightSum {
            path: path.to_string(),
            sum: sum.render(),
        });
    }
    Weights::new(raw).map_err(|e| Error::parse(path, e.to_string()))
}

fn parse_polynomial<S: JsonScalar>(value: &Value, path: &str) -> Result<Polynomial<S>> {
    let coeffs = scalar_list::<S>(get_field(value, "coeffs", path)?, &join(path, "coeffs"))?;
    Polynomial::new(coeffs).map_err(|e| Error::parse(path, e.to_string()))
}

fn parse_function<S: JsonScalar>(value: &Value, path: &str) -> Result<FunctionModel<S>> {
    let family = get_field(value, "family", path)?
        .as_str()
        .ok_or_else(|| Error::parse(join(path, "family"), "expected a string"))?;
    match family {
        "power" => {
            let exponent = S::from_json(
                get_field(value, "exponent", path)?,
                &join(path, "exponent"),
            )?;
            FunctionModel::power(exponent).map_err(|e| Error::parse(path, e.to_string()))
        }
        "cube_log" => Ok(FunctionModel::cube_log()),
        "polynomial" => {
            let coeffs =
                scalar_list::<S>(get_field(value, "coeffs", path)?, &join(path, "coeffs"))?;
            FunctionModel::polynomial(coeffs).map_err(|e| Error::parse(path, e.to_string()))
        }
        "linear_combination" => {
            let members_path = join(path, "members");
            let members = as_array(get_field(value, "members", path)?, &members_path)?;
            let mut parsed = Vec::with_capacity(members.len());
            for (i, member) in members.iter().enumerate() {
                let member_path = format!("{members_path}[{i}]");
                let scale = S::from_json(
                    get_field(member, "scale", &member_path)?,
                    &join(&member_path, "scale"),
                )?;
                let f = parse_function::<S>(
                    get_field(member, "function", &member_path)?,
                    &join(&member_path, "function"),
                )?;
                parsed.push((scale, f));
            }
            FunctionModel::linear_combination(parsed)
                .map_err(|e| Error::parse(path, e.to_string()))
        }
        other => Err(Error::parse(
            join(path, "family"),
            format!("unknown family {other:?}"),
        )),
    }
}

fn parse_typed<S: JsonScalar>(root: &Value) -> Result<TypedDocument<S>> {
    let domain_upper = S::from_json(get_field(root, "domain_upper", "")?, "domain_upper")?;
    let mut function = parse_function::<S>(get_field(root, "function", "")?, "function")?;
    if let Some(cert) = root.get("certificate") {
        function = function.with_certificate(parse_polynomial::<S>(cert, "certificate")?);
    }

    let instance = get_field(root, "instance", "")?;
    let q = parse_weights::<S>(get_field(instance, "q", "instance")?, "instance.q")?;
    let blocks_path = "instance.blocks";
    let blocks_json = as_array(get_field(instance, "blocks", "instance")?, blocks_path)?;
    let mut blocks = Vec::with_capacity(blocks_json.len());
    for (i, block) in blocks_json.iter().enumerate() {
        let block_path = format!("{blocks_path}[{i}]");
        let p = parse_weights::<S>(
            get_field(block, "p", &block_path)?,
            &join(&block_path, "p"),
        )?;
        let x_path = join(&block_path, "x");
        let x = scalar_list::<S>(get_field(block, "x", &block_path)?, &x_path)?;
        let points = PointVector::new(x, domain_upper.clone())
            .map_err(|e| Error::parse(&x_path, e.to_string()))?;
        blocks.push(
            SimpleInstance::new(p, points).map_err(|e| Error::parse(&block_path, e.to_string()))?,
        );
    }
    let r_blocks = match instance.get("r_blocks") {
        None | Some(Value::Null) => None,
        Some(r) => {
            let r_path = "instance.r_blocks";
            let arrays = as_array(r, r_path)?;
            let mut out = Vec::with_capacity(arrays.len());
            for (i, w) in arrays.iter().enumerate() {
                out.push(parse_weights::<S>(w, &format!("{r_path}[{i}]"))?);
            }
            Some(out)
        }
    };
    let instance = GeneralInstance::new(q, blocks, r_blocks)
        .map_err(|e| Error::parse("instance", e.to_string()))?;
    Ok(TypedDocument { function, instance })
}

/// Parse a document, dispatching on its "mode" field.
pub fn parse_document(text: &str) -> Result<Document> {
    let root: Value = serde_json::from_str(text)?;
    let mode = Mode::from_str(
        get_field(&root, "mode", "")?
            .as_str()
            .ok_or_else(|| Error::parse("mode", "expected a string"))?,
    )
    .map_err(|e| Error::parse("mode", e.to_string()))?;
    match mode {
        Mode::Float => Ok(Document::Float(parse_typed::<f64>(&root)?)),
        Mode::Rational => Ok(Document::Rational(parse_typed::<Rat>(&root)?)),
    }
}

pub fn function_to_value<S: JsonScalar>(f: &FunctionModel<S>) -> Value {
    match f.family() {
        Family::Power { exponent } => json!({
            "family": "power",
            "exponent": exponent.to_json(),
        }),
        Family::CubeLog => json!({ "family": "cube_log" }),
        Family::Polynomial(p) => json!({
            "family": "polynomial",
            "coeffs": p.coeffs().iter().map(JsonScalar::to_json).collect::<Vec<_>>(),
        }),
        Family::LinearCombination(members) => json!({
            "family": "linear_combination",
            "members": members
                .iter()
                .map(|(scale, f)| json!({
                    "scale": scale.to_json(),
                    "function": function_to_value(f),
                }))
                .collect::<Vec<_>>(),
        }),
    }
}

fn weights_to_value<S: JsonScalar>(w: &Weights<S>) -> Value {
    Value::Array(w.iter().map(JsonScalar::to_json).collect())
}

pub fn instance_to_value<S: JsonScalar>(g: &GeneralInstance<S>) -> Value {
    let blocks: Vec<Value> = g
        .blocks()
        .iter()
        .map(|b| {
            json!({
                "p": weights_to_value(b.weights()),
                "x": b.points().iter().map(JsonScalar::to_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("q".into(), weights_to_value(g.outer_weights()));
    obj.insert("blocks".into(), Value::Array(blocks));
    if let Some(r) = g.r_blocks() {
        obj.insert(
            "r_blocks".into(),
            Value::Array(r.iter().map(weights_to_value).collect()),
        );
    }
    Value::Object(obj)
}

pub fn simple_instance_to_value<S: JsonScalar>(inst: &SimpleInstance<S>) -> Value {
    json!({
        "p": weights_to_value(inst.weights()),
        "x": inst.points().iter().map(JsonScalar::to_json).collect::<Vec<_>>(),
        "domain_upper": inst.domain_upper().to_json(),
    })
}

/// Serialize a typed document back to the file schema.
pub fn document_to_value<S: JsonScalar>(doc: &TypedDocument<S>) -> Value {
    let mut obj = Map::new();
    obj.insert("mode".into(), Value::String(S::MODE.as_str().into()));
    obj.insert("function".into(), function_to_value(&doc.function));
    if let Some(cert) = doc.function.certificate() {
        obj.insert(
            "certificate".into(),
            json!({
                "coeffs": cert.coeffs().iter().map(JsonScalar::to_json).collect::<Vec<_>>(),
            }),
        );
    }
    obj.insert(
        "domain_upper".into(),
        doc.instance.domain_upper().to_json(),
    );
    obj.insert("instance".into(), instance_to_value(&doc.instance));
    Value::Object(obj)
}

pub fn check_report_to_value<S: JsonScalar>(
    report: &CheckReport<S>,
    target: Target,
    instance_echo: Option<Value>,
) -> Value {
    let mut obj = Map::new();
    obj.insert("target".into(), Value::String(target.as_str().into()));
    obj.insert("mode".into(), Value::String(S::MODE.as_str().into()));
    obj.insert(
        "direction".into(),
        Value::String(report.direction.as_str().into()),
    );
    obj.insert(
        "verdict".into(),
        Value::String(report.verdict.as_str().into()),
    );
    obj.insert("lhs".into(), report.lhs.to_json());
    obj.insert("rhs".into(), report.rhs.to_json());
    obj.insert("slack".into(), report.slack.to_json());
    obj.insert("tolerance".into(), report.tolerance.to_json());
    obj.insert("c_used".into(), report.c_used.to_json());
    obj.insert("barycenter".into(), report.barycenter.to_json());
    if let Some(r) = &report.r_barycenter {
        obj.insert("r_barycenter".into(), r.to_json());
    }
    if let Some(echo) = instance_echo {
        obj.insert("instance".into(), echo);
    }
    Value::Object(obj)
}

pub fn estimate_to_value<S: JsonScalar>(est: &CertificateEstimate<S>) -> Value {
    json!({
        "mode": S::MODE.as_str(),
        "x_bar": est.x_bar.to_json(),
        "samples": est.samples,
        "c_sup_estimate": est.c_sup_estimate.to_json(),
        "witness": simple_instance_to_value(&est.witness),
        "thresholds": {
            "min": est.thresholds.min.to_json(),
            "median": est.thresholds.median.to_json(),
            "max": est.thresholds.max.to_json(),
        },
    })
}

pub fn violation_to_value<S: JsonScalar>(v: &Violation<S>, target: Target) -> Value {
    json!({
        "trial": v.trial,
        "sub_seed": v.sub_seed,
        "instance": instance_to_value(&v.instance),
        "report": check_report_to_value(&v.report, target, None),
    })
}

pub fn fuzz_report_to_value<S: JsonScalar>(report: &FuzzReport<S>, target: Target) -> Value {
    json!({
        "target": target.as_str(),
        "mode": S::MODE.as_str(),
        "trials_run": report.trials_run,
        "violation_count": report.violations.len(),
        "violations": report
            .violations
            .iter()
            .map(|v| violation_to_value(v, target))
            .collect::<Vec<_>>(),
        "min_slack": report
            .min_slack
            .as_ref()
            .map(JsonScalar::to_json)
            .unwrap_or(Value::Null),
        "degenerate_count": report.degenerate_count,
        "cap_errors": report.cap_errors,
    })
}

/// A violation reproducer in the document schema, ready to re-check.
pub fn reproducer_to_value<S: JsonScalar>(
    function: &FunctionModel<S>,
    violation: &Violation<S>,
) -> Value {
    let doc = TypedDocument {
        function: function.clone(),
        instance: violation.instance.clone(),
    };
    document_to_value(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RATIONAL_DOC: &str = r#"{
        "mode": "rational",
        "function": {"family": "power", "exponent": "3"},
        "domain_upper": "1",
        "instance": {
            "q": ["1/2", "1/2"],
            "blocks": [
                {"p": ["1/2", "1/2"], "x": ["0", "1"]},
                {"p": ["1/2", "1/2"], "x": ["0", "1"]}
            ]
        }
    }"#;

    #[test]
    fn parses_rational_document() {
        let doc = parse_document(RATIONAL_DOC).unwrap();
        let Document::Rational(typed) = doc else {
            panic!("expected rational mode");
        };
        assert_eq!(typed.instance.block_count(), 2);
        // The power model carries its derived certificate.
        assert!(typed.function.certificate().is_some());
    }

    #[test]
    fn parses_float_document_with_r_blocks() {
        let text = r#"{
            "mode": "float",
            "function": {"family": "cube_log"},
            "domain_upper": 1.0,
            "instance": {
                "q": [1.0],
                "blocks": [{"p": [0.5, 0.5], "x": [0.0, 1.0]}],
                "r_blocks": [[0.25, 0.75]]
            }
        }"#;
        let doc = parse_document(text).unwrap();
        let Document::Float(typed) = doc else {
            panic!("expected float mode");
        };
        assert!(typed.instance.has_r_family());
    }

    #[test]
    fn mode_mismatch_is_a_path_error() {
        let text = r#"{
            "mode": "rational",
            "function": {"family": "power", "exponent": "3"},
            "domain_upper": "1",
            "instance": {
                "q": [0.5, 0.5],
                "blocks": [{"p": ["1/2", "1/2"], "x": ["0", "1"]}]
            }
        }"#;
        let err = parse_document(text).unwrap_err();
        assert!(err.to_string().contains("instance.q[0]"), "{err}");
    }

    #[test]
    fn malformed_weight_sum_reports_field_path() {
        let text = r#"{
            "mode": "rational",
            "function": {"family": "power", "exponent": "3"},
            "domain_upper": "1",
            "instance": {
                "q": ["1"],
                "blocks": [{"p": ["1/2", "1/4"], "x": ["0", "1"]}]
            }
        }"#;
        let err = parse_document(text).unwrap_err();
        match err {
            Error::WeightSum { path, sum } => {
                assert_eq!(path, "instance.blocks[0].p");
                assert_eq!(sum, "3/4");
            }
            other => panic!("expected weight-sum error, got {other}"),
        }
    }

    #[test]
    fn float_weight_sum_has_tolerance() {
        let text = r#"{
            "mode": "float",
            "function": {"family": "power", "exponent": 3},
            "domain_upper": 1.0,
            "instance": {
                "q": [1.0],
                "blocks": [{"p": [0.3, 0.7], "x": [0.0, 1.0]}]
            }
        }"#;
        assert!(parse_document(text).is_ok());
        let off = text.replace("[0.3, 0.7]", "[0.30001, 0.7]");
        assert!(matches!(
            parse_document(&off),
            Err(Error::WeightSum { .. })
        ));
    }

    #[test]
    fn point_outside_domain_is_rejected_with_path() {
        let text = r#"{
            "mode": "rational",
            "function": {"family": "power", "exponent": "3"},
            "domain_upper": "1",
            "instance": {
                "q": ["1"],
                "blocks": [{"p": ["1/2", "1/2"], "x": ["0", "3/2"]}]
            }
        }"#;
        let err = parse_document(text).unwrap_err();
        assert!(err.to_string().contains("instance.blocks[0].x"), "{err}");
    }

    #[test]
    fn round_trip_is_identity_in_rational_mode() {
        let doc = parse_document(RATIONAL_DOC).unwrap();
        let Document::Rational(typed) = doc else {
            panic!();
        };
        let text = serde_json::to_string(&document_to_value(&typed)).unwrap();
        let again = parse_document(&text).unwrap();
        let Document::Rational(typed_again) = again else {
            panic!();
        };
        assert_eq!(typed, typed_again);
    }

    #[test]
    fn certificate_field_overrides_derived_certificate() {
        let text = r#"{
            "mode": "rational",
            "function": {"family": "power", "exponent": "3"},
            "certificate": {"coeffs": ["0", "2"]},
            "domain_upper": "1",
            "instance": {
                "q": ["1"],
                "blocks": [{"p": ["1/2", "1/2"], "x": ["0", "1"]}]
            }
        }"#;
        let Document::Rational(typed) = parse_document(text).unwrap() else {
            panic!();
        };
        let cert = typed.function.certificate().unwrap();
        assert_eq!(cert.coeffs().len(), 2);
    }

    #[test]
    fn linear_combination_round_trips() {
        let text = r#"{
            "mode": "rational",
            "function": {
                "family": "linear_combination",
                "members": [
                    {"scale": "2", "function": {"family": "power", "exponent": "3"}},
                    {"scale": "1", "function": {"family": "power", "exponent": "4"}}
                ]
            },
            "domain_upper": "1",
            "instance": {
                "q": ["1"],
                "blocks": [{"p": ["1/2", "1/2"], "x": ["0", "1"]}]
            }
        }"#;
        let Document::Rational(typed) = parse_document(text).unwrap() else {
            panic!();
        };
        let text2 = serde_json::to_string(&document_to_value(&typed)).unwrap();
        let Document::Rational(again) = parse_document(&text2).unwrap() else {
            panic!();
        };
        assert_eq!(typed, again);
    }

    #[test]
    fn missing_mode_is_an_error() {
        assert!(parse_document(r#"{"function": {"family": "cube_log"}}"#).is_err());
        assert!(parse_document("not json").is_err());
    }
}
