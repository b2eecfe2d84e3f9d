//! JSON encoding helpers. Infinities become the strings "-inf" / "inf".

use serde_json::{json, Map, Value};
use tropreg::TropicalMatrix;

pub fn num(v: f64) -> Value {
    if v == f64::NEG_INFINITY {
        Value::from("-inf")
    } else if v == f64::INFINITY {
        Value::from("inf")
    } else {
        serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
    }
}

pub fn vector(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub fn matrix(m: &TropicalMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector(m.row(i))).collect())
}

pub fn document(command: &str, config: Value, result: Value, timing_ms: Option<f64>) -> String {
    let mut doc = Map::new();
    doc.insert("command".into(), json!(command));
    doc.insert("config".into(), config);
    doc.insert("result".into(), result);
    doc.insert("timing_ms".into(), timing_ms.map_or(Value::Null, num));
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
    s.push('\n');
    s
}
