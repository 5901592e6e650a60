//! Published JSON schemas for every input format and subcommand payload.

use serde_json::{Map, Value};

use crate::error::Error;

pub const SCHEMAS: [(&str, &str); 8] = [
    ("instance", include_str!("../schemas/instance.json")),
    ("flow", include_str!("../schemas/flow.json")),
    ("matching", include_str!("../schemas/matching.json")),
    ("validate", include_str!("../schemas/validate.json")),
    ("solve", include_str!("../schemas/solve.json")),
    ("check", include_str!("../schemas/check.json")),
    ("oracle", include_str!("../schemas/oracle.json")),
    ("gadget", include_str!("../schemas/gadget.json")),
];

pub fn schema(name: &str) -> Result<Value, Error> {
    SCHEMAS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| serde_json::from_str(text).expect("bundled schema parses"))
        .ok_or_else(|| Error::UnknownSchema(name.to_string()))
}

/// All schemas keyed by name.
pub fn all() -> Value {
    let map: Map<String, Value> = SCHEMAS
        .iter()
        .map(|(n, text)| (n.to_string(), serde_json::from_str(text).expect("bundled schema parses")))
        .collect();
    Value::Object(map)
}
