use riflex_core::io::config::{load_config, EffectiveConfig};
use riflex_core::io::format::to_json;
use riflex_core::io::presets;
use riflex_core::io::schema::{schema, SCHEMAS};
use serde_json::Value;

fn validator(name: &str) -> jsonschema::Validator {
    let s: Value = serde_json::from_str(schema(name).unwrap()).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn assert_valid(name: &str, instance: &Value) {
    let v = validator(name);
    let errors: Vec<String> = v.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn every_schema_compiles() {
    for (name, _) in SCHEMAS {
        validator(name);
    }
}

#[test]
fn presets_and_effective_configs_validate() {
    for name in presets::names() {
        let raw: Value = serde_json::from_str(presets::preset(name).unwrap()).unwrap();
        assert_valid("config", &raw);
        let resolved = load_config(&format!("preset:{name}"))
            .unwrap()
            .resolve()
            .unwrap();
        let text = to_json(&EffectiveConfig::from(&resolved)).unwrap();
        assert_valid("effective-config", &serde_json::from_str(&text).unwrap());
    }
}

#[test]
fn schema_rejects_unknown_keys() {
    let v = validator("config");
    let bad = serde_json::json!({
        "model": {"axes": [{"axis": "time", "d_prime": 8, "base": 100.0, "train_len": 16}]},
        "extra": 1
    });
    assert!(!v.is_valid(&bad));
}
