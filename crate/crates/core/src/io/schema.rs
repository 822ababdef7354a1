//! JSON Schemas (draft 2020-12) for the config file and every JSON report.

pub const SCHEMAS: &[(&str, &str)] = &[
    ("config", include_str!("../../schemas/config.schema.json")),
    (
        "effective-config",
        include_str!("../../schemas/effective-config.schema.json"),
    ),
    ("freqs", include_str!("../../schemas/freqs.schema.json")),
    (
        "strategy",
        include_str!("../../schemas/strategy.schema.json"),
    ),
    (
        "intrinsic",
        include_str!("../../schemas/intrinsic.schema.json"),
    ),
    (
        "simulate",
        include_str!("../../schemas/simulate.schema.json"),
    ),
    (
        "norepeat",
        include_str!("../../schemas/norepeat.schema.json"),
    ),
    ("verify", include_str!("../../schemas/verify.schema.json")),
];

pub fn schema(name: &str) -> Option<&'static str> {
    SCHEMAS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
