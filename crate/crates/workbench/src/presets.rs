//! Built-in model zoo. Each preset is a checked-in config under `models/`.

use crate::config::{load_config, AnalysisConfig, ConfigError};

pub const PRESETS: [(&str, &str); 4] = [
    ("qubit-xz", include_str!("../models/qubit-xz.json")),
    (
        "qubit-trivial",
        include_str!("../models/qubit-trivial.json"),
    ),
    (
        "lattice-hop-2",
        include_str!("../models/lattice-hop-2.json"),
    ),
    (
        "lattice-ring-4",
        include_str!("../models/lattice-ring-4.json"),
    ),
];

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn preset(name: &str) -> Option<Result<AnalysisConfig, ConfigError>> {
    preset_text(name).map(load_config)
}
