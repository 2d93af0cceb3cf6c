//! Files shipped with the crate: demo fleet, training file, query templates.

use std::fs;
use std::io;
use std::path::Path;

use crate::sparql::{QueryTemplate, TemplateSet};

pub const DEMO_FLEET: &str = include_str!("../data/demo_fleet.json");
pub const TRAINING: &str = include_str!("../data/intents.md");

pub const TEMPLATES: [(&str, &str); 7] = [
    ("aggregate_value", include_str!("../data/templates/aggregate_value.rq")),
    ("closest", include_str!("../data/templates/closest.rq")),
    ("fleet_best", include_str!("../data/templates/fleet_best.rq")),
    ("get_engine", include_str!("../data/templates/get_engine.rq")),
    ("get_value", include_str!("../data/templates/get_value.rq")),
    ("show_engine", include_str!("../data/templates/show_engine.rq")),
    ("the_best", include_str!("../data/templates/the_best.rq")),
];

pub fn templates() -> TemplateSet {
    let mut set = TemplateSet::default();
    for (intent, text) in TEMPLATES {
        set.insert(intent, QueryTemplate::new(text));
    }
    set
}

/// Writes `fleet.json`, `intents.md` and `templates/*.rq` under `dir`.
pub fn write_bundle(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir.join("templates"))?;
    fs::write(dir.join("fleet.json"), DEMO_FLEET)?;
    fs::write(dir.join("intents.md"), TRAINING)?;
    for (intent, text) in TEMPLATES {
        fs::write(dir.join("templates").join(format!("{intent}.rq")), text)?;
    }
    Ok(())
}
