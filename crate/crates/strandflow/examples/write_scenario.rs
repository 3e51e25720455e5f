//! Generates a scenario file for the demo machine, reloads it, and
//! verifies the round trip. Pass an output path as the first argument to
//! write the file somewhere specific (for example, to seed a scenarios
//! directory); by default it goes to the system temp directory.

use std::path::PathBuf;

use strandflow::presets::demo_machine;
use strandflow::scenario::{load_scenario, save_scenario};

fn main() -> strandflow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("strandflow_demo_machine.toml"));

    let scenario = demo_machine();
    save_scenario(&path, &scenario)?;
    println!("wrote {}", path.display());

    // The loader records the directory the file lived in so that relative
    // flux-file paths resolve later; clear it to compare the physics content.
    let mut reloaded = load_scenario(&path)?;
    reloaded.base_dir = None;
    assert_eq!(scenario, reloaded, "scenario must round-trip unchanged");
    println!("reloaded and verified: the file reproduces the scenario exactly");
    println!();

    let text =
        std::fs::read_to_string(&path).map_err(|e| strandflow::Error::io(&path, e))?;
    println!("file head:");
    for line in text.lines().take(20) {
        println!("  {line}");
    }
    println!("  ... {} lines total", text.lines().count());
    Ok(())
}
