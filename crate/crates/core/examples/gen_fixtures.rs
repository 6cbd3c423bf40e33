//! Writes the built-in scenarios as JSON into a directory (default `fixtures`).

use covertool::fixtures;
use covertool::scenario::save_scenario;

fn main() -> covertool::Result<()> {
    let dir = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir).map_err(|e| covertool::Error::io(&dir, e))?;
    for (name, sc) in [
        ("desk", fixtures::desk()?),
        ("fco", fixtures::fco(13, 3)?),
        ("vic", fixtures::vic(4, 3)?),
    ] {
        let p = dir.join(format!("{name}.json"));
        save_scenario(&p, &sc)?;
        println!("{} ({} sensors, V_R = {})", p.display(), sc.sensors.len(), sc.roi_volume());
    }
    Ok(())
}
