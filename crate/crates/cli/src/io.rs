use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{Context, Result};
use homlab::decon::Deconstruction;
use homlab::folog::Formula;
use homlab::graphlib::{Graph, MinorMap, RootedForest};
use homlab::relstruct::Structure;

/// Reads a file, or standard input for `-`.
pub fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

pub fn structure(path: &Path) -> Result<Structure> {
    let text = read_text(path)?;
    Structure::from_json(&text).with_context(|| format!("in {}", path.display()))
}

/// A graph in the edge-list text format or as a JSON structure.
pub fn graph(path: &Path) -> Result<Graph> {
    let text = read_text(path)?;
    let g = if is_json(&text) {
        Graph::from_structure(Structure::from_json(&text)?)
    } else {
        Graph::from_text(&text)
    };
    g.with_context(|| format!("in {}", path.display()))
}

/// A rooted forest in the text format; JSON graphs are rooted at the least
/// vertex of each component.
pub fn forest(path: &Path) -> Result<RootedForest> {
    let text = read_text(path)?;
    let f = if is_json(&text) {
        Graph::from_structure(Structure::from_json(&text)?).and_then(RootedForest::rooted_at_least)
    } else {
        RootedForest::from_text(&text)
    };
    f.with_context(|| format!("in {}", path.display()))
}

pub fn deconstruction(path: &Path) -> Result<Deconstruction> {
    let text = read_text(path)?;
    Deconstruction::from_json(&text).with_context(|| format!("in {}", path.display()))
}

/// A formula given inline (starting with `(`) or as a file path.
pub fn formula(arg: &str) -> Result<Formula> {
    let text = if arg.trim_start().starts_with('(') {
        arg.to_string()
    } else {
        read_text(Path::new(arg))?
    };
    Ok(text.trim().parse()?)
}

/// Branch sets as a JSON object from minor vertices to host vertex lists.
pub fn minor_map(path: &Path, m: &Graph, g: &Graph) -> Result<MinorMap> {
    let text = read_text(path)?;
    let named: std::collections::BTreeMap<String, Vec<String>> =
        serde_json::from_str(&text).with_context(|| format!("in {}", path.display()))?;
    let mut sets = vec![Vec::new(); m.len()];
    for (x, set) in named {
        let i = m.vertex(&x)?;
        let mut ids = set.iter().map(|h| g.vertex(h)).collect::<homlab::Result<Vec<_>>>()?;
        ids.sort_unstable();
        sets[i as usize] = ids;
    }
    Ok(MinorMap(sets))
}
