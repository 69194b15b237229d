//! JSON interchange for posets and maps, and Graphviz export of Hasse diagrams.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::bitset::ElementSet;
use crate::category::{validate_map, PosetMap, Role};
use crate::error::{Error, Result};
use crate::poset::{validate_poset, Poset, RelationMode};

/// `{"elements": [names], "covers": [[a, b], ...]}` with `a` below `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    #[serde(default)]
    pub covers: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub source: PosetJson,
    pub target: PosetJson,
    pub table: BTreeMap<String, String>,
    pub role: Role,
}

/// Order names so that purely numeric ones come first, by value.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

impl PosetJson {
    /// Validate names and covers and build the poset. Element `i` is the
    /// `i`-th listed name; pairs may be any generating relation, not only covers.
    pub fn to_poset(&self) -> Result<Poset> {
        let mut index = HashMap::new();
        for (i, name) in self.elements.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(Error::DuplicateLabel(name.clone()));
            }
        }
        let lookup = |n: &String| index.get(n.as_str()).copied().ok_or_else(|| Error::UnknownElement(n.clone()));
        let pairs = self.covers.iter().map(|[a, b]| Ok((lookup(a)?, lookup(b)?))).collect::<Result<Vec<_>>>()?;
        validate_poset(self.elements.len(), &pairs, RelationMode::Covers)?.with_labels(self.elements.iter().cloned())
    }

    pub fn from_poset(p: &Poset) -> PosetJson {
        let mut elements = p.names();
        elements.sort_by(|a, b| natural_cmp(a, b));
        let mut covers: Vec<[String; 2]> = p.covers().into_iter().map(|(a, b)| [p.name(a), p.name(b)]).collect();
        covers.sort_by(|x, y| natural_cmp(&x[0], &y[0]).then_with(|| natural_cmp(&x[1], &y[1])));
        PosetJson { elements, covers }
    }
}

pub fn parse_poset(text: &str) -> Result<Poset> {
    serde_json::from_str::<PosetJson>(text)?.to_poset()
}

pub fn poset_to_json(p: &Poset) -> String {
    serde_json::to_string_pretty(&PosetJson::from_poset(p)).expect("plain data serializes")
}

impl MapJson {
    pub fn to_map(&self) -> Result<PosetMap> {
        let source = self.source.to_poset()?;
        let target = self.target.to_poset()?;
        if self.table.len() != source.size() {
            return Err(Error::TableSize { expected: source.size(), got: self.table.len() });
        }
        let mut table = vec![0; source.size()];
        for (x, y) in &self.table {
            let i = source.index_of(x).ok_or_else(|| Error::UnknownElement(x.clone()))?;
            table[i] = target.index_of(y).ok_or_else(|| Error::UnknownElement(y.clone()))?;
        }
        validate_map(&source, &target, table, self.role)
    }

    pub fn from_map(m: &PosetMap) -> MapJson {
        let table = (0..m.source().size()).map(|x| (m.source().name(x), m.target().name(m.apply(x)))).collect();
        MapJson {
            source: PosetJson::from_poset(m.source()),
            target: PosetJson::from_poset(m.target()),
            table,
            role: m.role(),
        }
    }
}

/// Element names of a set, in natural order.
pub fn set_names(p: &Poset, s: &ElementSet) -> Vec<String> {
    let mut names: Vec<String> = s.iter().map(|i| p.name(i)).collect();
    names.sort_by(|a, b| natural_cmp(a, b));
    names
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Hasse diagram in DOT: bottom-to-top, one node per element, one edge per
/// cover, elements of equal height on the same rank.
pub fn render_dot(p: &Poset) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=circle];\n");
    let heights = p.heights();
    for i in 0..p.size() {
        let _ = writeln!(out, "  {};", quote(&p.name(i)));
    }
    let max_h = heights.iter().copied().max();
    for h in 0..=max_h.unwrap_or(0) {
        let level: Vec<String> = (0..p.size()).filter(|&i| heights[i] == h).map(|i| quote(&p.name(i))).collect();
        if level.len() > 1 {
            let _ = writeln!(out, "  {{ rank=same; {}; }}", level.join("; "));
        }
    }
    for (a, b) in p.covers() {
        let _ = writeln!(out, "  {} -> {};", quote(&p.name(a)), quote(&p.name(b)));
    }
    out.push_str("}\n");
    out
}
