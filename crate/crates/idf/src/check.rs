//! Closed-world reference check over a document.
//!
//! Names are compared case-insensitively, as EnergyPlus does. Every node must be produced by
//! exactly one outlet port (a component outlet, a loop side inlet, a zone node, or a splitter or
//! mixer feeding a branch) and consumed by at most one inlet port.

use std::collections::{BTreeMap, BTreeSet};

use crate::document::IdfDocument;
use crate::schema::{self, Role};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosureReport {
    /// Names defined more than once in one namespace.
    pub duplicates: Vec<String>,
    /// References to names with no definition.
    pub dangling: Vec<String>,
    /// Nodes with no producer, several producers or several consumers.
    pub node_problems: Vec<String>,
    pub unknown_classes: Vec<String>,
}

impl ClosureReport {
    pub fn is_clean(&self) -> bool {
        self.duplicates.is_empty()
            && self.dangling.is_empty()
            && self.node_problems.is_empty()
            && self.unknown_classes.is_empty()
    }
}

#[derive(Default)]
struct NodeUse {
    outs: usize,
    ins: usize,
}

fn canonical_class(v: &str) -> String {
    schema::class(v)
        .map(|c| c.name.to_string())
        .unwrap_or_else(|| v.to_string())
}

pub fn check_closure(doc: &IdfDocument) -> ClosureReport {
    let mut report = ClosureReport::default();
    let mut defs: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut refs: Vec<(String, String, String)> = Vec::new();
    let mut nodes: BTreeMap<String, NodeUse> = BTreeMap::new();
    // branch name -> (first inlet, last outlet)
    let mut branches: BTreeMap<String, (String, String)> = BTreeMap::new();

    for r in &doc.records {
        let Some(def) = schema::class(&r.class) else {
            report.unknown_classes.push(r.class.clone());
            continue;
        };
        for (i, f) in r.fields.iter().enumerate() {
            let v = f.value.trim();
            if v.is_empty() {
                continue;
            }
            let Some(fd) = def.field(i) else { continue };
            let key = v.to_ascii_uppercase();
            let here = || format!("{} '{}' field '{}'", def.name, r.name(), fd.name);
            match fd.role {
                Role::Plain => {}
                Role::Def(ns) => *defs.entry((ns, key)).or_default() += 1,
                Role::Ref(ns) => refs.push((ns, key, here())),
                Role::DynRef(off) => {
                    let j = i as isize + off;
                    let ns = usize::try_from(j)
                        .ok()
                        .and_then(|j| r.value(j))
                        .unwrap_or("");
                    refs.push((canonical_class(ns.trim()), key, here()));
                }
                Role::NodeIn => nodes.entry(key).or_default().ins += 1,
                Role::NodeOut => nodes.entry(key).or_default().outs += 1,
                Role::NodeRef => {
                    nodes.entry(key).or_default();
                }
            }
        }
        if def.name == "Branch" {
            let comps: Vec<&str> = r.values().skip(2).collect();
            let ports: Vec<(&str, &str)> = comps
                .chunks(4)
                .filter(|c| c.len() == 4)
                .map(|c| (c[2], c[3]))
                .collect();
            for w in ports.windows(2) {
                if !w[0].1.eq_ignore_ascii_case(w[1].0) {
                    report.node_problems.push(format!(
                        "branch '{}': outlet '{}' does not feed the next inlet '{}'",
                        r.name(),
                        w[0].1,
                        w[1].0
                    ));
                }
            }
            if let (Some(first), Some(last)) = (ports.first(), ports.last()) {
                branches.insert(
                    r.name().to_ascii_uppercase(),
                    (first.0.to_ascii_uppercase(), last.1.to_ascii_uppercase()),
                );
            }
        }
    }

    // splitters and mixers join branch ends without naming nodes themselves
    for r in &doc.records {
        let is_splitter = match r.class.to_ascii_lowercase().as_str() {
            "connector:splitter" => true,
            "connector:mixer" => false,
            _ => continue,
        };
        let mut names = r.values().skip(1).map(|v| v.to_ascii_uppercase());
        let Some(single) = names.next() else { continue };
        let many: Vec<String> = names.collect();
        if is_splitter {
            if let Some((_, last)) = branches.get(&single) {
                nodes.entry(last.clone()).or_default().ins += 1;
            }
            for b in &many {
                if let Some((first, _)) = branches.get(b) {
                    nodes.entry(first.clone()).or_default().outs += 1;
                }
            }
        } else {
            if let Some((first, _)) = branches.get(&single) {
                nodes.entry(first.clone()).or_default().outs += 1;
            }
            for b in &many {
                if let Some((_, last)) = branches.get(b) {
                    nodes.entry(last.clone()).or_default().ins += 1;
                }
            }
        }
    }

    for ((ns, name), n) in &defs {
        if *n > 1 {
            report
                .duplicates
                .push(format!("{ns} '{name}' defined {n} times"));
        }
    }
    let defined: BTreeSet<(&str, &str)> =
        defs.keys().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    for (ns, name, at) in &refs {
        if !defined.contains(&(ns.as_str(), name.as_str())) {
            report
                .dangling
                .push(format!("{at} refers to undefined {ns} '{name}'"));
        }
    }
    for (name, u) in &nodes {
        match u.outs {
            0 => report
                .node_problems
                .push(format!("node '{name}' is never produced")),
            1 => {}
            n => report
                .node_problems
                .push(format!("node '{name}' is produced by {n} ports")),
        }
        if u.ins > 1 {
            report
                .node_problems
                .push(format!("node '{name}' is consumed by {} ports", u.ins));
        }
    }
    report
}

/// Values of every Version record.
pub fn version_values(doc: &IdfDocument) -> Vec<&str> {
    doc.of_class("Version")
        .map(|r| r.value(0).unwrap_or(""))
        .collect()
}
