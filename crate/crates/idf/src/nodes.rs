//! Loop topology and automatic node naming.
//!
//! Templates describe loops as branches of components; [`name_nodes`] then gives every
//! component port a node name of the form `<loop> <branch> Component<k> Outlet Node`, so that
//! each component's outlet is the next one's inlet and names never collide.

use std::collections::BTreeSet;

use crate::builder::RecordBuilder;
use crate::defaults::Defaults;
use crate::document::Record;
use crate::IdfError;

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub class: String,
    pub name: String,
    /// Which side of a multi-port object sits on this branch (`Use` or `Source` for a tank).
    pub port: Option<String>,
    /// Sub-components chained inside this one, such as the fan and coils of a unitary system.
    pub children: Vec<Component>,
    pub inlet: String,
    pub outlet: String,
}

impl Component {
    pub fn new(class: &str, name: impl Into<String>) -> Self {
        Self {
            class: class.into(),
            name: name.into(),
            port: None,
            children: Vec::new(),
            inlet: String::new(),
            outlet: String::new(),
        }
    }

    pub fn on_port(mut self, port: &str) -> Self {
        self.port = Some(port.into());
        self
    }

    pub fn with_children(mut self, children: Vec<Component>) -> Self {
        self.children = children;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub label: String,
    pub components: Vec<Component>,
}

impl Branch {
    pub fn new(label: impl Into<String>, components: Vec<Component>) -> Self {
        Self {
            label: label.into(),
            components,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopKind {
    Plant,
    Air,
}

/// One side of a loop. A plant side runs its first branch, then the middle branches in
/// parallel between a splitter and a mixer, then its last branch.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoopSide {
    pub branches: Vec<Branch>,
}

impl LoopSide {
    pub fn inlet(&self) -> &str {
        self.branches
            .first()
            .and_then(|b| b.components.first())
            .map_or("", |c| c.inlet.as_str())
    }

    pub fn outlet(&self) -> &str {
        self.branches
            .last()
            .and_then(|b| b.components.last())
            .map_or("", |c| c.outlet.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Loop {
    pub name: String,
    pub kind: LoopKind,
    pub supply: LoopSide,
    pub demand: LoopSide,
}

impl Loop {
    fn sides(&self) -> [(&'static str, &LoopSide); 2] {
        [("Supply", &self.supply), ("Demand", &self.demand)]
    }

    /// Every component, children included, in branch order.
    pub fn components(&self) -> Vec<&Component> {
        fn walk<'a>(c: &'a Component, out: &mut Vec<&'a Component>) {
            out.push(c);
            c.children.iter().for_each(|k| walk(k, out));
        }
        let mut out = Vec::new();
        for (_, side) in self.sides() {
            side.branches
                .iter()
                .flat_map(|b| &b.components)
                .for_each(|c| walk(c, &mut out));
        }
        out
    }

    /// Finds a named component (on `port`, when given).
    pub fn component(&self, name: &str, port: Option<&str>) -> Option<&Component> {
        self.components()
            .into_iter()
            .find(|c| c.name == name && (port.is_none() || c.port.as_deref() == port))
    }

    pub fn branch_name(&self, branch: &Branch) -> String {
        format!("{} {} Branch", self.name, branch.label)
    }
}

fn name_chain(
    prefix: &str,
    components: &mut [Component],
    first_inlet: String,
    last_outlet: Option<String>,
) {
    let n = components.len();
    let mut inlet = first_inlet;
    for (k, c) in components.iter_mut().enumerate() {
        let outlet = match (&last_outlet, k + 1 == n) {
            (Some(last), true) => last.clone(),
            _ => format!("{prefix}{} Outlet Node", k + 1),
        };
        c.inlet = inlet;
        c.outlet = outlet.clone();
        if !c.children.is_empty() {
            let child_prefix = format!("{prefix}{}.", k + 1);
            name_chain(
                &child_prefix,
                &mut c.children,
                c.inlet.clone(),
                Some(c.outlet.clone()),
            );
        }
        inlet = outlet;
    }
}

/// Assigns node names to every port of the loop.
///
/// Fails when a branch lists the same component (class, name and port) twice, or when two
/// ports end up with one node name.
pub fn name_nodes(lp: &mut Loop) -> Result<(), IdfError> {
    for (_, side) in lp.sides() {
        for b in &side.branches {
            let mut seen = BTreeSet::new();
            for c in &b.components {
                if !seen.insert((c.class.as_str(), c.name.as_str(), c.port.as_deref())) {
                    return Err(IdfError::DuplicateComponent {
                        loop_name: lp.name.clone(),
                        branch: b.label.clone(),
                        class: c.class.clone(),
                        name: c.name.clone(),
                    });
                }
            }
        }
    }
    let name = lp.name.clone();
    for side in [&mut lp.supply, &mut lp.demand] {
        for b in &mut side.branches {
            let prefix = format!("{name} {} Component", b.label);
            name_chain(
                &prefix,
                &mut b.components,
                format!("{prefix}1 Inlet Node"),
                None,
            );
        }
    }
    let mut seen = BTreeSet::new();
    for c in lp.components() {
        // a parent's outlet is its last child's
        if c.children.is_empty() && !seen.insert(c.outlet.to_ascii_uppercase()) {
            return Err(IdfError::DuplicateNode(c.outlet.clone()));
        }
    }
    Ok(())
}

/// Branch, branch list and connector records of a named loop. Plant sides need at least
/// three branches; an air loop's single supply branch needs no connectors.
pub fn topology_records(lp: &Loop, defaults: &Defaults) -> Result<Vec<Record>, IdfError> {
    let mut out = Vec::new();
    for (side_name, side) in lp.sides() {
        if side.branches.is_empty() {
            continue;
        }
        for b in &side.branches {
            let mut r = RecordBuilder::new("Branch").set("Name", lp.branch_name(b));
            for c in &b.components {
                r = r
                    .push(&c.class)
                    .push(&c.name)
                    .push(&c.inlet)
                    .push(&c.outlet);
            }
            out.push(r.build(defaults));
        }
        let mut list = RecordBuilder::new("BranchList")
            .set("Name", format!("{} {side_name} Branches", lp.name));
        for b in &side.branches {
            list = list.push(lp.branch_name(b));
        }
        out.push(list.build(defaults));
        if lp.kind == LoopKind::Air {
            continue;
        }
        if side.branches.len() < 3 {
            return Err(IdfError::UnsupportedCombination(format!(
                "{} {side_name} side needs an inlet, a parallel and an outlet branch",
                lp.name
            )));
        }
        let first = lp.branch_name(&side.branches[0]);
        let last = lp.branch_name(side.branches.last().expect("checked length"));
        let middle = &side.branches[1..side.branches.len() - 1];
        let splitter = format!("{} {side_name} Splitter", lp.name);
        let mixer = format!("{} {side_name} Mixer", lp.name);
        let mut s = RecordBuilder::new("Connector:Splitter")
            .set("Name", &splitter)
            .set("Inlet Branch Name", first);
        let mut m = RecordBuilder::new("Connector:Mixer")
            .set("Name", &mixer)
            .set("Outlet Branch Name", last);
        for b in middle {
            s = s.push(lp.branch_name(b));
            m = m.push(lp.branch_name(b));
        }
        out.push(s.build(defaults));
        out.push(m.build(defaults));
        out.push(
            RecordBuilder::new("ConnectorList")
                .set("Name", format!("{} {side_name} Connectors", lp.name))
                .push("Connector:Splitter")
                .push(&splitter)
                .push("Connector:Mixer")
                .push(&mixer)
                .build(defaults),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pipe(name: &str) -> Component {
        Component::new("Pipe:Adiabatic", name)
    }

    fn sample() -> Loop {
        Loop {
            name: "L".into(),
            kind: LoopKind::Plant,
            supply: LoopSide {
                branches: vec![
                    Branch::new(
                        "Supply Inlet",
                        vec![Component::new("Pump:ConstantSpeed", "P"), pipe("A")],
                    ),
                    Branch::new("Supply Outlet", vec![pipe("B")]),
                ],
            },
            demand: LoopSide::default(),
        }
    }

    #[test]
    fn outlets_feed_the_next_inlet() {
        let mut lp = sample();
        name_nodes(&mut lp).unwrap();
        let b = &lp.supply.branches[0].components;
        assert_eq!(b[0].inlet, "L Supply Inlet Component1 Inlet Node");
        assert_eq!(b[0].outlet, "L Supply Inlet Component1 Outlet Node");
        assert_eq!(b[1].inlet, b[0].outlet);
        assert_eq!(lp.supply.inlet(), "L Supply Inlet Component1 Inlet Node");
        assert_eq!(lp.supply.outlet(), "L Supply Outlet Component1 Outlet Node");
    }

    #[test]
    fn children_span_their_parent() {
        let mut lp = sample();
        let parent = Component::new("AirLoopHVAC:UnitarySystem", "U").with_children(vec![
            Component::new("Fan:OnOff", "F"),
            Component::new("Coil:Heating:Electric", "H"),
        ]);
        lp.supply.branches[1].components.push(parent);
        name_nodes(&mut lp).unwrap();
        let u = lp.component("U", None).unwrap();
        assert_eq!(u.children[0].inlet, u.inlet);
        assert_eq!(
            u.children[0].outlet,
            "L Supply Outlet Component2.1 Outlet Node"
        );
        assert_eq!(u.children[1].outlet, u.outlet);
    }

    #[test]
    fn repeated_component_on_a_branch_is_rejected() {
        let mut lp = sample();
        lp.supply.branches[0].components.push(pipe("A"));
        let err = name_nodes(&mut lp).unwrap_err();
        assert!(
            matches!(err, IdfError::DuplicateComponent { ref name, .. } if name == "A"),
            "{err:?}"
        );
    }

    #[test]
    fn same_object_on_two_ports_is_allowed() {
        let mut lp = sample();
        let tank = Component::new("WaterHeater:Mixed", "T");
        lp.supply.branches[0]
            .components
            .push(tank.clone().on_port("Use"));
        lp.supply.branches[0]
            .components
            .push(tank.on_port("Source"));
        assert!(name_nodes(&mut lp).is_ok());
    }

    #[test]
    fn repeated_branch_labels_collide_on_nodes() {
        let mut lp = sample();
        lp.supply.branches[1].label = "Supply Inlet".into();
        assert!(matches!(
            name_nodes(&mut lp),
            Err(IdfError::DuplicateNode(_))
        ));
    }
}
