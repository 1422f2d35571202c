//! Resource hierarchy of a composable data center and the disaggregation
//! configuration applied to it.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceKind {
    Cpu,
    Ram,
    Storage,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 3] =
        [ResourceKind::Cpu, ResourceKind::Ram, ResourceKind::Storage];

    pub fn as_str(self) -> &'static str {
        match self {
            ResourceKind::Cpu => "cpu",
            ResourceKind::Ram => "ram",
            ResourceKind::Storage => "storage",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Hierarchy level. The derived ordering is the containment order
/// `Node < Rack < Pod < Dc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Node,
    Rack,
    Pod,
    Dc,
}

impl Scope {
    pub const ALL: [Scope; 4] = [Scope::Node, Scope::Rack, Scope::Pod, Scope::Dc];

    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Node => "node",
            Scope::Rack => "rack",
            Scope::Pod => "pod",
            Scope::Dc => "dc",
        }
    }

    pub fn parse(s: &str) -> Option<Scope> {
        match s.trim().to_ascii_lowercase().as_str() {
            "node" => Some(Scope::Node),
            "rack" => Some(Scope::Rack),
            "pod" => Some(Scope::Pod),
            "dc" => Some(Scope::Dc),
            _ => None,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResourceComponent {
    pub kind: ResourceKind,
    pub capacity: u32,
}

impl ResourceComponent {
    pub fn new(kind: ResourceKind, capacity: u32) -> Self {
        ResourceComponent { kind, capacity }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    #[serde(default)]
    pub components: Vec<ResourceComponent>,
}

impl Node {
    pub fn new(id: impl Into<String>, components: Vec<ResourceComponent>) -> Self {
        Node {
            id: id.into(),
            components,
        }
    }

    /// A node is homogeneous when every component has the same kind.
    /// Nodes without components count as homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        match self.components.split_first() {
            None => true,
            Some((first, rest)) => rest.iter().all(|c| c.kind == first.kind),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rack {
    pub id: String,
    #[serde(default)]
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pod {
    pub id: String,
    #[serde(default)]
    pub racks: Vec<Rack>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataCenter {
    #[serde(default)]
    pub pods: Vec<Pod>,
}

impl DataCenter {
    /// Iterates every node together with its `pod/rack/node` path.
    pub fn nodes(&self) -> impl Iterator<Item = (String, &Node)> + '_ {
        self.pods.iter().flat_map(|pod| {
            pod.racks.iter().flat_map(move |rack| {
                rack.nodes
                    .iter()
                    .map(move |node| (format!("{}/{}/{}", pod.id, rack.id, node.id), node))
            })
        })
    }

    pub fn component_count(&self) -> usize {
        self.nodes().map(|(_, n)| n.components.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Traditional servers: every component is confined to its own chassis.
    Traditional,
    Physical,
    Logical,
    Hybrid,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Traditional => "traditional",
            Mode::Physical => "physical",
            Mode::Logical => "logical",
            Mode::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_scale() -> Scope {
    Scope::Rack
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DisaggregationConfig {
    pub mode: Mode,
    /// Scale of physical disaggregation; only read for `physical` and `hybrid`.
    #[serde(default = "default_scale")]
    pub physical_scale: Scope,
}

impl DisaggregationConfig {
    pub fn new(mode: Mode, physical_scale: Scope) -> Self {
        DisaggregationConfig {
            mode,
            physical_scale,
        }
    }

    pub fn physical(scale: Scope) -> Self {
        Self::new(Mode::Physical, scale)
    }

    pub fn hybrid(scale: Scope) -> Self {
        Self::new(Mode::Hybrid, scale)
    }

    pub fn logical() -> Self {
        Self::new(Mode::Logical, Scope::Dc)
    }

    pub fn traditional() -> Self {
        Self::new(Mode::Traditional, Scope::Node)
    }

    fn uses_physical_scale(&self) -> bool {
        matches!(self.mode, Mode::Physical | Mode::Hybrid)
    }
}

/// One broken rule, tagged with the offending entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    DuplicatePodId { entity: String },
    DuplicateRackId { entity: String },
    DuplicateNodeId { entity: String },
    HeterogeneousNode { entity: String },
    InvalidPhysicalScale { entity: String, scale: Scope },
}

impl Violation {
    pub fn entity(&self) -> &str {
        match self {
            Violation::DuplicatePodId { entity }
            | Violation::DuplicateRackId { entity }
            | Violation::DuplicateNodeId { entity }
            | Violation::HeterogeneousNode { entity }
            | Violation::InvalidPhysicalScale { entity, .. } => entity,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicatePodId { entity } => write!(f, "duplicate pod id `{entity}`"),
            Violation::DuplicateRackId { entity } => write!(f, "duplicate rack id `{entity}`"),
            Violation::DuplicateNodeId { entity } => write!(f, "duplicate node id `{entity}`"),
            Violation::HeterogeneousNode { entity } => {
                write!(
                    f,
                    "node `{entity}` mixes resource kinds under physical disaggregation"
                )
            }
            Violation::InvalidPhysicalScale { scale, .. } => {
                write!(
                    f,
                    "physical disaggregation scale must be rack, pod or dc, got {scale}"
                )
            }
        }
    }
}

/// Checks hierarchy and mode consistency. Violations are returned in
/// hierarchy order; an empty list means the data center is valid.
pub fn validate_dc(dc: &DataCenter, cfg: &DisaggregationConfig) -> Vec<Violation> {
    let mut violations = Vec::new();

    if cfg.uses_physical_scale() && cfg.physical_scale == Scope::Node {
        violations.push(Violation::InvalidPhysicalScale {
            entity: "disaggregation".to_owned(),
            scale: cfg.physical_scale,
        });
    }

    let mut pod_ids = BTreeSet::new();
    for pod in &dc.pods {
        if !pod_ids.insert(pod.id.as_str()) {
            violations.push(Violation::DuplicatePodId {
                entity: pod.id.clone(),
            });
        }
        let mut rack_ids = BTreeSet::new();
        for rack in &pod.racks {
            let rack_path = format!("{}/{}", pod.id, rack.id);
            if !rack_ids.insert(rack.id.as_str()) {
                violations.push(Violation::DuplicateRackId {
                    entity: rack_path.clone(),
                });
            }
            let mut node_ids = BTreeSet::new();
            for node in &rack.nodes {
                let node_path = format!("{rack_path}/{}", node.id);
                if !node_ids.insert(node.id.as_str()) {
                    violations.push(Violation::DuplicateNodeId {
                        entity: node_path.clone(),
                    });
                }
                if cfg.mode == Mode::Physical && !node.is_homogeneous() {
                    violations.push(Violation::HeterogeneousNode { entity: node_path });
                }
            }
        }
    }
    violations
}

/// The largest hierarchy entity within which the components of `node` may be
/// combined with others into a logical server.
pub fn utilization_scope(node: &Node, cfg: &DisaggregationConfig) -> Result<Scope> {
    if cfg.uses_physical_scale() && cfg.physical_scale == Scope::Node {
        return Err(Error::Config(format!(
            "{} disaggregation needs a rack, pod or dc scale",
            cfg.mode
        )));
    }
    match cfg.mode {
        Mode::Traditional => Ok(Scope::Node),
        Mode::Logical => Ok(Scope::Dc),
        Mode::Physical if node.is_homogeneous() => Ok(cfg.physical_scale),
        Mode::Physical => Err(Error::Config(format!(
            "node `{}` is heterogeneous and cannot be physically disaggregated",
            node.id
        ))),
        Mode::Hybrid if node.is_homogeneous() => Ok(cfg.physical_scale),
        Mode::Hybrid => Ok(Scope::Dc),
    }
}

/// A data center plus the disaggregation applied to it, as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub dc: DataCenter,
    pub disaggregation: DisaggregationConfig,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        serde_json::from_str(text)
            .map_err(|e| Error::parse(Some(e.line() as u64), None, format!("scenario: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scenario> {
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization is infallible")
    }
}
