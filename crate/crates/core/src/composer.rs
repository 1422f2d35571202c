//! Composition of logical servers from disaggregated components.
//!
//! A set of components is a *valid selection* for an application when the
//! smallest hierarchy entity containing all of them (its span) is no wider than
//! the application's latency scope, and every selected component's utilization
//! scope reaches at least that span.
//!
//! [`place_all`] maximises the number of accepted applications and, among
//! those, minimises the number of components switched on. Up to
//! [`EXACT_MAX_COMPONENTS`] components and [`EXACT_MAX_APPS`] applications it
//! is exact: a branch-and-bound over acceptance decisions and placement
//! domains, with the unit split decided per resource kind by a transportation
//! max-flow. [`oracle_place`] solves the same problem by exhaustive enumeration
//! of unit assignments and is used to cross-check the solver.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::MaxFlow;
use crate::topology::{
    utilization_scope, validate_dc, DataCenter, DisaggregationConfig, ResourceKind, Scope,
};
use crate::workload::{AppTemplate, WorkloadSet};

pub const EXACT_MAX_COMPONENTS: usize = 16;
pub const EXACT_MAX_APPS: usize = 10;
pub const ORACLE_MAX_COMPONENTS: usize = 12;
pub const ORACLE_MAX_APPS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentRef {
    pub pod: String,
    pub rack: String,
    pub node: String,
    /// Position of the component within its node.
    pub index: usize,
}

impl fmt::Display for ComponentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}#{}", self.pod, self.rack, self.node, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub component: ComponentRef,
    pub kind: ResourceKind,
    pub units: u32,
}

/// The logical server composed for one application.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub app: String,
    /// Path of the smallest hierarchy entity holding every assigned component.
    pub entity_path: String,
    pub assignments: Vec<Assignment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reason {
    /// Not enough free units of some kind anywhere in the data center.
    Capacity,
    /// Units exist, but no valid selection within the latency and
    /// utilization scopes can supply them.
    Scope,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::Capacity => "capacity",
            Reason::Scope => "scope",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub app: String,
    pub reason: Reason,
}

/// `(accepted applications, active components)`, compared lexicographically:
/// more accepted is better, then fewer active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Objective(pub usize, pub usize);

impl Objective {
    pub fn accepted(&self) -> usize {
        self.0
    }

    pub fn active_components(&self) -> usize {
        self.1
    }

    pub fn better_than(&self, other: &Objective) -> bool {
        self.0 > other.0 || (self.0 == other.0 && self.1 < other.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementReport {
    pub accepted: Vec<Allocation>,
    pub rejected: Vec<Rejection>,
    pub active_components: usize,
    pub objective_value: Objective,
    /// Set when the instance was too large for the exact solver and a greedy
    /// placement was used instead.
    pub heuristic: bool,
}

impl PlacementReport {
    pub fn accepted_names(&self) -> Vec<&str> {
        self.accepted.iter().map(|a| a.app.as_str()).collect()
    }

    pub fn rejected_names(&self) -> Vec<&str> {
        self.rejected.iter().map(|r| r.app.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<PlacementReport> {
        Ok(serde_json::from_str(text)?)
    }

    /// Flat `app,status,reason,entity_path` table, accepted rows first.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["app", "status", "reason", "entity_path"])
            .expect("in-memory write");
        for a in &self.accepted {
            w.write_record([a.app.as_str(), "accepted", "", a.entity_path.as_str()])
                .expect("in-memory write");
        }
        for r in &self.rejected {
            w.write_record([r.app.as_str(), "rejected", r.reason.as_str(), ""])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Free units per component, in hierarchy order (pods, racks, nodes, components).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residual(pub Vec<u32>);

impl Residual {
    pub fn full(dc: &DataCenter) -> Residual {
        Residual(
            dc.nodes()
                .flat_map(|(_, n)| n.components.iter().map(|c| c.capacity))
                .collect(),
        )
    }

    /// Removes the units taken by `alloc`.
    pub fn consume(&mut self, dc: &DataCenter, alloc: &Allocation) -> Result<()> {
        for a in &alloc.assignments {
            let slot = slot_of(dc, &a.component).ok_or_else(|| Error::Invariant {
                entity: a.component.to_string(),
                message: "unknown component".into(),
            })?;
            let free = &mut self.0[slot];
            if a.units > *free {
                return Err(Error::Invariant {
                    entity: a.component.to_string(),
                    message: format!("over-allocated: {} taken, {} free", a.units, free),
                });
            }
            *free -= a.units;
        }
        Ok(())
    }
}

fn slot_of(dc: &DataCenter, r: &ComponentRef) -> Option<usize> {
    let mut slot = 0;
    for pod in &dc.pods {
        for rack in &pod.racks {
            for node in &rack.nodes {
                if pod.id == r.pod && rack.id == r.rack && node.id == r.node {
                    return (r.index < node.components.len()).then_some(slot + r.index);
                }
                slot += node.components.len();
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Allocation),
    Infeasible(Reason),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

#[derive(Debug, Clone)]
struct Slot {
    pod: usize,
    rack: usize,
    node: usize,
    index: usize,
    kind: ResourceKind,
    capacity: u32,
    scope: Scope,
}

/// Flattened view of a validated data center.
struct Inventory<'a> {
    dc: &'a DataCenter,
    slots: Vec<Slot>,
}

impl<'a> Inventory<'a> {
    fn new(dc: &'a DataCenter, cfg: &DisaggregationConfig) -> Result<Self> {
        let violations = validate_dc(dc, cfg);
        if !violations.is_empty() {
            let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Error::Config(list.join("; ")));
        }
        let mut slots = Vec::new();
        for (p, pod) in dc.pods.iter().enumerate() {
            for (r, rack) in pod.racks.iter().enumerate() {
                for (n, node) in rack.nodes.iter().enumerate() {
                    let scope = utilization_scope(node, cfg)?;
                    for (i, c) in node.components.iter().enumerate() {
                        slots.push(Slot {
                            pod: p,
                            rack: r,
                            node: n,
                            index: i,
                            kind: c.kind,
                            capacity: c.capacity,
                            scope,
                        });
                    }
                }
            }
        }
        Ok(Inventory { dc, slots })
    }

    fn len(&self) -> usize {
        self.slots.len()
    }

    fn component_ref(&self, slot: usize) -> ComponentRef {
        let s = &self.slots[slot];
        let pod = &self.dc.pods[s.pod];
        let rack = &pod.racks[s.rack];
        ComponentRef {
            pod: pod.id.clone(),
            rack: rack.id.clone(),
            node: rack.nodes[s.node].id.clone(),
            index: s.index,
        }
    }

    /// Level of the smallest entity containing every slot in `set`.
    fn span(&self, set: &[usize]) -> Scope {
        let Some((&first, rest)) = set.split_first() else {
            return Scope::Node;
        };
        let f = &self.slots[first];
        let mut span = Scope::Node;
        for &i in rest {
            let s = &self.slots[i];
            let level = if s.pod != f.pod {
                Scope::Dc
            } else if s.rack != f.rack {
                Scope::Pod
            } else if s.node != f.node {
                Scope::Rack
            } else {
                Scope::Node
            };
            span = span.max(level);
        }
        span
    }

    fn entity_path(&self, set: &[usize]) -> String {
        let span = self.span(set);
        let Some(&first) = set.first() else {
            return String::new();
        };
        let r = self.component_ref(first);
        match span {
            Scope::Node => format!("{}/{}/{}", r.pod, r.rack, r.node),
            Scope::Rack => format!("{}/{}", r.pod, r.rack),
            Scope::Pod => r.pod,
            Scope::Dc => "dc".to_owned(),
        }
    }

    /// Direct form of the selection rule, shared by the oracle and tests.
    fn selection_valid(&self, set: &[usize], latency_scope: Scope) -> bool {
        let span = self.span(set);
        span <= latency_scope && set.iter().all(|&i| self.slots[i].scope >= span)
    }

    /// Maximal component sets an application may draw from. Every valid
    /// selection for `app` lies inside one of them and every subset of one is
    /// valid. Sets are restricted to the kinds `app` demands and to those whose
    /// `free` units cover the demand.
    fn domains(&self, app: &AppTemplate, free: &[u32]) -> Vec<Vec<usize>> {
        let wanted = |s: &Slot| app.demand(s.kind) > 0;
        let mut candidates: Vec<Vec<usize>> = Vec::new();
        for level in Scope::ALL.into_iter().filter(|&l| l <= app.latency_scope) {
            let key = |s: &Slot| match level {
                Scope::Node => (s.pod, s.rack, s.node),
                Scope::Rack => (s.pod, s.rack, 0),
                Scope::Pod => (s.pod, 0, 0),
                Scope::Dc => (0, 0, 0),
            };
            let mut groups: Vec<((usize, usize, usize), Vec<usize>)> = Vec::new();
            for (i, s) in self.slots.iter().enumerate() {
                if s.scope < level || !wanted(s) || free[i] == 0 {
                    continue;
                }
                let k = key(s);
                match groups.last_mut() {
                    Some((gk, members)) if *gk == k => members.push(i),
                    _ => groups.push((k, vec![i])),
                }
            }
            candidates.extend(groups.into_iter().map(|(_, m)| m));
        }

        let covers = |set: &Vec<usize>| {
            ResourceKind::ALL.iter().all(|&kind| {
                let have: u64 = set
                    .iter()
                    .filter(|&&i| self.slots[i].kind == kind)
                    .map(|&i| free[i] as u64)
                    .sum();
                have >= app.demand(kind) as u64
            })
        };
        candidates.retain(covers);

        let is_subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_ok());
        let mut maximal: Vec<Vec<usize>> = Vec::new();
        for (i, c) in candidates.iter().enumerate() {
            let dominated = candidates
                .iter()
                .enumerate()
                .any(|(j, o)| j != i && is_subset(c, o) && (c.len() < o.len() || j < i));
            if !dominated {
                maximal.push(c.clone());
            }
        }
        maximal
    }

    fn total_free(&self, free: &[u32], kind: ResourceKind) -> u64 {
        self.slots
            .iter()
            .zip(free)
            .filter(|(s, _)| s.kind == kind)
            .map(|(_, &f)| f as u64)
            .sum()
    }

    fn classify(&self, app: &AppTemplate, free: &[u32]) -> Reason {
        let short = ResourceKind::ALL
            .iter()
            .any(|&k| self.total_free(free, k) < app.demand(k) as u64);
        if short {
            Reason::Capacity
        } else {
            Reason::Scope
        }
    }

    /// Cheapest allocation for `app` against `free`, counting only components
    /// not already in `active` as new. Picks the domain with the fewest new
    /// activations; within a kind, active components first, then larger free
    /// capacity.
    fn witness(
        &self,
        app: &AppTemplate,
        free: &[u32],
        active: &[bool],
    ) -> Option<Vec<(usize, u32)>> {
        let mut best: Option<(usize, Vec<(usize, u32)>)> = None;
        for domain in self.domains(app, free) {
            let mut taken = Vec::new();
            let mut fresh = 0;
            for kind in ResourceKind::ALL {
                let mut need = app.demand(kind);
                if need == 0 {
                    continue;
                }
                let mut pool: Vec<usize> = domain
                    .iter()
                    .copied()
                    .filter(|&i| self.slots[i].kind == kind && free[i] > 0)
                    .collect();
                pool.sort_by_key(|&i| (!active[i], std::cmp::Reverse(free[i]), i));
                for i in pool {
                    if need == 0 {
                        break;
                    }
                    let units = need.min(free[i]);
                    need -= units;
                    if !active[i] {
                        fresh += 1;
                    }
                    taken.push((i, units));
                }
                debug_assert_eq!(need, 0, "domain covers demand");
            }
            if best.as_ref().is_none_or(|(f, _)| fresh < *f) {
                taken.sort_unstable();
                best = Some((fresh, taken));
            }
        }
        best.map(|(_, t)| t)
    }

    fn allocation(&self, app: &AppTemplate, taken: &[(usize, u32)]) -> Allocation {
        let slots: Vec<usize> = taken.iter().map(|&(i, _)| i).collect();
        Allocation {
            app: app.name.clone(),
            entity_path: self.entity_path(&slots),
            assignments: taken
                .iter()
                .map(|&(i, units)| Assignment {
                    component: self.component_ref(i),
                    kind: self.slots[i].kind,
                    units,
                })
                .collect(),
        }
    }

    fn finish(
        &self,
        ws: &WorkloadSet,
        placed: &HashMap<&str, Vec<(usize, u32)>>,
        heuristic: bool,
    ) -> PlacementReport {
        let mut free: Vec<u32> = self.slots.iter().map(|s| s.capacity).collect();
        let mut active = vec![false; self.len()];
        let mut accepted = Vec::new();
        for app in ws.apps() {
            if let Some(taken) = placed.get(app.name.as_str()) {
                for &(i, units) in taken {
                    free[i] -= units;
                    active[i] = true;
                }
                accepted.push(self.allocation(app, taken));
            }
        }
        let rejected = ws
            .apps()
            .iter()
            .filter(|a| !placed.contains_key(a.name.as_str()))
            .map(|a| Rejection {
                app: a.name.clone(),
                reason: self.classify(a, &free),
            })
            .collect();
        let active_components = active.iter().filter(|&&a| a).count();
        PlacementReport {
            objective_value: Objective(accepted.len(), active_components),
            accepted,
            rejected,
            active_components,
            heuristic,
        }
    }
}

/// Tests whether `app` can be composed from the `residual` units and returns a
/// witness allocation, or which constraint prevents it.
pub fn check_feasible(
    app: &AppTemplate,
    dc: &DataCenter,
    cfg: &DisaggregationConfig,
    residual: &Residual,
) -> Result<Feasibility> {
    let inv = Inventory::new(dc, cfg)?;
    if residual.0.len() != inv.len() {
        return Err(Error::Dimension {
            expected: inv.len(),
            actual: residual.0.len(),
        });
    }
    let active = vec![false; inv.len()];
    Ok(match inv.witness(app, &residual.0, &active) {
        Some(taken) => Feasibility::Feasible(inv.allocation(app, &taken)),
        None => Feasibility::Infeasible(inv.classify(app, &residual.0)),
    })
}

/// Places a workload set, maximising accepted applications and then
/// minimising active components.
pub fn place_all(
    ws: &WorkloadSet,
    dc: &DataCenter,
    cfg: &DisaggregationConfig,
) -> Result<PlacementReport> {
    let inv = Inventory::new(dc, cfg)?;
    if inv.len() > EXACT_MAX_COMPONENTS || ws.len() > EXACT_MAX_APPS {
        return Ok(greedy(&inv, ws));
    }
    let placed = Exact::new(&inv, ws).solve();
    Ok(inv.finish(ws, &placed, false))
}

/// First-fit-decreasing fallback for instances beyond the exact bound.
fn greedy(inv: &Inventory<'_>, ws: &WorkloadSet) -> PlacementReport {
    let mut order: Vec<&AppTemplate> = ws.apps().iter().collect();
    order.sort_by(|a, b| {
        b.total_units()
            .cmp(&a.total_units())
            .then(a.name.cmp(&b.name))
    });
    let mut free: Vec<u32> = inv.slots.iter().map(|s| s.capacity).collect();
    let mut active = vec![false; inv.len()];
    let mut placed = HashMap::new();
    for app in order {
        if let Some(taken) = inv.witness(app, &free, &active) {
            for &(i, units) in &taken {
                free[i] -= units;
                active[i] = true;
            }
            placed.insert(app.name.as_str(), taken);
        }
    }
    inv.finish(ws, &placed, true)
}

/// Per-kind transportation instance: each item is (demand, allowed components).
type KindItems = Vec<(u32, u32)>;

struct Exact<'a> {
    apps: Vec<&'a AppTemplate>,
    /// Domains per app as bitmasks over slots.
    domains: Vec<Vec<u32>>,
    caps: Vec<u32>,
    kind_mask: [u32; 3],
    /// Capacities per kind, largest first, for the activation lower bound.
    sorted_caps: [Vec<u32>; 3],
    choice: Vec<Option<u32>>,
    best: Option<(Objective, Vec<Option<u32>>, [u32; 3])>,
    support_cache: HashMap<(usize, KindItems), u32>,
}

impl<'a> Exact<'a> {
    fn new(inv: &Inventory<'_>, ws: &'a WorkloadSet) -> Self {
        let caps: Vec<u32> = inv.slots.iter().map(|s| s.capacity).collect();
        let mut apps: Vec<&AppTemplate> = ws.apps().iter().collect();
        apps.sort_by(|a, b| a.name.cmp(&b.name));
        let to_mask = |set: &Vec<usize>| set.iter().fold(0u32, |m, &i| m | 1 << i);
        let domains = apps
            .iter()
            .map(|a| inv.domains(a, &caps).iter().map(to_mask).collect())
            .collect();
        let mut kind_mask = [0u32; 3];
        let mut sorted_caps: [Vec<u32>; 3] = Default::default();
        for (i, s) in inv.slots.iter().enumerate() {
            kind_mask[s.kind.index()] |= 1 << i;
            sorted_caps[s.kind.index()].push(s.capacity);
        }
        for v in &mut sorted_caps {
            v.sort_unstable_by(|a, b| b.cmp(a));
        }
        let n = apps.len();
        Exact {
            apps,
            domains,
            caps,
            kind_mask,
            sorted_caps,
            choice: vec![None; n],
            best: None,
            support_cache: HashMap::new(),
        }
    }

    fn items(&self, kind: ResourceKind) -> KindItems {
        self.apps
            .iter()
            .zip(&self.choice)
            .filter_map(|(app, c)| {
                let d = app.demand(kind);
                c.filter(|_| d > 0)
                    .map(|m| (d, m & self.kind_mask[kind.index()]))
            })
            .collect()
    }

    fn activation_lower_bound(&self) -> usize {
        ResourceKind::ALL
            .iter()
            .map(|&kind| {
                let demand: u64 = self.items(kind).iter().map(|&(d, _)| d as u64).sum();
                let mut covered = 0u64;
                let mut count = 0;
                for &c in &self.sorted_caps[kind.index()] {
                    if covered >= demand {
                        break;
                    }
                    covered += c as u64;
                    count += 1;
                }
                count
            })
            .sum()
    }

    fn solve(mut self) -> HashMap<&'a str, Vec<(usize, u32)>> {
        self.search(0, 0);
        let mut placed: HashMap<&str, Vec<(usize, u32)>> = HashMap::new();
        let Some((_, choice, support)) = self.best.take() else {
            return placed;
        };
        self.choice = choice;
        for kind in ResourceKind::ALL {
            let items = self.items(kind);
            let flows = transport(&self.caps, &items, support[kind.index()])
                .expect("optimal support is feasible");
            let mut item = 0;
            for (app, c) in self.apps.iter().zip(&self.choice) {
                if c.is_none() || app.demand(kind) == 0 {
                    continue;
                }
                let entry = placed.entry(app.name.as_str()).or_default();
                entry.extend(flows[item].iter().copied());
                item += 1;
            }
        }
        for (app, c) in self.apps.iter().zip(&self.choice) {
            if c.is_some() {
                placed.entry(app.name.as_str()).or_default().sort_unstable();
            }
        }
        placed
    }

    fn search(&mut self, i: usize, accepted: usize) {
        let upper = accepted + (self.apps.len() - i);
        if let Some((best, _, _)) = &self.best {
            if upper < best.0 || (upper == best.0 && self.activation_lower_bound() >= best.1) {
                return;
            }
        }
        if i == self.apps.len() {
            let mut support = [0u32; 3];
            for kind in ResourceKind::ALL {
                let items = self.items(kind);
                support[kind.index()] = self.min_support(kind, items);
            }
            let active = support.iter().map(|m| m.count_ones() as usize).sum();
            let objective = Objective(accepted, active);
            if self
                .best
                .as_ref()
                .is_none_or(|(b, _, _)| objective.better_than(b))
            {
                self.best = Some((objective, self.choice.clone(), support));
            }
            return;
        }
        let app = self.apps[i];
        for d in 0..self.domains[i].len() {
            self.choice[i] = Some(self.domains[i][d]);
            let feasible = ResourceKind::ALL.iter().all(|&kind| {
                app.demand(kind) == 0
                    || transport(&self.caps, &self.items(kind), self.kind_mask[kind.index()])
                        .is_some()
            });
            if feasible {
                self.search(i + 1, accepted + 1);
            }
        }
        self.choice[i] = None;
        self.search(i + 1, accepted);
    }

    /// Smallest set of components (lowest indices first among equals) that
    /// can serve every item of one kind.
    fn min_support(&mut self, kind: ResourceKind, items: KindItems) -> u32 {
        if items.is_empty() {
            return 0;
        }
        let key = (kind.index(), items);
        if let Some(&m) = self.support_cache.get(&key) {
            return m;
        }
        let items = &key.1;
        let demand: u64 = items.iter().map(|&(d, _)| d as u64).sum();
        let union = items.iter().fold(0u32, |m, &(_, a)| m | a);
        let pool: Vec<usize> = (0..32).filter(|b| union >> b & 1 == 1).collect();
        let mut found = None;
        'sizes: for size in 1..=pool.len() {
            let mut combo: Vec<usize> = (0..size).collect();
            loop {
                let mask = combo.iter().fold(0u32, |m, &p| m | 1 << pool[p]);
                let cap: u64 = combo.iter().map(|&p| self.caps[pool[p]] as u64).sum();
                if cap >= demand && transport(&self.caps, items, mask).is_some() {
                    found = Some(mask);
                    break 'sizes;
                }
                if !next_combination(&mut combo, pool.len()) {
                    break;
                }
            }
        }
        let mask = found.expect("feasible item set has a support");
        self.support_cache.insert(key, mask);
        mask
    }
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Splits each item's demand over its allowed components restricted to
/// `allowed`. Returns per-item `(slot, units)` lists when every demand is met.
fn transport(caps: &[u32], items: &[(u32, u32)], allowed: u32) -> Option<Vec<Vec<(usize, u32)>>> {
    let slots: Vec<usize> = (0..caps.len()).filter(|&i| allowed >> i & 1 == 1).collect();
    let source = 0;
    let sink = 1 + items.len() + slots.len();
    let mut f = MaxFlow::new(sink + 1);
    let mut arcs = Vec::new();
    let mut demand = 0i64;
    for (a, &(d, mask)) in items.iter().enumerate() {
        f.add_edge(source, 1 + a, d as i64);
        demand += d as i64;
        for (k, &s) in slots.iter().enumerate() {
            if mask >> s & 1 == 1 {
                arcs.push((a, s, f.add_edge(1 + a, 1 + items.len() + k, d as i64)));
            }
        }
    }
    for (k, &s) in slots.iter().enumerate() {
        f.add_edge(1 + items.len() + k, sink, caps[s] as i64);
    }
    if f.run(source, sink) != demand {
        return None;
    }
    let mut out = vec![Vec::new(); items.len()];
    for (a, s, e) in arcs {
        let units = f.flow(e);
        if units > 0 {
            out[a].push((s, units as u32));
        }
    }
    Some(out)
}

/// Exhaustive reference placement. Enumerates, application by application,
/// every way of splitting each demanded kind over the free components, keeps
/// the splits whose support is a valid selection, and memoises on the
/// remaining capacity and the set of active components.
pub fn oracle_place(
    ws: &WorkloadSet,
    dc: &DataCenter,
    cfg: &DisaggregationConfig,
) -> Result<PlacementReport> {
    let inv = Inventory::new(dc, cfg)?;
    if inv.len() > ORACLE_MAX_COMPONENTS || ws.len() > ORACLE_MAX_APPS {
        return Err(Error::BoundExceeded {
            solver: "placement oracle",
            detail: format!(
                "{} components / {} apps (limit {ORACLE_MAX_COMPONENTS} / {ORACLE_MAX_APPS})",
                inv.len(),
                ws.len()
            ),
        });
    }
    let mut oracle = Oracle {
        inv: &inv,
        apps: ws.apps(),
        memo: HashMap::new(),
    };
    let free: Vec<u32> = inv.slots.iter().map(|s| s.capacity).collect();
    oracle.best(0, &free, 0);

    // Walk the memo to recover one optimal assignment.
    let mut placed = HashMap::new();
    let (mut free, mut used) = (free, 0u32);
    for i in 0..ws.len() {
        let target = oracle.best(i, &free, used);
        let skip = oracle.best(i + 1, &free, used);
        if skip == target {
            continue;
        }
        let app = &ws.apps()[i];
        let mut chosen = None;
        for split in oracle.splits(app, &free) {
            let (next_free, next_used) = apply(&free, used, &split);
            let mut o = oracle.best(i + 1, &next_free, next_used);
            o.0 += 1;
            if o == target {
                chosen = Some((split, next_free, next_used));
                break;
            }
        }
        let (split, next_free, next_used) = chosen.expect("memo value is achievable");
        placed.insert(app.name.as_str(), split);
        free = next_free;
        used = next_used;
    }
    Ok(inv.finish(ws, &placed, false))
}

fn apply(free: &[u32], used: u32, split: &[(usize, u32)]) -> (Vec<u32>, u32) {
    let mut f = free.to_vec();
    let mut u = used;
    for &(i, units) in split {
        f[i] -= units;
        u |= 1 << i;
    }
    (f, u)
}

struct Oracle<'a, 'b> {
    inv: &'a Inventory<'b>,
    apps: &'a [AppTemplate],
    memo: HashMap<(usize, Vec<u32>, u32), Objective>,
}

impl Oracle<'_, '_> {
    /// Best objective reachable from app `i` onward, counting applications
    /// accepted from `i` and all components active at the end.
    fn best(&mut self, i: usize, free: &[u32], used: u32) -> Objective {
        if i == self.apps.len() {
            return Objective(0, used.count_ones() as usize);
        }
        let key = (i, free.to_vec(), used);
        if let Some(&o) = self.memo.get(&key) {
            return o;
        }
        let mut best = self.best(i + 1, free, used);
        let app = &self.apps[i];
        for split in self.splits(app, free) {
            let (next_free, next_used) = apply(free, used, &split);
            let mut o = self.best(i + 1, &next_free, next_used);
            o.0 += 1;
            if o.better_than(&best) {
                best = o;
            }
        }
        self.memo.insert(key, best);
        best
    }

    /// Every unit split of `app` over `free` whose support is a valid selection.
    fn splits(&self, app: &AppTemplate, free: &[u32]) -> Vec<Vec<(usize, u32)>> {
        let mut partial: Vec<Vec<(usize, u32)>> = vec![Vec::new()];
        for kind in ResourceKind::ALL {
            let demand = app.demand(kind);
            if demand == 0 {
                continue;
            }
            let slots: Vec<usize> = (0..free.len())
                .filter(|&i| self.inv.slots[i].kind == kind)
                .collect();
            let mut ways = Vec::new();
            compositions(&slots, free, demand, &mut Vec::new(), &mut ways);
            // A subset of a valid support is valid, so invalid prefixes can go.
            partial = partial
                .iter()
                .flat_map(|p| {
                    ways.iter().map(move |w| {
                        let mut joined = p.clone();
                        joined.extend(w.iter().copied());
                        joined
                    })
                })
                .filter(|split| self.valid(split, app))
                .collect();
        }
        partial
    }

    fn valid(&self, split: &[(usize, u32)], app: &AppTemplate) -> bool {
        let mut support: Vec<usize> = split.iter().map(|&(i, _)| i).collect();
        support.sort_unstable();
        self.inv.selection_valid(&support, app.latency_scope)
    }
}

fn compositions(
    slots: &[usize],
    free: &[u32],
    remaining: u32,
    prefix: &mut Vec<(usize, u32)>,
    out: &mut Vec<Vec<(usize, u32)>>,
) {
    if remaining == 0 {
        out.push(prefix.clone());
        return;
    }
    let Some((&slot, rest)) = slots.split_first() else {
        return;
    };
    for units in (0..=remaining.min(free[slot])).rev() {
        if units > 0 {
            prefix.push((slot, units));
        }
        compositions(rest, free, remaining - units, prefix, out);
        if units > 0 {
            prefix.pop();
        }
    }
}
