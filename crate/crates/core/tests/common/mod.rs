#![allow(dead_code)]

use std::collections::BTreeMap;

use composable_fabric::{
    utilization_scope, DataCenter, DisaggregationConfig, PlacementReport, ResourceKind, Scope,
    WorkloadSet,
};

/// Independent check of every allocation invariant. Returns the first problem found.
pub fn check_report(
    report: &PlacementReport,
    ws: &WorkloadSet,
    dc: &DataCenter,
    cfg: &DisaggregationConfig,
) -> Result<(), String> {
    // (pod, rack, node, index) -> (kind, capacity, utilization scope)
    let mut comps = BTreeMap::new();
    for pod in &dc.pods {
        for rack in &pod.racks {
            for node in &rack.nodes {
                let scope = utilization_scope(node, cfg).map_err(|e| e.to_string())?;
                for (i, c) in node.components.iter().enumerate() {
                    comps.insert(
                        (pod.id.clone(), rack.id.clone(), node.id.clone(), i),
                        (c.kind, c.capacity, scope),
                    );
                }
            }
        }
    }

    let mut names: Vec<&str> = report.accepted_names();
    names.extend(report.rejected_names());
    names.sort_unstable();
    let mut expected: Vec<&str> = ws.apps().iter().map(|a| a.name.as_str()).collect();
    expected.sort_unstable();
    if names != expected {
        return Err(format!("accepted+rejected {names:?} != apps {expected:?}"));
    }

    let mut used: BTreeMap<_, u32> = BTreeMap::new();
    for alloc in &report.accepted {
        let app = ws.get(&alloc.app).ok_or("unknown app")?;
        let mut per_kind = [0u32; 3];
        for a in &alloc.assignments {
            let key = (
                a.component.pod.clone(),
                a.component.rack.clone(),
                a.component.node.clone(),
                a.component.index,
            );
            let &(kind, _, _) = comps.get(&key).ok_or("unknown component")?;
            if kind != a.kind || a.units == 0 {
                return Err(format!("{}: bad assignment {a:?}", alloc.app));
            }
            per_kind[ResourceKind::ALL.iter().position(|&k| k == kind).unwrap()] += a.units;
            *used.entry(key).or_default() += a.units;
        }
        for (i, &k) in ResourceKind::ALL.iter().enumerate() {
            if per_kind[i] != app.demand(k) {
                return Err(format!(
                    "{}: {k} units {} != demand {}",
                    alloc.app,
                    per_kind[i],
                    app.demand(k)
                ));
            }
        }
        // Span: smallest common ancestor level of the assigned components.
        let first = &alloc.assignments[0].component;
        let mut span = Scope::Node;
        for a in &alloc.assignments {
            let c = &a.component;
            let level = if c.pod != first.pod {
                Scope::Dc
            } else if c.rack != first.rack {
                Scope::Pod
            } else if c.node != first.node {
                Scope::Rack
            } else {
                Scope::Node
            };
            span = span.max(level);
        }
        if span > app.latency_scope {
            return Err(format!(
                "{}: span {span} exceeds latency scope {}",
                alloc.app, app.latency_scope
            ));
        }
        for a in &alloc.assignments {
            let c = &a.component;
            let &(_, _, util) = comps
                .get(&(c.pod.clone(), c.rack.clone(), c.node.clone(), c.index))
                .unwrap();
            if util < span {
                return Err(format!("{}: {c} has scope {util} < span {span}", alloc.app));
            }
        }
    }
    for (key, units) in &used {
        let (_, cap, _) = comps[key];
        if *units > cap {
            return Err(format!("{key:?} over-allocated {units} > {cap}"));
        }
    }
    if used.len() != report.active_components
        || report.objective_value.active_components() != report.active_components
        || report.objective_value.accepted() != report.accepted.len()
    {
        return Err("active component bookkeeping mismatch".into());
    }
    Ok(())
}
