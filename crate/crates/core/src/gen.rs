//! Seeded random instances for property and equivalence testing.
//!
//! The seed only shapes the generated instances; solvers are deterministic.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fabric::DemandMatrix;
use crate::topology::{
    DataCenter, DisaggregationConfig, Mode, Node, Pod, Rack, ResourceComponent, ResourceKind, Scope,
};
use crate::workload::{AppTemplate, WorkloadSet};

pub const SEED_ENV: &str = "COMPOSABLE_FABRIC_SEED";
pub const DEFAULT_SEED: u64 = 0x00C0_FFEE;

/// Seed from `COMPOSABLE_FABRIC_SEED`, or [`DEFAULT_SEED`] when unset or unparsable.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random placement instance.
#[derive(Debug, Clone, Copy)]
pub struct PlacementShape {
    pub nodes: (usize, usize),
    pub components_per_node: (usize, usize),
    pub capacity: (u32, u32),
    pub apps: (usize, usize),
    pub max_demand: u32,
    /// Only generate single-kind nodes, so every mode is applicable.
    pub homogeneous_only: bool,
}

impl Default for PlacementShape {
    fn default() -> Self {
        PlacementShape {
            nodes: (3, 4),
            components_per_node: (1, 3),
            capacity: (1, 4),
            apps: (2, 4),
            max_demand: 2,
            homogeneous_only: false,
        }
    }
}

/// Nodes scattered over up to two pods of up to two racks each.
pub fn random_dc<R: Rng>(rng: &mut R, shape: &PlacementShape) -> DataCenter {
    let pods = rng.gen_range(1..=2);
    let racks_per_pod = rng.gen_range(1..=2);
    let mut dc = DataCenter {
        pods: (0..pods)
            .map(|p| Pod {
                id: format!("pod-{p}"),
                racks: (0..racks_per_pod)
                    .map(|r| Rack {
                        id: format!("rack-{r}"),
                        nodes: Vec::new(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let n_nodes = rng.gen_range(shape.nodes.0..=shape.nodes.1);
    for i in 0..n_nodes {
        let count = rng.gen_range(shape.components_per_node.0..=shape.components_per_node.1);
        let base = *ResourceKind::ALL.choose(rng).expect("non-empty");
        let components = (0..count)
            .map(|_| {
                let kind = if shape.homogeneous_only {
                    base
                } else {
                    *ResourceKind::ALL.choose(rng).expect("non-empty")
                };
                ResourceComponent::new(kind, rng.gen_range(shape.capacity.0..=shape.capacity.1))
            })
            .collect();
        let p = rng.gen_range(0..pods);
        let r = rng.gen_range(0..racks_per_pod);
        dc.pods[p].racks[r]
            .nodes
            .push(Node::new(format!("node-{i}"), components));
    }
    dc
}

pub fn random_workloads<R: Rng>(rng: &mut R, shape: &PlacementShape) -> WorkloadSet {
    let n = rng.gen_range(shape.apps.0..=shape.apps.1);
    let apps = (0..n)
        .map(|i| loop {
            let cpu = rng.gen_range(0..=shape.max_demand);
            let ram = rng.gen_range(0..=shape.max_demand);
            let storage = rng.gen_range(0..=shape.max_demand);
            if cpu + ram + storage > 0 {
                let scope = *Scope::ALL.choose(rng).expect("non-empty");
                break AppTemplate::new(format!("app-{i}"), cpu, ram, storage, scope);
            }
        })
        .collect();
    WorkloadSet::new(apps).expect("generated names are unique")
}

/// A configuration valid for `dc`: physical mode only if every node is homogeneous.
pub fn random_config<R: Rng>(rng: &mut R, dc: &DataCenter) -> DisaggregationConfig {
    let all_homogeneous = dc.nodes().all(|(_, n)| n.is_homogeneous());
    let mut modes = vec![Mode::Traditional, Mode::Logical, Mode::Hybrid];
    if all_homogeneous {
        modes.push(Mode::Physical);
    }
    let mode = *modes.choose(rng).expect("non-empty");
    let scale = *[Scope::Rack, Scope::Pod, Scope::Dc]
        .choose(rng)
        .expect("non-empty");
    DisaggregationConfig::new(mode, scale)
}

/// Integer-valued demands in `[0, max_gbps]`; each pair is zero with probability `sparsity`.
pub fn random_demand<R: Rng>(rng: &mut R, n: usize, max_gbps: u32, sparsity: f64) -> DemandMatrix {
    let rows = (0..n)
        .map(|s| {
            (0..n)
                .map(|t| {
                    if s == t || rng.gen_bool(sparsity) {
                        0.0
                    } else {
                        rng.gen_range(0..=max_gbps) as f64
                    }
                })
                .collect()
        })
        .collect();
    DemandMatrix::from_rows(rows).expect("generated demands are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::validate_dc;

    #[test]
    fn generation_is_reproducible() {
        let shape = PlacementShape::default();
        let a = random_dc(&mut rng(7), &shape);
        let b = random_dc(&mut rng(7), &shape);
        assert_eq!(a, b);
        let d1 = random_demand(&mut rng(3), 5, 400, 0.3);
        let d2 = random_demand(&mut rng(3), 5, 400, 0.3);
        assert_eq!(d1, d2);
    }

    #[test]
    fn generated_configs_validate() {
        let mut r = rng(11);
        for homogeneous_only in [false, true] {
            let shape = PlacementShape {
                homogeneous_only,
                ..Default::default()
            };
            for _ in 0..50 {
                let dc = random_dc(&mut r, &shape);
                let cfg = random_config(&mut r, &dc);
                assert!(validate_dc(&dc, &cfg).is_empty());
                assert!(dc.component_count() <= 12);
            }
        }
    }
}
