//! Transceiver CAPEX of the two rack fabrics.
//!
//! Only transceivers are priced. The generic mesh needs one transceiver of
//! capacity `C` at each end of every one of its `N(N-1)/2` links; the targeted
//! design needs `2T` transceivers of rate `R` per node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub n_nodes: u64,
    pub generic_cap_gbps: f64,
    pub targeted_t: u64,
    pub targeted_rate_gbps: f64,
    pub price_generic_per_gbps: f64,
    pub price_targeted_per_gbps: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            n_nodes: 2,
            generic_cap_gbps: 800.0,
            targeted_t: 4,
            targeted_rate_gbps: 100.0,
            price_generic_per_gbps: 1.0,
            price_targeted_per_gbps: 1.0,
        }
    }
}

impl CostParams {
    pub fn new(n_nodes: u64, price_targeted_per_gbps: f64) -> Self {
        CostParams {
            n_nodes,
            price_targeted_per_gbps,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: String| {
            Err(Error::Invariant {
                entity: what.to_owned(),
                message: format!("must be positive, got {v}"),
            })
        };
        if self.n_nodes < 2 {
            return Err(Error::Invariant {
                entity: "n_nodes".into(),
                message: format!("must be at least 2, got {}", self.n_nodes),
            });
        }
        if self.targeted_t == 0 {
            return bad("targeted_t", self.targeted_t.to_string());
        }
        for (what, v) in [
            ("generic_cap_gbps", self.generic_cap_gbps),
            ("targeted_rate_gbps", self.targeted_rate_gbps),
            ("price_generic_per_gbps", self.price_generic_per_gbps),
            ("price_targeted_per_gbps", self.price_targeted_per_gbps),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(what, v.to_string());
            }
        }
        Ok(())
    }

    fn targeted_node_gbps(&self) -> f64 {
        2.0 * self.targeted_t as f64 * self.targeted_rate_gbps
    }
}

/// `N (N-1) C p_generic`.
pub fn capex_generic(p: &CostParams) -> f64 {
    let endpoints = (p.n_nodes * (p.n_nodes - 1)) as f64;
    endpoints * p.generic_cap_gbps * p.price_generic_per_gbps
}

/// `N 2 T R p_targeted`.
pub fn capex_targeted(p: &CostParams) -> f64 {
    p.n_nodes as f64 * p.targeted_node_gbps() * p.price_targeted_per_gbps
}

/// Generic CAPEX at 1 $/Gbps over targeted CAPEX at the configured targeted
/// price. Equals `(N-1)/Y` when `C = 2TR`.
pub fn cost_ratio(p: &CostParams) -> f64 {
    let generic = CostParams {
        price_generic_per_gbps: 1.0,
        ..*p
    };
    capex_generic(&generic) / capex_targeted(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u64,
    pub y: f64,
    pub capex_generic: f64,
    pub capex_targeted: f64,
    pub ratio: f64,
}

/// Evaluates every `(N, Y)` combination in ascending order. Other parameters
/// come from `base`; duplicates in the inputs are dropped.
pub fn sweep(ns: &[u64], ys: &[f64], base: &CostParams) -> Vec<SweepRow> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut ys = ys.to_vec();
    ys.sort_by(f64::total_cmp);
    ys.dedup();

    let mut rows = Vec::with_capacity(ns.len() * ys.len());
    for &n in &ns {
        for &y in &ys {
            let p = CostParams {
                n_nodes: n,
                price_targeted_per_gbps: y,
                ..*base
            };
            rows.push(SweepRow {
                n,
                y,
                capex_generic: capex_generic(&p),
                capex_targeted: capex_targeted(&p),
                ratio: cost_ratio(&p),
            });
        }
    }
    rows
}

pub const SWEEP_CSV_HEADER: [&str; 5] = ["n", "y", "capex_generic", "capex_targeted", "ratio"];

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.y.to_string(),
            r.capex_generic.to_string(),
            r.capex_targeted.to_string(),
            r.ratio.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn sweep_from_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        let row: SweepRow = record
            .map_err(|e| Error::parse(e.position().map(|p| p.line()), None, e.to_string()))?;
        rows.push(row);
    }
    Ok(rows)
}
