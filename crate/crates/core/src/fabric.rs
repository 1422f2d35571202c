//! Rack optical backplane models and maximum carried throughput.
//!
//! In the targeted design every node has two interfaces of `t` single-wavelength
//! transceivers. Interface 1 transmits the wavelengths of `lambda_a` and receives
//! those of `lambda_b`; interface 2 does the opposite. Switches steer each
//! transmitted wavelength to one destination and a node's combiner accepts a
//! given wavelength from at most one source, so the pairs sharing a wavelength
//! form a matching without self-loops.
//!
//! Maximising carried traffic only depends on how many wavelengths each ordered
//! pair receives. A multiplicity matrix is realisable with `2t` wavelengths
//! exactly when every row and column sums to at most `2t` (bipartite edge
//! colouring), so the solver picks multiplicities with a maximum-gain flow and
//! then colours the resulting multigraph to obtain the per-wavelength schedule.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::MaxGainFlow;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WavelengthPlan {
    pub lambda_a: BTreeSet<u32>,
    pub lambda_b: BTreeSet<u32>,
}

impl WavelengthPlan {
    /// `lambda_a = {1..=t}`, `lambda_b = {t+1..=2t}`.
    pub fn standard(t: usize) -> Self {
        let t = t as u32;
        WavelengthPlan {
            lambda_a: (1..=t).collect(),
            lambda_b: (t + 1..=2 * t).collect(),
        }
    }

    /// All wavelengths in ascending id order.
    pub fn wavelengths(&self) -> Vec<u32> {
        self.lambda_a.union(&self.lambda_b).copied().collect()
    }

    /// Interface (1 or 2) that transmits `lambda`; the other one receives it.
    pub fn transmit_interface(&self, lambda: u32) -> Option<u8> {
        if self.lambda_a.contains(&lambda) {
            Some(1)
        } else if self.lambda_b.contains(&lambda) {
            Some(2)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetedFabric {
    pub n_nodes: usize,
    pub t_per_interface: usize,
    pub rate_gbps: f64,
    pub plan: WavelengthPlan,
}

impl TargetedFabric {
    pub const DEFAULT_T: usize = 4;
    pub const DEFAULT_RATE_GBPS: f64 = 100.0;

    pub fn new(n_nodes: usize, t_per_interface: usize, rate_gbps: f64) -> Self {
        TargetedFabric {
            n_nodes,
            t_per_interface,
            rate_gbps,
            plan: WavelengthPlan::standard(t_per_interface),
        }
    }

    pub fn with_defaults(n_nodes: usize) -> Self {
        Self::new(n_nodes, Self::DEFAULT_T, Self::DEFAULT_RATE_GBPS)
    }

    pub fn wavelength_count(&self) -> usize {
        2 * self.t_per_interface
    }

    /// Per-node egress (and ingress) capacity: `2 * t * rate`.
    pub fn node_capacity_gbps(&self) -> f64 {
        self.wavelength_count() as f64 * self.rate_gbps
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericFabric {
    pub n_nodes: usize,
    pub link_capacity_gbps: f64,
}

impl GenericFabric {
    pub const DEFAULT_LINK_CAPACITY_GBPS: f64 = 800.0;

    pub fn new(n_nodes: usize, link_capacity_gbps: f64) -> Self {
        GenericFabric {
            n_nodes,
            link_capacity_gbps,
        }
    }

    pub fn with_defaults(n_nodes: usize) -> Self {
        Self::new(n_nodes, Self::DEFAULT_LINK_CAPACITY_GBPS)
    }

    /// One transceiver per link endpoint of the full mesh.
    pub fn transceiver_count(&self) -> usize {
        self.n_nodes * self.n_nodes.saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum PlanViolation {
    Overlap {
        wavelengths: Vec<u32>,
    },
    SizeMismatch {
        set: String,
        expected: usize,
        actual: usize,
    },
    TooFewNodes {
        n_nodes: usize,
    },
    NoTransceivers,
    NonPositiveRate,
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanViolation::Overlap { wavelengths } => {
                write!(f, "lambda_a and lambda_b share wavelengths {wavelengths:?}")
            }
            PlanViolation::SizeMismatch {
                set,
                expected,
                actual,
            } => write!(f, "{set} has {actual} wavelengths, expected {expected}"),
            PlanViolation::TooFewNodes { n_nodes } => {
                write!(f, "a rack fabric needs at least 2 nodes, got {n_nodes}")
            }
            PlanViolation::NoTransceivers => f.write_str("t_per_interface must be at least 1"),
            PlanViolation::NonPositiveRate => f.write_str("rate_gbps must be positive"),
        }
    }
}

/// Checks the wavelength plan and fabric parameters. The plan is shared by
/// every node, so per-node consistency holds by construction.
pub fn validate_plan(f: &TargetedFabric) -> Vec<PlanViolation> {
    let mut v = Vec::new();
    if f.n_nodes < 2 {
        v.push(PlanViolation::TooFewNodes { n_nodes: f.n_nodes });
    }
    if f.t_per_interface == 0 {
        v.push(PlanViolation::NoTransceivers);
    }
    if !(f.rate_gbps > 0.0 && f.rate_gbps.is_finite()) {
        v.push(PlanViolation::NonPositiveRate);
    }
    let shared: Vec<u32> = f
        .plan
        .lambda_a
        .intersection(&f.plan.lambda_b)
        .copied()
        .collect();
    if !shared.is_empty() {
        v.push(PlanViolation::Overlap {
            wavelengths: shared,
        });
    }
    for (name, set) in [
        ("lambda_a", &f.plan.lambda_a),
        ("lambda_b", &f.plan.lambda_b),
    ] {
        if set.len() != f.t_per_interface {
            v.push(PlanViolation::SizeMismatch {
                set: name.to_owned(),
                expected: f.t_per_interface,
                actual: set.len(),
            });
        }
    }
    v
}

/// Ordered-pair traffic demands in Gbps. Entries are non-negative and may be
/// infinite (saturating demand); the diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandMatrix {
    ids: Vec<String>,
    d: Vec<Vec<f64>>,
}

impl DemandMatrix {
    pub fn new(ids: Vec<String>, d: Vec<Vec<f64>>) -> Result<DemandMatrix> {
        let n = ids.len();
        if d.len() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: d.len(),
            });
        }
        for (s, row) in d.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (t, &v) in row.iter().enumerate() {
                if v.is_nan() || v < 0.0 {
                    return Err(Error::Invariant {
                        entity: format!("d[{}][{}]", ids[s], ids[t]),
                        message: format!("demand must be non-negative, got {v}"),
                    });
                }
                if s == t && v != 0.0 {
                    return Err(Error::Invariant {
                        entity: format!("d[{}][{}]", ids[s], ids[t]),
                        message: "diagonal demand must be zero".into(),
                    });
                }
            }
        }
        Ok(DemandMatrix { ids, d })
    }

    fn default_ids(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    pub fn from_rows(d: Vec<Vec<f64>>) -> Result<DemandMatrix> {
        Self::new(Self::default_ids(d.len()), d)
    }

    /// Every off-diagonal pair demands `value`.
    pub fn uniform(n: usize, value: f64) -> DemandMatrix {
        let d = (0..n)
            .map(|s| (0..n).map(|t| if s == t { 0.0 } else { value }).collect())
            .collect();
        Self::from_rows(d).expect("uniform matrix is well formed")
    }

    pub fn zeros(n: usize) -> DemandMatrix {
        Self::uniform(n, 0.0)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.d[s][t]
    }

    pub fn set(&mut self, s: usize, t: usize, value: f64) -> Result<()> {
        if s == t && value != 0.0 || value.is_nan() || value < 0.0 {
            return Err(Error::Invariant {
                entity: format!("d[{s}][{t}]"),
                message: format!("invalid demand {value}"),
            });
        }
        self.d[s][t] = value;
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.d.iter().flatten().sum()
    }

    /// Parses a square CSV matrix whose header row holds the node ids.
    pub fn from_csv(text: &str) -> Result<DemandMatrix> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let ids: Vec<String> = reader
            .headers()
            .map_err(|e| Error::parse(Some(1), None, e.to_string()))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record
                .map_err(|e| Error::parse(e.position().map(|p| p.line()), None, e.to_string()))?;
            let line = record.position().map(|p| p.line());
            let row = record
                .iter()
                .enumerate()
                .map(|(i, cell)| {
                    cell.parse::<f64>().map_err(|e| {
                        let field = ids.get(i).map(String::as_str);
                        Error::parse(line, field, format!("`{cell}`: {e}"))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        DemandMatrix::new(ids, rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<DemandMatrix> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.ids).expect("in-memory write");
        for row in &self.d {
            w.write_record(row.iter().map(|v| v.to_string()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    Targeted,
    Generic,
}

/// One wavelength lit from `source` to `dest`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledLink {
    pub wavelength: u32,
    pub source: usize,
    pub dest: usize,
    pub gbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub design: Design,
    pub node_ids: Vec<String>,
    pub carried_gbps_total: f64,
    pub carried: Vec<Vec<f64>>,
    /// Maximum traffic a node can send (and, symmetrically, receive).
    pub egress_cap_gbps: f64,
    pub ingress_cap_gbps: f64,
    /// Per-wavelength assignments; empty for the generic design.
    pub schedule: Vec<ScheduledLink>,
    pub optimal: bool,
}

impl ThroughputReport {
    pub fn egress_gbps(&self, node: usize) -> f64 {
        self.carried[node].iter().sum()
    }

    pub fn ingress_gbps(&self, node: usize) -> f64 {
        self.carried.iter().map(|row| row[node]).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<ThroughputReport> {
        Ok(serde_json::from_str(text)?)
    }

    /// `wavelength,source,dest,gbps`, one row per lit wavelength.
    pub fn schedule_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["wavelength", "source", "dest", "gbps"])
            .expect("in-memory write");
        for l in &self.schedule {
            w.write_record([
                l.wavelength.to_string(),
                self.node_ids[l.source].clone(),
                self.node_ids[l.dest].clone(),
                l.gbps.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

fn check_dims(n_nodes: usize, d: &DemandMatrix) -> Result<()> {
    if d.n() != n_nodes {
        return Err(Error::Dimension {
            expected: n_nodes,
            actual: d.n(),
        });
    }
    Ok(())
}

fn check_plan(f: &TargetedFabric) -> Result<()> {
    let v = validate_plan(f);
    if v.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = v.iter().map(ToString::to_string).collect();
    Err(Error::Config(list.join("; ")))
}

/// Wavelengths worth assigning to a pair: beyond `ceil(d / rate)` they add nothing.
fn useful_wavelengths(demand: f64, rate: f64, w: usize) -> usize {
    if demand <= 0.0 {
        0
    } else if demand.is_infinite() {
        w
    } else {
        ((demand / rate).ceil() as usize).min(w)
    }
}

fn carried_for(demand: f64, rate: f64, wavelengths: usize) -> f64 {
    demand.min(rate * wavelengths as f64)
}

/// Maximum carried traffic of the targeted design, with a per-wavelength
/// schedule. Always exact.
pub fn max_throughput_targeted(f: &TargetedFabric, d: &DemandMatrix) -> Result<ThroughputReport> {
    check_plan(f)?;
    check_dims(f.n_nodes, d)?;
    let n = f.n_nodes;
    let w = f.wavelength_count();
    let rate = f.rate_gbps;

    // source 0, transmitters 1..=n, receivers n+1..=2n, sink 2n+1
    let sink = 2 * n + 1;
    let mut flow = MaxGainFlow::new(2 * n + 2);
    for s in 0..n {
        flow.add_edge(0, 1 + s, w as i64, 0.0);
        flow.add_edge(1 + n + s, sink, w as i64, 0.0);
    }
    let mut arcs = Vec::new();
    for s in 0..n {
        for t in 0..n {
            let demand = d.get(s, t);
            let useful = useful_wavelengths(demand, rate, w);
            if s == t || useful == 0 {
                continue;
            }
            // Full wavelengths first, then at most one partially filled one.
            let full = if demand.is_infinite() {
                useful
            } else {
                ((demand / rate).floor() as usize).min(useful)
            };
            if full > 0 {
                arcs.push((s, t, flow.add_edge(1 + s, 1 + n + t, full as i64, rate)));
            }
            if useful > full {
                let rest = demand - rate * full as f64;
                arcs.push((s, t, flow.add_edge(1 + s, 1 + n + t, 1, rest)));
            }
        }
    }
    flow.run(0, sink);

    let mut multiplicity = vec![vec![0usize; n]; n];
    for (s, t, e) in arcs {
        multiplicity[s][t] += flow.flow(e) as usize;
    }
    let colouring = edge_colour(&multiplicity, w);
    Ok(targeted_report(f, d, &multiplicity, &colouring, true))
}

/// `(source, dest, colour)` triples covering `multiplicity` with at most `colours`
/// colours, no colour repeated at any source or destination. Requires every
/// row and column sum to be at most `colours`.
fn edge_colour(multiplicity: &[Vec<usize>], colours: usize) -> Vec<(usize, usize, usize)> {
    let n = multiplicity.len();
    let mut at_src: Vec<Vec<Option<usize>>> = vec![vec![None; colours]; n];
    let mut at_dst: Vec<Vec<Option<usize>>> = vec![vec![None; colours]; n];

    for s in 0..n {
        for t in 0..n {
            for _ in 0..multiplicity[s][t] {
                let a = (0..colours)
                    .find(|&c| at_src[s][c].is_none())
                    .expect("source degree within colours");
                let b = (0..colours)
                    .find(|&c| at_dst[t][c].is_none())
                    .expect("dest degree within colours");
                if at_dst[t][a].is_some() {
                    // Swap colours a/b along the alternating path leaving t on a.
                    // In a bipartite graph this path cannot reach s.
                    let mut path = Vec::new();
                    let mut dst = t;
                    while let Some(src) = at_dst[dst][a] {
                        path.push((src, dst, a));
                        let Some(next) = at_src[src][b] else { break };
                        path.push((src, next, b));
                        dst = next;
                    }
                    for &(u, v, c) in &path {
                        at_src[u][c] = None;
                        at_dst[v][c] = None;
                    }
                    for &(u, v, c) in &path {
                        let swapped = if c == a { b } else { a };
                        at_src[u][swapped] = Some(v);
                        at_dst[v][swapped] = Some(u);
                    }
                }
                debug_assert!(at_src[s][a].is_none() && at_dst[t][a].is_none());
                at_src[s][a] = Some(t);
                at_dst[t][a] = Some(s);
            }
        }
    }

    let mut out = Vec::new();
    for (s, row) in at_src.iter().enumerate() {
        for (c, dst) in row.iter().enumerate() {
            if let Some(t) = dst {
                out.push((s, *t, c));
            }
        }
    }
    out
}

fn targeted_report(
    f: &TargetedFabric,
    d: &DemandMatrix,
    multiplicity: &[Vec<usize>],
    colouring: &[(usize, usize, usize)],
    optimal: bool,
) -> ThroughputReport {
    let n = f.n_nodes;
    let rate = f.rate_gbps;
    let lambdas = f.plan.wavelengths();
    let mut carried = vec![vec![0.0; n]; n];
    for s in 0..n {
        for t in 0..n {
            carried[s][t] = carried_for(d.get(s, t), rate, multiplicity[s][t]);
        }
    }

    let mut links: Vec<(u32, usize, usize)> = colouring
        .iter()
        .map(|&(s, t, c)| (lambdas[c], s, t))
        .collect();
    links.sort_unstable();
    // Fill each pair's wavelengths in id order; only the last may be partial.
    let mut remaining = carried.clone();
    let schedule = links
        .into_iter()
        .map(|(wavelength, source, dest)| {
            let gbps = remaining[source][dest].min(rate);
            remaining[source][dest] -= gbps;
            ScheduledLink {
                wavelength,
                source,
                dest,
                gbps,
            }
        })
        .collect();

    ThroughputReport {
        design: Design::Targeted,
        node_ids: d.ids().to_vec(),
        carried_gbps_total: carried.iter().flatten().sum(),
        carried,
        egress_cap_gbps: f.node_capacity_gbps(),
        ingress_cap_gbps: f.node_capacity_gbps(),
        schedule,
        optimal,
    }
}

/// Generic full mesh: every ordered pair has its own link, so each pair
/// carries `min(demand, link capacity)` independently.
pub fn max_throughput_generic(f: &GenericFabric, d: &DemandMatrix) -> Result<ThroughputReport> {
    check_dims(f.n_nodes, d)?;
    let n = f.n_nodes;
    let cap = f.link_capacity_gbps;
    let carried: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            (0..n)
                .map(|t| if s == t { 0.0 } else { d.get(s, t).min(cap) })
                .collect()
        })
        .collect();
    let node_cap = cap * n.saturating_sub(1) as f64;
    Ok(ThroughputReport {
        design: Design::Generic,
        node_ids: d.ids().to_vec(),
        carried_gbps_total: carried.iter().flatten().sum(),
        carried,
        egress_cap_gbps: node_cap,
        ingress_cap_gbps: node_cap,
        schedule: Vec::new(),
        optimal: true,
    })
}

pub const ORACLE_MAX_NODES: usize = 4;
pub const ORACLE_MAX_T: usize = 2;

/// Exhaustive reference for the targeted design on tiny racks.
///
/// Enumerates every multiplicity matrix (wavelengths per ordered pair, up to
/// the number that still adds traffic) whose rows and columns fit the
/// wavelength budget, and keeps the best one that can be written explicitly as
/// `2t` per-wavelength matchings, found by backtracking search.
pub fn oracle_throughput_targeted(
    f: &TargetedFabric,
    d: &DemandMatrix,
) -> Result<ThroughputReport> {
    check_plan(f)?;
    check_dims(f.n_nodes, d)?;
    if f.n_nodes > ORACLE_MAX_NODES || f.t_per_interface > ORACLE_MAX_T {
        return Err(Error::BoundExceeded {
            solver: "throughput oracle",
            detail: format!(
                "n={} t={} (limit n<={ORACLE_MAX_NODES}, t<={ORACLE_MAX_T})",
                f.n_nodes, f.t_per_interface
            ),
        });
    }
    let n = f.n_nodes;
    let w = f.wavelength_count();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|s| (0..n).filter(move |&t| t != s).map(move |t| (s, t)))
        .collect();
    let limits: Vec<usize> = pairs
        .iter()
        .map(|&(s, t)| useful_wavelengths(d.get(s, t), f.rate_gbps, w))
        .collect();

    let mut search = OracleSearch {
        f,
        d,
        pairs: &pairs,
        limits: &limits,
        w,
        current: vec![0; pairs.len()],
        row: vec![0; n],
        col: vec![0; n],
        best: None,
    };
    search.enumerate(0);
    let (_, counts, matchings) = search.best.expect("the empty schedule is always feasible");

    let mut multiplicity = vec![vec![0usize; n]; n];
    for (k, &(s, t)) in pairs.iter().enumerate() {
        multiplicity[s][t] = counts[k];
    }
    let colouring: Vec<(usize, usize, usize)> = matchings
        .iter()
        .enumerate()
        .flat_map(|(c, m)| m.iter().map(move |&(s, t)| (s, t, c)))
        .collect();
    Ok(targeted_report(f, d, &multiplicity, &colouring, true))
}

type Matchings = Vec<Vec<(usize, usize)>>;

struct OracleSearch<'a> {
    f: &'a TargetedFabric,
    d: &'a DemandMatrix,
    pairs: &'a [(usize, usize)],
    limits: &'a [usize],
    w: usize,
    current: Vec<usize>,
    row: Vec<usize>,
    col: Vec<usize>,
    best: Option<(f64, Vec<usize>, Matchings)>,
}

impl OracleSearch<'_> {
    fn enumerate(&mut self, k: usize) {
        if k == self.pairs.len() {
            let value: f64 = self
                .pairs
                .iter()
                .zip(&self.current)
                .map(|(&(s, t), &m)| carried_for(self.d.get(s, t), self.f.rate_gbps, m))
                .sum();
            if self.best.as_ref().is_some_and(|(b, _, _)| value <= *b) {
                return;
            }
            if let Some(matchings) = self.decompose() {
                self.best = Some((value, self.current.clone(), matchings));
            }
            return;
        }
        let (s, t) = self.pairs[k];
        for m in 0..=self.limits[k] {
            if self.row[s] + m > self.w || self.col[t] + m > self.w {
                break;
            }
            self.current[k] = m;
            self.row[s] += m;
            self.col[t] += m;
            self.enumerate(k + 1);
            self.row[s] -= m;
            self.col[t] -= m;
        }
        self.current[k] = 0;
    }

    /// Explicit split of the current multiplicities into `w` matchings.
    fn decompose(&self) -> Option<Matchings> {
        let edges: Vec<(usize, usize)> = self
            .pairs
            .iter()
            .zip(&self.current)
            .flat_map(|(&p, &m)| std::iter::repeat_n(p, m))
            .collect();
        let mut matchings: Matchings = vec![Vec::new(); self.w];
        fn place(edges: &[(usize, usize)], matchings: &mut Matchings) -> bool {
            let Some((&(s, t), rest)) = edges.split_first() else {
                return true;
            };
            for c in 0..matchings.len() {
                if matchings[c].iter().any(|&(u, v)| u == s || v == t) {
                    continue;
                }
                matchings[c].push((s, t));
                if place(rest, matchings) {
                    return true;
                }
                matchings[c].pop();
                // Empty matchings are interchangeable; trying one is enough.
                if matchings[c].is_empty() {
                    break;
                }
            }
            false
        }
        place(&edges, &mut matchings).then_some(matchings)
    }
}
