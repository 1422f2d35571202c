//! Application infrastructure templates and workload files.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{ResourceKind, Scope};

pub const CSV_HEADER: [&str; 5] = [
    "name",
    "cpu_units",
    "ram_units",
    "storage_units",
    "latency_scope",
];

/// The bundled seven-application workload, as a CSV file.
pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");

/// The logical host an application needs and the widest hierarchy entity its
/// components may be spread over.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AppTemplate {
    pub name: String,
    pub cpu_units: u32,
    pub ram_units: u32,
    pub storage_units: u32,
    pub latency_scope: Scope,
}

impl AppTemplate {
    pub fn new(name: impl Into<String>, cpu: u32, ram: u32, storage: u32, scope: Scope) -> Self {
        AppTemplate {
            name: name.into(),
            cpu_units: cpu,
            ram_units: ram,
            storage_units: storage,
            latency_scope: scope,
        }
    }

    pub fn demand(&self, kind: ResourceKind) -> u32 {
        match kind {
            ResourceKind::Cpu => self.cpu_units,
            ResourceKind::Ram => self.ram_units,
            ResourceKind::Storage => self.storage_units,
        }
    }

    pub fn total_units(&self) -> u32 {
        self.cpu_units + self.ram_units + self.storage_units
    }

    fn check(&self) -> Result<()> {
        if self.total_units() == 0 {
            return Err(Error::Invariant {
                entity: self.name.clone(),
                message: "application demands no units of any resource".into(),
            });
        }
        Ok(())
    }
}

/// An ordered set of applications with unique names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadSet {
    apps: Vec<AppTemplate>,
}

impl WorkloadSet {
    pub fn new(apps: Vec<AppTemplate>) -> Result<WorkloadSet> {
        let mut names = BTreeSet::new();
        for app in &apps {
            app.check()?;
            if !names.insert(app.name.as_str()) {
                return Err(Error::Invariant {
                    entity: app.name.clone(),
                    message: "duplicate application name".into(),
                });
            }
        }
        Ok(WorkloadSet { apps })
    }

    pub fn apps(&self) -> &[AppTemplate] {
        &self.apps
    }

    pub fn len(&self) -> usize {
        self.apps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.apps.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&AppTemplate> {
        self.apps.iter().find(|a| a.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for a in &self.apps {
            w.write_record([
                a.name.clone(),
                a.cpu_units.to_string(),
                a.ram_units.to_string(),
                a.storage_units.to_string(),
                a.latency_scope.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<WorkloadSet> {
        load_workloads(&std::fs::read_to_string(path)?)
    }
}

/// Parses a workload CSV (`name,cpu_units,ram_units,storage_units,latency_scope`).
pub fn load_workloads(source: &str) -> Result<WorkloadSet> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::parse(Some(1), None, e.to_string()))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Ok(WorkloadSet::default());
    }
    if headers.iter().ne(CSV_HEADER) {
        return Err(Error::parse(
            Some(1),
            None,
            format!("expected header `{}`", CSV_HEADER.join(",")),
        ));
    }

    let mut apps = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line());
            Error::parse(line, None, e.to_string())
        })?;
        let line = record.position().map(|p| p.line());
        if record.len() != CSV_HEADER.len() {
            return Err(Error::parse(
                line,
                None,
                format!(
                    "expected {} fields, found {}",
                    CSV_HEADER.len(),
                    record.len()
                ),
            ));
        }
        let units = |i: usize| -> Result<u32> {
            record[i].parse::<u32>().map_err(|e| {
                Error::parse(line, Some(CSV_HEADER[i]), format!("`{}`: {e}", &record[i]))
            })
        };
        let scope = Scope::parse(&record[4]).ok_or_else(|| {
            Error::parse(
                line,
                Some(CSV_HEADER[4]),
                format!("`{}` is not one of node|rack|pod|dc", &record[4]),
            )
        })?;
        if record[0].is_empty() {
            return Err(Error::parse(line, Some("name"), "empty application name"));
        }
        apps.push(AppTemplate::new(
            &record[0],
            units(1)?,
            units(2)?,
            units(3)?,
            scope,
        ));
    }
    WorkloadSet::new(apps)
}

/// The seven reference applications A..G.
pub fn builtin_table1() -> WorkloadSet {
    use Scope::{Node, Pod};
    let rows = [
        ("A", 1, 2, 1, Pod),
        ("B", 1, 1, 2, Pod),
        ("C", 2, 1, 1, Pod),
        ("D", 1, 2, 3, Pod),
        ("E", 3, 1, 2, Pod),
        ("F", 2, 3, 1, Pod),
        ("G", 1, 2, 1, Node),
    ];
    let apps = rows
        .into_iter()
        .map(|(n, c, r, s, scope)| AppTemplate::new(n, c, r, s, scope))
        .collect();
    WorkloadSet::new(apps).expect("reference workload is valid")
}
