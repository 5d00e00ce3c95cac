// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! End-to-end runs: build, detect, tabulate, and report.

use indexmap::IndexMap;
use serde::Serialize;

use crate::analysis::{
    membership_table, segregation_summary, DatasetAssignment, MembershipTable, MixingReport,
    SegregationSummary,
};
use crate::builder::{build_graph, AttributeCatalog};
use crate::error::{Error, Result};
use crate::io::{MembershipFile, SurveyDataset};
use crate::optimizer::{detect, DetectionResult, OptimizerConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DatasetReport {
    pub membership: IndexMap<String, usize>,
    pub q: Option<f64>,
    pub mixing: MixingReport,
}

/// The JSON report: per-dataset results keyed by name in input order, and
/// the cross-dataset summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub datasets: IndexMap<String, DatasetReport>,
    pub summary: SegregationSummary,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    fn from_table(table: &MembershipTable) -> Result<Self> {
        let mut datasets = IndexMap::new();
        for (i, name) in table.datasets.iter().enumerate() {
            let mixing = table.mixing(i).map_err(|e| e.in_dataset(name))?;
            let membership = table
                .column_entries(i)
                .map(|(l, c)| (l.to_owned(), c))
                .collect();
            datasets.insert(
                name.clone(),
                DatasetReport {
                    membership,
                    q: table.modularity[i],
                    mixing,
                },
            );
        }
        let summary = segregation_summary(datasets.iter().map(|(n, d)| (n.as_str(), &d.mixing)));
        Ok(Self { datasets, summary })
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub report: Report,
    pub table: MembershipTable,
    pub detections: Vec<DetectionResult>,
}

/// Union of the datasets' catalogs, in order of first appearance.
fn merged_catalog<'a>(
    catalogs: impl IntoIterator<Item = &'a AttributeCatalog>,
) -> Result<AttributeCatalog> {
    let mut merged = AttributeCatalog::default();
    for catalog in catalogs {
        for (label, kind) in catalog.iter() {
            match merged.kind_of(label) {
                None => merged.push(label.to_owned(), kind)?,
                Some(k) if k != kind => {
                    return Err(Error::KindMismatch {
                        label: label.to_owned(),
                        expected: k.as_str(),
                        found: kind.as_str(),
                    })
                }
                Some(_) => {}
            }
        }
    }
    Ok(merged)
}

/// Detects communities in every dataset and assembles the reports.
pub fn run_pipeline(datasets: &[SurveyDataset], cfg: &OptimizerConfig) -> Result<PipelineOutput> {
    if datasets.is_empty() {
        return Err(Error::EmptyInput);
    }
    cfg.validate()?;
    let catalog = merged_catalog(datasets.iter().map(|d| &d.catalog))?;
    let mut assignments = Vec::with_capacity(datasets.len());
    let mut detections = Vec::with_capacity(datasets.len());
    for ds in datasets {
        let (assignment, result) =
            detect_one(ds, &catalog, cfg).map_err(|e| e.in_dataset(&ds.name))?;
        assignments.push(assignment);
        detections.push(result);
    }
    let table = membership_table(&catalog, &assignments)?;
    let report = Report::from_table(&table)?;
    Ok(PipelineOutput {
        report,
        table,
        detections,
    })
}

fn detect_one(
    ds: &SurveyDataset,
    catalog: &AttributeCatalog,
    cfg: &OptimizerConfig,
) -> Result<(DatasetAssignment, DetectionResult)> {
    if ds.records.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let built = build_graph(&ds.records, &ds.catalog)?;
    let result = detect(&built.graph, cfg)?;
    let mut assignment = DatasetAssignment::from_partition(
        ds.name.clone(),
        &built,
        &ds.catalog,
        &result.partition,
        Some(result.score.q),
    );
    for (label, _) in catalog.iter() {
        if ds.catalog.kind_of(label).is_none() {
            assignment.dropped.push(label.to_owned());
        }
    }
    Ok((assignment, result))
}

/// Analysis-only mode: memberships are given, detection is skipped.
pub fn analyze_memberships(file: &MembershipFile) -> Result<(Report, MembershipTable)> {
    let table = membership_table(&file.catalog, &file.datasets)?;
    let report = Report::from_table(&table)?;
    Ok((report, table))
}
