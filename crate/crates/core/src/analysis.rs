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

//! Attribute membership tables and the mixing of attribute kinds across
//! communities.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::builder::{AttributeCatalog, AttributeKind, BuiltGraph};
use crate::error::{Error, Result};
use crate::modularity::Partition;

/// Attribute → raw community label for one dataset. Labels are arbitrary;
/// only the blocks they induce matter.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DatasetAssignment {
    pub name: String,
    pub communities: HashMap<String, usize>,
    /// Attributes known to be absent from this dataset.
    pub dropped: Vec<String>,
    pub q: Option<f64>,
}

impl DatasetAssignment {
    /// Reads the attribute vertices' communities off a detected partition.
    pub fn from_partition(
        name: impl Into<String>,
        built: &BuiltGraph,
        catalog: &AttributeCatalog,
        partition: &Partition,
        q: Option<f64>,
    ) -> Self {
        let mut communities = HashMap::new();
        for (label, _) in catalog.iter() {
            if let Some(c) = built
                .attribute_vertex(label)
                .and_then(|v| partition.community_of(v))
            {
                communities.insert(label.to_owned(), c);
            }
        }
        Self {
            name: name.into(),
            communities,
            dropped: built.dropped.iter().map(|(l, _)| l.clone()).collect(),
            q,
        }
    }
}

/// Community index of every attribute in every dataset.
///
/// Indices are 1-based and renumbered per column by first appearance in row
/// order; `None` marks an attribute absent from that dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipTable {
    pub rows: Vec<(String, AttributeKind)>,
    pub datasets: Vec<String>,
    pub columns: Vec<Vec<Option<usize>>>,
    pub modularity: Vec<Option<f64>>,
}

/// Builds the table with rows in catalog order.
pub fn membership_table(
    catalog: &AttributeCatalog,
    datasets: &[DatasetAssignment],
) -> Result<MembershipTable> {
    let rows: Vec<(String, AttributeKind)> =
        catalog.iter().map(|(l, k)| (l.to_owned(), k)).collect();
    let mut columns = Vec::with_capacity(datasets.len());
    for d in datasets {
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let mut column = Vec::with_capacity(rows.len());
        for (label, _) in &rows {
            match d.communities.get(label) {
                Some(&raw) => {
                    let next = renumber.len() + 1;
                    column.push(Some(*renumber.entry(raw).or_insert(next)));
                }
                None if d.dropped.iter().any(|x| x == label) => column.push(None),
                None => return Err(Error::MissingAttribute(label.clone()).in_dataset(&d.name)),
            }
        }
        columns.push(column);
    }
    Ok(MembershipTable {
        rows,
        datasets: datasets.iter().map(|d| d.name.clone()).collect(),
        columns,
        modularity: datasets.iter().map(|d| d.q).collect(),
    })
}

impl MembershipTable {
    /// Mixing report of dataset column `i`.
    pub fn mixing(&self, i: usize) -> Result<MixingReport> {
        mixing_count(
            self.rows
                .iter()
                .zip(&self.columns[i])
                .filter_map(|((_, kind), c)| c.map(|c| (c, *kind))),
        )
    }

    /// `(label, community)` pairs of column `i`, skipping absent attributes.
    pub fn column_entries(&self, i: usize) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.rows
            .iter()
            .zip(&self.columns[i])
            .filter_map(|((label, _), c)| c.map(|c| (label.as_str(), c)))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Composition {
    pub community: usize,
    pub affiliations: usize,
    pub attitudes: usize,
}

impl Composition {
    pub fn is_mixed(&self) -> bool {
        self.affiliations > 0 && self.attitudes > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixingReport {
    pub mixed_count: usize,
    pub per_community: Vec<Composition>,
    #[serde(skip)]
    pub total_communities: usize,
}

/// Counts communities holding both attribute kinds. Input is
/// `(community, kind)` per attribute vertex; communities holding no
/// attribute never appear.
pub fn mixing_count<I>(members: I) -> Result<MixingReport>
where
    I: IntoIterator<Item = (usize, AttributeKind)>,
{
    let mut by_community: BTreeMap<usize, Composition> = BTreeMap::new();
    for (community, kind) in members {
        let entry = by_community.entry(community).or_insert(Composition {
            community,
            affiliations: 0,
            attitudes: 0,
        });
        match kind {
            AttributeKind::Affiliation => entry.affiliations += 1,
            AttributeKind::Attitude => entry.attitudes += 1,
        }
    }
    if by_community.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let per_community: Vec<Composition> = by_community.into_values().collect();
    Ok(MixingReport {
        mixed_count: per_community.iter().filter(|c| c.is_mixed()).count(),
        total_communities: per_community.len(),
        per_community,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MixingClass {
    FullySegregated,
    LowMixing,
    Mixed,
}

impl MixingClass {
    pub fn of(report: &MixingReport) -> Self {
        match report.mixed_count {
            0 => MixingClass::FullySegregated,
            1 => MixingClass::LowMixing,
            _ => MixingClass::Mixed,
        }
    }
}

/// Datasets grouped by mixing class, each group in input order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SegregationSummary {
    pub fully_segregated: Vec<String>,
    pub low_mixing: Vec<String>,
    pub mixed: Vec<String>,
}

impl SegregationSummary {
    pub fn class_of(&self, name: &str) -> Option<MixingClass> {
        if self.fully_segregated.iter().any(|n| n == name) {
            Some(MixingClass::FullySegregated)
        } else if self.low_mixing.iter().any(|n| n == name) {
            Some(MixingClass::LowMixing)
        } else if self.mixed.iter().any(|n| n == name) {
            Some(MixingClass::Mixed)
        } else {
            None
        }
    }
}

pub fn segregation_summary<'a, I>(reports: I) -> SegregationSummary
where
    I: IntoIterator<Item = (&'a str, &'a MixingReport)>,
{
    let mut out = SegregationSummary::default();
    for (name, report) in reports {
        let bucket = match MixingClass::of(report) {
            MixingClass::FullySegregated => &mut out.fully_segregated,
            MixingClass::LowMixing => &mut out.low_mixing,
            MixingClass::Mixed => &mut out.mixed,
        };
        bucket.push(name.to_owned());
    }
    out
}

/// Normalized mutual information with arithmetic-mean normalization,
/// `I(a; b) / ((H(a) + H(b)) / 2)`. Two single-block labelings score 1.
///
/// Panics if the labelings differ in length.
pub fn nmi(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must have equal length");
    if a.is_empty() {
        return 1.0;
    }
    let n = a.len() as f64;
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut pa: HashMap<usize, f64> = HashMap::new();
    let mut pb: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0;
        *pa.entry(x).or_default() += 1.0;
        *pb.entry(y).or_default() += 1.0;
    }
    let entropy = |counts: &HashMap<usize, f64>| -> f64 {
        counts.values().map(|&c| -(c / n) * (c / n).ln()).sum()
    };
    let (ha, hb) = (entropy(&pa), entropy(&pb));
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| (c / n) * (c * n / (pa[&x] * pb[&y])).ln())
        .sum();
    (mi / ((ha + hb) / 2.0)).clamp(0.0, 1.0)
}
