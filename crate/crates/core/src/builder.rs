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

//! Merges actor–affiliation and actor–attitude incidences into one bipartite
//! graph.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexId, VertexKind, WeightedGraph};

/// The two attribute categories an actor can be tied to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Affiliation,
    Attitude,
}

impl AttributeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttributeKind::Affiliation => "affiliation",
            AttributeKind::Attitude => "attitude",
        }
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttributeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "affiliation" => Ok(AttributeKind::Affiliation),
            "attitude" => Ok(AttributeKind::Attitude),
            other => Err(format!(
                "kind must be \"affiliation\" or \"attitude\", got {other:?}"
            )),
        }
    }
}

impl From<AttributeKind> for VertexKind {
    fn from(kind: AttributeKind) -> Self {
        match kind {
            AttributeKind::Affiliation => VertexKind::AffiliationAttr,
            AttributeKind::Attitude => VertexKind::AttitudeAttr,
        }
    }
}

/// One actor-to-attribute tie.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IncidenceRecord {
    pub actor: String,
    pub attribute: String,
    pub kind: AttributeKind,
    pub weight: u64,
}

impl IncidenceRecord {
    pub fn new(
        actor: impl Into<String>,
        attribute: impl Into<String>,
        kind: AttributeKind,
    ) -> Self {
        Self {
            actor: actor.into(),
            attribute: attribute.into(),
            kind,
            weight: 1,
        }
    }

    pub fn with_weight(mut self, weight: u64) -> Self {
        self.weight = weight;
        self
    }
}

/// Ordered attribute labels of both kinds. Order defines both the vertex
/// numbering of built graphs and the row order of reports.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttributeCatalog {
    affiliations: Vec<String>,
    attitudes: Vec<String>,
    index: HashMap<String, AttributeKind>,
}

impl AttributeCatalog {
    /// Labels must be unique across both kinds.
    pub fn new<A, B>(affiliations: A, attitudes: B) -> Result<Self>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        B: IntoIterator,
        B::Item: Into<String>,
    {
        let mut catalog = Self::default();
        for label in affiliations {
            catalog.push(label.into(), AttributeKind::Affiliation)?;
        }
        for label in attitudes {
            catalog.push(label.into(), AttributeKind::Attitude)?;
        }
        Ok(catalog)
    }

    pub fn push(&mut self, label: String, kind: AttributeKind) -> Result<()> {
        if self.index.contains_key(&label) {
            return Err(Error::DuplicateCatalogLabel(label));
        }
        self.index.insert(label.clone(), kind);
        match kind {
            AttributeKind::Affiliation => self.affiliations.push(label),
            AttributeKind::Attitude => self.attitudes.push(label),
        }
        Ok(())
    }

    pub fn affiliations(&self) -> &[String] {
        &self.affiliations
    }

    pub fn attitudes(&self) -> &[String] {
        &self.attitudes
    }

    pub fn kind_of(&self, label: &str) -> Option<AttributeKind> {
        self.index.get(label).copied()
    }

    /// Affiliations then attitudes, each in catalog order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, AttributeKind)> + '_ {
        self.affiliations
            .iter()
            .map(|l| (l.as_str(), AttributeKind::Affiliation))
            .chain(
                self.attitudes
                    .iter()
                    .map(|l| (l.as_str(), AttributeKind::Attitude)),
            )
    }

    pub fn len(&self) -> usize {
        self.affiliations.len() + self.attitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks a record's attribute against the catalog.
    pub fn validate(&self, record: &IncidenceRecord) -> Result<()> {
        match self.kind_of(&record.attribute) {
            None => Err(Error::UnknownAttribute(record.attribute.clone())),
            Some(kind) if kind != record.kind => Err(Error::KindMismatch {
                label: record.attribute.clone(),
                expected: kind.as_str(),
                found: record.kind.as_str(),
            }),
            Some(_) => Ok(()),
        }
    }
}

/// A graph built from incidence records, with the label ↔ vertex maps.
#[derive(Clone, Debug)]
pub struct BuiltGraph {
    pub graph: WeightedGraph,
    attributes: HashMap<String, VertexId>,
    actors: HashMap<String, VertexId>,
    /// Catalog attributes with no records, excluded from the graph.
    pub dropped: Vec<(String, AttributeKind)>,
}

impl BuiltGraph {
    pub fn attribute_vertex(&self, label: &str) -> Option<VertexId> {
        self.attributes.get(label).copied()
    }

    pub fn actor_vertex(&self, actor: &str) -> Option<VertexId> {
        self.actors.get(actor).copied()
    }

    pub fn actor_count(&self) -> usize {
        self.actors.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }
}

/// Builds the union of the affiliation and attitude edge collections.
///
/// Vertices are numbered attributes first (catalog order, affiliations then
/// attitudes), then actors in lexicographic order of their ids. Only vertices
/// touched by at least one record are created; repeated `(actor, attribute)`
/// records accumulate weight.
pub fn build_graph(records: &[IncidenceRecord], catalog: &AttributeCatalog) -> Result<BuiltGraph> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut ties: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    let mut used: HashMap<&str, ()> = HashMap::new();
    for r in records {
        catalog.validate(r)?;
        if r.weight == 0 {
            return Err(Error::ZeroWeight);
        }
        *ties
            .entry((r.actor.as_str(), r.attribute.as_str()))
            .or_insert(0) += r.weight;
        used.insert(r.attribute.as_str(), ());
    }

    let mut graph = WeightedGraph::new();
    let mut attributes = HashMap::new();
    let mut dropped = Vec::new();
    for (label, kind) in catalog.iter() {
        if used.contains_key(label) {
            let v = graph.add_vertex(kind.into(), label);
            attributes.insert(label.to_owned(), v);
        } else {
            dropped.push((label.to_owned(), kind));
        }
    }

    // BTreeMap keys are sorted by actor first, so actors come out in
    // lexicographic order.
    let mut actors: HashMap<String, VertexId> = HashMap::new();
    let mut last: Option<(&str, VertexId)> = None;
    for (&(actor, attribute), &w) in &ties {
        let a = match last {
            Some((name, v)) if name == actor => v,
            _ => {
                let v = graph.add_vertex(VertexKind::Actor, actor);
                actors.insert(actor.to_owned(), v);
                last = Some((actor, v));
                v
            }
        };
        graph.add_edge(a, attributes[attribute], w)?;
    }

    Ok(BuiltGraph {
        graph,
        attributes,
        actors,
        dropped,
    })
}

/// True iff every edge joins an actor to an attribute.
pub fn is_bipartite(g: &WeightedGraph) -> bool {
    g.edges().all(|(i, j, _)| {
        let a = g.kind(i).map(|k| k == VertexKind::Actor).unwrap_or(false);
        let b = g.kind(j).map(|k| k == VertexKind::Actor).unwrap_or(false);
        a != b
    })
}
