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

//! Undirected graphs with integer edge multiplicities.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense vertex index in `[0, n)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which mode a vertex belongs to: a respondent, or one of the two
/// attribute categories.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Actor,
    #[serde(rename = "affiliation")]
    AffiliationAttr,
    #[serde(rename = "attitude")]
    AttitudeAttr,
}

impl VertexKind {
    pub fn is_attribute(self) -> bool {
        !matches!(self, VertexKind::Actor)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VertexKind::Actor => "actor",
            VertexKind::AffiliationAttr => "affiliation",
            VertexKind::AttitudeAttr => "attitude",
        }
    }
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Vertex {
    kind: VertexKind,
    label: String,
}

/// Undirected multigraph without self-loops.
///
/// Each unordered pair is stored once per endpoint in a sorted adjacency
/// list, so iteration order is deterministic. Degrees and the total weight `m` are
/// maintained on insertion.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedGraph {
    vertices: Vec<Vertex>,
    adjacency: Vec<Vec<(usize, u64)>>,
    degrees: Vec<u64>,
    total_weight: u64,
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` actor vertices labelled by their index. Handy for plain graphs.
    pub fn with_vertices(n: usize) -> Self {
        let mut g = Self::new();
        for i in 0..n {
            g.add_vertex(VertexKind::Actor, i.to_string());
        }
        g
    }

    /// Builds an unlabelled graph from `(i, j, w)` triples.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let mut g = Self::with_vertices(n);
        for &(i, j, w) in edges {
            g.add_edge(VertexId(i), VertexId(j), w)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, kind: VertexKind, label: impl Into<String>) -> VertexId {
        let id = VertexId(self.vertices.len());
        self.vertices.push(Vertex {
            kind,
            label: label.into(),
        });
        self.adjacency.push(Vec::new());
        self.degrees.push(0);
        id
    }

    /// Adds `w` to the multiplicity of the pair `{i, j}`.
    pub fn add_edge(&mut self, i: VertexId, j: VertexId, w: u64) -> Result<()> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::SelfLoop(i.0));
        }
        if w == 0 {
            return Err(Error::ZeroWeight);
        }
        bump(&mut self.adjacency[i.0], j.0, w);
        bump(&mut self.adjacency[j.0], i.0, w);
        self.degrees[i.0] += w;
        self.degrees[j.0] += w;
        self.total_weight += w;
        Ok(())
    }

    #[inline]
    fn check(&self, v: VertexId) -> Result<()> {
        if v.0 < self.vertices.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.0))
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// `m`: the sum of all edge multiplicities.
    pub fn total_edge_weight(&self) -> u64 {
        self.total_weight
    }

    /// Sum of multiplicities of edges incident to `v`.
    pub fn weighted_degree(&self, v: VertexId) -> Result<u64> {
        self.check(v)?;
        Ok(self.degrees[v.0])
    }

    /// Degrees indexed by vertex.
    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// `A_ij`, zero when the pair is absent.
    pub fn edge_weight(&self, i: VertexId, j: VertexId) -> Result<u64> {
        self.check(i)?;
        self.check(j)?;
        let nbrs = &self.adjacency[i.0];
        Ok(nbrs
            .binary_search_by_key(&j.0, |&(u, _)| u)
            .map_or(0, |k| nbrs[k].1))
    }

    /// Neighbours of `v` with multiplicities, in increasing vertex order.
    ///
    /// Panics if `v` is out of range.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, u64)> + '_ {
        self.adjacency[v.0].iter().map(|&(u, w)| (VertexId(u), w))
    }

    /// Each unordered edge once, as `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, u64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, nbrs)| {
            let start = nbrs.partition_point(|&(u, _)| u <= i);
            nbrs[start..]
                .iter()
                .map(move |&(j, w)| (VertexId(i), VertexId(j), w))
        })
    }

    pub fn kind(&self, v: VertexId) -> Result<VertexKind> {
        self.check(v)?;
        Ok(self.vertices[v.0].kind)
    }

    pub fn label(&self, v: VertexId) -> Result<&str> {
        self.check(v)?;
        Ok(&self.vertices[v.0].label)
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }
}

fn bump(nbrs: &mut Vec<(usize, u64)>, u: usize, w: u64) {
    match nbrs.binary_search_by_key(&u, |&(x, _)| x) {
        Ok(k) => nbrs[k].1 += w,
        Err(k) => nbrs.insert(k, (u, w)),
    }
}
