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

//! Community structure of affiliation networks whose actors also carry
//! attitudinal attributes.
//!
//! The pipeline is: incidence records ([`builder`]) → a bipartite
//! [`WeightedGraph`] ([`graph`]) → a modularity-maximizing [`Partition`]
//! ([`modularity`], [`optimizer`]) → membership tables and mixing statistics
//! ([`analysis`]). Persistence formats and synthetic data live in [`io`],
//! [`synth`] and [`pipeline`].

pub mod analysis;
pub mod builder;
mod error;
pub mod graph;
pub mod io;
pub mod modularity;
pub mod optimizer;
pub mod pipeline;
pub mod synth;

pub use analysis::{
    membership_table, mixing_count, nmi, segregation_summary, DatasetAssignment, MembershipTable,
    MixingClass, MixingReport, SegregationSummary,
};
pub use builder::{build_graph, is_bipartite, AttributeCatalog, BuiltGraph, IncidenceRecord};
pub use error::{Error, Result};
pub use graph::{VertexId, VertexKind, WeightedGraph};
pub use modularity::{
    delta_modularity_move, merge_delta, modularity, CommunityTerms, ModularityScore,
    ModularityTracker, MoveTarget, Partition,
};
pub use optimizer::{
    anneal, brute_force, detect, greedy, Algorithm, AnnealConfig, DetectionResult, OptimizerConfig,
};
pub use synth::{generate_synthetic, BlockSpec, SynthConfig, SyntheticDataset};
