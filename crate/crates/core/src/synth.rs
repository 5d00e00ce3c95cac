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

//! Synthetic surveys with a planted block structure.

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builder::{AttributeCatalog, AttributeKind, IncidenceRecord};
use crate::error::{Error, Result};
use crate::io::SurveyDataset;

/// One planted block: its attributes and the share of actors drawn to it.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpec {
    pub affiliations: Vec<String>,
    pub attitudes: Vec<String>,
    pub share: f64,
}

impl BlockSpec {
    /// A block with generated labels `affiliation-<i>` / `attitude-<i>`,
    /// numbered from `first_affiliation` / `first_attitude`.
    pub fn numbered(
        affiliations: usize,
        attitudes: usize,
        share: f64,
        first_affiliation: usize,
        first_attitude: usize,
    ) -> Self {
        Self {
            affiliations: (0..affiliations)
                .map(|i| format!("affiliation-{}", first_affiliation + i))
                .collect(),
            attitudes: (0..attitudes)
                .map(|i| format!("attitude-{}", first_attitude + i))
                .collect(),
            share,
        }
    }

    /// Numbered blocks from `(affiliations, attitudes, share)` triples with
    /// labels running on across blocks.
    pub fn sequence(shape: &[(usize, usize, f64)]) -> Vec<Self> {
        let (mut af, mut at) = (1, 1);
        shape
            .iter()
            .map(|&(a, t, s)| {
                let b = Self::numbered(a, t, s, af, at);
                af += a;
                at += t;
                b
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_actors: usize,
    pub blocks: Vec<BlockSpec>,
    pub p_in: f64,
    pub p_out: f64,
}

impl Default for SynthConfig {
    /// 400 actors split evenly over two blocks of 8 and 5 attributes
    /// (8 affiliations and 5 attitudes overall), `p_in = 0.9`, `p_out = 0.05`.
    fn default() -> Self {
        Self {
            seed: 0,
            n_actors: 400,
            blocks: BlockSpec::sequence(&[(4, 4, 0.5), (4, 1, 0.5)]),
            p_in: 0.9,
            p_out: 0.05,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::BadConfig(m.to_owned()));
        if self.n_actors == 0 {
            return bad("n_actors must be positive");
        }
        if self.blocks.is_empty() {
            return bad("at least one block is required");
        }
        let degenerate = |b: &BlockSpec| {
            b.share.is_nan() || b.share < 0.0 || b.affiliations.len() + b.attitudes.len() == 0
        };
        if self.blocks.iter().any(degenerate) {
            return bad("every block needs a non-negative share and at least one attribute");
        }
        let total: f64 = self.blocks.iter().map(|b| b.share).sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad("block shares must sum to 1");
        }
        if !(0.0 <= self.p_out && self.p_out < self.p_in && self.p_in <= 1.0) {
            return bad("need 0 <= p_out < p_in <= 1");
        }
        Ok(())
    }

    fn catalog(&self) -> Result<AttributeCatalog> {
        AttributeCatalog::new(
            self.blocks
                .iter()
                .flat_map(|b| b.affiliations.iter().cloned()),
            self.blocks.iter().flat_map(|b| b.attitudes.iter().cloned()),
        )
        .map_err(|e| Error::BadConfig(e.to_string()))
    }

    /// Block of actor `i`: actors fill blocks in order, block `b` ending at
    /// `round(n · Σ_{j≤b} share_j)`.
    fn block_of_actor(&self, i: usize) -> usize {
        let n = self.n_actors as f64;
        let mut cum = 0.0;
        for (b, block) in self.blocks.iter().enumerate() {
            cum += block.share;
            if (i as f64) < (cum * n).round() {
                return b;
            }
        }
        self.blocks.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticDataset {
    pub dataset: SurveyDataset,
    /// Planted block of each attribute, in catalog order.
    pub planted: IndexMap<String, usize>,
    /// Planted block of each actor.
    pub actor_blocks: IndexMap<String, usize>,
}

/// Draws each (actor, attribute) tie independently with probability `p_in`
/// inside the actor's block and `p_out` elsewhere.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<SyntheticDataset> {
    cfg.validate()?;
    let catalog = cfg.catalog()?;
    let mut planted = IndexMap::new();
    for (b, block) in cfg.blocks.iter().enumerate() {
        for label in block.affiliations.iter().chain(&block.attitudes) {
            planted.insert(label.clone(), b);
        }
    }
    // Catalog order: all affiliations, then all attitudes.
    let attributes: Vec<(String, AttributeKind, usize)> = catalog
        .iter()
        .map(|(l, k)| (l.to_owned(), k, planted[l]))
        .collect();
    let planted: IndexMap<String, usize> =
        attributes.iter().map(|(l, _, b)| (l.clone(), *b)).collect();

    let width = cfg.n_actors.to_string().len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::new();
    let mut actor_blocks = IndexMap::new();
    for i in 0..cfg.n_actors {
        let actor = format!("r{:0width$}", i + 1);
        let block = cfg.block_of_actor(i);
        for (label, kind, b) in &attributes {
            let p = if *b == block { cfg.p_in } else { cfg.p_out };
            if rng.gen_bool(p) {
                records.push(IncidenceRecord::new(actor.clone(), label.clone(), *kind));
            }
        }
        actor_blocks.insert(actor, block);
    }
    Ok(SyntheticDataset {
        dataset: SurveyDataset::new(format!("synthetic-{}", cfg.seed), records, catalog)?,
        planted,
        actor_blocks,
    })
}
