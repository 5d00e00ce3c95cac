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

//! Modularity maximization: exhaustive search for small graphs, greedy
//! agglomeration, and simulated annealing.
//!
//! Every search compares candidates by the exact integer `4m²·Q`, so ties are
//! real ties and are broken by the documented rule of each algorithm.
//!
//! Annealing randomness comes from ChaCha8 (`rand_chacha`). Restart `r`
//! seeds the generator with `seed_from_u64(seed)` and then selects stream `r`,
//! so restarts are independent and reproducible on every platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::modularity::{
    merge_gain_scaled, modularity, unscale, ModularityScore, ModularityTracker, MoveTarget,
    Partition,
};

/// Hard ceiling on exhaustive search; Bell(14) is about 1.9e8.
pub const BRUTE_FORCE_LIMIT: usize = 14;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[serde(rename = "brute")]
    BruteForce,
    Greedy,
    Anneal,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::BruteForce => "brute",
            Algorithm::Greedy => "greedy",
            Algorithm::Anneal => "anneal",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Algorithm::BruteForce),
            "greedy" => Ok(Algorithm::Greedy),
            "anneal" => Ok(Algorithm::Anneal),
            other => Err(Error::BadConfig(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Cooling schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnealConfig {
    pub initial_temperature: f64,
    /// Multiplier applied after each temperature level, in `(0, 1)`.
    pub cooling: f64,
    /// Proposals per temperature level; `None` means `50·n`.
    pub steps_per_temperature: Option<usize>,
    pub min_temperature: f64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            initial_temperature: 0.25,
            cooling: 0.95,
            steps_per_temperature: None,
            min_temperature: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub restarts: usize,
    pub anneal: AnnealConfig,
    pub brute_max_n: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Greedy,
            seed: 0,
            restarts: 5,
            anneal: AnnealConfig::default(),
            brute_max_n: 12,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let a = &self.anneal;
        let bad = |msg: &str| Err(Error::BadConfig(msg.to_owned()));
        if self.restarts == 0 {
            return bad("restarts must be positive");
        }
        if self.brute_max_n == 0 || self.brute_max_n > BRUTE_FORCE_LIMIT {
            return Err(Error::BadConfig(format!(
                "brute_max_n must be in 1..={BRUTE_FORCE_LIMIT}"
            )));
        }
        if !(a.initial_temperature.is_finite() && a.initial_temperature > 0.0) {
            return bad("initial temperature must be positive");
        }
        if !(a.cooling > 0.0 && a.cooling < 1.0) {
            return bad("cooling factor must be strictly between 0 and 1");
        }
        if !(a.min_temperature > 0.0 && a.min_temperature <= a.initial_temperature) {
            return bad("minimum temperature must be positive and at most the initial temperature");
        }
        if a.steps_per_temperature == Some(0) {
            return bad("steps per temperature must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    pub partition: Partition,
    pub score: ModularityScore,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub restarts_used: usize,
}

fn finish(
    g: &WeightedGraph,
    labels: &[usize],
    algorithm: Algorithm,
    seed: u64,
    restarts_used: usize,
) -> Result<DetectionResult> {
    let partition = Partition::from_labels(labels);
    let score = modularity(g, &partition)?;
    Ok(DetectionResult {
        partition,
        score,
        algorithm,
        seed,
        restarts_used,
    })
}

/// Runs the configured algorithm.
pub fn detect(g: &WeightedGraph, cfg: &OptimizerConfig) -> Result<DetectionResult> {
    cfg.validate()?;
    match cfg.algorithm {
        Algorithm::BruteForce => brute_force(g, cfg.brute_max_n),
        Algorithm::Greedy => greedy(g),
        Algorithm::Anneal => anneal(g, cfg),
    }
}

/// Exact maximum over all set partitions.
///
/// Partitions are visited as restricted growth strings in lexicographic
/// order; the first maximizer found wins.
pub fn brute_force(g: &WeightedGraph, max_n: usize) -> Result<DetectionResult> {
    if max_n > BRUTE_FORCE_LIMIT {
        return Err(Error::BadConfig(format!(
            "brute_max_n must be at most {BRUTE_FORCE_LIMIT}"
        )));
    }
    let n = g.vertex_count();
    if n > max_n {
        return Err(Error::TooLarge { n, max: max_n });
    }
    let m = g.total_edge_weight();
    if m == 0 {
        return Err(Error::EmptyGraph);
    }
    let earlier: Vec<Vec<(usize, u64)>> = g
        .vertex_ids()
        .map(|v| {
            g.neighbors(v)
                .filter(|(u, _)| u.0 < v.0)
                .map(|(u, w)| (u.0, w))
                .collect()
        })
        .collect();
    let mut search = Enumeration {
        m: i128::from(m),
        degrees: g.degrees(),
        earlier: &earlier,
        rgs: vec![0; n],
        block_degree: vec![0; n],
        best: i128::MIN,
        best_rgs: vec![0; n],
    };
    search.visit(0, 0, 0);
    let labels = search.best_rgs;
    finish(g, &labels, Algorithm::BruteForce, 0, 1)
}

struct Enumeration<'a> {
    m: i128,
    degrees: &'a [u64],
    earlier: &'a [Vec<(usize, u64)>],
    rgs: Vec<usize>,
    block_degree: Vec<i128>,
    best: i128,
    best_rgs: Vec<usize>,
}

impl Enumeration<'_> {
    /// Assigns vertex `v` given `blocks` blocks in use and the scaled score
    /// `acc` of the prefix.
    fn visit(&mut self, v: usize, blocks: usize, acc: i128) {
        if v == self.rgs.len() {
            if acc > self.best {
                self.best = acc;
                self.best_rgs.copy_from_slice(&self.rgs);
            }
            return;
        }
        let mut to_block = vec![0i128; blocks + 1];
        for &(u, w) in &self.earlier[v] {
            to_block[self.rgs[u]] += i128::from(w);
        }
        let k = i128::from(self.degrees[v]);
        for (b, &w) in to_block.iter().enumerate() {
            let d = self.block_degree[b];
            let gain = 4 * self.m * w - 2 * d * k - k * k;
            self.rgs[v] = b;
            self.block_degree[b] += k;
            let used = if b == blocks { blocks + 1 } else { blocks };
            self.visit(v + 1, used, acc + gain);
            self.block_degree[b] -= k;
        }
    }
}

/// Agglomerative merging from singletons.
///
/// Each round merges the pair of communities with the largest gain, ties
/// going to the lexicographically smallest pair of community ids (a
/// community's id is its smallest vertex). Merging stops once every gain is
/// negative. The best partition along the way is returned; on equal scores
/// the earliest one.
pub fn greedy(g: &WeightedGraph) -> Result<DetectionResult> {
    let m = g.total_edge_weight();
    if m == 0 {
        return Err(Error::EmptyGraph);
    }
    let n = g.vertex_count();
    let mut links: Vec<BTreeMap<usize, u64>> = g
        .vertex_ids()
        .map(|v| g.neighbors(v).map(|(u, w)| (u.0, w)).collect())
        .collect();
    let mut degree: Vec<u64> = g.degrees().to_vec();
    let mut alive = vec![true; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut label: Vec<usize> = (0..n).collect();

    let mut scaled: i128 = -degree.iter().map(|&d| i128::from(d).pow(2)).sum::<i128>();
    let mut best = scaled;
    let mut best_label = label.clone();

    loop {
        let mut choice: Option<(i128, usize, usize)> = None;
        let mut consider = |gain: i128, a: usize, b: usize| {
            let better = match choice {
                None => true,
                Some((g0, a0, b0)) => gain > g0 || (gain == g0 && (a, b) < (a0, b0)),
            };
            if better {
                choice = Some((gain, a, b));
            }
        };
        for a in (0..n).filter(|&a| alive[a]) {
            for (&b, &e) in links[a].range(a + 1..) {
                consider(merge_gain_scaled(m, e, degree[a], degree[b]), a, b);
            }
        }
        // Degree-zero communities merge with anything at zero cost; only the
        // smallest such pair can win a tie.
        let mut live = (0..n).filter(|&a| alive[a]);
        if let (Some(first), Some(second)) = (live.next(), live.next()) {
            let partner = if degree[first] == 0 {
                Some(second)
            } else {
                (second..n).find(|&b| alive[b] && degree[b] == 0)
            };
            if let Some(b) = partner {
                consider(0, first, b);
            }
        }

        let Some((gain, a, b)) = choice else { break };
        if gain < 0 {
            break;
        }
        let absorbed = std::mem::take(&mut links[b]);
        for (c, e) in absorbed {
            links[c].remove(&b);
            if c != a {
                *links[a].entry(c).or_insert(0) += e;
                *links[c].entry(a).or_insert(0) += e;
            }
        }
        degree[a] += degree[b];
        degree[b] = 0;
        alive[b] = false;
        let moved = std::mem::take(&mut members[b]);
        for &v in &moved {
            label[v] = a;
        }
        members[a].extend(moved);
        scaled += gain;
        if scaled > best {
            best = scaled;
            best_label.copy_from_slice(&label);
        }
    }
    finish(g, &best_label, Algorithm::Greedy, 0, 1)
}

/// Simulated annealing with single-vertex moves.
///
/// Each restart starts from a random assignment into `⌈√n⌉` communities.
/// A proposal moves a uniformly chosen vertex to a uniformly chosen existing
/// community or to a new singleton; improvements are always accepted and
/// losses with probability `exp(ΔQ / T)`. The best state seen over all
/// restarts is returned, ties going to the lowest restart index.
pub fn anneal(g: &WeightedGraph, cfg: &OptimizerConfig) -> Result<DetectionResult> {
    cfg.validate()?;
    if g.total_edge_weight() == 0 {
        return Err(Error::EmptyGraph);
    }
    let n = g.vertex_count();
    let mut best: Option<(i128, Vec<usize>)> = None;
    for restart in 0..cfg.restarts {
        let (scaled, labels) = anneal_once(g, &cfg.anneal, stream(cfg.seed, restart))?;
        if best.as_ref().is_none_or(|(b, _)| scaled > *b) {
            best = Some((scaled, labels));
        }
    }
    let (_, labels) = best.unwrap_or_else(|| (0, vec![0; n]));
    finish(g, &labels, Algorithm::Anneal, cfg.seed, cfg.restarts)
}

/// The generator for one restart.
pub fn stream(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn anneal_once(
    g: &WeightedGraph,
    schedule: &AnnealConfig,
    mut rng: ChaCha8Rng,
) -> Result<(i128, Vec<usize>)> {
    let n = g.vertex_count();
    let initial = (n as f64).sqrt().ceil().max(1.0) as usize;
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..initial)).collect();
    let mut state = ModularityTracker::new(g, &Partition::from_labels(&labels))?;
    let mut best = state.scaled();
    let mut best_labels = state.labels().to_vec();

    let steps = schedule.steps_per_temperature.unwrap_or(50 * n);
    let m = state.m();
    let mut temperature = schedule.initial_temperature;
    while temperature >= schedule.min_temperature {
        for _ in 0..steps {
            let v = VertexId(rng.gen_range(0..n));
            let live = state.live_communities();
            let pick = rng.gen_range(0..=live.len());
            let target = match live.get(pick) {
                Some(&c) => MoveTarget::Existing(c),
                None => MoveTarget::NewSingleton,
            };
            let delta = state.move_delta_scaled(v, target)?;
            let accept = delta >= 0 || rng.gen::<f64>() < (unscale(delta, m) / temperature).exp();
            if accept {
                state.apply_move(v, target)?;
                if state.scaled() > best {
                    best = state.scaled();
                    best_labels.copy_from_slice(state.labels());
                }
            }
        }
        temperature *= schedule.cooling;
    }
    Ok((best, best_labels))
}
