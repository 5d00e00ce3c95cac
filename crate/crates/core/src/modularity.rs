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

//! Newman–Girvan modularity of a vertex partition.
//!
//! For a partition into communities `C_1..C_c`,
//!
//! ```text
//! Q = Σ_k [ l_k / m  -  d_k² / (4 m²) ]
//! ```
//!
//! where `l_k` is the edge weight inside `C_k`, `d_k` the summed weighted
//! degree of `C_k` and `m` the total edge weight. All of `l_k`, `d_k` and `m`
//! are integers, so we carry `4m²·Q = Σ_k (4m·l_k − d_k²)` exactly and only
//! convert to `f64` at the end.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};

/// Assignment of every vertex to a community index in `[0, c)`.
///
/// Indices are always compacted by first appearance: vertex 0 is in community
/// 0, the first vertex outside community 0 opens community 1, and so on. Two
/// partitions with the same blocks therefore compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Any labels identify blocks; they are renumbered by first appearance.
    pub fn from_labels<T: Eq + std::hash::Hash + Copy>(labels: &[T]) -> Self {
        let mut seen = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = seen.len();
                *seen.entry(*l).or_insert(next)
            })
            .collect();
        Self {
            assignment,
            count: seen.len(),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
            count: n,
        }
    }

    /// Everything in one community.
    pub fn whole(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
            count: usize::from(n > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    pub fn community_of(&self, v: VertexId) -> Option<usize> {
        self.assignment.get(v.0).copied()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Vertices of each community, in community-index order.
    pub fn communities(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(VertexId(v));
        }
        out
    }

    fn check_covers(&self, g: &WeightedGraph) -> Result<()> {
        if self.len() == g.vertex_count() {
            Ok(())
        } else {
            Err(Error::IncompletePartition {
                assigned: self.len(),
                expected: g.vertex_count(),
            })
        }
    }
}

/// Internal weight `l_k` and total degree `d_k` of one community.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommunityTerms {
    pub internal: u64,
    pub degree: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModularityScore {
    pub q: f64,
    pub per_community: Vec<CommunityTerms>,
    pub m: u64,
}

impl ModularityScore {
    /// `4m²·Q` as an exact integer.
    pub fn scaled(&self) -> i128 {
        let m = i128::from(self.m);
        self.per_community
            .iter()
            .map(|t| 4 * m * i128::from(t.internal) - i128::from(t.degree).pow(2))
            .sum()
    }
}

#[inline]
pub(crate) fn unscale(scaled: i128, m: u64) -> f64 {
    let m = m as f64;
    scaled as f64 / (4.0 * m * m)
}

fn nonempty(g: &WeightedGraph) -> Result<u64> {
    match g.total_edge_weight() {
        0 => Err(Error::EmptyGraph),
        m => Ok(m),
    }
}

/// Scores `p` on `g`.
pub fn modularity(g: &WeightedGraph, p: &Partition) -> Result<ModularityScore> {
    let m = nonempty(g)?;
    p.check_covers(g)?;
    let mut terms = vec![
        CommunityTerms {
            internal: 0,
            degree: 0
        };
        p.community_count()
    ];
    for (v, &c) in p.assignment.iter().enumerate() {
        terms[c].degree += g.degrees()[v];
    }
    for (i, j, w) in g.edges() {
        let c = p.assignment[i.0];
        if c == p.assignment[j.0] {
            terms[c].internal += w;
        }
    }
    let mut score = ModularityScore {
        q: 0.0,
        per_community: terms,
        m,
    };
    score.q = unscale(score.scaled(), m);
    Ok(score)
}

/// Destination of a single-vertex move.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MoveTarget {
    Existing(usize),
    NewSingleton,
}

/// Mutable partition with per-community totals, giving `O(degree)` move
/// deltas. Community slots are stable while they stay non-empty; emptied slots
/// are recycled for new singletons.
#[derive(Clone, Debug)]
pub struct ModularityTracker<'g> {
    graph: &'g WeightedGraph,
    m: u64,
    community: Vec<usize>,
    degree: Vec<u64>,
    internal: Vec<u64>,
    size: Vec<usize>,
    live: Vec<usize>,
    live_pos: Vec<usize>,
    free: Vec<usize>,
    scaled: i128,
}

const DEAD: usize = usize::MAX;

impl<'g> ModularityTracker<'g> {
    pub fn new(graph: &'g WeightedGraph, p: &Partition) -> Result<Self> {
        let score = modularity(graph, p)?;
        let c = p.community_count();
        let mut size = vec![0; c];
        for &k in p.assignment() {
            size[k] += 1;
        }
        let n = graph.vertex_count();
        // One spare slot per vertex so a new singleton always has room.
        let slots = c.max(n) + 1;
        let mut degree: Vec<u64> = score.per_community.iter().map(|t| t.degree).collect();
        let mut internal: Vec<u64> = score.per_community.iter().map(|t| t.internal).collect();
        degree.resize(slots, 0);
        internal.resize(slots, 0);
        size.resize(slots, 0);
        let live: Vec<usize> = (0..c).collect();
        let mut live_pos = vec![DEAD; slots];
        for (i, &s) in live.iter().enumerate() {
            live_pos[s] = i;
        }
        Ok(Self {
            graph,
            m: score.m,
            community: p.assignment().to_vec(),
            degree,
            internal,
            size,
            live,
            live_pos,
            free: (c..slots).rev().collect(),
            scaled: score.scaled(),
        })
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    pub fn community_of(&self, v: VertexId) -> usize {
        self.community[v.0]
    }

    /// Non-empty community slots, in no particular order.
    pub fn live_communities(&self) -> &[usize] {
        &self.live
    }

    pub fn is_live(&self, slot: usize) -> bool {
        self.live_pos.get(slot).is_some_and(|&p| p != DEAD)
    }

    /// Current `4m²·Q`.
    pub fn scaled(&self) -> i128 {
        self.scaled
    }

    pub fn q(&self) -> f64 {
        unscale(self.scaled, self.m)
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    fn resolve(&self, target: MoveTarget) -> Result<Option<usize>> {
        match target {
            MoveTarget::Existing(k) if self.is_live(k) => Ok(Some(k)),
            MoveTarget::Existing(k) => Err(Error::UnknownCommunity(k)),
            MoveTarget::NewSingleton => Ok(None),
        }
    }

    /// Change of `4m²·Q` if `v` moved to `target`.
    pub fn move_delta_scaled(&self, v: VertexId, target: MoveTarget) -> Result<i128> {
        if v.0 >= self.community.len() {
            return Err(Error::UnknownVertex(v.0));
        }
        let target = self.resolve(target)?;
        Ok(self.delta_to(v, target))
    }

    fn delta_to(&self, v: VertexId, target: Option<usize>) -> i128 {
        let from = self.community[v.0];
        if target == Some(from) {
            return 0;
        }
        let (mut w_from, mut w_to) = (0u64, 0u64);
        for (u, w) in self.graph.neighbors(v) {
            let c = self.community[u.0];
            if c == from {
                w_from += w;
            } else if Some(c) == target {
                w_to += w;
            }
        }
        let k = i128::from(self.graph.degrees()[v.0]);
        let tot_from = i128::from(self.degree[from]);
        let tot_to = target.map_or(0, |t| i128::from(self.degree[t]));
        let m = i128::from(self.m);
        4 * m * (i128::from(w_to) - i128::from(w_from)) - 2 * k * (tot_to - tot_from + k)
    }

    pub fn move_delta(&self, v: VertexId, target: MoveTarget) -> Result<f64> {
        Ok(unscale(self.move_delta_scaled(v, target)?, self.m))
    }

    /// Moves `v`, returning the slot it landed in.
    pub fn apply_move(&mut self, v: VertexId, target: MoveTarget) -> Result<usize> {
        let delta = self.move_delta_scaled(v, target)?;
        let from = self.community[v.0];
        let to = match self.resolve(target)? {
            Some(t) => t,
            None if self.size[from] == 1 => return Ok(from),
            None => {
                let slot = self.free.pop().expect("spare slot");
                self.live_pos[slot] = self.live.len();
                self.live.push(slot);
                slot
            }
        };
        if to == from {
            return Ok(from);
        }
        let (mut w_from, mut w_to) = (0u64, 0u64);
        for (u, w) in self.graph.neighbors(v) {
            let c = self.community[u.0];
            if c == from {
                w_from += w;
            } else if c == to {
                w_to += w;
            }
        }
        let k = self.graph.degrees()[v.0];
        self.internal[from] -= w_from;
        self.internal[to] += w_to;
        self.degree[from] -= k;
        self.degree[to] += k;
        self.size[from] -= 1;
        self.size[to] += 1;
        self.community[v.0] = to;
        self.scaled += delta;
        if self.size[from] == 0 {
            let pos = self.live_pos[from];
            self.live.swap_remove(pos);
            if let Some(&moved) = self.live.get(pos) {
                self.live_pos[moved] = pos;
            }
            self.live_pos[from] = DEAD;
            self.free.push(from);
        }
        Ok(to)
    }

    pub fn to_partition(&self) -> Partition {
        Partition::from_labels(&self.community)
    }

    /// Raw slot per vertex.
    pub fn labels(&self) -> &[usize] {
        &self.community
    }
}

/// `Q(p') − Q(p)` where `p'` moves `v` to `target`.
pub fn delta_modularity_move(
    g: &WeightedGraph,
    p: &Partition,
    v: VertexId,
    target: MoveTarget,
) -> Result<f64> {
    ModularityTracker::new(g, p)?.move_delta(v, target)
}

/// Scaled gain `4m²·ΔQ = 2·(2m·e_ab − d_a·d_b)` of merging two communities
/// joined by weight `e_ab`.
#[inline]
pub(crate) fn merge_gain_scaled(m: u64, between: u64, d_a: u64, d_b: u64) -> i128 {
    2 * (2 * i128::from(m) * i128::from(between) - i128::from(d_a) * i128::from(d_b))
}

/// `Q` change from merging communities `a` and `b` of `p`.
pub fn merge_delta(g: &WeightedGraph, p: &Partition, a: usize, b: usize) -> Result<f64> {
    let m = nonempty(g)?;
    p.check_covers(g)?;
    for k in [a, b] {
        if k >= p.community_count() {
            return Err(Error::UnknownCommunity(k));
        }
    }
    if a == b {
        return Err(Error::SameCommunity(a));
    }
    let (mut d_a, mut d_b, mut between) = (0u64, 0u64, 0u64);
    for (v, &c) in p.assignment().iter().enumerate() {
        if c == a {
            d_a += g.degrees()[v];
        } else if c == b {
            d_b += g.degrees()[v];
        }
    }
    for (i, j, w) in g.edges() {
        let (ci, cj) = (p.assignment()[i.0], p.assignment()[j.0]);
        if (ci == a && cj == b) || (ci == b && cj == a) {
            between += w;
        }
    }
    Ok(unscale(merge_gain_scaled(m, between, d_a, d_b), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent scorer from the adjacency-matrix form
    /// `Q = (1/2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)`.
    fn oracle_q(n: usize, edges: &[(usize, usize, u64)], labels: &[usize]) -> f64 {
        let mut a = vec![vec![0f64; n]; n];
        for &(i, j, w) in edges {
            a[i][j] += w as f64;
            a[j][i] += w as f64;
        }
        let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
        let two_m: f64 = k.iter().sum();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if labels[i] == labels[j] {
                    q += a[i][j] - k[i] * k[j] / two_m;
                }
            }
        }
        q / two_m
    }

    const BARBELL: [(usize, usize, u64); 7] = [
        (0, 1, 1),
        (1, 2, 1),
        (0, 2, 1),
        (3, 4, 1),
        (4, 5, 1),
        (3, 5, 1),
        (2, 3, 1),
    ];

    fn barbell() -> WeightedGraph {
        WeightedGraph::from_edges(6, &BARBELL).unwrap()
    }

    #[test]
    fn compaction() {
        let p = Partition::from_labels(&[7, 7, 3, 9, 3]);
        assert_eq!(p.assignment(), &[0, 0, 1, 2, 1]);
        assert_eq!(p.community_count(), 3);
        assert_eq!(p, Partition::from_labels(&[1, 1, 0, 5, 0]));
    }

    #[test]
    fn one_community_is_zero() {
        let g = barbell();
        let s = modularity(&g, &Partition::whole(6)).unwrap();
        assert_eq!(s.q, 0.0);
        assert_eq!(
            s.per_community,
            vec![CommunityTerms {
                internal: 7,
                degree: 14
            }]
        );
    }

    #[test]
    fn triangle_singletons() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let s = modularity(&g, &Partition::singletons(3)).unwrap();
        let expected = oracle_q(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], &[0, 1, 2]);
        assert!((expected + 1.0 / 3.0).abs() < 1e-15);
        assert!((s.q - expected).abs() < 1e-15);
    }

    #[test]
    fn barbell_split() {
        let labels = [0, 0, 0, 1, 1, 1];
        let s = modularity(&barbell(), &Partition::from_labels(&labels)).unwrap();
        let expected = oracle_q(6, &BARBELL, &labels);
        assert!((expected - 5.0 / 14.0).abs() < 1e-15);
        assert!((s.q - 5.0 / 14.0).abs() < 1e-15);
        assert_eq!(s.per_community.iter().map(|t| t.degree).sum::<u64>(), 14);
    }

    #[test]
    fn errors() {
        let empty = WeightedGraph::with_vertices(3);
        assert!(matches!(
            modularity(&empty, &Partition::whole(3)),
            Err(Error::EmptyGraph)
        ));
        let g = barbell();
        assert!(matches!(
            modularity(&g, &Partition::whole(5)),
            Err(Error::IncompletePartition {
                assigned: 5,
                expected: 6
            })
        ));
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        assert!(matches!(
            merge_delta(&g, &p, 0, 0),
            Err(Error::SameCommunity(0))
        ));
        assert!(matches!(
            merge_delta(&g, &p, 0, 2),
            Err(Error::UnknownCommunity(2))
        ));
        assert!(matches!(
            delta_modularity_move(&g, &p, VertexId(9), MoveTarget::Existing(0)),
            Err(Error::UnknownVertex(9))
        ));
        assert!(matches!(
            delta_modularity_move(&g, &p, VertexId(0), MoveTarget::Existing(4)),
            Err(Error::UnknownCommunity(4))
        ));
    }

    #[test]
    fn move_examples() {
        let g = barbell();
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        assert_eq!(
            delta_modularity_move(&g, &p, VertexId(2), MoveTarget::Existing(0)).unwrap(),
            0.0
        );

        let edge = WeightedGraph::from_edges(2, &[(0, 1, 1)]).unwrap();
        let d = delta_modularity_move(
            &edge,
            &Partition::whole(2),
            VertexId(0),
            MoveTarget::NewSingleton,
        )
        .unwrap();
        let oracle = oracle_q(2, &[(0, 1, 1)], &[0, 1]) - oracle_q(2, &[(0, 1, 1)], &[0, 0]);
        assert!((oracle + 0.5).abs() < 1e-15);
        assert_eq!(d, -0.5);
    }

    #[test]
    fn merge_examples() {
        let g = barbell();
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let d = merge_delta(&g, &p, 0, 1).unwrap();
        assert!((d + 5.0 / 14.0).abs() < 1e-15);

        let two = WeightedGraph::from_edges(4, &[(0, 1, 1), (2, 3, 1)]).unwrap();
        let p = Partition::from_labels(&[0, 0, 1, 1]);
        let d = merge_delta(&two, &p, 0, 1).unwrap();
        // −2·d_a·d_b/(4m²) with d_a = d_b = 2, m = 2
        assert_eq!(d, -0.5);
        let oracle = oracle_q(4, &[(0, 1, 1), (2, 3, 1)], &[0, 0, 0, 0])
            - oracle_q(4, &[(0, 1, 1), (2, 3, 1)], &[0, 0, 1, 1]);
        assert!((d - oracle).abs() < 1e-15);
    }

    #[test]
    fn singleton_to_new_singleton_is_noop() {
        let g = barbell();
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 2]);
        let mut t = ModularityTracker::new(&g, &p).unwrap();
        assert_eq!(
            t.move_delta_scaled(VertexId(5), MoveTarget::NewSingleton)
                .unwrap(),
            0
        );
        let slot = t.apply_move(VertexId(5), MoveTarget::NewSingleton).unwrap();
        assert_eq!(slot, 2);
        assert_eq!(t.to_partition(), p);
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, edges: usize) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::with_capacity(edges);
        while out.len() < edges {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                out.push((i, j, rng.gen_range(1..4)));
            }
        }
        out
    }

    /// 1,000 random moves over graphs with up to 200 vertices.
    #[test]
    fn tracker_moves_match_full_rescoring() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut moves = 0;
        while moves < 1000 {
            let n = rng.gen_range(2..=200);
            let m = rng.gen_range(1..=3 * n);
            let edges = random_graph(&mut rng, n, m);
            let g = WeightedGraph::from_edges(n, &edges).unwrap();
            let c = rng.gen_range(1..=n);
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..c)).collect();
            let mut t = ModularityTracker::new(&g, &Partition::from_labels(&labels)).unwrap();
            for _ in 0..50 {
                let v = VertexId(rng.gen_range(0..n));
                let live = t.live_communities();
                let target = if rng.gen_bool(0.2) {
                    MoveTarget::NewSingleton
                } else {
                    MoveTarget::Existing(live[rng.gen_range(0..live.len())])
                };
                let before = oracle_q(n, &edges, t.labels());
                let delta = t.move_delta(v, target).unwrap();
                t.apply_move(v, target).unwrap();
                let after = oracle_q(n, &edges, t.labels());
                assert!(
                    (delta - (after - before)).abs() < 1e-12,
                    "{delta} vs {}",
                    after - before
                );
                let full = modularity(&g, &t.to_partition()).unwrap();
                assert_eq!(full.scaled(), t.scaled());
                moves += 1;
            }
        }
    }

    #[test]
    fn merge_matches_full_rescoring_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(3..=60);
            let count = rng.gen_range(1..=2 * n);
            let edges = random_graph(&mut rng, n, count);
            let g = WeightedGraph::from_edges(n, &edges).unwrap();
            let c = rng.gen_range(2..=n.min(8));
            let labels: Vec<usize> = (0..n)
                .map(|i| if i < c { i } else { rng.gen_range(0..c) })
                .collect();
            let p = Partition::from_labels(&labels);
            let (a, b) = (rng.gen_range(0..c), rng.gen_range(0..c));
            if a == b {
                continue;
            }
            let merged: Vec<usize> = p
                .assignment()
                .iter()
                .map(|&k| if k == b { a } else { k })
                .collect();
            let expected = oracle_q(n, &edges, &merged) - oracle_q(n, &edges, p.assignment());
            let d = merge_delta(&g, &p, a, b).unwrap();
            assert!((d - expected).abs() < 1e-12);
            // Splitting back loses exactly what merging gained.
            let resplit = modularity(&g, &p).unwrap().q
                - modularity(&g, &Partition::from_labels(&merged)).unwrap().q;
            assert!((d + resplit).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn score_invariants(
            n in 2usize..25,
            raw in prop::collection::vec((0usize..25, 0usize..25, 1u64..4), 1..80),
            labels in prop::collection::vec(0usize..6, 25),
            perm_seed in any::<u64>(),
        ) {
            let edges: Vec<_> = raw.into_iter()
                .map(|(i, j, w)| (i % n, j % n, w))
                .filter(|(i, j, _)| i != j)
                .collect();
            prop_assume!(!edges.is_empty());
            let g = WeightedGraph::from_edges(n, &edges).unwrap();
            let labels = &labels[..n];
            let s = modularity(&g, &Partition::from_labels(labels)).unwrap();
            prop_assert!(s.q >= -0.5 && s.q < 1.0);
            prop_assert_eq!(s.per_community.iter().map(|t| t.degree).sum::<u64>(), 2 * s.m);
            prop_assert!(s.per_community.iter().map(|t| t.internal).sum::<u64>() <= s.m);
            prop_assert!((s.q - oracle_q(n, &edges, labels)).abs() < 1e-12);
            prop_assert_eq!(modularity(&g, &Partition::whole(n)).unwrap().q, 0.0);

            // Relabel communities and vertices consistently.
            use rand::seq::SliceRandom;
            let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
            let mut cperm: Vec<usize> = (0..6).collect();
            cperm.shuffle(&mut rng);
            let renamed: Vec<usize> = labels.iter().map(|&l| cperm[l]).collect();
            let s2 = modularity(&g, &Partition::from_labels(&renamed)).unwrap();
            prop_assert_eq!(s.scaled(), s2.scaled());

            let mut vperm: Vec<usize> = (0..n).collect();
            vperm.shuffle(&mut rng);
            let iso_edges: Vec<_> = edges.iter().map(|&(i, j, w)| (vperm[i], vperm[j], w)).collect();
            let mut iso_labels = vec![0; n];
            for v in 0..n {
                iso_labels[vperm[v]] = labels[v];
            }
            let h = WeightedGraph::from_edges(n, &iso_edges).unwrap();
            let s3 = modularity(&h, &Partition::from_labels(&iso_labels)).unwrap();
            prop_assert_eq!(s.scaled(), s3.scaled());
        }
    }
}
