//! The global submap graph.
//!
//! Sequential edges chain submaps in creation order; loop edges are admitted
//! only after connectivity validation — a place-recognition hit between two
//! submaps does not imply a ground robot can travel between them (it may be
//! looking across a wall it cannot cross). Loop correction redistributes the
//! observed anchor error linearly along the sequential chain; submap content
//! is anchor-relative, so no metric cell is read or written.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::Pose2;
use crate::grid::PointIndex;
use crate::submap::{segment_covered, ComposeParams, SubmapError, SubmapId, SubmapStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    Sequential,
    ValidatedLoop,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TopoEdge {
    pub a: SubmapId,
    pub b: SubmapId,
    pub kind: EdgeKind,
    /// Anchor distance, recomputed after every correction.
    pub length: f64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TopologyError {
    #[error("sequential edge ids must be consecutive, got ({0}, {1})")]
    NonConsecutiveIds(SubmapId, SubmapId),
    #[error("loop pair ({0}, {1}) has not passed validation")]
    ValidationNotPerformed(SubmapId, SubmapId),
    #[error("no loop edge between {0} and {1}")]
    NoSuchLoopEdge(SubmapId, SubmapId),
    #[error(transparent)]
    Submap(#[from] SubmapError),
    #[error("node {0} is not in the topology")]
    UnknownNode(SubmapId),
}

/// Outcome of one loop correction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionStats {
    /// Error pose that was distributed (relative, corrected frame).
    pub error: Pose2,
    /// Number of chain anchors that moved.
    pub chain_len: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GlobalTopology {
    nodes: Vec<SubmapId>,
    edges: Vec<TopoEdge>,
    /// Pairs that passed validation, with the anchor epoch of the check.
    #[serde(skip)]
    validated: BTreeMap<(SubmapId, SubmapId), u64>,
    /// Pairs that failed validation, with the anchor epoch of the check.
    /// Retried automatically once a correction bumps the epoch.
    #[serde(skip)]
    failed: BTreeMap<(SubmapId, SubmapId), u64>,
    /// Bumped by every correction: cached validation results expire.
    anchor_epoch: u64,
}

fn ordered(a: SubmapId, b: SubmapId) -> (SubmapId, SubmapId) {
    (a.min(b), a.max(b))
}

impl GlobalTopology {
    pub fn new() -> Self {
        GlobalTopology::default()
    }

    pub fn add_node(&mut self, id: SubmapId) {
        debug_assert!(!self.nodes.contains(&id));
        self.nodes.push(id);
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[SubmapId] {
        &self.nodes
    }

    pub fn has_node(&self, id: SubmapId) -> bool {
        self.nodes.contains(&id)
    }

    pub fn edges(&self) -> &[TopoEdge] {
        &self.edges
    }

    pub fn anchor_epoch(&self) -> u64 {
        self.anchor_epoch
    }

    pub fn has_edge(&self, a: SubmapId, b: SubmapId) -> bool {
        let key = ordered(a, b);
        self.edges.iter().any(|e| ordered(e.a, e.b) == key)
    }

    /// Rebuild the edge list from persisted records (store reload path).
    pub fn restore_edges(&mut self, edges: Vec<TopoEdge>) {
        self.edges = edges;
        debug_assert!(self.is_connected());
    }

    /// One-hop neighbors of `id`, ascending.
    pub fn neighbors(&self, id: SubmapId) -> impl Iterator<Item = SubmapId> + '_ {
        let mut out: Vec<SubmapId> = self
            .edges
            .iter()
            .filter_map(move |e| {
                if e.a == id {
                    Some(e.b)
                } else if e.b == id {
                    Some(e.a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out.into_iter()
    }

    /// Adjacency over node ids: `(neighbor, edge length)` lists.
    pub fn adjacency(&self) -> BTreeMap<SubmapId, Vec<(SubmapId, f64)>> {
        let mut adj: BTreeMap<SubmapId, Vec<(SubmapId, f64)>> = BTreeMap::new();
        for &n in &self.nodes {
            adj.entry(n).or_default();
        }
        for e in &self.edges {
            adj.entry(e.a).or_default().push((e.b, e.length));
            adj.entry(e.b).or_default().push((e.a, e.length));
        }
        adj
    }

    /// Every node reachable from the first one?
    pub fn is_connected(&self) -> bool {
        let Some(&root) = self.nodes.first() else {
            return true;
        };
        let adj = self.adjacency();
        let mut seen = alloc::collections::BTreeSet::new();
        let mut stack = alloc::vec![root];
        seen.insert(root);
        while let Some(n) = stack.pop() {
            for &(m, _) in &adj[&n] {
                if seen.insert(m) {
                    stack.push(m);
                }
            }
        }
        seen.len() == self.nodes.len()
    }

    /// Chain edge `(prev_id, new_id = prev_id + 1)` with anchor-distance
    /// length.
    pub fn add_sequential_edge(
        &mut self,
        store: &SubmapStore,
        prev_id: SubmapId,
        new_id: SubmapId,
    ) -> Result<(), TopologyError> {
        if new_id != prev_id + 1 {
            return Err(TopologyError::NonConsecutiveIds(prev_id, new_id));
        }
        if !self.has_node(prev_id) || !self.has_node(new_id) {
            return Err(TopologyError::UnknownNode(new_id));
        }
        let a = store.get(prev_id)?;
        let b = store.get(new_id)?;
        self.edges.push(TopoEdge {
            a: prev_id,
            b: new_id,
            kind: EdgeKind::Sequential,
            length: a.anchor.translation_dist(&b.anchor),
        });
        debug_assert!(self.is_connected());
        Ok(())
    }

    /// Can a robot actually travel between submaps `id_a` and `id_b`?
    ///
    /// True iff some cross-submap vertex pair lies within
    /// `params.connect_radius` and (when `params.check_segments`) its
    /// straight segment stays inside the union of both submaps'
    /// known-traversable coverage. Failures are cached per anchor epoch and
    /// retried after corrections, since corrected anchors change overlap.
    pub fn validate_loop(
        &mut self,
        store: &SubmapStore,
        id_a: SubmapId,
        id_b: SubmapId,
        params: &ComposeParams,
    ) -> Result<bool, TopologyError> {
        assert_ne!(id_a, id_b, "loop candidate must join distinct submaps");
        let key = ordered(id_a, id_b);
        if self.has_edge(id_a, id_b) {
            self.validated.insert(key, self.anchor_epoch);
            return Ok(true);
        }
        if self.failed.get(&key) == Some(&self.anchor_epoch) {
            return Ok(false);
        }
        let a = store.get(id_a)?;
        let b = store.get(id_b)?;

        let pos_a: Vec<_> = a
            .roadmap
            .vertices
            .iter()
            .map(|v| a.anchor.transform_point(&v.position))
            .collect();
        let pos_b: Vec<_> = b
            .roadmap
            .vertices
            .iter()
            .map(|v| b.anchor.transform_point(&v.position))
            .collect();
        let coverage = PointIndex::with_points(
            params.coverage_radius.max(1e-6),
            pos_a.iter().chain(pos_b.iter()).copied(),
        );
        let index_b = PointIndex::with_points(
            params.connect_radius.max(1e-6),
            pos_b.iter().copied(),
        );

        let mut bridge = None;
        'outer: for (ia, pa) in pos_a.iter().enumerate() {
            for ib in index_b.within(pa, params.connect_radius) {
                if !params.check_segments
                    || segment_covered(&coverage, pa, &pos_b[ib], params.coverage_radius)
                {
                    bridge = Some((ia, ib));
                    break 'outer;
                }
            }
        }

        match bridge {
            Some((ia, ib)) => {
                // The bridge joins a vertex of A to a vertex of B by
                // construction; assert the connectivity claim explicitly.
                debug_assert!(ia < pos_a.len() && ib < pos_b.len());
                self.validated.insert(key, self.anchor_epoch);
                Ok(true)
            }
            None => {
                self.failed.insert(key, self.anchor_epoch);
                Ok(false)
            }
        }
    }

    /// Append a validated loop edge. Requires a passing [`validate_loop`]
    /// call at the current anchor epoch; re-adding is a no-op.
    pub fn add_validated_loop(
        &mut self,
        store: &SubmapStore,
        id_a: SubmapId,
        id_b: SubmapId,
    ) -> Result<(), TopologyError> {
        let key = ordered(id_a, id_b);
        if self.has_edge(id_a, id_b) {
            return Ok(());
        }
        if self.validated.get(&key) != Some(&self.anchor_epoch) {
            return Err(TopologyError::ValidationNotPerformed(id_a, id_b));
        }
        let a = store.get(key.0)?;
        let b = store.get(key.1)?;
        self.edges.push(TopoEdge {
            a: key.0,
            b: key.1,
            kind: EdgeKind::ValidatedLoop,
            length: a.anchor.translation_dist(&b.anchor),
        });
        debug_assert!(self.is_connected());
        Ok(())
    }

    /// Apply a loop correction: distribute the anchor-chain error linearly
    /// along the sequential chain between the loop's endpoints.
    ///
    /// `observed_relative` is the externally observed pose of the younger
    /// anchor relative to the older one (corrected frame). Submap `a + k` of
    /// the chain receives fraction `k / N` of the error, composed onto its
    /// anchor. No submap-local vertex coordinate is read or written; edge
    /// lengths are recomputed from the moved anchors.
    pub fn apply_correction(
        &mut self,
        store: &mut SubmapStore,
        loop_pair: (SubmapId, SubmapId),
        observed_relative: &Pose2,
    ) -> Result<CorrectionStats, TopologyError> {
        let (a, b) = ordered(loop_pair.0, loop_pair.1);
        let is_loop = self
            .edges
            .iter()
            .any(|e| ordered(e.a, e.b) == (a, b) && e.kind == EdgeKind::ValidatedLoop);
        if !is_loop {
            return Err(TopologyError::NoSuchLoopEdge(a, b));
        }

        let anchor_a = store.get(a)?.anchor;
        let anchor_b = store.get(b)?.anchor;
        let current_rel = anchor_b.relative_to(&anchor_a);
        let error = current_rel
            .inverse()
            .compose(&observed_relative.with_frame(current_rel.frame));

        let chain = b - a;
        for k in 1..=chain {
            let f = k as f64 / chain as f64;
            let frac = Pose2::new(error.x * f, error.y * f, error.theta * f, error.frame);
            let submap = store.get_mut(a + k)?;
            submap.anchor = submap.anchor.compose(&frac);
        }

        for e in &mut self.edges {
            let pa = store.get(e.a)?.anchor;
            let pb = store.get(e.b)?.anchor;
            e.length = pa.translation_dist(&pb);
        }
        self.anchor_epoch += 1;
        debug_assert!(self.is_connected());
        Ok(CorrectionStats {
            error,
            chain_len: chain as usize,
        })
    }
}
