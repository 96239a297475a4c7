//! Finite median spaces.
//!
//! A [`MedianSpace`] is a finite point set with an exact-rational metric in
//! which every triple of points has a unique median: the one point lying in
//! all three pairwise intervals, where the interval `[a,b]` is the set of
//! points `x` with `d(a,b) = d(a,x) + d(x,b)`.
//!
//! Two input forms are supported. A *graph* form is a weighted graph whose
//! shortest-path metric must be median; its edges must be minimal pairs
//! (each edge crosses exactly one wall). A *table* form is an explicit
//! ternary median operation; the metric is then derived by counting
//! separating walls. Both forms are fully validated at construction, after
//! which the space is immutable and all queries are pure.

use crate::pointset::PointSet;
use crate::rational::Rat;
use crate::walls::{self, WallSystem};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

/// Index of a point inside one space.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointId(u32);

impl PointId {
    pub fn new(index: usize) -> PointId {
        PointId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// A weighted edge of a graph-form space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: PointId,
    pub v: PointId,
    pub weight: Rat,
}

/// How the space was described.
#[derive(Clone)]
pub enum SpaceForm {
    /// Weighted graph; the metric is the shortest-path metric.
    Graph { edges: Vec<Edge> },
    /// Explicit median table, `median[x*n*n + y*n + z]`.
    Table { median: Vec<PointId> },
}

/// Validation failure for a candidate median space.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("space has no points")]
    Empty,
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("edge {u}--{v} has non-positive weight {weight}")]
    NonPositiveWeight { u: String, v: String, weight: Rat },
    #[error("graph is not connected")]
    Disconnected,
    #[error("edge {u}--{v} is redundant: it is not a minimal pair of the metric")]
    RedundantEdge { u: String, v: String },
    #[error("triple ({a},{b},{c}) has {count} medians instead of one")]
    NonMedian {
        a: String,
        b: String,
        c: String,
        count: usize,
    },
    #[error("median table violates m(x,x,y)=x at ({x},{y})")]
    NotIdempotent { x: String, y: String },
    #[error("median table is not symmetric at ({x},{y},{z})")]
    NotSymmetric { x: String, y: String, z: String },
    #[error("median table violates m(m(x,y,z),u,v)=m(x,m(y,u,v),m(z,u,v)) at ({x},{y},{z},{u},{v})")]
    NotDistributive {
        x: String,
        y: String,
        z: String,
        u: String,
        v: String,
    },
    #[error("median table is not total: missing entry for ({x},{y},{z})")]
    TableIncomplete { x: String, y: String, z: String },
    #[error("wall crossed by {u}--{v} carries weights {w1} and {w2}")]
    InconsistentWeights {
        u: String,
        v: String,
        w1: Rat,
        w2: Rat,
    },
    #[error("wall structure defect: {0}")]
    WallStructure(String),
    #[error("subset is not convex")]
    NotConvex,
}

/// A validated finite median space.
pub struct MedianSpace {
    labels: Vec<String>,
    by_label: HashMap<String, PointId>,
    form: SpaceForm,
    dist: Vec<Rat>,
    intervals: Vec<PointSet>,
    walls: WallSystem,
    max_edge_weight: Rat,
}

impl MedianSpace {
    /// Build and fully validate a graph-form space.
    pub fn from_graph(labels: Vec<String>, edges: Vec<Edge>) -> Result<MedianSpace, SpaceError> {
        let by_label = index_labels(&labels)?;
        let n = labels.len();
        let mut max_w = Rat::ZERO;
        for e in &edges {
            if !e.weight.is_positive() {
                return Err(SpaceError::NonPositiveWeight {
                    u: labels[e.u.index()].clone(),
                    v: labels[e.v.index()].clone(),
                    weight: e.weight,
                });
            }
            max_w = max_w.max(e.weight);
        }

        let dist = shortest_paths(n, &edges)?;
        let intervals = interval_table(n, &dist);
        check_unique_medians(&labels, &intervals, n)?;

        // Every edge must be a minimal pair realizing its weight, so that it
        // crosses exactly one wall.
        for e in &edges {
            let d = dist[e.u.index() * n + e.v.index()];
            let iv = &intervals[e.u.index() * n + e.v.index()];
            if d != e.weight || iv.len() != 2 {
                return Err(SpaceError::RedundantEdge {
                    u: labels[e.u.index()].clone(),
                    v: labels[e.v.index()].clone(),
                });
            }
        }

        let mut space = MedianSpace {
            labels,
            by_label,
            form: SpaceForm::Graph { edges },
            dist,
            intervals,
            walls: WallSystem::empty(),
            max_edge_weight: max_w,
        };
        space.walls = walls::enumerate(&space)?;
        walls::check_metric_measure(&space)?;
        Ok(space)
    }

    /// Build and fully validate a table-form space. `median` is the full
    /// `n^3` table in row-major `(x, y, z)` order.
    pub fn from_table(labels: Vec<String>, median: Vec<PointId>) -> Result<MedianSpace, SpaceError> {
        let by_label = index_labels(&labels)?;
        let n = labels.len();
        assert_eq!(median.len(), n * n * n, "median table size mismatch");
        let lab = |p: PointId| labels[p.index()].clone();
        let pid = |i: usize| PointId::new(i);
        let m = |x: usize, y: usize, z: usize| median[(x * n + y) * n + z];

        for x in 0..n {
            for y in 0..n {
                if m(x, x, y) != pid(x) {
                    return Err(SpaceError::NotIdempotent {
                        x: lab(pid(x)),
                        y: lab(pid(y)),
                    });
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let v = m(x, y, z);
                    if m(y, x, z) != v || m(x, z, y) != v {
                        return Err(SpaceError::NotSymmetric {
                            x: lab(pid(x)),
                            y: lab(pid(y)),
                            z: lab(pid(z)),
                        });
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let mxyz = m(x, y, z).index();
                    for u in 0..n {
                        for v in 0..n {
                            let lhs = m(mxyz, u, v);
                            let rhs = m(x, m(y, u, v).index(), m(z, u, v).index());
                            if lhs != rhs {
                                return Err(SpaceError::NotDistributive {
                                    x: lab(pid(x)),
                                    y: lab(pid(y)),
                                    z: lab(pid(z)),
                                    u: lab(pid(u)),
                                    v: lab(pid(v)),
                                });
                            }
                        }
                    }
                }
            }
        }

        // Algebra intervals: [a,b] = fixed points of m(a,b,·).
        let mut intervals = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut s = PointSet::empty(n);
                for x in 0..n {
                    if m(a, b, x) == pid(x) {
                        s.insert(pid(x));
                    }
                }
                intervals.push(s);
            }
        }
        check_unique_medians(&labels, &intervals, n)?;

        let mut space = MedianSpace {
            labels,
            by_label,
            form: SpaceForm::Table { median },
            dist: vec![Rat::ZERO; n * n],
            intervals,
            walls: WallSystem::empty(),
            max_edge_weight: Rat::ONE,
        };
        // Wall-counting metric with unit weights, then re-derive the metric
        // intervals and check they agree with the algebra intervals.
        space.walls = walls::enumerate(&space)?;
        let dist = walls::wall_count_metric(&space);
        let metric_intervals = interval_table(n, &dist);
        if metric_intervals != space.intervals {
            return Err(SpaceError::WallStructure(
                "table intervals disagree with the wall-counting metric".into(),
            ));
        }
        space.dist = dist;
        walls::check_metric_measure(&space)?;
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> + 'static {
        (0..self.len() as u32).map(PointId)
    }

    pub fn all_points(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn label(&self, p: PointId) -> &str {
        &self.labels[p.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn point(&self, label: &str) -> Option<PointId> {
        self.by_label.get(label).copied()
    }

    /// Resolve a label, reporting an error naming the missing point.
    pub fn require_point(&self, label: &str) -> Result<PointId, SpaceError> {
        self.point(label)
            .ok_or_else(|| SpaceError::UnknownPoint(label.to_string()))
    }

    pub fn form(&self) -> &SpaceForm {
        &self.form
    }

    pub fn dist(&self, a: PointId, b: PointId) -> Rat {
        self.dist[a.index() * self.len() + b.index()]
    }

    /// Distance from `x` to a nonempty set.
    pub fn dist_to_set(&self, x: PointId, set: &PointSet) -> Rat {
        set.iter()
            .map(|y| self.dist(x, y))
            .min()
            .expect("distance to empty set")
    }

    /// Distance between two nonempty sets.
    pub fn dist_sets(&self, a: &PointSet, b: &PointSet) -> Rat {
        a.iter()
            .map(|x| self.dist_to_set(x, b))
            .min()
            .expect("distance from empty set")
    }

    /// The metric interval `[a,b]`.
    pub fn interval(&self, a: PointId, b: PointId) -> &PointSet {
        &self.intervals[a.index() * self.len() + b.index()]
    }

    /// The unique median of a triple.
    pub fn median(&self, a: PointId, b: PointId, c: PointId) -> PointId {
        match &self.form {
            SpaceForm::Table { median } => {
                let n = self.len();
                median[(a.index() * n + b.index()) * n + c.index()]
            }
            SpaceForm::Graph { .. } => self
                .interval(a, b)
                .sole_common3(self.interval(b, c), self.interval(a, c))
                .expect("validated space lost its median"),
        }
    }

    pub fn walls(&self) -> &WallSystem {
        &self.walls
    }

    /// Largest edge weight: the discrete slack `δ` carried by the
    /// approximation checks.
    pub fn discrete_slack(&self) -> Rat {
        self.max_edge_weight
    }

    /// Is `set` closed under intervals?
    pub fn is_interval_closed(&self, set: &PointSet) -> bool {
        let members: Vec<PointId> = set.iter().collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if !self.interval(a, b).is_subset(set) {
                    return false;
                }
            }
        }
        true
    }

    /// The induced median space on a convex subset, together with the map
    /// from subspace points back to parent points.
    pub fn subspace(&self, members: &PointSet) -> Result<(MedianSpace, Vec<PointId>), SpaceError> {
        if members.is_empty() {
            return Err(SpaceError::Empty);
        }
        if !self.is_interval_closed(members) {
            return Err(SpaceError::NotConvex);
        }
        let to_parent: Vec<PointId> = members.iter().collect();
        let index_of: HashMap<PointId, usize> = to_parent
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect();
        let labels: Vec<String> = to_parent.iter().map(|&p| self.label(p).to_string()).collect();
        // Edges of the subspace are the minimal pairs of the induced metric.
        let mut edges = Vec::new();
        for (i, &a) in to_parent.iter().enumerate() {
            for &b in &to_parent[i + 1..] {
                let iv = self.interval(a, b);
                if iv.intersection(members).len() == 2 {
                    edges.push(Edge {
                        u: PointId::new(i),
                        v: PointId::new(index_of[&b]),
                        weight: self.dist(a, b),
                    });
                }
            }
        }
        let sub = MedianSpace::from_graph(labels, edges)?;
        Ok((sub, to_parent))
    }
}

fn index_labels(labels: &[String]) -> Result<HashMap<String, PointId>, SpaceError> {
    if labels.is_empty() {
        return Err(SpaceError::Empty);
    }
    let mut map = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if map.insert(l.clone(), PointId::new(i)).is_some() {
            return Err(SpaceError::DuplicateLabel(l.clone()));
        }
    }
    Ok(map)
}

fn shortest_paths(n: usize, edges: &[Edge]) -> Result<Vec<Rat>, SpaceError> {
    let mut adj: Vec<Vec<(u32, Rat)>> = vec![Vec::new(); n];
    for e in edges {
        adj[e.u.index()].push((e.v.0, e.weight));
        adj[e.v.index()].push((e.u.0, e.weight));
    }
    let mut dist = vec![Rat::ZERO; n * n];
    for src in 0..n {
        let mut d: Vec<Option<Rat>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        d[src] = Some(Rat::ZERO);
        heap.push(Reverse((Rat::ZERO, src as u32)));
        while let Some(Reverse((du, u))) = heap.pop() {
            if d[u as usize] != Some(du) {
                continue;
            }
            for &(v, w) in &adj[u as usize] {
                let cand = du + w;
                if d[v as usize].map_or(true, |cur| cand < cur) {
                    d[v as usize] = Some(cand);
                    heap.push(Reverse((cand, v)));
                }
            }
        }
        for (j, dj) in d.into_iter().enumerate() {
            dist[src * n + j] = dj.ok_or(SpaceError::Disconnected)?;
        }
    }
    Ok(dist)
}

fn interval_table(n: usize, dist: &[Rat]) -> Vec<PointSet> {
    let mut intervals = vec![PointSet::empty(n); n * n];
    for a in 0..n {
        for b in a..n {
            let dab = dist[a * n + b];
            let mut s = PointSet::empty(n);
            for x in 0..n {
                if dist[a * n + x] + dist[x * n + b] == dab {
                    s.insert(PointId::new(x));
                }
            }
            intervals[b * n + a] = s.clone();
            intervals[a * n + b] = s;
        }
    }
    intervals
}

fn check_unique_medians(
    labels: &[String],
    intervals: &[PointSet],
    n: usize,
) -> Result<(), SpaceError> {
    for a in 0..n {
        for b in a..n {
            let iab = &intervals[a * n + b];
            for c in b..n {
                let count = iab.count_common3(&intervals[b * n + c], &intervals[a * n + c]);
                if count != 1 {
                    return Err(SpaceError::NonMedian {
                        a: labels[a].clone(),
                        b: labels[b].clone(),
                        c: labels[c].clone(),
                        count,
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn unit_edges(pairs: &[(usize, usize)]) -> Vec<Edge> {
        pairs
            .iter()
            .map(|&(u, v)| Edge {
                u: PointId::new(u),
                v: PointId::new(v),
                weight: Rat::ONE,
            })
            .collect()
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{}", i + 1)).collect()
    }

    #[test]
    fn path_is_median() {
        let s = fixtures::path(4);
        let (v1, v4) = (s.point("v1").unwrap(), s.point("v4").unwrap());
        assert_eq!(s.dist(v1, v4), Rat::int(3));
        assert_eq!(s.interval(v1, v4).len(), 4);
        let v2 = s.point("v2").unwrap();
        assert_eq!(s.median(v1, v4, v2), v2);
    }

    #[test]
    fn five_cycle_is_rejected_with_witness() {
        let err = MedianSpace::from_graph(
            labels(5),
            unit_edges(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
        )
        .unwrap_err();
        match err {
            SpaceError::NonMedian { count, .. } => assert_ne!(count, 1),
            other => panic!("expected NonMedian, got {other:?}"),
        }
    }

    #[test]
    fn k4_minus_edge_is_rejected() {
        // Complete graph on {a,b,c,d} minus the edge c--d.
        let err = MedianSpace::from_graph(
            labels(4),
            unit_edges(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]),
        )
        .unwrap_err();
        assert!(matches!(err, SpaceError::NonMedian { .. }));
    }

    #[test]
    fn disconnected_rejected() {
        let err = MedianSpace::from_graph(labels(3), unit_edges(&[(0, 1)])).unwrap_err();
        assert_eq!(err, SpaceError::Disconnected);
    }

    #[test]
    fn non_positive_weight_rejected() {
        let err = MedianSpace::from_graph(
            labels(2),
            vec![Edge {
                u: PointId::new(0),
                v: PointId::new(1),
                weight: Rat::ZERO,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, SpaceError::NonPositiveWeight { .. }));
    }

    #[test]
    fn redundant_edge_rejected() {
        // Triangle with one slack edge of weight 2.
        let mut edges = unit_edges(&[(0, 1), (1, 2)]);
        edges.push(Edge {
            u: PointId::new(0),
            v: PointId::new(2),
            weight: Rat::int(2),
        });
        let err = MedianSpace::from_graph(labels(3), edges).unwrap_err();
        assert!(matches!(err, SpaceError::RedundantEdge { .. }));
    }

    #[test]
    fn hypercube_medians_are_coordinatewise_majority() {
        let q3 = fixtures::hypercube(3);
        let p = |s: &str| q3.point(s).unwrap();
        assert_eq!(q3.median(p("000"), p("011"), p("101")), p("001"));
        assert_eq!(q3.median(p("000"), p("000"), p("111")), p("000"));
        assert_eq!(q3.dist(p("000"), p("110")), Rat::int(2));
    }

    #[test]
    fn grid_median_is_coordinatewise() {
        let g = fixtures::grid(4, 4, Rat::ONE);
        let p = |x: i64, y: i64| g.point(&fixtures::grid_label(x, y)).unwrap();
        // Oracle: coordinatewise one-dimensional medians.
        assert_eq!(g.median(p(0, 0), p(4, 2), p(2, 4)), p(2, 2));
        // Interval of opposite corners of a 2x2 grid is the whole grid.
        let g2 = fixtures::grid(2, 2, Rat::ONE);
        let q = |x: i64, y: i64| g2.point(&fixtures::grid_label(x, y)).unwrap();
        assert_eq!(g2.interval(q(0, 0), q(2, 2)).len(), 9);
    }

    #[test]
    fn table_roundtrip_of_graph_space() {
        // Build the median table of P3 and validate it as a table space.
        let p3 = fixtures::path(3);
        let n = p3.len();
        let mut table = Vec::with_capacity(n * n * n);
        for x in p3.points() {
            for y in p3.points() {
                for z in p3.points() {
                    table.push(p3.median(x, y, z));
                }
            }
        }
        let t = MedianSpace::from_table(p3.labels().to_vec(), table).unwrap();
        for a in t.points() {
            for b in t.points() {
                assert_eq!(
                    t.dist(a, b),
                    p3.dist(a, b),
                    "wall-counting metric must match unit path metric"
                );
            }
        }
    }

    #[test]
    fn broken_table_rejected() {
        // Constant-first-argument "table" fails symmetry or idempotence.
        let n = 2usize;
        let median: Vec<PointId> = (0..n * n * n).map(|_| PointId::new(0)).collect();
        let err = MedianSpace::from_table(labels(2), median).unwrap_err();
        assert!(matches!(
            err,
            SpaceError::NotIdempotent { .. } | SpaceError::NotSymmetric { .. }
        ));
    }

    #[test]
    fn subspace_of_convex_set() {
        let g = fixtures::grid(2, 2, Rat::ONE);
        let p = |x: i64, y: i64| g.point(&fixtures::grid_label(x, y)).unwrap();
        let col = PointSet::from_iter(g.len(), [p(0, 0), p(0, 1), p(0, 2)]);
        let (sub, back) = g.subspace(&col).unwrap();
        assert_eq!(sub.len(), 3);
        assert_eq!(back.len(), 3);
        // Non-convex subsets are refused.
        let bent = PointSet::from_iter(g.len(), [p(0, 0), p(1, 1)]);
        assert!(matches!(g.subspace(&bent), Err(SpaceError::NotConvex)));
    }
}
