//! Halfspaces and walls of a finite median space.
//!
//! A halfspace is a convex set with convex complement; a wall is the
//! unordered pair of a halfspace and its complement, carrying a positive
//! weight. On graph-form spaces walls are enumerated as Θ-classes of edges
//! (two edges are equivalent when `d(u,x) + d(v,y) ≠ d(u,y) + d(v,x)`); on
//! table-form spaces by brute force over bipartitions with both sides
//! convex. The sum of the weights of the walls separating two points always
//! equals their distance; this is checked at construction.

use crate::convex;
use crate::pointset::PointSet;
use crate::rational::Rat;
use crate::space::{MedianSpace, PointId, SpaceError, SpaceForm};
use std::sync::OnceLock;

/// One side of a wall, as an index pair into the wall table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Halfspace {
    pub wall: usize,
    pub side: u8,
}

impl Halfspace {
    pub fn complement(self) -> Halfspace {
        Halfspace {
            wall: self.wall,
            side: 1 - self.side,
        }
    }
}

/// A wall: a complementary pair of halfspaces with a weight.
pub struct Wall {
    weight: Rat,
    sides: [PointSet; 2],
    /// Crossing edges as (side-0 endpoint, side-1 endpoint), sorted.
    crossings: Vec<(PointId, PointId)>,
    /// Endpoints of the crossing edges on each side.
    boundaries: [PointSet; 2],
}

/// All walls of one space, in a deterministic order (sorted by their
/// minimal crossing edge).
pub struct WallSystem {
    walls: Vec<Wall>,
    rank: OnceLock<usize>,
}

impl WallSystem {
    pub(crate) fn empty() -> WallSystem {
        WallSystem {
            walls: Vec::new(),
            rank: OnceLock::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.walls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walls.is_empty()
    }

    pub fn weight(&self, wall: usize) -> Rat {
        self.walls[wall].weight
    }

    /// The point set of a halfspace.
    pub fn side(&self, h: Halfspace) -> &PointSet {
        &self.walls[h.wall].sides[h.side as usize]
    }

    /// The discrete hyperplane on the `h` side: points of `h` incident to a
    /// crossing edge of its wall.
    pub fn boundary(&self, h: Halfspace) -> &PointSet {
        &self.walls[h.wall].boundaries[h.side as usize]
    }

    pub fn crossings(&self, wall: usize) -> &[(PointId, PointId)] {
        &self.walls[wall].crossings
    }

    /// Every halfspace, both sides of every wall.
    pub fn halfspaces(&self) -> impl Iterator<Item = Halfspace> + '_ {
        (0..self.walls.len()).flat_map(|wall| {
            [Halfspace { wall, side: 0 }, Halfspace { wall, side: 1 }].into_iter()
        })
    }

    /// The halfspace of `wall` containing `p`.
    pub fn side_of(&self, wall: usize, p: PointId) -> Halfspace {
        let side = if self.walls[wall].sides[0].contains(p) { 0 } else { 1 };
        Halfspace { wall, side }
    }

    /// Does `wall` separate `a` from `b`?
    pub fn separates(&self, wall: usize, a: PointId, b: PointId) -> bool {
        self.walls[wall].sides[0].contains(a) != self.walls[wall].sides[0].contains(b)
    }
}

/// Failures of halfspace-level operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WallsError {
    #[error("halfspace does not meet the set")]
    EmptyIntersection,
    #[error("sets are not disjoint")]
    NotDisjoint,
    #[error("sets are not convex")]
    NotConvex,
    #[error("family contains a nested pair ({0:?}, {1:?})")]
    PrecondViolated(Halfspace, Halfspace),
}

/// Relation between two halfspaces. Exactly one case holds for any pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    Equal,
    Complementary,
    Nested(Nesting),
    /// The two halfspaces do not intersect.
    Disjoint,
    /// All four intersections of sides are nonempty.
    Transverse,
}

/// The three non-crossing relations between distinct, non-complementary
/// walls, besides disjointness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nesting {
    FirstInSecond,
    SecondInFirst,
    /// The complements are disjoint: the two halfspaces cover the space.
    ComplementsDisjoint,
}

/// A set of separating halfspaces with its total weight.
#[derive(Debug, Clone)]
pub struct Separation {
    /// For each separating wall, the side containing the second argument.
    pub halfspaces: Vec<Halfspace>,
    pub measure: Rat,
}

pub(crate) fn enumerate(space: &MedianSpace) -> Result<WallSystem, SpaceError> {
    let walls = match space.form() {
        SpaceForm::Graph { edges } => theta_classes(space, edges)?,
        SpaceForm::Table { .. } => {
            let sides = convex_bipartitions(space);
            sides
                .into_iter()
                .map(|(s0, s1)| build_wall(space, s0, s1, Rat::ONE))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let mut walls = walls;
    walls.sort_by_key(|w| w.crossings.first().copied());
    Ok(WallSystem {
        walls,
        rank: OnceLock::new(),
    })
}

fn theta_classes(space: &MedianSpace, edges: &[crate::space::Edge]) -> Result<Vec<Wall>, SpaceError> {
    let m = edges.len();
    let mut class = (0..m).collect::<Vec<_>>();
    fn find(class: &mut [usize], i: usize) -> usize {
        if class[i] != i {
            class[i] = find(class, class[i]);
        }
        class[i]
    }
    for i in 0..m {
        for j in i + 1..m {
            let (e, f) = (&edges[i], &edges[j]);
            let same = space.dist(e.u, f.u) + space.dist(e.v, f.v)
                != space.dist(e.u, f.v) + space.dist(e.v, f.u);
            if same {
                let (a, b) = (find(&mut class, i), find(&mut class, j));
                class[a] = b;
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = vec![usize::MAX; m];
    for i in 0..m {
        let root = find(&mut class, i);
        if group_of[root] == usize::MAX {
            group_of[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of[root]].push(i);
    }

    let n = space.len();
    let mut walls = Vec::with_capacity(groups.len());
    for group in &groups {
        let w0 = edges[group[0]].weight;
        for &i in group {
            if edges[i].weight != w0 {
                return Err(SpaceError::InconsistentWeights {
                    u: space.label(edges[i].u).to_string(),
                    v: space.label(edges[i].v).to_string(),
                    w1: w0,
                    w2: edges[i].weight,
                });
            }
        }
        // Split the graph along the class.
        let in_class: Vec<bool> = {
            let mut f = vec![false; m];
            for &i in group {
                f[i] = true;
            }
            f
        };
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if !in_class[i] {
                adj[e.u.index()].push(e.v.index());
                adj[e.v.index()].push(e.u.index());
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut ncomp = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = ncomp;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = ncomp;
                        stack.push(v);
                    }
                }
            }
            ncomp += 1;
        }
        if ncomp != 2 {
            return Err(SpaceError::WallStructure(format!(
                "edge class does not split the space in two (got {ncomp} parts)"
            )));
        }
        let mut s0 = PointSet::empty(n);
        let mut s1 = PointSet::empty(n);
        for p in 0..n {
            if comp[p] == 0 {
                s0.insert(PointId::new(p));
            } else {
                s1.insert(PointId::new(p));
            }
        }
        // Normalize: side 0 holds the smaller endpoint of the minimal
        // crossing edge.
        let anchor = group
            .iter()
            .map(|&i| {
                let e = &edges[i];
                (e.u.min(e.v), e.u.max(e.v))
            })
            .min()
            .expect("nonempty class");
        if !s0.contains(anchor.0) {
            std::mem::swap(&mut s0, &mut s1);
        }
        walls.push(build_wall(space, s0, s1, w0)?);
    }
    Ok(walls)
}

fn build_wall(
    space: &MedianSpace,
    s0: PointSet,
    s1: PointSet,
    weight: Rat,
) -> Result<Wall, SpaceError> {
    if !space.is_interval_closed(&s0) || !space.is_interval_closed(&s1) {
        return Err(SpaceError::WallStructure(
            "wall side is not convex".into(),
        ));
    }
    // Crossing edges are the minimal pairs across the wall.
    let mut crossings = Vec::new();
    for a in s0.iter() {
        for b in s1.iter() {
            if space.interval(a, b).len() == 2 {
                crossings.push((a, b));
            }
        }
    }
    crossings.sort();
    let mut b0 = PointSet::empty(space.len());
    let mut b1 = PointSet::empty(space.len());
    for &(a, b) in &crossings {
        b0.insert(a);
        b1.insert(b);
    }
    if !space.is_interval_closed(&b0) || !space.is_interval_closed(&b1) {
        return Err(SpaceError::WallStructure(
            "wall boundary is not convex".into(),
        ));
    }
    Ok(Wall {
        weight,
        sides: [s0, s1],
        crossings,
        boundaries: [b0, b1],
    })
}

/// Brute-force wall enumeration: all bipartitions with both sides convex.
/// Exponential; used for table-form spaces and as an oracle on small ones.
pub fn convex_bipartitions(space: &MedianSpace) -> Vec<(PointSet, PointSet)> {
    let n = space.len();
    assert!(n <= 24, "brute-force wall enumeration needs <= 24 points");
    let mut out = Vec::new();
    // Fix point 0 on side 0 so each wall appears once.
    for bits in 0u32..(1u32 << (n - 1)) {
        let mut s1 = PointSet::empty(n);
        for p in 1..n {
            if bits & (1 << (p - 1)) != 0 {
                s1.insert(PointId::new(p));
            }
        }
        if s1.is_empty() {
            continue;
        }
        let s0 = s1.complement();
        if space.is_interval_closed(&s0) && space.is_interval_closed(&s1) {
            out.push((s0, s1));
        }
    }
    out
}

pub(crate) fn check_metric_measure(space: &MedianSpace) -> Result<(), SpaceError> {
    let walls = space.walls();
    for a in space.points() {
        for b in space.points() {
            if a >= b {
                continue;
            }
            let total: Rat = (0..walls.len())
                .filter(|&w| walls.separates(w, a, b))
                .map(|w| walls.weight(w))
                .sum();
            if total != space.dist(a, b) {
                return Err(SpaceError::WallStructure(format!(
                    "wall measure between {} and {} is {} but distance is {}",
                    space.label(a),
                    space.label(b),
                    total,
                    space.dist(a, b)
                )));
            }
        }
    }
    Ok(())
}

/// Unit-weight wall-counting metric, used to derive distances for
/// table-form spaces.
pub(crate) fn wall_count_metric(space: &MedianSpace) -> Vec<Rat> {
    let n = space.len();
    let walls = space.walls();
    let mut dist = vec![Rat::ZERO; n * n];
    for a in space.points() {
        for b in space.points() {
            if a >= b {
                continue;
            }
            let d = Rat::int(
                (0..walls.len())
                    .filter(|&w| walls.separates(w, a, b))
                    .count() as i64,
            );
            dist[a.index() * n + b.index()] = d;
            dist[b.index() * n + a.index()] = d;
        }
    }
    dist
}

/// Classify the relation between two halfspaces of one space.
pub fn classify_pair(space: &MedianSpace, h1: Halfspace, h2: Halfspace) -> PairClass {
    if h1 == h2 {
        return PairClass::Equal;
    }
    if h1 == h2.complement() {
        return PairClass::Complementary;
    }
    let walls = space.walls();
    let (s1, s2) = (walls.side(h1), walls.side(h2));
    let (c1, c2) = (walls.side(h1.complement()), walls.side(h2.complement()));
    if s1 == s2 {
        return PairClass::Equal;
    }
    if s1 == c2 {
        return PairClass::Complementary;
    }
    match (
        s1.intersects(s2),
        c1.intersects(s2),
        s1.intersects(c2),
        c1.intersects(c2),
    ) {
        (true, true, true, true) => PairClass::Transverse,
        (false, _, _, _) => PairClass::Disjoint,
        (_, _, false, _) => PairClass::Nested(Nesting::FirstInSecond),
        (_, false, _, _) => PairClass::Nested(Nesting::SecondInFirst),
        (_, _, _, false) => PairClass::Nested(Nesting::ComplementsDisjoint),
    }
}

/// Is the wall of `h` transverse to `set` (both sides meet it)?
pub fn transverse_to_set(space: &MedianSpace, h: Halfspace, set: &PointSet) -> bool {
    let walls = space.walls();
    walls.side(h).intersects(set) && walls.side(h.complement()).intersects(set)
}

/// Rank: the maximum size of a family of pairwise transverse halfspaces,
/// computed exactly as a maximum clique in the wall crossing graph.
pub fn rank(space: &MedianSpace) -> usize {
    let walls = space.walls();
    *walls.rank.get_or_init(|| {
        let w = walls.len();
        let mut crossing: Vec<PointSet> = vec![PointSet::empty(w); w];
        for i in 0..w {
            for j in i + 1..w {
                let t = classify_pair(
                    space,
                    Halfspace { wall: i, side: 0 },
                    Halfspace { wall: j, side: 0 },
                ) == PairClass::Transverse;
                if t {
                    crossing[i].insert(PointId::new(j));
                    crossing[j].insert(PointId::new(i));
                }
            }
        }
        // Clique in the crossing graph = independent set in its complement.
        let conflict: Vec<PointSet> = (0..w)
            .map(|i| {
                let mut c = crossing[i].complement();
                c.remove(PointId::new(i));
                c
            })
            .collect();
        max_independent_set(&conflict).len()
    })
}

/// Exact maximum independent set of the conflict graph, by branch and
/// bound. `conflict[i]` lists the vertices incompatible with `i`.
pub fn max_independent_set(conflict: &[PointSet]) -> Vec<usize> {
    let n = conflict.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best: Vec<usize> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    // Branch on highest-degree vertices first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(conflict[i].len()));
    let mut rank_of = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank_of[i] = r;
    }

    fn recurse(
        conflict: &[PointSet],
        order: &[usize],
        start: usize,
        candidates: &PointSet,
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if current.len() + candidates.len() <= best.len() {
            return;
        }
        if candidates.is_empty() {
            if current.len() > best.len() {
                *best = current.clone();
            }
            return;
        }
        for r in start..order.len() {
            let v = order[r];
            if !candidates.contains(PointId::new(v)) {
                continue;
            }
            if current.len() + (candidates.len() - 0) <= best.len() {
                return;
            }
            // Include v.
            let mut next = candidates.clone();
            next.remove(PointId::new(v));
            let reduced = next.difference(&conflict[v]);
            current.push(v);
            recurse(conflict, order, r + 1, &reduced, current, best);
            current.pop();
            // Exclude v.
            let mut without = candidates.clone();
            without.remove(PointId::new(v));
            recurse(conflict, order, r + 1, &without, current, best);
            return;
        }
        if current.len() > best.len() {
            *best = current.clone();
        }
    }

    let all = PointSet::full(n);
    recurse(conflict, &order, 0, &all, &mut current, &mut best);
    best.sort();
    best
}

/// The halfspaces separating `from` from `to`: each contains all of `to`
/// and none of `from`. For singletons the measure equals the distance.
pub fn separation(space: &MedianSpace, from: &PointSet, to: &PointSet) -> Separation {
    let walls = space.walls();
    let mut halfspaces = Vec::new();
    let mut measure = Rat::ZERO;
    for wall in 0..walls.len() {
        for side in 0..2u8 {
            let h = Halfspace { wall, side };
            if to.is_subset(walls.side(h)) && from.is_subset(walls.side(h.complement())) {
                halfspaces.push(h);
                measure += walls.weight(wall);
            }
        }
    }
    Separation { halfspaces, measure }
}

/// Halfspaces separating point `b` from point `a` (containing `b`).
pub fn separation_points(space: &MedianSpace, a: PointId, b: PointId) -> Separation {
    let n = space.len();
    separation(
        space,
        &PointSet::singleton(n, a),
        &PointSet::singleton(n, b),
    )
}

/// Depth of `h` inside `set`: the largest distance from a point of
/// `h ∩ set` to the complement of `h`.
pub fn depth(space: &MedianSpace, h: Halfspace, set: &PointSet) -> Result<Rat, WallsError> {
    let walls = space.walls();
    let inside = walls.side(h).intersection(set);
    if inside.is_empty() {
        return Err(WallsError::EmptyIntersection);
    }
    let comp = walls.side(h.complement());
    Ok(inside
        .iter()
        .map(|x| space.dist_to_set(x, comp))
        .max()
        .unwrap())
}

/// Depth measured to the discrete hyperplane bounding `h` instead of to
/// the complement. The two differ by exactly one wall weight.
pub fn depth_to_boundary(
    space: &MedianSpace,
    h: Halfspace,
    set: &PointSet,
) -> Result<Rat, WallsError> {
    let walls = space.walls();
    let inside = walls.side(h).intersection(set);
    if inside.is_empty() {
        return Err(WallsError::EmptyIntersection);
    }
    let boundary = walls.boundary(h);
    Ok(inside
        .iter()
        .map(|x| space.dist_to_set(x, boundary))
        .max()
        .unwrap())
}

/// The halfspaces branched at `x`: both sides of every wall that has a
/// crossing edge incident to `x`.
pub fn branched_at(space: &MedianSpace, x: PointId) -> Vec<Halfspace> {
    let walls = space.walls();
    let mut out = Vec::new();
    for wall in 0..walls.len() {
        if walls.crossings(wall).iter().any(|&(a, b)| a == x || b == x) {
            out.push(Halfspace { wall, side: 0 });
            out.push(Halfspace { wall, side: 1 });
        }
    }
    out
}

/// Find three pairwise disjoint halfspaces in `family`, if any.
pub fn facing_triple(space: &MedianSpace, family: &[Halfspace]) -> Option<[Halfspace; 3]> {
    let walls = space.walls();
    let k = family.len();
    for i in 0..k {
        for j in i + 1..k {
            if !walls.side(family[i]).is_disjoint(walls.side(family[j])) {
                continue;
            }
            for l in j + 1..k {
                if walls.side(family[l]).is_disjoint(walls.side(family[i]))
                    && walls.side(family[l]).is_disjoint(walls.side(family[j]))
                {
                    return Some([family[i], family[j], family[l]]);
                }
            }
        }
    }
    None
}

/// A facing triple that is pairwise strongly separated and admits a common
/// gate: a point `c` with `m(x1,x2,x3) = c` for every choice of `x_i` in
/// the three halfspaces (checked exhaustively).
pub fn strong_facing_triple(
    space: &MedianSpace,
    family: &[Halfspace],
) -> Option<([Halfspace; 3], PointId)> {
    let walls = space.walls();
    let k = family.len();
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                let triple = [family[i], family[j], family[l]];
                let sides = [
                    walls.side(triple[0]),
                    walls.side(triple[1]),
                    walls.side(triple[2]),
                ];
                if !sides[0].is_disjoint(sides[1])
                    || !sides[0].is_disjoint(sides[2])
                    || !sides[1].is_disjoint(sides[2])
                {
                    continue;
                }
                let ss = |a: &PointSet, b: &PointSet| {
                    strongly_separated(space, a, b) == Ok(true)
                };
                if !ss(sides[0], sides[1]) || !ss(sides[0], sides[2]) || !ss(sides[1], sides[2]) {
                    continue;
                }
                if let Some(c) = common_gate(space, sides) {
                    return Some((triple, c));
                }
            }
        }
    }
    None
}

fn common_gate(space: &MedianSpace, sides: [&PointSet; 3]) -> Option<PointId> {
    let mut gate: Option<PointId> = None;
    for x1 in sides[0].iter() {
        for x2 in sides[1].iter() {
            for x3 in sides[2].iter() {
                let m = space.median(x1, x2, x3);
                match gate {
                    None => gate = Some(m),
                    Some(g) if g != m => return None,
                    _ => {}
                }
            }
        }
    }
    // The gate lies outside all three halfspaces.
    let g = gate?;
    if sides.iter().any(|s| s.contains(g)) {
        return None;
    }
    Some(g)
}

/// Are two disjoint convex sets strongly separated (no wall transverse to
/// both)? Also checks, as an internal invariant, that this is equivalent
/// to both mutual gate projections being singletons.
pub fn strongly_separated(
    space: &MedianSpace,
    c1: &PointSet,
    c2: &PointSet,
) -> Result<bool, WallsError> {
    if c1.intersects(c2) {
        return Err(WallsError::NotDisjoint);
    }
    if !space.is_interval_closed(c1) || !space.is_interval_closed(c2) {
        return Err(WallsError::NotConvex);
    }
    let walls = space.walls();
    let mut separated = true;
    for wall in 0..walls.len() {
        let h = Halfspace { wall, side: 0 };
        if transverse_to_set(space, h, c1) && transverse_to_set(space, h, c2) {
            separated = false;
            break;
        }
    }
    let g1 = convex::gate_set(space, c1, c2);
    let g2 = convex::gate_set(space, c2, c1);
    assert_eq!(
        separated,
        g1.len() == 1 && g2.len() == 1,
        "strong separation must match singleton gates"
    );
    Ok(separated)
}

/// Maximum-cardinality pairwise disjoint subfamily of a family whose pairs
/// are all transverse or disjoint. Exact (branch and bound).
pub fn extract_disjoint_family(
    space: &MedianSpace,
    family: &[Halfspace],
) -> Result<Vec<Halfspace>, WallsError> {
    let k = family.len();
    for i in 0..k {
        for j in i + 1..k {
            match classify_pair(space, family[i], family[j]) {
                PairClass::Transverse | PairClass::Disjoint | PairClass::Complementary => {}
                PairClass::Equal => {}
                PairClass::Nested(_) => {
                    return Err(WallsError::PrecondViolated(family[i], family[j]));
                }
            }
        }
    }
    Ok(max_disjoint_subfamily(space, family))
}

/// Maximum pairwise disjoint subfamily of an arbitrary family (no
/// precondition). Conflicts are pairs of halfspaces that intersect.
pub fn max_disjoint_subfamily(space: &MedianSpace, family: &[Halfspace]) -> Vec<Halfspace> {
    let walls = space.walls();
    let k = family.len();
    let mut conflict = vec![PointSet::empty(k); k];
    for i in 0..k {
        for j in i + 1..k {
            let meet = walls.side(family[i]).intersects(walls.side(family[j]))
                || family[i] == family[j];
            if meet {
                conflict[i].insert(PointId::new(j));
                conflict[j].insert(PointId::new(i));
            }
        }
    }
    max_independent_set(&conflict)
        .into_iter()
        .map(|i| family[i])
        .collect()
}
