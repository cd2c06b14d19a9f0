//! Builders for the minimal universally rigid frameworks: planar fans,
//! spatial tetrahedron chains, and two-center multi-fans.
//!
//! All builders are deterministic functions of the point set. The planar
//! construction picks a hull vertex as center and fans the remaining nodes
//! around it; the spatial construction hangs tetrahedra off a hull edge and
//! orders the other nodes by angle in the projection along that edge. In
//! both cases a single closing edge between the two extreme peripheral
//! nodes brings the count to d·n − d(d+1)/2 + 1.

use crate::error::{Error, Result};
use crate::geometry::{
    convex_hull_2d, convex_hull_3d, select_center_2d, select_central_edge_3d, Configuration,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A bar-joint framework: a configuration plus a simple edge list.
///
/// Edges are stored sorted, each pair as (i, j) with i < j.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework {
    config: Configuration,
    edges: Vec<[usize; 2]>,
}

pub fn edge(a: usize, b: usize) -> [usize; 2] {
    [a.min(b), a.max(b)]
}

impl Framework {
    pub fn new(config: Configuration, edges: impl IntoIterator<Item = [usize; 2]>) -> Result<Self> {
        let n = config.len();
        let set: BTreeSet<[usize; 2]> = edges.into_iter().map(|[a, b]| edge(a, b)).collect();
        for &[a, b] in &set {
            if a == b || b >= n {
                return Err(Error::DegenerateInput(format!("bad edge ({a},{b}) for n={n}")));
            }
        }
        Ok(Self { config, edges: set.into_iter().collect() })
    }

    pub fn complete(config: Configuration) -> Self {
        let n = config.len();
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| [i, j])).collect();
        Self { config, edges }
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.config.dim()
    }

    pub fn len(&self) -> usize {
        self.config.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&edge(a, b)).is_ok()
    }

    pub fn is_complete(&self) -> bool {
        let n = self.len();
        self.edges.len() == n * (n - 1) / 2
    }
}

/// Edge count of the minimal universally rigid construction, valid for
/// n ≥ d+2: 2n−2 in the plane, 3n−5 in space.
pub fn minimal_edge_count(n: usize, dim: usize) -> usize {
    dim * n - dim * (dim + 1) / 2 + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FanKind {
    Fan2d,
    Fan3d,
    Multifan2d,
    Multifan3d,
}

/// Combinatorial witness of a construction: which node(s) or edge(s) seed
/// the fan(s), the peripheral order, the fold edges, and the closing edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanDecomposition {
    pub kind: FanKind,
    /// Center node per fan (2D kinds); empty for 3D kinds.
    pub center_nodes: Vec<usize>,
    /// Central edge per fan (3D kinds); empty for 2D kinds.
    pub central_edges: Vec<[usize; 2]>,
    /// The two nodes joined by the closing edge, in chain order.
    pub neighbors: [usize; 2],
    /// Peripheral node sequence per fan, in angular order.
    pub peripherals: Vec<Vec<usize>>,
    /// Hinge edges between consecutive triangles (or tetrahedra) of the
    /// chain, in chain order.
    pub folds: Vec<[usize; 2]>,
    pub closing_edge: [usize; 2],
}

impl FanDecomposition {
    pub fn fold_count(&self) -> usize {
        self.folds.len()
    }
}

pub(crate) fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn vec2(from: &[f64], to: &[f64]) -> [f64; 2] {
    [to[0] - from[0], to[1] - from[1]]
}

/// Signed angle from `a` to `v` in (-pi, pi], counterclockwise positive.
pub(crate) fn signed_angle(a: [f64; 2], v: [f64; 2]) -> f64 {
    cross2(a, v).atan2(dot2(a, v))
}

/// Orthonormal frame anchored at a central edge: the unit axis along the
/// edge plus an in-plane basis with `e1` pointing at the first neighbor's
/// projection, so that neighbor sits at angle zero.
pub(crate) struct CentralFrame {
    pub origin: [f64; 3],
    pub axis: [f64; 3],
    pub e1: [f64; 3],
    pub e2: [f64; 3],
}

impl CentralFrame {
    pub fn height(&self, p: &[f64]) -> f64 {
        (0..3).map(|k| (p[k] - self.origin[k]) * self.axis[k]).sum()
    }

    /// Components of the axis-orthogonal part of `p` in the (e1, e2) basis.
    pub fn planar(&self, p: &[f64]) -> [f64; 2] {
        let h = self.height(p);
        let mut q = [0.0; 3];
        for k in 0..3 {
            q[k] = p[k] - self.origin[k] - h * self.axis[k];
        }
        [
            q[0] * self.e1[0] + q[1] * self.e1[1] + q[2] * self.e1[2],
            q[0] * self.e2[0] + q[1] * self.e2[1] + q[2] * self.e2[2],
        ]
    }

    /// Point at the given height along the axis, radius, and in-plane angle.
    pub fn embed(&self, h: f64, rho: f64, beta: f64) -> [f64; 3] {
        let (c, s) = (beta.cos(), beta.sin());
        let mut p = [0.0; 3];
        for k in 0..3 {
            p[k] = self.origin[k] + h * self.axis[k] + rho * (c * self.e1[k] + s * self.e2[k]);
        }
        p
    }
}

pub(crate) fn central_frame(
    config: &Configuration,
    a: usize,
    b: usize,
    u: usize,
) -> CentralFrame {
    let pa = config.point(a);
    let pb = config.point(b);
    let origin = [pa[0], pa[1], pa[2]];
    let mut axis = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
    let alen = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    for c in &mut axis {
        *c /= alen;
    }
    let pu = config.point(u);
    let d = [pu[0] - origin[0], pu[1] - origin[1], pu[2] - origin[2]];
    let h = d[0] * axis[0] + d[1] * axis[1] + d[2] * axis[2];
    let proj = [d[0] - h * axis[0], d[1] - h * axis[1], d[2] - h * axis[2]];
    let plen = (proj[0] * proj[0] + proj[1] * proj[1] + proj[2] * proj[2]).sqrt();
    let e1 = [proj[0] / plen, proj[1] / plen, proj[2] / plen];
    let e2 = [
        axis[1] * e1[2] - axis[2] * e1[1],
        axis[2] * e1[0] - axis[0] * e1[2],
        axis[0] * e1[1] - axis[1] * e1[0],
    ];
    CentralFrame { origin, axis, e1, e2 }
}

/// Nonconvex Grünbaum polygon on a planar point set.
pub fn build_grunbaum_2d(config: &Configuration) -> Result<(Framework, FanDecomposition)> {
    if config.dim() != 2 {
        return Err(Error::DegenerateInput("planar builder needs dim 2".into()));
    }
    config.require_distinct_points()?;
    let hull = convex_hull_2d(config)?;
    let (center, (prev, next)) = select_center_2d(&hull);
    let n = config.len();
    let c = config.point(center);
    let a = vec2(c, config.point(prev));

    // remaining nodes ordered by clockwise angle from the direction of the
    // predecessor neighbor; the two neighbors bound the sweep
    let mut middle: Vec<usize> = (0..n).filter(|&i| i != center && i != prev && i != next).collect();
    let key = |i: usize| {
        let cw = (-signed_angle(a, vec2(c, config.point(i)))).max(0.0);
        (cw, config.dist2(center, i))
    };
    middle.sort_by(|&i, &j| {
        let (ki, kj) = (key(i), key(j));
        ki.partial_cmp(&kj).unwrap().then(i.cmp(&j))
    });
    let mut seq = Vec::with_capacity(n - 1);
    seq.push(prev);
    seq.extend_from_slice(&middle);
    seq.push(next);

    let mut edges = BTreeSet::new();
    for &x in &seq {
        edges.insert(edge(center, x));
    }
    for w in seq.windows(2) {
        edges.insert(edge(w[0], w[1]));
    }
    edges.insert(edge(prev, next));

    let folds = seq[1..seq.len() - 1].iter().map(|&x| edge(center, x)).collect();
    let fan = FanDecomposition {
        kind: FanKind::Fan2d,
        center_nodes: vec![center],
        central_edges: vec![],
        neighbors: [prev, next],
        peripherals: vec![seq],
        folds,
        closing_edge: edge(prev, next),
    };
    let fw = Framework::new(config.clone(), edges)?;
    Ok((fw, fan))
}

/// 3D Grünbaum framework: a chain of tetrahedra sharing a central hull edge.
pub fn build_grunbaum_3d(config: &Configuration) -> Result<(Framework, FanDecomposition)> {
    if config.dim() != 3 {
        return Err(Error::DegenerateInput("spatial builder needs dim 3".into()));
    }
    config.require_distinct_points()?;
    let hull = convex_hull_3d(config)?;
    let ((ca, cb), (u, v)) = select_central_edge_3d(&hull);
    let n = config.len();
    let scale = config.scale();

    let frame = central_frame(config, ca, cb, u);
    let planar = |i: usize| frame.planar(config.point(i));

    let peripherals: Vec<usize> = (0..n).filter(|&i| i != ca && i != cb).collect();
    let tol = crate::TOL_GEOM * scale;
    for (ii, &i) in peripherals.iter().enumerate() {
        for &j in &peripherals[ii + 1..] {
            let (pi, pj) = (planar(i), planar(j));
            let d = [pi[0] - pj[0], pi[1] - pj[1]];
            if (d[0] * d[0] + d[1] * d[1]).sqrt() <= tol {
                return Err(Error::ProjectionDegenerate(i, j));
            }
        }
    }

    // sweep direction chosen so the second neighbor closes the wedge
    let ref_dir = planar(u);
    let s = if signed_angle(ref_dir, planar(v)) >= 0.0 { 1.0 } else { -1.0 };
    let mut middle: Vec<usize> =
        peripherals.iter().copied().filter(|&i| i != u && i != v).collect();
    let key = |i: usize| {
        let p = planar(i);
        let ang = (s * signed_angle(ref_dir, p)).max(0.0);
        (ang, dot2(p, p))
    };
    middle.sort_by(|&i, &j| {
        let (ki, kj) = (key(i), key(j));
        ki.partial_cmp(&kj).unwrap().then(i.cmp(&j))
    });
    let mut seq = Vec::with_capacity(n - 2);
    seq.push(u);
    seq.extend_from_slice(&middle);
    seq.push(v);

    let mut edges = BTreeSet::new();
    edges.insert(edge(ca, cb));
    for &x in &seq {
        edges.insert(edge(ca, x));
        edges.insert(edge(cb, x));
    }
    for w in seq.windows(2) {
        edges.insert(edge(w[0], w[1]));
    }
    edges.insert(edge(u, v));

    let folds = seq[1..seq.len() - 1].iter().map(|&x| edge(ca, x)).collect();
    let fan = FanDecomposition {
        kind: FanKind::Fan3d,
        center_nodes: vec![],
        central_edges: vec![[ca, cb]],
        neighbors: [u, v],
        peripherals: vec![seq],
        folds,
        closing_edge: edge(u, v),
    };
    let fw = Framework::new(config.clone(), edges)?;
    Ok((fw, fan))
}

/// Two fans hanging off a shared center-to-center hinge, closed by a single
/// edge between the extreme peripheral nodes. Center pairs are tried in
/// index order; the first pair whose split passes the opposite-sides test
/// and the full superstability certificate wins.
pub fn build_multifan_2d(
    config: &Configuration,
    num_centers: usize,
) -> Result<(Framework, FanDecomposition)> {
    if num_centers != 2 {
        return Err(Error::Unsupported(format!(
            "multi-fan supports exactly 2 centers, got {num_centers}"
        )));
    }
    if config.dim() != 2 {
        return Err(Error::DegenerateInput("multi-fan builder needs dim 2".into()));
    }
    let n = config.len();
    if n < 5 {
        return Err(Error::DegenerateInput("multi-fan needs at least 5 points".into()));
    }
    config.require_distinct_points()?;
    config.require_full_dimensional()?;

    for c1 in 0..n {
        for c2 in c1 + 1..n {
            if let Some(built) = try_multifan(config, c1, c2) {
                let (fw, fan) = built;
                if let Ok(report) = crate::rigidity::superstability_test(&fw) {
                    if report.superstable {
                        return Ok((fw, fan));
                    }
                }
            }
        }
    }
    Err(Error::NoValidPartition(
        "no center pair passes the opposite-sides test and certificate".into(),
    ))
}

fn try_multifan(
    config: &Configuration,
    c1: usize,
    c2: usize,
) -> Option<(Framework, FanDecomposition)> {
    let n = config.len();
    let tol = crate::TOL_GEOM * config.scale();
    let p1 = config.point(c1);
    let p2 = config.point(c2);
    let hinge_dir = vec2(p1, p2);

    // split the remaining nodes by the side of the center-to-center line
    let mut left = Vec::new();
    let mut right = Vec::new();
    for i in (0..n).filter(|&i| i != c1 && i != c2) {
        let s = cross2(hinge_dir, vec2(p1, config.point(i)));
        if s.abs() <= tol {
            return None;
        }
        if s > 0.0 { left.push(i) } else { right.push(i) }
    }
    if left.is_empty() || right.is_empty() {
        return None;
    }

    // fan around c1 sweeps from the far extreme down to the hinge; fan
    // around c2 continues from the hinge out to the other extreme
    let angle_from = |origin: usize, reference: [f64; 2], i: usize| {
        signed_angle(reference, vec2(config.point(origin), config.point(i)))
    };
    left.sort_by(|&i, &j| {
        let ki = (-angle_from(c1, hinge_dir, i), config.dist2(c1, i));
        let kj = (-angle_from(c1, hinge_dir, j), config.dist2(c1, j));
        ki.partial_cmp(&kj).unwrap().then(i.cmp(&j))
    });
    let back_dir = vec2(p2, p1);
    right.sort_by(|&i, &j| {
        let ki = (angle_from(c2, back_dir, i), config.dist2(c2, i));
        let kj = (angle_from(c2, back_dir, j), config.dist2(c2, j));
        ki.partial_cmp(&kj).unwrap().then(i.cmp(&j))
    });

    let u = left[0];
    let v = *right.last().unwrap();
    // centers must sit strictly on opposite sides of the closing segment
    let close_dir = vec2(config.point(u), config.point(v));
    let s1 = cross2(close_dir, vec2(config.point(u), p1));
    let s2 = cross2(close_dir, vec2(config.point(u), p2));
    if s1.abs() <= tol || s2.abs() <= tol || s1.signum() == s2.signum() {
        return None;
    }

    let mut seq1 = left;
    seq1.push(c2);
    let mut seq2 = vec![c1];
    seq2.extend(right);

    let mut edges = BTreeSet::new();
    for &x in &seq1 {
        edges.insert(edge(c1, x));
    }
    for &x in &seq2 {
        edges.insert(edge(c2, x));
    }
    for seq in [&seq1, &seq2] {
        for w in seq.windows(2) {
            edges.insert(edge(w[0], w[1]));
        }
    }
    edges.insert(edge(u, v));
    if edges.len() != minimal_edge_count(n, 2) {
        return None;
    }

    let mut folds: Vec<[usize; 2]> =
        seq1[1..seq1.len() - 1].iter().map(|&x| edge(c1, x)).collect();
    folds.push(edge(c1, c2));
    folds.extend(seq2[1..seq2.len() - 1].iter().map(|&x| edge(c2, x)));

    let fan = FanDecomposition {
        kind: FanKind::Multifan2d,
        center_nodes: vec![c1, c2],
        central_edges: vec![],
        neighbors: [u, v],
        peripherals: vec![seq1, seq2],
        folds,
        closing_edge: edge(u, v),
    };
    let fw = Framework::new(config.clone(), edges).ok()?;
    Some((fw, fan))
}

/// Outcome of checking a framework against its decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationOutcome {
    pub ok: bool,
    pub reasons: Vec<String>,
}

/// Checks that the edge set is exactly the union described by the fan
/// fields and that the fold and closing bookkeeping matches the kind.
pub fn validate_decomposition(fw: &Framework, fan: &FanDecomposition) -> ValidationOutcome {
    let mut reasons = Vec::new();
    let n = fw.len();

    let mut seen = BTreeSet::new();
    for &[a, b] in fw.edges() {
        if a == b {
            reasons.push("not simple".into());
        }
        if a >= n || b >= n {
            reasons.push(format!("edge ({a},{b}) out of range"));
        }
        if !seen.insert(edge(a, b)) {
            reasons.push("not simple".into());
        }
    }

    let mut expected: BTreeSet<[usize; 2]> = BTreeSet::new();
    let mut spokes: BTreeSet<[usize; 2]> = BTreeSet::new();
    match fan.kind {
        FanKind::Fan2d | FanKind::Multifan2d => {
            if fan.center_nodes.len() != fan.peripherals.len() {
                reasons.push("center count does not match fan count".into());
            }
            for (&c, seq) in fan.center_nodes.iter().zip(&fan.peripherals) {
                for &x in seq {
                    spokes.insert(edge(c, x));
                }
                for w in seq.windows(2) {
                    expected.insert(edge(w[0], w[1]));
                }
            }
        }
        FanKind::Fan3d => {
            if fan.central_edges.len() != 1 || fan.peripherals.len() != 1 {
                reasons.push("spatial fan needs one central edge and one chain".into());
            }
            for (&[a, b], seq) in fan.central_edges.iter().zip(&fan.peripherals) {
                spokes.insert(edge(a, b));
                for &x in seq {
                    spokes.insert(edge(a, x));
                    spokes.insert(edge(b, x));
                }
                for w in seq.windows(2) {
                    expected.insert(edge(w[0], w[1]));
                }
            }
        }
        FanKind::Multifan3d => {
            return ValidationOutcome { ok: false, reasons: vec!["unsupported kind".into()] };
        }
    }
    expected.insert(edge(fan.closing_edge[0], fan.closing_edge[1]));

    let actual: BTreeSet<[usize; 2]> = fw.edges().iter().copied().collect();
    for e in spokes.difference(&actual) {
        if fan.kind == FanKind::Fan3d && fan.central_edges[0] == *e {
            reasons.push("missing central edge".into());
        } else {
            reasons.push("missing center spoke".into());
        }
    }
    expected.extend(spokes);
    for &[a, b] in expected.difference(&actual) {
        reasons.push(format!("missing edge ({a},{b})"));
    }
    for &[a, b] in actual.difference(&expected) {
        reasons.push(format!("unexpected edge ({a},{b})"));
    }

    if edge(fan.neighbors[0], fan.neighbors[1])
        != edge(fan.closing_edge[0], fan.closing_edge[1])
    {
        reasons.push("closing edge does not connect the neighbors".into());
    }
    let chain_len: usize = fan.peripherals.iter().map(|s| s.len()).sum();
    let expected_folds = match fan.kind {
        FanKind::Fan2d | FanKind::Fan3d => chain_len.saturating_sub(2),
        FanKind::Multifan2d => chain_len.saturating_sub(3),
        FanKind::Multifan3d => unreachable!(),
    };
    if fan.folds.len() != expected_folds {
        reasons.push(format!(
            "fold count {} does not match kind (expected {expected_folds})",
            fan.folds.len()
        ));
    }
    for f in &fan.folds {
        if !actual.contains(&edge(f[0], f[1])) {
            reasons.push(format!("fold ({},{}) is not an edge", f[0], f[1]));
        }
    }
    let ends_ok = match fan.kind {
        FanKind::Fan2d | FanKind::Fan3d => {
            let seq = &fan.peripherals[0];
            seq.first() == Some(&fan.neighbors[0]) && seq.last() == Some(&fan.neighbors[1])
        }
        FanKind::Multifan2d => {
            fan.peripherals.len() == 2
                && fan.peripherals[0].first() == Some(&fan.neighbors[0])
                && fan.peripherals[1].last() == Some(&fan.neighbors[1])
        }
        FanKind::Multifan3d => unreachable!(),
    };
    if !ends_ok {
        reasons.push("neighbors are not the chain endpoints".into());
    }

    reasons.sort();
    reasons.dedup();
    ValidationOutcome { ok: reasons.is_empty(), reasons }
}
