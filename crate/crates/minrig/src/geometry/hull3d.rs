use super::Configuration;
use crate::error::{Error, Result};
use crate::TOL_GEOM;
use std::collections::{BTreeMap, HashMap};

/// Triangulated convex hull of a spatial configuration.
///
/// Coplanar facets are triangulated as a fan from their smallest vertex, so
/// the face list is a function of the point set alone. `adjacency` maps each
/// undirected surface edge to its two incident faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hull3d {
    pub faces: Vec<[usize; 3]>,
    pub adjacency: BTreeMap<(usize, usize), (usize, usize)>,
}

impl Hull3d {
    /// Hull vertices in increasing order.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.faces.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn sub(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone)]
struct Face {
    v: [usize; 3],
    normal: [f64; 3], // unit, outward
    offset: f64,      // normal . point_on_face
    alive: bool,
}

impl Face {
    fn new(v: [usize; 3], config: &Configuration) -> Self {
        let (p0, p1, p2) = (config.point(v[0]), config.point(v[1]), config.point(v[2]));
        let mut normal = cross(sub(p1, p0), sub(p2, p0));
        let len = norm(normal);
        for c in &mut normal {
            *c /= len;
        }
        let offset = dot(normal, [p0[0], p0[1], p0[2]]);
        Face { v, normal, offset, alive: true }
    }

    fn dist(&self, p: &[f64]) -> f64 {
        dot(self.normal, [p[0], p[1], p[2]]) - self.offset
    }
}

/// Incremental convex hull with deterministic handling of coplanar facets.
pub fn convex_hull_3d(config: &Configuration) -> Result<Hull3d> {
    assert_eq!(config.dim(), 3);
    let n = config.len();
    if n < 4 || config.affine_rank() < 3 {
        return Err(Error::DegenerateInput(
            "3D hull needs at least 4 points spanning space".into(),
        ));
    }
    let scale = config.scale();
    let tol_len = TOL_GEOM * scale;
    let tol_area = TOL_GEOM * scale * scale;
    let tol_plane = TOL_GEOM * scale;

    // initial tetrahedron from the first sufficiently independent points
    let i0 = 0;
    let i1 = (1..n)
        .find(|&j| config.dist(i0, j) > tol_len)
        .ok_or_else(|| Error::DegenerateInput("all points coincide".into()))?;
    let i2 = (1..n)
        .filter(|&j| j != i1)
        .find(|&j| {
            let a = sub(config.point(i1), config.point(i0));
            let b = sub(config.point(j), config.point(i0));
            norm(cross(a, b)) > tol_area
        })
        .ok_or_else(|| Error::DegenerateInput("points are collinear".into()))?;
    let base = Face::new([i0, i1, i2], config);
    let i3 = (1..n)
        .filter(|&j| j != i1 && j != i2)
        .find(|&j| base.dist(config.point(j)).abs() > tol_plane)
        .ok_or_else(|| Error::DegenerateInput("points are coplanar".into()))?;

    let mut faces: Vec<Face> = Vec::new();
    let interior = {
        let mut c = [0.0; 3];
        for &i in &[i0, i1, i2, i3] {
            for k in 0..3 {
                c[k] += config.point(i)[k] / 4.0;
            }
        }
        c
    };
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut f = Face::new(tri, config);
        if f.dist(&interior) > 0.0 {
            f = Face::new([tri[0], tri[2], tri[1]], config);
        }
        faces.push(f);
    }

    let mut in_hull = vec![false; n];
    for &i in &[i0, i1, i2, i3] {
        in_hull[i] = true;
    }
    for j in 0..n {
        if in_hull[j] {
            continue;
        }
        let p = config.point(j);
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.dist(p) > tol_plane)
            .map(|(idx, _)| idx)
            .collect();
        if visible.is_empty() {
            continue;
        }
        // owner of each directed edge among alive faces
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (idx, f) in faces.iter().enumerate() {
            if f.alive {
                let [a, b, c] = f.v;
                owner.insert((a, b), idx);
                owner.insert((b, c), idx);
                owner.insert((c, a), idx);
            }
        }
        let is_visible = |idx: usize| visible.contains(&idx);
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &idx in &visible {
            let [a, b, c] = faces[idx].v;
            for (s, t) in [(a, b), (b, c), (c, a)] {
                if !is_visible(owner[&(t, s)]) {
                    horizon.push((s, t));
                }
            }
        }
        for &idx in &visible {
            faces[idx].alive = false;
        }
        for (s, t) in horizon {
            let mut f = Face::new([s, t, j], config);
            if f.dist(&interior) > 0.0 {
                f = Face::new([t, s, j], config);
            }
            faces.push(f);
        }
        in_hull[j] = true;
    }

    let alive: Vec<Face> = faces.into_iter().filter(|f| f.alive).collect();
    let merged = merge_coplanar(&alive, config, tol_plane, tol_area);
    finish(merged)
}

/// Groups adjacent coplanar triangles into facets and re-triangulates each
/// facet as a fan from its smallest vertex, dropping corners that lie on a
/// straight stretch of the facet boundary.
fn merge_coplanar(
    faces: &[Face],
    config: &Configuration,
    tol_plane: f64,
    tol_area: f64,
) -> Vec<[usize; 3]> {
    let mut parent: Vec<usize> = (0..faces.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }

    let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (idx, f) in faces.iter().enumerate() {
        let [a, b, c] = f.v;
        for (s, t) in [(a, b), (b, c), (c, a)] {
            by_edge.entry((s.min(t), s.max(t))).or_default().push(idx);
        }
    }
    for ((s, t), ids) in &by_edge {
        assert_eq!(ids.len(), 2, "surface edge ({s},{t}) not shared by two faces");
        let (f, g) = (ids[0], ids[1]);
        let apex = |fi: usize| faces[fi].v.iter().copied().find(|v| v != s && v != t).unwrap();
        let coplanar = faces[f].dist(config.point(apex(g))).abs() <= tol_plane
            && faces[g].dist(config.point(apex(f))).abs() <= tol_plane;
        if coplanar {
            let (rf, rg) = (find(&mut parent, f), find(&mut parent, g));
            if rf != rg {
                parent[rf.max(rg)] = rf.min(rg);
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for idx in 0..faces.len() {
        let r = find(&mut parent, idx);
        groups.entry(r).or_default().push(idx);
    }

    let mut out: Vec<[usize; 3]> = Vec::new();
    for ids in groups.values() {
        if ids.len() == 1 {
            out.push(faces[ids[0]].v);
            continue;
        }
        // facet boundary: directed edges whose reverse is outside the group
        let mut directed: BTreeMap<(usize, usize), ()> = BTreeMap::new();
        for &idx in ids {
            let [a, b, c] = faces[idx].v;
            for e in [(a, b), (b, c), (c, a)] {
                directed.insert(e, ());
            }
        }
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for &(s, t) in directed.keys() {
            if !directed.contains_key(&(t, s)) {
                next.insert(s, t);
            }
        }
        let start = *next.keys().next().unwrap();
        let mut cycle = vec![start];
        let mut cur = next[&start];
        while cur != start {
            cycle.push(cur);
            cur = next[&cur];
            assert!(cycle.len() <= next.len(), "facet boundary walk did not close");
        }
        // keep strict corners only
        let m = cycle.len();
        let kept: Vec<usize> = (0..m)
            .filter(|&i| {
                let prev = config.point(cycle[(i + m - 1) % m]);
                let here = config.point(cycle[i]);
                let nxt = config.point(cycle[(i + 1) % m]);
                norm(cross(sub(here, prev), sub(nxt, here))) > tol_area
            })
            .map(|i| cycle[i])
            .collect();
        let lowest = kept.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i).unwrap();
        let k = kept.len();
        for i in 1..k - 1 {
            out.push([
                kept[lowest],
                kept[(lowest + i) % k],
                kept[(lowest + i + 1) % k],
            ]);
        }
    }
    out
}

fn finish(mut faces: Vec<[usize; 3]>) -> Result<Hull3d> {
    // canonical form: rotate each winding so the smallest vertex leads,
    // then sort the face list
    for f in &mut faces {
        let lead = (0..3).min_by_key(|&i| f[i]).unwrap();
        f.rotate_left(lead);
    }
    faces.sort_unstable();

    let mut adjacency: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    let mut pending: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (idx, f) in faces.iter().enumerate() {
        let [a, b, c] = *f;
        for (s, t) in [(a, b), (b, c), (c, a)] {
            let key = (s.min(t), s.max(t));
            match pending.remove(&key) {
                Some(first) => {
                    adjacency.insert(key, (first, idx));
                }
                None => {
                    pending.insert(key, idx);
                }
            }
        }
    }
    assert!(pending.is_empty(), "hull surface is not closed");
    Ok(Hull3d { faces, adjacency })
}

/// Central edge choice for the spatial construction: the smallest surface
/// edge in lexicographic order, with the apexes of its two incident faces as
/// the neighbor pair.
pub fn select_central_edge_3d(hull: &Hull3d) -> ((usize, usize), (usize, usize)) {
    let (&(a, b), &(f, g)) = hull.adjacency.iter().next().unwrap();
    let apex =
        |fi: usize| hull.faces[fi].iter().copied().find(|&v| v != a && v != b).unwrap();
    let (u, v) = (apex(f), apex(g));
    ((a, b), (u.min(v), u.max(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_holds(hull: &Hull3d) -> bool {
        let v = hull.vertices().len() as i64;
        let e = hull.adjacency.len() as i64;
        let f = hull.faces.len() as i64;
        v - e + f == 2
    }

    #[test]
    fn tetrahedron_hull() {
        let c = Configuration::from_points_3d(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ])
        .unwrap();
        let hull = convex_hull_3d(&c).unwrap();
        assert_eq!(hull.faces.len(), 4);
        assert!(euler_holds(&hull));
        let ((a, b), (u, v)) = select_central_edge_3d(&hull);
        assert_eq!((a, b), (0, 1));
        assert_eq!((u, v), (2, 3));
    }

    #[test]
    fn cube_facets_triangulated_from_lowest_corner() {
        let c = Configuration::from_points_3d(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ])
        .unwrap();
        let hull = convex_hull_3d(&c).unwrap();
        assert_eq!(hull.faces.len(), 12);
        assert_eq!(hull.vertices(), (0..8).collect::<Vec<_>>());
        assert!(euler_holds(&hull));
        let ((a, b), _) = select_central_edge_3d(&hull);
        assert_eq!((a, b), (0, 1));
    }

    #[test]
    fn facet_interior_point_is_not_a_vertex() {
        let mut pts = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ];
        pts.push([0.5, 0.5, 0.0]);
        let c = Configuration::from_points_3d(&pts).unwrap();
        let hull = convex_hull_3d(&c).unwrap();
        assert_eq!(hull.vertices(), (0..8).collect::<Vec<_>>());
        assert!(euler_holds(&hull));
    }

    #[test]
    fn coplanar_input_rejected() {
        let c = Configuration::from_points_3d(&[
            [0.0, 0.0, 0.5],
            [1.0, 0.0, 0.5],
            [0.0, 1.0, 0.5],
            [1.0, 1.0, 0.5],
            [0.3, 0.8, 0.5],
        ])
        .unwrap();
        assert!(matches!(convex_hull_3d(&c), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn every_point_inside_every_face_plane() {
        let c = Configuration::random(30, 3, 11).unwrap();
        let hull = convex_hull_3d(&c).unwrap();
        let tol = TOL_GEOM * c.scale();
        for face in &hull.faces {
            let f = Face::new(*face, &c);
            for i in 0..c.len() {
                assert!(f.dist(c.point(i)) <= tol, "point {i} outside face {face:?}");
            }
        }
        assert!(euler_holds(&hull));
    }

    // supporting half-space test: i is a hull vertex exactly when some plane
    // through it and two other points has all remaining points strictly on
    // one side
    fn brute_force_vertices(c: &Configuration) -> Vec<usize> {
        let n = c.len();
        let tol = TOL_GEOM * c.scale();
        let mut out = Vec::new();
        'point: for i in 0..n {
            for j in 0..n {
                for k in j + 1..n {
                    if j == i || k == i {
                        continue;
                    }
                    let nrm = cross(sub(c.point(j), c.point(i)), sub(c.point(k), c.point(i)));
                    let len = norm(nrm);
                    if len <= 0.0 {
                        continue;
                    }
                    let side = |m: usize| dot(nrm, sub(c.point(m), c.point(i))) / len;
                    let others: Vec<f64> =
                        (0..n).filter(|&m| m != i && m != j && m != k).map(side).collect();
                    if others.iter().all(|&s| s > tol) || others.iter().all(|&s| s < -tol) {
                        out.push(i);
                        continue 'point;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn vertices_match_brute_force_on_random_cloud() {
        let c = Configuration::random(30, 3, 5).unwrap();
        let hull = convex_hull_3d(&c).unwrap();
        assert_eq!(hull.vertices(), brute_force_vertices(&c));
    }

    #[test]
    fn each_adjacency_entry_spans_two_triangles_sharing_the_edge() {
        let c = Configuration::random(25, 3, 9).unwrap();
        let hull = convex_hull_3d(&c).unwrap();
        for (&(a, b), &(f, g)) in &hull.adjacency {
            for fi in [f, g] {
                let face = hull.faces[fi];
                assert!(face.contains(&a) && face.contains(&b));
            }
            assert_ne!(f, g);
        }
    }
}
