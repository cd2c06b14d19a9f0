use super::Configuration;
use crate::error::{Error, Result};
use crate::TOL_GEOM;

/// Strict convex hull of a planar configuration.
///
/// `boundary` lists the hull vertices counterclockwise, starting at the
/// smallest participating index. Points interior to a hull edge are not
/// vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hull2d {
    pub boundary: Vec<usize>,
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Monotone-chain convex hull keeping strict vertices only.
pub fn convex_hull_2d(config: &Configuration) -> Result<Hull2d> {
    assert_eq!(config.dim(), 2);
    let n = config.len();
    if n < 3 || config.affine_rank() < 2 {
        return Err(Error::DegenerateInput(
            "2D hull needs at least 3 points spanning the plane".into(),
        ));
    }
    let scale = config.scale();
    // cross products compare areas, so the threshold is quadratic in scale
    let tol = TOL_GEOM * scale * scale;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (p, q) = (config.point(i), config.point(j));
        p[0].partial_cmp(&q[0])
            .unwrap()
            .then(p[1].partial_cmp(&q[1]).unwrap())
            .then(i.cmp(&j))
    });

    let chain = |iter: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut h: Vec<usize> = Vec::new();
        for i in iter {
            while h.len() >= 2
                && cross(
                    config.point(h[h.len() - 2]),
                    config.point(h[h.len() - 1]),
                    config.point(i),
                ) <= tol
            {
                h.pop();
            }
            h.push(i);
        }
        h
    };
    let lower = chain(&mut order.iter().copied());
    let upper = chain(&mut order.iter().rev().copied());

    let mut boundary: Vec<usize> = Vec::with_capacity(lower.len() + upper.len() - 2);
    boundary.extend_from_slice(&lower[..lower.len() - 1]);
    boundary.extend_from_slice(&upper[..upper.len() - 1]);

    // canonical start: smallest index first
    let start = boundary
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| v)
        .map(|(pos, _)| pos)
        .unwrap();
    boundary.rotate_left(start);
    Ok(Hull2d { boundary })
}

/// Center and neighbor choice for the planar fan construction: the hull
/// vertex with the smallest index, flanked by its boundary predecessor and
/// successor.
pub fn select_center_2d(hull: &Hull2d) -> (usize, (usize, usize)) {
    let b = &hull.boundary;
    let center = b[0];
    (center, (b[b.len() - 1], b[1]))
}
