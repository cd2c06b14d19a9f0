//! Brute-force checks of the claims behind the construction: exhaustive
//! enumeration of every fold state of a fan, and randomized perturbation
//! searches for alternate realizations in equal or higher ambient
//! dimension.

use crate::construction::{
    central_frame, signed_angle, vec2, FanDecomposition, FanKind, Framework,
};
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use rand::{Rng, SeedableRng};
use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

/// Every realization a fan admits when its folds flip independently.
///
/// Index 0 is always the all-plus sign vector, which reproduces the input
/// configuration. Spoke and peripheral edge lengths are identical across
/// realizations; only the closing-edge (neighbor) distance changes.
#[derive(Debug, Clone)]
pub struct FanConfigurationSet {
    pub f: usize,
    pub sign_vectors: Vec<Vec<i8>>,
    pub realizations: Vec<Configuration>,
    pub neighbor_distances: Vec<f64>,
}

impl FanConfigurationSet {
    /// Gap between the unfolded neighbor distance and the best folded one;
    /// infinite when there is nothing to fold.
    pub fn unfolded_margin(&self) -> f64 {
        let folded_best =
            self.neighbor_distances[1..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        self.neighbor_distances[0] - folded_best
    }

    /// True iff the all-plus realization strictly beats every folded one.
    pub fn max_is_strictly_unfolded(&self) -> bool {
        self.neighbor_distances.len() == 1 || self.unfolded_margin() > 0.0
    }
}

fn sign_vectors(f: usize) -> Vec<Vec<i8>> {
    (0..1usize << f)
        .map(|k| (0..f).map(|b| if k >> b & 1 == 0 { 1 } else { -1 }).collect())
        .collect()
}

fn check_fold_budget(fan: &FanDecomposition) -> Result<usize> {
    let f = fan.fold_count();
    if f > crate::MAX_FOLDS {
        return Err(Error::TooManyFolds { folds: f, max: crate::MAX_FOLDS });
    }
    Ok(f)
}

/// Walks every fold state of a planar fan. Triangles are laid out around
/// the center by accumulating signed angular increments; the first
/// increment is fixed positive, and fold k's sign flips increment k+1.
pub fn enumerate_fan_2d(
    fan: &FanDecomposition,
    config: &Configuration,
) -> Result<FanConfigurationSet> {
    if fan.kind != FanKind::Fan2d {
        return Err(Error::Unsupported("planar enumeration needs a single planar fan".into()));
    }
    if config.dim() != 2 {
        return Err(Error::DegenerateInput("planar enumeration needs dim 2".into()));
    }
    let f = check_fold_budget(fan)?;
    let center = fan.center_nodes[0];
    let seq = &fan.peripherals[0];
    let c = config.point(center);

    let radii: Vec<f64> = seq.iter().map(|&x| config.dist(center, x)).collect();
    let increments: Vec<f64> = seq
        .windows(2)
        .map(|w| signed_angle(vec2(c, config.point(w[0])), vec2(c, config.point(w[1]))).abs())
        .collect();

    let signs = sign_vectors(f);
    let mut realizations = Vec::with_capacity(signs.len());
    let mut neighbor_distances = Vec::with_capacity(signs.len());
    for sv in &signs {
        let mut coords = vec![0.0; 2 * config.len()];
        let mut theta = 0.0;
        let mut place = |node: usize, r: f64, ang: f64| {
            coords[2 * node] = r * ang.cos();
            coords[2 * node + 1] = r * ang.sin();
        };
        place(seq[0], radii[0], 0.0);
        for (k, &delta) in increments.iter().enumerate() {
            let sign = if k == 0 { 1.0 } else { f64::from(sv[k - 1]) };
            theta += sign * delta;
            place(seq[k + 1], radii[k + 1], theta);
        }
        let q = Configuration::new(2, coords).expect("finite coordinates");
        neighbor_distances.push(q.dist(fan.neighbors[0], fan.neighbors[1]));
        realizations.push(q);
    }
    Ok(FanConfigurationSet { f, sign_vectors: signs, realizations, neighbor_distances })
}

/// Walks every fold state of a spatial fan. Each peripheral node keeps its
/// height along the central edge and its radius from it; folding rotates it
/// about the edge by the signed accumulated angle of the projected fan.
pub fn enumerate_fan_3d(
    fan: &FanDecomposition,
    config: &Configuration,
) -> Result<FanConfigurationSet> {
    if fan.kind != FanKind::Fan3d {
        return Err(Error::Unsupported("spatial enumeration needs a single spatial fan".into()));
    }
    if config.dim() != 3 {
        return Err(Error::DegenerateInput("spatial enumeration needs dim 3".into()));
    }
    let f = check_fold_budget(fan)?;
    let [a, b] = fan.central_edges[0];
    let seq = &fan.peripherals[0];
    let frame = central_frame(config, a, b, seq[0]);

    let cylindrical: Vec<(f64, f64, [f64; 2])> = seq
        .iter()
        .map(|&x| {
            let p = config.point(x);
            let q = frame.planar(p);
            (frame.height(p), (q[0] * q[0] + q[1] * q[1]).sqrt(), q)
        })
        .collect();
    // orientation of the sweep in the projection plane, so the all-plus
    // walk retraces the original angles exactly
    let orient = if signed_angle(cylindrical[0].2, cylindrical[seq.len() - 1].2) >= 0.0 {
        1.0
    } else {
        -1.0
    };
    let increments: Vec<f64> = cylindrical
        .windows(2)
        .map(|w| (orient * signed_angle(w[0].2, w[1].2)).max(0.0))
        .collect();

    let signs = sign_vectors(f);
    let mut realizations = Vec::with_capacity(signs.len());
    let mut neighbor_distances = Vec::with_capacity(signs.len());
    for sv in &signs {
        let mut coords = vec![0.0; 3 * config.len()];
        for (node, p) in [(a, config.point(a)), (b, config.point(b))] {
            coords[3 * node..3 * node + 3].copy_from_slice(p);
        }
        let mut angle = 0.0;
        for (k, &x) in seq.iter().enumerate() {
            if k > 0 {
                let sign = if k == 1 { 1.0 } else { f64::from(sv[k - 2]) };
                angle += sign * increments[k - 1];
            }
            let (h, rho, _) = cylindrical[k];
            let p = frame.embed(h, rho, orient * angle);
            coords[3 * x..3 * x + 3].copy_from_slice(&p);
        }
        let q = Configuration::new(3, coords).expect("finite coordinates");
        neighbor_distances.push(q.dist(fan.neighbors[0], fan.neighbors[1]));
        realizations.push(q);
    }
    Ok(FanConfigurationSet { f, sign_vectors: signs, realizations, neighbor_distances })
}

/// One local search outcome: where the descent stopped and how well the
/// edge lengths are satisfied there (worst relative squared-length error).
pub type SearchResult = (Configuration, f64);

fn edge_residual(coords: &[f64], dim: usize, edges: &[[usize; 2]], lengths2: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (&[i, j], &l2) in edges.iter().zip(lengths2) {
        let d2: f64 = (0..dim)
            .map(|k| {
                let d = coords[dim * i + k] - coords[dim * j + k];
                d * d
            })
            .sum();
        worst = worst.max((d2 - l2).abs() / l2.max(f64::MIN_POSITIVE));
    }
    worst
}

/// Looks for alternate realizations: lifts the configuration into the
/// ambient dimension, jitters it by `magnitude` times the configuration
/// scale, and drives the squared edge-length violations to zero with
/// damped Gauss-Newton steps on the length residuals. The damping makes
/// each step a blend between the plain gradient step and the Newton one,
/// which matters in lifted dimensions where the valley toward the solution
/// set is quartically flat. Each trial polishes far below the equality
/// tolerance: an edge residual just under it can hide a displacement along
/// a barely-stiff lifted mode whose effect on non-edge distances is
/// amplified by the inverse of the smallest positive stress-matrix
/// eigenvalue, so stopping early would report spurious non-congruent
/// realizations. Returns one (configuration, residual) pair per trial;
/// callers treat residuals below the equality tolerance as converged.
pub fn perturbation_flex_search(
    fw: &Framework,
    ambient_dim: usize,
    trials: usize,
    magnitude: f64,
    seed: u64,
) -> Result<Vec<SearchResult>> {
    let d0 = fw.dim();
    if ambient_dim < d0 {
        return Err(Error::Unsupported(format!(
            "ambient dimension {ambient_dim} below framework dimension {d0}"
        )));
    }
    if trials == 0 {
        return Err(Error::DegenerateInput("at least one trial required".into()));
    }
    let n = fw.len();
    let dim = ambient_dim;
    let edges = fw.edges();
    let lengths2: Vec<f64> = edges.iter().map(|&[i, j]| fw.config().dist2(i, j)).collect();
    let scale = fw.config().scale();

    let mut lifted = vec![0.0; dim * n];
    for i in 0..n {
        lifted[dim * i..dim * i + d0].copy_from_slice(fw.config().point(i));
    }

    // residuals r_e = ‖q_i−q_j‖² − ℓ²; objective Σ r², gradient 4·Jᵀr
    let residuals = |q: &[f64]| -> DVector<f64> {
        DVector::from_iterator(
            edges.len(),
            edges.iter().zip(&lengths2).map(|(&[i, j], &l2)| {
                let d2: f64 = (0..dim)
                    .map(|k| {
                        let d = q[dim * i + k] - q[dim * j + k];
                        d * d
                    })
                    .sum();
                d2 - l2
            }),
        )
    };
    let jacobian = |q: &[f64]| -> DMatrix<f64> {
        let mut jm = DMatrix::zeros(edges.len(), dim * n);
        for (row, &[i, j]) in edges.iter().enumerate() {
            for k in 0..dim {
                let d = 2.0 * (q[dim * i + k] - q[dim * j + k]);
                jm[(row, dim * i + k)] = d;
                jm[(row, dim * j + k)] = -d;
            }
        }
        jm
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut q: Vec<f64> = lifted
            .iter()
            .map(|x| x + magnitude * scale * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        let mut r = residuals(&q);
        let mut fval = r.norm_squared();
        let mut lambda = 1e-3;
        let target = edge_residual(&q, dim, edges, &lengths2);
        let mut best = (q.clone(), target);

        for _ in 0..10_000 {
            let current = edge_residual(&q, dim, edges, &lengths2);
            if current < best.1 {
                best = (q.clone(), current);
            }
            if current < 1e-6 * crate::TOL_EQ || lambda > 1e12 {
                break;
            }
            let jm = jacobian(&q);
            // Damped step through the push-through identity:
            // (JᵀJ + a·I)⁻¹Jᵀr = Jᵀ(JJᵀ + a·I)⁻¹r, and the edge count is
            // well below the coordinate count here, so factor the small
            // Gram matrix. trace(JJᵀ) = trace(JᵀJ) keeps the damping scale
            // of the coordinate-space form.
            let gram = &jm * jm.transpose();
            let mu = gram.trace().max(f64::MIN_POSITIVE) / (dim * n) as f64;
            let mut moved = false;
            for _ in 0..30 {
                let mut damped = gram.clone();
                for k in 0..damped.nrows() {
                    damped[(k, k)] += lambda * mu;
                }
                if let Some(chol) = damped.cholesky() {
                    let delta = jm.transpose() * chol.solve(&r);
                    let cand: Vec<f64> =
                        q.iter().zip(delta.iter()).map(|(x, d)| x - d).collect();
                    let rc = residuals(&cand);
                    let fc = rc.norm_squared();
                    if fc < fval {
                        q = cand;
                        r = rc;
                        fval = fc;
                        lambda = (lambda * 0.3).max(1e-12);
                        moved = true;
                        break;
                    }
                }
                lambda *= 10.0;
                if lambda > 1e12 {
                    break;
                }
            }
            if !moved {
                break;
            }
        }

        let current = edge_residual(&q, dim, edges, &lengths2);
        if current < best.1 {
            best = (q, current);
        }
        out.push((Configuration::new(dim, best.0)?, best.1));
    }
    Ok(out)
}
