//! Linear-algebra certificates: rigidity matrix, flex and selfstress
//! counts, the Maxwell identity, stress matrices, and the superstability
//! test that underwrites universal rigidity.

use crate::construction::Framework;
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// One real weight per edge, in edge-list order.
pub type Stress = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Flexible,
    InfRigid,
    CandidateSuperstable,
    Simplex,
}

/// Everything the certificate run measures about one framework.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    #[serde(rename = "rank_R")]
    pub rank_r: usize,
    /// Nontrivial infinitesimal flexes.
    pub m: usize,
    /// Independent selfstresses.
    pub s: usize,
    pub maxwell_ok: bool,
    /// Eigenvalues of the stress matrix, ascending, for the sign of the
    /// stress that is closest to positive semidefinite. Empty when s = 0.
    pub omega_spectrum: Vec<f64>,
    pub omega_rank: usize,
    pub psd: bool,
    pub affine_ok: bool,
    pub superstable: bool,
    pub classification: Classification,
}

/// Jacobian of the squared edge lengths: e rows, d·n columns, the row of
/// edge (i,j) carrying 2(p_i − p_j) in node i's block and the negation in
/// node j's block.
pub fn rigidity_matrix(fw: &Framework) -> DMatrix<f64> {
    let d = fw.dim();
    let n = fw.len();
    let edges = fw.edges();
    let mut r = DMatrix::zeros(edges.len(), d * n);
    for (row, &[i, j]) in edges.iter().enumerate() {
        let (pi, pj) = (fw.config().point(i), fw.config().point(j));
        for k in 0..d {
            let v = 2.0 * (pi[k] - pj[k]);
            r[(row, d * i + k)] = v;
            r[(row, d * j + k)] = -v;
        }
    }
    r
}

/// Rank by singular values, with the tolerance relative to the largest one.
fn svd_rank(a: &DMatrix<f64>) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > crate::TOL_RANK * smax).count()
}

/// Rank plus an orthonormal basis of the right nullspace. Rows are padded
/// with zeros when the matrix is wide, so every right-singular direction is
/// represented in the decomposition.
fn svd_rank_and_nullspace(a: &DMatrix<f64>) -> (usize, Vec<DVector<f64>>) {
    let (rows, cols) = (a.nrows(), a.ncols());
    if cols == 0 {
        return (0, vec![]);
    }
    let work = if rows >= cols {
        a.clone()
    } else {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(a);
        padded
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let tol = crate::TOL_RANK * smax;
    let mut rank = 0;
    let mut nullspace = Vec::new();
    for (k, &s) in sv.iter().enumerate() {
        if smax > 0.0 && s > tol {
            rank += 1;
        } else {
            nullspace.push(v_t.row(k).transpose());
        }
    }
    (rank, nullspace)
}

fn orient_first_nonzero_positive(v: &mut DVector<f64>) {
    let big = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if let Some(x) = v.iter().find(|x| x.abs() > 1e-9 * big) {
        if *x < 0.0 {
            *v *= -1.0;
        }
    }
}

/// Number of rigid-motion degrees of freedom of a point set whose affine
/// span has the given rank: translations of the span's ambient space plus
/// the rotations that move the span.
fn rigid_motion_dim(d: usize, affine_rank: usize) -> usize {
    let so = |k: usize| if k < 2 { 0 } else { k * (k - 1) / 2 };
    let r = affine_rank.min(d);
    d + so(d) - so(d - r)
}

/// Counts nontrivial flexes and selfstresses; the two nullity computations
/// run on independent decompositions of R and Rᵀ so the Maxwell identity is
/// a real check rather than bookkeeping.
pub fn count_flexes_and_stresses(fw: &Framework) -> Result<(usize, usize, usize)> {
    fw.config().require_full_dimensional()?;
    Ok(count_unchecked(fw))
}

fn count_unchecked(fw: &Framework) -> (usize, usize, usize) {
    let d = fw.dim();
    let n = fw.len();
    let r = rigidity_matrix(fw);
    let rank_r = svd_rank(&r);
    let rank_rt = svd_rank(&r.transpose());
    let motions = rigid_motion_dim(d, fw.config().affine_rank());
    let m = (d * n).saturating_sub(motions).saturating_sub(rank_r);
    let s = fw.edges().len().saturating_sub(rank_rt);
    (m, s, rank_r)
}

/// Orthonormal basis of the selfstress space, each vector unit length with
/// its first significant entry positive.
pub fn selfstress_basis(fw: &Framework) -> Result<Vec<Stress>> {
    fw.config().require_full_dimensional()?;
    let rt = rigidity_matrix(fw).transpose();
    let (_, mut nullspace) = svd_rank_and_nullspace(&rt);
    for v in &mut nullspace {
        orient_first_nonzero_positive(v);
    }
    Ok(nullspace.into_iter().map(|v| v.iter().cloned().collect()).collect())
}

/// Weighted graph Laplacian of the stress: −ω_ij off-diagonal on edges,
/// diagonal filled so every row sums to zero.
pub fn stress_matrix(fw: &Framework, w: &[f64]) -> DMatrix<f64> {
    assert_eq!(w.len(), fw.edges().len(), "one weight per edge");
    let n = fw.len();
    let mut omega = DMatrix::zeros(n, n);
    for (&[i, j], &wij) in fw.edges().iter().zip(w) {
        omega[(i, j)] -= wij;
        omega[(j, i)] -= wij;
        omega[(i, i)] += wij;
        omega[(j, j)] += wij;
    }
    omega
}

/// True iff the edge-direction outer products span the full space of
/// symmetric d×d matrices, which rules out admissible affine motions.
fn affine_motions_blocked(fw: &Framework) -> bool {
    let d = fw.dim();
    let target = d * (d + 1) / 2;
    let mut rows = DMatrix::zeros(fw.edges().len(), target);
    for (row, &[i, j]) in fw.edges().iter().enumerate() {
        let (pi, pj) = (fw.config().point(i), fw.config().point(j));
        let mut col = 0;
        for a in 0..d {
            for b in a..d {
                let da = pi[a] - pj[a];
                let db = pi[b] - pj[b];
                rows[(row, col)] = if a == b { da * db } else { 2.0 * da * db };
                col += 1;
            }
        }
    }
    svd_rank(&rows) == target
}

struct StressAnalysis {
    omega_signed: Vec<f64>,
    spectrum: Vec<f64>,
    psd: bool,
    omega_rank: usize,
}

fn analyze_single_stress(fw: &Framework, omega: &[f64]) -> StressAnalysis {
    let mat = stress_matrix(fw, omega);
    let eig = SymmetricEigen::new(mat);
    let mut spectrum: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    spectrum.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = *spectrum.first().unwrap();
    let hi = *spectrum.last().unwrap();
    let plus_ok = lo >= -crate::TOL_PSD * hi.max(1.0);
    let minus_ok = -hi >= -crate::TOL_PSD * (-lo).max(1.0);
    let (omega_signed, spectrum, psd) = if plus_ok || !minus_ok {
        (omega.to_vec(), spectrum, plus_ok)
    } else {
        let flipped: Vec<f64> = spectrum.iter().rev().map(|x| -x).collect();
        (omega.iter().map(|x| -x).collect(), flipped, true)
    };
    let big = spectrum.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let omega_rank = spectrum.iter().filter(|x| x.abs() > crate::TOL_RANK * big).count();
    StressAnalysis { omega_signed, spectrum, psd, omega_rank }
}

/// Full certificate. A positive `superstable` answer means the framework is
/// universally rigid: the (sign-corrected) stress matrix is PSD with rank
/// n − d − 1, affine motions are blocked, and the configuration spans d.
///
/// Complete graphs on at most d+1 nodes are universally rigid outright and
/// short-circuit to the simplex classification.
pub fn superstability_test(fw: &Framework) -> Result<RigidityReport> {
    let d = fw.dim();
    let n = fw.len();
    if n <= d + 1 && fw.is_complete() {
        let (m, s, rank_r) = count_unchecked(fw);
        return Ok(RigidityReport {
            rank_r,
            m,
            s,
            maxwell_ok: maxwell_holds(fw, m, s),
            omega_spectrum: vec![],
            omega_rank: 0,
            psd: true,
            affine_ok: affine_motions_blocked(fw),
            superstable: true,
            classification: Classification::Simplex,
        });
    }

    fw.config().require_full_dimensional()?;
    let (m, s, rank_r) = count_unchecked(fw);
    let maxwell_ok = maxwell_holds(fw, m, s);
    let affine_ok = affine_motions_blocked(fw);

    if s > 1 {
        return Err(Error::StressSearchUnsupported { s });
    }
    if s == 0 {
        let classification =
            if m >= 1 { Classification::Flexible } else { Classification::InfRigid };
        return Ok(RigidityReport {
            rank_r,
            m,
            s,
            maxwell_ok,
            omega_spectrum: vec![],
            omega_rank: 0,
            psd: false,
            affine_ok,
            superstable: false,
            classification,
        });
    }

    let omega = &selfstress_basis(fw)?[0];
    let analysis = analyze_single_stress(fw, omega);
    let superstable = analysis.psd && analysis.omega_rank == n - d - 1 && affine_ok;
    let classification = if superstable {
        Classification::CandidateSuperstable
    } else if m >= 1 {
        Classification::Flexible
    } else {
        Classification::InfRigid
    };
    Ok(RigidityReport {
        rank_r,
        m,
        s,
        maxwell_ok,
        omega_spectrum: analysis.spectrum,
        omega_rank: analysis.omega_rank,
        psd: analysis.psd,
        affine_ok,
        superstable,
        classification,
    })
}

fn maxwell_holds(fw: &Framework, m: usize, s: usize) -> bool {
    let d = fw.dim() as i64;
    let n = fw.len() as i64;
    let e = fw.edges().len() as i64;
    d * n - d * (d + 1) / 2 - e == m as i64 - s as i64
}

/// The single selfstress with the sign chosen by the PSD test, for display
/// and rendering. Errors unless s = 1 (after the full-dimension check).
pub fn certified_stress(fw: &Framework) -> Result<Stress> {
    fw.config().require_full_dimensional()?;
    let basis = selfstress_basis(fw)?;
    match basis.len() {
        1 => Ok(analyze_single_stress(fw, &basis[0]).omega_signed),
        s => Err(Error::StressSearchUnsupported { s }),
    }
}

/// True iff all pairwise node distances of the two configurations agree to
/// relative tolerance. The second configuration may live in a higher
/// ambient dimension.
pub fn congruence_check(p: &Configuration, q: &Configuration) -> bool {
    assert_eq!(p.len(), q.len(), "same node count");
    let n = p.len();
    let scale = p.scale().max(q.scale());
    for i in 0..n {
        for j in i + 1..n {
            let (dp, dq) = (p.dist(i, j), q.dist(i, j));
            if (dp - dq).abs() > crate::TOL_CONG * dp.max(dq).max(scale) {
                return false;
            }
        }
    }
    true
}

/// Edge count of the classical trilateration construction, for comparison:
/// 3n−6 in the plane, 4n−10 in space.
pub fn lateration_edge_count(n: usize, d: usize) -> usize {
    (d + 1) * n - (d + 2) * (d + 1) / 2
}
