//! Completion of a seed vector `w`, `‖w‖ < 1`, to the unique triangular
//! Parseval frame `{v₁, …, vₙ, w}` in ℝⁿ.
//!
//! The frame matrix `(v₁ … vₙ w)` has orthonormal rows and its first `n`
//! columns are right-triangular with a positive diagonal. The construction
//! runs bottom-up: starting from the `1 × 2` block `(√(1-αₙ²), αₙ)`, each
//! level prepends one coordinate `α` of `w`. With `y` the unit vector
//! orthogonal to the rows of the current block, `λ = α / y_last` and
//! `x₁ = √(1-λ²)`, the new top row is `(x₁, λ·y)`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FrameError, Result};
use crate::frame::FrameMatrix;
use crate::linalg::{max_abs, row_orthonormality_deviation};

/// Seeds must satisfy `‖w‖ < 1 - STRICT_MARGIN`.
pub const STRICT_MARGIN: f64 = 1e-12;
/// Row-orthonormality tolerance accepted by [`orthocomplement_vector`].
pub const ORTHONORMAL_ROWS_TOL: f64 = 1e-10;
/// Largest column count handled by cofactor expansion in
/// [`orthocomplement_vector`]; wider blocks use orthogonal reduction.
pub const COFACTOR_MAX_COLUMNS: usize = 8;

/// The vector `w = (α₁, …, αₙ)` to be completed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedVector {
    entries: Vec<f64>,
    norm: f64,
}

impl SeedVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(FrameError::InvalidShape("seed vector is empty".into()));
        }
        if let Some(i) = entries.iter().position(|a| !a.is_finite()) {
            return Err(FrameError::NonFinite { row: i, col: 0 });
        }
        let norm = entries.iter().map(|a| a * a).sum::<f64>().sqrt();
        Ok(Self { entries, norm })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    fn check_strict(&self) -> Result<()> {
        if self.norm >= 1.0 - STRICT_MARGIN {
            return Err(FrameError::SeedTooLong {
                norm: self.norm,
                margin: STRICT_MARGIN,
            });
        }
        Ok(())
    }
}

/// Intermediate quantities of one lifting step.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    /// Dimension reached by this level.
    pub dim: usize,
    /// Unit vector orthogonal to the rows of the previous block, oriented as
    /// the cofactor expansion gives it, so `y_last = (-1)^(dim+1) ∏ aⱼⱼ`.
    pub y: Vec<f64>,
    /// `λ` with `λ · y_last = α`; carries the `(-1)^(dim+1)` sign.
    pub lambda: f64,
    /// `x₁ = √(1 - λ²)`, the new top-left entry.
    pub x1: f64,
    /// Diagonal entry produced by this level (equal to `x1`).
    pub diag: f64,
}

/// Per-level trace for dimensions `2..=n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstructionTrace {
    pub levels: Vec<LevelRecord>,
}

/// The unique triangular Parseval `(n+1)`-frame containing a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularParsevalFrame {
    pub frame: FrameMatrix,
    pub seed: SeedVector,
    pub trace: ConstructionTrace,
}

impl TriangularParsevalFrame {
    /// Diagonal `a₁₁, …, aₙₙ` of the triangular block.
    pub fn diagonal(&self) -> Vec<f64> {
        let m = self.frame.matrix();
        (0..self.frame.dim()).map(|j| m[(j, j)]).collect()
    }

    /// `det(v₁, …, vₙ) = ∏ aⱼⱼ`.
    pub fn determinant(&self) -> f64 {
        self.diagonal().iter().product()
    }
}

/// Closed-form completion in ℝ² with `a₁₁, a₂₂ > 0`.
pub fn construct_base2(w: &SeedVector) -> Result<TriangularParsevalFrame> {
    if w.dim() != 2 {
        return Err(FrameError::WrongDimension {
            expected: 2,
            actual: w.dim(),
        });
    }
    w.check_strict()?;
    let (a1, a2) = (w.entries[0], w.entries[1]);
    let a22 = (1.0 - a2 * a2).sqrt();
    let a12 = -a1 * a2 / a22;
    let a11 = (1.0 - a1 * a1 - a2 * a2).sqrt() / a22;
    let frame =
        FrameMatrix::from_matrix(DMatrix::from_row_slice(2, 3, &[a11, a12, a1, 0.0, a22, a2]))?;
    let lambda = -a1 / a22;
    let trace = ConstructionTrace {
        levels: vec![LevelRecord {
            dim: 2,
            y: vec![a2, -a22],
            lambda,
            x1: a11,
            diag: a11,
        }],
    };
    Ok(TriangularParsevalFrame {
        frame,
        seed: w.clone(),
        trace,
    })
}

/// How [`orthocomplement_with`] computes the orthocomplement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrthocomplementRoute {
    /// Formal determinant with a symbolic first row of basis vectors.
    Cofactor,
    /// Householder reduction of `[mᵀ | e_k]`, oriented so `det([y; m]) > 0`.
    NullSpace,
}

fn check_block(m: &DMatrix<f64>) -> Result<()> {
    if m.ncols() != m.nrows() + 1 {
        return Err(FrameError::InvalidShape(format!(
            "orthocomplement needs a (k-1) x k block, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let residual = row_orthonormality_deviation(m);
    if residual > ORTHONORMAL_ROWS_TOL {
        return Err(FrameError::RowsNotOrthonormal { residual });
    }
    Ok(())
}

/// Unit vector orthogonal to the orthonormal rows of a `(k-1) × k` block.
///
/// Cofactor expansion for `k ≤ 8`, orthogonal reduction beyond. Both give
/// the orientation `det([y; m]) = +1`.
pub fn orthocomplement_vector(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    let route = if m.ncols() <= COFACTOR_MAX_COLUMNS {
        OrthocomplementRoute::Cofactor
    } else {
        OrthocomplementRoute::NullSpace
    };
    orthocomplement_with(m, route)
}

pub fn orthocomplement_with(m: &DMatrix<f64>, route: OrthocomplementRoute) -> Result<DVector<f64>> {
    check_block(m)?;
    Ok(match route {
        OrthocomplementRoute::Cofactor => cofactor_vector(m),
        OrthocomplementRoute::NullSpace => null_space_vector(m),
    })
}

/// `yᵢ = (-1)^i det(m with column i removed)` (0-based `i`).
fn cofactor_vector(m: &DMatrix<f64>) -> DVector<f64> {
    let k = m.ncols();
    DVector::from_fn(k, |i, _| {
        let minor = m.clone().remove_column(i);
        let det = if minor.nrows() == 0 {
            1.0
        } else {
            minor.determinant()
        };
        if i % 2 == 0 {
            det
        } else {
            -det
        }
    })
}

fn null_space_vector(m: &DMatrix<f64>) -> DVector<f64> {
    let k = m.ncols();
    let mt = m.transpose();
    // Pad with the basis vector least covered by the row space.
    let coverage = DVector::from_fn(k, |i, _| mt.row(i).norm_squared());
    let pad = coverage.imin();
    let mut square = mt.clone().insert_column(k - 1, 0.0);
    square[(pad, k - 1)] = 1.0;
    let q = square.qr().q();
    let mut y: DVector<f64> = q.column(k - 1).into_owned();
    y /= y.norm();
    let oriented = m.clone().insert_row(0, 0.0);
    let mut with_y = oriented;
    with_y.row_mut(0).copy_from(&y.transpose());
    if with_y.determinant() < 0.0 {
        y.neg_mut();
    }
    y
}

/// The triangular Parseval frame completing `w`, with its trace.
///
/// Output is deterministic: all diagonal entries are positive and the last
/// column is `w` exactly.
pub fn construct(w: &SeedVector) -> Result<TriangularParsevalFrame> {
    let n = w.dim();
    if n < 2 {
        return Err(FrameError::UnsupportedDimension(n));
    }
    w.check_strict()?;
    let alpha = w.entries();

    // Block for the sub-seed (α_{n-d+1}, …, αₙ): d rows, d + 1 columns.
    let last = alpha[n - 1];
    let mut block = DMatrix::from_row_slice(1, 2, &[(1.0 - last * last).sqrt(), last]);
    let mut levels = Vec::with_capacity(n - 1);
    for d in 1..n {
        let a = alpha[n - 1 - d];
        let y = orthocomplement_vector(&block)?;
        let lambda = a / y[d];
        let x1 = ((1.0 - lambda) * (1.0 + lambda)).sqrt();

        let mut next = DMatrix::zeros(d + 1, d + 2);
        next[(0, 0)] = x1;
        for c in 0..d {
            next[(0, c + 1)] = lambda * y[c];
        }
        next[(0, d + 1)] = a;
        next.view_mut((1, 1), (d, d + 1)).copy_from(&block);
        block = next;

        levels.push(LevelRecord {
            dim: d + 1,
            y: y.iter().copied().collect(),
            lambda,
            x1,
            diag: x1,
        });
    }
    Ok(TriangularParsevalFrame {
        frame: FrameMatrix::from_matrix(block)?,
        seed: w.clone(),
        trace: ConstructionTrace { levels },
    })
}

/// `aⱼⱼ = √(1 - Σ_{k≥j} αₖ²) / √(1 - Σ_{k>j} αₖ²)`, empty sums being zero.
pub fn expected_diagonal(w: &SeedVector) -> Result<Vec<f64>> {
    if w.norm() >= 1.0 {
        return Err(FrameError::SeedTooLong {
            norm: w.norm(),
            margin: 0.0,
        });
    }
    let n = w.dim();
    let mut diag = vec![0.0; n];
    let mut tail = 0.0;
    for j in (0..n).rev() {
        let with_j = tail + w.entries[j] * w.entries[j];
        diag[j] = (1.0 - with_j).sqrt() / (1.0 - tail).sqrt();
        tail = with_j;
    }
    Ok(diag)
}

/// Solves the triangular orthonormality system by exhaustive sign
/// enumeration (and `trials` seeded Newton solves) and reports whether every
/// solution equals `construct(w)` up to column signs within `1e-8`.
pub fn uniqueness_check(w: &SeedVector, trials: usize) -> Result<bool> {
    let n = w.dim();
    if n > 3 {
        return Err(FrameError::UnsupportedDimension(n));
    }
    if n < 2 {
        return Err(FrameError::UnsupportedDimension(n));
    }
    let reference = construct(w)?;
    let candidates = brute_force::sign_branches(w.entries());
    if candidates.is_empty() {
        return Ok(false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ n as u64);
    let newton: Vec<_> = (0..trials)
        .filter_map(|_| brute_force::newton_solve(w.entries(), &mut rng))
        .collect();
    Ok(candidates
        .iter()
        .chain(newton.iter())
        .all(|a| brute_force::matches_up_to_signs(a, &reference.frame, 1e-8)))
}

mod brute_force {
    use super::*;

    /// All upper-triangular `A` with `(A | w)` row-orthonormal, one per sign
    /// branch of the diagonal. Rows are solved bottom-up.
    pub(super) fn sign_branches(alpha: &[f64]) -> Vec<DMatrix<f64>> {
        let n = alpha.len();
        let mut out = Vec::new();
        let mut a = DMatrix::zeros(n, n);
        solve_row(alpha, n - 1, &mut a, &mut out);
        out
    }

    fn solve_row(alpha: &[f64], i: usize, a: &mut DMatrix<f64>, out: &mut Vec<DMatrix<f64>>) {
        let n = alpha.len();
        // Orthogonality with rows k > i, from k = n-1 down to i+1.
        for k in ((i + 1)..n).rev() {
            let mut s = alpha[i] * alpha[k];
            for m in (k + 1)..n {
                s += a[(i, m)] * a[(k, m)];
            }
            a[(i, k)] = -s / a[(k, k)];
        }
        let mut radicand = 1.0 - alpha[i] * alpha[i];
        for m in (i + 1)..n {
            radicand -= a[(i, m)] * a[(i, m)];
        }
        if radicand < -1e-12 {
            return;
        }
        let root = radicand.max(0.0).sqrt();
        for sign in [1.0, -1.0] {
            a[(i, i)] = sign * root;
            if i == 0 {
                out.push(a.clone());
            } else {
                solve_row(alpha, i - 1, a, out);
            }
            if root == 0.0 {
                break;
            }
        }
    }

    /// Remaining equations of `(A | w)(A | w)ᵀ = I` for upper-triangular `A`.
    fn residual(alpha: &[f64], a: &DMatrix<f64>) -> DVector<f64> {
        let n = alpha.len();
        let mut r = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for k in i..n {
                let mut s = alpha[i] * alpha[k];
                for m in k..n {
                    s += a[(i, m)] * a[(k, m)];
                }
                r.push(s - if i == k { 1.0 } else { 0.0 });
            }
        }
        DVector::from_vec(r)
    }

    fn unknowns(n: usize) -> Vec<(usize, usize)> {
        (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
    }

    /// Newton iteration from a random start; `None` if it does not converge.
    pub(super) fn newton_solve(alpha: &[f64], rng: &mut ChaCha8Rng) -> Option<DMatrix<f64>> {
        let n = alpha.len();
        let vars = unknowns(n);
        let mut a = DMatrix::zeros(n, n);
        for &(i, j) in &vars {
            a[(i, j)] = rng.gen_range(-1.5..1.5);
        }
        for _ in 0..100 {
            let r = residual(alpha, &a);
            if r.amax() < 1e-14 {
                return Some(a);
            }
            let mut jac = DMatrix::zeros(r.len(), vars.len());
            let mut row = 0;
            for i in 0..n {
                for k in i..n {
                    for (col, &(p, q)) in vars.iter().enumerate() {
                        let mut d = 0.0;
                        if p == i && q >= k {
                            d += a[(k, q)];
                        }
                        if p == k && q >= k {
                            d += a[(i, q)];
                        }
                        jac[(row, col)] = d;
                    }
                    row += 1;
                }
            }
            let step = jac.lu().solve(&r)?;
            for (col, &(i, j)) in vars.iter().enumerate() {
                a[(i, j)] -= step[col];
            }
            if !a.iter().all(|x| x.is_finite()) {
                return None;
            }
        }
        None
    }

    pub(super) fn matches_up_to_signs(a: &DMatrix<f64>, frame: &FrameMatrix, tol: f64) -> bool {
        (0..a.ncols()).all(|j| {
            let x = a.column(j);
            let v = frame.column(j);
            (x - v).amax().min((x + v).amax()) <= tol
        })
    }
}

/// `max |F Fᵀ - I|` for a constructed frame.
pub fn row_gram_deviation(frame: &FrameMatrix) -> f64 {
    row_orthonormality_deviation(frame.matrix())
}

/// `max |aᵢⱼ|` over the strictly lower part of the leading block.
pub fn lower_triangle_max(frame: &FrameMatrix) -> f64 {
    let n = frame.dim();
    let m = frame.matrix();
    let mut lower = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in (j + 1)..n {
            lower[(i, j)] = m[(i, j)];
        }
    }
    max_abs(&lower)
}
