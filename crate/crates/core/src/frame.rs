//! Frame representation, verification, random Parseval frames and
//! canonical forms.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVectorView, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{FrameError, Result};
use crate::linalg::{abs_det, max_abs, positive_qr};

/// Columns with norm at or below this are treated as zero.
pub const ZERO_NORM: f64 = 1e-14;
/// Two columns are parallel when `1 - |cos θ|` is at or below this.
pub const PARALLEL_TOL: f64 = 1e-12;
/// `|det|` threshold under which the leading block counts as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// An `n × N` real matrix whose columns `v₁, …, v_N` are frame vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    data: DMatrix<f64>,
}

impl FrameMatrix {
    /// Wraps an `n × N` matrix. Requires `n ≥ 1`, `N ≥ 1` and finite entries.
    pub fn from_matrix(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(FrameError::InvalidShape(format!(
                "frame must have n >= 1 and N >= 1, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        for j in 0..data.ncols() {
            for i in 0..data.nrows() {
                if !data[(i, j)].is_finite() {
                    return Err(FrameError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { data })
    }

    /// Builds a frame from its vectors; every vector must have the same length.
    pub fn from_columns<V: AsRef<[f64]>>(columns: &[V]) -> Result<Self> {
        let n = columns.first().map(|c| c.as_ref().len()).unwrap_or(0);
        if let Some((j, c)) = columns
            .iter()
            .enumerate()
            .find(|(_, c)| c.as_ref().len() != n)
        {
            return Err(FrameError::InvalidShape(format!(
                "vector {j} has {} entries, expected {n}",
                c.as_ref().len()
            )));
        }
        let data = DMatrix::from_fn(n, columns.len(), |i, j| columns[j].as_ref()[i]);
        Self::from_matrix(data)
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Number of vectors `N`.
    pub fn count(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn column(&self, j: usize) -> DVectorView<'_, f64> {
        self.data.column(j)
    }

    /// The frame vectors as owned rows, one `Vec` per vector.
    pub fn vectors(&self) -> Vec<Vec<f64>> {
        (0..self.count())
            .map(|j| self.column(j).iter().copied().collect())
            .collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        (0..self.count()).map(|j| self.column(j).norm()).collect()
    }

    /// Column Gram matrix `⟨vᵢ, vⱼ⟩`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.data.transpose() * &self.data
    }

    /// First column with norm at or below [`ZERO_NORM`].
    pub fn zero_column(&self) -> Option<usize> {
        (0..self.count()).find(|&j| self.column(j).norm() <= ZERO_NORM)
    }

    /// First pair of parallel columns (a zero column is parallel to everything).
    pub fn parallel_pair(&self) -> Option<(usize, usize)> {
        let norms = self.norms();
        let gram = self.gram();
        for i in 0..self.count() {
            for j in (i + 1)..self.count() {
                if norms[i] <= ZERO_NORM || norms[j] <= ZERO_NORM {
                    return Some((i, j));
                }
                let cos = gram[(i, j)] / (norms[i] * norms[j]);
                if 1.0 - cos.abs() <= PARALLEL_TOL {
                    return Some((i, j));
                }
            }
        }
        if self.count() == 1 && norms[0] <= ZERO_NORM {
            return Some((0, 0));
        }
        None
    }

    /// No zero column and no two parallel columns.
    pub fn is_nontrivial(&self) -> bool {
        self.parallel_pair().is_none()
    }

    /// Multiplies column `j` by `factors[j]`.
    pub fn scaled(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.count() {
            return Err(FrameError::ShapeMismatch(format!(
                "{} factors for {} vectors",
                factors.len(),
                self.count()
            )));
        }
        let mut data = self.data.clone();
        for (j, f) in factors.iter().enumerate() {
            data.column_mut(j).scale_mut(*f);
        }
        Self::from_matrix(data)
    }

    /// Column-normalized copy together with the original lengths.
    pub fn normalized(&self) -> Result<(Self, Vec<f64>)> {
        if let Some(j) = self.zero_column() {
            return Err(FrameError::ZeroColumn(j));
        }
        let norms = self.norms();
        let inv: Vec<f64> = norms.iter().map(|l| 1.0 / l).collect();
        Ok((self.scaled(&inv)?, norms))
    }

    /// Applies `m` on the left (`m · F`).
    pub fn transformed(&self, m: &DMatrix<f64>) -> Result<Self> {
        if m.ncols() != self.dim() || m.nrows() != self.dim() {
            return Err(FrameError::ShapeMismatch(format!(
                "{}x{} map for dimension {}",
                m.nrows(),
                m.ncols(),
                self.dim()
            )));
        }
        Self::from_matrix(m * &self.data)
    }
}

/// Pairwise angles `θᵢⱼ` between frame vectors and their cosines.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTable {
    theta: DMatrix<f64>,
    cosines: DMatrix<f64>,
}

impl AngleTable {
    /// Builds the table directly from a symmetric cosine table.
    pub fn from_cosines(cosines: DMatrix<f64>) -> Result<Self> {
        if !cosines.is_square() {
            return Err(FrameError::ShapeMismatch(
                "cosine table must be square".into(),
            ));
        }
        let theta = cosines.map(|c| c.clamp(-1.0, 1.0).acos());
        Ok(Self { theta, cosines })
    }

    pub fn count(&self) -> usize {
        self.theta.nrows()
    }

    pub fn theta(&self, i: usize, j: usize) -> f64 {
        self.theta[(i, j)]
    }

    pub fn cos(&self, i: usize, j: usize) -> f64 {
        self.cosines[(i, j)]
    }

    pub fn thetas(&self) -> &DMatrix<f64> {
        &self.theta
    }

    pub fn cosines(&self) -> &DMatrix<f64> {
        &self.cosines
    }
}

/// Angles between all pairs of frame vectors.
pub fn gram_and_angles(frame: &FrameMatrix) -> Result<AngleTable> {
    if let Some(j) = frame.zero_column() {
        return Err(FrameError::ZeroColumn(j));
    }
    let gram = frame.gram();
    let norms = frame.norms();
    let count = frame.count();
    let cosines = DMatrix::from_fn(count, count, |i, j| {
        if i == j {
            1.0
        } else {
            (gram[(i, j)] / (norms[i] * norms[j])).clamp(-1.0, 1.0)
        }
    });
    let mut table = AngleTable::from_cosines(cosines)?;
    for i in 0..count {
        table.theta[(i, i)] = 0.0;
    }
    Ok(table)
}

/// `S = Σⱼ vⱼ vⱼᵀ`.
pub fn frame_operator(frame: &FrameMatrix) -> DMatrix<f64> {
    let s = frame.matrix() * frame.matrix().transpose();
    (&s + s.transpose()) * 0.5
}

/// Frame bounds and tightness verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct TightnessReport {
    /// Smallest eigenvalue of the frame operator.
    pub lower_bound: f64,
    /// Largest eigenvalue of the frame operator.
    pub upper_bound: f64,
    pub is_tight: bool,
    pub is_parseval: bool,
    /// `‖S - A·I‖_F`.
    pub residual: f64,
    /// `max |S - I|`.
    pub parseval_deviation: f64,
    /// `|Σ‖vⱼ‖² - n·A|`.
    pub trace_residual: f64,
}

/// Reports frame bounds. `is_parseval` holds iff `max |S - I| ≤ tol`;
/// `is_tight` iff `B - A ≤ tol`.
pub fn verify(frame: &FrameMatrix, tol: f64) -> TightnessReport {
    let n = frame.dim();
    let s = frame_operator(frame);
    let eig = SymmetricEigen::new(s.clone()).eigenvalues;
    let lower = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let identity = DMatrix::<f64>::identity(n, n);
    let residual = (&s - &identity * lower).norm();
    let parseval_deviation = max_abs(&(&s - &identity));
    let total: f64 = frame.norms().iter().map(|l| l * l).sum();
    TightnessReport {
        lower_bound: lower,
        upper_bound: upper,
        is_tight: upper - lower <= tol,
        is_parseval: parseval_deviation <= tol,
        residual,
        parseval_deviation,
        trace_residual: (total - n as f64 * lower).abs(),
    }
}

/// A deterministic Parseval frame of `count` vectors in ℝⁿ.
///
/// An `N × N` Gaussian matrix is orthonormalized; its first `n` rows are
/// orthonormal and form the frame matrix.
pub fn random_parseval(n: usize, count: usize, seed: u64) -> Result<FrameMatrix> {
    if n == 0 || count < n {
        return Err(FrameError::InvalidShape(format!(
            "random Parseval frame needs N >= n >= 1, got n={n}, N={count}"
        )));
    }
    let q = random_orthogonal(count, seed);
    FrameMatrix::from_matrix(q.rows(0, n).into_owned())
}

/// A deterministic random orthogonal `n × n` matrix.
pub fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    positive_qr(&g).0
}

/// Canonical representative of a frame up to rotation and sign flips.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    /// `rotation · original · diag(signs)`.
    pub frame: FrameMatrix,
    /// Orthogonal `n × n` map; may be improper.
    pub rotation: DMatrix<f64>,
    pub signs: Vec<i8>,
}

/// Rotates the frame so its first `n` columns are right-triangular with a
/// positive diagonal.
///
/// The basis columns keep sign `+1`. Each remaining column is flipped so its
/// first entry above `1e-12 · ‖v‖` is positive.
pub fn canonicalize(frame: &FrameMatrix) -> Result<CanonicalForm> {
    let n = frame.dim();
    if frame.count() < n {
        return Err(FrameError::InvalidShape(format!(
            "canonical form needs N >= n, got n={n}, N={}",
            frame.count()
        )));
    }
    let basis = frame.matrix().columns(0, n).into_owned();
    let det = abs_det(&basis);
    if det <= SINGULAR_DET {
        return Err(FrameError::SingularBasis { det });
    }
    let (q, _) = positive_qr(&basis);
    let rotation = q.transpose();
    let mut data = &rotation * frame.matrix();
    let mut signs = vec![1i8; frame.count()];
    for (j, sign) in signs.iter_mut().enumerate().skip(n) {
        let col = data.column(j);
        let cutoff = 1e-12 * col.norm();
        if let Some(lead) = col.iter().find(|x| x.abs() > cutoff) {
            if *lead < 0.0 {
                *sign = -1;
                data.column_mut(j).neg_mut();
            }
        }
    }
    Ok(CanonicalForm {
        frame: FrameMatrix::from_matrix(data)?,
        rotation,
        signs,
    })
}

fn check_same_shape(f1: &FrameMatrix, f2: &FrameMatrix) -> Result<()> {
    if f1.dim() != f2.dim() || f1.count() != f2.count() {
        return Err(FrameError::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            f1.dim(),
            f1.count(),
            f2.dim(),
            f2.count()
        )));
    }
    Ok(())
}

/// Column signs `d` such that `d_i d_j g2_ij` has the sign of `g1_ij` along a
/// breadth-first spanning forest of the graph `|g1_ij| > tol`.
fn align_signs(g1: &DMatrix<f64>, g2: &DMatrix<f64>, tol: f64) -> Vec<f64> {
    let count = g1.nrows();
    let mut signs = vec![0.0; count];
    let mut queue = VecDeque::new();
    for root in 0..count {
        if signs[root] != 0.0 {
            continue;
        }
        signs[root] = 1.0;
        queue.push_back(root);
        while let Some(i) = queue.pop_front() {
            for j in 0..count {
                if signs[j] == 0.0 && g1[(i, j)].abs() > tol {
                    let flip = g1[(i, j)].signum() * g2[(i, j)].signum();
                    signs[j] = signs[i] * if flip < 0.0 { -1.0 } else { 1.0 };
                    queue.push_back(j);
                }
            }
        }
    }
    signs
}

/// Whether two frames agree up to an orthogonal change of coordinates and
/// sign flips of individual vectors.
pub fn equivalent(f1: &FrameMatrix, f2: &FrameMatrix, tol: f64) -> Result<bool> {
    check_same_shape(f1, f2)?;
    let g1 = f1.gram();
    let g2 = f2.gram();
    if max_abs(&(g1.abs() - g2.abs())) > tol {
        return Ok(false);
    }
    let signs = align_signs(&g1, &g2, tol);
    let aligned = f2.scaled(&signs)?;
    let c1 = canonicalize(f1)?.frame;
    let c2 = canonicalize(&aligned)?.frame;
    for j in 0..f1.count() {
        let a = c1.column(j);
        let b = c2.column(j);
        let same = (a - b).amax();
        let flipped = (a + b).amax();
        if same.min(flipped) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
