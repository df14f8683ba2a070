//! Scalability of unit-norm `(n+1)`-frames.
//!
//! A frame is scalable when positive `ℓⱼ` exist with `{ℓⱼ vⱼ}` Parseval. For
//! `N = n + 1` the squared weights are forced by the pairwise identity
//! `(1-ℓᵢ²)(1-ℓⱼ²) = ℓᵢ²ℓⱼ² cos²θᵢⱼ`, solved from any triple `i, j, k` as
//!
//! ```text
//! ℓᵢ² = |cos θₖⱼ| / (|cos θₖⱼ| + |cos θₖᵢ cos θⱼᵢ|)
//! ```
//!
//! The identity only sees `cos²`, so a candidate that satisfies it still has
//! to be checked by rescaling and verifying the frame.

use nalgebra::{DMatrix, DVector};

use crate::error::{FrameError, Result};
use crate::frame::{gram_and_angles, verify, AngleTable, FrameMatrix};

/// Denominators at or below this make a pair `(j, k)` inadmissible.
pub const PAIR_DENOMINATOR_MIN: f64 = 1e-14;
/// Columns must have unit norm to within this.
pub const UNIT_NORM_TOL: f64 = 1e-10;
/// Slack on the `ℓ² ≤ 1/2` count.
pub const HALF_BOUNDARY_SLACK: f64 = 1e-12;

/// Positive scale factors `ℓ₁, …, ℓ_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingWeights(Vec<f64>);

impl ScalingWeights {
    pub fn new(lengths: Vec<f64>) -> Self {
        Self(lengths)
    }

    pub fn from_squares(squares: &[f64]) -> Self {
        Self(squares.iter().map(|s| s.max(0.0).sqrt()).collect())
    }

    pub fn lengths(&self) -> &[f64] {
        &self.0
    }

    pub fn squares(&self) -> Vec<f64> {
        self.0.iter().map(|l| l * l).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Why a frame was judged not scalable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// Some `ℓᵢ² = 1` while `vᵢ` is not orthogonal to every other vector.
    ContainsOrthonormalPair,
    /// The closed form depends on the choice of `(j, k)`.
    RatioInconsistent,
    /// The pairwise identity fails for the candidate weights.
    IdentityViolated,
    /// A weight is outside `(0, 1]`, or two weights have `ℓ² ≤ 1/2`.
    WeightOutOfRange,
    /// The candidate satisfies the pairwise identity but the rescaled frame
    /// is not Parseval (the cosine signs admit no consistent completion).
    ScaledFrameNotParseval,
}

impl FailureReason {
    pub fn name(self) -> &'static str {
        match self {
            Self::ContainsOrthonormalPair => "ContainsOrthonormalPair",
            Self::RatioInconsistent => "RatioInconsistent",
            Self::IdentityViolated => "IdentityViolated",
            Self::WeightOutOfRange => "WeightOutOfRange",
            Self::ScaledFrameNotParseval => "ScaledFrameNotParseval",
        }
    }
}

/// Outcome of [`decide_scalability`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalabilityVerdict {
    pub scalable: bool,
    /// Present iff `scalable`.
    pub weights: Option<ScalingWeights>,
    /// Closed-form `ℓᵢ²` candidates (empty if they could not be formed).
    pub candidate_squares: Vec<f64>,
    pub max_identity_residual: f64,
    pub ratio_spread: f64,
    pub reason: Option<FailureReason>,
}

impl ScalabilityVerdict {
    fn reject(
        reason: FailureReason,
        candidate_squares: Vec<f64>,
        identity: f64,
        spread: f64,
    ) -> Self {
        Self {
            scalable: false,
            weights: None,
            candidate_squares,
            max_identity_residual: identity,
            ratio_spread: spread,
            reason: Some(reason),
        }
    }
}

fn pair_ratio(angles: &AngleTable, i: usize, j: usize, k: usize) -> Option<f64> {
    let num = angles.cos(k, j).abs();
    let den = num + (angles.cos(k, i) * angles.cos(j, i)).abs();
    (den > PAIR_DENOMINATOR_MIN).then(|| num / den)
}

/// Admissible pairs `j < k` (both `≠ i`) in lexicographic order.
fn pairs(count: usize, i: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..count).filter(move |&j| j != i).flat_map(move |j| {
        ((j + 1)..count)
            .filter(move |&k| k != i)
            .map(move |k| (j, k))
    })
}

/// `ℓᵢ²` from the lexicographically smallest admissible pair `(j, k)`.
pub fn closed_form_weights(angles: &AngleTable, i: usize) -> Result<f64> {
    if i >= angles.count() {
        return Err(FrameError::ShapeMismatch(format!(
            "index {i} out of range for {} vectors",
            angles.count()
        )));
    }
    pairs(angles.count(), i)
        .find_map(|(j, k)| pair_ratio(angles, i, j, k))
        .ok_or(FrameError::DegeneratePair { index: i })
}

/// `max_{i<j} |(1-ℓᵢ²)(1-ℓⱼ²) - ℓᵢ²ℓⱼ² cos²θᵢⱼ|`.
pub fn pair_identity_residual(weights: &ScalingWeights, angles: &AngleTable) -> Result<f64> {
    if weights.len() != angles.count() {
        return Err(FrameError::ShapeMismatch(format!(
            "{} weights for {} angles",
            weights.len(),
            angles.count()
        )));
    }
    let sq = weights.squares();
    let mut worst = 0.0_f64;
    for i in 0..sq.len() {
        for j in (i + 1)..sq.len() {
            worst = worst.max(pair_residual(&sq, angles, i, j));
        }
    }
    Ok(worst)
}

/// Spread of the closed-form ratio over the choice of `(j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioConsistency {
    /// `max_i (max - min)` over admissible pairs.
    pub spread: f64,
    /// Indices without any admissible pair (their spread counts as 0).
    pub degenerate: Vec<usize>,
}

pub fn ratio_consistency(angles: &AngleTable) -> RatioConsistency {
    let count = angles.count();
    let mut spread = 0.0_f64;
    let mut degenerate = Vec::new();
    for i in 0..count {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (j, k) in pairs(count, i) {
            if let Some(r) = pair_ratio(angles, i, j, k) {
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        if lo.is_finite() {
            spread = spread.max(hi - lo);
        } else {
            degenerate.push(i);
        }
    }
    RatioConsistency { spread, degenerate }
}

fn check_unit_count(frame: &FrameMatrix) -> Result<()> {
    let n = frame.dim();
    if frame.count() != n + 1 {
        return Err(FrameError::WrongCount {
            expected: n + 1,
            actual: frame.count(),
        });
    }
    if let Some(j) = frame.zero_column() {
        return Err(FrameError::ZeroColumn(j));
    }
    for (index, norm) in frame.norms().into_iter().enumerate() {
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(FrameError::NotUnitNorm { index, norm });
        }
    }
    if let Some((i, j)) = frame.parallel_pair() {
        return Err(FrameError::TrivialFrame(i, j));
    }
    Ok(())
}

/// Decides whether a nontrivial unit-norm `(n+1)`-frame is scalable.
///
/// Steps: closed-form candidates; the `ℓᵢ² = 1` branch (then `vᵢ` must be
/// orthogonal to everything else); pair independence of the closed form;
/// the pairwise identity; the range `0 < ℓ² ≤ 1` with at most one
/// `ℓ² ≤ 1/2`; finally the rescaled frame must verify as Parseval at
/// `10 · tol`.
pub fn decide_scalability(frame: &FrameMatrix, tol: f64) -> Result<ScalabilityVerdict> {
    check_unit_count(frame)?;
    let angles = gram_and_angles(frame)?;
    let count = frame.count();

    let mut squares = Vec::with_capacity(count);
    for i in 0..count {
        match closed_form_weights(&angles, i) {
            Ok(s) => squares.push(s),
            // Every pair vanishing means the other n vectors are orthonormal.
            Err(FrameError::DegeneratePair { .. }) => {
                return Ok(ScalabilityVerdict::reject(
                    FailureReason::ContainsOrthonormalPair,
                    Vec::new(),
                    f64::NAN,
                    f64::NAN,
                ))
            }
            Err(e) => return Err(e),
        }
    }

    // ℓᵢ = 1 forces cos θᵢⱼ = 0 for all j; near 1 the pair identity bounds
    // how large the cosines may be.
    for (i, &s) in squares.iter().enumerate() {
        if s >= 1.0 - tol
            && (0..count).any(|j| j != i && pair_residual(&squares, &angles, i, j) > tol)
        {
            return Ok(ScalabilityVerdict::reject(
                FailureReason::ContainsOrthonormalPair,
                squares,
                f64::NAN,
                f64::NAN,
            ));
        }
    }

    // The pair identity with cos θᵢⱼ = 0 forces ℓᵢ = 1 or ℓⱼ = 1, so one of
    // the two must be orthogonal to everything else.
    if orthogonal_pair_unresolved(&angles, tol) {
        return Ok(ScalabilityVerdict::reject(
            FailureReason::ContainsOrthonormalPair,
            squares,
            f64::NAN,
            f64::NAN,
        ));
    }

    let spread = ratio_consistency(&angles).spread;
    if spread > tol {
        return Ok(ScalabilityVerdict::reject(
            FailureReason::RatioInconsistent,
            squares,
            f64::NAN,
            spread,
        ));
    }

    let candidate = ScalingWeights::from_squares(&squares);
    let identity = pair_identity_residual(&candidate, &angles)?;
    if identity > tol {
        return Ok(ScalabilityVerdict::reject(
            FailureReason::IdentityViolated,
            squares,
            identity,
            spread,
        ));
    }

    if !weights_in_range(&squares, tol) {
        return Ok(ScalabilityVerdict::reject(
            FailureReason::WeightOutOfRange,
            squares,
            identity,
            spread,
        ));
    }

    let scaled = frame.scaled(candidate.lengths())?;
    if !verify(&scaled, 10.0 * tol).is_parseval {
        return Ok(ScalabilityVerdict::reject(
            FailureReason::ScaledFrameNotParseval,
            squares,
            identity,
            spread,
        ));
    }

    Ok(ScalabilityVerdict {
        scalable: true,
        weights: Some(candidate),
        candidate_squares: squares,
        max_identity_residual: identity,
        ratio_spread: spread,
        reason: None,
    })
}

fn pair_residual(squares: &[f64], angles: &AngleTable, i: usize, j: usize) -> f64 {
    let (a, b) = (squares[i], squares[j]);
    ((1.0 - a) * (1.0 - b) - a * b * angles.cos(i, j).powi(2)).abs()
}

fn orthogonal_to_rest(angles: &AngleTable, i: usize, tol: f64) -> bool {
    (0..angles.count()).all(|j| j == i || angles.cos(i, j).abs() <= tol)
}

fn orthogonal_pair_unresolved(angles: &AngleTable, tol: f64) -> bool {
    let count = angles.count();
    (0..count).any(|i| {
        ((i + 1)..count).any(|j| {
            angles.cos(i, j).abs() <= tol
                && !orthogonal_to_rest(angles, i, tol)
                && !orthogonal_to_rest(angles, j, tol)
        })
    })
}

/// `0 < ℓ² ≤ 1` for all weights and at most one `ℓ² ≤ 1/2`.
fn weights_in_range(squares: &[f64], tol: f64) -> bool {
    squares.iter().all(|&s| s > 0.0 && s <= 1.0 + tol) && at_most_one_half(squares)
}

fn at_most_one_half(squares: &[f64]) -> bool {
    squares
        .iter()
        .filter(|&&s| s <= 0.5 + HALF_BOUNDARY_SLACK)
        .count()
        <= 1
}

/// Both parts of the stated length bounds for a Parseval `(n+1)`-frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthBounds {
    pub min_square: f64,
    /// `1 / (n + 1)`.
    pub lower_bound: f64,
    /// Number of `ℓ² ≤ 1/2` (with [`HALF_BOUNDARY_SLACK`]).
    pub at_most_half: usize,
}

impl LengthBounds {
    pub fn lower_bound_holds(&self) -> bool {
        self.min_square > self.lower_bound
    }

    pub fn half_exception_holds(&self) -> bool {
        self.at_most_half <= 1
    }
}

pub fn length_bounds(weights: &ScalingWeights) -> LengthBounds {
    let squares = weights.squares();
    LengthBounds {
        min_square: squares.iter().copied().fold(f64::INFINITY, f64::min),
        lower_bound: 1.0 / weights.len() as f64,
        at_most_half: squares
            .iter()
            .filter(|&&s| s <= 0.5 + HALF_BOUNDARY_SLACK)
            .count(),
    }
}

/// `min ℓⱼ² > 1/(n+1)` and `#{j : ℓⱼ² ≤ 1/2} ≤ 1`.
///
/// Only the second half holds for every nontrivial Parseval `(n+1)`-frame:
/// any unit `x ∈ ℝⁿ⁺¹` yields one with `ℓⱼ² = 1 - xⱼ²`.
pub fn length_bounds_check(weights: &ScalingWeights) -> bool {
    let b = length_bounds(weights);
    b.lower_bound_holds() && b.half_exception_holds()
}

/// The provable half of [`length_bounds_check`]: at most one `ℓ² ≤ 1/2`.
pub fn pair_sum_bound_check(weights: &ScalingWeights) -> bool {
    at_most_one_half(&weights.squares())
}

/// Iteration budget of the oracle's active-set loop.
pub const ORACLE_MAX_ITER: usize = 10_000;
/// Optimality threshold on the dual vector.
pub const ORACLE_KKT_TOL: f64 = 1e-12;
/// The oracle reports a scaling iff `‖Σ cⱼ vⱼvⱼᵀ - I‖_F` is at most this.
pub const ORACLE_OBJECTIVE_MAX: f64 = 1e-9;

/// Result of the nonnegative least-squares oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    /// Minimizer `cⱼ ≥ 0` (candidate `ℓⱼ²`).
    pub coefficients: Vec<f64>,
    /// `‖Σ cⱼ vⱼvⱼᵀ - I‖_F` at the minimizer.
    pub objective: f64,
    pub iterations: usize,
}

impl OracleOutcome {
    /// Weights when the objective vanishes and every coefficient is positive.
    pub fn weights(&self) -> Option<ScalingWeights> {
        (self.objective <= ORACLE_OBJECTIVE_MAX && self.coefficients.iter().all(|&c| c > 0.0))
            .then(|| ScalingWeights::from_squares(&self.coefficients))
    }
}

/// Minimizes `‖Σ cⱼ vⱼvⱼᵀ - I‖_F` over `c ≥ 0` with a Lawson–Hanson active
/// set on the normal equations `H c = g`, `Hⱼₖ = ⟨vⱼ, vₖ⟩²`, `gⱼ = ‖vⱼ‖²`.
pub fn oracle_solve(frame: &FrameMatrix) -> OracleOutcome {
    let count = frame.count();
    let h = frame.gram().map(|x| x * x);
    let g = DVector::from_iterator(count, frame.norms().into_iter().map(|l| l * l));

    let mut c = DVector::<f64>::zeros(count);
    let mut passive = vec![false; count];
    let mut iterations = 0;

    'outer: while iterations < ORACLE_MAX_ITER {
        iterations += 1;
        let dual = &g - &h * &c;
        let entering = (0..count)
            .filter(|&j| !passive[j])
            .max_by(|&a, &b| dual[a].total_cmp(&dual[b]));
        match entering {
            Some(j) if dual[j] > ORACLE_KKT_TOL => passive[j] = true,
            _ => break,
        }
        loop {
            iterations += 1;
            let Some(z) = solve_passive(&h, &g, &passive) else {
                break 'outer;
            };
            if (0..count).all(|j| !passive[j] || z[j] > 0.0) {
                c = z;
                break;
            }
            let mut alpha = 1.0_f64;
            for j in 0..count {
                if passive[j] && z[j] <= 0.0 {
                    alpha = alpha.min(c[j] / (c[j] - z[j]));
                }
            }
            c += (&z - &c) * alpha;
            for j in 0..count {
                if passive[j] && c[j] <= ORACLE_KKT_TOL {
                    passive[j] = false;
                    c[j] = 0.0;
                }
            }
            if iterations >= ORACLE_MAX_ITER {
                break 'outer;
            }
        }
    }

    let n = frame.dim();
    let mut residual = -DMatrix::<f64>::identity(n, n);
    for j in 0..count {
        let v = frame.column(j);
        residual += v * v.transpose() * c[j];
    }
    OracleOutcome {
        coefficients: c.iter().copied().collect(),
        objective: residual.norm(),
        iterations,
    }
}

/// Solves `H_PP z_P = g_P`, zero outside the passive set.
fn solve_passive(h: &DMatrix<f64>, g: &DVector<f64>, passive: &[bool]) -> Option<DVector<f64>> {
    let idx: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |a, b| h[(idx[a], idx[b])]);
    let rhs = DVector::from_fn(idx.len(), |a, _| g[idx[a]]);
    let sol = match sub.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => sub.svd(true, true).solve(&rhs, 1e-14).ok()?,
    };
    let mut z = DVector::zeros(passive.len());
    for (a, &j) in idx.iter().enumerate() {
        z[j] = sol[a];
    }
    Some(z)
}

/// Independent scalability oracle: weights iff the least-squares fit of the
/// identity by `Σ cⱼ vⱼvⱼᵀ`, `cⱼ ≥ 0`, is exact.
pub fn oracle_scale(frame: &FrameMatrix) -> Option<ScalingWeights> {
    oracle_solve(frame).weights()
}
