//! Necessary conditions satisfied by Parseval and tight frames, and an
//! audit that runs whichever of them apply to a given frame.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{FrameError, Result};
use crate::frame::{verify, FrameMatrix, ZERO_NORM};
use crate::linalg::{abs_det, max_abs, remove_column};
use crate::scaling::{pair_sum_bound_check, ScalingWeights};

/// Parseval preconditions are checked at this tolerance.
pub const PARSEVAL_GATE: f64 = 1e-8;

fn require_parseval(frame: &FrameMatrix) -> Result<()> {
    let report = verify(frame, PARSEVAL_GATE);
    if !report.is_parseval {
        return Err(FrameError::NotParseval {
            residual: report.parseval_deviation,
        });
    }
    Ok(())
}

/// Residuals of the three angle-sum identities of a Parseval frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// `max_i |Σⱼ ℓⱼ² cos²θᵢⱼ - 1|`.
    pub cos: f64,
    /// `max_i |Σⱼ ℓⱼ² sin²θᵢⱼ - (n-1)|`.
    pub sin: f64,
    /// `max_i |Σⱼ ℓⱼ² cos 2θᵢⱼ - (2-n)|`.
    pub cos2: f64,
}

/// Evaluates the angle sums over all `j = 1..N`, including `j = i`.
///
/// Zero vectors contribute nothing and are skipped as reference index.
pub fn necessary_identities(frame: &FrameMatrix) -> Result<IdentityResiduals> {
    require_parseval(frame)?;
    let n = frame.dim() as f64;
    let gram = frame.gram();
    let norms = frame.norms();
    let mut out = IdentityResiduals {
        cos: 0.0,
        sin: 0.0,
        cos2: 0.0,
    };
    for i in 0..frame.count() {
        if norms[i] <= ZERO_NORM {
            continue;
        }
        let (mut cos_sum, mut sin_sum, mut cos2_sum) = (0.0, 0.0, 0.0);
        for j in 0..frame.count() {
            if norms[j] <= ZERO_NORM {
                continue;
            }
            let l2 = norms[j] * norms[j];
            let c = if i == j {
                1.0
            } else {
                (gram[(i, j)] / (norms[i] * norms[j])).clamp(-1.0, 1.0)
            };
            let c2 = c * c;
            cos_sum += l2 * c2;
            sin_sum += l2 * (1.0 - c2);
            cos2_sum += l2 * (2.0 * c2 - 1.0);
        }
        out.cos = out.cos.max((cos_sum - 1.0).abs());
        out.sin = out.sin.max((sin_sum - (n - 1.0)).abs());
        out.cos2 = out.cos2.max((cos2_sum - (2.0 - n)).abs());
    }
    Ok(out)
}

/// Signed planar angles of every vector measured from `vᵢ`, in `[0, 2π)`.
pub fn planar_angles(frame: &FrameMatrix, i: usize) -> Result<Vec<f64>> {
    if frame.dim() != 2 {
        return Err(FrameError::WrongDimension {
            expected: 2,
            actual: frame.dim(),
        });
    }
    if let Some(j) = frame.zero_column() {
        return Err(FrameError::ZeroColumn(j));
    }
    let r = frame.column(i);
    Ok((0..frame.count())
        .map(|j| {
            let v = frame.column(j);
            let cross = r[0] * v[1] - r[1] * v[0];
            let dot = r[0] * v[0] + r[1] * v[1];
            cross.atan2(dot).rem_euclid(TAU)
        })
        .collect())
}

/// `|Σⱼ ‖vⱼ‖² e^{2iφⱼ}|` with `φⱼ` the signed angle from `vᵢ`.
pub fn planar_tightness_at(frame: &FrameMatrix, i: usize) -> Result<f64> {
    let angles = planar_angles(frame, i)?;
    let (mut re, mut im) = (0.0, 0.0);
    for (l, phi) in frame.norms().iter().zip(angles) {
        re += l * l * (2.0 * phi).cos();
        im += l * l * (2.0 * phi).sin();
    }
    Ok(re.hypot(im))
}

/// Planar tightness residual with reference vector `v₁`; zero iff tight.
pub fn planar_tightness(frame: &FrameMatrix) -> Result<f64> {
    planar_tightness_at(frame, 0)
}

/// `maxⱼ ||det(F without vⱼ)| - √(1 - ‖vⱼ‖²)|` for Parseval `(n+1)`-frames.
pub fn minor_determinants(frame: &FrameMatrix) -> Result<f64> {
    require_parseval(frame)?;
    check_n_plus_one(frame)?;
    let m = frame.matrix();
    let mut worst = 0.0_f64;
    for (j, l) in frame.norms().into_iter().enumerate() {
        let det = abs_det(&remove_column(m, j));
        worst = worst.max((det - (1.0 - l * l).max(0.0).sqrt()).abs());
    }
    Ok(worst)
}

fn check_n_plus_one(frame: &FrameMatrix) -> Result<()> {
    if frame.count() != frame.dim() + 1 {
        return Err(FrameError::WrongCount {
            expected: frame.dim() + 1,
            actual: frame.count(),
        });
    }
    Ok(())
}

/// Both sides of "an `n`-frame is Parseval iff its vectors are orthonormal".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthonormalityCheck {
    pub parseval: bool,
    pub orthonormal: bool,
    /// `max |Gram - I|`.
    pub gram_deviation: f64,
}

impl OrthonormalityCheck {
    pub fn agree(&self) -> bool {
        self.parseval == self.orthonormal
    }
}

pub fn orthonormality_characterization(
    frame: &FrameMatrix,
    tol: f64,
) -> Result<OrthonormalityCheck> {
    if frame.count() != frame.dim() {
        return Err(FrameError::WrongCount {
            expected: frame.dim(),
            actual: frame.count(),
        });
    }
    let gram = frame.gram();
    let deviation = max_abs(&(gram - nalgebra::DMatrix::identity(frame.count(), frame.count())));
    Ok(OrthonormalityCheck {
        parseval: verify(frame, tol).is_parseval,
        orthonormal: deviation <= tol,
        gram_deviation: deviation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: &'static str,
    /// `None` when skipped.
    pub max_residual: Option<f64>,
    pub status: CheckStatus,
}

/// Per-check audit results. A check passes iff its residual is at most the
/// audit tolerance; inapplicable checks are skipped, never failed.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub tol: f64,
    pub checks: Vec<CheckRecord>,
}

impl DiagnosticsReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for DiagnosticsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<26} {:>12}  status", "check", "residual")?;
        for c in &self.checks {
            let residual = c
                .max_residual
                .map(|r| format!("{r:.3e}"))
                .unwrap_or_else(|| "-".into());
            let status = match &c.status {
                CheckStatus::Pass => "pass".to_string(),
                CheckStatus::Fail => "FAIL".to_string(),
                CheckStatus::Skipped(why) => format!("skip ({why})"),
            };
            writeln!(f, "{:<26} {:>12}  {}", c.name, residual, status)?;
        }
        Ok(())
    }
}

pub const CHECK_PLANAR: &str = "planar_tightness";
pub const CHECK_TRACE: &str = "trace_identity";
pub const CHECK_COS: &str = "cosine_sum";
pub const CHECK_SIN: &str = "sine_sum";
pub const CHECK_COS2: &str = "cos2theta_sum";
pub const CHECK_MINORS: &str = "minor_determinants";
pub const CHECK_PAIR_BOUND: &str = "length_pair_bound";
pub const CHECK_ORTHONORMAL: &str = "orthonormality";

/// Runs every check applicable to the frame's shape and Parseval status.
pub fn audit(frame: &FrameMatrix, tol: f64) -> DiagnosticsReport {
    let mut checks = Vec::new();
    let mut record = |name, residual: Option<f64>, skip: Option<&'static str>| {
        let status = match (residual, skip) {
            (_, Some(why)) => CheckStatus::Skipped(why),
            (Some(r), None) if r <= tol => CheckStatus::Pass,
            _ => CheckStatus::Fail,
        };
        checks.push(CheckRecord {
            name,
            max_residual: if skip.is_some() { None } else { residual },
            status,
        });
    };

    let n = frame.dim();
    let parseval = verify(frame, PARSEVAL_GATE).is_parseval;
    let n_plus_one = frame.count() == n + 1;

    if n != 2 {
        record(CHECK_PLANAR, None, Some("n != 2"));
    } else {
        match planar_tightness(frame) {
            Ok(r) => record(CHECK_PLANAR, Some(r), None),
            Err(_) => record(CHECK_PLANAR, None, Some("zero column")),
        }
    }

    if parseval {
        let total: f64 = frame.norms().iter().map(|l| l * l).sum();
        record(CHECK_TRACE, Some((total - n as f64).abs()), None);
        let ids = necessary_identities(frame).expect("Parseval gate checked");
        record(CHECK_COS, Some(ids.cos), None);
        record(CHECK_SIN, Some(ids.sin), None);
        record(CHECK_COS2, Some(ids.cos2), None);
    } else {
        for name in [CHECK_TRACE, CHECK_COS, CHECK_SIN, CHECK_COS2] {
            record(name, None, Some("not Parseval"));
        }
    }

    match (parseval, n_plus_one) {
        (true, true) => {
            record(CHECK_MINORS, minor_determinants(frame).ok(), None);
            if frame.is_nontrivial() {
                let ok = pair_sum_bound_check(&ScalingWeights::new(frame.norms()));
                record(CHECK_PAIR_BOUND, Some(if ok { 0.0 } else { 1.0 }), None);
            } else {
                record(CHECK_PAIR_BOUND, None, Some("trivial frame"));
            }
        }
        (false, _) => {
            record(CHECK_MINORS, None, Some("not Parseval"));
            record(CHECK_PAIR_BOUND, None, Some("not Parseval"));
        }
        (true, false) => {
            record(CHECK_MINORS, None, Some("N != n+1"));
            record(CHECK_PAIR_BOUND, None, Some("N != n+1"));
        }
    }

    if frame.count() == n {
        let c = orthonormality_characterization(frame, tol).expect("N = n checked");
        record(
            CHECK_ORTHONORMAL,
            Some(if c.agree() { 0.0 } else { 1.0 }),
            None,
        );
    } else {
        record(CHECK_ORTHONORMAL, None, Some("N != n"));
    }

    DiagnosticsReport { tol, checks }
}
