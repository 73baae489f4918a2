//! L2-Betti numbers from twisted Betti numbers, the predicted order of the
//! Ruelle L-function at z = 0, and its comparison with the Alexander side.

use serde::Serialize;
use thiserror::Error;

use crate::alexander::{alexander_of, AlexanderData, AlexanderError};
use crate::presentation::{peripheral_trivial, PresentationError, PresentationFile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerdictError {
    #[error("inconsistent input h0 = {h0}, h1 = {h1}, deltaRho = {delta}: {reason}")]
    InconsistentInput { h0: usize, h1: usize, delta: bool, reason: &'static str },
    #[error(transparent)]
    Alexander(#[from] AlexanderError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// Label for the Ruelle side of the comparison: it is the order predicted
/// from twisted Betti numbers, not a numerical continuation.
pub const PREDICTION_SOURCE: &str = "predicted-from-betti-numbers";

fn inconsistent(h0: usize, h1: usize, delta: bool, reason: &'static str) -> VerdictError {
    VerdictError::InconsistentInput { h0, h1, delta, reason }
}

/// (beta0, beta1) from (h0, h1) and whether rho is trivial on the cusp.
pub fn l2_betti(h0: usize, h1: usize, delta_rho: bool) -> Result<(i64, i64), VerdictError> {
    if h0 > 1 {
        return Err(inconsistent(h0, h1, delta_rho, "h0 of a rank-one character is at most 1"));
    }
    if h0 == 1 && !delta_rho {
        return Err(inconsistent(h0, h1, delta_rho, "a globally trivial character is trivial on the cusp"));
    }
    if delta_rho && h1 == 0 {
        return Err(inconsistent(h0, h1, delta_rho, "trivial restriction to the cusp forces h1 >= 1"));
    }
    let beta1 = if delta_rho { h1 as i64 - 1 } else { h1 as i64 };
    Ok((h0 as i64, beta1))
}

/// Order of the Ruelle L-function at z = 0 from the branch formulas; checked
/// against 2(2 beta0 - beta1).
pub fn ruelle_order_prediction(h0: usize, h1: usize, delta_rho: bool) -> Result<i64, VerdictError> {
    let (b0, b1) = l2_betti(h0, h1, delta_rho)?;
    let (h0, h1) = (h0 as i64, h1 as i64);
    let order = if delta_rho { 2 * (2 * h0 - h1 + 1) } else { -2 * h1 };
    assert_eq!(order, 2 * (2 * b0 - b1), "branch formula disagrees with the L2-Betti route");
    Ok(order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum CorollaryBranch {
    TrivialRestriction,
    NontrivialRestriction,
    HypothesisNotMet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub inputs_digest: String,
    pub h0: usize,
    pub h1: usize,
    pub delta_rho: bool,
    pub beta0: i64,
    pub beta1: i64,
    pub predicted_ruelle_order: i64,
    pub prediction_source: &'static str,
    pub alexander_order: i64,
    pub corollary_branch: CorollaryBranch,
    pub corollary_bound: i64,
    pub inequality_holds: bool,
    pub equality_expected: bool,
    pub warnings: Vec<String>,
}

impl Report {
    /// 0 when the inequality holds, 3 when it fails, 2 when it holds but the
    /// vanishing hypothesis is not met.
    pub fn exit_code(&self) -> i32 {
        match (self.inequality_holds, self.corollary_branch) {
            (false, _) => 3,
            (true, CorollaryBranch::HypothesisNotMet) => 2,
            (true, _) => 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Lower bound for the Ruelle order in terms of ord_{t=1} A*.
pub fn alexander_side_bound(delta_rho: bool, alexander_order: i64) -> i64 {
    if delta_rho { 2 * (1 + alexander_order) } else { 2 * alexander_order }
}

pub fn report_from(file: &PresentationFile, a: &AlexanderData) -> Result<Report, VerdictError> {
    let delta = peripheral_trivial(&file.presentation, &file.character)?;
    let (beta0, beta1) = l2_betti(a.h0, a.h1, delta)?;
    let predicted = ruelle_order_prediction(a.h0, a.h1, delta)?;
    let bound = alexander_side_bound(delta, a.ord_at_one);
    let mut warnings = a.warnings.clone();
    let branch = if !a.h0_infinity_vanishes {
        warnings.push(format!(
            "H^0 of the infinite cyclic cover does not vanish; the comparison {} >= {} is informational",
            predicted, bound
        ));
        CorollaryBranch::HypothesisNotMet
    } else if delta {
        CorollaryBranch::TrivialRestriction
    } else {
        CorollaryBranch::NontrivialRestriction
    };
    Ok(Report {
        inputs_digest: file.digest(),
        h0: a.h0,
        h1: a.h1,
        delta_rho: delta,
        beta0,
        beta1,
        predicted_ruelle_order: predicted,
        prediction_source: PREDICTION_SOURCE,
        alexander_order: a.ord_at_one,
        corollary_branch: branch,
        corollary_bound: bound,
        inequality_holds: predicted >= bound,
        equality_expected: a.semisimple_at_one,
        warnings,
    })
}

pub fn main_conjecture_report(file: &PresentationFile) -> Result<Report, VerdictError> {
    let a = alexander_of(file)?;
    report_from(file, &a)
}
