use serde::{Deserialize, Serialize};

use super::{check_biv, check_slv, ConditionReport};
use crate::error::{Error, Result};
use crate::mmspace::MMSpace;
use crate::transport::{verify_certificate, ClosenessCertificate};

/// Transfer of SLV and BIV from `X` to an `(ε, δ)`-close `Y`.
///
/// If `X` satisfies `SLV(Λ, ρ-2ε, 5ε)` and `BIV(Λ, ρ-2ε, 5ε)` then `Y`
/// satisfies `SLV(6e^{2δ}Λ, ρ, ε)` and `BIV(e^{2δ}Λ, ρ, ε)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityProbe {
    pub certificate_valid: bool,
    /// SLV and BIV audits of `X`.
    pub preconditions: Vec<ConditionReport>,
    pub preconditions_hold: bool,
    /// SLV and BIV audits of `Y` at the transferred constants.
    pub conclusions: Vec<ConditionReport>,
    pub conclusions_hold: bool,
    /// False only when certificate and preconditions hold but a conclusion
    /// fails.
    pub consistent: bool,
}

pub fn conditions_stability_probe(
    x: &MMSpace,
    y: &MMSpace,
    cert: &ClosenessCertificate,
    lambda: f64,
    rho: f64,
    eps: f64,
) -> Result<StabilityProbe> {
    if !(eps > 0.0) || eps > rho / 12.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("need 0 < eps <= rho/12, got eps = {eps}, rho = {rho}")));
    }
    if cert.eps > eps {
        return Err(Error::InvalidParameter(format!("certificate is at eps = {}, above {eps}", cert.eps)));
    }
    let certificate_valid = verify_certificate(cert, x, y)?.valid;
    let preconditions =
        vec![check_slv(x, lambda, rho - 2.0 * eps, 5.0 * eps)?, check_biv(x, lambda, rho - 2.0 * eps, 5.0 * eps)?];
    let grow = (2.0 * cert.delta).exp();
    let conclusions = vec![check_slv(y, 6.0 * grow * lambda, rho, eps)?, check_biv(y, grow * lambda, rho, eps)?];
    let preconditions_hold = preconditions.iter().all(|r| r.holds);
    let conclusions_hold = conclusions.iter().all(|r| r.holds);
    Ok(StabilityProbe {
        certificate_valid,
        preconditions,
        preconditions_hold,
        conclusions,
        conclusions_hold,
        consistent: !(certificate_valid && preconditions_hold) || conclusions_hold,
    })
}
