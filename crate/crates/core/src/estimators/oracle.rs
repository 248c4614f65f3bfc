//! The data-generating conditional distribution, used as a plug-in estimator.

use alloc::format;
use serde::{Deserialize, Serialize};

use crate::estimators::ConditionalCdf;
use crate::link::Link;
use crate::simgen::{weibull_ph_survival, SimConfig};
use crate::{Error, Result};

/// `F(t | x) = 1 - exp(-(s t)^p e^{r(x)})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleModel {
    pub shape: f64,
    pub scale: f64,
    pub link: Link,
}

impl OracleModel {
    pub fn new(shape: f64, scale: f64, link: Link) -> Result<Self> {
        if !(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "oracle needs positive shape and scale, got {shape} and {scale}"
            )));
        }
        Ok(Self { shape, scale, link })
    }

    pub fn from_sim(config: &SimConfig) -> Self {
        Self { shape: config.shape, scale: config.scale, link: config.link.clone() }
    }
}

impl ConditionalCdf for OracleModel {
    fn cdf(&self, t: f64, x: &[f64]) -> f64 {
        1.0 - self.survival(t, x)
    }

    fn survival(&self, t: f64, x: &[f64]) -> f64 {
        weibull_ph_survival(t, self.shape, self.scale, self.link.eval(x))
    }

    fn name(&self) -> &'static str {
        "oracle"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::evaluate_cdf;
    use alloc::vec;

    #[test]
    fn closed_form_values() {
        let m = OracleModel::new(2.0, 1.0, Link::Zero).unwrap();
        let expected = 1.0 - libm::exp(-1.0);
        assert!((evaluate_cdf(&m, 1.0, &[]) - expected).abs() < 1e-15);
        assert_eq!(evaluate_cdf(&m, 0.0, &[]), 0.0);
        assert_eq!(evaluate_cdf(&m, f64::INFINITY, &[]), 1.0);
        let t = m.invert_survival(libm::exp(-1.0), &[], 10.0);
        assert!((t - 1.0).abs() < 1e-8);
        assert_eq!(m.invert_survival(1.0, &[], 10.0), 0.0);
    }

    #[test]
    fn link_shifts_hazard() {
        let m = OracleModel::new(2.0, 1.0, Link::Linear { coefs: vec![1.0] }).unwrap();
        let f = evaluate_cdf(&m, 1.0, &[libm::log(2.0)]);
        assert!((f - (1.0 - libm::exp(-2.0))).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(OracleModel::new(0.0, 1.0, Link::Zero).is_err());
        assert!(OracleModel::new(1.0, -1.0, Link::Zero).is_err());
    }
}
