//! Gauges of shrinking boxes translated so that the origin stays on the
//! boundary of their domains. The sequence epi-converges, yet the value at
//! the origin does not follow the limit, so `u -> zeta(-u(0))` is not
//! continuous.

use serde::Serialize;

use crate::error::Result;
use crate::grid::{gauge_from_halfspaces, hausdorff_sublevel, AffineMax, Halfspace, SublevelSource};
use crate::zeta::ScalarZeta;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscontinuityReport {
    pub ks: Vec<u32>,
    /// Hausdorff distance of `{u_k <= 1}` and `{l_P <= 1}`.
    pub hausdorff: Vec<f64>,
    pub value_at_origin: Vec<f64>,
    pub limit_value_at_origin: f64,
    /// `zeta(-u_k(0))`.
    pub zeta_sequence: Vec<f64>,
    /// `zeta(-l_P(0))`.
    pub zeta_limit: f64,
    /// Sublevel sets converge: distances decrease and the last is below `1e-2`.
    pub epi_converges: bool,
    /// `zeta(-u_k(0))` stays away from `zeta(-l_P(0))` along the sequence.
    pub discontinuous: bool,
}

fn halfspace(n: [f64; 2], b: f64) -> Halfspace {
    Halfspace { n: n.to_vec(), b }
}

/// `P_k = [-1/k, 1] x [-1, 1]`; `k = 0` stands for the limit `[0, 1] x [-1, 1]`.
fn box_gauge(k: u32) -> Result<AffineMax> {
    let left = if k == 0 { 0.0 } else { 1.0 / f64::from(k) };
    gauge_from_halfspaces(
        2,
        &[
            halfspace([-1.0, 0.0], left),
            halfspace([1.0, 0.0], 1.0),
            halfspace([0.0, 1.0], 1.0),
            halfspace([0.0, -1.0], 1.0),
        ],
    )
}

/// `u_k = l_{P_k}(x - e_1 / k)` against `l_P`.
pub fn discontinuity_example(zeta: &ScalarZeta, ks: &[u32]) -> Result<DiscontinuityReport> {
    let limit = box_gauge(0)?;
    let limit_value = limit.eval(&[0.0, 0.0]);
    let zeta_limit = zeta.eval(-limit_value);
    let mut report = DiscontinuityReport {
        ks: ks.to_vec(),
        hausdorff: Vec::new(),
        value_at_origin: Vec::new(),
        limit_value_at_origin: limit_value,
        zeta_sequence: Vec::new(),
        zeta_limit,
        epi_converges: false,
        discontinuous: false,
    };
    for &k in ks {
        let u = box_gauge(k)?.translate(&[1.0 / f64::from(k), 0.0]);
        report.hausdorff.push(hausdorff_sublevel(
            SublevelSource::Affine(&u),
            SublevelSource::Affine(&limit),
            1.0,
        )?);
        let v = u.eval(&[0.0, 0.0]);
        report.value_at_origin.push(v);
        report.zeta_sequence.push(zeta.eval(-v));
    }
    report.epi_converges = report.hausdorff.windows(2).all(|w| w[1] <= w[0])
        && report.hausdorff.last().is_some_and(|d| *d < 1e-2);
    let gap = report
        .zeta_sequence
        .iter()
        .map(|z| (z - zeta_limit).abs())
        .fold(f64::INFINITY, f64::min);
    report.discontinuous = !ks.is_empty() && gap > 1e-9;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sublevel_distance_is_one_over_k() {
        let r = discontinuity_example(&ScalarZeta::hat(2.0), &[1, 2, 4, 10, 100, 1000]).unwrap();
        for (k, d) in r.ks.iter().zip(&r.hausdorff) {
            assert!((d - 1.0 / f64::from(*k)).abs() < 1e-12, "{k} {d}");
        }
        for v in &r.value_at_origin {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert_eq!(r.limit_value_at_origin, 0.0);
        assert!(r.epi_converges && r.discontinuous);
        assert_eq!(r.zeta_limit, 1.0);
    }

    #[test]
    fn flat_zeta_hides_nothing() {
        let r = discontinuity_example(&ScalarZeta::zero(), &[1, 10, 100, 1000]).unwrap();
        assert!(r.epi_converges && !r.discontinuous);
    }
}
