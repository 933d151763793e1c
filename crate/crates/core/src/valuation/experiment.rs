use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::{z2_dual_exact, z2_exact, RadialFn};
use crate::zeta::ScalarZeta;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeProductRow {
    pub id: String,
    pub z2: f64,
    pub z2_dual: f64,
    pub product: f64,
}

/// `z2(zeta, u) * z2_dual(zeta, u)` across a family. Exploratory: no
/// inequality is asserted.
pub fn volume_product_experiment(
    zeta: &ScalarZeta,
    family: &[(String, RadialFn)],
) -> Result<Vec<VolumeProductRow>> {
    family
        .iter()
        .map(|(id, u)| {
            let z2 = z2_exact(zeta, u)?;
            let z2_dual = z2_dual_exact(zeta, u)?;
            Ok(VolumeProductRow {
                id: id.clone(),
                z2,
                z2_dual,
                product: z2 * z2_dual,
            })
        })
        .collect()
}

pub fn volume_product_csv(rows: &[VolumeProductRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}
