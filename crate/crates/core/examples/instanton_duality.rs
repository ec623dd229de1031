//! Field strength of model abelian connections: anti-self-duality, closure
//! and the bulk action against its closed form.

use taubnut_index::charclasses::QuadratureSpec;
use taubnut_index::gauge::{bulk_action, bulk_closed_form, field_strength_auto, InstantonChannel, InstantonData};
use taubnut_index::geometry::Point;

fn main() -> taubnut_index::Result<()> {
    let ch = InstantonChannel::model(0.3, 2);
    for r in [0.2, 1.0, 6.0] {
        let fs = field_strength_auto(&ch, &Point::from_polar(r, 0.9, 2.2, 1.0))?;
        println!(
            "r = {r:<4} |F| = {:.6e}  |F+*F|/|F| = {:.1e}  |F-*F|/|F| = {:.2}  dF = {:.1e}  {:?}",
            fs.norm,
            fs.asd_defect / fs.norm,
            fs.sd_defect / fs.norm,
            fs.closure_residual,
            fs.duality(1e-8)
        );
    }

    let data = InstantonData::model(&[(0.3, 2), (-0.45, 0), (1.7, 1)])?;
    let bulk = bulk_action(&data, &QuadratureSpec::default())?;
    let exact: f64 = data.channels.iter().map(bulk_closed_form).sum();
    println!("bulk action {:.12} (closed form {exact:.12}, error bound {:.1e})", bulk.value, bulk.error_estimate);
    Ok(())
}
