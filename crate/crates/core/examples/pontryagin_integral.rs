//! Pontryagin number of the exact d-metric for both blend profiles, with a
//! refinement table.

use taubnut_index::charclasses::{convergence_table, pontryagin_integral, QuadratureSpec};
use taubnut_index::geometry::{BlendKind, BlendProfile, MetricSpec, MetricVariant};

fn main() -> taubnut_index::Result<()> {
    let quad = QuadratureSpec::default();
    for kind in [BlendKind::Quintic, BlendKind::Septic] {
        let spec = MetricSpec::new(MetricVariant::ExactD).with_blend(BlendProfile { kind, ..Default::default() });
        let p = pontryagin_integral(&spec, &quad)?;
        println!(
            "{kind:?}: {:.12}  (1/12 = {:.12})  err {:.1e}  tail {:.1e}  core {:.1e}",
            p.value,
            1.0 / 12.0,
            p.error_estimate,
            p.tail_bound,
            p.core_bound
        );
    }

    println!("\nN_r    value");
    for row in convergence_table(&MetricSpec::default(), &quad, &[32, 64, 128, 256])? {
        println!("{:<6} {:.12}", row.n_r, row.value);
    }

    // every member of the homotopy carries the same Pontryagin number
    for t in [0.0, 0.5, 1.0] {
        let p = pontryagin_integral(&MetricSpec::new(MetricVariant::Homotopy { t }), &quad)?;
        println!("homotopy t = {t}: {:.10}", p.value);
    }
    Ok(())
}
