//! The η̂-form of the boundary family by the heat-kernel mode sum, the
//! Poisson-dual series and the Bernoulli closed form.

use taubnut_index::eta::{eta_route, Route, SeriesSpec};

fn main() -> taubnut_index::Result<()> {
    let s = SeriesSpec::default();
    println!("{:>5} {:>10} {:>22} {:>22} {:>10}", "λ", "route", "a0", "a2", "error");
    for lambda in [0.1, 0.25, 0.4, 0.6, 0.9] {
        for route in Route::ALL {
            let v = eta_route(lambda, route, &s)?;
            println!(
                "{lambda:>5} {:>10} {:>22.16} {:>22.16} {:>10.1e}",
                route.name(),
                v.value.a0,
                v.value.a2,
                v.error.a0.max(v.error.a2)
            );
        }
    }
    Ok(())
}
