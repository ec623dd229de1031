//! Boundary data and the spectral gap of the vertical Dirac operator.

use taubnut_index::eta::vertical_spectrum;
use taubnut_index::gauge::{boundary_data, InstantonData};

fn main() -> taubnut_index::Result<()> {
    let data = InstantonData::model(&[(0.3, 0), (0.7, 1)])?;
    let bd = boundary_data(&data)?;
    println!("λ mod 1 = {:?}, fluxes = {:?}, δ = {}", bd.lambdas_mod1, bd.fluxes, bd.delta);
    for ch in &data.channels {
        let mut ev = vertical_spectrum(ch.lambda, 3)?;
        ev.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        println!("λ = {}: smallest |eigenvalues| {:?}", ch.lambda, &ev[..4]);
    }
    // a nearly periodic holonomy closes the gap
    match boundary_data(&InstantonData::model(&[(2.0 + 1e-9, 0)])?) {
        Err(e) => println!("λ ≈ 2: {e}"),
        Ok(bd) => println!("λ ≈ 2: δ = {}", bd.delta),
    }
    Ok(())
}
