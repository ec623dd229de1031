//! Both sides of the theta-function identity behind the Poisson route.

use taubnut_index::eta::{poisson_check, poisson_partial_sums};

fn main() -> taubnut_index::Result<()> {
    for a in [0.1, 0.25, 0.499] {
        for s in [0.01, 0.1, 1.0] {
            let (lhs, rhs) = poisson_check(a, s, 50, 1000)?;
            println!(
                "a = {a:<5} s = {s:<5} lhs = {lhs:>22.15e} rhs = {rhs:>22.15e} |diff| = {:.1e}",
                (lhs - rhs).abs()
            );
        }
    }

    // raw partial sums converge only in the Abel sense
    println!("\npartial sums at λ = 0.3:");
    for p in [10, 100, 1000] {
        let v = poisson_partial_sums(0.3, p);
        println!("P = {p:<5} a0 = {:.6} a2 = {:.6}", v.a0, v.a2);
    }
    Ok(())
}
