//! Characteristic polynomials and exact eigenvalues.

use sdefi::algebra::{CMatrix, CRational};
use sdefi::fixtures::{zero_sum_system, ZeroSumDrift};
use sdefi::spectral::{eigenvalues, linearization};

fn main() -> sdefi::Result<()> {
    let dg = CMatrix::from_ints(&[&[1, -2, 0], &[0, 2, -1], &[-1, 0, 1]]);
    let eig = eigenvalues(&dg)?;
    println!("Dg(0) = {dg}");
    println!("det(Dg(0) - x) = {}", eig.det_a_minus_x());
    for r in &eig.values {
        match &r.exact {
            Some(e) => println!("  {e} (exact)"),
            None => println!("  {} (numeric)", r.value),
        }
    }

    let (a, b) = (CRational::from_int(2), CRational::from_int(3));
    let spec = linearization(&zero_sum_system(a, b, ZeroSumDrift::Corrected))?;
    println!("A0 = Df(0) - 1/2 Dg(0)^2 = {}", spec.a0);
    println!("det(A0 - x) = {}", spec.lambda.det_a_minus_x());
    let sum: num_complex::Complex64 = spec.lambda.values.iter().map(|r| r.value).sum();
    println!("eigenvalue sum {sum:.12} (trace {})", spec.a0.trace());
    Ok(())
}
