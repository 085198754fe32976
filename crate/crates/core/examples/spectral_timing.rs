//! Times the spectral bounds of a random dense reservoir.
//!
//! `cargo run --release --example spectral_timing -- 1000`

use std::time::Instant;

use esn_ituc::linalg::{largest_singular_value, spectral_radius, Matrix, DEFAULT_TOL};
use esn_ituc::rng::Rng;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1000);
    let mut rng = Rng::new(1);
    let a = Matrix::from_fn(n, n, |_, _| rng.uniform(-0.5, 0.5)).expect("n > 0");

    let t = Instant::now();
    let rho = spectral_radius(&a, DEFAULT_TOL).expect("QR converges");
    println!("rho = {rho:.12} in {:.2?}", t.elapsed());

    let t = Instant::now();
    let eta = largest_singular_value(&a, DEFAULT_TOL).expect("power iteration converges");
    println!("eta = {eta:.12} in {:.2?}", t.elapsed());
    println!("eta / rho = {:.4}", eta / rho);
}
