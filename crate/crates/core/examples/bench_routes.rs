use std::time::Instant;
fn main() {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let (sigma, t, bits) = (args[0], args[1], args[2] as u32);
    let ctx = lavrik_core::PrecisionContext::new(bits).unwrap();
    let p = lavrik_core::lambda::EvalPoint::from_f64(sigma, t, bits);
    let t0 = Instant::now();
    let a = lavrik_core::lambda::lambda_series(&p, &ctx);
    let d1 = t0.elapsed();
    let t0 = Instant::now();
    let b = lavrik_core::lambda::lambda_completed(&p, &ctx);
    let d2 = t0.elapsed();
    println!("series {:?} {:?}", d1, a.map(|v| v.complex().to_string_radix(10, Some(12))));
    println!("quad   {:?} {:?}", d2, b.map(|v| v.complex().to_string_radix(10, Some(12))));
}
