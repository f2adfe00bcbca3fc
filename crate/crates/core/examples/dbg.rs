fn main() {
    let (a, b, p) = (0.081f64, 0.349, 1e-8);
    let lnb = windfit_core::specfun::log_beta(a, b).unwrap();
    let tail = (((p * a).ln() + lnb) / a).exp();
    println!("tail guess = {tail:e}");
    for k in [-2i32, -1, 0, 1, 2] {
        let x = tail * 16f64.powi(k);
        let i = windfit_core::specfun::reg_inc_beta(x, a, b).unwrap();
        println!("x = {x:e}  I = {i:e}  f = {:e}", i - p);
    }
}
