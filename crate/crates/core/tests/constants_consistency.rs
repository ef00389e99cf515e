//! Cross-check of the moment constant against the tail constant.
//!
//! `E|X|^q = q ∫ x^{q-1} P(|X| > x) dx` with the two-sided tail
//! `2 F_a √t τ(t)` at `x = a t` predicts the moment prefactor
//! `2q ∫_0^1 a^{q-1} F_a da`. The closed form `d_const` equals that
//! prediction divided by `q`, i.e. the two constants are consistent up to a
//! factor `q` (the simulated annealed moments side with `2q ∫ a^{q-1} F_a`).

use levylab::constants::{d_const, F_const};
use levylab::quadrature::QuadratureConfig;

#[test]
fn moment_constant_is_the_tail_integral_over_q() {
    let cfg = QuadratureConfig::default();
    let (mu, alpha) = (3.0, 1.5);
    let panels = 800;
    let tails: Vec<(f64, f64)> = (0..panels)
        .map(|i| {
            let a = (i as f64 + 0.5) / panels as f64;
            (a, F_const(mu, alpha, a, &cfg).unwrap())
        })
        .collect();
    for q in [3.0, 4.0, 5.0] {
        let from_tails: f64 = 2.0 * tails.iter().map(|&(a, f)| a.powf(q - 1.0) * f).sum::<f64>() / panels as f64;
        let d = d_const(mu, alpha, q, &cfg).unwrap();
        let ratio = from_tails / d;
        assert!((ratio - 1.0).abs() < 2e-3, "q = {q}: 2 int a^(q-1) F da = {from_tails}, d = {d}");
    }
}
