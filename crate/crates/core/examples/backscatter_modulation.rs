// Maps secondary symbols to reflection coefficients and load impedances,
// for a passive tag and for an active (reflection-amplifying) load.
//
// ```text
// cargo run --example backscatter_modulation
// ```

use symradio::modem::{
    active_load_gain_sq, build_constellation, gamma_from_impedance, gamma_from_symbol,
    impedance_from_gamma, Impedance, ReflectionMode,
};
use symradio::Scheme;

pub fn run() -> symradio::Result<()> {
    let antenna = Impedance::antenna(50.0, 10.0)?;
    let qpsk = build_constellation(Scheme::Qpsk)?;

    println!("passive tag, alpha = 0.6, Z_a = 50 +10j ohm");
    for (i, &c) in qpsk.points().iter().enumerate() {
        let gamma = gamma_from_symbol(c, 0.6, ReflectionMode::Passive)?;
        let load = impedance_from_gamma(gamma, antenna)?;
        let back = gamma_from_impedance(load, antenna)?;
        println!(
            "  c[{i}] = {c:.3}  gamma = {:.3}  Z_L = {:.2} {:+.2}j  round trip error {:.1e}",
            gamma.value(),
            load.resistance,
            load.reactance,
            (back.value() - gamma.value()).norm()
        );
    }

    // |gamma| > 1 needs a negative-resistance load
    let gamma = gamma_from_symbol(qpsk.point(0), 2.0, ReflectionMode::Active)?;
    let load = impedance_from_gamma(gamma, antenna)?;
    println!(
        "active load for |gamma| = {:.2}: Z_L = {:.2} {:+.2}j (active: {})",
        gamma.magnitude(),
        load.resistance,
        load.reactance,
        load.is_active()
    );
    let gain = active_load_gain_sq(-load.resistance, load.reactance, antenna);
    println!("closed-form |gamma|^2 of that load: {gain:.4}");

    match gamma_from_symbol(qpsk.point(0), 2.0, ReflectionMode::Passive) {
        Err(e) => println!("passive tag refuses alpha = 2: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

fn main() -> symradio::Result<()> {
    run()
}
