// Transmit power and reflection efficiency over eight fading states under
// peak and average power limits.
//
// ```text
// cargo run --release --example siso_allocation
// ```

use symradio::alloc::{allocate_siso, ConstraintSet, SisoSettings};
use symradio::modem::build_constellation;
use symradio::rng::make_rng;
use symradio::types::LinkProfile;
use symradio::{ChannelState, Scheme};

pub fn run() -> symradio::Result<()> {
    let mut rng = make_rng(5, 0);
    let states = (0..8)
        .map(|_| ChannelState::rayleigh(1, &LinkProfile::weaker_by_db(10.0), 1.0, &mut rng))
        .collect::<symradio::Result<Vec<_>>>()?;
    let settings = SisoSettings::new(
        0.1,
        64,
        build_constellation(Scheme::Bpsk)?,
        build_constellation(Scheme::Qpsk)?,
    );
    let limits = ConstraintSet {
        peak_power: Some(4.0),
        avg_power: Some(1.0),
        ..Default::default()
    };

    for weights in [(1.0, 0.0), (1.0, 1.0), (0.2, 1.0)] {
        let sol = allocate_siso(&states, weights, &limits, &settings)?;
        println!(
            "w = {weights:?}: objective {:.3}, R_s {:.3}, R_c {:.3}, E[p] {:.3}",
            sol.objective, sol.primary_rate, sol.secondary_rate, sol.mean_power
        );
        for (n, (p, a)) in sol.powers.iter().zip(&sol.alphas).enumerate() {
            let gain = states[n].direct[0].norm_sqr();
            println!("    state {n}: |h1|^2 = {gain:.3}  p = {p:.3}  alpha = {a:.3}");
        }
    }
    Ok(())
}

fn main() -> symradio::Result<()> {
    run()
}
