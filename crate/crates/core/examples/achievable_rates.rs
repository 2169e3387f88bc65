// Primary rate bounds and the secondary rate against SNR and K, both for a
// single channel draw and averaged over Rayleigh fading.
//
// ```text
// cargo run --release --example achievable_rates
// ```

use symradio::modem::build_constellation;
use symradio::rates::{ergodic_rate, rate_report, secondary_rate};
use symradio::rng::make_rng;
use symradio::types::LinkProfile;
use symradio::{ChannelState, Scheme};

pub fn run(trials: usize) -> symradio::Result<()> {
    let a_s = build_constellation(Scheme::Bpsk)?;
    let a_c = build_constellation(Scheme::Qpsk)?;
    let profile = LinkProfile::weaker_by_db(10.0);
    let state = ChannelState::rayleigh(2, &profile, 1.0, &mut make_rng(1, 0))?;

    println!("one draw, M_r = 2, K = 1");
    println!(
        "{:>7} {:>13} {:>13} {:>10}",
        "snr_db", "primary_upper", "primary_lower", "secondary"
    );
    for snr_db in [0.0, 10.0, 20.0, 30.0] {
        let sigma2 = 10f64.powf(-snr_db / 10.0);
        let r = rate_report(&state, 1.0, sigma2, 1, &a_s, &a_c)?;
        println!(
            "{snr_db:>7} {:>13.3} {:>13.3} {:>10.3}",
            r.primary_upper, r.primary_lower, r.secondary
        );
    }

    println!("\nergodic secondary rate at 30 dB, {trials} draws");
    let sigma2 = 1e-3;
    for k in [1, 2, 4, 8] {
        let est = ergodic_rate(
            |rng| ChannelState::rayleigh(2, &profile, 1.0, rng).expect("m_r > 0"),
            |st| secondary_rate(&st.composite, 1.0, sigma2, k, &a_s).expect("k > 0"),
            trials,
            k as u64,
        )?;
        println!("  K = {k}: {:.3} ± {:.3} bit/s/Hz", est.mean, est.stderr);
    }
    Ok(())
}

fn main() -> symradio::Result<()> {
    run(20_000)
}
