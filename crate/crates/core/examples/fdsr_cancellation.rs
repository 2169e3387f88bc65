// Full-duplex reader: the PTx cancels its own signal and decodes the
// backscattered symbol, with perfect and imperfect cancellation.
//
// ```text
// cargo run --release --example fdsr_cancellation
// ```

use rand::Rng;
use symradio::fdsr::{
    cancel_and_detect, perfect_cancellation_ber, synthesize_fdsr_block, FdsrChannel,
};
use symradio::modem::build_constellation;
use symradio::rng::make_rng;
use symradio::{Scheme, C64};

pub fn run(trials: usize) -> symradio::Result<()> {
    let a_s = build_constellation(Scheme::Qpsk)?;
    let a_c = build_constellation(Scheme::Bpsk)?;
    let (beta1, beta2) = (C64::new(3.0, 0.0), C64::new(0.3, 0.4));
    let (k, sigma2) = (4, 0.5_f64);
    let mut rng = make_rng(21, 0);

    println!("K = {k}, SNR = {:.1} dB", 10.0 * (1.0 / sigma2).log10());
    println!(
        "closed form with perfect cancellation: {:.4}",
        perfect_cancellation_ber(beta2, 1.0, k, sigma2)
    );
    for residual in [0.0, 0.05, 0.1, 0.2] {
        let ch = FdsrChannel::new(beta1, beta2, residual)?;
        let mut errors = 0;
        for _ in 0..trials {
            let s: Vec<C64> = (0..k).map(|_| a_s.point(rng.random_range(0..4))).collect();
            let c_idx = rng.random_range(0..2);
            let block = synthesize_fdsr_block(&ch, 1.0, &s, a_c.point(c_idx), sigma2, &mut rng)?;
            errors += usize::from(cancel_and_detect(&block, &ch, 1.0, &s, &a_c)? != c_idx);
        }
        println!(
            "residual {residual:<5} measured BER {:.4}",
            errors as f64 / trials as f64
        );
    }
    Ok(())
}

fn main() -> symradio::Result<()> {
    run(100_000)
}
