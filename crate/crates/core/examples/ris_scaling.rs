// Passive beamforming on a reconfigurable surface: received SNR grows with
// the square of the element count. Also modulates a secondary symbol onto
// the surface.
//
// ```text
// cargo run --release --example ris_scaling
// ```

use symradio::modem::build_constellation;
use symradio::ris::{passive_beamform, ris_received_signal, ris_snr};
use symradio::rng::{complex_normal, make_rng};
use symradio::{Scheme, C64};

pub fn run(trials: usize) -> symradio::Result<()> {
    let mut rng = make_rng(3, 0);
    println!("{:>4} {:>10} {:>12}", "M_b", "unit", "rayleigh");
    for m_b in [2usize, 4, 8, 16, 32] {
        let ones = vec![C64::new(1.0, 0.0); m_b];
        let unit = ris_snr(&ones, &ones, &passive_beamform(&ones, &ones)?, 1.0, 1.0);
        let mut total = 0.0;
        for _ in 0..trials {
            let l: Vec<C64> = (0..m_b).map(|_| complex_normal(&mut rng, 1.0)).collect();
            let g: Vec<C64> = (0..m_b).map(|_| complex_normal(&mut rng, 1.0)).collect();
            total += ris_snr(&l, &g, &passive_beamform(&l, &g)?, 1.0, 1.0);
        }
        println!("{m_b:>4} {unit:>10.1} {:>12.2}", total / trials as f64);
    }

    // secondary symbol riding on the aligned surface
    let bpsk = build_constellation(Scheme::Bpsk)?;
    let ones = vec![C64::new(1.0, 0.0); 8];
    let surface = passive_beamform(&ones, &ones)?.modulated();
    let s = vec![C64::new(1.0, 0.0); 4];
    let block = ris_received_signal(
        &ones,
        &ones,
        &surface,
        1.0,
        &s,
        Some(bpsk.point(1)),
        0.0,
        &mut rng,
    )?;
    println!(
        "modulated surface, c = {}: y = {:?}",
        bpsk.point(1),
        block.samples
    );
    Ok(())
}

fn main() -> symradio::Result<()> {
    run(20_000)
}
