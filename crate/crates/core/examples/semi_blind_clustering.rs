// Decodes the secondary stream without channel knowledge: k-means on the
// received samples, with two pilot blocks to label the clusters.
//
// ```text
// cargo run --example semi_blind_clustering
// ```

use rand::Rng;
use symradio::channel::synthesize_block;
use symradio::detect::{detect_clustering, PilotPair};
use symradio::modem::build_constellation;
use symradio::rng::make_rng;
use symradio::types::LinkProfile;
use symradio::{ChannelState, Scheme, C64};

pub fn run() -> symradio::Result<()> {
    let a_s = build_constellation(Scheme::Bpsk)?;
    let a_c = build_constellation(Scheme::Bpsk)?;
    let mut rng = make_rng(13, 0);
    let state = ChannelState::rayleigh(2, &LinkProfile::weaker_by_db(3.0), 1.0, &mut rng)?;
    let (p, sigma2, k) = (1.0, 0.02, 8);

    let pilot = |c_idx: usize, rng: &mut _| {
        let s = vec![a_s.point(0); k];
        synthesize_block(
            &state.direct,
            &state.composite,
            p,
            &s,
            a_c.point(c_idx),
            sigma2,
            rng,
        )
    };
    let pilots = PilotPair {
        first: pilot(0, &mut rng)?,
        second: pilot(1, &mut rng)?,
    };

    let mut sent = Vec::new();
    let mut blocks = Vec::new();
    for _ in 0..40 {
        let s: Vec<C64> = (0..k).map(|_| a_s.point(rng.random_range(0..2))).collect();
        let c_idx = rng.random_range(0..2);
        sent.push(c_idx);
        blocks.push(synthesize_block(
            &state.direct,
            &state.composite,
            p,
            &s,
            a_c.point(c_idx),
            sigma2,
            &mut rng,
        )?);
    }

    let out = detect_clustering(&blocks, &pilots, &a_s, &a_c, 99)?;
    let errors = out
        .decisions
        .iter()
        .zip(&sent)
        .filter(|(a, b)| a != b)
        .count();
    println!(
        "{} centroids learned, group labels {:?}",
        out.centroids.len(),
        out.groups
    );
    println!(
        "secondary decisions: {errors} errors in {} blocks",
        sent.len()
    );
    Ok(())
}

fn main() -> symradio::Result<()> {
    run()
}
