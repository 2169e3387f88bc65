// Minimum transmit power for a four-antenna PTx that must serve both a
// primary and a secondary rate floor.
//
// ```text
// cargo run --example miso_beamforming
// ```

use symradio::alloc::{beamform_power_min, BeamformingSettings, ConstraintSet};
use symradio::modem::build_constellation;
use symradio::rng::make_rng;
use symradio::types::LinkProfile;
use symradio::{ChannelState, Error, Scheme};

pub fn run() -> symradio::Result<()> {
    let st = ChannelState::rayleigh(
        4,
        &LinkProfile::weaker_by_db(10.0),
        1.0,
        &mut make_rng(11, 0),
    )?;
    let settings = BeamformingSettings {
        sigma2: 0.1,
        beta_grid: 201,
        a_s: build_constellation(Scheme::Bpsk)?,
        a_c: build_constellation(Scheme::Bpsk)?,
    };

    println!("{:>6} {:>6} {:>9} {:>6}", "R_s", "R_c", "power", "beta");
    for (rs, rc) in [(1.0, 0.0), (2.0, 0.0), (2.0, 0.5), (2.0, 1.0), (2.0, 2.0)] {
        match beamform_power_min(
            &st.direct,
            &st.composite,
            &ConstraintSet::budget(50.0, rs, rc),
            &settings,
        ) {
            Ok(sol) => println!("{rs:>6} {rc:>6} {:>9.4} {:>6.3}", sol.power, sol.beta),
            Err(Error::Infeasible { binding }) => {
                println!("{rs:>6} {rc:>6}  infeasible: {binding}")
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn main() -> symradio::Result<()> {
    run()
}
