//! Writes the inputs of the 64-fold (3,10) F16 lift: base coefficients,
//! orbit seeds and the two coset witnesses to pin.
//!
//!     cargo run --example reference_inputs -- data/reference

use coset_qldpc::base::presets;
use coset_qldpc::io::{self, OrbitSpec, WitnessSpec};
use coset_qldpc::lift::{reference, LiftSubgroup};
use coset_qldpc::Side;

fn main() -> coset_qldpc::Result<()> {
    let dir = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data/reference".into()));
    std::fs::create_dir_all(&dir)?;
    let coeffs = presets::find(reference::BASE).expect("preset").coefficients();
    std::fs::write(dir.join("base.coeffs"), io::write_coefficients(&coeffs))?;
    let orbit = OrbitSpec {
        k: LiftSubgroup::new(reference::P, reference::ORBIT_STEP)?,
        seeds: vec![reference::T0.to_vec(), reference::T1.to_vec()],
    };
    std::fs::write(dir.join("orbit.txt"), io::write_orbit(&orbit))?;
    for side in [Side::X, Side::Z] {
        let w = WitnessSpec::Cosets {
            side,
            k: reference::witness_subgroup(),
            pairs: reference::anchors(side).to_vec(),
        };
        std::fs::write(dir.join(format!("witness-{side}.txt")), io::write_witness(&w))?;
    }
    println!("wrote {}", dir.display());
    Ok(())
}
