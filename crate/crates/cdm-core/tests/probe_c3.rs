use cdm_core::{run_proportional, Ecc, Lem, Material, PathSpec, RunConfig, StopRule};

fn ramp(a: f64) -> PathSpec<f64> {
    PathSpec::Pwl {
        knots: vec![(0.0, 0.0), (1.0, a)],
    }
}

fn one<M: Material<f64>>(name: &str, m: &M) {
    let cfg = RunConfig {
        n_steps: 40,
        stop: StopRule::FirstYield,
        eps_p_eq_cap: 1.0,
    };
    match run_proportional(m, 1.0 / 3.0, 1.0, ramp(400.0), &cfg) {
        Ok(rec) => {
            let last = rec.rows.last().unwrap();
            println!(
                "{name}: stop={:?} sigma11={:.6} rows={}",
                rec.stop,
                last.sigma.component(0),
                rec.rows.len()
            );
        }
        Err(e) => println!("{name}: ERR {e}"),
    }
}

#[test]
fn probe() {
    one("ecc-a", &Ecc::anisotropic());
    one("ecc-i", &Ecc::isotropic());
    one("lem-a", &Lem::anisotropic());
    one("lem-i", &Lem::isotropic());
}
