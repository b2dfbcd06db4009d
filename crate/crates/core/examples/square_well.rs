//! The log-derivative propagator on a user-defined potential: s-wave square well.

use dipolar_shield::propagator::{
    hard_wall_initial_condition, match_log_derivative, propagate, PropagationConfig, RadialProblem,
};
use nalgebra::DMatrix;

struct Well {
    depth: f64,
    radius: f64,
}

impl RadialProblem for Well {
    fn dim(&self) -> usize {
        1
    }
    fn reduced_mass(&self) -> f64 {
        1.0
    }
    fn thresholds(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn l_values(&self) -> Vec<u32> {
        vec![0]
    }
    fn w_into(&self, r: f64, w: &mut DMatrix<f64>) {
        // sector end points land on the edge; the mean value keeps the method exact there
        w[(0, 0)] = if (r - self.radius).abs() < 1e-9 {
            -0.5 * self.depth
        } else if r < self.radius {
            -self.depth
        } else {
            0.0
        };
    }
    fn dw_dr(&self, _r: f64) -> DMatrix<f64> {
        DMatrix::zeros(1, 1)
    }
}

fn main() -> dipolar_shield::Result<()> {
    let well = Well {
        depth: 2.0,
        radius: 3.0,
    };
    let cfg = PropagationConfig {
        inner_step: 4e-3,
        absorbing: false,
        ..PropagationConfig::default()
    };
    for e in [0.01, 0.1, 1.0] {
        let r_end = 10.0;
        let y = propagate(&hard_wall_initial_condition(1), &well, e, 0.0, r_end, &cfg)?;
        let (_, s) = match_log_derivative(&y, &[0], &[e], 2.0, r_end, &[0])?;
        let delta = s[(0, 0)].arg() / 2.0;
        let (k, q) = ((2.0 * e).sqrt(), (2.0 * (e + well.depth)).sqrt());
        let exact = (k / q * (q * well.radius).tan()).atan() - k * well.radius;
        let wrap = |x: f64| x - std::f64::consts::PI * (x / std::f64::consts::PI).round();
        println!(
            "E = {e:5}: delta = {:+.10}  closed form {:+.10}",
            wrap(delta),
            wrap(exact)
        );
    }
    Ok(())
}
