//! Single-path simulation of the two boundary crossings.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::model::ModelParams;
use crate::simulation::PathConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coupling {
    Independent,
    Common,
    Antithetic,
}

pub(crate) struct Engine {
    mu: [f64; 2],
    rho: f64,
    cross: f64,
    u: f64,
    dt: f64,
    sd: f64,
    steps: usize,
    required: [bool; 2],
    bridge: bool,
    kill_ln: f64,
    coupling: Coupling,
}

pub(crate) struct Outcome {
    pub hit: bool,
    /// `ln dQ_k/dP` at the stopping time for each tilt component `k`.
    pub ln_q: [f64; MAX_TILTS],
}

pub(crate) const MAX_TILTS: usize = 2;

/// Exponential tilts of a (mixture) sampling law. Component `k` has density
/// `exp(sum_i theta[k][i] X_i(t ^ sigma_i) - compensator)` with `sigma_i` the
/// crossing time of coordinate `i`, i.e. drift `R theta` with the entries of
/// already crossed coordinates of `theta` set to zero.
pub(crate) struct Tilt {
    pub theta: Vec<[f64; 2]>,
}

impl Engine {
    pub fn new(
        params: &ModelParams,
        u: f64,
        horizon: f64,
        required: [bool; 2],
        config: &PathConfig,
    ) -> Engine {
        let rho = params.rho();
        // Bridge uniforms: shared for identical paths, mirrored for opposite
        // ones, independent otherwise.
        let coupling = if rho >= 1.0 {
            Coupling::Common
        } else if rho <= -1.0 {
            Coupling::Antithetic
        } else {
            Coupling::Independent
        };
        Engine {
            mu: params.mu(),
            rho,
            cross: (1.0 - rho * rho).max(0.0).sqrt(),
            u,
            dt: config.dt,
            sd: config.dt.sqrt(),
            steps: (horizon / config.dt).ceil() as usize,
            required,
            bridge: config.bridge_correction,
            kill_ln: -config.kill_eps.ln(),
            coupling,
        }
    }

    /// Simulate one path, under the original measure or under tilt
    /// component `pick`.
    pub fn run(&self, rng: &mut ChaCha8Rng, tilt: Option<(&Tilt, usize)>) -> Outcome {
        let mut x = [0.0f64; 2];
        let mut ln_q = [0.0f64; MAX_TILTS];
        let mut crossed = [!self.required[0], !self.required[1]];
        // distance to the boundary at the start of the step
        let mut gap = [self.u, self.u];
        for j in 1..=self.steps {
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            let v1: f64 = rng.random();
            let v2: f64 = rng.random();
            let w = match self.coupling {
                Coupling::Independent => [v1, v2],
                Coupling::Common => [v1, v1],
                Coupling::Antithetic => [v1, 1.0 - v1],
            };
            let mut dx = [self.sd * z1, self.sd * (self.rho * z1 + self.cross * z2)];
            if let Some((tl, pick)) = tilt {
                let live = |th: [f64; 2]| {
                    [
                        if crossed[0] { 0.0 } else { th[0] },
                        if crossed[1] { 0.0 } else { th[1] },
                    ]
                };
                let drift = |th: [f64; 2]| [th[0] + self.rho * th[1], self.rho * th[0] + th[1]];
                let d = drift(live(tl.theta[pick]));
                dx[0] += d[0] * self.dt;
                dx[1] += d[1] * self.dt;
                for (k, th) in tl.theta.iter().enumerate() {
                    let th = live(*th);
                    let d = drift(th);
                    ln_q[k] += th[0] * dx[0] + th[1] * dx[1]
                        - 0.5 * (th[0] * d[0] + th[1] * d[1]) * self.dt;
                }
            }
            x[0] += dx[0];
            x[1] += dx[1];
            let t = j as f64 * self.dt;
            let mut killed = false;
            for i in 0..2 {
                if crossed[i] {
                    continue;
                }
                let a = gap[i];
                let b = self.u + self.mu[i] * t - x[i];
                gap[i] = b;
                if b <= 0.0 {
                    crossed[i] = true;
                } else if self.bridge {
                    let arg = 2.0 * a * b / self.dt;
                    if arg < 50.0 && w[i] < (-arg).exp() {
                        crossed[i] = true;
                    }
                }
                if !crossed[i] && 2.0 * self.mu[i] * b > self.kill_ln {
                    killed = true;
                }
            }
            if crossed[0] && crossed[1] {
                return Outcome { hit: true, ln_q };
            }
            if killed {
                return Outcome { hit: false, ln_q };
            }
        }
        Outcome {
            hit: false,
            ln_q,
        }
    }
}
