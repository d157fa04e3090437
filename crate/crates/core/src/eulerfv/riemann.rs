//! Exact solution of the 1D Riemann problem for an ideal gas
//! (pressure-function Newton iteration and self-similar sampling).

use super::EulerError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State1D {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ExactRiemann {
    pub left: State1D,
    pub right: State1D,
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
}

impl ExactRiemann {
    pub fn new(left: State1D, right: State1D, gamma: f64) -> Result<Self, EulerError> {
        let cl = (gamma * left.p / left.rho).sqrt();
        let cr = (gamma * right.p / right.rho).sqrt();
        if 2.0 / (gamma - 1.0) * (cl + cr) <= right.u - left.u {
            return Err(EulerError::Riemann("initial data generate vacuum".into()));
        }
        let du = right.u - left.u;
        let guess = 0.5 * (left.p + right.p) - 0.125 * du * (left.rho + right.rho) * (cl + cr);
        let mut p = guess.max(1e-8);
        for _ in 0..100 {
            let (fl, dfl) = pressure_function(p, &left, gamma);
            let (fr, dfr) = pressure_function(p, &right, gamma);
            let next = (p - (fl + fr + du) / (dfl + dfr)).max(1e-14);
            let change = 2.0 * (next - p).abs() / (next + p);
            p = next;
            if change < 1e-14 {
                break;
            }
        }
        let (fl, _) = pressure_function(p, &left, gamma);
        let (fr, _) = pressure_function(p, &right, gamma);
        let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
        Ok(ExactRiemann { left, right, gamma, p_star: p, u_star })
    }

    /// Solution at `s = x / t` (diaphragm at `x = 0`).
    pub fn sample(&self, s: f64) -> State1D {
        let g = self.gamma;
        let (ps, us) = (self.p_star, self.u_star);
        let g1 = (g - 1.0) / (2.0 * g);
        let g2 = (g + 1.0) / (2.0 * g);
        let g6 = (g - 1.0) / (g + 1.0);
        if s <= us {
            let w = self.left;
            let c = (g * w.p / w.rho).sqrt();
            if ps > w.p {
                let shock = w.u - c * (g2 * ps / w.p + g1).sqrt();
                if s <= shock {
                    w
                } else {
                    let r = w.rho * (ps / w.p + g6) / (ps / w.p * g6 + 1.0);
                    State1D { rho: r, u: us, p: ps }
                }
            } else {
                let head = w.u - c;
                let cs = c * (ps / w.p).powf(g1);
                let tail = us - cs;
                if s <= head {
                    w
                } else if s >= tail {
                    State1D { rho: w.rho * (ps / w.p).powf(1.0 / g), u: us, p: ps }
                } else {
                    fan(w, c, s, g, 1.0)
                }
            }
        } else {
            let w = self.right;
            let c = (g * w.p / w.rho).sqrt();
            if ps > w.p {
                let shock = w.u + c * (g2 * ps / w.p + g1).sqrt();
                if s >= shock {
                    w
                } else {
                    let r = w.rho * (ps / w.p + g6) / (ps / w.p * g6 + 1.0);
                    State1D { rho: r, u: us, p: ps }
                }
            } else {
                let head = w.u + c;
                let cs = c * (ps / w.p).powf(g1);
                let tail = us + cs;
                if s >= head {
                    w
                } else if s <= tail {
                    State1D { rho: w.rho * (ps / w.p).powf(1.0 / g), u: us, p: ps }
                } else {
                    fan(w, c, s, g, -1.0)
                }
            }
        }
    }
}

/// State inside a rarefaction fan; `dir` is +1 for the left wave, -1 for the right.
fn fan(w: State1D, c: f64, s: f64, g: f64, dir: f64) -> State1D {
    let base = 2.0 / (g + 1.0) + dir * (g - 1.0) / ((g + 1.0) * c) * (w.u - s);
    let rho = w.rho * base.powf(2.0 / (g - 1.0));
    let u = 2.0 / (g + 1.0) * (dir * c + (g - 1.0) / 2.0 * w.u + s);
    let p = w.p * base.powf(2.0 * g / (g - 1.0));
    State1D { rho, u, p }
}

fn pressure_function(p: f64, w: &State1D, g: f64) -> (f64, f64) {
    let c = (g * w.p / w.rho).sqrt();
    if p > w.p {
        let a = 2.0 / ((g + 1.0) * w.rho);
        let b = (g - 1.0) / (g + 1.0) * w.p;
        let q = (a / (p + b)).sqrt();
        ((p - w.p) * q, q * (1.0 - (p - w.p) / (2.0 * (b + p))))
    } else {
        let r = p / w.p;
        let f = 2.0 * c / (g - 1.0) * (r.powf((g - 1.0) / (2.0 * g)) - 1.0);
        let df = 1.0 / (w.rho * c) * r.powf(-(g + 1.0) / (2.0 * g));
        (f, df)
    }
}
