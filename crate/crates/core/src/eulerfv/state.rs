use serde::{Deserialize, Serialize};

use super::EulerError;

pub const GAMMA: f64 = 1.4;

/// `[rho, rho*u, rho*v, E]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conservative {
    pub rho: f64,
    pub mx: f64,
    pub my: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl Conservative {
    pub fn to_array(self) -> [f64; 4] {
        [self.rho, self.mx, self.my, self.energy]
    }

    pub fn from_array(q: [f64; 4]) -> Self {
        Conservative { rho: q[0], mx: q[1], my: q[2], energy: q[3] }
    }

    pub fn to_primitive(self, gamma: f64) -> Result<Primitive, EulerError> {
        if !(self.rho > 0.0) {
            return Err(EulerError::NonPhysical { cell: None, rho: self.rho, p: f64::NAN });
        }
        let u = self.mx / self.rho;
        let v = self.my / self.rho;
        let p = (gamma - 1.0) * (self.energy - 0.5 * self.rho * (u * u + v * v));
        if !(p > 0.0) {
            return Err(EulerError::NonPhysical { cell: None, rho: self.rho, p });
        }
        Ok(Primitive { rho: self.rho, u, v, p })
    }
}

impl Primitive {
    pub fn to_conservative(self, gamma: f64) -> Result<Conservative, EulerError> {
        if !(self.rho > 0.0 && self.p > 0.0) {
            return Err(EulerError::NonPhysical { cell: None, rho: self.rho, p: self.p });
        }
        Ok(Conservative {
            rho: self.rho,
            mx: self.rho * self.u,
            my: self.rho * self.v,
            energy: self.p / (gamma - 1.0) + 0.5 * self.rho * (self.u * self.u + self.v * self.v),
        })
    }

    pub fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.p / self.rho).sqrt()
    }
}
