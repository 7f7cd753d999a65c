//! Closed-form harmonic solutions on disks and annuli.
//!
//! Boundary data `e^{in theta}` at `r = 1`; the radial profile is `a r^n + b r^-n`
//! (`a + b ln r` for `n = 0`) and `kappa` is the Dirichlet-to-Neumann eigenvalue
//! `gamma d_r u` at `r = 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HoleBc {
    SoundSoft,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub n: u32,
    pub a: f64,
    pub b: f64,
}

impl RadialProfile {
    pub fn value(&self, r: f64) -> f64 {
        if self.n == 0 {
            self.a + self.b * r.ln()
        } else {
            let n = self.n as i32;
            self.a * r.powi(n) + self.b * r.powi(-n)
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if self.n == 0 {
            self.b / r
        } else {
            let n = self.n as i32;
            n as f64 * (self.a * r.powi(n - 1) - self.b * r.powi(-n - 1))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusMode {
    pub profile: RadialProfile,
    pub kappa: f64,
}

fn check_radius(r0: f64) -> Result<()> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(Error::InvalidInput(format!("radius must lie in (0, 1), got {r0}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Mode `n` on the annulus `r0 < r < 1` with the given condition at `r = r0`.
pub fn annulus_mode(n: u32, r0: f64, bc: HoleBc, gamma: f64) -> Result<AnnulusMode> {
    check_radius(r0)?;
    check_positive("gamma", gamma)?;
    let profile = match (bc, n) {
        (HoleBc::SoundSoft, 0) => {
            let l = (1.0 / r0).ln();
            RadialProfile { n, a: 1.0, b: 1.0 / l }
        }
        (HoleBc::Neumann, 0) => RadialProfile { n, a: 1.0, b: 0.0 },
        (bc, _) => {
            let q = r0.powi(2 * n as i32);
            let s = if bc == HoleBc::SoundSoft { -1.0 } else { 1.0 };
            let a = 1.0 / (1.0 + s * q);
            RadialProfile { n, a, b: s * a * q }
        }
    };
    Ok(AnnulusMode { profile, kappa: gamma * profile.derivative(1.0) })
}

/// DtN eigenvalue of the disk with a concentric inclusion of radius `r0`.
pub fn two_layer_mode(n: u32, r0: f64, gamma_in: f64, gamma_out: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("two-layer mode needs n >= 1".into()));
    }
    check_radius(r0)?;
    check_positive("gamma_in", gamma_in)?;
    check_positive("gamma_out", gamma_out)?;
    let mu = (gamma_in - gamma_out) / (gamma_in + gamma_out);
    let q = mu * r0.powi(2 * n as i32);
    Ok(gamma_out * n as f64 * (1.0 + q) / (1.0 - q))
}

/// Dirichlet-Green function of the unit disk with constant conductivity `c`:
/// `-c Laplace G = delta_y`, `G = 0` on `|x| = 1`.
pub fn disk_green(x: Point, y: Point, c: f64) -> Result<f64> {
    check_positive("c", c)?;
    let ny = y[0].hypot(y[1]);
    if ny >= 1.0 {
        return Err(Error::InvalidInput(format!("source {y:?} is not inside the unit disk")));
    }
    let d = (x[0] - y[0]).hypot(x[1] - y[1]);
    if d == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let num = if ny == 0.0 {
        1.0
    } else {
        let ys = [y[0] / (ny * ny), y[1] / (ny * ny)];
        (x[0] - ys[0]).hypot(x[1] - ys[1]) * ny
    };
    Ok((num / d).ln() / (2.0 * PI * c))
}
