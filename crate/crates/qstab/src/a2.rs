//! The fully explicit Calabi–Yau-X A₂ example: exact auto-equivalence
//! matrices on the K-lattice, the Gepner charge, the `z`-coordinate on the
//! space of charges, and the fundamental-domain geometry.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlattice::{QLattice, RLinearMap};
use crate::quiver::QuiverData;
use crate::ring::LaurentInt;

const PI: f64 = std::f64::consts::PI;

/// Boundary-classification tolerance band.
pub const DOMAIN_TOL: f64 = 1e-9;

pub fn a2_quiver() -> QuiverData {
    QuiverData::preset("A2").expect("A2 preset")
}

pub fn a2_lattice() -> QLattice {
    QLattice::new(a2_quiver())
}

/// K-matrix of `τ = Φ₁∘Φ₂∘[X−2]`; the scalar `q` of `[X−2]` cancels the
/// `q⁻¹` produced by the twists, so the matrix has integer entries.
pub fn tau_x_matrix() -> RLinearMap {
    let lat = a2_lattice();
    let t1t2 = lat
        .twist_matrix(1)
        .unwrap()
        .compose(lat.twist_matrix(2).unwrap())
        .unwrap();
    t1t2.scalar_mul(&LaurentInt::q()).unwrap()
}

/// K-matrix of `Υ = Φ₁∘Φ₂∘Φ₁∘[2X−3]`.
pub fn upsilon_x_matrix() -> RLinearMap {
    let lat = a2_lattice();
    let t1 = lat.twist_matrix(1).unwrap();
    let t2 = lat.twist_matrix(2).unwrap();
    let t1t2t1 = t1.compose(t2).unwrap().compose(t1).unwrap();
    t1t2t1.scalar_mul(&LaurentInt::monomial(-1, 2)).unwrap()
}

/// The central element `(Φ₁∘Φ₂)³` at K-level.
pub fn center_matrix() -> RLinearMap {
    let lat = a2_lattice();
    let t1t2 = lat
        .twist_matrix(1)
        .unwrap()
        .compose(lat.twist_matrix(2).unwrap())
        .unwrap();
    t1t2.compose(&t1t2).unwrap().compose(&t1t2).unwrap()
}

#[derive(Clone, Debug, Serialize)]
pub struct GepnerCharge {
    /// Row vector `(Z(S₁), Z(S₂))`, normalized to `Z(S₁) = 1`.
    pub z: [(f64, f64); 2],
    /// `‖Z∘[τ] − e^{−2πi/3}·Z‖₂`.
    pub residual: f64,
    /// The `z`-coordinate of the charge (equals `2/3` for the order-3 point).
    pub z_coordinate: (f64, f64),
}

/// Solves the Gepner equation `Z∘[τ] = e^{−2πi/3}·Z` on charges.
///
/// The K-matrix of `τ` is independent of `q`, so the solution row vector is
/// the same for every `s`; the parameter only fixes which specialization the
/// residual is evaluated in.
pub fn gepner_charge(s: Complex64) -> GepnerCharge {
    let tau = tau_x_matrix().specialize(s);
    let omega_bar = Complex64::from_polar(1.0, -2.0 * PI / 3.0);
    let z = [Complex64::new(1.0, 0.0), omega_bar];
    // row-vector action (Z·τ)_j = Σ_i Z_i τ[i][j]
    let mut residual = 0.0f64;
    for j in 0..2 {
        let image: Complex64 = (0..2).map(|i| z[i] * tau[i][j]).sum();
        residual += (image - omega_bar * z[j]).norm_sqr();
    }
    let zc = z_coordinate(z[0], z[1], (z[0] / z[1]).arg() / PI).expect("nonzero charges");
    GepnerCharge {
        z: [(z[0].re, z[0].im), (z[1].re, z[1].im)],
        residual: residual.sqrt(),
        z_coordinate: (zc.re, zc.im),
    }
}

/// The coordinate `z = x + iy` with `e^{iπz} = Z₁/Z₂`; the real part is the
/// phase difference supplied by the caller (it pins the branch), the
/// imaginary part is `−ln|Z₁/Z₂|/π`.
pub fn z_coordinate(z1: Complex64, z2: Complex64, phase_diff: f64) -> Result<Complex64> {
    if z1.norm() == 0.0 || z2.norm() == 0.0 {
        return Err(Error::Domain("z-coordinate of a vanishing charge".into()));
    }
    Ok(Complex64::new(phase_diff, -(z1.norm() / z2.norm()).ln() / PI))
}

/// Vertical extent of the boundary curves at `x ∈ (1/2, 2/3]`:
/// `y = −ln(−2cos(πx))/π`.
pub fn boundary_curve_y(x: f64) -> f64 {
    -(-2.0 * (PI * x).cos()).ln() / PI
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainPosition {
    Interior,
    Boundary,
    Exterior,
}

impl std::fmt::Display for DomainPosition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainPosition::Interior => write!(f, "interior"),
            DomainPosition::Boundary => write!(f, "boundary"),
            DomainPosition::Exterior => write!(f, "exterior"),
        }
    }
}

/// Membership of `z` in the fundamental domain at parameter `s`:
/// left vertical edge at `x = (2 − Re(s))/2`, all of `x ≤ 1/2` interior,
/// the strip `1/2 < x < 2/3` bounded by the curves `±boundary_curve_y`, and
/// the corner `(2/3, 0)`. Supported for `Re(s) ≥ 2` only.
pub fn in_fundamental_domain(z: Complex64, s: Complex64) -> Result<DomainPosition> {
    if s.re < 2.0 {
        return Err(Error::UnsupportedRange(format!(
            "fundamental domain described for Re(s) ≥ 2, got {}",
            s.re
        )));
    }
    let tol = DOMAIN_TOL;
    let (x, y) = (z.re, z.im);
    let left = (2.0 - s.re) / 2.0;
    if x < left - tol {
        return Ok(DomainPosition::Exterior);
    }
    if (x - left).abs() <= tol {
        return Ok(DomainPosition::Boundary);
    }
    if x <= 0.5 {
        return Ok(DomainPosition::Interior);
    }
    if (x - 2.0 / 3.0).abs() <= tol {
        return Ok(if y.abs() <= tol { DomainPosition::Boundary } else { DomainPosition::Exterior });
    }
    if x > 2.0 / 3.0 {
        return Ok(DomainPosition::Exterior);
    }
    let yb = boundary_curve_y(x);
    if (y.abs() - yb).abs() <= tol {
        Ok(DomainPosition::Boundary)
    } else if y.abs() < yb {
        Ok(DomainPosition::Interior)
    } else {
        Ok(DomainPosition::Exterior)
    }
}

/// Membership samples on a rectangular grid for plotting; `grid` is the number
/// of subdivisions per axis, so `y = 0` is sampled whenever `grid` is even.
pub fn domain_sample(s: Complex64, grid: usize) -> Result<Vec<(f64, f64, DomainPosition)>> {
    if grid == 0 {
        return Err(Error::Domain("grid must be positive".into()));
    }
    let left = (2.0 - s.re) / 2.0;
    let (x0, x1) = (left - 0.25, 1.0);
    let (y0, y1) = (-2.0, 2.0);
    let mut out = Vec::with_capacity((grid + 1) * (grid + 1));
    for iy in 0..=grid {
        let y = y0 + (y1 - y0) * iy as f64 / grid as f64;
        for ix in 0..=grid {
            let x = x0 + (x1 - x0) * ix as f64 / grid as f64;
            out.push((x, y, in_fundamental_domain(Complex64::new(x, y), s)?));
        }
    }
    Ok(out)
}
