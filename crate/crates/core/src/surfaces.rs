//! Boundary identifications that cut the surface algebras out of the Toeplitz algebra.
//!
//! A symbol belongs to the algebra of a surface when it takes equal values at
//! identified boundary points. Orientable genus `g` glues `2g` arcs of the upper
//! semicircle to `2g` arcs of the lower one with reversed direction; the
//! sphere glues the two semicircles; non-orientable genus `g` glues `g` upper
//! arcs to `g` lower arcs with the same direction.
//!
//! Angles are taken in `[0, 2π)`. At a point shared by two arcs, the arc with
//! the lower index wins.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{from_samples, sample, CircleFunction, NumericSeries, TrigPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Orientable,
    Sphere,
    #[serde(rename = "nonorientable")]
    NonOrientable,
}

/// A closed surface presented by arc identifications on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SurfaceDescriptor", into = "SurfaceDescriptor")]
pub struct SurfacePreset {
    kind: SurfaceKind,
    genus: u32,
}

/// Wire form: `{"kind": "orientable" | "sphere" | "nonorientable", "genus": g}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceDescriptor {
    pub kind: SurfaceKind,
    #[serde(default)]
    pub genus: u32,
}

impl TryFrom<SurfaceDescriptor> for SurfacePreset {
    type Error = Error;
    fn try_from(d: SurfaceDescriptor) -> Result<Self> {
        match d.kind {
            SurfaceKind::Sphere if d.genus == 0 => Ok(Self::sphere()),
            SurfaceKind::Sphere => Err(Error::InvalidPreset(format!("sphere has genus 0, got {}", d.genus))),
            SurfaceKind::Orientable => Self::orientable(d.genus),
            SurfaceKind::NonOrientable => Self::nonorientable(d.genus),
        }
    }
}

impl From<SurfacePreset> for SurfaceDescriptor {
    fn from(p: SurfacePreset) -> Self {
        Self { kind: p.kind, genus: p.genus }
    }
}

impl fmt::Display for SurfacePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SurfaceKind::Sphere => write!(f, "sphere"),
            SurfaceKind::Orientable => write!(f, "orientable genus {}", self.genus),
            SurfaceKind::NonOrientable => write!(f, "non-orientable genus {}", self.genus),
        }
    }
}

/// Where a boundary point sits relative to the arc families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcPoint {
    /// 1-based arc index.
    pub arc: usize,
    /// Arc parameter in `[0, 1]`.
    pub t: f64,
    /// `true` on the `a_k` family, `false` on the partner family.
    pub primary: bool,
}

impl SurfacePreset {
    pub fn sphere() -> Self {
        Self { kind: SurfaceKind::Sphere, genus: 0 }
    }

    pub fn orientable(genus: u32) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidPreset("orientable genus must be at least 1 (use sphere)".into()));
        }
        Ok(Self { kind: SurfaceKind::Orientable, genus })
    }

    pub fn nonorientable(genus: u32) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidPreset("non-orientable genus must be at least 1".into()));
        }
        Ok(Self { kind: SurfaceKind::NonOrientable, genus })
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// Number of arcs in one family: `2g`, `1` or `g`.
    pub fn arc_count(&self) -> usize {
        match self.kind {
            SurfaceKind::Orientable => 2 * self.genus as usize,
            SurfaceKind::Sphere => 1,
            SurfaceKind::NonOrientable => self.genus as usize,
        }
    }

    /// Angular width of a single arc.
    pub fn arc_width(&self) -> f64 {
        PI / self.arc_count() as f64
    }

    fn check_domain(&self, theta: f64) -> Result<()> {
        let upper = match self.kind {
            SurfaceKind::NonOrientable => PI,
            _ => TAU,
        };
        if theta.is_finite() && (0.0..upper).contains(&theta) {
            Ok(())
        } else {
            Err(Error::AngleOutOfDomain { theta, preset: self.to_string() })
        }
    }

    /// Locates `θ` on an arc.
    pub fn arc_point(&self, theta: f64) -> Result<ArcPoint> {
        self.check_domain(theta)?;
        let w = self.arc_width();
        let count = self.arc_count();
        // Index with ties resolved downward; `x` measured in arc widths.
        let locate = |x: f64| -> (usize, f64) {
            let k = (x.ceil() as usize).clamp(1, count);
            (k, (x - (k - 1) as f64).clamp(0.0, 1.0))
        };
        Ok(match self.kind {
            SurfaceKind::Sphere => {
                if theta <= PI {
                    ArcPoint { arc: 1, t: theta / PI, primary: true }
                } else {
                    ArcPoint { arc: 1, t: (TAU - theta) / PI, primary: false }
                }
            }
            SurfaceKind::Orientable => {
                if theta <= PI {
                    let (arc, t) = locate(theta / w);
                    ArcPoint { arc, t, primary: true }
                } else {
                    // a_k^{-1}(t) runs backwards over [π + (k−1)w, π + kw].
                    let (arc, s) = locate((theta - PI) / w);
                    ArcPoint { arc, t: 1.0 - s, primary: false }
                }
            }
            SurfaceKind::NonOrientable => {
                let (arc, t) = locate(theta / w);
                ArcPoint { arc, t, primary: true }
            }
        })
    }

    /// Angle of the point with parameter `t` on arc `arc` of either family, in `[0, 2π)`.
    pub fn arc_angle(&self, arc: usize, t: f64, primary: bool) -> f64 {
        let w = self.arc_width();
        let g2 = self.arc_count() as f64;
        let k = arc as f64;
        let raw = match (self.kind, primary) {
            (SurfaceKind::Sphere, true) => PI * t,
            (SurfaceKind::Sphere, false) => -PI * t,
            (SurfaceKind::Orientable, true) => (k - 1.0 + t) * w,
            (SurfaceKind::Orientable, false) => (g2 + k - t) * w,
            (SurfaceKind::NonOrientable, true) => (k - 1.0 + t) * w,
            (SurfaceKind::NonOrientable, false) => (-k + t) * w,
        };
        normalize_angle(raw)
    }

    /// The boundary point glued to `θ`.
    ///
    /// Orientable: `π + π(2k−1)/(2g) − θ` for `θ` on arc pair `k`. Sphere:
    /// `2π − θ`. Non-orientable: the `b_k` point with the same parameter.
    pub fn identify(&self, theta: f64) -> Result<f64> {
        let p = self.arc_point(theta)?;
        Ok(match self.kind {
            SurfaceKind::Sphere => normalize_angle(-theta),
            SurfaceKind::Orientable => {
                normalize_angle(PI + PI * (2 * p.arc - 1) as f64 / self.arc_count() as f64 - theta)
            }
            SurfaceKind::NonOrientable => self.arc_angle(p.arc, p.t, false),
        })
    }

    /// Grid points on which the identification is tested.
    fn test_grid(&self, grid_size: usize) -> impl Iterator<Item = f64> + '_ {
        let upper = if self.kind == SurfaceKind::NonOrientable { PI } else { TAU };
        (0..grid_size).map(move |j| TAU * j as f64 / grid_size as f64).filter(move |t| *t < upper)
    }

    /// Sampled membership test: `max |f(θ) − f(identify(θ))|` over the grid.
    ///
    /// Panics if `grid_size < 64`.
    pub fn is_member(&self, f: &impl CircleFunction, grid_size: usize, tol: f64) -> Membership {
        assert!(grid_size >= 64, "membership grid must have at least 64 points");
        let max_deviation = self
            .test_grid(grid_size)
            .map(|theta| {
                let partner = self.identify(theta).expect("grid point in domain");
                (f.evaluate(theta) - f.evaluate(partner)).norm()
            })
            .fold(0.0, f64::max);
        Membership { member: max_deviation <= tol, max_deviation }
    }

    /// Closed-form coefficient description of the identification, where one exists.
    pub fn fourier_constraints(&self) -> FourierConstraint {
        match (self.kind, self.genus) {
            (SurfaceKind::Sphere, _) => FourierConstraint::EvenModes,
            (SurfaceKind::NonOrientable, 1) => FourierConstraint::OddModesVanish,
            _ => FourierConstraint::Unavailable,
        }
    }

    /// Smooth symbol that winds `winding` times along arc `arc` (and its partner) and
    /// equals 1 elsewhere, expanded up to mode `max_mode`.
    ///
    /// On the arc pair the value at parameter `t` is `exp(2πi·winding·ρ(t))` with
    /// the flat smoothstep [`smoothstep`], so the symbol is `C^∞` and respects the
    /// identification.
    pub fn loop_generator(&self, arc: usize, winding: i64, max_mode: usize) -> Result<NumericSeries> {
        let count = self.arc_count();
        if arc == 0 || arc > count {
            return Err(Error::ArcOutOfRange { arc, arc_count: count });
        }
        let f = |theta: f64| self.loop_value(arc, winding, theta);
        let m = (16 * max_mode).max(1024).next_power_of_two();
        let (series, _) = from_samples(&sample(&f, m), max_mode)?;
        Ok(series)
    }

    /// Expansion order at which [`Self::loop_generator`] reproduces its symbol to
    /// about `1e-9`: narrower arcs need proportionally more modes.
    pub fn recommended_max_mode(&self) -> usize {
        256 * (self.arc_count() / 2).max(1)
    }

    /// Pointwise value of [`Self::loop_generator`] before expansion.
    pub fn loop_value(&self, arc: usize, winding: i64, theta: f64) -> Complex64 {
        let theta = normalize_angle(theta);
        let param = match self.kind {
            SurfaceKind::NonOrientable if theta >= PI => {
                // b_k(t) = e^{iπ(t−k)/g}
                let x = (theta - TAU) / self.arc_width();
                let t = x + arc as f64;
                (0.0..=1.0).contains(&t).then_some(t)
            }
            _ => match self.arc_point(theta) {
                Ok(p) if p.arc == arc => Some(p.t),
                _ => None,
            },
        };
        match param {
            Some(t) => Complex64::from_polar(1.0, TAU * winding as f64 * smoothstep(t)),
            None => Complex64::new(1.0, 0.0),
        }
    }
}

/// Result of a sampled membership test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub max_deviation: f64,
}

/// Coefficient-space form of an identification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FourierConstraint {
    /// `f_k = f_{−k}` for all `k`.
    EvenModes,
    /// `f_k = 0` for all odd `k`.
    OddModesVanish,
    /// No closed form; use the sampled test.
    Unavailable,
}

impl FourierConstraint {
    /// Exact check on a trigonometric polynomial; `None` when unavailable.
    pub fn holds(&self, f: &TrigPoly) -> Option<bool> {
        match self {
            Self::EvenModes => Some(f.iter().all(|(k, c)| f.coeff(-k) == *c)),
            Self::OddModesVanish => Some(f.iter().all(|(k, _)| k % 2 == 0)),
            Self::Unavailable => None,
        }
    }
}

impl fmt::Display for FourierConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EvenModes => "f_k = f_{-k} for all k",
            Self::OddModesVanish => "f_k = 0 for all odd k",
            Self::Unavailable => "unavailable",
        })
    }
}

/// Maps any angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn flat(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `s(t) / (s(t) + s(1−t))` with `s(t) = exp(−1/t)`: 0 at 0, 1 at 1, every
/// derivative vanishing at both ends.
pub fn smoothstep(t: f64) -> f64 {
    let a = flat(t);
    let b = flat(1.0 - t);
    if a + b == 0.0 {
        return if t >= 0.5 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}
