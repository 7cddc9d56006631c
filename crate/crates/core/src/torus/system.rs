use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::TorusError;
use crate::modelflow::smooth_step;

/// Radius around each critical point on which a [`Bump`] vanishes.
pub const SHIELD_RADIUS: f64 = 0.05;

/// Smooth perturbation `size · G(z) · χ(z) · (cos angle, sin angle)`: `G` a
/// periodized Gaussian, `χ` a cutoff vanishing within [`SHIELD_RADIUS`] of
/// every critical point and equal to 1 beyond twice that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub size: f64,
    pub center: [f64; 2],
    pub width: f64,
    pub angle: f64,
}

impl Bump {
    pub fn gaussian(size: f64, center: [f64; 2]) -> Self {
        Self {
            size,
            center,
            width: 0.1,
            angle: std::f64::consts::FRAC_PI_2,
        }
    }
}

/// `f(x, y) = x + (a/2π) sin 2πx cos 2πy` as a map `T² → S¹`, studied through
/// its lift `F(x̃, y) = x̃ + g(x̃, y)` on `R × S¹`. The deck generator `t` acts
/// by `x̃ ↦ x̃ − 1`, so `F(zt) = F(z) − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusMorseSystem {
    amplitude: f64,
    bump: Option<Bump>,
    shield: Vec<[f64; 2]>,
}

impl TorusMorseSystem {
    pub fn new(amplitude: f64) -> Self {
        Self {
            amplitude,
            bump: None,
            shield: Vec::new(),
        }
    }

    /// Same function, field `∇F + bump`, the bump cut off near `critical`.
    pub fn with_bump(&self, bump: Bump, critical: &[CriticalPoint]) -> Self {
        Self {
            amplitude: self.amplitude,
            bump: Some(bump),
            shield: critical.iter().map(|c| c.position).collect(),
        }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn bump(&self) -> Option<&Bump> {
        self.bump.as_ref()
    }

    pub fn value(&self, z: [f64; 2]) -> f64 {
        z[0] + self.amplitude / TAU * (TAU * z[0]).sin() * (TAU * z[1]).cos()
    }

    pub fn gradient(&self, z: [f64; 2]) -> [f64; 2] {
        let (sx, cx) = (TAU * z[0]).sin_cos();
        let (sy, cy) = (TAU * z[1]).sin_cos();
        let a = self.amplitude;
        [1.0 + a * cx * cy, -a * sx * sy]
    }

    pub fn hessian(&self, z: [f64; 2]) -> [[f64; 2]; 2] {
        let (sx, cx) = (TAU * z[0]).sin_cos();
        let (sy, cy) = (TAU * z[1]).sin_cos();
        let a = self.amplitude * TAU;
        let diag = -a * sx * cy;
        let off = -a * cx * sy;
        [[diag, off], [off, diag]]
    }

    /// The (possibly perturbed) gradient-like field `v`.
    pub fn field(&self, z: [f64; 2]) -> [f64; 2] {
        let g = self.gradient(z);
        match &self.bump {
            None => g,
            Some(b) => {
                let w = self.bump_weight(b, z);
                [g[0] + w * b.angle.cos(), g[1] + w * b.angle.sin()]
            }
        }
    }

    fn bump_weight(&self, b: &Bump, z: [f64; 2]) -> f64 {
        let mut gauss = 0.0;
        for i in -1..=1 {
            for j in -1..=1 {
                let dx = wrap(z[0] - b.center[0]) + i as f64;
                let dy = wrap(z[1] - b.center[1]) + j as f64;
                gauss += (-(dx * dx + dy * dy) / (2.0 * b.width * b.width)).exp();
            }
        }
        let cut: f64 = self
            .shield
            .iter()
            .map(|p| {
                let d = torus_distance(z, *p);
                smooth_step((d - SHIELD_RADIUS) / SHIELD_RADIUS)
            })
            .product();
        b.size * gauss.min(1.0) * cut
    }
}

/// Representative of `u` in `[−½, ½)`.
pub(crate) fn wrap(u: f64) -> f64 {
    u - (u + 0.5).floor()
}

pub(crate) fn torus_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    wrap(a[0] - b[0]).hypot(wrap(a[1] - b[1]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub id: usize,
    /// Representative in `[0, 1)²`; also the canonical lift `x̄`.
    pub position: [f64; 2],
    pub index: u8,
    pub eigenvalues: [f64; 2],
    /// `F(x̄)`.
    pub value: f64,
    /// Oriented basis of the unstable space of `−v` (empty for minima):
    /// lexicographically positive eigenvectors, the standard frame when the
    /// Hessian is scalar, and completed to a positive frame for maxima.
    pub unstable: Vec<[f64; 2]>,
    /// Unit eigenvectors spanning the stable space of `−v`.
    pub stable: Vec<[f64; 2]>,
}

impl CriticalPoint {
    pub fn position_of_lift(&self, lift: i64) -> [f64; 2] {
        [self.position[0] - lift as f64, self.position[1]]
    }
}

/// Newton refinement from a 64×64 grid of seeds, deduplicated mod 1.
pub fn find_critical_points(sys: &TorusMorseSystem) -> Result<Vec<CriticalPoint>, TorusError> {
    const SEEDS: usize = 64;
    let base = TorusMorseSystem::new(sys.amplitude());
    let mut found: Vec<[f64; 2]> = Vec::new();
    for i in 0..SEEDS {
        for j in 0..SEEDS {
            let z0 = [(i as f64 + 0.5) / SEEDS as f64, (j as f64 + 0.5) / SEEDS as f64];
            let Some(z) = newton(&base, z0) else { continue };
            if !found.iter().any(|p| torus_distance(*p, z) < 1e-6) {
                found.push(z);
            }
        }
    }
    let mut out = Vec::with_capacity(found.len());
    for z in found {
        let h = base.hessian(z);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det.abs() < 1e-6 {
            return Err(TorusError::DegenerateCritical { position: z, det });
        }
        let (lam, vecs) = sym_eigen(h);
        let index = lam.iter().filter(|&&l| l < 0.0).count() as u8;
        // eigenvalues of H that are negative are unstable directions of −v
        let unstable: Vec<[f64; 2]> = (0..2).filter(|&i| lam[i] < 0.0).map(|i| vecs[i]).collect();
        let stable: Vec<[f64; 2]> = (0..2).filter(|&i| lam[i] > 0.0).map(|i| vecs[i]).collect();
        let unstable = if index == 2 { positive_frame(unstable) } else { unstable };
        out.push(CriticalPoint {
            id: 0,
            position: z,
            index,
            eigenvalues: lam,
            value: base.value(z),
            unstable,
            stable,
        });
    }
    out.sort_by(|a, b| {
        (b.index, a.position[0], a.position[1])
            .partial_cmp(&(a.index, b.position[0], b.position[1]))
            .expect("finite positions")
    });
    for (i, c) in out.iter_mut().enumerate() {
        c.id = i;
    }
    Ok(out)
}

fn newton(sys: &TorusMorseSystem, mut z: [f64; 2]) -> Option<[f64; 2]> {
    for _ in 0..60 {
        let g = sys.gradient(z);
        if g[0].hypot(g[1]) <= 1e-14 {
            break;
        }
        let h = sys.hessian(z);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det.abs() < 1e-12 {
            return None;
        }
        let dx = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dy = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
        z = [z[0] - dx, z[1] - dy];
        if !z[0].is_finite() || !z[1].is_finite() {
            return None;
        }
    }
    let z = [canonical(z[0]), canonical(z[1])];
    let g = sys.gradient(z);
    (g[0].hypot(g[1]) <= 1e-10).then_some(z)
}

/// Representative in `[0, 1)`, with values within `1e-12` of 1 snapped to 0.
fn canonical(u: f64) -> f64 {
    let r = u.rem_euclid(1.0);
    if r >= 1.0 - 1e-12 {
        0.0
    } else {
        r
    }
}

/// Eigenvalues (ascending) and lexicographically positive unit
/// eigenvectors of a symmetric 2×2 matrix; the standard basis when it is
/// (numerically) scalar.
fn sym_eigen(h: [[f64; 2]; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let (p, q, r) = (h[0][0], h[0][1], h[1][1]);
    let mean = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
    let lam = [mean - rad, mean + rad];
    if rad <= 1e-12 * (1.0 + mean.abs()) {
        return (lam, [[1.0, 0.0], [0.0, 1.0]]);
    }
    let vec_for = |l: f64| {
        let (a, b) = ([q, l - p], [l - r, q]);
        let v = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
        let n = v[0].hypot(v[1]);
        lex_positive([v[0] / n, v[1] / n])
    };
    (lam, [vec_for(lam[0]), vec_for(lam[1])])
}

fn lex_positive(v: [f64; 2]) -> [f64; 2] {
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        [-v[0], -v[1]]
    } else {
        v
    }
}

fn positive_frame(mut v: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    if det2(v[0], v[1]) < 0.0 {
        v[1] = [-v[1][0], -v[1][1]];
    }
    v
}

pub(crate) fn det2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_amplitude_has_no_critical_points() {
        assert!(find_critical_points(&TorusMorseSystem::new(0.1)).unwrap().is_empty());
    }

    #[test]
    fn default_system_is_euler_balanced() {
        let sys = TorusMorseSystem::new(1.3);
        let crit = find_critical_points(&sys).unwrap();
        let count = |i| crit.iter().filter(|c| c.index == i).count() as i64;
        assert_eq!((count(2), count(1), count(0)), (2, 4, 2));
        assert_eq!(count(2) - count(1) + count(0), 0);
        for c in &crit {
            let g = sys.gradient(c.position);
            assert!(g[0].hypot(g[1]) <= 1e-10);
            assert!(c.position.iter().all(|&u| (0.0..1.0).contains(&u)));
        }
        // saddles on x = 0 at cos 2πy = −1/a
        let y = (-1.0f64 / 1.3).acos() / TAU;
        assert!(crit.iter().any(|c| c.index == 1 && c.position[0] == 0.0 && (c.position[1] - y).abs() < 1e-12));
    }

    #[test]
    fn lift_identity() {
        let sys = TorusMorseSystem::new(1.3);
        let z = [0.37, 0.81];
        assert!((sys.value([z[0] - 1.0, z[1]]) - (sys.value(z) - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn bump_vanishes_near_critical_points() {
        let sys = TorusMorseSystem::new(1.3);
        let crit = find_critical_points(&sys).unwrap();
        let bumped = sys.with_bump(Bump::gaussian(0.3, crit[0].position), &crit);
        for c in &crit {
            let p = [c.position[0] + 0.03, c.position[1] - 0.02];
            assert_eq!(bumped.field(p), sys.gradient(p));
        }
        let far = [0.25, 0.25];
        let diff = bumped.field(far)[1] - sys.gradient(far)[1];
        assert!(diff.abs() <= 0.3 && diff.abs() > 0.0);
    }

    #[test]
    fn orientation_data() {
        let crit = find_critical_points(&TorusMorseSystem::new(1.3)).unwrap();
        for c in &crit {
            assert_eq!(c.unstable.len(), c.index as usize);
            assert_eq!(c.stable.len(), 2 - c.index as usize);
            if c.index == 2 {
                assert!(det2(c.unstable[0], c.unstable[1]) > 0.0);
            }
        }
    }
}
