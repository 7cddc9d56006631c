use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use super::system::{det2, wrap, CriticalPoint, TorusMorseSystem};
use super::TorusError;
use crate::stability::Rk4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootConfig {
    /// Launch radius around the source.
    pub rho0: f64,
    /// Capture radius around targets.
    pub rho1: f64,
    /// Radius inside which passages by saddles are recorded.
    pub rho_near: f64,
    pub step: f64,
    pub rays: usize,
    /// Ray brackets are refined until narrower than this.
    pub bracket_floor: f64,
    /// Connections closer than this in ray parameter are the same orbit.
    pub merge_gap: f64,
    pub max_steps: usize,
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self {
            rho0: 1e-4,
            rho1: 1e-3,
            rho_near: 0.05,
            step: 0.01,
            rays: 256,
            bracket_floor: 1e-9,
            merge_gap: 1e-6,
            max_steps: 2_000_000,
        }
    }
}

/// Critical point `id` lifted to `c̄ tˡ`, i.e. at `x̃ = x_c − l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Lift {
    pub id: usize,
    pub lift: i64,
}

/// A passage through the `rho_near` ball of a saddle, with the side of its
/// stable manifold (sign of `(z − s)·e_y`) on which the trajectory left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Passage {
    pub at: Lift,
    pub side: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Terminal {
    /// Captured by a sink (a minimum going down, a maximum going up).
    Sink { at: Lift },
    /// Captured by a saddle, on the given side of its stable manifold.
    Saddle { at: Lift, side: i8 },
    /// Left the level window without capture.
    Beyond,
    /// Step budget exhausted.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayOutcome {
    pub param: f64,
    pub itinerary: Vec<Passage>,
    pub terminal: Terminal,
    pub end: [f64; 2],
}

impl RayOutcome {
    fn same_signature(&self, other: &Self) -> bool {
        self.terminal == other.terminal && self.itinerary == other.itinerary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// Along `−v`, until `F` drops below the limit.
    Down,
    /// Along `+v`, until `F` rises above the limit.
    Up,
}

pub(crate) struct Tracer<'a> {
    pub sys: &'a TorusMorseSystem,
    pub crit: &'a [CriticalPoint],
    pub cfg: &'a ShootConfig,
    pub direction: Direction,
    pub level_limit: f64,
    pub source: Lift,
}

impl Tracer<'_> {
    pub fn trace(&self, start: [f64; 2], param: f64) -> RayOutcome {
        let sgn = match self.direction {
            Direction::Down => -1.0,
            Direction::Up => 1.0,
        };
        let sink_index = match self.direction {
            Direction::Down => 0,
            Direction::Up => 2,
        };
        let field = |z: &[f64], o: &mut [f64]| {
            let v = self.sys.field([z[0], z[1]]);
            o[0] = sgn * v[0];
            o[1] = sgn * v[1];
        };
        let mut rk = Rk4::new(2);
        let mut z = vec![start[0], start[1]];
        let mut itinerary = Vec::new();
        let mut near: Option<(Lift, i8)> = None;
        let finish = |terminal, z: &[f64], itinerary| RayOutcome {
            param,
            itinerary,
            terminal,
            end: [z[0], z[1]],
        };
        for _ in 0..self.cfg.max_steps {
            rk.step(field, &mut z, self.cfg.step);
            let p = [z[0], z[1]];
            let level = self.sys.value(p);
            if sgn * (level - self.level_limit) > 0.0 {
                return finish(Terminal::Beyond, &z, itinerary);
            }
            let mut inside: Option<(Lift, i8)> = None;
            for c in self.crit {
                if c.index == 2 - sink_index {
                    continue;
                }
                let lift = (c.position[0] - p[0]).round() as i64;
                let at = Lift { id: c.id, lift };
                if at == self.source {
                    continue;
                }
                let d = [p[0] - (c.position[0] - lift as f64), wrap(p[1] - c.position[1])];
                let dist = d[0].hypot(d[1]);
                if c.index == sink_index {
                    if dist < self.cfg.rho1 {
                        return finish(Terminal::Sink { at }, &z, itinerary);
                    }
                    continue;
                }
                if dist < self.cfg.rho_near {
                    let e = c.unstable[0];
                    let side = if d[0] * e[0] + d[1] * e[1] >= 0.0 { 1 } else { -1 };
                    if dist < self.cfg.rho1 {
                        return finish(Terminal::Saddle { at, side }, &z, itinerary);
                    }
                    inside = Some((at, side));
                }
            }
            if let Some((at, side)) = near {
                if inside.map(|x| x.0) != Some(at) {
                    itinerary.push(Passage { at, side });
                }
            }
            near = inside;
        }
        finish(Terminal::Stalled, &z, itinerary)
    }
}

/// One detected orbit from a source lift to a target lift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Connection {
    pub source: Lift,
    pub target: Lift,
    pub sign: i8,
    /// Ray parameter (angle for a maximum, ±1 for a saddle).
    pub param: f64,
}

/// Index-1 source: the two rays `±e_y` along `−v`.
pub(crate) fn saddle_rays(tr: &Tracer<'_>, src: &CriticalPoint) -> Vec<RayOutcome> {
    let p = src.position_of_lift(tr.source.lift);
    let e = src.unstable[0];
    [1.0, -1.0]
        .par_iter()
        .map(|&s| tr.trace([p[0] + s * tr.cfg.rho0 * e[0], p[1] + s * tr.cfg.rho0 * e[1]], s))
        .collect()
}

pub(crate) fn saddle_connections(tr: &Tracer<'_>, src: &CriticalPoint) -> Result<Vec<Connection>, TorusError> {
    let mut out = Vec::new();
    for ray in saddle_rays(tr, src) {
        match ray.terminal {
            Terminal::Sink { at } => out.push(Connection {
                source: tr.source,
                target: at,
                sign: ray.param as i8,
                param: ray.param,
            }),
            Terminal::Beyond => {}
            Terminal::Saddle { at, .. } => {
                return Err(TorusError::Unresolved(format!(
                    "separatrix of {} runs into saddle {} (lift {})",
                    src.id, at.id, at.lift
                )))
            }
            Terminal::Stalled => return Err(TorusError::Unresolved(format!("ray from {} stalled", src.id))),
        }
    }
    Ok(out)
}

/// Index-2 source: the fan `p + ρ₀(cos φ e₁ + sin φ e₂)` along `−v`.
pub(crate) fn fan_point(tr: &Tracer<'_>, src: &CriticalPoint, phi: f64) -> [f64; 2] {
    let p = src.position_of_lift(tr.source.lift);
    let (s, c) = phi.sin_cos();
    let (e1, e2) = (src.unstable[0], src.unstable[1]);
    let r = tr.cfg.rho0;
    [p[0] + r * (c * e1[0] + s * e2[0]), p[1] + r * (c * e1[1] + s * e2[1])]
}

pub(crate) fn shoot_fan(tr: &Tracer<'_>, src: &CriticalPoint, rays: usize) -> Vec<RayOutcome> {
    (0..rays)
        .into_par_iter()
        .map(|i| {
            let phi = TAU * i as f64 / rays as f64;
            tr.trace(fan_point(tr, src, phi), phi)
        })
        .collect()
}

/// Connections from a maximum: adjacent fan rays with different signatures
/// are bisected down to `bracket_floor`; a final bracket captured by the
/// same saddle lift on opposite sides is an orbit, signed by the direction
/// in which the side changes as `φ` increases.
pub(crate) fn max_connections(tr: &Tracer<'_>, src: &CriticalPoint) -> Result<Vec<Connection>, TorusError> {
    let fan = shoot_fan(tr, src, tr.cfg.rays);
    let n = fan.len();
    let brackets: Vec<Vec<Bracket>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = fan[i].clone();
            let mut b = fan[(i + 1) % n].clone();
            if i + 1 == n {
                b.param = TAU;
            }
            let mut out = Vec::new();
            refine(tr, src, a, b, &mut out);
            out
        })
        .collect();
    let mut found: Vec<Connection> = Vec::new();
    for br in brackets.into_iter().flatten() {
        if let Some(c) = classify(tr, src, &br)? {
            found.push(c);
        }
    }
    merge(found, tr.cfg.merge_gap)
}

struct Bracket {
    lo: RayOutcome,
    hi: RayOutcome,
}

impl RayOutcome {
    /// Saddle passages, followed by the capturing saddle if any.
    fn events(&self) -> Vec<Passage> {
        let mut ev = self.itinerary.clone();
        if let Terminal::Saddle { at, side } = self.terminal {
            ev.push(Passage { at, side });
        }
        ev
    }
}

/// A bracket narrower than the floor is an orbit when both rays meet the
/// same saddle lift, at their first differing event, on opposite sides.
/// Other event differences come from rays grazing a detection ball and are
/// ignored; different endings with identical events are unresolved.
fn classify(tr: &Tracer<'_>, src: &CriticalPoint, br: &Bracket) -> Result<Option<Connection>, TorusError> {
    if matches!(br.lo.terminal, Terminal::Stalled) || matches!(br.hi.terminal, Terminal::Stalled) {
        return Err(TorusError::Unresolved(format!("fan ray from {} stalled", src.id)));
    }
    let (ea, eb) = (br.lo.events(), br.hi.events());
    match ea.iter().zip(&eb).position(|(a, b)| a != b) {
        Some(i) if ea[i].at == eb[i].at => Ok(Some(Connection {
            source: tr.source,
            target: ea[i].at,
            sign: if ea[i].side < 0 { 1 } else { -1 },
            param: 0.5 * (br.lo.param + br.hi.param),
        })),
        Some(_) => Ok(None),
        None if ea.len() != eb.len() => Ok(None),
        None if matches!(br.lo.terminal, Terminal::Saddle { .. })
            || matches!(br.hi.terminal, Terminal::Saddle { .. }) =>
        {
            Ok(None)
        }
        None => Err(TorusError::Unresolved(format!(
            "fan of {} splits between {:?} and {:?} at φ = {} with no saddle between",
            src.id, br.lo.terminal, br.hi.terminal, br.lo.param
        ))),
    }
}

fn refine(tr: &Tracer<'_>, src: &CriticalPoint, a: RayOutcome, b: RayOutcome, out: &mut Vec<Bracket>) {
    if a.same_signature(&b) {
        return;
    }
    if b.param - a.param < tr.cfg.bracket_floor {
        out.push(Bracket { lo: a, hi: b });
        return;
    }
    let mid = 0.5 * (a.param + b.param);
    let m = tr.trace(fan_point(tr, src, mid), mid);
    refine(tr, src, a, m.clone(), out);
    refine(tr, src, m, b, out);
}

fn merge(mut found: Vec<Connection>, gap: f64) -> Result<Vec<Connection>, TorusError> {
    found.sort_by(|a, b| a.param.partial_cmp(&b.param).expect("finite params"));
    let mut out: Vec<Connection> = Vec::with_capacity(found.len());
    for c in found {
        if let Some(last) = out.last() {
            if last.target == c.target && (c.param - last.param).abs() < gap {
                if last.sign != c.sign {
                    return Err(TorusError::Unresolved(format!(
                        "orbits of opposite sign to {:?} within {gap:e} at φ = {}",
                        c.target, c.param
                    )));
                }
                continue;
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Dual route for index 2 → 1: follow each ascending separatrix of the
/// saddle along `+v` to the maximum it comes from. A separatrix leaving in
/// direction `d` from a maximum lift `x̄ tʲ` is an orbit `x̄ → s̄ t^{−j}` with
/// sign `−sign det(d, e_y)`.
pub(crate) fn ascending_separatrices(tr: &Tracer<'_>, saddle: &CriticalPoint) -> Result<Vec<Connection>, TorusError> {
    let p = saddle.position_of_lift(tr.source.lift);
    let (d, e) = (saddle.stable[0], saddle.unstable[0]);
    let rays: Vec<(f64, RayOutcome)> = [1.0, -1.0]
        .par_iter()
        .map(|&s| {
            let start = [p[0] + s * tr.cfg.rho0 * d[0], p[1] + s * tr.cfg.rho0 * d[1]];
            (s, tr.trace(start, s))
        })
        .collect();
    let mut out = Vec::new();
    for (s, ray) in rays {
        match ray.terminal {
            Terminal::Sink { at } => {
                let dir = [s * d[0], s * d[1]];
                out.push(Connection {
                    source: at,
                    target: tr.source,
                    sign: if det2(dir, e) > 0.0 { -1 } else { 1 },
                    param: s,
                });
            }
            Terminal::Beyond => {}
            other => {
                return Err(TorusError::Unresolved(format!(
                    "ascending separatrix of {} ended with {other:?}",
                    saddle.id
                )))
            }
        }
    }
    Ok(out)
}
