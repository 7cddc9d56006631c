use num_bigint::BigInt;
use serde::Serialize;

use super::shoot::{
    ascending_separatrices, max_connections, saddle_connections, Connection, Direction, Lift, ShootConfig,
    Tracer,
};
use super::system::{CriticalPoint, TorusMorseSystem};
use super::TorusError;
use crate::novring::{IntSeries, LaurentSeries};

/// Signed counts `n_k` of `−v` orbits from `x̄ tʲ` to `(ȳ tˡ) t^{k+j}` for
/// `k ∈ [lowest, horizon]`. `lowest` is the smallest `k` allowed by
/// `F(x̄ tʲ) > F(ȳ tˡ t^{k+j})`; with `j = l = 0` it may be negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowLineCount {
    pub source: usize,
    pub target: usize,
    pub source_shift: i64,
    pub target_shift: i64,
    pub lowest: i64,
    pub horizon: i64,
    pub counts: Vec<i64>,
    pub connections: Vec<Connection>,
}

impl FlowLineCount {
    pub fn n(&self, k: i64) -> i64 {
        if k < self.lowest || k > self.horizon {
            return 0;
        }
        self.counts[(k - self.lowest) as usize]
    }

    /// `Σ n_k tᵏ`, known for exponents `≤ horizon`.
    pub fn series(&self) -> IntSeries {
        LaurentSeries::new(self.lowest, self.counts.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Number of counted coefficients.
    pub fn window(&self) -> usize {
        self.counts.len()
    }
}

/// All orbits from the source lift `x̄ tʲ` to targets of index one less whose
/// absolute lift is at most `max_lift`.
pub fn connections_from(
    sys: &TorusMorseSystem,
    crit: &[CriticalPoint],
    src: &CriticalPoint,
    source_shift: i64,
    max_lift: i64,
    cfg: &ShootConfig,
) -> Result<Vec<Connection>, TorusError> {
    if src.index == 0 {
        return Ok(Vec::new());
    }
    let floor = crit
        .iter()
        .filter(|c| c.index + 1 == src.index)
        .map(|c| c.value - max_lift as f64)
        .fold(f64::INFINITY, f64::min);
    if !floor.is_finite() {
        return Ok(Vec::new());
    }
    let tr = Tracer {
        sys,
        crit,
        cfg,
        direction: Direction::Down,
        level_limit: floor - 0.5,
        source: Lift { id: src.id, lift: source_shift },
    };
    let found = if src.index == 1 {
        saddle_connections(&tr, src)?
    } else {
        max_connections(&tr, src)?
    };
    // index 2 sources also pass saddles of index 1 only; minima are never
    // targets of a maximum here
    let found: Vec<Connection> = found
        .into_iter()
        .filter(|c| crit[c.target.id].index + 1 == src.index)
        .collect();
    for c in &found {
        let target = &crit[c.target.id];
        let drop = (src.value - source_shift as f64) - (target.value - c.target.lift as f64);
        if drop <= 0.0 {
            return Err(TorusError::Unresolved(format!(
                "orbit {:?} → {:?} does not descend",
                c.source, c.target
            )));
        }
    }
    Ok(found)
}

pub(crate) fn tally(
    src: &CriticalPoint,
    dst: &CriticalPoint,
    conns: &[Connection],
    horizon: i64,
    source_shift: i64,
    target_shift: i64,
) -> FlowLineCount {
    // k ≥ lowest ⇔ the target lift lies strictly below the source level
    let m_min = (dst.value - src.value + source_shift as f64).floor() as i64 + 1;
    let lowest = (m_min - source_shift - target_shift).min(horizon + 1);
    let mut counts = vec![0i64; (horizon - lowest + 1).max(0) as usize];
    let mut kept = Vec::new();
    for c in conns.iter().filter(|c| c.target.id == dst.id) {
        let k = c.target.lift - source_shift - target_shift;
        if k >= lowest && k <= horizon {
            counts[(k - lowest) as usize] += c.sign as i64;
            kept.push(*c);
        }
    }
    FlowLineCount {
        source: src.id,
        target: dst.id,
        source_shift,
        target_shift,
        lowest,
        horizon,
        counts,
        connections: kept,
    }
}

/// `n_k(x, y)` for `k ≤ horizon`, from the canonical lifts.
pub fn count_flow_lines(
    sys: &TorusMorseSystem,
    crit: &[CriticalPoint],
    p: &CriticalPoint,
    q: &CriticalPoint,
    horizon: i64,
    cfg: &ShootConfig,
) -> Result<FlowLineCount, TorusError> {
    count_flow_lines_lifted(sys, crit, p, q, horizon, 0, 0, cfg)
}

/// Same, from `x̄ tʲ` with target representative `ȳ tˡ`.
#[allow(clippy::too_many_arguments)]
pub fn count_flow_lines_lifted(
    sys: &TorusMorseSystem,
    crit: &[CriticalPoint],
    p: &CriticalPoint,
    q: &CriticalPoint,
    horizon: i64,
    source_shift: i64,
    target_shift: i64,
    cfg: &ShootConfig,
) -> Result<FlowLineCount, TorusError> {
    if p.index != q.index + 1 {
        return Err(TorusError::IndexMismatch { from: p.index, to: q.index });
    }
    let conns = connections_from(sys, crit, p, source_shift, horizon + source_shift + target_shift, cfg)?;
    Ok(tally(p, q, &conns, horizon, source_shift, target_shift))
}

/// Index 2 → 1 counts obtained by tracing the saddle's ascending
/// separatrices instead of shooting the fan of the maximum.
pub fn dual_count(
    sys: &TorusMorseSystem,
    crit: &[CriticalPoint],
    p: &CriticalPoint,
    q: &CriticalPoint,
    horizon: i64,
    cfg: &ShootConfig,
) -> Result<FlowLineCount, TorusError> {
    if p.index != 2 || q.index != 1 {
        return Err(TorusError::IndexMismatch { from: p.index, to: q.index });
    }
    let cap = crit
        .iter()
        .filter(|c| c.index == 2)
        .map(|c| c.value + horizon as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let tr = Tracer {
        sys,
        crit,
        cfg,
        direction: Direction::Up,
        level_limit: cap + 0.5,
        source: Lift { id: q.id, lift: 0 },
    };
    // an orbit from x̄ tʲ to s̄ is an orbit from x̄ to s̄ t^{−j}
    let conns: Vec<Connection> = ascending_separatrices(&tr, q)?
        .into_iter()
        .filter(|c| c.source.id == p.id)
        .map(|c| Connection {
            source: Lift { id: p.id, lift: 0 },
            target: Lift { id: q.id, lift: -c.source.lift },
            ..c
        })
        .collect();
    Ok(tally(p, q, &conns, horizon, 0, 0))
}
