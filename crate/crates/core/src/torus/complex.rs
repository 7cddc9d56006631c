use num_traits::Zero;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::count::{connections_from, dual_count, tally, FlowLineCount};
use super::shoot::ShootConfig;
use super::system::{find_critical_points, torus_distance, Bump, CriticalPoint, TorusMorseSystem};
use super::TorusError;
use crate::novring::{fit_rational, IntSeries, LaurentSeries, NovikovRational};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NovikovEntry {
    pub source: usize,
    pub target: usize,
    pub counted: IntSeries,
    /// Smallest exponent that was counted (possibly with a zero count).
    pub lowest: i64,
    pub fitted: Option<NovikovRational>,
    /// Leading coefficients used for the fit; the remaining two are held out.
    pub fit_terms: usize,
    /// The fit reproduces the held-out coefficients.
    pub prediction_ok: Option<bool>,
    pub growth_rate: Option<f64>,
    /// Every counted `|n_k|` is within the fitted coefficient bound.
    pub growth_ok: Option<bool>,
}

/// Rows are critical points of index `s`, columns of index `s − 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryMatrix {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub entries: Vec<Vec<NovikovEntry>>,
}

impl BoundaryMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn iter(&self) -> impl Iterator<Item = &NovikovEntry> {
        self.entries.iter().flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NovikovComplex {
    pub critical: Vec<CriticalPoint>,
    pub horizon: i64,
    pub d2: BoundaryMatrix,
    pub d1: BoundaryMatrix,
    pub counts: Vec<FlowLineCount>,
}

impl NovikovComplex {
    pub fn count(&self, source: usize, target: usize) -> Option<&FlowLineCount> {
        self.counts.iter().find(|c| c.source == source && c.target == target)
    }

    /// Some count at a negative exponent is nonzero (so some entry has `m > 0`).
    pub fn has_negative_exponents(&self) -> bool {
        self.counts.iter().any(|c| (c.lowest..0).any(|k| c.n(k) != 0))
    }
}

/// Count every adjacent-index pair and fit each entry.
pub fn assemble_novikov(
    sys: &TorusMorseSystem,
    crit: &[CriticalPoint],
    horizon: i64,
    cfg: &ShootConfig,
) -> Result<NovikovComplex, TorusError> {
    let sources: Vec<&CriticalPoint> = crit.iter().filter(|c| c.index >= 1).collect();
    let conns = sources
        .par_iter()
        .map(|src| connections_from(sys, crit, src, 0, horizon, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut counts = Vec::new();
    for (src, found) in sources.iter().zip(&conns) {
        for dst in crit.iter().filter(|c| c.index + 1 == src.index) {
            counts.push(tally(src, dst, found, horizon, 0, 0));
        }
    }
    let matrix = |s: u8| {
        let rows: Vec<usize> = crit.iter().filter(|c| c.index == s).map(|c| c.id).collect();
        let cols: Vec<usize> = crit.iter().filter(|c| c.index + 1 == s).map(|c| c.id).collect();
        let entries = rows
            .iter()
            .map(|&r| {
                cols.iter()
                    .map(|&c| {
                        let n = counts.iter().find(|x| x.source == r && x.target == c).expect("counted");
                        fit_entry(n)
                    })
                    .collect()
            })
            .collect();
        BoundaryMatrix { rows, cols, entries }
    };
    Ok(NovikovComplex {
        critical: crit.to_vec(),
        horizon,
        d2: matrix(2),
        d1: matrix(1),
        counts,
    })
}

fn fit_entry(n: &FlowLineCount) -> NovikovEntry {
    let counted = n.series();
    let mut entry = NovikovEntry {
        source: n.source,
        target: n.target,
        counted: counted.clone(),
        lowest: n.lowest,
        fitted: None,
        fit_terms: 0,
        prediction_ok: None,
        growth_rate: None,
        growth_ok: None,
    };
    let known = if counted.is_zero() {
        n.window()
    } else {
        counted.truncation()
    };
    if known < 4 {
        return entry;
    }
    let fit_terms = known - 2;
    let max_deg = (fit_terms - 2) / 2;
    let head = counted.truncate_to(counted.precision() - 2);
    entry.fit_terms = fit_terms;
    let Ok(r) = fit_rational(&head, max_deg) else {
        return entry;
    };
    let m = r.shift() as i64;
    let full = r.expand((counted.precision() + m).max(0) as usize);
    entry.prediction_ok = Some(full == counted);
    entry.growth_rate = Some(r.growth_rate());
    entry.growth_ok = Some((n.lowest..=n.horizon).all(|k| {
        let idx = k + m;
        idx < 0 && n.n(k) == 0 || idx >= 0 && (n.n(k).abs() as f64) <= r.coefficient_bound(idx as usize)
    }));
    entry.fitted = Some(r);
    entry
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DSquaredTerm {
    pub row: usize,
    pub col: usize,
    pub exponent: i64,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DSquaredReport {
    pub ok: bool,
    pub order: i64,
    /// Every product entry is known at least through `order`.
    pub covered: bool,
    pub nonzero: Vec<DSquaredTerm>,
}

/// `Σ_y ∂₂[x][y]·∂₁[y][z] = 0` for all exponents `≤ order`.
pub fn check_d_squared(d2: &BoundaryMatrix, d1: &BoundaryMatrix, order: i64) -> DSquaredReport {
    let mut nonzero = Vec::new();
    let mut covered = true;
    for (i, &x) in d2.rows.iter().enumerate() {
        for (k, &z) in d1.cols.iter().enumerate() {
            let mut acc: Option<IntSeries> = None;
            for j in 0..d2.cols.len() {
                let prod = &d2.entries[i][j].counted * &d1.entries[j][k].counted;
                acc = Some(match acc {
                    None => prod,
                    Some(a) => &a + &prod,
                });
            }
            let acc = acc.unwrap_or_else(|| LaurentSeries::zero(order + 1));
            if acc.precision() <= order {
                covered = false;
            }
            for e in acc.lead()..=order.min(acc.precision() - 1) {
                if let Some(c) = acc.coeff(e) {
                    if !c.is_zero() {
                        nonzero.push(DSquaredTerm { row: x, col: z, exponent: e, value: c.to_string() });
                    }
                }
            }
        }
    }
    DSquaredReport { ok: covered && nonzero.is_empty(), order, covered, nonzero }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountDifference {
    pub source: usize,
    pub target: usize,
    pub k: i64,
    pub before: i64,
    pub after: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountComparison {
    pub compared_up_to: i64,
    pub identical: bool,
    pub differences: Vec<CountDifference>,
}

pub fn compare_counts(a: &[FlowLineCount], b: &[FlowLineCount], up_to: i64) -> CountComparison {
    let mut differences = Vec::new();
    for x in a {
        let y = b.iter().find(|y| y.source == x.source && y.target == x.target);
        let lo = x.lowest.min(y.map_or(x.lowest, |y| y.lowest));
        for k in lo..=up_to {
            let (before, after) = (x.n(k), y.map_or(0, |y| y.n(k)));
            if before != after {
                differences.push(CountDifference { source: x.source, target: x.target, k, before, after });
            }
        }
    }
    CountComparison { compared_up_to: up_to, identical: differences.is_empty(), differences }
}

/// Recount with `v + bump` and compare with `base` for `k ≤ up_to`.
pub fn perturb_and_recount(
    sys: &TorusMorseSystem,
    base: &NovikovComplex,
    bump: Bump,
    up_to: i64,
    cfg: &ShootConfig,
) -> Result<CountComparison, TorusError> {
    let bumped = sys.with_bump(bump, &base.critical);
    let other = assemble_novikov(&bumped, &base.critical, base.horizon, cfg)?;
    Ok(compare_counts(&base.counts, &other.counts, up_to))
}

/// A bump center at torus distance at least `0.15` from every critical point.
pub fn random_bump_center(crit: &[CriticalPoint], seed: u64) -> [f64; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let z = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        if crit.iter().all(|c| torus_distance(z, c.position) >= 0.15) {
            return z;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TorusConfig {
    pub amplitude: f64,
    pub terms: i64,
    pub d_squared_order: i64,
    pub shoot: ShootConfig,
    pub seed: u64,
    /// Size of the perturbation probe; `None` skips it.
    pub bump_size: Option<f64>,
    pub check_step_halving: bool,
}

impl Default for TorusConfig {
    fn default() -> Self {
        Self {
            amplitude: 1.3,
            terms: 8,
            d_squared_order: 6,
            shoot: ShootConfig::default(),
            seed: 0,
            bump_size: Some(1e-3),
            check_step_halving: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryRecord {
    pub source: usize,
    pub target: usize,
    pub lowest: i64,
    pub counts: Vec<i64>,
    pub fitted: Option<NovikovRational>,
    pub prediction_ok: Option<bool>,
    pub growth_rate: Option<f64>,
    pub growth_ok: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TorusReport {
    pub config: TorusConfig,
    pub critical_points: Vec<CriticalPoint>,
    pub euler_characteristic: i64,
    pub entries: Vec<EntryRecord>,
    pub d_squared_ok: bool,
    pub d_squared: DSquaredReport,
    /// Fan counts for index 2 → 1 agree with ascending-separatrix counts.
    pub dual_agrees: bool,
    pub negative_exponents: bool,
    pub perturbation: Option<(Bump, CountComparison)>,
    pub step_halving: Option<CountComparison>,
}

impl TorusReport {
    /// All asserted invariants hold.
    pub fn ok(&self) -> bool {
        self.euler_characteristic == 0
            && self.d_squared_ok
            && self.dual_agrees
            && self.entries.iter().all(|e| {
                e.prediction_ok.unwrap_or(true) && e.growth_ok.unwrap_or(true)
            })
            && self.perturbation.as_ref().is_none_or(|(b, c)| b.size > 1e-3 || c.identical)
            && self.step_halving.as_ref().is_none_or(|c| c.identical)
    }
}

pub fn run_torus(config: &TorusConfig) -> Result<TorusReport, TorusError> {
    let sys = TorusMorseSystem::new(config.amplitude);
    let crit = find_critical_points(&sys)?;
    let euler = crit.iter().map(|c| if c.index % 2 == 0 { 1 } else { -1 }).sum();
    let cx = assemble_novikov(&sys, &crit, config.terms, &config.shoot)?;
    let d_squared = check_d_squared(&cx.d2, &cx.d1, config.d_squared_order);

    let mut dual_agrees = true;
    for max in crit.iter().filter(|c| c.index == 2) {
        for s in crit.iter().filter(|c| c.index == 1) {
            let dual = dual_count(&sys, &crit, max, s, config.terms, &config.shoot)?;
            let fan = cx.count(max.id, s.id).expect("counted");
            dual_agrees &= (fan.lowest.min(dual.lowest)..=config.terms).all(|k| fan.n(k) == dual.n(k));
        }
    }
    let perturbation = match config.bump_size {
        None => None,
        Some(size) => {
            let bump = Bump::gaussian(size, random_bump_center(&crit, config.seed));
            let up_to = config.terms.min(5);
            Some((bump, perturb_and_recount(&sys, &cx, bump, up_to, &config.shoot)?))
        }
    };
    let step_halving = if config.check_step_halving {
        let mut half = config.shoot;
        half.step *= 0.5;
        let other = assemble_novikov(&sys, &crit, config.terms, &half)?;
        Some(compare_counts(&cx.counts, &other.counts, config.terms))
    } else {
        None
    };
    let entries = cx
        .d2
        .iter()
        .chain(cx.d1.iter())
        .map(|e| {
            let n = cx.count(e.source, e.target).expect("counted");
            EntryRecord {
                source: e.source,
                target: e.target,
                lowest: n.lowest,
                counts: n.counts.clone(),
                fitted: e.fitted.clone(),
                prediction_ok: e.prediction_ok,
                growth_rate: e.growth_rate,
                growth_ok: e.growth_ok,
            }
        })
        .collect();
    Ok(TorusReport {
        config: config.clone(),
        critical_points: crit,
        euler_characteristic: euler,
        entries,
        d_squared_ok: d_squared.ok,
        d_squared,
        dual_agrees,
        negative_exponents: cx.has_negative_exponents(),
        perturbation,
        step_halving,
    })
}

/// Largest absolute counted coefficient, for summaries.
pub fn max_abs_count(cx: &NovikovComplex) -> i64 {
    cx.counts
        .iter()
        .flat_map(|c| c.counts.iter().map(|n| n.abs()))
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::count::{count_flow_lines, count_flow_lines_lifted};
    use crate::torus::shoot::{saddle_rays, shoot_fan, Direction, Lift, Tracer};
    use crate::torus::TorusError;

    fn setup() -> (TorusMorseSystem, Vec<CriticalPoint>, ShootConfig) {
        let sys = TorusMorseSystem::new(1.3);
        let crit = find_critical_points(&sys).unwrap();
        (sys, crit, ShootConfig::default())
    }

    #[test]
    fn shapes_and_d_squared() {
        let (sys, crit, cfg) = setup();
        let cx = assemble_novikov(&sys, &crit, 8, &cfg).unwrap();
        assert_eq!(cx.d2.shape(), (2, 4));
        assert_eq!(cx.d1.shape(), (4, 2));
        let rep = check_d_squared(&cx.d2, &cx.d1, 6);
        assert!(rep.ok, "{rep:?}");
        for e in cx.d2.iter().chain(cx.d1.iter()) {
            let r = e.fitted.as_ref().expect("fitted");
            assert!(r.denominator().coeff(0) == 1.into());
            assert_eq!(e.prediction_ok, Some(true));
            assert_eq!(e.growth_ok, Some(true));
        }
    }

    #[test]
    fn flipped_orbit_breaks_d_squared() {
        let (sys, crit, cfg) = setup();
        let mut cx = assemble_novikov(&sys, &crit, 8, &cfg).unwrap();
        let e = &mut cx.d1.entries[0][0];
        e.counted = -&e.counted;
        assert!(!check_d_squared(&cx.d2, &cx.d1, 6).ok);
    }

    #[test]
    fn empty_complex() {
        let sys = TorusMorseSystem::new(0.1);
        let crit = find_critical_points(&sys).unwrap();
        let cx = assemble_novikov(&sys, &crit, 6, &ShootConfig::default()).unwrap();
        assert_eq!(cx.d2.shape(), (0, 0));
        assert!(check_d_squared(&cx.d2, &cx.d1, 6).ok);
    }

    #[test]
    fn index_must_drop_by_one() {
        let (sys, crit, cfg) = setup();
        let saddles: Vec<_> = crit.iter().filter(|c| c.index == 1).collect();
        assert!(matches!(
            count_flow_lines(&sys, &crit, saddles[0], saddles[1], 6, &cfg),
            Err(TorusError::IndexMismatch { from: 1, to: 1 })
        ));
    }

    #[test]
    fn ray_counts() {
        let (sys, crit, cfg) = setup();
        let tracer = |src: &CriticalPoint| Tracer {
            sys: &sys,
            crit: &crit,
            cfg: &cfg,
            direction: Direction::Down,
            level_limit: src.value - 3.0,
            source: Lift { id: src.id, lift: 0 },
        };
        let saddle = crit.iter().find(|c| c.index == 1).unwrap();
        assert_eq!(saddle_rays(&tracer(saddle), saddle).len(), 2);
        let max = crit.iter().find(|c| c.index == 2).unwrap();
        assert_eq!(shoot_fan(&tracer(max), max, 256).len(), 256);
    }

    #[test]
    fn equivariance_and_lift_shift() {
        let (sys, crit, cfg) = setup();
        let pairs: Vec<(usize, usize)> = crit
            .iter()
            .filter(|p| p.index >= 1)
            .flat_map(|p| crit.iter().filter(move |q| q.index + 1 == p.index).map(move |q| (p.id, q.id)))
            .collect();
        for (p, q) in pairs {
            let base = count_flow_lines_lifted(&sys, &crit, &crit[p], &crit[q], 6, 0, 0, &cfg).unwrap();
            for j in 1..=2 {
                let moved = count_flow_lines_lifted(&sys, &crit, &crit[p], &crit[q], 6, j, 0, &cfg).unwrap();
                assert_eq!(base.series(), moved.series(), "{p}->{q} j={j}");
            }
            let shifted = count_flow_lines_lifted(&sys, &crit, &crit[p], &crit[q], 6, 0, 1, &cfg).unwrap();
            assert_eq!(shifted.series().truncate_to(6), base.series().shift(-1), "{p}->{q}");
        }
    }

    #[test]
    fn zero_bump_and_report() {
        let (sys, crit, cfg) = setup();
        let cx = assemble_novikov(&sys, &crit, 6, &cfg).unwrap();
        let cmp = perturb_and_recount(&sys, &cx, Bump::gaussian(0.0, [0.25, 0.25]), 6, &cfg).unwrap();
        assert!(cmp.identical);
        let rep = run_torus(&TorusConfig { bump_size: None, ..Default::default() }).unwrap();
        assert!(rep.ok());
        assert!(rep.dual_agrees);
        assert_eq!(rep.euler_characteristic, 0);
    }
}
