//! Monotone pieces of `q(t) = a e^{2t} + b e^{-2t}`, the squared norm of a
//! standard saddle trajectory.

use crate::scalar::Real;

/// An increasing branch `q(s) = a e^{2s} + b e^{-2s}` on `s ≥ start`
/// (`start = None` means all of `R`, which happens exactly when `b = 0`).
/// Original time is `t = s` on the increasing branch and `t = −s` on the
/// decreasing one.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Branch<F> {
    pub a: F,
    pub b: F,
    pub start: Option<F>,
}

impl<F: Real> Branch<F> {
    pub fn q(&self, s: F) -> F {
        let e = (s + s).exp();
        self.a * e + self.b / e
    }

    pub fn q_start(&self) -> F {
        self.start.map_or(F::zero(), |s| self.q(s))
    }

    /// The `s ≥ start` with `q(s) = c`; requires `c ≥ q_start`.
    pub fn root(&self, c: F) -> F {
        let mut hi = self.start.unwrap_or(F::zero()) + F::one();
        let mut step = F::one();
        while self.q(hi) < c {
            step = step + step;
            hi = hi + step;
        }
        let lo = match self.start {
            Some(s) => s,
            None => {
                let mut lo = hi - F::one();
                let mut step = F::one();
                while self.q(lo) > c {
                    step = step + step;
                    lo = lo - step;
                }
                lo
            }
        };
        bisect_increasing(|s| self.q(s) - c, lo, hi)
    }

    /// `s`-interval on which `lo ≤ q ≤ hi`, if nonempty.
    pub fn shell(&self, lo: F, hi: F) -> Option<(F, F)> {
        let q0 = self.q_start();
        if q0 > hi {
            return None;
        }
        let s_lo = if q0 >= lo { self.start.expect("q_start > 0 implies finite start") } else { self.root(lo) };
        Some((s_lo, self.root(hi)))
    }
}

/// The increasing-in-`t` and decreasing-in-`t` branches of the trajectory
/// with `|x0|² = a`, `|y0|² = b`. Empty when `a = b = 0`.
pub(crate) fn branches<F: Real>(a: F, b: F) -> Vec<Branch<F>> {
    let mut out = Vec::with_capacity(2);
    let quarter = F::lit(0.25);
    let tstar = if a > F::zero() && b > F::zero() { Some(quarter * (b / a).ln()) } else { None };
    if a > F::zero() {
        out.push(Branch { a, b, start: tstar });
    }
    if b > F::zero() {
        out.push(Branch { a: b, b: a, start: tstar.map(|t| -t) });
    }
    out
}

/// Root of an increasing function bracketed by `[lo, hi]`, to `1e-12`.
pub(crate) fn bisect_increasing<F: Real>(g: impl Fn(F) -> F, mut lo: F, mut hi: F) -> F {
    let tol = F::lit(1e-12);
    for _ in 0..400 {
        let m = (lo + hi) * F::lit(0.5);
        if hi - lo <= tol || m <= lo || m >= hi {
            break;
        }
        if g(m) < F::zero() {
            lo = m;
        } else {
            hi = m;
        }
    }
    (lo + hi) * F::lit(0.5)
}
