//! Analytic bounds supplied by instances: the a-priori strong-norm bound `A(t, r0, M)` and the
//! weak-norm stability pair `B(t, R)`, `C(t, R)`.

use std::fmt;
use std::sync::Arc;

use crate::scalar::Scalar;

type Fn3<S> = Arc<dyn Fn(S, S, S) -> S + Send + Sync>;
type Fn2<S> = Arc<dyn Fn(S, S) -> S + Send + Sync>;

/// Strong-norm growth bound of the frozen problem: `|||x(t)||| <= A(t, |||x0|||, sup |||y|||)`.
#[derive(Clone)]
pub struct AprioriBound<S> {
    eval: Fn3<S>,
}

impl<S> fmt::Debug for AprioriBound<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("AprioriBound(..)")
    }
}

impl<S: Scalar> AprioriBound<S> {
    pub fn new(eval: impl Fn(S, S, S) -> S + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
        }
    }

    #[inline]
    pub fn eval(&self, t: S, r0: S, m: S) -> S {
        (self.eval)(t, r0, m)
    }

    /// Sampled check of monotonicity in each argument and of `A(0, r0, M) = r0`.
    pub fn check_invariants(&self, ts: &[S], rs: &[S], ms: &[S]) -> Result<(), String> {
        let tol = |v: S| S::lit(1e-12) * S::one().max(v.abs());
        for &r in rs {
            for &m in ms {
                let a0 = self.eval(S::zero(), r, m);
                if (a0 - r).abs() > tol(r) {
                    return Err(format!("A(0, {r}, {m}) = {a0} != {r}"));
                }
            }
        }
        let sorted = |v: &[S]| {
            let mut v = v.to_vec();
            v.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
            v
        };
        let (ts, rs, ms) = (sorted(ts), sorted(rs), sorted(ms));
        for &t in &ts {
            for &r in &rs {
                for w in ms.windows(2) {
                    let (lo, hi) = (self.eval(t, r, w[0]), self.eval(t, r, w[1]));
                    if hi < lo - tol(lo) {
                        return Err(format!("A decreases in M at (t, r) = ({t}, {r})"));
                    }
                }
            }
            for &m in &ms {
                for w in rs.windows(2) {
                    let (lo, hi) = (self.eval(t, w[0], m), self.eval(t, w[1], m));
                    if hi < lo - tol(lo) {
                        return Err(format!("A decreases in r0 at (t, M) = ({t}, {m})"));
                    }
                }
            }
        }
        for &r in &rs {
            for &m in &ms {
                for w in ts.windows(2) {
                    let (lo, hi) = (self.eval(w[0], r, m), self.eval(w[1], r, m));
                    if hi < lo - tol(lo) {
                        return Err(format!("A decreases in t at (r0, M) = ({r}, {m})"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Weak-norm stability of the frozen problem:
/// `|x1 - x2| <= B(t, |x1 - x2|) + C(t, |y1 - y2|)` on `[0, t]`.
#[derive(Clone)]
pub struct StabilityBounds<S> {
    b: Fn2<S>,
    c: Fn2<S>,
}

impl<S> fmt::Debug for StabilityBounds<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("StabilityBounds(..)")
    }
}

impl<S: Scalar> StabilityBounds<S> {
    pub fn new(
        b: impl Fn(S, S) -> S + Send + Sync + 'static,
        c: impl Fn(S, S) -> S + Send + Sync + 'static,
    ) -> Self {
        Self {
            b: Arc::new(b),
            c: Arc::new(c),
        }
    }

    #[inline]
    pub fn b(&self, t: S, r: S) -> S {
        (self.b)(t, r)
    }

    #[inline]
    pub fn c(&self, t: S, r: S) -> S {
        (self.c)(t, r)
    }

    /// The same pair with the roles of `B` and `C` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            b: Arc::clone(&self.c),
            c: Arc::clone(&self.b),
        }
    }

    /// Sampled small-time check: along the decreasing times `ts`, the last value of
    /// `sup_R b/R` must be below 1 and `sup_R c/R` must decay towards 0 (last value
    /// `<= c_limit`). Also checks monotonicity in `t`.
    pub fn check_small_time(&self, ts: &[S], rs: &[S], c_limit: S) -> Result<(), String> {
        let ratio = |f: &dyn Fn(S, S) -> S, t: S| {
            rs.iter()
                .map(|&r| f(t, r) / r)
                .fold(S::zero(), |a, v| a.max(v))
        };
        let last = *ts.last().ok_or("empty time sample")?;
        let b_last = ratio(&|t, r| self.b(t, r), last);
        if !(b_last < S::one()) {
            return Err(format!("sup b/R = {b_last} at t = {last} is not < 1"));
        }
        let c_last = ratio(&|t, r| self.c(t, r), last);
        if !(c_last <= c_limit) {
            return Err(format!(
                "sup c/R = {c_last} at t = {last} exceeds {c_limit}"
            ));
        }
        for w in ts.windows(2) {
            for &r in rs {
                if self.b(w[1], r) > self.b(w[0], r) || self.c(w[1], r) > self.c(w[0], r) {
                    return Err(format!("bounds not monotone in t near t = {}", w[1]));
                }
            }
        }
        Ok(())
    }
}

/// Everything an instance can say analytically about one window.
#[derive(Debug, Clone)]
pub struct AnalyticBounds<S> {
    pub apriori: AprioriBound<S>,
    pub stability: StabilityBounds<S>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_bound_passes_checks() {
        let a = AprioriBound::new(|t: f64, r, m| r * (m * t).exp());
        let ts = [0.0, 0.1, 0.5, 1.0];
        let rs = [0.0, 0.5, 2.0];
        a.check_invariants(&ts, &rs, &rs).unwrap();
    }

    #[test]
    fn detects_bad_bounds() {
        let shifted = AprioriBound::new(|t: f64, r, _m| r + 1.0 + t);
        assert!(shifted
            .check_invariants(&[0.0, 1.0], &[1.0], &[1.0])
            .is_err());
        let decreasing = AprioriBound::new(|t: f64, r, _m| r * (-t).exp());
        assert!(decreasing
            .check_invariants(&[0.0, 1.0], &[1.0], &[1.0])
            .is_err());
    }

    #[test]
    fn small_time_check() {
        let ts: Vec<f64> = (0..20).map(|k| 0.5f64.powi(k)).collect();
        let rs = [0.1, 1.0, 10.0];
        let good = StabilityBounds::new(|t: f64, r| 0.5 * r + t * r, |t, r| t * r);
        good.check_small_time(&ts, &rs, 1e-5).unwrap();
        let bad_b = StabilityBounds::new(|_t: f64, r| r, |t, r| t * r);
        assert!(bad_b.check_small_time(&ts, &rs, 1e-5).is_err());
        let bad_c = StabilityBounds::new(|t: f64, r| t * r, |_t, r| 0.1 * r);
        assert!(bad_c.check_small_time(&ts, &rs, 1e-5).is_err());
    }

    #[test]
    fn swap_exchanges_roles() {
        let s = StabilityBounds::new(|t: f64, r| t * r, |t: f64, r| 3.0 * t * r);
        let w = s.swapped();
        assert_eq!(w.b(1.0, 2.0), 6.0);
        assert_eq!(w.c(1.0, 2.0), 2.0);
    }
}
