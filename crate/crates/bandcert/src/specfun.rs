//! Bessel functions of the first kind and their positive zeros.
//!
//! Every disk spectrum downstream is generated by the positive zeros
//! `eta_{n,k}` of the integer-order Bessel functions `J_n`: Dirichlet disk
//! eigenvalues are `(eta_{n,k}/a)^2`, the nonzero-mean eigenfunction
//! averages are `2 sqrt(pi) a / eta_{0,k}`, and the spectral-function poles
//! sit exactly at the `n = 0` values. The accuracy target here is therefore
//! deliberately conservative: absolute error at most `1e-13` for `J_n(x)`
//! with `x <= 200`, and relative error `1e-13` for the zeros, leaving many
//! orders of headroom over the smallest spectral distances the certificates
//! consume (typically `1e-4`..`1e-2`).
//!
//! Evaluation strategy:
//! * `x < 12` — the alternating power series, with both the term recurrence
//!   and the accumulation carried in compensated double-double arithmetic so
//!   the cancellation near the switch point costs no accuracy;
//! * `x >= 12` — Miller's backward recurrence normalized by the identity
//!   `J_0(x) + 2 J_2(x) + 2 J_4(x) + ... = 1`, which is stable downward.
//!
//! The two branches are cross-validated on the overlap band `[10, 14]` in
//! the tests. Zeros are found inside guaranteed brackets (a McMahon-type
//! asymptotic guess for the seed row `n = 0`, and the interlacing property
//! `eta_{n-1,k} < eta_{n,k} < eta_{n-1,k+1}` for higher orders) refined by
//! safeguarded Newton iteration, and memoized per `(n, k)` because spectra
//! assembly queries the same zeros repeatedly.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Argument threshold between the power-series and backward-recurrence
/// branches of [`bessel_j`]. Chosen so that the worst-case absolute error of
/// either branch stays below `1e-13` without arbitrary-precision arithmetic.
const SERIES_SWITCH: f64 = 12.0;

/// Relative tolerance for zero refinement.
const ZERO_TOL: f64 = 1e-13;

// ============================================================================
// Compensated (double-double) arithmetic
// ============================================================================

/// Error-free sum: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e`.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| >= |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product via fused multiply-add.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// A double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
///
/// Only the handful of operations the Bessel series needs are implemented;
/// roughly 32 significant digits, which makes the series branch limited by
/// the final rounding to `f64` rather than by internal cancellation.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    fn mul_f64(self, c: f64) -> Dd {
        let (p, e) = two_prod(self.hi, c);
        let e = e + self.lo * c;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// One Newton-corrected long division by a plain double.
    #[inline]
    fn div_f64(self, c: f64) -> Dd {
        let q0 = self.hi / c;
        let (p, e) = two_prod(q0, c);
        let r = ((self.hi - p) - e) + self.lo;
        let q1 = r / c;
        let (hi, lo) = quick_two_sum(q0, q1);
        Dd { hi, lo }
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

// ============================================================================
// J_n evaluation
// ============================================================================

/// Power-series branch, valid for any `x >= 0` but used below
/// [`SERIES_SWITCH`].
///
/// `J_n(x) = sum_m (-1)^m (x/2)^{n+2m} / (m! (n+m)!)`, with the leading term
/// built multiplicatively (so large `n` neither overflows nor loses digits)
/// and the ratio recurrence `t_{m} = -t_{m-1} (x/2)^2 / (m (n+m))` carried in
/// double-double arithmetic.
fn series_j(n: u32, x: f64) -> f64 {
    let half_x = 0.5 * x;
    // q = (x/2)^2, exactly rounded into a double-double.
    let (q_hi, q_lo) = two_prod(half_x, half_x);
    let q = Dd { hi: q_hi, lo: q_lo };

    // Leading term (x/2)^n / n!.
    let mut term = Dd::ONE;
    for i in 1..=n {
        term = term.mul_f64(half_x).div_f64(i as f64);
    }

    let mut sum = term;
    for m in 1..=1000u32 {
        let denom = -((m as f64) * ((n + m) as f64));
        term = term.mul(q).div_f64(denom);
        sum = sum.add(term);
        if term.hi.abs() < sum.hi.abs() * 1e-22 + 1e-310 {
            break;
        }
    }
    sum.to_f64()
}

/// Miller's backward-recurrence branch for `x >= 1`, normalized with
/// `J_0 + 2 sum_{m even} J_m = 1`.
fn miller_j(n: u32, x: f64) -> f64 {
    // Start high enough that the unwanted (growing) solution has decayed by
    // the time the recurrence reaches the requested order.
    let start = ((1.36 * x + 30.0).ceil() as u32).max(n + 20);
    let start = start + (start % 2); // even, so the norm accumulates cleanly

    let mut above = 0.0_f64; // trial value of J_{m+1}
    let mut here = 1e-250_f64; // trial value of J_m
    let mut norm = 0.0_f64;
    let mut result = 0.0_f64;

    let mut m = start;
    loop {
        if m == n {
            result = here;
        }
        if m % 2 == 0 {
            norm += if m == 0 { here } else { 2.0 * here };
        }
        if m == 0 {
            break;
        }
        let below = (2.0 * m as f64 / x) * here - above;
        above = here;
        here = below;
        m -= 1;
        if here.abs() > 1e100 {
            here /= 1e100;
            above /= 1e100;
            norm /= 1e100;
            result /= 1e100;
        }
    }
    result / norm
}

/// Bessel function of the first kind `J_n(x)`.
///
/// # Arguments
/// * `n` - Nonnegative integer order.
/// * `x` - Argument; negative inputs are handled through the reflection
///   `J_n(-x) = (-1)^n J_n(x)`.
///
/// # Accuracy
/// Absolute error at most `1e-13` for `x <= 200` (in practice close to one
/// ulp on both branches; see the overlap-band test).
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let (x, sign) = if x < 0.0 {
        (-x, if n % 2 == 1 { -1.0 } else { 1.0 })
    } else {
        (x, 1.0)
    };
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let value = if x < SERIES_SWITCH {
        series_j(n, x)
    } else {
        miller_j(n, x)
    };
    sign * value
}

/// Derivative `J_n'(x)` via the standard recurrences
/// `J_0' = -J_1` and `J_n' = (J_{n-1} - J_{n+1}) / 2`.
pub fn bessel_j_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))
    }
}

// ============================================================================
// Zeros
// ============================================================================

/// A positive zero `eta_{n,k}` of `J_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselZero {
    /// Order `n` of the Bessel function.
    pub order: u32,
    /// 1-based index `k`; zeros are strictly increasing in `k`.
    pub index: u32,
    /// The zero itself, `J_n(value) = 0` to `1e-12` relative.
    pub value: f64,
}

fn zero_memo() -> &'static Mutex<HashMap<(u32, u32), f64>> {
    static MEMO: OnceLock<Mutex<HashMap<(u32, u32), f64>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The `k`-th positive zero `eta_{n,k}` of `J_n`.
///
/// The seed row `n = 0` is bracketed around a McMahon-type asymptotic guess;
/// every higher order is bracketed by the interlacing property
/// `eta_{n-1,k} < eta_{n,k} < eta_{n-1,k+1}`, so each bracket provably
/// contains exactly one simple zero. Brackets are refined by safeguarded
/// Newton iteration to `1e-13` relative and the results memoized per
/// `(n, k)`.
///
/// # Errors
/// * `k = 0` is rejected (`k` is 1-based).
/// * A bracket without a sign change reports [`Error::BracketFailure`]; this
///   signals an internal evaluation bug, not a user error.
pub fn bessel_zero(n: u32, k: u32) -> Result<BesselZero> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "bessel_zero: index k must be >= 1".into(),
        ));
    }
    if let Some(&value) = zero_memo().lock().unwrap().get(&(n, k)) {
        return Ok(BesselZero { order: n, index: k, value });
    }
    let value = if n == 0 {
        let guess = mcmahon_guess_j0(k);
        let (lo, hi) = expand_bracket(0, guess)?;
        refine_zero(0, lo, hi)?
    } else {
        // Interlacing bracket from the previous order (computed recursively
        // and served from the memo table on repeat queries).
        let lo = bessel_zero(n - 1, k)?.value;
        let hi = bessel_zero(n - 1, k + 1)?.value;
        // Step just inside: the endpoints are zeros of J_{n-1}, not sign
        // references for J_n.
        let pad = 1e-9 * hi;
        refine_zero(n, lo + pad, hi - pad)?
    };
    zero_memo().lock().unwrap().insert((n, k), value);
    Ok(BesselZero { order: n, index: k, value })
}

/// McMahon asymptotic guess for the `k`-th zero of `J_0` (two correction
/// terms; error below `2e-3` already at `k = 1`).
fn mcmahon_guess_j0(k: u32) -> f64 {
    let beta = (k as f64 - 0.25) * PI;
    let mu = 0.0; // 4 n^2 with n = 0
    beta - (mu - 1.0) / (8.0 * beta)
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta).powi(3))
}

/// Grow a symmetric interval around `guess` until `J_n` changes sign.
fn expand_bracket(n: u32, guess: f64) -> Result<(f64, f64)> {
    let mut width = 0.2;
    while width <= 3.2 {
        let (lo, hi) = ((guess - width).max(1e-6), guess + width);
        if bessel_j(n, lo) * bessel_j(n, hi) < 0.0 {
            return Ok((lo, hi));
        }
        width *= 2.0;
    }
    Err(Error::BracketFailure {
        lo: guess - 3.2,
        hi: guess + 3.2,
        f_lo: bessel_j(n, guess - 3.2),
        f_hi: bessel_j(n, guess + 3.2),
    })
}

/// Safeguarded Newton iteration: every step stays inside the current sign
/// bracket, falling back to bisection whenever Newton leaves it or the
/// derivative degenerates. Once the bracket has collapsed to `ZERO_TOL`
/// times the zero, a few unconstrained Newton steps polish the result down
/// to the last bit (the iteration is contractive there and the evaluation
/// is double-double, so the polished zero is correct to about one ulp).
fn refine_zero(n: u32, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = bessel_j(n, lo);
    let f_hi = bessel_j(n, hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo * f_hi > 0.0 {
        return Err(Error::BracketFailure { lo, hi, f_lo, f_hi });
    }

    let mut x = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..200 {
        let f = bessel_j(n, x);
        if f == 0.0 {
            return Ok(x);
        }
        // Maintain the bracket.
        if f * f_lo < 0.0 {
            hi = x;
        } else {
            lo = x;
            f_lo = f;
        }
        let fp = bessel_j_prime(n, x);
        let newton = x - f / fp;
        let next = if fp != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step <= ZERO_TOL * x || (hi - lo) <= ZERO_TOL * x {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "refine_zero: no convergence for (n, k-bracket) = ({n}, [{lo}, {hi}])"
        )));
    }
    for _ in 0..3 {
        let f = bessel_j(n, x);
        let fp = bessel_j_prime(n, x);
        if f == 0.0 || fp == 0.0 {
            break;
        }
        let next = x - f / fp;
        if !next.is_finite() || next == x {
            break;
        }
        x = next;
    }
    Ok(x)
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values computed with an independent arbitrary-precision
    // evaluation of the defining power series (25+ significant digits),
    // truncated here to f64.
    const J_VALUES: &[(u32, f64, f64)] = &[
        (0, 0.5, 0.938469807240812904),
        (0, 1.0, 0.765197686557966551),
        (0, 2.0, 0.223890779141235668),
        (0, 5.0, -0.177596771314338304),
        (0, 11.5, -0.0676539481116652284),
        (1, 1.0, 0.440050585744933516),
        (1, 2.0, 0.576724807756873387),
        (2, 7.0, -0.30141722008594012),
        (3, 4.0, 0.43017147387562194),
        (5, 9.0, -0.0550388556695137075),
        (0, 12.5, 0.146884054700421102),
        (0, 20.0, 0.167024664340583155),
        (0, 50.0, 0.055812327669251815),
        (0, 200.0, -0.0154374399305650916),
        (1, 12.0, -0.223447104490627612),
        (3, 15.0, -0.194018257820122635),
        (7, 30.0, 0.145185189572328274),
        (10, 100.0, -0.0547321769354720147),
        (12, 13.0, 0.261536875410345099),
        (15, 12.5, 0.0464276355325035069),
    ];

    const ZEROS: &[(u32, u32, f64)] = &[
        (0, 1, 2.4048255576957728),
        (0, 2, 5.5200781102863106),
        (0, 3, 8.6537279129110122),
        (0, 5, 14.9309177084877859),
        (0, 20, 62.0484691902271699),
        (1, 1, 3.8317059702075123),
        (1, 2, 7.0155866698156187),
        (2, 1, 5.1356223018406826),
        (2, 2, 8.4172441403998649),
        (3, 1, 6.3801618959239835),
        (4, 1, 7.5883424345038044),
        (6, 1, 9.93610952421768489),
        (10, 1, 14.4755006865545412),
        (10, 20, 77.106734246861295),
    ];

    #[test]
    fn values_at_zero_argument() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(1, 0.0), 0.0);
        assert_eq!(bessel_j(7, 0.0), 0.0);
    }

    #[test]
    fn frozen_values_both_branches() {
        for &(n, x, expected) in J_VALUES {
            let got = bessel_j(n, x);
            assert!(
                (got - expected).abs() <= 1e-13,
                "J_{n}({x}) = {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn reflection_for_negative_arguments() {
        assert_relative_eq!(bessel_j(0, -2.0), bessel_j(0, 2.0), epsilon = 0.0);
        assert_relative_eq!(bessel_j(1, -2.0), -bessel_j(1, 2.0), epsilon = 0.0);
    }

    #[test]
    fn series_and_miller_agree_on_overlap_band() {
        // Both branches are valid on [10, 14]; they must agree to the stated
        // absolute budget across orders.
        for n in 0..=8u32 {
            let mut x = 10.0;
            while x <= 14.0 {
                let s = series_j(n, x);
                let m = miller_j(n, x);
                assert!(
                    (s - m).abs() <= 1e-13,
                    "branch mismatch J_{n}({x}): series {s} vs miller {m}"
                );
                x += 0.25;
            }
        }
    }

    #[test]
    fn three_term_recurrence_residual() {
        // J_{n-1}(x) + J_{n+1}(x) = (2n/x) J_n(x)
        for n in 1..=9u32 {
            for &x in &[0.7, 3.3, 9.1, 13.7, 26.5, 77.3] {
                let lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
                let rhs = 2.0 * n as f64 / x * bessel_j(n, x);
                assert!(
                    (lhs - rhs).abs() <= 1e-12,
                    "recurrence residual at (n, x) = ({n}, {x}): {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn frozen_zeros() {
        for &(n, k, expected) in ZEROS {
            let zero = bessel_zero(n, k).unwrap();
            assert_relative_eq!(zero.value, expected, max_relative = 1e-13);
            assert_eq!((zero.order, zero.index), (n, k));
        }
    }

    #[test]
    fn zero_residual_invariant() {
        // |J_n(eta)| <= 1e-12 * max(1, |J_n'(eta)| * eta) for all computed
        // zeros in the working range.
        for n in 0..=10u32 {
            for k in 1..=20u32 {
                let eta = bessel_zero(n, k).unwrap().value;
                let bound = 1e-12 * (bessel_j_prime(n, eta).abs() * eta).max(1.0);
                assert!(
                    bessel_j(n, eta).abs() <= bound,
                    "residual too large at eta_{{{n},{k}}} = {eta}"
                );
            }
        }
    }

    #[test]
    fn zeros_interlace() {
        // eta_{n,k} < eta_{n+1,k} < eta_{n,k+1}
        for n in 0..=10u32 {
            for k in 1..=20u32 {
                let a = bessel_zero(n, k).unwrap().value;
                let b = bessel_zero(n + 1, k).unwrap().value;
                let c = bessel_zero(n, k + 1).unwrap().value;
                assert!(a < b && b < c, "interlacing fails at (n, k) = ({n}, {k})");
            }
        }
    }

    #[test]
    fn rayleigh_partial_sums() {
        // sum_k eta_{0,k}^{-2} increases monotonically toward 1/4; the
        // partial sum at K = 200 already exceeds 0.2490.
        let mut partial = 0.0;
        let mut previous = 0.0;
        for k in 1..=200u32 {
            let eta = bessel_zero(0, k).unwrap().value;
            partial += 1.0 / (eta * eta);
            assert!(partial > previous && partial < 0.25);
            previous = partial;
        }
        assert!(partial > 0.2490, "partial sum {partial} too small");
        assert_relative_eq!(partial, 0.24949402770661023, max_relative = 1e-12);
    }

    #[test]
    fn memoization_is_bitwise_stable() {
        let first = bessel_zero(3, 7).unwrap().value;
        let second = bessel_zero(3, 7).unwrap().value;
        assert_eq!(first.to_bits(), second.to_bits());
    }

    #[test]
    fn index_zero_rejected() {
        assert!(bessel_zero(0, 0).is_err());
    }
}

