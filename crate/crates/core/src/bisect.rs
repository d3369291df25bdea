//! Bisection on monotone predicates.
//!
//! Every infimum in this crate has the form `inf { t : P(t) }` for a predicate
//! that flips from `false` to `true` exactly once. [`boundary`] shrinks a
//! bracket `[lo, hi]` with `P(lo) = false`, `P(hi) = true` until it is narrower
//! than the requested tolerance or cannot be split further in `f64`.

/// Hard cap on halvings; `f64` brackets collapse long before this.
pub const MAX_HALVINGS: usize = 2_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub halvings: usize,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }
}

/// Shrink `[lo, hi]` around the point where `pred` switches from false to true.
///
/// The caller guarantees `pred(lo) == false` and `pred(hi) == true` (the
/// endpoints themselves are never evaluated). Stops once `hi - lo <= tol`, or
/// when the midpoint is no longer representable strictly between the ends.
pub fn boundary<P>(lo: f64, hi: f64, tol: f64, mut pred: P) -> Bracket
where
    P: FnMut(f64) -> bool,
{
    let mut b = Bracket { lo, hi, halvings: 0 };
    while b.width() > tol && b.halvings < MAX_HALVINGS {
        let mid = b.midpoint();
        if mid <= b.lo || mid >= b.hi {
            break;
        }
        if pred(mid) {
            b.hi = mid;
        } else {
            b.lo = mid;
        }
        b.halvings += 1;
    }
    b
}

/// Grow `hi` by doubling from `start` until `pred(hi)` holds.
///
/// Returns `None` if `pred` is still false after `max_doublings` doublings.
pub fn expand_upper<P>(start: f64, max_doublings: u32, mut pred: P) -> Option<f64>
where
    P: FnMut(f64) -> bool,
{
    let mut hi = start;
    for _ in 0..=max_doublings {
        if pred(hi) {
            return Some(hi);
        }
        hi *= 2.0;
    }
    None
}
