//! Open-interval arithmetic.
//!
//! Every metric in this crate bottoms out in lengths, intersections, and
//! intersection-over-union ratios of real-valued open intervals.

use core::fmt;

/// Default absolute tolerance for coordinate comparisons.
///
/// Forced-alignment timestamps carry at most a few decimal places, so this
/// sits far below data precision while still absorbing accumulated rounding.
/// The arithmetic itself (lengths, intersections, ratios) is never fuzzed;
/// only equality and ordering comparisons use the tolerance.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// True when `a` and `b` are equal within the absolute tolerance `eps`.
#[inline]
pub fn approx_eq(a: f64, b: f64, eps: f64) -> bool {
    (a - b).abs() <= eps
}

/// Rejected construction of an empty or reversed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateInterval {
    pub start: f64,
    pub end: f64,
}

impl fmt::Display for DegenerateInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "degenerate interval ({}, {}): start must be strictly less than end",
            self.start, self.end
        )
    }
}

impl core::error::Error for DegenerateInterval {}

/// A real-valued open interval `(start, end)` with `start < end`.
///
/// Coordinates are seconds for speech spans and word/character units for
/// projected text spans. Zero-length intervals are rejected at construction
/// so every downstream ratio is well defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    start: f64,
    end: f64,
}

impl Interval {
    /// Builds an interval, rejecting spans shorter than [`DEFAULT_EPSILON`].
    pub fn new(start: f64, end: f64) -> Result<Self, DegenerateInterval> {
        Self::with_epsilon(start, end, DEFAULT_EPSILON)
    }

    /// Builds an interval under a caller-chosen tolerance.
    pub fn with_epsilon(start: f64, end: f64, eps: f64) -> Result<Self, DegenerateInterval> {
        if start.is_finite() && end.is_finite() && end - start > eps {
            Ok(Self { start, end })
        } else {
            Err(DegenerateInterval { start, end })
        }
    }

    #[inline]
    pub fn start(&self) -> f64 {
        self.start
    }

    #[inline]
    pub fn end(&self) -> f64 {
        self.end
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    /// Size of the overlap between two open intervals; 0 when they are
    /// disjoint, including the touching-at-a-point case.
    #[inline]
    pub fn intersection_size(&self, other: &Interval) -> f64 {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        if hi > lo {
            hi - lo
        } else {
            0.0
        }
    }

    /// `|a| + |b| - |a ∩ b|`.
    #[inline]
    pub fn union_size(&self, other: &Interval) -> f64 {
        self.length() + other.length() - self.intersection_size(other)
    }

    /// Intersection-over-union ratio, in `[0, 1]`; 1 iff the intervals are
    /// equal. Symmetric because every sub-expression is symmetric in its
    /// operands.
    #[inline]
    pub fn iou(&self, other: &Interval) -> f64 {
        self.intersection_size(other) / self.union_size(other)
    }

    /// Smallest interval covering both operands.
    #[inline]
    pub fn envelope(&self, other: &Interval) -> Interval {
        Interval {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    /// Disjointness under the tolerance: overlaps no larger than `eps`
    /// count as contact noise, not intersection.
    #[inline]
    pub fn is_disjoint(&self, other: &Interval, eps: f64) -> bool {
        self.intersection_size(other) <= eps
    }

    /// True when `other` lies within `self` (tolerant at both edges).
    #[inline]
    pub fn contains(&self, other: &Interval, eps: f64) -> bool {
        self.start <= other.start + eps && other.end <= self.end + eps
    }

    /// Coordinate-wise equality under the tolerance.
    #[inline]
    pub fn approx_same(&self, other: &Interval, eps: f64) -> bool {
        approx_eq(self.start, other.start, eps) && approx_eq(self.end, other.end, eps)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.start, self.end)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(s: f64, e: f64) -> Interval {
        Interval::new(s, e).unwrap()
    }

    #[test]
    fn length_basics() {
        assert_eq!(iv(0.0, 1.0).length(), 1.0);
        assert!((iv(2.56, 3.01).length() - 0.45).abs() < 1e-12);
        assert!((iv(2.55, 2.56).length() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(0.0, 5e-10).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn intersection_cases() {
        assert_eq!(iv(0.0, 1.0).intersection_size(&iv(2.0, 3.0)), 0.0);
        assert_eq!(iv(0.0, 2.0).intersection_size(&iv(1.0, 3.0)), 1.0);
        // Open intervals touching at a point are disjoint.
        assert_eq!(iv(0.0, 1.0).intersection_size(&iv(1.0, 2.0)), 0.0);
    }

    #[test]
    fn union_cases() {
        assert_eq!(iv(0.0, 1.0).union_size(&iv(0.0, 1.0)), 1.0);
        assert_eq!(iv(0.0, 2.0).union_size(&iv(1.0, 3.0)), 3.0);
        assert_eq!(iv(0.0, 1.0).union_size(&iv(2.0, 3.0)), 2.0);
    }

    #[test]
    fn iou_cases() {
        assert_eq!(iv(0.0, 1.0).iou(&iv(0.0, 1.0)), 1.0);
        assert!((iv(0.0, 2.0).iou(&iv(1.0, 3.0)) - 1.0 / 3.0).abs() < 1e-12);
        // Endpoints as printed on the errorful-boundary example tree.
        let a = iv(2.56, 3.01);
        let b = iv(2.51, 3.10);
        assert!((a.iou(&b) - 0.45 / 0.59).abs() < 1e-12);
    }

    #[test]
    fn self_identities() {
        let a = iv(0.25, 1.75);
        assert_eq!(a.intersection_size(&a), a.length());
        assert_eq!(a.union_size(&a), a.length());
        assert_eq!(a.iou(&a), 1.0);
    }

    proptest! {
        #[test]
        fn iou_symmetric_and_bounded(
            s1 in -100.0f64..100.0, l1 in 0.01f64..50.0,
            s2 in -100.0f64..100.0, l2 in 0.01f64..50.0,
        ) {
            let a = iv(s1, s1 + l1);
            let b = iv(s2, s2 + l2);
            let ab = a.iou(&b);
            let ba = b.iou(&a);
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
        }

        #[test]
        fn nested_iou_is_length_ratio(
            s in -10.0f64..10.0, l in 1.0f64..20.0,
            off in 0.0f64..0.4, shrink in 0.1f64..0.5,
        ) {
            let outer = iv(s, s + l);
            let inner = iv(s + off * l, s + (off + shrink) * l);
            let expect = inner.length() / outer.length();
            prop_assert!((outer.iou(&inner) - expect).abs() <= 1e-12);
        }
    }
}
