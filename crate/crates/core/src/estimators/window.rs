//! Exact bucketed sliding-window event counter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BUCKETS: usize = 64;

/// Counts events in the closed window `[s - w, s]` using `B` buckets of width
/// `w / B` aligned to a fixed time grid.
///
/// Memory is `B + 2` slots regardless of stream length. The bucket containing
/// `s - w` is counted whole, so the answer can exceed the exact count by at
/// most that bucket's events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlidingWindowCounter {
    window: f64,
    width: f64,
    /// `(bucket index, count)`; slot `k mod len` holds bucket `k`.
    ring: Vec<(i64, u64)>,
}

impl SlidingWindowCounter {
    pub fn new(window: f64, buckets: usize) -> Result<Self> {
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::param(format!("window length must be finite and > 0, got {window}")));
        }
        if buckets == 0 {
            return Err(Error::param("bucket count must be >= 1"));
        }
        Ok(SlidingWindowCounter { window, width: window / buckets as f64, ring: vec![(i64::MIN, 0); buckets + 2] })
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    #[inline]
    fn index(&self, t: f64) -> i64 {
        (t / self.width).floor() as i64
    }

    /// Adds one event at `t`. O(1).
    pub fn observe(&mut self, t: f64) {
        let k = self.index(t);
        let n = self.ring.len() as i64;
        let slot = &mut self.ring[k.rem_euclid(n) as usize];
        if slot.0 != k {
            *slot = (k, 0);
        }
        slot.1 += 1;
    }

    /// Events in `[s - w, s]`, up to bucket granularity. O(B).
    /// Valid when the stream has been observed through `s`.
    pub fn count(&self, s: f64) -> u64 {
        let lo = self.index(s - self.window);
        let hi = self.index(s);
        self.ring.iter().filter(|(k, _)| *k >= lo && *k <= hi).map(|(_, c)| c).sum()
    }

    /// Window rate `count(s) / w`.
    pub fn rate(&self, s: f64) -> f64 {
        self.count(s) as f64 / self.window
    }

    /// Bytes held by this counter; constant over the stream.
    pub fn memory_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.ring.capacity() * std::mem::size_of::<(i64, u64)>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_recent_events() {
        let mut w = SlidingWindowCounter::new(10.0, 64).unwrap();
        for i in 0..10 {
            w.observe(100.0 + i as f64 * 0.9);
        }
        assert_eq!(w.count(109.0), 10);
        assert!((w.rate(109.0) - 1.0).abs() < 1e-12);
        assert_eq!(w.count(200.0), 0);
    }

    #[test]
    fn window_is_closed_at_both_ends() {
        let mut w = SlidingWindowCounter::new(8.0, 64).unwrap();
        for _ in 0..5 {
            w.observe(2.0);
        }
        assert_eq!(w.count(10.0), 5, "events at s - d are included");
        assert_eq!(w.count(2.0), 5, "events at s are included");
    }

    #[test]
    fn error_bounded_by_one_bucket() {
        let mut w = SlidingWindowCounter::new(64.0, 64).unwrap();
        let times: Vec<f64> = (0..10_000).map(|i| i as f64 * 0.037).collect();
        let bucket_max = (1.0 / 0.037f64).ceil() as u64 + 1;
        let mut checkpoints = vec![100.0, 200.5, 369.9].into_iter().peekable();
        for &t in &times {
            while let Some(&s) = checkpoints.peek() {
                if t <= s {
                    break;
                }
                let exact = times.iter().filter(|&&x| x >= s - 64.0 && x <= s).count() as u64;
                let got = w.count(s);
                assert!(got >= exact && got - exact <= bucket_max, "s={s} exact={exact} got={got}");
                checkpoints.next();
            }
            w.observe(t);
        }
        assert!(checkpoints.next().is_none());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(SlidingWindowCounter::new(0.0, 4).is_err());
        assert!(SlidingWindowCounter::new(1.0, 0).is_err());
    }
}
