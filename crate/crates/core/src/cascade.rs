//! The universal input: one content item's event history.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single event: time since item creation and its mark.
///
/// For the exponential-kernel model the mark is the scale `Z` of the jump; the
/// intensity jumps by `beta * Z`. For power-law (SEISMIC-style) cascades it is
/// the node degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub mark: f64,
}

impl Event {
    pub fn new(t: f64, mark: f64) -> Self {
        Event { t, mark }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cascade {
    pub item_id: String,
    /// Absolute creation time, epoch seconds.
    pub created_at: f64,
    pub events: Vec<Event>,
    pub static_attrs: Vec<f64>,
    /// Set when the producer stopped early (event cap); nothing after the
    /// last event is known.
    pub truncated: bool,
    /// End of the observation window in seconds since creation. `None` means
    /// the cascade is complete.
    pub observed_until: Option<f64>,
}

impl Cascade {
    /// Builds a cascade, checking the ordering and sign invariants.
    pub fn new(item_id: impl Into<String>, events: Vec<Event>, static_attrs: Vec<f64>) -> Result<Self> {
        let c = Cascade {
            item_id: item_id.into(),
            created_at: 0.0,
            events,
            static_attrs,
            truncated: false,
            observed_until: None,
        };
        c.validate()?;
        Ok(c)
    }

    /// Cascade with unit marks at the given times.
    pub fn from_times(item_id: impl Into<String>, times: &[f64]) -> Result<Self> {
        Cascade::new(item_id, times.iter().map(|&t| Event::new(t, 1.0)).collect(), Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        let mut last = 0.0;
        for (i, e) in self.events.iter().enumerate() {
            if !e.t.is_finite() || e.t < 0.0 {
                return Err(Error::domain(format!("event {i}: time {} must be finite and >= 0", e.t)));
            }
            if e.t < last {
                return Err(Error::domain(format!("event {i}: time {} precedes {last}", e.t)));
            }
            if !e.mark.is_finite() || e.mark < 0.0 {
                return Err(Error::domain(format!("event {i}: mark {} must be finite and >= 0", e.mark)));
            }
            last = e.t;
        }
        if self.static_attrs.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("static attributes must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().map(|e| e.t)
    }

    /// `N(t)`: number of events in `[0, t)`.
    pub fn count_before(&self, t: f64) -> usize {
        self.events.partition_point(|e| e.t < t)
    }

    /// Events strictly before `t`.
    pub fn history(&self, t: f64) -> &[Event] {
        &self.events[..self.count_before(t)]
    }

    /// Latest time through which counts are known.
    pub fn coverage(&self) -> f64 {
        if self.truncated {
            return self.events.last().map_or(0.0, |e| e.t);
        }
        self.observed_until.unwrap_or(f64::INFINITY)
    }

    /// `N(t)` if the cascade is observed through `t`.
    pub fn observed_count(&self, t: f64) -> Option<usize> {
        if t.is_infinite() {
            return (!self.truncated).then_some(self.events.len());
        }
        (t <= self.coverage()).then(|| self.count_before(t))
    }
}
