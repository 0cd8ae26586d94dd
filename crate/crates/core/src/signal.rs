//! Periodic switching signals built from a cycle.
//!
//! The signal activates `v_0` for `Δ_{v_0}` steps, then `v_1` for `Δ_{v_1}`
//! steps, and so on around the cycle forever. With a uniform `Δ` this is the
//! classical construction `τ_{p+1} = τ_p + Δ` with period `nΔ`.
//!
//! Per-vertex dwell times are supported; the probabilistic contractivity
//! guarantee is only established for the uniform-Δ case.

use thiserror::Error;

use crate::graph::{CycleError, DwellWindow, TimedCycle, VertexId, WeightedDigraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("signal has no segments")]
    Empty,
    #[error("segment {0} has zero dwell")]
    ZeroDwell(usize),
}

/// A switching instant `τ_k` with the subsystem activated there and its dwell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Switch {
    pub time: u64,
    pub vertex: VertexId,
    pub dwell: u32,
}

/// A periodic map `t -> σ(t)`. Evaluation is `O(log n)` and nothing is
/// materialized beyond one period's segment list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchingSignal {
    segments: Vec<(VertexId, u32)>,
    // offset of each segment within the period
    starts: Vec<u64>,
    period: u64,
}

impl SwitchingSignal {
    /// Builds the periodic signal for a timed cycle. The cycle must have at
    /// least two vertices and every dwell must lie in `window`.
    pub fn synthesize(c: &TimedCycle, window: DwellWindow) -> Result<Self, SignalError> {
        c.validate_dwell(window)?;
        Self::from_segments(c.vertices().iter().copied().zip(c.dwell.iter().copied()).collect())
    }

    /// As [`synthesize`](Self::synthesize), additionally checking that the
    /// cycle exists in `g`; the window is taken from `g`.
    pub fn synthesize_on(g: &WeightedDigraph, c: &TimedCycle) -> Result<Self, SignalError> {
        c.validate(g)?;
        Self::synthesize(c, g.window())
    }

    /// A periodic signal from raw `(vertex, dwell)` segments, with no
    /// admissibility checks.
    pub fn from_segments(segments: Vec<(VertexId, u32)>) -> Result<Self, SignalError> {
        if segments.is_empty() {
            return Err(SignalError::Empty);
        }
        let mut starts = Vec::with_capacity(segments.len());
        let mut period = 0u64;
        for (i, &(_, d)) in segments.iter().enumerate() {
            if d == 0 {
                return Err(SignalError::ZeroDwell(i));
            }
            starts.push(period);
            period += u64::from(d);
        }
        Ok(Self { segments, starts, period })
    }

    /// `Δ_W`, the sum of the dwell times over one traversal.
    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn segments(&self) -> &[(VertexId, u32)] {
        &self.segments
    }

    pub fn eval(&self, t: u64) -> VertexId {
        let r = t % self.period;
        let k = match self.starts.binary_search(&r) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        self.segments[k].0
    }

    /// Infinite iterator over switching instants `τ_0 = 0 < τ_1 < ...`.
    pub fn switches(&self) -> impl Iterator<Item = Switch> + '_ {
        let n = self.segments.len();
        (0u64..).map(move |p| {
            let k = (p % n as u64) as usize;
            let lap = p / n as u64;
            let (vertex, dwell) = self.segments[k];
            Switch { time: lap * self.period + self.starts[k], vertex, dwell }
        })
    }

    /// True iff over `[0, horizon]` every switch follows an edge of `g` and
    /// every dwell lies in the graph's window.
    pub fn is_admissible(&self, g: &WeightedDigraph, horizon: u64) -> bool {
        let window = g.window();
        let mut prev: Option<Switch> = None;
        for s in self.switches().take_while(|s| s.time <= horizon) {
            if s.vertex.0 >= g.vertex_count() || !window.contains(s.dwell) {
                return false;
            }
            if let Some(p) = prev {
                if g.edge_weight(p.vertex, s.vertex).is_none() {
                    return false;
                }
            }
            prev = Some(s);
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Cycle, Edge};

    fn line(t: std::ops::Range<u64>, s: &SwitchingSignal) -> Vec<usize> {
        t.map(|t| s.eval(t).0).collect()
    }

    fn triangle() -> WeightedDigraph {
        let ids: Vec<VertexId> = (0..4).map(VertexId).collect();
        let e = |a: usize, b: usize| Edge { from: VertexId(a), to: VertexId(b), weight: 0.0 };
        WeightedDigraph::new(
            &ids,
            &[],
            &[-1.0; 4],
            &[e(1, 2), e(2, 3), e(3, 1), e(2, 1)],
            DwellWindow::new(2, 4).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn uniform_dwell_unrolls() {
        let c = TimedCycle::uniform(Cycle::new([1, 2, 3]), 2);
        let s = SwitchingSignal::synthesize(&c, DwellWindow::new(2, 4).unwrap()).unwrap();
        assert_eq!(s.period(), 6);
        assert_eq!(line(0..8, &s), vec![1, 1, 2, 2, 3, 3, 1, 1]);
    }

    #[test]
    fn per_vertex_dwell_unrolls() {
        let c = TimedCycle::new(Cycle::new([1, 2]), vec![2, 4]);
        let s = SwitchingSignal::synthesize(&c, DwellWindow::new(2, 4).unwrap()).unwrap();
        assert_eq!(s.period(), 6);
        assert_eq!(line(0..8, &s), vec![1, 1, 2, 2, 2, 2, 1, 1]);
        let times: Vec<u64> = s.switches().take(5).map(|x| x.time).collect();
        assert_eq!(times, vec![0, 2, 6, 8, 12]);
    }

    #[test]
    fn degenerate_and_out_of_window_rejected() {
        let w = DwellWindow::new(2, 4).unwrap();
        let one = TimedCycle::uniform(Cycle::new([1]), 2);
        assert_eq!(SwitchingSignal::synthesize(&one, w), Err(SignalError::Cycle(CycleError::TooShort(1))));
        let wide = TimedCycle::new(Cycle::new([1, 2]), vec![2, 5]);
        assert!(matches!(
            SwitchingSignal::synthesize(&wide, w),
            Err(SignalError::Cycle(CycleError::DwellOutOfWindow { .. }))
        ));
        let missing = TimedCycle::new(Cycle::new([1, 2]), vec![]);
        assert!(matches!(
            SwitchingSignal::synthesize(&missing, w),
            Err(SignalError::Cycle(CycleError::DwellCountMismatch { .. }))
        ));
        assert_eq!(SwitchingSignal::from_segments(vec![]), Err(SignalError::Empty));
        assert_eq!(SwitchingSignal::from_segments(vec![(VertexId(0), 0)]), Err(SignalError::ZeroDwell(0)));
    }

    #[test]
    fn admissibility() {
        let g = triangle();
        let c = TimedCycle::new(Cycle::new([1, 2, 3]), vec![2, 3, 4]);
        let s = SwitchingSignal::synthesize_on(&g, &c).unwrap();
        assert!(s.is_admissible(&g, 3 * s.period()));

        let long = SwitchingSignal::from_segments(vec![(VertexId(1), 2), (VertexId(2), 5), (VertexId(3), 2)]).unwrap();
        assert!(!long.is_admissible(&g, 30));

        // 3 -> 2 is not an edge
        let backwards =
            SwitchingSignal::from_segments(vec![(VertexId(1), 2), (VertexId(3), 2), (VertexId(2), 2)]).unwrap();
        assert!(!backwards.is_admissible(&g, 30));

        assert!(SwitchingSignal::synthesize_on(&g, &TimedCycle::uniform(Cycle::new([1, 3, 2]), 2)).is_err());
    }
}
