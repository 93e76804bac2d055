use std::time::Instant;

/// Stages whose wall-clock time the harness records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    ProxyFit,
    Selection,
    TargetFit,
}

/// Measures how long a stage takes, in seconds.
pub trait PhaseTimer {
    fn time<R>(&mut self, phase: Phase, work: impl FnOnce() -> R) -> (R, f64);
}

#[derive(Clone, Copy, Debug, Default)]
pub struct WallClock;

impl PhaseTimer for WallClock {
    fn time<R>(&mut self, _phase: Phase, work: impl FnOnce() -> R) -> (R, f64) {
        let start = Instant::now();
        let out = work();
        (out, start.elapsed().as_secs_f64())
    }
}

/// Reports a fixed duration per phase regardless of the work done.
#[derive(Clone, Copy, Debug, Default)]
pub struct FixedTimer {
    pub proxy_fit: f64,
    pub selection: f64,
    pub target_fit: f64,
}

impl PhaseTimer for FixedTimer {
    fn time<R>(&mut self, phase: Phase, work: impl FnOnce() -> R) -> (R, f64) {
        let secs = match phase {
            Phase::ProxyFit => self.proxy_fit,
            Phase::Selection => self.selection,
            Phase::TargetFit => self.target_fit,
        };
        (work(), secs)
    }
}
