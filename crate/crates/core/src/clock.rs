use core::time::Duration;

/// Monotonic time source. Core code never reads the wall clock directly.
pub trait Stopwatch {
    /// Time elapsed since an arbitrary fixed origin.
    fn now(&self) -> Duration;
}

/// A clock that never advances. Time limits are never hit and all measured
/// durations are zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Stopwatch for NoClock {
    fn now(&self) -> Duration {
        Duration::ZERO
    }
}

impl<T: Stopwatch + ?Sized> Stopwatch for &T {
    fn now(&self) -> Duration {
        (**self).now()
    }
}
