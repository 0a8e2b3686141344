//! Arithmetic instrumentation.
//!
//! Projection and hashing kernels are generic over an [`OpCounter`]. The
//! production path uses [`NoCount`], which compiles away; benchmarks pass an
//! [`OpCounts`] to get exact, hardware-independent operation tallies.

/// Receives one call per arithmetic operation performed on data values.
pub trait OpCounter {
    fn add(&mut self);
    fn sub(&mut self);
    fn mul(&mut self);
    fn mul_add(&mut self);
    fn cmp(&mut self);
}

/// Counter that does nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoCount;

impl OpCounter for NoCount {
    #[inline(always)]
    fn add(&mut self) {}
    #[inline(always)]
    fn sub(&mut self) {}
    #[inline(always)]
    fn mul(&mut self) {}
    #[inline(always)]
    fn mul_add(&mut self) {}
    #[inline(always)]
    fn cmp(&mut self) {}
}

/// Exact operation tallies.
///
/// A multiply-accumulate `acc += a * b` is recorded once under `multiply_adds`
/// and not under `additions` or `multiplications`.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounts {
    pub additions: u64,
    pub subtractions: u64,
    pub multiplications: u64,
    pub multiply_adds: u64,
    pub comparisons: u64,
}

impl OpCounts {
    pub fn add_sub(&self) -> u64 {
        self.additions + self.subtractions
    }
}

impl OpCounter for OpCounts {
    fn add(&mut self) {
        self.additions += 1;
    }
    fn sub(&mut self) {
        self.subtractions += 1;
    }
    fn mul(&mut self) {
        self.multiplications += 1;
    }
    fn mul_add(&mut self) {
        self.multiply_adds += 1;
    }
    fn cmp(&mut self) {
        self.comparisons += 1;
    }
}
