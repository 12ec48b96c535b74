pub mod dynamics;
pub mod gauge_algebra;
pub mod time_fn;
pub mod wavefield;
