mod cache;
pub mod continuation;
pub mod cpoly;
pub mod exact;
pub mod flow;
pub mod golden;
pub mod oracle;
pub mod scalar;
pub mod verify;
pub mod zeros;

pub use num_complex::Complex;
pub use scalar::{ComplexFns, Mp, Precision, Real};

/// Double-precision scalar.
pub type R53 = f64;
/// 128-bit mantissa scalar.
pub type R128 = Mp<128>;
/// 256-bit mantissa scalar.
pub type R256 = Mp<256>;
/// 512-bit mantissa scalar.
pub type R512 = Mp<512>;
