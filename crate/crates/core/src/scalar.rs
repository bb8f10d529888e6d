//! Scalar abstraction and the small numeric kernels shared by every module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real field the toolkit computes in. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance used to collapse points that should coincide.
    const DEDUP_TOL: f64;
    /// Default tolerance for closed-form zero checks.
    const EXACT_TOL: f64;

    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn dedup_tol() -> Self {
        Self::of(Self::DEDUP_TOL)
    }

    #[inline]
    fn exact_tol() -> Self {
        Self::of(Self::EXACT_TOL)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const DEDUP_TOL: f64 = 1e-12;
    const EXACT_TOL: f64 = 1e-10;
}

impl Scalar for f32 {
    const DEDUP_TOL: f64 = 1e-5;
    const EXACT_TOL: f64 = 1e-4;
}

/// Below this value of `|2πν(b−a)|` the segment integral switches to its
/// Taylor expansion.
pub const SMALL_PHASE: f64 = 1e-4;

/// `sin(u)/u`, continuous at zero.
pub fn sinc_unnormalized<T: Scalar>(u: T) -> T {
    if u.abs() < T::of(SMALL_PHASE / 2.0) {
        let u2 = u * u;
        // 1 - u²/6 + u⁴/120 - u⁶/5040
        T::one() - u2 / T::of(6.0) + u2 * u2 / T::of(120.0) - u2 * u2 * u2 / T::of(5040.0)
    } else {
        u.sin() / u
    }
}

/// `e^{2πiθ}`.
#[inline]
pub fn cis_turns<T: Scalar>(turns: T) -> Complex<T> {
    let angle = T::TAU() * turns;
    Complex::new(angle.cos(), angle.sin())
}

/// Closed form of `∫_a^b e^{2πiνx} dx`.
///
/// Written as `e^{2πiν(a+b)/2} · (b−a) · sinc(πν(b−a))`, which is the same
/// quantity as `(e^{2πiνb} − e^{2πiνa}) / (2πiν)` but has no removable
/// singularity at `ν = 0`.
pub fn exp_segment_integral<T: Scalar>(a: T, b: T, nu: T) -> Complex<T> {
    let len = b - a;
    let half_phase = T::PI() * nu * len;
    let mid = (a + b) / T::of(2.0);
    cis_turns(nu * mid) * (len * sinc_unnormalized(half_phase))
}

/// Pairwise (cascade) summation; the reduction tree depends only on the
/// length, so results are reproducible.
pub fn pairwise_sum<T: Scalar>(values: &[T]) -> T {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        values.iter().fold(T::zero(), |acc, &v| acc + v)
    } else {
        let (lo, hi) = values.split_at(values.len() / 2);
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

// 8-point Gauss–Legendre rule on [-1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss–Legendre quadrature over `panels` equal panels.
pub fn gauss_legendre<T: Scalar, F: Fn(T) -> T>(f: F, a: T, b: T, panels: usize) -> T {
    let panels = panels.max(1);
    let width = (b - a) / T::of_usize(panels);
    let half = width / T::of(2.0);
    let per_panel: Vec<T> = (0..panels)
        .map(|k| {
            let centre = a + width * T::of_usize(k) + half;
            let mut acc = T::zero();
            for (&node, &weight) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
                let dx = half * T::of(node);
                acc += T::of(weight) * (f(centre - dx) + f(centre + dx));
            }
            acc * half
        })
        .collect();
    pairwise_sum(&per_panel)
}
