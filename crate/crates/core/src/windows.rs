//! Compactly supported piecewise-constant windows.
//!
//! A [`StepWindow`] takes the value `values[k]` on `[breakpoints[k], breakpoints[k+1])`
//! and vanishes outside `[breakpoints[0], breakpoints[n])`. Every integral the
//! toolkit needs against such windows (norms, Fourier transforms, modulated
//! overlaps of two translates) has a closed form.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{exp_segment_integral, pairwise_sum, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct StepWindow<T: Scalar> {
    breakpoints: Vec<T>,
    values: Vec<Complex<T>>,
}

/// One constant piece `[start, end)` carrying `value`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece<T: Scalar> {
    pub start: T,
    pub end: T,
    pub value: Complex<T>,
}

impl<T: Scalar> Piece<T> {
    pub fn len(&self) -> T {
        self.end - self.start
    }
}

impl<T: Scalar> StepWindow<T> {
    pub fn new(breakpoints: Vec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidWindow("need at least two breakpoints".into()));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidWindow(format!(
                "{} breakpoints require {} values, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                values.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite())
            || values
                .iter()
                .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidWindow(
                "non-finite breakpoint or value".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidWindow(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    pub fn from_real(breakpoints: Vec<T>, values: Vec<T>) -> Result<Self> {
        Self::new(
            breakpoints,
            values
                .into_iter()
                .map(|v| Complex::new(v, T::zero()))
                .collect(),
        )
    }

    /// `1_[a,b)`.
    pub fn indicator(a: T, b: T) -> Result<Self> {
        Self::from_real(vec![a, b], vec![T::one()])
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn pieces(&self) -> impl Iterator<Item = Piece<T>> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.values.iter())
            .map(|(w, &value)| Piece {
                start: w[0],
                end: w[1],
                value,
            })
    }

    /// `[first breakpoint, last breakpoint]`.
    pub fn hull(&self) -> (T, T) {
        (
            self.breakpoints[0],
            self.breakpoints[self.breakpoints.len() - 1],
        )
    }

    /// Smallest interval outside of which the window vanishes, or `None` for
    /// the zero window.
    pub fn nonzero_hull(&self) -> Option<(T, T)> {
        let mut nonzero = self.pieces().filter(|p| p.value.norm_sqr() > T::zero());
        let first = nonzero.next()?;
        let last = nonzero.last().unwrap_or(first);
        Some((first.start, last.end))
    }

    /// Length of the nonzero hull; zero for the zero window.
    pub fn support_diameter(&self) -> T {
        self.nonzero_hull()
            .map(|(a, b)| b - a)
            .unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero_hull().is_none()
    }

    /// Value at `x` under the half-open `[a, b)` convention.
    pub fn eval(&self, x: T) -> Complex<T> {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        if k == 0 || k == self.breakpoints.len() {
            Complex::new(T::zero(), T::zero())
        } else {
            self.values[k - 1]
        }
    }

    /// `ĝ(ξ) = ∫ g(x) e^{−2πiξx} dx`, summed piece by piece in closed form.
    pub fn fourier_transform(&self, xi: T) -> Complex<T> {
        self.pieces()
            .map(|p| p.value * exp_segment_integral(p.start, p.end, -xi))
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    /// `|g|²` as a step window on the same breakpoints.
    pub fn square_modulus(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self
                .values
                .iter()
                .map(|v| Complex::new(v.norm_sqr(), T::zero()))
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|&v| v * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(Complex::new(factor, T::zero()))
    }

    /// `x ↦ g(x − shift)`.
    pub fn translate(&self, shift: T) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().map(|&b| b + shift).collect(),
            values: self.values.clone(),
        }
    }

    /// Merges adjacent pieces with equal values and trims zero pieces at
    /// both ends. Returns `None` for the zero window.
    pub fn normalized(&self) -> Option<Self> {
        let (lo, hi) = self.nonzero_hull()?;
        let mut breakpoints = vec![lo];
        let mut values: Vec<Complex<T>> = Vec::new();
        for p in self.pieces().filter(|p| p.start >= lo && p.end <= hi) {
            if values.last() == Some(&p.value) {
                *breakpoints.last_mut().expect("nonempty") = p.end;
            } else {
                values.push(p.value);
                breakpoints.push(p.end);
            }
        }
        Some(Self {
            breakpoints,
            values,
        })
    }

    /// Union of the pieces with `|value| > tol`, adjacent pieces merged.
    pub fn support(&self, tol: T) -> Result<SupportSet<T>> {
        let mut intervals: Vec<(T, T)> = Vec::new();
        for p in self.pieces().filter(|p| p.value.norm() > tol) {
            match intervals.last_mut() {
                Some(last) if last.1 == p.start => last.1 = p.end,
                _ => intervals.push((p.start, p.end)),
            }
        }
        if intervals.is_empty() {
            return Err(Error::ZeroWindow);
        }
        SupportSet::new(intervals)
    }

    pub fn l1_norm(&self) -> T {
        let terms: Vec<T> = self.pieces().map(|p| p.value.norm() * p.len()).collect();
        pairwise_sum(&terms)
    }

    /// `‖g‖₂²`.
    pub fn energy(&self) -> T {
        let terms: Vec<T> = self
            .pieces()
            .map(|p| p.value.norm_sqr() * p.len())
            .collect();
        pairwise_sum(&terms)
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// Sum of the jump sizes, counting the jumps from and back to zero at
    /// the ends. Bounds the transform: `|ĝ(ξ)| ≤ TV / (2π|ξ|)`.
    pub fn total_variation(&self) -> T {
        let zero = Complex::new(T::zero(), T::zero());
        let mut prev = zero;
        let mut jumps: Vec<T> = Vec::with_capacity(self.values.len() + 1);
        for &v in self.values.iter().chain(std::iter::once(&zero)) {
            jumps.push((v - prev).norm());
            prev = v;
        }
        pairwise_sum(&jumps)
    }

    /// `∫ |x| |g(x)| dx`, the Lipschitz constant of `ĝ` divided by 2π.
    pub fn abs_first_moment(&self) -> T {
        let half = T::of(0.5);
        let terms: Vec<T> = self
            .pieces()
            .map(|p| {
                let (a, b) = (p.start, p.end);
                let integral = if a >= T::zero() {
                    half * (b * b - a * a)
                } else if b <= T::zero() {
                    half * (a * a - b * b)
                } else {
                    half * (a * a + b * b)
                };
                p.value.norm() * integral
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Pointwise product on the common refinement; `None` when the supports
    /// overlap only in a null set.
    pub fn product(&self, other: &Self) -> Option<Self> {
        let segments = overlap_segments(self, T::zero(), other, T::zero());
        Self::from_segments(
            segments
                .into_iter()
                .map(|s| (s.start, s.end, s.left * s.right)),
        )
    }

    fn from_segments(segments: impl Iterator<Item = (T, T, Complex<T>)>) -> Option<Self> {
        let mut breakpoints: Vec<T> = Vec::new();
        let mut values: Vec<Complex<T>> = Vec::new();
        for (a, b, v) in segments {
            match breakpoints.last() {
                Some(&end) if end == a => {}
                Some(_) => {
                    // gap between segments
                    values.push(Complex::new(T::zero(), T::zero()));
                    breakpoints.push(a);
                }
                None => breakpoints.push(a),
            }
            values.push(v);
            breakpoints.push(b);
        }
        if values.is_empty() {
            None
        } else {
            Some(Self {
                breakpoints,
                values,
            })
        }
    }
}

/// A piece of the common refinement of two translated windows.
#[derive(Clone, Copy, Debug)]
pub struct OverlapSegment<T: Scalar> {
    pub start: T,
    pub end: T,
    pub left: Complex<T>,
    pub right: Complex<T>,
}

/// Common refinement of `f(· − f_shift)` and `g(· − g_shift)` restricted to
/// the intersection of their hulls. Segments of zero length are dropped.
pub fn overlap_segments<T: Scalar>(
    f: &StepWindow<T>,
    f_shift: T,
    g: &StepWindow<T>,
    g_shift: T,
) -> Vec<OverlapSegment<T>> {
    let fb = |k: usize| f.breakpoints[k] + f_shift;
    let gb = |k: usize| g.breakpoints[k] + g_shift;
    let (nf, ng) = (f.values.len(), g.values.len());

    let mut x = fb(0).max(gb(0));
    let end = fb(nf).min(gb(ng));
    let mut out = Vec::new();
    if end <= x {
        return out;
    }
    let mut i = 0;
    while i < nf && fb(i + 1) <= x {
        i += 1;
    }
    let mut j = 0;
    while j < ng && gb(j + 1) <= x {
        j += 1;
    }
    while i < nf && j < ng {
        let (fe, ge) = (fb(i + 1), gb(j + 1));
        let stop = fe.min(ge);
        if stop > x {
            out.push(OverlapSegment {
                start: x,
                end: stop,
                left: f.values[i],
                right: g.values[j],
            });
        }
        x = stop;
        if fe <= stop {
            i += 1;
        }
        if ge <= stop {
            j += 1;
        }
    }
    out
}

/// `∫ f(x − f_shift) · conj(g(x − g_shift)) · e^{2πiνx} dx` in closed form.
pub fn modulated_overlap<T: Scalar>(
    f: &StepWindow<T>,
    f_shift: T,
    g: &StepWindow<T>,
    g_shift: T,
    nu: T,
) -> Complex<T> {
    overlap_segments(f, f_shift, g, g_shift)
        .into_iter()
        .map(|s| s.left * s.right.conj() * exp_segment_integral(s.start, s.end, nu))
        .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
}

/// Finite union of disjoint positive-length intervals, sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportSet<T: Scalar> {
    intervals: Vec<(T, T)>,
}

impl<T: Scalar> SupportSet<T> {
    pub fn new(intervals: Vec<(T, T)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidWindow("support set is empty".into()));
        }
        if intervals
            .iter()
            .any(|&(a, b)| !(a.is_finite() && b.is_finite() && b > a))
        {
            return Err(Error::InvalidWindow(
                "support intervals must have positive finite length".into(),
            ));
        }
        if intervals.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::InvalidWindow(
                "support intervals must be sorted and disjoint".into(),
            ));
        }
        Ok(Self { intervals })
    }

    pub fn interval(a: T, b: T) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn measure(&self) -> T {
        let lens: Vec<T> = self.intervals.iter().map(|&(a, b)| b - a).collect();
        pairwise_sum(&lens)
    }

    pub fn hull(&self) -> (T, T) {
        (
            self.intervals[0].0,
            self.intervals[self.intervals.len() - 1].1,
        )
    }

    pub fn diameter(&self) -> T {
        let (a, b) = self.hull();
        b - a
    }

    pub fn shortest_interval(&self) -> T {
        self.intervals
            .iter()
            .map(|&(a, b)| b - a)
            .fold(T::infinity(), T::min)
    }

    pub fn contains(&self, x: T) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x < b)
    }

    pub fn translate(&self, shift: T) -> Self {
        Self {
            intervals: self
                .intervals
                .iter()
                .map(|&(a, b)| (a + shift, b + shift))
                .collect(),
        }
    }

    /// Positive-length pieces of `self ∩ other`; touching endpoints do not count.
    pub fn intersection(&self, other: &Self) -> Vec<(T, T)> {
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            for &(c, d) in &other.intervals {
                let lo = a.max(c);
                let hi = b.min(d);
                if hi > lo {
                    out.push((lo, hi));
                }
            }
        }
        out.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite"));
        out
    }

    /// `height · 1_Ω` as a step window.
    pub fn indicator(&self, height: T) -> StepWindow<T> {
        let mut breakpoints = vec![self.intervals[0].0];
        let mut values = Vec::new();
        for (k, &(a, b)) in self.intervals.iter().enumerate() {
            if k > 0 && a > breakpoints[breakpoints.len() - 1] {
                values.push(Complex::new(T::zero(), T::zero()));
                breakpoints.push(a);
            }
            values.push(Complex::new(height, T::zero()));
            breakpoints.push(b);
        }
        StepWindow {
            breakpoints,
            values,
        }
    }

    /// `1̂_Ω(ξ)`.
    pub fn indicator_transform(&self, xi: T) -> Complex<T> {
        self.intervals
            .iter()
            .map(|&(a, b)| exp_segment_integral(a, b, -xi))
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn unit() -> StepWindow<f64> {
        StepWindow::indicator(0.0, 1.0).unwrap()
    }

    #[test]
    fn rejects_malformed_windows() {
        assert!(StepWindow::<f64>::from_real(vec![0.0], vec![]).is_err());
        assert!(StepWindow::<f64>::from_real(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StepWindow::<f64>::from_real(vec![1.0, 1.0], vec![1.0]).is_err());
        assert!(StepWindow::<f64>::from_real(vec![0.0, f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn eval_uses_half_open_pieces() {
        let w = unit();
        assert_eq!(w.eval(0.5).re, 1.0);
        assert_eq!(w.eval(0.0).re, 1.0);
        assert_eq!(w.eval(1.0).re, 0.0);
        assert_eq!(w.eval(-0.1).re, 0.0);
        let scaled = StepWindow::indicator(0.0, 2.0)
            .unwrap()
            .scale_real(FRAC_1_SQRT_2);
        assert!((scaled.eval(1.3).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);

        let two = StepWindow::from_real(vec![0.0, 1.0, 2.0], vec![3.0, 4.0]).unwrap();
        assert_eq!(two.eval(1.0).re, 4.0);
        assert_eq!(two.eval(0.999).re, 3.0);
    }

    #[test]
    fn fourier_transform_of_unit_indicator() {
        let w = unit();
        assert_eq!(w.fourier_transform(0.0), Complex::new(1.0, 0.0));
        assert!(w.fourier_transform(3.0).norm() < 1e-15);
        assert!((w.fourier_transform(0.5).norm() - 2.0 / PI).abs() < 1e-15);
        // e^{-πiξ} phase: ĝ(0.5) = -i·2/π
        let z = w.fourier_transform(0.5);
        assert!(z.re.abs() < 1e-15 && (z.im + 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn square_modulus_examples() {
        assert_eq!(unit().square_modulus(), unit());
        let half = StepWindow::indicator(0.0, 2.0)
            .unwrap()
            .scale_real(FRAC_1_SQRT_2);
        assert!((half.square_modulus().values()[0].re - 0.5).abs() < 1e-15);
        let unimodular = StepWindow::new(
            vec![0.0, 1.0, 2.0],
            vec![Complex::new(0.0, 1.0), Complex::new(-1.0, 0.0)],
        )
        .unwrap();
        let sq = unimodular.square_modulus();
        assert_eq!(
            sq.values(),
            &[Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]
        );
    }

    #[test]
    fn support_examples() {
        assert_eq!(unit().support(1e-12).unwrap().intervals(), &[(0.0, 1.0)]);
        let gap = StepWindow::from_real(vec![0.0, 0.5, 1.0, 1.5], vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            gap.support(1e-12).unwrap().intervals(),
            &[(0.0, 0.5), (1.0, 1.5)]
        );
        let zero = StepWindow::from_real(vec![0.0, 1.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(zero.support(1e-12), Err(Error::ZeroWindow));
        let split = StepWindow::from_real(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(split.support(0.0).unwrap().intervals(), &[(0.0, 1.0)]);
    }

    #[test]
    fn normalized_merges_and_trims() {
        let w = StepWindow::from_real(vec![-1.0, 0.0, 0.5, 1.0, 2.0], vec![0.0, 1.0, 1.0, 0.0])
            .unwrap();
        assert_eq!(w.normalized().unwrap(), unit());
    }

    #[test]
    fn norms_and_variation() {
        let w = StepWindow::from_real(vec![-1.0, 0.0, 2.0], vec![2.0, -1.0]).unwrap();
        assert_eq!(w.l1_norm(), 4.0);
        assert_eq!(w.energy(), 6.0);
        assert_eq!(w.sup_norm(), 2.0);
        assert_eq!(w.total_variation(), 2.0 + 3.0 + 1.0);
        // ∫|x||g| = 2·½ + 1·2
        assert_eq!(w.abs_first_moment(), 3.0);
    }

    #[test]
    fn product_on_common_refinement() {
        let f = StepWindow::indicator(0.0, 2.0).unwrap();
        let g = StepWindow::from_real(vec![1.0, 1.5, 3.0], vec![2.0, 3.0]).unwrap();
        let h = f.product(&g).unwrap();
        assert_eq!(h.breakpoints(), &[1.0, 1.5, 2.0]);
        assert_eq!(h.values()[1].re, 3.0);
        let far = StepWindow::indicator(2.0, 3.0).unwrap();
        assert!(f.product(&far).is_none());
    }

    #[test]
    fn product_keeps_interior_gaps() {
        let f = StepWindow::from_real(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 0.0, 1.0]).unwrap();
        let h = f
            .product(&StepWindow::indicator(0.5, 2.5).unwrap())
            .unwrap();
        assert_eq!(h.breakpoints(), &[0.5, 1.0, 2.0, 2.5]);
        assert_eq!(h.energy(), 1.0);
    }

    #[test]
    fn modulated_overlap_of_translates() {
        let g = unit();
        assert!((modulated_overlap(&g, 0.0, &g, 0.0, 0.0).re - 1.0).abs() < 1e-15);
        assert!(modulated_overlap(&g, 0.0, &g, 0.0, -1.0).norm() < 1e-15);
        let z = modulated_overlap(&g, 0.0, &g, 0.0, -1.5);
        assert!((z.norm() - 2.0 / (3.0 * PI)).abs() < 1e-15);
        // touching translates have no overlap
        assert_eq!(modulated_overlap(&g, 0.0, &g, 1.0, 0.3).norm(), 0.0);
        assert!((modulated_overlap(&g, 0.0, &g, 0.25, 0.0).re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn support_set_operations() {
        let omega = SupportSet::<f64>::new(vec![(0.0, 0.5), (1.0, 1.5)]).unwrap();
        assert_eq!(omega.measure(), 1.0);
        assert_eq!(omega.diameter(), 1.5);
        assert!(omega.contains(1.2) && !omega.contains(0.7));
        let ind = omega.indicator(1.0);
        assert_eq!(ind.breakpoints(), &[0.0, 0.5, 1.0, 1.5]);
        assert_eq!(ind.support(0.0).unwrap(), omega);
        assert!(omega.intersection(&omega.translate(0.5)).is_empty());
        assert_eq!(
            SupportSet::interval(0.0, 1.0)
                .unwrap()
                .intersection(&SupportSet::interval(0.5, 1.5).unwrap()),
            vec![(0.5, 1.0)]
        );
        assert!(SupportSet::<f64>::new(vec![(0.0, 1.0), (0.5, 2.0)]).is_err());
        assert!((omega.indicator_transform(0.5).norm()).abs() < 1e-15);
    }
}
