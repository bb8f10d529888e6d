//! Translational tiling sums `Σ_{t∈T} φ(x − t)` and the checks built on them.
//!
//! Compactly supported tiles give finite, exact sums. Fourier-side tiles
//! such as `|ĝ|²` only decay like `1/x²`; their truncated sums carry an
//! analytic bound on the omitted terms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{gauss_legendre, pairwise_sum, Scalar};
use crate::shiftsets::{detect_periodic_form, Progression, ShiftSet};
use crate::windows::StepWindow;

/// Uniform grid `start + k·step`, `k = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid<T: Scalar> {
    pub start: T,
    pub step: T,
    pub count: usize,
}

impl<T: Scalar> Grid<T> {
    pub fn new(start: T, step: T, count: usize) -> Result<Self> {
        if !(step.is_finite() && step > T::zero() && start.is_finite()) || count == 0 {
            return Err(Error::InvalidParameter(
                "grid needs a finite start, a positive step and at least one point".into(),
            ));
        }
        Ok(Self { start, step, count })
    }

    /// Points of `[lo, hi)` spaced by `step`.
    pub fn half_open(lo: T, hi: T, step: T) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidParameter(format!(
                "empty grid range [{lo}, {hi})"
            )));
        }
        let n = ((hi - lo) / step - T::dedup_tol()).ceil();
        Self::new(lo, step, n.to_usize().unwrap_or(0))
    }

    /// Points of `[lo, hi]` spaced by `step`, both ends included.
    pub fn closed(lo: T, hi: T, step: T) -> Result<Self> {
        if !(hi >= lo) {
            return Err(Error::InvalidParameter(format!(
                "empty grid range [{lo}, {hi}]"
            )));
        }
        let n = ((hi - lo) / step + T::dedup_tol()).floor();
        Self::new(lo, step, n.to_usize().unwrap_or(0) + 1)
    }

    pub fn point(&self, k: usize) -> T {
        self.start + self.step * T::of_usize(k)
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.count).map(|k| self.point(k))
    }

    pub fn last(&self) -> T {
        self.point(self.count - 1)
    }

    /// `max |x|` over the grid.
    pub fn max_abs(&self) -> T {
        self.start.abs().max(self.last().abs())
    }
}

/// Estimate of an integral together with a bound on its error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Integral<T: Scalar> {
    pub value: T,
    pub error_bound: T,
}

/// A nonnegative function that can be translated along a shift set.
pub trait TileFunction<T: Scalar> {
    fn eval(&self, x: T) -> T;

    /// Closed interval outside which the function vanishes.
    fn compact_support(&self) -> Option<(T, T)>;

    /// `sup φ`.
    fn sup_bound(&self) -> T;

    /// `K` with `φ(x) ≤ K / x²` for every `x ≠ 0`.
    fn inverse_square_bound(&self) -> Option<T>;

    fn integral(&self) -> Result<Integral<T>>;

    /// `min(sup φ, K/x²)`: pointwise upper bound used for tails.
    fn envelope(&self, x: T) -> T {
        let sup = self.sup_bound();
        match self.inverse_square_bound() {
            Some(k) if x != T::zero() => sup.min(k / (x * x)),
            _ => sup,
        }
    }
}

impl<T: Scalar> TileFunction<T> for StepWindow<T> {
    /// Real part of the step value; meant for `|g|²` and indicators.
    fn eval(&self, x: T) -> T {
        StepWindow::eval(self, x).re
    }

    fn compact_support(&self) -> Option<(T, T)> {
        self.nonzero_hull()
    }

    fn sup_bound(&self) -> T {
        self.sup_norm()
    }

    fn inverse_square_bound(&self) -> Option<T> {
        None
    }

    fn integral(&self) -> Result<Integral<T>> {
        let terms: Vec<T> = self.pieces().map(|p| p.value.re * p.len()).collect();
        Ok(Integral {
            value: pairwise_sum(&terms),
            error_bound: T::zero(),
        })
    }
}

/// `ξ ↦ |ĝ(ξ)|²` for a step window `g`.
#[derive(Clone, Debug)]
pub struct SpectralDensity<T: Scalar> {
    window: StepWindow<T>,
}

impl<T: Scalar> SpectralDensity<T> {
    pub fn new(window: StepWindow<T>) -> Self {
        Self { window }
    }

    pub fn window(&self) -> &StepWindow<T> {
        &self.window
    }
}

impl<T: Scalar> TileFunction<T> for SpectralDensity<T> {
    fn eval(&self, xi: T) -> T {
        self.window.fourier_transform(xi).norm_sqr()
    }

    fn compact_support(&self) -> Option<(T, T)> {
        None
    }

    fn sup_bound(&self) -> T {
        let l1 = self.window.l1_norm();
        l1 * l1
    }

    fn inverse_square_bound(&self) -> Option<T> {
        let c = self.window.total_variation() / T::TAU();
        Some(c * c)
    }

    fn integral(&self) -> Result<Integral<T>> {
        let (a, b) = self.window.hull();
        fourier_side_integral(
            |xi| self.eval(xi),
            self.inverse_square_bound().expect("step window decays"),
            b - a,
        )
    }
}

/// Quadrature of a Fourier-side function over `[−R, R]` plus half of the
/// analytic tail `2K/R`, with the other half as error.
///
/// `oscillation` is the length of the time-side hull; panels are sized so
/// each holds at most a quarter of an oscillation period.
pub fn fourier_side_integral<T: Scalar, F: Fn(T) -> T>(
    f: F,
    inverse_square_bound: T,
    oscillation: T,
) -> Result<Integral<T>> {
    let two = T::of(2.0);
    let radius = (two * inverse_square_bound / T::of(1e-4))
        .max(T::of(50.0))
        .min(T::of(2e4));
    let panels_per_unit = (T::of(4.0) * oscillation).ceil() + two;
    let panels = (two * radius * panels_per_unit)
        .to_usize()
        .ok_or_else(|| Error::InvalidParameter("quadrature panel count overflow".into()))?;
    let body = gauss_legendre(&f, -radius, radius, panels);
    let tail = two * inverse_square_bound / radius;
    Ok(Integral {
        value: body + tail / two,
        error_bound: tail / two,
    })
}

/// One grid point of a tiling sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TilingSample<T: Scalar> {
    pub x: T,
    pub value: T,
    pub sum: T,
    pub tail_bound: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TilingReport<T: Scalar> {
    pub grid: Grid<T>,
    pub level_target: T,
    pub truncation: T,
    pub shifts_used: usize,
    pub max_abs_deviation: T,
    pub worst_abscissa: T,
    /// Largest bound on the omitted terms over the grid.
    pub truncation_tail_bound: T,
    /// `max_x (|Σ − level| + tail(x))`.
    pub combined_error: T,
    pub tolerance: T,
    pub verdict: bool,
    pub samples: Vec<TilingSample<T>>,
}

impl<T: Scalar> TilingReport<T> {
    /// Grid points where `|Σ − level| > tol`.
    pub fn violations(&self, tol: T) -> impl Iterator<Item = &TilingSample<T>> {
        self.samples
            .iter()
            .filter(move |s| (s.sum - self.level_target).abs() > tol)
    }

    /// CSV rows `abscissa,value,running_sum`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("abscissa,value,running_sum\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{}\n", s.x, s.value, s.sum));
        }
        out
    }
}

/// Upper bound for `Σ_{s∈set, |s|>trunc} φ(center − s)` for a nonnegative φ
/// with `φ(x) ≤ K/x²`.
///
/// Terms with `trunc < |s| ≤ far` are evaluated; beyond `far` the sum is
/// bounded through `K` and the maximal number of points in a unit interval.
/// Explicit lists give an infinite bound since nothing is known outside
/// their window.
pub fn truncation_tail<T: Scalar, F: TileFunction<T> + ?Sized>(
    phi: &F,
    set: &ShiftSet<T>,
    center: T,
    trunc: T,
    far: T,
) -> Result<T> {
    if set.valid_window().is_some() {
        return Ok(T::infinity());
    }
    let pts = set.enumerate(-far, far)?;
    Ok(tail_from_points(
        phi,
        &pts,
        max_points_per_unit(&pts),
        center,
        trunc,
        far,
    ))
}

fn tail_from_points<T: Scalar, F: TileFunction<T> + ?Sized>(
    phi: &F,
    pts: &[T],
    per_unit: T,
    center: T,
    trunc: T,
    far: T,
) -> T {
    let Some(k) = phi.inverse_square_bound() else {
        return T::infinity();
    };
    let d0 = far - center.abs();
    if d0 <= T::one() {
        return T::infinity();
    }
    let mut terms: Vec<T> = pts
        .iter()
        .filter(|p| p.abs() > trunc)
        .map(|&p| phi.eval(center - p))
        .collect();
    terms.push(T::of(2.0) * per_unit * k * (T::one() / (d0 * d0) + T::one() / d0));
    pairwise_sum(&terms)
}

fn max_points_per_unit<T: Scalar>(sorted: &[T]) -> T {
    let mut best = 0usize;
    let mut j = 0;
    for i in 0..sorted.len() {
        while j < sorted.len() && sorted[j] < sorted[i] + T::one() {
            j += 1;
        }
        best = best.max(j - i);
    }
    T::of_usize(best.max(1))
}

/// Evaluates `Σ_{t∈T, |t|≤trunc} φ(x − t)` on `grid` against `level`.
///
/// For compactly supported φ only the shifts whose translate meets `x`
/// are summed, and the tail counts contributing shifts beyond `trunc`
/// (zero when `trunc` covers the grid). For decaying φ the tail comes from
/// [`truncation_tail`].
pub fn tiling_sum<T: Scalar, F: TileFunction<T> + ?Sized>(
    phi: &F,
    shifts: &ShiftSet<T>,
    grid: &Grid<T>,
    trunc: T,
    level: T,
    tol: T,
) -> Result<TilingReport<T>> {
    if !(trunc.is_finite() && trunc > T::zero()) {
        return Err(Error::TruncationTooSmall(format!(
            "truncation {trunc} must be positive"
        )));
    }
    let pts = shifts.enumerate(-trunc, trunc)?;
    let support = phi.compact_support();

    // compact tiles: shifts outside the truncation that still reach the grid
    let omitted: Vec<T> = match support {
        Some((a, b)) => {
            let (need_lo, need_hi) = (grid.start - b, grid.last() - a);
            if need_lo >= -trunc && need_hi <= trunc {
                Vec::new()
            } else {
                shifts
                    .enumerate(need_lo, need_hi)?
                    .into_iter()
                    .filter(|t| t.abs() > trunc)
                    .collect()
            }
        }
        None => Vec::new(),
    };
    let far = T::of(16.0) * trunc + T::of(2.0) * grid.max_abs() + T::of(2.0);
    let (tail_pts, per_unit) = match support {
        Some(_) => (Vec::new(), T::one()),
        None if shifts.valid_window().is_some() => (Vec::new(), T::one()),
        None => {
            let pts = shifts.enumerate(-far, far)?;
            let per_unit = max_points_per_unit(&pts);
            (pts, per_unit)
        }
    };

    let mut samples = Vec::with_capacity(grid.count);
    for x in grid.points() {
        let terms: Vec<T> = match support {
            Some((a, b)) => {
                // x − t ∈ [a, b]  ⇔  t ∈ [x − b, x − a]
                let i0 = pts.partition_point(|&t| t < x - b);
                let i1 = pts.partition_point(|&t| t <= x - a);
                pts[i0..i1].iter().map(|&t| phi.eval(x - t)).collect()
            }
            None => pts.iter().map(|&t| phi.eval(x - t)).collect(),
        };
        let sum = pairwise_sum(&terms);
        let tail = match support {
            Some((a, b)) => {
                let reaching = omitted.iter().filter(|&&t| x - t >= a && x - t < b).count();
                phi.sup_bound() * T::of_usize(reaching)
            }
            None if shifts.valid_window().is_some() => T::infinity(),
            None => tail_from_points(phi, &tail_pts, per_unit, x, trunc, far),
        };
        samples.push(TilingSample {
            x,
            value: phi.eval(x),
            sum,
            tail_bound: tail,
        });
    }

    let mut max_dev = T::zero();
    let mut worst = grid.start;
    let mut max_tail = T::zero();
    let mut combined = T::zero();
    for s in &samples {
        let dev = (s.sum - level).abs();
        if dev > max_dev {
            max_dev = dev;
            worst = s.x;
        }
        max_tail = max_tail.max(s.tail_bound);
        combined = combined.max(dev + s.tail_bound);
    }
    Ok(TilingReport {
        grid: *grid,
        level_target: level,
        truncation: trunc,
        shifts_used: pts.len(),
        max_abs_deviation: max_dev,
        worst_abscissa: worst,
        truncation_tail_bound: max_tail,
        combined_error: combined,
        tolerance: tol,
        verdict: combined <= tol,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityFromTiling<T: Scalar> {
    pub density: T,
    pub error_bound: T,
    pub integral: Integral<T>,
}

/// `level / ∫φ`: the density any set tiling with φ at `level` must have.
pub fn density_from_tiling<T: Scalar, F: TileFunction<T> + ?Sized>(
    phi: &F,
    level: T,
) -> Result<DensityFromTiling<T>> {
    let integral = phi.integral()?;
    if !(integral.value > integral.error_bound) {
        return Err(Error::ZeroIntegral);
    }
    let (v, e) = (integral.value, integral.error_bound);
    Ok(DensityFromTiling {
        density: level / v,
        error_bound: level.abs() * e / (v * (v - e)),
        integral,
    })
}

/// Recovers `T = ⊎ (a_j ℤ + b_j)` from sorted points of a tiling set.
///
/// A single periodic form is tried first. Otherwise progressions are
/// peeled off greedily, smallest period first, from periods that occur at
/// least twice among the point differences; each one must lie inside the
/// points and avoid the ones already covered on the central half-window.
/// Returns `None` if no cover with at most 32 progressions is found.
pub fn ap_decomposition<T: Scalar>(
    points: &[T],
    support_diam: T,
    tol: T,
) -> Result<Option<Vec<Progression<T>>>> {
    const MAX_PROGRESSIONS: usize = 32;
    if points.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            found: points.len(),
        });
    }
    let span = points[points.len() - 1] - points[0];
    if !(support_diam > T::zero()) || span < T::of(10.0) * support_diam {
        return Err(Error::InvalidParameter(format!(
            "points span {span} must be at least 10·support_diam"
        )));
    }
    if let Some(form) = detect_periodic_form(points, span / T::of(4.0), tol)? {
        return Ok(Some(
            form.offsets
                .iter()
                .map(|&o| Progression {
                    period: form.period,
                    offset: o,
                })
                .collect(),
        ));
    }

    let quarter = span / T::of(4.0);
    let (c_lo, c_hi) = (points[0] + quarter, points[0] + T::of(3.0) * quarter);
    let central: Vec<T> = points
        .iter()
        .copied()
        .filter(|&p| p >= c_lo && p <= c_hi)
        .collect();
    if central.len() < 2 {
        return Ok(None);
    }
    let half_width = (c_hi - c_lo) / T::of(2.0);

    let mut diffs = Vec::new();
    for (i, &p) in central.iter().enumerate() {
        for &q in &central[i + 1..] {
            if q - p > half_width {
                break;
            }
            diffs.push(q - p);
        }
    }
    diffs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut candidates: Vec<T> = Vec::new();
    let mut start = 0;
    for i in 1..=diffs.len() {
        if i == diffs.len() || diffs[i] - diffs[i - 1] > tol {
            if i - start >= 2 {
                candidates.push(diffs[start]);
            }
            start = i;
        }
    }

    let find = |x: T| -> Option<usize> {
        let i = central.partition_point(|&p| p < x - tol);
        (i < central.len() && central[i] <= x + tol).then_some(i)
    };
    let mut covered = vec![false; central.len()];
    let mut progressions = Vec::new();
    while let Some(first) = covered.iter().position(|c| !c) {
        if progressions.len() == MAX_PROGRESSIONS {
            return Ok(None);
        }
        let p = central[first];
        let chosen = candidates.iter().find_map(|&a| {
            let k_lo = ((c_lo - tol - p) / a).ceil().to_i64()?;
            let k_hi = ((c_hi + tol - p) / a).floor().to_i64()?;
            if k_hi - k_lo < 1 {
                return None;
            }
            let mut members = Vec::new();
            for k in k_lo..=k_hi {
                let idx = find(p + a * T::from_i64(k)?)?;
                if covered[idx] {
                    return None;
                }
                members.push(idx);
            }
            Some((a, members))
        });
        let Some((a, members)) = chosen else {
            return Ok(None);
        };
        for idx in members {
            covered[idx] = true;
        }
        progressions.push(Progression {
            period: a,
            offset: p - a * (p / a).floor(),
        });
    }
    Ok(Some(progressions))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupNormReport<T: Scalar> {
    pub time_sup: T,
    pub time_bound: T,
    pub time_holds: bool,
    pub freq_grid_max: T,
    pub freq_argmax: T,
    /// `2π ∫|x − c||g(x)|dx`, a Lipschitz constant of `|ĝ|`.
    pub freq_lipschitz: T,
    /// Grid maximum plus the Lipschitz allowance between grid points.
    pub freq_upper: T,
    pub freq_bound: T,
    pub freq_holds: bool,
    pub tolerance: T,
}

impl<T: Scalar> SupNormReport<T> {
    pub fn time_slack(&self) -> T {
        self.time_bound - self.time_sup
    }

    pub fn freq_slack(&self) -> T {
        self.freq_bound - self.freq_grid_max
    }
}

/// Checks `‖g‖∞ ≤ √D(T)` exactly and `‖ĝ‖∞ ≤ √D(S)` on `freq_grid`.
pub fn sup_norm_check<T: Scalar>(
    g: &StepWindow<T>,
    density_time: T,
    density_freq: T,
    freq_grid: &Grid<T>,
    tol: T,
) -> Result<SupNormReport<T>> {
    if !(density_time > T::zero() && density_freq > T::zero()) {
        return Err(Error::InvalidParameter("densities must be positive".into()));
    }
    let time_sup = g.sup_norm();
    let time_bound = density_time.sqrt();

    let mut freq_grid_max = T::zero();
    let mut freq_argmax = freq_grid.start;
    for xi in freq_grid.points() {
        let m = g.fourier_transform(xi).norm();
        if m > freq_grid_max {
            freq_grid_max = m;
            freq_argmax = xi;
        }
    }
    let (a, b) = g.hull();
    let centered = g.translate(-(a + b) / T::of(2.0));
    let freq_lipschitz = T::TAU() * centered.abs_first_moment();
    let freq_bound = density_freq.sqrt();
    Ok(SupNormReport {
        time_sup,
        time_bound,
        time_holds: time_sup <= time_bound + tol,
        freq_grid_max,
        freq_argmax,
        freq_lipschitz,
        freq_upper: freq_grid_max + freq_lipschitz * freq_grid.step / T::of(2.0),
        freq_bound,
        freq_holds: freq_grid_max <= freq_bound + tol,
        tolerance: tol,
    })
}
