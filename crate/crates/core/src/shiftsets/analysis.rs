//! Density, gap and periodicity analysis of shift sets on finite windows.

use serde::Serialize;

use super::ShiftSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `period·ℤ + {offsets}`, offsets sorted in `[0, period)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicForm<T: Scalar> {
    pub period: T,
    pub offsets: Vec<T>,
}

impl<T: Scalar> PeriodicForm<T> {
    /// Uniform density `n / a`.
    pub fn density(&self) -> T {
        T::of_usize(self.offsets.len()) / self.period
    }

    pub fn to_shift_set(&self) -> Result<ShiftSet<T>> {
        ShiftSet::periodic(self.period, self.offsets.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusStats<T: Scalar> {
    pub radius: T,
    pub min_density: T,
    pub max_density: T,
}

/// Sliding-window density estimate with its uniformity band.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate<T: Scalar> {
    pub estimate: T,
    /// `(max − min)/2 + max_gap / r` at the largest radius.
    pub error_band: T,
    pub max_gap: T,
    pub x_samples: usize,
    pub per_radius: Vec<RadiusStats<T>>,
}

/// Counts `#(Λ ∩ [x, x + r)) / r` for `x_samples` positions and every `r`.
///
/// Positions are spread over `[−r_max, r_max]` (or over the valid window
/// of an explicit list). Radii that do not fit inside an explicit list's
/// window are skipped.
pub fn uniform_density<T: Scalar>(
    set: &ShiftSet<T>,
    r_list: &[T],
    x_samples: usize,
) -> Result<DensityEstimate<T>> {
    if r_list.is_empty() || x_samples == 0 {
        return Err(Error::InvalidParameter(
            "density needs at least one radius and one sample position".into(),
        ));
    }
    if r_list.iter().any(|&r| !(r.is_finite() && r > T::zero())) {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    let window = set.valid_window();
    let radii: Vec<T> = match window {
        Some((lo, hi)) => r_list.iter().copied().filter(|&r| r <= hi - lo).collect(),
        None => r_list.to_vec(),
    };
    let r_max = radii
        .iter()
        .copied()
        .fold(None, |m: Option<T>, r| Some(m.map_or(r, |m| m.max(r))))
        .ok_or_else(|| {
            Error::InvalidParameter("no radius fits inside the explicit window".into())
        })?;

    let (span_lo, span_hi) = window.unwrap_or((-r_max, T::of(2.0) * r_max));
    let points = set.enumerate(span_lo, span_hi)?;
    let max_gap = if points.len() >= 2 {
        points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::zero(), T::max)
    } else {
        span_hi - span_lo
    };

    // golden-ratio phase keeps sample positions off any rational lattice
    let phase = T::of(0.381_966_011_250_105_1);
    let mut per_radius = Vec::with_capacity(radii.len());
    for &r in &radii {
        let (x_lo, x_hi) = match window {
            Some((lo, hi)) => (lo, hi - r),
            None => (-r_max, r_max),
        };
        let mut lo_d = T::infinity();
        let mut hi_d = T::neg_infinity();
        for k in 0..x_samples {
            let frac = (T::of_usize(k) + phase) / T::of_usize(x_samples);
            let x = x_lo + (x_hi - x_lo) * frac;
            let count = points.partition_point(|&p| p < x + r) - points.partition_point(|&p| p < x);
            let d = T::of_usize(count) / r;
            lo_d = lo_d.min(d);
            hi_d = hi_d.max(d);
        }
        per_radius.push(RadiusStats {
            radius: r,
            min_density: lo_d,
            max_density: hi_d,
        });
    }
    let last = per_radius
        .iter()
        .copied()
        .find(|s| s.radius == r_max)
        .expect("r_max present");
    let two = T::of(2.0);
    Ok(DensityEstimate {
        estimate: (last.min_density + last.max_density) / two,
        error_band: (last.max_density - last.min_density) / two + max_gap / r_max,
        max_gap,
        x_samples,
        per_radius,
    })
}

/// Smallest distance between successive points in `[lo, hi]`.
pub fn min_gap<T: Scalar>(set: &ShiftSet<T>, lo: T, hi: T) -> Result<T> {
    let pts = set.enumerate(lo, hi)?;
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: pts.len(),
        });
    }
    Ok(pts
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(T::infinity(), T::min))
}

/// Single-linkage clustering of values at tolerance `tol`; returns the
/// cluster means in ascending order.
pub fn cluster_values<T: Scalar>(values: &[T], tol: T) -> Vec<T> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            let cluster = &sorted[start..i];
            if !cluster.is_empty() {
                out.push(cluster.iter().copied().sum::<T>() / T::of_usize(cluster.len()));
            }
            start = i;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlcReport<T: Scalar> {
    pub verdict: bool,
    pub gap_values: Vec<T>,
    pub max_gap: T,
    pub gap_count: usize,
    pub gap_tol: T,
    pub max_distinct: usize,
}

/// Finite-local-complexity test: successive gaps are clustered at
/// `gap_tol`, and the set passes iff at most `max_distinct` clusters occur.
pub fn flc_check<T: Scalar>(
    set: &ShiftSet<T>,
    lo: T,
    hi: T,
    gap_tol: T,
    max_distinct: usize,
) -> Result<FlcReport<T>> {
    let pts = set.enumerate(lo, hi)?;
    if pts.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            found: pts.len(),
        });
    }
    let gaps: Vec<T> = pts.windows(2).map(|w| w[1] - w[0]).collect();
    let max_gap = gaps.iter().copied().fold(T::zero(), T::max);
    let gap_values = cluster_values(&gaps, gap_tol);
    Ok(FlcReport {
        verdict: gap_values.len() <= max_distinct && max_gap.is_finite(),
        gap_values,
        max_gap,
        gap_count: gaps.len(),
        gap_tol,
        max_distinct,
    })
}

/// Nonzero pairwise differences of the points in `[lo, hi]`, deduplicated.
pub fn difference_set<T: Scalar>(set: &ShiftSet<T>, lo: T, hi: T, dedup_tol: T) -> Result<Vec<T>> {
    let pts = set.enumerate(lo, hi)?;
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: pts.len(),
        });
    }
    let mut diffs = Vec::with_capacity(pts.len() * (pts.len() - 1));
    for (i, &p) in pts.iter().enumerate() {
        for &q in &pts[i + 1..] {
            let d = q - p;
            if d > dedup_tol {
                diffs.push(d);
                diffs.push(-d);
            }
        }
    }
    diffs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    diffs.dedup_by(|b, a| (*b - *a).abs() <= dedup_tol);
    Ok(diffs)
}

fn has_point_near<T: Scalar>(sorted: &[T], x: T, tol: T) -> bool {
    let i = sorted.partition_point(|&p| p < x - tol);
    i < sorted.len() && sorted[i] <= x + tol
}

/// Finds the smallest `a ≤ a_max` with `points ≈ aℤ + offsets` (within
/// `tol`) on the central half of the span.
///
/// Candidate periods are the pairwise differences among the first
/// `⌈n/4⌉` points, tried in increasing order. A candidate is accepted when
/// shifting by it maps the central points onto points both ways and the
/// regenerated set `aℤ + offsets` matches the central points.
pub fn detect_periodic_form<T: Scalar>(
    points: &[T],
    a_max: T,
    tol: T,
) -> Result<Option<PeriodicForm<T>>> {
    if points.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            found: points.len(),
        });
    }
    if points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "points must be strictly increasing".into(),
        ));
    }
    if !(a_max > T::zero() && tol >= T::zero()) {
        return Err(Error::InvalidParameter("a_max must be positive".into()));
    }
    let first = points[0];
    let span = points[points.len() - 1] - first;
    if span < T::of(4.0) * a_max {
        return Err(Error::InvalidParameter(format!(
            "points span {span} < 4·a_max = {}",
            T::of(4.0) * a_max
        )));
    }
    let quarter = span / T::of(4.0);
    let (c_lo, c_hi) = (first + quarter, first + T::of(3.0) * quarter);
    let c_start = points.partition_point(|&p| p < c_lo);
    let c_end = points.partition_point(|&p| p <= c_hi);
    let central = &points[c_start..c_end];
    if central.is_empty() {
        return Ok(None);
    }

    let head = &points[..points.len().div_ceil(4)];
    let mut candidates = Vec::new();
    for (i, &p) in head.iter().enumerate() {
        for &q in &head[i + 1..] {
            let d = q - p;
            if d > tol && d <= a_max + tol {
                candidates.push(d);
            }
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    candidates.dedup_by(|b, a| *b - *a <= tol);

    Ok(candidates
        .into_iter()
        .find_map(|a| fit_period(points, central, (c_lo, c_hi), a, tol)))
}

fn fit_period<T: Scalar>(
    points: &[T],
    central: &[T],
    (c_lo, c_hi): (T, T),
    a: T,
    tol: T,
) -> Option<PeriodicForm<T>> {
    // shift invariance inside the central window, both directions
    for &p in central {
        if p + a <= c_hi - tol && !has_point_near(points, p + a, tol) {
            return None;
        }
        if p - a >= c_lo + tol && !has_point_near(points, p - a, tol) {
            return None;
        }
    }

    // refine the period on the longest same-class chain in the window
    let p0 = central[0];
    let mut period = a;
    if let Some(&q) = central.iter().rev().find(|&&q| {
        let k = ((q - p0) / a).round();
        k >= T::one() && ((q - p0) - k * a).abs() <= tol
    }) {
        period = (q - p0) / ((q - p0) / a).round();
    }

    let mut residues: Vec<T> = central
        .iter()
        .take_while(|&&p| p < p0 + period - tol)
        .map(|&p| {
            let r = p - period * (p / period).floor();
            if r >= period - tol || r < T::zero() {
                T::zero()
            } else {
                r
            }
        })
        .collect();
    residues.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    residues.dedup_by(|b, a| *b - *a <= tol);
    if residues.is_empty() {
        return None;
    }
    let form = PeriodicForm {
        period,
        offsets: residues,
    };

    // regenerate and compare on the interior of the central window
    let regenerated = form.to_shift_set().ok()?.enumerate(c_lo, c_hi).ok()?;
    let (in_lo, in_hi) = (c_lo + tol, c_hi - tol);
    let inner = |p: &T| *p >= in_lo && *p <= in_hi;
    let all_generated_present = regenerated
        .iter()
        .filter(|p| inner(p))
        .all(|&p| has_point_near(central, p, tol));
    let all_points_generated = central
        .iter()
        .filter(|p| inner(p))
        .all(|&p| has_point_near(&regenerated, p, tol));
    (all_generated_present && all_points_generated).then_some(form)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureConfig<T: Scalar> {
    pub interval: (T, T),
    pub radii: Vec<T>,
    pub x_samples: usize,
    pub gap_tol: T,
    pub max_distinct: usize,
    pub a_max: T,
    pub period_tol: T,
}

impl<T: Scalar> StructureConfig<T> {
    /// Window `[−half_width, half_width]` with the module's default
    /// tolerances.
    pub fn centered(half_width: T) -> Self {
        Self {
            interval: (-half_width, half_width),
            radii: vec![half_width / T::of(4.0), half_width / T::of(2.0), half_width],
            x_samples: 64,
            gap_tol: T::of(1e-9).max(T::dedup_tol()),
            max_distinct: 32,
            a_max: half_width / T::of(2.0),
            period_tol: T::of(1e-9).max(T::dedup_tol()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport<T: Scalar> {
    pub interval: (T, T),
    pub density_estimate: T,
    pub density_error_band: T,
    pub delta_min_gap: T,
    pub gap_values: Vec<T>,
    pub flc_verdict: bool,
    pub detected_period: Option<PeriodicForm<T>>,
}

pub fn structure_report<T: Scalar>(
    set: &ShiftSet<T>,
    config: &StructureConfig<T>,
) -> Result<StructureReport<T>> {
    let (lo, hi) = config.interval;
    let density = uniform_density(set, &config.radii, config.x_samples)?;
    let flc = flc_check(set, lo, hi, config.gap_tol, config.max_distinct)?;
    let points = set.enumerate(lo, hi)?;
    let a_max = config
        .a_max
        .min((points[points.len() - 1] - points[0]) / T::of(4.0));
    let detected = detect_periodic_form(&points, a_max, config.period_tol)?;
    Ok(StructureReport {
        interval: config.interval,
        density_estimate: density.estimate,
        density_error_band: density.error_band,
        delta_min_gap: min_gap(set, lo, hi)?,
        gap_values: flc.gap_values,
        flc_verdict: flc.verdict,
        detected_period: detected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiftsets::Perturbation;

    fn two_offsets() -> ShiftSet<f64> {
        ShiftSet::periodic(2.0, vec![0.0, 0.5]).unwrap()
    }

    #[test]
    fn density_of_lattices() {
        let z = uniform_density(&ShiftSet::<f64>::integers(), &[100.0], 32).unwrap();
        assert!((z.estimate - 1.0).abs() < 1e-12 && z.error_band <= 0.02);
        let two = uniform_density(&two_offsets(), &[100.0], 32).unwrap();
        assert!((two.estimate - 1.0).abs() <= two.error_band && two.error_band <= 0.04);
        let even = uniform_density(&ShiftSet::<f64>::lattice(2.0).unwrap(), &[100.0], 32).unwrap();
        assert!((even.estimate - 0.5).abs() <= even.error_band && even.error_band <= 0.02);
    }

    #[test]
    fn density_band_shrinks_with_radius() {
        let s = ShiftSet::<f64>::periodic(3.0, vec![0.0, 0.4, 1.7]).unwrap();
        let small = uniform_density(&s, &[10.0], 50).unwrap();
        let large = uniform_density(&s, &[1000.0], 50).unwrap();
        assert!(large.error_band < small.error_band);
        assert!((large.estimate - 1.0).abs() <= large.error_band);
    }

    #[test]
    fn density_of_explicit_list_stays_inside_window() {
        let pts: Vec<f64> = (0..=100).map(f64::from).collect();
        let s = ShiftSet::explicit(pts, (0.0, 100.0)).unwrap();
        let d = uniform_density(&s, &[50.0, 500.0], 16).unwrap();
        assert_eq!(d.per_radius.len(), 1);
        assert!((d.estimate - 1.0).abs() < 0.03);
        assert!(uniform_density(&s, &[500.0], 16).is_err());
    }

    #[test]
    fn min_gap_examples() {
        assert_eq!(min_gap(&two_offsets(), 0.0, 10.0).unwrap(), 0.5);
        assert_eq!(
            min_gap(&ShiftSet::<f64>::integers(), 0.0, 10.0).unwrap(),
            1.0
        );
        let s = ShiftSet::<f64>::explicit(vec![0.0, 0.1, 5.0], (0.0, 5.0)).unwrap();
        assert!((min_gap(&s, 0.0, 5.0).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(
            min_gap(&s, 1.0, 4.0),
            Err(Error::TooFewPoints {
                needed: 2,
                found: 0
            })
        );
    }

    #[test]
    fn flc_examples() {
        let r = flc_check(&two_offsets(), -50.0, 50.0, 1e-9, 32).unwrap();
        assert!(r.verdict);
        assert_eq!(r.gap_values, vec![0.5, 1.5]);
        let z = flc_check(&ShiftSet::<f64>::integers(), -3.0, 7.0, 1e-9, 1).unwrap();
        assert!(z.verdict);
        assert_eq!(z.gap_values, vec![1.0]);
        assert!(flc_check(&ShiftSet::<f64>::integers(), 0.0, 1.0, 1e-9, 1).is_err());
    }

    #[test]
    fn cluster_values_merges_within_tolerance() {
        let c = cluster_values::<f64>(&[1.0, 3.0, 1.0 + 1e-12, 2.0, 3.0 - 1e-12], 1e-9);
        assert_eq!(c.len(), 3);
        assert!((c[0] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn difference_set_examples() {
        let z = difference_set(&ShiftSet::<f64>::integers(), 0.0, 3.0, 1e-12).unwrap();
        assert_eq!(z, vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]);
        let d = difference_set(&two_offsets(), 0.0, 2.5, 1e-12).unwrap();
        assert_eq!(d, vec![-2.5, -2.0, -1.5, -0.5, 0.5, 1.5, 2.0, 2.5]);
        assert!(difference_set(&ShiftSet::<f64>::integers(), 0.0, 0.5, 1e-12).is_err());
    }

    #[test]
    fn detects_periodic_generators() {
        let pts = two_offsets().enumerate(-20.0, 20.0).unwrap();
        let form = detect_periodic_form(&pts, 4.0, 1e-9).unwrap().unwrap();
        assert_eq!(form.period, 2.0);
        assert_eq!(form.offsets, vec![0.0, 0.5]);

        let z = ShiftSet::<f64>::integers().enumerate(-20.0, 20.0).unwrap();
        let form = detect_periodic_form(&z, 4.0, 1e-9).unwrap().unwrap();
        assert_eq!((form.period, form.offsets), (1.0, vec![0.0]));
    }

    #[test]
    fn offsets_are_normalized_into_the_period() {
        let s = ShiftSet::periodic(1.5, vec![0.2, 1.1]).unwrap();
        let pts: Vec<f64> = s
            .enumerate(-30.0, 30.0)
            .unwrap()
            .into_iter()
            .map(|p| p + 3.0)
            .collect();
        let form = detect_periodic_form(&pts, 5.0, 1e-9).unwrap().unwrap();
        assert!((form.period - 1.5).abs() < 1e-12);
        assert_eq!(form.offsets.len(), 2);
        assert!((form.offsets[0] - 0.2).abs() < 1e-9 && (form.offsets[1] - 1.1).abs() < 1e-9);
    }

    #[test]
    fn jittered_points_have_no_period() {
        let jittered = ShiftSet::perturbed(
            ShiftSet::perturbed(
                ShiftSet::integers(),
                Perturbation::Alternating {
                    amplitude: 0.3,
                    spacing: 1.0,
                },
            )
            .unwrap(),
            Perturbation::Jitter {
                amplitude: 0.2,
                seed: 11,
            },
        )
        .unwrap();
        let pts = jittered.enumerate(-20.0, 20.0).unwrap();
        assert_eq!(detect_periodic_form(&pts, 4.0, 1e-6).unwrap(), None);
    }

    #[test]
    fn detection_rejects_short_spans() {
        let pts = [0.0, 1.0, 2.0, 3.0];
        assert!(detect_periodic_form(&pts, 1.0, 1e-9).is_err());
        assert!(detect_periodic_form(&pts[..3], 0.1, 1e-9).is_err());
    }

    #[test]
    fn structure_report_of_two_offsets() {
        let rep = structure_report(&two_offsets(), &StructureConfig::centered(40.0)).unwrap();
        assert!(rep.flc_verdict);
        assert_eq!(rep.delta_min_gap, 0.5);
        assert_eq!(rep.gap_values, vec![0.5, 1.5]);
        assert_eq!(rep.detected_period.unwrap().period, 2.0);
        assert!((rep.density_estimate - 1.0).abs() <= rep.density_error_band);
    }
}
