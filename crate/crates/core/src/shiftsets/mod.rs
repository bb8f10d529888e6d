//! Countable point sets on the real line used as time or frequency shifts.
//!
//! Sets are kept symbolic and only materialized on bounded windows via
//! [`ShiftSet::enumerate`].

mod analysis;

pub use analysis::{
    cluster_values, detect_periodic_form, difference_set, flc_check, min_gap, structure_report,
    uniform_density, DensityEstimate, FlcReport, PeriodicForm, RadiusStats, StructureConfig,
    StructureReport,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Refuse to materialize more points than this in one call.
pub const MAX_ENUMERATED_POINTS: usize = 20_000_000;

/// The progression `period·ℤ + offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Progression<T: Scalar> {
    pub period: T,
    pub offset: T,
}

/// Deterministic displacement applied to every point of a base set.
#[derive(Clone, Debug, PartialEq)]
pub enum Perturbation<T: Scalar> {
    /// `p ↦ p + amplitude·(−1)^{round(p / spacing)}`.
    Alternating { amplitude: T, spacing: T },
    /// `p ↦ p + amplitude·u(p)` with `u(p)` uniform on `[−1, 1]`, seeded by
    /// `seed` and the position of `p`.
    Jitter { amplitude: T, seed: u64 },
    /// `p ↦ p + scale / (|p| + shift)`.
    Decay { scale: T, shift: T },
}

impl<T: Scalar> Perturbation<T> {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Perturbation::Alternating { amplitude, spacing } => {
                amplitude.is_finite() && spacing.is_finite() && spacing > T::zero()
            }
            Perturbation::Jitter { amplitude, .. } => amplitude.is_finite(),
            Perturbation::Decay { scale, shift } => {
                scale.is_finite() && shift.is_finite() && shift > T::zero()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidShiftSet(format!("bad perturbation {self:?}")))
        }
    }

    /// Upper bound on `|displacement|`.
    pub fn max_displacement(&self) -> T {
        match *self {
            Perturbation::Alternating { amplitude, .. } => amplitude.abs(),
            Perturbation::Jitter { amplitude, .. } => amplitude.abs(),
            Perturbation::Decay { scale, shift } => scale.abs() / shift,
        }
    }

    pub fn apply(&self, p: T) -> T {
        match *self {
            Perturbation::Alternating { amplitude, spacing } => {
                let k = (p / spacing).round().to_i64().unwrap_or(0);
                if k.rem_euclid(2) == 0 {
                    p + amplitude
                } else {
                    p - amplitude
                }
            }
            Perturbation::Jitter { amplitude, seed } => {
                // key on the position at micro-resolution so that the
                // displacement does not depend on the enumeration window
                let key = (p * T::of(1e6)).round().to_i64().unwrap_or(0) as u64;
                let mut rng =
                    ChaCha8Rng::seed_from_u64(seed ^ key.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let u: f64 = rng.gen_range(-1.0..=1.0);
                p + amplitude * T::of(u)
            }
            Perturbation::Decay { scale, shift } => p + scale / (p.abs() + shift),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ShiftSet<T: Scalar> {
    /// `period·ℤ + {offsets}` with distinct offsets in `[0, period)`.
    Periodic { period: T, offsets: Vec<T> },
    /// Disjoint union of arithmetic progressions.
    UnionOfAps(Vec<Progression<T>>),
    /// Finite list, only meaningful inside `window`.
    Explicit { points: Vec<T>, window: (T, T) },
    Perturbed {
        base: Box<ShiftSet<T>>,
        rule: Perturbation<T>,
    },
}

impl<T: Scalar> ShiftSet<T> {
    pub fn periodic(period: T, mut offsets: Vec<T>) -> Result<Self> {
        if !(period.is_finite() && period > T::zero()) {
            return Err(Error::InvalidShiftSet(format!(
                "period must be positive, got {period}"
            )));
        }
        if offsets.is_empty() {
            return Err(Error::InvalidShiftSet(
                "periodic set needs an offset".into(),
            ));
        }
        if let Some(o) = offsets
            .iter()
            .find(|o| !(o.is_finite() && **o >= T::zero() && **o < period))
        {
            return Err(Error::InvalidShiftSet(format!(
                "offset {o} outside [0, {period})"
            )));
        }
        offsets.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        if offsets.windows(2).any(|w| w[1] - w[0] <= T::dedup_tol()) {
            return Err(Error::InvalidShiftSet("offsets must be distinct".into()));
        }
        Ok(ShiftSet::Periodic { period, offsets })
    }

    /// `period·ℤ`.
    pub fn lattice(period: T) -> Result<Self> {
        Self::periodic(period, vec![T::zero()])
    }

    pub fn integers() -> Self {
        ShiftSet::Periodic {
            period: T::one(),
            offsets: vec![T::zero()],
        }
    }

    pub fn union_of_aps(progressions: Vec<Progression<T>>) -> Result<Self> {
        if progressions.is_empty() {
            return Err(Error::InvalidShiftSet("no progressions given".into()));
        }
        if progressions
            .iter()
            .any(|p| !(p.period.is_finite() && p.period > T::zero() && p.offset.is_finite()))
        {
            return Err(Error::InvalidShiftSet(
                "progression periods must be positive and finite".into(),
            ));
        }
        Ok(ShiftSet::UnionOfAps(progressions))
    }

    pub fn explicit(points: Vec<T>, window: (T, T)) -> Result<Self> {
        if !(window.0.is_finite() && window.1.is_finite() && window.0 <= window.1) {
            return Err(Error::InvalidShiftSet(
                "explicit window must be [lo, hi]".into(),
            ));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidShiftSet("non-finite point".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidShiftSet(
                "explicit points must be strictly increasing".into(),
            ));
        }
        if points.iter().any(|&p| p < window.0 || p > window.1) {
            return Err(Error::InvalidShiftSet(
                "explicit points must lie in the declared window".into(),
            ));
        }
        Ok(ShiftSet::Explicit { points, window })
    }

    pub fn perturbed(base: ShiftSet<T>, rule: Perturbation<T>) -> Result<Self> {
        rule.validate()?;
        Ok(ShiftSet::Perturbed {
            base: Box::new(base),
            rule,
        })
    }

    /// Interval on which the set is known, `None` when it is all of ℝ.
    pub fn valid_window(&self) -> Option<(T, T)> {
        match self {
            ShiftSet::Explicit { window, .. } => Some(*window),
            ShiftSet::Perturbed { base, rule } => base.valid_window().map(|(lo, hi)| {
                let m = rule.max_displacement();
                (lo + m, hi - m)
            }),
            _ => None,
        }
    }

    /// Exact periodic structure, when the generator carries one.
    pub fn periodic_form(&self) -> Option<PeriodicForm<T>> {
        match self {
            ShiftSet::Periodic { period, offsets } => Some(PeriodicForm {
                period: *period,
                offsets: offsets.clone(),
            }),
            _ => None,
        }
    }

    /// Points in `[lo, hi]`, sorted, with near-duplicates (1e−12) collapsed.
    pub fn enumerate(&self, lo: T, hi: T) -> Result<Vec<T>> {
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(Error::InvalidParameter(format!(
                "enumeration interval [{lo}, {hi}] is not a finite interval"
            )));
        }
        if let Some((vlo, vhi)) = self.valid_window() {
            let slack = T::dedup_tol();
            if lo < vlo - slack || hi > vhi + slack {
                return Err(Error::OutsideValidWindow {
                    lo: lo.to_f64_lossy(),
                    hi: hi.to_f64_lossy(),
                    valid_lo: vlo.to_f64_lossy(),
                    valid_hi: vhi.to_f64_lossy(),
                });
            }
        }
        let mut pts = self.raw_points(lo, hi)?;
        let tol = T::dedup_tol();
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        pts.dedup_by(|b, a| (*b - *a).abs() <= tol);
        Ok(pts)
    }

    fn raw_points(&self, lo: T, hi: T) -> Result<Vec<T>> {
        let tol = T::dedup_tol();
        match self {
            ShiftSet::Periodic { period, offsets } => {
                let mut out = Vec::new();
                for &o in offsets {
                    progression_points(*period, o, lo, hi, tol, &mut out)?;
                }
                Ok(out)
            }
            ShiftSet::UnionOfAps(progs) => {
                let mut tagged: Vec<(T, usize)> = Vec::new();
                for (idx, prog) in progs.iter().enumerate() {
                    let mut pts = Vec::new();
                    progression_points(prog.period, prog.offset, lo, hi, tol, &mut pts)?;
                    tagged.extend(pts.into_iter().map(|p| (p, idx)));
                }
                tagged.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
                if let Some(w) = tagged
                    .windows(2)
                    .find(|w| w[0].1 != w[1].1 && (w[1].0 - w[0].0).abs() <= tol)
                {
                    return Err(Error::InvalidShiftSet(format!(
                        "progressions {} and {} share the point {}",
                        w[0].1, w[1].1, w[0].0
                    )));
                }
                Ok(tagged.into_iter().map(|(p, _)| p).collect())
            }
            ShiftSet::Explicit { points, .. } => {
                let start = points.partition_point(|&p| p < lo - tol);
                let end = points.partition_point(|&p| p <= hi + tol);
                Ok(points[start..end].to_vec())
            }
            ShiftSet::Perturbed { base, rule } => {
                let m = rule.max_displacement();
                let (mut blo, mut bhi) = (lo - m, hi + m);
                if let Some((vlo, vhi)) = base.valid_window() {
                    blo = blo.max(vlo);
                    bhi = bhi.min(vhi);
                }
                Ok(base
                    .enumerate(blo, bhi)?
                    .into_iter()
                    .map(|p| rule.apply(p))
                    .filter(|&p| p >= lo - tol && p <= hi + tol)
                    .collect())
            }
        }
    }
}

fn progression_points<T: Scalar>(
    period: T,
    offset: T,
    lo: T,
    hi: T,
    tol: T,
    out: &mut Vec<T>,
) -> Result<()> {
    let k_lo = ((lo - tol - offset) / period).ceil();
    let k_hi = ((hi + tol - offset) / period).floor();
    if k_hi < k_lo {
        return Ok(());
    }
    let count = (k_hi - k_lo).to_f64_lossy() + 1.0;
    if count > MAX_ENUMERATED_POINTS as f64 {
        return Err(Error::InvalidParameter(format!(
            "enumeration would produce {count} points"
        )));
    }
    let k0 = k_lo.to_i64().expect("bounded index");
    let k1 = k_hi.to_i64().expect("bounded index");
    out.extend((k0..=k1).map(|k| offset + period * T::from_i64(k).expect("index")));
    Ok(())
}
