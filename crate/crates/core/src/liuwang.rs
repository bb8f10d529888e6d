//! Checks for windows of the form `|g| = (mes Ω)^{-1/2} 1_Ω`: tiling pairs
//! `(Ω, T)`, spectral pairs `(Ω, S)`, the zero-set criterion on `S − S`,
//! and the structure of nonnegative orthonormal windows.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gabor::{adaptive_parseval_defect, GaborSystem, ParsevalReport};
use crate::scalar::Scalar;
use crate::shiftsets::{difference_set, uniform_density, ShiftSet};
use crate::tiling::{tiling_sum, Grid};
use crate::windows::{StepWindow, SupportSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Tiling,
    Spectral,
    ZeroSet,
}

/// An argument where a check fails, with the offending value there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness<T: Scalar> {
    pub at: T,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubCheck<T: Scalar> {
    pub name: &'static str,
    pub verdict: bool,
    pub violation: T,
    pub tolerance: T,
}

impl<T: Scalar> SubCheck<T> {
    fn new(name: &'static str, violation: T, tolerance: T) -> Self {
        Self {
            name,
            verdict: violation <= tolerance,
            violation,
            tolerance,
        }
    }
}

/// `verdict ⇔ max_violation ≤ tolerance`.
///
/// Tiling and zero-set reports carry absolute violations. A spectral
/// report aggregates checks with different tolerances, so its
/// `max_violation` is the largest `violation / tolerance` among `checks`
/// and its `tolerance` is 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport<T: Scalar> {
    pub kind: PairKind,
    pub verdict: bool,
    pub max_violation: T,
    pub tolerance: T,
    pub witnesses: Vec<Witness<T>>,
    pub checks: Vec<SubCheck<T>>,
}

/// Does `1_Ω` tile at level 1 along `T`? Every grid point whose sum
/// misses 1 by more than `tol` is a witness.
pub fn tiling_pair_check<T: Scalar>(
    omega: &SupportSet<T>,
    shifts: &ShiftSet<T>,
    grid: &Grid<T>,
    trunc: T,
    tol: T,
) -> Result<PairReport<T>> {
    let rep = tiling_sum(
        &omega.indicator(T::one()),
        shifts,
        grid,
        trunc,
        T::one(),
        tol,
    )?;
    let witnesses = rep
        .violations(tol)
        .map(|s| Witness {
            at: s.x,
            value: s.sum,
        })
        .collect();
    let check = SubCheck::new("tiling", rep.combined_error, tol);
    Ok(PairReport {
        kind: PairKind::Tiling,
        verdict: check.verdict,
        max_violation: rep.combined_error,
        tolerance: tol,
        witnesses,
        checks: vec![check],
    })
}

/// Largest `|φ̂(d)|` over `diffs`, with every `d` above `tol` as a witness.
fn zero_set_scan<T: Scalar>(phi: &StepWindow<T>, diffs: &[T], tol: T) -> (T, Vec<Witness<T>>) {
    let mut max = T::zero();
    let mut witnesses = Vec::new();
    for &d in diffs {
        let m = phi.fourier_transform(d).norm();
        max = max.max(m);
        if m > tol {
            witnesses.push(Witness { at: d, value: m });
        }
    }
    (max, witnesses)
}

/// Is `(S − S) \ {0}` inside the zero set of the transform of `|g|²`?
/// Differences are taken over `S ∩ [−trunc, trunc]`.
pub fn difference_zero_set_check<T: Scalar>(
    g: &StepWindow<T>,
    freq_set: &ShiftSet<T>,
    trunc: T,
    tol: T,
) -> Result<PairReport<T>> {
    if g.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let diffs = difference_set(freq_set, -trunc, trunc, T::dedup_tol())?;
    let (max, witnesses) = zero_set_scan(&g.square_modulus(), &diffs, tol);
    let check = SubCheck::new("zero_set", max, tol);
    Ok(PairReport {
        kind: PairKind::ZeroSet,
        verdict: check.verdict,
        max_violation: max,
        tolerance: tol,
        witnesses,
        checks: vec![check],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralConfig<T: Scalar> {
    /// Differences are taken over `Λ ∩ [−trunc, trunc]`.
    pub trunc: T,
    pub orthogonality_tol: T,
    pub density_radius: T,
    pub density_tol: T,
    /// Test functions are dyadic indicators no wider than the shortest
    /// interval of `Ω` divided by this.
    pub refinement: u32,
    pub completeness_tol: T,
    pub start_trunc_freq: T,
    pub max_trunc_freq: T,
    pub defect_change_tol: T,
}

impl<T: Scalar> Default for SpectralConfig<T> {
    fn default() -> Self {
        Self {
            trunc: T::of(6.0),
            orthogonality_tol: T::exact_tol(),
            density_radius: T::of(200.0),
            density_tol: T::of(0.02),
            refinement: 64,
            completeness_tol: T::of(0.02),
            start_trunc_freq: T::of(8.0),
            max_trunc_freq: T::of(1024.0),
            defect_change_tol: T::of(1e-4),
        }
    }
}

/// Unit-norm indicators of dyadic pieces of each interval of `Ω`, down to
/// width `shortest / refinement`, followed by the normalized `1_Ω`.
pub fn refined_test_family<T: Scalar>(
    omega: &SupportSet<T>,
    refinement: u32,
) -> Result<Vec<StepWindow<T>>> {
    if refinement == 0 {
        return Err(Error::InvalidParameter(
            "refinement must be positive".into(),
        ));
    }
    let target = omega.shortest_interval() / T::of(f64::from(refinement));
    let mut out = Vec::new();
    for &(a, b) in omega.intervals() {
        let mut pieces = 1usize;
        loop {
            let width = (b - a) / T::of_usize(pieces);
            for k in 0..pieces {
                let lo = a + width * T::of_usize(k);
                let hi = if k + 1 == pieces { b } else { lo + width };
                out.push(StepWindow::indicator(lo, hi)?.scale_real(T::one() / (hi - lo).sqrt()));
            }
            if width <= target * T::of(1.0 + 1e-9) {
                break;
            }
            pieces *= 2;
        }
    }
    out.push(omega.indicator(T::one() / omega.measure().sqrt()));
    Ok(out)
}

/// Orthogonality, density normalization and completeness of
/// `{ e^{2πiλx} 1_Ω / √mes Ω : λ ∈ Λ }`.
///
/// Orthogonality is the zero-set scan of `|1_Ω / √mes Ω|²` over `Λ − Λ`; an
/// orthogonal basis of `L²(Ω)` has `D(Λ) = mes Ω`.
/// Completeness runs the Parseval defect of every function in
/// [`refined_test_family`]; each must lie in `[−tol, tail + tol]`, where
/// `tail` bounds the mass beyond the final frequency truncation.
pub fn spectral_pair_check<T: Scalar>(
    omega: &SupportSet<T>,
    lambda: &ShiftSet<T>,
    config: &SpectralConfig<T>,
) -> Result<PairReport<T>> {
    let mes = omega.measure();
    let diffs = difference_set(lambda, -config.trunc, config.trunc, T::dedup_tol())?;
    let normalized = omega.indicator(T::one() / mes.sqrt());
    let (ortho, witnesses) = zero_set_scan(
        &normalized.square_modulus(),
        &diffs,
        config.orthogonality_tol,
    );
    let orthogonality = SubCheck::new("orthogonality", ortho, config.orthogonality_tol);

    let r = config.density_radius;
    let density = uniform_density(lambda, &[r / T::of(4.0), r / T::of(2.0), r], 64)?;
    let normalization = SubCheck::new(
        "density_normalization",
        (density.estimate / mes - T::one()).abs(),
        config.density_tol,
    );

    let defects = completeness_defects(omega, lambda, config)?;
    let excess = defects
        .iter()
        .map(|p| (-p.defect).max(p.defect - p.tail_bound).max(T::zero()))
        .fold(T::zero(), T::max);
    let completeness = SubCheck::new("completeness", excess, config.completeness_tol);

    let checks = vec![orthogonality, normalization, completeness];
    let max_violation = checks
        .iter()
        .map(|c| c.violation / c.tolerance)
        .fold(T::zero(), T::max);
    Ok(PairReport {
        kind: PairKind::Spectral,
        verdict: max_violation <= T::one(),
        max_violation,
        tolerance: T::one(),
        witnesses,
        checks,
    })
}

fn completeness_defects<T: Scalar>(
    omega: &SupportSet<T>,
    lambda: &ShiftSet<T>,
    config: &SpectralConfig<T>,
) -> Result<Vec<ParsevalReport<T>>> {
    // a single time shift at 0; the explicit window only has to cover the
    // shifts that could meet a function supported in the hull of Ω
    let reach = T::of(2.0) * omega.diameter() + T::one();
    let window = omega.indicator(T::one() / omega.measure().sqrt());
    let sys = GaborSystem::new(
        window,
        ShiftSet::explicit(vec![T::zero()], (-reach, reach))?,
        lambda.clone(),
        reach - T::of(0.5),
        config.start_trunc_freq,
    )?;
    refined_test_family(omega, config.refinement)?
        .iter()
        .map(|f| adaptive_parseval_defect(&sys, f, config.defect_change_tol, config.max_trunc_freq))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiuWangConfig<T: Scalar> {
    pub modulus_tol: T,
    /// Shifts of `T` are enumerated on `[−trunc_time, trunc_time]`; the
    /// tiling grid covers the middle half of that window.
    pub trunc_time: T,
    pub grid_step: T,
    pub tiling_tol: T,
    pub spectral: SpectralConfig<T>,
}

impl<T: Scalar> Default for LiuWangConfig<T> {
    fn default() -> Self {
        Self {
            modulus_tol: T::exact_tol(),
            trunc_time: T::of(6.0),
            grid_step: T::of(1.0 / 128.0),
            tiling_tol: T::zero(),
            spectral: SpectralConfig::default(),
        }
    }
}

/// A piece `[start, end)` of the window whose modulus is off target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModulusWitness<T: Scalar> {
    pub start: T,
    pub end: T,
    pub modulus: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusCheck<T: Scalar> {
    pub verdict: bool,
    /// `(mes Ω)^{-1/2}`.
    pub target: T,
    pub max_violation: T,
    pub tolerance: T,
    pub witnesses: Vec<ModulusWitness<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiuWangReport<T: Scalar> {
    pub config: LiuWangConfig<T>,
    pub support: Vec<(T, T)>,
    pub measure: T,
    pub modulus: ModulusCheck<T>,
    pub tiling: PairReport<T>,
    pub spectral: PairReport<T>,
    pub verdict: bool,
}

fn tiling_grid<T: Scalar>(trunc: T, step: T) -> Result<Grid<T>> {
    let half = trunc / T::of(2.0);
    Grid::half_open(-half, half, step)
}

/// Checks `|g| = (mes Ω)^{-1/2} 1_Ω`, that `(Ω, T)` is a tiling pair and
/// that `(Ω, S)` is a spectral pair, with `Ω` the support of `g`.
pub fn liu_wang_conditions<T: Scalar>(
    g: &StepWindow<T>,
    time_set: &ShiftSet<T>,
    freq_set: &ShiftSet<T>,
    config: &LiuWangConfig<T>,
) -> Result<LiuWangReport<T>> {
    let omega = g.support(T::zero())?;
    let measure = omega.measure();
    let target = T::one() / measure.sqrt();

    let mut max_violation = T::zero();
    let mut witnesses = Vec::new();
    for piece in g.pieces().filter(|p| p.value.norm() > T::zero()) {
        let modulus = piece.value.norm();
        let v = (modulus - target).abs();
        max_violation = max_violation.max(v);
        if v > config.modulus_tol {
            witnesses.push(ModulusWitness {
                start: piece.start,
                end: piece.end,
                modulus,
            });
        }
    }
    let modulus = ModulusCheck {
        verdict: max_violation <= config.modulus_tol,
        target,
        max_violation,
        tolerance: config.modulus_tol,
        witnesses,
    };

    let grid = tiling_grid(config.trunc_time, config.grid_step)?;
    let tiling = tiling_pair_check(
        &omega,
        time_set,
        &grid,
        config.trunc_time,
        config.tiling_tol,
    )?;
    let spectral = spectral_pair_check(&omega, freq_set, &config.spectral)?;
    Ok(LiuWangReport {
        config: config.clone(),
        support: omega.intervals().to_vec(),
        measure,
        verdict: modulus.verdict && tiling.verdict && spectral.verdict,
        modulus,
        tiling,
        spectral,
    })
}

/// `Ω ∩ (Ω + delta)` for a difference `delta ∈ T − T`, when it has
/// positive length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapWitness<T: Scalar> {
    pub delta: T,
    pub overlap: Vec<(T, T)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonnegativeReport<T: Scalar> {
    pub config: LiuWangConfig<T>,
    pub support: Vec<(T, T)>,
    pub measure: T,
    pub disjoint: bool,
    pub overlaps: Vec<OverlapWitness<T>>,
    /// Density estimate of `T` and its uniformity band.
    pub density_t: T,
    pub density_band: T,
    /// `max |g(x)|² − D(T)` over the pieces of `Ω`.
    pub value_violation: T,
    pub value_holds: bool,
    /// `D(T) · mes Ω`.
    pub density_product: T,
    pub product_holds: bool,
    pub spectral: PairReport<T>,
    pub verdict: bool,
}

/// Structure of an orthonormal system with a nonnegative window: the
/// translates `Ω + t` are disjoint, `g² = D(T)` on `Ω`, `D(T)·mes Ω = 1`
/// and `(Ω, S)` is a spectral pair.
///
/// Disjointness is checked exactly: every positive difference `δ` of
/// `T ∩ [−trunc_time, trunc_time]` below the diameter of `Ω` must leave
/// `Ω ∩ (Ω + δ)` of zero length. The density conditions use the
/// spectral config's radius and tolerance.
pub fn nonnegative_structure<T: Scalar>(
    g: &StepWindow<T>,
    time_set: &ShiftSet<T>,
    freq_set: &ShiftSet<T>,
    config: &LiuWangConfig<T>,
) -> Result<NonnegativeReport<T>> {
    if let Some(v) = g
        .values()
        .iter()
        .find(|v| v.im != T::zero() || v.re < T::zero())
    {
        return Err(Error::NotNonnegative(format!(
            "window value {v} is not a nonnegative real"
        )));
    }
    let omega = g.support(T::zero())?;
    let measure = omega.measure();
    let diam = omega.diameter();

    let diffs = difference_set(
        time_set,
        -config.trunc_time,
        config.trunc_time,
        T::dedup_tol(),
    )?;
    let overlaps: Vec<OverlapWitness<T>> = diffs
        .into_iter()
        .filter(|&d| d > T::zero() && d < diam)
        .filter_map(|delta| {
            let overlap = omega.intersection(&omega.translate(delta));
            (!overlap.is_empty()).then_some(OverlapWitness { delta, overlap })
        })
        .collect();

    let sc = &config.spectral;
    let r = sc.density_radius;
    let density = uniform_density(time_set, &[r / T::of(4.0), r / T::of(2.0), r], 64)?;
    let d = density.estimate;
    let value_violation = g
        .pieces()
        .filter(|p| p.value.re > T::zero())
        .map(|p| (p.value.re * p.value.re - d).abs())
        .fold(T::zero(), T::max);
    let density_product = d * measure;
    let spectral = spectral_pair_check(&omega, freq_set, sc)?;

    let disjoint = overlaps.is_empty();
    let value_holds = value_violation <= sc.density_tol;
    let product_holds = (density_product - T::one()).abs() <= sc.density_tol;
    Ok(NonnegativeReport {
        config: config.clone(),
        support: omega.intervals().to_vec(),
        measure,
        disjoint,
        overlaps,
        density_t: d,
        density_band: density.error_band,
        value_violation,
        value_holds,
        density_product,
        product_holds,
        verdict: disjoint && value_holds && product_holds && spectral.verdict,
        spectral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn unit() -> StepWindow<f64> {
        StepWindow::indicator(0.0, 1.0).unwrap()
    }

    fn two_intervals() -> SupportSet<f64> {
        SupportSet::new(vec![(0.0, 0.5), (1.0, 1.5)]).unwrap()
    }

    fn two_offsets() -> ShiftSet<f64> {
        ShiftSet::periodic(2.0, vec![0.0, 0.5]).unwrap()
    }

    fn grid() -> Grid<f64> {
        Grid::half_open(-3.0, 3.0, 1.0 / 128.0).unwrap()
    }

    #[test]
    fn tiling_pairs() {
        let i = SupportSet::<f64>::interval(0.0, 1.0).unwrap();
        assert!(
            tiling_pair_check(&i, &ShiftSet::integers(), &grid(), 6.0, 0.0)
                .unwrap()
                .verdict
        );
        assert!(
            tiling_pair_check(&two_intervals(), &two_offsets(), &grid(), 6.0, 0.0)
                .unwrap()
                .verdict
        );

        let gap =
            tiling_pair_check(&i, &ShiftSet::lattice(2.0).unwrap(), &grid(), 6.0, 0.0).unwrap();
        assert!(!gap.verdict);
        assert_eq!(gap.max_violation, 1.0);
        assert!(gap.witnesses.contains(&Witness {
            at: 1.5,
            value: 0.0
        }));
    }

    #[test]
    fn spectral_pairs() {
        let i = SupportSet::<f64>::interval(0.0, 1.0).unwrap();
        let cfg = SpectralConfig::default();
        let z = spectral_pair_check(&i, &ShiftSet::integers(), &cfg).unwrap();
        assert!(z.verdict, "{z:?}");
        assert_eq!(z.checks.len(), 3);

        let f3 = spectral_pair_check(&two_intervals(), &two_offsets(), &cfg).unwrap();
        assert!(f3.verdict, "{f3:?}");

        let bad = spectral_pair_check(&i, &ShiftSet::lattice(1.5).unwrap(), &cfg).unwrap();
        assert!(!bad.verdict);
        assert!(!bad.checks[0].verdict);
        let w = bad.witnesses.iter().find(|w| w.at == 1.5).unwrap();
        assert!((w.value - 2.0 / (3.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn zero_set_examples() {
        assert!(
            difference_zero_set_check(&unit(), &ShiftSet::integers(), 6.0, 1e-10)
                .unwrap()
                .verdict
        );

        let bad = difference_zero_set_check(&unit(), &ShiftSet::lattice(1.5).unwrap(), 6.0, 1e-10)
            .unwrap();
        assert!(!bad.verdict);
        assert!((bad.max_violation - 2.0 / (3.0 * PI)).abs() < 1e-12);
        assert!(bad.witnesses.iter().any(|w| w.at == 1.5));

        let g = StepWindow::indicator(0.0, 2.0)
            .unwrap()
            .scale_real(FRAC_1_SQRT_2);
        assert!(
            difference_zero_set_check(&g, &ShiftSet::lattice(0.5).unwrap(), 6.0, 1e-10)
                .unwrap()
                .verdict
        );
    }

    #[test]
    fn orthogonality_matches_the_zero_set_check() {
        let omega = two_intervals();
        let lambda = ShiftSet::lattice(1.5).unwrap();
        let spectral = spectral_pair_check(&omega, &lambda, &SpectralConfig::default()).unwrap();
        let g = omega.indicator(1.0 / omega.measure().sqrt());
        let zero = difference_zero_set_check(&g, &lambda, 6.0, 1e-10).unwrap();
        assert_eq!(spectral.checks[0].violation, zero.max_violation);
        assert_eq!(spectral.witnesses, zero.witnesses);
    }

    #[test]
    fn liu_wang_fixtures() {
        let cfg = LiuWangConfig::default();
        let f1 = liu_wang_conditions(&unit(), &ShiftSet::integers(), &ShiftSet::integers(), &cfg)
            .unwrap();
        assert!(f1.verdict, "{f1:?}");

        let g = two_intervals().indicator(1.0);
        let f3 = liu_wang_conditions(&g, &two_offsets(), &two_offsets(), &cfg).unwrap();
        assert!(f3.modulus.verdict && f3.tiling.verdict && f3.spectral.verdict);

        let uneven = StepWindow::from_real(vec![0.0, 0.5, 1.0], vec![1.0, 0.5]).unwrap();
        let rep = liu_wang_conditions(&uneven, &ShiftSet::integers(), &ShiftSet::integers(), &cfg)
            .unwrap();
        assert!(!rep.modulus.verdict);
        assert_eq!(rep.modulus.witnesses.len(), 1);
        assert_eq!(
            (rep.modulus.witnesses[0].start, rep.modulus.witnesses[0].end),
            (0.5, 1.0)
        );
    }

    #[test]
    fn zero_window_is_an_error() {
        let zero = StepWindow::from_real(vec![0.0, 1.0], vec![0.0]).unwrap();
        let cfg = LiuWangConfig::default();
        let z = ShiftSet::integers();
        assert_eq!(
            liu_wang_conditions(&zero, &z, &z, &cfg).unwrap_err(),
            Error::ZeroWindow
        );
        assert_eq!(
            difference_zero_set_check(&zero, &z, 6.0, 1e-10).unwrap_err(),
            Error::ZeroWindow
        );
    }

    #[test]
    fn nonnegative_structure_examples() {
        let cfg = LiuWangConfig::default();
        let g = StepWindow::indicator(0.0, 2.0)
            .unwrap()
            .scale_real(FRAC_1_SQRT_2);
        let f2 = nonnegative_structure(
            &g,
            &ShiftSet::lattice(2.0).unwrap(),
            &ShiftSet::lattice(0.5).unwrap(),
            &cfg,
        )
        .unwrap();
        assert!(f2.verdict, "{f2:?}");
        assert!((f2.density_t - 0.5).abs() <= 0.02);

        let z = ShiftSet::integers();
        assert!(
            nonnegative_structure(&unit(), &z, &z, &cfg)
                .unwrap()
                .verdict
        );

        let half =
            nonnegative_structure(&unit(), &ShiftSet::lattice(0.5).unwrap(), &z, &cfg).unwrap();
        assert!(!half.disjoint && !half.verdict);
        assert_eq!(
            half.overlaps[0],
            OverlapWitness {
                delta: 0.5,
                overlap: vec![(0.5, 1.0)]
            }
        );

        let signed = StepWindow::from_real(vec![0.0, 1.0], vec![-1.0]).unwrap();
        assert!(matches!(
            nonnegative_structure(&signed, &z, &z, &cfg),
            Err(Error::NotNonnegative(_))
        ));
    }

    #[test]
    fn refined_family_reaches_the_target_width() {
        let fam = refined_test_family(&two_intervals(), 64).unwrap();
        let narrowest = fam
            .iter()
            .map(|f| f.support_diameter())
            .fold(f64::INFINITY, f64::min);
        assert!(narrowest <= 0.5 / 64.0 + 1e-15);
        assert!(fam.iter().all(|f| (f.energy() - 1.0).abs() < 1e-12));
    }
}
