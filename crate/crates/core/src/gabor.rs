//! Gabor systems `{ g(x − t) e^{2πisx} : t ∈ T, s ∈ S }` over step windows.
//!
//! Inner products between atoms, analysis coefficients of step functions
//! and the auxiliary function `H(ξ) = ‖f‖⁻² Σ_t |ĥ_t(ξ)|²` with
//! `h_t = f·g(· − t)` are all evaluated in closed form. Completeness of an
//! infinite system cannot be observed directly, so it is probed through the
//! Parseval defect of truncated coefficient sums on a family of step
//! functions.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{exp_segment_integral, pairwise_sum, Scalar};
use crate::shiftsets::ShiftSet;
use crate::tiling::{
    fourier_side_integral, tiling_sum, truncation_tail, Grid, Integral, TileFunction, TilingReport,
};
use crate::windows::{modulated_overlap, overlap_segments, StepWindow};

/// Index `(t, s)` of the atom `g(x − t) e^{2πisx}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom<T: Scalar> {
    pub t: T,
    pub s: T,
}

impl<T: Scalar> Atom<T> {
    pub fn new(t: T, s: T) -> Self {
        Self { t, s }
    }
}

#[derive(Clone, Debug)]
pub struct GaborSystem<T: Scalar> {
    pub window: StepWindow<T>,
    pub time_set: ShiftSet<T>,
    pub freq_set: ShiftSet<T>,
    pub trunc_time: T,
    pub trunc_freq: T,
}

impl<T: Scalar> GaborSystem<T> {
    pub fn new(
        window: StepWindow<T>,
        time_set: ShiftSet<T>,
        freq_set: ShiftSet<T>,
        trunc_time: T,
        trunc_freq: T,
    ) -> Result<Self> {
        if window.is_zero() {
            return Err(Error::ZeroWindow);
        }
        for (name, r) in [("time", trunc_time), ("frequency", trunc_freq)] {
            if !(r.is_finite() && r > T::zero()) {
                return Err(Error::TruncationTooSmall(format!(
                    "{name} truncation must be positive, got {r}"
                )));
            }
        }
        Ok(Self {
            window,
            time_set,
            freq_set,
            trunc_time,
            trunc_freq,
        })
    }

    pub fn with_truncation(&self, trunc_time: T, trunc_freq: T) -> Result<Self> {
        Self::new(
            self.window.clone(),
            self.time_set.clone(),
            self.freq_set.clone(),
            trunc_time,
            trunc_freq,
        )
    }

    /// Smallest time radius that keeps every shift `t` with
    /// `supp f ∩ supp g(· − t) ≠ ∅`.
    pub fn lossless_time_radius(&self, f: &StepWindow<T>) -> Option<T> {
        let (fa, fb) = f.nonzero_hull()?;
        let (ga, gb) = self.window.nonzero_hull()?;
        Some((fa - gb).abs().max((fb - ga).abs()))
    }

    /// `g(x − t) e^{2πisx}` evaluated pointwise.
    pub fn atom_value(&self, atom: Atom<T>, x: T) -> Complex<T> {
        self.window.eval(x - atom.t) * crate::scalar::cis_turns(atom.s * x)
    }
}

/// `⟨g_{t,s}, g_{t′,s′}⟩ = ∫ g(x−t) conj(g(x−t′)) e^{2πi(s−s′)x} dx`.
pub fn inner_product<T: Scalar>(g: &StepWindow<T>, a: Atom<T>, b: Atom<T>) -> Complex<T> {
    modulated_overlap(g, a.t, g, b.t, a.s - b.s)
}

/// `⟨f, g_{t,s}⟩ = ∫ f(x) conj(g(x−t)) e^{−2πisx} dx`.
pub fn analysis_coefficient<T: Scalar>(
    f: &StepWindow<T>,
    g: &StepWindow<T>,
    atom: Atom<T>,
) -> Complex<T> {
    modulated_overlap(f, T::zero(), g, atom.t, -atom.s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstPair<T: Scalar> {
    pub first: Atom<T>,
    pub second: Atom<T>,
    pub magnitude: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramReport<T: Scalar> {
    pub trunc_time: T,
    pub trunc_freq: T,
    pub time_shifts: usize,
    pub freq_shifts: usize,
    /// Pairs (including the diagonal) whose inner product was evaluated.
    pub pairs_checked: usize,
    /// Pairs skipped because their time shifts differ by at least the
    /// support diameter; those inner products vanish identically.
    pub pairs_skipped: usize,
    pub max_off_diagonal: T,
    pub max_diagonal_deviation: T,
    pub worst_pair: Option<WorstPair<T>>,
}

impl<T: Scalar> GramReport<T> {
    pub fn passes(&self, tol: T) -> bool {
        self.max_off_diagonal <= tol && self.max_diagonal_deviation <= tol
    }
}

/// All pairwise inner products among atoms with `|t| ≤ R_time`, `|s| ≤ R_freq`.
pub fn gram_report<T: Scalar>(sys: &GaborSystem<T>) -> Result<GramReport<T>> {
    let times = sys.time_set.enumerate(-sys.trunc_time, sys.trunc_time)?;
    let freqs = sys.freq_set.enumerate(-sys.trunc_freq, sys.trunc_freq)?;
    if times.len() < 2 || freqs.len() < 2 {
        return Err(Error::TruncationTooSmall(format!(
            "gram matrix needs ≥ 2 time and ≥ 2 frequency shifts, got {} and {}",
            times.len(),
            freqs.len()
        )));
    }
    let g = &sys.window;
    let diam = g.support_diameter();
    let nf = freqs.len();

    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut max_off = T::zero();
    let mut max_diag = T::zero();
    let mut worst: Option<WorstPair<T>> = None;

    for (i, &t1) in times.iter().enumerate() {
        for &t2 in &times[i..] {
            let same_time = t1 == t2;
            let pair_count = if same_time {
                nf * (nf + 1) / 2
            } else {
                nf * nf
            };
            if (t2 - t1).abs() >= diam {
                skipped += pair_count;
                continue;
            }
            // the refinement depends only on the two time shifts
            let segments = overlap_segments(g, t1, g, t2);
            for (k1, &s1) in freqs.iter().enumerate() {
                let start = if same_time { k1 } else { 0 };
                for &s2 in &freqs[start..] {
                    let nu = s1 - s2;
                    let ip = segments
                        .iter()
                        .map(|seg| {
                            seg.left
                                * seg.right.conj()
                                * exp_segment_integral(seg.start, seg.end, nu)
                        })
                        .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
                    checked += 1;
                    if same_time && s1 == s2 {
                        max_diag = max_diag.max((ip - Complex::new(T::one(), T::zero())).norm());
                    } else {
                        let m = ip.norm();
                        if m > max_off {
                            max_off = m;
                            worst = Some(WorstPair {
                                first: Atom::new(t1, s1),
                                second: Atom::new(t2, s2),
                                magnitude: m,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(GramReport {
        trunc_time: sys.trunc_time,
        trunc_freq: sys.trunc_freq,
        time_shifts: times.len(),
        freq_shifts: nf,
        pairs_checked: checked,
        pairs_skipped: skipped,
        max_off_diagonal: max_off,
        max_diagonal_deviation: max_diag,
        worst_pair: worst,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParsevalReport<T: Scalar> {
    pub trunc_time: T,
    pub trunc_freq: T,
    pub norm_sq: T,
    pub captured: T,
    /// `‖f‖² − Σ |⟨f, g_{t,s}⟩|²` over the truncated index set.
    pub defect: T,
    /// Bound on `Σ |⟨f, g_{t,s}⟩|²` over the omitted frequencies; infinite
    /// when the time truncation drops shifts that meet `supp f`.
    pub tail_bound: T,
}

impl<T: Scalar> ParsevalReport<T> {
    /// For a complete orthonormal system the defect equals the omitted
    /// mass, so it must lie in `[−tol, tail_bound + tol]`.
    pub fn consistent_with_onb(&self, tol: T) -> bool {
        self.defect >= -tol && self.defect <= self.tail_bound + tol
    }
}

/// Truncated Parseval defect of `f` against the system.
pub fn parseval_defect<T: Scalar>(
    sys: &GaborSystem<T>,
    f: &StepWindow<T>,
) -> Result<ParsevalReport<T>> {
    let (fa, fb) = f.nonzero_hull().ok_or(Error::ZeroWindow)?;
    let (ga, gb) = sys.window.nonzero_hull().ok_or(Error::ZeroWindow)?;
    let norm_sq = f.energy();
    let (need_lo, need_hi) = (fa - gb, fb - ga);
    let lo = need_lo.max(-sys.trunc_time);
    let hi = need_hi.min(sys.trunc_time);
    let times = if hi >= lo {
        sys.time_set.enumerate(lo, hi)?
    } else {
        Vec::new()
    };
    let freqs = sys.freq_set.enumerate(-sys.trunc_freq, sys.trunc_freq)?;

    let far = T::of(4.0) * sys.trunc_freq + T::of(2.0);
    let mut terms = Vec::with_capacity(times.len() * freqs.len());
    let mut tails = Vec::with_capacity(times.len());
    for &t in &times {
        let Some(h) = f.product(&sys.window.translate(t).conj()) else {
            continue;
        };
        terms.extend(
            freqs
                .iter()
                .map(|&s| analysis_coefficient(f, &sys.window, Atom::new(t, s)).norm_sqr()),
        );
        tails.push(truncation_tail(
            &SpectralEnvelope::of(&h),
            &sys.freq_set,
            T::zero(),
            sys.trunc_freq,
            far,
        )?);
    }
    let mut tail_bound = pairwise_sum(&tails);
    let omitted_time = need_lo < -sys.trunc_time || need_hi > sys.trunc_time;
    if omitted_time {
        let reaching = sys
            .time_set
            .enumerate(need_lo, need_hi)?
            .into_iter()
            .filter(|t| t.abs() > sys.trunc_time)
            .any(|t| f.product(&sys.window.translate(t)).is_some());
        if reaching {
            tail_bound = T::infinity();
        }
    }
    let captured = pairwise_sum(&terms);
    Ok(ParsevalReport {
        trunc_time: sys.trunc_time,
        trunc_freq: sys.trunc_freq,
        norm_sq,
        captured,
        defect: norm_sq - captured,
        tail_bound,
    })
}

/// Doubles the frequency truncation, starting from the system's, until the
/// defect moves by less than `change_tol` or the radius exceeds `max_freq`.
pub fn adaptive_parseval_defect<T: Scalar>(
    sys: &GaborSystem<T>,
    f: &StepWindow<T>,
    change_tol: T,
    max_freq: T,
) -> Result<ParsevalReport<T>> {
    let mut current = parseval_defect(sys, f)?;
    let mut radius = sys.trunc_freq;
    while radius * T::of(2.0) <= max_freq {
        radius *= T::of(2.0);
        let next = parseval_defect(&sys.with_truncation(sys.trunc_time, radius)?, f)?;
        let change = (next.defect - current.defect).abs();
        current = next;
        if change < change_tol {
            break;
        }
    }
    Ok(current)
}

/// Unit-norm indicators of the dyadic refinements (levels `0..=depth`) of
/// each interval of the window's support, followed by the normalized window.
pub fn step_test_family<T: Scalar>(
    window: &StepWindow<T>,
    depth: u32,
) -> Result<Vec<StepWindow<T>>> {
    let support = window.support(T::zero())?;
    let mut out = Vec::new();
    for &(a, b) in support.intervals() {
        for level in 0..=depth {
            let pieces = 1usize << level;
            let width = (b - a) / T::of_usize(pieces);
            for k in 0..pieces {
                let lo = a + width * T::of_usize(k);
                let hi = if k + 1 == pieces { b } else { lo + width };
                out.push(StepWindow::indicator(lo, hi)?.scale_real(T::one() / width.sqrt()));
            }
        }
    }
    out.push(window.scale_real(T::one() / window.energy().sqrt()));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OnbConfig<T: Scalar> {
    /// Tolerance on Gram deviations.
    pub gram_tol: T,
    /// Tolerance on Parseval defects beyond their tail bounds.
    pub defect_tol: T,
    pub family_depth: u32,
    /// Stop growing the frequency truncation once the defect moves less.
    pub defect_change_tol: T,
    pub max_trunc_freq: T,
}

impl<T: Scalar> Default for OnbConfig<T> {
    fn default() -> Self {
        Self {
            gram_tol: T::exact_tol(),
            defect_tol: T::of(0.02),
            family_depth: 2,
            defect_change_tol: T::of(1e-4),
            max_trunc_freq: T::of(1024.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OnbReport<T: Scalar> {
    pub config: OnbConfig<T>,
    pub gram: GramReport<T>,
    pub gram_passes: bool,
    pub parseval: Vec<ParsevalReport<T>>,
    pub worst_defect: T,
    pub parseval_passes: bool,
    pub verdict: bool,
}

/// Orthonormality (Gram) plus completeness (Parseval on the step family).
pub fn verify_onb<T: Scalar>(sys: &GaborSystem<T>, config: &OnbConfig<T>) -> Result<OnbReport<T>> {
    let gram = gram_report(sys)?;
    let gram_passes = gram.passes(config.gram_tol);
    let family = step_test_family(&sys.window, config.family_depth)?;
    let mut parseval = Vec::with_capacity(family.len());
    for f in &family {
        let radius = sys.lossless_time_radius(f).ok_or(Error::ZeroWindow)?;
        let local = sys.with_truncation(radius.max(sys.trunc_time), sys.trunc_freq)?;
        parseval.push(adaptive_parseval_defect(
            &local,
            f,
            config.defect_change_tol,
            config.max_trunc_freq,
        )?);
    }
    let worst_defect = parseval
        .iter()
        .map(|p| p.defect.abs())
        .fold(T::zero(), T::max);
    let parseval_passes = parseval
        .iter()
        .all(|p| p.consistent_with_onb(config.defect_tol));
    Ok(OnbReport {
        config: config.clone(),
        verdict: gram_passes && parseval_passes,
        gram,
        gram_passes,
        parseval,
        worst_defect,
        parseval_passes,
    })
}

/// `|ĥ(ξ)|²` bounds for a single step function: `sup = ‖h‖₁²`, `K = (TV/2π)²`.
struct SpectralEnvelope<T: Scalar> {
    sup: T,
    k: T,
}

impl<T: Scalar> SpectralEnvelope<T> {
    fn of(h: &StepWindow<T>) -> Self {
        let l1 = h.l1_norm();
        let c = h.total_variation() / T::TAU();
        Self {
            sup: l1 * l1,
            k: c * c,
        }
    }
}

impl<T: Scalar> TileFunction<T> for SpectralEnvelope<T> {
    fn eval(&self, x: T) -> T {
        self.envelope(x)
    }
    fn compact_support(&self) -> Option<(T, T)> {
        None
    }
    fn sup_bound(&self) -> T {
        self.sup
    }
    fn inverse_square_bound(&self) -> Option<T> {
        Some(self.k)
    }
    fn integral(&self) -> Result<Integral<T>> {
        Err(Error::InvalidParameter("envelope has no integral".into()))
    }
}

/// `H(ξ) = ‖f‖⁻² Σ_{t∈T} |ĥ_t(ξ)|²` with `h_t(x) = f(x) g(x − t)`.
#[derive(Clone, Debug)]
pub struct HFunction<T: Scalar> {
    /// Surviving `(t, h_t)` pairs; every other `t` has `h_t = 0`.
    pieces: Vec<(T, StepWindow<T>)>,
    norm_sq: T,
    sup: T,
    k: T,
    oscillation: T,
}

impl<T: Scalar> HFunction<T> {
    pub fn shifts(&self) -> Vec<T> {
        self.pieces.iter().map(|(t, _)| *t).collect()
    }

    pub fn f_norm_sq(&self) -> T {
        self.norm_sq
    }

    pub fn sample(&self, grid: &Grid<T>) -> Vec<(T, T)> {
        grid.points().map(|xi| (xi, self.eval(xi))).collect()
    }

    /// `∫H` through Plancherel: `‖f‖⁻² Σ_t ‖h_t‖²`.
    pub fn plancherel_integral(&self) -> T {
        let e: Vec<T> = self.pieces.iter().map(|(_, h)| h.energy()).collect();
        pairwise_sum(&e) / self.norm_sq
    }
}

impl<T: Scalar> TileFunction<T> for HFunction<T> {
    fn eval(&self, xi: T) -> T {
        let terms: Vec<T> = self
            .pieces
            .iter()
            .map(|(_, h)| h.fourier_transform(xi).norm_sqr())
            .collect();
        pairwise_sum(&terms) / self.norm_sq
    }

    fn compact_support(&self) -> Option<(T, T)> {
        None
    }

    fn sup_bound(&self) -> T {
        self.sup
    }

    fn inverse_square_bound(&self) -> Option<T> {
        Some(self.k)
    }

    fn integral(&self) -> Result<Integral<T>> {
        fourier_side_integral(|xi| self.eval(xi), self.k, self.oscillation)
    }
}

/// Builds `H` for the pair `(f, g)` and time shifts `T`; the sum over `T` is
/// finite because both windows have compact support.
pub fn build_h<T: Scalar>(
    f: &StepWindow<T>,
    g: &StepWindow<T>,
    time_set: &ShiftSet<T>,
) -> Result<HFunction<T>> {
    let (fa, fb) = f.nonzero_hull().ok_or(Error::ZeroWindow)?;
    let (ga, gb) = g.nonzero_hull().ok_or(Error::ZeroWindow)?;
    let times = time_set.enumerate(fa - gb, fb - ga)?;
    let norm_sq = f.energy();
    let mut pieces = Vec::new();
    for t in times {
        if let Some(h) = f.product(&g.translate(t)) {
            if !h.is_zero() {
                pieces.push((t, h));
            }
        }
    }
    let mut sups = Vec::with_capacity(pieces.len());
    let mut ks = Vec::with_capacity(pieces.len());
    for (_, h) in &pieces {
        let env = SpectralEnvelope::of(h);
        sups.push(env.sup);
        ks.push(env.k);
    }
    Ok(HFunction {
        sup: pairwise_sum(&sups) / norm_sq,
        k: pairwise_sum(&ks) / norm_sq,
        oscillation: fb - fa,
        pieces,
        norm_sq,
    })
}

/// Checks `Σ_{s∈S, |s|≤trunc} H(ξ − s) = 1` on the grid; every value is
/// recomputed in closed form at the shifted argument.
pub fn verify_h_tiling<T: Scalar>(
    h: &HFunction<T>,
    freq_set: &ShiftSet<T>,
    grid: &Grid<T>,
    trunc: T,
    tol: T,
) -> Result<TilingReport<T>> {
    tiling_sum(h, freq_set, grid, trunc, T::one(), tol)
}
