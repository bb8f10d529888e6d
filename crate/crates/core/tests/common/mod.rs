//! Quadrature oracles that share nothing with the library's closed forms
//! beyond pointwise evaluation of step windows.

#![allow(dead_code)]

use gabortile::StepWindow;
use num_complex::Complex64;
use rand::Rng;

/// Adaptive Simpson on `[a, b]` for a smooth complex integrand.
pub fn simpson<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Complex64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `∫ f(x − fs) conj(g(x − gs)) e^{2πiνx} dx`, integrating piece by piece
/// between the merged breakpoints. Each piece is evaluated at its midpoint
/// so the half-open convention never matters.
pub fn overlap_by_quadrature(
    f: &StepWindow<f64>,
    fs: f64,
    g: &StepWindow<f64>,
    gs: f64,
    nu: f64,
) -> Complex64 {
    let mut cuts: Vec<f64> = f
        .breakpoints()
        .iter()
        .map(|b| b + fs)
        .chain(g.breakpoints().iter().map(|b| b + gs))
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut total = Complex64::new(0.0, 0.0);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let c = f.eval(mid - fs) * g.eval(mid - gs).conj();
        if c.norm() == 0.0 {
            continue;
        }
        let phase = |x: f64| c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * nu * x);
        // a quarter period per sub-piece at most, so Simpson's first
        // samples cannot alias the oscillation
        let n = ((b - a) * nu.abs() * 4.0).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        for k in 0..n {
            let lo = a + h * k as f64;
            let hi = if k + 1 == n { b } else { lo + h };
            total += simpson(&phase, lo, hi, 1e-14);
        }
    }
    total
}

/// `ĝ(ξ) = ∫ g(x) e^{−2πixξ} dx` by quadrature.
pub fn transform_by_quadrature(g: &StepWindow<f64>, xi: f64) -> Complex64 {
    let one = StepWindow::indicator(
        g.breakpoints()[0] - 1.0,
        g.breakpoints()[g.breakpoints().len() - 1] + 1.0,
    )
    .unwrap();
    overlap_by_quadrature(g, 0.0, &one, 0.0, -xi)
}

/// A window with 1..=5 pieces inside `[−2, 2]` and complex values in the
/// unit square; some pieces are zero.
pub fn random_window<R: Rng>(rng: &mut R) -> StepWindow<f64> {
    let n = rng.gen_range(1..=5);
    let mut bps: Vec<f64> = (0..=n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bps.dedup_by(|b, a| *b - *a < 1e-3);
    if bps.len() < 2 {
        bps = vec![0.0, 1.0];
    }
    let values = (1..bps.len())
        .map(|_| {
            if rng.gen_bool(0.15) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }
        })
        .collect();
    StepWindow::new(bps, values).unwrap()
}

/// A certified orthonormal Gabor system with its exact shift densities.
pub struct Fixture {
    pub name: &'static str,
    pub g: StepWindow<f64>,
    pub t: gabortile::ShiftSet<f64>,
    pub s: gabortile::ShiftSet<f64>,
    pub density_t: f64,
    pub density_s: f64,
}

/// `g = 1_[0,1]`, `T = S = ℤ`.
pub fn f1() -> Fixture {
    Fixture {
        name: "F1",
        g: StepWindow::indicator(0.0, 1.0).unwrap(),
        t: gabortile::ShiftSet::integers(),
        s: gabortile::ShiftSet::integers(),
        density_t: 1.0,
        density_s: 1.0,
    }
}

/// `g = 2^{-1/2} 1_[0,2]`, `T = 2ℤ`, `S = ½ℤ`.
pub fn f2() -> Fixture {
    Fixture {
        name: "F2",
        g: StepWindow::indicator(0.0, 2.0)
            .unwrap()
            .scale_real(std::f64::consts::FRAC_1_SQRT_2),
        t: gabortile::ShiftSet::lattice(2.0).unwrap(),
        s: gabortile::ShiftSet::lattice(0.5).unwrap(),
        density_t: 0.5,
        density_s: 2.0,
    }
}

/// `g = 1_Ω` with `Ω = [0,½] ∪ [1,3/2]`, `T = S = 2ℤ + {0, ½}`.
pub fn f3() -> Fixture {
    let two_offsets = gabortile::ShiftSet::periodic(2.0, vec![0.0, 0.5]).unwrap();
    Fixture {
        name: "F3",
        g: StepWindow::from_real(vec![0.0, 0.5, 1.0, 1.5], vec![1.0, 0.0, 1.0]).unwrap(),
        t: two_offsets.clone(),
        s: two_offsets,
        density_t: 1.0,
        density_s: 1.0,
    }
}

pub fn fixtures() -> Vec<Fixture> {
    vec![f1(), f2(), f3()]
}

/// F1 with `S = 1.5ℤ`: not orthogonal.
pub fn bad_freq() -> Fixture {
    Fixture {
        name: "S=1.5Z",
        s: gabortile::ShiftSet::lattice(1.5).unwrap(),
        density_s: 2.0 / 3.0,
        ..f1()
    }
}
