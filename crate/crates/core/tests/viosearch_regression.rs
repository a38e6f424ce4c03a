//! Frozen search results for the singlet and Werner family.
//!
//! Reference values were cross-checked against a closed-form model: on the
//! singlet (or a Werner state with weight `p`), the pairwise mutual information
//! at angle difference `Δ` is `1 − h((1 − p cos Δ) / 2)` bits.

use entrobound_core::quantum::{cerf_adami_quantum, spin_projector};
use entrobound_core::viosearch::{grid_search, refine, refine_from, search, werner_threshold};
use entrobound_core::{DensityMatrix, Error, MeasurementSettings};

/// Grid maximum on the singlet; attained at `(0, π/8, π/4)` for both 16 and 32 cells per axis.
const SINGLET_GRID_MAX: f64 = 1.134_222_779_390_986_3;
/// Coordinate ascent from the resolution-32 grid optimum, step tolerance `1e-9`.
const SINGLET_REFINED_MAX: f64 = 1.134_254_379_975_633_3;
/// Werner bisection at resolution 32, tolerance `1e-6`.
const WERNER_THRESHOLD: f64 = 0.956_128_120_422_363_3;
const WERNER_UPPER: f64 = 0.956_129_074_096_679_7;

fn binary_entropy(x: f64) -> f64 {
    [x, 1.0 - x]
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

fn closed_form_lhs(p: f64, [a, b, c]: [f64; 3]) -> f64 {
    let mi = |d: f64| 1.0 - binary_entropy((1.0 - p * d.cos()) / 2.0);
    (mi(a - b) - mi(a - c)).abs() + mi(b - c)
}

#[test]
fn singlet_grid_maximum_is_frozen() {
    let rho = DensityMatrix::singlet();
    for res in [16, 32] {
        let g = grid_search(&rho, res).unwrap();
        assert!(
            (g.best_lhs - SINGLET_GRID_MAX).abs() < 1e-12,
            "res {res}: {}",
            g.best_lhs
        );
        let [a, b, c] = g.best_settings.angles();
        let step = std::f64::consts::PI / 8.0;
        assert_eq!(a, 0.0);
        assert!((b - step).abs() < 1e-15 && (c - 2.0 * step).abs() < 1e-15);
        assert!((closed_form_lhs(1.0, [a, b, c]) - g.best_lhs).abs() < 1e-12);
        assert_eq!(g.trace.len(), res * res * res);
    }
}

#[test]
fn singlet_refined_maximum_is_frozen() {
    let rho = DensityMatrix::singlet();
    let g = grid_search(&rho, 32).unwrap();
    let r = refine(&rho, &g, 1e-9).unwrap();
    assert!(r.refined);
    assert!(r.best_lhs >= g.best_lhs);
    assert!((r.best_lhs - SINGLET_REFINED_MAX).abs() < 1e-9);
    assert!(r.best_lhs > 1.0 + 1e-6);
    assert!((closed_form_lhs(1.0, r.best_settings.angles()) - r.best_lhs).abs() < 1e-12);
    // the grid trace sits in front of the ascent trace
    assert_eq!(&r.trace[..g.trace.len()], &g.trace[..]);
}

#[test]
fn refinement_is_rotation_invariant_on_the_singlet() {
    // The singlet is invariant under a common rotation of both measurement
    // bases, so shifting all three angles must not change the optimum.
    let rho = DensityMatrix::singlet();
    let g = grid_search(&rho, 32).unwrap();
    let [a, b, c] = g.best_settings.angles();
    let shift = 0.3;
    let rotated = MeasurementSettings::new([a + shift, b + shift, c + shift]).unwrap();
    let r0 = refine_from(&rho, g.best_settings, 32, 1e-9).unwrap();
    let r1 = refine_from(&rho, rotated, 32, 1e-9).unwrap();
    assert!((r0.best_lhs - r1.best_lhs).abs() < 1e-9);
}

#[test]
fn doubling_resolution_never_decreases_the_maximum() {
    let rho = DensityMatrix::singlet();
    let g16 = grid_search(&rho, 16).unwrap();
    let g32 = grid_search(&rho, 32).unwrap();
    assert!(g32.best_lhs >= g16.best_lhs);
}

#[test]
fn search_is_deterministic() {
    let rho = DensityMatrix::werner(0.9).unwrap();
    let a = search(&rho, 16, 1e-6).unwrap();
    let b = search(&rho, 16, 1e-6).unwrap();
    assert_eq!(a, b);
}

#[test]
fn refine_never_goes_below_its_start() {
    for p in [0.2, 0.5, 0.8, 1.0] {
        let rho = DensityMatrix::werner(p).unwrap();
        for start in [[0.0, 0.1, 0.2], [1.0, 2.0, 3.0], [0.5, 0.5, 0.5]] {
            let s = MeasurementSettings::new(start).unwrap();
            let start_lhs = cerf_adami_quantum(&rho, &s).unwrap().lhs();
            let r = refine_from(&rho, s, 16, 1e-6).unwrap();
            assert!(r.best_lhs >= start_lhs, "p {p} start {start:?}");
        }
    }
}

#[test]
fn werner_maxima_match_closed_form() {
    for p in [0.1, 1.0 / 3.0, 0.5, 0.8, 0.95] {
        let g = grid_search(&DensityMatrix::werner(p).unwrap(), 16).unwrap();
        assert!((closed_form_lhs(p, g.best_settings.angles()) - g.best_lhs).abs() < 1e-12);
    }
}

#[test]
fn werner_threshold_is_frozen() {
    let w = werner_threshold::<f64>(32, 1e-6).unwrap();
    assert!(
        (w.threshold - WERNER_THRESHOLD).abs() < 1e-12,
        "{}",
        w.threshold
    );
    assert!((w.upper - WERNER_UPPER).abs() < 1e-12, "{}", w.upper);
    assert!(w.upper - w.threshold < 1e-6);
    // Independent root of max_angles closed_form_lhs(p, ·) = 1, found with
    // a Nelder-Mead inner maximization and Brent outer solve.
    let oracle = 0.956_128_635_277_981_3;
    assert!(w.threshold <= oracle && oracle <= w.upper);
    for pair in w.samples.windows(2) {
        assert!(pair[0].0 < pair[1].0);
        assert!(pair[1].1 >= pair[0].1 - 1e-6);
    }
}

#[test]
fn search_rejects_coarse_grids() {
    let rho = DensityMatrix::singlet();
    assert!(matches!(
        grid_search(&rho, 4),
        Err(Error::ResolutionTooSmall { got: 4, min: 8 })
    ));
    assert!(matches!(
        werner_threshold::<f64>(16, 1e-6),
        Err(Error::ResolutionTooSmall { got: 16, min: 32 })
    ));
    assert!(matches!(
        refine(&rho, &grid_search(&rho, 8).unwrap(), 0.0),
        Err(Error::InvalidTolerance(_))
    ));
}

#[test]
fn projectors_resolve_the_identity() {
    let plus = spin_projector(0.7f64, 1.0);
    let minus = spin_projector(0.7f64, -1.0);
    let sum = plus.add(&minus);
    assert!((sum[(0, 0)].re - 1.0).abs() < 1e-15 && sum[(0, 1)].norm() < 1e-15);
}
