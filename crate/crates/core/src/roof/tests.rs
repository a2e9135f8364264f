use approx::assert_abs_diff_eq;
use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::channel::CanonicalParams;
use crate::sample;

/// Lower end of `{w : Q_w ⪰ 0}` by scanning `λ_min(Q_w)` and bisecting,
/// without touching the pencil eigenvalues.
fn scan_w0(phi: &AffineMap) -> f64 {
    let f = |w: f64| QuadraticForm::new(phi, w).min_eigenvalue();
    let (lo, hi, steps) = (-0.5, 1.5, 20_000);
    let (mut best_w, mut best) = (lo, f64::NEG_INFINITY);
    for k in 0..=steps {
        let w = lo + (hi - lo) * k as f64 / steps as f64;
        let v = f(w);
        if v > best {
            best = v;
            best_w = w;
        }
    }
    assert!(best > -1e-12, "no PSD window found by scan");
    let (mut outside, mut inside) = (lo, best_w);
    for _ in 0..200 {
        let mid = 0.5 * (outside + inside);
        if f(mid) >= -1e-14 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

fn diag(a: f64, b: f64, c: f64) -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(a, b, c))
}

const AXIAL_CRITICAL: f64 = 0.0650454583026497;
const AXIAL_Z0: f64 = 4.79128784747792;

#[test]
fn build_q_examples() {
    let w = 0.37;
    let q = build_q(&AffineMap::identity(), w).matrix;
    assert_eq!(q, Matrix4::from_diagonal(&Vector4::new(1.0 - w, w - 1.0, w - 1.0, w - 1.0)));
    let q = build_q(&AffineMap::completely_depolarizing(), w).matrix;
    assert_eq!(q, Matrix4::from_diagonal(&Vector4::new(1.0 - w, w, w, w)));
    let l = [0.2, -0.5, 0.8];
    let q = build_q(&AffineMap::unital(l).unwrap(), w).matrix;
    let expected = Vector4::new(1.0 - w, w - l[0] * l[0], w - l[1] * l[1], w - l[2] * l[2]);
    assert_abs_diff_eq!(q, Matrix4::from_diagonal(&expected), epsilon = 1e-16);
}

#[test]
fn quadratic_form_is_four_times_determinant_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let phi = sample::rotated_canonical_map(&mut rng);
        let w = rand::Rng::random::<f64>(&mut rng);
        let form = build_q(&phi, w);
        assert_eq!(form.matrix, form.matrix.transpose());
        let x = FourVector::new(1.3, -0.2, 0.7, 0.4);
        let dets = from_four_vector(&phi.apply(&x)).det() - w * from_four_vector(&x).det();
        assert_abs_diff_eq!(form.eval(&x), 4.0 * dets, epsilon = 1e-12);
    }
}

#[test]
fn identity_map_roof() {
    let sol = solve_w0(&AffineMap::identity()).unwrap();
    assert_eq!(sol.w0, 1.0);
    assert_eq!(sol.psd_interval, (1.0, 1.0));
    assert_eq!(sol.kernel_basis.len(), 4);
    assert!(sol.flat && sol.is_full_kernel());
    let state = FourVector::new(1.0, 0.3, -0.2, 0.1);
    assert_eq!(sol.concurrence(&state).unwrap(), 0.0);
}

#[test]
fn unital_roof() {
    let phi = AffineMap::unital([0.2, 0.5, 0.8]).unwrap();
    let sol = solve_w0(&phi).unwrap();
    assert_abs_diff_eq!(sol.w0, 0.64, epsilon = 1e-15);
    assert!(sol.flat);
    assert_abs_diff_eq!(sol.n.to_vec4(), Vector4::new(0.0, 0.0, 0.0, 1.0), epsilon = 1e-15);
    assert_abs_diff_eq!(sol.psd_interval.1, 1.0, epsilon = 1e-15);
    assert_eq!(sol.n_class, CausalClass::SpaceLike);
}

#[test]
fn axial_roof_matches_scan_and_closed_form() {
    let phi = AffineMap::axial(0.9, 0.1, 0.3).unwrap();
    let scanned = scan_w0(&phi);
    assert_abs_diff_eq!(scanned, AXIAL_CRITICAL, epsilon = 1e-12);

    let sol = solve_w0(&phi).unwrap();
    assert_eq!(sol.method, SolveMethod::Pencil);
    assert_abs_diff_eq!(sol.w0, AXIAL_CRITICAL, epsilon = 1e-13);
    assert!(!sol.flat);
    assert_abs_diff_eq!(sol.n.to_vec4(), Vector4::new(1.0, 0.0, 0.0, AXIAL_Z0), epsilon = 1e-11);
    assert_eq!(sol.n_class, CausalClass::SpaceLike);

    let (w0, flat) = axial_w0_closed_form(0.9, 0.1, 0.3).unwrap();
    assert_abs_diff_eq!(w0, AXIAL_CRITICAL, epsilon = 1e-15);
    assert!(!flat);
    assert_abs_diff_eq!(axial_z0(0.9, 0.3), AXIAL_Z0, epsilon = 1e-13);
}

#[test]
fn axial_closed_form_examples() {
    assert_eq!(axial_w0_closed_form(1.0, 0.4, 1.0).unwrap(), (1.0, true));
    assert_eq!(axial_critical_beta_sq(1.0, 1.0), 1.0);
    for alpha in [0.2f64, 0.5, 0.75] {
        let (w0, flat) = axial_w0_closed_form(alpha, alpha.sqrt(), 1.0).unwrap();
        assert_abs_diff_eq!(w0, alpha, epsilon = 1e-15);
        assert!(flat);
    }
    assert!(axial_w0_closed_form(1.0, 0.5, 0.0).is_err());
}

#[test]
fn completely_depolarizing_roof() {
    let sol = solve_w0(&AffineMap::completely_depolarizing()).unwrap();
    assert_eq!(sol.w0, 0.0);
    assert_eq!(sol.psd_interval, (0.0, 1.0));
    assert!(sol.flat);
    for x in [Vector3::zeros(), Vector3::new(0.3, 0.1, -0.5), Vector3::new(0.0, 1.0, 0.0)] {
        assert_abs_diff_eq!(sol.concurrence(&FourVector::state(x)).unwrap(), 1.0, epsilon = 1e-15);
    }
}

#[test]
fn amplitude_damping_concurrence() {
    for alpha in [0.25f64, 0.5, 0.9] {
        let phi = AffineMap::amplitude_damping(alpha).unwrap();
        let sol = solve_w0(&phi).unwrap();
        assert_abs_diff_eq!(sol.w0, alpha, epsilon = 1e-12);
        assert!(sol.flat);
        for x in [
            Vector3::zeros(),
            Vector3::new(0.3, -0.2, 0.5),
            Vector3::new(0.0, 0.0, -1.0),
            Vector3::new(0.6, 0.0, 0.8),
        ] {
            let state = FourVector::state(x);
            let rho00 = from_four_vector(&state).m00;
            let expected = 2.0 * (alpha * (1.0 - alpha)).sqrt() * rho00;
            let c = sol.concurrence(&state).unwrap();
            // C vanishes at the south pole, where sqrt magnifies round-off
            assert_abs_diff_eq!(c * c, expected * expected, epsilon = 1e-14);
            if expected > 1e-3 {
                assert_abs_diff_eq!(c, expected, epsilon = 1e-10);
            }
        }
    }
}

#[test]
fn unital_closed_form_examples() {
    let state = FourVector::new(1.0, 0.3, -0.4, 0.5);
    assert_eq!(unital_concurrence_closed_form([1.0; 3], &state).unwrap(), 0.0);
    assert_eq!(unital_concurrence_closed_form([0.0; 3], &state).unwrap(), 1.0);
    let beta: f64 = 0.6;
    let expected = (1.0 - beta * beta).sqrt() * (0.09f64 + 0.16).sqrt();
    assert_abs_diff_eq!(
        unital_concurrence_closed_form([beta, beta, 1.0], &state).unwrap(),
        expected,
        epsilon = 1e-15
    );
    assert!(unital_concurrence_closed_form([1.2, 0.0, 0.0], &state).is_err());
    assert!(unital_concurrence_closed_form([0.1; 3], &FourVector::new(1.0, 1.0, 1.0, 0.0)).is_err());
}

#[test]
fn cholesky_examples() {
    let xi = Vector3::new(0.0, 0.0, 1.0);
    let unitary = CanonicalParams::new(1.0, 1.0, [1.0; 3], xi).unwrap();
    assert_eq!(cholesky_boundary_check(&unitary).unwrap(), Matrix4::zeros());

    let collapse = CanonicalParams::new(0.0, 1.0, [0.4, 0.9, 1.0], Vector3::new(0.6, 0.0, 0.8)).unwrap();
    let r = cholesky_boundary_check(&collapse).unwrap();
    assert_eq!(r, Matrix4::zeros());
    let phi = AffineMap::from_canonical(&collapse).unwrap();
    assert_abs_diff_eq!(build_q(&phi, 0.0).matrix, Matrix4::zeros(), epsilon = 1e-15);

    let p = CanonicalParams::new(0.5, 1.0, [0.6, 0.8, 1.0], xi).unwrap();
    assert_eq!(p.nu(), 1.0);
    let r = cholesky_boundary_check(&p).unwrap();
    let phi = AffineMap::from_canonical(&p).unwrap();
    let q = build_q(&phi, 0.5).matrix;
    assert_abs_diff_eq!(r * r.transpose(), q, epsilon = 1e-15);
    let n = boundary_kernel_vector(&p);
    assert_eq!(n, FourVector::new(1.0, 0.0, 0.0, 1.0));
    assert_abs_diff_eq!((q * n.to_vec4()).norm(), 0.0, epsilon = 1e-15);

    let interior = CanonicalParams::new(0.5, 0.9, [0.6, 0.8, 1.0], xi).unwrap();
    assert!(cholesky_boundary_check(&interior).is_err());
}

#[test]
fn boundary_maps_are_solved_at_alpha_nu_squared() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let p = sample::canonical_params_with_beta(&mut rng, 1.0);
        let phi = AffineMap::from_canonical(&p).unwrap();
        let sol = solve_w0(&phi).unwrap();
        let w0 = p.alpha * p.nu() * p.nu();
        assert!((sol.w0 - w0).abs() <= 1e-7, "{} vs {w0} for {p:?}", sol.w0);
    }
}

#[test]
fn phase_damping_decomposition() {
    let phi = AffineMap::phase_damping(0.6).unwrap();
    let state = FourVector::new(1.0, 0.6, 0.0, 0.2);
    let d = optimal_decomposition(&phi, &state).unwrap();
    assert!(!d.degenerate_leaf);
    assert_eq!(d.components.len(), 2);
    assert_abs_diff_eq!(d.components[0].weight, 0.625, epsilon = 1e-14);
    assert_abs_diff_eq!(d.components[1].weight, 0.375, epsilon = 1e-14);
    assert_abs_diff_eq!(d.components[0].pure.to_vec4(), Vector4::new(1.0, 0.6, 0.0, 0.8), epsilon = 1e-14);
    assert_abs_diff_eq!(d.components[1].pure.to_vec4(), Vector4::new(1.0, 0.6, 0.0, -0.8), epsilon = 1e-14);
    let c = concurrence(&phi, &state).unwrap();
    assert_abs_diff_eq!(c, 0.48, epsilon = 1e-14);
    for comp in &d.components {
        assert_abs_diff_eq!(pure_concurrence(&phi, &comp.pure), c, epsilon = 1e-12);
    }
}

#[test]
fn pure_input_is_its_own_decomposition() {
    let phi = AffineMap::axial(0.9, 0.1, 0.3).unwrap();
    let pole = FourVector::new(1.0, 0.0, 0.0, 1.0);
    let d = optimal_decomposition(&phi, &pole).unwrap();
    assert_eq!(d.components, vec![Component { weight: 1.0, pure: pole }]);
}

#[test]
fn axial_decomposition_through_center() {
    let phi = AffineMap::axial(0.9, 0.1, 0.3).unwrap();
    let center = FourVector::new(1.0, 0.0, 0.0, 0.0);
    let sol = solve_w0(&phi).unwrap();
    let d = sol.decomposition(&center).unwrap();
    assert_abs_diff_eq!(d.components[0].weight, 0.5, epsilon = 1e-14);
    assert_abs_diff_eq!(d.components[1].weight, 0.5, epsilon = 1e-14);
    assert_abs_diff_eq!(d.components[0].pure.x, Vector3::new(0.0, 0.0, 1.0), epsilon = 1e-14);
    assert_abs_diff_eq!(d.components[1].pure.x, Vector3::new(0.0, 0.0, -1.0), epsilon = 1e-14);
    let avg = d.average(|p| pure_concurrence(&phi, p));
    assert_abs_diff_eq!(avg, sol.concurrence(&center).unwrap(), epsilon = 1e-12);
}

#[test]
fn full_kernel_gives_flagged_diameter() {
    let phi = AffineMap::identity();
    let state = FourVector::new(1.0, 0.0, 0.3, 0.4);
    let d = optimal_decomposition(&phi, &state).unwrap();
    assert!(d.degenerate_leaf);
    assert_abs_diff_eq!(d.components[0].pure.x, Vector3::new(0.0, 0.6, 0.8), epsilon = 1e-15);
    assert_abs_diff_eq!(d.reconstruct().to_vec4(), state.to_vec4(), epsilon = 1e-15);
}

#[test]
fn error_paths() {
    let phi = AffineMap::identity();
    assert!(matches!(
        concurrence(&phi, &FourVector::new(0.5, 0.0, 0.0, 0.0)),
        Err(Error::InvalidState(_))
    ));
    assert!(matches!(
        concurrence(&phi, &FourVector::new(1.0, 0.8, 0.8, 0.0)),
        Err(Error::InvalidState(_))
    ));
    let bad = AffineMap::new(diag(0.5, 0.5, 0.5), Vector3::new(0.0, 0.0, 0.6));
    assert!(matches!(solve_w0(&bad), Err(Error::NotPositiveMap { .. })));
    assert!(matches!(
        optimal_decomposition(&bad, &FourVector::new(1.0, 0.0, 0.0, 0.0)),
        Err(Error::NotPositiveMap { .. })
    ));
}

#[test]
fn bisection_route_agrees_with_pencil() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let phi = sample::rotated_canonical_map(&mut rng);
        let q0 = base_matrix(&phi);
        let eta = MinkowskiMetric::matrix();
        let f = |w: f64| min_eigenvalue(&(q0 - eta * w));
        let (w1, _) = bisect_window(&f, -1.0, 2.0, DEFAULT_TOL_PSD * q0.norm().max(1.0)).unwrap();
        let sol = solve_w0(&phi).unwrap();
        assert!((w1 - sol.w0).abs() < 1e-6, "{w1} vs {}", sol.w0);
    }
}

#[test]
fn pencil_candidates_are_degeneracy_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let phi = sample::rotated_canonical_map(&mut rng);
        let q0 = base_matrix(&phi);
        let norm = q0.norm();
        for w in pencil_candidates(&q0, norm.max(1.0)).unwrap() {
            let det = build_q(&phi, w).matrix.determinant();
            assert!(det.abs() <= 1e-8 * norm.powi(4).max(1e-300) + 1e-14, "det {det} at {w}");
        }
    }
}

#[test]
fn psd_window_is_convex_and_endpoints_have_the_right_causality() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let phi = sample::rotated_canonical_map(&mut rng);
        let sol = solve_w0(&phi).unwrap();
        let (w1, w2) = sol.psd_interval;
        assert!(w1 <= w2);
        let tol = DEFAULT_TOL_PSD * base_matrix(&phi).norm().max(1.0);
        let u: f64 = rand::Rng::random(&mut rng);
        let v: f64 = rand::Rng::random(&mut rng);
        let (a, b) = (w1 + u * (w2 - w1), w1 + v * (w2 - w1));
        for w in [a, b, 0.5 * (a + b)] {
            assert!(build_q(&phi, w).min_eigenvalue() >= -tol);
        }
        assert_ne!(sol.n_class, CausalClass::TimeLike);
        if w2 - w1 > 1e-6 {
            let k = kernel_of(&build_q(&phi, w2).matrix, 10.0 * tol);
            assert!(min_minkowski_square(&k) > 0.0);
        }
    }
}

#[test]
fn beta_scaling_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..200 {
        let beta = rand::Rng::random_range(&mut rng, 1e-3..1.0);
        let p = sample::canonical_params_with_beta(&mut rng, beta);
        let inner = AffineMap::from_canonical(&p).unwrap();
        let outer = AffineMap::from_canonical(&p.on_boundary()).unwrap();
        let w: f64 = rand::Rng::random(&mut rng);
        let mut rhs = build_q(&outer, w / (beta * beta)).matrix * (beta * beta);
        rhs[(0, 0)] += 1.0 - beta * beta;
        assert_abs_diff_eq!(build_q(&inner, w).matrix, rhs, epsilon = 1e-12);
    }
}

#[test]
fn homogeneity() {
    let phi = AffineMap::axial(0.7, 0.2, 0.4).unwrap();
    let sol = solve_w0(&phi).unwrap();
    let x = FourVector::new(1.0, 0.2, -0.1, 0.3);
    for s in [0.5, 2.0, 4.0, 0.25] {
        assert_eq!(sol.form.eval(&x.scale(s)), s * s * sol.form.eval(&x));
    }
}
