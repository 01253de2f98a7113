//! Solver results against independent numerical oracles written here from
//! scratch: a finite-difference matrix eigenvalue, zero-energy shooting with
//! RK4, a brute-force scan and a direct quadrature.

use approx::assert_relative_eq;
use spectral_forge::dataset::read_series_csv;
use spectral_forge::eigensolver::spectral_curve;
use spectral_forge::observables::form_factor;
use spectral_forge::potential::scaled_energy;
use spectral_forge::{
    critical_coupling, energy_lower_bound, ground_state, ground_state_form_factor, PotentialShape, ProblemSetup,
};

fn setup(v: f64) -> ProblemSetup {
    ProblemSetup::new(1.0, v).unwrap()
}

/// Number of eigenvalues below `x` of the tridiagonal matrix with diagonal
/// `d` and constant off-diagonal `e`, from the signs of the LDL^T pivots.
fn sturm_count(d: &[f64], e: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for &di in &d[1..] {
        let prev = if q == 0.0 { 1e-300 } else { q };
        q = di - x - e * e / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest eigenvalue of the second-order finite-difference Hamiltonian on
/// `r_i = i h`, Dirichlet at `0` and `r_max`.
fn fd_ground_energy(f: impl Fn(f64) -> f64, v: f64, mass: f64, h: f64, r_max: f64) -> f64 {
    let n = (r_max / h) as usize - 1;
    let kin = 1.0 / (mass * h * h);
    let d: Vec<f64> = (1..=n).map(|i| 2.0 * kin + v * f(i as f64 * h)).collect();
    let (mut lo, mut hi) = (d.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * kin, 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(&d, -kin, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 * lo.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Richardson-extrapolated finite-difference energy, error O(h^4).
fn matrix_oracle(f: impl Fn(f64) -> f64 + Copy, v: f64, r_max: f64) -> f64 {
    let h = 0.004;
    let coarse = fd_ground_energy(f, v, 1.0, h, r_max);
    let fine = fd_ground_energy(f, v, 1.0, h / 2.0, r_max);
    (4.0 * fine - coarse) / 3.0
}

#[test]
fn ground_energies_match_matrix_diagonalization() {
    let yukawa = |r: f64| -(-0.5 * r).exp() / r;
    let hulthen = |r: f64| -1.0 / (r.exp() - 1.0);
    let cases: [(PotentialShape, &dyn Fn(f64) -> f64, f64, f64); 4] = [
        (PotentialShape::Coulomb, &|r: f64| -1.0 / r, 2.0, 30.0),
        (PotentialShape::Coulomb, &|r: f64| -1.0 / r, 3.0, 30.0),
        (PotentialShape::yukawa(0.5).unwrap(), &yukawa, 2.918, 40.0),
        (PotentialShape::hulthen(1.0).unwrap(), &hulthen, 4.0, 30.0),
    ];
    for (shape, f, v, r_max) in cases {
        let oracle = matrix_oracle(|r| f(r), v, r_max);
        let e = ground_state(&shape, setup(v)).unwrap().energy;
        assert!((e - oracle).abs() < 1e-6, "{shape} v = {v}: solver {e}, matrix {oracle}");
    }
}

#[test]
fn coulomb_curve_matches_matrix_oracle() {
    let curve = spectral_curve(&PotentialShape::Coulomb, &[1.0, 2.0, 3.0], 1.0).unwrap().curve;
    for (v, e) in curve.samples() {
        let oracle = matrix_oracle(|r| -1.0 / r, v, 40.0);
        assert!((e - oracle).abs() < 1e-6, "v = {v}: {e} vs {oracle}");
        assert!((e + v * v / 4.0).abs() < 1e-6);
    }
}

/// Zero-energy solution of `u'' = m v f u` by RK4 from the regular series
/// `u = r + (m v g0/2) r^2`. A bound state exists when `u` has a node on
/// `[0, r_end]` or is heading for one (`u u' < 0`) where `f` has died out.
fn binds_at_zero_energy(f: impl Fn(f64) -> f64, g0: f64, v: f64, r_end: f64) -> bool {
    let h = 1e-3;
    let mut r = 1e-6;
    let mut u = r + 0.5 * v * g0 * r * r;
    let mut du = 1.0 + v * g0 * r;
    let acc = |r: f64, u: f64| v * f(r) * u;
    while r < r_end {
        let (k1u, k1d) = (du, acc(r, u));
        let (k2u, k2d) = (du + 0.5 * h * k1d, acc(r + 0.5 * h, u + 0.5 * h * k1u));
        let (k3u, k3d) = (du + 0.5 * h * k2d, acc(r + 0.5 * h, u + 0.5 * h * k2u));
        let (k4u, k4d) = (du + h * k3d, acc(r + h, u + h * k3u));
        let u_next = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        if u_next <= 0.0 {
            return true;
        }
        u = u_next;
        r += h;
    }
    du < 0.0
}

fn critical_oracle(f: impl Fn(f64) -> f64 + Copy, g0: f64, r_end: f64, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > 1e-7 * hi {
        let mid = 0.5 * (lo + hi);
        if binds_at_zero_energy(f, g0, mid, r_end) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn critical_couplings_match_zero_energy_shooting() {
    let yukawa1 = |r: f64| -(-r).exp() / r;
    let oracle = critical_oracle(yukawa1, -1.0, 60.0, 1.0, 3.0);
    assert!((oracle - 1.6798).abs() < 1e-3, "oracle {oracle}");
    let v1 = critical_coupling(&PotentialShape::yukawa(1.0).unwrap(), 1.0).unwrap();
    assert_relative_eq!(v1, oracle, max_relative = 2e-4);

    let yukawa05 = |r: f64| -(-0.5 * r).exp() / r;
    let oracle = critical_oracle(yukawa05, -1.0, 120.0, 0.5, 2.0);
    let v1 = critical_coupling(&PotentialShape::yukawa(0.5).unwrap(), 1.0).unwrap();
    assert_relative_eq!(v1, oracle, max_relative = 2e-4);
    assert_relative_eq!(oracle, 0.5 * 1.6798, max_relative = 1e-3);

    let hulthen = |r: f64| -1.0 / (r.exp() - 1.0);
    let oracle = critical_oracle(hulthen, -1.0, 60.0, 0.5, 2.0);
    assert_relative_eq!(oracle, 1.0, max_relative = 1e-4);
    let v1 = critical_coupling(&PotentialShape::hulthen(1.0).unwrap(), 1.0).unwrap();
    assert_relative_eq!(v1, 1.0, max_relative = 2e-4);

    assert_eq!(critical_coupling(&PotentialShape::Coulomb, 1.0).unwrap(), 0.0);
}

fn lower_bound_scan(f: impl Fn(f64) -> f64, v: f64) -> f64 {
    let n = 400_000;
    let (a, b) = (1e-5f64.ln(), 1e3f64.ln());
    (0..=n)
        .map(|i| (a + (b - a) * i as f64 / n as f64).exp())
        .map(|r| 1.0 / (4.0 * r * r) + v * f(r))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn lower_bounds_match_brute_force_scan() {
    let cases: [(PotentialShape, &dyn Fn(f64) -> f64, f64); 3] = [
        (PotentialShape::Coulomb, &|r: f64| -1.0 / r, 2.0),
        (PotentialShape::yukawa(0.5).unwrap(), &|r: f64| -(-0.5 * r).exp() / r, 2.918),
        (PotentialShape::hulthen(1.0).unwrap(), &|r: f64| -1.0 / (r.exp() - 1.0), 4.0),
    ];
    for (shape, f, v) in cases {
        let lb = energy_lower_bound(&shape, setup(v)).unwrap();
        let scan = lower_bound_scan(f, v);
        assert!(lb <= scan + 1e-9, "{shape}: {lb} above scan {scan}");
        assert_relative_eq!(lb, scan, max_relative = 1e-6);
        assert!(lb <= ground_state(&shape, setup(v)).unwrap().energy);
    }
    assert_relative_eq!(energy_lower_bound(&PotentialShape::Coulomb, setup(2.0)).unwrap(), -4.0, max_relative = 1e-9);
}

/// `int_0^r_max sin(k r)/(k r) u(r)^2 dr` by composite Simpson.
fn quadrature_form_factor(u: impl Fn(f64) -> f64, k: f64, r_max: f64, n: usize) -> f64 {
    let h = r_max / n as f64;
    let g = |r: f64| {
        let x = k * r;
        let j0 = if x.abs() < 1e-8 { 1.0 } else { x.sin() / x };
        j0 * u(r) * u(r)
    };
    let mut s = g(0.0) + g(r_max);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn hydrogenic_form_factor_matches_quadrature() {
    let u = |r: f64| 2.0 * r * (-r).exp();
    let ks = [0.0, 0.5, 1.0, 2.0, 5.0, 20.0];
    let solved = ground_state_form_factor(&PotentialShape::Coulomb, setup(2.0), &ks).unwrap();
    for (&k, &value) in ks.iter().zip(solved.values()) {
        let oracle = quadrature_form_factor(u, k, 60.0, 400_000);
        let exact = (1.0 + k * k / 4.0).powi(-2);
        assert!((oracle - exact).abs() < 1e-10, "oracle at k = {k}");
        assert!((value - oracle).abs() < 1e-6, "k = {k}: {value} vs {oracle}");
    }
    assert!((solved.values()[3] - 0.25).abs() < 1e-4);
}

#[test]
fn small_momentum_series() {
    // <r^2> = int r^2 u^2 dr = 3 for u = 2 r exp(-r)
    let h = 1e-3;
    let u = spectral_forge::RadialWavefunction::from_fn(h, 60_000, -1.0, |r| 2.0 * r * (-r).exp()).unwrap();
    let k = 1e-3;
    let value = form_factor(&u, &[k]).unwrap().values()[0];
    let series = 1.0 - k * k * 3.0 / 6.0;
    assert!((value - series).abs() < 1e-9, "{value} vs {series}");
    assert!((value - 0.9999995).abs() < 1e-9);
}

#[test]
fn scaled_yukawa_matches_direct_solve() {
    let ratio = 0.5 / 0.15;
    let vs = [0.4, 0.8, 1.2, 2.0, 3.0];
    // reference samples placed exactly at ratio * v so no interpolation enters
    let knots: Vec<f64> = vs.iter().map(|v| ratio * v).collect();
    let reference = spectral_curve(&PotentialShape::yukawa(0.5).unwrap(), &knots, 1.0).unwrap().curve;
    let direct = PotentialShape::yukawa(0.15).unwrap();
    for &v in &vs {
        let gs = ground_state(&direct, setup(v)).unwrap();
        let scaled = scaled_energy(&reference, ratio, v).unwrap();
        assert!((scaled - gs.energy).abs() < 2.0 * gs.tolerance.max(1e-9), "v = {v}: {scaled} vs {}", gs.energy);
    }
}

#[test]
fn user_series_csv_round_trip() {
    let text = "series,mu,v,E\nmine,0.5,1.5,-0.1\nmine,0.5,2.5,-0.6\nmine,0.5,3.5,-1.4\n";
    let series = read_series_csv(text.as_bytes()).unwrap();
    assert_eq!(series.len(), 1);
    assert_eq!(series[0].points, vec![(1.5, -0.1), (2.5, -0.6), (3.5, -1.4)]);
}
