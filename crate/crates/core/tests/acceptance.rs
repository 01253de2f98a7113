//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report is printed even
//! when every check passes. Failing criteria are listed at the end; the exit
//! status is non-zero for them only with `SPECTRAL_FORGE_STRICT=1`, so the
//! remaining test binaries of a workspace run still execute.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use spectral_forge::dataset::{scaling_comparison, synthetic_scaling, RowOrigin};
use spectral_forge::geometry::{
    energy_from_kinetic_potential, envelope_energy_bound, k_function_from_curve, kinetic_potential_from_curve,
    KFunction, KineticPotential,
};
use spectral_forge::inversion::{forward_residuals, invert, max_abs_residual, synthetic_target, InversionConfig, InversionTrace};
use spectral_forge::observables::default_k_grid;
use spectral_forge::{
    builtin_dataset, coupling_for_energy, ground_state, ground_state_form_factor, PotentialShape, ProblemSetup,
    SeriesId, SpectralCurve,
};

struct Report {
    failed: Vec<String>,
}

impl Report {
    fn line(&mut self, id: impl std::fmt::Display, title: &str, pass: bool, summary: String) {
        println!("{} #{id} {title}: {summary}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id.to_string());
        }
    }
}

fn detail(text: String) {
    println!("       {text}");
}

fn setup(v: f64) -> ProblemSetup {
    ProblemSetup::new(1.0, v).unwrap()
}

fn energy(shape: &PotentialShape, v: f64) -> f64 {
    ground_state(shape, setup(v)).unwrap().energy
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn hulthen_exactness(rep: &mut Report) {
    let t = Instant::now();
    let h = PotentialShape::hulthen(1.0).unwrap();
    let mut worst: f64 = 0.0;
    for v in [2.0, 4.0, 9.5] {
        let exact = -((v - 1.0) / 2.0f64).powi(2);
        let e = energy(&h, v);
        detail(format!("v = {v}: E = {e:.12}, exact {exact:.12}"));
        worst = worst.max((e - exact).abs());
    }
    let dt = t.elapsed();
    rep.line(
        1,
        "Hulthen closed form",
        worst < 1e-6 && within(dt, 1.0),
        format!("max |dE| = {worst:.2e} (< 1e-6), {:.3} s (< 1 s)", dt.as_secs_f64()),
    );
}

fn coulomb_exactness(rep: &mut Report) {
    let t = Instant::now();
    let mut worst_e: f64 = 0.0;
    for v in [1.0, 2.0, 3.0] {
        let e = energy(&PotentialShape::Coulomb, v);
        worst_e = worst_e.max((e + v * v / 4.0).abs());
    }
    let curve = SpectralCurve::coulomb(1.0, &[1.0, 2.0, 3.0]).unwrap();
    let mut worst_k: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        let k = k_function_from_curve(&curve, &PotentialShape::Coulomb, r).unwrap().value;
        detail(format!("K({r}) = {k:.10}, 1/r^2 = {:.10}", 1.0 / (r * r)));
        worst_k = worst_k.max((k - 1.0 / (r * r)).abs());
    }
    let dt = t.elapsed();
    rep.line(
        2,
        "Coulomb closed form and K-function",
        worst_e < 1e-6 && worst_k < 1e-4 && within(dt, 1.0),
        format!(
            "max |E + v^2/4| = {worst_e:.2e} (< 1e-6), max |K - 1/r^2| = {worst_k:.2e} (< 1e-4), {:.3} s (< 1 s)",
            dt.as_secs_f64()
        ),
    );
}

fn yukawa_column(rep: &mut Report) {
    let t = Instant::now();
    let y = PotentialShape::yukawa(0.5).unwrap();
    let table = [(-0.01, 1.034), (-0.05, 1.285), (-0.10, 1.532), (-0.20, 1.848), (-0.50, 2.204), (-1.00, 2.918)];
    let mut worst: f64 = 0.0;
    for (e, v_ref) in table {
        let v = coupling_for_energy(&y, e, 1.0).unwrap();
        let rel = v / v_ref - 1.0;
        detail(format!("E = {e:+.2}: v = {v:.5}, reference {v_ref}, {:+.2}%", 100.0 * rel));
        worst = worst.max(rel.abs());
    }
    let dt = t.elapsed();
    rep.line(
        3,
        "Yukawa couplings by target energy",
        worst < 5e-3 && within(dt, 5.0),
        format!("max relative deviation {:.2}% (< 0.5%), {:.3} s (< 5 s)", 100.0 * worst, dt.as_secs_f64()),
    );
}

fn legendre_round_trip(rep: &mut Report) {
    let couplings: Vec<f64> = (0..12).map(|i| 1.5 + 0.75 * i as f64).collect();
    let interior = &couplings[1..11];
    let mut worst_rt: f64 = 0.0;
    let mut worst_product: f64 = 0.0;
    let curves = [
        ("coulomb", SpectralCurve::coulomb(1.0, &couplings).unwrap()),
        ("hulthen", SpectralCurve::hulthen(1.0, 1.0, &couplings).unwrap()),
    ];
    for (name, curve) in &curves {
        let fbar = KineticPotential::dual_of(curve);
        for &v in interior {
            let e = energy_from_kinetic_potential(&fbar, v).unwrap().value;
            let exact = curve.eval(v).unwrap();
            worst_rt = worst_rt.max(((e - exact) / exact).abs());

            // matched kinetic energy s = F - v F' and centered differences
            let hv = 1e-3 * v;
            let f = |x: f64| curve.eval(x).unwrap();
            let f2 = (f(v + hv) - 2.0 * f(v) + f(v - hv)) / (hv * hv);
            let slope = (f(v + hv) - f(v - hv)) / (2.0 * hv);
            let s = f(v) - v * slope;
            let hs = 1e-2 * s;
            let g = |x: f64| kinetic_potential_from_curve(curve, x).unwrap().value;
            let g2 = (g(s + hs) - 2.0 * g(s) + g(s - hs)) / (hs * hs);
            let product = f2 * g2 * v.powi(3);
            worst_product = worst_product.max((product + 1.0).abs());
        }
        detail(format!("{name}: checked {} interior couplings", interior.len()));
    }
    rep.line(
        4,
        "Legendre round trip and convexity product",
        worst_rt < 1e-5 && worst_product < 0.05,
        format!(
            "max relative round-trip error {worst_rt:.2e} (< 1e-5), max |v^3 F'' fbar'' + 1| = {worst_product:.2e} (< 0.05)"
        ),
    );
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn fixed_point(rep: &mut Report) {
    let t = Instant::now();
    let couplings: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64).collect();
    let target = SpectralCurve::coulomb(1.0, &couplings).unwrap();
    let config = InversionConfig { iterations: 1, ..InversionConfig::default() };
    let trace = invert(&target, &PotentialShape::Coulomb, &config).unwrap();
    let d = sup_diff(trace.iterate(0).unwrap(), trace.iterate(1).unwrap());
    let dt = t.elapsed();
    rep.line(
        5,
        "inversion fixed point",
        d < 1e-6 && within(dt, 10.0),
        format!("sup |f1 - f0| = {d:.2e} (< 1e-6), {:.3} s (< 10 s)", dt.as_secs_f64()),
    );
}

/// Sup-norm relative deviation from `shape` on `r in [0.5, 5]`.
fn relative_deviation(trace: &InversionTrace, n: usize, shape: &PotentialShape) -> f64 {
    trace
        .grid()
        .knots()
        .iter()
        .zip(trace.iterate(n).unwrap())
        .filter(|(r, _)| (0.5..=5.0).contains(*r))
        .map(|(&r, &f)| {
            let exact = shape.eval(r).unwrap();
            ((f - exact) / exact).abs()
        })
        .fold(0.0, f64::max)
}

fn yukawa_round_trip(rep: &mut Report) -> (Vec<f64>, InversionTrace) {
    let t = Instant::now();
    let y = PotentialShape::yukawa(0.5).unwrap();
    let couplings: Vec<f64> = (0..20).map(|i| 1.034 + (2.918 - 1.034) * i as f64 / 19.0).collect();
    let target = synthetic_target(&y, &couplings, 1.0).unwrap();
    let trace = invert(&target, &PotentialShape::Coulomb, &InversionConfig::default()).unwrap();
    let n = trace.iterations();
    let devs: Vec<String> = (0..=n).map(|i| format!("{:.3}", relative_deviation(&trace, i, &y))).collect();
    detail(format!("deviation by iteration: {}", devs.join(" ")));
    let dev = relative_deviation(&trace, n, &y);
    let res = max_abs_residual(&forward_residuals(&trace.final_shape().unwrap(), &target, 1.0));
    rep.line(
        6,
        "Yukawa round trip from Coulomb seed",
        dev < 0.02 && res <= 1e-3,
        format!(
            "sup relative deviation {dev:.3} (< 0.02), max |dE| = {res:.2e} (<= 1e-3), {:.1} s",
            t.elapsed().as_secs_f64()
        ),
    );
    (couplings, trace)
}

/// Two seeds on the same synthetic data should reach the same shape.
fn seed_uniqueness(rep: &mut Report, couplings: &[f64], coulomb_run: &InversionTrace) {
    let y = PotentialShape::yukawa(0.5).unwrap();
    let target = synthetic_target(&y, couplings, 1.0).unwrap();
    let seed = PotentialShape::hulthen(1.0).unwrap();
    let trace = invert(&target, &seed, &InversionConfig::default()).unwrap();
    let n = trace.iterations();
    let (a, b) = (coulomb_run.iterate(n).unwrap(), trace.iterate(n).unwrap());
    let agree = coulomb_run
        .grid()
        .knots()
        .iter()
        .zip(a.iter().zip(b))
        .filter(|(r, _)| (0.5..=5.0).contains(*r))
        .map(|(_, (x, y))| ((x - y) / x.abs().max(y.abs())).abs())
        .fold(0.0, f64::max);
    detail(format!("Hulthen seed: sup relative deviation from Yukawa {:.3}", relative_deviation(&trace, n, &y)));
    rep.line(
        "U",
        "seed independence (Coulomb vs Hulthen)",
        agree < 0.05,
        format!("sup relative disagreement of f{n} on [0.5, 5] = {agree:.3} (< 0.05)"),
    );
}

fn bs_inversions() -> Vec<(SeriesId, SpectralCurve, InversionTrace)> {
    let data = builtin_dataset();
    SeriesId::BETHE_SALPETER
        .iter()
        .map(|&id| {
            let curve = data.curve(id).unwrap();
            let trace = invert(&curve, &PotentialShape::Coulomb, &InversionConfig::default()).unwrap();
            (id, curve, trace)
        })
        .collect()
}

fn bs_self_consistency(rep: &mut Report, runs: &[(SeriesId, SpectralCurve, InversionTrace)]) {
    let mut worst: f64 = 0.0;
    for (id, curve, trace) in runs {
        let res = forward_residuals(&trace.final_shape().unwrap(), curve, 1.0);
        let rows: Vec<String> = res
            .iter()
            .map(|r| match r.residual {
                Some(x) => format!("{}:{x:+.4}", r.coupling),
                None => format!("{}:unbound", r.coupling),
            })
            .collect();
        let m = max_abs_residual(&res);
        detail(format!("{id}: max |dE| = {m:.4}; {}", rows.join(" ")));
        worst = worst.max(if res.iter().any(|r| r.residual.is_none()) { f64::INFINITY } else { m });
    }
    rep.line(
        7,
        "Bethe-Salpeter data reproduced by f8",
        worst <= 0.01,
        format!("max |dE| over all rows = {worst:.4} (<= 0.01)"),
    );
}

fn scaling(rep: &mut Report) {
    let rows = scaling_comparison(&builtin_dataset()).unwrap();
    let row = rows.iter().find(|r| r.origin == RowOrigin::Mapped && r.v == 2.0136);
    let exact = row.and_then(|r| r.e_scaled) == Some(-0.09);
    detail(format!("row at v = 2.0136: {:?}", row.and_then(|r| r.e_scaled)));
    let synth = synthetic_scaling(0.5, 0.15, &[0.5, 1.0, 1.5, 2.0, 3.0], 1.0).unwrap();
    let worst = synth.iter().map(|r| r.discrepancy.unwrap().abs()).fold(0.0, f64::max);
    rep.line(
        8,
        "exchange-mass scaling",
        exact && worst < 1e-6,
        format!("E_scaled(2.0136) == -0.09: {exact}; synthetic Yukawa max discrepancy {worst:.2e} (< 1e-6)"),
    );
}

fn form_factors(rep: &mut Report, runs: &[(SeriesId, SpectralCurve, InversionTrace)]) {
    let k = default_k_grid();
    let mut worst_norm: f64 = 0.0;
    let hydrogen = ground_state_form_factor(&PotentialShape::Coulomb, setup(2.0), &[0.0, 2.0]).unwrap();
    worst_norm = worst_norm.max((hydrogen.values()[0] - 1.0).abs());
    let f2 = hydrogen.values()[1];
    let mut half = Vec::new();
    for (id, _, trace) in runs {
        let ff = ground_state_form_factor(&trace.final_shape().unwrap(), setup(5.0), &k).unwrap();
        worst_norm = worst_norm.max((ff.values()[0] - 1.0).abs());
        let kh = ff.half_max_crossing().unwrap_or(f64::NAN);
        detail(format!("{id}: k_half = {kh:.4}, E = {:.4}", ff.meta().energy));
        half.push((*id, kh));
    }
    let get = |id| half.iter().find(|(i, _)| *i == id).unwrap().1;
    let (lcl, l05, l015) = (get(SeriesId::LadderCrossLadder05), get(SeriesId::Ladder05), get(SeriesId::Ladder015));
    let order = lcl > l05 && l05 > l015;
    rep.line(
        9,
        "form factors",
        worst_norm < 1e-6 && (f2 - 0.25).abs() < 1e-4 && order,
        format!(
            "max |F(0) - 1| = {worst_norm:.2e} (< 1e-6), hydrogenic F(2) = {f2:.8} (0.25 +- 1e-4), \
             k_half order L+CL 0.5 > L 0.5 > L 0.15: {lcl:.3} > {l05:.3} > {l015:.3} is {order}"
        ),
    );
}

fn envelope_direction(rep: &mut Report) {
    let k = KFunction::coulomb(1.0);
    // the envelope itself binds only above v = mu e (Yukawa) and about 1.544
    // (Hulthen); below that its minimum runs off to r = infinity
    let cases = [
        (PotentialShape::yukawa(0.15).unwrap(), [0.6, 1.0, 2.0, 3.5, 5.315]),
        (PotentialShape::yukawa(0.5).unwrap(), [1.5, 1.8, 2.5, 2.918, 5.0]),
        (PotentialShape::hulthen(1.0).unwrap(), [2.0, 3.0, 4.0, 6.0, 9.5]),
    ];
    let mut holds = true;
    let mut min_gap = f64::INFINITY;
    for (shape, vs) in &cases {
        for &v in vs {
            let bound = envelope_energy_bound(&k, shape, v).unwrap().value;
            let e = energy(shape, v);
            min_gap = min_gap.min(bound - e);
            holds &= bound >= e;
        }
    }
    let mut worst_eq: f64 = 0.0;
    for v in [0.5, 1.0, 2.0, 3.0, 5.0] {
        let bound = envelope_energy_bound(&k, &PotentialShape::Coulomb, v).unwrap().value;
        worst_eq = worst_eq.max((bound - energy(&PotentialShape::Coulomb, v)).abs());
    }
    rep.line(
        10,
        "envelope bound direction",
        holds && worst_eq < 1e-6,
        format!("min (bound - E) = {min_gap:.3e} (>= 0); Coulomb basis max |bound - E| = {worst_eq:.2e} (< 1e-6)"),
    );
}

fn main() -> ExitCode {
    let mut rep = Report { failed: Vec::new() };
    hulthen_exactness(&mut rep);
    coulomb_exactness(&mut rep);
    yukawa_column(&mut rep);
    legendre_round_trip(&mut rep);
    fixed_point(&mut rep);
    let (couplings, coulomb_run) = yukawa_round_trip(&mut rep);
    seed_uniqueness(&mut rep, &couplings, &coulomb_run);
    let runs = bs_inversions();
    bs_self_consistency(&mut rep, &runs);
    scaling(&mut rep);
    form_factors(&mut rep, &runs);
    envelope_direction(&mut rep);
    if rep.failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {}", rep.failed.join(", "));
        if std::env::var("SPECTRAL_FORGE_STRICT").is_ok_and(|v| v == "1") {
            ExitCode::FAILURE
        } else {
            ExitCode::SUCCESS
        }
    }
}
