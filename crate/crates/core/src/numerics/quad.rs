//! Composite Newton–Cotes rules on uniform samples.

/// Integrates uniformly spaced samples `y[0..n]` with step `h`.
///
/// Composite Simpson on an even number of panels; when the panel count is
/// odd the last three panels use the 3/8 rule. Fewer than three samples fall
/// back to the trapezoid rule.
pub fn simpson(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (y[0] + y[1]),
        3 => h / 3.0 * (y[0] + 4.0 * y[1] + y[2]),
        _ => {
            let panels = n - 1;
            if panels % 2 == 0 {
                simpson_even(y, h)
            } else {
                let head = simpson_even(&y[..n - 3], h);
                let t = &y[n - 4..];
                head + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])
            }
        }
    }
}

fn simpson_even(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    debug_assert!(n % 2 == 1);
    if n == 1 {
        return 0.0;
    }
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, v) in y.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (y[0] + y[n - 1] + 4.0 * odd + 2.0 * even)
}

/// Composite Simpson of a function on `[a, b]` with `panels` (rounded up to even).
pub fn simpson_fn<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(2) + panels % 2;
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}
