//! Gauss–Legendre rules: fixed, composite and adaptive.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A rule mapped onto `[a, b]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn on_interval(n: usize, a: f64, b: f64) -> Rule {
        let (x, w) = gauss_legendre(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Rule {
            nodes: x.iter().map(|t| mid + half * t).collect(),
            weights: w.iter().map(|wi| half * wi).collect(),
        }
    }

    /// Composite rule over `[a, b]` split at the given interior breakpoints.
    /// The node budget `n` is shared in proportion to panel width with at
    /// least `min_per_panel` nodes each.
    pub fn panels(breaks: &[f64], a: f64, b: f64, n: usize, min_per_panel: usize) -> Rule {
        let mut cuts: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|t| *t > a + 1e-12 && *t < b - 1e-12)
            .collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);

        let mut rule = Rule {
            nodes: Vec::with_capacity(n + cuts.len() * min_per_panel),
            weights: Vec::with_capacity(n + cuts.len() * min_per_panel),
        };
        for pair in cuts.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let share = (n as f64 * (hi - lo) / (b - a)).round() as usize;
            let panel = Rule::on_interval(share.max(min_per_panel), lo, hi);
            rule.nodes.extend(panel.nodes);
            rule.weights.extend(panel.weights);
        }
        rule
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Composite Gauss–Legendre with `panels` equal panels of `order` nodes.
pub fn composite(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * h;
            let mid = lo + 0.5 * h;
            x.iter()
                .zip(&w)
                .map(|(t, wt)| wt * f(mid + 0.5 * h * t))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

/// Adaptive bisection comparing a 20-point rule with its two halves. The
/// local tolerance never drops below the round-off level of the panel.
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (x, w) = gauss_legendre(20);
    let rule = |lo: f64, hi: f64| {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        x.iter().zip(&w).map(|(t, wt)| wt * f(mid + half * t)).sum::<f64>() * half
    };
    fn recurse(
        rule: &dyn Fn(f64, f64) -> f64,
        lo: f64,
        hi: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let mid = 0.5 * (lo + hi);
        let left = rule(lo, mid);
        let right = rule(mid, hi);
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if depth == 0 || (left + right - whole).abs() <= tol.max(floor) {
            left + right
        } else {
            recurse(rule, lo, mid, left, 0.5 * tol, depth - 1)
                + recurse(rule, mid, hi, right, 0.5 * tol, depth - 1)
        }
    }
    let whole = rule(a, b);
    recurse(&rule, a, b, whole, tol, 40)
}
