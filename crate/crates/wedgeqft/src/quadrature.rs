//! Gauss–Legendre rules and an adaptive Gauss–Kronrod integrator for
//! complex-valued integrands on finite intervals.

use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::C64;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the n-point rule on [-1, 1] by Newton iteration on P_n.
    pub fn compute(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> C64>(&self, a: f64, b: f64, mut f: F) -> C64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = C64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared, lazily built Gauss–Legendre rule of order `n`.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(GaussLegendre::compute(n));
    cache
        .lock()
        .expect("quadrature cache poisoned")
        .entry(n)
        .or_insert(rule)
        .clone()
}

/// Composite Gauss–Legendre: `panels` equal panels of `order` nodes each.
pub fn composite_gl<F: FnMut(f64) -> C64>(a: f64, b: f64, panels: usize, order: usize, mut f: F) -> C64 {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        acc += rule.integrate(lo, lo + h, &mut f);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: C64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> C64>(a: f64, b: f64, f: &mut F) -> (C64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    ((kron * half), ((kron - gauss) * half).norm())
}

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive 7/15-point Gauss–Kronrod integration on [a, b].
///
/// Bisects the segment with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)` or `max_segments` is hit.
pub fn adaptive_gk<F: FnMut(f64) -> C64>(
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
    mut f: F,
) -> Integral {
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(a, b, &mut f);
    heap.push(Segment { a, b, value: v, error: e });
    let mut evaluations = 15;
    loop {
        let total: C64 = heap.iter().map(|s| s.value).sum();
        let err: f64 = heap.iter().map(|s| s.error).sum();
        let target = abs_tol.max(rel_tol * total.norm());
        if err <= target || heap.len() >= max_segments {
            return Integral {
                value: total,
                error: err,
                evaluations,
                converged: err <= target,
            };
        }
        let worst = heap.pop().expect("segment heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(worst.a, m, &mut f);
        let (v2, e2) = gk15(m, worst.b, &mut f);
        evaluations += 30;
        heap.push(Segment { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: worst.b, value: v2, error: e2 });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64] {
            let rule = GaussLegendre::compute(n);
            let w: f64 = rule.weights.iter().sum();
            assert!((w - 2.0).abs() < 1e-13, "n={n} weight sum {w}");
            let deg = 2 * n - 1;
            let got = rule.integrate(-1.0, 1.0, |x| C64::new(x.powi(deg as i32 - 1), 0.0));
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((got.re - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn high_order_nodes_sorted_and_inside() {
        let rule = GaussLegendre::compute(1000);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(rule.nodes[0] > -1.0 && rule.nodes[999] < 1.0);
        let got = rule.integrate(0.0, std::f64::consts::PI, |x| C64::new(x.sin(), 0.0));
        assert!((got.re - 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_oscillation_and_peaks() {
        let r = adaptive_gk(-8.0, 8.0, 1e-13, 1e-12, 4000, |x| C64::new(0.0, 3.0 * x).exp() * (-x * x).exp());
        let exact = std::f64::consts::PI.sqrt() * (-9.0f64 / 4.0).exp();
        assert!(r.converged);
        assert!((r.value.re - exact).abs() < 1e-12 && r.value.im.abs() < 1e-12);
        let p = adaptive_gk(-1.0, 1.0, 1e-14, 1e-12, 4000, |x| C64::new(1.0 / (1e-4 + x * x), 0.0));
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((p.value.re - exact).abs() / exact < 1e-11);
    }

    #[test]
    fn composite_matches_single_panel() {
        let a = composite_gl(-2.0, 3.0, 7, 12, |x| C64::new(x.cos(), x));
        let exact = 3f64.sin() + 2f64.sin();
        assert!((a.re - exact).abs() < 1e-14);
        assert!((a.im - 2.5).abs() < 1e-13);
    }
}
