//! Gaussian-kernel one-class SVM in the minimum-enclosing-ball (SVDD)
//! formulation, trained directly on the impure sample set.
//!
//! The dual is the box-constrained simplex QP
//!
//! ```text
//!   minimize    a' K a  -  sum_i a_i k(x_i, x_i)
//!   subject to  0 <= a_i <= 1/(nu m),   sum_i a_i = 1
//! ```
//!
//! where `K` is the Gaussian Gram matrix. With this kernel the linear term
//! is the constant 1, so the solver minimizes `a' K a` and the reported
//! dual objective subtracts 1. The solver is projected gradient descent
//! with Barzilai-Borwein steps, Armijo backtracking along the projection
//! arc, and an exact projection onto the capped simplex; convergence is
//! declared on the unit-step fixed-point residual
//! `max_i |a - P(a - grad f(a))|`.
//!
//! Training requires `nu > 2/m`. That bound keeps every dual coefficient
//! below 1/2, which is what forces the learned ball boundary closer to a
//! single outlier than to any of the clustered samples, so ranking training
//! points by their distance to the center reads the outlier off the top.

use std::fmt;

use serde::{Deserialize, Serialize};

// ── Errors ──────────────────────────────────────────────────────────────────

#[derive(Debug)]
pub enum SvmError {
    /// `nu <= 2/m`: the impure-training guarantee does not hold.
    NuTooSmall { nu: f64, m: usize },
    /// Fewer than 3 training samples.
    TooFewSamples { m: usize },
    /// Inconsistent dimensions, non-finite features, or bad settings.
    Invalid(String),
}

impl fmt::Display for SvmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NuTooSmall { nu, m } => write!(
                f,
                "nu = {nu} is too small for m = {m} samples: the outlier guarantee \
                 requires nu > 2/m = {}",
                2.0 / *m as f64
            ),
            Self::TooFewSamples { m } => write!(f, "need at least 3 samples, got {m}"),
            Self::Invalid(msg) => write!(f, "invalid SVM input: {msg}"),
        }
    }
}

impl std::error::Error for SvmError {}

pub type Result<T> = std::result::Result<T, SvmError>;

// ── Kernel ──────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Gaussian,
}

/// Gaussian kernel `k(x, y) = exp(-|x - y|^2 / s)` with bandwidth `s`.
///
/// `k(x, x) = 1` and `k(x, y) < 1` for `x != y`; both properties are load
/// bearing for the distance computation below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub bandwidth: f64,
}

impl KernelSpec {
    pub fn gaussian(bandwidth: f64) -> Self {
        Self {
            kind: KernelKind::Gaussian,
            bandwidth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0) || !self.bandwidth.is_finite() {
            return Err(SvmError::Invalid(format!(
                "kernel bandwidth must be a positive real, got {}",
                self.bandwidth
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        let mut d2 = 0.0;
        for (a, b) in x.iter().zip(y) {
            let d = a - b;
            d2 += d * d;
        }
        (-d2 / self.bandwidth).exp()
    }
}

/// Symmetric Gram matrix with unit diagonal.
pub fn gram(features: &[Vec<f64>], kernel: &KernelSpec) -> Vec<Vec<f64>> {
    let m = features.len();
    let mut k = vec![vec![0.0; m]; m];
    for i in 0..m {
        k[i][i] = 1.0;
        for j in 0..i {
            let v = kernel.eval(&features[i], &features[j]);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    k
}

// ── Settings ────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpSettings {
    /// Outlier-fraction bound in (0, 1); must exceed `2/m` at train time.
    pub nu: f64,
    pub max_iters: usize,
    /// Fixed-point residual bound for convergence, and the margin used to
    /// classify coefficients against their box bounds.
    pub tolerance: f64,
    /// Reserved for randomized restarts; the deterministic start from the
    /// uniform feasible point has not needed them.
    pub rng_seed: u64,
}

impl Default for QpSettings {
    fn default() -> Self {
        Self {
            nu: 0.4,
            max_iters: 50_000,
            tolerance: 1e-8,
            rng_seed: 0,
        }
    }
}

// ── Model ───────────────────────────────────────────────────────────────────

/// Trained ball model: dual coefficients plus the derived geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallModel {
    pub alphas: Vec<f64>,
    pub training_features: Vec<Vec<f64>>,
    pub kernel: KernelSpec,
    pub nu: f64,
    /// `|c|^2 = a' K a` for the center `c = sum_i a_i phi(x_i)`.
    pub center_norm_sq: f64,
    /// Squared ball radius; the decision threshold.
    pub radius_sq: f64,
    /// Indices whose distances defined `radius_sq`: the strictly
    /// interior-box support vectors, or the farthest positive-alpha sample
    /// when none is strictly interior.
    pub boundary_sv_indices: Vec<usize>,
    /// False when the solver hit `max_iters` above tolerance; the model then
    /// holds the best iterate seen.
    pub converged: bool,
    pub kkt_residual: f64,
    pub iterations: usize,
}

/// Sign and margin of one decision: `label` is +1 inside the ball
/// (boundary included), -1 outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub label: i32,
    pub margin: f64,
}

impl BallModel {
    /// Squared kernel-space distance from `x` to the ball center, clamped
    /// at zero against round-off.
    pub fn distance_sq(&self, x: &[f64]) -> f64 {
        let kxx = self.kernel.eval(x, x);
        let mut cross = 0.0;
        for (a, xi) in self.alphas.iter().zip(&self.training_features) {
            cross += a * self.kernel.eval(xi, x);
        }
        (kxx - 2.0 * cross + self.center_norm_sq).max(0.0)
    }

    /// Decision for one sample: margin `R^2 - |phi(x) - c|^2`, positive or
    /// zero inside.
    pub fn decide(&self, x: &[f64]) -> Decision {
        let margin = self.radius_sq - self.distance_sq(x);
        Decision {
            label: if margin >= 0.0 { 1 } else { -1 },
            margin,
        }
    }

    /// Ranks samples by ascending margin: the most outlying sample first.
    /// Exact ties break toward the lower index.
    pub fn rank_by_margin(&self, features: &[Vec<f64>]) -> Vec<(usize, f64)> {
        let mut ranked: Vec<(usize, f64)> = features
            .iter()
            .map(|x| self.decide(x).margin)
            .enumerate()
            .collect();
        ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        ranked
    }

    /// Dual objective at the trained coefficients, in the
    /// `a'Ka - sum_i a_i k(x_i,x_i)` form (the linear term is 1 under the
    /// Gaussian kernel).
    pub fn dual_objective(&self) -> f64 {
        self.center_norm_sq - 1.0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SvmError::Invalid(format!("model JSON: {e}")))
    }
}

// ── Training ────────────────────────────────────────────────────────────────

/// Solves the dual and assembles the ball geometry.
pub fn train(features: Vec<Vec<f64>>, settings: &QpSettings, kernel: &KernelSpec) -> Result<BallModel> {
    let m = features.len();
    if m < 3 {
        return Err(SvmError::TooFewSamples { m });
    }
    let dim = features[0].len();
    for (i, x) in features.iter().enumerate() {
        if x.len() != dim {
            return Err(SvmError::Invalid(format!(
                "feature {i} has dimension {}, expected {dim}",
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::Invalid(format!("feature {i} has a non-finite value")));
        }
    }
    kernel.validate()?;
    if !(settings.nu > 0.0 && settings.nu < 1.0) {
        return Err(SvmError::Invalid(format!(
            "nu must lie in (0, 1), got {}",
            settings.nu
        )));
    }
    if settings.nu * m as f64 <= 2.0 {
        return Err(SvmError::NuTooSmall {
            nu: settings.nu,
            m,
        });
    }

    let k = gram(&features, kernel);
    let upper = 1.0 / (settings.nu * m as f64);
    let solve = solve_dual(&k, upper, settings);

    let k_alpha = matvec(&k, &solve.alpha);
    let center_norm_sq: f64 = solve.alpha.iter().zip(&k_alpha).map(|(a, ka)| a * ka).sum();

    // distance of training point i: k_ii - 2 (K a)_i + |c|^2, with k_ii = 1
    let dist: Vec<f64> = k_alpha
        .iter()
        .map(|ka| (1.0 - 2.0 * ka + center_norm_sq).max(0.0))
        .collect();

    let tol = settings.tolerance;
    let interior: Vec<usize> = (0..m)
        .filter(|&i| solve.alpha[i] > tol && solve.alpha[i] < upper - tol)
        .collect();
    let (radius_sq, boundary_sv_indices) = if !interior.is_empty() {
        let mean = interior.iter().map(|&i| dist[i]).sum::<f64>() / interior.len() as f64;
        (mean, interior)
    } else {
        // no strictly interior coefficient: fall back to the farthest
        // support vector
        let mut best = None;
        for i in 0..m {
            if solve.alpha[i] > tol {
                match best {
                    None => best = Some(i),
                    Some(j) if dist[i] > dist[j] => best = Some(i),
                    _ => {}
                }
            }
        }
        let i = best.unwrap_or(0);
        (dist[i], vec![i])
    };

    Ok(BallModel {
        alphas: solve.alpha,
        training_features: features,
        kernel: *kernel,
        nu: settings.nu,
        center_norm_sq,
        radius_sq: radius_sq.max(0.0),
        boundary_sv_indices,
        converged: solve.converged,
        kkt_residual: solve.residual,
        iterations: solve.iterations,
    })
}

struct DualSolve {
    alpha: Vec<f64>,
    residual: f64,
    iterations: usize,
    converged: bool,
}

/// Projected gradient on `{0 <= a <= upper, sum a = 1}` for `min a'Ka`.
fn solve_dual(k: &[Vec<f64>], upper: f64, settings: &QpSettings) -> DualSolve {
    let m = k.len();
    let mut alpha = project_capped_simplex(&vec![1.0 / m as f64; m], upper);
    let mut grad = gradient(k, &alpha);
    let mut obj = 0.5 * dot(&alpha, &grad); // a'Ka = a.(2Ka)/2

    let mut best_alpha = alpha.clone();
    let mut best_residual = f64::INFINITY;

    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let t0 = 1.0 / (2.0 * m as f64); // 1 / (2 lambda_max bound)
    let mut iterations = 0;

    for iter in 0..settings.max_iters {
        iterations = iter;
        let residual = fixed_point_residual(&alpha, &grad, upper);
        if residual < best_residual {
            best_residual = residual;
            best_alpha.copy_from_slice(&alpha);
        }
        if residual <= settings.tolerance {
            return DualSolve {
                alpha,
                residual,
                iterations,
                converged: true,
            };
        }

        // Barzilai-Borwein step from the previous pair, clamped
        let mut t = match &prev {
            Some((s, y)) => {
                let sy = dot(s, y);
                if sy > 1e-300 {
                    (dot(s, s) / sy).clamp(1e-10, 1e10)
                } else {
                    t0
                }
            }
            None => t0,
        };

        // Armijo backtracking along the projection arc
        let mut cand;
        let mut cand_grad;
        let mut cand_obj;
        let mut halvings = 0;
        loop {
            let step: Vec<f64> = alpha.iter().zip(&grad).map(|(a, g)| a - t * g).collect();
            cand = project_capped_simplex(&step, upper);
            let d: Vec<f64> = cand.iter().zip(&alpha).map(|(c, a)| c - a).collect();
            cand_grad = gradient(k, &cand);
            cand_obj = 0.5 * dot(&cand, &cand_grad);
            let slope = dot(&grad, &d);
            if cand_obj <= obj + 1e-4 * slope || halvings >= 60 {
                break;
            }
            t *= 0.5;
            halvings += 1;
        }

        let s: Vec<f64> = cand.iter().zip(&alpha).map(|(c, a)| c - a).collect();
        let y: Vec<f64> = cand_grad.iter().zip(&grad).map(|(cg, g)| cg - g).collect();
        prev = Some((s, y));
        alpha = cand;
        grad = cand_grad;
        obj = cand_obj;
    }

    let residual = fixed_point_residual(&alpha, &grad, upper);
    if residual < best_residual {
        best_residual = residual;
        best_alpha.copy_from_slice(&alpha);
    }
    DualSolve {
        converged: best_residual <= settings.tolerance,
        alpha: best_alpha,
        residual: best_residual,
        iterations,
    }
}

fn gradient(k: &[Vec<f64>], alpha: &[f64]) -> Vec<f64> {
    matvec(k, alpha).into_iter().map(|v| 2.0 * v).collect()
}

fn matvec(k: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    k.iter().map(|row| dot(row, x)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `max_i |a - P(a - grad)|`: zero exactly at KKT points.
fn fixed_point_residual(alpha: &[f64], grad: &[f64], upper: f64) -> f64 {
    let step: Vec<f64> = alpha.iter().zip(grad).map(|(a, g)| a - g).collect();
    let proj = project_capped_simplex(&step, upper);
    alpha
        .iter()
        .zip(&proj)
        .map(|(a, p)| (a - p).abs())
        .fold(0.0, f64::max)
}

/// Euclidean projection onto `{x : 0 <= x_i <= upper, sum x = 1}`.
///
/// The projection is `x_i = clamp(v_i - tau, 0, upper)` for the unique
/// `tau` with `sum_i x_i = 1`; `tau` is found exactly by scanning the
/// sorted breakpoints of the piecewise-linear sum. Requires
/// `m * upper >= 1`, which `upper = 1/(nu m)` with `nu < 1` guarantees.
pub fn project_capped_simplex(v: &[f64], upper: f64) -> Vec<f64> {
    let m = v.len();
    assert!(m > 0 && upper > 0.0 && m as f64 * upper >= 1.0 - 1e-12);

    let mut bps: Vec<f64> = Vec::with_capacity(2 * m);
    for &vi in v {
        bps.push(vi);
        bps.push(vi - upper);
    }
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let sum_at = |tau: f64| -> f64 { v.iter().map(|&vi| (vi - tau).clamp(0.0, upper)).sum() };

    // g(tau) is non-increasing: find the last breakpoint with g >= 1
    let mut lo = 0;
    let mut hi = bps.len() - 1;
    if sum_at(bps[hi]) >= 1.0 {
        lo = hi;
    } else {
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if sum_at(bps[mid]) >= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    // solve on the segment [bps[lo], bps[lo+1]] using the classification at
    // its midpoint
    let tau = {
        let (a, b) = (bps[lo], bps[(lo + 1).min(bps.len() - 1)]);
        let mid = 0.5 * (a + b);
        let mut free = 0usize;
        let mut free_sum = 0.0;
        let mut capped = 0usize;
        for &vi in v {
            if vi - upper > mid {
                capped += 1;
            } else if vi > mid {
                free += 1;
                free_sum += vi;
            }
        }
        if free > 0 {
            (free_sum + capped as f64 * upper - 1.0) / free as f64
        } else {
            a
        }
    };

    let mut x: Vec<f64> = v.iter().map(|&vi| (vi - tau).clamp(0.0, upper)).collect();

    // distribute residual rounding over the free coordinates
    let gap = 1.0 - x.iter().sum::<f64>();
    if gap != 0.0 {
        let free: Vec<usize> = (0..m).filter(|&i| x[i] > 0.0 && x[i] < upper).collect();
        if !free.is_empty() {
            let share = gap / free.len() as f64;
            for i in free {
                x[i] = (x[i] + share).clamp(0.0, upper);
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(nu: f64) -> QpSettings {
        QpSettings {
            nu,
            ..QpSettings::default()
        }
    }

    struct Xor(u64);
    impl Xor {
        fn next(&mut self) -> f64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn gram_pinned_values() {
        let kernel = KernelSpec::gaussian(2.0);
        let x = vec![0.3, 0.7];
        assert_eq!(kernel.eval(&x, &x), 1.0);

        // |x - y|^2 = s  =>  e^{-1}
        let y = vec![0.3 + (2.0f64).sqrt(), 0.7];
        let v = kernel.eval(&x, &y);
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
        assert!((v - 0.367879441).abs() < 1e-9);

        let z = vec![0.300001, 0.7];
        assert!(kernel.eval(&x, &z) < 1.0);

        let k = gram(&[x.clone(), y, z], &kernel);
        for i in 0..3 {
            assert_eq!(k[i][i], 1.0);
            for j in 0..3 {
                assert_eq!(k[i][j], k[j][i]);
                assert!(k[i][j] > 0.0 && k[i][j] <= 1.0);
            }
        }
    }

    #[test]
    fn projection_is_feasible_and_idempotent() {
        let mut rng = Xor(42);
        for _ in 0..500 {
            let m = 3 + (rng.next() * 10.0) as usize;
            let upper = (1.0 / m as f64) * (1.0 + 3.0 * rng.next());
            if m as f64 * upper < 1.0 {
                continue;
            }
            let v: Vec<f64> = (0..m).map(|_| rng.next() * 4.0 - 2.0).collect();
            let x = project_capped_simplex(&v, upper);
            let sum: f64 = x.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "sum {sum}");
            assert!(x.iter().all(|&xi| (-1e-15..=upper + 1e-15).contains(&xi)));

            let x2 = project_capped_simplex(&x, upper);
            for (a, b) in x.iter().zip(&x2) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_satisfies_variational_inequality() {
        // (v - P(v)) . (y - P(v)) <= 0 for every feasible y
        let mut rng = Xor(7);
        for _ in 0..200 {
            let m = 4 + (rng.next() * 6.0) as usize;
            let upper = 1.0 / (0.4 * m as f64);
            let v: Vec<f64> = (0..m).map(|_| rng.next() * 2.0 - 1.0).collect();
            let x = project_capped_simplex(&v, upper);
            for _ in 0..20 {
                let raw: Vec<f64> = (0..m).map(|_| rng.next()).collect();
                let y = project_capped_simplex(&raw, upper);
                let ip: f64 = v
                    .iter()
                    .zip(&x)
                    .zip(&y)
                    .map(|((vi, xi), yi)| (vi - xi) * (yi - xi))
                    .sum();
                assert!(ip <= 1e-9, "violated: {ip}");
            }
        }
    }

    #[test]
    fn identical_features_give_zero_radius() {
        let features = vec![vec![0.2, 0.8]; 6];
        let model = train(features.clone(), &settings(0.6), &KernelSpec::gaussian(1.0)).unwrap();
        assert!(model.converged);
        assert!(model.radius_sq.abs() < 1e-10);
        for x in &features {
            assert!(model.distance_sq(x) < 1e-10);
            assert_eq!(model.decide(x).label, 1);
        }
        let sum: f64 = model.alphas.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nu_at_or_below_two_over_m_rejected() {
        let features = vec![vec![0.0, 0.0]; 10];
        let err = train(features.clone(), &settings(0.1), &KernelSpec::gaussian(1.0)).unwrap_err();
        assert!(matches!(err, SvmError::NuTooSmall { .. }));
        // exactly 2/m is still rejected (strict inequality)
        let err = train(features, &settings(0.2), &KernelSpec::gaussian(1.0)).unwrap_err();
        assert!(matches!(err, SvmError::NuTooSmall { .. }));
    }

    #[test]
    fn too_few_samples_rejected() {
        let err = train(
            vec![vec![0.0], vec![1.0]],
            &settings(0.9),
            &KernelSpec::gaussian(1.0),
        )
        .unwrap_err();
        assert!(matches!(err, SvmError::TooFewSamples { m: 2 }));
    }

    #[test]
    fn distance_closed_form_for_point_mass() {
        // all training points identical: c = phi(x1), so
        // |phi(x) - c|^2 = 2 (1 - k(x, x1))
        let kernel = KernelSpec::gaussian(0.5);
        let x1 = vec![0.4, 0.1];
        let model = train(vec![x1.clone(); 5], &settings(0.8), &kernel).unwrap();
        let probe = vec![0.9, -0.3];
        let expect = 2.0 * (1.0 - kernel.eval(&probe, &x1));
        assert!((model.distance_sq(&probe) - expect).abs() < 1e-9);
        // the support vector itself sits at the center
        assert!(model.distance_sq(&x1) < 1e-10);
    }

    #[test]
    fn far_outlier_decided_outside() {
        let mut rng = Xor(3);
        let mut features: Vec<Vec<f64>> = (0..9)
            .map(|_| vec![0.5 + 0.01 * rng.next(), 0.5 + 0.01 * rng.next()])
            .collect();
        features.push(vec![50.0, -50.0]); // |x - x_i|^2 >> s
        let model = train(features.clone(), &settings(0.4), &KernelSpec::gaussian(0.1)).unwrap();
        assert_eq!(model.decide(&features[9]).label, -1);
        // strictly maximal distance
        let d_out = model.distance_sq(&features[9]);
        for x in &features[..9] {
            assert!(model.distance_sq(x) < d_out);
        }
    }

    #[test]
    fn boundary_svs_sit_on_the_boundary() {
        let mut rng = Xor(11);
        for trial in 0..20 {
            let m = 8 + trial % 5;
            let features: Vec<Vec<f64>> = (0..m)
                .map(|_| vec![rng.next(), rng.next(), rng.next()])
                .collect();
            let model = train(features, &settings(0.5), &KernelSpec::gaussian(0.7)).unwrap();
            assert!(model.converged, "trial {trial}");
            assert!(model.kkt_residual <= 1e-8);
            let upper = 1.0 / (model.nu * model.alphas.len() as f64);
            let sum: f64 = model.alphas.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-8);
            assert!(model
                .alphas
                .iter()
                .all(|&a| a >= -1e-12 && a <= upper + 1e-12));
            // every strictly interior coefficient is equidistant from the
            // center at the shared radius
            for &i in &model.boundary_sv_indices {
                if model.alphas[i] > 1e-8 && model.alphas[i] < upper - 1e-8 {
                    let d = model.distance_sq(&model.training_features[i]);
                    assert!(
                        (d - model.radius_sq).abs() <= 1e-6,
                        "trial {trial} sv {i}: d={d} r2={}",
                        model.radius_sq
                    );
                    assert!(model.decide(&model.training_features[i]).margin.abs() <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn nu_property_counts() {
        let mut rng = Xor(23);
        for trial in 0..20 {
            let m = 10 + trial;
            let nu = 0.4;
            let features: Vec<Vec<f64>> = (0..m)
                .map(|_| vec![rng.next() * 0.2, rng.next() * 0.2])
                .collect();
            let model = train(features, &settings(nu), &KernelSpec::gaussian(1.0 / m as f64))
                .unwrap();
            let upper = 1.0 / (nu * m as f64);
            let at_upper = model
                .alphas
                .iter()
                .filter(|&&a| (a - upper).abs() <= 1e-8)
                .count();
            let svs = model.alphas.iter().filter(|&&a| a > 1e-8).count();
            assert!(
                at_upper as f64 <= nu * m as f64 + 1e-9,
                "trial {trial}: {at_upper} at upper, nu m = {}",
                nu * m as f64
            );
            assert!(
                svs as f64 >= (nu * m as f64 - 1.0).floor(),
                "trial {trial}: only {svs} SVs"
            );
        }
    }

    #[test]
    fn ranking_ties_break_by_index() {
        let features = vec![vec![0.1, 0.2]; 5];
        let model = train(features.clone(), &settings(0.8), &KernelSpec::gaussian(1.0)).unwrap();
        let ranked = model.rank_by_margin(&features);
        let order: Vec<usize> = ranked.iter().map(|(i, _)| *i).collect();
        assert_eq!(order, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn ranking_strictly_increasing_margins_is_identity() {
        let mut features: Vec<Vec<f64>> = Vec::new();
        for i in 0..6 {
            // monotonically farther from the cluster at the origin
            features.push(vec![0.05 * i as f64, 0.0]);
        }
        let model = train(features.clone(), &settings(0.6), &KernelSpec::gaussian(0.5)).unwrap();
        let margins: Vec<f64> = features.iter().map(|x| model.decide(x).margin).collect();
        // construction check: margins decrease with index, so rank order is
        // the reversed identity
        for w in margins.windows(2) {
            assert!(w[0] > w[1]);
        }
        let ranked = model.rank_by_margin(&features);
        let order: Vec<usize> = ranked.iter().map(|(i, _)| *i).collect();
        assert_eq!(order, vec![5, 4, 3, 2, 1, 0]);
    }

    #[test]
    fn ranking_invariant_under_training_permutation() {
        let mut rng = Xor(31);
        let mut features: Vec<Vec<f64>> = (0..10)
            .map(|_| vec![0.3 + 0.02 * rng.next(), 0.7 + 0.02 * rng.next()])
            .collect();
        features[4] = vec![0.9, 0.05];

        let kernel = KernelSpec::gaussian(0.1);
        let model = train(features.clone(), &settings(0.4), &kernel).unwrap();
        let base: Vec<usize> = model
            .rank_by_margin(&features)
            .iter()
            .map(|(i, _)| *i)
            .collect();

        // shuffle, retrain, unpermute
        let perm: Vec<usize> = vec![7, 2, 9, 0, 4, 1, 8, 5, 3, 6];
        let shuffled: Vec<Vec<f64>> = perm.iter().map(|&i| features[i].clone()).collect();
        let model2 = train(shuffled, &settings(0.4), &kernel).unwrap();
        let ranked2 = model2.rank_by_margin(
            &features.iter().cloned().collect::<Vec<_>>(),
        );
        let order2: Vec<usize> = ranked2.iter().map(|(i, _)| *i).collect();
        assert_eq!(base, order2);
        assert_eq!(base[0], 4);
    }

    #[test]
    fn model_json_roundtrip_is_bit_exact() {
        let mut rng = Xor(55);
        let features: Vec<Vec<f64>> = (0..7)
            .map(|_| (0..9).map(|_| rng.next()).collect())
            .collect();
        let model = train(features, &settings(0.5), &KernelSpec::gaussian(1.0 / 7.0)).unwrap();
        let json = model.to_json();
        let back = BallModel::from_json(&json).unwrap();
        assert_eq!(model.alphas.len(), back.alphas.len());
        for (a, b) in model.alphas.iter().zip(&back.alphas) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(model.center_norm_sq.to_bits(), back.center_norm_sq.to_bits());
        assert_eq!(model.radius_sq.to_bits(), back.radius_sq.to_bits());
        assert_eq!(model.nu.to_bits(), back.nu.to_bits());
        assert_eq!(
            model.kernel.bandwidth.to_bits(),
            back.kernel.bandwidth.to_bits()
        );
        for (xa, xb) in model.training_features.iter().zip(&back.training_features) {
            for (a, b) in xa.iter().zip(xb) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
        assert_eq!(model.boundary_sv_indices, back.boundary_sv_indices);
    }
}
