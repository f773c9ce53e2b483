//! Cubic polynomial-kernel SVM.
//!
//! Each class pair gets a binary machine trained on the dual with Platt's
//! sequential minimal optimization: the outer loop alternates full sweeps
//! with sweeps over unbound multipliers, the second multiplier is the one
//! maximizing |E1 - E2|, and training ends once a full sweep finds no KKT
//! violation beyond `tol`. Scan order is fixed, so training is deterministic.
//!
//! Decision function: `f(x) = sum_i coef_i K(sv_i, x) + bias` with
//! `coef_i = alpha_i y_i`; `f(x) > 0` votes for the pair's first class.

use alloc::vec::Vec;

use super::{check_dim, validate_training, Classifier, ClassifierError};
use crate::label::LabelId;
use crate::math;

/// The kernel is always cubic.
pub const KERNEL_DEGREE: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmParams {
    /// Inner-product scale; `None` means `1 / dim`.
    pub gamma: Option<f64>,
    pub coef0: f64,
    pub c: f64,
    /// KKT violation tolerance.
    pub tol: f64,
    /// Cap on outer sweeps.
    pub max_passes: usize,
    /// Records the dual objective after every successful step.
    #[cfg_attr(feature = "serde", serde(default))]
    pub record_objective: bool,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            gamma: None,
            coef0: 1.0,
            c: 1.0,
            tol: 1e-3,
            max_passes: 10_000,
            record_objective: false,
        }
    }
}

impl SvmParams {
    fn validate(&self) -> Result<(), ClassifierError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(ClassifierError::InvalidParams("C must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(ClassifierError::InvalidParams("tol must be positive"));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(ClassifierError::InvalidParams("gamma must be positive"));
            }
        }
        Ok(())
    }
}

/// `(gamma <x, y> + coef0)^3`
pub fn polynomial_kernel(x: &[f64], y: &[f64], gamma: f64, coef0: f64) -> f64 {
    let t = gamma * math::dot(x, y) + coef0;
    t * t * t
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinaryMachine {
    /// Class voted for when the decision value is positive (`y = +1`).
    pub positive: LabelId,
    pub negative: LabelId,
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for each support vector.
    pub coef: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BinaryMachine {
    pub fn decision(&self, x: &[f64], gamma: f64, coef0: f64) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coef)
            .map(|(sv, c)| c * polynomial_kernel(sv, x, gamma, coef0))
            .sum::<f64>()
            + self.bias
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmModel {
    pub gamma: f64,
    pub coef0: f64,
    pub c: f64,
    pub dim: usize,
    /// Distinct training classes, ascending.
    pub classes: Vec<LabelId>,
    /// One machine per class pair `(classes[a], classes[b])`, `a < b`, in
    /// lexicographic pair order.
    pub machines: Vec<BinaryMachine>,
}

/// Result of one binary SMO run.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoOutcome {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Dual objective after training.
    pub objective: f64,
    /// Dual objective after each step, when requested.
    pub objective_trace: Vec<f64>,
}

struct Smo<'a> {
    kernel: &'a [f64],
    n: usize,
    y: &'a [f64],
    c: f64,
    tol: f64,
    alpha: Vec<f64>,
    errors: Vec<f64>,
    bias: f64,
    objective: f64,
    trace: Option<Vec<f64>>,
}

const ALPHA_EPS: f64 = 1e-12;

impl Smo<'_> {
    fn k(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.n + j]
    }

    fn unbound(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.c
    }

    /// Change in the dual objective when alpha_i1 and alpha_i2 move by d1, d2.
    fn objective_delta(&self, i1: usize, i2: usize, d1: f64, d2: f64) -> f64 {
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let g1 = self.errors[i1] + y1 - self.bias;
        let g2 = self.errors[i2] + y2 - self.bias;
        d1 + d2
            - (y1 * d1 * g1 + y2 * d2 * g2)
            - 0.5 * (d1 * d1 * self.k(i1, i1) + d2 * d2 * self.k(i2, i2) + 2.0 * d1 * d2 * y1 * y2 * self.k(i1, i2))
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;
        let (lo, hi) = if y1 != y2 {
            ((a2 - a1).max(0.0), (self.c + a2 - a1).min(self.c))
        } else {
            ((a1 + a2 - self.c).max(0.0), (a1 + a2).min(self.c))
        };
        if lo >= hi {
            return false;
        }
        let (k11, k12, k22) = (self.k(i1, i1), self.k(i1, i2), self.k(i2, i2));
        let eta = k11 + k22 - 2.0 * k12;
        let mut a2_new = if eta > 0.0 {
            (a2 + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            let at = |a2n: f64| self.objective_delta(i1, i2, s * (a2 - a2n), a2n - a2);
            let (obj_lo, obj_hi) = (at(lo), at(hi));
            if obj_lo > obj_hi + ALPHA_EPS {
                lo
            } else if obj_hi > obj_lo + ALPHA_EPS {
                hi
            } else {
                a2
            }
        };
        if libm::fabs(a2_new - a2) < ALPHA_EPS * (a2_new + a2 + ALPHA_EPS) {
            return false;
        }
        let mut a1_new = a1 + s * (a2 - a2_new);
        if a1_new < 0.0 {
            a2_new += s * a1_new;
            a1_new = 0.0;
        } else if a1_new > self.c {
            a2_new += s * (a1_new - self.c);
            a1_new = self.c;
        }
        a2_new = a2_new.clamp(0.0, self.c);
        let (d1, d2) = (a1_new - a1, a2_new - a2);
        let delta = self.objective_delta(i1, i2, d1, d2);

        let b1 = self.bias - e1 - y1 * d1 * k11 - y2 * d2 * k12;
        let b2 = self.bias - e2 - y1 * d1 * k12 - y2 * d2 * k22;
        let b_new = if a1_new > 0.0 && a1_new < self.c {
            b1
        } else if a2_new > 0.0 && a2_new < self.c {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let db = b_new - self.bias;
        for i in 0..self.n {
            self.errors[i] += y1 * d1 * self.k(i1, i) + y2 * d2 * self.k(i2, i) + db;
        }
        self.alpha[i1] = a1_new;
        self.alpha[i2] = a2_new;
        self.bias = b_new;
        self.objective += delta;
        if let Some(t) = self.trace.as_mut() {
            t.push(self.objective);
        }
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        let y2 = self.y[i2];
        let a2 = self.alpha[i2];
        let e2 = self.errors[i2];
        let r2 = e2 * y2;
        if !((r2 < -self.tol && a2 < self.c) || (r2 > self.tol && a2 > 0.0)) {
            return false;
        }
        let n = self.n;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if self.unbound(i) && i != i2 {
                let gap = libm::fabs(self.errors[i] - e2);
                if best.is_none_or(|(_, g)| gap > g) {
                    best = Some((i, gap));
                }
            }
        }
        if let Some((i1, _)) = best {
            if self.take_step(i1, i2) {
                return true;
            }
        }
        for off in 1..n {
            let i1 = (i2 + off) % n;
            if self.unbound(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        for off in 1..n {
            let i1 = (i2 + off) % n;
            if self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }
}

/// Binary SMO on a precomputed row-major `n × n` kernel matrix with labels
/// in {-1, +1}.
pub fn smo_solve(
    kernel: &[f64],
    y: &[f64],
    c: f64,
    tol: f64,
    max_passes: usize,
    record_objective: bool,
) -> SmoOutcome {
    let n = y.len();
    debug_assert_eq!(kernel.len(), n * n);
    let mut smo = Smo {
        kernel,
        n,
        y,
        c,
        tol,
        alpha: alloc::vec![0.0; n],
        // all multipliers start at zero, so f(x_i) = 0 and E_i = -y_i
        errors: y.iter().map(|v| -v).collect(),
        bias: 0.0,
        objective: 0.0,
        trace: record_objective.then(Vec::new),
    };
    let mut examine_all = true;
    let mut passes = 0;
    let mut converged = false;
    let mut iterations = 0;
    while passes < max_passes {
        passes += 1;
        let mut changed = 0;
        for i in 0..n {
            if (examine_all || smo.unbound(i)) && smo.examine(i) {
                changed += 1;
            }
        }
        iterations += changed;
        if examine_all {
            if changed == 0 {
                converged = true;
                break;
            }
            examine_all = false;
        } else if changed == 0 {
            examine_all = true;
        }
    }
    SmoOutcome {
        alpha: smo.alpha,
        bias: smo.bias,
        iterations,
        converged,
        objective: smo.objective,
        objective_trace: smo.trace.unwrap_or_default(),
    }
}

fn gram(rows: &[&[f64]], gamma: f64, coef0: f64) -> Vec<f64> {
    let n = rows.len();
    let mut k = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = polynomial_kernel(rows[i], rows[j], gamma, coef0);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

fn train_pair(
    x: &[Vec<f64>],
    y: &[LabelId],
    positive: LabelId,
    negative: LabelId,
    gamma: f64,
    p: &SvmParams,
) -> BinaryMachine {
    let idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == positive || y[i] == negative).collect();
    let rows: Vec<&[f64]> = idx.iter().map(|&i| x[i].as_slice()).collect();
    let signs: Vec<f64> = idx.iter().map(|&i| if y[i] == positive { 1.0 } else { -1.0 }).collect();
    let kernel = gram(&rows, gamma, p.coef0);
    let out = smo_solve(&kernel, &signs, p.c, p.tol, p.max_passes, false);
    let mut support_vectors = Vec::new();
    let mut coef = Vec::new();
    for (pos, &a) in out.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(rows[pos].to_vec());
            coef.push(a * signs[pos]);
        }
    }
    BinaryMachine {
        positive,
        negative,
        support_vectors,
        coef,
        bias: out.bias,
        iterations: out.iterations,
        converged: out.converged,
    }
}

pub fn train_svm(x: &[Vec<f64>], y: &[LabelId], p: &SvmParams) -> Result<SvmModel, ClassifierError> {
    p.validate()?;
    let dim = validate_training(x, y)?;
    let mut classes: Vec<LabelId> = y.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(ClassifierError::SingleClass);
    }
    let gamma = p.gamma.unwrap_or(1.0 / dim.max(1) as f64);
    let mut pairs = Vec::new();
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            pairs.push((classes[a], classes[b]));
        }
    }
    #[cfg(feature = "parallel")]
    let machines = {
        use rayon::prelude::*;
        pairs
            .par_iter()
            .map(|&(pos, neg)| train_pair(x, y, pos, neg, gamma, p))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let machines = pairs
        .iter()
        .map(|&(pos, neg)| train_pair(x, y, pos, neg, gamma, p))
        .collect();
    Ok(SvmModel {
        gamma,
        coef0: p.coef0,
        c: p.c,
        dim,
        classes,
        machines,
    })
}

pub fn predict_svm(m: &SvmModel, x: &[f64]) -> Result<LabelId, ClassifierError> {
    check_dim(m.dim, x)?;
    let n = m.classes.len();
    let mut votes = alloc::vec![0usize; n];
    let mut strength = alloc::vec![0.0f64; n];
    let slot = |l: LabelId| m.classes.iter().position(|c| *c == l).unwrap_or(0);
    for machine in &m.machines {
        let f = machine.decision(x, m.gamma, m.coef0);
        let winner = if f > 0.0 { machine.positive } else { machine.negative };
        let s = slot(winner);
        votes[s] += 1;
        strength[s] += libm::fabs(f);
    }
    let mut best = 0;
    for i in 1..n {
        if votes[i] > votes[best] || (votes[i] == votes[best] && strength[i] > strength[best]) {
            best = i;
        }
    }
    Ok(m.classes[best])
}

impl Classifier for SvmModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn predict(&self, x: &[f64]) -> Result<LabelId, ClassifierError> {
        predict_svm(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn toy() -> (Vec<Vec<f64>>, Vec<LabelId>) {
        (
            vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 3.0], vec![3.0, 0.0]],
            vec![LabelId(1), LabelId(1), LabelId(2), LabelId(2)],
        )
    }

    #[test]
    fn separable_toy_is_fit_exactly() {
        let (x, y) = toy();
        let m = train_svm(&x, &y, &SvmParams::default()).unwrap();
        assert_eq!(m.machines.len(), 1);
        assert!(m.machines[0].converged);
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(predict_svm(&m, xi).unwrap(), *yi);
        }
    }

    #[test]
    fn two_class_decision_sign() {
        let (x, y) = toy();
        let m = train_svm(&x, &y, &SvmParams::default()).unwrap();
        for q in [[0.5, 0.5], [4.0, 0.0], [0.0, 5.0], [2.0, 2.0]] {
            let f = m.machines[0].decision(&q, m.gamma, m.coef0);
            let expected = if f > 0.0 { LabelId(1) } else { LabelId(2) };
            assert_eq!(predict_svm(&m, &q).unwrap(), expected);
        }
    }

    #[test]
    fn errors() {
        let (x, _) = toy();
        assert_eq!(
            train_svm(&x, &[LabelId(1); 4], &SvmParams::default()),
            Err(ClassifierError::SingleClass)
        );
        let (x, y) = toy();
        let m = train_svm(&x, &y, &SvmParams::default()).unwrap();
        assert!(matches!(
            predict_svm(&m, &[1.0]),
            Err(ClassifierError::DimensionMismatch { expected: 2, found: 1 })
        ));
        let mut bad = x.clone();
        bad[2][1] = f64::NAN;
        assert_eq!(
            train_svm(&bad, &y, &SvmParams::default()),
            Err(ClassifierError::NonFiniteFeature { row: 2, col: 1 })
        );
        let p = SvmParams { c: 0.0, ..Default::default() };
        assert!(matches!(train_svm(&x, &y, &p), Err(ClassifierError::InvalidParams(_))));
    }

    #[test]
    fn kernel_is_symmetric() {
        let a = [0.3, -1.2, 4.0];
        let b = [2.5, 0.1, -0.7];
        assert_eq!(polynomial_kernel(&a, &b, 0.5, 1.0), polynomial_kernel(&b, &a, 0.5, 1.0));
        let direct = libm::pow(math::dot(&a, &b), 3.0);
        assert!(libm::fabs(polynomial_kernel(&a, &b, 1.0, 0.0) - direct) <= 1e-12 * libm::fabs(direct));
    }
}
