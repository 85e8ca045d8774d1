//! Multiclass softmax cross-entropy.

/// Numerically stable softmax.
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let mut out = scores.to_vec();
    softmax_in_place(&mut out);
    out
}

pub fn softmax_in_place(scores: &mut [f64]) {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        sum += *s;
    }
    for s in scores.iter_mut() {
        *s /= sum;
    }
}

/// Index of the largest entry; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Gradient `p - onehot` and diagonal Hessian `p (1 - p)` of the
/// cross-entropy at `scores`.
pub fn softmax_grad_hess(scores: &[f64], true_class: usize) -> (Vec<f64>, Vec<f64>) {
    let mut g = vec![0.0; scores.len()];
    let mut h = vec![0.0; scores.len()];
    grad_hess_into(scores, true_class, &mut g, &mut h);
    (g, h)
}

pub(crate) fn grad_hess_into(scores: &[f64], true_class: usize, g: &mut [f64], h: &mut [f64]) {
    g.copy_from_slice(scores);
    softmax_in_place(g);
    for (gk, hk) in g.iter_mut().zip(h.iter_mut()) {
        *hk = *gk * (1.0 - *gk);
    }
    g[true_class] -= 1.0;
}

/// `-ln softmax(scores)[true_class]`.
pub fn cross_entropy(scores: &[f64], true_class: usize) -> f64 {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    lse - scores[true_class]
}
