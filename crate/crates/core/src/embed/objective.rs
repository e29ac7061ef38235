//! The negative-sampling objective in f64, as a loss to minimize:
//! `-log σ(u_o·h) - Σ_n log σ(-u_n·h)`, where `h` is the center input
//! vector (skip-gram) or the mean of the context input vectors (CBOW).

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Loss for one positive target and a set of negatives given the hidden vector.
pub fn loss(hidden: &[f64], positive: &[f64], negatives: &[Vec<f64>]) -> f64 {
    let mut l = -sigmoid(dot(hidden, positive)).ln();
    for n in negatives {
        l -= sigmoid(-dot(hidden, n)).ln();
    }
    l
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub hidden: Vec<f64>,
    pub positive: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

/// Analytic gradient of [`loss`].
pub fn gradient(hidden: &[f64], positive: &[f64], negatives: &[Vec<f64>]) -> Gradient {
    let mut gh = vec![0.0; hidden.len()];
    // d/dx -log σ(x) = σ(x) - 1 ; d/dx -log σ(-x) = σ(x)
    let cp = sigmoid(dot(hidden, positive)) - 1.0;
    for (g, p) in gh.iter_mut().zip(positive) {
        *g += cp * p;
    }
    let gp = hidden.iter().map(|h| cp * h).collect();
    let gn = negatives
        .iter()
        .map(|n| {
            let cn = sigmoid(dot(hidden, n));
            for (g, x) in gh.iter_mut().zip(n) {
                *g += cn * x;
            }
            hidden.iter().map(|h| cn * h).collect()
        })
        .collect();
    Gradient {
        hidden: gh,
        positive: gp,
        negatives: gn,
    }
}

/// CBOW: the hidden vector is the mean of `contexts`.
pub fn cbow_loss(contexts: &[Vec<f64>], positive: &[f64], negatives: &[Vec<f64>]) -> f64 {
    loss(&mean(contexts), positive, negatives)
}

/// Gradient of [`cbow_loss`] w.r.t. each context vector (each receives the
/// hidden gradient divided by the context count) and the output vectors.
pub fn cbow_gradient(contexts: &[Vec<f64>], positive: &[f64], negatives: &[Vec<f64>]) -> (Vec<Vec<f64>>, Gradient) {
    let g = gradient(&mean(contexts), positive, negatives);
    let share = 1.0 / contexts.len() as f64;
    let per_context = contexts
        .iter()
        .map(|_| g.hidden.iter().map(|x| x * share).collect())
        .collect();
    (per_context, g)
}

fn mean(vs: &[Vec<f64>]) -> Vec<f64> {
    let mut m = vec![0.0; vs[0].len()];
    for v in vs {
        for (a, b) in m.iter_mut().zip(v) {
            *a += b;
        }
    }
    let k = vs.len() as f64;
    m.iter_mut().for_each(|a| *a /= k);
    m
}
