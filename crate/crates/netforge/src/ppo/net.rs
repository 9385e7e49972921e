//! Tanh MLPs with manual forward/backward passes, sized at runtime so the
//! gradient checks can run on tiny nets.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Fully-connected network: tanh hidden layers, linear output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub sizes: Vec<usize>,
    /// weights[l] is row-major (out x in) for layer l
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Mlp {
    /// Uniform Glorot init; the output layer is scaled down so the initial
    /// policy is near-uniform.
    pub fn new(sizes: &[usize], rng: &mut impl Rng, output_scale: f64) -> Mlp {
        assert!(sizes.len() >= 2);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..sizes.len() - 1 {
            let (n_in, n_out) = (sizes[l], sizes[l + 1]);
            let limit = (6.0 / (n_in + n_out) as f64).sqrt();
            let scale = if l == sizes.len() - 2 { output_scale } else { 1.0 };
            let w: Vec<f64> =
                (0..n_in * n_out).map(|_| rng.gen_range(-limit..limit) * scale).collect();
            weights.push(w);
            biases.push(vec![0.0; n_out]);
        }
        Mlp { sizes: sizes.to_vec(), weights, biases }
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    pub fn flatten_into(&self, out: &mut Vec<f64>) {
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
    }

    pub fn load_from(&mut self, flat: &[f64]) -> usize {
        let mut at = 0;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            let wl = w.len();
            w.copy_from_slice(&flat[at..at + wl]);
            at += wl;
            let bl = b.len();
            b.copy_from_slice(&flat[at..at + bl]);
            at += bl;
        }
        at
    }

    /// Forward pass keeping every activation for the backward pass.
    /// `activations[0]` is the input; the last entry is the linear output.
    pub fn forward(&self, input: &[f64]) -> MlpCache {
        assert_eq!(input.len(), self.sizes[0]);
        let mut activations = vec![input.to_vec()];
        let last = self.weights.len() - 1;
        for l in 0..self.weights.len() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let x = &activations[l];
            let mut z = self.biases[l].clone();
            for o in 0..n_out {
                let row = &self.weights[l][o * n_in..(o + 1) * n_in];
                z[o] += row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            }
            if l != last {
                for v in &mut z {
                    *v = v.tanh();
                }
            }
            activations.push(z);
        }
        MlpCache { activations }
    }

    /// Backward pass from d(loss)/d(output); accumulates parameter
    /// gradients (flat layout matching `flatten_into`) into `grads`.
    pub fn backward(&self, cache: &MlpCache, output_grad: &[f64], grads: &mut [f64]) {
        let last = self.weights.len() - 1;
        let mut delta = output_grad.to_vec();
        // per-layer flat offsets
        let mut offsets = Vec::with_capacity(self.weights.len());
        let mut at = 0;
        for (w, b) in self.weights.iter().zip(&self.biases) {
            offsets.push(at);
            at += w.len() + b.len();
        }
        for l in (0..self.weights.len()).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            if l != last {
                // activation at layer l+1 is tanh(z)
                let h = &cache.activations[l + 1];
                for (d, hv) in delta.iter_mut().zip(h) {
                    *d *= 1.0 - hv * hv;
                }
            }
            let x = &cache.activations[l];
            let base = offsets[l];
            for o in 0..n_out {
                let wrow = base + o * n_in;
                for i in 0..n_in {
                    grads[wrow + i] += delta[o] * x[i];
                }
                grads[base + n_in * n_out + o] += delta[o];
            }
            if l > 0 {
                let mut prev = vec![0.0; n_in];
                for o in 0..n_out {
                    let row = &self.weights[l][o * n_in..(o + 1) * n_in];
                    for (p, w) in prev.iter_mut().zip(row) {
                        *p += delta[o] * w;
                    }
                }
                delta = prev;
            }
        }
    }
}

pub struct MlpCache {
    pub activations: Vec<Vec<f64>>,
}

impl MlpCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().unwrap()
    }
}

/// Categorical action distribution from logits.
#[derive(Debug, Clone)]
pub struct Categorical {
    pub logits: Vec<f64>,
    pub probs: Vec<f64>,
    pub log_probs: Vec<f64>,
}

impl Categorical {
    pub fn from_logits(logits: &[f64]) -> Categorical {
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        let probs: Vec<f64> = exps.iter().map(|e| e / total).collect();
        let log_total = total.ln();
        let log_probs: Vec<f64> = logits.iter().map(|l| l - max - log_total).collect();
        Categorical { logits: logits.to_vec(), probs, log_probs }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let draw: f64 = rng.gen_range(0.0..1.0);
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if draw < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }

    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .zip(&self.log_probs)
            .map(|(p, lp)| if *p > 0.0 { p * lp } else { 0.0 })
            .sum::<f64>()
    }

    pub fn argmax(&self) -> usize {
        self.probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_output_layer_gives_uniform_policy() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut net = Mlp::new(&[17, 64, 64, 11], &mut rng, 0.01);
        let last = net.weights.len() - 1;
        net.weights[last].iter_mut().for_each(|w| *w = 0.0);
        net.biases[last].iter_mut().for_each(|b| *b = 0.0);
        let out = net.forward(&[0.3; 17]);
        let dist = Categorical::from_logits(out.output());
        for p in &dist.probs {
            assert!((p - 1.0 / 11.0).abs() < 1e-12);
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let net = Mlp::new(&[17, 64, 64, 11], &mut rng, 0.01);
        for case in 0..20 {
            let x: Vec<f64> = (0..17).map(|i| ((i + case) as f64 * 0.37).sin()).collect();
            let dist = Categorical::from_logits(net.forward(&x).output());
            let total: f64 = dist.probs.iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn forward_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let net = Mlp::new(&[17, 64, 64, 11], &mut rng, 0.01);
        let x = [0.5; 17];
        assert_eq!(net.forward(&x).output(), net.forward(&x).output());
    }

    #[test]
    fn flatten_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = Mlp::new(&[4, 8, 3], &mut rng, 1.0);
        let mut flat = Vec::new();
        net.flatten_into(&mut flat);
        assert_eq!(flat.len(), net.param_count());
        let mut copy = net.clone();
        copy.weights.iter_mut().for_each(|w| w.iter_mut().for_each(|v| *v = 0.0));
        let used = copy.load_from(&flat);
        assert_eq!(used, flat.len());
        assert_eq!(copy, net);
    }

    #[test]
    fn backward_matches_finite_differences_on_sum_output() {
        // d(sum of outputs)/d(theta) via backward vs central differences
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let net = Mlp::new(&[3, 4, 2], &mut rng, 1.0);
        let x = [0.2, -0.7, 0.5];
        let cache = net.forward(&x);
        let mut grads = vec![0.0; net.param_count()];
        net.backward(&cache, &[1.0, 1.0], &mut grads);

        let mut flat = Vec::new();
        net.flatten_into(&mut flat);
        let h = 1e-6;
        for k in 0..flat.len() {
            let mut plus = net.clone();
            let mut minus = net.clone();
            let mut fp = flat.clone();
            let mut fm = flat.clone();
            fp[k] += h;
            fm[k] -= h;
            plus.load_from(&fp);
            minus.load_from(&fm);
            let f = |m: &Mlp| m.forward(&x).output().iter().sum::<f64>();
            let fd = (f(&plus) - f(&minus)) / (2.0 * h);
            assert!((fd - grads[k]).abs() < 1e-6, "param {k}: fd {fd} analytic {}", grads[k]);
        }
    }
}
