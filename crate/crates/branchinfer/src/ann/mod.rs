//! Feed-forward ReLU regression networks.
//!
//! Hidden layers use ReLU, the output layer is affine. Inputs are min–max
//! scaled per feature before the first layer.

mod io;
mod train;

use thiserror::Error;

pub use io::{load_weights, save_weights};
pub use train::{r_squared, train, Hyper, PropertyDataset, TrainReport};

/// Errors raised by network evaluation, training and weight I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnnError {
    #[error("input has length {got}, network expects {expected}")]
    Shape { expected: usize, got: usize },
    #[error("observed values have zero variance")]
    ZeroVariance,
    #[error("length mismatch or empty input")]
    Length,
    #[error("training diverged (non-finite loss) at epoch {0}")]
    Diverged(usize),
    #[error("need at least 2 rows per fold, have {rows} rows for {folds} folds")]
    TooFewRows { rows: usize, folds: usize },
    #[error("weight file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported weight file version '{0}'")]
    Version(String),
}

/// A fully connected network `(K, h_1, ..., 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuralNet {
    pub layer_sizes: Vec<usize>,
    /// `weights[l][j][i]`: weight from unit `i` of layer `l` to unit `j` of layer `l+1`.
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
    /// Per-input `(min, max)`; the scaled input is `(x - min) / (max - min)`,
    /// or 0 when `max == min`.
    pub scaling: Vec<(f64, f64)>,
}

/// Loss with weight and bias gradients, indexed like `weights` and `biases`.
pub type LossGradient = (f64, Vec<Vec<Vec<f64>>>, Vec<Vec<f64>>);

/// Activations recorded during a forward pass.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    /// Scaled input followed by the post-activation values of every layer.
    pub activations: Vec<Vec<f64>>,
    /// Pre-activation values of every non-input layer.
    pub pre: Vec<Vec<f64>>,
}

impl NeuralNet {
    /// All-zero network with identity scaling `(0, 1)`.
    pub fn zeros(layer_sizes: &[usize]) -> Self {
        let l = layer_sizes.len();
        NeuralNet {
            layer_sizes: layer_sizes.to_vec(),
            weights: (0..l - 1)
                .map(|i| vec![vec![0.0; layer_sizes[i]]; layer_sizes[i + 1]])
                .collect(),
            biases: (0..l - 1).map(|i| vec![0.0; layer_sizes[i + 1]]).collect(),
            scaling: vec![(0.0, 1.0); layer_sizes[0]],
        }
    }

    /// Uniform initialization in `±1/sqrt(fan_in)`.
    pub fn random<R: rand::Rng>(layer_sizes: &[usize], rng: &mut R) -> Self {
        let mut net = Self::zeros(layer_sizes);
        for (l, w) in net.weights.iter_mut().enumerate() {
            let s = 1.0 / (layer_sizes[l] as f64).sqrt();
            for row in w.iter_mut() {
                for x in row.iter_mut() {
                    *x = rng.gen_range(-s..s);
                }
            }
        }
        for b in net.biases.iter_mut() {
            for x in b.iter_mut() {
                *x = rng.gen_range(-0.1..0.1);
            }
        }
        net
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    /// Scaled value of input `i`.
    pub fn scale(&self, i: usize, x: f64) -> f64 {
        let (lo, hi) = self.scaling[i];
        if hi > lo {
            (x - lo) / (hi - lo)
        } else {
            0.0
        }
    }

    /// Affine map of the scaling: `scaled = a * x + b`.
    pub fn scale_coeffs(&self, i: usize) -> (f64, f64) {
        let (lo, hi) = self.scaling[i];
        if hi > lo {
            (1.0 / (hi - lo), -lo / (hi - lo))
        } else {
            (0.0, 0.0)
        }
    }

    /// Forward pass keeping every intermediate value.
    pub fn trace(&self, x: &[f64]) -> Result<Trace, AnnError> {
        if x.len() != self.input_size() {
            return Err(AnnError::Shape {
                expected: self.input_size(),
                got: x.len(),
            });
        }
        let mut a: Vec<f64> = x.iter().enumerate().map(|(i, &v)| self.scale(i, v)).collect();
        let mut activations = vec![a.clone()];
        let mut pre = Vec::with_capacity(self.n_layers());
        for l in 0..self.n_layers() {
            let z: Vec<f64> = self.weights[l]
                .iter()
                .zip(&self.biases[l])
                .map(|(row, b)| row.iter().zip(&a).map(|(w, v)| w * v).sum::<f64>() + b)
                .collect();
            a = if l + 1 < self.n_layers() {
                z.iter().map(|&v| v.max(0.0)).collect()
            } else {
                z.clone()
            };
            pre.push(z);
            activations.push(a.clone());
        }
        Ok(Trace { activations, pre })
    }

    /// ψ_N(x): the single output of the network.
    pub fn forward(&self, x: &[f64]) -> Result<f64, AnnError> {
        Ok(self.trace(x)?.activations.last().unwrap()[0])
    }

    /// Half squared error at `(x, y)` and its gradient, laid out as
    /// `(d weights, d biases)` with the shapes of the network.
    pub fn loss_gradient(&self, x: &[f64], y: f64) -> Result<LossGradient, AnnError> {
        let t = self.trace(x)?;
        let out = t.activations.last().unwrap()[0];
        let err = out - y;
        let nl = self.n_layers();
        let mut gw: Vec<Vec<Vec<f64>>> = self
            .weights
            .iter()
            .map(|w| vec![vec![0.0; w[0].len()]; w.len()])
            .collect();
        let mut gb: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();
        let mut delta = vec![err];
        for l in (0..nl).rev() {
            let a_prev = &t.activations[l];
            for (j, &dj) in delta.iter().enumerate() {
                gb[l][j] = dj;
                for (i, &ai) in a_prev.iter().enumerate() {
                    gw[l][j][i] = dj * ai;
                }
            }
            if l == 0 {
                break;
            }
            let mut next = vec![0.0; self.layer_sizes[l]];
            for (j, &dj) in delta.iter().enumerate() {
                for (i, nx) in next.iter_mut().enumerate() {
                    *nx += dj * self.weights[l][j][i];
                }
            }
            for (i, nx) in next.iter_mut().enumerate() {
                if t.pre[l - 1][i] <= 0.0 {
                    *nx = 0.0;
                }
            }
            delta = next;
        }
        Ok((0.5 * err * err, gw, gb))
    }

    /// Half squared error at `(x, y)`.
    pub fn loss(&self, x: &[f64], y: f64) -> Result<f64, AnnError> {
        let e = self.forward(x)? - y;
        Ok(0.5 * e * e)
    }

    /// Flattened parameters (weights layer by layer, then that layer's biases).
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::new();
        for l in 0..self.n_layers() {
            for row in &self.weights[l] {
                p.extend_from_slice(row);
            }
            p.extend_from_slice(&self.biases[l]);
        }
        p
    }

    /// Inverse of [`NeuralNet::params`].
    pub fn set_params(&mut self, p: &[f64]) {
        let mut k = 0;
        for l in 0..self.n_layers() {
            for row in self.weights[l].iter_mut() {
                for w in row.iter_mut() {
                    *w = p[k];
                    k += 1;
                }
            }
            for b in self.biases[l].iter_mut() {
                *b = p[k];
                k += 1;
            }
        }
    }
}

/// Flattens a gradient in the order of [`NeuralNet::params`].
pub fn flatten_gradient(gw: &[Vec<Vec<f64>>], gb: &[Vec<f64>]) -> Vec<f64> {
    let mut p = Vec::new();
    for l in 0..gw.len() {
        for row in &gw[l] {
            p.extend_from_slice(row);
        }
        p.extend_from_slice(&gb[l]);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Independent evaluation with explicit loops over a flat parameter list.
    fn hand_forward(sizes: &[usize], p: &[f64], x: &[f64]) -> f64 {
        let mut a = x.to_vec();
        let mut k = 0;
        for l in 0..sizes.len() - 1 {
            let mut z = vec![0.0; sizes[l + 1]];
            for zj in z.iter_mut() {
                for ai in &a {
                    *zj += p[k] * ai;
                    k += 1;
                }
            }
            for zj in z.iter_mut() {
                *zj += p[k];
                k += 1;
            }
            if l + 2 < sizes.len() {
                for zj in z.iter_mut() {
                    if *zj < 0.0 {
                        *zj = 0.0;
                    }
                }
            }
            a = z;
        }
        a[0]
    }

    #[test]
    fn zero_weights_return_output_bias() {
        let mut net = NeuralNet::zeros(&[3, 4, 1]);
        net.biases[1][0] = 2.5;
        assert_eq!(net.forward(&[1.0, -7.0, 3.0]).unwrap(), 2.5);
    }

    #[test]
    fn identity_net() {
        let mut net = NeuralNet::zeros(&[1, 1]);
        net.weights[0][0][0] = 1.0;
        net.scaling = vec![(0.0, 1.0)];
        for x in [-3.0, 0.0, 0.25, 9.0] {
            assert_eq!(net.forward(&[x]).unwrap(), x);
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let net = NeuralNet::zeros(&[2, 1]);
        assert_eq!(net.forward(&[1.0]), Err(AnnError::Shape { expected: 2, got: 1 }));
    }

    #[test]
    fn matches_hand_evaluation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let net = NeuralNet::random(&[3, 4, 1], &mut rng);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let got = net.forward(&x).unwrap();
            let want = hand_forward(&net.layer_sizes, &net.params(), &x);
            approx::assert_relative_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn piecewise_linear_along_a_ray() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let net = NeuralNet::random(&[4, 6, 1], &mut rng);
        for _ in 0..100 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let d: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let at = |t: f64| -> (f64, Vec<bool>) {
                let xt: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
                let tr = net.trace(&xt).unwrap();
                (
                    tr.activations.last().unwrap()[0],
                    tr.pre[0].iter().map(|&z| z > 0.0).collect(),
                )
            };
            let (f0, s0) = at(0.0);
            let (f1, s1) = at(1e-3);
            let (f2, s2) = at(2e-3);
            if s0 == s1 && s1 == s2 {
                approx::assert_relative_eq!(f2 - f1, f1 - f0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 100 {
            let net = NeuralNet::random(&[3, 4, 1], &mut rng);
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y = rng.gen_range(-1.0..1.0);
            if net.trace(&x).unwrap().pre[0].iter().any(|z| z.abs() < 1e-3) {
                continue;
            }
            let (_, gw, gb) = net.loss_gradient(&x, y).unwrap();
            let g = flatten_gradient(&gw, &gb);
            let p = net.params();
            let h = 1e-5;
            for k in 0..p.len() {
                let mut q = net.clone();
                let mut pp = p.clone();
                pp[k] += h;
                q.set_params(&pp);
                let up = q.loss(&x, y).unwrap();
                pp[k] -= 2.0 * h;
                q.set_params(&pp);
                let dn = q.loss(&x, y).unwrap();
                let fd = (up - dn) / (2.0 * h);
                let scale = g[k].abs().max(fd.abs()).max(1e-8);
                assert!(
                    (g[k] - fd).abs() / scale < 1e-4 || (g[k] - fd).abs() < 1e-9,
                    "k={k} {} {}",
                    g[k],
                    fd
                );
            }
            checked += 1;
        }
    }
}
