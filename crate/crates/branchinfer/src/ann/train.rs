//! Mini-batch SGD training with k-fold cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AnnError, NeuralNet};
use crate::par;

/// Feature rows with observed property values.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyDataset {
    pub rows: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl PropertyDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Observed range `[a_lo, a_hi]`.
    pub fn value_range(&self) -> (f64, f64) {
        let lo = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    fn subset(&self, idx: &[usize]) -> PropertyDataset {
        PropertyDataset {
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            values: idx.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// Training hyperparameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyper {
    /// Hidden layer widths.
    pub hidden: Vec<usize>,
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub seed: u64,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            hidden: vec![10],
            lr: 0.01,
            epochs: 500,
            batch: 16,
            seed: 0,
        }
    }
}

/// Per-fold scores and the index of the fold whose net was selected.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub train_r2: Vec<f64>,
    pub test_r2: Vec<f64>,
    pub best_fold: usize,
}

/// Coefficient of determination `1 − Σ(y−ψ)² / Σ(y−ȳ)²`.
pub fn r_squared(observed: &[f64], predicted: &[f64]) -> Result<f64, AnnError> {
    if observed.is_empty() || observed.len() != predicted.len() {
        return Err(AnnError::Length);
    }
    let mean = observed.iter().sum::<f64>() / observed.len() as f64;
    let ss_tot: f64 = observed.iter().map(|y| (y - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(AnnError::ZeroVariance);
    }
    let ss_res: f64 = observed.iter().zip(predicted).map(|(y, p)| (y - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Trains one net on `data`, returning it and the mean loss after every epoch.
///
/// Inputs are scaled by the data's per-feature range. Targets are scaled to
/// `[0, 1]` during training and the scaling is folded into the output layer,
/// so the returned net predicts raw values.
pub fn train_single(data: &PropertyDataset, hyper: &Hyper) -> Result<(NeuralNet, Vec<f64>), AnnError> {
    if data.is_empty() || data.rows.len() != data.values.len() {
        return Err(AnnError::Length);
    }
    let k = data.rows[0].len();
    let mut sizes = vec![k];
    sizes.extend(&hyper.hidden);
    sizes.push(1);
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut net = NeuralNet::random(&sizes, &mut rng);
    net.scaling = (0..k)
        .map(|i| {
            let col = data.rows.iter().map(|r| r[i]);
            let lo = col.clone().fold(f64::INFINITY, f64::min);
            let hi = col.fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();
    let (ylo, yhi) = data.value_range();
    let yspan = if yhi > ylo { yhi - ylo } else { 1.0 };
    let ys: Vec<f64> = data.values.iter().map(|y| (y - ylo) / yspan).collect();

    let n = data.len();
    let batch = hyper.batch.clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(hyper.epochs);
    for epoch in 0..hyper.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let mut acc = net.params().iter().map(|_| 0.0).collect::<Vec<f64>>();
            for &i in chunk {
                let (_, gw, gb) = net.loss_gradient(&data.rows[i], ys[i])?;
                for (a, g) in acc.iter_mut().zip(super::flatten_gradient(&gw, &gb)) {
                    *a += g;
                }
            }
            let step = hyper.lr / chunk.len() as f64;
            let p: Vec<f64> = net.params().iter().zip(&acc).map(|(p, g)| p - step * g).collect();
            net.set_params(&p);
        }
        let mut loss = 0.0;
        for (row, &y) in data.rows.iter().zip(&ys) {
            loss += net.loss(row, y)?;
        }
        loss /= n as f64;
        if !loss.is_finite() {
            return Err(AnnError::Diverged(epoch));
        }
        history.push(loss);
    }
    let last = net.n_layers() - 1;
    for w in net.weights[last][0].iter_mut() {
        *w *= yspan;
    }
    net.biases[last][0] = net.biases[last][0] * yspan + ylo;
    Ok((net, history))
}

fn predict(net: &NeuralNet, d: &PropertyDataset) -> Result<Vec<f64>, AnnError> {
    d.rows.iter().map(|r| net.forward(r)).collect()
}

/// k-fold cross-validated training; returns the net with the best test R².
///
/// With `folds == 1` the whole set is used for training and testing.
pub fn train(data: &PropertyDataset, hyper: &Hyper, folds: usize) -> Result<(NeuralNet, TrainReport), AnnError> {
    let folds = folds.max(1);
    if data.len() < 2 * folds {
        return Err(AnnError::TooFewRows {
            rows: data.len(),
            folds,
        });
    }
    let (lo, hi) = data.value_range();
    if lo == hi {
        return Err(AnnError::ZeroVariance);
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(hyper.seed));
    let results = par::map_range(folds, |f| -> Result<(NeuralNet, f64, f64), AnnError> {
        let (train_idx, test_idx): (Vec<usize>, Vec<usize>) = if folds == 1 {
            (order.clone(), order.clone())
        } else {
            let test: Vec<usize> = order
                .iter()
                .enumerate()
                .filter(|(i, _)| i % folds == f)
                .map(|(_, &j)| j)
                .collect();
            let train: Vec<usize> = order
                .iter()
                .enumerate()
                .filter(|(i, _)| i % folds != f)
                .map(|(_, &j)| j)
                .collect();
            (train, test)
        };
        let tr = data.subset(&train_idx);
        let te = data.subset(&test_idx);
        let h = Hyper {
            seed: hyper.seed.wrapping_add(f as u64 + 1),
            ..hyper.clone()
        };
        let (net, _) = train_single(&tr, &h)?;
        let r_tr = r_squared(&tr.values, &predict(&net, &tr)?).unwrap_or(f64::NAN);
        let r_te = r_squared(&te.values, &predict(&net, &te)?).unwrap_or(f64::NAN);
        Ok((net, r_tr, r_te))
    });
    let mut nets = Vec::new();
    let mut report = TrainReport {
        train_r2: Vec::new(),
        test_r2: Vec::new(),
        best_fold: 0,
    };
    for r in results {
        let (net, a, b) = r?;
        nets.push(net);
        report.train_r2.push(a);
        report.test_r2.push(b);
    }
    let key = |x: f64| if x.is_nan() { f64::NEG_INFINITY } else { x };
    for f in 1..folds {
        if key(report.test_r2[f]) > key(report.test_r2[report.best_fold]) {
            report.best_fold = f;
        }
    }
    Ok((nets.swap_remove(report.best_fold), report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_data(n: usize) -> PropertyDataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / (n - 1) as f64 * 4.0 - 2.0]).collect();
        let values = rows.iter().map(|r| 2.0 * r[0] + 1.0).collect();
        PropertyDataset { rows, values }
    }

    #[test]
    fn r_squared_fixtures() {
        assert_eq!(r_squared(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(r_squared(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert_eq!(r_squared(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap(), 0.5);
        assert_eq!(r_squared(&[2.0, 2.0], &[1.0, 2.0]), Err(AnnError::ZeroVariance));
        assert_eq!(r_squared(&[], &[]), Err(AnnError::Length));
    }

    #[test]
    fn learns_a_line() {
        let d = linear_data(40);
        let h = Hyper {
            hidden: vec![2],
            lr: 0.1,
            epochs: 2000,
            batch: 4,
            seed: 1,
        };
        let (net, _) = train_single(&d, &h).unwrap();
        let pred: Vec<f64> = d.rows.iter().map(|r| net.forward(r).unwrap()).collect();
        assert!(r_squared(&d.values, &pred).unwrap() >= 0.999);
    }

    #[test]
    fn constant_target_is_flagged() {
        let d = PropertyDataset {
            rows: (0..10).map(|i| vec![i as f64]).collect(),
            values: vec![3.0; 10],
        };
        assert_eq!(train(&d, &Hyper::default(), 2).unwrap_err(), AnnError::ZeroVariance);
    }

    #[test]
    fn full_batch_linear_loss_is_nonincreasing() {
        let d = linear_data(20);
        let h = Hyper {
            hidden: vec![],
            lr: 0.05,
            epochs: 200,
            batch: 20,
            seed: 2,
        };
        let (_, hist) = train_single(&d, &h).unwrap();
        for w in hist.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn folds_are_deterministic_and_parallel_independent() {
        let d = linear_data(30);
        let h = Hyper {
            hidden: vec![3],
            lr: 0.05,
            epochs: 50,
            batch: 5,
            seed: 9,
        };
        let (a, ra) = train(&d, &h, 5).unwrap();
        crate::par::set_sequential(true);
        let (b, rb) = train(&d, &h, 5).unwrap();
        crate::par::set_sequential(false);
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        assert_eq!(ra.test_r2.len(), 5);
    }

    #[test]
    fn too_few_rows() {
        let d = linear_data(5);
        assert!(matches!(
            train(&d, &Hyper::default(), 5),
            Err(AnnError::TooFewRows { .. })
        ));
    }
}
