//! Plain-text weight files.
//!
//! ```text
//! ANNv1
//! 3 4 1
//! <layer 0: one line per output unit with its incoming weights>
//! <layer 0 biases on one line>
//! ... further layers ...
//! <one "min max" line per input>
//! ```
//! Numbers are written with 17 significant digits.

use super::{AnnError, NeuralNet};

fn num(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Serializes a network.
pub fn save_weights(net: &NeuralNet) -> String {
    let mut s = String::from("ANNv1\n");
    let sizes: Vec<String> = net.layer_sizes.iter().map(|x| x.to_string()).collect();
    s.push_str(&sizes.join(" "));
    s.push('\n');
    let line = |v: &[f64]| v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ") + "\n";
    for l in 0..net.n_layers() {
        for row in &net.weights[l] {
            s.push_str(&line(row));
        }
        s.push_str(&line(&net.biases[l]));
    }
    for &(lo, hi) in &net.scaling {
        s.push_str(&format!("{} {}\n", num(lo), num(hi)));
    }
    s
}

/// Parses a network written by [`save_weights`].
pub fn load_weights(text: &str) -> Result<NeuralNet, AnnError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let err = |line: usize, msg: &str| AnnError::Parse {
        line,
        msg: msg.to_string(),
    };
    let (_, head) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    if head != "ANNv1" {
        return Err(AnnError::Version(head.to_string()));
    }
    let mut next_nums = |want: usize| -> Result<Vec<f64>, AnnError> {
        let (ln, l) = lines.next().ok_or_else(|| err(0, "unexpected end of file"))?;
        let v: Result<Vec<f64>, _> = l.split_whitespace().map(str::parse::<f64>).collect();
        let v = v.map_err(|e| err(ln, &e.to_string()))?;
        if want != usize::MAX && v.len() != want {
            return Err(err(ln, &format!("expected {want} numbers, found {}", v.len())));
        }
        Ok(v)
    };
    let sizes: Vec<usize> = next_nums(usize::MAX)?.into_iter().map(|x| x as usize).collect();
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(err(2, "need at least two positive layer sizes"));
    }
    let mut net = NeuralNet::zeros(&sizes);
    for l in 0..sizes.len() - 1 {
        for j in 0..sizes[l + 1] {
            net.weights[l][j] = next_nums(sizes[l])?;
        }
        net.biases[l] = next_nums(sizes[l + 1])?;
    }
    for i in 0..sizes[0] {
        let v = next_nums(2)?;
        net.scaling[i] = (v[0], v[1]);
    }
    Ok(net)
}
