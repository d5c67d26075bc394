//! Fully connected network trained with Adam, plus a finite-difference
//! gradient checker.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{argmax, check_diverged};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Identity => "identity",
        }
    }

    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Identity => z,
        }
    }

    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

/// Output layer and its loss.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Head {
    /// One logit, binary cross-entropy.
    Sigmoid,
    /// One logit per class, categorical cross-entropy.
    Softmax,
    /// Raw outputs, half squared error.
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpParams {
    pub hidden_layers: usize,
    pub hidden_units: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub dropout: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    pub activation: Activation,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden_layers: 3,
            hidden_units: 64,
            epochs: 10,
            batch_size: 64,
            dropout: 0.001,
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-8,
            activation: Activation::Relu,
        }
    }
}

/// Dense layer with input-major weights: `weights[i * outputs + o]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    fn add_row(&self, i: usize, x: f64, z: &mut [f64]) {
        let w = &self.weights[i * self.outputs..(i + 1) * self.outputs];
        for (zo, wo) in z.iter_mut().zip(w) {
            *zo += x * wo;
        }
    }

    fn forward(&self, input: Input<'_>, z: &mut Vec<f64>) {
        z.clear();
        z.extend_from_slice(&self.bias);
        match input {
            Input::Sparse(x) => {
                for (i, v) in x.iter().filter(|&(i, _)| i < self.inputs) {
                    self.add_row(i, v, z);
                }
            }
            Input::Dense(x) => {
                for (i, &v) in x.iter().enumerate().filter(|(_, v)| **v != 0.0) {
                    self.add_row(i, v, z);
                }
            }
        }
    }

    fn accumulate(&self, input: Input<'_>, delta: &[f64], grad: &mut Layer, scale: f64) {
        let o = self.outputs;
        let mut add = |i: usize, v: f64| {
            let g = &mut grad.weights[i * o..(i + 1) * o];
            for (gw, d) in g.iter_mut().zip(delta) {
                *gw += scale * v * d;
            }
        };
        match input {
            Input::Sparse(x) => x.iter().filter(|&(i, _)| i < self.inputs).for_each(|(i, v)| add(i, v)),
            Input::Dense(x) => x
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .for_each(|(i, &v)| add(i, v)),
        }
        for (gb, d) in grad.bias.iter_mut().zip(delta) {
            *gb += scale * d;
        }
    }
}

#[derive(Clone, Copy)]
enum Input<'a> {
    Sparse(&'a SparseVec),
    Dense(&'a [f64]),
}

#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Class(usize),
    Values(&'a [f64]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub layers: Vec<Layer>,
    pub activation: Activation,
    pub head: Head,
}

pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Loss of one sample and the gradient with respect to the output logits.
fn head_loss(head: Head, out: &[f64], target: Target<'_>, delta: &mut Vec<f64>) -> f64 {
    delta.clear();
    match (head, target) {
        (Head::Sigmoid, Target::Class(y)) => {
            let z = out[0];
            let y = if y == 1 { 1.0 } else { 0.0 };
            delta.push(sigmoid(z) - y);
            z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
        }
        (Head::Softmax, Target::Class(y)) => {
            let p = softmax(out);
            let max = out.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + out.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
            delta.extend(p.iter().enumerate().map(|(c, pc)| pc - if c == y { 1.0 } else { 0.0 }));
            lse - out[y]
        }
        (Head::Linear, Target::Values(t)) => {
            delta.extend(out.iter().zip(t).map(|(z, t)| z - t));
            0.5 * delta.iter().map(|d| d * d).sum::<f64>()
        }
        (head, target) => unreachable!("head {head:?} paired with target {target:?}"),
    }
}

struct Scratch {
    zs: Vec<Vec<f64>>,
    acts: Vec<Vec<f64>>,
    masks: Vec<Vec<f64>>,
    delta: Vec<f64>,
    next: Vec<f64>,
}

impl Scratch {
    fn new(layers: usize) -> Self {
        Scratch {
            zs: vec![Vec::new(); layers],
            acts: vec![Vec::new(); layers],
            masks: vec![Vec::new(); layers],
            delta: Vec::new(),
            next: Vec::new(),
        }
    }
}

struct Dropout<'a> {
    rate: f64,
    rng: &'a mut ChaCha8Rng,
}

impl Network {
    /// Hidden layers use He-scaled normal weights for ReLU, unit-fan-in
    /// scaling otherwise; biases start at zero.
    pub fn init(
        inputs: usize,
        hidden_layers: usize,
        hidden_units: usize,
        outputs: usize,
        activation: Activation,
        head: Head,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::init_with(inputs, hidden_layers, hidden_units, outputs, activation, head, &mut rng)
    }

    fn init_with(
        inputs: usize,
        hidden_layers: usize,
        hidden_units: usize,
        outputs: usize,
        activation: Activation,
        head: Head,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let mut sizes = vec![inputs];
        sizes.extend(std::iter::repeat_n(hidden_units, hidden_layers));
        sizes.push(outputs);
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(l, w)| {
                let gain = if l < last && activation == Activation::Relu { 2.0 } else { 1.0 };
                let std = (gain / w[0].max(1) as f64).sqrt();
                let normal = Normal::new(0.0, std).expect("positive standard deviation");
                let mut layer = Layer::zeros(w[0], w[1]);
                layer.weights.iter_mut().for_each(|v| *v = normal.sample(rng));
                layer
            })
            .collect();
        Network { layers, activation, head }
    }

    pub fn head_name(&self) -> &'static str {
        match self.head {
            Head::Sigmoid => "sigmoid with binary cross-entropy",
            Head::Softmax => "softmax with categorical cross-entropy",
            Head::Linear => "linear with squared error",
        }
    }

    fn zeros_like(&self) -> Vec<Layer> {
        self.layers.iter().map(|l| Layer::zeros(l.inputs, l.outputs)).collect()
    }

    fn run(&self, x: &SparseVec, s: &mut Scratch, mut dropout: Option<&mut Dropout<'_>>) {
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let input = if l == 0 { Input::Sparse(x) } else { Input::Dense(&s.acts[l - 1]) };
            let mut z = std::mem::take(&mut s.zs[l]);
            layer.forward(input, &mut z);
            if l < last {
                let mask = &mut s.masks[l];
                mask.clear();
                match dropout.as_deref_mut() {
                    Some(d) if d.rate > 0.0 => {
                        let keep = 1.0 / (1.0 - d.rate);
                        mask.extend((0..z.len()).map(|_| if d.rng.random::<f64>() < d.rate { 0.0 } else { keep }));
                    }
                    _ => mask.resize(z.len(), 1.0),
                }
                let act = &mut s.acts[l];
                act.clear();
                act.extend(z.iter().zip(mask.iter()).map(|(&v, m)| self.activation.apply(v) * m));
            }
            s.zs[l] = z;
        }
    }

    pub fn outputs(&self, x: &SparseVec) -> Vec<f64> {
        let mut s = Scratch::new(self.layers.len());
        self.run(x, &mut s, None);
        s.zs.pop().unwrap_or_default()
    }

    pub fn probabilities(&self, x: &SparseVec) -> Vec<f64> {
        let out = self.outputs(x);
        match self.head {
            Head::Sigmoid => {
                let p = sigmoid(out[0]);
                vec![1.0 - p, p]
            }
            Head::Softmax => softmax(&out),
            Head::Linear => out,
        }
    }

    pub fn predict(&self, x: &SparseVec) -> usize {
        match self.head {
            Head::Sigmoid => usize::from(sigmoid(self.outputs(x)[0]) > 0.5),
            _ => argmax(&self.outputs(x)),
        }
    }

    /// Forward and backward pass for one sample; adds `scale` times its
    /// parameter gradient into `grads` and returns its loss.
    fn backprop(
        &self,
        x: &SparseVec,
        target: Target<'_>,
        s: &mut Scratch,
        grads: &mut [Layer],
        scale: f64,
        dropout: Option<&mut Dropout<'_>>,
    ) -> f64 {
        self.run(x, s, dropout);
        let last = self.layers.len() - 1;
        let loss = head_loss(self.head, &s.zs[last], target, &mut s.delta);
        for l in (0..self.layers.len()).rev() {
            let input = if l == 0 { Input::Sparse(x) } else { Input::Dense(&s.acts[l - 1]) };
            self.layers[l].accumulate(input, &s.delta, &mut grads[l], scale);
            if l > 0 {
                let layer = &self.layers[l];
                s.next.clear();
                for i in 0..layer.inputs {
                    let w = &layer.weights[i * layer.outputs..(i + 1) * layer.outputs];
                    let back: f64 = w.iter().zip(&s.delta).map(|(w, d)| w * d).sum();
                    s.next
                        .push(back * self.activation.derivative(s.zs[l - 1][i]) * s.masks[l - 1][i]);
                }
                std::mem::swap(&mut s.delta, &mut s.next);
            }
        }
        loss
    }

    /// Mean loss over the samples, without dropout.
    pub fn loss(&self, inputs: &[SparseVec], targets: &[Target<'_>]) -> f64 {
        let mut s = Scratch::new(self.layers.len());
        let mut delta = Vec::new();
        let total: f64 = inputs
            .iter()
            .zip(targets)
            .map(|(x, &t)| {
                self.run(x, &mut s, None);
                head_loss(self.head, &s.zs[self.layers.len() - 1], t, &mut delta)
            })
            .sum();
        total / inputs.len().max(1) as f64
    }

    /// Mean loss and its exact gradient, without dropout.
    pub fn gradient(&self, inputs: &[SparseVec], targets: &[Target<'_>]) -> (f64, Vec<Layer>) {
        let mut grads = self.zeros_like();
        let mut s = Scratch::new(self.layers.len());
        let scale = 1.0 / inputs.len().max(1) as f64;
        let mut total = 0.0;
        for (x, &t) in inputs.iter().zip(targets) {
            total += self.backprop(x, t, &mut s, &mut grads, scale, None);
        }
        (total * scale, grads)
    }

    pub fn fit(data: &FeatureMatrix, hp: &MlpParams, seed: u64) -> Result<(Self, Vec<f64>)> {
        let n_classes = data.n_classes();
        let (head, outputs) = if n_classes == 2 { (Head::Sigmoid, 1) } else { (Head::Softmax, n_classes) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = Self::init_with(
            data.n_features,
            hp.hidden_layers,
            hp.hidden_units,
            outputs,
            hp.activation,
            head,
            &mut rng,
        );
        let targets: Vec<Target<'_>> = data.labels.iter().map(|&y| Target::Class(y)).collect();
        let mut first = net.zeros_like();
        let mut second = net.zeros_like();
        let mut grads = net.zeros_like();
        let mut scratch = Scratch::new(net.layers.len());
        let mut order: Vec<usize> = (0..data.rows.len()).collect();
        let mut history = Vec::with_capacity(hp.epochs);
        let mut step = 0i32;

        for epoch in 0..hp.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(hp.batch_size) {
                for g in grads.iter_mut() {
                    g.weights.iter_mut().for_each(|v| *v = 0.0);
                    g.bias.iter_mut().for_each(|v| *v = 0.0);
                }
                let scale = 1.0 / batch.len() as f64;
                let mut dropout = Dropout {
                    rate: hp.dropout,
                    rng: &mut rng,
                };
                for &i in batch {
                    net.backprop(&data.rows[i], targets[i], &mut scratch, &mut grads, scale, Some(&mut dropout));
                }
                step += 1;
                let c1 = 1.0 - hp.beta1.powi(step);
                let c2 = 1.0 - hp.beta2.powi(step);
                for (((layer, g), m), v) in net.layers.iter_mut().zip(&grads).zip(&mut first).zip(&mut second) {
                    let pairs = [
                        (&mut layer.weights, &g.weights, &mut m.weights, &mut v.weights),
                        (&mut layer.bias, &g.bias, &mut m.bias, &mut v.bias),
                    ];
                    for (p, g, m, v) in pairs {
                        for j in 0..p.len() {
                            m[j] = hp.beta1 * m[j] + (1.0 - hp.beta1) * g[j];
                            v[j] = hp.beta2 * v[j] + (1.0 - hp.beta2) * g[j] * g[j];
                            p[j] -= hp.learning_rate * (m[j] / c1) / ((v[j] / c2).sqrt() + hp.adam_epsilon);
                        }
                    }
                }
            }
            let loss = net.loss(&data.rows, &targets);
            check_diverged(epoch, loss)?;
            history.push(loss);
        }
        Ok((net, history))
    }

    fn slot(&mut self, layer: usize, bias: bool) -> &mut Vec<f64> {
        if bias {
            &mut self.layers[layer].bias
        } else {
            &mut self.layers[layer].weights
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeTargets {
    Classes { labels: Vec<usize>, n_classes: usize },
    Regression(Vec<Vec<f64>>),
}

/// Tiny dense dataset for gradient checking.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub inputs: Vec<Vec<f64>>,
    pub targets: ProbeTargets,
}

#[derive(Clone, Debug)]
pub struct GradientCheck {
    pub max_relative_error: f64,
    pub network: Network,
    /// Flattened per layer as weights then bias.
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
}

/// Relative errors use `max(|a|, |n|, 1e-7)` as denominator so that
/// gradients near zero compare on an absolute scale.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-7;

pub fn relative_error(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(RELATIVE_ERROR_FLOOR)
}

/// Builds a network from `hp` sized to the probe (classification probes get
/// the training head, regression probes a linear head) and compares
/// backpropagated gradients with central differences.
pub fn gradient_check(hp: &MlpParams, probe: &Probe, epsilon: f64, seed: u64) -> Result<GradientCheck> {
    let rows = probe.inputs.len();
    let width = probe.inputs.iter().map(Vec::len).max().unwrap_or(0);
    if rows == 0 || rows > 20 || width > 10 {
        return Err(Error::Contract(format!(
            "probe must have 1 to 20 rows and at most 10 features, got {rows}x{width}"
        )));
    }
    let inputs: Vec<SparseVec> = probe.inputs.iter().map(|r| SparseVec::from_dense(r)).collect();
    let (head, outputs, targets): (Head, usize, Vec<Target<'_>>) = match &probe.targets {
        ProbeTargets::Classes { labels, n_classes } => {
            let targets = labels.iter().map(|&y| Target::Class(y)).collect();
            if *n_classes == 2 {
                (Head::Sigmoid, 1, targets)
            } else {
                (Head::Softmax, *n_classes, targets)
            }
        }
        ProbeTargets::Regression(t) => (
            Head::Linear,
            t.first().map_or(1, Vec::len),
            t.iter().map(|v| Target::Values(v)).collect(),
        ),
    };
    if targets.len() != rows {
        return Err(Error::Contract("probe inputs and targets differ in length".into()));
    }
    let mut net = Network::init(width, hp.hidden_layers, hp.hidden_units, outputs, hp.activation, head, seed);
    let (_, grads) = net.gradient(&inputs, &targets);

    let mut analytic = Vec::new();
    let mut numeric = Vec::new();
    let mut worst: f64 = 0.0;
    for (l, grad) in grads.iter().enumerate() {
        for bias in [false, true] {
            let g = if bias { &grad.bias } else { &grad.weights };
            for (j, &a) in g.iter().enumerate() {
                let orig = net.slot(l, bias)[j];
                net.slot(l, bias)[j] = orig + epsilon;
                let up = net.loss(&inputs, &targets);
                net.slot(l, bias)[j] = orig - epsilon;
                let down = net.loss(&inputs, &targets);
                net.slot(l, bias)[j] = orig;
                let n = (up - down) / (2.0 * epsilon);
                worst = worst.max(relative_error(a, n));
                analytic.push(a);
                numeric.push(n);
            }
        }
    }
    Ok(GradientCheck {
        max_relative_error: worst,
        network: net,
        analytic,
        numeric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::testutil::separable;
    use proptest::prelude::{prop_assert, proptest};

    fn probe_inputs(rows: usize, width: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..rows)
            .map(|_| (0..width).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
            .collect()
    }

    #[test]
    fn linear_network_matches_closed_form() {
        let inputs = probe_inputs(12, 4, 1);
        let targets: Vec<Vec<f64>> = inputs.iter().map(|x| vec![x[0] - 2.0 * x[3], 0.5 * x[1]]).collect();
        let probe = Probe {
            inputs: inputs.clone(),
            targets: ProbeTargets::Regression(targets.clone()),
        };
        let hp = MlpParams {
            hidden_layers: 0,
            activation: Activation::Identity,
            ..MlpParams::default()
        };
        let check = gradient_check(&hp, &probe, 1e-5, 7).unwrap();
        assert!(check.max_relative_error < 1e-8, "{}", check.max_relative_error);

        // dL/dW[i][k] = mean_n (z_nk - t_nk) x_ni, dL/db[k] = mean_n (z_nk - t_nk)
        let layer = &check.network.layers[0];
        let mut expected_w = vec![0.0; 8];
        let mut expected_b = vec![0.0; 2];
        for (x, t) in inputs.iter().zip(&targets) {
            for k in 0..2 {
                let z = layer.bias[k] + (0..4).map(|i| x[i] * layer.weights[i * 2 + k]).sum::<f64>();
                let err = (z - t[k]) / 12.0;
                expected_b[k] += err;
                for i in 0..4 {
                    expected_w[i * 2 + k] += err * x[i];
                }
            }
        }
        let closed: Vec<f64> = expected_w.into_iter().chain(expected_b).collect();
        for (a, c) in check.analytic.iter().zip(&closed) {
            assert!(relative_error(*a, *c) < 1e-8);
        }
    }

    #[test]
    fn full_network_gradients_match_finite_differences() {
        for (n_classes, seed) in [(2, 3), (3, 4)] {
            let inputs = probe_inputs(20, 10, seed);
            let labels = (0..20).map(|i| i % n_classes).collect();
            let probe = Probe {
                inputs,
                targets: ProbeTargets::Classes { labels, n_classes },
            };
            let check = gradient_check(&MlpParams::default(), &probe, 1e-5, seed).unwrap();
            assert!(check.max_relative_error < 1e-3, "{}", check.max_relative_error);
        }
    }

    #[test]
    fn zero_input_bias_gradients_are_output_errors() {
        let labels = vec![1, 0, 1, 1];
        let probe = Probe {
            inputs: vec![vec![0.0; 3]; 4],
            targets: ProbeTargets::Classes {
                labels: labels.clone(),
                n_classes: 2,
            },
        };
        let check = gradient_check(&MlpParams::default(), &probe, 1e-5, 2).unwrap();
        let net = &check.network;
        let inputs = vec![SparseVec::default(); 4];
        let targets: Vec<Target<'_>> = labels.iter().map(|&y| Target::Class(y)).collect();
        let (_, grads) = net.gradient(&inputs, &targets);
        let out = net.layers.last().unwrap();
        let p = sigmoid(out.bias[0]);
        let expected: f64 = labels.iter().map(|&y| (p - y as f64) / 4.0).sum();
        assert_eq!(grads.last().unwrap().bias[0], expected);
        assert!(grads.last().unwrap().weights.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn zero_weights_predict_class_zero() {
        let mut net = Network::init(3, 3, 4, 1, Activation::Relu, Head::Sigmoid, 1);
        for l in &mut net.layers {
            l.weights.iter_mut().for_each(|w| *w = 0.0);
        }
        assert_eq!(net.probabilities(&SparseVec::from_dense(&[1.0, 2.0, 3.0])), [0.5, 0.5]);
        assert_eq!(net.predict(&SparseVec::from_dense(&[1.0, 2.0, 3.0])), 0);
    }

    #[test]
    fn full_batch_training_loss_strictly_decreases() {
        let data = separable(40, 8);
        let hp = MlpParams {
            batch_size: 40,
            epochs: 10,
            dropout: 0.0,
            ..MlpParams::default()
        };
        let (_, history) = Network::fit(&data, &hp, 5).unwrap();
        assert_eq!(history.len(), 10);
        for w in history.windows(2) {
            assert!(w[1] < w[0], "{history:?}");
        }
    }

    #[test]
    fn ternary_training_uses_softmax() {
        let mut data = separable(30, 2);
        data.classes.push("third".into());
        for i in (0..30).step_by(3) {
            data.labels[i] = 2;
        }
        let (net, _) = Network::fit(&data, &MlpParams::default(), 1).unwrap();
        assert_eq!(net.head, Head::Softmax);
        assert_eq!(net.layers.len(), 4);
        assert!(net.layers[..3].iter().all(|l| l.outputs == 64));
    }

    proptest! {
        #[test]
        fn softmax_sums_to_one(z in proptest::collection::vec(-500.0f64..500.0, 1..6)) {
            let total: f64 = softmax(&z).iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }
}
