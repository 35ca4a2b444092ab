//! Fully connected feedforward networks with sigmoid units.
//!
//! # Flat parameter layout
//!
//! A network is stored as one flat vector, which is also the search point the
//! FOX optimizer moves around. Layers appear in order from input to output.
//! Each layer with `n_in` inputs and `n_out` units contributes
//!
//! 1. its weight matrix, `n_in * n_out` values, row-major by input index:
//!    the weight from input `i` to unit `j` sits at `i * n_out + j`;
//! 2. its bias vector, `n_out` values.
//!
//! so the total length is `sum((n_in + 1) * n_out)` over consecutive layer
//! pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Layer sizes from input to output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Topology {
    layer_sizes: Vec<usize>,
}

impl Topology {
    pub fn new(layer_sizes: Vec<usize>) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a topology needs at least 2 layers, got {}",
                layer_sizes.len()
            )));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "layer sizes must be positive, got {layer_sizes:?}"
            )));
        }
        Ok(Self { layer_sizes })
    }

    /// Two hidden layers: twice the input width, then half of it (rounded
    /// down, at least one unit).
    pub fn for_classification(n_features: usize, n_classes: usize) -> Result<Self> {
        if n_classes < 2 {
            return Err(Error::TooFewClasses(n_classes));
        }
        if n_features == 0 {
            return Err(Error::InvalidParameter("n_features must be at least 1".into()));
        }
        Self::new(vec![
            n_features,
            2 * n_features,
            (n_features / 2).max(1),
            n_classes,
        ])
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn n_inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn n_outputs(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    /// `(n_in, n_out)` for each weight layer.
    pub fn layers(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.layer_sizes.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn weight_count(&self) -> usize {
        self.layers().map(|(n_in, n_out)| (n_in + 1) * n_out).sum()
    }

    pub fn widest(&self) -> usize {
        *self.layer_sizes.iter().max().unwrap()
    }
}

/// Logistic function, evaluated without overflow for large `|x|`.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Read-only view of one layer inside a flat parameter vector.
#[derive(Debug, Clone, Copy)]
pub struct LayerRef<'a> {
    pub n_in: usize,
    pub n_out: usize,
    /// Row-major `n_in x n_out`.
    pub weights: &'a [f64],
    pub biases: &'a [f64],
}

impl LayerRef<'_> {
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n_out + j]
    }

    /// `out[j] = sigmoid(b[j] + sum_i input[i] * w[i][j])`.
    #[inline]
    fn forward_into(&self, input: &[f64], out: &mut [f64]) {
        out.copy_from_slice(self.biases);
        for (&x, row) in input.iter().zip(self.weights.chunks_exact(self.n_out)) {
            for (o, &w) in out.iter_mut().zip(row) {
                *o += x * w;
            }
        }
        for o in out.iter_mut() {
            *o = sigmoid(*o);
        }
    }
}

/// Splits a flat vector into per-layer views. `params` must already have the
/// right length.
pub(crate) fn layer_views<'a>(
    topology: &'a Topology,
    params: &'a [f64],
) -> impl Iterator<Item = LayerRef<'a>> + 'a {
    let mut offset = 0;
    topology.layers().map(move |(n_in, n_out)| {
        let w_end = offset + n_in * n_out;
        let b_end = w_end + n_out;
        let layer = LayerRef {
            n_in,
            n_out,
            weights: &params[offset..w_end],
            biases: &params[w_end..b_end],
        };
        offset = b_end;
        layer
    })
}

/// Reusable activation buffers for [`forward_flat`].
#[derive(Debug, Clone)]
pub struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Scratch {
    pub fn new(topology: &Topology) -> Self {
        let w = topology.widest();
        Self {
            a: vec![0.0; w],
            b: vec![0.0; w],
        }
    }
}

/// Forward pass straight from a flat parameter slice, returning the output
/// activations inside `scratch`. Lengths are the caller's responsibility.
pub fn forward_flat<'s>(
    topology: &Topology,
    params: &[f64],
    input: &[f64],
    scratch: &'s mut Scratch,
) -> &'s [f64] {
    debug_assert_eq!(params.len(), topology.weight_count());
    debug_assert_eq!(input.len(), topology.n_inputs());
    let Scratch { a, b } = scratch;
    let mut cur: &mut Vec<f64> = a;
    let mut next: &mut Vec<f64> = b;
    cur[..input.len()].copy_from_slice(input);
    let mut width = input.len();
    for layer in layer_views(topology, params) {
        layer.forward_into(&cur[..width], &mut next[..layer.n_out]);
        width = layer.n_out;
        std::mem::swap(&mut cur, &mut next);
    }
    &cur[..width]
}

/// A network: a topology plus its flat parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    topology: Topology,
    params: Vec<f64>,
}

impl Network {
    /// Builds a network from a flat vector in the documented layout.
    pub fn unflatten(weights: &[f64], topology: &Topology) -> Result<Self> {
        Self::from_vec(weights.to_vec(), topology.clone())
    }

    pub fn from_vec(params: Vec<f64>, topology: Topology) -> Result<Self> {
        let expected = topology.weight_count();
        if params.len() != expected {
            return Err(Error::LengthMismatch {
                what: "weight vector",
                expected,
                actual: params.len(),
            });
        }
        Ok(Self { topology, params })
    }

    pub fn zeros(topology: &Topology) -> Self {
        Self {
            params: vec![0.0; topology.weight_count()],
            topology: topology.clone(),
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.params.clone()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn into_params(self) -> Vec<f64> {
        self.params
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn layer(&self, index: usize) -> LayerRef<'_> {
        layer_views(&self.topology, &self.params)
            .nth(index)
            .expect("layer index out of range")
    }

    pub fn layers(&self) -> impl Iterator<Item = LayerRef<'_>> {
        layer_views(&self.topology, &self.params)
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.topology.n_inputs() {
            return Err(Error::LengthMismatch {
                what: "network input",
                expected: self.topology.n_inputs(),
                actual: input.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut scratch = Scratch::new(&self.topology);
        Ok(forward_flat(&self.topology, &self.params, input, &mut scratch).to_vec())
    }

    pub fn predict(&self, input: &[f64]) -> Result<usize> {
        self.forward(input).map(|out| argmax(&out))
    }
}
