use foxann::data::Matrix;
use foxann::mlp::{Network, Topology};
use foxann::seed;
use foxann::trainers::{
    foxann_objective, loss_gradient, train_backprop, train_foxann, train_logreg, LossMode,
    Samples, TrainConfig,
};
use proptest::prelude::*;
use rand::Rng;

fn samples(rows: &[Vec<f64>], labels: &[usize], n_classes: usize) -> Samples {
    Samples::new(Matrix::from_rows(rows).unwrap(), labels.to_vec(), n_classes).unwrap()
}

/// Straight-line forward pass written independently of the library: per
/// layer the weight from input i to unit j sits at i * n_out + j, biases follow.
fn reference_half_sum(sizes: &[usize], w: &[f64], rows: &[Vec<f64>], labels: &[usize]) -> f64 {
    let mut total = 0.0;
    for (x, &label) in rows.iter().zip(labels) {
        let mut a = x.clone();
        let mut off = 0;
        for pair in sizes.windows(2) {
            let (n_in, n_out) = (pair[0], pair[1]);
            let bias = off + n_in * n_out;
            a = (0..n_out)
                .map(|j| {
                    let z: f64 = w[bias + j] + (0..n_in).map(|i| a[i] * w[off + i * n_out + j]).sum::<f64>();
                    1.0 / (1.0 + (-z).exp())
                })
                .collect();
            off = bias + n_out;
        }
        for (k, y) in a.iter().enumerate() {
            let t = if k == label { 1.0 } else { 0.0 };
            total += 0.5 * (t - y) * (t - y);
        }
    }
    total
}

#[test]
fn gradient_matches_central_differences() {
    let sizes = [4, 8, 2, 3];
    let topology = Topology::new(sizes.to_vec()).unwrap();
    assert_eq!(topology, Topology::for_classification(4, 3).unwrap());
    let rows = vec![
        vec![0.1, 0.9, 0.4, 0.3],
        vec![0.8, 0.2, 0.7, 0.5],
        vec![0.5, 0.5, 0.1, 0.9],
    ];
    let labels = [0, 1, 2];
    let data = samples(&rows, &labels, 3);

    let mut rng = seed::rng(42);
    let w: Vec<f64> = (0..topology.weight_count()).map(|_| rng.random_range(-1.5..1.5)).collect();
    let analytic = loss_gradient(&Network::unflatten(&w, &topology).unwrap(), &data).unwrap();
    assert_eq!(analytic.len(), 67);

    let h = 1e-5;
    let mut worst = 0.0f64;
    for k in 0..w.len() {
        let mut plus = w.clone();
        let mut minus = w.clone();
        plus[k] += h;
        minus[k] -= h;
        let numeric = (reference_half_sum(&sizes, &plus, &rows, &labels)
            - reference_half_sum(&sizes, &minus, &rows, &labels))
            / (2.0 * h);
        let rel = (analytic[k] - numeric).abs() / analytic[k].abs().max(numeric.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    assert!(worst <= 1e-4, "max relative error {worst:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zero_weights_cost_a_quarter(
        n_features in 1usize..8,
        n_classes in 2usize..5,
        raw in proptest::collection::vec((any::<u64>(), any::<usize>()), 1..30),
    ) {
        let rows: Vec<Vec<f64>> = raw
            .iter()
            .map(|&(s, _)| {
                let mut r = seed::rng(s);
                (0..n_features).map(|_| r.random_range(-2.0..2.0)).collect()
            })
            .collect();
        let labels: Vec<usize> = raw.iter().map(|&(_, l)| l % n_classes).collect();
        let t = Topology::for_classification(n_features, n_classes).unwrap();
        let zero = vec![0.0; t.weight_count()];
        let loss = foxann_objective(&zero, &t, &samples(&rows, &labels, n_classes)).unwrap();
        // every unit outputs sigmoid(0) = 1/2 whatever the target
        prop_assert!((loss - 0.25).abs() < 1e-15, "{}", loss);
    }

    #[test]
    fn objective_ignores_sample_order(seed_w in any::<u64>(), rot in 0usize..6) {
        let rows = vec![
            vec![0.1, 0.2, 0.3], vec![0.9, 0.1, 0.5], vec![0.4, 0.4, 0.4],
            vec![0.0, 1.0, 0.2], vec![0.7, 0.3, 0.8], vec![0.6, 0.9, 0.1],
        ];
        let labels = vec![0, 1, 2, 0, 1, 2];
        let t = Topology::for_classification(3, 3).unwrap();
        let mut r = seed::rng(seed_w);
        let w: Vec<f64> = (0..t.weight_count()).map(|_| r.random_range(-3.0..3.0)).collect();
        let a = foxann_objective(&w, &t, &samples(&rows, &labels, 3)).unwrap();
        let mut rows2 = rows.clone();
        let mut labels2 = labels.clone();
        rows2.rotate_left(rot);
        labels2.rotate_left(rot);
        let b = foxann_objective(&w, &t, &samples(&rows2, &labels2, 3)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }
}

/// Two tight clusters on either side of x0 + x1 = 1.
fn separable() -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut r = seed::rng(11);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..20 {
        let c = i % 2;
        let centre = if c == 0 { 0.2 } else { 0.8 };
        rows.push(vec![centre + r.random_range(-0.1..0.1), centre + r.random_range(-0.1..0.1)]);
        labels.push(c);
    }
    (rows, labels)
}

#[test]
fn foxann_fits_a_separable_toy_set() {
    let (rows, labels) = separable();
    // oracle: a separating line exists, found by exhaustive search over a grid
    let exists = (0..180).any(|deg| {
        let th = (deg as f64).to_radians();
        let (a, b) = (th.cos(), th.sin());
        (0..=100).any(|k| {
            let c = -2.0 + 4.0 * k as f64 / 100.0;
            rows.iter().zip(&labels).all(|(x, &l)| ((a * x[0] + b * x[1] + c) > 0.0) == (l == 1))
        })
    });
    assert!(exists);

    let data = samples(&rows, &labels, 2);
    let t = Topology::for_classification(2, 2).unwrap();
    let cfg = TrainConfig {
        epochs: 100,
        seed: 4,
        ..TrainConfig::default()
    };
    let (model, trace) = train_foxann(&data, &data, &t, &cfg).unwrap();
    assert_eq!(trace.len(), 100);
    let predicted = model.predict_all(&data.features).unwrap();
    assert_eq!(predicted, labels, "final train loss {}", model.train_loss);
}

#[test]
fn backprop_fits_a_separable_toy_set() {
    let (rows, labels) = separable();
    let data = samples(&rows, &labels, 2);
    let t = Topology::for_classification(2, 2).unwrap();
    let (model, trace) = train_backprop(&data, &data, &t, &TrainConfig::default()).unwrap();
    assert_eq!(model.predict_all(&data.features).unwrap(), labels);
    assert!(trace.train_loss.last() < trace.train_loss.first());
}

#[test]
fn logreg_matches_the_best_threshold() {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..10 {
        rows.push(vec![0.0]);
        labels.push(0);
        rows.push(vec![1.0]);
        labels.push(1);
    }
    let data = samples(&rows, &labels, 2);
    // brute force over thresholds: the best 1-D rule classifies everything
    let best = (0..=20)
        .map(|k| {
            let th = -0.5 + k as f64 * 0.1;
            rows.iter().zip(&labels).filter(|(x, &l)| ((x[0] > th) as usize) == l).count()
        })
        .max()
        .unwrap();
    assert_eq!(best, 20);

    let (model, trace) = train_logreg(&data, &data, 2, &TrainConfig::default()).unwrap();
    let correct = model
        .predict_all(&data.features)
        .unwrap()
        .iter()
        .zip(&labels)
        .filter(|(p, l)| p == l)
        .count();
    assert_eq!(correct, best);
    assert!(trace.train_loss.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn trainers_are_deterministic() {
    let (rows, labels) = separable();
    let data = samples(&rows, &labels, 2);
    let t = Topology::for_classification(2, 2).unwrap();
    let cfg = TrainConfig {
        epochs: 20,
        seed: 9,
        ..TrainConfig::default()
    };
    assert_eq!(train_foxann(&data, &data, &t, &cfg).unwrap(), train_foxann(&data, &data, &t, &cfg).unwrap());
    assert_eq!(train_backprop(&data, &data, &t, &cfg).unwrap(), train_backprop(&data, &data, &t, &cfg).unwrap());
    assert_eq!(train_logreg(&data, &data, 2, &cfg).unwrap(), train_logreg(&data, &data, 2, &cfg).unwrap());
    let other = TrainConfig { seed: 10, ..cfg.clone() };
    assert_ne!(train_foxann(&data, &data, &t, &cfg).unwrap().0, train_foxann(&data, &data, &t, &other).unwrap().0);
}

#[test]
fn half_sum_mode_scales_mean_mode() {
    let (rows, labels) = separable();
    let data = samples(&rows, &labels, 2);
    let t = Topology::for_classification(2, 2).unwrap();
    let mut r = seed::rng(3);
    let w: Vec<f64> = (0..t.weight_count()).map(|_| r.random_range(-3.0..3.0)).collect();
    let model = foxann::trainers::TrainedModel {
        kind: foxann::trainers::ModelKind::Foxann,
        topology: t.clone(),
        weights: w.clone(),
        train_loss: 0.0,
        val_loss: 0.0,
    };
    let mean = model.loss_on(&data, LossMode::Mean).unwrap();
    let half = model.loss_on(&data, LossMode::HalfSum).unwrap();
    assert!((half - mean * 20.0 * 2.0 / 2.0).abs() < 1e-12);
    assert_eq!(mean, foxann_objective(&w, &t, &data).unwrap());
    assert!((half - reference_half_sum(t.layer_sizes(), &w, &rows, &labels)).abs() < 1e-12);
}
