use foxann::mlp::{argmax, sigmoid, Network, Topology};
use proptest::prelude::*;

fn topology() -> impl Strategy<Value = Topology> {
    (1usize..6, 2usize..5).prop_map(|(n, c)| Topology::for_classification(n, c).unwrap())
}

fn net_and_input() -> impl Strategy<Value = (Network, Vec<f64>)> {
    topology().prop_flat_map(|t| {
        let w = proptest::collection::vec(-50.0f64..50.0, t.weight_count());
        let x = proptest::collection::vec(-5.0f64..5.0, t.n_inputs());
        (w, x).prop_map(move |(w, x)| (Network::unflatten(&w, &t).unwrap(), x))
    })
}

#[test]
fn weight_counts_of_the_bundled_topologies() {
    // n -> 2n -> n/2 -> C, each layer carrying n_in*n_out weights plus n_out biases
    let count = |n: usize, c: usize| {
        let h2 = (n / 2).max(1);
        (n * 2 * n + 2 * n) + (2 * n * h2 + h2) + (h2 * c + c)
    };
    for (n, c, want) in [(4, 3, 67), (13, 3, 547), (30, 2, 2807)] {
        assert_eq!(count(n, c), want);
        let t = Topology::for_classification(n, c).unwrap();
        assert_eq!(t.layer_sizes(), &[n, 2 * n, n / 2, c]);
        assert_eq!(t.weight_count(), want);
    }
}

#[test]
fn sigmoid_fixed_values() {
    assert_eq!(sigmoid(0.0), 0.5);
    assert_eq!(sigmoid(1000.0), 1.0);
    assert_eq!(sigmoid(-1000.0), 0.0);
    assert!(!sigmoid(-745.0).is_nan());
}

proptest! {
    #[test]
    fn flatten_unflatten_is_identity(t in topology(), seed in any::<u64>()) {
        let mut state = seed;
        let w: Vec<f64> = (0..t.weight_count())
            .map(|_| {
                state = foxann::seed::derive(state, &[1]);
                (state >> 11) as f64 / (1u64 << 53) as f64 * 6.0 - 3.0
            })
            .collect();
        let net = Network::unflatten(&w, &t).unwrap();
        prop_assert_eq!(net.flatten(), w.clone());
        prop_assert_eq!(Network::unflatten(&net.flatten(), &t).unwrap(), net);
        prop_assert!(Network::unflatten(&w[1..], &t).is_err());
    }

    #[test]
    fn outputs_are_probabilities((net, x) in net_and_input()) {
        let y = net.forward(&x).unwrap();
        prop_assert_eq!(y.len(), net.topology().n_outputs());
        prop_assert!(y.iter().all(|v| (0.0..=1.0).contains(v) && v.is_finite()));
        prop_assert_eq!(net.predict(&x).unwrap(), argmax(&y));
    }

    #[test]
    fn sigmoid_is_monotone_and_symmetric(a in -40.0f64..40.0, b in -40.0f64..40.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(sigmoid(lo) <= sigmoid(hi));
        prop_assert!((sigmoid(a) + sigmoid(-a) - 1.0).abs() <= 1e-12);
        // past |x| ~ 37 the result rounds to exactly 0 or 1
        if a.abs() < 30.0 {
            prop_assert!(sigmoid(a) > 0.0 && sigmoid(a) < 1.0);
        }
    }

    #[test]
    fn argmax_ignores_monotone_maps(v in proptest::collection::vec(-10.0f64..10.0, 1..8)) {
        let i = argmax(&v);
        prop_assert!(v.iter().all(|&x| x <= v[i]));
        prop_assert!(v[..i].iter().all(|&x| x < v[i]));
        let squashed: Vec<f64> = v.iter().map(|&x| sigmoid(x)).collect();
        let shifted: Vec<f64> = v.iter().map(|&x| 3.0 * x + 7.0).collect();
        prop_assert_eq!(argmax(&shifted), i);
        // sigmoid can merge distinct values but never reorders them
        prop_assert!(squashed.iter().all(|&s| s <= squashed[i]));
    }
}

#[test]
fn argmax_ties_go_to_the_first() {
    assert_eq!(argmax(&[0.2, 0.7, 0.7]), 1);
    assert_eq!(argmax(&[0.5, 0.5]), 0);
}
