//! Fractional flow networks for rounding tests.

#![allow(dead_code)]

use dynclus_core::flow::{LayeredFlowNetwork, NodeTag};
use rand::Rng;

fn window(f: f64) -> (i64, i64) {
    let r = f.round();
    if (f - r).abs() < 1e-12 {
        (r as i64, r as i64)
    } else {
        (f.floor() as i64, f.ceil() as i64)
    }
}

fn add(net: &mut LayeredFlowNetwork, a: usize, b: usize, f: f64) -> usize {
    let (lo, hi) = window(f);
    net.add_arc(a, b, lo, hi, f).unwrap()
}

/// Value-2 network with three inner layers and mixed fractions on most arcs.
pub fn mixed_network() -> LayeredFlowNetwork {
    let mut net = LayeredFlowNetwork::new(3);
    let a: Vec<usize> = (0..3).map(|i| net.add_node(1, NodeTag::Dummy { step: 0, index: i })).collect();
    let b: Vec<usize> = (0..3).map(|i| net.add_node(2, NodeTag::Dummy { step: 1, index: i })).collect();
    let c: Vec<usize> = (0..2).map(|i| net.add_node(3, NodeTag::Dummy { step: 2, index: i })).collect();
    let (s, t) = (net.source(), net.sink());
    for (i, f) in [0.5, 0.7, 0.8].into_iter().enumerate() {
        add(&mut net, s, a[i], f);
    }
    // a -> b, rows sum to the inflow of a[i]
    let ab = [[0.5, 0.0, 0.0], [0.2, 0.25, 0.25], [0.0, 0.35, 0.45]];
    for i in 0..3 {
        for j in 0..3 {
            if ab[i][j] > 0.0 {
                add(&mut net, a[i], b[j], ab[i][j]);
            }
        }
    }
    // b inflows 0.7, 0.6, 0.7
    let bc = [[0.4, 0.3], [0.6, 0.0], [0.0, 0.7]];
    for j in 0..3 {
        for l in 0..2 {
            if bc[j][l] > 0.0 {
                add(&mut net, b[j], c[l], bc[j][l]);
            }
        }
    }
    add(&mut net, c[0], t, 1.0);
    add(&mut net, c[1], t, 1.0);
    net.check(&net.flow.clone(), 1e-12).unwrap();
    net
}

/// Random layered network whose annotation is a convex combination of a few
/// integral flows of value `k`, so it is feasible for its own
/// floor/ceil windows.
pub fn random_convex_network<R: Rng>(rng: &mut R) -> (LayeredFlowNetwork, i64) {
    let layers = rng.gen_range(2..=4);
    let width = rng.gen_range(2..=3);
    let k = rng.gen_range(1..=3);
    let pieces = rng.gen_range(2..=3);
    let mut weights: Vec<f64> = (0..pieces).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);

    let mut net = LayeredFlowNetwork::new(layers);
    let mut ids = vec![vec![]; layers];
    for (l, row) in ids.iter_mut().enumerate() {
        for i in 0..width {
            row.push(net.add_node(l + 1, NodeTag::Dummy { step: l, index: i }));
        }
    }
    // arc flows keyed by (from, to)
    let mut flows: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
    for &w in &weights {
        for _ in 0..k {
            let mut prev = net.source();
            for row in &ids {
                let v = row[rng.gen_range(0..width)];
                *flows.entry((prev, v)).or_default() += w;
                prev = v;
            }
            *flows.entry((prev, net.sink())).or_default() += w;
        }
    }
    for ((a, b), f) in flows {
        add(&mut net, a, b, f);
    }
    (net, k)
}
