#![allow(dead_code)]

use std::f64::consts::TAU;

use lme_core::chart::{random_su2_angles, su2};
use lme_core::qcore::{adjacency_from_edges, make_family, Family};
use lme_core::{Locals, State, Table};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_table(n: usize, seed: u64) -> Table {
    let mut r = rng(seed);
    Table::from_phases(n, (0..1 << n).map(|_| r.random::<f64>() * TAU).collect()).unwrap()
}

pub fn random_locals(n: usize, seed: u64) -> Locals {
    let mut r = rng(seed);
    Locals::new(
        (0..n)
            .map(|_| {
                let (t, p, l) = random_su2_angles::<f64, _>(&mut r);
                su2(t, p, l)
            })
            .collect(),
    )
    .unwrap()
}

pub fn random_gamma(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = r.random::<f64>();
            g[i][j] = w;
            g[j][i] = w;
        }
    }
    g
}

pub fn schmidt(a: f64) -> State {
    let b = (1.0 - a * a).sqrt();
    let z = Complex::new(0.0, 0.0);
    State::new(2, vec![Complex::new(a, 0.0), z, z, Complex::new(b, 0.0)]).unwrap()
}

/// Named states with their expected LME status where known.
pub fn named_library() -> Vec<(String, State)> {
    let mut lib = Vec::new();
    for n in 2..=5 {
        lib.push((format!("ghz{n}"), make_family::<f64>(&Family::Ghz, n).unwrap()));
        lib.push((format!("plus{n}"), make_family::<f64>(&Family::Plus, n).unwrap()));
        lib.push((format!("zero{n}"), State::zero(n).unwrap()));
    }
    for n in 3..=5 {
        lib.push((format!("w{n}"), make_family::<f64>(&Family::W, n).unwrap()));
        let ring: Vec<(usize, usize)> = (0..n).map(|k| (k, (k + 1) % n)).collect();
        let adj = adjacency_from_edges(n, &ring).unwrap();
        lib.push((format!("ring{n}"), make_family::<f64>(&Family::Graph(adj), n).unwrap()));
        lib.push((
            format!("weighted{n}"),
            make_family::<f64>(&Family::WeightedGraph(random_gamma(n, n as u64)), n).unwrap(),
        ));
    }
    lib.push(("w2".into(), make_family::<f64>(&Family::W, 2).unwrap()));
    lib.push(("schmidt".into(), schmidt(0.6)));
    lib
}
