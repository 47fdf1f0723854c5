use std::time::Instant;

use moodcast::sofnn::{train, Neuron, SofnnModel, SofnnParams, TrainOptions};

struct Lcg(u64);

impl Lcg {
    fn unit(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn sin_grid() -> Vec<(Vec<f64>, f64)> {
    let pi = std::f64::consts::PI;
    let mut out = Vec::new();
    for i in 0..21 {
        for j in 0..21 {
            let (a, b) = (i as f64 / 20.0, j as f64 / 20.0);
            out.push((vec![a, b], (pi * a).sin() * (pi * b).sin()));
        }
    }
    out
}

fn grid_model() -> SofnnModel {
    train(
        &sin_grid(),
        &SofnnParams::standard(2),
        TrainOptions::default(),
    )
    .unwrap()
    .0
}

#[test]
fn sin_grid_reaches_target() {
    let start = Instant::now();
    let grid = sin_grid();
    let (model, log) = train(&grid, &SofnnParams::standard(2), TrainOptions::default()).unwrap();
    assert!(start.elapsed().as_secs_f64() < 30.0);
    assert!(log.final_rmse <= 0.05, "rmse {}", log.final_rmse);
    assert!(
        model.neuron_count() <= 60,
        "{} neurons",
        model.neuron_count()
    );
    assert!(log.reached_target);
    assert_eq!(log.rmse_so_far.len(), grid.len() * log.epoch_rmse.len());
    assert_eq!(
        *log.neuron_counts.last().unwrap(),
        model.neuron_count() + log.pruned
    );
}

#[test]
fn training_is_bit_deterministic() {
    let a = grid_model();
    let b = grid_model();
    assert_eq!(a.to_file(), b.to_file());
    for (x, _) in sin_grid() {
        assert_eq!(
            a.predict(&x).unwrap().to_bits(),
            b.predict(&x).unwrap().to_bits()
        );
    }
}

#[test]
fn hand_built_two_neuron_forward_pass() {
    let params = SofnnParams::standard(2);
    let neurons = vec![
        Neuron {
            centers: vec![0.2, 0.3],
            widths: vec![0.1, 0.2],
        },
        Neuron {
            centers: vec![0.7, 0.6],
            widths: vec![0.3, 0.1],
        },
    ];
    let m = SofnnModel::from_parts(
        params,
        neurons,
        vec![vec![1.0, 2.0, -1.0], vec![0.5, 0.0, 3.0]],
    )
    .unwrap();
    let x = [0.4, 0.5];
    // phi1 = exp(-(0.2^2/(2*0.01) + 0.2^2/(2*0.04))) = exp(-2.5)
    // phi2 = exp(-(0.3^2/(2*0.09) + 0.1^2/(2*0.01))) = exp(-1.0)
    let (p1, p2) = ((-2.5f64).exp(), (-1.0f64).exp());
    let (psi1, psi2) = (p1 / (p1 + p2), p2 / (p1 + p2));
    let f1 = 1.0 + 2.0 * 0.4 - 0.5;
    let f2 = 0.5 + 3.0 * 0.5;
    let psi = m.normalized_firing(&x).unwrap();
    assert!((psi[0] - psi1).abs() < 1e-12 && (psi[1] - psi2).abs() < 1e-12);
    assert!((m.predict(&x).unwrap() - (psi1 * f1 + psi2 * f2)).abs() < 1e-12);
    assert_eq!(
        m.consequent_matrix(),
        vec![vec![1.0, 0.5], vec![2.0, 0.0], vec![-1.0, 3.0]]
    );
}

#[test]
fn normalization_sums_to_one_on_random_probes() {
    let m = grid_model();
    let mut rng = Lcg(9);
    for _ in 0..1000 {
        let x = [rng.unit(), rng.unit()];
        let s: f64 = m.normalized_firing(&x).unwrap().iter().sum();
        assert!((s - 1.0).abs() <= 1e-12);
    }
    // far from every center the shift in log space keeps it defined
    let s: f64 = m.normalized_firing(&[40.0, -30.0]).unwrap().iter().sum();
    assert!((s - 1.0).abs() <= 1e-12);
}

#[test]
fn save_load_round_trip() {
    let m = grid_model();
    let mut buf = Vec::new();
    m.save(&mut buf).unwrap();
    let back = SofnnModel::load(buf.as_slice()).unwrap();
    assert_eq!(back.neuron_count(), m.neuron_count());
    let mut rng = Lcg(4);
    for _ in 0..200 {
        let x = [rng.unit(), rng.unit()];
        assert_eq!(
            back.predict(&x).unwrap().to_bits(),
            m.predict(&x).unwrap().to_bits()
        );
    }
    assert!(SofnnModel::load(&b"{\"version\": 99}"[..]).is_err());
}

#[test]
fn output_is_continuous() {
    let m = grid_model();
    let mut rng = Lcg(21);
    for _ in 0..200 {
        let x = [rng.unit(), rng.unit()];
        let nudged = [x[0] + 1e-9, x[1] - 1e-9];
        assert!((m.predict(&x).unwrap() - m.predict(&nudged).unwrap()).abs() < 1e-5);
    }
}

/// With coverage so wide that one neuron is ever created, the network is a
/// single linear model and RLS should agree with batch least squares.
#[test]
fn single_rule_rls_matches_batch_least_squares() {
    let mut rng = Lcg(123);
    let n = 5000;
    let samples: Vec<(Vec<f64>, f64)> = (0..n)
        .map(|_| {
            let x = vec![rng.unit(), rng.unit(), rng.unit()];
            let y = 0.2 + 0.5 * x[0] - 0.3 * x[1] + 0.8 * x[2] + 0.05 * (rng.unit() - 0.5);
            (x, y)
        })
        .collect();
    let params = SofnnParams {
        k_d: vec![10.0; 3],
        ..SofnnParams::standard(3)
    };
    let (model, _) = train(&samples, &params, TrainOptions::default()).unwrap();
    assert_eq!(model.neuron_count(), 1);

    // normal equations on [1, x]
    let mut ata = [[0.0f64; 4]; 4];
    let mut aty = [0.0f64; 4];
    for (x, y) in &samples {
        let row = [1.0, x[0], x[1], x[2]];
        for i in 0..4 {
            aty[i] += row[i] * y;
            for j in 0..4 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    for c in 0..4 {
        let piv = ata[c][c];
        for v in ata[c].iter_mut() {
            *v /= piv;
        }
        aty[c] /= piv;
        for r in 0..4 {
            if r != c {
                let f = ata[r][c];
                let pivot_row = ata[c];
                for (v, p) in ata[r].iter_mut().zip(pivot_row) {
                    *v -= f * p;
                }
                aty[r] -= f * aty[c];
            }
        }
    }
    for (got, want) in model.consequent(0).iter().zip(aty) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
}

#[test]
fn rejects_inputs_outside_unit_box() {
    let samples = vec![(vec![0.5, 1.5], 0.0)];
    assert!(train(&samples, &SofnnParams::standard(2), TrainOptions::default()).is_err());
    assert!(train(&[], &SofnnParams::standard(2), TrainOptions::default()).is_err());
}
