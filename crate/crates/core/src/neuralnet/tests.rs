use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::seed::rng_from_seed;

fn random_batch(n: usize, seed: u64) -> Vec<Example<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..N_SPINS).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..N_SPINS).map(|_| rng.random_range(-1.0..1.0)).collect();
            (x, y)
        })
        .collect()
}

/// Same network written with dense nalgebra matrices.
fn oracle_forward(model: &MlpModel<f64>, x: &[f64]) -> Vec<f64> {
    let p = &model.params;
    let w1 = DMatrix::from_row_slice(model.n_hidden, model.n_in, &p.w1);
    let w2 = DMatrix::from_row_slice(model.n_out, model.n_hidden, &p.w2);
    let z1 = w1 * DVector::from_column_slice(x) + DVector::from_column_slice(&p.b1);
    let h = z1.map(|v| if v > 0.0 { v } else { 0.0 });
    let z2 = w2 * h + DVector::from_column_slice(&p.b2);
    z2.iter().map(|v| v.tanh()).collect()
}

fn perturbed(model: &MlpModel<f64>, idx: usize, delta: f64) -> MlpModel<f64> {
    let mut m = model.clone();
    *m.params.iter_mut().nth(idx).unwrap() += delta;
    m
}

#[test]
fn init_is_seeded_with_zero_biases() {
    let a = init_model::<f64>(200, 11).unwrap();
    assert_eq!(a, init_model(200, 11).unwrap());
    assert_ne!(a, init_model(200, 12).unwrap());
    assert_eq!(a.n_params(), 2606);
    assert!(a.params.b1.iter().chain(&a.params.b2).all(|&b| b == 0.0));
    let bound1 = 1.0 / 6f64.sqrt();
    let bound2 = 1.0 / 200f64.sqrt();
    assert!(a.params.w1.iter().all(|w| w.abs() <= bound1));
    assert!(a.params.w2.iter().all(|w| w.abs() <= bound2));
    assert!(init_model::<f64>(0, 1).is_err());
}

#[test]
fn zero_model_outputs_zero() {
    let mut m = init_model::<f64>(5, 0).unwrap();
    m.params.iter_mut().for_each(|p| *p = 0.0);
    assert_eq!(m.forward(&[0.3, -0.2, 1.0, 0.0, 0.5, -1.0]).unwrap(), vec![0.0; 6]);
}

#[test]
fn dead_hidden_layer_gives_tanh_of_output_bias() {
    let mut m = init_model::<f64>(4, 3).unwrap();
    m.params.w1.iter_mut().for_each(|w| *w = 0.0);
    m.params.b1.iter_mut().for_each(|b| *b = -0.5);
    m.params.b2 = vec![0.1, -0.2, 0.3, -0.4, 0.5, 2.0];
    let expected: Vec<f64> = m.params.b2.iter().map(|b| b.tanh()).collect();
    for x in [[1.0; 6], [-1.0, 0.5, 0.0, 0.2, -0.3, 0.9]] {
        assert_eq!(m.forward(&x).unwrap(), expected);
    }
}

#[test]
fn forward_matches_dense_oracle() {
    for (width, seed) in [(1, 1), (8, 2), (37, 3), (200, 4)] {
        let mut m = init_model::<f64>(width, seed).unwrap();
        let mut rng = rng_from_seed(seed + 100);
        m.params.iter_mut().for_each(|p| *p += rng.random_range(-0.3..0.3));
        for (x, _) in random_batch(5, seed) {
            let got = m.forward(&x).unwrap();
            let want = oracle_forward(&m, &x);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn forward_rejects_wrong_length() {
    let m = init_model::<f64>(3, 0).unwrap();
    assert!(matches!(m.forward(&[0.0; 5]), Err(Error::ShapeMismatch(_))));
}

#[test]
fn loss_definition() {
    let m = init_model::<f64>(8, 5).unwrap();
    let x = vec![0.2, -0.1, 0.4, 0.9, -0.7, 0.0];
    let out = m.forward(&x).unwrap();
    assert_eq!(mse_loss(&m, &[(x.clone(), out.clone())]).unwrap(), 0.0);

    let y = vec![0.5; 6];
    let by_hand: f64 = out.iter().zip(&y).map(|(o, t)| (o - t) * (o - t)).sum();
    let single = mse_loss(&m, &[(x.clone(), y.clone())]).unwrap();
    assert!((single - by_hand).abs() < 1e-15);

    let batch = random_batch(7, 9);
    let doubled: Vec<_> = batch.iter().chain(&batch).cloned().collect();
    let a = mse_loss(&m, &batch).unwrap();
    let b = mse_loss(&m, &doubled).unwrap();
    assert!((a - b).abs() < 1e-14);

    assert!(matches!(mse_loss(&m, &[]), Err(Error::InvalidInput(_))));
    assert!(mse_loss(&m, &[(vec![0.0; 6], vec![0.0; 5])]).is_err());
}

#[test]
fn zero_error_gives_zero_gradient() {
    let m = init_model::<f64>(16, 2).unwrap();
    let batch: Vec<_> = random_batch(6, 3)
        .into_iter()
        .map(|(x, _)| {
            let y = m.forward(&x).unwrap();
            (x, y)
        })
        .collect();
    let g = backward(&m, &batch).unwrap();
    assert!(g.iter().all(|&v| v == 0.0));
}

/// Largest per-parameter relative error between analytic and central
/// finite-difference gradients. Parameters whose gradients are both below
/// `floor` in magnitude are compared on an absolute scale of `floor`.
fn gradient_check(model: &MlpModel<f64>, batch: &[Example<f64>], step: f64, floor: f64) -> f64 {
    let g = backward(model, batch).unwrap();
    g.iter()
        .enumerate()
        .map(|(idx, &a)| {
            let up = mse_loss(&perturbed(model, idx, step), batch).unwrap();
            let down = mse_loss(&perturbed(model, idx, -step), batch).unwrap();
            let n = (up - down) / (2.0 * step);
            (a - n).abs() / a.abs().max(n.abs()).max(floor)
        })
        .fold(0.0, f64::max)
}

#[test]
fn gradients_match_finite_differences() {
    for width in [1, 8, 200] {
        for draw in 0..10u64 {
            let seed = 1000 * width as u64 + draw;
            let mut m = init_model::<f64>(width, seed).unwrap();
            let mut rng = rng_from_seed(seed ^ 0xabc);
            // Nonzero biases so every parameter group is exercised.
            m.params.iter_mut().for_each(|p| *p += rng.random_range(-0.2..0.2));
            let batch = random_batch(8, seed);
            let err = gradient_check(&m, &batch, 1e-6, 1e-4);
            assert!(err < 1e-5, "width {width} draw {draw}: relative error {err}");
        }
    }
}

#[test]
fn output_bias_gradient_by_hand() {
    let m = init_model::<f64>(8, 21).unwrap();
    let batch = random_batch(5, 22);
    let g = backward(&m, &batch).unwrap();
    for k in 0..N_SPINS {
        let by_hand: f64 = batch
            .iter()
            .map(|(x, y)| {
                let o = m.forward(x).unwrap()[k];
                2.0 * (o - y[k]) * (1.0 - o * o)
            })
            .sum::<f64>()
            / batch.len() as f64;
        assert!((g.b2[k] - by_hand).abs() < 1e-14);
    }
}

#[test]
fn relu_subgradient_at_zero_is_zero() {
    let mut m = init_model::<f64>(1, 0).unwrap();
    m.params.w1.iter_mut().for_each(|w| *w = 0.0);
    m.params.b1[0] = 0.0;
    let g = backward(&m, &random_batch(4, 1)).unwrap();
    assert_eq!(g.b1[0], 0.0);
    assert!(g.w1.iter().all(|&v| v == 0.0));
}

#[test]
fn adam_zero_gradient_keeps_parameters_and_decays_moments() {
    let mut m = init_model::<f64>(4, 1).unwrap();
    let before = m.clone();
    let cfg = TrainConfig::<f64>::default();
    let mut state = AdamState::new(&m);
    state.m.iter_mut().for_each(|v| *v = 0.0);
    state.v.iter_mut().for_each(|v| *v = 0.5);
    let zeros = Params::zeros(6, 4, 6);
    adam_step(&mut m, &zeros, &mut state, &cfg).unwrap();
    assert_eq!(m, before);
    assert_eq!(state.t, 1);
    assert!(state.v.iter().all(|&v| (v - 0.5 * 0.999).abs() < 1e-15));
}

#[test]
fn adam_first_step_is_normalized() {
    let mut m = init_model::<f64>(3, 2).unwrap();
    let before = m.clone();
    let cfg = TrainConfig::<f64>::default();
    let mut state = AdamState::new(&m);
    let mut g = Params::zeros(6, 3, 6);
    let mut rng = rng_from_seed(4);
    g.iter_mut().for_each(|v| *v = rng.random_range(-2.0..2.0));
    adam_step(&mut m, &g, &mut state, &cfg).unwrap();
    for ((after, was), gi) in m.params.iter().zip(before.params.iter()).zip(g.iter()) {
        let expected = -cfg.lr * gi / (gi.abs() + cfg.epsilon);
        assert!((after - was - expected).abs() < 1e-15);
    }
}

#[test]
fn adam_rejects_shape_mismatch() {
    let mut m = init_model::<f64>(3, 2).unwrap();
    let mut state = AdamState::new(&m);
    let g = Params::zeros(6, 4, 6);
    assert!(adam_step(&mut m, &g, &mut state, &TrainConfig::default()).is_err());
}

fn shrinkage_task(n: usize, seed: u64) -> Vec<Example<f64>> {
    random_batch(n, seed)
        .into_iter()
        .map(|(x, _)| {
            let y = x.iter().map(|v| 0.8 * v).collect();
            (x, y)
        })
        .collect()
}

#[test]
fn learns_linear_shrinkage() {
    let train_set = shrinkage_task(8000, 1);
    let val_set = shrinkage_task(2000, 2);
    let cfg = TrainConfig::<f64> {
        init_seed: 3,
        shuffle_seed: 4,
        ..TrainConfig::default()
    };
    let (model, history) = train(init_model(200, cfg.init_seed).unwrap(), &train_set, &val_set, &cfg).unwrap();
    assert_eq!(history.epochs.len(), 100);
    let min = history.epochs.iter().map(|e| e.val_loss).fold(f64::INFINITY, f64::min);
    assert_eq!(history.best_val_loss, min);
    assert_eq!(mse_loss(&model, &val_set).unwrap(), min);
    assert!(min <= history.epochs.last().unwrap().val_loss);
    assert!(min < 1e-3, "validation loss {min}");
}

#[test]
fn learns_identity_on_clean_data() {
    let clean = |n, seed| -> Vec<Example<f64>> {
        random_batch(n, seed)
            .into_iter()
            .map(|(x, _)| {
                let x: Vec<f64> = x.iter().map(|v| 0.9 * v).collect();
                (x.clone(), x)
            })
            .collect()
    };
    let cfg = TrainConfig::<f64>::default();
    let (model, history) = train(init_model(200, 0).unwrap(), &clean(8000, 5), &clean(2000, 6), &cfg).unwrap();
    assert!(history.epochs[0].val_loss > history.best_val_loss);
    let test = clean(500, 7);
    let mut total = 0.0;
    for (x, _) in &test {
        let out = model.forward(x).unwrap();
        total += out.iter().zip(x).map(|(a, b)| (a - b).abs()).sum::<f64>();
    }
    let mean_dev = total / (6 * test.len()) as f64;
    assert!(mean_dev < 0.02, "mean deviation {mean_dev}");
}

#[test]
fn training_is_deterministic() {
    let train_set = shrinkage_task(300, 8);
    let val_set = shrinkage_task(50, 9);
    let cfg = TrainConfig::<f64> {
        epochs: 5,
        batch_size: 7,
        init_seed: 1,
        shuffle_seed: 2,
        ..TrainConfig::default()
    };
    let run = |cfg: &TrainConfig<f64>| train(init_model(10, cfg.init_seed).unwrap(), &train_set, &val_set, cfg).unwrap();
    let a = run(&cfg);
    let b = run(&cfg);
    assert_eq!(a, b);
    let c = run(&TrainConfig { shuffle_seed: 3, ..cfg.clone() });
    assert_ne!(a.0, c.0);
}

#[test]
fn training_input_validation() {
    let set = shrinkage_task(10, 1);
    let m = init_model::<f64>(2, 0).unwrap();
    let cfg = TrainConfig::<f64>::default();
    assert!(train(m.clone(), &[], &set, &cfg).is_err());
    assert!(train(m.clone(), &set, &[], &cfg).is_err());
    for bad in [
        TrainConfig { lr: 0.0, ..cfg.clone() },
        TrainConfig { beta1: 1.0, ..cfg.clone() },
        TrainConfig { beta2: -0.1, ..cfg.clone() },
        TrainConfig { batch_size: 0, ..cfg.clone() },
        TrainConfig { epochs: 0, ..cfg.clone() },
    ] {
        assert!(matches!(train(m.clone(), &set, &set, &bad), Err(Error::InvalidParameter(_))));
    }
}

#[test]
fn partial_last_batch_is_used() {
    // 10 samples, batch 4: three Adam steps per epoch.
    let set = shrinkage_task(10, 1);
    let m = init_model::<f64>(2, 0).unwrap();
    let cfg = TrainConfig::<f64> {
        epochs: 1,
        batch_size: 4,
        ..TrainConfig::default()
    };
    let (trained, _) = train(m.clone(), &set, &set, &cfg).unwrap();
    let mut manual = m;
    let mut state = AdamState::new(&manual);
    let mut order: Vec<usize> = (0..10).collect();
    use rand::seq::SliceRandom;
    order.shuffle(&mut rng_from_seed(derive_seed(0, SeedStream::Shuffle, 1)));
    for chunk in order.chunks(4) {
        let batch: Vec<_> = chunk.iter().map(|&i| set[i].clone()).collect();
        let g = backward(&manual, &batch).unwrap();
        adam_step(&mut manual, &g, &mut state, &cfg).unwrap();
    }
    assert_eq!(state.t, 3);
    assert_eq!(trained, manual);
}

#[test]
fn model_file_round_trip_is_bit_exact() {
    let set = shrinkage_task(40, 1);
    let cfg = TrainConfig::<f64> {
        epochs: 2,
        ..TrainConfig::default()
    };
    let (model, history) = train(init_model(200, 0).unwrap(), &set, &set, &cfg).unwrap();
    let file = ModelFile::new(model, cfg, history);
    let mut buf = Vec::new();
    write_model(&file, &mut buf).unwrap();
    let back: ModelFile<f64> = read_model(buf.as_slice()).unwrap();
    assert_eq!(back, file);
    for (a, b) in back.model.params.iter().zip(file.model.params.iter()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    let text = String::from_utf8(buf).unwrap();
    assert!(text.contains("\"hidden_activation\": \"relu\""));
    assert!(text.contains("\"output_activation\": \"tanh\""));
}

#[test]
fn model_file_rejects_bad_shapes() {
    let mut file = ModelFile::new(
        init_model::<f64>(3, 0).unwrap(),
        TrainConfig::default(),
        TrainHistory {
            epochs: vec![],
            best_epoch: 0,
            best_val_loss: 0.0,
        },
    );
    file.model.params.w2.pop();
    let mut buf = Vec::new();
    write_model(&file, &mut buf).unwrap();
    assert!(matches!(read_model::<f64, _>(buf.as_slice()), Err(Error::ShapeMismatch(_))));
}

#[test]
fn single_precision_network() {
    let m64 = init_model::<f64>(8, 3).unwrap();
    let m32 = init_model::<f32>(8, 3).unwrap();
    let x = [0.1, -0.4, 0.3, 0.8, -0.9, 0.0];
    let x32: Vec<f32> = x.iter().map(|&v| v as f32).collect();
    let a = m64.forward(&x).unwrap();
    let b = m32.forward(&x32).unwrap();
    for (u, v) in a.iter().zip(&b) {
        assert!((u - *v as f64).abs() < 1e-5);
    }
}

proptest! {
    #[test]
    fn outputs_stay_in_open_interval(
        seed in 0u64..1000,
        x in proptest::collection::vec(-1.0f64..1.0, 6),
        scale in 0.1f64..3.0,
    ) {
        let mut m = init_model::<f64>(12, seed).unwrap();
        m.params.iter_mut().for_each(|p| *p *= scale);
        for v in m.forward(&x).unwrap() {
            prop_assert!(v > -1.0 && v < 1.0);
        }
    }

    #[test]
    fn batch_prediction_matches_single(seed in 0u64..1000) {
        use crate::datagen::{DataRecord, Mode};
        let m = init_model::<f64>(5, seed).unwrap();
        let records: Vec<DataRecord<f64>> = random_batch(4, seed)
            .into_iter()
            .enumerate()
            .map(|(i, (x, y))| DataRecord {
                mode: Mode::Echo,
                state_id: i as u64,
                prep_seed: 0,
                time_index: 0,
                t: 0.0,
                m_ideal: y.into(),
                m_noisy: x.into(),
                m_exact: None,
            })
            .collect();
        let all = predict_dataset(&m, &records).unwrap();
        for (r, p) in records.iter().zip(&all) {
            prop_assert_eq!(&predict(&m, &r.m_noisy).unwrap(), p);
        }
    }
}
