use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn pauli(which: char) -> DMatrix<C> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    match which {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => unreachable!(),
    }
}

/// `op` on `qubit`, identity elsewhere; qubit 0 is the leftmost tensor factor.
fn embed(n: usize, qubit: usize, op: &DMatrix<C>) -> DMatrix<C> {
    let mut acc = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in 0..n {
        let f = if q == qubit { op.clone() } else { pauli('I') };
        acc = acc.kronecker(&f);
    }
    acc
}

fn dense_cnot(n: usize, control: usize, target: usize) -> DMatrix<C> {
    let dim = 1 << n;
    let cm = 1 << (n - 1 - control);
    let tm = 1 << (n - 1 - target);
    DMatrix::from_fn(dim, dim, |r, col| {
        let image = if col & cm != 0 { col ^ tm } else { col };
        if r == image {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

fn dense_gate(n: usize, gate: &Gate<f64>) -> DMatrix<C> {
    match *gate {
        Gate::Cnot { control, target } => dense_cnot(n, control, target),
        Gate::Rx { qubit, angle } => {
            // exp(-i a X / 2) = cos(a/2) I - i sin(a/2) X
            let m = pauli('I') * c((angle / 2.0).cos(), 0.0) + pauli('X') * c(0.0, -(angle / 2.0).sin());
            embed(n, qubit, &m)
        }
        Gate::Rz { qubit, angle } => {
            let m = pauli('I') * c((angle / 2.0).cos(), 0.0) + pauli('Z') * c(0.0, -(angle / 2.0).sin());
            embed(n, qubit, &m)
        }
        Gate::U2 { qubit, theta, phi } => {
            let (s, co) = (theta / 2.0).sin_cos();
            let e = C::from_polar(1.0, phi);
            let m = DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), e * s, e * co]);
            embed(n, qubit, &m)
        }
    }
}

fn to_dense(rho: &DensityMatrix<f64>) -> DMatrix<C> {
    let d = rho.dim();
    DMatrix::from_fn(d, d, |r, col| rho.get(r, col))
}

fn from_dense(m: &DMatrix<C>) -> DensityMatrix<f64> {
    let d = m.nrows();
    let n = d.trailing_zeros() as usize;
    let data = (0..d * d).map(|k| m[(k / d, k % d)]).collect();
    DensityMatrix::from_row_major(n, data).unwrap()
}

pub(crate) fn random_density(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix<f64> {
    let d = 1 << n;
    let a = DMatrix::from_fn(d, d, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    from_dense(&(rho / tr))
}

fn random_gate(n: usize, rng: &mut ChaCha8Rng) -> Gate<f64> {
    let qubit = rng.random_range(0..n);
    let angle = rng.random_range(-6.0..6.0);
    match rng.random_range(0..4) {
        0 => Gate::Rx { qubit, angle },
        1 => Gate::Rz { qubit, angle },
        2 => Gate::U2 {
            qubit,
            theta: angle,
            phi: rng.random_range(0.0..6.3),
        },
        _ => {
            let mut target = rng.random_range(0..n);
            while target == qubit {
                target = rng.random_range(0..n);
            }
            Gate::Cnot { control: qubit, target }
        }
    }
}

/// Four-Kraus Pauli form `{sqrt(1-3q/4) I, sqrt(q/4) X, sqrt(q/4) Y, sqrt(q/4) Z}`.
fn kraus_depolarizing_1q(rho: &DensityMatrix<f64>, qubit: usize, q: f64) -> DensityMatrix<f64> {
    let n = rho.n_qubits();
    let r = to_dense(rho);
    let mut out = &r * c(1.0 - 0.75 * q, 0.0);
    for p in ['X', 'Y', 'Z'] {
        let k = embed(n, qubit, &pauli(p));
        out += (&k * &r * k.adjoint()) * c(q / 4.0, 0.0);
    }
    from_dense(&out)
}

/// Sixteen-Kraus two-qubit Pauli form: identity weight `1 - 15q/16`, others `q/16`.
fn kraus_depolarizing_2q(rho: &DensityMatrix<f64>, a: usize, b: usize, q: f64) -> DensityMatrix<f64> {
    let n = rho.n_qubits();
    let r = to_dense(rho);
    let mut out = DMatrix::from_element(r.nrows(), r.ncols(), c(0.0, 0.0));
    for pa in ['I', 'X', 'Y', 'Z'] {
        for pb in ['I', 'X', 'Y', 'Z'] {
            let k = embed(n, a, &pauli(pa)) * embed(n, b, &pauli(pb));
            let w = if pa == 'I' && pb == 'I' { 1.0 - 15.0 * q / 16.0 } else { q / 16.0 };
            out += (&k * &r * k.adjoint()) * c(w, 0.0);
        }
    }
    from_dense(&out)
}

fn assert_physical(rho: &DensityMatrix<f64>) {
    assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(rho.trace().im, 0.0, epsilon = 1e-12);
    assert!(rho.hermiticity_error() < 1e-12);
    assert!(rho.min_eigenvalue() >= -1e-10);
}

#[test]
fn cnot_flips_target_when_control_set() {
    // |10> has qubit 0 excited: basis index 0b10.
    let rho = DensityMatrix::<f64>::basis(2, 0b10);
    let out = apply_gate(&rho, &Gate::Cnot { control: 0, target: 1 }).unwrap();
    assert_eq!(out, DensityMatrix::basis(2, 0b11));
    // Input untouched.
    assert_eq!(rho, DensityMatrix::basis(2, 0b10));
}

#[test]
fn zero_rotation_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho = random_density(3, &mut rng);
    let out = apply_gate(&rho, &Gate::Rx { qubit: 1, angle: 0.0 }).unwrap();
    assert!(out.max_abs_diff(&rho) < 1e-15);
}

#[test]
fn rx_excitation_is_sin_squared_half_angle() {
    for &theta in &[0.3, 1.0, 2.0, std::f64::consts::PI] {
        let out = apply_gate(&DensityMatrix::ground(1), &Gate::Rx { qubit: 0, angle: theta }).unwrap();
        let excitation = out.get(1, 1).re;
        assert_abs_diff_eq!(excitation, (theta / 2.0).sin().powi(2), epsilon = 1e-14);
        let brute = dense_gate(1, &Gate::Rx { qubit: 0, angle: theta });
        let r = &brute * to_dense(&DensityMatrix::ground(1)) * brute.adjoint();
        assert_abs_diff_eq!(r[(1, 1)].re, excitation, epsilon = 1e-14);
    }
}

#[test]
fn u2_prepares_documented_state() {
    let (theta, phi): (f64, f64) = (1.1, 0.7);
    let out = apply_gate(&DensityMatrix::ground(1), &Gate::U2 { qubit: 0, theta, phi }).unwrap();
    let psi = [c((theta / 2.0).cos(), 0.0), C::from_polar((theta / 2.0).sin(), phi)];
    let expected = DensityMatrix::from_pure(&psi).unwrap();
    assert!(out.max_abs_diff(&expected) < 1e-14);
}

#[test]
fn gates_match_dense_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.random_range(2..5);
        let rho = random_density(n, &mut rng);
        let gate = random_gate(n, &mut rng);
        let u = dense_gate(n, &gate);
        let unitary_err = (&u * u.adjoint() - DMatrix::identity(u.nrows(), u.ncols())).camax();
        assert!(unitary_err < 1e-12, "{gate}: U U^dagger != I");
        let expected = from_dense(&(&u * to_dense(&rho) * u.adjoint()));
        let got = apply_gate(&rho, &gate).unwrap();
        assert!(got.max_abs_diff(&expected) < 1e-12, "{gate}");
        assert_physical(&got);
    }
}

#[test]
fn invalid_gate_indices_rejected() {
    let rho = DensityMatrix::<f64>::ground(2);
    assert!(matches!(
        apply_gate(&rho, &Gate::Rx { qubit: 2, angle: 0.1 }),
        Err(crate::Error::InvalidGate(_))
    ));
    assert!(matches!(
        apply_gate(&rho, &Gate::Cnot { control: 1, target: 1 }),
        Err(crate::Error::InvalidGate(_))
    ));
}

#[test]
fn depolarizing_1q_limits() {
    let rho = DensityMatrix::<f64>::ground(1);
    assert_eq!(apply_depolarizing_1q(&rho, 0, 0.0).unwrap(), rho);
    let full = apply_depolarizing_1q(&rho, 0, 1.0).unwrap();
    assert!(full.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);
    let half = apply_depolarizing_1q(&rho, 0, 0.5).unwrap();
    assert_abs_diff_eq!(half.get(0, 0).re, 0.75, epsilon = 1e-15);
    assert_abs_diff_eq!(half.get(1, 1).re, 0.25, epsilon = 1e-15);
    assert_abs_diff_eq!(half.get(0, 1).norm(), 0.0, epsilon = 1e-15);
}

#[test]
fn depolarizing_2q_limits() {
    let rho = DensityMatrix::<f64>::ground(2);
    assert_eq!(apply_depolarizing_2q(&rho, (0, 1), 0.0).unwrap(), rho);
    let full = apply_depolarizing_2q(&rho, (0, 1), 1.0).unwrap();
    assert!(full.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 1e-15);
    let weak = apply_depolarizing_2q(&rho, (0, 1), 0.01).unwrap();
    let diag: Vec<f64> = (0..4).map(|i| weak.get(i, i).re).collect();
    for (got, want) in diag.iter().zip([0.9925, 0.0025, 0.0025, 0.0025]) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
    }
}

#[test]
fn depolarizing_rejects_bad_parameters() {
    let rho = DensityMatrix::<f64>::ground(2);
    assert!(matches!(
        apply_depolarizing_1q(&rho, 0, 1.5),
        Err(crate::Error::InvalidParameter(_))
    ));
    assert!(matches!(
        apply_depolarizing_1q(&rho, 0, -0.1),
        Err(crate::Error::InvalidParameter(_))
    ));
    assert!(matches!(
        apply_depolarizing_2q(&rho, (0, 1), f64::NAN),
        Err(crate::Error::InvalidParameter(_))
    ));
    assert!(apply_depolarizing_2q(&rho, (1, 1), 0.1).is_err());
    assert!(NoiseModel::new(0.1, 2.0).is_err());
}

#[test]
fn definition_form_matches_kraus_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..25 {
        let n = rng.random_range(1..4);
        let rho = random_density(n, &mut rng);
        let q: f64 = rng.random();
        let qubit = rng.random_range(0..n);
        let def = apply_depolarizing_1q(&rho, qubit, q).unwrap();
        assert!(def.max_abs_diff(&kraus_depolarizing_1q(&rho, qubit, q)) < 1e-12);
        assert_physical(&def);
        if n >= 2 {
            let other = (qubit + 1) % n;
            let def2 = apply_depolarizing_2q(&rho, (qubit, other), q).unwrap();
            assert!(def2.max_abs_diff(&kraus_depolarizing_2q(&rho, qubit, other, q)) < 1e-12);
            assert_physical(&def2);
        }
    }
}

#[test]
fn empty_circuit_leaves_state_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rho = random_density(3, &mut rng);
    let out = run_circuit(&Circuit::new(3), &rho, &NoiseModel::new(0.1, 0.2).unwrap()).unwrap();
    assert_eq!(out, rho);
}

#[test]
fn noiseless_flags_skip_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rho = random_density(3, &mut rng);
    let mut circuit = Circuit::new(3);
    for _ in 0..12 {
        circuit.push(random_gate(3, &mut rng), false).unwrap();
    }
    let clean = run_circuit(&circuit, &rho, &NoiseModel::noiseless()).unwrap();
    let flagged = run_circuit(&circuit, &rho, &NoiseModel::new(1.0, 1.0).unwrap()).unwrap();
    assert_eq!(clean, flagged);
}

#[test]
fn noisy_cnot_composes_gate_then_channel() {
    let rho = DensityMatrix::<f64>::ground(2);
    let gate = Gate::Cnot { control: 0, target: 1 };
    let mut circuit = Circuit::new(2);
    circuit.push(gate, true).unwrap();
    let noise = NoiseModel::new(1e-4, 0.01).unwrap();
    let got = run_circuit(&circuit, &rho, &noise).unwrap();
    let expected = apply_depolarizing_2q(&apply_gate(&rho, &gate).unwrap(), (0, 1), 0.01).unwrap();
    assert!(got.max_abs_diff(&expected) < 1e-15);
}

#[test]
fn circuit_dimension_mismatch_rejected() {
    let circuit = Circuit::<f64>::new(3);
    assert!(run_circuit(&circuit, &DensityMatrix::ground(2), &NoiseModel::noiseless()).is_err());
}

#[test]
fn heisenberg_propagation_matches_schrodinger() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 4;
    let mut circuit = Circuit::new(n);
    for _ in 0..30 {
        let noisy = rng.random_bool(0.7);
        circuit.push(random_gate(n, &mut rng), noisy).unwrap();
    }
    let noise = NoiseModel::new(0.03, 0.05).unwrap();
    let rho = random_density(n, &mut rng);
    let evolved = run_circuit(&circuit, &rho, &noise).unwrap();
    let m = magnetizations(&evolved);
    for q in 0..n {
        let o = propagate_observable(&circuit, &Observable::magnetization(n, q), &noise).unwrap();
        assert_abs_diff_eq!(o.expectation(&rho), m[q], epsilon = 1e-12);
    }
}

#[test]
fn magnetization_examples() {
    assert_eq!(magnetizations(&DensityMatrix::<f64>::basis(6, 63)).0, vec![1.0; 6]);
    assert_eq!(magnetizations(&DensityMatrix::<f64>::ground(6)).0, vec![-1.0; 6]);
    // Qubit 0 maximally mixed, rest |0>: equal mixture of indices 0 and 0b100000.
    let mixed = DensityMatrix::basis(6, 0).mix(0.5, &DensityMatrix::basis(6, 0b100000)).unwrap();
    let m = magnetizations(&mixed);
    assert_abs_diff_eq!(m[0], 0.0, epsilon = 1e-15);
    assert!(m[1..].iter().all(|&v| v == -1.0));
}

#[test]
fn sampling_basis_state_is_exact() {
    let rho = DensityMatrix::<f64>::basis(3, 0b101);
    let m = sample_magnetizations(&rho, 17, 4).unwrap();
    assert_eq!(m.0, vec![1.0, -1.0, 1.0]);
}

#[test]
fn sampling_is_deterministic_and_unbiased() {
    let mixed = DensityMatrix::<f64>::basis(3, 0).mix(0.5, &DensityMatrix::basis(3, 0b100)).unwrap();
    let a = sample_magnetizations(&mixed, 20_000, 99).unwrap();
    let b = sample_magnetizations(&mixed, 20_000, 99).unwrap();
    assert_eq!(a, b);
    // Binomial standard error of m0 is 1/sqrt(shots) ~ 0.007.
    assert!(a[0].abs() < 5.0 / (20_000f64).sqrt());
    assert_eq!(&a[1..], &[-1.0, -1.0]);
    assert!(matches!(
        sample_magnetizations(&mixed, 0, 1),
        Err(crate::Error::InvalidParameter(_))
    ));
}

#[test]
fn f32_register_tracks_f64() {
    let gates = [
        Gate::U2 { qubit: 0, theta: 1.2, phi: 0.4 },
        Gate::Cnot { control: 0, target: 1 },
        Gate::Rx { qubit: 1, angle: 0.9 },
    ];
    let mut c64 = Circuit::<f64>::new(2);
    let mut c32 = Circuit::<f32>::new(2);
    for g in gates {
        c64.push(g, true).unwrap();
        let g32 = match g {
            Gate::U2 { qubit, theta, phi } => Gate::U2 { qubit, theta: theta as f32, phi: phi as f32 },
            Gate::Rx { qubit, angle } => Gate::Rx { qubit, angle: angle as f32 },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit, angle: angle as f32 },
            Gate::Cnot { control, target } => Gate::Cnot { control, target },
        };
        c32.push(g32, true).unwrap();
    }
    let m64 = magnetizations(&run_circuit(&c64, &DensityMatrix::ground(2), &NoiseModel::new(0.01, 0.02).unwrap()).unwrap());
    let m32 = magnetizations(&run_circuit(&c32, &DensityMatrix::ground(2), &NoiseModel::new(0.01, 0.02).unwrap()).unwrap());
    for (a, b) in m64.iter().zip(m32.iter()) {
        assert!((a - *b as f64).abs() < 1e-5);
    }
}

fn arb_density() -> impl Strategy<Value = DensityMatrix<f64>> {
    (1usize..4, any::<u64>()).prop_map(|(n, seed)| random_density(n, &mut ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn channels_are_linear(seed in any::<u64>(), alpha in 0.0f64..1.0, q in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density(3, &mut rng);
        let b = random_density(3, &mut rng);
        let mixed = a.mix(alpha, &b).unwrap();
        let lhs = apply_depolarizing_2q(&mixed, (0, 2), q).unwrap();
        let rhs = apply_depolarizing_2q(&a, (0, 2), q).unwrap()
            .mix(alpha, &apply_depolarizing_2q(&b, (0, 2), q).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        let lhs1 = apply_depolarizing_1q(&mixed, 1, q).unwrap();
        let rhs1 = apply_depolarizing_1q(&a, 1, q).unwrap()
            .mix(alpha, &apply_depolarizing_1q(&b, 1, q).unwrap()).unwrap();
        prop_assert!(lhs1.max_abs_diff(&rhs1) < 1e-10);
    }

    #[test]
    fn depolarizing_shrinks_magnetization(rho in arb_density(), q in 0.0f64..1.0, pick in 0usize..3) {
        let n = rho.n_qubits();
        let qubit = pick % n;
        let before = magnetizations(&rho);
        let after = magnetizations(&apply_depolarizing_1q(&rho, qubit, q).unwrap());
        for i in 0..n {
            prop_assert!(after[i].abs() <= before[i].abs() + 1e-12);
        }
        prop_assert!((after[qubit] - (1.0 - q) * before[qubit]).abs() < 1e-12);
    }

    #[test]
    fn operations_preserve_physicality(rho in arb_density(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rho.n_qubits();
        let mut circuit = Circuit::new(n);
        for _ in 0..6 {
            let g = if n == 1 {
                Gate::Rx { qubit: 0, angle: rng.random_range(-3.0..3.0) }
            } else {
                random_gate(n, &mut rng)
            };
            circuit.push(g, true).unwrap();
        }
        let noise = NoiseModel::new(rng.random(), rng.random()).unwrap();
        let mut state = rho.clone();
        run_circuit_with(&circuit, &mut state, &noise, |_, s| {
            assert!((s.trace().re - 1.0).abs() < 1e-12);
            assert!(s.hermiticity_error() < 1e-12);
            assert!(s.min_eigenvalue() >= -1e-10);
        }).unwrap();
    }
}
