mod common;

use common::*;
use hjc::hamiltonian::{block_norm, build_hjc_on, Detunings, Manifold, Projector};
use hjc::model::{Basis, BasisIndex, CavityGauge, Electronic, ModelParams, Truncation};
use hjc::{build_hjc, SparseHermitian};
use num_complex::Complex64;

fn excited_block(h: &SparseHermitian, start: usize) -> (usize, Vec<Complex64>) {
    let full = h.to_dense();
    let n = h.dim();
    let d = n - start;
    let mut out = Vec::with_capacity(d * d);
    for r in start..n {
        out.extend_from_slice(&full[r * n + start..r * n + n]);
    }
    (d, out)
}

#[test]
fn holstein_limit_matches_site_basis() {
    for (lambda, total) in [(1.0, 4), (1.0, 6), (0.6, 5)] {
        let p = ModelParams::new(2, lambda, 0.0).with_trunc(Truncation::total_only(total));
        let basis = Basis::new(&p).unwrap();
        let h = build_hjc_on(&basis, &p, None).unwrap();
        let (d, block) = excited_block(&h, basis.phonon_count());
        let ours = dense_eigenvalues(d, &block);
        let (sd, site) = site_holstein(&[0.0, 0.0], lambda, 1.0, total);
        let oracle = dense_eigenvalues(sd, &site);
        assert_eq!(ours.len(), oracle.len());
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10, "λ={lambda} M={total}: {a} vs {b}");
        }
    }
}

#[test]
fn disordered_holstein_limit_matches_site_basis() {
    let energies = [0.37, -0.81, 0.12];
    let p = ModelParams::new(3, 0.8, 0.0).with_trunc(Truncation::total_only(3));
    let basis = Basis::new(&p).unwrap();
    let h = build_hjc_on(&basis, &p, Some(&Detunings(energies.to_vec()))).unwrap();
    let (d, block) = excited_block(&h, basis.phonon_count());
    let ours = dense_eigenvalues(d, &block);
    let (sd, site) = site_holstein(&energies, 0.8, 1.0, 3);
    let oracle = dense_eigenvalues(sd, &site);
    for (a, b) in ours.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn single_molecule_matches_hand_built_matrix() {
    // N = 1: |G,1,m⟩ and |e,0,m⟩ for m ≤ 4.
    let (lambda, omega_rabi, delta) = (0.9, 1.3, 0.25);
    let p = ModelParams::new(1, lambda, omega_rabi)
        .with_delta_e(delta)
        .with_trunc(Truncation::new(4, 0));
    let h = build_hjc(&p, None).unwrap();
    let levels = 5;
    let mut m = vec![c(0.0, 0.0); 4 * levels * levels];
    let dim = 2 * levels;
    for k in 0..levels {
        let (g, e) = (k, levels + k);
        m[g * dim + g] = c(k as f64, 0.0);
        m[e * dim + e] = c(delta + lambda * lambda + k as f64, 0.0);
        m[g * dim + e] = c(0.0, omega_rabi / 2.0);
        m[e * dim + g] = c(0.0, -omega_rabi / 2.0);
        if k + 1 < levels {
            let amp = lambda * ((k + 1) as f64).sqrt();
            m[e * dim + e + 1] = c(amp, 0.0);
            m[(e + 1) * dim + e] = c(amp, 0.0);
        }
    }
    let dense = h.to_dense();
    for (a, b) in dense.iter().zip(&m) {
        assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn spectrum_is_gauge_invariant() {
    let base = ModelParams::new(3, 1.0, 1.7)
        .with_delta_e(0.3)
        .with_trunc(Truncation::new(3, 1));
    let d = Detunings(vec![0.2, -0.4, 0.1]);
    let a = build_hjc(&base.clone().with_gauge(CavityGauge::Paper), Some(&d)).unwrap();
    let b = build_hjc(&base.with_gauge(CavityGauge::Real), Some(&d)).unwrap();
    let ea = dense_eigenvalues(a.dim(), &a.to_dense());
    let eb = dense_eigenvalues(b.dim(), &b.to_dense());
    for (x, y) in ea.iter().zip(&eb) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn hermitian_expectations_are_real() {
    let p = ModelParams::new(4, 1.0, 2.0).with_trunc(Truncation::new(3, 1));
    let h = build_hjc(&p, Some(&Detunings(vec![0.5, -0.3, 0.8, 0.0]))).unwrap();
    for seed in 0..20 {
        let v = random_vector(h.dim(), seed);
        assert!(h.expectation(&v).unwrap().im.abs() < 1e-12);
    }
    for (r, col, v) in h.upper_entries() {
        assert_eq!(h.get(col, r), v.conj());
    }
}

#[test]
fn only_one_excitation_states_are_coupled() {
    let p = ModelParams::new(3, 1.0, 2.0).with_trunc(Truncation::new(2, 1));
    let basis = Basis::new(&p).unwrap();
    let h = build_hjc_on(&basis, &p, None).unwrap();
    for (r, col, _) in h.upper_entries() {
        let a = basis.state_of(BasisIndex(r)).unwrap();
        let b = basis.state_of(BasisIndex(col)).unwrap();
        for s in [&a, &b] {
            let exc = matches!(s.electronic, Electronic::Excited(_)) as u8;
            assert_eq!(s.cavity_occ + exc, 1);
        }
        // Photon exchange never touches the phonons; vibronic terms never touch the photon.
        if a.cavity_occ != b.cavity_occ {
            assert_eq!(a.phonons, b.phonons);
            assert!(a.electronic.is_symmetric() && b.electronic.is_symmetric());
        } else {
            assert!(a.total_phonons().abs_diff(b.total_phonons()) == 1);
        }
    }
}

#[test]
fn momentum_is_conserved_without_disorder() {
    for n in [2, 3, 5] {
        let p = ModelParams::new(n, 1.0, 1.5).with_trunc(Truncation::new(2, 1));
        let basis = Basis::new(&p).unwrap();
        let h = build_hjc_on(&basis, &p, None).unwrap();
        for (r, col, _) in h.upper_entries() {
            let a = basis.state_of(BasisIndex(r)).unwrap();
            let b = basis.state_of(BasisIndex(col)).unwrap();
            assert_eq!(a.total_momentum(), b.total_momentum(), "N={n}: {a:?} ↔ {b:?}");
        }
    }
}

#[test]
fn disorder_breaks_momentum_conservation() {
    let p = ModelParams::new(3, 1.0, 1.5).with_trunc(Truncation::new(2, 1));
    let basis = Basis::new(&p).unwrap();
    let h = build_hjc_on(&basis, &p, Some(&Detunings(vec![0.3, -0.1, 0.5]))).unwrap();
    let violating = h.upper_entries().any(|(r, col, _)| {
        let a = basis.state_of(BasisIndex(r)).unwrap();
        let b = basis.state_of(BasisIndex(col)).unwrap();
        a.total_momentum() != b.total_momentum()
    });
    assert!(violating);
}

#[test]
fn projector_algebra() {
    let p = ModelParams::new(4, 1.0, 2.0).with_trunc(Truncation::new(2, 1));
    let basis = Basis::new(&p).unwrap();
    let pp = Projector::new(&basis, Manifold::P);
    let qq = Projector::new(&basis, Manifold::Q);
    for seed in 0..5 {
        let v = random_vector(basis.dim(), seed);
        let pv = pp.apply(&v).unwrap();
        assert_eq!(pp.apply(&pv).unwrap(), pv);
        assert!(qq.apply(&pv).unwrap().iter().all(|x| x.norm() == 0.0));
        let qv = qq.apply(&v).unwrap();
        for ((a, b), x) in pv.iter().zip(&qv).zip(&v) {
            assert_eq!(a + b, *x);
        }
    }
}

#[test]
fn p_manifold_couples_only_the_symmetric_phonon() {
    for (n, lambda) in [(2, 1.0), (4, 0.7), (5, 1.3)] {
        let p = ModelParams::new(n, lambda, 2.0).with_trunc(Truncation::new(3, 1));
        let basis = Basis::new(&p).unwrap();
        let h = build_hjc_on(&basis, &p, None).unwrap();
        let pp = Projector::new(&basis, Manifold::P);
        let strength = lambda / (n as f64).sqrt();
        let mut seen = 0;
        for (r, col, v) in h.upper_entries() {
            if !(pp.contains(r) && pp.contains(col)) {
                continue;
            }
            let a = basis.state_of(BasisIndex(r)).unwrap();
            let b = basis.state_of(BasisIndex(col)).unwrap();
            if a.cavity_occ != b.cavity_occ {
                continue;
            }
            seen += 1;
            assert_eq!(a.phonons[1..], b.phonons[1..]);
            assert_eq!(a.phonons[0].abs_diff(b.phonons[0]), 1);
            let hi = a.phonons[0].max(b.phonons[0]) as f64;
            assert!((v - Complex64::new(strength * hi.sqrt(), 0.0)).norm() < 1e-14);
        }
        assert!(seen > 0);
    }
}

#[test]
fn q_to_p_coupling_scales_with_vibronic_strength() {
    let norm = |lambda: f64| {
        let p = ModelParams::new(4, lambda, 2.0).with_trunc(Truncation::new(2, 1));
        let basis = Basis::new(&p).unwrap();
        let h = build_hjc_on(&basis, &p, None).unwrap();
        block_norm(&h, &Projector::new(&basis, Manifold::Q), &Projector::new(&basis, Manifold::P))
    };
    assert_eq!(norm(0.0), 0.0);
    let (a, b) = (norm(0.5), norm(1.0));
    assert!(a > 0.0);
    assert!((b / a - 2.0).abs() < 1e-12);
}
