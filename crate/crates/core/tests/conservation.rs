//! Long-run energy audits, boundedness and the discrete-gradient identity.

use std::sync::Arc;

use esav_core::eavf::{avf_gradient, FixedPointConfig, KgEavf, NlsEavf};
use esav_core::grid::make_grid;
use esav_core::kg::{KgEsavs, KgProblem};
use esav_core::nls::{kinetic_energy, NlsEsavs, NlsProblem};
use esav_core::potential::{Potential, Quartic, SineGordon};
use esav_core::{Field, TimeStepper};
use num_complex::Complex64;
use proptest::prelude::*;

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn sine_gordon_1d(h: f64) -> KgProblem {
    let n = (40.0 / h).round() as usize;
    KgProblem {
        grid: make_grid(-20.0, 20.0, n, 1).unwrap(),
        omega: 1.0,
        potential: Arc::new(SineGordon),
        initial_u: Arc::new(|_| 0.0),
        initial_v: Arc::new(|p| 4.0 * sech(p[0])),
        c0: 1.0,
    }
}

fn soliton(n: usize) -> NlsProblem {
    NlsProblem {
        grid: make_grid(-40.0, 40.0, n, 1).unwrap(),
        beta: 2.0,
        initial: Arc::new(|p| Complex64::from_polar(sech(p[0]), 2.0 * p[0])),
        c0: 0.0,
    }
}

/// Runs `steps` steps and returns the largest deviation of the conserved
/// energy from its initial value, along with the initial value.
fn drift<S: TimeStepper>(s: &S, steps: usize) -> (f64, f64, S::State) {
    let mut st = s.init().unwrap();
    let e0 = s.conserved_energy(&st);
    let mut worst = 0.0f64;
    for _ in 0..steps {
        st = s.step(&st).unwrap().0;
        worst = worst.max((s.conserved_energy(&st) - e0).abs());
    }
    (worst, e0, st)
}

#[test]
fn kg_esavs_conserves_over_long_run() {
    let s = KgEsavs::new(sine_gordon_1d(0.1), 0.1).unwrap();
    let (d, e0, _) = drift(&s, 2000);
    assert!(d <= 1e-10 * e0.abs().max(1.0), "drift {d:e}");
}

#[test]
fn kg_eavf_conserves_its_hamiltonian() {
    let s = KgEavf::new(sine_gordon_1d(0.1), 0.1, FixedPointConfig::default()).unwrap();
    let (d, e0, _) = drift(&s, 2000);
    assert!(d <= 1e-10 * e0.abs().max(1.0), "drift {d:e}");
}

#[test]
fn kg_esavs_quartic_2d_conserves() {
    let p = KgProblem {
        grid: make_grid(-10.0, 10.0, 40, 2).unwrap(),
        omega: 1.0,
        potential: Arc::new(Quartic),
        initial_u: Arc::new(|p| 2.0 * sech((p[0] * p[0] + p[1] * p[1]).cosh())),
        initial_v: Arc::new(|_| 0.0),
        c0: 0.0,
    };
    let s = KgEsavs::new(p, 0.1).unwrap();
    let (d, e0, _) = drift(&s, 500);
    assert!(d <= 1e-10 * e0.abs().max(1.0), "drift {d:e}");
}

#[test]
fn kg_esavs_stays_bounded() {
    let p = sine_gordon_1d(0.1);
    let s = KgEsavs::new(p.clone(), 0.1).unwrap();
    let mut st = s.init().unwrap();
    // every term of the modified energy is nonnegative, so each is bounded by E + C0
    let bound = s.conserved_energy(&st) + p.c0;
    for _ in 0..2000 {
        st = s.step(&st).unwrap().0;
        assert!(0.5 * st.v.norm_l2().powi(2) <= bound + 1e-9);
        assert!(0.5 * st.u.forward_diff_seminorm_sqr() <= bound + 1e-9);
        assert!(st.q * st.q <= bound + 1e-9);
    }
    assert!((st.t - 200.0).abs() < 1e-9);
}

#[test]
fn initial_q_matches_direct_sum_2d_cubic() {
    let p = KgProblem {
        grid: make_grid(-10.0, 10.0, 200, 2).unwrap(),
        omega: 1.0,
        potential: Arc::new(Quartic),
        initial_u: Arc::new(|p| 2.0 * sech((p[0] * p[0] + p[1] * p[1]).cosh())),
        initial_v: Arc::new(|_| 0.0),
        c0: 0.0,
    };
    let st = KgEsavs::new(p, 0.1).unwrap().init().unwrap();
    let h = 0.1;
    let mut acc = 0.0;
    for i in 0..200 {
        for j in 0..200 {
            let (x, y) = (-10.0 + i as f64 * h, -10.0 + j as f64 * h);
            let u = 2.0 * sech((x * x + y * y).cosh());
            acc += u.powi(4) / 4.0;
        }
    }
    let q = (h * h * acc).sqrt();
    assert!((st.q - q).abs() <= 1e-13 * q.max(1.0));
}

#[test]
fn initial_q_matches_direct_sum_soliton() {
    let st = NlsEsavs::new(soliton(4096), 0.01).unwrap().init().unwrap();
    let h = 80.0 / 4096.0;
    let acc: f64 = (0..4096).map(|j| sech(-40.0 + j as f64 * h).powi(4)).sum();
    let q = (h * acc).sqrt();
    assert!((st.q - q).abs() <= 1e-13 * q.max(1.0));
}

#[test]
fn nls_esavs_conserves_audited_energy() {
    let s = NlsEsavs::new(soliton(512), 0.01).unwrap();
    let (d, e0, _) = drift(&s, 10_000);
    assert!(d <= 1e-9 * e0.abs().max(1.0), "drift {d:e}");
}

#[test]
fn nls_energy_sign_audit() {
    // <-Du,u> - beta/2 q^2 is conserved; flipping the sign of the SAV term is not
    let s = NlsEsavs::new(soliton(512), 0.01).unwrap();
    let beta = s.problem().beta;
    let flipped = |st: &esav_core::nls::NlsState| {
        kinetic_energy(s.plan(), s.lambda(), &st.u).unwrap() + 0.5 * beta * st.q * st.q
    };
    let mut st = s.init().unwrap();
    let (e0, f0) = (s.conserved_energy(&st), flipped(&st));
    let (mut de, mut df) = (0.0f64, 0.0f64);
    for _ in 0..2000 {
        st = s.step(&st).unwrap().0;
        de = de.max((s.conserved_energy(&st) - e0).abs());
        df = df.max((flipped(&st) - f0).abs());
    }
    assert!(de < 1e-10, "{de:e}");
    assert!(df > 1e-3, "{df:e}");
}

#[test]
fn nls_eavf_conserves_hamiltonian() {
    let s = NlsEavf::new(soliton(512), 0.01, FixedPointConfig::default()).unwrap();
    let (d, e0, _) = drift(&s, 2000);
    assert!(d <= 1e-9 * e0.abs().max(1.0), "drift {d:e}");
}

#[test]
fn plane_wave_kinetic_energy_is_single_mode() {
    let p = NlsProblem {
        grid: make_grid(0.0, 2.0 * std::f64::consts::PI, 64, 2).unwrap(),
        beta: -1.0,
        initial: Arc::new(|p| Complex64::from_polar(1.0, p[0] + p[1])),
        c0: 0.0,
    };
    let s = NlsEsavs::new(p, 0.01).unwrap();
    let st = s.init().unwrap();
    let k = kinetic_energy(s.plan(), s.lambda(), &st.u).unwrap();
    let mass = st.u.norm_l2().powi(2);
    assert!((k - 2.0 * mass).abs() < 1e-12 * mass);
}

#[test]
fn zero_state_is_a_fixed_point() {
    let mut p = sine_gordon_1d(0.5);
    p.initial_v = Arc::new(|_| 0.0);
    p.c0 = 0.0;
    let esavs = KgEsavs::new(p.clone(), 0.1).unwrap();
    let st = esavs.step(&esavs.init().unwrap()).unwrap().0;
    assert!(st.u.norm_inf() == 0.0 && st.v.norm_inf() == 0.0 && st.q == 0.0);
    assert_eq!(esavs.conserved_energy(&st), 0.0);
    let eavf = KgEavf::new(p, 0.1, FixedPointConfig::default()).unwrap();
    let (st, iters) = eavf.step(&eavf.init().unwrap()).unwrap();
    assert_eq!(iters, 1);
    assert!(st.u.norm_inf() == 0.0);
}

fn smooth(n: usize, seed: u64, amp: f64) -> Vec<f64> {
    let a = (seed % 97) as f64 / 97.0;
    (0..n)
        .map(|j| {
            let x = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            amp * ((x + a).sin() + 0.5 * (2.0 * x - 3.0 * a).cos() + 0.25 * (5.0 * x).sin())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn discrete_gradient_identity(seed in 0u64..10_000, amp in 0.1f64..3.0, shift in -1.0f64..1.0, quartic: bool) {
        let g = make_grid(-5.0, 5.0, 64, 1).unwrap();
        let a = smooth(64, seed, amp);
        let b: Vec<f64> = a.iter().enumerate().map(|(j, x)| x + shift * (0.3 * j as f64).sin()).collect();
        let pot: Box<dyn Potential> = if quartic { Box::new(Quartic) } else { Box::new(SineGordon) };
        let gbar = avf_gradient(pot.as_ref(), &a, &b);
        let h = g.axis(0).h;
        let lhs: f64 = h * gbar.iter().zip(a.iter().zip(&b)).map(|(g, (x, y))| g * (y - x)).sum::<f64>();
        let rhs: f64 = h * a.iter().zip(&b).map(|(x, y)| pot.value(*y) - pot.value(*x)).sum::<f64>();
        let scale = h * a.iter().zip(&b).map(|(x, y)| pot.value(*y).abs() + pot.value(*x).abs()).sum::<f64>();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0), "{} vs {}", lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn kg_conservation_any_grid(half in 25usize..=256, tau in 0.005f64..0.2, amp in 0.2f64..2.0, seed in 0u64..100) {
        let n = 2 * half;
        let g = make_grid(-10.0, 10.0, n, 1).unwrap();
        let u0 = Field::new(g.clone(), smooth(n, seed, amp)).unwrap();
        let vals = Arc::new(u0.values().to_vec());
        let h = g.axis(0).h;
        let p = KgProblem {
            grid: g,
            omega: 1.0,
            potential: Arc::new(SineGordon),
            initial_u: Arc::new(move |x| vals[((x[0] + 10.0) / h).round() as usize % n]),
            initial_v: Arc::new(move |x| amp * sech(x[0])),
            c0: 1.0,
        };
        let s = KgEsavs::new(p, tau).unwrap();
        let (d, e0, _) = drift(&s, 1000);
        prop_assert!(d <= 1e-9 * e0.abs().max(1.0), "drift {:e}", d);
    }

    #[test]
    fn nls_conservation_any_grid(half in 25usize..=256, tau in 0.001f64..0.02) {
        let n = 2 * half;
        let s = NlsEsavs::new(soliton(n), tau).unwrap();
        let (d, e0, _) = drift(&s, 1000);
        prop_assert!(d <= 1e-9 * e0.abs().max(1.0), "drift {:e}", d);
    }
}
