use itertools::Itertools;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::exec::Execution;
use crate::qseries::named::{eta_power, sigma};
use crate::qseries::scalar::{int, rat, Graded};
use crate::qseries::series::QExpansion;

const SEQ: Execution = Execution::Sequential;

fn a1_squared() -> (EvenLattice, Vec<BigRational>) {
    (EvenLattice::new(vec![vec![2, 0], vec![0, 2]]).unwrap(), vec![rat(1, 2), rat(1, 2)])
}

/// Every integer vector in the box `|x_i| ≤ sqrt(B (G⁻¹)_ii)`, filtered by norm.
fn box_oracle(lat: &EvenLattice, max_norm_half: u64) -> Vec<Vec<Vec<i64>>> {
    let b = 2.0 * max_norm_half as f64;
    let inv = lat.matrix().try_inverse().unwrap();
    let ranges: Vec<Vec<i64>> = (0..lat.rank())
        .map(|i| {
            let r = (b * inv[(i, i)]).sqrt().floor() as i64 + 1;
            (-r..=r).collect()
        })
        .collect();
    let mut shells = vec![Vec::new(); max_norm_half as usize + 1];
    for x in ranges.into_iter().multi_cartesian_product() {
        let n = lat.norm(&x);
        if n <= 2 * max_norm_half as i64 {
            shells[(n / 2) as usize].push(x);
        }
    }
    for s in &mut shells {
        s.sort_unstable();
    }
    shells
}

fn rationals(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| int(x)).collect()
}

#[test]
fn invalid_lattices_are_rejected() {
    assert!(matches!(EvenLattice::new(vec![vec![1]]), Err(Error::InvalidLattice(_))));
    assert!(matches!(EvenLattice::new(vec![vec![2, 1], vec![0, 2]]), Err(Error::InvalidLattice(_))));
    assert!(matches!(EvenLattice::new(vec![vec![2, 3], vec![3, 2]]), Err(Error::InvalidLattice(_))));
    assert!(matches!(EvenLattice::from_json(r#"{"rank":2,"gram":[[2]]}"#), Err(Error::InvalidLattice(_))));
    let e8 = EvenLattice::from_json(&EvenLattice::e8().to_json().to_string()).unwrap();
    assert_eq!(e8, EvenLattice::e8());
}

#[test]
fn direction_must_be_unit() {
    let e8 = EvenLattice::e8();
    assert!(e8.check_direction(&e8_direction()).is_ok());
    let mut h = vec![int(0); 8];
    h[0] = int(1);
    assert_eq!(e8.check_direction(&h), Err(Error::NonUnitDirection("2".into())));
    assert!(matches!(theta_moment(&e8, &h, 2, 2, SEQ), Err(Error::NonUnitDirection(_))));
}

#[test]
fn e8_shells_match_sigma3() {
    let shells = enumerate_vectors(&EvenLattice::e8(), 3, SEQ);
    assert_eq!(shells[0].vectors, vec![vec![0; 8]]);
    for n in 1..=3u64 {
        assert_eq!(BigInt::from(shells[n as usize].vectors.len()), sigma(3, n) * 240);
    }
    assert_eq!(shells[1].vectors.len(), 240);
}

#[test]
fn fincke_pohst_matches_box_search() {
    let lats = vec![
        EvenLattice::new(vec![vec![2, -1], vec![-1, 2]]).unwrap(),
        EvenLattice::new(vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]]).unwrap(),
        EvenLattice::new(vec![vec![4, 1, 0], vec![1, 6, 2], vec![0, 2, 8]]).unwrap(),
    ];
    for lat in lats {
        let fp: Vec<Vec<Vec<i64>>> = enumerate_vectors(&lat, 4, SEQ).into_iter().map(|s| s.vectors).collect();
        assert_eq!(fp, box_oracle(&lat, 4));
    }
}

#[test]
fn shells_are_symmetric() {
    for s in enumerate_vectors(&EvenLattice::e8(), 2, Execution::Parallel) {
        for v in &s.vectors {
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            assert!(s.vectors.binary_search(&neg).is_ok());
        }
    }
}

#[test]
fn parallel_and_sequential_agree() {
    let e8 = EvenLattice::e8();
    assert_eq!(enumerate_vectors(&e8, 2, SEQ), enumerate_vectors(&e8, 2, Execution::Parallel));
}

#[test]
fn e8_theta_moments() {
    let e8 = EvenLattice::e8();
    let h = e8_direction();
    let t0 = theta_moment(&e8, &h, 0, 3, SEQ).unwrap();
    assert_eq!(t0, QExpansion::from_rationals(vec![int(1), int(240), int(2160), int(6720)], 3));
    let t2 = theta_moment(&e8, &h, 2, 4, SEQ).unwrap();
    assert_eq!(t2.coeff(0), Graded::zero());
    assert_eq!(t2.coeff(1), Graded::int(60));
    // Weyl symmetry: Σ⟨h,α⟩² = |α|²/8 summed, i.e. (1/8)·2q d/dq θ
    let weyl = theta_moment(&e8, &h, 0, 4, SEQ).unwrap().q_d_dq().scale(&rat(1, 4));
    assert_eq!(t2, weyl);
}

#[test]
fn block_factorized_profile_matches_direct_enumeration() {
    let lat = EvenLattice::e8().power(2);
    let mut h = e8_direction();
    h.resize(16, int(0));
    let prof = pairing_profile(&lat, &h, 2, SEQ).unwrap();
    let mut direct = std::collections::BTreeMap::new();
    for s in enumerate_vectors(&lat, 2, Execution::Parallel) {
        for v in &s.vectors {
            *direct.entry((s.norm_half, lat.pairing(&h, v))).or_insert_with(|| BigInt::from(0)) += 1;
        }
    }
    assert_eq!(prof.counts, direct);
}

#[test]
fn colored_partitions_match_eta_product() {
    for colors in [1usize, 3, 8] {
        let counts = colored_partition_counts(colors, 6);
        let series = eta_power(-(colors as i64), 6).unwrap();
        for m in 0..=6u64 {
            let c: BigInt = counts.iter().filter(|((s, _), _)| *s == m).map(|(_, c)| c.clone()).sum();
            assert_eq!(Graded::rational(BigRational::from_integer(c)), series.coeff(m as i64), "colors {colors}, m {m}");
        }
    }
}

#[test]
fn quasimod_n0_is_character() {
    let lat = EvenLattice::e8x3();
    let rhs = quasimod_rhs(&lat, &e8x3_direction(), 0, 3, SEQ).unwrap();
    assert_eq!(rhs.offset(), &int(-1));
    let want = [1i64, 744, 196884, 21493760];
    for (m, w) in want.iter().enumerate() {
        assert_eq!(rhs.coeff(m as i64), Graded::int(*w));
    }
}

#[test]
fn closed_form_matches_fock_oracle_small() {
    let (lat, h) = a1_squared();
    for n in 0..=4 {
        let a = quasimod_rhs(&lat, &h, n, 6, SEQ).unwrap();
        let b = fock_trace_oracle(&lat, &h, n, 6, SEQ).unwrap();
        assert_eq!(a, b, "n = {n}");
    }
    let e8 = EvenLattice::e8();
    for n in 0..=2 {
        let a = quasimod_rhs(&e8, &e8_direction(), n, 3, SEQ).unwrap();
        let b = fock_trace_oracle(&e8, &e8_direction(), n, 3, SEQ).unwrap();
        assert_eq!(a, b, "E8, n = {n}");
    }
}

#[test]
fn eval_constant_and_tail() {
    let c = QExpansion::constant(Graded::rational(rat(7, 3)), 5);
    let (v, _) = eval_trace_numeric(&c, Complex64::new(0.0, 1.0)).unwrap();
    assert!((v - Complex64::new(7.0 / 3.0, 0.0)).norm() < 1e-14);
    assert!(matches!(eval_trace_numeric(&c, Complex64::new(0.0, -1.0)), Err(Error::Divergent(_))));
    let tau = Complex64::new(0.0, 1.5);
    let tails: Vec<f64> = [4, 6, 8].iter().map(|&n| eval_trace_numeric(&eta_power(-24, n).unwrap(), tau).unwrap().1).collect();
    assert!(tails[0] > tails[1] && tails[1] > tails[2]);
}

/// `E_4³/Δ` from divisor sums and the product formula, summed directly.
fn j_direct(tau: Complex64) -> Complex64 {
    let q = (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * tau).exp();
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut prod = Complex64::new(1.0, 0.0);
    for n in 1..200u64 {
        let qn = q.powu(n as u32);
        e4 += qn * 240.0 * sigma(3, n).to_string().parse::<f64>().unwrap();
        prod *= (Complex64::new(1.0, 0.0) - qn).powu(24);
    }
    e4.powu(3) / (q * prod)
}

#[test]
fn character_matches_direct_j_sum() {
    let tau = Complex64::new(0.0, 1.5);
    let rhs = quasimod_rhs(&EvenLattice::e8x3(), &e8x3_direction(), 0, 6, SEQ).unwrap();
    let (v, _) = eval_trace_numeric(&rhs, tau).unwrap();
    let j = j_direct(tau);
    assert!((v - j).norm() / j.norm() < 1e-6, "{v} vs {j}");
}

fn s_image(tau: Complex64) -> Complex64 {
    -Complex64::new(1.0, 0.0) / tau
}

#[test]
fn chi_at_zero_and_taylor_moments() {
    let e8 = EvenLattice::e8();
    let h = e8_direction();
    let prof = pairing_profile(&e8, &h, 6, SEQ).unwrap();
    let tau = Complex64::new(0.1, 1.1);
    let (char0, _) = prof.quasimod_rhs(0).unwrap().eval(tau).unwrap();
    let chi0 = prof.chi(Complex64::new(0.0, 0.0), tau).unwrap();
    assert!((chi0 - char0).norm() / char0.norm() < 1e-12);
    let z = Complex64::new(0.01, 0.005);
    let eta = eta_power(-8, 6).unwrap();
    let mut taylor = Complex64::new(0.0, 0.0);
    let mut fact = 1.0;
    for s in 0..=10u32 {
        if s > 0 {
            fact *= s as f64;
        }
        if s % 2 == 1 {
            continue;
        }
        let (m, _) = prof.theta_moment(s).mul(&eta).eval(tau).unwrap();
        taylor += m * (crate::qseries::scalar::tpi() * z).powu(s) / fact;
    }
    let chi = prof.chi(z, tau).unwrap();
    assert!((chi - taylor).norm() / chi.norm() < 1e-10);
}

#[test]
fn e8_jacobi_law() {
    let prof = pairing_profile(&EvenLattice::e8(), &e8_direction(), 8, SEQ).unwrap();
    let tau = Complex64::new(0.0, 1.3);
    let z = Complex64::new(0.1, 0.2);
    let lhs = prof.chi(z / tau, s_image(tau)).unwrap();
    let rhs = (Complex64::new(0.0, std::f64::consts::PI) * z * z / tau).exp() * prof.chi(z, tau).unwrap();
    assert!((lhs - rhs).norm() / lhs.norm().max(rhs.norm()) < 1e-8);
}

/// Theta moments of the unimodular E8 carry the anomaly tail
/// `Σ_k θ_{2j-2k} (1/(2πiτ))^k (2j)!/(2^k k!(2j-2k)!)`, of degree ≤ j in `1/τ`.
#[test]
fn theta_moment_weight_grading() {
    let prof = pairing_profile(&EvenLattice::e8(), &e8_direction(), 8, SEQ).unwrap();
    let tau = Complex64::new(0.0, 1.2);
    let val = |two_j: u32, t: Complex64| prof.theta_moment(two_j).eval(t).unwrap().0;
    for j in 0..=3u32 {
        let w = 4 + 2 * j as i32;
        let lhs = tau.powi(-w) * val(2 * j, s_image(tau));
        let mut rhs = Complex64::new(0.0, 0.0);
        for k in 0..=j {
            let c = crate::combinatorics::factorial(2 * j as usize)
                / (BigInt::from(2u32).pow(k) * crate::combinatorics::factorial(k as usize) * crate::combinatorics::factorial((2 * j - 2 * k) as usize));
            let c = c.to_string().parse::<f64>().unwrap();
            rhs += val(2 * j - 2 * k, tau) * c * (crate::qseries::scalar::tpi() * tau).powi(-(k as i32));
        }
        assert!((lhs - rhs).norm() / lhs.norm().max(rhs.norm()) < 1e-5, "j = {j}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn e8x3_vectors_have_even_norm(v in proptest::collection::vec(-5i64..6, 24)) {
        prop_assert_eq!(EvenLattice::e8x3().norm(&v) % 2, 0);
    }

    #[test]
    fn enumeration_matches_box_on_random_forms(a in proptest::collection::vec(-2i64..3, 9)) {
        // G = 2(AᵀA + I), even and positive definite
        let mut g = vec![vec![0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let s: i64 = (0..3).map(|k| a[3 * k + i] * a[3 * k + j]).sum();
                g[i][j] = 2 * s + if i == j { 2 } else { 0 };
            }
        }
        let lat = EvenLattice::new(g).unwrap();
        let fp: Vec<Vec<Vec<i64>>> = enumerate_vectors(&lat, 3, SEQ).into_iter().map(|s| s.vectors).collect();
        prop_assert_eq!(fp, box_oracle(&lat, 3));
    }

    #[test]
    fn pairing_is_linear(x in proptest::collection::vec(-3i64..4, 8), y in proptest::collection::vec(-3i64..4, 8)) {
        let e8 = EvenLattice::e8();
        let h = e8_direction();
        let s: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert_eq!(e8.pairing(&h, &s), e8.pairing(&h, &x) + e8.pairing(&h, &y));
        prop_assert_eq!(e8.pairing(&rationals(&x), &y), e8.pairing(&rationals(&y), &x));
    }
}
