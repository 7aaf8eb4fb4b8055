use coherence_bounds::dft::{DftPlan, Direction};
use coherence_bounds::linalg::{CMatrix, CVector, C64};
use coherence_bounds::sparsity::{l0, support};
use coherence_bounds::{
    admissible_space, best_set, coherence_profile, concentration_epsilon, cross_coherence, fkdb_rhs,
    fskpb_rhs, generate, sample_admissible, sub_coherence, BiSystem, Bound, CoherenceProfile, Family,
    PairedSystem, PreparedBiSystem, Tolerances,
};
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn vector(d: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec(entry(), d).prop_map(CVector::from_vec)
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(entry(), rows * cols).prop_map(move |v| CMatrix::from_vec(rows, cols, v))
}

/// A system whose diagonal pairings are forced to 1 + |random|.
fn system() -> impl Strategy<Value = PairedSystem> {
    (1usize..5, 1usize..7)
        .prop_flat_map(|(d, n)| (matrix(d, n), matrix(n, d)))
        .prop_filter_map("degenerate column", |(t, mut f)| {
            for j in 0..t.ncols() {
                let p = (f.row(j) * t.column(j))[(0, 0)];
                if p.norm() < 1e-3 {
                    return None;
                }
                let scale = (1.0 + p.norm()) / p;
                let row = f.row(j) * scale;
                f.set_row(j, &row);
            }
            PairedSystem::new(coherence_bounds::Field::Complex, t, f).ok()
        })
}

fn unit_columns(d: usize, n: usize) -> impl Strategy<Value = CMatrix> {
    matrix(d, n).prop_filter_map("zero column", |mut m| {
        for mut col in m.column_iter_mut() {
            let norm = col.norm();
            if norm < 1e-3 {
                return None;
            }
            col /= C64::new(norm, 0.0);
        }
        Some(m)
    })
}

fn family() -> impl Strategy<Value = Family> {
    let plain = (2usize..6).prop_flat_map(|d| {
        prop_oneof![
            Just(Family::IdentityPair { d }),
            Just(Family::DftPair { d }),
            (1.0..89.0f64).prop_map(move |angle| Family::RotatedPair { d, angle }),
            (1..=d).prop_map(move |split| Family::SubspaceUnion { d, split }),
        ]
    });
    prop_oneof![
        3 => plain.clone(),
        1 => (plain, 0.0..0.1f64).prop_map(|(base, magnitude)| Family::Perturbed { base: Box::new(base), magnitude }),
    ]
}

fn close(a: &CVector, b: &CVector, tol: f64) -> bool {
    (a - b).camax() <= tol * (1.0 + a.camax().max(b.camax()))
}

fn profile() -> impl Strategy<Value = CoherenceProfile> {
    (0.0..1.0f64, 0.0..1.0f64, 0.01..1.0f64, 0.01..1.0f64).prop_map(|(sf, sg, cf, cg)| CoherenceProfile {
        sub_coherence_f: sf,
        sub_coherence_g: sg,
        cross_f_omega: cf,
        cross_g_tau: cg,
    })
}

proptest! {
    #[test]
    fn analysis_and_synthesis_are_linear(
        (p, x, y, a, b) in system().prop_flat_map(|p| {
            let d = p.dim();
            (Just(p), vector(d), vector(d), entry(), entry())
        })
    ) {
        let lhs = p.analysis(&(&x * a + &y * b)).unwrap();
        let rhs = p.analysis(&x).unwrap() * a + p.analysis(&y).unwrap() * b;
        prop_assert!(close(&lhs, &rhs, 1e-12));
        let c = p.analysis(&x).unwrap();
        let e = p.analysis(&y).unwrap();
        let lhs = p.synthesis(&(&c * a + &e * b)).unwrap();
        let rhs = p.synthesis(&c).unwrap() * a + p.synthesis(&e).unwrap() * b;
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn synthesis_after_analysis_is_frame_operator((p, x) in system().prop_flat_map(|p| { let d = p.dim(); (Just(p), vector(d)) })) {
        let round = p.synthesis(&p.analysis(&x).unwrap()).unwrap();
        prop_assert!(close(&round, &(p.frame_operator() * &x), 1e-12));
    }

    #[test]
    fn generated_systems_pass_pairing(p in system()) {
        prop_assert!(p.validate_pairing(1e-9).ok);
    }

    #[test]
    fn hilbert_systems_validate(v in (1usize..6, 1usize..8).prop_flat_map(|(d, n)| unit_columns(d, n))) {
        let p = PairedSystem::from_hilbert_vectors(v, 1e-9).unwrap();
        prop_assert!(p.validate_pairing(1e-9).ok);
    }

    #[test]
    fn hilbert_cross_coherences_agree(
        (t, w) in (1usize..6, 1usize..7, 1usize..7).prop_flat_map(|(d, n, m)| (unit_columns(d, n), unit_columns(d, m)))
    ) {
        let a = PairedSystem::from_hilbert_vectors(t, 1e-9).unwrap();
        let b = PairedSystem::from_hilbert_vectors(w, 1e-9).unwrap();
        let ab = cross_coherence(&a, &b).unwrap();
        let ba = cross_coherence(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
    }

    #[test]
    fn sub_coherence_ignores_order((p, perm) in system().prop_flat_map(|p| {
        let n = p.len();
        (Just(p), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })) {
        let t = CMatrix::from_fn(p.dim(), p.len(), |i, j| p.vectors()[(i, perm[j])]);
        let f = CMatrix::from_fn(p.len(), p.dim(), |j, i| p.functionals()[(perm[j], i)]);
        let q = PairedSystem::new(p.field(), t, f).unwrap();
        prop_assert_eq!(sub_coherence(&p), sub_coherence(&q));
    }

    #[test]
    fn swapping_systems_swaps_profile((a, b) in system().prop_flat_map(|a| {
        let d = a.dim();
        (Just(a), (1usize..7).prop_flat_map(move |m| (matrix(d, m), matrix(m, d))))
    }).prop_filter_map("bad second", |(a, (w, g))| {
        let b = PairedSystem::new(coherence_bounds::Field::Complex, w, g).ok()?;
        Some((a, b))
    })) {
        let bi = BiSystem::new(a, b).unwrap();
        prop_assert_eq!(coherence_profile(&bi.swapped()), coherence_profile(&bi).swapped());
    }

    #[test]
    fn best_set_beats_every_subset((a, size) in (1usize..=10).prop_flat_map(|n| (vector(n), 0..=n))) {
        let best = best_set(&a, size).unwrap();
        prop_assert_eq!(best.set.len(), size);
        let n = a.len();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let eps = concentration_epsilon(&a, &set).unwrap();
            prop_assert!(best.epsilon <= eps + 1e-12, "{:?} beats {:?}", set, best.set);
        }
    }

    #[test]
    fn support_carries_all_mass(a in (1usize..12).prop_flat_map(vector)) {
        let s = support(&a, 0.0);
        if !s.is_empty() {
            prop_assert_eq!(concentration_epsilon(&a, &s).unwrap(), 0.0);
        }
    }

    #[test]
    fn l0_ignores_scale(a in (1usize..12).prop_flat_map(vector), s in 0.1..10.0f64, phase in 0.0..std::f64::consts::TAU) {
        let z = C64::from_polar(s, phase);
        prop_assert_eq!(l0(&(&a * z), 0.0), l0(&a, 0.0));
    }

    #[test]
    fn dft_is_unitary(h in (1usize..=64).prop_flat_map(vector)) {
        let d = h.len();
        let fwd = DftPlan::new(d, Direction::Forward).unwrap().transform(&h).unwrap();
        prop_assert!((fwd.norm() - h.norm()).abs() <= 1e-10 * (1.0 + h.norm()));
        let back = DftPlan::new(d, Direction::Inverse).unwrap().transform(&fwd).unwrap();
        prop_assert!(close(&back, &h, 1e-10));
    }

    #[test]
    fn concentration_bound_reduces_to_sparsity_bound(sf in 0usize..20, sg in 0usize..20, p in profile()) {
        prop_assert_eq!(fskpb_rhs(sf, sg, 0.0, 0.0, &p), fkdb_rhs(sf, sg, &p));
    }

    #[test]
    fn concentration_bound_is_monotone(
        om in 1usize..12, on in 1usize..12,
        eps in 0.0..1.0f64, delta in 0.0..1.0f64, step in 0.0..0.5f64,
        p in profile(),
    ) {
        let base = fskpb_rhs(om, on, eps, delta, &p).finite().unwrap();
        let at = |q: CoherenceProfile| fskpb_rhs(om, on, eps, delta, &q).finite().unwrap();
        let sub_f = at(CoherenceProfile { sub_coherence_f: p.sub_coherence_f + step, ..p });
        let sub_g = at(CoherenceProfile { sub_coherence_g: p.sub_coherence_g + step, ..p });
        let cross_f = at(CoherenceProfile { cross_f_omega: p.cross_f_omega + step, ..p });
        let cross_g = at(CoherenceProfile { cross_g_tau: p.cross_g_tau + step, ..p });
        prop_assert!(fskpb_rhs(om, on, eps + step, delta, &p).finite().unwrap() <= base);
        prop_assert!(fskpb_rhs(om, on, eps, delta + step, &p).finite().unwrap() <= base);
        prop_assert!(fskpb_rhs(om + 1, on, eps, delta, &p).finite().unwrap() <= base);
        prop_assert!(fskpb_rhs(om, on + 1, eps, delta, &p).finite().unwrap() <= base);
        prop_assert!(sub_f <= base && sub_g <= base && cross_f <= base && cross_g <= base);
    }

    #[test]
    fn zero_cross_coherence_is_vacuous(sf in 0usize..5, sg in 0usize..5) {
        let p = CoherenceProfile { sub_coherence_f: 0.0, sub_coherence_g: 0.0, cross_f_omega: 0.0, cross_g_tau: 1.0 };
        prop_assert_eq!(fkdb_rhs(sf, sg, &p), Bound::Vacuous);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn admissible_space_is_fixed_by_both(f in family(), seed in any::<u64>()) {
        let b = generate(&f, seed).unwrap();
        let space = admissible_space(&b, 1e-10);
        for col in space.basis().column_iter() {
            let x: CVector = col.into_owned();
            prop_assert!(b.first().fixed_point_residual(&x).unwrap() <= 1e-9);
            prop_assert!(b.second().fixed_point_residual(&x).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn sampled_signals_satisfy_both_bounds(f in family(), seed in any::<u64>(), sample in any::<u64>()) {
        let b = generate(&f, seed).unwrap();
        prop_assert!(b.first().validate_pairing(1e-9).ok && b.second().validate_pairing(1e-9).ok);
        let space = admissible_space(&b, 1e-10);
        let x = sample_admissible(&space, sample).unwrap();
        let prepared = PreparedBiSystem::new(&b, Tolerances::default());
        let analyzed = prepared.analyze(&x).unwrap();
        let cert = analyzed.sparsity_certificate();
        prop_assert!(cert.residuals.f <= 1e-9 && cert.residuals.g <= 1e-9);
        prop_assert!(cert.hypothesis_ok && cert.satisfied, "{:?}", cert);

        let (n, m) = (b.first().len(), b.second().len());
        for size_m in 0..=n {
            let set_m = best_set(analyzed.coefficients_f(), size_m).unwrap().set;
            for size_n in 0..=m {
                let set_n = best_set(analyzed.coefficients_g(), size_n).unwrap().set;
                let cert = analyzed.concentration_certificate(&set_m, &set_n).unwrap();
                prop_assert!(cert.satisfied, "{:?}", cert);
            }
        }

        let (sf, sg) = analyzed.per_index_slacks();
        prop_assert!(sf.iter().chain(&sg).all(|&s| s >= -1e-9));
    }
}
