//! Property tests for the structural invariants of each module.
//!
//! Set `WSUPER_SEED` to fix the proptest RNG seed and replay a run.

use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use wsuper::exactnum::{rat, BigRat, Domain, EvalPoint, Poly, RFunction, RationalFn, SeriesVar, TruncSeries, XExponent};
use wsuper::fockoracle::{build_space, lambda_mode_matrix};
use wsuper::freefield::{build_params, check_mutual_locality, check_screening_relations, check_symmetry, det_a, ParamTable};
use wsuper::qpoisson::c_coeff;
use wsuper::relcheck::{base_case_ledger, check_exchange, check_quadratic, RelOptions};
use wsuper::superdynkin::{check_d_invariance, enumerate_systems, extend_matrix, odd_reflection, EdgeClass, LabelRule};
use wsuper::wcurrents::{check_appendix_data, d_n};

fn config(cases: u32) -> Config {
    let mut c = Config::with_cases(cases);
    if let Some(seed) = std::env::var("WSUPER_SEED").ok().and_then(|s| s.parse().ok()) {
        c.rng_seed = RngSeed::Fixed(seed);
    }
    c
}

const RANKS: [(usize, usize); 6] = [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (2, 1)];

fn small_rat() -> impl Strategy<Value = BigRat> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn point() -> impl Strategy<Value = EvalPoint> {
    let pq = prop::sample::select(vec![(2i64, 1i64), (3, 2), (5, 3), (3, 1), (4, 3), (5, 2)]);
    (2i64..7, pq).prop_flat_map(|(den, (p, q))| (1..den).prop_map(move |num| EvalPoint::new(rat(num, den), p, q).unwrap()))
}

fn exponent() -> impl Strategy<Value = XExponent> {
    (-3i64..=3, -3i64..=3, -3i64..=3).prop_map(|(a, b, c)| XExponent::new(a, b, c))
}

fn poly_in_r() -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rat(), 1..4).prop_map(Poly::new)
}

fn rfunction() -> impl Strategy<Value = RFunction> {
    (poly_in_r(), poly_in_r().prop_filter("nonzero", |p| !p.is_zero())).prop_map(|(n, d)| RFunction::new(n, d))
}

/// A rank, an enumerated system of it, and a point.
fn table() -> impl Strategy<Value = ParamTable> {
    (prop::sample::select(RANKS.to_vec()), any::<prop::sample::Index>(), point()).prop_map(|((m, n), k, pt)| {
        let systems = enumerate_systems(m, n).unwrap();
        let d = &systems[k.index(systems.len())];
        build_params(d, None, LabelRule::EpsilonEdges, &pt).unwrap()
    })
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn bigrat_field_axioms(a in small_rat(), b in small_rat(), c in small_rat()) {
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        if !a.is_zero() {
            prop_assert!((&a * a.recip()).is_one());
        }
    }

    #[test]
    fn rfunction_field_axioms(f in rfunction(), g in rfunction(), h in rfunction()) {
        prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        if !f.is_zero() {
            prop_assert_eq!(&f / &f, RFunction::one());
        }
    }

    #[test]
    fn exp_inverts_log(c in prop::collection::vec(small_rat(), 1..10)) {
        let k = c.len() as i64;
        let mut coeffs = vec![BigRat::one()];
        coeffs.extend(c);
        let f = TruncSeries::new(SeriesVar::Z, 0, coeffs, k);
        prop_assert_eq!(f.log().unwrap().exp().unwrap(), f);
    }

    #[test]
    fn xpow_is_a_homomorphism(pt in point(), e1 in exponent(), e2 in exponent()) {
        prop_assert_eq!(pt.xpow(&(e1 + e2)).unwrap(), pt.xpow(&e1).unwrap() * pt.xpow(&e2).unwrap());
    }

    /// Inside minus outside expansion is `−Σ_{z0} Res(f, z0) z0^{−n−1}` at
    /// `z^n`, the sum running over the nonzero simple poles.
    #[test]
    fn expansion_jump_is_the_residue_sum(
        poles in prop::collection::btree_set((1i64..6, 1i64..6).prop_map(|(n, d)| (n, d)), 1..4),
        num in prop::collection::vec(small_rat(), 1..5),
        shift in -2i64..=2,
    ) {
        let mut zs: Vec<BigRat> = poles.iter().map(|&(n, d)| rat(n, d)).collect();
        zs.sort();
        zs.dedup();
        let den = zs.iter().fold(Poly::constant(BigRat::one()), |acc, z0| &acc * &Poly::new(vec![-z0.clone(), BigRat::one()]));
        let f = RationalFn::new(Poly::new(num), den, shift).unwrap();
        let k = 8;
        let inside = f.expand(Domain::Inside, k).unwrap();
        let outside = f.expand(Domain::Outside, k).unwrap();
        let res: Vec<BigRat> = zs.iter().map(|z0| f.residue(z0).unwrap()).collect();
        for n in -k..=k {
            let jump = inside.coeff(n).unwrap() - outside.coeff(-n).unwrap();
            let want: BigRat = zs.iter().zip(&res).map(|(z0, r)| -(r * z0.pow(-(n as i32) - 1))).sum();
            prop_assert_eq!(jump, want, "n = {}", n);
        }
    }

    #[test]
    fn d_weight_recurrence(pt in point(), j in 1u32..6) {
        let lhs = d_n(&pt, j).unwrap();
        let rhs = d_n(&pt, j - 1).unwrap() * pt.bracket(&XExponent::lin(-(j as i64), 1)).unwrap()
            / pt.bracket(&XExponent::int(j as i64)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn poisson_symmetry_and_vanishing_column(
        m_rank in 0usize..4, i in 1u32..5, j in 1u32..5, m in -5i64..=5, s in (2i64..6, 1i64..4)
    ) {
        let s = rat(s.0 + s.1, s.1);
        prop_assert_eq!(c_coeff(m_rank, i, j, m, &s).unwrap(), c_coeff(m_rank, j, i, m, &s).unwrap());
        let col = m_rank as u32 + 1;
        prop_assert!(c_coeff(m_rank, i.min(col), col, m, &s).unwrap().is_zero());
        if i > col {
            prop_assert!(!c_coeff(m_rank, i, col, m, &s).unwrap().is_zero() || m == 0);
        }
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn odd_reflection_is_an_involution(rank in prop::sample::select(RANKS.to_vec()), k in any::<prop::sample::Index>()) {
        let systems = enumerate_systems(rank.0, rank.1).unwrap();
        let d = &systems[k.index(systems.len())];
        prop_assert!(d.validate().is_ok());
        for i in d.odd_nodes() {
            let back = odd_reflection(&odd_reflection(d, i).unwrap(), i).unwrap();
            prop_assert_eq!(&back, d);
        }
    }

    #[test]
    fn edge_classes_partition_and_fermionic_set_is_even(
        rank in prop::sample::select(RANKS.to_vec()),
        k in any::<prop::sample::Index>(),
        rule in prop::sample::select(vec![LabelRule::EpsilonEdges, LabelRule::Cardinality]),
    ) {
        let systems = enumerate_systems(rank.0, rank.1).unwrap();
        let mat = extend_matrix(&systems[k.index(systems.len())], None, rule).unwrap();
        let mut all = mat.class_set(EdgeClass::Plus);
        all.extend(mat.class_set(EdgeClass::Minus));
        all.sort();
        prop_assert_eq!(all, (1..=mat.l + 1).collect::<Vec<_>>());
        let fermionic = (1..=mat.l + 1).filter(|&j| mat.is_fermionic(j)).count();
        prop_assert_eq!(fermionic % 2, 0);
    }

    #[test]
    fn d_is_constant_over_systems(
        rank in prop::sample::select(RANKS.to_vec()),
        rule in prop::sample::select(vec![LabelRule::EpsilonEdges, LabelRule::Cardinality]),
    ) {
        prop_assert!(check_d_invariance(rank.0, rank.1, rule).unwrap().passed());
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn parameter_identities_hold(tbl in table()) {
        for rep in [check_mutual_locality(&tbl, 8), check_symmetry(&tbl, 8), check_screening_relations(&tbl, 8)] {
            prop_assert!(rep.passed, "{:?}", rep.failures);
        }
        for m in 1..=8 {
            prop_assert!(!det_a(&tbl, m).unwrap().is_zero());
        }
        let l = tbl.l();
        for a in 1..=l {
            for b in 1..=l {
                prop_assert_eq!(tbl.h_coeff(a, b, 3).unwrap(), tbl.h_coeff(b, a, 3).unwrap());
                if a.abs_diff(b) >= 2 {
                    prop_assert!(tbl.h_coeff(a, b, 3).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn identities_are_gauge_covariant(tbl in table(), s in exponent()) {
        let moved = tbl.rescaled(s);
        for rep in [check_mutual_locality(&moved, 6), check_symmetry(&moved, 6), check_screening_relations(&moved, 6)] {
            prop_assert!(rep.passed, "{:?}", rep.failures);
        }
    }

    #[test]
    fn kernels_match_series_and_appendix_data(tbl in table(), ij in prop::sample::select(vec![(1u32, 1u32), (1, 2), (1, 3)])) {
        let opts = RelOptions { series_order: 6, ..RelOptions::default() };
        let rep = check_exchange(&tbl, ij.0, ij.1, &opts).unwrap();
        prop_assert!(rep.passed, "{:?}", rep.failures);
        let rep = check_appendix_data(&tbl, 3).unwrap();
        prop_assert!(rep.passed, "{:?}", rep.failures);
    }

    /// For `i = 1` the quadratic ledger is the closed-form exchange of each
    /// `Λ_l` with `T_j`, summed with weights.
    #[test]
    fn base_case_ledger_matches(tbl in table(), j in 1u32..=2) {
        let rep = check_quadratic(&tbl, 1, j, &RelOptions::default()).unwrap();
        prop_assert!(rep.passed, "{:?}", rep.failures);
        let closed: Vec<(i64, String, String)> = base_case_ledger(&tbl, j)
            .unwrap()
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((p, kind, out), v)| (p, format!("{kind} {out}"), v.to_string()))
            .collect();
        let ledger: Vec<(i64, String, String)> = rep
            .ledger
            .iter()
            .filter(|row| !row.lhs.is_zero())
            .map(|row| (row.point, format!("{} {}", row.kind, row.output), row.lhs.to_string()))
            .collect();
        let (mut a, mut b) = (closed, ledger);
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(config(8))]

    /// Permuting the Fock basis permutes matrix elements and nothing else.
    #[test]
    fn oracle_is_basis_order_invariant(tbl in table(), perm_seed in any::<u64>(), k in 1usize..=2, n in -2i64..=2) {
        let space = build_space(tbl.l(), 2);
        let mut order: Vec<usize> = (0..space.dim()).collect();
        let mut state = perm_seed;
        for i in (1..order.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (state >> 33) as usize % (i + 1));
        }
        let other = space.reordered(&order).unwrap();
        let k = k.min(tbl.l() + 1);
        let a = lambda_mode_matrix(&tbl, &space, k, n).unwrap();
        let b = lambda_mode_matrix(&tbl, &other, k, n).unwrap();
        for (r, rs) in space.states.iter().enumerate() {
            for (c, cs) in space.states.iter().enumerate() {
                let (r2, c2) = (other.position(rs).unwrap(), other.position(cs).unwrap());
                prop_assert_eq!(a.get(r, c), b.get(r2, c2));
            }
        }
    }
}
