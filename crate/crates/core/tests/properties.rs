use std::sync::Arc;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use ruq::battery::random_module;
use ruq::format::{module_to_json, parse_module};
use ruq::hom_ext::{hom_direct, hom_via_limit};
use ruq::modp;
use ruq::outcyc::free_module;
use ruq::rep_ring::{mul, restrict_sub, transfer, RUElement};
use ruq::{QMatrix, Rat, SupportSet};

fn big(x: &Rat) -> BigRational {
    x.to_big()
}

fn rat() -> impl Strategy<Value = Rat> {
    prop_oneof![
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rat::new(n, d)),
        (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| Rat::new(n, d)),
    ]
}

fn matrix(max: usize) -> impl Strategy<Value = QMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec((-3i64..=3, 1i64..=2).prop_map(|(n, d)| Rat::new(n, d)), r * c)
            .prop_map(move |v| QMatrix::from_vec(r, c, v).unwrap())
    })
}

proptest! {
    #[test]
    fn arithmetic_matches_bigrational(a in rat(), b in rat()) {
        prop_assert_eq!(big(&(a.clone() + b.clone())), big(&a) + big(&b));
        prop_assert_eq!(big(&(a.clone() - b.clone())), big(&a) - big(&b));
        prop_assert_eq!(big(&(a.clone() * b.clone())), big(&a) * big(&b));
        if !b.is_zero() {
            prop_assert_eq!(big(&(a.clone() * b.recip().unwrap())), big(&a) / big(&b));
        }
        prop_assert_eq!(a.cmp(&b), big(&a).cmp(&big(&b)));
        prop_assert_eq!(a.to_string().parse::<Rat>().unwrap(), a.clone());
        let f = big(&a).to_f64().unwrap();
        prop_assert!((a.to_f64() - f).abs() <= f.abs() * 1e-12);
    }

    #[test]
    fn rank_nullity(m in matrix(7)) {
        let r = m.rank_exact();
        let k = m.kernel_basis();
        prop_assert_eq!(r + k.cols(), m.cols());
        prop_assert!(m.mul(&k).unwrap().is_zero());
        prop_assert_eq!(m.rank(), r);
        prop_assert_eq!(m.transpose().rank_exact(), r);
    }

    #[test]
    fn modular_rank_is_a_lower_bound(m in matrix(9)) {
        let p = modp::dense_rank(&m).unwrap();
        prop_assert!(p <= m.rank_exact());
    }

    #[test]
    fn rref_is_idempotent(m in matrix(6)) {
        let (r, pivots) = m.rref();
        let (rr, pivots2) = r.rref();
        prop_assert_eq!(&rr, &r);
        prop_assert_eq!(pivots.len(), m.rank_exact());
        prop_assert_eq!(pivots, pivots2);
        prop_assert!(m.transpose().same_column_span(&r.transpose()));
    }

    #[test]
    fn inverse_is_two_sided(m in matrix(5)) {
        if let Some(inv) = m.inverse() {
            prop_assert!(m.mul(&inv).unwrap().is_identity());
            prop_assert!(inv.mul(&m).unwrap().is_identity());
        } else {
            prop_assert!(m.rows() != m.cols() || m.rank_exact() < m.rows());
        }
    }

    #[test]
    fn projection_formula(n in 1u64..=36, k in 0usize..8, a in proptest::collection::vec(-4i64..=4, 36), b in proptest::collection::vec(-4i64..=4, 36)) {
        let divs: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        let d = divs[k % divs.len()];
        let a = RUElement::from_ints(n, &a[..n as usize]).unwrap();
        let b = RUElement::from_ints(d, &b[..d as usize]).unwrap();
        let lhs = transfer(d, n, &mul(&restrict_sub(n, d, &a).unwrap(), &b).unwrap()).unwrap();
        let rhs = mul(&a, &transfer(d, n, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_modules_round_trip_through_json(seed in any::<u64>()) {
        let s = SupportSet::divisors_of(12).unwrap();
        let m = random_module(&s, seed).unwrap();
        prop_assert!(m.is_valid());
        let text = serde_json::to_string(&module_to_json(&m)).unwrap();
        prop_assert_eq!(parse_module(&text).unwrap(), m);
    }

    #[test]
    fn yoneda_and_hom_oracles(seed in any::<u64>(), pick in 0usize..6) {
        let s = SupportSet::divisors_of(12).unwrap();
        let y = Arc::new(random_module(&s, seed).unwrap());
        let d = s.members()[pick];
        let free = Arc::new(free_module(d, &s).unwrap());
        prop_assert_eq!(hom_direct(&free, &y).unwrap().dim(), y.dim(d));
        let reg = Arc::new(ruq::outcyc::regular_module(&s));
        let direct = hom_direct(&y, &reg).unwrap();
        prop_assert!(direct.same_span(&hom_via_limit(&y).unwrap().0));
    }
}
