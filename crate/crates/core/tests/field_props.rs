use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use proptest::prelude::*;

use grglue::{FieldSpec, Matrix, Scalar};

fn field() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(vec![0u64, 2, 3, 5, 7, 101, 65521]).prop_map(|p| if p == 0 { FieldSpec::rationals() } else { FieldSpec::prime(p).unwrap() })
}

fn scalar(f: FieldSpec) -> impl Strategy<Value = Scalar> {
    (-40i64..=40, 1i64..=12).prop_map(move |(n, d)| f.from_ratio(&BigInt::from(n), &BigInt::from(d)).unwrap_or_else(|_| f.from_i64(n)))
}

fn matrix(f: FieldSpec, rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3i64..=3, rows * cols).prop_map(move |v| {
        Matrix::from_rows(f, v.chunks(cols.max(1)).take(rows).map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect()).unwrap()
    })
}

fn well_formed(s: &Scalar) -> bool {
    match s {
        Scalar::Rational(r) => r.denom().is_positive() && r.numer().gcd(r.denom()) == BigInt::from(1) || r.numer() == &BigInt::from(0),
        Scalar::Residue { value, modulus } => value < modulus,
    }
}

proptest! {
    #[test]
    fn inverses((f, a) in field().prop_flat_map(|f| (Just(f), scalar(f)))) {
        prop_assert!(well_formed(&a));
        if a.is_zero() {
            prop_assert!(a.inv().is_err());
        } else {
            let i = a.inv().unwrap();
            prop_assert!(well_formed(&i));
            prop_assert_eq!(&a * &i, f.one());
        }
    }

    #[test]
    fn ring_laws((a, b, c) in field().prop_flat_map(|f| (scalar(f), scalar(f), scalar(f)))) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert!(well_formed(&(&a * &b)) && well_formed(&(&a - &c)));
    }

    #[test]
    fn rational_normal_form(n in -1000i64..1000, d in 1i64..1000, k in 1i64..50) {
        let f = FieldSpec::rationals();
        let a = f.from_ratio(&BigInt::from(n * k), &BigInt::from(d * k)).unwrap();
        let b = f.from_ratio(&BigInt::from(-n), &BigInt::from(-d)).unwrap();
        prop_assert!(well_formed(&a));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn planted_solutions(
        (a, s) in (field(), 1usize..6, 1usize..6).prop_flat_map(|(f, r, c)| (matrix(f, r, c), matrix(f, c, 1)))
    ) {
        let f = a.field();
        let b = a.mul(&s).unwrap();
        let sol = a.solve(&b).unwrap().expect("planted system is consistent");
        prop_assert_eq!(a.mul(&sol.particular).unwrap(), b.clone());
        prop_assert_eq!(sol.nullspace.len(), a.cols() - a.rank());
        for n in &sol.nullspace {
            prop_assert!(a.apply(n).iter().all(|x| x.is_zero()));
        }
        // bit-for-bit determinism
        prop_assert_eq!(a.solve(&b).unwrap(), Some(sol));
        let _ = f;
    }

    #[test]
    fn determinant_detects_invertibility(a in field().prop_flat_map(|f| (1usize..5).prop_flat_map(move |n| matrix(f, n, n)))) {
        let d = a.det().unwrap();
        match a.inverse() {
            Some(inv) => {
                prop_assert!(!d.is_zero());
                prop_assert!(a.mul(&inv).unwrap().is_identity());
                prop_assert_eq!(inv.det().unwrap(), d.inv().unwrap());
            }
            None => prop_assert!(d.is_zero()),
        }
    }
}

#[test]
fn non_primes_are_rejected() {
    for p in [0u64, 1, 4, 9, 91, 65535] {
        assert!(FieldSpec::prime(p).is_err(), "{p}");
    }
}
