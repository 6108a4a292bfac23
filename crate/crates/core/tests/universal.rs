use ncdc_core::scalar::{int, Rational};
use ncdc_core::universal::{
    commutator_defect, k_fold_bullet_sign, leibniz_defect, u_bullet, u_d, u_mul, UniversalForm,
};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const S: usize = 4;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(2024)
}

#[test]
fn d_squared_vanishes() {
    let mut r = rng();
    for deg in 0..=2 {
        for _ in 0..20 {
            let f = UniversalForm::random(deg, S, &mut r, 5);
            assert!(u_d(&u_d(&f)).is_zero(), "degree {deg}");
        }
    }
}

#[test]
fn d_of_one_and_increments() {
    assert!(u_d(&UniversalForm::one(S)).is_zero());
    let mut r = rng();
    let f = UniversalForm::random(0, S, &mut r, 7);
    let df = u_d(&f);
    for a in 0..S {
        for b in 0..S {
            assert_eq!(*df.get(&[a, b]), f.get(&[b]) - f.get(&[a]));
        }
    }
}

#[test]
fn graded_leibniz() {
    let mut r = rng();
    for p in 0..=2 {
        for q in 0..=2 {
            for _ in 0..20 {
                let phi = UniversalForm::random(p, S, &mut r, 4);
                let psi = UniversalForm::random(q, S, &mut r, 4);
                assert!(leibniz_defect(&phi, &psi).unwrap().is_zero(), "degrees ({p},{q})");
            }
        }
    }
}

#[test]
fn leibniz_on_every_indicator_pair() {
    // Indicator forms span each space, so this is exhaustive by linearity.
    let ind = |deg: usize, k: usize| {
        let total = S.pow(deg as u32 + 1);
        let mut digits = vec![0; deg + 1];
        let mut m = k;
        for slot in digits.iter_mut().rev() {
            *slot = m % S;
            m /= S;
        }
        debug_assert!(k < total);
        UniversalForm::from_fn(deg, S, move |x| if x == digits.as_slice() { int(1) } else { Rational::zero() })
    };
    for (p, q) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        for i in 0..S.pow(p as u32 + 1) {
            for j in 0..S.pow(q as u32 + 1) {
                assert!(leibniz_defect(&ind(p, i), &ind(q, j)).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn bullet_is_commutative_and_associative() {
    let mut r = rng();
    for _ in 0..20 {
        let a = UniversalForm::random(1, S, &mut r, 5);
        let b = UniversalForm::random(1, S, &mut r, 5);
        let c = UniversalForm::random(1, S, &mut r, 5);
        assert_eq!(u_bullet(&a, &b).unwrap(), u_bullet(&b, &a).unwrap());
        let l = u_bullet(&u_bullet(&a, &b).unwrap(), &c).unwrap();
        let rr = u_bullet(&a, &u_bullet(&b, &c).unwrap()).unwrap();
        assert_eq!(l, rr);
    }
}

#[test]
fn exact_bullet_is_commutator() {
    let mut r = rng();
    for _ in 0..20 {
        let f = UniversalForm::random(0, S, &mut r, 5);
        let a = UniversalForm::random(1, S, &mut r, 5);
        assert!(commutator_defect(&f, &a).unwrap().is_zero());
    }
}

#[test]
fn functions_and_one_forms_do_not_commute() {
    let mut r = rng();
    let f = UniversalForm::random(0, S, &mut r, 5);
    let df = u_d(&f);
    let left = u_mul(&f, &df).unwrap();
    let right = u_mul(&df, &f).unwrap();
    assert_ne!(left, right);
}

#[test]
fn k_fold_sign_table() {
    let mut r = rng();
    let expected = [(2, -1), (3, 1), (4, -1)];
    for (k, s) in expected {
        for _ in 0..10 {
            let fs: Vec<_> = (0..k).map(|_| UniversalForm::random(0, S, &mut r, 6)).collect();
            let rep = k_fold_bullet_sign(&fs).unwrap();
            assert!(rep.nonzero_pairs > 0);
            assert_eq!(rep.sign, Some(s), "k = {k}");
            // Only odd k reproduce the unsigned increment product.
            assert_eq!(rep.matches_unsigned(), k % 2 == 1);
        }
    }
}

#[test]
fn triple_bullet_is_generically_nonzero() {
    let mut r = rng();
    let fs: Vec<_> = (0..3).map(|_| UniversalForm::random(0, S, &mut r, 6)).collect();
    let a = u_d(&fs[0]);
    let b = u_d(&fs[1]);
    let c = u_d(&fs[2]);
    assert!(!u_bullet(&u_bullet(&a, &b).unwrap(), &c).unwrap().is_zero());
}

#[test]
fn shape_mismatches_are_errors() {
    let a = UniversalForm::zero(1, 3);
    let b = UniversalForm::zero(1, 4);
    assert!(u_bullet(&a, &b).is_err());
    assert!(u_bullet(&UniversalForm::zero(0, 3), &a).is_err());
    assert!(u_mul(&a, &b).is_err());
    assert!(k_fold_bullet_sign(&[UniversalForm::zero(0, 3)]).is_err());
}
