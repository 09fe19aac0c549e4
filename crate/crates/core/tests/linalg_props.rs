use lcp_core::linalg::{char_poly, factor_over_z, hnf, matrix_order, quotient_order, rat, snf, Lattice, MatrixOrder, PolyZ, Rat, RatMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn int_matrix(rows: usize, cols: usize, range: i64, rng: &mut ChaCha8Rng) -> RatMatrix {
    RatMatrix::from_fn(rows, cols, |_, _| rat(rng.gen_range(-range..=range)))
}

fn unimodular(p: usize, rng: &mut ChaCha8Rng) -> RatMatrix {
    let mut m = RatMatrix::identity(p);
    for _ in 0..2 * p {
        let i = rng.gen_range(0..p);
        let j = (i + rng.gen_range(1..p)) % p;
        let mut e = RatMatrix::identity(p);
        e.set(i, j, rat(rng.gen_range(-2..=2)));
        m = m.mul(&e);
    }
    m
}

fn is_unimodular(u: &RatMatrix) -> bool {
    u.is_integral() && u.det().abs().is_one()
}

fn primes_of(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            out.push(p.clone());
            while n.is_multiple_of(&p) {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hnf_reconstructs(seed in any::<u64>(), rows in 1usize..=6, cols in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = int_matrix(rows, cols, 30, &mut rng);
        let (h, u) = hnf(&m).unwrap();
        prop_assert_eq!(u.mul(&m), h.clone());
        prop_assert!(is_unimodular(&u));
        let mut last = None;
        for i in 0..h.rows() {
            if let Some(j) = (0..h.cols()).find(|&j| !h.get(i, j).is_zero()) {
                prop_assert!(h.get(i, j).is_positive());
                prop_assert!(last.map_or(true, |l| j > l));
                prop_assert!((0..i).all(|k| !h.get(k, j).is_negative() && h.get(k, j) < h.get(i, j)));
                last = Some(j);
            } else {
                prop_assert!((i..h.rows()).all(|k| (0..h.cols()).all(|j| h.get(k, j).is_zero())));
            }
        }
    }

    #[test]
    fn snf_reconstructs(seed in any::<u64>(), rows in 1usize..=6, cols in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = int_matrix(rows, cols, 30, &mut rng);
        let (d, u, v) = snf(&m).unwrap();
        prop_assert_eq!(u.mul(&m).mul(&v), d.clone());
        prop_assert!(is_unimodular(&u) && is_unimodular(&v));
        let k = rows.min(cols);
        for i in 0..rows {
            for j in 0..cols {
                prop_assert!(i == j || d.get(i, j).is_zero());
            }
        }
        for i in 1..k {
            let (a, b) = (d.get(i - 1, i - 1).to_integer(), d.get(i, i).to_integer());
            prop_assert!(!a.is_negative());
            let divides = if a.is_zero() { b.is_zero() } else { b.is_multiple_of(&a) };
            prop_assert!(divides);
        }
    }

    #[test]
    fn factorization_multiplies_out(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = PolyZ::from_i64(&[rng.gen_range(1..=6)]);
        for _ in 0..rng.gen_range(1..=3) {
            let deg = rng.gen_range(1..=3);
            let mut c: Vec<i64> = (0..deg).map(|_| rng.gen_range(-4..=4)).collect();
            c.push(rng.gen_range(1..=2));
            p = p.mul(&PolyZ::from_i64(&c));
        }
        let f = factor_over_z(&p).unwrap();
        prop_assert_eq!(f.expand(), p);
        prop_assert!(f.factors.iter().all(|(g, _)| g.is_primitive() && g.leading().is_positive()));
    }

    #[test]
    fn cayley_hamilton(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = int_matrix(n, n, 9, &mut rng);
        let chi = char_poly(&a).unwrap();
        prop_assert_eq!(chi.deg(), n);
        prop_assert!(chi.eval_matrix(&a).is_zero());
    }

    #[test]
    fn quotient_order_is_least(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gens = int_matrix(n, n, 6, &mut rng);
        while gens.det().is_zero() {
            gens = int_matrix(n, n, 6, &mut rng);
        }
        let gamma = Lattice::from_generators(n, &gens.row_vecs()).unwrap();
        let full = Lattice::full(n);
        let v: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(-10..=10))).collect();
        let r = quotient_order(&gamma, &full, &v).unwrap();
        let scaled = |k: &BigInt| -> Vec<Rat> { v.iter().map(|x| x * Rat::from_integer(k.clone())).collect() };
        prop_assert!(r.is_positive());
        prop_assert!(gamma.contains(&scaled(&r)));
        for s in primes_of(&r) {
            prop_assert!(!gamma.contains(&scaled(&(&r / &s))));
        }
    }

    #[test]
    fn finite_orders_are_exact(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let signed = RatMatrix::from_fn(n, n, |i, j| if perm[i] == j { rat(if rng.gen_bool(0.5) { 1 } else { -1 }) } else { rat(0) });
        let u = unimodular(n, &mut rng);
        let a = u.mul(&signed).mul(&u.inverse().unwrap());
        match matrix_order(&a).unwrap() {
            MatrixOrder::Finite(k) => {
                prop_assert!(a.pow(k).is_identity());
                for j in 1..k {
                    prop_assert!(!a.pow(j).is_identity());
                }
            }
            MatrixOrder::Infinite => prop_assert!(false, "signed permutations have finite order"),
        }
    }

    #[test]
    fn hyperbolic_orders_are_infinite(a in 1i64..6, b in 1i64..6) {
        let m = RatMatrix::from_i64(&[&[a * b + 1, a], &[b, 1]]);
        prop_assert_eq!(matrix_order(&m).unwrap(), MatrixOrder::Infinite);
        prop_assert!(m.det().to_i64() == Some(1));
    }
}
