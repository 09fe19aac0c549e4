use lcp_core::admissibility::{block_decompose, density_check, flat_subspace, modulus_classes, rational_hull, similarity_certificate, FlatOptions};
use lcp_core::linalg::{char_poly, rat, Lattice, Rat, RatMatrix};
use lcp_core::numfield::{FormalVector, NFVector, NumberField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Monic irreducible polynomials, lowest coefficient first.
const BLOCKS: [&[i64]; 6] = [&[-2, 1], &[1, 1], &[1, -3, 1], &[-1, -4, 1], &[1, 0, 1], &[-1, -1, 0, 1]];

const LOOSE: FlatOptions = FlatOptions { require_every_block: false };

fn companion(c: &[i64]) -> RatMatrix {
    let n = c.len() - 1;
    RatMatrix::from_fn(n, n, |i, j| if j == n - 1 { rat(-c[i]) } else if i == j + 1 { rat(1) } else { rat(0) })
}

fn block_diag(blocks: &[RatMatrix]) -> RatMatrix {
    let n = blocks.iter().map(RatMatrix::rows).sum();
    let mut m = RatMatrix::zero(n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m.set(off + i, off + j, b.get(i, j).clone());
            }
        }
        off += b.rows();
    }
    m
}

fn unimodular(p: usize, rng: &mut ChaCha8Rng) -> RatMatrix {
    let mut m = RatMatrix::identity(p);
    if p < 2 {
        return m;
    }
    for _ in 0..2 * p {
        let i = rng.gen_range(0..p);
        let j = (i + rng.gen_range(1..p)) % p;
        let mut e = RatMatrix::identity(p);
        e.set(i, j, rat(rng.gen_range(-1..=1)));
        m = m.mul(&e);
    }
    m
}

fn conjugate(m: &RatMatrix, u: &RatMatrix) -> RatMatrix {
    u.mul(m).mul(&u.inverse().unwrap())
}

fn same_lattice(a: &Lattice, b: &Lattice) -> bool {
    a.is_sublattice_of(b) && b.is_sublattice_of(a)
}

fn rational_vectors(count: usize, p: usize, rng: &mut ChaCha8Rng) -> Vec<FormalVector> {
    let q = NumberField::rationals();
    (0..count).map(|_| FormalVector::plain(NFVector::from_rats(&q, &(0..p).map(|_| rat(rng.gen_range(-4..=4))).collect::<Vec<Rat>>()))).collect()
}

/// `A0` next to a second block, conjugated into a random integral basis.
fn hyperbolic(rng: &mut ChaCha8Rng) -> RatMatrix {
    let a0 = RatMatrix::from_i64(&[&[1, 1], &[1, 2]]);
    let extra = [RatMatrix::from_i64(&[&[1]]), RatMatrix::from_i64(&[&[-1]]), companion(&[1, 0, 1]), RatMatrix::from_i64(&[&[2, 1], &[1, 1]])][rng.gen_range(0..4)].clone();
    let m = block_diag(&[a0, extra]);
    conjugate(&m, &unimodular(m.rows(), rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn blocks_reassemble(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picked: Vec<RatMatrix> = (0..rng.gen_range(1..=3)).map(|_| companion(BLOCKS[rng.gen_range(0..BLOCKS.len())])).collect();
        let m = block_diag(&picked);
        let a = conjugate(&m, &unimodular(m.rows(), &mut rng));
        let d = block_decompose(&a).unwrap();
        prop_assert_eq!(d.reassemble(), a.clone());
        let c = &d.change_of_basis;
        prop_assert!(c.is_integral());
        prop_assert_eq!(c.inverse().unwrap().mul(&a).mul(c), d.block_diagonal());
        let chi = char_poly(&a).unwrap();
        for b in &d.blocks {
            let f = char_poly(&b.matrix).unwrap();
            prop_assert!(chi.rem(&f).is_zero());
            prop_assert!(f.rem(&b.poly.to_q()).is_zero());
        }
    }

    #[test]
    fn flat_subspaces_are_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = hyperbolic(&mut rng);
        let top = modulus_classes(&a).unwrap().remove(0);
        let s = flat_subspace(&a, &top, LOOSE).unwrap().splitting;
        prop_assert!(s.restrict_eq(&a).is_some());
        prop_assert!(s.preserves_epq(&a));
        prop_assert_eq!(s.basis_eq.len() + s.basis_epq.len(), a.rows());
    }

    #[test]
    fn hull_is_idempotent_and_monotone(seed in any::<u64>(), p in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = rational_vectors(rng.gen_range(1..p), p, &mut rng);
        let h = rational_hull(&v).unwrap();
        if h.rank() > 0 {
            let again = rational_hull(&rational_vectors_from(&h)).unwrap();
            prop_assert!(same_lattice(&h, &again));
        }
        let mut w = v.clone();
        w.extend(rational_vectors(rng.gen_range(1..=2), p, &mut rng));
        prop_assert!(h.is_sublattice_of(&rational_hull(&w).unwrap()));
    }

    #[test]
    fn density_survives_unimodular_changes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = hyperbolic(&mut rng);
        let top = modulus_classes(&a).unwrap().remove(0);
        let eq = flat_subspace(&a, &top, LOOSE).unwrap().splitting.basis_eq;
        let u = unimodular(a.rows(), &mut rng);
        let moved: Vec<FormalVector> = eq.iter().map(|v| v.apply(&u)).collect();
        let (before, after) = (density_check(&eq).unwrap(), density_check(&moved).unwrap());
        prop_assert_eq!(before.dense, after.dense);
        prop_assert_eq!(before.hull.rank(), after.hull.rank());
    }

    #[test]
    fn ratios_multiply(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = hyperbolic(&mut rng);
        let top = modulus_classes(&a).unwrap().remove(0);
        let s = flat_subspace(&a, &top, LOOSE).unwrap().splitting;
        let (i, j) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let gens = [a.pow(i), a.pow(j), a.pow(i + j)];
        let cert = similarity_certificate(&gens, &s, None).unwrap();
        let product = cert.ratios[0].mul(&cert.ratios[1]).unwrap();
        prop_assert!(product.squared == cert.ratios[2].squared);
    }
}

fn rational_vectors_from(l: &Lattice) -> Vec<FormalVector> {
    let q = NumberField::rationals();
    l.basis_vectors().iter().map(|v| FormalVector::plain(NFVector::from_rats(&q, v))).collect()
}
