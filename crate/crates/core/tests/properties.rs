use std::collections::HashMap;

use favard_core::catalog::{self, shipped_specs};
use favard_core::polyalg::canonical_sym_gram;
use favard_core::verify::random_direction;
use favard_core::*;
use proptest::prelude::*;
use rand::SeedableRng;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

/// Random polynomial in `dim` variables of total degree at most `deg`.
fn polynomial(dim: usize, deg: u32) -> impl Strategy<Value = Polynomial<Rational>> {
    let monos: Vec<MultiIndex> = (0..=deg)
        .flat_map(|n| enumerate_monomials(dim, n))
        .collect();
    proptest::collection::vec(rational(), monos.len())
        .prop_map(move |cs| Polynomial::from_terms(dim, monos.iter().cloned().zip(cs)))
}

fn invertible(d: usize) -> impl Strategy<Value = Matrix<Rational>> {
    proptest::collection::vec(rational(), d * d)
        .prop_map(move |v| Matrix::from_fn(d, d, |i, j| v[i * d + j].clone()))
        .prop_filter("invertible", move |m| m.rank(0.0) == d)
}

fn moments_of(spec: &MeasureSpec, degree: u32) -> MomentFunctional<Rational> {
    build_moments(spec, degree).unwrap()
}

// ---------- polyalg ----------

#[test]
fn symmetric_power_dimensions() {
    for d in 1..=4usize {
        for n in 0..=8u32 {
            let expected = binomial(n as u64 + d as u64 - 1, d as u64 - 1) as usize;
            assert_eq!(enumerate_monomials(d, n).len(), expected);
            assert_eq!(sym_dim(d, n), expected);
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

/// Symmetrization average of `e_{w_1} ⊗ … ⊗ e_{w_n}` as a dense tensor.
fn symmetrized(d: usize, word: &[usize]) -> Vec<Rational> {
    let n = word.len();
    let perms = permutations(n);
    let mut t = vec![q(0, 1); d.pow(n as u32)];
    let w = q(1, perms.len() as i64);
    for p in &perms {
        let idx = p.iter().fold(0, |acc, &k| acc * d + word[k]);
        t[idx] += &w;
    }
    t
}

#[test]
fn sym_gram_matches_brute_force() {
    for d in 1..=3usize {
        for n in 0..=4u32 {
            let basis = SymBasis::new(d, n);
            let vecs: Vec<Vec<Rational>> = basis
                .entries()
                .iter()
                .map(|m| symmetrized(d, &m.word()))
                .collect();
            let brute = Matrix::from_fn(basis.len(), basis.len(), |i, j| {
                vecs[i]
                    .iter()
                    .zip(&vecs[j])
                    .fold(q(0, 1), |acc, (a, b)| acc + a * b)
            });
            let s: Matrix<Rational> = canonical_sym_gram(&basis);
            assert_eq!(s, brute, "d={d} n={n}");
            assert!(s.diagonal_entries().iter().all(|x| *x > q(0, 1)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sym_lift_is_multiplicative(r in invertible(2), s in invertible(2), n in 0u32..=4) {
        let lrs = sym_lift(&(&r * &s), n, 0.0).unwrap();
        let prod = &sym_lift(&r, n, 0.0).unwrap() * &sym_lift(&s, n, 0.0).unwrap();
        prop_assert_eq!(lrs, prod);
    }

    #[test]
    fn sym_lift_is_multiplicative_in_three_dimensions(r in invertible(3), s in invertible(3), n in 0u32..=3) {
        let lrs = sym_lift(&(&r * &s), n, 0.0).unwrap();
        let prod = &sym_lift(&r, n, 0.0).unwrap() * &sym_lift(&s, n, 0.0).unwrap();
        prop_assert_eq!(lrs, prod);
    }

    #[test]
    fn sym_lift_of_inverse(r in invertible(2), n in 0u32..=4) {
        let inv = r.inverse(0.0).unwrap();
        let prod = &sym_lift(&r, n, 0.0).unwrap() * &sym_lift(&inv, n, 0.0).unwrap();
        prop_assert_eq!(prod, Matrix::identity(sym_dim(2, n)));
    }

    #[test]
    fn multiplication_commutes_and_associates(
        a in polynomial(2, 2), b in polynomial(2, 2), c in polynomial(2, 1)
    ) {
        prop_assert_eq!(poly_mul(&a, &b).unwrap(), poly_mul(&b, &a).unwrap());
        let left = poly_mul(&poly_mul(&a, &b).unwrap(), &c).unwrap();
        let right = poly_mul(&a, &poly_mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn degree_is_additive(a in polynomial(3, 2), b in polynomial(3, 2)) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        prop_assert_eq!(poly_mul(&a, &b).unwrap().degree(), a.degree() + b.degree());
    }
}

// ---------- moments ----------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inner_product_is_symmetric_and_positive(p in polynomial(2, 3), r in polynomial(2, 3)) {
        for named in shipped_specs().into_iter().filter(|s| s.spec.dimension == 2) {
            let m = moments_of(&named.spec, 6);
            prop_assert_eq!(inner(&p, &r, &m).unwrap(), inner(&r, &p, &m).unwrap());
            prop_assert!(inner(&p, &p, &m).unwrap() >= q(0, 1), "{}", named.name);
        }
    }

    #[test]
    fn one_dimensional_inner_products_are_positive(p in polynomial(1, 4)) {
        for named in catalog::one_dimensional() {
            let m = moments_of(&named.spec, 8);
            prop_assert!(inner(&p, &p, &m).unwrap() >= q(0, 1), "{}", named.name);
        }
    }

    #[test]
    fn multiplication_by_a_coordinate_is_symmetric(p in polynomial(2, 2), r in polynomial(2, 2), j in 0usize..2) {
        let m = moments_of(&catalog::gaussian_uniform(), 6);
        prop_assert_eq!(
            inner(&p.mul_var(j), &r, &m).unwrap(),
            inner(&p, &r.mul_var(j), &m).unwrap()
        );
    }

    #[test]
    fn product_measures_factorize(
        p in polynomial(1, 2), r in polynomial(1, 2), s in polynomial(1, 2), t in polynomial(1, 2)
    ) {
        let spec = catalog::gaussian_uniform();
        let m = moments_of(&spec, 8);
        let m1 = moments_of(&MeasureSpec::product(vec![FactorSpec::gaussian(0, 1)]), 4);
        let m2 = moments_of(&MeasureSpec::product(vec![FactorSpec::uniform(-1, 1)]), 4);
        let lift = |f: &Polynomial<Rational>, var: usize| {
            Polynomial::from_terms(2, f.terms().map(|(mi, c)| {
                let mut e = vec![0, 0];
                e[var] = mi.exponents()[0];
                (MultiIndex::new(e), c.clone())
            }))
        };
        let lhs = inner(
            &poly_mul(&lift(&p, 0), &lift(&r, 1)).unwrap(),
            &poly_mul(&lift(&s, 0), &lift(&t, 1)).unwrap(),
            &m,
        ).unwrap();
        let rhs = inner(&p, &s, &m1).unwrap() * inner(&r, &t, &m2).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

// ---------- ortho ----------

fn check_decomposition(spec: &MeasureSpec, n: usize) {
    let m = moments_of(spec, 2 * n as u32);
    let dec = decompose(&m, n).unwrap();
    for k in 0..=n {
        let level = dec.level(k);
        for (mono, qm) in level.basis().entries().iter().zip(level.polys()) {
            // monic: coefficient 1 on M, nothing else of degree k
            assert_eq!(qm.coeff(mono), q(1, 1));
            assert_eq!(qm.homogeneous(k as u32).len(), 1);
            assert_eq!(qm.degree(), k as i64);
            // orthogonal to every lower level element
            for lower in 0..k {
                for ql in dec.level(lower).polys() {
                    assert_eq!(inner(qm, ql, &m).unwrap(), q(0, 1));
                }
            }
        }
        // Gram is the brute-force inner product matrix and PSD
        for (i, a) in level.polys().iter().enumerate() {
            for (j, b) in level.polys().iter().enumerate() {
                assert_eq!(level.gram()[(i, j)], inner(a, b, &m).unwrap());
            }
        }
        assert!(Rational::psd_violation(level.gram(), 0.0).is_none());
    }
}

#[test]
fn decompositions_are_monic_orthogonal_and_psd() {
    for named in shipped_specs() {
        let n = if named.spec.dimension == 3 { 3 } else { 4 };
        check_decomposition(&named.spec, n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn within_level_order_does_not_matter(seed in any::<u64>(), which in 0usize..9) {
        let named = &shipped_specs()[which];
        let n = if named.spec.dimension == 3 { 3 } else { 4 };
        let m = moments_of(&named.spec, 2 * n as u32);
        let base = decompose(&m, n).unwrap();
        let shuffled = decompose_with_order(&m, n, |level, order| {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed ^ level as u64);
            rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        }).unwrap();
        for k in 0..=n {
            prop_assert_eq!(base.level(k).polys(), shuffled.level(k).polys());
            prop_assert_eq!(base.level(k).gram(), shuffled.level(k).gram());
        }
    }

    #[test]
    fn projection_reproduces_the_polynomial(p in polynomial(2, 3)) {
        let m = moments_of(&catalog::gaussian_uniform(), 6);
        let dec = decompose(&m, 3).unwrap();
        let coords = project_coeffs(&p, &dec).unwrap();
        prop_assert_eq!(dec.polynomial(&coords), p.clone());
        // filtration: components above deg p vanish
        for (k, c) in coords.iter().enumerate() {
            if k as i64 > p.degree() {
                prop_assert!(c.iter().all(|x| *x == q(0, 1)));
            }
        }
    }
}

// ---------- cap ----------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn creators_are_injective_for_random_directions(seed in any::<u64>()) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        for named in shipped_specs() {
            let n = if named.spec.dimension == 3 { 3 } else { 4 };
            let a = analyze_spec::<Rational>(&named.spec, n, 0.0).unwrap();
            for level in 0..n {
                let v = random_direction(&mut rng, named.spec.dimension);
                let rep = check_creator_injectivity(&a.cap, &v, level).unwrap();
                prop_assert!(rep.injective, "{} level {level}: {rep:?}", named.name);
            }
        }
    }
}

#[test]
fn centered_symmetric_products_have_no_preservation() {
    for spec in [
        catalog::gaussian2(),
        catalog::two_point2(),
        catalog::gaussian_uniform(),
    ] {
        let a = analyze_spec::<Rational>(&spec, 4, 0.0).unwrap();
        for level in a.cap.levels() {
            for j in 0..spec.dimension {
                assert_eq!(level.azero(j).max_abs(), 0.0);
            }
        }
    }
}

#[test]
fn quantum_decomposition_of_gaussian_uniform() {
    let a = analyze_spec::<Rational>(&catalog::gaussian_uniform(), 4, 0.0).unwrap();
    let rep = check_quantum_decomposition(&a.cap, &a.decomposition, &a.moments).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.max_deviation, 0.0);
}

#[test]
fn hermite_recurrence_at_level_two() {
    let a = analyze_spec::<Rational>(&catalog::gaussian(), 3, 0.0).unwrap();
    let q2 = a.decomposition.level(2).poly(0);
    let q3 = a.decomposition.level(3).poly(0);
    let q1 = a.decomposition.level(1).poly(0);
    assert_eq!(q2.mul_var(0), q3.add(&q1.scale(&q(2, 1))));
}

// ---------- fock ----------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn omega_form_is_the_pre_scalar_product(xi in proptest::collection::vec(rational(), 6),
                                            eta in proptest::collection::vec(rational(), 6)) {
        for named in shipped_specs().into_iter().filter(|s| s.spec.dimension == 2) {
            let a = analyze_spec::<Rational>(&named.spec, 3, 0.0).unwrap();
            for n in 0..=3 {
                let lvl = a.jacobi.level(n);
                let dim = lvl.basis().len();
                let (x, y) = (&xi[..dim], &eta[..dim]);
                let ux = lvl.un().mul_vec(x);
                let uy = lvl.un().mul_vec(y);
                let px = poly_at(&a, n, &ux);
                let py = poly_at(&a, n, &uy);
                prop_assert_eq!(lvl.omega().bilinear(x, y), inner(&px, &py, &a.moments).unwrap());
            }
        }
    }
}

fn poly_at(a: &Analysis<Rational>, n: usize, coords: &[Rational]) -> Polynomial<Rational> {
    let mut all = a.decomposition.zero_coords();
    all[n] = coords.to_vec();
    a.decomposition.polynomial(&all)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn random_basis_changes_are_covariant(r in invertible(2)) {
        for spec in [catalog::gaussian2(), catalog::two_point2(), catalog::triangle()] {
            let a = analyze_spec::<Rational>(&spec, 3, 0.0).unwrap();
            let jp = jacobi_in_basis(&a.moments, &r, 3).unwrap();
            for n in 0..=3 {
                let rep = check_basis_covariance(&a.jacobi, &jp, &r, n).unwrap();
                prop_assert!(rep.passed, "{rep:?}");
            }
        }
    }
}

#[test]
fn identity_basis_change_reproduces_the_data() {
    let a = analyze_spec::<Rational>(&catalog::gaussian_uniform(), 3, 0.0).unwrap();
    let jp = jacobi_in_basis(&a.moments, &Matrix::identity(2), 3).unwrap();
    for n in 0..=3 {
        assert_eq!(jp.level(n).omega(), a.jacobi.level(n).omega());
        assert_eq!(jp.level(n).alphas(), a.jacobi.level(n).alphas());
    }
}

#[test]
fn fock_creation_field_is_structural() {
    let a = analyze_spec::<Rational>(&catalog::gaussian2(), 2, 0.0).unwrap();
    let b = analyze_spec::<Rational>(&catalog::two_point2(), 2, 0.0).unwrap();
    for n in 0..2 {
        for j in 0..2 {
            assert_eq!(a.fields.fplus(j, n), b.fields.fplus(j, n));
        }
    }
    let f = a.fields.fplus(0, 0);
    assert_eq!(f.column(0), vec![q(1, 1), q(0, 1)]);
}

// ---------- favard1d ----------

#[test]
fn termination_propagates_through_products() {
    let recs = factor_recurrences::<Rational>(&catalog::two_point2(), 4, 0.0)
        .unwrap()
        .unwrap();
    for n in 0..=4 {
        let cf = product_jacobi_closed_form(&recs, n).unwrap();
        for (i, class) in cf.basis.entries().iter().enumerate() {
            let entry = &cf.omega[(i, i)];
            if class.exponents().iter().any(|&m| m > 1) {
                assert_eq!(*entry, q(0, 1), "class {class}");
            } else {
                assert!(*entry > q(0, 1));
            }
        }
    }
}

#[test]
fn stieltjes_agrees_with_brute_force_gram_schmidt() {
    for named in catalog::one_dimensional() {
        let m = moments_of(&named.spec, 12);
        let rec = stieltjes(&m.marginal(0), 6, 0.0).unwrap();
        let dec = decompose(&m, 6).unwrap();
        let norms: HashMap<usize, Rational> = (0..=6)
            .map(|n| (n, dec.level(n).gram()[(0, 0)].clone()))
            .collect();
        for n in 0..=6 {
            assert_eq!(rec.squared_norms[n], norms[&n], "{} level {n}", named.name);
        }
    }
}
