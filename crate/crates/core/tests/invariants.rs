use faer::{c64, Mat};
use lindtop::config::{parse_spec, spec_to_toml};
use lindtop::density::{unvec, vec};
use lindtop::model::{Boundary, Dissipator, LatticeSpec, Sublattice};
use lindtop::oracle::compare_spectra;
use lindtop::spectra::{diagonalize, kblock_spectrum, pbc_spectrum_by_blocks, DEFAULT_N_K};
use lindtop::superop::{build_liouvillian_real, lattice_momentum};
use lindtop::Error;
use proptest::prelude::*;

fn sublattice() -> impl Strategy<Value = Sublattice> {
    prop_oneof![Just(Sublattice::A), Just(Sublattice::B)]
}

fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::Pbc), Just(Boundary::Obc), Just(Boundary::ObcEdgeDefect)]
}

fn spec_with(cells: usize, boundary: impl Strategy<Value = Boundary>) -> impl Strategy<Value = LatticeSpec> {
    let range = (cells as i64 - 1).min(2);
    let hopping = (-range..=range, 0.1f64..2.0, -1.0f64..1.0);
    let dissipator = (sublattice(), sublattice(), -range..=range, 0.1f64..2.0);
    (boundary, prop::collection::vec(hopping, 1..4), prop::collection::vec(dissipator, 1..4)).prop_map(
        move |(boundary, hoppings, dissipators)| {
            let mut spec = LatticeSpec::new(cells, boundary);
            for (s, re, im) in hoppings {
                spec = spec.with_hopping(s, c64::new(re, im));
            }
            for (a, b, s, g) in dissipators {
                spec = spec.with_dissipator(Dissipator::new(a, b, s, g));
            }
            spec
        },
    )
}

fn hermitian(n: usize, entries: &[(f64, f64)]) -> Mat<c64> {
    let a = Mat::<c64>::from_fn(n, n, |i, j| {
        let (re, im) = entries[(i * n + j) % entries.len()];
        c64::new(re, im * (i as f64 - j as f64))
    });
    Mat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generator_preserves_trace_and_hermiticity(
        spec in spec_with(3, boundary()),
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 7..13),
    ) {
        let sup = build_liouvillian_real(&spec).unwrap();
        let n = sup.hilbert_dim().unwrap();
        let x = hermitian(n, &entries);
        let out = unvec(&sup.apply(&vec(&x)), n);
        let tr: c64 = (0..n).map(|i| out[(i, i)]).sum();
        prop_assert!(tr.norm() < 1e-12);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((out[(i, j)] - out[(j, i)].conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spectrum_in_left_half_plane_and_closed_under_conjugation(spec in spec_with(3, boundary())) {
        let eig = diagonalize(&build_liouvillian_real(&spec).unwrap(), false).unwrap().eigenvalues;
        let scale = spec.total_rate() + spec.max_hopping();
        prop_assert!(eig.iter().all(|z| z.re <= 1e-10 * scale));
        let conj: Vec<c64> = eig.iter().map(|z| z.conj()).collect();
        prop_assert!(compare_spectra(&eig, &conj, 1e-7 * scale).max_error < 1e-9);
    }

    #[test]
    fn kblocks_reassemble_the_periodic_spectrum(spec in spec_with(3, Just(Boundary::Pbc))) {
        let direct = diagonalize(&build_liouvillian_real(&spec).unwrap(), false).unwrap().eigenvalues;
        let blocks: Vec<c64> = pbc_spectrum_by_blocks(&spec).unwrap().into_iter().map(|(z, _)| z).collect();
        let scale = spec.total_rate() + spec.max_hopping();
        let r = compare_spectra(&direct, &blocks, 1e-7 * scale);
        prop_assert!(r.multiplicities_match && r.max_error < 1e-9, "{r:?}");
    }

    // Only at lattice momenta does conjugation map the K grid onto the -K grid.
    #[test]
    fn block_at_minus_k_is_conjugate(spec in spec_with(4, Just(Boundary::Pbc)), m in 0usize..4) {
        let k = lattice_momentum(m, 4);
        let plus = kblock_spectrum(&spec, k).unwrap();
        let minus: Vec<c64> = kblock_spectrum(&spec, -k).unwrap().iter().map(|z| z.conj()).collect();
        let scale = spec.total_rate() + spec.max_hopping();
        prop_assert!(compare_spectra(&plus, &minus, 1e-7 * scale).max_error < 1e-9);
    }

    #[test]
    fn band_winding_is_scale_invariant(spec in spec_with(6, Just(Boundary::Pbc)), c in 0.05f64..20.0) {
        let mut scaled = spec.clone();
        scaled.hoppings.values_mut().for_each(|j| *j *= c);
        match (spec.winding_wh(DEFAULT_N_K), scaled.winding_wh(DEFAULT_N_K)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.value, b.value),
            (Err(Error::GapClosed { .. }), Err(Error::GapClosed { .. })) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn config_round_trip(spec in spec_with(5, boundary())) {
        prop_assert_eq!(parse_spec(&spec_to_toml(&spec)).unwrap(), spec);
    }
}
