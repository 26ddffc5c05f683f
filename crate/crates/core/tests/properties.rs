use num_rational::Rational64;
use proptest::prelude::*;
use psitile::distributions::{ErrorFamily, LocScaleMember};
use psitile::divergences::{hellinger_sq, kl_quadrature};
use psitile::function_classes::{rate_from_entropy, EntropyOrder};
use psitile::psi_tile::{empirical_psi_tile, psi_tile_of_density, psi_tile_shift, PsiSpec};

fn family() -> impl Strategy<Value = ErrorFamily> {
    prop_oneof![
        (0.1..0.9f64).prop_map(|t| ErrorFamily::ald(t).unwrap()),
        (0.1..0.9f64, 0.0..3.0f64).prop_map(|(t, a)| ErrorFamily::acdtg(t, a).unwrap()),
        (0.1..0.9f64).prop_map(|t| ErrorFamily::cnl(t).unwrap()),
        Just(ErrorFamily::cauchy()),
        (0.1..0.9f64).prop_map(|p| ErrorFamily::asym_normal(p).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quantile_inverts_cdf(f in family(), p in 0.01..0.99f64) {
        let z = f.std_quantile(p).unwrap();
        prop_assert!((f.std_cdf(z).unwrap() - p).abs() < 1e-9);
    }

    #[test]
    fn divergences_are_nonnegative(f in family(), eta in -1.5..1.5f64, sigma in 0.5..2.0f64) {
        prop_assert!(kl_quadrature(&f, eta, sigma).unwrap() >= -1e-12);
        let h = hellinger_sq(&f, eta, sigma).unwrap();
        prop_assert!((-1e-12..=2.0).contains(&h));
    }

    #[test]
    fn shift_identity_for_equivariant_generators(
        f in family(),
        level in 0.1..0.9f64,
        which in 0usize..3,
        mu in -1.0..1.0f64,
        sigma in 0.5..2.0f64,
    ) {
        let psi = match which {
            0 => PsiSpec::quantile(level).unwrap(),
            1 => PsiSpec::expectile(level).unwrap(),
            _ => PsiSpec::momentile(2, level).unwrap(),
        };
        let standard = LocScaleMember::standard(f.clone());
        match psi_tile_of_density(&standard, &psi) {
            Ok(t) => {
                let shifted = psi_tile_shift(&standard, &psi, mu, sigma).unwrap();
                prop_assert!((shifted - (mu + sigma * t)).abs() < 1e-9);
            }
            Err(_) => prop_assert!(which > 0 && f == ErrorFamily::cauchy()),
        }
    }

    #[test]
    fn empirical_tiles_are_affine_equivariant(
        xs in prop::collection::vec(-5.0..5.0f64, 1..60),
        level in 0.05..0.95f64,
        a in -3.0..3.0f64,
        b in 0.1..4.0f64,
    ) {
        let ys: Vec<f64> = xs.iter().map(|x| a + b * x).collect();
        for psi in [PsiSpec::quantile(level).unwrap(), PsiSpec::expectile(level).unwrap()] {
            let tx = empirical_psi_tile(&xs, &psi).unwrap();
            let ty = empirical_psi_tile(&ys, &psi).unwrap();
            prop_assert!((ty - (a + b * tx)).abs() < 1e-8 * (1.0 + ty.abs()));
        }
    }

    #[test]
    fn lipschitz_exponent_is_symbolic(num in 1i64..6, den in 1i64..4, d in 1u32..5) {
        let alpha = Rational64::new(num, den);
        let got = rate_from_entropy(&EntropyOrder::lipschitz(alpha, d).unwrap(), 1000).unwrap().exponent;
        let two = Rational64::from_integer(2);
        prop_assert_eq!(got, -two * alpha / (two * alpha + Rational64::from_integer(d as i64)));
    }
}
