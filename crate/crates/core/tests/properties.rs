use proptest::prelude::*;
use rug::{Complex, Float};

use lavrik_core::lambda::{lambda, verify_decomposition, EvalPoint};
use lavrik_core::theta::theta_functional_check;
use lavrik_core::PrecisionContext;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(128).unwrap()
}

fn abs(z: &Complex) -> Float {
    Float::with_val(64, z.abs_ref())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn theta_functional_equation(x in 0.2f64..5.0, y in -2.0f64..2.0) {
        let c = ctx();
        let r = theta_functional_check(&Complex::with_val(128, (x, y)), &c).unwrap();
        prop_assert!(r < c.eps(), "residual {r} at {x}+{y}i");
    }

    #[test]
    fn lambda_conjugate_symmetry(sigma in -3.0f64..4.0, t in 0.2f64..30.0, tau in 0.3f64..3.0) {
        let c = ctx();
        let tau = Complex::with_val(128, (tau, 0.0));
        let up = lambda(&EvalPoint::new(Complex::with_val(128, (sigma, t)), tau.clone()).unwrap(), &c).unwrap().complex();
        let down = lambda(&EvalPoint::new(Complex::with_val(128, (sigma, -t)), tau).unwrap(), &c).unwrap().complex();
        let d = Complex::with_val(128, &up - Complex::with_val(128, down.conj_ref()));
        prop_assert!(abs(&d) <= abs(&up) * c.eps() * 16u32);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn decomposition_with_complex_tau(
        sigma in -2.0f64..3.0,
        t in 0.3f64..25.0,
        tr in 0.25f64..4.0,
        ti in -1.5f64..1.5,
    ) {
        let c = ctx();
        let p = EvalPoint::new(Complex::with_val(128, (sigma, t)), Complex::with_val(128, (tr, ti))).unwrap();
        let r = verify_decomposition(&p, &c).unwrap();
        prop_assert!(r < Float::with_val(64, c.eps() * 10u32), "residual {r}");
    }
}
