//! Laurent evaluation against a double-double reference evaluator.

use annulus_hardy::families::{random_interior_point, random_laurent, rng};
use annulus_hardy::Geometry;
use num_complex::Complex;
use proptest::prelude::*;

#[derive(Clone, Copy, Debug)]
struct Dd(f64, f64);

impl Dd {
    fn from(x: f64) -> Self {
        Dd(x, 0.0)
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.0 + o.0;
        let bb = s - self.0;
        let e = (self.0 - (s - bb)) + (o.0 - bb) + self.1 + o.1;
        let hi = s + e;
        Dd(hi, e - (hi - s))
    }

    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p) + self.0 * o.1 + self.1 * o.0;
        let hi = p + e;
        Dd(hi, e - (hi - p))
    }

    fn recip(self) -> Dd {
        let y = Dd::from(1.0 / self.0);
        // one Newton step: y + y(1 - xy)
        y.add(y.mul(Dd::from(1.0).add(self.mul(y).neg())))
    }

    fn value(self) -> f64 {
        self.0 + self.1
    }
}

#[derive(Clone, Copy)]
struct Cdd(Dd, Dd);

impl Cdd {
    fn from(z: Complex<f64>) -> Self {
        Cdd(Dd::from(z.re), Dd::from(z.im))
    }

    fn add(self, o: Cdd) -> Cdd {
        Cdd(self.0.add(o.0), self.1.add(o.1))
    }

    fn mul(self, o: Cdd) -> Cdd {
        Cdd(self.0.mul(o.0).add(self.1.mul(o.1).neg()), self.0.mul(o.1).add(self.1.mul(o.0)))
    }

    fn inv(self) -> Cdd {
        let d = self.0.mul(self.0).add(self.1.mul(self.1)).recip();
        Cdd(self.0.mul(d), self.1.neg().mul(d))
    }
}

fn reference(f: &annulus_hardy::Laurent, z: Complex<f64>) -> Complex<f64> {
    let (zd, wd) = (Cdd::from(z), Cdd::from(z).inv());
    let mut total = Cdd::from(Complex::new(0.0, 0.0));
    for (n, a) in f.terms() {
        let base = if n >= 0 { zd } else { wd };
        let mut term = Cdd::from(a);
        for _ in 0..n.unsigned_abs() {
            term = term.mul(base);
        }
        total = total.add(term);
    }
    Complex::new(total.0.value(), total.1.value())
}

fn magnitude(f: &annulus_hardy::Laurent, z: Complex<f64>) -> f64 {
    f.terms().map(|(n, a)| a.norm() * z.norm().powi(n)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn horner_matches_double_double(seed in any::<u64>(), s in 0.01f64..0.9, order in 0usize..24) {
        let geom = Geometry::new(s).unwrap();
        let mut gen = rng(seed);
        let f = random_laurent(&mut gen, geom, order);
        for _ in 0..8 {
            let z = random_interior_point(&mut gen, &geom, 0.0);
            let err = (f.eval(z).unwrap() - reference(&f, z)).norm();
            prop_assert!(err <= 1e-14 * (order as f64 + 1.0) * magnitude(&f, z), "err {err} at {z}");
        }
    }
}

#[test]
fn derivative_matches_double_double() {
    let geom = Geometry::new(0.3).unwrap();
    let mut gen = rng(5);
    for _ in 0..20 {
        let f = random_laurent(&mut gen, geom, 12).nth_derivative(2);
        for _ in 0..8 {
            let z = random_interior_point(&mut gen, &geom, 0.0);
            let err = (f.eval(z).unwrap() - reference(&f, z)).norm();
            assert!(err <= 1e-13 * magnitude(&f, z), "err {err}");
        }
    }
}
