use std::sync::Mutex;

use super::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::exactfield::Poly;

/// Memoized division polynomials in the reduced form `ψ_n = f_n` (n odd),
/// `ψ_n = 2y·f_n` (n even), so every `f_n` is a polynomial in `x` alone.
pub struct DivisionPolynomials {
    curve: WeierstrassCurve,
    f: Mutex<Vec<Poly>>,
}

impl DivisionPolynomials {
    pub fn new(curve: &WeierstrassCurve) -> DivisionPolynomials {
        let fl = curve.field().clone();
        let (a, b) = (curve.a.clone(), curve.b.clone());
        let c = |v: i64| fl.int(v);
        let f3 = Poly::new(
            &fl,
            vec![-&a.square(), &c(12) * &b, &c(6) * &a, fl.zero(), c(3)],
        );
        let f4 = Poly::new(
            &fl,
            vec![
                &c(2) * &(&(&c(-8) * &b.square()) - &a.pow(3)),
                &c(-8) * &(&a * &b),
                &c(-10) * &a.square(),
                &c(40) * &b,
                &c(10) * &a,
                fl.zero(),
                c(2),
            ],
        );
        let base = vec![
            Poly::zero(&fl),
            Poly::constant(fl.one()),
            Poly::constant(fl.one()),
            f3,
            f4,
        ];
        DivisionPolynomials {
            curve: curve.clone(),
            f: Mutex::new(base),
        }
    }

    /// `x³ + ax + b` as a polynomial.
    pub fn cubic(&self) -> Poly {
        let fl = self.curve.field();
        Poly::new(
            fl,
            vec![
                self.curve.b.clone(),
                self.curve.a.clone(),
                fl.zero(),
                fl.one(),
            ],
        )
    }

    /// The reduced polynomial `f_n`.
    pub fn reduced(&self, n: usize) -> Poly {
        let mut f = self.f.lock().expect("division polynomial cache poisoned");
        let cubic = self.cubic();
        let fl = self.curve.field().clone();
        let sixteen_f2 = cubic.square().scale(&fl.int(16));
        while f.len() <= n {
            let k = f.len();
            let m = k / 2;
            let next = if k % 2 == 1 {
                let t1 = &f[m + 2] * &(&f[m] * &f[m].square());
                let t2 = &f[m - 1] * &(&f[m + 1] * &f[m + 1].square());
                if m.is_multiple_of(2) {
                    &(&sixteen_f2 * &t1) - &t2
                } else {
                    &t1 - &(&sixteen_f2 * &t2)
                }
            } else {
                let inner = &(&f[m + 2] * &f[m - 1].square()) - &(&f[m - 2] * &f[m + 1].square());
                &f[m] * &inner
            };
            f.push(next);
        }
        f[n].clone()
    }

    /// `ψ_n²` as a polynomial in `x`.
    pub fn psi_squared(&self, n: usize) -> Poly {
        let fn_ = self.reduced(n);
        if n.is_multiple_of(2) {
            &self.cubic().scale(&self.curve.field().int(4)) * &fn_.square()
        } else {
            fn_.square()
        }
    }
}

/// `ψ_n²(x)`, of degree `n² − 1` with leading coefficient `n²`.
pub fn division_polynomial_sq(c: &WeierstrassCurve, n: usize) -> Result<Poly> {
    if n == 0 {
        return Err(Error::PreconditionViolation("n must be positive".into()));
    }
    let p = c.field().characteristic();
    if p != 0 && (n as u64).is_multiple_of(p) {
        return Err(Error::BadCharacteristic(n as u64));
    }
    Ok(DivisionPolynomials::new(c).psi_squared(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurvePoint;
    use std::collections::BTreeSet;

    #[test]
    fn small_cases() {
        let c = WeierstrassCurve::over_prime(103, 3, 5, 11).unwrap();
        let f = c.field().clone();
        assert_eq!(
            division_polynomial_sq(&c, 1).unwrap(),
            Poly::constant(f.one())
        );
        let psi2 = division_polynomial_sq(&c, 2).unwrap();
        let expect = Poly::new(&f, vec![f.int(44), f.int(20), f.zero(), f.int(4)]);
        assert_eq!(psi2, expect);
        assert!(matches!(
            division_polynomial_sq(&c, 103),
            Err(Error::BadCharacteristic(_))
        ));
    }

    #[test]
    fn degrees_and_leading_coefficients() {
        let c = WeierstrassCurve::over_prime(10009, 3, 2, 9).unwrap();
        let d = DivisionPolynomials::new(&c);
        for n in 1..=12usize {
            let s = d.psi_squared(n);
            assert_eq!(s.degree(), Some(n * n - 1), "n = {n}");
            assert_eq!(s.leading(), c.field().int((n * n) as i64));
        }
    }

    #[test]
    fn roots_are_torsion_abscissae() {
        // Brute force over E(F_p): x-coordinates of points with [n]P = O.
        for (p, a, b) in [(37u64, 2i64, 3i64), (43, 1, 5), (61, 7, 2)] {
            let c = WeierstrassCurve::over_prime(p, 3, a, b).unwrap();
            let pts = c.affine_points();
            let d = DivisionPolynomials::new(&c);
            for n in 2..=6usize {
                let psi = d.psi_squared(n);
                let roots: BTreeSet<_> = c
                    .field()
                    .elements()
                    .filter(|x| psi.eval(x).is_zero())
                    .collect();
                let brute: BTreeSet<_> = pts
                    .iter()
                    .filter(|q| c.mul(n as i64, q) == CurvePoint::Identity)
                    .map(|q| q.coords().unwrap().0.clone())
                    .collect();
                // Rational roots may also come from torsion points defined over F_{p²};
                // every rational torsion abscissa must be a root.
                assert!(brute.is_subset(&roots), "p={p} n={n}");
                for x in &roots {
                    if c.rhs(x).is_square() {
                        assert!(brute.contains(x), "p={p} n={n}");
                    }
                }
            }
        }
    }
}
