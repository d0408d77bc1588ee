//! Named test functions: `constant:c`, `atom:r,c[,e]`, `poly:c0,c1,...`, `rational:NAME`.
//!
//! All of them depend on the first coordinate only. Atom centers sit on the
//! positive real axis; every norm in the crate is rotation invariant.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BallPoint;
use crate::scalar::{inv_pow, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rational {
    /// `1 / (2 − z)`.
    SimplePole,
    /// `(z − 1/2) / (1 − z/2)`.
    Blaschke,
    /// `1 / (1 + z²/4)`.
    PolePair,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction<T> {
    Constant(T),
    /// `c / (1 − r z)^e`; `e` defaults to 1.
    Atom { radius: T, coefficient: T, exponent: T },
    /// Coefficients in increasing degree.
    Poly(Vec<T>),
    Rational(Rational),
}

impl<T: Real> TestFunction<T> {
    pub fn eval(&self, z: &BallPoint<T>) -> C<T> {
        let w = z.z1();
        let one = C::new(T::one(), T::zero());
        match self {
            TestFunction::Constant(c) => C::new(*c, T::zero()),
            TestFunction::Atom { radius, coefficient, exponent } => inv_pow(one - w * *radius, *exponent) * *coefficient,
            TestFunction::Poly(cs) => cs.iter().rev().fold(C::new(T::zero(), T::zero()), |acc, &c| acc * w + c),
            TestFunction::Rational(r) => {
                let two = T::of(2.0);
                match r {
                    Rational::SimplePole => (one * two - w).inv(),
                    Rational::Blaschke => (w - one / two) / (one - w / two),
                    Rational::PolePair => (one + w * w / (two * two)).inv(),
                }
            }
        }
    }

    /// Points where the function peaks, for quadrature grading.
    pub fn foci(&self, n: usize) -> Vec<BallPoint<T>> {
        match self {
            TestFunction::Atom { radius, .. } => BallPoint::real(*radius, n).into_iter().collect(),
            _ => Vec::new(),
        }
    }

    pub fn as_fn(&self) -> impl Fn(&BallPoint<T>) -> C<T> + Sync + '_ {
        move |z| self.eval(z)
    }
}

fn num<T: Real>(s: &str) -> Result<T> {
    s.trim().parse::<f64>().map(T::of).map_err(|_| Error::domain(format!("cannot parse number {s:?}")))
}

impl<T: Real> FromStr for TestFunction<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s.split_once(':').ok_or_else(|| Error::domain(format!("test function {s:?} has no ':'")))?;
        let args: Vec<&str> = rest.split(',').filter(|x| !x.trim().is_empty()).collect();
        match head.trim() {
            "constant" if args.len() == 1 => Ok(TestFunction::Constant(num(args[0])?)),
            "atom" if args.len() == 2 || args.len() == 3 => {
                let radius: T = num(args[0])?;
                if !(radius >= T::zero() && radius < T::one()) {
                    return Err(Error::domain(format!("atom radius {radius} must lie in [0, 1)")));
                }
                let exponent = if args.len() == 3 { num(args[2])? } else { T::one() };
                Ok(TestFunction::Atom { radius, coefficient: num(args[1])?, exponent })
            }
            "poly" if !args.is_empty() => Ok(TestFunction::Poly(args.iter().map(|a| num(a)).collect::<Result<_>>()?)),
            "rational" if args.len() == 1 => match args[0].trim() {
                "simple_pole" => Ok(TestFunction::Rational(Rational::SimplePole)),
                "blaschke" => Ok(TestFunction::Rational(Rational::Blaschke)),
                "pole_pair" => Ok(TestFunction::Rational(Rational::PolePair)),
                other => Err(Error::domain(format!("unknown rational preset {other:?}"))),
            },
            _ => Err(Error::domain(format!("unrecognized test function {s:?}"))),
        }
    }
}

impl<T: Real> fmt::Display for TestFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Constant(c) => write!(f, "constant:{c}"),
            TestFunction::Atom { radius, coefficient, exponent } => write!(f, "atom:{radius},{coefficient},{exponent}"),
            TestFunction::Poly(cs) => {
                let parts: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            TestFunction::Rational(r) => {
                let name = match r {
                    Rational::SimplePole => "simple_pole",
                    Rational::Blaschke => "blaschke",
                    Rational::PolePair => "pole_pair",
                };
                write!(f, "rational:{name}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_eval() {
        let z = BallPoint::disc(C::new(0.3, 0.4)).unwrap();
        let c: TestFunction<f64> = "constant:3".parse().unwrap();
        assert_eq!(c.eval(&z), C::new(3.0, 0.0));
        let a: TestFunction<f64> = "atom:0.9,2".parse().unwrap();
        let expect = C::new(2.0, 0.0) / (C::new(1.0, 0.0) - z.z1() * 0.9);
        assert!((a.eval(&z) - expect).norm() < 1e-14);
        let p: TestFunction<f64> = "poly:1,0,-2".parse().unwrap();
        assert!((p.eval(&z) - (C::new(1.0, 0.0) - z.z1() * z.z1() * 2.0)).norm() < 1e-14);
        let b: TestFunction<f64> = "rational:blaschke".parse().unwrap();
        let u = BallPoint::disc(C::from_polar(0.999, 1.0)).unwrap();
        assert!((b.eval(&u).norm() - 1.0).abs() < 1e-2);
        assert!("atom:1.2,1".parse::<TestFunction<f64>>().is_err());
        assert!("wavelet:1".parse::<TestFunction<f64>>().is_err());
        for s in ["constant:3", "atom:0.9,1,2", "poly:1,2,3", "rational:pole_pair"] {
            let f: TestFunction<f64> = s.parse().unwrap();
            assert_eq!(f.to_string().parse::<TestFunction<f64>>().unwrap(), f);
        }
    }
}
