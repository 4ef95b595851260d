use crate::error::Result;
use crate::expr::Expression;
use crate::numeric::finite_difference;

/// A real function on [0, 1] that can be sampled, with optional exact
/// derivatives. The default derivative is a fourth-order finite difference.
pub trait RealFunction {
    fn eval(&self, x: f64) -> Result<f64>;

    fn eval_derivative(&self, order: usize, x: f64) -> Result<f64> {
        finite_difference(|y| self.eval(y), order, x)
    }
}

impl<F: Fn(f64) -> f64> RealFunction for F {
    fn eval(&self, x: f64) -> Result<f64> {
        Ok(self(x))
    }
}

impl RealFunction for Expression {
    fn eval(&self, x: f64) -> Result<f64> {
        Expression::eval(self, x)
    }
}

/// A function given together with all of its derivatives:
/// `f(k, x)` is the k-th derivative at `x`.
pub struct WithDerivatives<F>(pub F);

impl<F: Fn(usize, f64) -> f64> RealFunction for WithDerivatives<F> {
    fn eval(&self, x: f64) -> Result<f64> {
        Ok((self.0)(0, x))
    }

    fn eval_derivative(&self, order: usize, x: f64) -> Result<f64> {
        Ok((self.0)(order, x))
    }
}

/// `x^μ` with its exact derivatives.
pub fn power_function(mu: f64) -> WithDerivatives<impl Fn(usize, f64) -> f64> {
    WithDerivatives(move |k: usize, x: f64| {
        let mut c = 1.0;
        for i in 0..k {
            c *= mu - i as f64;
        }
        if c == 0.0 {
            0.0
        } else {
            c * x.powf(mu - k as f64)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closures_and_expressions_share_the_trait() {
        let f = |x: f64| x * x;
        assert_eq!(RealFunction::eval(&f, 3.0).unwrap(), 9.0);
        assert!((f.eval_derivative(1, 0.5).unwrap() - 1.0).abs() < 1e-10);
        let e = Expression::parse("x^3").unwrap();
        assert!((e.eval_derivative(2, 0.5).unwrap() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn power_function_derivatives() {
        let p = power_function(2.5);
        assert_eq!(p.eval(4.0).unwrap(), 32.0);
        assert_eq!(p.eval_derivative(1, 4.0).unwrap(), 2.5 * 8.0);
        let q = power_function(1.0);
        assert_eq!(q.eval_derivative(2, 0.0).unwrap(), 0.0);
    }
}
