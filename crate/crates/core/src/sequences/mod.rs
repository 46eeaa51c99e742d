//! Coefficient models for complex Jacobi matrices.
//!
//! [`CoefficientModel`] describes `(a_n, b_n)` declaratively; [`Jacobi`]
//! wraps a model with a growable cache so that transfer products and Turán
//! traces, which revisit indices heavily, evaluate each index once.

pub(crate) mod cplx;
mod expr;
mod model;

use std::sync::RwLock;

use num_complex::Complex64;

pub use expr::Expr;
pub use model::{blend_coeff, perturbed_coeff, CoefficientModel, ModelFile, PeriodicPair};

use crate::error::{Error, Result};

/// Indices beyond this are evaluated directly instead of cached.
const CACHE_LIMIT: usize = 1 << 21;

/// A validated coefficient model with a shared evaluation cache.
#[derive(Debug)]
pub struct Jacobi {
    model: CoefficientModel,
    cache: RwLock<Vec<(Complex64, Complex64)>>,
}

impl Clone for Jacobi {
    fn clone(&self) -> Self {
        Self {
            model: self.model.clone(),
            cache: RwLock::new(self.cache.read().expect("cache lock").clone()),
        }
    }
}

impl Jacobi {
    pub fn new(model: CoefficientModel) -> Result<Self> {
        model.validate()?;
        Ok(Self {
            model,
            cache: RwLock::new(Vec::new()),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        Self::new(file.model)
    }

    pub fn model(&self) -> &CoefficientModel {
        &self.model
    }

    pub fn period(&self) -> usize {
        self.model.period()
    }

    /// `(a_n, b_n)`; fails with `ZeroOffDiagonal` when `a_n = 0`.
    pub fn coeff(&self, n: usize) -> Result<(Complex64, Complex64)> {
        let (a, b) = self.cached(n)?;
        if a == Complex64::new(0.0, 0.0) || !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::ZeroOffDiagonal { index: n as i64 });
        }
        Ok((a, b))
    }

    /// `a_j` for `j ≥ -1`.
    pub fn a(&self, j: i64) -> Result<Complex64> {
        match j {
            -1 => self.model.a_minus1(),
            j if j >= 0 => Ok(self.coeff(j as usize)?.0),
            j => Err(Error::InvalidParameter(format!("coefficient index {j} < -1"))),
        }
    }

    pub fn b(&self, n: usize) -> Result<Complex64> {
        Ok(self.coeff(n)?.1)
    }

    fn cached(&self, n: usize) -> Result<(Complex64, Complex64)> {
        if matches!(self.model, CoefficientModel::ExplicitTable { .. }) || n >= CACHE_LIMIT {
            return self.model.raw(n);
        }
        if let Some(v) = self.cache.read().expect("cache lock").get(n) {
            return Ok(*v);
        }
        let mut cache = self.cache.write().expect("cache lock");
        let target = (n + 1).max(2 * cache.len()).min(CACHE_LIMIT);
        let start = cache.len();
        cache.reserve(target.saturating_sub(start));
        for k in start..target {
            cache.push(self.model.raw(k)?);
        }
        Ok(cache[n])
    }

    /// Phase estimate `a_m / |a_m|` at the index `m = n·N + offset - 1`.
    pub fn phase(&self, block: usize, offset: usize) -> Result<Complex64> {
        let m = (block * self.period() + offset) as i64 - 1;
        let a = self.a(m)?;
        Ok(a / a.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn power_law(lambda: f64, mu: f64) -> CoefficientModel {
        CoefficientModel::PowerLawExample {
            base: PeriodicPair::real(&[1.0, 2.0], &[0.5, -0.5]).unwrap(),
            lambda,
            mu,
        }
    }

    #[test]
    fn cache_matches_direct_evaluation() {
        let model = power_law(1.2, 0.3);
        let j = Jacobi::new(model.clone()).unwrap();
        for n in [0usize, 5, 1000, 3, 70_000, 12] {
            assert_eq!(j.coeff(n).unwrap(), model.coeff(n).unwrap());
        }
        assert_eq!(j.clone().coeff(70_000).unwrap(), model.coeff(70_000).unwrap());
    }

    #[test]
    fn concurrent_fills_agree() {
        let j = Arc::new(Jacobi::new(power_law(0.7, 0.2)).unwrap());
        let handles: Vec<_> = (0..4)
            .map(|t| {
                let j = Arc::clone(&j);
                std::thread::spawn(move || {
                    for n in (0..5000).rev().step_by(t + 1) {
                        j.coeff(n).unwrap();
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        let direct = power_law(0.7, 0.2);
        for n in (0..5000).step_by(37) {
            assert_eq!(j.coeff(n).unwrap(), direct.coeff(n).unwrap());
        }
    }

    #[test]
    fn power_law_phase_tends_to_one() {
        let (lambda, mu) = (1.5, 0.2);
        let j = Jacobi::new(power_law(lambda, mu)).unwrap();
        let n = 1_000_000usize;
        let a = j.a(n as i64).unwrap();
        let dev = (a / a.norm() - Complex64::new(1.0, 0.0)).norm();
        assert!(dev < 10.0 * ((n + 1) as f64).powf(mu - lambda), "deviation {dev}");
    }

    #[test]
    fn negative_index_uses_periodic_limit() {
        let j = Jacobi::new(power_law(1.0, 0.0)).unwrap();
        assert_eq!(j.a(-1).unwrap(), Complex64::new(2.0, 0.0));
        assert!(j.a(-2).is_err());
    }

    proptest! {
        #[test]
        fn periodic_pair_is_cyclic(vals in prop::collection::vec(0.1f64..5.0, 1..6), n in -50i64..50) {
            let beta: Vec<f64> = vals.iter().map(|v| v - 1.0).collect();
            let p = PeriodicPair::real(&vals, &beta).unwrap();
            let period = p.period() as i64;
            prop_assert_eq!(p.alpha(n + period), p.alpha(n));
            prop_assert_eq!(p.beta(n + period), p.beta(n));
            prop_assert_eq!(p.alpha(-1), p.alpha(period - 1));
        }

        #[test]
        fn evaluation_is_pure(lambda in 0.1f64..2.0, mu in 0.0f64..0.09, n in 0usize..10_000) {
            let j = Jacobi::new(power_law(lambda, mu)).unwrap();
            let first = j.coeff(n).unwrap();
            prop_assert_eq!(first, j.coeff(n).unwrap());
            prop_assert!(first.0.norm() > 0.0);
        }

        #[test]
        fn blend_streams_round_trip(period in 1usize..4, blocks in 1usize..20) {
            let alpha: Vec<f64> = (0..period).map(|k| 1.0 + k as f64).collect();
            let beta = vec![0.25; period];
            let base = PeriodicPair::real(&alpha, &beta).unwrap();
            let c_tilde = Expr::sum(vec![Expr::pow(1.0), Expr::real(0.5)]);
            let model = CoefficientModel::Blend {
                base: base.clone(), c_tilde: c_tilde.clone(), d_tilde: Expr::zero(),
                perturb_a: None, perturb_b: None,
            };
            let block = period + 2;
            let a: Vec<_> = (0..blocks * block).map(|n| model.coeff(n).unwrap().0).collect();
            let periodic: Vec<_> = a.chunks(block).flat_map(|c| c[..period].to_vec()).collect();
            let cs: Vec<_> = a.chunks(block).flat_map(|c| c[period..].to_vec()).collect();
            for (m, v) in periodic.iter().enumerate() {
                prop_assert_eq!(*v, base.alpha(m as i64));
            }
            for (m, v) in cs.iter().enumerate() {
                prop_assert_eq!(*v, c_tilde.eval(m));
            }
        }
    }
}
