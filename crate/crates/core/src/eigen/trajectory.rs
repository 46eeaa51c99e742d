use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{csv_line, num};
use crate::sequences::Jacobi;

type C = Complex64;

/// Default rescaling threshold exponent: pairs are kept within `2^±512`.
pub const RESCALE_EXP: i32 = 512;

/// Exact power of two for exponents in the normal range.
pub(crate) fn pow2(k: i32) -> f64 {
    if (-1022..=1023).contains(&k) {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        2f64.powi(k)
    }
}

/// A recorded pair `(u_{n-1}, u_n)`; the true values are the stored ones
/// times `2^scale_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub n: usize,
    pub prev: C,
    pub cur: C,
    pub scale_exp: i32,
}

impl Sample {
    /// `ln(|u_{n-1}|² + |u_n|²)` of the true values.
    pub fn ln_energy(&self) -> f64 {
        2.0 * (self.prev.norm().hypot(self.cur.norm()).ln() + self.scale_exp as f64 * std::f64::consts::LN_2)
    }

    /// The true pair; may overflow for extreme scale exponents.
    pub fn unscaled(&self) -> [C; 2] {
        let s = pow2(self.scale_exp);
        [self.prev * s, self.cur * s]
    }

    /// The pair expressed at the scale `2^exp`.
    pub fn at_scale(&self, exp: i32) -> [C; 2] {
        let s = pow2(self.scale_exp - exp);
        [self.prev * s, self.cur * s]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub stride: usize,
    /// Rescale whenever `max(|u_{n-1}|, |u_n|)` leaves `[2^-e, 2^e]`.
    pub rescale_exp: i32,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            stride: 1,
            rescale_exp: RESCALE_EXP,
        }
    }
}

/// Samples of a generalised eigenvector `u` for a fixed `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvectorTrajectory {
    pub z: C,
    pub alpha: [C; 2],
    pub stride: usize,
    pub samples: Vec<Sample>,
}

impl EigenvectorTrajectory {
    /// `‖α‖² = |u_0|² + |u_1|²`.
    pub fn alpha_norm_sqr(&self) -> f64 {
        self.alpha[0].norm_sqr() + self.alpha[1].norm_sqr()
    }

    /// The pair `(u_{n-1}, u_n)`, if it was recorded.
    pub fn pair(&self, n: usize) -> Option<&Sample> {
        if n == 0 || !(n - 1).is_multiple_of(self.stride) {
            return None;
        }
        self.samples.get((n - 1) / self.stride).filter(|s| s.n == n)
    }

    pub fn last_n(&self) -> usize {
        self.samples.last().map_or(0, |s| s.n)
    }

    /// CSV with columns `n, re_u, im_u, scale_exp`, one row per recorded
    /// `u_n` (the first row also carries `u_0`).
    pub fn to_csv(&self, header: Option<&str>) -> String {
        let mut out = String::from(header.unwrap_or(""));
        out.push_str("n,re_u,im_u,scale_exp\n");
        for s in &self.samples {
            if s.n == 1 {
                out.push_str(&csv_line(&[
                    "0".into(),
                    num(s.prev.re),
                    num(s.prev.im),
                    s.scale_exp.to_string(),
                ]));
            }
            out.push_str(&csv_line(&[
                s.n.to_string(),
                num(s.cur.re),
                num(s.cur.im),
                s.scale_exp.to_string(),
            ]));
        }
        out
    }
}

fn rescale(prev: &mut C, cur: &mut C, scale: &mut i32, limit: i32) {
    let m = prev.norm().max(cur.norm());
    if m == 0.0 || !m.is_finite() {
        return;
    }
    let e = m.log2().floor() as i32;
    if e > limit || e < -limit {
        let f = pow2(-e);
        *prev *= f;
        *cur *= f;
        *scale += e;
    }
}

/// Streams every pair `(u_{n-1}, u_n)`, `1 ≤ n ≤ n_max`, without storing
/// them. Same recurrence and rescaling as [`evolve_with`].
pub fn walk(
    model: &Jacobi,
    z: C,
    alpha: [C; 2],
    n_max: usize,
    rescale_exp: i32,
    mut f: impl FnMut(&Sample),
) -> Result<()> {
    if alpha[0] == C::from(0.0) && alpha[1] == C::from(0.0) {
        return Err(Error::DegenerateInitial);
    }
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let (mut prev, mut cur, mut scale) = (alpha[0], alpha[1], 0);
    rescale(&mut prev, &mut cur, &mut scale, rescale_exp);
    f(&Sample {
        n: 1,
        prev,
        cur,
        scale_exp: scale,
    });
    let mut a_prev = model.a(0)?;
    for n in 1..n_max {
        let (a, b) = model.coeff(n)?;
        let next = ((z - b) * cur - a_prev * prev) / a;
        prev = cur;
        cur = next;
        a_prev = a;
        rescale(&mut prev, &mut cur, &mut scale, rescale_exp);
        f(&Sample {
            n: n + 1,
            prev,
            cur,
            scale_exp: scale,
        });
    }
    Ok(())
}

/// Runs `u_{n+1} = ((z - b_n) u_n - a_{n-1} u_{n-1}) / a_n` for
/// `1 ≤ n < n_max`, recording `(u_{n-1}, u_n)` for every `n ≡ 1 (mod stride)`.
pub fn evolve_with(
    model: &Jacobi,
    z: C,
    alpha: [C; 2],
    n_max: usize,
    opts: EvolveOptions,
) -> Result<EigenvectorTrajectory> {
    let stride = opts.stride.max(1);
    let mut samples = Vec::with_capacity(n_max / stride + 1);
    walk(model, z, alpha, n_max, opts.rescale_exp, |s| {
        if (s.n - 1) % stride == 0 {
            samples.push(*s);
        }
    })?;
    Ok(EigenvectorTrajectory {
        z,
        alpha,
        stride,
        samples,
    })
}

pub fn evolve(model: &Jacobi, z: C, alpha: [C; 2], n_max: usize, stride: usize) -> Result<EigenvectorTrajectory> {
    evolve_with(
        model,
        z,
        alpha,
        n_max,
        EvolveOptions {
            stride,
            ..Default::default()
        },
    )
}

/// `(u_0, (z - b_0) u_0 / a_0)`: the initial condition satisfying the first
/// row of `𝒜 u = z u`.
pub fn eigen_seed(model: &Jacobi, z: C, u0: C) -> Result<[C; 2]> {
    if u0 == C::from(0.0) {
        return Err(Error::DegenerateInitial);
    }
    let (a0, b0) = model.coeff(0)?;
    Ok([u0, (z - b0) * u0 / a0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{CoefficientModel, Expr, PeriodicPair};
    use crate::transfer::n_step;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn free() -> Jacobi {
        Jacobi::new(CoefficientModel::free()).unwrap()
    }

    fn complex_model() -> Jacobi {
        Jacobi::new(CoefficientModel::AsymptoticallyPeriodic {
            base: PeriodicPair::new(
                vec![c(1.0, 0.2), c(0.8, -0.3), c(1.4, 0.0)],
                vec![c(0.1, 0.4), c(-0.2, 0.0), c(0.3, -0.1)],
            )
            .unwrap(),
            perturb_a: Some(Expr::recip(Expr::pow(0.5))),
            perturb_b: Some(Expr::imag(Expr::recip(Expr::pow(1.0)))),
        })
        .unwrap()
    }

    /// Re-substitutes every recorded step into the three-term recurrence.
    fn recurrence_residual(model: &Jacobi, t: &EigenvectorTrajectory) -> f64 {
        let mut worst: f64 = 0.0;
        for w in t.samples.windows(2) {
            let (s0, s1) = (&w[0], &w[1]);
            assert_eq!(s1.n, s0.n + 1);
            let n = s0.n;
            let [um1, u] = s0.at_scale(s1.scale_exp);
            let up1 = s1.cur;
            let (a, b) = model.coeff(n).unwrap();
            let a_prev = model.a(n as i64 - 1).unwrap();
            let lhs = t.z * u;
            let rhs = a * up1 + b * u + a_prev * um1;
            let scale = (a * up1).norm() + (b * u).norm() + (a_prev * um1).norm() + lhs.norm();
            worst = worst.max((lhs - rhs).norm() / scale);
        }
        worst
    }

    #[test]
    fn free_period_four_orbit() {
        let t = evolve(&free(), c(0.0, 0.0), [c(1.0, 0.0), c(0.0, 0.0)], 9, 1).unwrap();
        let u: Vec<f64> = std::iter::once(t.samples[0].prev.re)
            .chain(t.samples.iter().map(|s| s.cur.re))
            .collect();
        assert_eq!(u, vec![1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn chebyshev_energy_bounds() {
        let theta: f64 = 0.9;
        let x = 2.0 * theta.cos();
        let t = evolve(&free(), c(x, 0.0), [c(0.0, 0.0), c(theta.sin(), 0.0)], 2000, 1).unwrap();
        let (lo, hi) = (1.0 - theta.cos().abs(), 1.0 + theta.cos().abs());
        for s in &t.samples {
            let e = s.unscaled().iter().map(|u| u.norm_sqr()).sum::<f64>();
            assert!(e >= lo - 1e-9 && e <= hi + 1e-9, "n={} e={e}", s.n);
            let exact = ((s.n as f64) * theta).sin();
            assert!((s.cur.re - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_initial_rejected() {
        assert!(matches!(
            evolve(&free(), c(0.0, 0.0), [c(0.0, 0.0); 2], 10, 1),
            Err(Error::DegenerateInitial)
        ));
    }

    #[test]
    fn seeds() {
        assert_eq!(
            eigen_seed(&free(), c(0.0, 0.0), c(1.0, 0.0)).unwrap(),
            [c(1.0, 0.0), c(0.0, 0.0)]
        );
        let m = Jacobi::new(CoefficientModel::ExplicitTable {
            a: vec![c(2.0, 0.0)],
            b: vec![c(0.0, 1.0)],
            a_minus1: None,
            period: None,
        })
        .unwrap();
        assert_eq!(
            eigen_seed(&m, c(1.0, 1.0), c(1.0, 0.0)).unwrap(),
            [c(1.0, 0.0), c(0.5, 0.0)]
        );
        assert!(matches!(
            eigen_seed(&m, c(1.0, 1.0), c(0.0, 0.0)),
            Err(Error::DegenerateInitial)
        ));
    }

    #[test]
    fn recurrence_holds_after_unscaling() {
        let m = complex_model();
        // outside any band: exponential growth forces many rescalings
        let t = evolve_with(
            &m,
            c(3.0, 1.0),
            [c(1.0, 0.0), c(0.3, -0.2)],
            3000,
            EvolveOptions {
                stride: 1,
                rescale_exp: 20,
            },
        )
        .unwrap();
        assert!(t.samples.last().unwrap().scale_exp > 100);
        assert!(recurrence_residual(&m, &t) < 1e-10);
    }

    #[test]
    fn transfer_consistency() {
        let m = complex_model();
        let z = c(0.4, -0.3);
        let t = evolve(&m, z, [c(0.2, 1.0), c(-0.7, 0.1)], 1000, 1).unwrap();
        let period = 3;
        for n in (1..990).step_by(7) {
            let s0 = t.pair(n).unwrap();
            let s1 = t.pair(n + period).unwrap();
            let x = n_step(&m, n, period, z).unwrap();
            let pred = x.apply(s0.at_scale(s1.scale_exp));
            let err = ((pred[0] - s1.prev).norm() + (pred[1] - s1.cur).norm()) / (s1.prev.norm() + s1.cur.norm());
            assert!(err < 1e-10, "n={n} err={err}");
        }
    }

    #[test]
    fn scaling_is_transparent() {
        let m = complex_model();
        let z = c(2.5, 0.5);
        let a = evolve_with(
            &m,
            z,
            [c(1.0, 0.0), c(0.0, 1.0)],
            2000,
            EvolveOptions {
                stride: 1,
                rescale_exp: 512,
            },
        )
        .unwrap();
        let b = evolve_with(
            &m,
            z,
            [c(1.0, 0.0), c(0.0, 1.0)],
            2000,
            EvolveOptions {
                stride: 1,
                rescale_exp: 8,
            },
        )
        .unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            let d = (x.ln_energy() - y.ln_energy()).abs();
            assert!(d < 1e-10 * x.ln_energy().abs().max(1.0), "n={} d={d}", x.n);
        }
    }

    #[test]
    fn stride_and_csv() {
        let t = evolve(&free(), c(0.5, 0.0), [c(1.0, 0.0), c(1.0, 0.0)], 20, 5).unwrap();
        let ns: Vec<usize> = t.samples.iter().map(|s| s.n).collect();
        assert_eq!(ns, vec![1, 6, 11, 16]);
        assert!(t.pair(6).is_some() && t.pair(7).is_none());
        let csv = t.to_csv(None);
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.starts_with("n,re_u,im_u,scale_exp\n0,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn linearity(a1 in (-1.0f64..1.0, -1.0f64..1.0), a2 in (-1.0f64..1.0, -1.0f64..1.0), zr in -3.0f64..3.0, zi in -0.5f64..0.5) {
            let m = complex_model();
            let z = c(zr, zi);
            let al1 = [c(a1.0, 0.0), c(0.0, a1.1)];
            let al2 = [c(0.0, a2.0), c(a2.1, 0.0)];
            prop_assume!(al1[0].norm() + al1[1].norm() > 0.05 && al2[0].norm() + al2[1].norm() > 0.05);
            let sum = [al1[0] + al2[0], al1[1] + al2[1]];
            prop_assume!(sum[0].norm() + sum[1].norm() > 0.05);
            let opts = EvolveOptions { stride: 1, rescale_exp: 1000 };
            let t1 = evolve_with(&m, z, al1, 40, opts).unwrap();
            let t2 = evolve_with(&m, z, al2, 40, opts).unwrap();
            let ts = evolve_with(&m, z, sum, 40, opts).unwrap();
            for ((x, y), s) in t1.samples.iter().zip(&t2.samples).zip(&ts.samples) {
                let scale = x.cur.norm() + y.cur.norm() + 1.0;
                prop_assert!((x.cur + y.cur - s.cur).norm() <= 1e-10 * scale);
            }
        }
    }
}
