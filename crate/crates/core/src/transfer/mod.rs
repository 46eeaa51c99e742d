//! Transfer matrices of the three-term recurrence and their limits.
//!
//! `B_j(z)` advances `(u_{j-1}, u_j)` by one index and `X_n(z)` is the ordered
//! product `B_{n+N-1} ··· B_n`. For the periodic, modulated and blend model
//! classes the limits of `X_{nN+i}` are known in closed form; the Λ scan in
//! [`scan`] operates on those limits only.

mod matrix;
pub mod scan;

use num_complex::Complex64;

pub use matrix::TransferMatrix;
pub use scan::{lambda_scan, Interval, LambdaScanResult, ScanLine, ScanSample, DEFAULT_REAL_TOL};

use crate::error::{Error, Result};
use crate::sequences::{CoefficientModel, Jacobi, PeriodicPair};

type C = Complex64;

/// Block index at which the blend parameter `δ = lim d̃_{2n}` is sampled.
pub const DELTA_SAMPLE_BLOCK: usize = 1_000_000;

fn step_matrix(a_prev: C, a: C, b: C, z: C) -> TransferMatrix {
    TransferMatrix::new(C::from(0.0), C::from(1.0), -a_prev / a, (z - b) / a)
}

/// `B_j(z) = [[0, 1], [-a_{j-1}/a_j, (z - b_j)/a_j]]`.
pub fn one_step(model: &Jacobi, j: usize, z: C) -> Result<TransferMatrix> {
    let a_prev = model.a(j as i64 - 1)?;
    let (a, b) = model.coeff(j)?;
    Ok(step_matrix(a_prev, a, b, z))
}

/// `X_n(z) = B_{n+N-1} ··· B_n` for `n ≥ 1`.
pub fn n_step(model: &Jacobi, n: usize, period: usize, z: C) -> Result<TransferMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("n_step needs n ≥ 1".into()));
    }
    if period == 0 {
        return Err(Error::InvalidParameter("period must be positive".into()));
    }
    let mut x = TransferMatrix::identity();
    let mut a_prev = model.a(n as i64 - 1)?;
    for j in n..n + period {
        let (a, b) = model.coeff(j)?;
        x = step_matrix(a_prev, a, b, z) * x;
        a_prev = a;
    }
    Ok(x)
}

/// `𝔅_j(x)` built from the periodic pair.
pub fn periodic_step(base: &PeriodicPair, j: i64, x: C) -> TransferMatrix {
    step_matrix(base.alpha(j - 1), base.alpha(j), base.beta(j), x)
}

/// `𝔛_i(x) = 𝔅_{N+i-1} ··· 𝔅_i`.
pub fn periodic_limit(base: &PeriodicPair, i: usize, x: C) -> TransferMatrix {
    let i = i as i64;
    (i..i + base.period() as i64).fold(TransferMatrix::identity(), |acc, j| periodic_step(base, j, x) * acc)
}

/// The limit block matrix `𝒞(z)` of a blend.
///
/// The (2,1) entry is `+α_{N-1}/α_0`: that is the limit of the three-step
/// product across the two unbounded slots, and it gives `det 𝒞 = α_{N-1}/α_0`
/// as required by `det X_n = a_{n-1}/a_{n+N-1} → 1`.
pub fn blend_core(base: &PeriodicPair, delta: C, z: C) -> TransferMatrix {
    let n = base.period() as i64;
    let a0 = base.alpha(0);
    TransferMatrix::new(
        C::from(0.0),
        C::from(-1.0),
        base.alpha(n - 1) / a0,
        -(2.0 * z - base.beta(0) - delta) / a0,
    )
}

/// `𝒳_i(z) = {𝔅_{i-1} ··· 𝔅_1} 𝒞(z) {𝔅_{N-1} ··· 𝔅_i}` for `1 ≤ i ≤ N`.
pub fn blend_limit(base: &PeriodicPair, delta: C, i: usize, z: C) -> Result<TransferMatrix> {
    let n = base.period();
    if !(1..=n).contains(&i) {
        return Err(Error::OffsetOutOfRange {
            offset: i,
            min: 1,
            max: n,
        });
    }
    let prod = |from: usize, to: usize| {
        (from..to).fold(TransferMatrix::identity(), |acc, j| {
            periodic_step(base, j as i64, z) * acc
        })
    };
    Ok(prod(1, i) * blend_core(base, delta, z) * prod(i, n))
}

/// `(tr M)² - 4 det M`.
pub fn discriminant(m: &TransferMatrix) -> C {
    m.discr()
}

/// Hermitian symmetrisation `(M + M*) / 2`.
pub fn sym_part(m: &TransferMatrix) -> TransferMatrix {
    m.sym()
}

/// Closed-form limit of `X_{nN+i}` as `n → ∞` for one offset class.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitFamily {
    /// Asymptotically periodic: `𝔛_i(z)`.
    Periodic { base: PeriodicPair, offset: usize },
    /// Periodically modulated with `|a_n| → ∞`: the constant `𝔛_i(0)`.
    Modulated { base: PeriodicPair, offset: usize },
    /// Blend: `𝒳_i(z)` with `1 ≤ i ≤ N`.
    Blend {
        base: PeriodicPair,
        delta: C,
        offset: usize,
    },
}

impl LimitFamily {
    /// Limit family of `model` at `offset`. Offsets run over `0..N` for
    /// periodic-type models and `1..=N` for blends.
    pub fn for_model(model: &Jacobi, offset: usize) -> Result<Self> {
        Self::for_spec(model.model(), offset)
    }

    fn for_spec(model: &CoefficientModel, offset: usize) -> Result<Self> {
        let check = |min: usize, max: usize| {
            if (min..=max).contains(&offset) {
                Ok(())
            } else {
                Err(Error::OffsetOutOfRange { offset, min, max })
            }
        };
        match model {
            CoefficientModel::ExplicitTable { .. } => Err(Error::NoLimitFamily),
            CoefficientModel::AsymptoticallyPeriodic { base, .. } => {
                check(0, base.period() - 1)?;
                Ok(LimitFamily::Periodic {
                    base: base.clone(),
                    offset,
                })
            }
            CoefficientModel::PeriodicallyModulated { base, .. } | CoefficientModel::PowerLawExample { base, .. } => {
                check(0, base.period() - 1)?;
                Ok(LimitFamily::Modulated {
                    base: base.clone(),
                    offset,
                })
            }
            CoefficientModel::AdditivePerturbation { inner, .. } => Self::for_spec(inner, offset),
            CoefficientModel::Blend { base, d_tilde, .. } => {
                check(1, base.period())?;
                Ok(LimitFamily::Blend {
                    base: base.clone(),
                    delta: d_tilde.eval(2 * DELTA_SAMPLE_BLOCK),
                    offset,
                })
            }
        }
    }

    /// Offsets `i` for which this model class has a limit family.
    pub fn offsets(model: &Jacobi) -> Result<std::ops::RangeInclusive<usize>> {
        let model = model.model();
        if model.base().is_none() {
            return Err(Error::NoLimitFamily);
        }
        let block = model.period();
        Ok(
            if matches!(Self::for_spec(model, 0), Err(Error::OffsetOutOfRange { .. })) {
                1..=block - 2
            } else {
                0..=block - 1
            },
        )
    }

    pub fn offset(&self) -> usize {
        match self {
            LimitFamily::Periodic { offset, .. }
            | LimitFamily::Modulated { offset, .. }
            | LimitFamily::Blend { offset, .. } => *offset,
        }
    }

    /// Whether the limit is independent of `z`.
    pub fn is_constant(&self) -> bool {
        matches!(self, LimitFamily::Modulated { .. })
    }

    pub fn at(&self, z: C) -> TransferMatrix {
        match self {
            LimitFamily::Periodic { base, offset } => periodic_limit(base, *offset, z),
            LimitFamily::Modulated { base, offset } => periodic_limit(base, *offset, C::from(0.0)),
            LimitFamily::Blend { base, delta, offset } => {
                blend_limit(base, *delta, *offset, z).expect("offset validated at construction")
            }
        }
    }
}
