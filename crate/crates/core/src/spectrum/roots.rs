use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::charpoly::Section;
use crate::error::{Error, Result};
use crate::io::{csv_line, num};
use crate::sequences::Jacobi;

type C = Complex64;

/// Dimension limit for finite sections.
pub const MAX_DIM: usize = 2000;
/// Default cap on the number of counted cells.
pub const DEFAULT_BUDGET: usize = 200_000;

const MIN_EDGE_SAMPLES: usize = 64;
/// Largest accepted phase turn between neighbouring boundary samples. Kept
/// below π/2 so a zero sitting on a sample point forces refinement.
const MAX_TURN: f64 = FRAC_PI_4;
/// Boundary segments shorter than this (relative to the box size) mean a
/// root sits on the boundary.
const MIN_SEGMENT: f64 = 1e-12;
/// Split ratios tried in turn; kept away from 1/2 so that symmetric spectra
/// do not land on cell edges.
const SPLITS: [f64; 4] = [0.4937, 0.5261, 0.4689, 0.5413];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

impl BoxRegion {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Result<Self> {
        if !(re0 < re1 && im0 < im1) || ![re0, re1, im0, im1].iter().all(|x| x.is_finite()) {
            return Err(Error::EmptyRange);
        }
        Ok(Self {
            re: [re0, re1],
            im: [im0, im1],
        })
    }

    pub fn width(&self) -> f64 {
        self.re[1] - self.re[0]
    }

    pub fn height(&self) -> f64 {
        self.im[1] - self.im[0]
    }

    pub fn size(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn center(&self) -> C {
        C::new(0.5 * (self.re[0] + self.re[1]), 0.5 * (self.im[0] + self.im[1]))
    }

    pub fn contains(&self, z: C, slack: f64) -> bool {
        z.re >= self.re[0] - slack
            && z.re <= self.re[1] + slack
            && z.im >= self.im[0] - slack
            && z.im <= self.im[1] + slack
    }

    /// Corners in counter-clockwise order from the lower left.
    fn corners(&self) -> [C; 4] {
        [
            C::new(self.re[0], self.im[0]),
            C::new(self.re[1], self.im[0]),
            C::new(self.re[1], self.im[1]),
            C::new(self.re[0], self.im[1]),
        ]
    }

    /// Four children split at the fractions `(sx, sy)`.
    pub fn split(&self, sx: f64, sy: f64) -> [BoxRegion; 4] {
        let x = self.re[0] + sx * self.width();
        let y = self.im[0] + sy * self.height();
        [
            BoxRegion {
                re: [self.re[0], x],
                im: [self.im[0], y],
            },
            BoxRegion {
                re: [x, self.re[1]],
                im: [self.im[0], y],
            },
            BoxRegion {
                re: [x, self.re[1]],
                im: [y, self.im[1]],
            },
            BoxRegion {
                re: [self.re[0], x],
                im: [y, self.im[1]],
            },
        ]
    }
}

/// Edge piece `(z0, (p(z0), |p'/p|(z0)), z1, (p(z1), |p'/p|(z1)))`.
type Segment = (C, (C, f64), C, (C, f64));

/// Phase change of `p` from `z0` to `z1`. A step is accepted when its turn
/// is small and the local rate `|p'/p|` at both ends predicts no aliasing.
fn edge_phase(s: &Section, z0: C, z1: C, min_len: f64) -> Result<f64> {
    let sample = |z: C| {
        let (p, d, _) = s.eval_with_derivative(z);
        if p == C::from(0.0) || !p.is_finite() {
            Err(Error::RootOnBoundary)
        } else {
            Ok((p, (d / p).norm()))
        }
    };
    let mut total = 0.0;
    let mut stack: Vec<Segment> = Vec::new();
    let mut prev = (z0, sample(z0)?);
    for k in 1..=MIN_EDGE_SAMPLES {
        let z = z0 + (z1 - z0) * (k as f64 / MIN_EDGE_SAMPLES as f64);
        let cur = (z, sample(z)?);
        stack.push((prev.0, prev.1, cur.0, cur.1));
        prev = cur;
    }
    stack.reverse();
    while let Some((za, pa, zb, pb)) = stack.pop() {
        let d = (pb.0 / pa.0).arg();
        let h = (zb - za).norm();
        if d.abs() <= MAX_TURN && pa.1.max(pb.1) * h <= MAX_TURN {
            total += d;
            continue;
        }
        if h < min_len {
            return Err(Error::RootOnBoundary);
        }
        let zm = 0.5 * (za + zb);
        let pm = sample(zm)?;
        // left half first
        stack.push((zm, pm, zb, pb));
        stack.push((za, pa, zm, pm));
    }
    Ok(total)
}

fn count_in(s: &Section, region: &BoxRegion) -> Result<usize> {
    let min_len = MIN_SEGMENT * region.size().max(1.0);
    let c = region.corners();
    let mut total = 0.0;
    for k in 0..4 {
        total += edge_phase(s, c[k], c[(k + 1) % 4], min_len)?;
    }
    let w = total / (2.0 * PI);
    let r = w.round();
    if (w - r).abs() > 0.25 || r < 0.0 {
        return Err(Error::RootOnBoundary);
    }
    Ok(r as usize)
}

/// Zeros of `det(z - J_dim)` inside `region`, with multiplicity.
pub fn winding_count(model: &Jacobi, dim: usize, region: BoxRegion) -> Result<usize> {
    count_in(&Section::new(model, dim)?, &region)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub z: C,
    pub multiplicity: usize,
    /// `|p / p'|` at the reported point; the cell size for clustered roots.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub dim: usize,
    pub region: BoxRegion,
    pub tol: f64,
    pub roots: Vec<Root>,
    /// Roots counted inside the region by the argument principle.
    pub expected: usize,
    /// False when the cell budget ran out or a cell could not be resolved.
    pub complete: bool,
    pub cells: usize,
}

impl SpectrumEstimate {
    pub fn root_count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// CSV with columns `re, im, multiplicity, residual`.
    pub fn to_csv(&self, header: Option<&str>) -> String {
        let mut out = String::from(header.unwrap_or(""));
        out.push_str("re,im,multiplicity,residual\n");
        for r in &self.roots {
            out.push_str(&csv_line(&[
                num(r.z.re),
                num(r.z.im),
                r.multiplicity.to_string(),
                num(r.residual),
            ]));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionOptions {
    pub tol: f64,
    pub budget: usize,
}

impl Default for SectionOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Newton iteration from the cell centre; accepted only if it stays in the
/// cell and converges.
fn newton(s: &Section, cell: &BoxRegion, tol: f64) -> Option<Root> {
    let mut z = cell.center();
    for _ in 0..100 {
        let step = s.newton_step(z)?;
        z -= step;
        if !cell.contains(z, 0.0) {
            return None;
        }
        if step.norm() <= (1e-3 * tol).max(4.0 * f64::EPSILON * z.norm()) {
            let residual = s.newton_step(z).map_or(0.0, |d| d.norm());
            return (residual <= tol).then_some(Root {
                z,
                multiplicity: 1,
                residual,
            });
        }
    }
    None
}

enum Outcome {
    Roots(Vec<Root>),
    Children(Vec<(BoxRegion, usize)>, usize),
    Failed(usize),
}

fn process(s: &Section, cell: BoxRegion, count: usize, tol: f64) -> Outcome {
    if count == 1 {
        if let Some(r) = newton(s, &cell, tol) {
            return Outcome::Roots(vec![r]);
        }
    }
    if cell.size() <= tol {
        return Outcome::Roots(vec![Root {
            z: cell.center(),
            multiplicity: count,
            residual: cell.size(),
        }]);
    }
    let mut used = 0;
    for (j, &sx) in SPLITS.iter().enumerate() {
        let sy = SPLITS[(j + 1) % SPLITS.len()];
        let children = cell.split(sx, sy);
        used += 4;
        let counts: Result<Vec<usize>> = children.iter().map(|c| count_in(s, c)).collect();
        match counts {
            Ok(counts) if counts.iter().sum::<usize>() == count => {
                let kids = children.into_iter().zip(counts).filter(|(_, n)| *n > 0).collect();
                return Outcome::Children(kids, used);
            }
            _ => continue,
        }
    }
    Outcome::Failed(used)
}

/// Roots of the `dim × dim` truncation inside `region` by argument-principle
/// quadrisection and Newton refinement.
pub fn finite_section(model: &Jacobi, dim: usize, region: BoxRegion, opts: SectionOptions) -> Result<SpectrumEstimate> {
    if dim > MAX_DIM {
        return Err(Error::InvalidParameter(format!("dimension {dim} exceeds {MAX_DIM}")));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let s = Section::new(model, dim)?;
    let expected = count_in(&s, &region)?;
    let mut roots = Vec::new();
    let mut cells = 1;
    let mut complete = true;
    let mut level = if expected > 0 {
        vec![(region, expected)]
    } else {
        Vec::new()
    };
    while !level.is_empty() {
        if cells > opts.budget {
            complete = false;
            break;
        }
        let outcomes: Vec<Outcome> = level
            .par_iter()
            .map(|&(cell, count)| process(&s, cell, count, opts.tol))
            .collect();
        let mut next = Vec::new();
        for o in outcomes {
            match o {
                Outcome::Roots(r) => roots.extend(r),
                Outcome::Children(kids, used) => {
                    cells += used;
                    next.extend(kids);
                }
                Outcome::Failed(used) => {
                    cells += used;
                    complete = false;
                }
            }
        }
        level = next;
    }
    roots.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    Ok(SpectrumEstimate {
        dim,
        region,
        tol: opts.tol,
        roots,
        expected,
        complete,
        cells,
    })
}
