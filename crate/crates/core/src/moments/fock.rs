//! Truncated Fock-space oracle.
//!
//! The optical and atomic modes share a product basis `|a, s⟩` with
//! `a, s < n_max`. The seeded coherent state is squeezed as a pure state,
//! then promoted to a density matrix for the phase, the two loss channels
//! (Kraus form of a beam splitter onto a vacuum ancilla that is traced out)
//! and the second squeezer. Moments are read off by direct trace.
//!
//! The squeezer `exp[r(â†Ŝ† − âŜ)]` conserves `a − s`, so it is exponentiated
//! block by block on the tridiagonal generator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{MomentReport, OutputChannel};
use crate::error::SalhiError;
use crate::model::{InterferometerConfig, SeedKind};

/// Cutoff used when the caller does not choose one.
pub const DEFAULT_CUTOFF: usize = 24;
/// Largest tolerated population in the top Fock level of either mode.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockOptions {
    /// Levels per mode; the joint space has `n_max²` states.
    pub n_max: usize,
    pub tail_tolerance: f64,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_CUTOFF,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        }
    }
}

struct Basis {
    n: usize,
}

impl Basis {
    fn dim(&self) -> usize {
        self.n * self.n
    }
    fn index(&self, a: usize, s: usize) -> usize {
        a * self.n + s
    }
    fn split(&self, i: usize) -> (usize, usize) {
        (i / self.n, i % self.n)
    }
}

/// One `a − s = const` block of the squeezer: basis indices and the real
/// orthogonal matrix acting on them.
type Block = (Vec<usize>, DMatrix<f64>);

fn squeezer_blocks(basis: &Basis, r: f64) -> Vec<Block> {
    if r == 0.0 {
        return Vec::new();
    }
    let n = basis.n as isize;
    let mut blocks = Vec::with_capacity(2 * basis.n - 1);
    for d in -(n - 1)..n {
        let len = (n - d.abs()) as usize;
        let (a0, s0) = (d.max(0) as usize, (-d).max(0) as usize);
        let states: Vec<usize> = (0..len).map(|m| basis.index(a0 + m, s0 + m)).collect();
        if len == 1 {
            continue;
        }
        let mut gen = DMatrix::<f64>::zeros(len, len);
        for m in 0..len - 1 {
            let w = r * (((a0 + m + 1) * (s0 + m + 1)) as f64).sqrt();
            gen[(m + 1, m)] = w;
            gen[(m, m + 1)] = -w;
        }
        blocks.push((states, gen.exp()));
    }
    blocks
}

fn squeeze_pure(psi: &mut [Complex64], blocks: &[Block]) {
    for (states, u) in blocks {
        let v: Vec<Complex64> = states.iter().map(|&i| psi[i]).collect();
        for (m, &i) in states.iter().enumerate() {
            psi[i] = (0..v.len()).map(|k| v[k] * u[(m, k)]).sum();
        }
    }
}

/// `ρ ← U ρ Uᵀ` for the real block-diagonal `U`.
fn squeeze_mixed(rho: &mut [Complex64], dim: usize, blocks: &[Block]) {
    for (states, u) in blocks {
        let len = states.len();
        let mut v = vec![Complex64::default(); len];
        for col in 0..dim {
            for (k, &i) in states.iter().enumerate() {
                v[k] = rho[i * dim + col];
            }
            for (m, &i) in states.iter().enumerate() {
                rho[i * dim + col] = (0..len).map(|k| v[k] * u[(m, k)]).sum();
            }
        }
        for row in 0..dim {
            for (k, &j) in states.iter().enumerate() {
                v[k] = rho[row * dim + j];
            }
            for (m, &j) in states.iter().enumerate() {
                rho[row * dim + j] = (0..len).map(|k| v[k] * u[(m, k)]).sum();
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Mode {
    Optical,
    Atomic,
}

/// Pure-loss channel with loss probability `loss` on one mode.
fn lose(rho: &[Complex64], basis: &Basis, mode: Mode, loss: f64) -> Vec<Complex64> {
    let n = basis.n;
    let dim = basis.dim();
    let keep_half: Vec<f64> = (0..n).map(|m| (1.0 - loss).powf(m as f64 / 2.0)).collect();
    let loss_pow: Vec<f64> = (0..n).map(|k| loss.powi(k as i32)).collect();
    let sqrt_binom = sqrt_binomials(n);
    let occupation = |i: usize| match mode {
        Mode::Optical => basis.split(i).0,
        Mode::Atomic => basis.split(i).1,
    };
    let stride = match mode {
        Mode::Optical => n,
        Mode::Atomic => 1,
    };
    let mut out = vec![Complex64::default(); dim * dim];
    for i in 0..dim {
        let a = occupation(i);
        for j in 0..dim {
            let value = rho[i * dim + j];
            if value == Complex64::default() {
                continue;
            }
            let b = occupation(j);
            for k in 0..=a.min(b) {
                let w = sqrt_binom[a][k] * sqrt_binom[b][k] * keep_half[a - k] * keep_half[b - k] * loss_pow[k];
                out[(i - k * stride) * dim + (j - k * stride)] += value * w;
            }
        }
    }
    out
}

fn sqrt_binomials(n: usize) -> Vec<Vec<f64>> {
    let mut table = vec![vec![0.0; n]; n];
    for a in 0..n {
        let mut c = 1.0f64;
        for k in 0..=a {
            table[a][k] = c.sqrt();
            c = c * (a - k) as f64 / (k + 1) as f64;
        }
    }
    table
}

/// Population in the top level of either mode, and in the level below it.
fn edge_populations(basis: &Basis, population: impl Fn(usize) -> f64) -> (f64, f64) {
    let (mut top, mut next) = (0.0, 0.0);
    for i in 0..basis.dim() {
        let (a, s) = basis.split(i);
        let level = a.max(s);
        if level + 1 == basis.n {
            top += population(i);
        } else if level + 2 == basis.n {
            next += population(i);
        }
    }
    (top, next)
}

/// Cutoff needed to push the top-level population below `tol`, from the
/// geometric decay between the last two levels.
fn required_cutoff(n: usize, top: f64, next: f64, tol: f64) -> usize {
    let q = if next > 0.0 { top / next } else { 1.0 };
    if !(q > 0.0 && q < 1.0) {
        return 2 * n;
    }
    let extra = ((tol / top).ln() / q.ln()).ceil().max(1.0) as usize;
    n + extra + 1
}

/// Four output moments of `channel` at the configured probe phase, by direct
/// matrix expectation in a truncated Fock basis.
///
/// Fails with [`SalhiError::CutoffInsufficient`] when any stage leaves more
/// than `tail_tolerance` population in the top level of either mode.
pub fn fock_oracle(
    cfg: &InterferometerConfig<f64>,
    channel: OutputChannel,
    lo_phase: f64,
    opts: &FockOptions,
) -> Result<MomentReport<f64>, SalhiError> {
    if opts.n_max < 3 {
        return Err(SalhiError::Domain(format!("n_max must be at least 3 (got {})", opts.n_max)));
    }
    let basis = Basis { n: opts.n_max };
    let dim = basis.dim();
    let mut worst = (0.0f64, 0.0f64);
    let mut track = |edge: (f64, f64)| {
        if edge.0 > worst.0 {
            worst = edge;
        }
    };

    // Coherent seed, vacuum on the other mode.
    let alpha = cfg.seed.alpha();
    let mut psi = vec![Complex64::default(); dim];
    let mut amp = Complex64::from_polar((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for k in 0..basis.n {
        let i = match cfg.seed.kind {
            SeedKind::Optical => basis.index(k, 0),
            SeedKind::Atomic => basis.index(0, k),
        };
        psi[i] = amp;
        amp = amp * alpha / ((k + 1) as f64).sqrt();
    }
    track(edge_populations(&basis, |i| psi[i].norm_sqr()));

    squeeze_pure(&mut psi, &squeezer_blocks(&basis, cfg.stage1.squeeze()));
    track(edge_populations(&basis, |i| psi[i].norm_sqr()));

    let phi = cfg.probe.phi;
    let mut rho = vec![Complex64::default(); dim * dim];
    for i in 0..dim {
        let ai = basis.split(i).0 as f64;
        for j in 0..dim {
            let aj = basis.split(j).0 as f64;
            rho[i * dim + j] = psi[i] * psi[j].conj() * Complex64::from_polar(1.0, phi * (ai - aj));
        }
    }
    if cfg.losses.l > 0.0 {
        rho = lose(&rho, &basis, Mode::Optical, cfg.losses.l);
    }
    if cfg.losses.eta > 0.0 {
        rho = lose(&rho, &basis, Mode::Atomic, cfg.losses.eta);
    }
    squeeze_mixed(&mut rho, dim, &squeezer_blocks(&basis, cfg.stage2.squeeze()));
    track(edge_populations(&basis, |i| rho[i * dim + i].re));

    if worst.0 > opts.tail_tolerance {
        return Err(SalhiError::CutoffInsufficient {
            n_max: basis.n,
            tail: worst.0,
            required: required_cutoff(basis.n, worst.0, worst.1, opts.tail_tolerance),
        });
    }

    let (occupation, stride): (Box<dyn Fn(usize) -> usize>, usize) = match channel {
        OutputChannel::Optical => (Box::new(|i| basis.split(i).0), basis.n),
        OutputChannel::Atomic => (Box::new(|i| basis.split(i).1), 1),
    };
    let mut mean = 0.0;
    let mut second = 0.0;
    let mut lower1 = Complex64::default();
    let mut lower2 = Complex64::default();
    for i in 0..dim {
        let m = occupation(i);
        let p = rho[i * dim + i].re;
        mean += p * m as f64;
        second += p * (m * m) as f64;
        if m >= 1 {
            lower1 += rho[i * dim + i - stride] * (m as f64).sqrt();
        }
        if m >= 2 {
            lower2 += rho[i * dim + i - 2 * stride] * ((m * (m - 1)) as f64).sqrt();
        }
    }
    let lo = Complex64::from_polar(1.0, -lo_phase);
    let quadrature_mean = 2.0 * (lower1 * lo).re;
    let quadrature_second = 2.0 * (lower2 * lo * lo).re + 2.0 * mean + 1.0;
    Ok(MomentReport {
        mean_intensity: mean,
        intensity_variance: second - mean * mean,
        quadrature_mean,
        quadrature_variance: quadrature_second - quadrature_mean * quadrature_mean,
    })
}

/// Runs [`fock_oracle`] from the default cutoff, retrying once at the
/// cutoff named by a `CutoffInsufficient` error if it is at most `max_cutoff`.
pub fn fock_oracle_adaptive(
    cfg: &InterferometerConfig<f64>,
    channel: OutputChannel,
    lo_phase: f64,
    max_cutoff: usize,
) -> Result<(MomentReport<f64>, usize), SalhiError> {
    let mut opts = FockOptions::default();
    loop {
        match fock_oracle(cfg, channel, lo_phase, &opts) {
            Ok(report) => return Ok((report, opts.n_max)),
            Err(SalhiError::CutoffInsufficient { required, .. }) if required <= max_cutoff && required > opts.n_max => {
                opts.n_max = required;
            }
            Err(SalhiError::CutoffInsufficient { n_max, .. }) if n_max < max_cutoff => {
                opts.n_max = max_cutoff;
            }
            Err(e) => return Err(e),
        }
    }
}
