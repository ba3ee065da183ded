//! Independent reference implementations and randomized property checks shared
//! by the integration suites. Nothing here calls into the code under test
//! except where a check compares against it.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wthresh::weighting::Tap;
use wthresh::{
    apply_weight_1d, apply_weight_2d, lorentz_norm, rearrange, sigma_curve, tail_norm, weighted_ordering,
    CoefficientGrid, CoefficientSequence, Exponent, LorentzParams, WeightStencil1D, WeightStencil2D,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) || a == b
}

pub fn relative_rms(reference: &[f64], other: &[f64]) -> f64 {
    let num: f64 = reference.iter().zip(other).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = reference.iter().map(|a| a * a).sum();
    (num / den).sqrt()
}

// ---------------------------------------------------------------- lorentz

/// Direct evaluation: insertion sort, then the plain sum or supremum.
pub fn oracle_lorentz(mags: &[f64], tau: f64, q: Option<f64>) -> f64 {
    let mut a = mags.to_vec();
    for i in 1..a.len() {
        let mut j = i;
        while j > 0 && a[j - 1] < a[j] {
            a.swap(j - 1, j);
            j -= 1;
        }
    }
    let terms = a.iter().enumerate().map(|(i, v)| ((i + 1) as f64).powf(1.0 / tau) * v);
    match q {
        None => terms.fold(0.0, f64::max),
        Some(q) => {
            let s: f64 = terms.enumerate().map(|(i, t)| t.powf(q) / (i + 1) as f64).sum();
            s.powf(1.0 / q)
        }
    }
}

/// Smallest Lorentz norm of what remains after removing any `m` entries.
pub fn oracle_best_tail(mags: &[f64], m: usize, tau: f64, q: Option<f64>) -> f64 {
    let k = mags.len();
    assert!(k <= 20);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let rest: Vec<f64> = (0..k).filter(|i| mask & (1 << i) == 0).map(|i| mags[i]).collect();
        best = best.min(oracle_lorentz(&rest, tau, q));
    }
    best
}

pub fn params(tau: f64, q: Option<f64>) -> LorentzParams {
    LorentzParams::new(tau, q.map_or(Exponent::Infinity, Exponent::Finite)).unwrap()
}

// ---------------------------------------------------------------- weighting

pub fn oracle_weight_1d(mags: &[f64], weights: &[f64]) -> Vec<f64> {
    let omega = (weights.len() / 2) as isize;
    (0..mags.len() as isize)
        .map(|k| {
            let mut acc = 0.0;
            for l in -omega..=omega {
                let j = k + l;
                if j >= 0 && (j as usize) < mags.len() {
                    acc += weights[(l + omega) as usize] * mags[j as usize];
                }
            }
            acc
        })
        .collect()
}

/// `out[m][n] = sum w * values[m + dm][n + dn]` over taps, zero outside.
pub fn oracle_stencil(values: &[f64], channels: usize, frames: usize, taps: &[(isize, isize, f64)]) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for n in 0..frames as isize {
        for m in 0..channels as isize {
            for &(dm, dn, w) in taps {
                let (mm, nn) = (m + dm, n + dn);
                if mm >= 0 && nn >= 0 && (mm as usize) < channels && (nn as usize) < frames {
                    out[n as usize * channels + m as usize] += w * values[nn as usize * channels + mm as usize];
                }
            }
        }
    }
    out
}

pub fn taps_of(stencil: &WeightStencil2D) -> Vec<(isize, isize, f64)> {
    stencil.taps().iter().map(|t| (t.channel, t.frame, t.weight)).collect()
}

// ---------------------------------------------------------------- gabor

/// `c[n M + m] = sum_l f[l] g[(l - n a) mod L] exp(-2 pi i m ((l - n a) mod L) / M)`,
/// with `g` zero beyond its stored length.
pub fn oracle_dgt(signal: &[Complex64], window: &[f64], hop: usize, channels: usize) -> Vec<Complex64> {
    let l_len = signal.len();
    let frames = l_len / hop;
    let mut out = vec![Complex64::default(); channels * frames];
    for n in 0..frames {
        for m in 0..channels {
            let mut acc = Complex64::default();
            for (l, f) in signal.iter().enumerate() {
                let j = (l + l_len - (n * hop) % l_len) % l_len;
                if j < window.len() {
                    let phase = -2.0 * PI * ((m * j) % channels) as f64 / channels as f64;
                    acc += f * window[j] * Complex64::from_polar(1.0, phase);
                }
            }
            out[n * channels + m] = acc;
        }
    }
    out
}

/// Canonical dual `S^{-1} g` from the explicit `L x L` frame operator built
/// out of every atom, solved by Gauss-Jordan elimination. Returns the dual on
/// the whole circle.
pub fn oracle_dual(window: &[f64], hop: usize, channels: usize, len: usize) -> Vec<Complex64> {
    let frames = len / hop;
    let mut s = vec![vec![Complex64::default(); len]; len];
    for n in 0..frames {
        for m in 0..channels {
            let mut atom = vec![Complex64::default(); len];
            for (j, g) in window.iter().enumerate() {
                let phase = 2.0 * PI * ((m * j) % channels) as f64 / channels as f64;
                atom[(n * hop + j) % len] = g * Complex64::from_polar(1.0, phase);
            }
            for r in 0..len {
                for c in 0..len {
                    s[r][c] += atom[r] * atom[c].conj();
                }
            }
        }
    }
    let mut rhs: Vec<Complex64> = (0..len)
        .map(|l| Complex64::new(window.get(l).copied().unwrap_or(0.0), 0.0))
        .collect();
    for col in 0..len {
        let pivot = (col..len)
            .max_by(|&a, &b| s[a][col].norm().total_cmp(&s[b][col].norm()))
            .unwrap();
        s.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = s[col][col];
        assert!(p.norm() > 1e-12, "frame operator is singular");
        for c in 0..len {
            s[col][c] /= p;
        }
        rhs[col] /= p;
        for r in 0..len {
            if r != col {
                let f = s[r][col];
                if f != Complex64::default() {
                    for c in 0..len {
                        let v = s[col][c];
                        s[r][c] -= f * v;
                    }
                    let v = rhs[col];
                    rhs[r] -= f * v;
                }
            }
        }
    }
    rhs
}

pub fn random_signal(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_grid(rng: &mut ChaCha8Rng, channels: usize, frames: usize) -> CoefficientGrid {
    let data = (0..channels * frames)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    CoefficientGrid::new(channels, frames, data).unwrap()
}

/// `|c_k| = k^(-1/tau)` for `k = 1..=M N`, placed at shuffled positions with random phases.
pub fn planted_grid(rng: &mut ChaCha8Rng, channels: usize, frames: usize, tau: f64) -> CoefficientGrid {
    let mut pos: Vec<usize> = (0..channels * frames).collect();
    pos.shuffle(rng);
    let mut data = vec![Complex64::default(); channels * frames];
    for (k, &p) in pos.iter().enumerate() {
        let mag = ((k + 1) as f64).powf(-1.0 / tau);
        data[p] = Complex64::from_polar(mag, rng.random_range(0.0..2.0 * PI));
    }
    CoefficientGrid::new(channels, frames, data).unwrap()
}

// ---------------------------------------------------------------- strategies

/// Magnitudes spread over six decades, with exact zeros and repeats mixed in.
pub fn magnitude() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(0.0),
        1 => Just(1.0),
        8 => (-3.0f64..3.0).prop_map(|e| 10f64.powf(e)),
    ]
}

pub fn complex_entry() -> impl Strategy<Value = Complex64> {
    (magnitude(), 0.0..2.0 * PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

pub fn entries(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(complex_entry(), 1..=max_len)
}

/// `(tau, q)` with `q = None` meaning infinity.
pub fn lorentz_pair() -> impl Strategy<Value = (f64, Option<f64>)> {
    (
        0.25f64..4.0,
        prop_oneof![4 => (0.25f64..4.0).prop_map(Some), 1 => Just(None)],
    )
}

pub fn stencil_1d() -> impl Strategy<Value = Vec<f64>> {
    (0usize..=4).prop_flat_map(|omega| {
        (0.05f64..2.0, prop::collection::vec(0.0f64..2.0, 2 * omega)).prop_map(move |(c, mut side)| {
            side.insert(omega, c);
            side
        })
    })
}

pub fn stencil_2d() -> impl Strategy<Value = WeightStencil2D> {
    (
        0.05f64..2.0,
        prop::collection::vec(((-2isize..=2), (-2isize..=2), 0.0f64..2.0), 0..8),
    )
        .prop_map(|(center, extra)| {
            let mut taps = BTreeMap::new();
            taps.insert((0, 0), center);
            for (dm, dn, w) in extra {
                if (dm, dn) != (0, 0) {
                    taps.insert((dm, dn), w);
                }
            }
            WeightStencil2D::new(taps.into_iter().map(|((dm, dn), w)| Tap::new(dm, dn, w)).collect()).unwrap()
        })
}

/// `(channels, frames, magnitudes)` for a small grid.
pub fn grid_mags() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(c, f)| {
        prop::collection::vec(prop_oneof![1 => Just(0.0), 1 => Just(0.5), 6 => 0.0f64..10.0], c * f)
            .prop_map(move |v| (c, f, v))
    })
}

// ---------------------------------------------------------------- lorentz checks

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

pub fn check_rearrangement_invariance(
    entries: &[Complex64],
    (tau, q): (f64, Option<f64>),
    seed: u64,
) -> Result<(), TestCaseError> {
    let p = params(tau, q);
    let base = lorentz_norm(&CoefficientSequence::new(entries.to_vec()).unwrap(), p);
    let mut r = rng(seed);
    let mut shuffled = entries.to_vec();
    shuffled.shuffle(&mut r);
    for c in &mut shuffled {
        *c *= Complex64::from_polar(1.0, r.random_range(0.0..2.0 * PI));
    }
    let moved = lorentz_norm(&CoefficientSequence::new(shuffled).unwrap(), p);
    ensure(rel_close(base, moved, 1e-12), || format!("{base} vs {moved}"))
}

pub fn check_homogeneity(
    entries: &[Complex64],
    (tau, q): (f64, Option<f64>),
    s: Complex64,
) -> Result<(), TestCaseError> {
    let p = params(tau, q);
    let base = lorentz_norm(&CoefficientSequence::new(entries.to_vec()).unwrap(), p);
    let scaled: Vec<Complex64> = entries.iter().map(|c| c * s).collect();
    let got = lorentz_norm(&CoefficientSequence::new(scaled).unwrap(), p);
    ensure(rel_close(got, s.norm() * base, 1e-11), || {
        format!("{got} vs |{s}| * {base}")
    })
}

/// Complex scalars over six decades, including 0.
pub fn scalar() -> impl Strategy<Value = Complex64> {
    prop_oneof![
        1 => Just(Complex64::default()),
        9 => ((-3.0f64..3.0), 0.0..2.0 * PI).prop_map(|(e, t)| Complex64::from_polar(10f64.powf(e), t)),
    ]
}

pub fn check_lp_coincidence(entries: &[Complex64], tau: f64) -> Result<(), TestCaseError> {
    let seq = CoefficientSequence::new(entries.to_vec()).unwrap();
    let got = lorentz_norm(&seq, params(tau, Some(tau)));
    let want = entries.iter().map(|c| c.norm().powf(tau)).sum::<f64>().powf(1.0 / tau);
    ensure(rel_close(got, want, 1e-10), || format!("{got} vs {want}"))
}

pub fn check_oracle_agreement(entries: &[Complex64], (tau, q): (f64, Option<f64>)) -> Result<(), TestCaseError> {
    let seq = CoefficientSequence::new(entries.to_vec()).unwrap();
    let got = lorentz_norm(&seq, params(tau, q));
    let mags: Vec<f64> = entries.iter().map(|c| c.norm()).collect();
    let want = oracle_lorentz(&mags, tau, q);
    ensure(rel_close(got, want, 1e-10), || format!("{got} vs oracle {want}"))
}

/// Pointwise larger magnitudes never give a smaller norm, deleting an entry
/// never increases it, and tails shrink with `m` down to exactly 0.
pub fn check_monotonicity(
    entries: &[Complex64],
    (tau, q): (f64, Option<f64>),
    growth: &[f64],
) -> Result<(), TestCaseError> {
    let removed = growth.len() * 7919 % entries.len();
    let mut fewer = entries.to_vec();
    fewer.remove(removed);
    let before = lorentz_norm(&CoefficientSequence::new(entries.to_vec()).unwrap(), params(tau, q));
    let after = lorentz_norm(&CoefficientSequence::new(fewer).unwrap(), params(tau, q));
    ensure(after <= before * (1.0 + 1e-12), || {
        format!("removing entry {removed}: {after} > {before}")
    })?;
    let curve = sigma_curve(
        &CoefficientSequence::new(entries.to_vec()).unwrap(),
        params(tau, q),
        entries.len(),
    )
    .unwrap();
    ensure(curve.values().windows(2).all(|w| w[1] <= w[0]), || {
        "sigma curve increases".into()
    })?;
    ensure(*curve.values().last().unwrap() == 0.0, || {
        "sigma curve does not reach 0 at m = length".into()
    })?;
    let p = params(tau, q);
    let seq = CoefficientSequence::new(entries.to_vec()).unwrap();
    let bigger: Vec<Complex64> = entries
        .iter()
        .zip(growth.iter().cycle())
        .map(|(c, g)| c * (1.0 + g))
        .collect();
    let a = lorentz_norm(&seq, p);
    let b = lorentz_norm(&CoefficientSequence::new(bigger).unwrap(), p);
    ensure(a <= b * (1.0 + 1e-12), || format!("{a} > {b}"))?;
    let mut prev = f64::INFINITY;
    for m in 0..=entries.len() {
        let t = tail_norm(&seq, m, p);
        ensure(t <= prev * (1.0 + 1e-12), || {
            format!("tail grows at m = {m}: {t} > {prev}")
        })?;
        prev = t;
    }
    ensure(prev == 0.0, || "full removal leaves a nonzero tail".into())
}

pub fn check_rearrangement_shape(entries: &[Complex64]) -> Result<(), TestCaseError> {
    let seq = CoefficientSequence::new(entries.to_vec()).unwrap();
    let r = rearrange(&seq);
    check_permutation(&r.permutation, entries.len())?;
    for (i, &k) in r.permutation.iter().enumerate() {
        ensure(r.magnitudes[i] == entries[k].norm(), || {
            format!("rank {i} magnitude mismatch")
        })?;
    }
    for w in r.permutation.windows(2) {
        let (a, b) = (entries[w[0]].norm(), entries[w[1]].norm());
        ensure(a > b || (a == b && w[0] < w[1]), || format!("order broken at {w:?}"))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- weighting checks

pub fn check_permutation(perm: &[usize], len: usize) -> Result<(), TestCaseError> {
    let mut seen = vec![false; len];
    ensure(perm.len() == len, || {
        format!("permutation has {} entries, want {len}", perm.len())
    })?;
    for &k in perm {
        ensure(k < len && !seen[k], || format!("index {k} invalid or repeated"))?;
        seen[k] = true;
    }
    Ok(())
}

fn grid_of(channels: usize, frames: usize, mags: &[f64]) -> CoefficientGrid {
    CoefficientGrid::from_real(channels, frames, mags).unwrap()
}

/// Weighted values dominate the centre term, are nonnegative and match the oracle.
pub fn check_stencil_positivity(
    (channels, frames, mags): &(usize, usize, Vec<f64>),
    stencil: &WeightStencil2D,
) -> Result<(), TestCaseError> {
    let got = apply_weight_2d(&grid_of(*channels, *frames, mags), stencil);
    let want = oracle_stencil(mags, *channels, *frames, &taps_of(stencil));
    for (k, (g, w)) in got.iter().zip(&want).enumerate() {
        ensure(*g >= 0.0, || format!("negative weighted value at {k}"))?;
        ensure(*g >= stencil.center() * mags[k] * (1.0 - 1e-12), || {
            format!("centre not dominated at {k}")
        })?;
        ensure(rel_close(*g, *w, 1e-12), || format!("cell {k}: {g} vs oracle {w}"))?;
    }
    Ok(())
}

pub fn check_stencil_monotonicity(
    (channels, frames, mags): &(usize, usize, Vec<f64>),
    stencil: &WeightStencil2D,
    growth: &[f64],
) -> Result<(), TestCaseError> {
    let bigger: Vec<f64> = mags.iter().zip(growth.iter().cycle()).map(|(v, g)| v + g).collect();
    let a = apply_weight_2d(&grid_of(*channels, *frames, mags), stencil);
    let b = apply_weight_2d(&grid_of(*channels, *frames, &bigger), stencil);
    for (k, (x, y)) in a.iter().zip(&b).enumerate() {
        ensure(*x <= *y * (1.0 + 1e-12), || format!("cell {k}: {x} > {y}"))?;
    }
    Ok(())
}

pub fn check_weighted_ordering(
    (channels, frames, mags): &(usize, usize, Vec<f64>),
    stencil: &WeightStencil2D,
) -> Result<(), TestCaseError> {
    let weighted = apply_weight_2d(&grid_of(*channels, *frames, mags), stencil);
    let order = weighted_ordering(&weighted);
    ensure(order == weighted_ordering(&weighted), || {
        "ordering differs between runs".into()
    })?;
    check_permutation(&order.permutation, weighted.len())?;
    for (i, &k) in order.permutation.iter().enumerate() {
        ensure(order.weighted_values[i] == weighted[k], || {
            format!("rank {i} value mismatch")
        })?;
    }
    for w in order.permutation.windows(2) {
        let (a, b) = (weighted[w[0]], weighted[w[1]]);
        ensure(a > b || (a == b && w[0] < w[1]), || format!("order broken at {w:?}"))?;
    }
    Ok(())
}

pub fn check_weight_1d(entries: &[Complex64], weights: &[f64]) -> Result<(), TestCaseError> {
    let stencil = WeightStencil1D::new(weights.to_vec()).unwrap();
    let got = apply_weight_1d(&CoefficientSequence::new(entries.to_vec()).unwrap(), &stencil);
    let mags: Vec<f64> = entries.iter().map(|c| c.norm()).collect();
    let want = oracle_weight_1d(&mags, weights);
    for (k, (g, w)) in got.iter().zip(&want).enumerate() {
        ensure(rel_close(*g, *w, 1e-12), || format!("entry {k}: {g} vs oracle {w}"))?;
        ensure(*g >= weights[weights.len() / 2] * mags[k] * (1.0 - 1e-12), || {
            format!("centre at {k}")
        })?;
    }
    Ok(())
}

// ---------------------------------------------------------------- DGT case grid

#[derive(Clone, Debug)]
pub struct DgtCase {
    pub name: String,
    pub window: Vec<f64>,
    pub hop: usize,
    pub channels: usize,
    pub len: usize,
}

/// Fixed grid of `(window, a, M, L)` combinations with `L <= 64`.
pub fn dgt_cases() -> Vec<DgtCase> {
    let mut r = rng(7);
    let mut cases = Vec::new();
    for lg in [4usize, 6, 8, 16] {
        let windows: Vec<(&str, Vec<f64>)> = vec![
            ("hann", wthresh::hann_window(lg).unwrap()),
            ("random", (0..lg).map(|_| r.random_range(0.1..1.0)).collect()),
            ("ramp", (0..lg).map(|j| 1.0 + j as f64).collect()),
            ("box", vec![1.0; lg]),
        ];
        for m in [lg, lg + 2, 2 * lg] {
            for a in [1, 2, lg / 2, lg] {
                if a == 0 || a > lg {
                    continue;
                }
                let smallest = lg.div_ceil(a) * a;
                let largest = 64 / a * a;
                for len in [smallest, largest] {
                    if len < lg || len > 64 {
                        continue;
                    }
                    for (wname, w) in &windows {
                        cases.push(DgtCase {
                            name: format!("{wname} Lg={lg} a={a} M={m} L={len}"),
                            window: w.clone(),
                            hop: a,
                            channels: m,
                            len,
                        });
                    }
                }
            }
        }
    }
    cases
}

/// Largest absolute deviation between the fast and brute-force DGT for a
/// random complex signal, with the system window and (if it exists) the dual.
pub fn dgt_case_error(case: &DgtCase, seed: u64) -> f64 {
    let mut r = rng(seed);
    let sys = wthresh::GaborSystem::new(case.window.clone(), case.hop, case.channels, case.len).unwrap();
    let signal: Vec<Complex64> = (0..case.len)
        .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
        .collect();
    let mut worst = 0.0f64;
    let mut windows = vec![case.window.clone()];
    if let Ok(dual) = sys.canonical_dual() {
        windows.push(dual);
    }
    for w in windows {
        let fast = sys.dgt_complex(&signal, &w).unwrap();
        let slow = oracle_dgt(&signal, &w, case.hop, case.channels);
        for (a, b) in fast.data().iter().zip(&slow) {
            worst = worst.max((a - b).norm());
        }
    }
    worst
}

// ---------------------------------------------------------------- approx oracles

/// Discarded-tail Lorentz norm after keeping `kept` flat indices.
pub fn discarded_tail(grid: &CoefficientGrid, kept: &[usize], tau: f64, q: Option<f64>) -> f64 {
    let mut keep = vec![false; grid.len()];
    kept.iter().for_each(|&k| keep[k] = true);
    let rest: Vec<f64> = grid
        .data()
        .iter()
        .zip(&keep)
        .filter(|(_, k)| !**k)
        .map(|(c, _)| c.norm())
        .collect();
    oracle_lorentz(&rest, tau, q)
}

/// `sqrt(sum_taps w |c|^2)` per cell, straight from the definition.
pub fn oracle_neighborhood_energy(grid: &CoefficientGrid, taps: &[(isize, isize, f64)]) -> Vec<f64> {
    let power: Vec<f64> = grid.data().iter().map(|c| c.norm_sqr()).collect();
    oracle_stencil(&power, grid.channels(), grid.frames(), taps)
        .into_iter()
        .map(f64::sqrt)
        .collect()
}

/// Log-spaced integers from `lo` to `hi`, deduplicated.
pub fn log_spaced(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut v: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    v.dedup();
    v
}

/// Least-squares slope of `ln v` against `ln m`, computed from scratch.
pub fn oracle_slope(ms: &[usize], values: &[f64]) -> f64 {
    let xs: Vec<f64> = ms.iter().map(|&m| (m as f64).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// With the identity stencil the weighted ordering is the plain magnitude ordering.
pub fn check_identity_reduction(entries: &[Complex64], channels: usize) -> Result<(), TestCaseError> {
    let channels = channels.clamp(1, entries.len());
    let frames = entries.len() / channels;
    let data = entries[..channels * frames].to_vec();
    let grid = CoefficientGrid::new(channels, frames, data.clone()).unwrap();
    let weighted = weighted_ordering(&apply_weight_2d(&grid, &WeightStencil2D::identity())).permutation;
    let plain = rearrange(&CoefficientSequence::new(data.clone()).unwrap()).permutation;
    ensure(weighted == plain, || {
        "2-D identity ordering differs from magnitude ordering".into()
    })?;
    let seq = CoefficientSequence::new(data).unwrap();
    let one_d = weighted_ordering(&apply_weight_1d(&seq, &WeightStencil1D::identity())).permutation;
    ensure(one_d == plain, || {
        "1-D identity ordering differs from magnitude ordering".into()
    })
}
