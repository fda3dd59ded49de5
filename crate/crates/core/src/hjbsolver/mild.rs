//! Fourier/Mittag-Leffler representation of the linear problem
//! `d^beta_{[t,T)} w - nu w_xx = l`, `w(T) = g`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::solver::TerminalCost;
use crate::error::{Error, Result};
use crate::fracops::{mittag_leffler, FractionalOrder, MittagLefflerParams};
use crate::grid::Field;

/// Modes whose data never exceed this fraction of the largest coefficient
/// are dropped.
const MODE_CUTOFF: f64 = 1e-15;

/// Per mode `k` with `lambda = nu k^2`:
/// `w_k(t) = E_beta(-lambda (T-t)^beta) g_k
///         + int_t^T (s-t)^{beta-1} E_{beta,beta}(-lambda (s-t)^beta) l_k(s) ds`.
///
/// The source is interpolated linearly between grid nodes and integrated
/// against the kernel exactly, via its first two antiderivatives
/// `r^beta E_{beta,beta+1}` and `r^{beta+1} E_{beta,beta+2}`.
pub fn mild_solution_linear(g: &TerminalCost, source: &Field, nu: f64, beta: FractionalOrder) -> Result<Field> {
    let time = source.time;
    let space = source.space;
    if g.grid != space {
        return Err(Error::param("g", "terminal cost lives on a different grid"));
    }
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::param("nu", format!("must be nonnegative, got {nu}")));
    }
    let nx = space.n_cells();
    let n_nodes = time.n_nodes();
    let last = time.n_steps();
    let dt = time.dt();
    let b = beta.value();

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(nx);
    let inv = planner.plan_fft_inverse(nx);
    let transform = |v: &[f64]| -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fwd.process(&mut buf);
        buf
    };
    let g_hat = transform(&g.values);
    let l_hat: Vec<Vec<Complex64>> = (0..n_nodes).map(|n| transform(source.slice(n))).collect();

    let scale = g_hat.iter().chain(l_hat.iter().flatten()).fold(0.0f64, |a, c| a.max(c.norm()));
    let mut w_hat = vec![vec![Complex64::new(0.0, 0.0); nx]; n_nodes];
    if scale == 0.0 {
        return Ok(Field::zeros(time, space));
    }

    let ml = |gamma: f64, z: f64| mittag_leffler(MittagLefflerParams::new(b, gamma, z));
    for j in 0..=nx / 2 {
        let partner = (nx - j) % nx;
        let active = [j, partner]
            .iter()
            .any(|&m| g_hat[m].norm() > MODE_CUTOFF * scale || l_hat.iter().any(|l| l[m].norm() > MODE_CUTOFF * scale));
        if !active {
            continue;
        }
        let k = std::f64::consts::TAU * j as f64 / space.length();
        let lambda = nu * k * k;
        // Kernel data at r_m = m dt.
        let mut e1 = Vec::with_capacity(n_nodes);
        let mut q = Vec::with_capacity(n_nodes);
        let mut p = Vec::with_capacity(n_nodes);
        for m in 0..n_nodes {
            let r = m as f64 * dt;
            let rb = r.powf(b);
            let z = -lambda * rb;
            e1.push(ml(1.0, z)?);
            q.push(rb * ml(b + 1.0, z)?);
            p.push(rb * r * ml(b + 2.0, z)?);
        }
        // Hat-function weights on [m dt, (m+1) dt] for the left and right node.
        let left: Vec<f64> = (0..last).map(|m| (p[m + 1] - p[m] - dt * q[m]) / dt).collect();
        let right: Vec<f64> = (0..last).map(|m| (dt * q[m + 1] - p[m + 1] + p[m]) / dt).collect();

        let modes: &[usize] = if partner == j { &[j] } else { &[j, partner] };
        for &mode in modes {
            for n in 0..n_nodes {
                let mut acc = g_hat[mode] * e1[last - n];
                for s in n..last {
                    acc += l_hat[s][mode] * left[s - n] + l_hat[s + 1][mode] * right[s - n];
                }
                w_hat[n][mode] = acc;
            }
        }
    }

    let mut out = Field::zeros(time, space);
    for (n, mut row) in w_hat.into_iter().enumerate() {
        inv.process(&mut row);
        for (o, c) in out.slice_mut(n).iter_mut().zip(&row) {
            *o = c.re / nx as f64;
        }
    }
    Ok(out)
}
