//! Classical (order one) reference solvers on dense matrices, written
//! independently of the library's sparse code paths.

use fracmfg::grid::{Field, SpaceGrid};

/// Gaussian elimination with partial pivoting on a row-major `n x n` matrix.
pub fn dense_solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs())).unwrap();
        if piv != c {
            for k in 0..n {
                a.swap(c * n + k, piv * n + k);
            }
            b.swap(c, piv);
        }
        let d = a[c * n + c];
        for r in c + 1..n {
            let f = a[r * n + c] / d;
            if f == 0.0 {
                continue;
            }
            for k in c..n {
                a[r * n + k] -= f * a[c * n + k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    x
}

/// Dense `A m = nu m'' - (b m)'` from upwind face fluxes with averaged face
/// drift and a centered diffusive flux, periodic.
pub fn fv_generator(drift: &[f64], nu: f64, dx: f64) -> Vec<f64> {
    let n = drift.len();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        let j = (i + 1) % n;
        let bf = 0.5 * (drift[i] + drift[j]);
        // flux through face i+1/2 leaves cell i and enters cell j
        let from_i = bf.max(0.0) + nu / dx;
        let from_j = bf.min(0.0) - nu / dx;
        a[i * n + i] -= from_i / dx;
        a[i * n + j] -= from_j / dx;
        a[j * n + i] += from_i / dx;
        a[j * n + j] += from_j / dx;
    }
    a
}

/// Implicit Euler for `m_t = nu m'' - (b m)'` with the drift taken at the
/// new time level.
pub fn implicit_fp(m0: &[f64], drift: &Field, nu: f64) -> Field {
    let (time, space) = (drift.time, drift.space);
    let n = space.n_cells();
    let dt = time.dt();
    let mut m = Field::zeros(time, space);
    m.slice_mut(0).copy_from_slice(m0);
    for k in 0..time.n_steps() {
        let a = fv_generator(drift.slice(k + 1), nu, space.dx());
        let mut lhs: Vec<f64> = a.iter().map(|v| -dt * v).collect();
        for i in 0..n {
            lhs[i * n + i] += 1.0;
        }
        let next = dense_solve(lhs, m.slice(k).to_vec());
        m.slice_mut(k + 1).copy_from_slice(&next);
    }
    m
}

fn truncated_h(p: f64, u_max: f64) -> f64 {
    if p.abs() <= u_max {
        0.5 * p * p
    } else {
        u_max * p.abs() - 0.5 * u_max * u_max
    }
}

fn grad(v: &[f64], dx: f64) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| (v[(i + 1) % n] - v[(i + n - 1) % n]) / (2.0 * dx)).collect()
}

/// Implicit Euler backward for `-v_t - nu v'' + H(v') = G`, `v(T) = g`, with
/// the truncated quadratic Hamiltonian; each step solved by Newton's method
/// to round-off. Returns the value and the feedback drift `-clamp(v')`.
pub fn implicit_hjb(g: &[f64], source: &Field, nu: f64, u_max: f64) -> (Field, Field) {
    let (time, space) = (source.time, source.space);
    let n = space.n_cells();
    let dx = space.dx();
    let dt = time.dt();
    let mut v = Field::zeros(time, space);
    v.slice_mut(time.n_steps()).copy_from_slice(g);
    for k in (0..time.n_steps()).rev() {
        let rhs: Vec<f64> = v.slice(k + 1).iter().zip(source.slice(k)).map(|(a, s)| a + dt * s).collect();
        let mut x = v.slice(k + 1).to_vec();
        for _ in 0..50 {
            let p = grad(&x, dx);
            let mut jac = vec![0.0; n * n];
            let mut res = vec![0.0; n];
            let s = dt * nu / (dx * dx);
            for i in 0..n {
                let (l, r) = ((i + n - 1) % n, (i + 1) % n);
                res[i] = x[i] - s * (x[l] - 2.0 * x[i] + x[r]) + dt * truncated_h(p[i], u_max) - rhs[i];
                let hp = p[i].clamp(-u_max, u_max) * dt / (2.0 * dx);
                jac[i * n + i] += 1.0 + 2.0 * s;
                jac[i * n + l] += -s - hp;
                jac[i * n + r] += -s + hp;
            }
            let step = dense_solve(jac, res);
            let size = step.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            x.iter_mut().zip(&step).for_each(|(a, d)| *a -= d);
            if size <= 1e-15 * x.iter().fold(1.0f64, |a, b| a.max(b.abs())) {
                break;
            }
        }
        v.slice_mut(k).copy_from_slice(&x);
    }
    let mut drift = Field::zeros(time, space);
    for k in 0..time.n_nodes() {
        let p = grad(v.slice(k), dx);
        for (d, q) in drift.slice_mut(k).iter_mut().zip(p) {
            *d = -q.clamp(-u_max, u_max);
        }
    }
    (v, drift)
}

/// Periodic Gaussian mollification with a kernel of unit discrete mass.
pub fn mollify(m: &[f64], space: &SpaceGrid, eps: f64) -> Vec<f64> {
    let n = m.len();
    let dx = space.dx();
    let l = space.length();
    let kernel: Vec<f64> = (0..n)
        .map(|j| {
            let d = (j as f64 * dx).min(l - j as f64 * dx);
            (-0.5 * (d / eps).powi(2)).exp()
        })
        .collect();
    let total: f64 = kernel.iter().sum::<f64>() * dx;
    (0..n).map(|i| (0..n).map(|j| kernel[(i + n - j) % n] * m[j]).sum::<f64>() * dx / total).collect()
}

/// Classical MFG path: `iters` damped Picard updates (the first undamped)
/// with smoothed local coupling `kappa (rho_eps * m)`.
#[allow(clippy::too_many_arguments)]
pub fn classical_mfg_path(
    m0: &[f64],
    g: &[f64],
    time: fracmfg::grid::TimeGrid,
    space: SpaceGrid,
    nu: f64,
    kappa: f64,
    eps: f64,
    u_max: f64,
    damping: f64,
    iters: usize,
) -> (Field, Field) {
    let mut m = Field::zeros(time, space);
    for k in 0..time.n_nodes() {
        m.slice_mut(k).copy_from_slice(m0);
    }
    let mut value = None;
    for it in 1..=iters {
        let mut cost = Field::zeros(time, space);
        for k in 0..time.n_nodes() {
            let s: Vec<f64> = mollify(m.slice(k), &space, eps).into_iter().map(|v| kappa * v).collect();
            cost.slice_mut(k).copy_from_slice(&s);
        }
        let (v, drift) = implicit_hjb(g, &cost, nu, u_max);
        let image = implicit_fp(m0, &drift, nu);
        let theta = if it == 1 { 1.0 } else { damping };
        for (a, b) in m.values.iter_mut().zip(&image.values) {
            *a = (1.0 - theta) * *a + theta * b;
        }
        value = Some(v);
    }
    (value.unwrap(), m)
}
