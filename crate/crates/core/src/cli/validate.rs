//! Closed-form battery for the fractional operators, Mittag-Leffler and
//! Wasserstein routines.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::fracops::{build_stencil, grid_pairing, ml1, Direction, FractionalOrder, StencilKind};
use crate::grid::SpaceGrid;
use crate::special::{erfc, gamma};
use crate::subdiffusion::wasserstein1;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BatteryRow {
    pub check: String,
    pub parameter: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl BatteryRow {
    fn new(check: &str, parameter: String, measured: f64, tolerance: f64) -> Self {
        Self { check: check.to_string(), parameter, measured, tolerance, passed: measured <= tolerance }
    }
}

const ORDERS: [f64; 4] = [0.3, 0.5, 0.7, 0.9];
const NODES: usize = 400;
const POWER_TOL: f64 = 1e-2;

/// Relative error at `t = 1` of a stencil applied to `t^p` against `exact`.
fn power_error(order: f64, kind: StencilKind, p: i32, exact: f64) -> Result<f64> {
    let dt = 1.0 / (NODES - 1) as f64;
    let s = build_stencil(FractionalOrder::new(order)?, kind, Direction::Forward, NODES, dt)?;
    let f: Vec<f64> = (0..NODES).map(|n| (n as f64 * dt).powi(p)).collect();
    let got = *s.apply(&f)?.last().expect("nonempty");
    Ok(if exact == 0.0 { got.abs() } else { (got / exact - 1.0).abs() })
}

pub fn run_battery() -> Result<Vec<BatteryRow>> {
    let mut rows = Vec::new();
    for &mu in &ORDERS {
        for p in 0..3 {
            let pf = p as f64;
            let rl = gamma(pf + 1.0) / gamma(pf + 1.0 - mu);
            let param = format!("mu={mu} f=t^{p}");
            rows.push(BatteryRow::new(
                "rl_derivative_power",
                param.clone(),
                power_error(mu, StencilKind::RlDerivative, p, rl)?,
                POWER_TOL,
            ));
            let caputo = if p == 0 { 0.0 } else { rl };
            rows.push(BatteryRow::new(
                "caputo_power",
                param.clone(),
                power_error(mu, StencilKind::CaputoDerivative, p, caputo)?,
                POWER_TOL,
            ));
            let int = gamma(pf + 1.0) / gamma(pf + 1.0 + mu);
            rows.push(BatteryRow::new(
                "rl_integral_power",
                format!("beta={mu} f=t^{p}"),
                power_error(mu, StencilKind::RlIntegral, p, int)?,
                POWER_TOL,
            ));
        }
        // <D_fwd u, f> = <u, D_bwd f>.
        let n = 200;
        let dt = 1.0 / (n - 1) as f64;
        let u: Vec<f64> = (0..n).map(|i| (3.1 * i as f64 * dt).sin() + 0.2).collect();
        let f: Vec<f64> = (0..n).map(|i| (1.7 * i as f64 * dt).cos() - 0.4 * i as f64 * dt).collect();
        let order = FractionalOrder::new(mu)?;
        let fwd = build_stencil(order, StencilKind::RlDerivative, Direction::Forward, n, dt)?;
        let bwd = build_stencil(order, StencilKind::RlDerivative, Direction::Backward, n, dt)?;
        let lhs = grid_pairing(&fwd.apply(&u)?, &f, dt);
        let rhs = grid_pairing(&u, &bwd.apply(&f)?, dt);
        let scale = grid_pairing(&u, &u, dt).sqrt()
            * grid_pairing(&f, &f, dt).sqrt()
            * fwd.weights().iter().map(|w| w.abs()).sum::<f64>();
        rows.push(BatteryRow::new("adjointness", format!("mu={mu}"), (lhs - rhs).abs() / scale, 1e-13));
    }

    let zs: Vec<f64> = (0..=250).map(|k| -20.0 + 0.1 * k as f64).collect();
    let mut e1 = 0.0f64;
    let mut ehalf = 0.0f64;
    for &z in &zs {
        e1 = e1.max((ml1(1.0, z)? / z.exp() - 1.0).abs());
        let exact = (z * z).exp() * erfc(-z);
        ehalf = ehalf.max((ml1(0.5, z)? / exact - 1.0).abs());
    }
    rows.push(BatteryRow::new("mittag_leffler", "alpha=1 z in [-20,5]".into(), e1, 1e-10));
    rows.push(BatteryRow::new("mittag_leffler", "alpha=1/2 z in [-20,5]".into(), ehalf, 1e-10));

    let grid = SpaceGrid::new(0.0, 1.0, 100)?;
    let mut a = vec![0.0; 100];
    let mut b = vec![0.0; 100];
    a[10] = 100.0;
    b[37] = 100.0;
    let w = wasserstein1(&a, &b, grid.dx())?;
    rows.push(BatteryRow::new("wasserstein_diracs", "shift=0.27".into(), (w - 0.27).abs(), 1e-12));
    Ok(rows)
}

pub fn write_battery_csv<W: Write>(out: W, rows: &[BatteryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
