//! Composite Gauss-Legendre quadrature for complex integrands.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::{Error, Result, C64};

/// Points per panel.
pub const PANEL_DEGREE: usize = 8;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(PANEL_DEGREE)
            .expect("degree >= 2")
            .as_node_weight_pairs()
            .to_vec()
    })
}

/// `int_a^b f` on `panels` equal panels.
pub fn composite(a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> C64) -> C64 {
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * w;
        let mid = lo + 0.5 * w;
        for &(x, wt) in rule() {
            acc += f(mid + 0.5 * w * x) * (0.5 * w * wt);
        }
    }
    acc
}

/// Vector-valued composite rule: accumulates `f(s, weight)` over all nodes.
pub fn composite_nodes(a: f64, b: f64, panels: usize, mut f: impl FnMut(f64, f64)) {
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * w;
        for &(x, wt) in rule() {
            f(mid + 0.5 * w * x, 0.5 * w * wt);
        }
    }
}

/// Starts with panels of width at most `max_width` and doubles the panel
/// count until two successive values agree to `rel_tol`.
pub fn integrate(
    a: f64,
    b: f64,
    max_width: f64,
    rel_tol: f64,
    max_doublings: u32,
    mut f: impl FnMut(f64) -> C64,
) -> Result<C64> {
    if b <= a {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut panels = ((b - a) / max_width).ceil().max(1.0) as usize;
    let mut prev = composite(a, b, panels, &mut f);
    for _ in 0..max_doublings {
        panels *= 2;
        let next = composite(a, b, panels, &mut f);
        let scale = next.norm().max(prev.norm());
        if (next - prev).norm() <= rel_tol * scale || scale == 0.0 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "no convergence on [{a}, {b}] with {panels} panels"
    )))
}
