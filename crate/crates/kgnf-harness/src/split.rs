//! Three-way frequency split of `beta` into a piece near `zeta = 0`, a piece
//! near `|zeta| = sqrt 8` and the remainder.

use kgnf::beta::SQRT8;
use kgnf::{BetaProfile, Grid, Window};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone)]
pub struct BetaSplit {
    pub near0: BetaProfile,
    pub near_sqrt8: BetaProfile,
    pub far: BetaProfile,
    pub r0: f64,
    pub r8: f64,
}

/// Splits with the smooth cutoffs `theta(|zeta|/r0)` and `theta(||zeta| - sqrt 8|/r8)`.
/// The cutoffs are supported in `|zeta| <= 2 r0` and `||zeta| - sqrt 8| <= 2 r8`.
pub fn split_beta(beta: &BetaProfile, r0: f64, r8: f64) -> Result<BetaSplit> {
    if !(r0 > 0.0 && r0 < 0.3 && r8 > 0.0 && r8 < 0.3) {
        return Err(HarnessError::Config(format!(
            "split radii must lie in (0, 0.3), got r0={r0}, r8={r8}"
        )));
    }
    if 2.0 * (r0 + r8) >= SQRT8 {
        return Err(HarnessError::Config("split cutoffs overlap".into()));
    }
    Ok(BetaSplit {
        near0: beta.windowed(Window::LowPass { radius: r0 }),
        near_sqrt8: beta.windowed(Window::Shell {
            center: SQRT8,
            radius: r8,
        }),
        far: beta.windowed(Window::Far { r0, r8 }),
        r0,
        r8,
    })
}

impl BetaSplit {
    pub fn pieces(&self) -> [(&'static str, &BetaProfile); 3] {
        [
            ("near0", &self.near0),
            ("near_sqrt8", &self.near_sqrt8),
            ("far", &self.far),
        ]
    }

    /// Relative `l^2` reconstruction error of the transform on the wavenumbers of `grid`.
    pub fn reconstruction_error(&self, beta: &BetaProfile, grid: &Grid) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for xi in grid.wavenumbers() {
            let whole = beta.transform(xi);
            let sum =
                self.near0.transform(xi) + self.near_sqrt8.transform(xi) + self.far.transform(xi);
            num += (whole - sum).norm_sqr();
            den += whole.norm_sqr();
        }
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}
