//! Numerical defaults shared by the library and the command-line front end.
//!
//! Every grid size, tolerance and iteration limit that is not an explicit
//! argument lives here so the CLI can expose and override it in one place.

/// Float verdict threshold is `FLOAT_TOL_SCALE * max(1, max |c_j|)`.
pub const FLOAT_TOL_SCALE: f64 = 1e-12;

/// Tolerance on the normalization `c_0 = 1` for float sequences.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Default tail tolerance for the compounding transforms.
pub const TAIL_TOL: f64 = 1e-12;

/// Residual tolerance for `psi_p(B) = z` in generating-function evaluation.
pub const GENFUN_TOL: f64 = 1e-13;

/// Continuation: halve the step when Newton needs more than this.
pub const NEWTON_MAX_ITER: usize = 8;

/// Continuation fails once the path step drops below this (path units).
pub const MIN_STEP: f64 = 1e-12;

/// Paths passing within `DETOUR_RADIUS * z_p` of the cut tip are rerouted.
pub const DETOUR_RADIUS: f64 = 0.05;

/// Pick-scan violation threshold.
pub const PICK_TOL: f64 = 1e-12;

/// Grid resolution of the default Pick-scan rectangle.
pub const SCAN_RESOLUTION: usize = 128;

/// Truncated series are only evaluated on `|z| <= SERIES_RADIUS_FRACTION * R`.
pub const SERIES_RADIUS_FRACTION: f64 = 0.9;

/// Quadrature nodes for moment integrals.
pub const N_QUAD: usize = 512;

/// Gauss-Legendre nodes per panel in composite rules.
pub const PANEL_ORDER: usize = 16;

/// Root-solve tolerance for `w_p`.
pub const WP_TOL: f64 = 1e-14;

/// Angular grid of the canonical-density sup estimate on the boundary of
/// the conformal disk: at least `RHO_GRID_ANGLES` points and
/// `RHO_GRID_ANGLES_PER_TERM` per series term.
pub const RHO_GRID_ANGLES: usize = 181;
pub const RHO_GRID_ANGLES_PER_TERM: usize = 16;

/// Largest spectral moment the Monte Carlo module accepts.
pub const SPECTRA_MAX_MOMENT: usize = 12;

/// Environment variable holding the CLI's default precision mode.
pub const PRECISION_ENV: &str = "HAUSDORFF_PRECISION";
