//! Uniform rectangular grids, the Poisson split check and square-membrane modes.

use std::f64::consts::PI;

use super::DeError;

const BOUNDARY_TOL: f64 = 1e-12;

/// Node values on a uniform grid with equal spacing in both axes.
/// `values[j * nx + i]` sits at `(x(i), y(j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
    h: f64,
    values: Vec<f64>,
}

fn node(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

impl Grid2D {
    pub fn new(
        x_range: (f64, f64),
        y_range: (f64, f64),
        nx: usize,
        ny: usize,
        values: Vec<f64>,
    ) -> Result<Self, DeError> {
        if nx < 3 || ny < 3 {
            return Err(DeError::InvalidParameter(format!("grid {nx}x{ny} needs at least 3 nodes per axis")));
        }
        if !(x_range.1 > x_range.0 && y_range.1 > y_range.0) {
            return Err(DeError::InvalidParameter("empty grid range".into()));
        }
        if values.len() != nx * ny {
            return Err(DeError::InvalidParameter(format!(
                "{} values for a {nx}x{ny} grid",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DeError::InvalidParameter("non-finite node value".into()));
        }
        let hx = (x_range.1 - x_range.0) / (nx - 1) as f64;
        let hy = (y_range.1 - y_range.0) / (ny - 1) as f64;
        if (hx - hy).abs() > 1e-12 * hx.max(hy) {
            return Err(DeError::NonUniformGrid { hx, hy });
        }
        Ok(Grid2D {
            x_range,
            y_range,
            nx,
            ny,
            h: hx,
            values,
        })
    }

    pub fn sample(
        x_range: (f64, f64),
        y_range: (f64, f64),
        nx: usize,
        ny: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, DeError> {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let y = node(y_range.0, y_range.1, j, ny);
            for i in 0..nx {
                values.push(f(node(x_range.0, x_range.1, i, nx), y));
            }
        }
        Self::new(x_range, y_range, nx, ny, values)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn x_range(&self) -> (f64, f64) {
        self.x_range
    }
    pub fn y_range(&self) -> (f64, f64) {
        self.y_range
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn x(&self, i: usize) -> f64 {
        node(self.x_range.0, self.x_range.1, i, self.nx)
    }
    pub fn y(&self, j: usize) -> f64 {
        node(self.y_range.0, self.y_range.1, j, self.ny)
    }
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, a: f64) -> Grid2D {
        Grid2D {
            values: self.values.iter().map(|v| a * v).collect(),
            ..self.clone()
        }
    }

    fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    fn check_boundary(&self) -> Result<(), DeError> {
        for j in 0..self.ny {
            for i in 0..self.nx {
                let value = self.get(i, j);
                if self.is_boundary(i, j) && value.abs() > BOUNDARY_TOL {
                    return Err(DeError::BoundaryViolation { i, j, value });
                }
            }
        }
        Ok(())
    }

    fn d2x(&self, i: usize, j: usize) -> f64 {
        (self.get(i + 1, j) - 2.0 * self.get(i, j) + self.get(i - 1, j)) / (self.h * self.h)
    }

    fn d2y(&self, i: usize, j: usize) -> f64 {
        (self.get(i, j + 1) - 2.0 * self.get(i, j) + self.get(i, j - 1)) / (self.h * self.h)
    }

    fn interior(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.ny - 1).flat_map(move |j| (1..self.nx - 1).map(move |i| (i, j)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonSplitReport {
    /// `max |u_xx + f/2|` with `f = -(u_xx + u_yy)`.
    pub max_split_residual: f64,
    /// `max |u_xx - u_yy|`.
    pub max_asymmetry: f64,
    /// `h^2 * sum (u_xx - u_yy)` over interior nodes.
    pub asymmetry_integral: f64,
    pub max_abs_f: f64,
    pub max_abs_u: f64,
}

impl PoissonSplitReport {
    /// The split `u_xx = u_yy = -f/2` holds to within `rel_tol * max|f|`.
    pub fn split_holds(&self, rel_tol: f64) -> bool {
        self.max_split_residual <= rel_tol * self.max_abs_f
    }
}

/// Forms `f = -Δ_h u` on interior nodes and measures how far `u` is from
/// splitting the Laplacian evenly between the two axes.
pub fn poisson_split_check(u: &Grid2D) -> Result<PoissonSplitReport, DeError> {
    if u.nx < 5 || u.ny < 5 {
        return Err(DeError::InvalidParameter(format!("grid {}x{} needs at least 5 nodes per axis", u.nx, u.ny)));
    }
    u.check_boundary()?;
    let mut report = PoissonSplitReport {
        max_split_residual: 0.0,
        max_asymmetry: 0.0,
        asymmetry_integral: 0.0,
        max_abs_f: 0.0,
        max_abs_u: u.max_abs(),
    };
    let mut sum = 0.0;
    for (i, j) in u.interior() {
        let (uxx, uyy) = (u.d2x(i, j), u.d2y(i, j));
        let f = -(uxx + uyy);
        let asym = uxx - uyy;
        report.max_split_residual = report.max_split_residual.max((uxx + f / 2.0).abs());
        report.max_asymmetry = report.max_asymmetry.max(asym.abs());
        report.max_abs_f = report.max_abs_f.max(f.abs());
        sum += asym;
    }
    report.asymmetry_integral = sum * u.h * u.h;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenMode {
    pub l: f64,
    pub k: u32,
    pub lambda: f64,
    pub amplitude: f64,
}

impl EigenMode {
    pub fn new(l: f64, k: u32, amplitude: f64) -> Result<Self, DeError> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(DeError::InvalidParameter(format!("L = {l} must be positive")));
        }
        if k == 0 {
            return Err(DeError::InvalidParameter("k must be at least 1".into()));
        }
        if !amplitude.is_finite() {
            return Err(DeError::InvalidParameter("non-finite amplitude".into()));
        }
        let w = k as f64 * PI / l;
        Ok(EigenMode {
            l,
            k,
            lambda: 2.0 * w * w,
            amplitude,
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let w = self.k as f64 * PI / self.l;
        self.amplitude * (w * x).sin() * (w * y).sin()
    }

    pub fn sample(&self, grid_n: usize) -> Result<Grid2D, DeError> {
        if grid_n < 5 {
            return Err(DeError::InvalidParameter(format!("grid_n = {grid_n} must be at least 5")));
        }
        let r = (-self.l, self.l);
        Grid2D::sample(r, r, grid_n, grid_n, |x, y| self.eval(x, y))
    }
}

/// The mode `C sin(k pi x / L) sin(k pi y / L)` on `[-L, L]^2`.
pub fn membrane_modes(l: f64, k: u32, amplitude: f64, grid_n: usize) -> Result<(EigenMode, Grid2D), DeError> {
    let mode = EigenMode::new(l, k, amplitude)?;
    let grid = mode.sample(grid_n)?;
    Ok((mode, grid))
}

/// `max |Δ_h u + lambda u|` over interior nodes.
pub fn membrane_residual(mode: &EigenMode, u: &Grid2D) -> Result<f64, DeError> {
    let r = (-mode.l, mode.l);
    if u.x_range != r || u.y_range != r {
        return Err(DeError::GridMismatch(format!(
            "grid spans {:?} x {:?}, mode needs [{}, {}]^2",
            u.x_range, u.y_range, r.0, r.1
        )));
    }
    if u.nx != u.ny {
        return Err(DeError::GridMismatch(format!("grid is {}x{}, not square", u.nx, u.ny)));
    }
    Ok(u
        .interior()
        .map(|(i, j)| (u.d2x(i, j) + u.d2y(i, j) + mode.lambda * u.get(i, j)).abs())
        .fold(0.0, f64::max))
}

/// Nodewise sum of the sampled modes.
pub fn superpose(modes: &[EigenMode], grid_n: usize) -> Result<Grid2D, DeError> {
    let first = modes.first().ok_or(DeError::NoModes)?;
    if let Some(m) = modes.iter().find(|m| m.l != first.l) {
        return Err(DeError::MixedL(first.l, m.l));
    }
    let mut acc = first.sample(grid_n)?;
    for m in &modes[1..] {
        let g = m.sample(grid_n)?;
        for (a, b) in acc.values.iter_mut().zip(&g.values) {
            *a += b;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_mode(p: f64, q: f64, n: usize) -> Grid2D {
        Grid2D::sample((0.0, 1.0), (0.0, 1.0), n, n, |x, y| (p * PI * x).sin() * (q * PI * y).sin()).unwrap()
    }

    #[test]
    fn symmetric_mode_splits() {
        let u = unit_mode(1.0, 1.0, 101);
        let r = poisson_split_check(&u).unwrap();
        let h = u.h();
        assert!(r.max_split_residual <= 10.0 * h * h);
        assert!(r.split_holds(0.01));
        assert!(r.asymmetry_integral.abs() <= 1e-8);
    }

    #[test]
    fn asymmetric_mode_is_flagged() {
        let u = unit_mode(1.0, 2.0, 101);
        let r = poisson_split_check(&u).unwrap();
        let expected = 3.0 * PI * PI * r.max_abs_u;
        assert!(r.max_asymmetry >= 0.9 * expected);
        assert!(r.max_asymmetry <= 1.01 * expected);
        assert!(!r.split_holds(0.01));
        assert!(r.asymmetry_integral.abs() <= 1e-8);
    }

    #[test]
    fn asymmetry_integral_vanishes_for_products() {
        let g = |x: f64| x * (1.0 - x) * (1.0 + 3.0 * x);
        let gh = |x: f64| x * x * (1.0 - x);
        for n in [21, 41, 81] {
            let same = Grid2D::sample((0.0, 1.0), (0.0, 1.0), n, n, |x, y| g(x) * g(y)).unwrap();
            assert!(poisson_split_check(&same).unwrap().asymmetry_integral.abs() <= 1e-10);
            let mixed = Grid2D::sample((0.0, 1.0), (0.0, 1.0), n, n, |x, y| g(x) * gh(y)).unwrap();
            assert!(poisson_split_check(&mixed).unwrap().max_asymmetry > 0.1);
        }
    }

    #[test]
    fn zero_field() {
        let u = Grid2D::sample((0.0, 1.0), (0.0, 1.0), 11, 11, |_, _| 0.0).unwrap();
        let r = poisson_split_check(&u).unwrap();
        assert_eq!(r.max_split_residual, 0.0);
        assert_eq!(r.max_asymmetry, 0.0);
        assert_eq!(r.asymmetry_integral, 0.0);
    }

    #[test]
    fn split_check_rejections() {
        let bumped = Grid2D::sample((0.0, 1.0), (0.0, 1.0), 11, 11, |x, _| x).unwrap();
        assert!(matches!(poisson_split_check(&bumped), Err(DeError::BoundaryViolation { .. })));
        let small = unit_mode(1.0, 1.0, 4);
        assert!(matches!(poisson_split_check(&small), Err(DeError::InvalidParameter(_))));
        let stretched = Grid2D::sample((0.0, 2.0), (0.0, 1.0), 11, 11, |_, _| 0.0);
        assert!(matches!(stretched, Err(DeError::NonUniformGrid { .. })));
    }

    #[test]
    fn membrane_eigenvalues() {
        let (m1, _) = membrane_modes(1.0, 1, 1.0, 11).unwrap();
        assert_eq!(m1.lambda, 2.0 * PI * PI);
        assert!((m1.lambda - 19.739).abs() < 1e-3);
        let (m2, _) = membrane_modes(1.0, 2, 1.0, 11).unwrap();
        assert_eq!(m2.lambda, 8.0 * PI * PI);
        assert!(membrane_modes(0.0, 1, 1.0, 11).is_err());
        assert!(membrane_modes(1.0, 0, 1.0, 11).is_err());
        assert!(membrane_modes(1.0, 1, 1.0, 4).is_err());
    }

    #[test]
    fn membrane_boundary_is_zero() {
        for k in 1..=5 {
            let (_, g) = membrane_modes(1.5, k, 2.0, 41).unwrap();
            let n = g.nx();
            for t in 0..n {
                for (i, j) in [(t, 0), (t, n - 1), (0, t), (n - 1, t)] {
                    assert!(g.get(i, j).abs() <= 1e-12, "k={k} ({i},{j}) = {}", g.get(i, j));
                }
            }
        }
    }

    #[test]
    fn membrane_residual_second_order() {
        let res: Vec<f64> = [51, 101, 201]
            .iter()
            .map(|&n| {
                let (m, g) = membrane_modes(1.0, 1, 1.0, n).unwrap();
                membrane_residual(&m, &g).unwrap()
            })
            .collect();
        assert!(res[0] <= 0.05, "{res:?}");
        for w in res.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((1.8..=2.2).contains(&order), "{res:?}");
        }
        let (m0, g0) = membrane_modes(1.0, 1, 0.0, 51).unwrap();
        assert_eq!(membrane_residual(&m0, &g0).unwrap(), 0.0);
    }

    #[test]
    fn membrane_residual_mismatch() {
        let (m, _) = membrane_modes(1.0, 1, 1.0, 21).unwrap();
        let (_, other) = membrane_modes(2.0, 1, 1.0, 21).unwrap();
        assert!(matches!(membrane_residual(&m, &other), Err(DeError::GridMismatch(_))));
    }

    #[test]
    fn superposition() {
        let (m1, g1) = membrane_modes(1.0, 1, 1.5, 31).unwrap();
        assert_eq!(superpose(&[m1], 31).unwrap(), g1);

        let m2 = EigenMode::new(1.0, 2, -0.5).unwrap();
        let sum = superpose(&[m1, m2], 31).unwrap();
        let n = sum.nx();
        for t in 0..n {
            for (i, j) in [(t, 0), (t, n - 1), (0, t), (n - 1, t)] {
                assert!(sum.get(i, j).abs() <= 1e-12);
            }
        }

        let a = 3.0;
        let scaled: Vec<EigenMode> = [m1, m2]
            .iter()
            .map(|m| EigenMode::new(m.l, m.k, a * m.amplitude).unwrap())
            .collect();
        let lhs = superpose(&scaled, 31).unwrap();
        let rhs = sum.scaled(a);
        for (x, y) in lhs.values().iter().zip(rhs.values()) {
            assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }

        let other = EigenMode::new(2.0, 1, 1.0).unwrap();
        assert_eq!(superpose(&[m1, other], 31), Err(DeError::MixedL(1.0, 2.0)));
        assert_eq!(superpose(&[], 31), Err(DeError::NoModes));
    }
}
