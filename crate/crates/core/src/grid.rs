//! Uniform collocated 2D grid, scalar/vector field storage, and the discrete
//! L2 machinery (trapezoidal inner products, norms, zero-mean projection).
//!
//! Nodes include the boundary: node `(i, j)` sits at
//! `(x0 + i*hx, y0 + j*hy)` with `0 <= i < nx`, `0 <= j < ny`. Values are
//! stored row-major (`j * nx + i`). Fields are value-semantic; every
//! operation reads its inputs and produces fresh outputs.

use crate::error::Error;

/// Boundary-condition tag carried by every scalar field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    /// Homogeneous Dirichlet: boundary node values are exactly zero.
    DirichletZero,
    /// Homogeneous Neumann: zero normal derivative (mirrored ghosts).
    NeumannZero,
}

/// Uniform rectangular grid with `nx * ny` nodes including the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x0: f64,
    pub y0: f64,
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(x0: f64, y0: f64, lx: f64, ly: f64, nx: usize, ny: usize) -> Self {
        assert!(nx >= 3 && ny >= 3, "need at least 3 nodes per direction");
        assert!(lx > 0.0 && ly > 0.0, "extent must be positive");
        Grid {
            x0,
            y0,
            lx,
            ly,
            nx,
            ny,
        }
    }

    /// Unit square `(0,1)^2`.
    pub fn unit_square(n: usize) -> Self {
        Grid::new(0.0, 0.0, 1.0, 1.0, n, n)
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        self.lx / (self.nx - 1) as f64
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        self.ly / (self.ny - 1) as f64
    }

    /// Smallest spacing; the mesh width used by the spatial stabilization.
    #[inline]
    pub fn h_min(&self) -> f64 {
        self.hx().min(self.hy())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx()
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy()
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Trapezoidal quadrature weight of node `(i, j)` (without the `hx*hy`
    /// factor): 1 in the interior, 1/2 on edges, 1/4 at corners.
    #[inline]
    pub fn quad_weight(&self, i: usize, j: usize) -> f64 {
        let wx = if i == 0 || i == self.nx - 1 { 0.5 } else { 1.0 };
        let wy = if j == 0 || j == self.ny - 1 { 0.5 } else { 1.0 };
        wx * wy
    }
}

/// Scalar grid function with a boundary-condition tag.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    bc: BcKind,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid, bc: BcKind) -> Self {
        ScalarField {
            grid,
            bc,
            values: vec![0.0; grid.len()],
        }
    }

    /// Sample `f(x, y)` at the nodes. Dirichlet fields get their boundary
    /// zeroed regardless of `f`.
    pub fn from_fn(grid: Grid, bc: BcKind, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = ScalarField::zeros(grid, bc);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                out.values[grid.idx(i, j)] = f(grid.x(i), grid.y(j));
            }
        }
        out.enforce_bc();
        out
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn bc(&self) -> BcKind {
        self.bc
    }

    pub fn set_bc(&mut self, bc: BcKind) {
        self.bc = bc;
        self.enforce_bc();
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.idx(i, j);
        self.values[k] = v;
    }

    /// Re-assert the Dirichlet invariant (boundary values exactly zero).
    pub fn enforce_bc(&mut self) {
        if self.bc == BcKind::DirichletZero {
            let (nx, ny) = (self.grid.nx, self.grid.ny);
            for i in 0..nx {
                self.values[self.grid.idx(i, 0)] = 0.0;
                self.values[self.grid.idx(i, ny - 1)] = 0.0;
            }
            for j in 0..ny {
                self.values[self.grid.idx(0, j)] = 0.0;
                self.values[self.grid.idx(nx - 1, j)] = 0.0;
            }
        }
    }

    /// `self + c * other`, nodewise.
    pub fn add_scaled(&self, c: f64, other: &ScalarField) -> ScalarField {
        debug_assert_eq!(self.grid, other.grid);
        let mut out = self.clone();
        for (o, v) in out.values.iter_mut().zip(other.values.iter()) {
            *o += c * v;
        }
        out
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= c;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Two-component vector field; both components share one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn zeros(grid: Grid, bc: BcKind) -> Self {
        VectorField {
            x: ScalarField::zeros(grid, bc),
            y: ScalarField::zeros(grid, bc),
        }
    }

    pub fn from_fn(grid: Grid, bc: BcKind, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let fx = |x: f64, y: f64| f(x, y).0;
        let fy = |x: f64, y: f64| f(x, y).1;
        VectorField {
            x: ScalarField::from_fn(grid, bc, fx),
            y: ScalarField::from_fn(grid, bc, fy),
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        debug_assert_eq!(self.x.grid, self.y.grid);
        self.x.grid()
    }

    pub fn add_scaled(&self, c: f64, other: &VectorField) -> VectorField {
        VectorField {
            x: self.x.add_scaled(c, &other.x),
            y: self.y.add_scaled(c, &other.y),
        }
    }

    pub fn scale(&self, c: f64) -> VectorField {
        VectorField {
            x: self.x.scale(c),
            y: self.y.scale(c),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Trapezoidal-rule inner product `<a, b> ~ integral of a*b over the domain`.
///
/// Symmetric and bilinear; boundary nodes carry the 1/2 and 1/4 trapezoid
/// weights, so Dirichlet-zero fields contribute nothing there.
pub fn inner(a: &ScalarField, b: &ScalarField) -> Result<f64, Error> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(inner_unchecked(a, b))
}

pub(crate) fn inner_unchecked(a: &ScalarField, b: &ScalarField) -> f64 {
    let g = a.grid;
    let cell = g.hx() * g.hy();
    let mut acc = 0.0;
    for j in 0..g.ny {
        let wy = if j == 0 || j == g.ny - 1 { 0.5 } else { 1.0 };
        let row = j * g.nx;
        // Interior columns all have weight 1; peel the two edge columns.
        let mut rowsum = 0.0;
        for i in 1..g.nx - 1 {
            rowsum += a.values[row + i] * b.values[row + i];
        }
        rowsum += 0.5 * a.values[row] * b.values[row];
        rowsum += 0.5 * a.values[row + g.nx - 1] * b.values[row + g.nx - 1];
        acc += wy * rowsum;
    }
    acc * cell
}

/// Inner product of two vector fields (sum over components).
pub fn inner_vec(a: &VectorField, b: &VectorField) -> Result<f64, Error> {
    Ok(inner(&a.x, &b.x)? + inner(&a.y, &b.y)?)
}

/// Discrete L2 norm `sqrt(<a, a>)`.
pub fn norm_l2(a: &ScalarField) -> f64 {
    inner_unchecked(a, a).sqrt()
}

pub fn norm_l2_vec(a: &VectorField) -> f64 {
    (inner_unchecked(&a.x, &a.x) + inner_unchecked(&a.y, &a.y)).sqrt()
}

/// Discrete H1 seminorm `sqrt(<grad a, grad a>)`, with the gradient taken by
/// central differences (one-sided second order at the boundary).
pub fn norm_grad(a: &ScalarField) -> f64 {
    let g = crate::operators::gradient(a);
    norm_l2_vec(&g)
}

pub fn norm_grad_vec(a: &VectorField) -> f64 {
    let gx = crate::operators::gradient(&a.x);
    let gy = crate::operators::gradient(&a.y);
    (inner_unchecked(&gx.x, &gx.x)
        + inner_unchecked(&gx.y, &gx.y)
        + inner_unchecked(&gy.x, &gy.x)
        + inner_unchecked(&gy.y, &gy.y))
    .sqrt()
}

/// Quadrature mean of `a` over the domain.
pub fn mean(a: &ScalarField) -> f64 {
    let ones = ScalarField::from_fn(a.grid, BcKind::NeumannZero, |_, _| 1.0);
    inner_unchecked(a, &ones) / a.grid.area()
}

/// Project onto the zero-mean subspace: `a - mean(a)`. Idempotent.
pub fn mean_zero_project(a: &ScalarField) -> ScalarField {
    let m = mean(a);
    let mut out = a.clone();
    for v in out.values.iter_mut() {
        *v -= m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn rand_field(grid: Grid, bc: BcKind, seed: u64) -> ScalarField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut f = ScalarField::zeros(grid, bc);
        for v in f.values_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        f.enforce_bc();
        f
    }

    #[test]
    fn node_coordinates_are_bijective() {
        let g = Grid::new(-1.0, 2.0, 2.0, 4.0, 5, 9);
        assert_eq!(g.x(0), -1.0);
        assert_eq!(g.y(0), 2.0);
        assert!((g.x(4) - 1.0).abs() < 1e-15);
        assert!((g.y(8) - 6.0).abs() < 1e-15);
        assert!(g.is_boundary(0, 3) && g.is_boundary(4, 0) && !g.is_boundary(2, 3));
    }

    #[test]
    fn inner_of_ones_is_domain_area() {
        for n in [3, 17, 64] {
            let g = Grid::unit_square(n);
            let one = ScalarField::from_fn(g, BcKind::NeumannZero, |_, _| 1.0);
            assert!((inner(&one, &one).unwrap() - 1.0).abs() < 1e-14);
        }
        let g = Grid::new(0.0, 0.0, 8.0, 1.0, 33, 9);
        let one = ScalarField::from_fn(g, BcKind::NeumannZero, |_, _| 1.0);
        assert!((inner(&one, &one).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn inner_of_sine_squared_quarter() {
        // integral of sin^2(2 pi x) sin^2(2 pi y) over the unit square = 1/4
        let g = Grid::unit_square(129);
        let f = ScalarField::from_fn(g, BcKind::DirichletZero, |x, y| {
            (2.0 * PI * x).sin() * (2.0 * PI * y).sin()
        });
        assert!((inner(&f, &f).unwrap() - 0.25).abs() < 1e-4);
        assert!((norm_l2(&f) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn inner_zero_field() {
        let g = Grid::unit_square(9);
        let z = ScalarField::zeros(g, BcKind::DirichletZero);
        let f = rand_field(g, BcKind::NeumannZero, 1);
        assert_eq!(inner(&z, &f).unwrap(), 0.0);
    }

    #[test]
    fn inner_rejects_grid_mismatch() {
        let a = ScalarField::zeros(Grid::unit_square(9), BcKind::NeumannZero);
        let b = ScalarField::zeros(Grid::unit_square(17), BcKind::NeumannZero);
        assert!(matches!(inner(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn inner_symmetric_bilinear() {
        let g = Grid::unit_square(21);
        let a = rand_field(g, BcKind::NeumannZero, 2);
        let b = rand_field(g, BcKind::NeumannZero, 3);
        let c = rand_field(g, BcKind::NeumannZero, 4);
        let ab = inner(&a, &b).unwrap();
        let ba = inner(&b, &a).unwrap();
        assert!((ab - ba).abs() <= 1e-14 * ab.abs().max(1.0));
        // <a + 2c, b> = <a,b> + 2<c,b>
        let lhs = inner(&a.add_scaled(2.0, &c), &b).unwrap();
        let rhs = ab + 2.0 * inner(&c, &b).unwrap();
        assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1.0));
    }

    #[test]
    fn norm_grad_of_sine_product() {
        // |grad(sin(2 pi x) sin(2 pi y))|^2 integrates to 2 pi^2
        let g = Grid::unit_square(129);
        let f = ScalarField::from_fn(g, BcKind::DirichletZero, |x, y| {
            (2.0 * PI * x).sin() * (2.0 * PI * y).sin()
        });
        let expect = (2.0 * PI * PI).sqrt();
        assert!((norm_grad(&f) - expect).abs() < 1e-2, "{}", norm_grad(&f));
    }

    #[test]
    fn norm_of_zero_field() {
        let g = Grid::unit_square(11);
        let z = ScalarField::zeros(g, BcKind::NeumannZero);
        assert_eq!(norm_l2(&z), 0.0);
        assert_eq!(norm_grad(&z), 0.0);
    }

    #[test]
    fn mean_zero_project_constant() {
        let g = Grid::unit_square(17);
        let f = ScalarField::from_fn(g, BcKind::NeumannZero, |_, _| 5.0);
        let p = mean_zero_project(&f);
        assert!(p.max_abs() < 1e-12);
    }

    #[test]
    fn mean_zero_project_idempotent() {
        let g = Grid::new(0.0, 0.0, 2.0, 3.0, 19, 13);
        let f = rand_field(g, BcKind::NeumannZero, 5);
        let p1 = mean_zero_project(&f);
        let p2 = mean_zero_project(&p1);
        let ones = ScalarField::from_fn(g, BcKind::NeumannZero, |_, _| 1.0);
        assert!(inner(&p1, &ones).unwrap().abs() <= 1e-12 * g.area());
        for (a, b) in p1.values().iter().zip(p2.values()) {
            assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn dirichlet_boundary_zeroed_on_sampling() {
        let g = Grid::unit_square(9);
        let f = ScalarField::from_fn(g, BcKind::DirichletZero, |_, _| 1.0);
        for i in 0..9 {
            assert_eq!(f.get(i, 0), 0.0);
            assert_eq!(f.get(i, 8), 0.0);
            assert_eq!(f.get(0, i), 0.0);
            assert_eq!(f.get(8, i), 0.0);
        }
        assert_eq!(f.get(4, 4), 1.0);
    }

    #[test]
    fn norm_squared_equals_inner() {
        let g = Grid::unit_square(15);
        let f = rand_field(g, BcKind::NeumannZero, 6);
        let n = norm_l2(&f);
        // same code path; only sqrt rounding separates them
        assert!((n * n - inner(&f, &f).unwrap()).abs() <= 1e-15 * (n * n).max(1.0));
    }
}
