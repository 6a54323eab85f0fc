use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extensions::PointInteraction;
use crate::piecewise::{PiecewiseExpFunction, Side};

/// Smallest accepted number of grid points.
pub const MIN_POINTS: usize = 512;

/// Uniform grid on `[-L, L]` with every interaction point on a node.
///
/// The requested `(L, n)` are adjusted: the spacing is shrunk until the
/// interaction points fall on nodes, then `L` is rounded to a whole number of
/// cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    points: usize,
    dx: f64,
    breakpoints: Vec<f64>,
    /// Node index of each breakpoint.
    breakpoint_nodes: Vec<usize>,
}

fn check_request(half_width: f64, points: usize) -> Result<()> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::Grid(format!("half width must be positive, got {half_width}")));
    }
    if points < MIN_POINTS {
        return Err(Error::Grid(format!("need at least {MIN_POINTS} points, got {points}")));
    }
    Ok(())
}

impl GridSpec {
    /// Grid with nodes at `±h`.
    pub fn two_point(half_width: f64, points: usize, h: f64) -> Result<Self> {
        check_request(half_width, points)?;
        if !(h > 0.0 && h < half_width) {
            return Err(Error::Grid(format!("h = {h} must lie inside (0, L)")));
        }
        let dx0 = 2.0 * half_width / (points - 1) as f64;
        let gap_cells = ((2.0 * h / dx0).round() as usize).max(2);
        let dx = 2.0 * h / gap_cells as f64;
        let outer_cells = (((half_width - h) / dx).round() as usize).max(1);
        let points = 2 * outer_cells + gap_cells + 1;
        Ok(Self {
            half_width: h + outer_cells as f64 * dx,
            points,
            dx,
            breakpoints: vec![-h, h],
            breakpoint_nodes: vec![outer_cells, outer_cells + gap_cells],
        })
    }

    /// Grid with a node at the origin (odd number of points).
    pub fn one_point(half_width: f64, points: usize) -> Result<Self> {
        check_request(half_width, points)?;
        let dx = 2.0 * half_width / (points - 1) as f64;
        let cells = (half_width / dx).round() as usize;
        Ok(Self {
            half_width: cells as f64 * dx,
            points: 2 * cells + 1,
            dx,
            breakpoints: vec![0.0],
            breakpoint_nodes: vec![cells],
        })
    }

    pub fn for_interaction(ext: &PointInteraction, half_width: f64, points: usize) -> Result<Self> {
        match ext {
            PointInteraction::TwoPoint(t) => Self::two_point(half_width, points, t.h()),
            PointInteraction::OnePoint(_) => Self::one_point(half_width, points),
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn node(&self, i: usize) -> f64 {
        if let Some(k) = self.breakpoint_nodes.iter().position(|&n| n == i) {
            return self.breakpoints[k];
        }
        (i as f64 - 0.5 * (self.points - 1) as f64) * self.dx
    }

    /// Requires `L > max|breakpoint| + 5/κ_min` so that bound states of decay
    /// at least `κ_min` are negligible at the Dirichlet walls.
    pub fn check_decay_margin(&self, kappa_min: f64) -> Result<()> {
        let reach = self.breakpoints.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        let need = reach + 5.0 / kappa_min;
        if self.half_width > need {
            Ok(())
        } else {
            Err(Error::Grid(format!(
                "half width {} too small for kappa_min = {kappa_min}, need > {need}",
                self.half_width
            )))
        }
    }
}

/// Unknowns of a discretized problem: interior nodes in increasing `x`, with
/// interface nodes duplicated into a left and a right copy when the
/// interaction lets the value jump. Dirichlet nodes at `±L` are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    dx: f64,
    half_width: f64,
    positions: Vec<f64>,
    sides: Vec<Option<Side>>,
    regions: Vec<usize>,
    /// Trapezoid weight split into the half cells left and right of a node.
    halves: Vec<(f64, f64)>,
    cuts: Vec<f64>,
}

impl Layout {
    pub fn new(grid: &GridSpec, duplicate_interfaces: bool) -> Self {
        let dx = grid.dx();
        let half = 0.5 * dx;
        let mut out = Self {
            dx,
            half_width: grid.half_width(),
            positions: Vec::with_capacity(grid.points() + 2),
            sides: Vec::with_capacity(grid.points() + 2),
            regions: Vec::with_capacity(grid.points() + 2),
            halves: Vec::with_capacity(grid.points() + 2),
            cuts: grid.breakpoints().to_vec(),
        };
        let mut region = 0;
        for i in 1..grid.points() - 1 {
            let x = grid.node(i);
            let is_cut = grid.breakpoint_nodes.contains(&i);
            if is_cut && duplicate_interfaces {
                out.push(x, Some(Side::Left), region, (half, 0.0));
                region += 1;
                out.push(x, Some(Side::Right), region, (0.0, half));
            } else {
                out.push(x, None, region, (half, half));
            }
        }
        out
    }

    fn push(&mut self, x: f64, side: Option<Side>, region: usize, halves: (f64, f64)) {
        self.positions.push(x);
        self.sides.push(side);
        self.regions.push(region);
        self.halves.push(halves);
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn sides(&self) -> &[Option<Side>] {
        &self.sides
    }

    pub fn regions(&self) -> &[usize] {
        &self.regions
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    /// Trapezoid weight of each unknown.
    pub fn weights(&self) -> Vec<f64> {
        self.halves.iter().map(|(l, r)| l + r).collect()
    }

    /// Index of the duplicated copy of the node at `x` on `side`.
    pub fn slot(&self, x: f64, side: Side) -> Option<usize> {
        (0..self.len()).find(|&i| self.positions[i] == x && self.sides[i] == Some(side))
    }

    /// Index of the unknown at `x` (either copy for a duplicated node).
    pub fn node_index(&self, x: f64) -> Option<usize> {
        self.positions.iter().position(|&p| p == x)
    }

    /// `0` left of the first cut, `2` right of the last cut, `1` in between.
    fn zone(&self, lo: f64, hi: f64) -> usize {
        let first = self.cuts[0];
        let last = self.cuts[self.cuts.len() - 1];
        if hi <= first {
            0
        } else if lo >= last {
            2
        } else {
            1
        }
    }

    /// Whether unknown `i` lies strictly right of `threshold`; a duplicated
    /// right copy at `threshold` counts as right of it.
    pub fn is_right_of(&self, i: usize, threshold: f64) -> bool {
        let x = self.positions[i];
        x > threshold || (x == threshold && self.sides[i] == Some(Side::Right))
    }
}

/// Integrated `|ψ|²` left of, between and right of the interaction points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideProbabilities {
    pub left: f64,
    pub gap: f64,
    pub right: f64,
}

impl SideProbabilities {
    pub fn total(&self) -> f64 {
        self.left + self.gap + self.right
    }
}

/// Complex amplitudes on the unknowns of a [`Layout`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    layout: Arc<Layout>,
    amplitudes: Vec<Complex64>,
}

impl GridState {
    pub fn new(layout: Arc<Layout>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.len() {
            return Err(Error::Grid(format!(
                "expected {} amplitudes, got {}",
                layout.len(),
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::Grid("non-finite amplitude".into()));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Samples `f(x, side)`; `side` is set on duplicated interface copies.
    pub fn from_fn<F>(layout: Arc<Layout>, f: F) -> Result<Self>
    where
        F: Fn(f64, Option<Side>) -> Complex64,
    {
        let amplitudes = layout
            .positions
            .iter()
            .zip(&layout.sides)
            .map(|(&x, &s)| f(x, s))
            .collect();
        Self::new(layout, amplitudes)
    }

    /// Samples a piecewise exponential, taking one-sided limits on duplicated
    /// interface copies.
    pub fn sample(layout: Arc<Layout>, f: &PiecewiseExpFunction) -> Result<Self> {
        Self::from_fn(layout, |x, side| match side {
            Some(s) => f.one_sided(x, s),
            None => f.value(x),
        })
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Trapezoid-weighted `Σ w conj(self) other`.
    pub fn inner(&self, other: &GridState) -> Complex64 {
        self.layout
            .halves
            .iter()
            .zip(self.amplitudes.iter().zip(&other.amplitudes))
            .map(|((l, r), (a, b))| a.conj() * b * (l + r))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn norm_sqr(&self) -> f64 {
        self.layout
            .halves
            .iter()
            .zip(&self.amplitudes)
            .map(|((l, r), a)| a.norm_sqr() * (l + r))
            .sum()
    }

    pub fn normalized(&self) -> Result<GridState> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Grid("cannot normalize the zero state".into()));
        }
        Ok(self.scaled((1.0 / n).into()))
    }

    pub fn scaled(&self, c: Complex64) -> GridState {
        Self {
            layout: Arc::clone(&self.layout),
            amplitudes: self.amplitudes.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &GridState) -> GridState {
        Self {
            layout: Arc::clone(&self.layout),
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Trapezoid integrals of `|ψ|²` over the three zones.
    pub fn side_probabilities(&self) -> SideProbabilities {
        side_probabilities_of(&self.layout, &self.density())
    }
}

/// Zone integrals for an arbitrary density on `layout`.
pub fn side_probabilities_of(layout: &Layout, density: &[f64]) -> SideProbabilities {
    let mut zones = [0.0f64; 3];
    let half = 0.5 * layout.dx;
    for (i, &d) in density.iter().enumerate() {
        let x = layout.positions[i];
        let (l, r) = layout.halves[i];
        if l > 0.0 {
            zones[layout.zone(x - half, x)] += d * l;
        }
        if r > 0.0 {
            zones[layout.zone(x, x + half)] += d * r;
        }
    }
    SideProbabilities {
        left: zones[0],
        gap: zones[1],
        right: zones[2],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_grid_puts_interfaces_on_nodes() {
        let g = GridSpec::two_point(10.0, 4096, 0.5).unwrap();
        let i = (0..g.points()).find(|&i| g.node(i) == -0.5).unwrap();
        let j = (0..g.points()).find(|&i| g.node(i) == 0.5).unwrap();
        assert_eq!(j - i, (1.0 / g.dx()).round() as usize);
        assert!((g.points() as i64 - 4096).abs() < 8);
        assert!((g.half_width() - 10.0).abs() <= g.dx());
        assert!((g.node(g.points() - 1) - g.half_width()).abs() < 1e-12);
    }

    #[test]
    fn small_grids_are_rejected() {
        assert!(GridSpec::two_point(10.0, 100, 0.5).is_err());
        assert!(GridSpec::two_point(10.0, 1024, 12.0).is_err());
        assert!(GridSpec::one_point(-1.0, 1024).is_err());
    }

    #[test]
    fn decay_margin() {
        let g = GridSpec::two_point(6.0, 1024, 0.5).unwrap();
        assert!(g.check_decay_margin(1.0).is_ok());
        assert!(g.check_decay_margin(0.5).is_err());
    }

    #[test]
    fn weights_reproduce_the_trapezoid_rule() {
        let g = GridSpec::two_point(5.0, 1001, 0.5).unwrap();
        let layout = Layout::new(&g, true);
        assert_eq!(layout.len(), g.points() - 2 + 2);
        let total: f64 = layout.weights().iter().sum();
        // all interior weights sum to 2L - dx (the boundary halves belong to ±L)
        assert!((total - (2.0 * g.half_width() - g.dx())).abs() < 1e-12);
    }

    #[test]
    fn zones_sum_to_norm() {
        let g = GridSpec::two_point(5.0, 1001, 0.5).unwrap();
        let layout = Arc::new(Layout::new(&g, true));
        let psi = GridState::from_fn(layout, |x, _| Complex64::new((-x * x).exp(), x.sin())).unwrap();
        let p = psi.side_probabilities();
        assert!((p.total() - psi.norm().powi(2)).abs() < 1e-13);
        assert!(p.left > 0.0 && p.gap > 0.0 && p.right > 0.0);
    }
}
