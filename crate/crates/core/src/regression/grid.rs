use std::cmp::Ordering;

use super::svr::{predict, train_svr, Hyperparams};
use super::RegressionError;
use crate::evaluation::srocc;
use crate::par;

/// `C` in {1, 10, 100, 1000}, `epsilon` in {0.1, 1, 2}, `gamma` in
/// {2^-6, ..., 2^2}, enumerated with `gamma` varying fastest.
pub fn default_grid() -> Vec<Hyperparams> {
    let mut grid = Vec::new();
    for c in [1.0, 10.0, 100.0, 1000.0] {
        for epsilon in [0.1, 1.0, 2.0] {
            for e in -6..=2 {
                grid.push(Hyperparams::new(c, epsilon, 2f64.powi(e)));
            }
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best: Hyperparams,
    /// Validation SROCC of `best`; `None` when every point gave constant
    /// predictions.
    pub srocc: Option<f64>,
    /// Validation SROCC of every grid point, in grid order.
    pub scores: Vec<Option<f64>>,
}

/// Picks the grid point with the highest validation SROCC.
///
/// Ties go to the smaller `C`, then the larger `epsilon`, then the earlier
/// grid position.
pub fn grid_search(
    train_x: &[Vec<f64>],
    train_y: &[f64],
    val_x: &[Vec<f64>],
    val_y: &[f64],
    grid: &[Hyperparams],
) -> Result<GridResult, RegressionError> {
    if grid.is_empty() {
        return Err(RegressionError::EmptyGrid);
    }
    let fits = par::map_range(grid.len(), |i| -> Result<Option<f64>, RegressionError> {
        let model = train_svr(train_x, train_y, grid[i])?;
        let pred = val_x.iter().map(|x| predict(&model, x)).collect::<Result<Vec<_>, _>>()?;
        Ok(srocc(&pred, val_y))
    });
    let scores = fits.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut best = 0;
    for i in 1..grid.len() {
        if prefer(&grid[i], scores[i], &grid[best], scores[best]) {
            best = i;
        }
    }
    Ok(GridResult { best: grid[best], srocc: scores[best], scores })
}

fn prefer(a: &Hyperparams, sa: Option<f64>, b: &Hyperparams, sb: Option<f64>) -> bool {
    let key = |s: Option<f64>| s.unwrap_or(f64::NEG_INFINITY);
    match key(sa).partial_cmp(&key(sb)).unwrap_or(Ordering::Equal) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.c < b.c || (a.c == b.c && a.epsilon > b.epsilon),
    }
}
