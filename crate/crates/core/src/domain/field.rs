use std::io::{BufRead, Write};

use ndarray::Array2;

use super::PolarGrid;
use crate::{Error, Result};

/// A scalar grid function on a [`PolarGrid`], stamped with a time.
///
/// Values are stored row-major as `[ring j][angle m]` and are finite after
/// every public operation.
#[derive(Clone, Debug)]
pub struct Field {
    grid: PolarGrid,
    values: Array2<f64>,
    time: f64,
}

impl Field {
    pub fn new(grid: PolarGrid, values: Array2<f64>, time: f64) -> Result<Self> {
        if values.dim() != (grid.n_r(), grid.n_theta()) {
            return Err(Error::Domain(format!(
                "field shape {:?} does not match grid ({}, {})",
                values.dim(),
                grid.n_r(),
                grid.n_theta()
            )));
        }
        let f = Field { grid, values, time };
        f.check_finite()?;
        Ok(f)
    }

    pub fn zeros(grid: PolarGrid, time: f64) -> Self {
        Field { grid, values: Array2::zeros((grid.n_r(), grid.n_theta())), time }
    }

    pub fn from_fn(grid: PolarGrid, time: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = Array2::from_shape_fn((grid.n_r(), grid.n_theta()), |(j, m)| {
            f(grid.radius(j), grid.angle(m))
        });
        Field::new(grid, values, time)
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, time: f64) {
        self.time = time;
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |acc, v| acc.min(*v))
    }

    /// Area-weighted integral `sum_jm r_j dr dtheta u_jm`.
    pub fn weighted_integral(&self) -> f64 {
        let w = self.grid.dr() * self.grid.dtheta();
        let mut total = 0.0;
        for j in 0..self.grid.n_r() {
            let r = self.grid.radius(j);
            let mut ring = 0.0;
            for m in 0..self.grid.n_theta() {
                ring += self.values[[j, m]];
            }
            total += r * ring;
        }
        total * w
    }

    /// Area-weighted mean over the domain.
    pub fn weighted_mean(&self) -> f64 {
        let area: f64 = (0..self.grid.n_r())
            .map(|j| self.grid.cell_area(j) * self.grid.n_theta() as f64)
            .sum();
        self.weighted_integral() / area
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Field> {
        Field::new(self.grid, self.values.mapv(&f), self.time)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Numeric(format!(
                "field at t = {} contains non-finite values",
                self.time
            )))
        }
    }

    /// Max angular deviation from the per-ring mean, the "angular variance"
    /// diagnostic for radial symmetry checks.
    pub fn angular_deviation(&self) -> f64 {
        let n = self.grid.n_theta() as f64;
        let mut dev = 0.0_f64;
        for j in 0..self.grid.n_r() {
            let mean: f64 = (0..self.grid.n_theta()).map(|m| self.values[[j, m]]).sum::<f64>() / n;
            for m in 0..self.grid.n_theta() {
                dev = dev.max((self.values[[j, m]] - mean).abs());
            }
        }
        dev
    }

    /// CSV serialization with header `r,theta,value`, rows in ring-major
    /// order, 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "r,theta,value")?;
        for j in 0..self.grid.n_r() {
            let r = self.grid.radius(j);
            for m in 0..self.grid.n_theta() {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", r, self.grid.angle(m), self.values[[j, m]])?;
            }
        }
        Ok(())
    }

    /// Read a field written by [`Field::write_csv`] onto the given grid.
    pub fn read_csv<R: BufRead>(grid: PolarGrid, time: f64, r: R) -> Result<Field> {
        let mut values = Array2::zeros((grid.n_r(), grid.n_theta()));
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty field CSV".into()))??;
        if header.trim() != "r,theta,value" {
            return Err(Error::Config(format!("unexpected field CSV header: {header}")));
        }
        let mut count = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Config(format!("malformed field CSV row: {line}")));
            }
            let v: f64 = cols[2]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad value in field CSV: {line}")))?;
            let j = count / grid.n_theta();
            let m = count % grid.n_theta();
            if j >= grid.n_r() {
                return Err(Error::Config("field CSV has too many rows for grid".into()));
            }
            values[[j, m]] = v;
            count += 1;
        }
        if count != grid.n_r() * grid.n_theta() {
            return Err(Error::Config(format!(
                "field CSV has {count} rows, grid needs {}",
                grid.n_r() * grid.n_theta()
            )));
        }
        Field::new(grid, values, time)
    }
}
