//! Uniform Cartesian scalar fields over a square box, with binary dump,
//! CSV slices, interpolation, and the symmetry probes used by the tests.
//!
//! Values are stored row-major with the x index slow: `values[ix * n + iy]`.
//! Nodes are cell-centered: `x_i = center - L/2 + (i + 1/2) h`, `h = L/n`.

use crate::error::{Error, Result};
use crate::vec2::Vec2;
use std::io::{Read, Write};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    n: usize,
    box_size: f64,
    center: Vec2,
    values: Vec<f64>,
}

pub const GRID_MAGIC: &[u8; 4] = b"VPF1";

impl GridField {
    pub fn new(n: usize, box_size: f64, center: Vec2, values: Vec<f64>) -> Result<Self> {
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "grid size must be even and >= 16, got {n}"
            )));
        }
        if !(box_size > 0.0) {
            return Err(Error::InvalidInput(format!(
                "box size must be positive, got {box_size}"
            )));
        }
        if values.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "value buffer has {} entries, expected {}",
                values.len(),
                n * n
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("field values must be finite".into()));
        }
        Ok(GridField {
            n,
            box_size,
            center,
            values,
        })
    }

    pub fn zeros(n: usize, box_size: f64, center: Vec2) -> Result<Self> {
        Self::new(n, box_size, center, vec![0.0; n * n])
    }

    pub fn from_fn(
        n: usize,
        box_size: f64,
        center: Vec2,
        f: impl Fn(Vec2) -> f64,
    ) -> Result<Self> {
        let mut field = Self::zeros(n, box_size, center)?;
        let h = field.spacing();
        let x0 = center.x - box_size / 2.0 + h / 2.0;
        let y0 = center.y - box_size / 2.0 + h / 2.0;
        for i in 0..n {
            for j in 0..n {
                field.values[i * n + j] = f(Vec2::new(x0 + i as f64 * h, y0 + j as f64 * h));
            }
        }
        field.check_finite()?;
        Ok(field)
    }

    fn check_finite(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("field contains non-finite values".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_size(&self) -> f64 {
        self.box_size
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    pub fn spacing(&self) -> f64 {
        self.box_size / self.n as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn coord(&self, i: usize, j: usize) -> Vec2 {
        let h = self.spacing();
        Vec2::new(
            self.center.x - self.box_size / 2.0 + (i as f64 + 0.5) * h,
            self.center.y - self.box_size / 2.0 + (j as f64 + 0.5) * h,
        )
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// `∫ f dx ≈ h^2 Σ f` (trapezoid = midpoint on decaying fields).
    pub fn integral(&self) -> f64 {
        let h = self.spacing();
        h * h * self.values.iter().sum::<f64>()
    }

    pub fn l1_norm(&self) -> f64 {
        let h = self.spacing();
        h * h * self.values.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// L1 distance `∫ |self - other|`.
    pub fn l1_distance(&self, other: &GridField) -> Result<f64> {
        self.compatible(other)?;
        let h = self.spacing();
        Ok(h * h
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    pub fn compatible(&self, other: &GridField) -> Result<()> {
        if self.n != other.n
            || self.box_size != other.box_size
            || (self.center - other.center).norm() > 1e-14 * self.box_size
        {
            return Err(Error::InvalidInput(
                "grid fields live on different grids".into(),
            ));
        }
        Ok(())
    }

    /// Largest |value| on the outer 10% frame divided by the overall max.
    pub fn frame_decay_ratio(&self) -> f64 {
        let n = self.n;
        let margin = (n / 10).max(1);
        let mut frame_max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i < margin || i >= n - margin || j < margin || j >= n - margin {
                    frame_max = frame_max.max(self.values[i * n + j].abs());
                }
            }
        }
        let overall = self.max_abs();
        if overall == 0.0 {
            0.0
        } else {
            frame_max / overall
        }
    }

    /// Bicubic (Catmull-Rom) interpolation; zero outside the sampled box.
    pub fn sample(&self, p: Vec2) -> f64 {
        let h = self.spacing();
        let n = self.n as isize;
        let fx = (p.x - (self.center.x - self.box_size / 2.0)) / h - 0.5;
        let fy = (p.y - (self.center.y - self.box_size / 2.0)) / h - 0.5;
        let ix = fx.floor() as isize;
        let iy = fy.floor() as isize;
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        if ix < 1 || ix > n - 3 || iy < 1 || iy > n - 3 {
            // near/outside the boundary: clamped bilinear, zero outside
            if ix < -1 || ix > n - 1 || iy < -1 || iy > n - 1 {
                return 0.0;
            }
            let gx = ix.clamp(0, n - 2) as usize;
            let gy = iy.clamp(0, n - 2) as usize;
            let tx = (fx - gx as f64).clamp(0.0, 1.0);
            let ty = (fy - gy as f64).clamp(0.0, 1.0);
            let v00 = self.at(gx, gy);
            let v10 = self.at(gx + 1, gy);
            let v01 = self.at(gx, gy + 1);
            let v11 = self.at(gx + 1, gy + 1);
            return v00 * (1.0 - tx) * (1.0 - ty)
                + v10 * tx * (1.0 - ty)
                + v01 * (1.0 - tx) * ty
                + v11 * tx * ty;
        }
        let cr = |vm1: f64, v0: f64, v1: f64, v2: f64, t: f64| -> f64 {
            0.5 * (2.0 * v0
                + (v1 - vm1) * t
                + (2.0 * vm1 - 5.0 * v0 + 4.0 * v1 - v2) * t * t
                + (3.0 * v0 - vm1 - 3.0 * v1 + v2) * t * t * t)
        };
        let mut col = [0.0; 4];
        for (k, c) in col.iter_mut().enumerate() {
            let i = (ix - 1 + k as isize) as usize;
            *c = cr(
                self.at(i, (iy - 1) as usize),
                self.at(i, iy as usize),
                self.at(i, (iy + 1) as usize),
                self.at(i, (iy + 2) as usize),
                ty,
            );
        }
        cr(col[0], col[1], col[2], col[3], tx)
    }

    /// Field rotated by `angle` about the box center (bicubic resampling).
    pub fn rotated(&self, angle: f64) -> Result<GridField> {
        let (s, c) = angle.sin_cos();
        let ctr = self.center;
        GridField::from_fn(self.n, self.box_size, ctr, |p| {
            let d = p - ctr;
            self.sample(ctr + Vec2::new(c * d.x + s * d.y, -s * d.x + c * d.y))
        })
    }

    /// Shift the field by whole cells; vacated cells are zero-filled.
    pub fn shifted_cells(&self, di: isize, dj: isize) -> GridField {
        let n = self.n as isize;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                let si = i - di;
                let sj = j - dj;
                out.values[(i * n + j) as usize] = if si >= 0 && si < n && sj >= 0 && sj < n {
                    self.values[(si * n + sj) as usize]
                } else {
                    0.0
                };
            }
        }
        out
    }

    /// Max |f(x1, -x2) - parity * f(x1, x2)|; cell centers reflect exactly.
    pub fn reflection_asymmetry_x2(&self, parity: f64) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let a = self.values[i * n + j];
                let b = self.values[i * n + (n - 1 - j)];
                worst = worst.max((b - parity * a).abs());
            }
        }
        worst
    }

    /// Max |f(-x) - f(x)| under the point reflection through the center.
    pub fn point_reflection_asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let a = self.values[i * n + j];
                let b = self.values[(n - 1 - i) * n + (n - 1 - j)];
                worst = worst.max((b - a).abs());
            }
        }
        worst
    }

    /// Binary dump: 32-byte header (magic `VPF1`, n as little-endian u32,
    /// then box size and center as little-endian f64) followed by the
    /// row-major values as little-endian f64.
    pub fn dump(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(GRID_MAGIC)?;
        f.write_all(&(self.n as u32).to_le_bytes())?;
        f.write_all(&self.box_size.to_le_bytes())?;
        f.write_all(&self.center.x.to_le_bytes())?;
        f.write_all(&self.center.y.to_le_bytes())?;
        for v in &self.values {
            f.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<GridField> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 4];
        f.read_exact(&mut magic)?;
        if &magic != GRID_MAGIC {
            return Err(Error::Format(format!(
                "bad magic {:?} in field dump",
                magic
            )));
        }
        let mut b4 = [0u8; 4];
        f.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        let mut b8 = [0u8; 8];
        f.read_exact(&mut b8)?;
        let box_size = f64::from_le_bytes(b8);
        f.read_exact(&mut b8)?;
        let cx = f64::from_le_bytes(b8);
        f.read_exact(&mut b8)?;
        let cy = f64::from_le_bytes(b8);
        let mut values = vec![0.0; n * n];
        for v in values.iter_mut() {
            f.read_exact(&mut b8)?;
            *v = f64::from_le_bytes(b8);
        }
        GridField::new(n, box_size, Vec2::new(cx, cy), values)
    }

    /// CSV of the 1-D slice along x at the row nearest `y`: `x,value`.
    pub fn slice_csv_along_x(&self, y: f64) -> String {
        let h = self.spacing();
        let j = (((y - (self.center.y - self.box_size / 2.0)) / h - 0.5).round() as isize)
            .clamp(0, self.n as isize - 1) as usize;
        let mut out = String::from("x,value\n");
        for i in 0..self.n {
            let p = self.coord(i, j);
            out.push_str(&format!("{:.17e},{:.17e}\n", p.x, self.at(i, j)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_field() -> GridField {
        GridField::from_fn(64, 16.0, Vec2::ZERO, |p| (-p.norm_sq() / 2.0).exp()).unwrap()
    }

    #[test]
    fn constructor_validates() {
        assert!(GridField::zeros(15, 1.0, Vec2::ZERO).is_err());
        assert!(GridField::zeros(14, 1.0, Vec2::ZERO).is_err());
        assert!(GridField::zeros(16, -1.0, Vec2::ZERO).is_err());
        assert!(GridField::new(16, 1.0, Vec2::ZERO, vec![f64::NAN; 256]).is_err());
    }

    #[test]
    fn integral_of_gaussian() {
        let f = gaussian_field();
        // ∫ e^{-r^2/2} = 2 pi
        assert!((f.integral() - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn dump_round_trip() {
        let f = gaussian_field();
        let dir = std::env::temp_dir().join("vplab_grid_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.vpf");
        f.dump(&path).unwrap();
        let g = GridField::load(&path).unwrap();
        assert_eq!(f, g);
        // header is exactly 32 bytes
        let bytes = std::fs::metadata(&path).unwrap().len();
        assert_eq!(bytes, 32 + (64 * 64 * 8) as u64);
    }

    #[test]
    fn bicubic_sampling_accuracy() {
        let probes = [(0.13, -0.27), (1.01, 0.5), (-2.3, 1.7)];
        let max_err = |n: usize| -> f64 {
            let f =
                GridField::from_fn(n, 16.0, Vec2::ZERO, |p| (-p.norm_sq() / 2.0).exp()).unwrap();
            probes
                .iter()
                .map(|&(x, y)| {
                    let p = Vec2::new(x, y);
                    (f.sample(p) - (-p.norm_sq() / 2.0f64).exp()).abs()
                })
                .fold(0.0, f64::max)
        };
        let coarse = max_err(64);
        let fine = max_err(128);
        assert!(coarse < 1e-3, "coarse error {coarse:.2e}");
        assert!(fine < 5e-5, "fine error {fine:.2e}");
        // at least third-order refinement
        assert!(fine < coarse / 5.0, "{fine:.2e} vs {coarse:.2e}");
        // outside the box
        let f = gaussian_field();
        assert_eq!(f.sample(Vec2::new(100.0, 0.0)), 0.0);
    }

    #[test]
    fn reflection_probes() {
        let f = gaussian_field();
        assert!(f.reflection_asymmetry_x2(1.0) < 1e-15);
        assert!(f.point_reflection_asymmetry() < 1e-15);
        let g = GridField::from_fn(32, 4.0, Vec2::ZERO, |p| p.y * (-p.norm_sq()).exp()).unwrap();
        assert!(g.reflection_asymmetry_x2(-1.0) < 1e-15, "odd field");
    }

    #[test]
    fn slice_csv_contains_header_and_rows() {
        let f = gaussian_field();
        let csv = f.slice_csv_along_x(0.0);
        assert!(csv.starts_with("x,value\n"));
        assert_eq!(csv.lines().count(), 65);
    }
}
