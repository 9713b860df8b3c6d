use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{DbsError, Result};
use crate::grid::{torus_sq_dist, GridPos};
use crate::pswarm::Projection;

pub const TOPOMAP_FORMAT_VERSION: u32 = 1;
/// Points interpolated per grid cell.
pub const IDW_NEIGHBORS: usize = 8;

/// Hypsometric band of a normalised height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightClass {
    Sea,
    Lowland,
    Hill,
    Mountain,
    Snow,
}

impl HeightClass {
    pub fn from_height(h: f64) -> Self {
        if h < 0.2 {
            HeightClass::Sea
        } else if h < 0.45 {
            HeightClass::Lowland
        } else if h < 0.7 {
            HeightClass::Hill
        } else if h < 0.9 {
            HeightClass::Mountain
        } else {
            HeightClass::Snow
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopoMap {
    pub lines: usize,
    pub columns: usize,
    pub point_heights: Vec<f64>,
    /// Row-major `lines × columns`, normalised to [0, 1].
    pub grid_heights: Vec<f64>,
    pub classes: Vec<HeightClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopoMapDocument {
    pub version: u32,
    pub lines: usize,
    pub columns: usize,
    pub grid_heights: Vec<f64>,
    pub color_classes: Vec<u8>,
    pub point_heights: Vec<f64>,
}

impl TopoMap {
    pub fn height(&self, pos: GridPos) -> f64 {
        self.grid_heights[pos.index(self.columns)]
    }

    pub fn class(&self, pos: GridPos) -> HeightClass {
        self.classes[pos.index(self.columns)]
    }

    pub fn to_document(&self) -> TopoMapDocument {
        TopoMapDocument {
            version: TOPOMAP_FORMAT_VERSION,
            lines: self.lines,
            columns: self.columns,
            grid_heights: self.grid_heights.clone(),
            color_classes: self.classes.iter().map(|c| c.code()).collect(),
            point_heights: self.point_heights.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("topomap serializes")
    }

    /// 8-bit RGB PNG, `scale` pixels per cell, odd rows shifted by half a
    /// cell (wrapping) as in the hex embedding.
    pub fn write_png<W: Write>(&self, w: W, scale: usize) -> Result<()> {
        let scale = scale.max(2);
        let (width, height) = (self.columns * scale, self.lines * scale);
        let mut pixels = vec![0u8; width * height * 3];
        for row in 0..self.lines {
            let shift = if row % 2 == 1 { scale / 2 } else { 0 };
            for col in 0..self.columns {
                let rgb = hypsometric_color(self.grid_heights[row * self.columns + col]);
                for py in row * scale..(row + 1) * scale {
                    for k in 0..scale {
                        let px = (col * scale + k + shift) % width;
                        let off = (py * width + px) * 3;
                        pixels[off..off + 3].copy_from_slice(&rgb);
                    }
                }
            }
        }
        let mut enc = png::Encoder::new(w, width as u32, height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(|e| DbsError::Png(e.to_string()))?;
        writer
            .write_image_data(&pixels)
            .map_err(|e| DbsError::Png(e.to_string()))?;
        writer.finish().map_err(|e| DbsError::Png(e.to_string()))?;
        Ok(())
    }
}

/// Blue (sea) through green and brown to white (snow).
pub fn hypsometric_color(h: f64) -> [u8; 3] {
    const STOPS: [(f64, [f64; 3]); 7] = [
        (0.0, [10.0, 50.0, 140.0]),
        (0.2, [110.0, 180.0, 230.0]),
        (0.2001, [60.0, 140.0, 60.0]),
        (0.45, [170.0, 190.0, 90.0]),
        (0.7, [140.0, 95.0, 45.0]),
        (0.9, [200.0, 190.0, 180.0]),
        (1.0, [255.0, 255.0, 255.0]),
    ];
    let h = h.clamp(0.0, 1.0);
    let hi = STOPS.iter().position(|s| s.0 >= h).unwrap_or(STOPS.len() - 1).max(1);
    let (h0, c0) = STOPS[hi - 1];
    let (h1, c1) = STOPS[hi];
    let t = if h1 > h0 { ((h - h0) / (h1 - h0)).clamp(0.0, 1.0) } else { 1.0 };
    let mut out = [0u8; 3];
    for k in 0..3 {
        out[k] = (c0[k] + t * (c1[k] - c0[k])).round() as u8;
    }
    out
}

/// Interpolates point heights over every grid cell by inverse squared
/// distance to the 8 toroidally nearest points, then normalises to [0, 1].
pub fn render_heightmap(proj: &Projection, point_heights: &[f64]) -> TopoMap {
    let (lines, columns) = (proj.grid.lines, proj.grid.columns);
    let (w, h) = (proj.grid.width(), proj.grid.height());
    let coords = proj.coords();
    let k = IDW_NEIGHBORS.min(coords.len());
    let mut raw = Vec::with_capacity(lines * columns);
    let mut scratch: Vec<(f64, usize)> = Vec::with_capacity(coords.len());
    for row in 0..lines {
        for col in 0..columns {
            let cell = GridPos::new(row, col).to_cartesian();
            scratch.clear();
            scratch.extend(coords.iter().enumerate().map(|(i, &p)| (torus_sq_dist(cell, p, w, h), i)));
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < scratch.len() {
                scratch.select_nth_unstable_by(k - 1, cmp);
            }
            let nearest = &mut scratch[..k];
            nearest.sort_by(cmp);
            let value = if nearest[0].0 == 0.0 {
                point_heights[nearest[0].1]
            } else {
                let (mut sw, mut swh) = (0.0, 0.0);
                for &(d2, i) in nearest.iter() {
                    // power-2 inverse distance weight
                    let wgt = 1.0 / d2;
                    sw += wgt;
                    swh += wgt * point_heights[i];
                }
                swh / sw
            };
            raw.push(value);
        }
    }
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let grid_heights: Vec<f64> = if max > min {
        raw.iter().map(|v| (v - min) / (max - min)).collect()
    } else {
        vec![0.0; raw.len()]
    };
    let classes = grid_heights.iter().map(|&v| HeightClass::from_height(v)).collect();
    TopoMap {
        lines,
        columns,
        point_heights: point_heights.to_vec(),
        grid_heights,
        classes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridConfig;

    fn projection(lines: usize, columns: usize, positions: Vec<GridPos>) -> Projection {
        Projection {
            grid: GridConfig::with_dims(lines, columns, 4, 0.8).unwrap(),
            seed: 0,
            positions,
            epochs: Vec::new(),
        }
    }

    #[test]
    fn class_thresholds() {
        assert_eq!(HeightClass::from_height(0.0), HeightClass::Sea);
        assert_eq!(HeightClass::from_height(0.199), HeightClass::Sea);
        assert_eq!(HeightClass::from_height(0.2), HeightClass::Lowland);
        assert_eq!(HeightClass::from_height(0.45), HeightClass::Hill);
        assert_eq!(HeightClass::from_height(0.7), HeightClass::Mountain);
        assert_eq!(HeightClass::from_height(0.9), HeightClass::Snow);
        assert_eq!(HeightClass::from_height(1.0), HeightClass::Snow);
        let mut last = HeightClass::Sea;
        for i in 0..=100 {
            let c = HeightClass::from_height(i as f64 / 100.0);
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn constant_heights_give_flat_sea() {
        let pos = vec![GridPos::new(0, 0), GridPos::new(2, 3), GridPos::new(5, 7), GridPos::new(3, 1)];
        let topo = render_heightmap(&projection(6, 8, pos), &[2.0; 4]);
        assert!(topo.grid_heights.iter().all(|&h| h == 0.0));
        assert!(topo.classes.iter().all(|&c| c == HeightClass::Sea));
    }

    #[test]
    fn normalised_range_and_exact_cells() {
        let pos = vec![GridPos::new(0, 0), GridPos::new(2, 3), GridPos::new(5, 7), GridPos::new(3, 1)];
        let topo = render_heightmap(&projection(6, 8, pos.clone()), &[1.0, 4.0, 2.0, 3.0]);
        let min = topo.grid_heights.iter().copied().fold(f64::INFINITY, f64::min);
        let max = topo.grid_heights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!((min, max), (0.0, 1.0));
        // Cells holding a point take that point's height exactly.
        assert_eq!(topo.height(pos[0]), 0.0);
        assert_eq!(topo.height(pos[1]), 1.0);
    }

    #[test]
    fn golden_classification() {
        // Heights on a 4×6 grid from three points; classification is a pure
        // function of the normalised field.
        let pos = vec![GridPos::new(0, 0), GridPos::new(1, 3), GridPos::new(3, 5)];
        let topo = render_heightmap(&projection(4, 6, pos), &[0.0, 10.0, 4.0]);
        let codes: String = topo.classes.iter().map(|c| char::from(b'0' + c.code())).collect();
        assert_eq!(codes, GOLDEN);
        assert_eq!(topo.class(GridPos::new(1, 3)), HeightClass::Snow);
        assert_eq!(topo.class(GridPos::new(3, 5)), HeightClass::Lowland);
    }

    const GOLDEN: &str = "002331013421112332112211";

    #[test]
    fn png_has_expected_dimensions() {
        let pos = vec![GridPos::new(0, 0), GridPos::new(2, 3), GridPos::new(5, 7)];
        let topo = render_heightmap(&projection(6, 8, pos), &[1.0, 2.0, 3.0]);
        let mut buf = Vec::new();
        topo.write_png(&mut buf, 4).unwrap();
        let decoder = png::Decoder::new(std::io::Cursor::new(buf));
        let reader = decoder.read_info().unwrap();
        assert_eq!((reader.info().width, reader.info().height), (32, 24));
    }

    #[test]
    fn palette_runs_blue_to_white() {
        let sea = hypsometric_color(0.05);
        assert!(sea[2] > sea[0] && sea[2] > sea[1]);
        let low = hypsometric_color(0.3);
        assert!(low[1] > low[2]);
        assert_eq!(hypsometric_color(1.0), [255, 255, 255]);
    }
}
