use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;

use image::{GrayImage, Luma};
use serde::{Deserialize, Serialize};

use crate::domain::{Action, TransitionState};
use crate::error::{Error, Result};
use crate::qtable::QTable;

/// Side of one (state, action) cell in pixels.
pub const CELL_PX: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeatmapFormat {
    Csv,
    Png,
}

impl FromStr for HeatmapFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "png" => Ok(Self::Png),
            other => Err(Error::Parse(format!(
                "unknown export format {other:?} (expected csv or png)"
            ))),
        }
    }
}

/// Grayscale rendering: one `CELL_PX` square per cell, states down and
/// actions across, black at the table minimum and white at its maximum.
/// A constant table renders mid-gray.
pub fn render_heatmap(table: &QTable) -> GrayImage {
    let (lo, hi) = table.value_range();
    let shade = |v: f64| -> u8 {
        if hi > lo {
            (255.0 * (v - lo) / (hi - lo)).round() as u8
        } else {
            128
        }
    };
    let width = Action::COUNT as u32 * CELL_PX;
    let height = TransitionState::COUNT as u32 * CELL_PX;
    GrayImage::from_fn(width, height, |x, y| {
        let s = TransitionState::from_index((y / CELL_PX) as usize).expect("row in range");
        let a = Action::from_index((x / CELL_PX) as usize).expect("column in range");
        Luma([shade(table.get(s, a))])
    })
}

/// Writes `table` to `path` in the given format. CSV output is the lossless
/// table format (values only; no statistics sidecar).
pub fn export_heatmap(table: &QTable, path: &Path, format: HeatmapFormat) -> Result<()> {
    match format {
        HeatmapFormat::Csv => {
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            table.write_values_csv(BufWriter::new(file))
        }
        HeatmapFormat::Png => {
            render_heatmap(table).save_with_format(path, image::ImageFormat::Png)?;
            Ok(())
        }
    }
}
