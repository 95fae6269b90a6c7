//! Reader for the subset of TSPLIB used to build instances.

use super::{CostModel, DistanceSource, InstanceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Header,
    Coords,
    Weights,
    Display,
}

/// Parses a TSPLIB file into a base cost model.
///
/// Supported: `EUC_2D` node coordinates, and `EXPLICIT` weights in
/// `FULL_MATRIX` or `LOWER_DIAG_ROW` format. When an explicit file also
/// carries a `DISPLAY_DATA_SECTION`, the display coordinates are used and the
/// model records [`DistanceSource::Display`].
///
/// Coordinate distances are the real Euclidean distances; the TSPLIB
/// nearest-integer rounding is not applied.
pub fn parse_tsplib(text: &str) -> Result<CostModel, InstanceError> {
    let mut name = None;
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut weight_format: Option<String> = None;
    let mut section = Section::Header;
    let mut coords: Vec<(usize, [f64; 2])> = Vec::new();
    let mut display: Vec<(usize, [f64; 2])> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut saw_weights = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        let upper = line.to_ascii_uppercase();
        match upper.as_str() {
            "NODE_COORD_SECTION" => {
                section = Section::Coords;
                continue;
            }
            "EDGE_WEIGHT_SECTION" => {
                section = Section::Weights;
                saw_weights = true;
                continue;
            }
            "DISPLAY_DATA_SECTION" => {
                section = Section::Display;
                continue;
            }
            _ => {}
        }
        if let Some((key, value)) = line.split_once(':') {
            let key = key.trim().to_ascii_uppercase();
            if key.chars().all(|c| c.is_ascii_uppercase() || c == '_') {
                let value = value.trim().to_string();
                section = Section::Header;
                match key.as_str() {
                    "NAME" => name = Some(value),
                    "DIMENSION" => {
                        dimension = Some(value.parse().map_err(|_| {
                            InstanceError::MalformedNumber {
                                token: value.clone(),
                                line: lineno + 1,
                            }
                        })?)
                    }
                    "EDGE_WEIGHT_TYPE" => weight_type = Some(value.to_ascii_uppercase()),
                    "EDGE_WEIGHT_FORMAT" => weight_format = Some(value.to_ascii_uppercase()),
                    _ => {}
                }
                continue;
            }
        }
        match section {
            Section::Header => {}
            Section::Coords | Section::Display => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() < 3 {
                    return Err(InstanceError::MalformedNumber {
                        token: line.to_string(),
                        line: lineno + 1,
                    });
                }
                let id = parse_num(toks[0], lineno)? as usize;
                let p = [parse_num(toks[1], lineno)?, parse_num(toks[2], lineno)?];
                if section == Section::Coords {
                    coords.push((id, p));
                } else {
                    display.push((id, p));
                }
            }
            Section::Weights => {
                for tok in line.split_whitespace() {
                    weights.push(parse_num(tok, lineno)?);
                }
            }
        }
    }

    let dim = dimension.ok_or(InstanceError::MissingField("DIMENSION"))?;
    let wtype = weight_type.unwrap_or_else(|| "EUC_2D".to_string());
    match wtype.as_str() {
        "EUC_2D" => {
            let pts = ordered_points(coords, dim)?;
            Ok(CostModel::from_coordinates(name, pts, DistanceSource::Euc2d))
        }
        "EXPLICIT" => {
            if !display.is_empty() {
                let pts = ordered_points(display, dim)?;
                return Ok(CostModel::from_coordinates(name, pts, DistanceSource::Display));
            }
            if !saw_weights {
                return Err(InstanceError::MissingField("EDGE_WEIGHT_SECTION"));
            }
            let format = weight_format.unwrap_or_default();
            let matrix = expand_weights(&format, &weights, dim)?;
            CostModel::from_matrix(name, matrix)
        }
        other => Err(InstanceError::UnsupportedWeightType(other.to_string())),
    }
}

fn parse_num(tok: &str, lineno: usize) -> Result<f64, InstanceError> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| InstanceError::MalformedNumber {
            token: tok.to_string(),
            line: lineno + 1,
        })
}

fn ordered_points(
    mut pts: Vec<(usize, [f64; 2])>,
    dim: usize,
) -> Result<Vec<[f64; 2]>, InstanceError> {
    if pts.len() != dim {
        return Err(InstanceError::DimensionMismatch {
            expected: dim,
            found: pts.len(),
        });
    }
    pts.sort_by_key(|&(id, _)| id);
    Ok(pts.into_iter().map(|(_, p)| p).collect())
}

fn expand_weights(format: &str, w: &[f64], dim: usize) -> Result<Vec<Vec<f64>>, InstanceError> {
    let mut m = vec![vec![0.0; dim]; dim];
    match format {
        "FULL_MATRIX" => {
            if w.len() != dim * dim {
                return Err(InstanceError::DimensionMismatch {
                    expected: dim * dim,
                    found: w.len(),
                });
            }
            for i in 0..dim {
                m[i].copy_from_slice(&w[i * dim..(i + 1) * dim]);
            }
        }
        "LOWER_DIAG_ROW" => {
            let expected = dim * (dim + 1) / 2;
            if w.len() != expected {
                return Err(InstanceError::DimensionMismatch {
                    expected,
                    found: w.len(),
                });
            }
            let mut k = 0;
            for i in 0..dim {
                for j in 0..=i {
                    m[i][j] = w[k];
                    m[j][i] = w[k];
                    k += 1;
                }
            }
        }
        other => return Err(InstanceError::UnsupportedWeightFormat(other.to_string())),
    }
    Ok(m)
}
