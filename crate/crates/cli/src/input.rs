//! Set-file parsing: UTF-8 text, one point per line as "x y" decimal
//! residues (planar sets) or one residue per line (residue sets), with
//! `#` comments and blank lines ignored.

use bisector_lab::field::PrimeModulus;
use bisector_lab::gen::Generated;
use bisector_lab::geom::Point2;
use bisector_lab::{PlaneSet, ResidueSet};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected 1 or 2 decimal residues, got '{text}'")]
    Parse {
        path: String,
        line: usize,
        text: String,
    },
    #[error("{path}: mixed point and residue lines")]
    Mixed { path: String },
}

/// Parses a set file; the arity of the first data line decides whether the
/// file is a planar or a residue set. An empty file is an empty plane set.
pub fn read_set_file(path: &Path, m: PrimeModulus) -> Result<Generated, InputError> {
    let path_str = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path_str.clone(),
        source,
    })?;
    let mut points: Vec<Point2> = Vec::new();
    let mut residues: Vec<u64> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| InputError::Parse {
                path: path_str.clone(),
                line: idx + 1,
                text: raw.to_string(),
            })
        };
        let first = parse(tokens.next().expect("nonempty line"))?;
        match tokens.next() {
            Some(second) => {
                let second = parse(second)?;
                if tokens.next().is_some() || !residues.is_empty() {
                    return Err(if !residues.is_empty() {
                        InputError::Mixed { path: path_str }
                    } else {
                        InputError::Parse {
                            path: path_str,
                            line: idx + 1,
                            text: raw.to_string(),
                        }
                    });
                }
                points.push(Point2::new(first, second));
            }
            None => {
                if !points.is_empty() {
                    return Err(InputError::Mixed { path: path_str });
                }
                residues.push(first);
            }
        }
    }
    if points.is_empty() && !residues.is_empty() {
        Ok(Generated::Residue(ResidueSet::new(m, residues)))
    } else {
        Ok(Generated::Plane(PlaneSet::new(m, points)))
    }
}
