//! HMAP: the binary exchange format for heuristic maps.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "HMAP"
//! 4       4     version, u32 LE (= 1)
//! 8       1     kind: 0 = CF, 1 = PP, 2 = ABS
//! 9       3     reserved, zero
//! 12      4     height, u32 LE
//! 16      4     width, u32 LE
//! 20      4·h·w values, f32 LE, row-major
//! ```

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::heuristics::{HeuristicKind, HeuristicMap, PP_THRESHOLD};

pub const MAGIC: &[u8; 4] = b"HMAP";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 20;
/// Slack allowed on range edges for values coming from a predictor.
pub const RANGE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum HmapError {
    #[error("format error: {0}")]
    Format(String),
    #[error("range error: {kind} value {value} at index {index}")]
    Range {
        kind: HeuristicKind,
        index: usize,
        value: f64,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ReadOptions {
    /// Keep continuous PP values as they are instead of zeroing those below
    /// the path-probability threshold.
    pub raw_pp: bool,
}

#[derive(Debug, Clone)]
pub struct Decoded {
    pub map: HeuristicMap,
    /// PP values below the threshold that were set to 0.
    pub clamped: usize,
}

pub fn write_hmap<W: Write>(map: &HeuristicMap, mut sink: W) -> Result<usize, HmapError> {
    let mut header = [0u8; HEADER_LEN];
    header[0..4].copy_from_slice(MAGIC);
    header[4..8].copy_from_slice(&VERSION.to_le_bytes());
    header[8] = map.kind().code();
    header[12..16].copy_from_slice(&dim_u32(map.height())?.to_le_bytes());
    header[16..20].copy_from_slice(&dim_u32(map.width())?.to_le_bytes());
    sink.write_all(&header)?;
    let mut body = Vec::with_capacity(4 * map.values().len());
    for &v in map.values() {
        body.extend_from_slice(&(v as f32).to_le_bytes());
    }
    sink.write_all(&body)?;
    sink.flush()?;
    Ok(HEADER_LEN + body.len())
}

fn dim_u32(d: usize) -> Result<u32, HmapError> {
    u32::try_from(d).map_err(|_| HmapError::Format(format!("dimension {d} exceeds u32")))
}

pub fn to_bytes(map: &HeuristicMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * map.values().len());
    write_hmap(map, &mut out).expect("writing to memory");
    out
}

pub fn read_hmap<R: Read>(mut source: R, options: ReadOptions) -> Result<Decoded, HmapError> {
    let mut header = [0u8; HEADER_LEN];
    source
        .read_exact(&mut header)
        .map_err(|e| truncated(e, "header"))?;
    if &header[0..4] != MAGIC {
        return Err(HmapError::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(HmapError::Format(format!("unsupported version {version}")));
    }
    let kind = HeuristicKind::from_code(header[8])
        .ok_or_else(|| HmapError::Format(format!("unknown kind {}", header[8])))?;
    if header[9..12] != [0, 0, 0] {
        return Err(HmapError::Format("reserved bytes are not zero".into()));
    }
    let height = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    let width = u32::from_le_bytes(header[16..20].try_into().unwrap()) as usize;
    if height == 0 || width == 0 {
        return Err(HmapError::Format(format!("empty dimensions {height}x{width}")));
    }
    let count = height
        .checked_mul(width)
        .ok_or_else(|| HmapError::Format("dimensions overflow".into()))?;
    let mut body = vec![0u8; 4 * count];
    source
        .read_exact(&mut body)
        .map_err(|e| truncated(e, "payload"))?;
    let mut extra = [0u8; 1];
    if source.read(&mut extra)? != 0 {
        return Err(HmapError::Format("trailing bytes after payload".into()));
    }

    let mut clamped = 0;
    let mut values = Vec::with_capacity(count);
    for (index, chunk) in body.chunks_exact(4).enumerate() {
        let raw = f32::from_le_bytes(chunk.try_into().unwrap()) as f64;
        let range_err = || HmapError::Range {
            kind,
            index,
            value: raw,
        };
        if !raw.is_finite() {
            return Err(range_err());
        }
        let tol = RANGE_TOLERANCE;
        let value = match kind {
            HeuristicKind::Cf => {
                if !(-tol..=1.0 + tol).contains(&raw) {
                    return Err(range_err());
                }
                raw.clamp(0.0, 1.0)
            }
            HeuristicKind::Abs => {
                if raw < -tol {
                    return Err(range_err());
                }
                raw.max(0.0)
            }
            HeuristicKind::Pp => {
                if !(-tol..=1.0 + tol).contains(&raw) {
                    return Err(range_err());
                }
                let v = raw.clamp(0.0, 1.0);
                if options.raw_pp || v == 0.0 || v >= PP_THRESHOLD {
                    v
                } else if v >= PP_THRESHOLD - tol {
                    PP_THRESHOLD
                } else {
                    clamped += 1;
                    0.0
                }
            }
        };
        values.push(value);
    }
    let map = HeuristicMap::new_continuous(kind, height, width, values)
        .map_err(|e| HmapError::Format(e.to_string()))?;
    Ok(Decoded { map, clamped })
}

fn truncated(e: io::Error, what: &str) -> HmapError {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        HmapError::Format(format!("truncated {what}"))
    } else {
        HmapError::Io(e)
    }
}

/// File name used for an instance's map of a given kind, e.g.
/// `maze-s1-00003-a00_7.cf.hmap` for instance `maze-s1-00003-a00/7`.
pub fn file_name(instance_id: &str, kind: HeuristicKind) -> String {
    let stem: String = instance_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect();
    format!("{stem}.{}.hmap", kind.tag())
}

pub fn save(map: &HeuristicMap, path: impl AsRef<Path>) -> Result<usize, HmapError> {
    write_hmap(map, BufWriter::new(File::create(path)?))
}

pub fn load(path: impl AsRef<Path>, options: ReadOptions) -> Result<Decoded, HmapError> {
    read_hmap(BufReader::new(File::open(path)?), options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Cell, GridMap};
    use crate::search::{solve, PTask, SearchConfig};

    #[test]
    fn file_names() {
        assert_eq!(file_name("maze-s1-00003-a00/7", HeuristicKind::Cf), "maze-s1-00003-a00_7.cf.hmap");
        assert_eq!(file_name("x", HeuristicKind::Pp), "x.pp.hmap");
    }

    #[test]
    fn single_cell_file() {
        let map = HeuristicMap::uniform(HeuristicKind::Cf, 1, 1, 1.0).unwrap();
        let bytes = to_bytes(&map);
        assert_eq!(bytes.len(), 24);
        assert_eq!(&bytes[..4], b"HMAP");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(&bytes[8..12], &[0, 0, 0, 0]);
        assert_eq!(&bytes[12..20], &[1, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(&bytes[20..], &1.0f32.to_le_bytes());
        let back = read_hmap(bytes.as_slice(), ReadOptions::default()).unwrap();
        assert_eq!(back.map, map);
        assert_eq!(back.clamped, 0);
    }

    #[test]
    fn truncated_and_malformed() {
        let map = HeuristicMap::uniform(HeuristicKind::Abs, 2, 2, 3.0).unwrap();
        let bytes = to_bytes(&map);
        for cut in [0, 10, 20, bytes.len() - 1] {
            assert!(matches!(
                read_hmap(&bytes[..cut], ReadOptions::default()),
                Err(HmapError::Format(_))
            ));
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(read_hmap(bad.as_slice(), ReadOptions::default()), Err(HmapError::Format(_))));
        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(matches!(read_hmap(bad.as_slice(), ReadOptions::default()), Err(HmapError::Format(_))));
        let mut bad = bytes.clone();
        bad[8] = 7;
        assert!(matches!(read_hmap(bad.as_slice(), ReadOptions::default()), Err(HmapError::Format(_))));
        let mut bad = bytes.clone();
        bad.push(0);
        assert!(matches!(read_hmap(bad.as_slice(), ReadOptions::default()), Err(HmapError::Format(_))));
    }

    fn pp_bytes(values: &[f32]) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(b"HMAP");
        b.extend_from_slice(&1u32.to_le_bytes());
        b.extend_from_slice(&[1, 0, 0, 0]);
        b.extend_from_slice(&1u32.to_le_bytes());
        b.extend_from_slice(&(values.len() as u32).to_le_bytes());
        for v in values {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    }

    #[test]
    fn pp_clamping() {
        let bytes = pp_bytes(&[0.5, 1.0, 0.0, 0.97]);
        let d = read_hmap(bytes.as_slice(), ReadOptions::default()).unwrap();
        assert_eq!(d.clamped, 1);
        assert_eq!(d.map.values()[0], 0.0);
        let raw = read_hmap(bytes.as_slice(), ReadOptions { raw_pp: true }).unwrap();
        assert_eq!(raw.clamped, 0);
        assert_eq!(raw.map.values()[0], 0.5f32 as f64);
        assert!(matches!(
            read_hmap(pp_bytes(&[1.5]).as_slice(), ReadOptions::default()),
            Err(HmapError::Range { .. })
        ));
        assert!(matches!(
            read_hmap(pp_bytes(&[f32::NAN]).as_slice(), ReadOptions::default()),
            Err(HmapError::Range { .. })
        ));
    }

    #[test]
    fn clamped_cell_is_off_corridor() {
        // 1x4 corridor: with the 0.5 cell clamped to 0 the greedy search
        // still reaches the goal but the cell no longer outranks others.
        let grid = GridMap::empty(1, 4);
        let d = read_hmap(pp_bytes(&[1.0, 0.5, 1.0, 1.0]).as_slice(), ReadOptions::default()).unwrap();
        assert_eq!(d.map.get(Cell::new(0, 1)), 0.0);
        let task = PTask::new(&grid, Cell::new(0, 0), Cell::new(0, 3)).unwrap();
        let r = solve(&task, &SearchConfig::gbfs_ppm(&d.map).unwrap()).unwrap();
        assert!(r.is_found());
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let vals: Vec<f64> = (0..12).map(|i| (i as f32 * 0.37).fract() as f64).collect();
        let map = HeuristicMap::new(HeuristicKind::Cf, 3, 4, vals).unwrap();
        let a = to_bytes(&map);
        let b = to_bytes(&read_hmap(a.as_slice(), ReadOptions::default()).unwrap().map);
        assert_eq!(a, b);
    }
}
