//! ReID embedding sidecar: one file per sequence.
//!
//! Binary layout, all little-endian: `u32 frame_count`, `u32 dims`, then per
//! frame `u32 detection_count` followed by `detection_count * dims` f32
//! values in detection order. (The per-frame count makes the file
//! self-delimiting.) A JSON alternative, an array of frames each holding
//! an array of embedding arrays, is accepted for small tests.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DVector;

use super::FormatError;

/// Embeddings of one frame, in detection order.
pub type FrameEmbeddings = Vec<DVector<f64>>;

/// Embeddings grouped per frame, in detection order.
pub type EmbeddingFile = Vec<FrameEmbeddings>;

pub fn write_embeddings_binary(path: &Path, frames: &EmbeddingFile) -> Result<(), FormatError> {
    let dims = frames
        .iter()
        .flat_map(|f| f.iter())
        .map(DVector::len)
        .next()
        .unwrap_or(0);
    for (i, frame) in frames.iter().enumerate() {
        for (j, e) in frame.iter().enumerate() {
            if e.len() != dims {
                return Err(FormatError::Sidecar(format!(
                    "frame {i} detection {j}: dimension {} != {}",
                    e.len(),
                    dims
                )));
            }
        }
    }
    let mut file = fs::File::create(path)?;
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(&(frames.len() as u32).to_le_bytes());
    buf.extend_from_slice(&(dims as u32).to_le_bytes());
    for frame in frames {
        buf.extend_from_slice(&(frame.len() as u32).to_le_bytes());
        for e in frame {
            for v in e.iter() {
                buf.extend_from_slice(&(*v as f32).to_le_bytes());
            }
        }
    }
    file.write_all(&buf)?;
    Ok(())
}

pub fn read_embeddings_binary(path: &Path) -> Result<EmbeddingFile, FormatError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut cursor = 0usize;
    let take_u32 = |cursor: &mut usize| -> Result<u32, FormatError> {
        let end = *cursor + 4;
        if end > bytes.len() {
            return Err(FormatError::Sidecar("truncated header".into()));
        }
        let v = u32::from_le_bytes(bytes[*cursor..end].try_into().unwrap());
        *cursor = end;
        Ok(v)
    };
    let frame_count = take_u32(&mut cursor)? as usize;
    let dims = take_u32(&mut cursor)? as usize;
    let mut frames = Vec::with_capacity(frame_count);
    for f in 0..frame_count {
        let count = take_u32(&mut cursor)? as usize;
        let mut frame = Vec::with_capacity(count);
        for _ in 0..count {
            let end = cursor + 4 * dims;
            if end > bytes.len() {
                return Err(FormatError::Sidecar(format!("truncated frame {f}")));
            }
            let values: Vec<f64> = bytes[cursor..end]
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
                .collect();
            cursor = end;
            frame.push(DVector::from_vec(values));
        }
        frames.push(frame);
    }
    if cursor != bytes.len() {
        return Err(FormatError::Sidecar("trailing bytes".into()));
    }
    Ok(frames)
}

pub fn write_embeddings_json(path: &Path, frames: &EmbeddingFile) -> Result<(), FormatError> {
    let plain: Vec<Vec<Vec<f64>>> = frames
        .iter()
        .map(|f| f.iter().map(|e| e.iter().copied().collect()).collect())
        .collect();
    fs::write(path, serde_json::to_string(&plain)?)?;
    Ok(())
}

pub fn read_embeddings_json(path: &Path) -> Result<EmbeddingFile, FormatError> {
    let text = fs::read_to_string(path)?;
    let plain: Vec<Vec<Vec<f64>>> = serde_json::from_str(&text)?;
    Ok(plain
        .into_iter()
        .map(|f| f.into_iter().map(DVector::from_vec).collect())
        .collect())
}

/// Reads a sidecar, dispatching on the `.json` extension.
pub fn read_embeddings(path: &Path) -> Result<EmbeddingFile, FormatError> {
    if path.extension().is_some_and(|e| e == "json") {
        read_embeddings_json(path)
    } else {
        read_embeddings_binary(path)
    }
}
