//! PFM (portable float map) depth IO, grayscale `Pf`, scale -1.0
//! (little-endian). Scanlines are stored bottom-to-top per the format
//! convention. Values are range along the pixel ray in millimetres;
//! invalid pixels are written as 0.0.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::depth::DepthImage;
use crate::error::RenderError;

pub fn write_pfm(path: &Path, img: &DepthImage) -> Result<(), RenderError> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "Pf\n{} {}\n-1.0\n", img.width, img.height)?;
    for y in (0..img.height).rev() {
        for x in 0..img.width {
            let v = img.get(x, y).unwrap_or(0.0);
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_pfm(path: &Path) -> Result<DepthImage, RenderError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;

    let bad = |reason: &str| RenderError::MalformedImage {
        format: "PFM",
        reason: reason.to_string(),
    };

    fn token(bytes: &[u8], pos: &mut usize) -> Option<String> {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        (start != *pos).then(|| String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    }

    let mut pos = 0;
    let magic = token(&bytes, &mut pos).ok_or_else(|| bad("truncated header"))?;
    if magic != "Pf" {
        return Err(bad("expected grayscale magic 'Pf'"));
    }
    let width: usize = token(&bytes, &mut pos)
        .ok_or_else(|| bad("truncated header"))?
        .parse()
        .map_err(|_| bad("bad width"))?;
    let height: usize = token(&bytes, &mut pos)
        .ok_or_else(|| bad("truncated header"))?
        .parse()
        .map_err(|_| bad("bad height"))?;
    let scale: f64 = token(&bytes, &mut pos)
        .ok_or_else(|| bad("truncated header"))?
        .parse()
        .map_err(|_| bad("bad scale"))?;
    pos += 1; // single whitespace byte after the scale line

    let n = width * height;
    if bytes.len() < pos + 4 * n {
        return Err(bad("truncated pixel data"));
    }
    let little_endian = scale < 0.0;
    let mut values = vec![0.0f32; n];
    for y in 0..height {
        let src_row = height - 1 - y; // stored bottom-to-top
        for x in 0..width {
            let o = pos + (src_row * width + x) * 4;
            let b = [bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]];
            values[y * width + x] = if little_endian {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            };
        }
    }
    Ok(DepthImage::from_values(width, height, values))
}
