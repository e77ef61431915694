//! Binary PPM (P6) RGB image IO.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::depth::RgbImage;
use crate::error::RenderError;

pub fn write_ppm(path: &Path, img: &RgbImage) -> Result<(), RenderError> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P6\n{} {}\n255\n", img.width, img.height)?;
    w.write_all(&img.data)?;
    w.flush()?;
    Ok(())
}

pub fn read_ppm(path: &Path) -> Result<RgbImage, RenderError> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;

    let bad = |reason: &str| RenderError::MalformedImage {
        format: "PPM",
        reason: reason.to_string(),
    };

    let mut pos = 0;
    let mut fields = Vec::new();
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1; // single whitespace after maxval

    if fields[0] != "P6" {
        return Err(bad("expected magic 'P6'"));
    }
    let width: usize = fields[1].parse().map_err(|_| bad("bad width"))?;
    let height: usize = fields[2].parse().map_err(|_| bad("bad height"))?;
    if fields[3] != "255" {
        return Err(bad("only maxval 255 supported"));
    }
    let n = width * height * 3;
    if bytes.len() < pos + n {
        return Err(bad("truncated pixel data"));
    }
    Ok(RgbImage {
        width,
        height,
        data: bytes[pos..pos + n].to_vec(),
    })
}
