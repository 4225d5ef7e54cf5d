//! Image and sinogram file formats: binary PGM, plain CSV, and the
//! `theta,sigma,value` sinogram CSV.

use super::{ImageGrid, Sinogram};
use crate::error::{Error, Result};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

pub const SINOGRAM_HEADER: &str = "theta,sigma,value";

/// Binary PGM (P5, maxval 255). Values are rescaled linearly from
/// `[min, max]` to `[0, 255]` with `floor`; a constant image maps to 0.
pub fn write_pgm<W: Write>(img: &ImageGrid, mut w: W) -> Result<()> {
    let (lo, hi) = img
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    write!(w, "P5\n{} {}\n255\n", img.n1(), img.n2())?;
    let bytes: Vec<u8> = img
        .values()
        .iter()
        .map(|&v| {
            if span > 0.0 {
                (255.0 * (v - lo) / span).floor().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect();
    w.write_all(&bytes)?;
    Ok(())
}

/// One image row per line, comma separated.
pub fn write_image_csv<W: Write>(img: &ImageGrid, mut w: W) -> Result<()> {
    for row in img.values().chunks(img.n1()) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_image_csv<R: Read>(r: R) -> Result<ImageGrid> {
    let mut values = Vec::new();
    let mut n1 = None;
    let mut n2 = 0;
    for (lineno, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("image csv line {}: {e}", lineno + 1)))?;
        match n1 {
            None => n1 = Some(row.len()),
            Some(n) if n != row.len() => {
                return Err(Error::Parse(format!(
                    "image csv line {} has {} values, expected {n}",
                    lineno + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        values.extend(row);
        n2 += 1;
    }
    ImageGrid::new(n1.unwrap_or(0), n2, values)
}

pub fn write_sinogram_csv<W: Write>(s: &Sinogram, mut w: W) -> Result<()> {
    writeln!(w, "{SINOGRAM_HEADER}")?;
    for (a, &theta) in s.angles().iter().enumerate() {
        for (&sigma, &v) in s.offsets().iter().zip(s.row(a)) {
            writeln!(w, "{theta:?},{sigma:?},{v:?}")?;
        }
    }
    Ok(())
}

/// Reads the angle-major `theta,sigma,value` CSV written by [`write_sinogram_csv`].
pub fn read_sinogram_csv<R: Read>(r: R) -> Result<Sinogram> {
    let mut lines = BufReader::new(r).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty sinogram file".into()))??;
    if header.trim() != SINOGRAM_HEADER {
        return Err(Error::Parse(format!(
            "sinogram header must be {SINOGRAM_HEADER:?}, got {header:?}"
        )));
    }
    let mut angles: Vec<f64> = Vec::new();
    let mut offsets: Vec<f64> = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("sinogram line {}: {e}", lineno + 2)))?;
        if f.len() != 3 {
            return Err(Error::Parse(format!("sinogram line {}: expected 3 fields", lineno + 2)));
        }
        if angles.last() != Some(&f[0]) {
            angles.push(f[0]);
        }
        if angles.len() == 1 {
            offsets.push(f[1]);
        } else {
            let k = values.len() % offsets.len();
            if offsets[k] != f[1] {
                return Err(Error::Parse(format!(
                    "sinogram line {}: offsets differ between angles",
                    lineno + 2
                )));
            }
        }
        values.push(f[2]);
    }
    Sinogram::new(angles, offsets, values)
}

pub fn write_pgm_file(img: &ImageGrid, path: impl AsRef<Path>) -> Result<()> {
    write_pgm(img, std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn write_image_csv_file(img: &ImageGrid, path: impl AsRef<Path>) -> Result<()> {
    write_image_csv(img, std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn write_sinogram_csv_file(s: &Sinogram, path: impl AsRef<Path>) -> Result<()> {
    write_sinogram_csv(s, std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn read_sinogram_csv_file(path: impl AsRef<Path>) -> Result<Sinogram> {
    let path = path.as_ref();
    let f = std::fs::File::open(path)
        .map_err(|e| Error::Io(e).context(format!("opening {}", path.display())))?;
    read_sinogram_csv(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_layout() {
        let img = ImageGrid::new(2, 2, vec![0.0, 0.5, 1.0, 0.25]).unwrap();
        let mut buf = Vec::new();
        write_pgm(&img, &mut buf).unwrap();
        assert_eq!(&buf[..11], b"P5\n2 2\n255\n");
        assert_eq!(&buf[11..], &[0, 127, 255, 63]);
        let flat = ImageGrid::constant(2, 2, 3.0).unwrap();
        let mut buf = Vec::new();
        write_pgm(&flat, &mut buf).unwrap();
        assert_eq!(&buf[11..], &[0, 0, 0, 0]);
    }

    #[test]
    fn image_csv_round_trip() {
        let img = ImageGrid::new(3, 2, vec![0.1, 1.0 / 3.0, -2.0, 1e-17, 5.0, 6.5]).unwrap();
        let mut buf = Vec::new();
        write_image_csv(&img, &mut buf).unwrap();
        assert_eq!(read_image_csv(buf.as_slice()).unwrap(), img);
    }

    #[test]
    fn sinogram_csv_round_trip() {
        let s = Sinogram::new(vec![0.0, 1.0, 2.5], vec![-0.5, 0.0, 0.5], (0..9).map(|v| v as f64 / 7.0).collect())
            .unwrap();
        let mut buf = Vec::new();
        write_sinogram_csv(&s, &mut buf).unwrap();
        assert!(buf.starts_with(b"theta,sigma,value\n"));
        assert_eq!(read_sinogram_csv(buf.as_slice()).unwrap(), s);
        assert!(read_sinogram_csv("a,b,c\n".as_bytes()).is_err());
    }
}
