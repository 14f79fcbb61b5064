//! SYMF tensor files and per-channel grayscale PNGs.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::{Raster, RasterError, CHANNELS, CHANNEL_SUFFIXES};

pub const MAGIC: &[u8; 4] = b"SYMF";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 20;

impl Raster {
    /// Header (`SYMF`, version, H, W, C) followed by channel-major f32 data,
    /// all little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let res = self.resolution() as u32;
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.data().len());
        out.extend_from_slice(MAGIC);
        for v in [VERSION, res, res, CHANNELS as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in self.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Raster, RasterError> {
        if bytes.len() < HEADER_LEN {
            return Err(RasterError::Truncated);
        }
        if &bytes[..4] != MAGIC {
            return Err(RasterError::BadMagic);
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
        let (version, h, w, c) = (word(1), word(2), word(3), word(4));
        if version != VERSION {
            return Err(RasterError::BadVersion(version));
        }
        if h != w || c as usize != CHANNELS {
            return Err(RasterError::BadShape { h, w, c });
        }
        let n = c as usize * h as usize * w as usize;
        let body = &bytes[HEADER_LEN..];
        if body.len() != 4 * n {
            return Err(RasterError::Truncated);
        }
        let data = body
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        Raster::from_data(h as usize, data)
    }

    pub fn write_tensor(&self, path: &Path) -> Result<(), RasterError> {
        let mut f = BufWriter::new(File::create(path)?);
        f.write_all(&self.to_bytes())?;
        f.flush()?;
        Ok(())
    }

    pub fn read_tensor(path: &Path) -> Result<Raster, RasterError> {
        let mut bytes = Vec::new();
        File::open(path)?.read_to_end(&mut bytes)?;
        Raster::from_bytes(&bytes)
    }

    /// 8-bit gray levels `round(255 v)` for one channel.
    pub fn gray8(&self, channel: usize) -> Vec<u8> {
        self.channel(channel)
            .iter()
            .map(|v| (255.0 * v).round() as u8)
            .collect()
    }

    /// Encoded 8-bit grayscale PNG of one channel.
    pub fn png_bytes(&self, channel: usize) -> Result<Vec<u8>, RasterError> {
        let res = self.resolution() as u32;
        let mut out = Vec::new();
        let mut enc = png::Encoder::new(&mut out, res, res);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header()?;
        w.write_image_data(&self.gray8(channel))?;
        w.finish()?;
        Ok(out)
    }

    /// Writes `<base>_q.png`, `<base>_s.png`, `<base>_h.png`.
    pub fn write_pngs(&self, base: &Path) -> Result<[PathBuf; CHANNELS], RasterError> {
        let paths = png_paths(base);
        for (c, path) in paths.iter().enumerate() {
            std::fs::write(path, self.png_bytes(c)?)?;
        }
        Ok(paths)
    }
}

pub fn png_paths(base: &Path) -> [PathBuf; CHANNELS] {
    CHANNEL_SUFFIXES.map(|s| {
        let mut name = base.file_name().unwrap_or_default().to_os_string();
        name.push(format!("_{s}.png"));
        base.with_file_name(name)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Raster {
        let res = 32;
        let data = (0..CHANNELS * res * res)
            .map(|i| (i % 7) as f32 / 6.0)
            .collect();
        Raster::from_data(res, data).unwrap()
    }

    #[test]
    fn header_layout() {
        let r = Raster::blank(128);
        let b = r.to_bytes();
        assert_eq!(&b[..4], b"SYMF");
        let words: Vec<u32> = (1..5)
            .map(|i| u32::from_le_bytes(b[4 * i..4 * i + 4].try_into().unwrap()))
            .collect();
        assert_eq!(words, [1, 128, 128, 3]);
        assert_eq!(b.len(), 20 + 4 * 3 * 128 * 128);
    }

    #[test]
    fn tensor_round_trip() {
        let r = sample();
        let back = Raster::from_bytes(&r.to_bytes()).unwrap();
        assert_eq!(back.to_bytes(), r.to_bytes());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.symf");
        r.write_tensor(&p).unwrap();
        assert_eq!(Raster::read_tensor(&p).unwrap(), r);
    }

    #[test]
    fn corrupt_headers() {
        let mut b = sample().to_bytes();
        assert!(matches!(Raster::from_bytes(&b[..10]), Err(RasterError::Truncated)));
        assert!(matches!(Raster::from_bytes(&b[..b.len() - 1]), Err(RasterError::Truncated)));
        b[4] = 2;
        assert!(matches!(Raster::from_bytes(&b), Err(RasterError::BadVersion(2))));
        b[0] = b'X';
        assert!(matches!(Raster::from_bytes(&b), Err(RasterError::BadMagic)));
    }

    #[test]
    fn png_of_blank_is_black() {
        let dir = tempfile::tempdir().unwrap();
        let paths = Raster::blank(32).write_pngs(&dir.path().join("s7")).unwrap();
        assert!(paths[0].ends_with("s7_q.png"));
        assert!(paths[2].ends_with("s7_h.png"));
        for p in &paths {
            let dec = png::Decoder::new(std::io::BufReader::new(File::open(p).unwrap()));
            let mut reader = dec.read_info().unwrap();
            let mut buf = vec![0; reader.output_buffer_size().unwrap()];
            let info = reader.next_frame(&mut buf).unwrap();
            assert_eq!((info.width, info.height), (32, 32));
            assert_eq!(info.color_type, png::ColorType::Grayscale);
            assert!(buf[..info.buffer_size()].iter().all(|v| *v == 0));
        }
    }

    #[test]
    fn gray_levels_round() {
        let r = sample();
        let g = r.gray8(0);
        assert_eq!(g[0], 0);
        assert_eq!(g[3], 128);
        assert_eq!(g[6], 255);
    }
}
