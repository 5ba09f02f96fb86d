//! `COSP` frame-stream container.
//!
//! Little-endian layout:
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `COSP`                            |
//! | 4      | 4    | format version (1)                      |
//! | 8      | 4    | frame width, pixels                     |
//! | 12     | 4    | frame height, pixels                    |
//! | 16     | 2    | bits per pixel (16)                     |
//! | 18     | 1    | gate mode (0 time-dependent, 1 time-independent) |
//! | 19     | 1    | reserved, zero                          |
//! | 20     | 8    | frame count                             |
//! | 28     | 8    | master seed (0 for recorded data)       |
//!
//! followed by `frame count` records of an 8-byte frame index and
//! `width × height` row-major `u16` pixels.

use std::io::{self, Read, Write};

use crate::error::{Error, Result};
use crate::sim::{Frame, GateMode};

pub const FRAME_MAGIC: [u8; 4] = *b"COSP";
pub const FRAME_FORMAT_VERSION: u32 = 1;
pub const FRAME_HEADER_LEN: usize = 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameStreamHeader {
    pub width: u32,
    pub height: u32,
    pub bits_per_pixel: u16,
    pub frame_count: u64,
    pub gate_mode: GateMode,
    pub master_seed: u64,
}

impl FrameStreamHeader {
    pub fn new(width: usize, height: usize, frame_count: u64, gate_mode: GateMode, master_seed: u64) -> Self {
        Self {
            width: width as u32,
            height: height as u32,
            bits_per_pixel: 16,
            frame_count,
            gate_mode,
            master_seed,
        }
    }

    pub fn frame_pixels(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Bytes occupied by one frame record.
    pub fn record_len(&self) -> usize {
        8 + 2 * self.frame_pixels()
    }

    /// Total file size implied by the header.
    pub fn stream_len(&self) -> u64 {
        FRAME_HEADER_LEN as u64 + self.frame_count * self.record_len() as u64
    }

    pub fn to_bytes(&self) -> [u8; FRAME_HEADER_LEN] {
        let mut b = [0u8; FRAME_HEADER_LEN];
        b[0..4].copy_from_slice(&FRAME_MAGIC);
        b[4..8].copy_from_slice(&FRAME_FORMAT_VERSION.to_le_bytes());
        b[8..12].copy_from_slice(&self.width.to_le_bytes());
        b[12..16].copy_from_slice(&self.height.to_le_bytes());
        b[16..18].copy_from_slice(&self.bits_per_pixel.to_le_bytes());
        b[18] = self.gate_mode.tag();
        b[20..28].copy_from_slice(&self.frame_count.to_le_bytes());
        b[28..36].copy_from_slice(&self.master_seed.to_le_bytes());
        b
    }

    pub fn read_from<R: Read>(reader: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_header_bytes(reader, &mut magic)?;
        if magic != FRAME_MAGIC {
            return Err(Error::BadMagic {
                expected: FRAME_MAGIC,
                found: magic,
            });
        }
        let mut version = [0u8; 4];
        read_header_bytes(reader, &mut version)?;
        let version = u32::from_le_bytes(version);
        if version != FRAME_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: FRAME_FORMAT_VERSION,
                found: version,
            });
        }
        let mut rest = [0u8; FRAME_HEADER_LEN - 8];
        read_header_bytes(reader, &mut rest)?;
        let u32_at = |o: usize| u32::from_le_bytes(rest[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(rest[o..o + 8].try_into().unwrap());
        let bits_per_pixel = u16::from_le_bytes([rest[8], rest[9]]);
        if bits_per_pixel != 16 {
            return Err(Error::Format(format!(
                "unsupported bits per pixel {bits_per_pixel}"
            )));
        }
        let gate_mode = GateMode::from_tag(rest[10])
            .ok_or_else(|| Error::Format(format!("unknown gate mode tag {}", rest[10])))?;
        Ok(Self {
            width: u32_at(0),
            height: u32_at(4),
            bits_per_pixel,
            gate_mode,
            frame_count: u64_at(12),
            master_seed: u64_at(20),
        })
    }
}

fn read_header_bytes<R: Read>(reader: &mut R, buf: &mut [u8]) -> Result<()> {
    reader.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::Format("truncated header".into()),
        _ => Error::Io(e),
    })
}

/// Sequential writer; the declared frame count must be met before
/// [`FrameStreamWriter::finish`].
pub struct FrameStreamWriter<W: Write> {
    inner: W,
    header: FrameStreamHeader,
    written: u64,
    buf: Vec<u8>,
}

impl<W: Write> FrameStreamWriter<W> {
    pub fn new(mut inner: W, header: FrameStreamHeader) -> Result<Self> {
        inner.write_all(&header.to_bytes())?;
        Ok(Self {
            inner,
            header,
            written: 0,
            buf: Vec::with_capacity(header.record_len()),
        })
    }

    pub fn header(&self) -> &FrameStreamHeader {
        &self.header
    }

    pub fn write_frame(&mut self, frame: &Frame) -> Result<()> {
        if frame.width != self.header.width as usize || frame.height != self.header.height as usize {
            return Err(Error::ShapeMismatch {
                expected: (self.header.height as usize, self.header.width as usize),
                found: (frame.height, frame.width),
            });
        }
        if self.written >= self.header.frame_count {
            return Err(Error::Format(format!(
                "more frames than the declared {}",
                self.header.frame_count
            )));
        }
        self.buf.clear();
        self.buf.extend_from_slice(&frame.index.to_le_bytes());
        for &p in &frame.pixels {
            self.buf.extend_from_slice(&p.to_le_bytes());
        }
        self.inner
            .write_all(&self.buf)
            .map_err(|source| Error::FrameWrite {
                frame: frame.index,
                source,
            })?;
        self.written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        if self.written != self.header.frame_count {
            return Err(Error::Format(format!(
                "wrote {} frames but declared {}",
                self.written, self.header.frame_count
            )));
        }
        self.inner.flush()?;
        Ok(self.inner)
    }
}

/// Streaming reader yielding frames as their bytes arrive.
pub struct FrameStreamReader<R: Read> {
    inner: R,
    header: FrameStreamHeader,
    read: u64,
    done: bool,
    buf: Vec<u8>,
}

impl<R: Read> FrameStreamReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        let header = FrameStreamHeader::read_from(&mut inner)?;
        Ok(Self {
            inner,
            header,
            read: 0,
            done: false,
            buf: vec![0; header.record_len()],
        })
    }

    pub fn header(&self) -> &FrameStreamHeader {
        &self.header
    }

    fn next_frame(&mut self) -> Result<Option<Frame>> {
        if self.read == self.header.frame_count {
            let mut probe = [0u8; 1];
            return match self.inner.read(&mut probe)? {
                0 => Ok(None),
                _ => Err(Error::Format(format!(
                    "trailing data after {} declared frames",
                    self.header.frame_count
                ))),
            };
        }
        self.inner.read_exact(&mut self.buf).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => Error::Truncated { frame: self.read },
            _ => Error::Io(e),
        })?;
        let index = u64::from_le_bytes(self.buf[0..8].try_into().unwrap());
        let pixels = self.buf[8..]
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect();
        self.read += 1;
        Ok(Some(Frame {
            index,
            width: self.header.width as usize,
            height: self.header.height as usize,
            mode: self.header.gate_mode,
            pixels,
        }))
    }
}

impl<R: Read> Iterator for FrameStreamReader<R> {
    type Item = Result<Frame>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_frame() {
            Ok(Some(f)) => Some(Ok(f)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Encodes a complete stream in memory. All frames must share dimensions
/// and gate mode.
pub fn encode_frame_stream(frames: &[Frame], master_seed: u64) -> Result<Vec<u8>> {
    let first = frames
        .first()
        .ok_or_else(|| Error::InvalidParameter("no frames to encode".into()))?;
    if frames.iter().any(|f| f.mode != first.mode) {
        return Err(Error::InvalidParameter("frames mix gate modes".into()));
    }
    let header = FrameStreamHeader::new(
        first.width,
        first.height,
        frames.len() as u64,
        first.mode,
        master_seed,
    );
    let mut writer = FrameStreamWriter::new(Vec::with_capacity(header.stream_len() as usize), header)?;
    for f in frames {
        writer.write_frame(f)?;
    }
    writer.finish()
}

pub fn decode_frame_stream(bytes: &[u8]) -> Result<(FrameStreamHeader, Vec<Frame>)> {
    let reader = FrameStreamReader::new(bytes)?;
    let header = *reader.header();
    let frames = reader.collect::<Result<Vec<_>>>()?;
    Ok((header, frames))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(index: u64, seed: u16) -> Frame {
        let mut f = Frame::new(index, 64, 64, GateMode::TimeDependent);
        for (k, p) in f.pixels.iter_mut().enumerate() {
            *p = (k as u16).wrapping_mul(31).wrapping_add(seed);
        }
        f
    }

    #[test]
    fn single_frame_file_size() {
        let bytes = encode_frame_stream(&[frame(0, 1)], 0).unwrap();
        assert_eq!(bytes.len(), FRAME_HEADER_LEN + 8 + 64 * 64 * 2);
    }

    #[test]
    fn roundtrip_three_frames() {
        let frames = vec![frame(0, 1), frame(1, 2), frame(7, 3)];
        let bytes = encode_frame_stream(&frames, 42).unwrap();
        let (header, back) = decode_frame_stream(&bytes).unwrap();
        assert_eq!(header.master_seed, 42);
        assert_eq!(header.frame_count, 3);
        assert_eq!(back, frames);
    }

    #[test]
    fn wrong_magic_yields_nothing() {
        let mut bytes = encode_frame_stream(&[frame(0, 1)], 0).unwrap();
        bytes[0] = b'X';
        assert!(matches!(FrameStreamReader::new(&bytes[..]), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn version_mismatch() {
        let mut bytes = encode_frame_stream(&[frame(0, 1)], 0).unwrap();
        bytes[4] = 2;
        assert!(matches!(
            FrameStreamReader::new(&bytes[..]),
            Err(Error::VersionMismatch { found: 2, .. })
        ));
    }

    #[test]
    fn truncated_payload() {
        let bytes = encode_frame_stream(&[frame(0, 1), frame(1, 2)], 0).unwrap();
        let cut = &bytes[..bytes.len() - 3];
        let mut reader = FrameStreamReader::new(cut).unwrap();
        assert!(reader.next().unwrap().is_ok());
        assert!(matches!(reader.next(), Some(Err(Error::Truncated { frame: 1 }))));
        assert!(reader.next().is_none());
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut bytes = encode_frame_stream(&[frame(0, 1)], 0).unwrap();
        bytes.push(0);
        assert!(matches!(decode_frame_stream(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn writer_enforces_count_and_shape() {
        let header = FrameStreamHeader::new(64, 64, 1, GateMode::TimeDependent, 0);
        let w = FrameStreamWriter::new(Vec::new(), header).unwrap();
        assert!(w.finish().is_err());
        let mut w = FrameStreamWriter::new(Vec::new(), header).unwrap();
        let small = Frame::new(0, 8, 8, GateMode::TimeDependent);
        assert!(w.write_frame(&small).is_err());
    }

    #[test]
    fn streaming_yields_before_end() {
        // Reader over a source that only holds the first frame so far.
        let bytes = encode_frame_stream(&[frame(0, 1), frame(1, 2)], 0).unwrap();
        let partial = &bytes[..FRAME_HEADER_LEN + 8 + 64 * 64 * 2];
        let mut reader = FrameStreamReader::new(partial).unwrap();
        assert_eq!(reader.next().unwrap().unwrap(), frame(0, 1));
    }
}
