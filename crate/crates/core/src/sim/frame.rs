use super::camera::GateMode;

/// One gated exposure: 16-bit counts in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub index: u64,
    pub width: usize,
    pub height: usize,
    pub mode: GateMode,
    pub pixels: Vec<u16>,
}

impl Frame {
    pub fn new(index: u64, width: usize, height: usize, mode: GateMode) -> Self {
        Self {
            index,
            width,
            height,
            mode,
            pixels: vec![0; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u16) {
        self.pixels[y * self.width + x] = v;
    }

    /// Adds counts, saturating at `u16::MAX`.
    #[inline]
    pub fn add(&mut self, x: usize, y: usize, counts: u32) {
        let p = &mut self.pixels[y * self.width + x];
        *p = (*p as u32 + counts).min(u16::MAX as u32) as u16;
    }

    pub fn total(&self) -> u64 {
        self.pixels.iter().map(|&v| v as u64).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturates_instead_of_wrapping() {
        let mut f = Frame::new(0, 2, 2, GateMode::TimeDependent);
        f.add(1, 1, 65_000);
        f.add(1, 1, 1_000);
        assert_eq!(f.get(1, 1), u16::MAX);
        f.add(1, 1, 5);
        assert_eq!(f.get(1, 1), u16::MAX);
    }
}
