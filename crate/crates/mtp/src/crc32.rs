//! CRC-32 (IEEE 802.3, reflected) for file and frame checksums.

const POLY: u32 = 0xEDB8_8320;

/// Incremental CRC-32 over a byte stream.
#[derive(Debug, Clone)]
pub(crate) struct Crc32 {
    state: u32,
}

impl Crc32 {
    pub(crate) fn new() -> Self {
        Crc32 { state: 0xFFFF_FFFF }
    }

    pub(crate) fn update(&mut self, data: &[u8]) {
        for &byte in data {
            self.state ^= byte as u32;
            for _ in 0..8 {
                let lsb = self.state & 1;
                self.state >>= 1;
                if lsb == 1 {
                    self.state ^= POLY;
                }
            }
        }
    }

    pub(crate) fn finalize(&self) -> u32 {
        !self.state
    }
}

pub(crate) fn crc32(data: &[u8]) -> u32 {
    let mut crc = Crc32::new();
    crc.update(data);
    crc.finalize()
}
