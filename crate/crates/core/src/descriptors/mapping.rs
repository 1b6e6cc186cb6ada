//! Uniform (`u2`) and rotation-invariant uniform (`riu2`) code mappings.

use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MappingKind {
    U2,
    Riu2,
}

/// Lookup table from raw `P`-bit codes to histogram bins.
#[derive(Debug, Clone)]
pub struct UniformMapping {
    pub kind: MappingKind,
    pub points: usize,
    pub table: Vec<u32>,
    pub bins: usize,
}

/// Number of circular 0/1 transitions in a `points`-bit code.
pub fn transitions(code: u32, points: usize) -> u32 {
    let mask = if points == 32 { u32::MAX } else { (1u32 << points) - 1 };
    let code = code & mask;
    let rotated = ((code >> 1) | (code << (points - 1))) & mask;
    (code ^ rotated).count_ones()
}

impl UniformMapping {
    fn build(points: usize, kind: MappingKind) -> Self {
        let size = 1usize << points;
        let mut table = vec![0u32; size];
        let bins = match kind {
            MappingKind::U2 => {
                let mut next = 0u32;
                let nonuniform = (points * (points - 1) + 2) as u32;
                for (code, slot) in table.iter_mut().enumerate() {
                    if transitions(code as u32, points) <= 2 {
                        *slot = next;
                        next += 1;
                    } else {
                        *slot = nonuniform;
                    }
                }
                debug_assert_eq!(next, nonuniform);
                nonuniform as usize + 1
            }
            MappingKind::Riu2 => {
                for (code, slot) in table.iter_mut().enumerate() {
                    *slot = if transitions(code as u32, points) <= 2 {
                        (code as u32).count_ones()
                    } else {
                        points as u32 + 1
                    };
                }
                points + 2
            }
        };
        Self {
            kind,
            points,
            table,
            bins,
        }
    }

    #[inline]
    pub fn map(&self, code: u32) -> usize {
        self.table[code as usize] as usize
    }
}

/// Shared mapping table for `points` in {8, 16}.
pub fn uniform_mapping(points: usize, kind: MappingKind) -> Result<&'static UniformMapping> {
    static TABLES: [OnceLock<UniformMapping>; 4] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let slot = match (points, kind) {
        (8, MappingKind::U2) => 0,
        (8, MappingKind::Riu2) => 1,
        (16, MappingKind::U2) => 2,
        (16, MappingKind::Riu2) => 3,
        _ => {
            return Err(Error::InvalidInput(format!(
                "uniform mappings exist for 8 or 16 points, got {points}"
            )))
        }
    };
    Ok(TABLES[slot].get_or_init(|| UniformMapping::build(points, kind)))
}
