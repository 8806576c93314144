//! Built-in benchmark functions: S-boxes from AES, DES and PRESENT, a small
//! avalanche-passing 8-bit hash, and the worked examples. Each is exposed as
//! a lookup table and as a minterm [`PlaFunction`].

use std::path::Path;

use crate::error::{Error, Result};
use crate::pla::{write_pla, PlaFunction};

pub const AES_SBOX: [u8; 256] = [
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
];

/// DES S-boxes in row-major order: row `b1 b6`, column `b2 b3 b4 b5`.
pub const DES_SBOXES: [[u8; 64]; 8] = [
    [
        14, 4, 13, 1, 2, 15, 11, 8, 3, 10, 6, 12, 5, 9, 0, 7, 0, 15, 7, 4, 14, 2, 13, 1, 10, 6, 12,
        11, 9, 5, 3, 8, 4, 1, 14, 8, 13, 6, 2, 11, 15, 12, 9, 7, 3, 10, 5, 0, 15, 12, 8, 2, 4, 9,
        1, 7, 5, 11, 3, 14, 10, 0, 6, 13,
    ],
    [
        15, 1, 8, 14, 6, 11, 3, 4, 9, 7, 2, 13, 12, 0, 5, 10, 3, 13, 4, 7, 15, 2, 8, 14, 12, 0, 1,
        10, 6, 9, 11, 5, 0, 14, 7, 11, 10, 4, 13, 1, 5, 8, 12, 6, 9, 3, 2, 15, 13, 8, 10, 1, 3, 15,
        4, 2, 11, 6, 7, 12, 0, 5, 14, 9,
    ],
    [
        10, 0, 9, 14, 6, 3, 15, 5, 1, 13, 12, 7, 11, 4, 2, 8, 13, 7, 0, 9, 3, 4, 6, 10, 2, 8, 5,
        14, 12, 11, 15, 1, 13, 6, 4, 9, 8, 15, 3, 0, 11, 1, 2, 12, 5, 10, 14, 7, 1, 10, 13, 0, 6,
        9, 8, 7, 4, 15, 14, 3, 11, 5, 2, 12,
    ],
    [
        7, 13, 14, 3, 0, 6, 9, 10, 1, 2, 8, 5, 11, 12, 4, 15, 13, 8, 11, 5, 6, 15, 0, 3, 4, 7, 2,
        12, 1, 10, 14, 9, 10, 6, 9, 0, 12, 11, 7, 13, 15, 1, 3, 14, 5, 2, 8, 4, 3, 15, 0, 6, 10, 1,
        13, 8, 9, 4, 5, 11, 12, 7, 2, 14,
    ],
    [
        2, 12, 4, 1, 7, 10, 11, 6, 8, 5, 3, 15, 13, 0, 14, 9, 14, 11, 2, 12, 4, 7, 13, 1, 5, 0, 15,
        10, 3, 9, 8, 6, 4, 2, 1, 11, 10, 13, 7, 8, 15, 9, 12, 5, 6, 3, 0, 14, 11, 8, 12, 7, 1, 14,
        2, 13, 6, 15, 0, 9, 10, 4, 5, 3,
    ],
    [
        12, 1, 10, 15, 9, 2, 6, 8, 0, 13, 3, 4, 14, 7, 5, 11, 10, 15, 4, 2, 7, 12, 9, 5, 6, 1, 13,
        14, 0, 11, 3, 8, 9, 14, 15, 5, 2, 8, 12, 3, 7, 0, 4, 10, 1, 13, 11, 6, 4, 3, 2, 12, 9, 5,
        15, 10, 11, 14, 1, 7, 6, 0, 8, 13,
    ],
    [
        4, 11, 2, 14, 15, 0, 8, 13, 3, 12, 9, 7, 5, 10, 6, 1, 13, 0, 11, 7, 4, 9, 1, 10, 14, 3, 5,
        12, 2, 15, 8, 6, 1, 4, 11, 13, 12, 3, 7, 14, 10, 15, 6, 8, 0, 5, 9, 2, 6, 11, 13, 8, 1, 4,
        10, 7, 9, 5, 0, 15, 14, 2, 3, 12,
    ],
    [
        13, 2, 8, 4, 6, 15, 11, 1, 10, 9, 3, 14, 5, 0, 12, 7, 1, 15, 13, 8, 10, 3, 7, 4, 12, 5, 6,
        11, 0, 14, 9, 2, 7, 11, 4, 1, 9, 12, 14, 2, 0, 6, 10, 13, 15, 3, 5, 8, 2, 1, 14, 7, 4, 10,
        8, 13, 15, 12, 9, 0, 3, 5, 6, 11,
    ],
];

pub const PRESENT_SBOX: [u8; 16] = [
    0xc, 0x5, 0x6, 0xb, 0x9, 0x0, 0xa, 0xd, 0x3, 0xe, 0xf, 0x8, 0x4, 0x7, 0x1, 0x2,
];

/// S-box of the 4-bit small-scale AES variant.
pub const AES4_SBOX: [u8; 16] = [
    0x6, 0xb, 0x5, 0x4, 0x2, 0xe, 0x7, 0xa, 0x9, 0xd, 0xf, 0xc, 0x3, 0x1, 0x0, 0x8,
];

/// 8-bit function meeting both avalanche conditions. Not a permutation.
pub const HASH8: [u8; 256] = [
    0xf9, 0x5c, 0xcf, 0xaa, 0x63, 0xe4, 0x1d, 0xd2, 0x33, 0xfa, 0xbe, 0x04, 0xf5, 0xc3, 0xc3, 0xf9,
    0x8e, 0x69, 0xd1, 0xa5, 0xa0, 0xd3, 0xfa, 0x6c, 0xe0, 0x02, 0x27, 0xb8, 0x52, 0xcc, 0xac, 0x01,
    0x17, 0xba, 0x0c, 0xc5, 0xda, 0x02, 0x6b, 0xb4, 0xde, 0xe7, 0x93, 0x78, 0x13, 0xb4, 0x74, 0x8a,
    0x6f, 0x06, 0x87, 0x7e, 0x09, 0xee, 0xe4, 0x0a, 0x02, 0xda, 0x74, 0x06, 0xce, 0x22, 0x0b, 0xf9,
    0x25, 0xea, 0xf9, 0xc4, 0x3e, 0x13, 0x23, 0x7d, 0xc3, 0x36, 0x35, 0xaf, 0x98, 0xf5, 0xf6, 0x01,
    0x7f, 0x86, 0x0b, 0x68, 0x49, 0xad, 0x91, 0x8a, 0x31, 0xe0, 0xd7, 0x05, 0xff, 0x06, 0x60, 0xf9,
    0xf3, 0x16, 0x1b, 0xff, 0xcd, 0xfe, 0x96, 0x08, 0x26, 0xbd, 0x8d, 0x11, 0xe3, 0x5b, 0x00, 0xbc,
    0x01, 0xcd, 0xb8, 0xa6, 0xae, 0x1a, 0x0d, 0xf8, 0xcd, 0x2e, 0x21, 0x74, 0x52, 0xe1, 0xb7, 0x8b,
    0xf6, 0xca, 0x9c, 0x7e, 0xdd, 0x2e, 0x67, 0x1b, 0x42, 0xb4, 0x21, 0xf9, 0x38, 0x77, 0xfd, 0x14,
    0x45, 0x3f, 0xeb, 0x47, 0x3e, 0xcc, 0x01, 0xeb, 0xfe, 0x68, 0x48, 0xd4, 0x83, 0x1a, 0x66, 0xac,
    0x2d, 0x17, 0x5b, 0xb4, 0x33, 0x7d, 0x0d, 0x42, 0x36, 0x7b, 0xfd, 0x07, 0xcb, 0x02, 0x12, 0xe1,
    0x9f, 0xeb, 0x35, 0x0c, 0xd1, 0x28, 0x2a, 0x65, 0xc9, 0x02, 0x53, 0xe1, 0x25, 0xf0, 0xe9, 0x13,
    0x18, 0xa4, 0x36, 0x2b, 0xa9, 0xca, 0x5a, 0xb2, 0x96, 0x55, 0x5c, 0x92, 0x75, 0x06, 0xa3, 0x3f,
    0xb5, 0xfa, 0x44, 0x8d, 0x82, 0x60, 0x2f, 0x5c, 0x0c, 0x3f, 0x22, 0xee, 0x3a, 0xb1, 0x99, 0x22,
    0x03, 0x6e, 0xdc, 0x52, 0x14, 0xb3, 0x61, 0xd9, 0x55, 0x82, 0x92, 0xbd, 0xbf, 0xd4, 0x5d, 0x4a,
    0xcc, 0x1f, 0x4b, 0xfc, 0x5a, 0xee, 0x80, 0x32, 0x32, 0xe7, 0x9d, 0x92, 0x91, 0x08, 0x2a, 0xe1,
];

pub fn aes_inv_sbox() -> [u8; 256] {
    let mut inv = [0u8; 256];
    for (x, &y) in AES_SBOX.iter().enumerate() {
        inv[y as usize] = x as u8;
    }
    inv
}

/// Table of DES S-box `k` (1-based) indexed by the 6-bit input `b1..b6`.
pub fn des_table(k: usize) -> Vec<u64> {
    let s = &DES_SBOXES[k - 1];
    (0..64u64)
        .map(|x| {
            let row = (x >> 4 & 2) | (x & 1);
            let col = x >> 1 & 0xf;
            s[(row * 16 + col) as usize] as u64
        })
        .collect()
}

/// A named benchmark function given by its lookup table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub name: String,
    pub inputs: usize,
    pub outputs: usize,
    pub table: Vec<u64>,
}

impl Entry {
    fn new(name: &str, inputs: usize, outputs: usize, table: Vec<u64>) -> Entry {
        Entry {
            name: name.to_string(),
            inputs,
            outputs,
            table,
        }
    }

    pub fn function(&self) -> PlaFunction {
        PlaFunction::from_table(self.inputs, self.outputs, &self.table)
            .expect("corpus tables have 2^n rows")
            .with_name(self.name.clone())
    }

    pub fn file_name(&self) -> String {
        format!("{}.pla", self.name)
    }
}

fn widen(t: &[u8]) -> Vec<u64> {
    t.iter().map(|&v| v as u64).collect()
}

/// The thirteen benchmark functions, smallest first.
pub fn benchmarks() -> Vec<Entry> {
    let mut v = vec![
        Entry::new("aes4_sbox", 4, 4, widen(&AES4_SBOX)),
        Entry::new("present_sbox", 4, 4, widen(&PRESENT_SBOX)),
    ];
    for k in 1..=8 {
        v.push(Entry::new(&format!("des_sbox{k}"), 6, 4, des_table(k)));
    }
    v.push(Entry::new("aes_sbox", 8, 8, widen(&AES_SBOX)));
    v.push(Entry::new("aes_inv_sbox", 8, 8, widen(&aes_inv_sbox())));
    v.push(Entry::new("hash8", 8, 8, widen(&HASH8)));
    v
}

pub fn benchmark(name: &str) -> Option<Entry> {
    benchmarks().into_iter().find(|e| e.name == name)
}

/// Two-input AND written with don't-cares.
pub const AND_PLA: &str = ".i 2\n.o 1\n0- 0\n-0 0\n11 1\n.e\n";

/// Two-input constant zero.
pub const CONST0_PLA: &str = ".i 2\n.o 1\n-- 0\n.e\n";

/// The 4-bit worked example: bitwise complement, so 0110 hashes to 1001.
pub fn complement4() -> Entry {
    Entry::new("complement4", 4, 4, (0..16u64).map(|x| !x & 0xf).collect())
}

/// Write the benchmark corpus as `<name>.pla` files.
pub fn write_corpus(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    write_entries(dir, &benchmarks())
}

/// Write the small examples: `and.pla`, `complement4.pla`, `const0.pla`.
pub fn write_samples(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut paths = write_entries(dir, &[complement4()])?;
    for (name, text) in [("and.pla", AND_PLA), ("const0.pla", CONST0_PLA)] {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| io_error(&p, e))?;
        paths.push(p);
    }
    Ok(paths)
}

fn write_entries(dir: &Path, entries: &[Entry]) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    entries
        .iter()
        .map(|e| {
            let p = dir.join(e.file_name());
            std::fs::write(&p, write_pla(&e.function())).map_err(|err| io_error(&p, err))?;
            Ok(p)
        })
        .collect()
}

fn io_error(p: &Path, e: std::io::Error) -> Error {
    Error::Structure(format!("{}: {e}", p.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pla::parse_pla;

    #[test]
    fn known_values() {
        assert_eq!(AES_SBOX[0x00], 0x63);
        assert_eq!(AES_SBOX[0x53], 0xed);
        assert_eq!(aes_inv_sbox()[0x63], 0x00);
        // DES S1, input 011011: row 01, column 1101
        assert_eq!(des_table(1)[0b011011], 5);
        assert_eq!(benchmarks().len(), 13);
        assert_eq!(complement4().table[0b0110], 0b1001);
    }

    #[test]
    fn des_rows_are_permutations() {
        for k in 1..=8 {
            let t = des_table(k);
            for row in 0..4u64 {
                let mut seen: Vec<u64> = (0..64u64)
                    .filter(|x| ((x >> 4 & 2) | (x & 1)) == row)
                    .map(|x| t[x as usize])
                    .collect();
                seen.sort_unstable();
                assert_eq!(seen, (0..16).collect::<Vec<_>>(), "S{k} row {row}");
            }
        }
    }

    #[test]
    fn checked_in_files_match() {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
        for e in benchmarks()
            .into_iter()
            .map(|e| ("corpus", e))
            .chain([("samples", complement4())])
        {
            let path = root.join(e.0).join(e.1.file_name());
            let text = std::fs::read_to_string(&path)
                .unwrap_or_else(|err| panic!("{}: {err}", path.display()));
            let doc = parse_pla(&text).unwrap();
            assert_eq!(
                doc.function.cubes,
                e.1.function().cubes,
                "{}",
                path.display()
            );
        }
        for (name, text) in [("and.pla", AND_PLA), ("const0.pla", CONST0_PLA)] {
            assert_eq!(
                std::fs::read_to_string(root.join("samples").join(name)).unwrap(),
                text
            );
        }
    }
}
