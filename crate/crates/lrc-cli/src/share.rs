//! On-disk share format: one `node_<id>.lrc` file per storage node.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   4 bytes  "LRC1"
//! version 1 byte   1
//! n, M, r, delta, alpha, s, m, N   u32 each
//! node_id, group_id                u32 each
//! is_parity                        u8 (0/1)
//! original_byte_length             u64
//! payload  chunks * alpha * ceil(s*m/8) bytes
//! ```
//!
//! A file longer than `M` symbols is split into sequential chunks of `M`
//! symbols (each an independent codeword); the payload holds the node's
//! `alpha` packed symbols per chunk, chunk-major. The chunk count is not
//! stored: it follows from `original_byte_length`. Input files feed
//! `floor(s*m/8)` bytes into each symbol so any byte pattern fits in the
//! field; packed symbols on disk take `ceil(s*m/8)` bytes.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use lrc_core::lrc::{derive_params, derive_params_forced, CodeParams};
use lrc_core::{Error, ExtParams, FieldElem};

use crate::CliError;

pub const MAGIC: [u8; 4] = *b"LRC1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 4 + 1 + 10 * 4 + 1 + 8;

/// Fixed-width header carried by every share of a codeword; identical
/// across shares except for the node fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareHeader {
    pub n: u32,
    pub file_symbols: u32,
    pub r: u32,
    pub delta: u32,
    pub alpha: u32,
    pub s: u32,
    pub m: u32,
    pub gab_len: u32,
    pub node_id: u32,
    pub group_id: u32,
    pub is_parity: bool,
    pub original_byte_length: u64,
}

impl ShareHeader {
    pub fn from_params(params: &CodeParams, node_id: usize, original_byte_length: u64) -> Self {
        Self {
            n: params.n as u32,
            file_symbols: params.file_symbols as u32,
            r: params.r as u32,
            delta: params.delta as u32,
            alpha: params.alpha as u32,
            s: params.s,
            m: params.m as u32,
            gab_len: params.gab_len as u32,
            node_id: node_id as u32,
            group_id: params.group_of(node_id) as u32,
            is_parity: params.is_parity_node(node_id),
            original_byte_length,
        }
    }

    /// Rebuilds the full parameter record; certified derivation first, the
    /// forced layout as fallback (the layout is deterministic either way).
    pub fn to_params(&self) -> Result<CodeParams, Error> {
        let (n, m_sym, r, delta, alpha) = (
            self.n as usize,
            self.file_symbols as usize,
            self.r as usize,
            self.delta as usize,
            self.alpha as usize,
        );
        let q = 1usize << self.s;
        let params = derive_params(n, m_sym, r, delta, alpha, q)
            .or_else(|_| derive_params_forced(n, m_sym, r, delta, alpha, q))?;
        if params.gab_len != self.gab_len as usize || params.m != self.m as usize {
            return Err(Error::InvalidParams(format!(
                "share header N = {}, m = {} do not match the derived layout (N = {}, m = {})",
                self.gab_len, self.m, params.gab_len, params.m
            )));
        }
        Ok(params)
    }

    /// The header fields that must agree across shares of one codeword.
    pub fn code_fields(&self) -> (u32, u32, u32, u32, u32, u32, u32, u32, u64) {
        (
            self.n,
            self.file_symbols,
            self.r,
            self.delta,
            self.alpha,
            self.s,
            self.m,
            self.gab_len,
            self.original_byte_length,
        )
    }

    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&[VERSION])?;
        for v in [
            self.n,
            self.file_symbols,
            self.r,
            self.delta,
            self.alpha,
            self.s,
            self.m,
            self.gab_len,
            self.node_id,
            self.group_id,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&[self.is_parity as u8])?;
        w.write_all(&self.original_byte_length.to_le_bytes())?;
        Ok(())
    }

    pub fn read_from(rd: &mut impl Read) -> Result<Self, CliError> {
        let mut magic = [0u8; 4];
        rd.read_exact(&mut magic)?;
        if magic != MAGIC {
            return Err(CliError::Format("bad magic, not an LRC share file".into()));
        }
        let mut version = [0u8; 1];
        rd.read_exact(&mut version)?;
        if version[0] != VERSION {
            return Err(CliError::Format(format!(
                "unsupported share version {}",
                version[0]
            )));
        }
        let mut u32s = [0u32; 10];
        for v in u32s.iter_mut() {
            let mut buf = [0u8; 4];
            rd.read_exact(&mut buf)?;
            *v = u32::from_le_bytes(buf);
        }
        let mut parity = [0u8; 1];
        rd.read_exact(&mut parity)?;
        let mut len = [0u8; 8];
        rd.read_exact(&mut len)?;
        Ok(Self {
            n: u32s[0],
            file_symbols: u32s[1],
            r: u32s[2],
            delta: u32s[3],
            alpha: u32s[4],
            s: u32s[5],
            m: u32s[6],
            gab_len: u32s[7],
            node_id: u32s[8],
            group_id: u32s[9],
            is_parity: parity[0] != 0,
            original_byte_length: u64::from_le_bytes(len),
        })
    }
}

/// Bytes of input file consumed per symbol: `floor(s*m/8)`.
pub fn input_symbol_bytes(ext: &ExtParams) -> usize {
    (ext.base().s() as usize * ext.degree()) / 8
}

/// Codeword chunks needed for `byte_len` bytes under `params`.
pub fn chunk_count(params: &CodeParams, ext: &ExtParams, byte_len: u64) -> Result<u64, CliError> {
    let per_sym = input_symbol_bytes(ext);
    if per_sym == 0 {
        return Err(CliError::Core(Error::InvalidParams(format!(
            "field too small for byte I/O: s*m = {} bits per symbol is below one byte",
            ext.base().s() as usize * ext.degree()
        ))));
    }
    let chunk_bytes = params.file_symbols as u64 * per_sym as u64;
    Ok(byte_len.div_ceil(chunk_bytes).max(1))
}

/// Splits input bytes into per-chunk symbol vectors, zero-padded.
pub fn bytes_to_chunks(
    params: &CodeParams,
    ext: &ExtParams,
    bytes: &[u8],
) -> Result<Vec<Vec<FieldElem>>, CliError> {
    let per_sym = input_symbol_bytes(ext);
    let chunks = chunk_count(params, ext, bytes.len() as u64)?;
    let mut out = Vec::with_capacity(chunks as usize);
    for c in 0..chunks as usize {
        let mut symbols = Vec::with_capacity(params.file_symbols);
        for i in 0..params.file_symbols {
            let start = (c * params.file_symbols + i) * per_sym;
            let mut buf = vec![0u8; ext.elem_byte_len()];
            for b in 0..per_sym {
                if start + b < bytes.len() {
                    buf[b] = bytes[start + b];
                }
            }
            symbols.push(ext.unpack(&buf).map_err(CliError::Core)?);
        }
        out.push(symbols);
    }
    Ok(out)
}

/// Reassembles file bytes from per-chunk symbol vectors, truncated to the
/// recorded length.
pub fn chunks_to_bytes(
    ext: &ExtParams,
    chunks: &[Vec<FieldElem>],
    original_byte_length: u64,
) -> Vec<u8> {
    let per_sym = input_symbol_bytes(ext);
    let mut bytes = Vec::with_capacity(chunks.len() * chunks[0].len() * per_sym);
    for symbols in chunks {
        for sym in symbols {
            bytes.extend_from_slice(&ext.pack(sym)[..per_sym]);
        }
    }
    bytes.truncate(original_byte_length as usize);
    bytes
}

pub fn share_path(dir: &Path, node_id: usize) -> PathBuf {
    dir.join(format!("node_{node_id}.lrc"))
}

/// Writes one share: header plus the node's packed symbols, chunk-major.
pub fn write_share(
    dir: &Path,
    header: &ShareHeader,
    ext: &ExtParams,
    chunks: &[Vec<FieldElem>],
) -> Result<(), CliError> {
    let mut buf = Vec::with_capacity(HEADER_LEN + chunks.len() * chunks[0].len() * ext.elem_byte_len());
    header.write_to(&mut buf)?;
    for symbols in chunks {
        for sym in symbols {
            buf.extend_from_slice(&ext.pack(sym));
        }
    }
    fs::write(share_path(dir, header.node_id as usize), buf)?;
    Ok(())
}

pub fn read_share_header(path: &Path) -> Result<ShareHeader, CliError> {
    let mut f = fs::File::open(path)?;
    ShareHeader::read_from(&mut f)
}

/// Reads a share fully: the header and the per-chunk symbol vectors.
pub fn read_share(
    path: &Path,
    ext: &ExtParams,
    params: &CodeParams,
) -> Result<(ShareHeader, Vec<Vec<FieldElem>>), CliError> {
    let data = fs::read(path)?;
    let mut slice = &data[..];
    let header = ShareHeader::read_from(&mut slice)?;
    let elem_len = ext.elem_byte_len();
    let chunks = chunk_count(params, ext, header.original_byte_length)? as usize;
    let expected = chunks * params.alpha * elem_len;
    if slice.len() != expected {
        return Err(CliError::Format(format!(
            "share payload is {} bytes, expected {expected}",
            slice.len()
        )));
    }
    let mut out = Vec::with_capacity(chunks);
    for c in 0..chunks {
        let mut symbols = Vec::with_capacity(params.alpha);
        for t in 0..params.alpha {
            let start = (c * params.alpha + t) * elem_len;
            symbols.push(
                ext.unpack(&slice[start..start + elem_len])
                    .map_err(CliError::Core)?,
            );
        }
        out.push(symbols);
    }
    Ok((header, out))
}

/// Node ids with a share file present in `dir`.
pub fn present_nodes(dir: &Path, n: usize) -> Vec<usize> {
    (0..n).filter(|&id| share_path(dir, id).exists()).collect()
}
