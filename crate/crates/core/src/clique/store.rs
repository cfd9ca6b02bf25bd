//! On-disk clique records and plain-text clique lists from external solvers.
//!
//! Store layout, all little-endian:
//!
//! ```text
//! offset  size  field
//!      0     8  magic  b"CLQSTORE"
//!      8     4  n      order of the design
//!     12     4  V      vertex count of the graph
//!     16     8  count  number of records
//!     24     4  size   ids per record
//!     28     4  flags  bit 0 set once the file is complete
//!     32     -  records, `size` u32 vertex ids each
//! ```
//!
//! The header is written first with `flags = 0` and patched after the last
//! record, so a file left behind by an interrupted run is never mistaken for
//! a complete one.

use std::fs::File;
use std::io::{BufRead, BufWriter, Read, Seek, SeekFrom, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use super::{finish, resolve_size, search, CliqueSet, SearchOptions, Storage};
use crate::error::{Error, Result};
use crate::graph::CompatibilityGraph;

pub const MAGIC: &[u8; 8] = b"CLQSTORE";
pub const HEADER_LEN: u64 = 32;
const FLAG_COMPLETE: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StoreHeader {
    pub order: u32,
    pub vertices: u32,
    pub count: u64,
    pub clique_size: u32,
    pub complete: bool,
}

impl StoreHeader {
    fn to_bytes(self) -> [u8; 32] {
        let mut b = [0u8; 32];
        b[..8].copy_from_slice(MAGIC);
        b[8..12].copy_from_slice(&self.order.to_le_bytes());
        b[12..16].copy_from_slice(&self.vertices.to_le_bytes());
        b[16..24].copy_from_slice(&self.count.to_le_bytes());
        b[24..28].copy_from_slice(&self.clique_size.to_le_bytes());
        let flags = if self.complete { FLAG_COMPLETE } else { 0 };
        b[28..32].copy_from_slice(&flags.to_le_bytes());
        b
    }

    fn from_bytes(b: &[u8; 32]) -> Result<Self> {
        if &b[..8] != MAGIC {
            return Err(Error::Parse("not a clique store (bad magic)".into()));
        }
        let u32_at = |i: usize| u32::from_le_bytes(b[i..i + 4].try_into().unwrap());
        Ok(StoreHeader {
            order: u32_at(8),
            vertices: u32_at(12),
            count: u64::from_le_bytes(b[16..24].try_into().unwrap()),
            clique_size: u32_at(24),
            complete: u32_at(28) & FLAG_COMPLETE != 0,
        })
    }
}

pub fn read_header(path: &Path) -> Result<StoreHeader> {
    let mut f = File::open(path)?;
    let mut b = [0u8; 32];
    f.read_exact(&mut b)?;
    StoreHeader::from_bytes(&b)
}

pub(super) fn read_record(path: &Path, index: u64) -> Result<Vec<u32>> {
    let mut f = File::open(path)?;
    let mut b = [0u8; 32];
    f.read_exact(&mut b)?;
    let h = StoreHeader::from_bytes(&b)?;
    if !h.complete {
        return Err(Error::Parse(format!(
            "{} is an incomplete clique store",
            path.display()
        )));
    }
    if index >= h.count {
        return Err(Error::EmptyCliqueSet);
    }
    let s = h.clique_size as u64;
    f.seek(SeekFrom::Start(HEADER_LEN + index * s * 4))?;
    let mut rec = vec![0u8; s as usize * 4];
    f.read_exact(&mut rec)?;
    Ok(rec
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Enumerates the maximum cliques serially into a store file at `path` and
/// returns a disk-backed set. `max_bytes` caps the file size.
pub fn write_clique_store<'g>(
    g: &'g CompatibilityGraph,
    target: Option<usize>,
    path: &Path,
    max_bytes: Option<u64>,
    opts: &SearchOptions,
) -> Result<CliqueSet<'g>> {
    let size = resolve_size(g, target);
    let mut header = StoreHeader {
        order: g.vertex_set().order() as u32,
        vertices: g.vertex_count() as u32,
        count: 0,
        clique_size: size as u32,
        complete: false,
    };
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&header.to_bytes())?;

    struct Writer<'w> {
        w: &'w mut BufWriter<File>,
        written: u64,
        record_bytes: u64,
        max_bytes: Option<u64>,
        err: Option<Error>,
    }
    impl search::Sink for Writer<'_> {
        fn leaves(&mut self, prefix: &[u32], last: &[u64]) -> ControlFlow<()> {
            for v in crate::bitset::ones(last) {
                let next = HEADER_LEN + (self.written + 1) * self.record_bytes;
                if self.max_bytes.is_some_and(|m| next > m) {
                    self.err = Some(Error::StorageExceeded(format!(
                        "clique store would exceed {} bytes",
                        self.max_bytes.unwrap()
                    )));
                    return ControlFlow::Break(());
                }
                let res = prefix
                    .iter()
                    .chain(std::iter::once(&(v as u32)))
                    .try_for_each(|id| self.w.write_all(&id.to_le_bytes()));
                if let Err(e) = res {
                    self.err = Some(e.into());
                    return ControlFlow::Break(());
                }
                self.written += 1;
            }
            ControlFlow::Continue(())
        }
    }

    let mut root_counts = vec![0u64; g.vertex_count()];
    if size > 0 {
        let mut scratch = search::Scratch::new(g, size);
        let mut sink = Writer {
            w: &mut w,
            written: 0,
            record_bytes: size as u64 * 4,
            max_bytes,
            err: None,
        };
        for (root, slot) in root_counts.iter_mut().enumerate() {
            let before = sink.written;
            let flow = search::search_root(g, root, size, &mut scratch, opts.cancel, &mut sink);
            *slot = sink.written - before;
            if let Some(e) = sink.err.take() {
                return Err(e);
            }
            if flow.is_break() {
                break;
            }
        }
        super::check_cancel(opts, sink.written)?;
        header.count = sink.written;
    } else {
        header.count = 1;
    }
    header.complete = true;
    w.flush()?;
    let mut f = w.into_inner().map_err(|e| e.into_error())?;
    f.seek(SeekFrom::Start(0))?;
    f.write_all(&header.to_bytes())?;
    f.sync_all()?;
    finish(
        g,
        size,
        target,
        root_counts,
        Storage::Disk(PathBuf::from(path)),
    )
}

/// Opens an existing complete store for `g`.
pub fn open_clique_store<'g>(g: &'g CompatibilityGraph, path: &Path) -> Result<CliqueSet<'g>> {
    let h = read_header(path)?;
    if !h.complete {
        return Err(Error::Parse(format!(
            "{} is an incomplete clique store",
            path.display()
        )));
    }
    if h.vertices as usize != g.vertex_count() || h.order as usize != g.vertex_set().order() {
        return Err(Error::Parse(format!(
            "store was built for order {} with {} vertices",
            h.order, h.vertices
        )));
    }
    let len = std::fs::metadata(path)?.len();
    if len != HEADER_LEN + h.count * h.clique_size as u64 * 4 {
        return Err(Error::Parse("store length does not match header".into()));
    }
    Ok(CliqueSet {
        graph: g,
        clique_size: h.clique_size as usize,
        max_size: h.clique_size as usize,
        count: h.count,
        root_counts: Vec::new(),
        storage: Storage::Disk(PathBuf::from(path)),
    })
}

/// Reads cliques computed elsewhere: one per line, space-separated 1-based
/// vertex ids (`c`/`#` comment lines and blank lines ignored). Every line must
/// have the same length and be a clique of `g`; the set is sorted into the
/// canonical order and duplicates are rejected.
pub fn read_clique_list<'g, R: BufRead>(g: &'g CompatibilityGraph, r: R) -> Result<CliqueSet<'g>> {
    let mut cliques: Vec<Vec<u32>> = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with("c ") || t == "c" {
            continue;
        }
        let bad = |why: &str| Error::Parse(format!("line {}: {why}", lineno + 1));
        let mut ids: Vec<u32> = t
            .split_whitespace()
            .map(|x| x.parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("not an id list"))?;
        if ids.iter().any(|&i| i == 0 || i as usize > g.vertex_count()) {
            return Err(bad("vertex id out of range"));
        }
        for i in &mut ids {
            *i -= 1;
        }
        ids.sort_unstable();
        if let Some(first) = cliques.first() {
            if first.len() != ids.len() {
                return Err(bad("cliques differ in size"));
            }
        }
        for (a, &x) in ids.iter().enumerate() {
            for &y in &ids[a + 1..] {
                if x == y || !g.adjacent(x as usize, y as usize) {
                    return Err(bad("not a clique"));
                }
            }
        }
        cliques.push(ids);
    }
    cliques.sort_unstable();
    if cliques.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Parse("duplicate clique in list".into()));
    }
    let size = cliques.first().map_or(0, |c| c.len());
    let mut root_counts = vec![0u64; g.vertex_count()];
    for c in &cliques {
        root_counts[c[0] as usize] += 1;
    }
    let flat = cliques.concat();
    Ok(CliqueSet {
        graph: g,
        clique_size: size,
        max_size: size,
        count: root_counts.iter().sum(),
        root_counts,
        storage: Storage::Memory(flat),
    })
}

/// Writes cliques in the format [`read_clique_list`] accepts.
pub fn write_clique_list<W: Write>(cs: &CliqueSet, mut w: W) -> Result<()> {
    for c in cs.iter() {
        let line: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::enumerate_maximum_cliques;
    use crate::derange::enumerate_derangements;
    use crate::graph::build_graph;
    use crate::Limits;

    fn latin(n: usize) -> CompatibilityGraph {
        build_graph(
            enumerate_derangements(n, &Limits::default()).unwrap(),
            &Limits::default(),
        )
        .unwrap()
    }

    #[test]
    fn store_round_trip() {
        let g = latin(5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c5.clq");
        let disk = write_clique_store(&g, Some(4), &path, None, &SearchOptions::default()).unwrap();
        let mem = enumerate_maximum_cliques(&g, Some(4), &SearchOptions::default()).unwrap();
        assert_eq!(disk.count(), 56);
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 32 + 56 * 16);
        let h = read_header(&path).unwrap();
        assert_eq!(
            h,
            StoreHeader {
                order: 5,
                vertices: 44,
                count: 56,
                clique_size: 4,
                complete: true
            }
        );
        let reopened = open_clique_store(&g, &path).unwrap();
        for i in 0..56 {
            assert_eq!(reopened.get(i).unwrap(), mem.get(i).unwrap());
        }
    }

    #[test]
    fn size_budget_leaves_incomplete_file() {
        let g = latin(5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c5.clq");
        let r = write_clique_store(
            &g,
            Some(4),
            &path,
            Some(32 + 16 * 10),
            &SearchOptions::default(),
        );
        assert!(matches!(r, Err(Error::StorageExceeded(_))));
        assert!(!read_header(&path).unwrap().complete);
        assert!(open_clique_store(&g, &path).is_err());
    }

    #[test]
    fn interrupted_store_is_marked_incomplete() {
        let g = latin(5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c5.clq");
        let flag = std::sync::atomic::AtomicBool::new(true);
        let opts = SearchOptions {
            cancel: Some(&flag),
            ..SearchOptions::default()
        };
        let r = write_clique_store(&g, Some(4), &path, None, &opts);
        assert!(matches!(r, Err(Error::Interrupted { .. })));
        assert!(!read_header(&path).unwrap().complete);
    }

    #[test]
    fn text_list_round_trip_and_validation() {
        let g = latin(5);
        let mem = enumerate_maximum_cliques(&g, Some(4), &SearchOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_clique_list(&mem, &mut buf).unwrap();
        // external tools may list cliques in any order with unsorted members
        let mut lines: Vec<String> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .map(|l| l.split(' ').rev().collect::<Vec<_>>().join(" "))
            .collect();
        lines.reverse();
        let text = format!("c from a solver\n{}\n", lines.join("\n"));
        let back = read_clique_list(&g, text.as_bytes()).unwrap();
        assert_eq!(back.count(), 56);
        assert_eq!(
            back.iter().collect::<Vec<_>>(),
            mem.iter().collect::<Vec<_>>()
        );

        assert!(read_clique_list(&g, &b"1 2 3 4\n"[..]).is_err());
        assert!(read_clique_list(&g, &b"45 1\n"[..]).is_err());
        let first: Vec<String> = mem
            .get(0)
            .unwrap()
            .iter()
            .map(|i| (i + 1).to_string())
            .collect();
        let dup = format!("{0}\n{0}\n", first.join(" "));
        assert!(read_clique_list(&g, dup.as_bytes()).is_err());
    }
}
