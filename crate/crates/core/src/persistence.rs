//! Versioned binary index files.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! header (104 bytes)
//!   magic            [u8; 8]  "VICINDEX"
//!   format_version   u32
//!   distance_kind    u8       0 = u32 hops, 1 = f64
//!   reserved         [u8; 3]
//!   n, m             u64, u64
//!   alpha            f64
//!   seed             u64
//!   landmark_count   u64
//!   graph_fingerprint u64
//!   payload_len      u64
//!   checksum         [u8; 32] SHA-256 of the payload
//! payload
//!   landmark ids     landmark_count × u32, ascending
//!   nearest landmark n × u32
//!   radius           n × dist
//!   per landmark     n × dist, then n × u32 parents
//!   per node         entry_count u32, ball_size u32, transit_count u32,
//!                    entry_count × (node u32, dist, parent u32) sorted by node,
//!                    boundary bitmap ⌈entry_count / 8⌉ bytes (LSB first),
//!                    transit_count × (node u32, dist, parent u32) sorted by node
//! ```
//!
//! The graph is not embedded; loading checks it against `n`, `m`, and the
//! fingerprint instead.

use std::io::{self, BufReader, BufWriter, Read, Write};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::distance::{Distance, DistanceKind};
use crate::error::LoadError;
use crate::graph::{Graph, NodeId, NO_NODE};
use crate::landmarks::{LandmarkSet, LandmarkTable};
use crate::oracle::{BuildStats, Oracle};
use crate::vicinity::{Entry, VicinityTable};

pub const MAGIC: [u8; 8] = *b"VICINDEX";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 104;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexHeader {
    pub format_version: u32,
    pub distance_kind: DistanceKind,
    pub n: u64,
    pub m: u64,
    pub alpha: f64,
    pub seed: u64,
    pub landmark_count: u64,
    #[serde(serialize_with = "hex_u64")]
    pub graph_fingerprint: u64,
    pub payload_len: u64,
    #[serde(serialize_with = "hex_digest")]
    pub checksum: [u8; 32],
}

fn hex_u64<S: serde::Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:016x}"))
}

fn hex_digest<S: serde::Serializer>(digest: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
    let text: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    s.serialize_str(&text)
}

impl IndexHeader {
    fn encode(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..8].copy_from_slice(&MAGIC);
        out[8..12].copy_from_slice(&self.format_version.to_le_bytes());
        out[12] = self.distance_kind.code();
        let words = [
            self.n,
            self.m,
            self.alpha.to_bits(),
            self.seed,
            self.landmark_count,
            self.graph_fingerprint,
            self.payload_len,
        ];
        for (i, w) in words.iter().enumerate() {
            out[16 + 8 * i..24 + 8 * i].copy_from_slice(&w.to_le_bytes());
        }
        out[72..].copy_from_slice(&self.checksum);
        out
    }

    fn decode(bytes: &[u8; HEADER_LEN]) -> Result<Self, LoadError> {
        if bytes[..8] != MAGIC {
            return Err(LoadError::BadMagic);
        }
        let format_version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if format_version != FORMAT_VERSION {
            return Err(LoadError::UnsupportedVersion {
                found: format_version,
                supported: FORMAT_VERSION,
            });
        }
        let distance_kind = DistanceKind::from_code(bytes[12])
            .ok_or_else(|| LoadError::Malformed(format!("unknown distance kind {}", bytes[12])))?;
        let word = |i: usize| u64::from_le_bytes(bytes[16 + 8 * i..24 + 8 * i].try_into().unwrap());
        Ok(IndexHeader {
            format_version,
            distance_kind,
            n: word(0),
            m: word(1),
            alpha: f64::from_bits(word(2)),
            seed: word(3),
            landmark_count: word(4),
            graph_fingerprint: word(5),
            payload_len: word(6),
            checksum: bytes[72..].try_into().unwrap(),
        })
    }
}

/// Sink that hashes and counts without storing.
struct Digester {
    hasher: Sha256,
    len: u64,
}

impl Write for Digester {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.hasher.update(buf);
        self.len += buf.len() as u64;
        Ok(buf.len())
    }
    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

fn write_dist<D: Distance, W: Write>(w: &mut W, buf: &mut Vec<u8>, d: D) -> io::Result<()> {
    buf.clear();
    d.write_le(buf);
    w.write_all(buf)
}

fn write_entry<D: Distance, W: Write>(w: &mut W, buf: &mut Vec<u8>, e: &Entry<D>) -> io::Result<()> {
    w.write_all(&e.node.to_le_bytes())?;
    write_dist(w, buf, e.dist)?;
    w.write_all(&e.parent.to_le_bytes())
}

impl<D: Distance> Oracle<D> {
    fn write_payload<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let mut buf = Vec::with_capacity(8);
        for &m in self.landmarks.members() {
            w.write_all(&m.to_le_bytes())?;
        }
        for &u in self.landmarks.nearest_all() {
            w.write_all(&u.to_le_bytes())?;
        }
        for &r in self.landmarks.radii() {
            write_dist(w, &mut buf, r)?;
        }
        for table in &self.landmark_tables {
            for &d in table.distances() {
                write_dist(w, &mut buf, d)?;
            }
            for &p in table.parents() {
                w.write_all(&p.to_le_bytes())?;
            }
        }
        let mut sorted: Vec<(Entry<D>, bool)> = Vec::new();
        for vic in &self.vicinities {
            sorted.clear();
            sorted.extend(vic.entries().enumerate().map(|(i, e)| (e, vic.is_boundary_entry(i))));
            sorted.sort_unstable_by_key(|(e, _)| e.node);
            w.write_all(&(sorted.len() as u32).to_le_bytes())?;
            w.write_all(&(vic.ball_size() as u32).to_le_bytes())?;
            w.write_all(&(vic.transit().len() as u32).to_le_bytes())?;
            for (e, _) in &sorted {
                write_entry(w, &mut buf, e)?;
            }
            let mut bitmap = vec![0u8; sorted.len().div_ceil(8)];
            for (i, (_, b)) in sorted.iter().enumerate() {
                if *b {
                    bitmap[i / 8] |= 1 << (i % 8);
                }
            }
            w.write_all(&bitmap)?;
            for e in vic.transit() {
                write_entry(w, &mut buf, e)?;
            }
        }
        Ok(())
    }

    /// Header this oracle would be saved with.
    pub fn index_header(&self) -> IndexHeader {
        let mut digest = Digester {
            hasher: Sha256::new(),
            len: 0,
        };
        self.write_payload(&mut digest).expect("hashing cannot fail");
        IndexHeader {
            format_version: FORMAT_VERSION,
            distance_kind: D::KIND,
            n: self.graph.node_count() as u64,
            m: self.graph.edge_count() as u64,
            alpha: self.alpha,
            seed: self.seed,
            landmark_count: self.landmarks.len() as u64,
            graph_fingerprint: self.graph.fingerprint(),
            payload_len: digest.len,
            checksum: digest.hasher.finalize().into(),
        }
    }
}

/// Writes the index to `sink` and returns the number of bytes written.
/// Output is byte-for-byte deterministic for a given oracle.
pub fn save_oracle<D: Distance, W: Write>(oracle: &Oracle<D>, sink: W) -> io::Result<u64> {
    // First pass hashes the payload so the header can lead the file.
    let header = oracle.index_header();
    let mut out = BufWriter::new(sink);
    out.write_all(&header.encode())?;
    oracle.write_payload(&mut out)?;
    out.flush()?;
    Ok(HEADER_LEN as u64 + header.payload_len)
}

/// Reads and validates just the header.
pub fn read_header<R: Read>(mut source: R) -> Result<IndexHeader, LoadError> {
    let mut bytes = [0u8; HEADER_LEN];
    source.read_exact(&mut bytes).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => LoadError::TruncatedHeader,
        _ => LoadError::Io(e),
    })?;
    IndexHeader::decode(&bytes)
}

/// Reader limited to the payload that hashes everything it yields.
struct PayloadReader<R> {
    inner: R,
    hasher: Sha256,
    remaining: u64,
}

impl<R: Read> Read for PayloadReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let cap = buf.len().min(self.remaining.min(usize::MAX as u64) as usize);
        let got = self.inner.read(&mut buf[..cap])?;
        self.hasher.update(&buf[..got]);
        self.remaining -= got as u64;
        Ok(got)
    }
}

impl<R: Read> PayloadReader<R> {
    fn u32(&mut self) -> Result<u32, LoadError> {
        let mut b = [0u8; 4];
        self.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }

    fn dist<D: Distance>(&mut self) -> Result<D, LoadError> {
        let mut b = [0u8; 8];
        self.read_exact(&mut b[..D::WIDTH])?;
        Ok(D::read_le(&b))
    }

    fn node(&mut self, n: usize) -> Result<NodeId, LoadError> {
        let v = self.u32()?;
        if (v as usize) < n {
            Ok(v)
        } else {
            Err(LoadError::Malformed(format!("node id {v} out of range")))
        }
    }

    /// Node id or the `NO_NODE` sentinel.
    fn parent(&mut self, n: usize) -> Result<NodeId, LoadError> {
        let v = self.u32()?;
        if v == NO_NODE || (v as usize) < n {
            Ok(v)
        } else {
            Err(LoadError::Malformed(format!("parent id {v} out of range")))
        }
    }

    fn entry<D: Distance>(&mut self, n: usize) -> Result<Entry<D>, LoadError> {
        Ok(Entry {
            node: self.node(n)?,
            dist: self.dist()?,
            parent: self.parent(n)?,
        })
    }

    fn count(&mut self, limit: usize, what: &str) -> Result<usize, LoadError> {
        let c = self.u32()? as usize;
        if c <= limit {
            Ok(c)
        } else {
            Err(LoadError::Malformed(format!("{what} count {c} exceeds {limit}")))
        }
    }

    /// Consumes what is left of the payload and checks the digest.
    fn finish(mut self, expected: &[u8; 32]) -> Result<R, LoadError> {
        io::copy(&mut self, &mut io::sink())?;
        if self.remaining > 0 {
            return Err(LoadError::ChecksumMismatch);
        }
        let digest: [u8; 32] = self.hasher.finalize().into();
        if &digest != expected {
            return Err(LoadError::ChecksumMismatch);
        }
        Ok(self.inner)
    }
}

/// Parse failures and early EOFs both count as integrity failures when the
/// payload digest does not verify.
fn integrity<R: Read, T>(
    reader: PayloadReader<R>,
    checksum: &[u8; 32],
    parsed: Result<T, LoadError>,
) -> Result<(T, R), LoadError> {
    match parsed {
        Ok(value) => {
            let mut inner = reader.finish(checksum)?;
            let mut extra = [0u8; 1];
            if inner.read(&mut extra)? != 0 {
                return Err(LoadError::Malformed("trailing bytes after payload".into()));
            }
            Ok((value, inner))
        }
        Err(LoadError::Io(e)) if e.kind() == io::ErrorKind::UnexpectedEof => Err(LoadError::ChecksumMismatch),
        Err(err) => match reader.finish(checksum) {
            Ok(_) => Err(err),
            Err(_) => Err(LoadError::ChecksumMismatch),
        },
    }
}

struct Payload<D> {
    landmarks: LandmarkSet<D>,
    tables: Vec<LandmarkTable<D>>,
    vicinities: Vec<VicinityTable<D>>,
}

fn read_payload<D: Distance, R: Read>(r: &mut PayloadReader<R>, header: &IndexHeader) -> Result<Payload<D>, LoadError> {
    let n = header.n as usize;
    let count = header.landmark_count as usize;
    if count > n {
        return Err(LoadError::Malformed(format!("{count} landmarks for {n} nodes")));
    }
    let members = (0..count).map(|_| r.node(n)).collect::<Result<Vec<_>, _>>()?;
    if members.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LoadError::Malformed("landmark ids not strictly ascending".into()));
    }
    let nearest = (0..n).map(|_| r.parent(n)).collect::<Result<Vec<_>, _>>()?;
    let radius = (0..n).map(|_| r.dist::<D>()).collect::<Result<Vec<_>, _>>()?;
    let mut tables = Vec::with_capacity(count);
    for &m in &members {
        let dist = (0..n).map(|_| r.dist::<D>()).collect::<Result<Vec<_>, _>>()?;
        let parent = (0..n).map(|_| r.parent(n)).collect::<Result<Vec<_>, _>>()?;
        tables.push(LandmarkTable::from_parts(m, dist, parent));
    }
    let mut vicinities = Vec::with_capacity(n);
    for u in 0..n as NodeId {
        let entry_count = r.count(n, "entry")?;
        let ball_size = r.count(entry_count, "ball")?;
        let transit_count = r.count(n, "transit")?;
        let entries = (0..entry_count)
            .map(|_| r.entry::<D>(n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut bitmap = vec![0u8; entry_count.div_ceil(8)];
        r.read_exact(&mut bitmap)?;
        let is_boundary: Vec<bool> = (0..entry_count).map(|i| bitmap[i / 8] >> (i % 8) & 1 == 1).collect();
        let transit = (0..transit_count)
            .map(|_| r.entry::<D>(n))
            .collect::<Result<Vec<_>, _>>()?;
        vicinities.push(VicinityTable::from_entries(
            u,
            entries,
            &is_boundary,
            ball_size,
            transit,
        ));
    }
    Ok(Payload {
        landmarks: LandmarkSet::from_parts(members, nearest, radius),
        tables,
        vicinities,
    })
}

fn check_graph(header: &IndexHeader, graph: &Graph) -> Result<(), LoadError> {
    if header.n != graph.node_count() as u64 || header.m != graph.edge_count() as u64 {
        return Err(LoadError::GraphMismatch(format!(
            "index has n={}, m={}; graph has n={}, m={}",
            header.n,
            header.m,
            graph.node_count(),
            graph.edge_count()
        )));
    }
    if header.graph_fingerprint != graph.fingerprint() {
        return Err(LoadError::GraphMismatch("fingerprint differs".into()));
    }
    Ok(())
}

/// Loads an index saved by [`save_oracle`] for `graph`. Nothing is
/// returned unless the header, graph fingerprint, and payload checksum all
/// verify.
pub fn load_oracle<D: Distance, R: Read>(source: R, graph: Graph) -> Result<Oracle<D>, LoadError> {
    let mut source = BufReader::new(source);
    let header = read_header(&mut source)?;
    if header.distance_kind != D::KIND {
        return Err(LoadError::DistanceKind {
            expected: D::KIND.name(),
            found: header.distance_kind.name(),
        });
    }
    check_graph(&header, &graph)?;
    let mut reader = PayloadReader {
        inner: source,
        hasher: Sha256::new(),
        remaining: header.payload_len,
    };
    let parsed = read_payload::<D, _>(&mut reader, &header);
    let (payload, _) = integrity(reader, &header.checksum, parsed)?;
    let stats = BuildStats::collect(
        &graph,
        header.alpha,
        header.seed,
        &payload.landmarks,
        &payload.vicinities,
        0,
        0.0,
    );
    Ok(Oracle {
        graph,
        alpha: header.alpha,
        seed: header.seed,
        landmarks: payload.landmarks,
        landmark_tables: payload.tables,
        vicinities: payload.vicinities,
        stats,
    })
}

/// Byte and entry counts per section of an index file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexSummary {
    pub header: IndexHeader,
    pub header_bytes: u64,
    pub landmark_list_bytes: u64,
    pub nearest_bytes: u64,
    pub landmark_table_bytes: u64,
    pub vicinity_bytes: u64,
    pub total_bytes: u64,
    /// Σ|Γ(u)|
    pub vicinity_entries: u64,
    pub boundary_entries: u64,
    pub transit_entries: u64,
    /// |L|·n
    pub landmark_entries: u64,
    /// Stored entries relative to an n² all-pairs table.
    pub fraction_of_all_pairs: f64,
}

/// Streams through an index file, verifying its checksum, and reports the
/// size breakdown without building an oracle.
pub fn inspect_index<R: Read>(source: R) -> Result<IndexSummary, LoadError> {
    let mut source = BufReader::new(source);
    let header = read_header(&mut source)?;
    let width = match header.distance_kind {
        DistanceKind::Hops => 4u64,
        DistanceKind::Real => 8,
    };
    let n = header.n;
    let landmark_list_bytes = 4 * header.landmark_count;
    let nearest_bytes = n * (4 + width);
    let landmark_table_bytes = header.landmark_count * n * (4 + width);
    let skip = landmark_list_bytes + nearest_bytes + landmark_table_bytes;
    let mut reader = PayloadReader {
        inner: source,
        hasher: Sha256::new(),
        remaining: header.payload_len,
    };
    let parsed = (|| -> Result<(u64, u64, u64), LoadError> {
        io::copy(&mut (&mut reader).take(skip), &mut io::sink())?;
        let (mut entries, mut boundary, mut transit) = (0u64, 0u64, 0u64);
        let record = 8 + width;
        for _ in 0..n {
            let count = reader.u32()? as u64;
            let _ball = reader.u32()?;
            let tcount = reader.u32()? as u64;
            io::copy(&mut (&mut reader).take(count * record), &mut io::sink())?;
            let mut bitmap = vec![0u8; count.div_ceil(8) as usize];
            reader.read_exact(&mut bitmap)?;
            boundary += bitmap.iter().map(|b| b.count_ones() as u64).sum::<u64>();
            io::copy(&mut (&mut reader).take(tcount * record), &mut io::sink())?;
            entries += count;
            transit += tcount;
        }
        if reader.remaining != 0 {
            return Err(LoadError::Malformed("payload longer than its sections".into()));
        }
        Ok((entries, boundary, transit))
    })();
    let checksum = header.checksum;
    let ((vicinity_entries, boundary_entries, transit_entries), _) = integrity(reader, &checksum, parsed)?;
    let landmark_entries = header.landmark_count * n;
    let all_pairs = (n as f64) * (n as f64);
    Ok(IndexSummary {
        header_bytes: HEADER_LEN as u64,
        landmark_list_bytes,
        nearest_bytes,
        landmark_table_bytes,
        vicinity_bytes: header.payload_len - skip,
        total_bytes: HEADER_LEN as u64 + header.payload_len,
        vicinity_entries,
        boundary_entries,
        transit_entries,
        landmark_entries,
        fraction_of_all_pairs: if all_pairs > 0.0 {
            (vicinity_entries + landmark_entries) as f64 / all_pairs
        } else {
            0.0
        },
        header,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::path;
    use crate::oracle::build_oracle_with_landmarks;

    fn fixture() -> Oracle<u32> {
        build_oracle_with_landmarks(path(5), 4.0, 9, &[2], 1).unwrap()
    }

    fn saved(o: &Oracle<u32>) -> Vec<u8> {
        let mut buf = Vec::new();
        let written = save_oracle(o, &mut buf).unwrap();
        assert_eq!(written, buf.len() as u64);
        buf
    }

    #[test]
    fn header_round_trip() {
        let o = fixture();
        let h = o.index_header();
        assert_eq!(IndexHeader::decode(&h.encode()).unwrap(), h);
    }

    #[test]
    fn path_round_trip_answers_all_pairs() {
        let o = fixture();
        let bytes = saved(&o);
        let loaded: Oracle<u32> = load_oracle(bytes.as_slice(), path(5)).unwrap();
        for s in 0..5 {
            for t in 0..5 {
                assert_eq!(o.query_path(s, t).unwrap(), loaded.query_path(s, t).unwrap());
            }
        }
        assert_eq!(saved(&loaded), bytes);
    }

    #[test]
    fn landmark_record_is_empty() {
        let o = fixture();
        let bytes = saved(&o);
        // payload: 1 landmark id, 5 nearest, 5 radii, 1 table (5 + 5 words),
        // then records for nodes 0 and 1 (3 entries each) before node 2
        let record = |entries: usize| 12 + entries * 12 + entries.div_ceil(8);
        let offset = HEADER_LEN + 4 * (1 + 5 + 5 + 10) + 2 * record(3);
        assert_eq!(&bytes[offset..offset + 12], &[0u8; 12]);
    }

    #[test]
    fn save_is_deterministic() {
        let o = fixture();
        assert_eq!(saved(&o), saved(&o));
    }

    #[test]
    fn truncated_payload_fails_checksum() {
        let bytes = saved(&fixture());
        for cut in [HEADER_LEN + 3, bytes.len() - 1] {
            let err = load_oracle::<u32, _>(&bytes[..cut], path(5)).err().unwrap();
            assert!(matches!(err, LoadError::ChecksumMismatch), "{err:?}");
        }
        assert!(matches!(
            load_oracle::<u32, _>(&bytes[..50], path(5)),
            Err(LoadError::TruncatedHeader)
        ));
    }

    #[test]
    fn corrupted_byte_fails_checksum() {
        let mut bytes = saved(&fixture());
        let last = bytes.len() - 1;
        bytes[last] ^= 0x40;
        assert!(matches!(
            load_oracle::<u32, _>(bytes.as_slice(), path(5)),
            Err(LoadError::ChecksumMismatch)
        ));
        let mut bytes = saved(&fixture());
        // first entry count of node 0's record
        bytes[HEADER_LEN + 84] = 0xff;
        assert!(matches!(
            load_oracle::<u32, _>(bytes.as_slice(), path(5)),
            Err(LoadError::ChecksumMismatch)
        ));
    }

    #[test]
    fn header_faults() {
        let bytes = saved(&fixture());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            load_oracle::<u32, _>(bad.as_slice(), path(5)),
            Err(LoadError::BadMagic)
        ));
        let mut newer = bytes.clone();
        newer[8..12].copy_from_slice(&(FORMAT_VERSION + 1).to_le_bytes());
        assert!(matches!(
            load_oracle::<u32, _>(newer.as_slice(), path(5)),
            Err(LoadError::UnsupportedVersion { found: 2, supported: 1 })
        ));
        assert!(matches!(
            load_oracle::<f64, _>(bytes.as_slice(), path(5)),
            Err(LoadError::DistanceKind { .. })
        ));
        let mut trailing = bytes.clone();
        trailing.push(0);
        assert!(matches!(
            load_oracle::<u32, _>(trailing.as_slice(), path(5)),
            Err(LoadError::Malformed(_))
        ));
    }

    #[test]
    fn other_graph_is_rejected() {
        let bytes = saved(&fixture());
        assert!(matches!(
            load_oracle::<u32, _>(bytes.as_slice(), path(6)),
            Err(LoadError::GraphMismatch(_))
        ));
        // same n and m, different edges
        let star_like = Graph::from_unweighted_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert!(matches!(
            load_oracle::<u32, _>(bytes.as_slice(), star_like),
            Err(LoadError::GraphMismatch(_))
        ));
    }

    #[test]
    fn summary_counts_entries() {
        let o = fixture();
        let summary = inspect_index(saved(&o).as_slice()).unwrap();
        assert_eq!(summary.vicinity_entries, 12);
        assert_eq!(summary.boundary_entries, 4);
        assert_eq!(summary.landmark_entries, 5);
        assert_eq!(summary.total_bytes, saved(&o).len() as u64);
        assert_eq!(summary.header, o.index_header());
    }
}
