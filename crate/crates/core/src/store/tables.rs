//! Row-level view of the store, shared by the binary file and CSV export.

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"SEMTRAIL";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Table {
    Corpora,
    Lemmas,
    Slices,
    Words,
    Vectors,
    Emotions,
    TopSimilar,
    Contexts,
}

impl Table {
    pub const ALL: [Table; 8] = [
        Table::Corpora,
        Table::Lemmas,
        Table::Slices,
        Table::Words,
        Table::Vectors,
        Table::Emotions,
        Table::TopSimilar,
        Table::Contexts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Table::Corpora => "corpora",
            Table::Lemmas => "lemmas",
            Table::Slices => "slices",
            Table::Words => "words",
            Table::Vectors => "vectors",
            Table::Emotions => "emotions",
            Table::TopSimilar => "top_similar",
            Table::Contexts => "contexts",
        }
    }

    pub fn from_name(name: &str) -> Option<Table> {
        Table::ALL.into_iter().find(|t| t.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusRow {
    pub corpus_id: String,
    pub language: String,
    /// JSON-encoded `CorpusParams`.
    pub params: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub corpus_id: String,
    pub surface: String,
    pub lemma: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceRow {
    pub corpus_id: String,
    pub slice_id: u32,
    pub start_year: i32,
    pub end_year: i32,
    pub token_count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordRow {
    pub corpus_id: String,
    pub slice_id: u32,
    pub word_id: u32,
    pub word: String,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorRow {
    pub corpus_id: String,
    pub slice_id: u32,
    pub word_id: u32,
    pub values: Vec<f32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmotionRow {
    pub corpus_id: String,
    pub slice_id: u32,
    pub word_id: u32,
    pub valence: f64,
    pub arousal: f64,
    pub dominance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborRow {
    pub corpus_id: String,
    pub slice_id: u32,
    pub word_id: u32,
    pub rank: u32,
    pub neighbor_id: u32,
    pub cosine: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextRow {
    pub corpus_id: String,
    pub slice_id: u32,
    pub word_id: u32,
    pub rank: u32,
    pub context_id: u32,
    pub ppmi: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tables {
    pub corpora: Vec<CorpusRow>,
    pub lemmas: Vec<LemmaRow>,
    pub slices: Vec<SliceRow>,
    pub words: Vec<WordRow>,
    pub vectors: Vec<VectorRow>,
    pub emotions: Vec<EmotionRow>,
    pub top_similar: Vec<NeighborRow>,
    pub contexts: Vec<ContextRow>,
}

struct Enc(Vec<u8>);

impl Enc {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn i32(&mut self, v: i32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f32(&mut self, v: f32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }
}

struct Dec<'a> {
    buf: &'a [u8],
    table: &'static str,
}

impl<'a> Dec<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::CorruptStore(format!("table {} truncated", self.table)));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn str(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| Error::CorruptStore(format!("table {}: invalid UTF-8", self.table)))
    }
    fn rows(&mut self) -> Result<usize> {
        let n = self.u64()?;
        // every row is at least four bytes, so this bounds bogus counts
        if n > (self.buf.len() / 4) as u64 {
            return Err(Error::CorruptStore(format!("table {}: bad row count", self.table)));
        }
        Ok(n as usize)
    }
}

impl Tables {
    pub fn encode_table(&self, table: Table) -> Vec<u8> {
        let mut e = Enc(Vec::new());
        match table {
            Table::Corpora => {
                e.u64(self.corpora.len() as u64);
                for r in &self.corpora {
                    e.str(&r.corpus_id);
                    e.str(&r.language);
                    e.str(&r.params);
                }
            }
            Table::Lemmas => {
                e.u64(self.lemmas.len() as u64);
                for r in &self.lemmas {
                    e.str(&r.corpus_id);
                    e.str(&r.surface);
                    e.str(&r.lemma);
                }
            }
            Table::Slices => {
                e.u64(self.slices.len() as u64);
                for r in &self.slices {
                    e.str(&r.corpus_id);
                    e.u32(r.slice_id);
                    e.i32(r.start_year);
                    e.i32(r.end_year);
                    e.u64(r.token_count);
                }
            }
            Table::Words => {
                e.u64(self.words.len() as u64);
                for r in &self.words {
                    e.str(&r.corpus_id);
                    e.u32(r.slice_id);
                    e.u32(r.word_id);
                    e.str(&r.word);
                    e.u64(r.count);
                }
            }
            Table::Vectors => {
                e.u64(self.vectors.len() as u64);
                for r in &self.vectors {
                    e.str(&r.corpus_id);
                    e.u32(r.slice_id);
                    e.u32(r.word_id);
                    e.u32(r.values.len() as u32);
                    for &v in &r.values {
                        e.f32(v);
                    }
                }
            }
            Table::Emotions => {
                e.u64(self.emotions.len() as u64);
                for r in &self.emotions {
                    e.str(&r.corpus_id);
                    e.u32(r.slice_id);
                    e.u32(r.word_id);
                    e.f64(r.valence);
                    e.f64(r.arousal);
                    e.f64(r.dominance);
                }
            }
            Table::TopSimilar => {
                e.u64(self.top_similar.len() as u64);
                for r in &self.top_similar {
                    e.str(&r.corpus_id);
                    e.u32(r.slice_id);
                    e.u32(r.word_id);
                    e.u32(r.rank);
                    e.u32(r.neighbor_id);
                    e.f64(r.cosine);
                }
            }
            Table::Contexts => {
                e.u64(self.contexts.len() as u64);
                for r in &self.contexts {
                    e.str(&r.corpus_id);
                    e.u32(r.slice_id);
                    e.u32(r.word_id);
                    e.u32(r.rank);
                    e.u32(r.context_id);
                    e.f64(r.ppmi);
                }
            }
        }
        e.0
    }

    fn decode_table(&mut self, table: Table, buf: &[u8]) -> Result<()> {
        let mut d = Dec {
            buf,
            table: table.name(),
        };
        let n = d.rows()?;
        match table {
            Table::Corpora => {
                for _ in 0..n {
                    self.corpora.push(CorpusRow {
                        corpus_id: d.str()?,
                        language: d.str()?,
                        params: d.str()?,
                    });
                }
            }
            Table::Lemmas => {
                for _ in 0..n {
                    self.lemmas.push(LemmaRow {
                        corpus_id: d.str()?,
                        surface: d.str()?,
                        lemma: d.str()?,
                    });
                }
            }
            Table::Slices => {
                for _ in 0..n {
                    self.slices.push(SliceRow {
                        corpus_id: d.str()?,
                        slice_id: d.u32()?,
                        start_year: d.i32()?,
                        end_year: d.i32()?,
                        token_count: d.u64()?,
                    });
                }
            }
            Table::Words => {
                for _ in 0..n {
                    self.words.push(WordRow {
                        corpus_id: d.str()?,
                        slice_id: d.u32()?,
                        word_id: d.u32()?,
                        word: d.str()?,
                        count: d.u64()?,
                    });
                }
            }
            Table::Vectors => {
                for _ in 0..n {
                    let corpus_id = d.str()?;
                    let slice_id = d.u32()?;
                    let word_id = d.u32()?;
                    let dim = d.u32()? as usize;
                    if dim > d.buf.len() / 4 {
                        return Err(Error::CorruptStore("vector block truncated".into()));
                    }
                    let values = (0..dim).map(|_| d.f32()).collect::<Result<Vec<_>>>()?;
                    self.vectors.push(VectorRow {
                        corpus_id,
                        slice_id,
                        word_id,
                        values,
                    });
                }
            }
            Table::Emotions => {
                for _ in 0..n {
                    self.emotions.push(EmotionRow {
                        corpus_id: d.str()?,
                        slice_id: d.u32()?,
                        word_id: d.u32()?,
                        valence: d.f64()?,
                        arousal: d.f64()?,
                        dominance: d.f64()?,
                    });
                }
            }
            Table::TopSimilar => {
                for _ in 0..n {
                    self.top_similar.push(NeighborRow {
                        corpus_id: d.str()?,
                        slice_id: d.u32()?,
                        word_id: d.u32()?,
                        rank: d.u32()?,
                        neighbor_id: d.u32()?,
                        cosine: d.f64()?,
                    });
                }
            }
            Table::Contexts => {
                for _ in 0..n {
                    self.contexts.push(ContextRow {
                        corpus_id: d.str()?,
                        slice_id: d.u32()?,
                        word_id: d.u32()?,
                        rank: d.u32()?,
                        context_id: d.u32()?,
                        ppmi: d.f64()?,
                    });
                }
            }
        }
        if !d.buf.is_empty() {
            return Err(Error::CorruptStore(format!(
                "table {}: {} trailing bytes",
                table.name(),
                d.buf.len()
            )));
        }
        Ok(())
    }

    /// File layout: magic, version, table count, a directory of
    /// `(name, offset, length)` entries, then the table payloads in
    /// directory order. All integers little-endian.
    pub fn write_binary<W: Write>(&self, mut out: W) -> io::Result<()> {
        let payloads: Vec<(Table, Vec<u8>)> = Table::ALL.iter().map(|&t| (t, self.encode_table(t))).collect();
        let dir_len: usize = payloads.iter().map(|(t, _)| 1 + t.name().len() + 16).sum();
        let mut offset = (MAGIC.len() + 4 + 4 + dir_len) as u64;

        out.write_all(MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&(payloads.len() as u32).to_le_bytes())?;
        for (t, payload) in &payloads {
            out.write_all(&[t.name().len() as u8])?;
            out.write_all(t.name().as_bytes())?;
            out.write_all(&offset.to_le_bytes())?;
            out.write_all(&(payload.len() as u64).to_le_bytes())?;
            offset += payload.len() as u64;
        }
        for (_, payload) in &payloads {
            out.write_all(payload)?;
        }
        out.flush()
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Tables> {
        let mut buf = Vec::new();
        input.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Tables> {
        let corrupt = |m: &str| Error::CorruptStore(m.to_string());
        if buf.len() < 16 || &buf[..8] != MAGIC {
            return Err(corrupt("missing magic header"));
        }
        let version = u32::from_le_bytes(buf[8..12].try_into().expect("4 bytes"));
        if version != FORMAT_VERSION {
            return Err(Error::CorruptStore(format!("unsupported format version {version}")));
        }
        let count = u32::from_le_bytes(buf[12..16].try_into().expect("4 bytes")) as usize;
        let mut pos = 16;
        let mut tables = Tables::default();
        let mut seen = Vec::new();
        for _ in 0..count {
            let name_len = *buf.get(pos).ok_or_else(|| corrupt("directory truncated"))? as usize;
            pos += 1;
            let entry = buf
                .get(pos..pos + name_len + 16)
                .ok_or_else(|| corrupt("directory truncated"))?;
            let name = std::str::from_utf8(&entry[..name_len]).map_err(|_| corrupt("bad table name"))?;
            let offset = u64::from_le_bytes(entry[name_len..name_len + 8].try_into().expect("8 bytes")) as usize;
            let len = u64::from_le_bytes(entry[name_len + 8..].try_into().expect("8 bytes")) as usize;
            pos += name_len + 16;
            let table = Table::from_name(name).ok_or_else(|| Error::CorruptStore(format!("unknown table {name}")))?;
            if seen.contains(&table) {
                return Err(Error::CorruptStore(format!("table {name} listed twice")));
            }
            seen.push(table);
            let payload = offset
                .checked_add(len)
                .and_then(|end| buf.get(offset..end))
                .ok_or_else(|| Error::CorruptStore(format!("table {name} out of bounds")))?;
            tables.decode_table(table, payload)?;
        }
        if seen.len() != Table::ALL.len() {
            return Err(corrupt("store is missing tables"));
        }
        Ok(tables)
    }

    pub fn write_csv<W: Write>(&self, table: Table, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match table {
            Table::Corpora => write_rows(&mut w, &self.corpora)?,
            Table::Lemmas => write_rows(&mut w, &self.lemmas)?,
            Table::Slices => write_rows(&mut w, &self.slices)?,
            Table::Words => write_rows(&mut w, &self.words)?,
            Table::Vectors => {
                w.write_record(["corpus_id", "slice_id", "word_id", "values"])?;
                for r in &self.vectors {
                    let values: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
                    w.write_record([
                        r.corpus_id.clone(),
                        r.slice_id.to_string(),
                        r.word_id.to_string(),
                        values.join(" "),
                    ])?;
                }
            }
            Table::Emotions => write_rows(&mut w, &self.emotions)?,
            Table::TopSimilar => write_rows(&mut w, &self.top_similar)?,
            Table::Contexts => write_rows(&mut w, &self.contexts)?,
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(&mut self, table: Table, input: R) -> Result<()> {
        let mut r = csv::Reader::from_reader(input);
        match table {
            Table::Corpora => self.corpora = read_rows(&mut r)?,
            Table::Lemmas => self.lemmas = read_rows(&mut r)?,
            Table::Slices => self.slices = read_rows(&mut r)?,
            Table::Words => self.words = read_rows(&mut r)?,
            Table::Vectors => {
                self.vectors.clear();
                for rec in r.records() {
                    let rec = rec?;
                    let field = |i: usize| rec.get(i).ok_or_else(|| Error::CorruptStore("short vectors row".into()));
                    let num = |s: &str| s.parse::<u32>().map_err(|e| Error::CorruptStore(format!("vectors: {e}")));
                    let values = field(3)?
                        .split_whitespace()
                        .map(|v| v.parse::<f32>().map_err(|e| Error::CorruptStore(format!("vectors: {e}"))))
                        .collect::<Result<Vec<_>>>()?;
                    self.vectors.push(VectorRow {
                        corpus_id: field(0)?.to_string(),
                        slice_id: num(field(1)?)?,
                        word_id: num(field(2)?)?,
                        values,
                    });
                }
            }
            Table::Emotions => self.emotions = read_rows(&mut r)?,
            Table::TopSimilar => self.top_similar = read_rows(&mut r)?,
            Table::Contexts => self.contexts = read_rows(&mut r)?,
        }
        Ok(())
    }
}

fn write_rows<W: Write, T: Serialize>(w: &mut csv::Writer<W>, rows: &[T]) -> Result<()> {
    for row in rows {
        w.serialize(row)?;
    }
    Ok(())
}

fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(r: &mut csv::Reader<R>) -> Result<Vec<T>> {
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
