//! On-disk KL cache.
//!
//! Format: a header line `KLC1 <type_tag> <rank>`, then one line per stored
//! pair `<w-word> <x-word> <poly>` where `<poly>` is `P~_{x,w}` in the
//! textual Laurent form. Rows appear in element order and only extremal
//! pairs are written. The file is append-only; a run that stops early leaves
//! a valid prefix that the next run resumes from.

use std::cell::Cell;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::coxeter::{CoxeterGroup, CoxeterType, Element};
use crate::error::{Error, Result};
use crate::hecke::kl::{from_tilde, to_tilde, DescentChoice, KlTable, RowData};
use crate::laurent::{Coefficient, LaurentPoly};

/// Rows re-derived from scratch when a cache is loaded.
const SPOT_CHECK_STRIDE: usize = 8;

/// Directory holding one cache file per Coxeter type.
#[derive(Debug, Clone)]
pub struct KlCache {
    dir: PathBuf,
}

/// What happened to the cache file during [`KlCache::load_or_build`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CacheLoad {
    /// No usable file; everything was computed.
    Cold,
    /// Every row came from the file.
    Warm,
    /// The file held this many complete rows; the rest were computed.
    Resumed { rows: usize },
    /// The file failed validation and was moved aside.
    Quarantined { moved_to: PathBuf, reason: String },
}

fn header(kind: CoxeterType) -> String {
    format!("KLC1 {} {}", kind.family_tag(), kind.rank())
}

fn file_name(kind: CoxeterType) -> String {
    match kind {
        CoxeterType::I2(m) => format!("I2_{m}.klc"),
        other => format!("{other}.klc"),
    }
}

fn row_lines<C: Coefficient>(group: &CoxeterGroup, w: Element, data: &RowData<C>) -> String {
    let lw = group.length(w);
    let wf = group.format(w);
    let mut out = String::new();
    for (x, p) in data {
        let poly = to_tilde(p, lw - group.length(*x));
        out.push_str(&format!("{wf} {} {poly}\n", group.format(*x)));
    }
    out
}

struct Loaded<C: Coefficient> {
    rows: Vec<(Element, RowData<C>)>,
    /// Byte offset at which each row starts.
    offsets: Vec<u64>,
    /// Length of the well-formed part of the file.
    end: u64,
}

fn parse_element(group: &CoxeterGroup, text: &str) -> Result<Element> {
    let w = group.parse(text)?;
    if group.format(w) != text {
        return Err(Error::Cache(format!("non-canonical word `{text}`")));
    }
    Ok(w)
}

fn read_cache<C: Coefficient>(path: &Path, group: &CoxeterGroup) -> Result<Loaded<C>> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let expected = header(group.graph().kind());
    if line.trim_end_matches('\n') != expected {
        return Err(Error::Cache(format!("bad header `{}`", line.trim_end())));
    }
    let mut pos = line.len() as u64;
    let mut loaded = Loaded {
        rows: Vec::new(),
        offsets: Vec::new(),
        end: pos,
    };
    loop {
        line.clear();
        let n = reader.read_line(&mut line)?;
        if n == 0 || !line.ends_with('\n') {
            // a partial last line is dropped
            break;
        }
        let bad = |what: &str| Error::Cache(format!("{what} in line `{}`", line.trim_end()));
        let mut parts = line.trim_end_matches('\n').splitn(3, ' ');
        let (Some(wt), Some(xt), Some(pt)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad("missing field"));
        };
        let w = parse_element(group, wt)?;
        let x = parse_element(group, xt)?;
        let poly: LaurentPoly<C> = pt.parse().map_err(|_| bad("bad polynomial"))?;
        let (lw, lx) = (group.length(w), group.length(x));
        if lx > lw {
            return Err(bad("x longer than w"));
        }
        let p = from_tilde(&poly, lw - lx).ok_or_else(|| bad("polynomial of wrong shape"))?;
        let shaped = if x == w {
            p.len() == 1 && p[0].is_one()
        } else {
            p.first().is_some_and(|c| c.is_one()) && 2 * (p.len() - 1) < lw - lx
        };
        if !shaped {
            return Err(bad("polynomial violates the degree bound"));
        }
        match loaded.rows.last_mut() {
            Some((last, data)) if *last == w => {
                if data.last().is_some_and(|(y, _)| *y >= x) {
                    return Err(bad("pairs out of order"));
                }
                data.push((x, p));
            }
            _ => {
                if w.index() != loaded.rows.len() {
                    return Err(bad("rows out of order"));
                }
                loaded.offsets.push(pos);
                loaded.rows.push((w, vec![(x, p)]));
            }
        }
        pos += n as u64;
        loaded.end = pos;
    }
    Ok(loaded)
}

fn quarantine(path: &Path) -> Result<PathBuf> {
    let mut k = 0;
    loop {
        let target = path.with_extension(format!("klc.corrupt{k}"));
        if !target.exists() {
            fs::rename(path, &target)?;
            return Ok(target);
        }
        k += 1;
    }
}

/// Writes a complete table as a fresh cache file.
pub fn save_cache<C: Coefficient>(path: &Path, table: &KlTable<C>) -> Result<()> {
    let group = table.group();
    let tmp = path.with_extension("klc.tmp");
    {
        let mut out = BufWriter::new(File::create(&tmp)?);
        writeln!(out, "{}", header(group.graph().kind()))?;
        for w in group.elements() {
            out.write_all(row_lines(group, w, &table.row_data(w)).as_bytes())?;
        }
        out.flush()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}

impl KlCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        KlCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, kind: CoxeterType) -> PathBuf {
        self.dir.join(file_name(kind))
    }

    /// Loads the table from the cache, computing and appending whatever is
    /// missing. Files that fail validation are quarantined and the table is
    /// rebuilt from scratch.
    pub fn load_or_build<C: Coefficient>(
        &self,
        group: Arc<CoxeterGroup>,
        choice: DescentChoice,
    ) -> Result<(KlTable<C>, CacheLoad)> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(group.graph().kind());
        if path.exists() {
            match self.try_resume(&path, group.clone(), choice) {
                Ok(done) => return Ok(done),
                Err(Error::Cache(reason)) => {
                    let moved_to = quarantine(&path)?;
                    let (table, _) = self.build_fresh(&path, group, choice)?;
                    return Ok((table, CacheLoad::Quarantined { moved_to, reason }));
                }
                Err(e) => return Err(e),
            }
        }
        self.build_fresh(&path, group, choice)
    }

    fn build_fresh<C: Coefficient>(
        &self,
        path: &Path,
        group: Arc<CoxeterGroup>,
        choice: DescentChoice,
    ) -> Result<(KlTable<C>, CacheLoad)> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", header(group.graph().kind()))?;
        let g = group.clone();
        let table = KlTable::build_resumable(
            group,
            choice,
            Vec::new(),
            |_| Ok(()),
            |w, data| {
                out.write_all(row_lines(&g, w, data).as_bytes())?;
                Ok(())
            },
        )?;
        out.flush()?;
        Ok((table, CacheLoad::Cold))
    }

    fn try_resume<C: Coefficient>(
        &self,
        path: &Path,
        group: Arc<CoxeterGroup>,
        choice: DescentChoice,
    ) -> Result<(KlTable<C>, CacheLoad)> {
        let loaded = read_cache::<C>(path, &group)?;
        let total = loaded.rows.len();
        let kept_rows = Cell::new(total);
        let mut writer: Option<BufWriter<File>> = None;
        let g = group.clone();
        let table = KlTable::build_resumable(
            group,
            choice,
            loaded.rows,
            |kept| {
                kept_rows.set(kept);
                Ok(())
            },
            |w, data| {
                if writer.is_none() {
                    // drop a trailing partial row or line before appending
                    let cut = loaded
                        .offsets
                        .get(kept_rows.get())
                        .copied()
                        .unwrap_or(loaded.end);
                    let file = OpenOptions::new().write(true).open(path)?;
                    file.set_len(cut)?;
                    let file = OpenOptions::new().append(true).open(path)?;
                    writer = Some(BufWriter::new(file));
                }
                let out = writer.as_mut().expect("writer opened above");
                out.write_all(row_lines(&g, w, data).as_bytes())?;
                Ok(())
            },
        )?;
        if let Some(mut out) = writer {
            out.flush()?;
        }
        let kept_rows = kept_rows.get();
        // the loaded rows are re-derived on a sample before being trusted
        for i in (0..kept_rows).filter(|i| i % SPOT_CHECK_STRIDE == 0 || i + 1 == kept_rows) {
            let w = Element(i as u32);
            let stored: Vec<Vec<C>> = table.row_data(w).into_iter().map(|(_, p)| p).collect();
            if table.recompute_row(w)? != stored {
                return Err(Error::Cache(format!(
                    "row {} does not recompute",
                    table.group().format(w)
                )));
            }
        }
        let status = if kept_rows == table.group().order() {
            CacheLoad::Warm
        } else {
            CacheLoad::Resumed { rows: kept_rows }
        };
        Ok((table, status))
    }
}
