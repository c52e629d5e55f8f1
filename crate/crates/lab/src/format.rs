//! Text formats shared by every verb.
//!
//! A bit vector is written `len:hex`, where the hex digits spell the integer
//! `Σ bit_i·2^i` most significant digit first. A matrix is a header line
//! `rows cols` followed by one hex row per line.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, ensure, Context, Result};
use dalab_core::condense::{CondenserKind, SomewhereCondenser, StepProvenance};
use dalab_core::dimexp::{Certificate, DimExpander};
use dalab_core::field::GF2k;
use dalab_core::injector::{StructuredFunction, SumsetInjector};
use dalab_core::verify::TruthTable;
use dalab_core::xprims::LinearCode;
use dalab_core::{BitVec, GF2Matrix};
use num_bigint::BigInt;
use num_rational::BigRational;

pub fn hex_digits(v: &BitVec) -> String {
    let digits = v.len().div_ceil(4).max(1);
    let mut out = String::with_capacity(digits);
    for d in (0..digits).rev() {
        let mut nib = 0u8;
        for b in 0..4 {
            let i = 4 * d + b;
            if i < v.len() && v.get(i) {
                nib |= 1 << b;
            }
        }
        out.push(char::from_digit(nib as u32, 16).unwrap());
    }
    out
}

/// Reads hex digits into a `len`-bit vector; the value must fit.
pub fn parse_hex(len: usize, s: &str) -> Result<BitVec> {
    let s = s.trim();
    let s = s.strip_prefix("0x").unwrap_or(s);
    ensure!(!s.is_empty(), "empty hex string");
    let mut v = BitVec::zeros(len);
    for (d, c) in s.chars().rev().enumerate() {
        let nib = c.to_digit(16).ok_or_else(|| anyhow!("bad hex digit {c:?}"))?;
        for b in 0..4 {
            if nib >> b & 1 == 1 {
                let i = 4 * d + b;
                ensure!(i < len, "hex value {s} does not fit in {len} bits");
                v.set(i, true);
            }
        }
    }
    Ok(v)
}

pub fn write_bitvec(v: &BitVec) -> String {
    format!("{}:{}", v.len(), hex_digits(v))
}

pub fn parse_bitvec(s: &str) -> Result<BitVec> {
    let (len, hex) = s.trim().split_once(':').ok_or_else(|| anyhow!("bit vector {s:?} lacks a len: prefix"))?;
    let len: usize = len.parse().with_context(|| format!("bit length in {s:?}"))?;
    parse_hex(len, hex)
}

/// A bit vector given either as `len:hex` or as bare hex of a known width.
pub fn parse_input(s: &str, len: usize) -> Result<BitVec> {
    if s.contains(':') {
        let v = parse_bitvec(s)?;
        ensure!(v.len() == len, "input has {} bits, expected {len}", v.len());
        Ok(v)
    } else {
        parse_hex(len, s)
    }
}

pub fn write_matrix(m: &GF2Matrix, out: &mut String) {
    writeln!(out, "{} {}", m.n_rows(), m.n_cols()).unwrap();
    for r in m.rows() {
        writeln!(out, "{}", hex_digits(r)).unwrap();
    }
}

pub fn matrix_text(m: &GF2Matrix) -> String {
    let mut s = String::new();
    write_matrix(m, &mut s);
    s
}

/// Line cursor over a text file that skips blank lines and `#` comments.
pub struct Lines<'a> {
    it: std::iter::Peekable<Box<dyn Iterator<Item = &'a str> + 'a>>,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = &'a str>> =
            Box::new(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')));
        Lines { it: it.peekable() }
    }

    pub fn next_line(&mut self, what: &str) -> Result<&'a str> {
        self.it.next().ok_or_else(|| anyhow!("unexpected end of file reading {what}"))
    }

    pub fn fields(&mut self, what: &str, count: usize) -> Result<Vec<&'a str>> {
        let line = self.next_line(what)?;
        let f: Vec<&str> = line.split_whitespace().collect();
        ensure!(f.len() == count, "{what}: expected {count} fields, got {line:?}");
        Ok(f)
    }

    pub fn is_done(&mut self) -> bool {
        self.it.peek().is_none()
    }
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.parse().with_context(|| format!("{what}: {s:?}"))
}

pub fn read_matrix(lines: &mut Lines) -> Result<GF2Matrix> {
    let h = lines.fields("matrix header", 2)?;
    let (rows, cols): (usize, usize) = (num(h[0], "rows")?, num(h[1], "cols")?);
    let mut out = Vec::with_capacity(rows);
    for i in 0..rows {
        out.push(parse_hex(cols, lines.next_line("matrix row")?).with_context(|| format!("matrix row {i}"))?);
    }
    Ok(GF2Matrix::from_rows(cols, out)?)
}

pub fn parse_matrix(text: &str) -> Result<GF2Matrix> {
    read_matrix(&mut Lines::new(text))
}

pub fn write_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = num(p, "numerator")?;
    let q: BigInt = num(q, "denominator")?;
    ensure!(q != BigInt::from(0), "zero denominator in {s:?}");
    Ok(BigRational::new(p, q))
}

/// Small fractions such as entropy rates, as `(p, q)`.
pub fn parse_pair(s: &str) -> Result<(u64, u64)> {
    let s = s.trim();
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let (p, q): (u64, u64) = (num(p, "numerator")?, num(q, "denominator")?);
    ensure!(q != 0, "zero denominator in {s:?}");
    Ok((p, q))
}

pub fn write_certificate(c: &Certificate) -> String {
    match c {
        Certificate::None => "none".into(),
        Certificate::Exhaustive { n } => format!("exhaustive:{n}"),
        Certificate::Sampled { trials } => format!("sampled:{trials}"),
    }
}

pub fn parse_certificate(s: &str) -> Result<Certificate> {
    match s.split_once(':') {
        None if s == "none" => Ok(Certificate::None),
        Some(("exhaustive", n)) => Ok(Certificate::Exhaustive { n: num(n, "certificate")? }),
        Some(("sampled", t)) => Ok(Certificate::Sampled { trials: num(t, "certificate")? }),
        _ => bail!("unknown certificate {s:?}"),
    }
}

/// Header `n d alpha certificate`, then the `d` maps.
pub fn write_expander(e: &DimExpander) -> String {
    let mut s = format!("{} {} {} {}\n", e.n, e.maps.len(), write_ratio(&e.alpha), write_certificate(&e.certificate));
    for m in &e.maps {
        write_matrix(m, &mut s);
    }
    s
}

pub fn read_expander(lines: &mut Lines) -> Result<DimExpander> {
    let h = lines.fields("expander header", 4)?;
    let (n, d): (usize, usize) = (num(h[0], "n")?, num(h[1], "d")?);
    let alpha = parse_ratio(h[2])?;
    let certificate = parse_certificate(h[3])?;
    let mut maps = Vec::with_capacity(d);
    for _ in 0..d {
        let m = read_matrix(lines)?;
        ensure!(m.n_rows() == n && m.n_cols() == n, "expander map is {}×{}, expected {n}×{n}", m.n_rows(), m.n_cols());
        maps.push(m);
    }
    Ok(DimExpander { n, maps, alpha, certificate, seed: None })
}

pub fn parse_expander(text: &str) -> Result<DimExpander> {
    read_expander(&mut Lines::new(text))
}

pub fn kind_name(k: CondenserKind) -> &'static str {
    match k {
        CondenserKind::BasicAffine => "basic-affine",
        CondenserKind::BasicGeneral => "basic-general",
        CondenserKind::IteratedAffine => "affine",
        CondenserKind::IteratedGeneral => "general",
    }
}

fn parse_kind(s: &str) -> Result<CondenserKind> {
    Ok(match s {
        "basic-affine" => CondenserKind::BasicAffine,
        "basic-general" => CondenserKind::BasicGeneral,
        "affine" => CondenserKind::IteratedAffine,
        "general" => CondenserKind::IteratedGeneral,
        _ => bail!("unknown condenser kind {s:?}"),
    })
}

/// Header `condenser kind n_in m_out rows steps`, one line
/// `step dim degree alpha certificate` per step, then the row maps.
pub fn write_condenser(c: &SomewhereCondenser) -> String {
    let mut s = format!("condenser {} {} {} {} {}\n", kind_name(c.kind), c.n_in, c.m_out, c.rows(), c.steps.len());
    for st in &c.steps {
        writeln!(s, "step {} {} {} {}", st.dim, st.degree, write_ratio(&st.alpha), write_certificate(&st.certificate))
            .unwrap();
    }
    for m in &c.row_maps {
        write_matrix(m, &mut s);
    }
    s
}

pub fn parse_condenser(text: &str) -> Result<SomewhereCondenser> {
    let mut lines = Lines::new(text);
    let h = lines.fields("condenser header", 6)?;
    ensure!(h[0] == "condenser", "not a condenser file");
    let kind = parse_kind(h[1])?;
    let (n_in, m_out, rows, depth): (usize, usize, usize, usize) =
        (num(h[2], "n_in")?, num(h[3], "m_out")?, num(h[4], "rows")?, num(h[5], "steps")?);
    let mut steps = Vec::with_capacity(depth);
    for _ in 0..depth {
        let f = lines.fields("condenser step", 5)?;
        ensure!(f[0] == "step", "expected a step line");
        steps.push(StepProvenance {
            dim: num(f[1], "dim")?,
            degree: num(f[2], "degree")?,
            alpha: parse_ratio(f[3])?,
            certificate: parse_certificate(f[4])?,
        });
    }
    let mut row_maps = Vec::with_capacity(rows);
    for _ in 0..rows {
        let m = read_matrix(&mut lines)?;
        ensure!(
            m.n_rows() == m_out && m.n_cols() == n_in,
            "condenser row is {}×{}, expected {m_out}×{n_in}",
            m.n_rows(),
            m.n_cols()
        );
        row_maps.push(m);
    }
    Ok(SomewhereCondenser { n_in, m_out, kind, row_maps, steps })
}

/// Header `k n distance` (`-` when uncertified), then the generator.
pub fn write_code(c: &LinearCode) -> String {
    let d = c.certified_distance().map_or("-".to_string(), |d| d.to_string());
    let mut s = format!("{} {} {d}\n", c.k(), c.n_code());
    write_matrix(c.generator(), &mut s);
    s
}

pub fn parse_code(text: &str) -> Result<LinearCode> {
    let mut lines = Lines::new(text);
    let h = lines.fields("code header", 3)?;
    let g = read_matrix(&mut lines)?;
    ensure!(
        g.n_rows() == num::<usize>(h[0], "k")? && g.n_cols() == num::<usize>(h[1], "n")?,
        "code header disagrees with generator"
    );
    let mut c = LinearCode::new(g)?;
    if h[2] != "-" {
        let claimed: usize = num(h[2], "distance")?;
        let d = c.certify()?;
        ensure!(d == claimed, "code claims distance {claimed}, enumeration finds {d}");
    }
    Ok(c)
}

/// Lines `k:hex`, one field modulus per degree.
pub fn write_moduli(fields: &[GF2k]) -> String {
    fields.iter().map(|f| format!("{}:{:x}\n", f.k(), f.modulus())).collect()
}

pub fn parse_moduli(text: &str) -> Result<Vec<GF2k>> {
    let mut lines = Lines::new(text);
    let mut out = Vec::new();
    while !lines.is_done() {
        let l = lines.next_line("modulus")?;
        let (k, hex) = l.split_once(':').ok_or_else(|| anyhow!("modulus line {l:?} lacks k:"))?;
        let k: usize = num(k, "degree")?;
        let m = u64::from_str_radix(hex, 16).with_context(|| format!("modulus {hex:?}"))?;
        let f = GF2k::with_modulus(m)?;
        ensure!(f.k() == k, "modulus {hex} has degree {}, line says {k}", f.k());
        out.push(f);
    }
    Ok(out)
}

/// Header `tt n m`, then one `len:hex` mask per output bit.
pub fn write_truth_table(t: &TruthTable) -> String {
    let mut s = format!("tt {} {}\n", t.n(), t.m());
    for bit in 0..t.m() {
        let words = t.bit_mask(bit);
        writeln!(s, "{}", write_bitvec(&BitVec::from_words(1 << t.n(), &words))).unwrap();
    }
    s
}

fn read_truth_table(lines: &mut Lines, n: usize, m: usize) -> Result<TruthTable> {
    let mut values = vec![0u64; 1 << n];
    for bit in 0..m {
        let mask = parse_bitvec(lines.next_line("truth table bit")?)?;
        ensure!(mask.len() == 1 << n, "truth table bit {bit} has {} entries, expected {}", mask.len(), 1u64 << n);
        for x in mask.ones_iter() {
            values[x] |= 1 << bit;
        }
    }
    Ok(TruthTable::from_values(n, m, values)?)
}

/// Header `injector n k1 k2 d m certified`, then the `m` maps.
pub fn write_injector(j: &SumsetInjector) -> String {
    let mut s = format!("injector {} {} {} {} {} {}\n", j.n(), j.k1(), j.k2(), j.d(), j.m(), j.certified());
    for i in 0..j.m() {
        write_matrix(&j.map(i), &mut s);
    }
    s
}

fn read_injector(lines: &mut Lines, h: &[&str]) -> Result<SumsetInjector> {
    let (n, k1, k2, d, m): (usize, usize, usize, usize, usize) =
        (num(h[1], "n")?, num(h[2], "k1")?, num(h[3], "k2")?, num(h[4], "d")?, num(h[5], "m")?);
    let mut maps = Vec::with_capacity(m);
    for _ in 0..m {
        let a = read_matrix(lines)?;
        ensure!(a.n_rows() == d && a.n_cols() == n, "injector map is {}×{}, expected {d}×{n}", a.n_rows(), a.n_cols());
        maps.push(a);
    }
    // certification is never trusted from a file
    Ok(SumsetInjector::new(n, k1, k2, maps)?)
}

/// An injector followed by `structured` and one `len:hex` table per map.
pub fn write_structured(f: &StructuredFunction) -> String {
    let mut s = write_injector(f.injector());
    s.push_str("structured\n");
    let d = f.injector().d();
    for t in f.tables() {
        writeln!(s, "{}", write_bitvec(&BitVec::from_words(1 << d, t))).unwrap();
    }
    s
}

/// Everything a `file:` argument may hold.
pub enum Loaded {
    Table(TruthTable),
    Injector(SumsetInjector),
    Structured(StructuredFunction),
}

pub fn parse_function_file(text: &str) -> Result<Loaded> {
    let mut lines = Lines::new(text);
    let header = lines.next_line("header")?;
    let h: Vec<&str> = header.split_whitespace().collect();
    match h.first().copied() {
        Some("tt") => {
            ensure!(h.len() == 3, "truth table header {header:?}");
            let t = read_truth_table(&mut lines, num(h[1], "n")?, num(h[2], "m")?)?;
            Ok(Loaded::Table(t))
        }
        Some("injector") => {
            ensure!(h.len() == 7, "injector header {header:?}");
            let j = read_injector(&mut lines, &h)?;
            if lines.is_done() {
                return Ok(Loaded::Injector(j));
            }
            ensure!(lines.next_line("structured marker")? == "structured", "expected `structured` after the maps");
            let mut tables = Vec::with_capacity(j.m());
            for _ in 0..j.m() {
                let t = parse_bitvec(lines.next_line("structured table")?)?;
                ensure!(t.len() == 1 << j.d(), "table has {} entries, expected {}", t.len(), 1u64 << j.d());
                tables.push(t.words().to_vec());
            }
            Ok(Loaded::Structured(StructuredFunction::new(j, tables)?))
        }
        _ => bail!("unrecognised file header {header:?}"),
    }
}

pub fn parse_injector(text: &str) -> Result<SumsetInjector> {
    match parse_function_file(text)? {
        Loaded::Injector(j) => Ok(j),
        Loaded::Structured(f) => Ok(f.injector().clone()),
        Loaded::Table(_) => bail!("expected an injector file, found a truth table"),
    }
}
