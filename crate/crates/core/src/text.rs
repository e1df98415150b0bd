//! Text formats.
//!
//! Single values use the same forms as their `Display` impls and parse back
//! through `FromStr`. Files are line-oriented with `[section]` headers and
//! `#` comments:
//!
//! ```text
//! # family file
//! claim: filter-base
//! [generators]
//! ep(prefix=[],start=0,period=2,pattern=[0])
//! [tests]
//! ep(prefix=[],start=0,period=3,pattern=[1])
//!
//! # cover file (a sequence file uses [cover 0], [cover 1], ... blocks)
//! [points]
//! x: ep(prefix=[],start=0,period=2,pattern=[0])
//! ```
//!
//! Every error carries the 1-based line and column of the offending token.

use std::str::FromStr;

use crate::constructions::GuesserProgram;
use crate::covers::{valid_label, CoverSequence, CoverTrace};
use crate::epset::EpSet;
use crate::error::{LabError, ParseError};
use crate::families::{FamilySpec, KindClaim, TestBattery};
use crate::lazy::{GreedySide, LazySource, LazyTruncation};
use crate::qafun::{QaFun, StrandFun};

type PResult<T> = std::result::Result<T, ParseError>;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col0: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize, col0: usize) -> Self {
        Self { src, pos: 0, line, col0 }
    }

    fn col(&self) -> usize {
        self.col0 + self.src[..self.pos].chars().count() + 1
    }

    fn err_at(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col0 + self.src[..pos].chars().count() + 1, msg)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), msg)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> PResult<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{tok}`")))
        }
    }

    fn ident(&mut self) -> PResult<&'a str> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.err("expected a name"));
        }
        let s = &self.rest()[..len];
        self.pos += len;
        Ok(s)
    }

    fn number(&mut self) -> PResult<u64> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.err("expected a natural number"));
        }
        let n = self.rest()[..len]
            .parse()
            .map_err(|_| self.err("number does not fit in 64 bits"))?;
        self.pos += len;
        Ok(n)
    }

    fn list(&mut self) -> PResult<Vec<u64>> {
        self.expect("[")?;
        let mut out = Vec::new();
        if self.eat("]") {
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            if self.eat("]") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn finish(&mut self) -> PResult<()> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }

    /// Parses `name(k=v,...)`, handing each key to `field`.
    fn record(&mut self, name: &str, mut field: impl FnMut(&mut Self, &'a str) -> PResult<bool>) -> PResult<()> {
        self.expect(name)?;
        self.expect("(")?;
        let mut seen: Vec<&str> = Vec::new();
        loop {
            let at = {
                self.skip_ws();
                self.pos
            };
            let key = self.ident()?;
            if seen.contains(&key) {
                return Err(self.err_at(at, format!("duplicate field `{key}`")));
            }
            self.expect("=")?;
            if !field(self, key)? {
                return Err(self.err_at(at, format!("unknown field `{key}` in {name}(...)")));
            }
            seen.push(key);
            if self.eat(")") {
                return Ok(());
            }
            self.expect(",")?;
        }
    }

    fn epset(&mut self) -> PResult<EpSet> {
        self.skip_ws();
        let at = self.pos;
        let (mut prefix, mut start, mut period, mut pattern) = (Vec::new(), 0, None, None);
        self.record("ep", |c, key| {
            match key {
                "prefix" => prefix = c.list()?,
                "start" => start = c.number()?,
                "period" => period = Some(c.number()?),
                "pattern" => pattern = Some(c.list()?),
                _ => return Ok(false),
            }
            Ok(true)
        })?;
        let period = period.ok_or_else(|| self.err_at(at, "missing field `period`"))?;
        let pattern = pattern.ok_or_else(|| self.err_at(at, "missing field `pattern`"))?;
        EpSet::new(prefix, start, period, pattern).map_err(|e| self.err_at(at, e.to_string()))
    }

    fn qafun(&mut self) -> PResult<QaFun> {
        self.skip_ws();
        let at = self.pos;
        let (mut table, mut period, mut incr, mut base) = (Vec::new(), None, None, None);
        self.record("qa", |c, key| {
            match key {
                "table" => table = c.list()?,
                "period" => period = Some(c.number()?),
                "incr" => incr = Some(c.number()?),
                "base" => base = Some(c.list()?),
                _ => return Ok(false),
            }
            Ok(true)
        })?;
        let period = period.ok_or_else(|| self.err_at(at, "missing field `period`"))?;
        let incr = incr.ok_or_else(|| self.err_at(at, "missing field `incr`"))?;
        let base = base.ok_or_else(|| self.err_at(at, "missing field `base`"))?;
        QaFun::new(table, period, incr, base).map_err(|e| self.err_at(at, e.to_string()))
    }

    fn bracketed<T>(&mut self, name: &str, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect(name)?;
        self.expect("[")?;
        let mut out = vec![item(self)?];
        while self.eat(";") {
            out.push(item(self)?);
        }
        self.expect("]")?;
        Ok(out)
    }

    fn strands(&mut self) -> PResult<StrandFun> {
        self.skip_ws();
        let at = self.pos;
        let s = self.bracketed("strands", Self::qafun)?;
        StrandFun::new(s).map_err(|e| self.err_at(at, e.to_string()))
    }

    fn guesser(&mut self) -> PResult<GuesserProgram> {
        self.skip_ws();
        let at = self.pos;
        let s = self.bracketed("guesser", Self::epset)?;
        GuesserProgram::new(s).map_err(|e| self.err_at(at, e.to_string()))
    }

    fn lazy_source(&mut self) -> PResult<LazySource> {
        self.skip_ws();
        let at = self.pos;
        let name = self.ident()?;
        self.expect("(")?;
        let src = match name {
            "partial_sums" => LazySource::PartialSums(self.qafun()?),
            "periodic" => LazySource::Periodic(self.epset()?),
            "greedy_i" | "greedy_j" => LazySource::Greedy {
                guesser: self.guesser()?,
                side: if name == "greedy_i" { GreedySide::I } else { GreedySide::J },
            },
            _ => return Err(self.err_at(at, format!("unknown generator `{name}`"))),
        };
        self.expect(")")?;
        Ok(src)
    }

    fn truncation(&mut self) -> PResult<LazyTruncation> {
        self.skip_ws();
        let at = self.pos;
        let (mut generator, mut depth, mut elements) = (None, None, None);
        self.record("trunc", |c, key| {
            match key {
                "gen" => generator = Some(c.lazy_source()?),
                "depth" => depth = Some(c.number()?),
                "elements" => elements = Some(c.list()?),
                _ => return Ok(false),
            }
            Ok(true)
        })?;
        let t = LazyTruncation {
            generator: generator.ok_or_else(|| self.err_at(at, "missing field `gen`"))?,
            depth: depth.ok_or_else(|| self.err_at(at, "missing field `depth`"))?,
            elements: elements.ok_or_else(|| self.err_at(at, "missing field `elements`"))?,
        };
        if !t.elements.windows(2).all(|w| w[0] < w[1]) || t.elements.last().is_some_and(|&x| x >= t.depth) {
            return Err(self.err_at(at, "elements must increase and stay below depth"));
        }
        Ok(t)
    }
}

fn parse_whole<'a, T>(s: &'a str, f: impl FnOnce(&mut Cursor<'a>) -> PResult<T>) -> PResult<T> {
    value_at(1, 0, s, f)
}

impl FromStr for EpSet {
    type Err = ParseError;
    fn from_str(s: &str) -> PResult<Self> {
        parse_whole(s, Cursor::epset)
    }
}

impl FromStr for QaFun {
    type Err = ParseError;
    fn from_str(s: &str) -> PResult<Self> {
        parse_whole(s, Cursor::qafun)
    }
}

impl FromStr for StrandFun {
    type Err = ParseError;
    fn from_str(s: &str) -> PResult<Self> {
        parse_whole(s, Cursor::strands)
    }
}

impl FromStr for GuesserProgram {
    type Err = ParseError;
    fn from_str(s: &str) -> PResult<Self> {
        parse_whole(s, Cursor::guesser)
    }
}

impl FromStr for LazySource {
    type Err = ParseError;
    fn from_str(s: &str) -> PResult<Self> {
        parse_whole(s, Cursor::lazy_source)
    }
}

impl FromStr for LazyTruncation {
    type Err = ParseError;
    fn from_str(s: &str) -> PResult<Self> {
        parse_whole(s, Cursor::truncation)
    }
}

/// A value typed at the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Set(EpSet),
    Fun(QaFun),
    Strands(StrandFun),
    Guesser(GuesserProgram),
    Truncation(LazyTruncation),
}

impl FromStr for Value {
    type Err = ParseError;
    fn from_str(s: &str) -> PResult<Self> {
        let head = s.trim_start();
        if head.starts_with("ep") {
            s.parse().map(Value::Set)
        } else if head.starts_with("qa") {
            s.parse().map(Value::Fun)
        } else if head.starts_with("strands") {
            s.parse().map(Value::Strands)
        } else if head.starts_with("guesser") {
            s.parse().map(Value::Guesser)
        } else if head.starts_with("trunc") {
            s.parse().map(Value::Truncation)
        } else {
            let col = s.len() - head.len() + 1;
            Err(ParseError::new(1, col, "expected ep(...), qa(...), strands[...], guesser[...] or trunc(...)"))
        }
    }
}

/// Meaningful lines of a file: `(line number, column offset, text)`, with
/// comments and surrounding blanks removed.
fn lines(text: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            None
        } else {
            let offset = body[..body.len() - body.trim_start().len()].chars().count();
            Some((i + 1, offset, trimmed))
        }
    })
}

fn header(line: &str) -> Option<&str> {
    line.strip_prefix('[')?.strip_suffix(']').map(str::trim)
}

fn value_at<'a, T>(line: usize, offset: usize, s: &'a str, f: impl FnOnce(&mut Cursor<'a>) -> PResult<T>) -> PResult<T> {
    let mut c = Cursor::new(s, line, offset);
    let v = f(&mut c)?;
    c.finish()?;
    Ok(v)
}

fn infinite_at(line: usize, offset: usize, s: &str) -> PResult<EpSet> {
    let a = value_at(line, offset, s, Cursor::epset)?;
    if a.is_infinite() {
        Ok(a)
    } else {
        Err(ParseError::new(line, offset + 1, "set must be infinite"))
    }
}

/// Contents of a family file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FamilyFile {
    pub generators: Vec<EpSet>,
    pub claim: Option<KindClaim>,
    pub tests: Vec<EpSet>,
}

impl FamilyFile {
    pub fn family(&self) -> crate::Result<FamilySpec> {
        Ok(FamilySpec::new(self.generators.clone())?.with_claim(self.claim))
    }

    pub fn battery(&self) -> TestBattery {
        TestBattery::new(self.tests.clone()).expect("tests are checked infinite when parsed")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(c) = self.claim {
            out.push_str(&format!("claim: {c}\n"));
        }
        if !self.generators.is_empty() {
            out.push_str("[generators]\n");
            for a in &self.generators {
                out.push_str(&format!("{a}\n"));
            }
        }
        if !self.tests.is_empty() {
            out.push_str("[tests]\n");
            for a in &self.tests {
                out.push_str(&format!("{a}\n"));
            }
        }
        out
    }
}

impl From<&FamilySpec> for FamilyFile {
    fn from(f: &FamilySpec) -> Self {
        Self {
            generators: f.generators().to_vec(),
            claim: f.claim(),
            tests: Vec::new(),
        }
    }
}

pub fn parse_family_file(text: &str) -> PResult<FamilyFile> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Generators,
        Tests,
    }
    let mut out = FamilyFile::default();
    let mut section = Section::None;
    for (line, offset, s) in lines(text) {
        if let Some(h) = header(s) {
            section = match h {
                "generators" => Section::Generators,
                "tests" => Section::Tests,
                _ => return Err(ParseError::new(line, offset + 1, format!("unknown section [{h}]"))),
            };
            continue;
        }
        if let Some(rest) = s.strip_prefix("claim:") {
            out.claim = Some(
                KindClaim::parse(rest.trim())
                    .ok_or_else(|| ParseError::new(line, offset + 8, format!("unknown claim `{}`", rest.trim())))?,
            );
            continue;
        }
        let a = infinite_at(line, offset, s)?;
        match section {
            Section::Generators if !out.generators.contains(&a) => out.generators.push(a),
            Section::Generators => {}
            Section::Tests => out.tests.push(a),
            Section::None => return Err(ParseError::new(line, offset + 1, "set outside of a section")),
        }
    }
    Ok(out)
}

/// A `[functions]` file: one `qa(...)` per line.
pub fn parse_function_file(text: &str) -> PResult<Vec<QaFun>> {
    let mut out = Vec::new();
    let mut in_section = false;
    for (line, offset, s) in lines(text) {
        match header(s) {
            Some("functions") => in_section = true,
            Some(h) => return Err(ParseError::new(line, offset + 1, format!("unknown section [{h}]"))),
            None if in_section => out.push(value_at(line, offset, s, Cursor::qafun)?),
            None => return Err(ParseError::new(line, offset + 1, "function outside of [functions]")),
        }
    }
    Ok(out)
}

pub fn render_function_file(fs: &[QaFun]) -> String {
    let mut out = String::from("[functions]\n");
    for f in fs {
        out.push_str(&format!("{f}\n"));
    }
    out
}

fn point_line(line: usize, offset: usize, s: &str) -> PResult<(String, EpSet)> {
    let (label, rest) = s
        .split_once(':')
        .ok_or_else(|| ParseError::new(line, offset + 1, "expected `label: ep(...)`"))?;
    let label = label.trim();
    if !valid_label(label) {
        return Err(ParseError::new(line, offset + 1, format!("invalid point label `{label}`")));
    }
    let inner = offset + label.chars().count() + 1 + (rest.len() - rest.trim_start().len());
    Ok((label.to_string(), value_at(line, inner, rest.trim(), Cursor::epset)?))
}

fn build_cover(line: usize, points: Vec<(String, EpSet)>) -> PResult<CoverTrace> {
    CoverTrace::new(points).map_err(|e| ParseError::new(line, 1, e.to_string()))
}

/// A single cover, `[points]` followed by `label: ep(...)` lines.
pub fn parse_cover_file(text: &str) -> PResult<CoverTrace> {
    let seq = parse_sequence_file(text)?;
    match seq.covers() {
        [c] => Ok(c.clone()),
        _ => Err(ParseError::new(1, 1, "expected a single [points] block")),
    }
}

/// A cover sequence: either one `[points]` block (a constant sequence) or
/// blocks `[cover 0]`, `[cover 1]`, ... in order.
pub fn parse_sequence_file(text: &str) -> PResult<CoverSequence> {
    let mut covers = Vec::new();
    let mut current: Option<(usize, Vec<(String, EpSet)>)> = None;
    let mut plain = false;
    for (line, offset, s) in lines(text) {
        if let Some(h) = header(s) {
            let err = |m: String| ParseError::new(line, offset + 1, m);
            if let Some((at, pts)) = current.take() {
                covers.push(build_cover(at, pts)?);
            }
            if h == "points" {
                if plain || !covers.is_empty() {
                    return Err(err("[points] must be the only block".into()));
                }
                plain = true;
            } else if let Some(idx) = h.strip_prefix("cover") {
                let idx: usize = idx.trim().parse().map_err(|_| err(format!("bad cover index in [{h}]")))?;
                if plain || idx != covers.len() {
                    return Err(err(format!("expected [cover {}]", covers.len())));
                }
            } else {
                return Err(err(format!("unknown section [{h}]")));
            }
            current = Some((line, Vec::new()));
            continue;
        }
        match current.as_mut() {
            Some((_, pts)) => pts.push(point_line(line, offset, s)?),
            None => return Err(ParseError::new(line, offset + 1, "point outside of a block")),
        }
    }
    if let Some((at, pts)) = current.take() {
        covers.push(build_cover(at, pts)?);
    }
    CoverSequence::new(covers).map_err(|e| ParseError::new(1, 1, e.to_string()))
}

/// Turns a parse failure into the crate error type.
pub fn lab<T>(r: PResult<T>) -> crate::Result<T> {
    r.map_err(LabError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epset_round_trip() {
        let evens = EpSet::residue_class(2, 0);
        assert_eq!(evens.to_string(), "ep(prefix=[],start=0,period=2,pattern=[0])");
        assert_eq!("ep(prefix=[],start=0,period=2,pattern=[0])".parse::<EpSet>().unwrap(), evens);
        assert_eq!(" ep( pattern = [0] , period=2 ) ".parse::<EpSet>().unwrap(), evens);
        let a: EpSet = "ep(prefix=[1,3],start=5,period=4,pattern=[0,3])".parse().unwrap();
        assert_eq!(a.to_string().parse::<EpSet>().unwrap(), a);
    }

    #[test]
    fn qafun_round_trip() {
        let f: QaFun = "qa(table=[],period=1,incr=2,base=[0])".parse().unwrap();
        assert_eq!(f, QaFun::linear(2, 0));
        assert_eq!(f.to_string(), "qa(table=[],period=1,incr=2,base=[0])");
        let g: QaFun = "qa(period=1,incr=2,base=[0])".parse().unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn rejects_with_positions() {
        let e = "ep(period=0,pattern=[])".parse::<EpSet>().unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        let e = "ep(period=2,pattern=[0],start=x)".parse::<EpSet>().unwrap_err();
        assert_eq!((e.line, e.col), (1, 31));
        let e = "ep(period=2,pattern=[0],period=2)".parse::<EpSet>().unwrap_err();
        assert_eq!((e.line, e.col), (1, 25));
        assert!("ep(period=0,...)".parse::<EpSet>().is_err());
        assert!("ep(period=2,pattern=[0]) x".parse::<EpSet>().is_err());
        assert!("qa(period=1,base=[0])".parse::<QaFun>().is_err());
        assert!("ep(period=2,pattern=[0],colour=[1])".parse::<EpSet>().is_err());
    }

    #[test]
    fn composite_values() {
        let s = "strands[qa(table=[],period=1,incr=1,base=[0]);qa(table=[],period=1,incr=0,base=[3])]";
        assert_eq!(s.parse::<StrandFun>().unwrap().to_string(), s);
        let g = "guesser[ep(prefix=[],start=0,period=2,pattern=[0])]";
        assert_eq!(g.parse::<GuesserProgram>().unwrap().to_string(), g);
        assert!("guesser[ep(prefix=[1],start=2,period=1,pattern=[])]".parse::<GuesserProgram>().is_err());
        let t = "trunc(gen=partial_sums(qa(table=[],period=1,incr=0,base=[1])),depth=10,elements=[1,3,5,7,9])";
        let parsed: LazyTruncation = t.parse().unwrap();
        assert_eq!(parsed.to_string(), t);
        assert!(parsed.replays());
        assert!(matches!("qa(period=1,incr=0,base=[4])".parse::<Value>(), Ok(Value::Fun(_))));
        assert!("xyz".parse::<Value>().is_err());
    }

    #[test]
    fn family_file() {
        let text = "# demo\nclaim: filter-base\n[generators]\nep(prefix=[],start=0,period=2,pattern=[0])\n\n[tests]\n  ep(prefix=[],start=0,period=3,pattern=[1])  # comment\n";
        let f = parse_family_file(text).unwrap();
        assert_eq!(f.generators, vec![EpSet::residue_class(2, 0)]);
        assert_eq!(f.claim, Some(KindClaim::FilterBase));
        assert_eq!(f.tests, vec![EpSet::residue_class(3, 1)]);
        assert_eq!(parse_family_file(&f.render()).unwrap(), f);
        let e = parse_family_file("[generators]\n  ep(prefix=[4],start=5,period=1,pattern=[])\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert!(parse_family_file("ep(prefix=[],start=0,period=1,pattern=[0])").is_err());
    }

    #[test]
    fn cover_files() {
        let text = "[points]\nx: ep(prefix=[],start=0,period=2,pattern=[0])\ny: ep(prefix=[],start=0,period=2,pattern=[1])\n";
        let c = parse_cover_file(text).unwrap();
        assert_eq!(c.to_string(), text);
        let seq_text = "[cover 0]\nx: ep(prefix=[],start=0,period=1,pattern=[0])\n[cover 1]\nx: ep(prefix=[],start=0,period=2,pattern=[1])\n";
        let seq = parse_sequence_file(seq_text).unwrap();
        assert_eq!(seq.covers().len(), 2);
        assert_eq!(seq.to_string(), seq_text);
        assert!(parse_sequence_file("[cover 1]\nx: ep(prefix=[],start=0,period=1,pattern=[0])\n").is_err());
        let e = parse_cover_file("[points]\nx: ep(period=0,pattern=[])\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 4));
        assert!(parse_sequence_file("[cover 0]\nx: ep(prefix=[],start=0,period=1,pattern=[0])\n[cover 1]\ny: ep(prefix=[],start=0,period=1,pattern=[0])\n").is_err());
    }

    #[test]
    fn function_file() {
        let fs = vec![QaFun::identity(), QaFun::new(vec![5], 2, 3, vec![1, 2]).unwrap()];
        assert_eq!(parse_function_file(&render_function_file(&fs)).unwrap(), fs);
    }
}
