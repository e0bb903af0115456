//! Free-group words, group presentations, and the Q-transformations, with
//! exact integer Smith invariants as a sanity check on transformation
//! scripts.
//!
//! Relators are stored freely reduced but not cyclically reduced, so
//! conjugation stays visible. Generators are indexed from 0 internally and
//! named `a`, `b`, `c`, … in the text forms, uppercase meaning inverse.

use std::fmt;

/// One signed generator occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lit {
    pub gen: usize,
    pub inverse: bool,
}

impl Lit {
    pub fn inv(self) -> Lit {
        Lit { gen: self.gen, inverse: !self.inverse }
    }
}

/// A word in the free group, as a sequence of signed generators.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(pub Vec<Lit>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut lits = self.0.clone();
        lits.extend_from_slice(&other.0);
        Word(lits)
    }

    /// Exponent sum of each generator, the abelianized image.
    pub fn exponent_sums(&self, n_gens: usize) -> Vec<i64> {
        let mut sums = vec![0i64; n_gens];
        for l in &self.0 {
            sums[l.gen] += if l.inverse { -1 } else { 1 };
        }
        sums
    }
}

/// Cancels adjacent inverse pairs until none remain. The result represents
/// the same group element.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<Lit> = Vec::with_capacity(w.0.len());
    for &l in &w.0 {
        if let Some(&top) = stack.last() {
            if top.gen == l.gen && top.inverse != l.inverse {
                stack.pop();
                continue;
            }
        }
        stack.push(l);
    }
    Word(stack)
}

/// Generators plus freely reduced relator words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub n_gens: usize,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(n_gens: usize, relators: Vec<Word>) -> Result<Self, PresentError> {
        for (i, r) in relators.iter().enumerate() {
            if let Some(l) = r.0.iter().find(|l| l.gen >= n_gens) {
                return Err(PresentError::BadGenerator { relator: i + 1, gen: l.gen });
            }
        }
        Ok(Presentation { n_gens, relators: relators.iter().map(free_reduce).collect() })
    }

    pub fn deficiency(&self) -> i64 {
        self.n_gens as i64 - self.relators.len() as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PresentError {
    #[error("relator {relator} uses generator index {gen} beyond the generator count")]
    BadGenerator { relator: usize, gen: usize },
    #[error("relator index {0} out of range")]
    BadRelatorIndex(usize),
    #[error("generator index {0} out of range")]
    BadGeneratorIndex(usize),
    #[error("relator multiplication needs two distinct relators")]
    SameRelator,
    #[error("generator substitution needs two distinct generators")]
    SameGenerator,
    #[error("deprolongation pattern not matched: {0}")]
    Deprolong(String),
    #[error("presentation parse error: {0}")]
    Parse(String),
}

/// The relator moves: conjugation, inversion, multiplication on the right
/// or left. Relator indices are 0-based here; the text form is 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QTransformation {
    Conjugate { i: usize, by: Word },
    Invert { i: usize },
    MulRight { i: usize, k: usize },
    MulLeft { i: usize, k: usize },
}

/// The generator substitutions: inversion and multiplication by another
/// generator on either side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenTransformation {
    InvertGen { i: usize },
    MulGenRight { i: usize, k: usize },
    MulGenLeft { i: usize, k: usize },
}

/// Applies one relator transformation; everything else is untouched and the
/// rewritten relator is freely reduced.
pub fn apply_q(p: &Presentation, t: &QTransformation) -> Result<Presentation, PresentError> {
    let check = |i: usize| {
        if i < p.relators.len() {
            Ok(())
        } else {
            Err(PresentError::BadRelatorIndex(i + 1))
        }
    };
    let mut relators = p.relators.clone();
    match t {
        QTransformation::Conjugate { i, by } => {
            check(*i)?;
            if let Some(l) = by.0.iter().find(|l| l.gen >= p.n_gens) {
                return Err(PresentError::BadGeneratorIndex(l.gen + 1));
            }
            relators[*i] = free_reduce(&by.concat(&relators[*i]).concat(&by.inverse()));
        }
        QTransformation::Invert { i } => {
            check(*i)?;
            relators[*i] = free_reduce(&relators[*i].inverse());
        }
        QTransformation::MulRight { i, k } => {
            check(*i)?;
            check(*k)?;
            if i == k {
                return Err(PresentError::SameRelator);
            }
            relators[*i] = free_reduce(&relators[*i].concat(&relators[*k]));
        }
        QTransformation::MulLeft { i, k } => {
            check(*i)?;
            check(*k)?;
            if i == k {
                return Err(PresentError::SameRelator);
            }
            relators[*i] = free_reduce(&relators[*k].concat(&relators[*i]));
        }
    }
    Ok(Presentation { n_gens: p.n_gens, relators })
}

/// Applies a generator substitution in every relator, freely reducing.
pub fn apply_gen(p: &Presentation, t: &GenTransformation) -> Result<Presentation, PresentError> {
    let check = |i: usize| {
        if i < p.n_gens {
            Ok(())
        } else {
            Err(PresentError::BadGeneratorIndex(i + 1))
        }
    };
    let subst = |w: &Word, target: usize, image: &dyn Fn(bool) -> Vec<Lit>| -> Word {
        let mut out = Vec::new();
        for &l in &w.0 {
            if l.gen == target {
                out.extend(image(l.inverse));
            } else {
                out.push(l);
            }
        }
        free_reduce(&Word(out))
    };
    let relators: Vec<Word> = match t {
        GenTransformation::InvertGen { i } => {
            check(*i)?;
            p.relators
                .iter()
                .map(|w| subst(w, *i, &|inv| vec![Lit { gen: *i, inverse: !inv }]))
                .collect()
        }
        GenTransformation::MulGenRight { i, k } => {
            check(*i)?;
            check(*k)?;
            if i == k {
                return Err(PresentError::SameGenerator);
            }
            // a_i -> a_i a_k, so a_i^-1 -> a_k^-1 a_i^-1
            p.relators
                .iter()
                .map(|w| {
                    subst(w, *i, &|inv| {
                        if inv {
                            vec![Lit { gen: *k, inverse: true }, Lit { gen: *i, inverse: true }]
                        } else {
                            vec![Lit { gen: *i, inverse: false }, Lit { gen: *k, inverse: false }]
                        }
                    })
                })
                .collect()
        }
        GenTransformation::MulGenLeft { i, k } => {
            check(*i)?;
            check(*k)?;
            if i == k {
                return Err(PresentError::SameGenerator);
            }
            p.relators
                .iter()
                .map(|w| {
                    subst(w, *i, &|inv| {
                        if inv {
                            vec![Lit { gen: *i, inverse: true }, Lit { gen: *k, inverse: true }]
                        } else {
                            vec![Lit { gen: *k, inverse: false }, Lit { gen: *i, inverse: false }]
                        }
                    })
                })
                .collect()
        }
    };
    Ok(Presentation { n_gens: p.n_gens, relators })
}

/// Generalized prolongation: a new generator `a` and the relator `w⁻¹ a`.
pub fn prolong(p: &Presentation, w: &Word) -> Result<Presentation, PresentError> {
    if let Some(l) = w.0.iter().find(|l| l.gen >= p.n_gens) {
        return Err(PresentError::BadGeneratorIndex(l.gen + 1));
    }
    let new_gen = p.n_gens;
    let mut relators = p.relators.clone();
    let mut lits = w.inverse().0;
    lits.push(Lit { gen: new_gen, inverse: false });
    relators.push(free_reduce(&Word(lits)));
    Ok(Presentation { n_gens: p.n_gens + 1, relators })
}

/// Inverse of [`prolong`]: the last relator must be `w⁻¹ a` with `a` the
/// last generator, absent from `w` and from every other relator.
pub fn deprolong(p: &Presentation) -> Result<Presentation, PresentError> {
    let Some(last) = p.relators.last() else {
        return Err(PresentError::Deprolong("no relators".into()));
    };
    if p.n_gens == 0 {
        return Err(PresentError::Deprolong("no generators".into()));
    }
    let a = p.n_gens - 1;
    let Some((tail, init)) = last.0.split_last() else {
        return Err(PresentError::Deprolong("last relator is empty".into()));
    };
    if tail.gen != a || tail.inverse {
        return Err(PresentError::Deprolong(
            "last relator does not end in the last generator".into(),
        ));
    }
    if init.iter().any(|l| l.gen == a) {
        return Err(PresentError::Deprolong(
            "the last generator occurs outside the final position".into(),
        ));
    }
    for (i, r) in p.relators[..p.relators.len() - 1].iter().enumerate() {
        if r.0.iter().any(|l| l.gen == a) {
            return Err(PresentError::Deprolong(format!(
                "the last generator occurs in relator {}",
                i + 1
            )));
        }
    }
    Ok(Presentation {
        n_gens: p.n_gens - 1,
        relators: p.relators[..p.relators.len() - 1].to_vec(),
    })
}

/// Swaps two relators. A convenience move, not one of the transformations
/// a)–f); the invariants below do not depend on relator order.
pub fn swap_relators(p: &Presentation, i: usize, j: usize) -> Result<Presentation, PresentError> {
    if i >= p.relators.len() {
        return Err(PresentError::BadRelatorIndex(i + 1));
    }
    if j >= p.relators.len() {
        return Err(PresentError::BadRelatorIndex(j + 1));
    }
    let mut relators = p.relators.clone();
    relators.swap(i, j);
    Ok(Presentation { n_gens: p.n_gens, relators })
}

/// Smith normal form diagonal of the abelianized relator matrix (rows are
/// relator exponent vectors), with nonnegative entries and the divisibility
/// chain, computed exactly over the integers.
pub fn smith_invariants(p: &Presentation) -> Vec<i64> {
    let rows = p.relators.len();
    let cols = p.n_gens;
    let mut m: Vec<Vec<i64>> = p.relators.iter().map(|r| r.exponent_sums(cols)).collect();
    let size = rows.min(cols);
    let mut diag = Vec::with_capacity(size);
    let mut top = 0;
    while top < size {
        // find a nonzero pivot in the remaining block
        let mut pivot = None;
        'scan: for i in top..rows {
            for j in top..cols {
                if m[i][j] != 0 {
                    pivot = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(top, pi);
        for row in m.iter_mut() {
            row.swap(top, pj);
        }
        // clear row and column by Euclidean steps
        loop {
            let mut progressed = false;
            for i in (top + 1)..rows {
                if m[i][top] != 0 {
                    let q = m[i][top].div_euclid(m[top][top]);
                    for j in top..cols {
                        m[i][j] -= q * m[top][j];
                    }
                    if m[i][top] != 0 {
                        m.swap(top, i);
                    }
                    progressed = true;
                }
            }
            for j in (top + 1)..cols {
                if m[top][j] != 0 {
                    let q = m[top][j].div_euclid(m[top][top]);
                    for row in m.iter_mut().take(rows).skip(top) {
                        row[j] -= q * row[top];
                    }
                    if m[top][j] != 0 {
                        for row in m.iter_mut() {
                            row.swap(top, j);
                        }
                    }
                    progressed = true;
                }
            }
            if !progressed {
                break;
            }
        }
        // enforce divisibility of the rest of the block by the pivot
        let mut fixed = false;
        'div: for i in (top + 1)..rows {
            for j in (top + 1)..cols {
                if m[i][j] % m[top][top] != 0 {
                    for jj in top..cols {
                        let add = m[i][jj];
                        m[top][jj] += add;
                    }
                    fixed = true;
                    break 'div;
                }
            }
        }
        if fixed {
            continue;
        }
        diag.push(m[top][top].abs());
        top += 1;
    }
    diag.resize(size, 0);
    diag
}

// ---------------------------------------------------------------------------
// Text forms
// ---------------------------------------------------------------------------

fn gen_name(i: usize) -> String {
    // a..z, then a1, b1, ...
    let letter = (b'a' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = (0..self.n_gens).map(gen_name).collect();
        let rels: Vec<String> = self.relators.iter().map(|r| render_word(r)).collect();
        write!(
            f,
            "<{} | {}>",
            gens.join(","),
            if rels.is_empty() { "-".to_string() } else { rels.join(", ") }
        )
    }
}

/// Renders a word with lowercase generators and uppercase inverses; the
/// empty word prints as `1`.
pub fn render_word(w: &Word) -> String {
    if w.0.is_empty() {
        return "1".to_string();
    }
    w.0.iter()
        .map(|l| {
            let name = gen_name(l.gen);
            if l.inverse {
                name.to_uppercase()
            } else {
                name
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a word: letters a..z (A..Z for inverses), whitespace optional,
/// `1` alone for the empty word.
pub fn parse_word(text: &str, n_gens: usize) -> Result<Word, PresentError> {
    let squeezed: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if squeezed == "1" || squeezed.is_empty() {
        return Ok(Word::empty());
    }
    let mut lits = Vec::new();
    for ch in squeezed.chars() {
        if !ch.is_ascii_alphabetic() {
            return Err(PresentError::Parse(format!("bad character `{ch}` in word")));
        }
        let inverse = ch.is_ascii_uppercase();
        let gen = (ch.to_ascii_lowercase() as u8 - b'a') as usize;
        if gen >= n_gens {
            return Err(PresentError::Parse(format!(
                "generator `{}` outside the declared alphabet",
                ch.to_ascii_lowercase()
            )));
        }
        lits.push(Lit { gen, inverse });
    }
    Ok(Word(lits))
}

/// Parses `<a,b | a b A B, a a b>`; `-` or nothing after the bar means no
/// relators.
pub fn parse_presentation(text: &str) -> Result<Presentation, PresentError> {
    let inner = text
        .trim()
        .strip_prefix('<')
        .and_then(|t| t.strip_suffix('>'))
        .ok_or_else(|| PresentError::Parse("expected <gens | relators>".into()))?;
    let (gens_part, rels_part) = inner
        .split_once('|')
        .ok_or_else(|| PresentError::Parse("expected `|` between generators and relators".into()))?;
    let gens: Vec<&str> = gens_part
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let n_gens = gens.len();
    for (i, g) in gens.iter().enumerate() {
        if *g != gen_name(i) {
            return Err(PresentError::Parse(format!(
                "generators must be named in order (expected `{}`, found `{g}`)",
                gen_name(i)
            )));
        }
    }
    let rels_part = rels_part.trim();
    let relators = if rels_part.is_empty() || rels_part == "-" {
        Vec::new()
    } else {
        rels_part
            .split(',')
            .map(|r| parse_word(r, n_gens))
            .collect::<Result<Vec<_>, _>>()?
    };
    Presentation::new(n_gens, relators)
}

/// One line of a transformation script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PresentMove {
    Q(QTransformation),
    Gen(GenTransformation),
    Prolong(String),
    Deprolong,
    Swap(usize, usize),
}

/// Applies one parsed move.
pub fn apply_move(p: &Presentation, mv: &PresentMove) -> Result<Presentation, PresentError> {
    match mv {
        PresentMove::Q(t) => apply_q(p, t),
        PresentMove::Gen(t) => apply_gen(p, t),
        PresentMove::Prolong(w) => {
            let word = parse_word(w, p.n_gens)?;
            prolong(p, &word)
        }
        PresentMove::Deprolong => deprolong(p),
        PresentMove::Swap(i, j) => swap_relators(p, *i, *j),
    }
}

/// Parses a transformation script, one move per line (1-based indices):
/// `conj 1 by "ab"`, `inv 2`, `mulR 1 2`, `mulL 1 2`, `geninv 1`,
/// `genmulR 1 2`, `genmulL 1 2`, `prolong "ab"`, `deprolong`, `swap 1 2`.
pub fn parse_present_script(text: &str) -> Result<Vec<PresentMove>, PresentError> {
    let mut moves = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err =
            |msg: String| PresentError::Parse(format!("line {}: {}", lineno + 1, msg));
        let mut words = line.split_whitespace();
        let head = words.next().unwrap();
        let index = |w: Option<&str>| -> Result<usize, PresentError> {
            let v = w
                .ok_or_else(|| err("missing index".into()))?
                .parse::<usize>()
                .map_err(|e| err(format!("bad index: {e}")))?;
            if v == 0 {
                return Err(err("indices are 1-based".into()));
            }
            Ok(v - 1)
        };
        let quoted = |line: &str| -> Result<String, PresentError> {
            let start = line.find('"').ok_or_else(|| err("expected quoted word".into()))?;
            let end = line.rfind('"').filter(|&e| e > start).ok_or_else(|| {
                err("unterminated quoted word".into())
            })?;
            Ok(line[start + 1..end].to_string())
        };
        let mv = match head {
            "conj" => {
                let i = index(words.next())?;
                if words.next() != Some("by") {
                    return Err(err("conj: expected `by \"<word>\"`".into()));
                }
                PresentMove::Q(QTransformation::Conjugate {
                    i,
                    by: Word(
                        quoted(line)?
                            .chars()
                            .filter(|c| !c.is_whitespace())
                            .map(|ch| {
                                if !ch.is_ascii_alphabetic() {
                                    return Err(err(format!("bad character `{ch}` in word")));
                                }
                                Ok(Lit {
                                    gen: (ch.to_ascii_lowercase() as u8 - b'a') as usize,
                                    inverse: ch.is_ascii_uppercase(),
                                })
                            })
                            .collect::<Result<Vec<_>, _>>()?,
                    ),
                })
            }
            "inv" => PresentMove::Q(QTransformation::Invert { i: index(words.next())? }),
            "mulR" => PresentMove::Q(QTransformation::MulRight {
                i: index(words.next())?,
                k: index(words.next())?,
            }),
            "mulL" => PresentMove::Q(QTransformation::MulLeft {
                i: index(words.next())?,
                k: index(words.next())?,
            }),
            "geninv" => PresentMove::Gen(GenTransformation::InvertGen { i: index(words.next())? }),
            "genmulR" => PresentMove::Gen(GenTransformation::MulGenRight {
                i: index(words.next())?,
                k: index(words.next())?,
            }),
            "genmulL" => PresentMove::Gen(GenTransformation::MulGenLeft {
                i: index(words.next())?,
                k: index(words.next())?,
            }),
            "prolong" => PresentMove::Prolong(quoted(line)?),
            "deprolong" => PresentMove::Deprolong,
            "swap" => PresentMove::Swap(index(words.next())?, index(words.next())?),
            other => return Err(err(format!("unknown move `{other}`"))),
        };
        moves.push(mv);
    }
    Ok(moves)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str, n: usize) -> Word {
        parse_word(s, n).unwrap()
    }

    #[test]
    fn free_reduce_cancels() {
        // a b b^-1 a^-1 c -> c
        let w = word("a b B A c", 3);
        assert_eq!(render_word(&free_reduce(&w)), "c");
        let reduced = word("a b c", 3);
        assert_eq!(free_reduce(&reduced), reduced);
        assert_eq!(free_reduce(&free_reduce(&w)), free_reduce(&w));
    }

    #[test]
    fn conjugation_stays_visible() {
        // conjugating ab by the empty word is a no-op, by w it is not
        let p = parse_presentation("<a,b | a b>").unwrap();
        let same = apply_q(&p, &QTransformation::Conjugate { i: 0, by: Word::empty() }).unwrap();
        assert_eq!(same, p);
        let conj = apply_q(
            &p,
            &QTransformation::Conjugate { i: 0, by: word("a", 2) },
        )
        .unwrap();
        assert_eq!(render_word(&conj.relators[0]), "a a b A");
    }

    #[test]
    fn inversion_is_an_involution() {
        let p = parse_presentation("<a,b | a b A B>").unwrap();
        let once = apply_q(&p, &QTransformation::Invert { i: 0 }).unwrap();
        let twice = apply_q(&once, &QTransformation::Invert { i: 0 }).unwrap();
        assert_eq!(twice, p);
    }

    #[test]
    fn multiplication_reduces() {
        // R = ab times S = b^-1 leaves a
        let p = parse_presentation("<a,b | a b, B>").unwrap();
        let out = apply_q(&p, &QTransformation::MulRight { i: 0, k: 1 }).unwrap();
        assert_eq!(render_word(&out.relators[0]), "a");
        assert!(matches!(
            apply_q(&p, &QTransformation::MulRight { i: 0, k: 0 }),
            Err(PresentError::SameRelator)
        ));
    }

    #[test]
    fn generator_moves_invert() {
        let p = parse_presentation("<a,b | a b a B>").unwrap();
        let t = GenTransformation::InvertGen { i: 0 };
        let back = apply_gen(&apply_gen(&p, &t).unwrap(), &t).unwrap();
        assert_eq!(back, p);
        // a -> a b then a -> a b^-1 restores
        let fwd = apply_gen(&p, &GenTransformation::MulGenRight { i: 0, k: 1 }).unwrap();
        // undo: substitute a -> a b^-1 by inverting b, multiplying, inverting back
        let undo1 = apply_gen(&fwd, &GenTransformation::InvertGen { i: 1 }).unwrap();
        let undo2 = apply_gen(&undo1, &GenTransformation::MulGenRight { i: 0, k: 1 }).unwrap();
        let undo3 = apply_gen(&undo2, &GenTransformation::InvertGen { i: 1 }).unwrap();
        assert_eq!(undo3, p);
    }

    #[test]
    fn prolong_deprolong_round_trip() {
        let p = parse_presentation("<a,b | a b>").unwrap();
        let grown = prolong(&p, &word("a b", 2)).unwrap();
        assert_eq!(grown.n_gens, 3);
        assert_eq!(grown.relators.len(), 2);
        assert_eq!(grown.deficiency(), p.deficiency());
        assert_eq!(render_word(&grown.relators[1]), "B A c");
        let back = deprolong(&grown).unwrap();
        assert_eq!(back, p);
        // empty prolongation word gives the relator `a`
        let grown = prolong(&p, &Word::empty()).unwrap();
        assert_eq!(render_word(&grown.relators[1]), "c");
        // last relator does not end in the last generator
        let q = parse_presentation("<a,b | b a>").unwrap();
        assert!(deprolong(&q).is_err());
        // last generator occurs in an earlier relator
        let q = parse_presentation("<a,b | a b, b>").unwrap();
        assert!(deprolong(&q).is_err());
    }

    #[test]
    fn smith_examples() {
        // <a | a^2> -> [2]
        let p = parse_presentation("<a | a a>").unwrap();
        assert_eq!(smith_invariants(&p), vec![2]);
        // no relators -> []
        let p = parse_presentation("<a,b | ->").unwrap();
        assert_eq!(smith_invariants(&p), Vec::<i64>::new());
        // rank-deficient rows keep a zero
        let p = parse_presentation("<a,b | a b, a b>").unwrap();
        assert_eq!(smith_invariants(&p), vec![1, 0]);
        // divisibility chain
        let p = parse_presentation("<a,b | a a, b b b b b b>").unwrap();
        assert_eq!(smith_invariants(&p), vec![2, 6]);
    }

    #[test]
    fn smith_invariant_under_q_moves() {
        let p = parse_presentation("<a,b | a b A B, a a b>").unwrap();
        let base = smith_invariants(&p);
        let moves: Vec<QTransformation> = vec![
            QTransformation::Conjugate { i: 0, by: word("b A", 2) },
            QTransformation::Invert { i: 1 },
            QTransformation::MulRight { i: 0, k: 1 },
            QTransformation::MulLeft { i: 1, k: 0 },
        ];
        let mut q = p;
        for t in &moves {
            q = apply_q(&q, t).unwrap();
            assert_eq!(smith_invariants(&q), base, "after {t:?}");
        }
    }

    #[test]
    fn smith_invariant_under_gen_moves() {
        let p = parse_presentation("<a,b | a a b, a B>").unwrap();
        let base = smith_invariants(&p);
        for t in [
            GenTransformation::InvertGen { i: 0 },
            GenTransformation::MulGenRight { i: 0, k: 1 },
            GenTransformation::MulGenLeft { i: 1, k: 0 },
        ] {
            let q = apply_gen(&p, &t).unwrap();
            assert_eq!(smith_invariants(&q), base, "after {t:?}");
        }
    }

    #[test]
    fn presentation_text_round_trip() {
        for s in ["<a,b | a b A B, a a b>", "<a | a a>", "<a,b | ->"] {
            let p = parse_presentation(s).unwrap();
            assert_eq!(format!("{p}"), s);
        }
        assert!(parse_presentation("<a,b | a c>").is_err());
        assert!(parse_presentation("no brackets").is_err());
    }

    #[test]
    fn script_parsing() {
        let text = "conj 1 by \"ab\"\ninv 2\nmulR 1 2\nprolong \"ab\"\ndeprolong\nswap 1 2\n";
        let moves = parse_present_script(text).unwrap();
        assert_eq!(moves.len(), 6);
        assert!(matches!(moves[0], PresentMove::Q(QTransformation::Conjugate { i: 0, .. })));
        assert!(matches!(moves[4], PresentMove::Deprolong));
        assert!(parse_present_script("conj 0 by \"a\"").is_err());
        assert!(parse_present_script("frob 1").is_err());
    }
}
