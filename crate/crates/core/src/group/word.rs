use std::fmt;

use crate::error::{Error, Result};

/// One letter of a word: a generator power or a commutator `[g, h] = g⁻¹h⁻¹gh`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Letter {
    Gen { index: usize, power: i64 },
    Commutator(Box<Letter>, Box<Letter>),
}

/// Composition of letters, written as maps: the last letter acts first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(pub Vec<Letter>);

impl Letter {
    pub fn inverse(&self) -> Letter {
        match self {
            Letter::Gen { index, power } => Letter::Gen { index: *index, power: -power },
            // [g, h]⁻¹ = [h, g]
            Letter::Commutator(g, h) => Letter::Commutator(h.clone(), g.clone()),
        }
    }

    /// Flattened generator powers.
    pub fn expand(&self) -> Vec<(usize, i64)> {
        match self {
            Letter::Gen { index, power } => vec![(*index, *power)],
            Letter::Commutator(g, h) => {
                let mut out = g.inverse().expand();
                out.extend(h.inverse().expand());
                out.extend(g.expand());
                out.extend(h.expand());
                out
            }
        }
    }
}

impl Word {
    pub fn parse(tokens: &[String], names: &[String]) -> Result<Word> {
        tokens.iter().map(|t| parse_letter(t.trim(), names)).collect::<Result<Vec<_>>>().map(Word)
    }

    pub fn gen(index: usize) -> Word {
        Word(vec![Letter::Gen { index, power: 1 }])
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(Letter::inverse).collect())
    }

    pub fn concat(&self, o: &Word) -> Word {
        Word(self.0.iter().chain(&o.0).cloned().collect())
    }

    /// Generator powers in written order, with cancelling neighbours merged.
    pub fn reduced(&self) -> Vec<(usize, i64)> {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for (i, e) in self.0.iter().flat_map(Letter::expand) {
            match out.last_mut() {
                Some((j, f)) if *j == i => {
                    *f += e;
                    if *f == 0 {
                        out.pop();
                    }
                }
                _ if e != 0 => out.push((i, e)),
                _ => {}
            }
        }
        out
    }

    pub fn display(&self, names: &[String]) -> String {
        self.0.iter().map(|l| letter_text(l, names)).collect::<Vec<_>>().join("·")
    }
}

fn letter_text(l: &Letter, names: &[String]) -> String {
    match l {
        Letter::Gen { index, power: 1 } => names[*index].clone(),
        Letter::Gen { index, power } => format!("{}^{power}", names[*index]),
        Letter::Commutator(g, h) => format!("[{},{}]", letter_text(g, names), letter_text(h, names)),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

fn parse_letter(t: &str, names: &[String]) -> Result<Letter> {
    if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        let split = split_top_comma(inner).ok_or_else(|| Error::Parse(format!("commutator `{t}` needs two entries")))?;
        let g = parse_letter(split.0.trim(), names)?;
        let h = parse_letter(split.1.trim(), names)?;
        return Ok(Letter::Commutator(Box::new(g), Box::new(h)));
    }
    let (name, power) = match t.rsplit_once('^') {
        Some((n, e)) => (n, e.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent in `{t}`")))?),
        None => (t, 1),
    };
    let index = names
        .iter()
        .position(|n| n == name.trim())
        .ok_or_else(|| Error::InvalidInput(format!("unknown generator `{}`", name.trim())))?;
    Ok(Letter::Gen { index, power })
}

fn split_top_comma(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["T".into(), "T1".into()]
    }

    #[test]
    fn parses_powers_and_commutators() {
        let w = Word::parse(&["T^-1".into(), "[T,T1]".into()], &names()).unwrap();
        assert_eq!(w.0[0], Letter::Gen { index: 0, power: -1 });
        assert_eq!(w.reduced(), vec![(0, -2), (1, -1), (0, 1), (1, 1)]);
        assert!(Word::parse(&["S".into()], &names()).is_err());
    }

    #[test]
    fn cancellation() {
        let w = Word::parse(&["T".into(), "T1".into(), "T1^-1".into(), "T".into()], &names()).unwrap();
        assert_eq!(w.reduced(), vec![(0, 2)]);
        let c = Word::parse(&["[T,T1]".into()], &names()).unwrap();
        assert!(c.concat(&c.inverse()).reduced().is_empty());
    }
}
