//! Textual group specifications: `atom { "x" atom }` with atoms `Zn`, `Dn`,
//! `Sn` and `table:PATH`.

use std::fmt;
use std::path::PathBuf;

use crate::error::{Error, Result};

/// Default cap on the order of any ambient group closure or BFS runs on.
pub const DEFAULT_MAX_ORDER: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Cyclic(u64),
    Dihedral(u64),
    Symmetric(u64),
    Table(PathBuf),
}

impl Atom {
    /// Order of a structural atom, or `None` for table atoms (known only
    /// after the file is read) and on overflow past `cap`.
    fn order(&self, cap: u64) -> Option<Option<u64>> {
        Some(match *self {
            Atom::Cyclic(n) => Some(n),
            Atom::Dihedral(n) => n.checked_mul(2),
            Atom::Symmetric(n) => {
                let mut f: u64 = 1;
                for i in 2..=n {
                    f = match f.checked_mul(i) {
                        Some(v) if v <= cap => v,
                        _ => return Some(None),
                    };
                }
                Some(f)
            }
            Atom::Table(_) => return None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Cyclic(n) => write!(f, "Z{n}"),
            Atom::Dihedral(n) => write!(f, "D{n}"),
            Atom::Symmetric(n) => write!(f, "S{n}"),
            Atom::Table(p) => write!(f, "table:{}", p.display()),
        }
    }
}

/// Parsed group specification: a direct product of atoms, left factor most
/// significant in the element encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    atoms: Vec<Atom>,
    cap: u64,
}

impl GroupSpec {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Product of atom orders, `None` if a table atom is present.
    pub fn structural_order(&self) -> Option<u64> {
        let mut total: u64 = 1;
        for a in &self.atoms {
            total = total.checked_mul(a.order(self.cap)??)?;
        }
        Some(total)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    parse_group_spec_with_cap(text, DEFAULT_MAX_ORDER)
}

pub fn parse_group_spec_with_cap(text: &str, cap: u64) -> Result<GroupSpec> {
    let mut parser = Parser {
        src: text.trim(),
        pos: 0,
    };
    let mut atoms = vec![parser.atom()?];
    while !parser.at_end() {
        parser.expect('x')?;
        atoms.push(parser.atom()?);
    }

    let mut total: u64 = 1;
    for atom in &atoms {
        match atom.order(cap) {
            None => {}
            Some(None) => {
                return Err(Error::OrderCap {
                    order: format!("|{atom}| > {cap}"),
                    cap,
                })
            }
            Some(Some(o)) => {
                total = total
                    .checked_mul(o)
                    .filter(|&t| t <= cap)
                    .ok_or_else(|| Error::OrderCap {
                        order: format!("|{}| > {cap}", text.trim()),
                        cap,
                    })?;
            }
        }
    }
    Ok(GroupSpec { atoms, cap })
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        let src = self.src;
        if let Some(path) = src[self.pos..].strip_prefix("table:") {
            self.pos += "table:".len();
            // The path runs to the end or to an `x` that starts a new atom.
            let len = (0..path.len())
                .find(|&i| path[i..].starts_with('x') && starts_atom(&path[i + 1..]))
                .unwrap_or(path.len());
            if len == 0 {
                return self.err("empty table path");
            }
            self.pos += len;
            return Ok(Atom::Table(PathBuf::from(&path[..len])));
        }
        let head = match self.rest().chars().next() {
            Some(c @ ('Z' | 'D' | 'S')) => c,
            Some(c) => return self.err(format!("unexpected '{c}', expected Z, D, S or table:")),
            None => return self.err("unexpected end of input, expected an atom"),
        };
        let start = self.pos;
        self.pos += 1;
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return self.err(format!("expected an integer after '{head}'"));
        }
        let raw = &self.src[self.pos..self.pos + digits];
        self.pos += digits;
        let atom_text = &self.src[start..self.pos];
        let value: u64 = raw.parse().map_err(|_| Error::AtomOutOfRange {
            atom: atom_text.to_string(),
            value: u64::MAX,
            bound: "fits in 64 bits",
        })?;
        let (ok, bound, atom) = match head {
            'Z' => (value >= 1, "n >= 1", Atom::Cyclic(value)),
            'D' => (value >= 3, "n >= 3", Atom::Dihedral(value)),
            _ => (value >= 1, "n >= 1", Atom::Symmetric(value)),
        };
        if !ok {
            return Err(Error::AtomOutOfRange {
                atom: atom_text.to_string(),
                value,
                bound,
            });
        }
        Ok(atom)
    }
}

fn starts_atom(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some('Z' | 'D' | 'S') => chars.next().is_some_and(|c| c.is_ascii_digit()),
        _ => s.starts_with("table:"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_atoms() {
        let s = parse_group_spec("Z4").unwrap();
        assert_eq!(s.atoms(), &[Atom::Cyclic(4)]);
        assert_eq!(s.structural_order(), Some(4));
        assert_eq!(parse_group_spec("D3").unwrap().structural_order(), Some(6));
        assert_eq!(parse_group_spec("S4").unwrap().structural_order(), Some(24));
    }

    #[test]
    fn products() {
        let s = parse_group_spec("Z2xZ2").unwrap();
        assert_eq!(s.atoms(), &[Atom::Cyclic(2), Atom::Cyclic(2)]);
        assert_eq!(s.structural_order(), Some(4));
        assert_eq!(s.to_string(), "Z2xZ2");
        assert_eq!(parse_group_spec("Z2xD4xS3").unwrap().structural_order(), Some(96));
    }

    #[test]
    fn table_paths_may_contain_x() {
        let s = parse_group_spec("table:/tmp/x.txtxZ2").unwrap();
        assert_eq!(s.atoms(), &[Atom::Table("/tmp/x.txt".into()), Atom::Cyclic(2)]);
        assert_eq!(s.structural_order(), None);
        let s = parse_group_spec("Z3xtable:max.tbl").unwrap();
        assert_eq!(s.atoms()[1], Atom::Table("max.tbl".into()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_group_spec("Z4xQ2") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_group_spec(""), Err(Error::Syntax { position: 0, .. })));
        assert!(matches!(parse_group_spec("Z"), Err(Error::Syntax { position: 1, .. })));
        assert!(matches!(
            parse_group_spec("Z2x"),
            Err(Error::Syntax { position: 3, .. })
        ));
        assert!(matches!(
            parse_group_spec("Z2Z3"),
            Err(Error::Syntax { position: 2, .. })
        ));
        assert!(matches!(parse_group_spec("table:"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn parameters_are_bounded() {
        assert!(matches!(parse_group_spec("Z0"), Err(Error::AtomOutOfRange { .. })));
        assert!(matches!(parse_group_spec("D2"), Err(Error::AtomOutOfRange { .. })));
        assert!(matches!(parse_group_spec("S0"), Err(Error::AtomOutOfRange { .. })));
        assert!(matches!(
            parse_group_spec("Z99999999999999999999999"),
            Err(Error::AtomOutOfRange { .. })
        ));
    }

    #[test]
    fn order_cap() {
        assert!(matches!(parse_group_spec("S13"), Err(Error::OrderCap { .. })));
        assert!(parse_group_spec("S11").is_ok());
        assert!(matches!(
            parse_group_spec_with_cap("Z10xZ10", 99),
            Err(Error::OrderCap { .. })
        ));
        assert!(parse_group_spec_with_cap("Z10xZ10", 100).is_ok());
    }
}
