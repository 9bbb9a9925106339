//! Text syntax for graph families.
//!
//! ```text
//! family := "path" "(" INT ")"
//!         | "ray"
//!         | "star" "(" INT | "inf" ")"
//!         | "fan" "(" INT | "inf" ")"
//!         | "join" "(" family ("," family)* ")"
//!         | "joinall" "(" "paths" | "fans" ")"
//!         | "rado"
//!         | "graph6" "(" CODE ["," INT] ")"
//! ```
//!
//! Whitespace is ignored between tokens. `graph6(CODE, r)` is the finite
//! graph with that graph6 code rooted at `r` (default 0).

use super::GraphFamily;
use crate::canon::decode_graph6;
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => err(self.pos, format!("expected `{want}`, found `{c}`")),
            None => err(self.pos, format!("expected `{want}`, found end of input")),
        }
    }

    /// A run of characters allowed in names, numbers and graph6 codes.
    fn word(&mut self) -> (usize, &'a str) {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')' || c == ',')
            .unwrap_or(rest.len());
        self.pos += len;
        (start, &rest[..len])
    }

    fn size(&mut self) -> Result<usize> {
        let (at, w) = self.word();
        if w.is_empty() {
            return err(at, "expected a number");
        }
        w.parse().or_else(|_| err(at, format!("`{w}` is not a nonnegative integer")))
    }

    /// A size or `inf`.
    fn size_or_inf(&mut self) -> Result<Option<usize>> {
        let (at, w) = self.word();
        if w == "inf" {
            return Ok(None);
        }
        if w.is_empty() {
            return err(at, "expected a number or `inf`");
        }
        w.parse()
            .map(Some)
            .or_else(|_| err(at, format!("`{w}` is neither a nonnegative integer nor `inf`")))
    }

    fn family(&mut self) -> Result<GraphFamily> {
        let (at, name) = self.word();
        let f = match name {
            "ray" => GraphFamily::Ray,
            "rado" => GraphFamily::Rado,
            "path" => {
                self.expect('(')?;
                let n = self.size()?;
                self.expect(')')?;
                GraphFamily::Path(n)
            }
            "star" | "fan" => {
                self.expect('(')?;
                let n = self.size_or_inf()?;
                self.expect(')')?;
                match (name, n) {
                    ("star", Some(n)) => GraphFamily::Star(n),
                    ("star", None) => GraphFamily::StarInf,
                    (_, Some(n)) => GraphFamily::Fan(n),
                    (_, None) => GraphFamily::FanInf,
                }
            }
            "join" => {
                self.expect('(')?;
                let mut parts = vec![self.family()?];
                while self.peek() == Some(',') {
                    self.pos += 1;
                    parts.push(self.family()?);
                }
                self.expect(')')?;
                GraphFamily::Join(parts)
            }
            "joinall" => {
                self.expect('(')?;
                let (wat, w) = self.word();
                let f = match w {
                    "paths" => GraphFamily::JoinAllPaths,
                    "fans" => GraphFamily::JoinAllFans,
                    _ => return err(wat, format!("expected `paths` or `fans`, found `{w}`")),
                };
                self.expect(')')?;
                f
            }
            "graph6" => {
                self.expect('(')?;
                let (cat, code) = self.word();
                let g = decode_graph6(code).or_else(|e| err(cat, e.to_string()))?;
                let mut root = 0;
                if self.peek() == Some(',') {
                    self.pos += 1;
                    let rat = self.pos;
                    root = self.size()?;
                    if root >= g.n() {
                        return err(rat, format!("root {root} out of range for {} vertices", g.n()));
                    }
                }
                self.expect(')')?;
                GraphFamily::Finite(g.with_root(root))
            }
            "" => {
                return match self.peek() {
                    Some(c) => err(at, format!("expected a family name, found `{c}`")),
                    None => err(at, "expected a family name, found end of input"),
                }
            }
            _ => return err(at, format!("unknown family `{name}`")),
        };
        Ok(f)
    }
}

/// Parses a family term; errors carry the byte offset of the problem.
pub fn parse_family(src: &str) -> Result<GraphFamily> {
    let mut p = Parser { src, pos: 0 };
    let f = p.family()?;
    if let Some(c) = p.peek() {
        return err(p.pos, format!("unexpected `{c}` after the family"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms() {
        assert_eq!(parse_family("path(5)").unwrap(), GraphFamily::Path(5));
        assert_eq!(parse_family(" star ( inf ) ").unwrap(), GraphFamily::StarInf);
        assert_eq!(
            parse_family("join(ray, star(3))").unwrap(),
            GraphFamily::Join(vec![GraphFamily::Ray, GraphFamily::Star(3)])
        );
        assert_eq!(parse_family("joinall(fans)").unwrap(), GraphFamily::JoinAllFans);
        assert_eq!(parse_family("fan(7)").unwrap(), GraphFamily::Fan(7));
        assert_eq!(parse_family("rado").unwrap(), GraphFamily::Rado);
        match parse_family("graph6(Bw, 1)").unwrap() {
            GraphFamily::Finite(g) => {
                assert_eq!((g.n(), g.root(), g.edge_count()), (3, 1, 3));
            }
            f => panic!("{f:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["path(5)", "ray", "star(inf)", "fan(2)", "join(ray,join(rado,star(0)))", "joinall(paths)"] {
            let f = parse_family(s).unwrap();
            assert_eq!(parse_family(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn error_positions() {
        let pos = |s: &str| match parse_family(s) {
            Err(Error::Parse { pos, .. }) => pos,
            r => panic!("{s}: {r:?}"),
        };
        assert_eq!(pos("path(x)"), 5);
        assert_eq!(pos("join(ray, strap(2))"), 10);
        assert_eq!(pos("ray ray"), 4);
        assert_eq!(pos("star(3"), 6);
        assert_eq!(pos("joinall(trees)"), 8);
        assert_eq!(pos(""), 0);
    }
}
