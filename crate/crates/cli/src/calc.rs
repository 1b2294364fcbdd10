//! Expressions over wreath product elements.
//!
//! ```text
//! expr  := power ('*' power)*
//! power := atom ('^' integer)?
//! atom  := name | 'e' | '(' expr ')'
//!        | 'inv' '(' expr ')' | 'conj' '(' expr ',' expr ')' | 'comm' '(' expr ',' expr ')'
//! ```
//!
//! `conj(x, y)` is `y x y⁻¹` and `comm(x, y)` is `x y x⁻¹ y⁻¹`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use stabdyn::group::{FiniteGroup, GroupDocument};
use stabdyn::wreath::{Wreath, WreathElement};
use stabdyn::SCHEMA_VERSION;

/// A base group given by builtin name or by table.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum GroupSource {
    Name(String),
    Table(GroupDocument),
}

impl GroupSource {
    pub fn load(self) -> Result<FiniteGroup, String> {
        match self {
            GroupSource::Name(name) => FiniteGroup::builtin(&name).map_err(|e| e.to_string()),
            GroupSource::Table(doc) => FiniteGroup::from_document(doc).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct CalcInput {
    pub group: GroupSource,
    pub n: usize,
    #[serde(default)]
    pub elements: BTreeMap<String, WreathElement>,
    pub expressions: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct CalcEntry {
    pub expression: String,
    pub value: WreathElement,
    pub order: u64,
}

#[derive(Debug, Serialize)]
pub struct CalcReport {
    pub schema_version: u32,
    pub group_order: usize,
    pub n: usize,
    pub results: Vec<CalcEntry>,
}

pub fn evaluate(input: CalcInput) -> Result<CalcReport, String> {
    let g = input.group.load()?;
    let w = Wreath::new(&g, input.n);
    for (name, x) in &input.elements {
        w.check(x).map_err(|e| format!("element {name}: {e}"))?;
        if name == "e" {
            return Err("the name e is reserved for the identity".into());
        }
    }
    let mut results = Vec::with_capacity(input.expressions.len());
    for text in &input.expressions {
        let mut p = Parser { src: text.as_bytes(), pos: 0, w: &w, vars: &input.elements };
        let value = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(format!("{text:?}: unexpected input at offset {}", p.pos));
        }
        let order = element_order(&w, &value);
        results.push(CalcEntry { expression: text.clone(), value, order });
    }
    Ok(CalcReport { schema_version: SCHEMA_VERSION, group_order: g.order(), n: input.n, results })
}

fn element_order(w: &Wreath, x: &WreathElement) -> u64 {
    let id = w.identity();
    let mut y = x.clone();
    let mut k = 1;
    while y != id {
        y = w.mul(&y, x).expect("same ambient");
        k += 1;
    }
    k
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    w: &'a Wreath<'a>,
    vars: &'a BTreeMap<String, WreathElement>,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!("expected {:?} at offset {}", c as char, self.pos))
        }
    }

    fn expr(&mut self) -> Result<WreathElement, String> {
        let mut acc = self.power()?;
        while self.eat(b'*') {
            let rhs = self.power()?;
            acc = self.w.mul(&acc, &rhs).map_err(|e| e.to_string())?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<WreathElement, String> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let k: i64 = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| format!("bad exponent at offset {start}"))?;
        let b = if k < 0 { self.w.inv(&base) } else { base };
        let mut out = self.w.identity();
        for _ in 0..k.unsigned_abs() {
            out = self.w.mul(&out, &b).map_err(|e| e.to_string())?;
        }
        Ok(out)
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<WreathElement, String> {
        if self.eat(b'(') {
            let x = self.expr()?;
            self.expect(b')')?;
            return Ok(x);
        }
        let at = self.pos;
        let name = self.ident().ok_or_else(|| format!("expected an operand at offset {at}"))?;
        match name.as_str() {
            "e" => Ok(self.w.identity()),
            "inv" => {
                self.expect(b'(')?;
                let x = self.expr()?;
                self.expect(b')')?;
                Ok(self.w.inv(&x))
            }
            "conj" | "comm" => {
                self.expect(b'(')?;
                let x = self.expr()?;
                self.expect(b',')?;
                let y = self.expr()?;
                self.expect(b')')?;
                let r = if name == "conj" { self.w.conj(&x, &y) } else { self.w.comm(&x, &y) };
                r.map_err(|e| e.to_string())
            }
            _ => self.vars.get(&name).cloned().ok_or_else(|| format!("unknown element {name:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use stabdyn::perm::Permutation;

    fn input(exprs: &[&str]) -> CalcInput {
        let mut elements = BTreeMap::new();
        elements.insert(
            "x".to_string(),
            WreathElement { g: vec![1, 0, 0], sigma: Permutation::cycle(3, &[0, 1, 2]).unwrap() },
        );
        elements.insert(
            "y".to_string(),
            WreathElement { g: vec![0, 2, 1], sigma: Permutation::transposition(3, 0, 1).unwrap() },
        );
        CalcInput {
            group: GroupSource::Name("Z3".into()),
            n: 3,
            elements,
            expressions: exprs.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn identities_hold() {
        let r = evaluate(input(&["x * inv(x)", "x^-1 * x", "conj(x, y) * y * inv(x) * inv(y)", "e"])).unwrap();
        let g = FiniteGroup::cyclic(3);
        let id = Wreath::new(&g, 3).identity();
        for entry in &r.results {
            assert_eq!(entry.value, id, "{}", entry.expression);
            assert_eq!(entry.order, 1);
        }
    }

    #[test]
    fn commutator_expands() {
        let r = evaluate(input(&["comm(x, y)", "x*y*x^-1*y^-1", "(x*y)^3"])).unwrap();
        assert_eq!(r.results[0].value, r.results[1].value);
        assert!(r.results[2].order >= 1);
    }

    #[test]
    fn errors_are_reported() {
        assert!(evaluate(input(&["z"])).is_err());
        assert!(evaluate(input(&["x *"])).is_err());
        assert!(evaluate(input(&["x y"])).is_err());
        assert!(evaluate(input(&["conj(x)"])).is_err());
    }
}
