use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::{Expr, Symbol};
use crate::error::{Error, Result};

/// Declared propositions and the actions seen so far.
///
/// Propositions are indexed by declaration order and actions by first
/// occurrence, which is what [`super::embed_aka`] numbers them by.
#[derive(Clone, Debug, Default)]
pub struct Vocabulary {
    props: Vec<Symbol>,
    actions: Vec<Symbol>,
    prop_index: HashMap<String, usize>,
    action_index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_props<S: AsRef<str>>(props: &[S]) -> Result<Self> {
        let mut v = Self::new();
        for p in props {
            v.declare_prop(p.as_ref())?;
        }
        Ok(v)
    }

    pub fn declare_prop(&mut self, name: &str) -> Result<Symbol> {
        if self.action_index.contains_key(name) {
            return Err(Error::SymbolClash(name.to_string()));
        }
        if let Some(&i) = self.prop_index.get(name) {
            return Ok(self.props[i].clone());
        }
        let sym = Symbol::new(name, self.props.len() as u32);
        self.prop_index.insert(name.to_string(), self.props.len());
        self.props.push(sym.clone());
        Ok(sym)
    }

    pub fn is_prop(&self, name: &str) -> bool {
        self.prop_index.contains_key(name)
    }

    pub fn props(&self) -> &[Symbol] {
        &self.props
    }

    pub fn actions(&self) -> &[Symbol] {
        &self.actions
    }

    /// The action named `name`, registering it if new.
    pub fn action(&mut self, name: &str) -> Result<Symbol> {
        if self.prop_index.contains_key(name) {
            return Err(Error::SymbolClash(name.to_string()));
        }
        if let Some(&i) = self.action_index.get(name) {
            return Ok(self.actions[i].clone());
        }
        let sym = Symbol::new(name, self.actions.len() as u32);
        self.action_index.insert(name.to_string(), self.actions.len());
        self.actions.push(sym.clone());
        Ok(sym)
    }

    /// Parses one expression, optionally preceded by a `props p q;` prelude.
    pub fn parse(&mut self, text: &str) -> Result<Expr> {
        let mut p = Parser { src: text.as_bytes(), pos: 0, vocab: self };
        p.prelude()?;
        let e = p.sum()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }
}

/// Parses `text` with the given declared propositions; every other
/// identifier is an action.
pub fn parse<S: AsRef<str>>(text: &str, props: &[S]) -> Result<Expr> {
    Vocabulary::with_props(props)?.parse(text)
}

/// Parses a standalone program whose propositions come from its prelude.
pub fn parse_program(text: &str) -> Result<(Vocabulary, Expr)> {
    let mut v = Vocabulary::new();
    let e = v.parse(text)?;
    Ok((v, e))
}

const KEYWORDS: [&str; 3] = ["dom", "adom", "props"];

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vocab: &'a mut Vocabulary,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(start) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {}
            _ => return None,
        }
        let mut end = start + 1;
        while end < self.src.len() {
            let c = self.src[end];
            if c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' {
                end += 1;
            } else {
                break;
            }
        }
        self.pos = end;
        core::str::from_utf8(&self.src[start..end]).ok()
    }

    fn prelude(&mut self) -> Result<()> {
        let save = self.pos;
        if self.ident() != Some("props") {
            self.pos = save;
            return Ok(());
        }
        loop {
            if self.eat(b';') {
                return Ok(());
            }
            let at = self.pos;
            let name = match self.ident() {
                Some(n) if !KEYWORDS.contains(&n) => n.to_string(),
                _ => return Err(self.error("expected a proposition name or `;`")),
            };
            self.vocab.declare_prop(&name).map_err(|e| match e {
                Error::SymbolClash(_) => Error::Syntax { pos: at, msg: format!("`{name}` is already an action") },
                other => other,
            })?;
            self.eat(b',');
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.prod()?;
        while self.eat(b'+') {
            let r = self.prod()?;
            e = Expr::sum(e, r);
        }
        Ok(e)
    }

    fn prod(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while self.eat(b';') {
            let r = self.unary()?;
            e = Expr::prod(e, r);
        }
        Ok(e)
    }

    fn formula(&self, e: Expr, at: usize, what: &str) -> Result<Expr> {
        if e.is_formula() {
            Ok(e)
        } else {
            Err(Error::Syntax { pos: at, msg: format!("{what} needs a formula, found `{e}`") })
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                let at = self.pos;
                let f = self.unary()?;
                Ok(Expr::anti(self.formula(f, at, "`!`")?))
            }
            Some(b'<') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b'>')?;
                let at = self.pos;
                let f = self.unary()?;
                let f = self.formula(f, at, "`<e>`")?;
                Ok(Expr::anti(Expr::anti(Expr::prod(e, f))))
            }
            Some(b'[') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b']')?;
                let at = self.pos;
                let f = self.unary()?;
                let f = self.formula(f, at, "`[e]`")?;
                Ok(Expr::anti(Expr::prod(e, Expr::anti(f))))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Expr> {
        let at = self.pos;
        let mut e = self.atom()?;
        loop {
            if self.eat(b'*') {
                e = Expr::star(e);
            } else if self.eat(b'?') {
                e = Expr::dom(self.formula(e, at, "`?`")?);
            } else {
                return Ok(e);
            }
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(Expr::zero())
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Expr::one())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let at = self.pos;
                let name = self.ident().map(ToString::to_string).unwrap_or_default();
                match name.as_str() {
                    "dom" | "adom" => {
                        self.expect(b'(')?;
                        let e = self.sum()?;
                        self.expect(b')')?;
                        Ok(if name == "dom" { Expr::dom(e) } else { Expr::anti(e) })
                    }
                    "props" => Err(Error::Syntax { pos: at, msg: "`props` is only allowed at the start".into() }),
                    _ if self.vocab.is_prop(&name) => {
                        let i = self.vocab.prop_index[name.as_str()];
                        Ok(Expr::prop_sym(self.vocab.props[i].clone()))
                    }
                    _ => Ok(Expr::act_sym(self.vocab.action(&name)?)),
                }
            }
            Some(_) => Err(self.error("expected an expression")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Expr {
        Expr::act("a")
    }

    #[test]
    fn adom_then_action() {
        let e = parse::<&str>("adom(a);a", &[]).unwrap();
        assert_eq!(e, Expr::prod(Expr::anti(a()), a()));
    }

    #[test]
    fn dom_of_prop() {
        assert_eq!(parse("dom(p)", &["p"]).unwrap(), Expr::dom(Expr::prop("p")));
    }

    #[test]
    fn conditional_encoding() {
        let e = parse("(p;a + adom(p);b)", &["p"]).unwrap();
        let p = Expr::prop("p");
        let expected = Expr::sum(Expr::prod(p.clone(), a()), Expr::prod(Expr::anti(p), Expr::act("b")));
        assert_eq!(e, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse::<&str>("a + b;c*", &[]).unwrap();
        let expected = Expr::sum(a(), Expr::prod(Expr::act("b"), Expr::star(Expr::act("c"))));
        assert_eq!(e, expected);
        let e = parse::<&str>("a;b;c", &[]).unwrap();
        assert_eq!(e, Expr::prod(Expr::prod(a(), Expr::act("b")), Expr::act("c")));
    }

    #[test]
    fn sugar_expands() {
        let p = Expr::prop("p");
        let e = parse("<a>p", &["p"]).unwrap();
        assert_eq!(e, Expr::anti(Expr::anti(Expr::prod(a(), p.clone()))));
        let e = parse("[a]!p", &["p"]).unwrap();
        assert_eq!(e, Expr::anti(Expr::prod(a(), Expr::anti(Expr::anti(p.clone())))));
        let e = parse("p?", &["p"]).unwrap();
        assert_eq!(e, Expr::dom(p));
    }

    #[test]
    fn sugar_rejects_actions() {
        assert!(matches!(parse::<&str>("!a", &[]), Err(Error::Syntax { .. })));
        assert!(matches!(parse::<&str>("<a>b", &[]), Err(Error::Syntax { .. })));
    }

    #[test]
    fn prelude_declares_props() {
        let (v, e) = parse_program("props p q; p;a;q").unwrap();
        assert_eq!(v.props().len(), 2);
        assert_eq!(e.props().len(), 2);
        assert_eq!(e.actions().len(), 1);
    }

    #[test]
    fn clash_is_reported() {
        let mut v = Vocabulary::new();
        v.parse("a;b").unwrap();
        assert!(matches!(v.declare_prop("a"), Err(Error::SymbolClash(_))));
        assert!(v.parse("props b; b").is_err());
    }

    #[test]
    fn errors_carry_position() {
        match parse::<&str>("a + ", &[]) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse::<&str>("(a", &[]).is_err());
        assert!(parse::<&str>("a b", &[]).is_err());
    }

    #[test]
    fn indices_follow_declaration_order() {
        let mut v = Vocabulary::with_props(&["q", "p"]).unwrap();
        let e = v.parse("b;a;p;q").unwrap();
        let acts: Vec<_> = v.actions().iter().map(|s| (s.name().to_string(), s.index())).collect();
        assert_eq!(acts, [("b".to_string(), 0), ("a".to_string(), 1)]);
        let p = e.props().into_iter().find(|s| s.name() == "p").unwrap();
        assert_eq!(p.index(), 1);
    }
}
