use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::diag::Diagnostic;
use crate::logic::{Formula, Term};
use crate::model::{
    state_pred, ComponentType, ModelSpans, PortDecl, PropertyKind, PropertySpec, SystemModel, WindowSpec,
};

use super::lexer::{lex, Tok, Token};

type PResult<T> = Result<T, Diagnostic>;

pub struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: &'a Path,
    /// First-order variables bound by enclosing quantifiers.
    bound: Vec<String>,
    /// Unbound identifiers listed here parse as constants, others as free variables.
    consts: BTreeSet<String>,
}

const KEYWORDS: &[&str] = &[
    "component", "states", "init", "port", "interaction", "property", "deadlock", "bad", "window", "where",
    "exists", "forall", "set", "in", "true", "false", "succ", "inf", "sup", "even", "odd", "mod",
];

impl<'a> Parser<'a> {
    pub fn new(text: &str, file: &'a Path) -> PResult<Parser<'a>> {
        Ok(Parser { toks: lex(text, file)?, pos: 0, file, bound: Vec::new(), consts: BTreeSet::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error("syntax", msg, Some(self.toks[self.pos].span(self.file)))
    }

    fn expected(&self, what: &str) -> Diagnostic {
        self.err_here(format!("expected {what}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(&format!("`{}`", t.text())))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.expected("identifier")),
        }
    }

    fn number(&mut self) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.expected("number")),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.expected("string")),
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    // ---- formulas ----

    pub fn formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn unary(&mut self) -> PResult<Formula> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_kw("exists") || self.is_kw("forall") {
            return self.quantifier();
        }
        self.primary()
    }

    fn quantifier(&mut self) -> PResult<Formula> {
        let existential = self.is_kw("exists");
        self.bump();
        let second_order = self.is_kw("set");
        if second_order {
            self.bump();
        }
        let mut names = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            names.push(self.ident()?);
        }
        self.expect(Tok::Dot)?;
        if !second_order {
            self.bound.extend(names.iter().cloned());
        }
        let body = self.formula();
        if !second_order {
            self.bound.truncate(self.bound.len() - names.len());
        }
        let mut f = body?;
        for v in names.into_iter().rev() {
            f = match (existential, second_order) {
                (true, false) => Formula::exists(v, f),
                (false, false) => Formula::forall(v, f),
                (true, true) => Formula::exists_set(v, f),
                (false, true) => Formula::forall_set(v, f),
            };
        }
        Ok(f)
    }

    fn primary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) => match s.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::True)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::False)
                }
                "inf" | "sup" | "even" | "odd" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let t = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok(match s.as_str() {
                        "inf" => Formula::Inf(t),
                        "sup" => Formula::Sup(t),
                        "even" => Formula::Mod(t, 2, 0),
                        _ => Formula::Mod(t, 2, 1),
                    })
                }
                "mod" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let t = self.term()?;
                    self.expect(Tok::Comma)?;
                    let k = self.number()?;
                    self.expect(Tok::Comma)?;
                    let l_tok = self.pos;
                    let l = self.number()?;
                    self.expect(Tok::RParen)?;
                    if k == 0 || l >= k || k > u32::MAX as u64 {
                        return Err(Diagnostic::error(
                            "syntax",
                            "mod(t, k, l) needs 0 <= l < k",
                            Some(self.toks[l_tok].span(self.file)),
                        ));
                    }
                    Ok(Formula::Mod(t, k as u32, l as u32))
                }
                "succ" => self.comparison(),
                _ if KEYWORDS.contains(&s.as_str()) => Err(self.expected("formula")),
                _ => {
                    let is_pred = matches!(self.peek_at(1), Tok::LParen)
                        || (matches!(self.peek_at(1), Tok::Dot)
                            && matches!(self.peek_at(2), Tok::Ident(_))
                            && matches!(self.peek_at(3), Tok::LParen));
                    if is_pred {
                        let mut name = self.ident()?;
                        if *self.peek() == Tok::Dot {
                            self.bump();
                            name = format!("{name}.{}", self.ident()?);
                        }
                        self.expect(Tok::LParen)?;
                        let t = self.term()?;
                        self.expect(Tok::RParen)?;
                        Ok(Formula::Pred(name, t))
                    } else {
                        self.comparison()
                    }
                }
            },
            Tok::Num(_) => self.comparison(),
            _ => Err(self.expected("formula")),
        }
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let a = self.term()?;
        if self.is_kw("in") {
            self.bump();
            let x = self.ident()?;
            return Ok(Formula::SetMem(x, a));
        }
        let op = self.peek().clone();
        match op {
            Tok::Eq | Tok::Neq | Tok::Le | Tok::Lt | Tok::Ge | Tok::Gt => {
                self.bump();
            }
            _ => return Err(self.expected("comparison operator")),
        }
        let b = self.term()?;
        Ok(match op {
            Tok::Eq => Formula::Eq(a, b),
            Tok::Neq => Formula::neq(a, b),
            Tok::Le => Formula::Le(a, b),
            Tok::Lt => Formula::Lt(a, b),
            Tok::Ge => Formula::Le(b, a),
            _ => Formula::Lt(b, a),
        })
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Num(0) => {
                self.bump();
                Ok(Term::zero())
            }
            Tok::Ident(s) if s == "succ" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t.succ())
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if self.bound.contains(&name) || !self.consts.contains(&name) {
                    Ok(Term::var(name))
                } else {
                    Ok(Term::constant(name))
                }
            }
            _ => Err(self.expected("term")),
        }
    }

    // ---- models ----

    pub fn model(&mut self) -> PResult<SystemModel> {
        let mut components = Vec::new();
        let mut interaction = None;
        let mut properties = Vec::new();
        let mut windows = Vec::new();
        let mut spans = ModelSpans::default();
        // Window constants must be known before any formula is parsed, so
        // formulas are parsed in a second pass over remembered positions.
        let mut deferred: Vec<(usize, Item)> = Vec::new();
        loop {
            if self.at_eof() {
                break;
            }
            let start = self.pos;
            let span = self.toks[self.pos].span(self.file);
            if self.is_kw("component") {
                let c = self.component(&mut spans)?;
                spans.components.insert(c.name.clone(), span);
                components.push(c);
            } else if self.is_kw("interaction") {
                if interaction.is_some() {
                    return Err(self.err_here("a model has exactly one interaction declaration"));
                }
                self.bump();
                interaction = Some(span);
                deferred.push((self.pos, Item::Interaction));
                self.skip_formula()?;
                self.expect(Tok::Semi)?;
            } else if self.is_kw("property") {
                self.bump();
                if self.is_kw("deadlock") {
                    self.bump();
                    self.expect(Tok::Semi)?;
                    properties.push(PropertySpec::deadlock());
                } else if self.is_kw("bad") {
                    self.bump();
                    let name = self.string()?;
                    self.expect(Tok::Colon)?;
                    deferred.push((self.pos, Item::Property(properties.len())));
                    properties.push(PropertySpec { name, kind: PropertyKind::BadStates(Formula::False) });
                    self.skip_formula()?;
                    self.expect(Tok::Semi)?;
                } else {
                    return Err(self.expected("`deadlock` or `bad`"));
                }
                spans.properties.push(span);
            } else if self.is_kw("window") {
                self.bump();
                let name = self.string()?;
                self.expect(Tok::LParen)?;
                let mut constants = Vec::new();
                loop {
                    let c = self.ident()?;
                    self.expect(Tok::Colon)?;
                    let ty = self.ident()?;
                    constants.push((c, ty));
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RParen)?;
                self.expect_kw("where")?;
                deferred.push((self.pos, Item::Window(windows.len())));
                windows.push(WindowSpec { name, constants, constraint: Formula::True });
                self.skip_formula()?;
                self.expect(Tok::Semi)?;
                spans.windows.push(span);
            } else if components.is_empty() {
                return Err(self.expected("component declaration"));
            } else {
                return Err(self.expected("`component`, `interaction`, `property` or `window`"));
            }
            debug_assert!(self.pos > start);
        }
        if components.is_empty() {
            return Err(self.expected("component declaration"));
        }
        if interaction.is_none() {
            return Err(self.expected("interaction declaration"));
        }
        spans.interaction = interaction;
        let end = self.pos;
        let mut gamma = Formula::True;
        for (pos, item) in deferred {
            self.pos = pos;
            self.consts = match item {
                Item::Window(i) => windows[i].constants.iter().map(|(c, _)| c.clone()).collect(),
                _ => BTreeSet::new(),
            };
            let f = self.formula()?;
            self.expect(Tok::Semi)?;
            match item {
                Item::Interaction => gamma = f,
                Item::Property(i) => properties[i].kind = PropertyKind::BadStates(f),
                Item::Window(i) => windows[i].constraint = f,
            }
        }
        self.pos = end;
        self.consts.clear();
        let mut model = SystemModel { components, interaction: gamma, properties, windows, spans };
        resolve_state_names(&mut model);
        Ok(model)
    }

    /// Parses a formula only to find its end; syntax errors surface here.
    fn skip_formula(&mut self) -> PResult<()> {
        self.formula()?;
        if *self.peek() != Tok::Semi {
            return Err(self.expected("`;`"));
        }
        Ok(())
    }

    fn component(&mut self, spans: &mut ModelSpans) -> PResult<ComponentType> {
        self.expect_kw("component")?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        self.expect_kw("states")?;
        let mut states = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            states.push(self.ident()?);
        }
        self.expect_kw("init")?;
        let initial = self.ident()?;
        self.expect(Tok::Semi)?;
        let mut ports = Vec::new();
        while self.is_kw("port") {
            let span = self.toks[self.pos].span(self.file);
            self.bump();
            let port = self.ident()?;
            let rule = if *self.peek() == Tok::Colon {
                self.bump();
                let s = self.ident()?;
                self.expect(Tok::Arrow)?;
                let t = self.ident()?;
                Some((s, t))
            } else {
                None
            };
            self.expect(Tok::Semi)?;
            spans.ports.entry((name.clone(), port.clone())).or_insert(span);
            ports.push(PortDecl { name: port, rule });
        }
        if *self.peek() != Tok::RBrace {
            return Err(self.expected("`port` or `}`"));
        }
        self.bump();
        Ok(ComponentType { name, states, initial, ports })
    }
}

#[derive(Clone, Copy)]
enum Item {
    Interaction,
    Property(usize),
    Window(usize),
}

/// Qualifies unqualified state predicates whose owner type is unique.
fn resolve_state_names(model: &mut SystemModel) {
    let owners = |s: &str| -> Vec<String> {
        model.components.iter().filter(|c| c.states.iter().any(|x| x == s)).map(|c| c.name.clone()).collect()
    };
    let ports: BTreeSet<String> =
        model.components.iter().flat_map(|c| c.ports.iter().map(|p| p.name.clone())).collect();
    let resolve = |f: &Formula| {
        f.rename_preds(&|p| {
            if p.contains('.') || ports.contains(p) {
                return p.to_string();
            }
            match owners(p).as_slice() {
                [ty] => state_pred(ty, p),
                _ => p.to_string(),
            }
        })
    };
    let gamma = resolve(&model.interaction);
    let props: Vec<PropertyKind> = model
        .properties
        .iter()
        .map(|p| match &p.kind {
            PropertyKind::BadStates(f) => PropertyKind::BadStates(resolve(f)),
            k => k.clone(),
        })
        .collect();
    model.interaction = gamma;
    for (p, k) in model.properties.iter_mut().zip(props) {
        p.kind = k;
    }
}

pub fn parse_model_in(text: &str, file: impl Into<PathBuf>) -> Result<SystemModel, Vec<Diagnostic>> {
    let file = file.into();
    let mut p = Parser::new(text, &file).map_err(|d| vec![d])?;
    p.model().map_err(|d| vec![d])
}

/// Parses a standalone formula; unbound identifiers become free variables,
/// except those listed in `consts`.
pub fn parse_formula_with(text: &str, consts: &[&str]) -> Result<Formula, Diagnostic> {
    let file = PathBuf::from("<formula>");
    let mut p = Parser::new(text, &file)?;
    p.consts = consts.iter().map(|c| c.to_string()).collect();
    let f = p.formula()?;
    if !p.at_eof() {
        return Err(p.expected("end of formula"));
    }
    Ok(f)
}
