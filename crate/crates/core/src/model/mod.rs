//! Static system description: component types, interaction, properties, windows.

mod clauses;
mod validate;

use std::collections::HashMap;

use thiserror::Error;

use crate::diag::SourceSpan;
use crate::logic::Formula;

pub use clauses::{decompose, Broadcast, Clause, PortAtom, ShapeError};
pub use validate::validate_system;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown port `{0}`")]
    UnknownPort(String),
    #[error("unknown component type `{0}`")]
    UnknownType(String),
    #[error("interaction: {0}")]
    Shape(#[from] ShapeError),
    #[error("model is invalid: {0}")]
    Invalid(String),
}

/// A port declaration; `rule` is `None` for a port without transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortDecl {
    pub name: String,
    pub rule: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentType {
    pub name: String,
    pub states: Vec<String>,
    pub initial: String,
    pub ports: Vec<PortDecl>,
}

/// A transition `source --port--> target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition<'a> {
    pub source: &'a str,
    pub port: &'a str,
    pub target: &'a str,
}

impl ComponentType {
    pub fn transitions(&self) -> impl Iterator<Item = Transition<'_>> {
        self.ports.iter().filter_map(|p| {
            p.rule.as_ref().map(|(s, t)| Transition { source: s, port: &p.name, target: t })
        })
    }

    pub fn has_port(&self, port: &str) -> bool {
        self.ports.iter().any(|p| p.name == port)
    }

    /// Qualified predicate name of one of this type's states.
    pub fn state_pred(&self, state: &str) -> String {
        state_pred(&self.name, state)
    }
}

pub fn state_pred(ty: &str, state: &str) -> String {
    format!("{ty}.{state}")
}

/// Splits `Type.state` into its parts.
pub fn split_state_pred(pred: &str) -> Option<(&str, &str)> {
    pred.split_once('.')
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyKind {
    Deadlock,
    /// Bad states given by a formula over state predicates.
    BadStates(Formula),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertySpec {
    pub name: String,
    pub kind: PropertyKind,
}

impl PropertySpec {
    pub fn deadlock() -> PropertySpec {
        PropertySpec { name: "deadlock".into(), kind: PropertyKind::Deadlock }
    }
}

/// A window constraint over typed constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSpec {
    pub name: String,
    /// `(constant, component type)` in declaration order.
    pub constants: Vec<(String, String)>,
    pub constraint: Formula,
}

impl WindowSpec {
    pub fn type_of(&self, constant: &str) -> Option<&str> {
        self.constants.iter().find(|(c, _)| c == constant).map(|(_, t)| t.as_str())
    }
}

/// Source locations of model items, kept out of structural equality.
#[derive(Debug, Clone, Default)]
pub struct ModelSpans {
    pub components: HashMap<String, SourceSpan>,
    /// Keyed by `(type, port)`.
    pub ports: HashMap<(String, String), SourceSpan>,
    pub interaction: Option<SourceSpan>,
    pub properties: Vec<SourceSpan>,
    pub windows: Vec<SourceSpan>,
}

#[derive(Debug, Clone)]
pub struct SystemModel {
    pub components: Vec<ComponentType>,
    pub interaction: Formula,
    pub properties: Vec<PropertySpec>,
    pub windows: Vec<WindowSpec>,
    pub spans: ModelSpans,
}

impl PartialEq for SystemModel {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
            && self.interaction == other.interaction
            && self.properties == other.properties
            && self.windows == other.windows
    }
}

impl Eq for SystemModel {}

/// Resolution of a port to its unique transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PortRule {
    Rule { component: String, source: String, target: String },
    /// Declared port without transition; its pre/post atoms are false.
    NoRule { component: String },
}

impl PortRule {
    /// Qualified `•p` predicate, `None` for a port without rule.
    pub fn pre_pred(&self) -> Option<String> {
        match self {
            PortRule::Rule { component, source, .. } => Some(state_pred(component, source)),
            PortRule::NoRule { .. } => None,
        }
    }

    /// Qualified `p•` predicate, `None` for a port without rule.
    pub fn post_pred(&self) -> Option<String> {
        match self {
            PortRule::Rule { component, target, .. } => Some(state_pred(component, target)),
            PortRule::NoRule { .. } => None,
        }
    }

    pub fn component(&self) -> &str {
        match self {
            PortRule::Rule { component, .. } | PortRule::NoRule { component } => component,
        }
    }
}

/// The unique transition labeled by `port`.
pub fn port_pre_post(model: &SystemModel, port: &str) -> Result<PortRule, ModelError> {
    for c in &model.components {
        if let Some(decl) = c.ports.iter().find(|p| p.name == port) {
            return Ok(match &decl.rule {
                Some((s, t)) => PortRule::Rule { component: c.name.clone(), source: s.clone(), target: t.clone() },
                None => PortRule::NoRule { component: c.name.clone() },
            });
        }
    }
    Err(ModelError::UnknownPort(port.to_string()))
}

impl SystemModel {
    pub fn component(&self, name: &str) -> Option<&ComponentType> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn port_owner(&self, port: &str) -> Option<&ComponentType> {
        self.components.iter().find(|c| c.has_port(port))
    }

    pub fn is_port(&self, name: &str) -> bool {
        self.port_owner(name).is_some()
    }

    pub fn is_state_pred(&self, pred: &str) -> bool {
        split_state_pred(pred)
            .and_then(|(ty, s)| self.component(ty).map(|c| c.states.iter().any(|x| x == s)))
            .unwrap_or(false)
    }

    /// All qualified state predicates, by type then state declaration order.
    pub fn state_preds(&self) -> Vec<String> {
        self.components
            .iter()
            .flat_map(|c| c.states.iter().map(move |s| c.state_pred(s)))
            .collect()
    }

    /// Interaction clauses.
    pub fn clauses(&self) -> Result<Vec<Clause>, ModelError> {
        Ok(decompose(&self.interaction, &|p| self.is_port(p))?)
    }

    pub fn property(&self, name: &str) -> Option<&PropertySpec> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn window(&self, name: &str) -> Option<&WindowSpec> {
        self.windows.iter().find(|w| w.name == name)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::frontend::parse_model;

    pub(crate) const PHILOSOPHERS: &str = "
        component Fork { states f, b init f; port t: f -> b; port l: b -> f; }
        component Philosopher { states w, e init w; port g: w -> e; port p: e -> w; }
        interaction exists i. (g(i) & t(i) & t(succ(i))) | (p(i) & l(i) & l(succ(i)));
        property deadlock;
    ";

    #[test]
    fn port_rules() {
        let m = parse_model(PHILOSOPHERS).unwrap();
        assert_eq!(
            port_pre_post(&m, "g").unwrap(),
            PortRule::Rule { component: "Philosopher".into(), source: "w".into(), target: "e".into() }
        );
        assert_eq!(
            port_pre_post(&m, "t").unwrap(),
            PortRule::Rule { component: "Fork".into(), source: "f".into(), target: "b".into() }
        );
        assert_eq!(port_pre_post(&m, "q"), Err(ModelError::UnknownPort("q".into())));
    }

    #[test]
    fn state_predicates_are_qualified() {
        let m = parse_model(PHILOSOPHERS).unwrap();
        assert_eq!(m.state_preds(), vec!["Fork.f", "Fork.b", "Philosopher.w", "Philosopher.e"]);
        assert!(m.is_state_pred("Fork.b"));
        assert!(!m.is_state_pred("Fork.w"));
    }

    #[test]
    fn equality_ignores_spans() {
        let a = parse_model(PHILOSOPHERS).unwrap();
        let b = parse_model(&format!("\n\n{PHILOSOPHERS}")).unwrap();
        assert_eq!(a, b);
    }
}
